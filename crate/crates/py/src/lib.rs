//! Python bindings: the type language, the contract typer, and the
//! composition engine, packaged as the `remodel_check_py` module.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use remodel_core::remodel::parse_model;
use remodel_core::{
    self as rcore, compose, match_type, normalize, parse_fixture_str, parse_type_str, substitute,
    BindingSet, Hierarchy, NamedCoroutine, Outcome, ThetaItem,
};
use std::collections::BTreeMap;

fn value_error(message: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(message.to_string())
}

/// Builds a hierarchy from a child-to-parent mapping.
fn hierarchy_from(map: Option<BTreeMap<String, String>>) -> PyResult<Hierarchy> {
    let mut hierarchy = Hierarchy::new();
    if let Some(map) = map {
        for (child, parent) in map {
            if !hierarchy.add(&child, &parent) {
                return Err(value_error(format!(
                    "subtype cycle involving {} and {}",
                    child, parent
                )));
            }
        }
    }
    Ok(hierarchy)
}

// ---------------------------------------------------------------------------
// Type
// ---------------------------------------------------------------------------

/// A type of the coroutine type language.
#[pyclass(name = "Type", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq, Eq)]
struct TypePy {
    inner: rcore::TypeExpr,
}

/// A value bound by a successful match: a type for a type variable, an
/// integer for a length variable.
#[derive(IntoPyObject)]
enum MatchValue {
    Ty(TypePy),
    Len(u32),
}

#[derive(FromPyObject)]
enum BindingIn {
    Ty(TypePy),
    Len(u32),
}

#[pymethods]
impl TypePy {
    /// Parses a type from its textual form, e.g. `[Store; <Store, CurrentStore>]`.
    #[staticmethod]
    fn parse(source: &str) -> PyResult<TypePy> {
        parse_type_str(source)
            .map(|inner| TypePy { inner })
            .map_err(value_error)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Type({})", self.inner)
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.inner.to_string().hash(&mut h);
        h.finish()
    }

    #[getter]
    fn is_void(&self) -> bool {
        self.inner.is_void()
    }

    #[getter]
    fn is_coroutine(&self) -> bool {
        self.inner.is_coroutine()
    }

    /// The receive and yield parts, when this is a coroutine type.
    #[getter]
    fn parts(&self) -> Option<(TypePy, TypePy)> {
        self.inner.as_coroutine().map(|(r, y)| {
            (
                TypePy { inner: r.clone() },
                TypePy { inner: y.clone() },
            )
        })
    }

    fn normalize(&self) -> TypePy {
        TypePy {
            inner: normalize(&self.inner),
        }
    }

    fn head(&self) -> PyResult<TypePy> {
        rcore::head(&self.inner)
            .map(|inner| TypePy { inner })
            .map_err(value_error)
    }

    fn tail(&self) -> PyResult<TypePy> {
        rcore::tail(&self.inner)
            .map(|inner| TypePy { inner })
            .map_err(value_error)
    }

    /// Matches this type against a pattern; `None` on failure, otherwise
    /// the variable bindings.
    #[pyo3(signature = (pattern, hierarchy=None))]
    fn matches(
        &self,
        pattern: &TypePy,
        hierarchy: Option<BTreeMap<String, String>>,
    ) -> PyResult<Option<BTreeMap<String, MatchValue>>> {
        let hierarchy = hierarchy_from(hierarchy)?;
        match match_type(&self.inner, &pattern.inner, &hierarchy) {
            BindingSet::Failure => Ok(None),
            BindingSet::Bindings(map) => Ok(Some(
                map.into_iter()
                    .map(|(name, bound)| {
                        let value = match bound {
                            rcore::Bound::Ty(t) => MatchValue::Ty(TypePy { inner: t }),
                            rcore::Bound::Len(n) => MatchValue::Len(n),
                        };
                        (name, value)
                    })
                    .collect(),
            )),
        }
    }

    /// Replaces bound variables; bindings map names to types or lengths.
    #[pyo3(signature = (bindings, hierarchy=None))]
    fn substitute(
        &self,
        bindings: BTreeMap<String, BindingIn>,
        hierarchy: Option<BTreeMap<String, String>>,
    ) -> PyResult<TypePy> {
        let map: BTreeMap<String, rcore::Bound> = bindings
            .into_iter()
            .map(|(name, value)| {
                let bound = match value {
                    BindingIn::Ty(t) => rcore::Bound::Ty(t.inner),
                    BindingIn::Len(n) => rcore::Bound::Len(n),
                };
                (name, bound)
            })
            .collect();
        substitute(
            &self.inner,
            &BindingSet::Bindings(map),
            &hierarchy_from(hierarchy)?,
        )
        .map(|inner| TypePy { inner })
        .map_err(value_error)
    }
}

// ---------------------------------------------------------------------------
// Typed models
// ---------------------------------------------------------------------------

/// One operation contract with its inferred coroutine type.
#[pyclass(frozen)]
struct ContractPy {
    #[pyo3(get)]
    service: String,
    #[pyo3(get)]
    operation: String,
    ty: rcore::TypeExpr,
}

#[pymethods]
impl ContractPy {
    #[getter(r#type)]
    fn ty(&self) -> TypePy {
        TypePy {
            inner: self.ty.clone(),
        }
    }

    fn __repr__(&self) -> String {
        format!("Contract({}::{}: {})", self.service, self.operation, self.ty)
    }
}

/// The result of typing a model: contracts, diagnostics, and the declared
/// subtype hierarchy as a child-to-parent mapping.
#[pyclass(frozen)]
struct TypedModelPy {
    #[pyo3(get)]
    diagnostics: Vec<String>,
    #[pyo3(get)]
    has_errors: bool,
    #[pyo3(get)]
    hierarchy: BTreeMap<String, String>,
    contracts: Vec<(String, String, rcore::TypeExpr)>,
}

#[pymethods]
impl TypedModelPy {
    #[getter]
    fn contracts(&self) -> Vec<ContractPy> {
        self.contracts
            .iter()
            .map(|(service, operation, ty)| ContractPy {
                service: service.clone(),
                operation: operation.clone(),
                ty: ty.clone(),
            })
            .collect()
    }
}

/// Parses a requirement model and infers one coroutine type per contract.
#[pyfunction]
fn type_model(source: &str) -> PyResult<TypedModelPy> {
    let model = parse_model(source).map_err(value_error)?;
    let typed = rcore::type_model(&model);
    Ok(TypedModelPy {
        diagnostics: typed.diagnostics.iter().map(|d| d.to_string()).collect(),
        has_errors: typed.has_errors(),
        hierarchy: typed
            .hierarchy
            .iter()
            .map(|(child, parent)| (child.to_string(), parent.to_string()))
            .collect(),
        contracts: typed
            .contracts
            .into_iter()
            .map(|c| (c.service, c.operation, c.ty))
            .collect(),
    })
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

/// The result of a composition run.
#[pyclass(frozen)]
struct ReportPy {
    /// "composed", "deadlock", or "fuel-exhausted".
    #[pyo3(get)]
    outcome: String,
    /// The composed type, when the run composed.
    #[pyo3(get)]
    result: Option<String>,
    #[pyo3(get)]
    order: Vec<String>,
    /// (rule, actor, detail) per step.
    #[pyo3(get)]
    trace: Vec<(String, Option<String>, String)>,
    /// Unconsumed yields, when the run deadlocked.
    #[pyo3(get)]
    external: Vec<String>,
    /// (name, type) of participants still demanding input on deadlock.
    #[pyo3(get)]
    waiting: Vec<(String, String)>,
}

#[pymethods]
impl ReportPy {
    fn __repr__(&self) -> String {
        match &self.result {
            Some(r) => format!("Report({}: {})", self.outcome, r),
            None => format!("Report({})", self.outcome),
        }
    }
}

fn report_from(report: rcore::ComposeReport) -> ReportPy {
    let (external, waiting) = match &report.outcome {
        Outcome::Deadlock { external, waiting } => (
            external.iter().map(|t| t.to_string()).collect(),
            waiting
                .iter()
                .map(|w| (w.name.clone(), w.ty.to_string()))
                .collect(),
        ),
        _ => (Vec::new(), Vec::new()),
    };
    ReportPy {
        outcome: match &report.outcome {
            Outcome::Composed(_) => "composed".to_string(),
            Outcome::Deadlock { .. } => "deadlock".to_string(),
            Outcome::FuelExhausted => "fuel-exhausted".to_string(),
        },
        result: match &report.outcome {
            Outcome::Composed(ty) => Some(ty.to_string()),
            _ => None,
        },
        order: report.order,
        trace: report
            .trace
            .into_iter()
            .map(|ev| (ev.rule.as_str().to_string(), ev.actor, ev.detail))
            .collect(),
        external,
        waiting,
    }
}

/// Pulls the named members out of `singles` and appends them as groups.
fn arrange(
    mut singles: Vec<NamedCoroutine>,
    groups: Option<Vec<Vec<String>>>,
) -> PyResult<Vec<ThetaItem>> {
    let mut grouped = Vec::new();
    for names in groups.unwrap_or_default() {
        let mut members = Vec::new();
        for name in names {
            match singles.iter().position(|p| p.name == name) {
                Some(i) => members.push(singles.remove(i)),
                None => {
                    return Err(value_error(format!(
                        "group member '{}' is not among the participants",
                        name
                    )))
                }
            }
        }
        grouped.push(members);
    }
    let mut items: Vec<ThetaItem> = singles.into_iter().map(ThetaItem::Single).collect();
    items.extend(grouped.into_iter().map(ThetaItem::Group));
    Ok(items)
}

/// Composes named coroutines; `items` is a list of (name, Type) pairs.
#[pyfunction]
#[pyo3(name = "compose", signature = (items, *, groups=None, fuel=10_000, hierarchy=None))]
fn compose_py(
    items: Vec<(String, TypePy)>,
    groups: Option<Vec<Vec<String>>>,
    fuel: u64,
    hierarchy: Option<BTreeMap<String, String>>,
) -> PyResult<ReportPy> {
    let singles: Vec<NamedCoroutine> = items
        .into_iter()
        .map(|(name, ty)| NamedCoroutine::new(&name, ty.inner))
        .collect();
    let items = arrange(singles, groups)?;
    let report = compose(items, &hierarchy_from(hierarchy)?, fuel).map_err(value_error)?;
    Ok(report_from(report))
}

/// Parses a fixture of `name: type` lines.
#[pyfunction]
fn parse_fixture(source: &str) -> PyResult<Vec<(String, TypePy)>> {
    Ok(parse_fixture_str(source)
        .map_err(value_error)?
        .into_iter()
        .map(|(name, inner)| (name, TypePy { inner }))
        .collect())
}

/// Types a model and composes its contracts in declaration order (or the
/// `select` order), with `groups` appended at the end.
#[pyfunction]
#[pyo3(signature = (source, *, select=None, groups=None, fuel=10_000))]
fn check_model(
    source: &str,
    select: Option<Vec<String>>,
    groups: Option<Vec<Vec<String>>>,
    fuel: u64,
) -> PyResult<ReportPy> {
    let model = parse_model(source).map_err(value_error)?;
    let typed = rcore::type_model(&model);
    if typed.has_errors() {
        return Err(value_error(
            typed
                .diagnostics
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("\n"),
        ));
    }
    let mut singles: Vec<NamedCoroutine> = Vec::new();
    match select {
        Some(names) => {
            for name in names {
                let c = typed
                    .contracts
                    .iter()
                    .find(|c| c.operation == name)
                    .ok_or_else(|| value_error(format!("unknown contract '{}'", name)))?;
                singles.push(NamedCoroutine::new(&c.operation, c.ty.clone()));
            }
        }
        None => {
            for c in &typed.contracts {
                singles.push(NamedCoroutine::new(&c.operation, c.ty.clone()));
            }
        }
    }
    let items = arrange(singles, groups)?;
    let report = compose(items, &typed.hierarchy, fuel).map_err(value_error)?;
    Ok(report_from(report))
}

#[pymodule]
fn remodel_check_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<TypePy>()?;
    m.add_class::<ContractPy>()?;
    m.add_class::<TypedModelPy>()?;
    m.add_class::<ReportPy>()?;
    m.add_function(wrap_pyfunction!(type_model, m)?)?;
    m.add_function(wrap_pyfunction!(compose_py, m)?)?;
    m.add_function(wrap_pyfunction!(parse_fixture, m)?)?;
    m.add_function(wrap_pyfunction!(check_model, m)?)?;
    Ok(())
}

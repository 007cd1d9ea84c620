//! Semantic analysis of a parsed model: actor hierarchy, field visibility,
//! and well-formedness checks.

use super::ast::{Model, TypeRef};
use super::{Diagnostic, Severity};
use crate::types::Hierarchy;
use std::collections::BTreeMap;

/// Resolved declarations of a model.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    /// Subtype hierarchy declared by `Actor X extends Y`.
    pub hierarchy: Hierarchy,
    /// Fields of `System` blocks, visible to every contract.
    pub system_fields: Vec<String>,
    /// Fields per `Service` block, visible to that service's contracts.
    pub service_fields: BTreeMap<String, Vec<String>>,
    /// Enumeration declarations encountered in field or parameter types.
    pub enums: BTreeMap<String, Vec<String>>,
    pub diagnostics: Vec<Diagnostic>,
}

impl SymbolTable {
    pub fn has_errors(&self) -> bool {
        self.diagnostics
            .iter()
            .any(|d| d.severity == Severity::Error)
    }

    /// All field names visible to a contract of `service`.
    pub fn visible_fields(&self, service: &str) -> Vec<String> {
        let mut fields = self.system_fields.clone();
        if let Some(own) = self.service_fields.get(service) {
            fields.extend(own.iter().cloned());
        }
        fields
    }
}

pub fn analyze(model: &Model) -> SymbolTable {
    let mut table = SymbolTable::default();
    let mut diags = Vec::new();

    // Actors: names first, then inheritance links.
    let mut actor_names: Vec<&str> = Vec::new();
    for actor in &model.actors {
        if actor_names.contains(&actor.name.as_str()) {
            diags.push(Diagnostic::error(
                actor.span.line,
                actor.span.col,
                format!("actor {} is declared twice", actor.name),
            ));
        } else {
            actor_names.push(&actor.name);
        }
    }
    for actor in &model.actors {
        let Some(parent) = &actor.extends else { continue };
        if !actor_names.contains(&parent.as_str()) {
            diags.push(Diagnostic::error(
                actor.span.line,
                actor.span.col,
                format!("{} extends unknown actor {}", actor.name, parent),
            ));
            continue;
        }
        if !table.hierarchy.add(&actor.name, parent) {
            diags.push(Diagnostic::error(
                actor.span.line,
                actor.span.col,
                format!(
                    "{} extends {} would close an inheritance cycle",
                    actor.name, parent
                ),
            ));
        }
    }

    // Services and their fields.
    for service in &model.services {
        let duplicate = model
            .services
            .iter()
            .take_while(|s| !std::ptr::eq(*s, service))
            .any(|s| s.name == service.name);
        if duplicate {
            diags.push(Diagnostic::error(
                service.span.line,
                service.span.col,
                format!("service {} is declared twice", service.name),
            ));
            continue;
        }
        let mut names: Vec<String> = Vec::new();
        for field in &service.fields {
            if names.contains(&field.name) {
                diags.push(Diagnostic::error(
                    field.span.line,
                    field.span.col,
                    format!(
                        "property {} is declared twice in {}",
                        field.name, service.name
                    ),
                ));
                continue;
            }
            if !service.is_system && table.system_fields.contains(&field.name) {
                diags.push(Diagnostic::warning(
                    field.span.line,
                    field.span.col,
                    format!("property {} shadows a system property", field.name),
                ));
            }
            names.push(field.name.clone());
            register_enum(&field.ty, &mut table.enums, &mut diags, field.span.line);
        }
        for op in &service.operations {
            for param in &op.params {
                register_enum(&param.ty, &mut table.enums, &mut diags, op.span.line);
            }
        }
        if service.is_system {
            table.system_fields.extend(names);
        } else {
            table.service_fields.insert(service.name.clone(), names);
        }
    }

    // Contracts: resolvable service, known operation, unique names.
    let mut seen_ops: Vec<&str> = Vec::new();
    for contract in &model.contracts {
        let service = model.services.iter().find(|s| s.name == contract.service);
        match service {
            None => diags.push(Diagnostic::error(
                contract.span.line,
                contract.span.col,
                format!(
                    "contract for unknown service {} (operation {})",
                    contract.service, contract.operation
                ),
            )),
            Some(s) => {
                if !s.operations.is_empty()
                    && !s.operations.iter().any(|o| o.name == contract.operation)
                {
                    diags.push(Diagnostic::warning(
                        contract.span.line,
                        contract.span.col,
                        format!(
                            "operation {} is not listed in service {}",
                            contract.operation, contract.service
                        ),
                    ));
                }
            }
        }
        if seen_ops.contains(&contract.operation.as_str()) {
            diags.push(Diagnostic::error(
                contract.span.line,
                contract.span.col,
                format!(
                    "duplicate contract for operation {}; composition names must be unique",
                    contract.operation
                ),
            ));
        } else {
            seen_ops.push(&contract.operation);
        }
    }

    for skipped in &model.skipped {
        diags.push(Diagnostic::note(
            skipped.span.line,
            skipped.span.col,
            format!("ignoring unknown section {}", skipped.keyword),
        ));
    }

    table.diagnostics = diags;
    table
}

fn register_enum(
    ty: &TypeRef,
    enums: &mut BTreeMap<String, Vec<String>>,
    diags: &mut Vec<Diagnostic>,
    line: usize,
) {
    if let TypeRef::Enum(name, lits) = ty {
        match enums.get(name) {
            Some(existing) if existing != lits => diags.push(Diagnostic::warning(
                line,
                1,
                format!("enumeration {} is redeclared with different literals", name),
            )),
            Some(_) => {}
            None => {
                enums.insert(name.clone(), lits.clone());
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

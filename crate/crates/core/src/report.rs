//! Rendering of typing and composition results, as plain text and as JSON.

use crate::compose::{ComposeReport, Outcome};
use crate::typer::TypedModel;
use serde_json::{json, Value};

/// Stable one-word label for an outcome.
pub fn outcome_label(outcome: &Outcome) -> &'static str {
    match outcome {
        Outcome::Composed(_) => "composed",
        Outcome::Deadlock { .. } => "deadlock",
        Outcome::FuelExhausted => "fuel-exhausted",
    }
}

/// The composed type as a string, when there is one.
pub fn result_string(outcome: &Outcome) -> Option<String> {
    match outcome {
        Outcome::Composed(ty) => Some(ty.to_string()),
        _ => None,
    }
}

pub fn typing_text(model: &TypedModel) -> String {
    let mut out = String::new();
    for c in &model.contracts {
        out.push_str(&format!("{}::{}: {}\n", c.service, c.operation, c.ty));
    }
    out
}

pub fn typing_json(model: &TypedModel) -> Value {
    json!({
        "contracts": model
            .contracts
            .iter()
            .map(|c| {
                json!({
                    "service": c.service,
                    "operation": c.operation,
                    "type": c.ty.to_string(),
                })
            })
            .collect::<Vec<_>>(),
        "diagnostics": model
            .diagnostics
            .iter()
            .map(|d| {
                json!({
                    "severity": d.severity.to_string(),
                    "line": d.line,
                    "col": d.col,
                    "message": d.message,
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn compose_text(report: &ComposeReport, verbose_trace: bool) -> String {
    let mut out = String::new();
    match &report.outcome {
        Outcome::Composed(ty) => out.push_str(&format!("composed: {}\n", ty)),
        Outcome::Deadlock { external, waiting } => {
            out.push_str("deadlock\n");
            if !external.is_empty() {
                let values: Vec<String> = external.iter().map(|t| t.to_string()).collect();
                out.push_str(&format!("  unconsumed: {}\n", values.join(", ")));
            }
            for w in waiting {
                out.push_str(&format!("  waiting: {} : {}\n", w.name, w.ty));
            }
        }
        Outcome::FuelExhausted => out.push_str("fuel exhausted\n"),
    }
    if !report.order.is_empty() {
        out.push_str(&format!("order: {}\n", report.order.join(", ")));
    }
    if verbose_trace {
        for ev in &report.trace {
            match &ev.actor {
                Some(actor) => {
                    out.push_str(&format!("  [{}] {}: {}\n", ev.rule, actor, ev.detail))
                }
                None => out.push_str(&format!("  [{}] {}\n", ev.rule, ev.detail)),
            }
        }
    }
    out
}

pub fn compose_json(report: &ComposeReport) -> Value {
    let mut value = json!({
        "result": result_string(&report.outcome),
        "outcome": outcome_label(&report.outcome),
        "order": report.order,
        "trace": report
            .trace
            .iter()
            .map(|ev| {
                json!({
                    "rule": ev.rule.as_str(),
                    "actor": ev.actor,
                    "detail": ev.detail,
                })
            })
            .collect::<Vec<_>>(),
    });
    if let Outcome::Deadlock { external, waiting } = &report.outcome {
        value["external"] = json!(external
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>());
        value["waiting"] = json!(waiting
            .iter()
            .map(|w| json!({"name": w.name, "type": w.ty.to_string()}))
            .collect::<Vec<_>>());
    }
    value
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

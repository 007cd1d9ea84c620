//! Command-line type checker for requirement models.
//!
//! `type` infers and prints one coroutine type per operation contract,
//! `compose` runs the composition engine over the inferred (or literal)
//! types, and `check` does both and can validate the resulting activation
//! order against an expected one.
//!
//! Input is selected by extension: `.remodel` files go through the full
//! parse–type–compose pipeline, anything else is read as a fixture of
//! `name: type` lines and composed directly.
//!
//! Exit codes: 0 success, 1 unreadable or ill-formed input, 2 deadlock,
//! 3 step budget exhausted, 4 activation order mismatch.

use clap::{Args, Parser, Subcommand};
use remodel_core::remodel::{parse_model, Severity};
use remodel_core::report;
use remodel_core::typer::{type_model, TypedModel};
use remodel_core::{
    compose, first_occurrences, parse_fixture_str, ComposeReport, Hierarchy, NamedCoroutine,
    ThetaItem,
};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const DEFAULT_FUEL: u64 = 10_000;
const FUEL_ENV: &str = "REMODEL_CHECK_FUEL";

const EXIT_BAD_INPUT: u8 = 1;
const EXIT_DEADLOCK: u8 = 2;
const EXIT_FUEL: u8 = 3;
const EXIT_ORDER: u8 = 4;

#[derive(Parser)]
#[command(name = "remodel-check", version, about = "Type checker for requirement models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Infer and print the coroutine type of every contract
    Type(TypeArgs),
    /// Compose the coroutine types and print the outcome
    Compose(ComposeArgs),
    /// Type and compose a model, optionally validating the activation order
    Check(ComposeArgs),
}

#[derive(Args)]
struct TypeArgs {
    /// Model (.remodel) or fixture file
    file: PathBuf,
    /// Print machine-readable JSON instead of text
    #[arg(long)]
    json: bool,
    /// Treat warnings as errors
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ComposeArgs {
    /// Model (.remodel) or fixture file
    file: PathBuf,
    /// Print machine-readable JSON instead of text
    #[arg(long)]
    json: bool,
    /// Comma-separated participant names, in composition order
    #[arg(long, value_delimiter = ',')]
    select: Option<Vec<String>>,
    /// Participants composed together as one unit, e.g. "(a, b)"; repeatable,
    /// groups go to the end of the composition order
    #[arg(long)]
    group: Vec<String>,
    /// Maximum number of rewrite steps
    #[arg(long)]
    fuel: Option<u64>,
    /// File listing the expected first-activation order, one name per line
    #[arg(long)]
    expected_order: Option<PathBuf>,
    /// Treat warnings as errors
    #[arg(long)]
    strict: bool,
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Type(args) => cmd_type(args),
        Cmd::Compose(args) => cmd_compose(args, false),
        Cmd::Check(args) => cmd_compose(args, true),
    }
}

// ---------------------------------------------------------------------------
// Input loading
// ---------------------------------------------------------------------------

/// Participants ready for composition, however the file spelled them.
struct Loaded {
    participants: Vec<NamedCoroutine>,
    hierarchy: Hierarchy,
    /// Typing detail, present only for model input.
    typed: Option<TypedModel>,
}

fn is_model(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "remodel")
}

fn read(path: &Path) -> Result<String, u8> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {}", path.display(), e);
        EXIT_BAD_INPUT
    })
}

fn load(path: &Path, strict: bool) -> Result<Loaded, u8> {
    let src = read(path)?;
    if is_model(path) {
        let model = parse_model(&src).map_err(|d| {
            eprintln!("{}:{}", path.display(), d);
            EXIT_BAD_INPUT
        })?;
        let typed = type_model(&model);
        report_diagnostics(path, &typed, strict)?;
        let participants = typed
            .contracts
            .iter()
            .map(|c| NamedCoroutine::new(&c.operation, c.ty.clone()))
            .collect();
        Ok(Loaded {
            participants,
            hierarchy: typed.hierarchy.clone(),
            typed: Some(typed),
        })
    } else {
        let pairs = parse_fixture_str(&src).map_err(|e| {
            eprintln!("{}: {}", path.display(), e);
            EXIT_BAD_INPUT
        })?;
        Ok(Loaded {
            participants: pairs
                .into_iter()
                .map(|(name, ty)| NamedCoroutine::new(&name, ty))
                .collect(),
            hierarchy: Hierarchy::new(),
            typed: None,
        })
    }
}

/// Prints diagnostics to stderr; fails on errors, and on warnings under
/// `--strict`.
fn report_diagnostics(path: &Path, typed: &TypedModel, strict: bool) -> Result<(), u8> {
    for d in &typed.diagnostics {
        eprintln!("{}:{}", path.display(), d);
    }
    let limit = if strict {
        Severity::Warning
    } else {
        Severity::Error
    };
    if typed.diagnostics.iter().any(|d| d.severity >= limit) {
        Err(EXIT_BAD_INPUT)
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// type
// ---------------------------------------------------------------------------

fn cmd_type(args: TypeArgs) -> ExitCode {
    let loaded = match load(&args.file, args.strict) {
        Ok(l) => l,
        Err(code) => return ExitCode::from(code),
    };
    if args.json {
        let value = match &loaded.typed {
            Some(typed) => report::typing_json(typed),
            None => json!({
                "contracts": loaded
                    .participants
                    .iter()
                    .map(|p| json!({"operation": p.name, "type": p.ty.to_string()}))
                    .collect::<Vec<_>>(),
                "diagnostics": [],
            }),
        };
        println!("{}", serde_json::to_string_pretty(&value).unwrap());
    } else {
        match &loaded.typed {
            Some(typed) => print!("{}", report::typing_text(typed)),
            None => {
                for p in &loaded.participants {
                    println!("{}: {}", p.name, p.ty);
                }
            }
        }
    }
    ExitCode::SUCCESS
}

// ---------------------------------------------------------------------------
// compose / check
// ---------------------------------------------------------------------------

fn cmd_compose(args: ComposeArgs, with_typing: bool) -> ExitCode {
    match run_compose(&args, with_typing) {
        Ok(code) => code,
        Err(code) => ExitCode::from(code),
    }
}

fn run_compose(args: &ComposeArgs, with_typing: bool) -> Result<ExitCode, u8> {
    let loaded = load(&args.file, args.strict)?;
    let items = arrange(loaded.participants.clone(), args)?;
    let report = compose(items, &loaded.hierarchy, fuel(args)?).map_err(|e| {
        eprintln!("{}: {}", args.file.display(), e);
        EXIT_BAD_INPUT
    })?;

    let order_error = match &args.expected_order {
        Some(path) => check_order(path, &report)?,
        None => None,
    };

    emit(args, with_typing, &loaded, &report);
    if let Some(message) = order_error {
        eprintln!("{}: {}", args.file.display(), message);
        return Ok(ExitCode::from(EXIT_ORDER));
    }
    Ok(match report.outcome {
        remodel_core::Outcome::Composed(_) => ExitCode::SUCCESS,
        remodel_core::Outcome::Deadlock { .. } => ExitCode::from(EXIT_DEADLOCK),
        remodel_core::Outcome::FuelExhausted => ExitCode::from(EXIT_FUEL),
    })
}

fn emit(args: &ComposeArgs, with_typing: bool, loaded: &Loaded, report: &ComposeReport) {
    if args.json {
        let mut value = report::compose_json(report);
        if with_typing {
            if let Some(typed) = &loaded.typed {
                let typing = report::typing_json(typed);
                value["contracts"] = typing["contracts"].clone();
                value["diagnostics"] = typing["diagnostics"].clone();
            }
        }
        println!("{}", serde_json::to_string_pretty(&value).unwrap());
    } else {
        if with_typing {
            if let Some(typed) = &loaded.typed {
                print!("{}", report::typing_text(typed));
            }
        }
        print!("{}", report::compose_text(report, false));
    }
}

/// Applies `--select` and `--group` to the loaded participants.
fn arrange(participants: Vec<NamedCoroutine>, args: &ComposeArgs) -> Result<Vec<ThetaItem>, u8> {
    let mut singles: Vec<NamedCoroutine> = match &args.select {
        Some(names) => {
            let mut picked = Vec::new();
            for name in names {
                let name = name.trim();
                match participants.iter().find(|p| p.name == name) {
                    Some(p) => picked.push(p.clone()),
                    None => {
                        eprintln!("unknown participant '{}'", name);
                        return Err(EXIT_BAD_INPUT);
                    }
                }
            }
            picked
        }
        None => participants,
    };

    let mut groups: Vec<Vec<NamedCoroutine>> = Vec::new();
    for raw in &args.group {
        let mut members = Vec::new();
        for name in parse_group(raw)? {
            match singles.iter().position(|p| p.name == name) {
                Some(i) => members.push(singles.remove(i)),
                None => {
                    eprintln!("group member '{}' is not among the composed participants", name);
                    return Err(EXIT_BAD_INPUT);
                }
            }
        }
        groups.push(members);
    }

    let mut items: Vec<ThetaItem> = singles.into_iter().map(ThetaItem::Single).collect();
    items.extend(groups.into_iter().map(ThetaItem::Group));
    Ok(items)
}

/// `"(a, b, c)"` → the member names.
fn parse_group(raw: &str) -> Result<Vec<String>, u8> {
    let inner = raw
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| {
            eprintln!("group '{}' must be parenthesized, e.g. \"(a, b)\"", raw);
            EXIT_BAD_INPUT
        })?;
    let names: Vec<String> = inner
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        eprintln!("group '{}' has no members", raw);
        return Err(EXIT_BAD_INPUT);
    }
    Ok(names)
}

fn fuel(args: &ComposeArgs) -> Result<u64, u8> {
    if let Some(n) = args.fuel {
        return Ok(n);
    }
    match std::env::var(FUEL_ENV) {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            eprintln!("{} must be a number, got '{}'", FUEL_ENV, raw);
            EXIT_BAD_INPUT
        }),
        Err(_) => Ok(DEFAULT_FUEL),
    }
}

/// Compares the first activation of each participant against the listing
/// in `path`; `Ok(Some(message))` describes a mismatch.
fn check_order(path: &Path, report: &ComposeReport) -> Result<Option<String>, u8> {
    let expected: Vec<String> = read(path)?
        .lines()
        .map(|l| match l.find('#') {
            Some(p) => l[..p].trim().to_string(),
            None => l.trim().to_string(),
        })
        .filter(|l| !l.is_empty())
        .collect();
    let actual = first_occurrences(&report.order);
    if actual == expected {
        return Ok(None);
    }
    let detail = expected
        .iter()
        .zip(actual.iter())
        .enumerate()
        .find(|(_, (e, a))| e != a)
        .map(|(i, (e, a))| format!("at position {} expected {}, found {}", i + 1, e, a))
        .unwrap_or_else(|| {
            format!(
                "expected {} first activations, found {}",
                expected.len(),
                actual.len()
            )
        });
    Ok(Some(format!(
        "activation order mismatch: {} (expected: {}; found: {})",
        detail,
        expected.join(", "),
        actual.join(", ")
    )))
}

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rabuild::coxeter::EndsClass;
use rabuild::verify::{run_all, run_check, CheckConfig, CheckReport, Status, CHECKS};
use rabuild::{BallCenter, BuildingSpec, Chamber, Error, TypeSet};
use serde_json::{json, Value};

use crate::dot;
use crate::specfile::SpecFile;

/// Version of the JSON documents written by every command.
pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_RADIUS: usize = 3;
pub const DEFAULT_TRIALS: usize = 500;
pub const DEFAULT_SEED: u64 = 1;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    CheckFailed = 1,
    Parse = 2,
    ResourceLimit = 3,
    NotApplicable = 4,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

/// Where `--json` / `--dot` output goes; `-` is stdout.
fn is_stdout(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) if !is_stdout(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn load(path: &Path) -> Result<(SpecFile, BuildingSpec), Exit> {
    let parsed = SpecFile::load(path).and_then(|f| {
        let spec = f.building().with_context(|| format!("invalid building in {}", path.display()))?;
        Ok((f, spec))
    });
    parsed.map_err(|e| {
        eprintln!("error: {e:#}");
        Exit::Parse
    })
}

pub struct CheckArgs {
    pub spec: PathBuf,
    pub suite: String,
    pub radius: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub json: Option<PathBuf>,
}

pub fn check(args: &CheckArgs) -> Exit {
    let (file, spec) = match load(&args.spec) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let names: Vec<&str> = if args.suite == "all" {
        CHECKS.to_vec()
    } else if let Some(&n) = CHECKS.iter().find(|&&n| n == args.suite) {
        vec![n]
    } else {
        eprintln!("error: unknown suite `{}`; expected `all` or one of: {}", args.suite, CHECKS.join(", "));
        return Exit::Parse;
    };
    let radius = args.radius.or(file.radius()).unwrap_or(DEFAULT_RADIUS);
    let trials = args.trials.unwrap_or(DEFAULT_TRIALS);
    let seed = args.seed.or(file.seed()).unwrap_or(DEFAULT_SEED);
    let mut cfg = match CheckConfig::new(spec, radius, trials, seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return Exit::Parse;
        }
    };
    if let Some(f) = file.fault() {
        eprintln!("note: self-test fault {f:?} is active");
        cfg = cfg.with_fault(f);
    }
    let reports: Vec<CheckReport> = if names.len() == CHECKS.len() {
        run_all(&cfg)
    } else {
        names
            .iter()
            .map(|n| match run_check(n, &cfg) {
                Ok(r) => r,
                Err(e) => single_error(n, &cfg, &e),
            })
            .collect()
    };
    let exit = if reports.iter().any(|r| r.status == Status::Fail) {
        Exit::CheckFailed
    } else if reports.iter().any(|r| r.status == Status::ResourceLimit) {
        Exit::ResourceLimit
    } else {
        Exit::Ok
    };

    // the table goes to stderr whenever stdout carries JSON
    let json_on_stdout = args.json.as_deref().is_some_and(is_stdout);
    let table = summary(&reports, &cfg);
    if json_on_stdout {
        eprint!("{table}");
    } else {
        print!("{table}");
    }
    if let Some(path) = &args.json {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": "check",
            "spec": args.spec.display().to_string(),
            "generators": cfg.spec.diagram().names(),
            "radius": radius,
            "trials": trials,
            "seed": seed,
            "status": status_word(exit),
            "reports": reports,
        });
        let text = serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n";
        if let Err(e) = emit(Some(path), &text) {
            eprintln!("error: {e:#}");
            return Exit::Parse;
        }
    }
    exit
}

fn single_error(name: &str, cfg: &CheckConfig, e: &Error) -> CheckReport {
    let limited = matches!(e, Error::ResourceLimit { .. });
    CheckReport {
        name: name.to_string(),
        status: if limited { Status::ResourceLimit } else { Status::Fail },
        instances: 0,
        counterexamples: u64::from(!limited),
        counterexample: (!limited).then(|| json!({ "instance": Value::Null, "reason": e.to_string() })),
        note: Some(e.to_string()),
        elapsed_ms: 0,
        seed: cfg.seed,
    }
}

fn status_word(exit: Exit) -> &'static str {
    match exit {
        Exit::Ok => "pass",
        Exit::ResourceLimit => "resource_limit",
        _ => "fail",
    }
}

fn summary(reports: &[CheckReport], cfg: &CheckConfig) -> String {
    let mut s = format!(
        "radius {}  trials {}  seed {}  generators {}\n",
        cfg.radius,
        cfg.trials,
        cfg.seed,
        cfg.spec.diagram().names().join(",")
    );
    for r in reports {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::ResourceLimit => "LIMIT",
        };
        s += &format!("{:<26} {:<5} {:>10} cases {:>7} ms", r.name, status, r.instances, r.elapsed_ms);
        if let Some(n) = &r.note {
            s += &format!("  {n}");
        }
        s.push('\n');
        if let Some(reason) = r.counterexample.as_ref().and_then(|c| c.get("reason")).and_then(Value::as_str) {
            s += &format!("    counterexample: {reason}\n");
        }
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    s += &format!("{passed}/{} checks passed\n", reports.len());
    s
}

fn not_applicable(e: &Error) -> Option<&'static str> {
    match e {
        Error::NotIrreducible => Some(
            "the diagram is reducible (its non-commutation graph is disconnected), so the building is a product and the ends classification does not apply",
        ),
        Error::Spherical => {
            Some("the diagram is spherical (all generators commute), so the building is finite and has no ends")
        }
        _ => None,
    }
}

fn names(spec: &BuildingSpec, j: TypeSet) -> Vec<String> {
    j.iter().map(|i| spec.diagram().name(i).to_string()).collect()
}

pub fn ends(spec_path: &Path, json_out: Option<&Path>) -> Exit {
    let (_, spec) = match load(spec_path) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let d = spec.diagram();
    let (exit, text, doc) = match d.ends_classify() {
        Ok(EndsClass::OneEnded) => {
            (Exit::Ok, "OneEnded".to_string(), json!({ "class": "one_ended" }))
        }
        Ok(EndsClass::Partition(p)) => (
            Exit::Ok,
            format!("Partition({}, {}, {})", d.format_types(p.i0), d.format_types(p.i1), d.format_types(p.i2)),
            json!({
                "class": "partition",
                "i0": names(&spec, p.i0),
                "i1": names(&spec, p.i1),
                "i2": names(&spec, p.i2),
            }),
        ),
        Err(e) => match not_applicable(&e) {
            Some(why) => {
                eprintln!("not applicable: {why}");
                (Exit::NotApplicable, String::new(), json!({ "class": "not_applicable", "reason": why }))
            }
            None => {
                eprintln!("error: {e}");
                return Exit::Parse;
            }
        },
    };
    let json_on_stdout = json_out.is_some_and(is_stdout);
    if !text.is_empty() {
        if json_on_stdout {
            eprintln!("{text}");
        } else {
            println!("{text}");
        }
    }
    if let Some(path) = json_out {
        let mut doc = doc;
        doc["schema_version"] = json!(SCHEMA_VERSION);
        doc["command"] = json!("ends");
        let body = serde_json::to_string_pretty(&doc).expect("plain JSON") + "\n";
        if let Err(e) = emit(Some(path), &body) {
            eprintln!("error: {e:#}");
            return Exit::Parse;
        }
    }
    exit
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportWhat {
    Ball,
    Tree,
    Wings,
}

pub struct ExportArgs {
    pub spec: PathBuf,
    pub what: ExportWhat,
    pub radius: Option<usize>,
    /// Panel type for the wings export; defaults to the first generator.
    pub panel_type: Option<String>,
    pub dot: Option<PathBuf>,
}

pub fn export(args: &ExportArgs) -> Exit {
    let (file, spec) = match load(&args.spec) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let radius = args.radius.or(file.radius()).unwrap_or(DEFAULT_RADIUS);
    let center = Chamber::identity();
    let ball = match spec.ball(BallCenter::Chamber(center.clone()), radius, rabuild::verify::Limits::default().ball_cap) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return Exit::ResourceLimit;
        }
    };
    let text = match args.what {
        ExportWhat::Ball => dot::ball(&spec, &ball),
        ExportWhat::Wings => {
            let ty = match &args.panel_type {
                None => 0,
                Some(name) => match spec.diagram().index_of(name) {
                    Ok(t) => t,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return Exit::Parse;
                    }
                },
            };
            match dot::wings(&spec, &ball, &center, ty) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Exit::CheckFailed;
                }
            }
        }
        ExportWhat::Tree => match spec.diagram().ends_classify() {
            Ok(EndsClass::Partition(p)) => dot::tree(&spec, &p, &ball),
            Ok(EndsClass::OneEnded) => {
                eprintln!("not applicable: the diagram is one-ended, so there is no partition and no residue tree");
                return Exit::NotApplicable;
            }
            Err(e) => {
                eprintln!("not applicable: {}", not_applicable(&e).map_or_else(|| e.to_string(), str::to_string));
                return Exit::NotApplicable;
            }
        },
    };
    match emit(args.dot.as_deref(), &text) {
        Ok(()) => Exit::Ok,
        Err(e) => {
            eprintln!("error: {e:#}");
            Exit::Parse
        }
    }
}

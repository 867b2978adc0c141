//! The `polyflow` command line. Results go to stdout as JSON, diagnostics
//! to stderr. Exit status: 0 success, 1 a run that did not return, 2 bad
//! input, 3 a broken internal invariant.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::double::{run_trajectory, TrajOutcome};
use crate::dsl::{self, Diagram};
use crate::error::Error;
use crate::laws::law_suite;
use crate::para::{factorial_program, FACTORIAL_BOXES};
use crate::pointwise::{ElemIndex, FiniteDomain};
use crate::semantics::{eval_operational, eval_program, factorial_fillers, Filler, Outcome, RunOptions};

pub const FUEL_ENV: &str = "POLYFLOW_FUEL_DEFAULT";
pub const FUEL_DEFAULT: u64 = 100_000;

#[derive(Debug, Parser)]
#[command(name = "polyflow", version, about = "Check, nest, run and trace control-flow wiring diagrams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    Factorial,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a diagram and report its shapes.
    Check { file: PathBuf },
    /// Nest the diagram INNER into box SLOT of OUTER.
    Compose {
        outer: PathBuf,
        slot: String,
        inner: PathBuf,
        /// Write the composite here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pass one input through a program.
    Run {
        file: Option<PathBuf>,
        #[arg(long)]
        fillers: Option<PathBuf>,
        /// Input element as JSON, e.g. '{"N":6}'.
        #[arg(long)]
        input: String,
        /// Body routings allowed before giving up.
        #[arg(long)]
        fuel: Option<u64>,
        #[arg(long, value_enum)]
        builtin: Option<Builtin>,
        /// Stop with Diverged when a box is re-entered in a state seen before.
        #[arg(long)]
        exact: bool,
    },
    /// Trace the control regions visited from one input, by segmentation.
    Traj {
        file: PathBuf,
        #[arg(long)]
        fillers: PathBuf,
        /// Start element as JSON.
        #[arg(long)]
        start: String,
        #[arg(long, default_value_t = 10_000)]
        max: usize,
        /// Every label ranges over 0..DOMAIN.
        #[arg(long, default_value_t = 4)]
        domain: usize,
    },
    /// Run the seeded law suites.
    Laws {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub code: i32,
    pub stdout: String,
    pub stderr: Option<String>,
}

enum Failure {
    Io { path: PathBuf, message: String },
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

type Flow<T> = std::result::Result<T, Failure>;

/// Whether an engine error is the user's input being wrong rather than a
/// broken invariant.
pub fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse { .. }
            | Error::Validation { .. }
            | Error::IllFormedElem(_)
            | Error::IllFormedStart(_)
            | Error::UnknownPrimitive(_)
            | Error::BoxMismatch(_)
            | Error::IndexOutOfRange { .. }
            | Error::DomainTooLarge { .. }
    )
}

impl Failure {
    fn reply(self) -> Reply {
        let (code, body, diag) = match self {
            Failure::Io { path, message } => {
                let path = path.display().to_string();
                (2, json!({"kind": "io", "path": path, "message": message}), format!("{path}: {message}"))
            }
            Failure::Usage(message) => (2, json!({"kind": "usage", "message": message}), message),
            Failure::Engine(e) => {
                let code = if is_input_error(&e) { 2 } else { 3 };
                let body = match &e {
                    Error::Parse { path, message } => json!({"kind": "parse", "path": path, "message": message}),
                    Error::Validation { path, message } => json!({"kind": "validation", "path": path, "message": message}),
                    other if code == 2 => json!({"kind": "validation", "message": other.to_string()}),
                    other => json!({"kind": "invariant", "message": other.to_string()}),
                };
                (code, body, e.to_string())
            }
        };
        Reply { code, stdout: render(&json!({ "error": body })), stderr: Some(format!("error: {diag}")) }
    }
}

fn render(v: &Json) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn read(path: &Path) -> Flow<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn load(path: &Path) -> Flow<Diagram> {
    Ok(dsl::parse_str(&path.display().to_string(), &read(path)?)?)
}

fn load_fillers(d: &Diagram, path: &Path) -> Flow<Vec<Filler>> {
    Ok(dsl::fillers_from_str(&path.display().to_string(), d, &read(path)?)?)
}

/// The fuel default, from the environment when set.
pub fn fuel_default() -> u64 {
    std::env::var(FUEL_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(FUEL_DEFAULT)
}

pub fn factorial_diagram() -> Diagram {
    let names = FACTORIAL_BOXES.iter().map(|s| s.to_string()).collect();
    Diagram::new(names, factorial_program()).expect("box names are distinct")
}

pub fn execute(command: &Command, fuel_default: u64) -> Reply {
    let result = match command {
        Command::Check { file } => check(file),
        Command::Compose { outer, slot, inner, output } => compose(outer, slot, inner, output.as_deref()),
        Command::Run { file, fillers, input, fuel, builtin, exact } => {
            let opts = RunOptions { fuel: fuel.unwrap_or(fuel_default), detect_cycles: *exact };
            run(file.as_deref(), fillers.as_deref(), input, opts, *builtin)
        }
        Command::Traj { file, fillers, start, max, domain } => traj(file, fillers, start, *max, *domain),
        Command::Laws { seed, cases } => {
            let report = law_suite(*seed, *cases);
            let code = if report.passed() { 0 } else { 3 };
            let stdout = render(&serde_json::to_value(&report).expect("reports serialize"));
            let stderr = (code != 0).then(|| {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
                format!("law failures: {}", failed.join(", "))
            });
            Ok(Reply { code, stdout, stderr })
        }
    };
    result.unwrap_or_else(Failure::reply)
}

fn ok(v: Json) -> Flow<Reply> {
    Ok(Reply { code: 0, stdout: render(&v), stderr: None })
}

fn check(file: &Path) -> Flow<Reply> {
    let d = load(file)?;
    let p = &d.program;
    let boxes: Vec<Json> = d
        .names
        .iter()
        .zip(p.inner())
        .zip(p.bypass())
        .map(|((name, b), m)| {
            json!({"name": name, "minus": b.minus.to_string(), "plus": b.plus.to_string(), "bypass": m.to_string()})
        })
        .collect();
    let routes = p.body().map().routes();
    let undefined = routes.iter().filter(|r| r.target().is_none()).count();
    ok(json!({
        "ok": true,
        "boxes": boxes,
        "outer": {"minus": p.outer().minus.to_string(), "plus": p.outer().plus.to_string()},
        "routes": routes.len() - undefined,
        "undefined": undefined,
    }))
}

fn compose(outer: &Path, slot: &str, inner: &Path, output: Option<&Path>) -> Flow<Reply> {
    let (psi, phi) = (load(outer)?, load(inner)?);
    let n = psi
        .slot(slot)
        .ok_or_else(|| Failure::Engine(Error::Validation { path: "SLOT".into(), message: format!("no box `{slot}` in the outer diagram") }))?;
    let program = psi.program.compose_at(n, &phi.program)?;
    let mut names = psi.names[..n].to_vec();
    names.extend(phi.names.iter().map(|m| format!("{slot}.{m}")));
    names.extend(psi.names[n + 1..].iter().cloned());
    let composite = Diagram::new(names, program).map_err(|_| {
        Failure::Usage(format!("nested box names `{slot}.*` collide with boxes of the outer diagram"))
    })?;
    let text = dsl::to_json(&dsl::print(&composite));
    match output {
        None => Ok(Reply { code: 0, stdout: text, stderr: None }),
        Some(path) => {
            fs::write(path, format!("{text}\n")).map_err(|e| Failure::Io { path: path.to_path_buf(), message: e.to_string() })?;
            ok(json!({"ok": true, "output": path.display().to_string(), "boxes": composite.names}))
        }
    }
}

fn run(file: Option<&Path>, fillers: Option<&Path>, input: &str, opts: RunOptions, builtin: Option<Builtin>) -> Flow<Reply> {
    let (d, fillers) = match (file, builtin) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give either FILE or --builtin, not both".into())),
        (None, None) => return Err(Failure::Usage("give a diagram FILE or --builtin".into())),
        (None, Some(Builtin::Factorial)) => {
            let d = factorial_diagram();
            let f = match fillers {
                Some(path) => load_fillers(&d, path)?,
                None => factorial_fillers(),
            };
            (d, f)
        }
        (Some(path), None) => {
            let d = load(path)?;
            let fpath = fillers.ok_or_else(|| Failure::Usage("--fillers is required with a diagram file".into()))?;
            let f = load_fillers(&d, fpath)?;
            (d, f)
        }
    };
    let outer = d.program.outer();
    let elem = dsl::elem_from_str("--input", &outer.minus, input)?;
    let result = eval_operational(&d.program, &fillers, &elem, opts)?;
    let (name, code) = match &result.outcome {
        Outcome::Returned(_) => ("Returned", 0),
        Outcome::Undefined => ("Undefined", 1),
        Outcome::FuelExhausted => ("FuelExhausted", 1),
        Outcome::Diverged => ("Diverged", 1),
    };
    let mut body = json!({
        "outcome": name,
        "steps": result.steps,
        "trajectory": dsl::visit_docs(&d.names, &result.trajectory),
    });
    if let Outcome::Returned(out) = &result.outcome {
        body["output"] = serde_json::to_value(dsl::elem_to_doc(&outer.plus, out)).expect("elements serialize");
        if let [v] = out.data[..] {
            body["value"] = json!(v);
        }
    }
    Ok(Reply { code, stdout: render(&body), stderr: (code != 0).then(|| format!("run ended {name}")) })
}

fn traj(file: &Path, fillers: &Path, start: &str, max: usize, domain: usize) -> Flow<Reply> {
    let d = load(file)?;
    let fillers = load_fillers(&d, fillers)?;
    let dom = FiniteDomain::uniform(domain);
    let outer = d.program.outer();
    let elem = dsl::elem_from_str("--start", &outer.minus, start)?;
    dom.check_elem(&outer.minus, &elem).map_err(|e| Error::IllFormedStart(e.to_string()))?;
    let index = ElemIndex::new(&outer.minus, &dom)?
        .index_of(&elem)
        .ok_or_else(|| Error::IllFormedStart(format!("{elem} is not an element at this domain")))?;
    let (wd, boxes) = eval_program(&d.program, &fillers, &dom)?;
    let trajectory = run_trajectory(&wd, &boxes, index, max)?;
    let visits = trajectory.visits(&d.program, &dom)?;
    let (name, code) = match trajectory.outcome {
        TrajOutcome::Completed => ("Completed", 0),
        TrajOutcome::Undefined => ("Undefined", 1),
        TrajOutcome::Diverged => ("Diverged", 1),
        TrajOutcome::MaxSteps => ("MaxSteps", 1),
    };
    let body = json!({
        "outcome": name,
        "steps": trajectory.steps,
        "trajectory": dsl::visit_docs(&d.names, &visits),
    });
    Ok(Reply { code, stdout: render(&body), stderr: (code != 0).then(|| format!("trajectory ended {name}")) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_factorial(n: i64, fuel: u64) -> (Reply, Json) {
        let cmd = Command::Run {
            file: None,
            fillers: None,
            input: format!("{{\"N\":{n}}}"),
            fuel: Some(fuel),
            builtin: Some(Builtin::Factorial),
            exact: false,
        };
        let reply = execute(&cmd, FUEL_DEFAULT);
        let v = serde_json::from_str(&reply.stdout).unwrap();
        (reply, v)
    }

    #[test]
    fn factorial_of_six() {
        let (reply, v) = run_factorial(6, FUEL_DEFAULT);
        assert_eq!(reply.code, 0);
        assert_eq!(v["outcome"], "Returned");
        assert_eq!(v["value"], 720);
    }

    #[test]
    fn starved_run_exits_one() {
        let (reply, v) = run_factorial(6, 3);
        assert_eq!((reply.code, v["outcome"].as_str()), (1, Some("FuelExhausted")));
    }

    #[test]
    fn bad_input_exits_two() {
        let cmd = Command::Run {
            file: None,
            fillers: None,
            input: r#"{"M": 1}"#.into(),
            fuel: None,
            builtin: Some(Builtin::Factorial),
            exact: false,
        };
        let reply = execute(&cmd, FUEL_DEFAULT);
        assert_eq!(reply.code, 2);
        assert!(reply.stdout.contains("\"--input\""));
    }

    #[test]
    fn missing_file_exits_two() {
        let reply = execute(&Command::Check { file: "/nonexistent/diagram.json".into() }, FUEL_DEFAULT);
        assert_eq!(reply.code, 2);
        assert!(reply.stdout.contains("\"io\""));
    }

    #[test]
    fn invariant_errors_exit_three() {
        assert!(!is_input_error(&Error::PreconditionViolated("x".into())));
        let reply = Failure::Engine(Error::ShapeMismatch("x".into())).reply();
        assert_eq!(reply.code, 3);
    }
}

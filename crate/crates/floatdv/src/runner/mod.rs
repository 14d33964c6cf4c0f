//! External solver orchestration: spawn solver processes on emitted
//! documents, enforce wall-clock timeouts, parse verdicts and models,
//! classify counterexamples by concrete replay, and aggregate.

mod config;
mod model;
mod replay;

pub use config::{detect_solvers, load_config, resolve_solvers, ConfigError, SolverConfig};
pub use model::{parse_model, Model, ModelValue};
pub use replay::{replay, ReplayError, ReplayOutcome};

use crate::smt::SmtDocument;
use std::io::Read;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

/// Extra wall-clock slack beyond the configured timeout before the child
/// is killed.
const KILL_GRACE: Duration = Duration::from_secs(2);

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Valid,
    Invalid(Option<Model>),
    Unknown,
    Timeout,
    Skipped,
    Error(String),
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Valid => "valid",
            Outcome::Invalid(_) => "invalid",
            Outcome::Unknown => "unknown",
            Outcome::Timeout => "timeout",
            Outcome::Skipped => "skipped",
            Outcome::Error(_) => "error",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub outcome: Outcome,
    pub wall_time_seconds: f64,
    pub solver_name: String,
    pub goal_name: String,
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

fn temp_smt_path(goal: &str) -> PathBuf {
    let n = TEMP_COUNTER.fetch_add(1, Ordering::Relaxed);
    let slug: String = goal
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    std::env::temp_dir().join(format!(
        "floatdv-{}-{}-{}.smt2",
        std::process::id(),
        n,
        slug
    ))
}

/// Run one solver on one document. Documents with quantifiers are skipped
/// for solvers that do not support them, with a recorded outcome.
pub fn run_solver(doc: &SmtDocument, cfg: &SolverConfig) -> Verdict {
    if doc.has_quantifiers && !cfg.supports_quantifiers {
        return Verdict {
            outcome: Outcome::Skipped,
            wall_time_seconds: 0.0,
            solver_name: cfg.name.clone(),
            goal_name: doc.goal_name.clone(),
        };
    }
    let path = temp_smt_path(&doc.goal_name);
    if let Err(e) = std::fs::write(&path, &doc.text) {
        return Verdict {
            outcome: Outcome::Error(format!("cannot write query file: {e}")),
            wall_time_seconds: 0.0,
            solver_name: cfg.name.clone(),
            goal_name: doc.goal_name.clone(),
        };
    }
    let verdict = run_on_file(&path, doc, cfg);
    let _ = std::fs::remove_file(&path);
    verdict
}

fn run_on_file(path: &std::path::Path, doc: &SmtDocument, cfg: &SolverConfig) -> Verdict {
    let started = Instant::now();
    let spawn = std::process::Command::new(&cfg.path)
        .args(cfg.substituted_args(path))
        .stdin(std::process::Stdio::null())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn();
    let mut child = match spawn {
        Ok(c) => c,
        Err(e) => {
            return Verdict {
                outcome: Outcome::Error(format!("cannot spawn `{}`: {e}", cfg.path)),
                wall_time_seconds: 0.0,
                solver_name: cfg.name.clone(),
                goal_name: doc.goal_name.clone(),
            }
        }
    };

    // Drain pipes on threads so a chatty solver cannot deadlock on a full
    // pipe while we poll for exit.
    let mut stdout_pipe = child.stdout.take().expect("piped");
    let mut stderr_pipe = child.stderr.take().expect("piped");
    let out_thread = std::thread::spawn(move || {
        let mut buf = String::new();
        let _ = stdout_pipe.read_to_string(&mut buf);
        buf
    });
    let err_thread = std::thread::spawn(move || {
        let mut buf = String::new();
        let _ = stderr_pipe.read_to_string(&mut buf);
        buf
    });

    let deadline = started + Duration::from_secs(cfg.timeout_secs) + KILL_GRACE;
    let mut timed_out = false;
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break Some(status),
            Ok(None) => {
                if Instant::now() >= deadline {
                    timed_out = true;
                    let _ = child.kill();
                    let _ = child.wait();
                    break None;
                }
                std::thread::sleep(Duration::from_millis(5));
            }
            Err(_) => break None,
        }
    };

    let wall = started.elapsed().as_secs_f64();
    let stdout = out_thread.join().unwrap_or_default();
    let stderr = err_thread.join().unwrap_or_default();

    if timed_out {
        return Verdict {
            outcome: Outcome::Timeout,
            wall_time_seconds: wall,
            solver_name: cfg.name.clone(),
            goal_name: doc.goal_name.clone(),
        };
    }

    let outcome = classify_output(&stdout, &stderr, status);
    Verdict {
        outcome,
        wall_time_seconds: wall,
        solver_name: cfg.name.clone(),
        goal_name: doc.goal_name.clone(),
    }
}

fn classify_output(
    stdout: &str,
    stderr: &str,
    status: Option<std::process::ExitStatus>,
) -> Outcome {
    for line in stdout.lines() {
        match line.trim() {
            "unsat" => return Outcome::Valid,
            "sat" => {
                let model = parse_model(stdout);
                if model.is_none() {
                    eprintln!("note: sat result without a parseable model");
                }
                return Outcome::Invalid(model);
            }
            "unknown" => return Outcome::Unknown,
            // z3 prints `timeout` when -T fires before the hard kill
            "timeout" => return Outcome::Timeout,
            _ => continue,
        }
    }
    let ok = status.map(|s| s.success()).unwrap_or(false);
    if ok {
        Outcome::Unknown
    } else {
        let tail: String = stderr
            .lines()
            .chain(stdout.lines())
            .take(3)
            .collect::<Vec<_>>()
            .join(" | ");
        Outcome::Error(if tail.is_empty() {
            "solver produced no verdict".to_string()
        } else {
            tail
        })
    }
}

/// Aggregate result across solvers for one goal.
#[derive(Debug, Clone, PartialEq)]
pub enum Aggregate {
    Valid,
    /// A model survived interpreter replay.
    InvalidConfirmed,
    /// sat results existed but none replayed to a real violation.
    InvalidUnconfirmed,
    Unknown,
    /// One solver proved validity while a replay confirmed a violation:
    /// a soundness bug somewhere, surfaced loudly.
    Conflict(String),
}

impl Aggregate {
    pub fn label(&self) -> &'static str {
        match self {
            Aggregate::Valid => "valid",
            Aggregate::InvalidConfirmed => "invalid",
            Aggregate::InvalidUnconfirmed => "invalid?",
            Aggregate::Unknown => "unknown",
            Aggregate::Conflict(_) => "CONFLICT",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub verdict: Verdict,
    pub replay: Option<ReplayOutcome>,
}

#[derive(Debug, Clone)]
pub struct AggregatedVerdict {
    pub goal_name: String,
    pub per_solver: Vec<SolverResult>,
    pub aggregate: Aggregate,
}

/// Run every configured solver on the document (sequentially) and
/// aggregate. `classify` replays a model and says whether it is a real
/// counterexample; aggregation is order-independent.
pub fn decide(
    doc: &SmtDocument,
    cfgs: &[SolverConfig],
    classify: &dyn Fn(&Model) -> Option<ReplayOutcome>,
) -> AggregatedVerdict {
    let mut per_solver = Vec::new();
    for cfg in cfgs {
        let verdict = run_solver(doc, cfg);
        let replay = match &verdict.outcome {
            Outcome::Invalid(Some(m)) => classify(m),
            _ => None,
        };
        per_solver.push(SolverResult { verdict, replay });
    }
    let aggregate = aggregate_results(&per_solver);
    AggregatedVerdict {
        goal_name: doc.goal_name.clone(),
        per_solver,
        aggregate,
    }
}

/// Order-independent aggregation over per-solver results.
pub fn aggregate_results(results: &[SolverResult]) -> Aggregate {
    let any_valid = results
        .iter()
        .any(|r| matches!(r.verdict.outcome, Outcome::Valid));
    let confirmed: Vec<&SolverResult> = results
        .iter()
        .filter(|r| matches!(r.replay, Some(ReplayOutcome::Confirmed)))
        .collect();
    let any_sat = results
        .iter()
        .any(|r| matches!(r.verdict.outcome, Outcome::Invalid(_)));
    if any_valid && !confirmed.is_empty() {
        let names: Vec<&str> = confirmed
            .iter()
            .map(|r| r.verdict.solver_name.as_str())
            .collect();
        return Aggregate::Conflict(format!(
            "proved valid by one solver while {} confirmed a counterexample",
            names.join(",")
        ));
    }
    if any_valid {
        return Aggregate::Valid;
    }
    if !confirmed.is_empty() {
        return Aggregate::InvalidConfirmed;
    }
    if any_sat {
        return Aggregate::InvalidUnconfirmed;
    }
    Aggregate::Unknown
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_recognizes_verdict_lines() {
        assert_eq!(classify_output("unsat\n", "", None), Outcome::Valid);
        assert!(matches!(
            classify_output("sat\n(model)", "", None),
            Outcome::Invalid(_)
        ));
        assert_eq!(classify_output("unknown\n", "", None), Outcome::Unknown);
        assert_eq!(classify_output("timeout\n", "", None), Outcome::Timeout);
    }

    #[test]
    fn unsat_with_trailing_model_error_is_still_valid() {
        let out = "unsat\n(error \"cannot get model\")\n";
        assert_eq!(classify_output(out, "", None), Outcome::Valid);
    }

    #[test]
    fn aggregation_is_order_independent() {
        let v = |outcome: Outcome, name: &str, replay: Option<ReplayOutcome>| SolverResult {
            verdict: Verdict {
                outcome,
                wall_time_seconds: 1.0,
                solver_name: name.into(),
                goal_name: "g".into(),
            },
            replay,
        };
        let a = v(Outcome::Valid, "s1", None);
        let b = v(Outcome::Timeout, "s2", None);
        let c = v(Outcome::Invalid(None), "s3", None);
        let fwd = aggregate_results(&[a.clone(), b.clone(), c.clone()]);
        let rev = aggregate_results(&[c, b, a]);
        assert_eq!(fwd, rev);
        assert_eq!(fwd, Aggregate::Valid);
    }

    #[test]
    fn valid_plus_confirmed_is_a_conflict() {
        let valid = SolverResult {
            verdict: Verdict {
                outcome: Outcome::Valid,
                wall_time_seconds: 1.0,
                solver_name: "s1".into(),
                goal_name: "g".into(),
            },
            replay: None,
        };
        let confirmed = SolverResult {
            verdict: Verdict {
                outcome: Outcome::Invalid(None),
                wall_time_seconds: 1.0,
                solver_name: "s2".into(),
                goal_name: "g".into(),
            },
            replay: Some(ReplayOutcome::Confirmed),
        };
        assert!(matches!(
            aggregate_results(&[valid, confirmed]),
            Aggregate::Conflict(_)
        ));
    }

    #[test]
    fn timeouts_only_aggregate_to_unknown() {
        let t = SolverResult {
            verdict: Verdict {
                outcome: Outcome::Timeout,
                wall_time_seconds: 300.0,
                solver_name: "s".into(),
                goal_name: "g".into(),
            },
            replay: None,
        };
        assert_eq!(aggregate_results(&[t]), Aggregate::Unknown);
    }
}

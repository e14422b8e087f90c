//! Running requirements against the lasso unwinding of every test case.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::dsl::{Expectation, RequirementSet};
use crate::engine::{simulate_lasso, LassoTrace, SimError, TestSuite, DEFAULT_STEP_CAP};
use crate::ir::CompiledModel;
use crate::ltl::{BindError, BoundFormula};
use crate::par;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExecError {
    #[error("requirement {id}: {error}")]
    Bind { id: String, error: BindError },
    #[error("suite header `{got}` does not match model nondet variables `{want}`")]
    Header { got: String, want: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Every test's lasso satisfies the formula at position 0.
    PassOnSuite,
    /// Earliest violating test in suite order.
    Violated { test: String, trace: LassoTrace },
    /// Simulation or evaluation failed on a test before any violation.
    Errored { test: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub requirement: String,
    pub expectation: Option<Expectation>,
    pub outcome: Outcome,
}

impl Verdict {
    /// Violated under expect-pass, or passing under expect-fail.
    pub fn misses_expectation(&self) -> bool {
        matches!(
            (self.expectation, &self.outcome),
            (Some(Expectation::Pass), Outcome::Violated { .. }) | (Some(Expectation::Fail), Outcome::PassOnSuite)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecConfig {
    pub step_cap: usize,
}

impl Default for ExecConfig {
    fn default() -> Self {
        Self {
            step_cap: DEFAULT_STEP_CAP,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Counts {
    pub violated: usize,
    pub passed: usize,
    pub errored: usize,
    pub expectation_misses: usize,
}

impl fmt::Display for Counts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "violated={} passed={} errored={}",
            self.violated, self.passed, self.errored
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecReport {
    pub verdicts: Vec<Verdict>,
}

impl ExecReport {
    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for v in &self.verdicts {
            match v.outcome {
                Outcome::PassOnSuite => c.passed += 1,
                Outcome::Violated { .. } => c.violated += 1,
                Outcome::Errored { .. } => c.errored += 1,
            }
            c.expectation_misses += v.misses_expectation() as usize;
        }
        c
    }

    /// Footer line; with `check_expectations` it gains `expectation-misses`.
    pub fn footer(&self, check_expectations: bool) -> String {
        let c = self.counts();
        if check_expectations {
            format!("{c} expectation-misses={}", c.expectation_misses)
        } else {
            c.to_string()
        }
    }

    pub fn render(&self, model: &CompiledModel, check_expectations: bool) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            match &v.outcome {
                Outcome::PassOnSuite => {
                    let _ = write!(out, "REQ {} PASS-ON-SUITE", v.requirement);
                }
                Outcome::Violated { test, .. } => {
                    let _ = write!(out, "REQ {} VIOLATED test={test}", v.requirement);
                }
                Outcome::Errored { test, message } => {
                    let _ = write!(out, "REQ {} ERRORED test={test} {message}", v.requirement);
                }
            }
            if check_expectations && v.misses_expectation() {
                let _ = write!(out, " MISSED {}", v.expectation.unwrap().keyword());
            }
            out.push('\n');
            if let Outcome::Violated { trace, .. } = &v.outcome {
                out.push_str(&trace.dump(model));
            }
        }
        out.push_str(&self.footer(check_expectations));
        out.push('\n');
        out
    }
}

/// Unwinds every test once and evaluates every requirement on the cached
/// lassos. The first test in suite order that violates or errors decides.
pub fn execute_suite(
    model: &CompiledModel,
    reqs: &RequirementSet,
    suite: &TestSuite,
    cfg: &ExecConfig,
) -> Result<ExecReport, ExecError> {
    let want = model.nondet_names();
    if suite.nondet_names != want {
        return Err(ExecError::Header {
            got: suite.nondet_names.join(","),
            want: want.join(","),
        });
    }
    let bound = reqs
        .requirements
        .iter()
        .map(|r| {
            BoundFormula::bind(&r.formula, model).map_err(|error| ExecError::Bind {
                id: r.id.clone(),
                error,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let lassos: Vec<Result<LassoTrace, SimError>> =
        par::map(&suite.tests, |t| simulate_lasso(model, t, cfg.step_cap));
    let nondet_len = model.nondet_len();
    let jobs: Vec<usize> = (0..bound.len()).collect();
    let outcomes = par::map(&jobs, |&r| {
        for (t, lasso) in suite.tests.iter().zip(&lassos) {
            let errored = |message: String| Outcome::Errored {
                test: t.id.clone(),
                message,
            };
            let trace = match lasso {
                Ok(trace) => trace,
                Err(e) => return errored(e.to_string()),
            };
            match bound[r].eval(trace, nondet_len, 0) {
                Ok(true) => {}
                Ok(false) => {
                    return Outcome::Violated {
                        test: t.id.clone(),
                        trace: trace.clone(),
                    }
                }
                Err(e) => return errored(e.to_string()),
            }
        }
        Outcome::PassOnSuite
    });

    Ok(ExecReport {
        verdicts: reqs
            .requirements
            .iter()
            .zip(outcomes)
            .map(|(r, outcome)| Verdict {
                requirement: r.id.clone(),
                expectation: r.expectation,
                outcome,
            })
            .collect(),
    })
}

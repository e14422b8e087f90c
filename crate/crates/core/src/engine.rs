//! Deterministic closed-loop stepping and lasso unwinding of test cases.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::ir::{BlockKind, CAssign, CompiledModel, EvalError};

/// Values of every non-nondeterministic variable, in declaration order.
pub type SystemState = Vec<i64>;

/// One column of a test case: a value for every nondeterministic variable.
pub type NondetValues = Vec<i64>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("{block} assignment #{index} to {target}: value {value} outside {domain}")]
    DomainViolation {
        block: BlockKind,
        index: usize,
        target: String,
        value: i64,
        domain: String,
    },
    #[error("{block} assignment #{index} to {target}: division by zero")]
    DivisionByZero {
        block: BlockKind,
        index: usize,
        target: String,
    },
    #[error("{block} assignment #{index} to {target}: arithmetic overflow")]
    Overflow {
        block: BlockKind,
        index: usize,
        target: String,
    },
    #[error("lasso did not close within {cap} steps")]
    StepCapExceeded { cap: usize },
    #[error("nondet column has {got} values, model declares {want}")]
    ColumnWidth { got: usize, want: usize },
}

pub const DEFAULT_STEP_CAP: usize = 10_000_000;

/// Initial state: every non-nondeterministic variable at its init value.
pub fn init_state(model: &CompiledModel) -> SystemState {
    model.init.clone()
}

impl CompiledModel {
    fn run_block(&self, block: BlockKind, code: &[CAssign], env: &mut [i64]) -> Result<(), SimError> {
        for (index, a) in code.iter().enumerate() {
            let target = || {
                let var = self.var_of_slot(a.slot as usize);
                self.model().variables[var].display_name()
            };
            let v = a.rhs.eval(env).map_err(|e| match e {
                EvalError::DivisionByZero => SimError::DivisionByZero {
                    block,
                    index,
                    target: target(),
                },
                EvalError::Overflow => SimError::Overflow {
                    block,
                    index,
                    target: target(),
                },
            })?;
            if v < a.lo || v > a.hi {
                return Err(SimError::DomainViolation {
                    block,
                    index,
                    target: target(),
                    value: v,
                    domain: self.slot_domain(a.slot as usize).to_string(),
                });
            }
            env[a.slot as usize] = v;
        }
        Ok(())
    }

    /// Runs one step in place on an environment of state slots followed by
    /// the nondet column: plant block, then controller block.
    pub(crate) fn step_env(&self, env: &mut [i64]) -> Result<(), SimError> {
        self.run_block(BlockKind::Plant, &self.plant, env)?;
        self.run_block(BlockKind::Controller, &self.controller, env)
    }
}

/// One closed-loop step: apply `nd`, run the plant, then the controller.
pub fn step(model: &CompiledModel, s: &[i64], nd: &[i64]) -> Result<SystemState, SimError> {
    if nd.len() != model.nondet_len() {
        return Err(SimError::ColumnWidth {
            got: nd.len(),
            want: model.nondet_len(),
        });
    }
    let mut env = Vec::with_capacity(s.len() + nd.len());
    env.extend_from_slice(s);
    env.extend_from_slice(nd);
    model.step_env(&mut env)?;
    env.truncate(model.state_len());
    Ok(env)
}

/// A finite nondet input matrix, one column per step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub id: String,
    pub columns: Vec<NondetValues>,
    /// States `s_0..s_len` observed during generation.
    pub gen_trace: Option<Vec<SystemState>>,
}

impl TestCase {
    pub fn new(id: impl Into<String>, columns: Vec<NondetValues>) -> Self {
        Self {
            id: id.into(),
            columns,
            gen_trace: None,
        }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Re-simulates the columns once and compares against `gen_trace`.
    pub fn replays(&self, model: &CompiledModel) -> Result<bool, SimError> {
        let Some(trace) = &self.gen_trace else {
            return Ok(true);
        };
        Ok(finite_trace(model, &self.columns)? == *trace)
    }
}

/// States `s_0..s_n` obtained by applying each column once.
pub fn finite_trace(model: &CompiledModel, columns: &[NondetValues]) -> Result<Vec<SystemState>, SimError> {
    let mut states = vec![init_state(model)];
    for col in columns {
        let next = step(model, states.last().unwrap(), col)?;
        states.push(next);
    }
    Ok(states)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TestSuite {
    /// Flattened names of the nondeterministic variables, in declaration order.
    pub nondet_names: Vec<String>,
    pub tests: Vec<TestCase>,
}

impl TestSuite {
    pub fn total_elements(&self) -> usize {
        self.tests.iter().map(TestCase::len).sum()
    }
}

/// Infinite unwinding of a looped test case: `states[p..]` repeats forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoTrace {
    pub states: Vec<SystemState>,
    /// Column applied on the step into each state; `None` for `s_0`.
    pub applied: Vec<Option<NondetValues>>,
    pub prefix_len: usize,
    pub loop_len: usize,
}

impl LassoTrace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Successor position on the unwinding.
    pub fn succ(&self, i: usize) -> usize {
        if i + 1 == self.states.len() {
            self.prefix_len
        } else {
            i + 1
        }
    }

    /// Folds an unbounded position onto the stored positions.
    pub fn fold(&self, i: usize) -> usize {
        if i < self.prefix_len {
            i
        } else {
            self.prefix_len + (i - self.prefix_len) % self.loop_len
        }
    }

    /// Trace dump: one line per position, variables in declaration order.
    pub fn dump(&self, model: &CompiledModel) -> String {
        let mut out = String::new();
        let m = model.model();
        for (k, s) in self.states.iter().enumerate() {
            let _ = write!(out, "#{k}");
            if k == self.prefix_len {
                out.push_str(" loop-start");
            }
            let mut nd_i = 0;
            let mut st_i = 0;
            for v in &m.variables {
                let value = if v.kind == crate::ir::VarKind::Nondeterministic {
                    let text = match &self.applied[k] {
                        Some(col) => v.domain.decode(col[nd_i]).to_string(),
                        None => "-".to_string(),
                    };
                    nd_i += 1;
                    text
                } else {
                    let text = v.domain.decode(s[st_i]).to_string();
                    st_i += 1;
                    text
                };
                let _ = write!(out, " {}={}", v.display_name(), value);
            }
            out.push('\n');
        }
        out
    }
}

/// Simulates `s_{k+1} = step(s_k, column k mod len)` until the pair
/// `(k mod len, s_k)` repeats.
pub fn simulate_lasso(model: &CompiledModel, t: &TestCase, cap: usize) -> Result<LassoTrace, SimError> {
    assert!(!t.columns.is_empty(), "test case must have at least one column");
    let len = t.columns.len();
    let mut seen: HashMap<(usize, SystemState), usize> = HashMap::new();
    let mut states = vec![init_state(model)];
    let mut applied: Vec<Option<NondetValues>> = vec![None];
    let mut k = 0;
    loop {
        let s = states[k].clone();
        if let Some(&first) = seen.get(&(k % len, s.clone())) {
            states.pop();
            applied.pop();
            return Ok(LassoTrace {
                prefix_len: first,
                loop_len: k - first,
                states,
                applied,
            });
        }
        if k >= cap {
            return Err(SimError::StepCapExceeded { cap });
        }
        seen.insert((k % len, s), k);
        let col = &t.columns[k % len];
        let next = step(model, &states[k], col)?;
        states.push(next);
        applied.push(Some(col.clone()));
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_model;

    fn compile(text: &str) -> CompiledModel {
        CompiledModel::new(&parse_model(text).unwrap()).unwrap()
    }

    fn counter() -> CompiledModel {
        compile("model C nondet u : bool plantvar c : int 0..2 = 2 plant { c = (c + 1) mod 3; } controller { }")
    }

    #[test]
    fn init_values() {
        let m = compile("model M ctrlvar t : int 0..5 = 2 plant { } controller { }");
        assert_eq!(init_state(&m), vec![2]);
        let m = compile("model M nondet u : bool plant { } controller { }");
        assert!(init_state(&m).is_empty());
    }

    #[test]
    fn counter_wraps() {
        let m = counter();
        assert_eq!(step(&m, &[2], &[0]).unwrap(), vec![0]);
    }

    #[test]
    fn identity_blocks_keep_state() {
        let m = compile("model M nondet u : bool input b : bool = true plant { } controller { }");
        for u in [0, 1] {
            assert_eq!(step(&m, &[1], &[u]).unwrap(), vec![1]);
        }
    }

    #[test]
    fn domain_violation_names_assignment() {
        let m = compile("model M nondet u : bool input c : int 0..2 = 2 plant { c = c + 1; } controller { }");
        match step(&m, &[2], &[0]) {
            Err(SimError::DomainViolation { target, value, .. }) => {
                assert_eq!(target, "c");
                assert_eq!(value, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lasso_shapes() {
        let m = compile("model K nondet u : bool input b : bool = false plant { } controller { }");
        let l = simulate_lasso(&m, &TestCase::new("t", vec![vec![0]]), DEFAULT_STEP_CAP).unwrap();
        assert_eq!((l.prefix_len, l.loop_len), (0, 1));

        let m = counter();
        let l = simulate_lasso(&m, &TestCase::new("t", vec![vec![0]]), DEFAULT_STEP_CAP).unwrap();
        assert_eq!((l.prefix_len, l.loop_len), (0, 3));
        let l = simulate_lasso(&m, &TestCase::new("t", vec![vec![0], vec![0]]), DEFAULT_STEP_CAP).unwrap();
        assert_eq!((l.prefix_len, l.loop_len), (0, 6));
        assert!(matches!(
            simulate_lasso(&m, &TestCase::new("t", vec![vec![0]]), 2),
            Err(SimError::StepCapExceeded { cap: 2 })
        ));
    }

    #[test]
    fn lasso_with_prefix_and_dump() {
        let m = compile("model P nondet u : bool input c : int 0..3 = 0 plant { c = c < 3 ? c + 1 : 2; } controller { }");
        let l = simulate_lasso(&m, &TestCase::new("t", vec![vec![1]]), DEFAULT_STEP_CAP).unwrap();
        assert_eq!((l.prefix_len, l.loop_len), (2, 2));
        let last = l.len() - 1;
        assert_eq!(step(&m, &l.states[last], &[1]).unwrap(), l.states[l.prefix_len]);
        assert_eq!(
            l.dump(&m),
            "#0 u=- c=0\n#1 u=true c=1\n#2 loop-start u=true c=2\n#3 u=true c=3\n"
        );
    }
}

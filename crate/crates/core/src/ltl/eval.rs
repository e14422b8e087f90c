use thiserror::Error;

use super::Ltl;
use crate::engine::LassoTrace;
use crate::ir::{CompiledExpr, CompiledModel, EvalError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BindError {
    #[error("{0}")]
    Type(String),
    #[error("requirement reads nondeterministic variable in `{0}`")]
    Nondet(String),
}

#[derive(Debug, Clone)]
enum Node {
    Atom(CompiledExpr),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Next(usize),
    Finally(usize),
    Globally(usize),
    Until(usize, usize),
}

/// A formula resolved against a model, stored as a post-order node table.
#[derive(Debug, Clone)]
pub struct BoundFormula {
    nodes: Vec<Node>,
}

impl BoundFormula {
    pub fn bind(f: &Ltl, model: &CompiledModel) -> Result<Self, BindError> {
        let mut nodes = Vec::new();
        Self::push(f, model, &mut nodes)?;
        Ok(Self { nodes })
    }

    fn push(f: &Ltl, model: &CompiledModel, nodes: &mut Vec<Node>) -> Result<usize, BindError> {
        let node = match f {
            Ltl::Atom(e) => {
                let c = model.compile_predicate(e).map_err(BindError::Type)?;
                if c.uses_nondet() {
                    return Err(BindError::Nondet(e.to_string()));
                }
                Node::Atom(c)
            }
            Ltl::Not(a) => Node::Not(Self::push(a, model, nodes)?),
            Ltl::Next(a) => Node::Next(Self::push(a, model, nodes)?),
            Ltl::Finally(a) => Node::Finally(Self::push(a, model, nodes)?),
            Ltl::Globally(a) => Node::Globally(Self::push(a, model, nodes)?),
            Ltl::And(a, b) => {
                let (a, b) = (Self::push(a, model, nodes)?, Self::push(b, model, nodes)?);
                Node::And(a, b)
            }
            Ltl::Or(a, b) => {
                let (a, b) = (Self::push(a, model, nodes)?, Self::push(b, model, nodes)?);
                Node::Or(a, b)
            }
            Ltl::Implies(a, b) => {
                let (a, b) = (Self::push(a, model, nodes)?, Self::push(b, model, nodes)?);
                Node::Implies(a, b)
            }
            Ltl::Until(a, b) => {
                let (a, b) = (Self::push(a, model, nodes)?, Self::push(b, model, nodes)?);
                Node::Until(a, b)
            }
        };
        nodes.push(node);
        Ok(nodes.len() - 1)
    }

    /// Satisfaction table: one row per node (children before parents), one
    /// column per lasso position.
    pub fn table(&self, trace: &LassoTrace, nondet_len: usize) -> Result<Vec<Vec<bool>>, EvalError> {
        let m = trace.len();
        let p = trace.prefix_len;
        let mut rows: Vec<Vec<bool>> = Vec::with_capacity(self.nodes.len());
        let mut env = Vec::new();
        for node in &self.nodes {
            let row = match node {
                Node::Atom(c) => {
                    let mut row = Vec::with_capacity(m);
                    for s in &trace.states {
                        env.clear();
                        env.extend_from_slice(s);
                        env.resize(s.len() + nondet_len, 0);
                        row.push(c.eval(&env)? != 0);
                    }
                    row
                }
                Node::Not(a) => rows[*a].iter().map(|x| !x).collect(),
                Node::And(a, b) => zip(&rows[*a], &rows[*b], |x, y| x && y),
                Node::Or(a, b) => zip(&rows[*a], &rows[*b], |x, y| x || y),
                Node::Implies(a, b) => zip(&rows[*a], &rows[*b], |x, y| !x || y),
                Node::Next(a) => (0..m).map(|i| rows[*a][trace.succ(i)]).collect(),
                Node::Finally(a) => fixpoint(m, p, false, |i, next| rows[*a][i] || next),
                Node::Globally(a) => fixpoint(m, p, true, |i, next| rows[*a][i] && next),
                Node::Until(a, b) => {
                    fixpoint(m, p, false, |i, next| rows[*b][i] || (rows[*a][i] && next))
                }
            };
            rows.push(row);
        }
        Ok(rows)
    }

    /// Truth value at position `k` of the unwinding.
    pub fn eval(&self, trace: &LassoTrace, nondet_len: usize, k: usize) -> Result<bool, EvalError> {
        let rows = self.table(trace, nondet_len)?;
        Ok(rows.last().expect("formula has a root")[trace.fold(k)])
    }
}

fn zip(a: &[bool], b: &[bool], f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}

/// Solves `v[i] = f(i, v[succ(i)])` on a lasso. Two backward passes around
/// the loop starting from `seed` at the loop head settle the least (`seed =
/// false`) or greatest (`seed = true`) fixpoint; the prefix follows.
fn fixpoint(m: usize, p: usize, seed: bool, f: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let mut v = vec![seed; m];
    for _ in 0..2 {
        for i in (p..m).rev() {
            let next = if i + 1 == m { v[p] } else { v[i + 1] };
            v[i] = f(i, next);
        }
    }
    for i in (0..p).rev() {
        v[i] = f(i, v[i + 1]);
    }
    v
}

/// Satisfaction of `f` at position `k` of the unwinding of `trace`.
pub fn eval_on_lasso(
    f: &BoundFormula,
    model: &CompiledModel,
    trace: &LassoTrace,
    k: usize,
) -> Result<bool, EvalError> {
    f.eval(trace, model.nondet_len(), k)
}

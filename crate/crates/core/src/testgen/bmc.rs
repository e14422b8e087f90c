use batsat::Lit;

use super::sat::{Bv, Circuit};
use super::{GenError, Reachability};
use crate::engine::{finite_trace, NondetValues};
use crate::ir::{BinOp, CExpr, CAssign, CompiledExpr, CompiledModel};

/// Bounded model checking over an incrementally unrolled transition relation.
///
/// The unrolling is shared across goals and grows only as deep as queries
/// need. Paths on which some step raises a runtime error are reported as
/// errors when first reachable and excluded from later queries.
pub struct BmcEngine<'m> {
    model: &'m CompiledModel,
    c: Circuit,
    /// State slots at each depth.
    frames: Vec<Vec<Bv>>,
    /// Nondet column applied on the step out of each depth.
    inputs: Vec<Vec<Bv>>,
}

/// Collects error conditions while encoding one expression or step.
struct Enc<'a> {
    c: &'a mut Circuit,
    errs: Vec<Lit>,
}

impl Enc<'_> {
    fn expr(&mut self, e: &CExpr, env: &[Bv], guard: Lit) -> Result<Bv, String> {
        Ok(match e {
            CExpr::Const(v) => self.c.bv_const(*v),
            CExpr::Slot(s) => env[*s as usize].clone(),
            CExpr::Not(a) => {
                let a = self.truth(a, env, guard)?;
                self.c.bv_bool(!a)
            }
            CExpr::Neg(a) => {
                let a = self.expr(a, env, guard)?;
                self.c.bv_neg(&a)?
            }
            CExpr::Cond(k, a, b) => {
                let k = self.truth(k, env, guard)?;
                let ga = self.c.and(guard, k);
                let gb = self.c.and(guard, !k);
                let a = self.expr(a, env, ga)?;
                let b = self.expr(b, env, gb)?;
                self.c.bv_mux(k, &a, &b)
            }
            CExpr::Bin(op, a, b) => match op {
                BinOp::And | BinOp::Or | BinOp::Implies => {
                    let x = self.truth(a, env, guard)?;
                    // The right operand runs only when the left does not decide.
                    let runs = if *op == BinOp::Or { !x } else { x };
                    let g = self.c.and(guard, runs);
                    let y = self.truth(b, env, g)?;
                    let r = match op {
                        BinOp::And => self.c.and(x, y),
                        BinOp::Or => self.c.or(x, y),
                        _ => self.c.or(!x, y),
                    };
                    self.c.bv_bool(r)
                }
                _ => {
                    let x = self.expr(a, env, guard)?;
                    let y = self.expr(b, env, guard)?;
                    self.arith(*op, &x, &y, guard)?
                }
            },
        })
    }

    fn truth(&mut self, e: &CExpr, env: &[Bv], guard: Lit) -> Result<Lit, String> {
        let v = self.expr(e, env, guard)?;
        Ok(self.c.bv_nonzero(&v))
    }

    fn arith(&mut self, op: BinOp, x: &Bv, y: &Bv, guard: Lit) -> Result<Bv, String> {
        let c = &mut *self.c;
        Ok(match op {
            BinOp::Add => c.bv_add(x, y)?,
            BinOp::Sub => c.bv_sub(x, y)?,
            BinOp::Mul => c.bv_mul(x, y)?,
            BinOp::Div | BinOp::Mod => {
                let zero = c.bv_const(0);
                let is_zero = c.bv_eq(y, &zero);
                let err = c.and(guard, is_zero);
                self.errs.push(err);
                let (q, r) = self.c.bv_divmod(x, y)?;
                if op == BinOp::Div {
                    q
                } else {
                    r
                }
            }
            BinOp::Eq => {
                let l = c.bv_eq(x, y);
                c.bv_bool(l)
            }
            BinOp::Ne => {
                let l = c.bv_eq(x, y);
                c.bv_bool(!l)
            }
            BinOp::Lt => {
                let l = c.bv_lt(x, y);
                c.bv_bool(l)
            }
            BinOp::Gt => {
                let l = c.bv_lt(y, x);
                c.bv_bool(l)
            }
            BinOp::Le => {
                let l = c.bv_lt(y, x);
                c.bv_bool(!l)
            }
            BinOp::Ge => {
                let l = c.bv_lt(x, y);
                c.bv_bool(!l)
            }
            BinOp::And | BinOp::Or | BinOp::Implies => unreachable!("logical ops are encoded lazily"),
        })
    }

    fn block(&mut self, code: &[CAssign], env: &mut [Bv]) -> Result<(), String> {
        let t = self.c.tru();
        for a in code {
            let v = self.expr(&a.rhs, env, t)?;
            let (lo, hi) = (a.lo as i128, a.hi as i128);
            let out = self.c.outside(&v, lo, hi);
            self.errs.push(out);
            env[a.slot as usize] = self.c.bv_fit(&v, lo, hi);
        }
        Ok(())
    }
}

impl<'m> BmcEngine<'m> {
    pub fn new(model: &'m CompiledModel) -> Result<Self, GenError> {
        let c = Circuit::new();
        let s0 = crate::engine::init_state(model)
            .into_iter()
            .enumerate()
            .map(|(slot, v)| {
                let (lo, hi) = model.slot_domain(slot).code_range();
                c.bv_fit(&c.bv_const(v), lo as i128, hi as i128)
            })
            .collect();
        Ok(Self {
            model,
            c,
            frames: vec![s0],
            inputs: Vec::new(),
        })
    }

    /// Deepest unrolled frame.
    pub fn depth(&self) -> usize {
        self.frames.len() - 1
    }

    /// Adds one step. Fails with the simulator's error if some error-free
    /// path of the current depth can raise a runtime error on this step.
    fn extend(&mut self) -> Result<(), GenError> {
        let k = self.depth();
        let column: Vec<Bv> = (0..self.model.nondet_len())
            .map(|i| {
                let (lo, hi) = self.model.nondet_domain(i).code_range();
                self.c.bv_input(lo, hi)
            })
            .collect();
        let mut env: Vec<Bv> = self.frames[k].iter().chain(&column).cloned().collect();
        let mut enc = Enc {
            c: &mut self.c,
            errs: Vec::new(),
        };
        enc.block(&self.model.plant, &mut env).map_err(GenError::Bmc)?;
        enc.block(&self.model.controller, &mut env).map_err(GenError::Bmc)?;
        let errs = enc.errs;
        let err = self.c.or_all(&errs);
        self.inputs.push(column);
        env.truncate(self.model.state_len());
        self.frames.push(env);

        if err != self.c.fls() {
            match self.c.solve(&[err]) {
                Some(true) => {
                    let cols = self.columns(k + 1);
                    return Err(match finite_trace(self.model, &cols) {
                        Err(e) => GenError::Sim(e),
                        Ok(_) => GenError::Internal("bmc error path replays cleanly".into()),
                    });
                }
                Some(false) => self.c.clause(&[!err]),
                None => return Err(GenError::Bmc("solver gave up".into())),
            }
        }
        Ok(())
    }

    /// Goal literal at depth `k`: the predicate holds and evaluates without error.
    fn goal(&mut self, pred: &CompiledExpr, k: usize) -> Result<Lit, GenError> {
        let column = if k == 0 {
            if pred.uses_nondet() {
                return Ok(self.c.fls());
            }
            (0..self.model.nondet_len()).map(|_| self.c.bv_const(0)).collect()
        } else {
            self.inputs[k - 1].clone()
        };
        let env: Vec<Bv> = self.frames[k].iter().cloned().chain(column).collect();
        let t = self.c.tru();
        let mut enc = Enc {
            c: &mut self.c,
            errs: Vec::new(),
        };
        let holds = enc.truth(&pred.code, &env, t).map_err(GenError::Bmc)?;
        let errs = enc.errs;
        let err = self.c.or_all(&errs);
        Ok(self.c.and(holds, !err))
    }

    fn sat(&mut self, lit: Lit) -> Result<bool, GenError> {
        if lit == self.c.fls() {
            return Ok(false);
        }
        self.c.solve(&[lit]).ok_or_else(|| GenError::Bmc("solver gave up".into()))
    }

    /// Input columns of the first `len` steps in the last model.
    fn columns(&self, len: usize) -> Vec<NondetValues> {
        self.inputs[..len]
            .iter()
            .map(|col| col.iter().map(|b| self.c.bv_value(b)).collect())
            .collect()
    }
}

impl Reachability for BmcEngine<'_> {
    fn reach(
        &mut self,
        pred: &CompiledExpr,
        max_len: usize,
    ) -> Result<Option<(usize, Vec<NondetValues>)>, GenError> {
        // Frames that already exist are searched at once, then by bisection.
        let avail = self.depth().min(max_len);
        let mut prefix = Vec::with_capacity(avail + 1);
        let mut acc = self.c.fls();
        for k in 0..=avail {
            let g = self.goal(pred, k)?;
            acc = self.c.or(acc, g);
            prefix.push(acc);
        }
        if self.sat(acc)? {
            let (mut lo, mut hi) = (0, avail);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if self.sat(prefix[mid])? {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            if !self.sat(prefix[hi])? {
                return Err(GenError::Internal("bmc bisection lost its witness".into()));
            }
            return Ok(Some((hi, self.columns(hi))));
        }
        for k in avail + 1..=max_len {
            while self.depth() < k {
                self.extend()?;
            }
            let g = self.goal(pred, k)?;
            if self.sat(g)? {
                return Ok(Some((k, self.columns(k))));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_expr, parse_model};
    use crate::engine::SimError;

    fn compile(text: &str) -> CompiledModel {
        CompiledModel::new(&parse_model(text).unwrap()).unwrap()
    }

    fn reach(m: &CompiledModel, e: &mut BmcEngine, goal: &str, max: usize) -> Option<usize> {
        let p = m.compile_predicate(&parse_expr(goal).unwrap()).unwrap();
        let hit = e.reach(&p, max).unwrap();
        if let Some((d, cols)) = &hit {
            let trace = finite_trace(m, cols).unwrap();
            assert_eq!(cols.len(), *d);
            let mut env = trace[*d].clone();
            env.extend(cols.last().cloned().unwrap_or_else(|| vec![0; m.nondet_len()]));
            assert!(p.holds(&env), "{goal} fails on replay");
        }
        hit.map(|h| h.0)
    }

    #[test]
    fn shortest_depths() {
        let m = compile("model M nondet u : int 0..2 input c : int 0..9 = 0 plant { c = c + u > 9 ? 9 : c + u; } controller { }");
        let mut e = BmcEngine::new(&m).unwrap();
        assert_eq!(reach(&m, &mut e, "c == 0", 5), Some(0));
        assert_eq!(reach(&m, &mut e, "c == 5", 5), Some(3));
        assert_eq!(reach(&m, &mut e, "c == 3", 5), Some(2));
        assert_eq!(reach(&m, &mut e, "c == 9", 3), None);
        assert_eq!(reach(&m, &mut e, "u == 2 && c == 2", 5), Some(1));
        assert_eq!(reach(&m, &mut e, "u == 1", 0), None);
    }

    #[test]
    fn euclidean_arithmetic() {
        let m = compile("model M nondet u : int -4..4 input q : int -9..9 = 0 input r : int 0..9 = 0 plant { q = u != 0 ? 7 / u : 0; r = u != 0 ? -7 mod u : 0; } controller { }");
        let mut e = BmcEngine::new(&m).unwrap();
        assert_eq!(reach(&m, &mut e, "q == -2 && r == 2", 3), Some(1));
        assert_eq!(reach(&m, &mut e, "q == -3 && r == 1", 3), Some(1));
        assert_eq!(reach(&m, &mut e, "q == -2 && r == 1", 3), None);
        assert_eq!(reach(&m, &mut e, "r == 3", 3), None);
    }

    #[test]
    fn reachable_errors_surface() {
        let m = compile("model M nondet u : int 0..1 input c : int 0..3 = 0 plant { c = c + u; } controller { }");
        let mut e = BmcEngine::new(&m).unwrap();
        assert_eq!(reach(&m, &mut e, "c == 3", 3), Some(3));
        let p = m.compile_predicate(&parse_expr("c == 9 - 9 + 4 - 1 && u == 0").unwrap()).unwrap();
        let err = e.reach(&p, 6).unwrap_err();
        assert!(matches!(err, GenError::Sim(SimError::DomainViolation { value: 4, .. })), "{err:?}");

        let m = compile("model M nondet u : int 0..1 input c : int 0..3 = 0 plant { c = 3 / u; } controller { }");
        let mut e = BmcEngine::new(&m).unwrap();
        let p = m.compile_predicate(&parse_expr("c == 3").unwrap()).unwrap();
        assert!(matches!(e.reach(&p, 2), Err(GenError::Sim(SimError::DivisionByZero { .. }))));
    }
}

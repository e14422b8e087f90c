//! Slow reference implementations used to cross-check the fast paths.

use crate::engine::{step, LassoTrace, NondetValues, SimError};
use crate::ir::{CompiledExpr, CompiledModel, EvalError};
use crate::ltl::Ltl;
use crate::testgen::goal_holds;

/// Satisfaction of `f` at position `k` of the unwinding of `trace`, by direct
/// recursion on the unrolled word. Temporal operators scan forward `p + q`
/// positions, which visits every position reachable from `k`.
pub fn brute_force_eval(
    f: &Ltl,
    model: &CompiledModel,
    trace: &LassoTrace,
    k: usize,
) -> Result<bool, String> {
    let horizon = trace.prefix_len + trace.loop_len;
    let at = |i: usize| &trace.states[trace.fold(i)];
    sat(f, model, &at, horizon, k)
}

fn sat<'t>(
    f: &Ltl,
    model: &CompiledModel,
    at: &impl Fn(usize) -> &'t Vec<i64>,
    horizon: usize,
    i: usize,
) -> Result<bool, String> {
    let rec = |g: &Ltl, j: usize| sat(g, model, at, horizon, j);
    Ok(match f {
        Ltl::Atom(e) => {
            let c = model.compile_predicate(e)?;
            let mut env = at(i).clone();
            env.resize(model.state_len() + model.nondet_len(), 0);
            c.eval(&env).map_err(|e: EvalError| e.to_string())? != 0
        }
        Ltl::Not(a) => !rec(a, i)?,
        Ltl::And(a, b) => rec(a, i)? && rec(b, i)?,
        Ltl::Or(a, b) => rec(a, i)? || rec(b, i)?,
        Ltl::Implies(a, b) => !rec(a, i)? || rec(b, i)?,
        Ltl::Next(a) => rec(a, i + 1)?,
        Ltl::Finally(a) => {
            for j in i..i + horizon {
                if rec(a, j)? {
                    return Ok(true);
                }
            }
            false
        }
        Ltl::Globally(a) => {
            for j in i..i + horizon {
                if !rec(a, j)? {
                    return Ok(false);
                }
            }
            true
        }
        Ltl::Until(a, b) => {
            for j in i..i + horizon {
                if rec(b, j)? {
                    return Ok(true);
                }
                if !rec(a, j)? {
                    return Ok(false);
                }
            }
            false
        }
    })
}

/// Every nondet column in lexicographic declaration/domain order.
pub fn all_columns(model: &CompiledModel) -> Vec<NondetValues> {
    let mut cols: Vec<NondetValues> = vec![Vec::new()];
    for i in 0..model.nondet_len() {
        let (lo, hi) = model.nondet_domain(i).code_range();
        cols = cols
            .into_iter()
            .flat_map(|c| {
                (lo..=hi).map(move |v| {
                    let mut c = c.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    cols
}

/// Fewest steps after which `pred` holds, over every input sequence of at
/// most `max_len` columns, found by enumerating the full input tree.
pub fn exhaustive_reach(
    model: &CompiledModel,
    pred: &CompiledExpr,
    max_len: usize,
) -> Result<Option<usize>, SimError> {
    let cols = all_columns(model);
    let mut env = Vec::new();
    let s0 = crate::engine::init_state(model);
    if goal_holds(model, pred, &s0, None, &mut env) {
        return Ok(Some(0));
    }
    let mut best: Option<usize> = None;
    let mut stack = vec![(s0, 0usize)];
    while let Some((s, d)) = stack.pop() {
        if d == max_len || best.is_some_and(|b| d + 1 >= b) {
            continue;
        }
        for c in &cols {
            let next = step(model, &s, c)?;
            if goal_holds(model, pred, &next, Some(c), &mut env) {
                best = Some(best.map_or(d + 1, |b| b.min(d + 1)));
            } else {
                stack.push((next, d + 1));
            }
        }
    }
    Ok(best)
}

/// Source of choices for the random generators: `pick(n)` returns a value in
/// `0..n`. Any RNG or a proptest byte stream can drive it.
pub type Pick<'a> = &'a mut dyn FnMut(usize) -> usize;

#[derive(Clone, Copy)]
enum Ty {
    Bool,
    Int(i64),
    Enum(usize, usize),
}

struct ModelGen<'a> {
    pick: Pick<'a>,
    vars: Vec<(String, Ty)>,
}

impl ModelGen<'_> {
    fn of(&self, pred: impl Fn(Ty) -> bool) -> Vec<(String, Ty)> {
        self.vars.iter().filter(|(_, t)| pred(*t)).cloned().collect()
    }

    fn int(&mut self, depth: usize) -> String {
        let ints = self.of(|t| matches!(t, Ty::Int(_)));
        let bools = self.of(|t| matches!(t, Ty::Bool));
        let leaf = depth == 0 || (self.pick)(3) == 0;
        if leaf {
            return match (self.pick)(3) {
                0 if !ints.is_empty() => ints[(self.pick)(ints.len())].0.clone(),
                1 if !bools.is_empty() => format!("({} ? 1 : 0)", bools[(self.pick)(bools.len())].0),
                _ => (self.pick)(4).to_string(),
            };
        }
        match (self.pick)(5) {
            0 => format!("({} + {})", self.int(depth - 1), self.int(depth - 1)),
            1 => format!("({} - {})", self.int(depth - 1), self.int(depth - 1)),
            2 => format!("({} * {})", self.int(depth - 1), self.int(depth - 1)),
            3 => format!("({} mod {})", self.int(depth - 1), 2 + (self.pick)(2)),
            _ => format!(
                "({} ? {} : {})",
                self.bool(depth - 1),
                self.int(depth - 1),
                self.int(depth - 1)
            ),
        }
    }

    fn bool(&mut self, depth: usize) -> String {
        let bools = self.of(|t| matches!(t, Ty::Bool));
        let enums = self.of(|t| matches!(t, Ty::Enum(..)));
        let leaf = depth == 0 || (self.pick)(3) == 0;
        if leaf {
            return match (self.pick)(4) {
                0 if !bools.is_empty() => bools[(self.pick)(bools.len())].0.clone(),
                1 if !enums.is_empty() => {
                    let (name, t) = &enums[(self.pick)(enums.len())];
                    format!("({name} == {})", self.label(*t))
                }
                2 => ["true", "false"][(self.pick)(2)].to_string(),
                _ => {
                    let op = ["==", "!=", "<", "<=", ">", ">="][(self.pick)(6)];
                    format!("({} {op} {})", self.int(depth.saturating_sub(1)), self.int(depth.saturating_sub(1)))
                }
            };
        }
        match (self.pick)(3) {
            0 => format!("({} && {})", self.bool(depth - 1), self.bool(depth - 1)),
            1 => format!("({} || {})", self.bool(depth - 1), self.bool(depth - 1)),
            _ => format!("!{}", self.bool(depth - 1)),
        }
    }

    fn label(&mut self, t: Ty) -> String {
        let Ty::Enum(id, size) = t else { unreachable!() };
        format!("e{id}_{}", (self.pick)(size))
    }

    fn rhs(&mut self, t: Ty) -> String {
        match t {
            Ty::Bool => self.bool(2),
            Ty::Int(hi) => format!("({}) mod {}", self.int(2), hi + 1),
            Ty::Enum(..) => format!("{} ? {} : {}", self.bool(2), self.label(t), self.label(t)),
        }
    }
}

/// A random well-formed model with `nondet` nondeterministic and `state`
/// other variables, every domain of at most four values.
pub fn random_model_text(pick: Pick<'_>, nondet: usize, state: usize) -> String {
    let mut g = ModelGen {
        pick,
        vars: Vec::new(),
    };
    let mut decls = String::new();
    let mut plant = String::new();
    let mut controller = String::new();
    let ty = |g: &mut ModelGen, id: usize, enums: bool| match (g.pick)(if enums { 3 } else { 2 }) {
        0 => Ty::Bool,
        1 => Ty::Int(1 + (g.pick)(3) as i64),
        _ => Ty::Enum(id, 2 + (g.pick)(3)),
    };
    for i in 0..nondet {
        let t = ty(&mut g, i, false);
        let t = match t {
            Ty::Int(hi) => Ty::Int(hi.min(2)),
            t => t,
        };
        let name = format!("n{i}");
        decls.push_str(&format!("nondet {name} : {}\n", ty_text(t)));
        g.vars.push((name, t));
    }
    let mut targets = Vec::new();
    for i in 0..state {
        let t = ty(&mut g, nondet + i, true);
        let kind = ["input", "plantvar", "output", "ctrlvar"][(g.pick)(4)];
        let name = format!("v{i}");
        let init = match t {
            Ty::Bool => ["false", "true"][(g.pick)(2)].to_string(),
            Ty::Int(hi) => (g.pick)(hi as usize + 1).to_string(),
            Ty::Enum(..) => g.label(t),
        };
        decls.push_str(&format!("{kind} {name} : {} = {init}\n", ty_text(t)));
        g.vars.push((name.clone(), t));
        targets.push((name, t, kind == "input" || kind == "plantvar"));
    }
    for (name, t, in_plant) in targets {
        let line = format!("  {name} = {};\n", g.rhs(t));
        if in_plant {
            plant.push_str(&line);
        } else {
            controller.push_str(&line);
        }
    }
    format!("model random\n{decls}plant {{\n{plant}}}\ncontroller {{\n{controller}}}\n")
}

fn ty_text(t: Ty) -> String {
    match t {
        Ty::Bool => "bool".into(),
        Ty::Int(hi) => format!("int 0..{hi}"),
        Ty::Enum(id, size) => {
            let labels: Vec<String> = (0..size).map(|k| format!("e{id}_{k}")).collect();
            format!("enum {{ {} }}", labels.join(", "))
        }
    }
}

/// A random LTL formula over `atoms` with temporal nesting depth at most `depth`.
pub fn random_ltl_text(pick: Pick<'_>, atoms: &[&str], depth: usize) -> String {
    if depth == 0 || pick(4) == 0 {
        let a = atoms[pick(atoms.len())];
        return if pick(3) == 0 { format!("!({a})") } else { format!("({a})") };
    }
    let sub = |pick: Pick<'_>| random_ltl_text(pick, atoms, depth - 1);
    match pick(8) {
        0 => format!("X {}", sub(pick)),
        1 => format!("F {}", sub(pick)),
        2 => format!("G {}", sub(pick)),
        3 => format!("({} U {})", sub(pick), sub(pick)),
        4 => format!("({} && {})", sub(pick), sub(pick)),
        5 => format!("({} || {})", sub(pick), sub(pick)),
        6 => format!("({} -> {})", sub(pick), sub(pick)),
        _ => format!("!{}", sub(pick)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_expr, parse_ltl, parse_model};
    use crate::ltl::BoundFormula;

    fn model() -> CompiledModel {
        CompiledModel::new(
            &parse_model("model M nondet u : int 0..2 input x : bool = false input y : bool = false input c : int 0..3 = 0 plant { c = (c + u) mod 4; } controller { }")
                .unwrap(),
        )
        .unwrap()
    }

    fn lasso(rows: &[(bool, bool)], p: usize) -> LassoTrace {
        LassoTrace {
            states: rows.iter().map(|&(x, y)| vec![x as i64, y as i64, 0]).collect(),
            applied: vec![None; rows.len()],
            prefix_len: p,
            loop_len: rows.len() - p,
        }
    }

    #[test]
    fn until_on_a_loop() {
        let m = model();
        let t = lasso(&[(true, false), (true, false), (false, true)], 1);
        let f = parse_ltl("x U y").unwrap();
        assert!(brute_force_eval(&f, &m, &t, 0).unwrap());
        let f = parse_ltl("G F y && !(F G y)").unwrap();
        assert!(brute_force_eval(&f, &m, &t, 0).unwrap());
        let bound = BoundFormula::bind(&f, &m).unwrap();
        assert!(bound.eval(&t, m.nondet_len(), 0).unwrap());
    }

    #[test]
    fn exhaustive_depths() {
        let m = model();
        let goal = |s: &str| m.compile_predicate(&parse_expr(s).unwrap()).unwrap();
        assert_eq!(exhaustive_reach(&m, &goal("c == 0"), 3).unwrap(), Some(0));
        assert_eq!(exhaustive_reach(&m, &goal("c == 3"), 3).unwrap(), Some(2));
        assert_eq!(exhaustive_reach(&m, &goal("c == 3"), 1).unwrap(), None);
        assert_eq!(exhaustive_reach(&m, &goal("u == 1"), 3).unwrap(), Some(1));
        assert_eq!(all_columns(&m), vec![vec![0], vec![1], vec![2]]);
    }

    fn counter(seed: usize) -> impl FnMut(usize) -> usize {
        let mut x = seed;
        move |n| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 33) % n
        }
    }

    #[test]
    fn random_models_validate() {
        for seed in 0..200 {
            let mut pick = counter(seed);
            let text = random_model_text(&mut pick, 1 + seed % 2, 1 + seed % 3);
            let m = parse_model(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
            CompiledModel::new(&m).unwrap_or_else(|e| panic!("{e}\n{text}"));
        }
    }

    #[test]
    fn random_formulas_parse() {
        for seed in 0..200 {
            let mut pick = counter(seed);
            let text = random_ltl_text(&mut pick, &["a", "c == 1", "b || c > 2"], 4);
            let f = parse_ltl(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
            assert!(f.temporal_depth() <= 4, "{text}");
        }
    }
}

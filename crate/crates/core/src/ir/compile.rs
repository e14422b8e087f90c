use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::expr::{BinOp, Expr, UnOp};
use super::model::{BlockKind, ClosedLoopModel};
use super::types::{display_name, Domain, SourceSpan, Value, VarKind};

/// Static type of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ty {
    Bool,
    Int,
    /// Index into the model's table of distinct enum domains.
    Enum(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Model,
    Variable(String),
    Assignment { block: BlockKind, index: usize, target: String },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Model => f.write_str("model"),
            Location::Variable(v) => write!(f, "variable {}", display_name(v)),
            Location::Assignment {
                block,
                index,
                target,
            } => write!(f, "{block} assignment #{index} ({})", display_name(target)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub location: Location,
    pub message: String,
    pub span: Option<SourceSpan>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(span) = &self.span {
            write!(f, "{span}: ")?;
        }
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// Non-empty list of validation diagnostics.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationErrors(pub Vec<Diagnostic>);

#[derive(Debug, Clone, Copy, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic overflow")]
    Overflow,
}

/// Expression resolved against a model: identifiers become environment slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum CExpr {
    Const(i64),
    Slot(u32),
    Not(Box<CExpr>),
    Neg(Box<CExpr>),
    Bin(BinOp, Box<CExpr>, Box<CExpr>),
    Cond(Box<CExpr>, Box<CExpr>, Box<CExpr>),
}

impl CExpr {
    /// Evaluates with short-circuiting `&&`, `||`, `->` and `?:`.
    /// Bools are 0/1; intermediate arithmetic is checked i64.
    pub(crate) fn eval(&self, env: &[i64]) -> Result<i64, EvalError> {
        Ok(match self {
            CExpr::Const(c) => *c,
            CExpr::Slot(s) => env[*s as usize],
            CExpr::Not(e) => (e.eval(env)? == 0) as i64,
            CExpr::Neg(e) => e.eval(env)?.checked_neg().ok_or(EvalError::Overflow)?,
            CExpr::Cond(c, a, b) => {
                if c.eval(env)? != 0 {
                    a.eval(env)?
                } else {
                    b.eval(env)?
                }
            }
            CExpr::Bin(op, a, b) => match op {
                BinOp::And => (a.eval(env)? != 0 && b.eval(env)? != 0) as i64,
                BinOp::Or => (a.eval(env)? != 0 || b.eval(env)? != 0) as i64,
                BinOp::Implies => (a.eval(env)? == 0 || b.eval(env)? != 0) as i64,
                _ => {
                    let x = a.eval(env)?;
                    let y = b.eval(env)?;
                    apply_arith_cmp(*op, x, y)?
                }
            },
        })
    }

    pub(crate) fn for_each_slot(&self, f: &mut impl FnMut(u32)) {
        match self {
            CExpr::Const(_) => {}
            CExpr::Slot(s) => f(*s),
            CExpr::Not(e) | CExpr::Neg(e) => e.for_each_slot(f),
            CExpr::Bin(_, a, b) => {
                a.for_each_slot(f);
                b.for_each_slot(f);
            }
            CExpr::Cond(c, a, b) => {
                c.for_each_slot(f);
                a.for_each_slot(f);
                b.for_each_slot(f);
            }
        }
    }
}

/// Integer division and remainder are Euclidean: `x mod y` is never negative.
pub(crate) fn apply_arith_cmp(op: BinOp, x: i64, y: i64) -> Result<i64, EvalError> {
    Ok(match op {
        BinOp::Add => x.checked_add(y).ok_or(EvalError::Overflow)?,
        BinOp::Sub => x.checked_sub(y).ok_or(EvalError::Overflow)?,
        BinOp::Mul => x.checked_mul(y).ok_or(EvalError::Overflow)?,
        BinOp::Div => {
            if y == 0 {
                return Err(EvalError::DivisionByZero);
            }
            x.checked_div_euclid(y).ok_or(EvalError::Overflow)?
        }
        BinOp::Mod => {
            if y == 0 {
                return Err(EvalError::DivisionByZero);
            }
            x.checked_rem_euclid(y).ok_or(EvalError::Overflow)?
        }
        BinOp::Eq => (x == y) as i64,
        BinOp::Ne => (x != y) as i64,
        BinOp::Lt => (x < y) as i64,
        BinOp::Le => (x <= y) as i64,
        BinOp::Gt => (x > y) as i64,
        BinOp::Ge => (x >= y) as i64,
        BinOp::And | BinOp::Or | BinOp::Implies => unreachable!("logical ops short-circuit"),
    })
}

/// A predicate or term compiled against a particular model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledExpr {
    pub(crate) code: CExpr,
    pub(crate) ty: Ty,
    pub(crate) uses_nondet: bool,
}

impl CompiledExpr {
    pub fn ty(&self) -> Ty {
        self.ty
    }

    /// True if the expression reads a nondeterministic variable.
    pub fn uses_nondet(&self) -> bool {
        self.uses_nondet
    }

    /// Evaluates on a full environment (state slots followed by nondet slots).
    pub fn eval(&self, env: &[i64]) -> Result<i64, EvalError> {
        self.code.eval(env)
    }

    /// Boolean evaluation; errors count as false.
    pub fn holds(&self, env: &[i64]) -> bool {
        matches!(self.code.eval(env), Ok(v) if v != 0)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CAssign {
    pub slot: u32,
    pub lo: i64,
    pub hi: i64,
    pub rhs: CExpr,
}

#[derive(Debug, Clone)]
pub(crate) struct SlotInfo {
    pub var: usize,
}

/// A validated model with expressions resolved to environment slots.
///
/// The environment of a step is `[state slots..., nondet slots...]`; state
/// slots hold every non-nondeterministic variable in declaration order.
#[derive(Debug, Clone)]
pub struct CompiledModel {
    model: ClosedLoopModel,
    pub(crate) slots: Vec<SlotInfo>,
    var_slot: Vec<usize>,
    names: HashMap<String, usize>,
    pub(crate) n_state: usize,
    pub(crate) n_nondet: usize,
    pub(crate) plant: Vec<CAssign>,
    pub(crate) controller: Vec<CAssign>,
    enums: Vec<Vec<String>>,
    labels: HashMap<String, Vec<(u32, i64)>>,
    pub(crate) init: Vec<i64>,
}

impl CompiledModel {
    pub fn new(model: &ClosedLoopModel) -> Result<Self, ValidationErrors> {
        let mut diags = Vec::new();
        let mut names = HashMap::new();
        let mut enums: Vec<Vec<String>> = Vec::new();
        let mut labels: HashMap<String, Vec<(u32, i64)>> = HashMap::new();

        for (i, v) in model.variables.iter().enumerate() {
            let here = |message: String| Diagnostic {
                location: Location::Variable(v.name.clone()),
                message,
                span: v.span.clone(),
            };
            if names.insert(v.name.clone(), i).is_some() {
                diags.push(here("duplicate variable name".into()));
            }
            match &v.domain {
                Domain::IntRange { lo, hi } if lo > hi => {
                    diags.push(here(format!("empty int range {lo}..{hi}")));
                }
                Domain::Enum { labels: ls } => {
                    if ls.is_empty() {
                        diags.push(here("enum domain needs at least one label".into()));
                    }
                    let distinct: HashSet<_> = ls.iter().collect();
                    if distinct.len() != ls.len() {
                        diags.push(here("duplicate enum label".into()));
                    }
                    if !enums.contains(ls) {
                        let id = enums.len() as u32;
                        enums.push(ls.clone());
                        for (code, l) in ls.iter().enumerate() {
                            labels.entry(l.clone()).or_default().push((id, code as i64));
                        }
                    }
                }
                _ => {}
            }
            match (&v.kind, &v.init) {
                (VarKind::Nondeterministic, Some(_)) => {
                    diags.push(here("nondeterministic variable carries an init value".into()))
                }
                (_, None) => {}
                (_, Some(init)) => {
                    if v.domain.encode(init).is_none() {
                        diags.push(here(format!("init value {init} out of domain {}", v.domain)));
                    }
                }
            }
        }
        let mut sorted: Vec<_> = labels.iter().collect();
        sorted.sort();
        for (label, owners) in sorted {
            if names.contains_key(label) {
                diags.push(Diagnostic {
                    location: Location::Variable(label.clone()),
                    message: "variable name clashes with an enum label".into(),
                    span: None,
                });
            }
            if owners.len() > 1 {
                diags.push(Diagnostic {
                    location: Location::Model,
                    message: format!("enum label `{label}` belongs to several enum domains"),
                    span: None,
                });
            }
        }

        let mut slots = Vec::new();
        let mut var_slot = vec![0; model.variables.len()];
        for pass_nondet in [false, true] {
            for (i, v) in model.variables.iter().enumerate() {
                if (v.kind == VarKind::Nondeterministic) == pass_nondet {
                    var_slot[i] = slots.len();
                    slots.push(SlotInfo { var: i });
                }
            }
        }
        let n_nondet = model.count_kind(VarKind::Nondeterministic);
        let n_state = slots.len() - n_nondet;
        let init = model
            .state_variables()
            .map(|v| {
                v.init
                    .as_ref()
                    .and_then(|x| v.domain.encode(x))
                    .unwrap_or_else(|| v.domain.code_range().0)
            })
            .collect();

        let mut cm = CompiledModel {
            model: model.clone(),
            slots,
            var_slot,
            names,
            n_state,
            n_nondet,
            plant: Vec::new(),
            controller: Vec::new(),
            enums,
            labels,
            init,
        };

        for block in [BlockKind::Plant, BlockKind::Controller] {
            let mut compiled = Vec::new();
            for (index, a) in model.block(block).assignments.iter().enumerate() {
                let here = |message: String| Diagnostic {
                    location: Location::Assignment {
                        block,
                        index,
                        target: a.target.clone(),
                    },
                    message,
                    span: a.span.clone(),
                };
                let Some(&vi) = cm.names.get(&a.target) else {
                    diags.push(here(format!(
                        "undeclared variable `{}`",
                        display_name(&a.target)
                    )));
                    continue;
                };
                let var = &model.variables[vi];
                if !block.may_assign(var.kind) {
                    let who = if block == BlockKind::Plant {
                        "plant"
                    } else {
                        "controller"
                    };
                    diags.push(here(format!("kind violation: {who} assigns {}", var.kind)));
                    continue;
                }
                let target_ty = cm.var_ty(vi);
                match cm.check(&a.rhs, Some(target_ty)) {
                    Ok((rhs, ty)) if ty == target_ty => {
                        let slot = cm.var_slot[vi];
                        let (lo, hi) = var.domain.code_range();
                        compiled.push(CAssign {
                            slot: slot as u32,
                            lo,
                            hi,
                            rhs,
                        });
                    }
                    Ok((_, ty)) => diags.push(here(format!(
                        "type mismatch: assigning {} to {} variable",
                        cm.ty_name(ty),
                        cm.ty_name(target_ty)
                    ))),
                    Err(msg) => diags.push(here(msg)),
                }
            }
            match block {
                BlockKind::Plant => cm.plant = compiled,
                BlockKind::Controller => cm.controller = compiled,
            }
        }

        if diags.is_empty() {
            Ok(cm)
        } else {
            Err(ValidationErrors(diags))
        }
    }

    pub fn model(&self) -> &ClosedLoopModel {
        &self.model
    }

    pub fn state_len(&self) -> usize {
        self.n_state
    }

    pub fn nondet_len(&self) -> usize {
        self.n_nondet
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.get(name).copied()
    }

    /// Slot of a variable in the step environment.
    pub fn slot_of(&self, var: usize) -> usize {
        self.var_slot[var]
    }

    /// Variable index of a slot.
    pub fn var_of_slot(&self, slot: usize) -> usize {
        self.slots[slot].var
    }

    pub fn slot_domain(&self, slot: usize) -> &Domain {
        &self.model.variables[self.slots[slot].var].domain
    }

    /// Domain of the i-th nondeterministic variable.
    pub fn nondet_domain(&self, i: usize) -> &Domain {
        self.slot_domain(self.n_state + i)
    }

    pub fn nondet_names(&self) -> Vec<String> {
        self.model.nondet_variables().map(|v| v.name.clone()).collect()
    }

    pub(crate) fn var_ty(&self, var: usize) -> Ty {
        match &self.model.variables[var].domain {
            Domain::Bool => Ty::Bool,
            Domain::IntRange { .. } => Ty::Int,
            Domain::Enum { labels } => Ty::Enum(
                self.enums
                    .iter()
                    .position(|e| e == labels)
                    .expect("enum registered") as u32,
            ),
        }
    }

    fn ty_name(&self, ty: Ty) -> String {
        match ty {
            Ty::Bool => "bool".into(),
            Ty::Int => "int".into(),
            Ty::Enum(id) => format!("enum {{ {} }}", self.enums[id as usize].join(", ")),
        }
    }

    /// Type-checks and resolves an expression against this model.
    pub fn compile_expr(&self, e: &Expr) -> Result<CompiledExpr, String> {
        let (code, ty) = self.check(e, None)?;
        let mut uses_nondet = false;
        code.for_each_slot(&mut |s| uses_nondet |= s as usize >= self.n_state);
        Ok(CompiledExpr {
            code,
            ty,
            uses_nondet,
        })
    }

    /// Compiles a Boolean predicate; non-bool expressions are rejected.
    pub fn compile_predicate(&self, e: &Expr) -> Result<CompiledExpr, String> {
        let c = self.compile_expr(e)?;
        if c.ty != Ty::Bool {
            return Err(format!(
                "type mismatch: predicate `{e}` has type {}",
                self.ty_name(c.ty)
            ));
        }
        Ok(c)
    }

    fn is_label(&self, e: &Expr) -> bool {
        matches!(e, Expr::Ident(n) if !self.names.contains_key(n) && self.labels.contains_key(n))
    }

    fn check(&self, e: &Expr, expected: Option<Ty>) -> Result<(CExpr, Ty), String> {
        match e {
            Expr::Bool(b) => Ok((CExpr::Const(*b as i64), Ty::Bool)),
            Expr::Int(i) => Ok((CExpr::Const(*i), Ty::Int)),
            Expr::Ident(name) => {
                if let Some(&vi) = self.names.get(name) {
                    return Ok((CExpr::Slot(self.var_slot[vi] as u32), self.var_ty(vi)));
                }
                match self.labels.get(name).map(Vec::as_slice) {
                    Some([(id, code)]) => Ok((CExpr::Const(*code), Ty::Enum(*id))),
                    Some(owners) => match expected {
                        Some(Ty::Enum(want)) => owners
                            .iter()
                            .find(|(id, _)| *id == want)
                            .map(|(id, code)| (CExpr::Const(*code), Ty::Enum(*id)))
                            .ok_or_else(|| format!("ambiguous enum label `{name}`")),
                        _ => Err(format!("ambiguous enum label `{name}`")),
                    },
                    None => Err(format!("undeclared variable `{}`", display_name(name))),
                }
            }
            Expr::Unary(UnOp::Not, inner) => {
                let (c, t) = self.check(inner, Some(Ty::Bool))?;
                if t != Ty::Bool {
                    return Err(format!("type mismatch: `!` applied to {}", self.ty_name(t)));
                }
                Ok((CExpr::Not(Box::new(c)), Ty::Bool))
            }
            Expr::Unary(UnOp::Neg, inner) => {
                let (c, t) = self.check(inner, Some(Ty::Int))?;
                if t != Ty::Int {
                    return Err(format!("type mismatch: `-` applied to {}", self.ty_name(t)));
                }
                Ok((CExpr::Neg(Box::new(c)), Ty::Int))
            }
            Expr::Binary(op, a, b) => {
                let (ca, ta, cb, tb) = if self.is_label(a) && !self.is_label(b) {
                    let (cb, tb) = self.check(b, None)?;
                    let (ca, ta) = self.check(a, Some(tb))?;
                    (ca, ta, cb, tb)
                } else {
                    let (ca, ta) = self.check(a, None)?;
                    let (cb, tb) = self.check(b, Some(ta))?;
                    (ca, ta, cb, tb)
                };
                let mismatch = || {
                    format!(
                        "type mismatch: {} {} {}",
                        self.ty_name(ta),
                        op.symbol(),
                        self.ty_name(tb)
                    )
                };
                let ty = if op.is_logical() {
                    if ta != Ty::Bool || tb != Ty::Bool {
                        return Err(mismatch());
                    }
                    Ty::Bool
                } else if op.is_arithmetic() {
                    if ta != Ty::Int || tb != Ty::Int {
                        return Err(mismatch());
                    }
                    Ty::Int
                } else if matches!(op, BinOp::Eq | BinOp::Ne) {
                    if ta != tb {
                        return Err(mismatch());
                    }
                    Ty::Bool
                } else {
                    if ta != Ty::Int || tb != Ty::Int {
                        return Err(mismatch());
                    }
                    Ty::Bool
                };
                Ok((CExpr::Bin(*op, Box::new(ca), Box::new(cb)), ty))
            }
            Expr::Cond(c, a, b) => {
                let (cc, tc) = self.check(c, Some(Ty::Bool))?;
                if tc != Ty::Bool {
                    return Err(format!(
                        "type mismatch: condition has type {}",
                        self.ty_name(tc)
                    ));
                }
                let (ca, ta, cb, tb) = if self.is_label(a) && !self.is_label(b) {
                    let (cb, tb) = self.check(b, expected)?;
                    let (ca, ta) = self.check(a, Some(tb))?;
                    (ca, ta, cb, tb)
                } else {
                    let (ca, ta) = self.check(a, expected)?;
                    let (cb, tb) = self.check(b, Some(ta))?;
                    (ca, ta, cb, tb)
                };
                if ta != tb {
                    return Err(format!(
                        "type mismatch: conditional branches {} and {}",
                        self.ty_name(ta),
                        self.ty_name(tb)
                    ));
                }
                Ok((CExpr::Cond(Box::new(cc), Box::new(ca), Box::new(cb)), ta))
            }
        }
    }

    /// Decodes a slot value for display.
    pub fn decode_slot(&self, slot: usize, code: i64) -> Value {
        self.slot_domain(slot).decode(code)
    }
}

/// Checks every model invariant; an empty list means the model is well formed.
pub fn validate_model(model: &ClosedLoopModel) -> Vec<Diagnostic> {
    match CompiledModel::new(model) {
        Ok(_) => Vec::new(),
        Err(ValidationErrors(d)) => d,
    }
}

/// Evaluates `e` against a model environment (state plus optional nondet values).
pub fn eval_expr(
    model: &CompiledModel,
    e: &Expr,
    state: &[i64],
    nondet: Option<&[i64]>,
) -> Result<Value, EvalExprError> {
    let c = model.compile_expr(e).map_err(EvalExprError::Type)?;
    let mut env = Vec::with_capacity(model.n_state + model.n_nondet);
    env.extend_from_slice(state);
    match nondet {
        Some(nd) => env.extend_from_slice(nd),
        None => {
            if c.uses_nondet {
                return Err(EvalExprError::Type(
                    "expression reads a nondeterministic variable but none were supplied".into(),
                ));
            }
            env.resize(model.n_state + model.n_nondet, 0);
        }
    }
    let v = c.eval(&env).map_err(EvalExprError::Eval)?;
    Ok(match c.ty {
        Ty::Bool => Value::Bool(v != 0),
        Ty::Int => Value::Int(v),
        Ty::Enum(id) => Value::Label(
            model.enums[id as usize]
                .get(v as usize)
                .cloned()
                .unwrap_or_else(|| format!("<{v}>")),
        ),
    })
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalExprError {
    #[error("{0}")]
    Type(String),
    #[error(transparent)]
    Eval(EvalError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Assignment, Variable};

    fn int_var(name: &str, kind: VarKind, lo: i64, hi: i64, init: i64) -> Variable {
        Variable::new(name, kind, Domain::IntRange { lo, hi }, Some(Value::Int(init)))
    }

    fn model(vars: Vec<Variable>) -> ClosedLoopModel {
        let mut m = ClosedLoopModel::new("m");
        m.variables = vars;
        m
    }

    #[test]
    fn evaluates_literal_examples() {
        let cm = CompiledModel::new(&model(vec![])).unwrap();
        let e = Expr::cond(
            Expr::bin(BinOp::Gt, Expr::Int(3), Expr::Int(2)),
            Expr::Int(7),
            Expr::Int(0),
        );
        assert_eq!(eval_expr(&cm, &e, &[], None), Ok(Value::Int(7)));
    }

    #[test]
    fn evaluates_over_state() {
        let m = model(vec![
            int_var("x", VarKind::Input, 0, 9, 7),
            int_var("pos", VarKind::PlantInternal, 0, 9, 5),
            int_var("up", VarKind::Output, 0, 1, 1),
            int_var("down", VarKind::Output, 0, 1, 0),
        ]);
        let cm = CompiledModel::new(&m).unwrap();
        let s = [7, 5, 1, 0];
        let modulo = Expr::bin(BinOp::Mod, Expr::ident("x"), Expr::Int(3));
        assert_eq!(eval_expr(&cm, &modulo, &s, None), Ok(Value::Int(1)));
        let motion = Expr::bin(
            BinOp::Sub,
            Expr::bin(BinOp::Add, Expr::ident("pos"), Expr::ident("up")),
            Expr::ident("down"),
        );
        assert_eq!(eval_expr(&cm, &motion, &s, None), Ok(Value::Int(6)));
        let div0 = Expr::bin(BinOp::Div, Expr::ident("x"), Expr::ident("down"));
        assert_eq!(
            eval_expr(&cm, &div0, &s, None),
            Err(EvalExprError::Eval(EvalError::DivisionByZero))
        );
        let neg = Expr::bin(BinOp::Mod, Expr::Int(-7), Expr::Int(3));
        assert_eq!(eval_expr(&cm, &neg, &s, None), Ok(Value::Int(2)));
    }

    #[test]
    fn short_circuit_guards_division() {
        let m = model(vec![int_var("d", VarKind::Input, 0, 3, 0)]);
        let cm = CompiledModel::new(&m).unwrap();
        let e = Expr::and(
            Expr::bin(BinOp::Ne, Expr::ident("d"), Expr::Int(0)),
            Expr::bin(
                BinOp::Eq,
                Expr::bin(BinOp::Div, Expr::Int(6), Expr::ident("d")),
                Expr::Int(2),
            ),
        );
        assert_eq!(eval_expr(&cm, &e, &[0], None), Ok(Value::Bool(false)));
        assert_eq!(eval_expr(&cm, &e, &[3], None), Ok(Value::Bool(true)));
    }

    #[test]
    fn diagnostics() {
        let mut m = model(vec![Variable::new("b", VarKind::Input, Domain::Bool, Some(Value::Bool(false)))]);
        m.controller.assignments.push(Assignment::new("b", Expr::Bool(true)));
        let d = validate_model(&m);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("kind violation: controller assigns Input"));

        let mut m = model(vec![
            Variable::new("b", VarKind::Input, Domain::Bool, Some(Value::Bool(false))),
            int_var("c", VarKind::Input, 0, 3, 0),
        ]);
        m.plant
            .assignments
            .push(Assignment::new("c", Expr::bin(BinOp::Add, Expr::ident("b"), Expr::Int(1))));
        assert!(validate_model(&m)[0].message.starts_with("type mismatch"));

        let m = model(vec![
            Variable::new("u", VarKind::Nondeterministic, Domain::Bool, Some(Value::Bool(true))),
            int_var("x", VarKind::Input, 0, 3, 4),
            int_var("x", VarKind::Output, 5, 3, 0),
        ]);
        let msgs: Vec<String> = validate_model(&m).into_iter().map(|d| d.message).collect();
        assert!(msgs.iter().any(|s| s.contains("carries an init")));
        assert!(msgs.iter().any(|s| s.contains("out of domain")));
        assert!(msgs.iter().any(|s| s.contains("duplicate variable")));
        assert!(msgs.iter().any(|s| s.contains("empty int range")));
    }

    #[test]
    fn labels_resolve_by_context() {
        let e1 = Domain::Enum { labels: vec!["a".into(), "b".into()] };
        let e2 = Domain::Enum { labels: vec!["b".into(), "c".into()] };
        let mut m = model(vec![
            Variable::new("p", VarKind::Input, e1, None),
            Variable::new("q", VarKind::Input, e2, None),
        ]);
        m.plant.assignments.push(Assignment::new("p", Expr::ident("a")));
        let msgs: Vec<String> = validate_model(&m).into_iter().map(|d| d.message).collect();
        assert!(msgs.iter().any(|s| s.contains("several enum domains")));
    }
}

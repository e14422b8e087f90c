//! LTL formulas over model predicates: coverage subformulas and exact
//! evaluation on lasso traces.

mod eval;

use std::fmt;

use crate::ir::{prec, BinOp, Expr, UnOp};

pub use eval::{eval_on_lasso, BindError, BoundFormula};

/// LTL formula in normal form: every maximal temporal-free subtree is a single
/// [`Ltl::Atom`]. The smart constructors maintain this.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ltl {
    Atom(Expr),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Finally(Box<Ltl>),
    Globally(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
}

impl Ltl {
    pub fn atom(e: Expr) -> Self {
        Ltl::Atom(e)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Ltl) -> Self {
        match f {
            Ltl::Atom(e) => Ltl::Atom(Expr::not(e)),
            f => Ltl::Not(Box::new(f)),
        }
    }

    fn boolean(op: BinOp, a: Ltl, b: Ltl) -> Self {
        match (a, b) {
            (Ltl::Atom(x), Ltl::Atom(y)) => Ltl::Atom(Expr::bin(op, x, y)),
            (a, b) => {
                let (a, b) = (Box::new(a), Box::new(b));
                match op {
                    BinOp::And => Ltl::And(a, b),
                    BinOp::Or => Ltl::Or(a, b),
                    _ => Ltl::Implies(a, b),
                }
            }
        }
    }

    pub fn and(a: Ltl, b: Ltl) -> Self {
        Self::boolean(BinOp::And, a, b)
    }

    pub fn or(a: Ltl, b: Ltl) -> Self {
        Self::boolean(BinOp::Or, a, b)
    }

    pub fn implies(a: Ltl, b: Ltl) -> Self {
        Self::boolean(BinOp::Implies, a, b)
    }

    pub fn next(f: Ltl) -> Self {
        Ltl::Next(Box::new(f))
    }

    pub fn finally(f: Ltl) -> Self {
        Ltl::Finally(Box::new(f))
    }

    pub fn globally(f: Ltl) -> Self {
        Ltl::Globally(Box::new(f))
    }

    pub fn until(a: Ltl, b: Ltl) -> Self {
        Ltl::Until(Box::new(a), Box::new(b))
    }

    pub fn is_temporal_free(&self) -> bool {
        matches!(self, Ltl::Atom(_))
    }

    /// Nesting depth of temporal operators.
    pub fn temporal_depth(&self) -> usize {
        match self {
            Ltl::Atom(_) => 0,
            Ltl::Not(f) => f.temporal_depth(),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) => {
                a.temporal_depth().max(b.temporal_depth())
            }
            Ltl::Next(f) | Ltl::Finally(f) | Ltl::Globally(f) => 1 + f.temporal_depth(),
            Ltl::Until(a, b) => 1 + a.temporal_depth().max(b.temporal_depth()),
        }
    }

    /// Visits every atom in pre-order.
    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        match self {
            Ltl::Atom(e) => f(e),
            Ltl::Not(a) | Ltl::Next(a) | Ltl::Finally(a) | Ltl::Globally(a) => a.for_each_atom(f),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::Until(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Ltl::Atom(e) => e.prec(),
            Ltl::Not(_) | Ltl::Next(_) | Ltl::Finally(_) | Ltl::Globally(_) => prec::UNARY,
            Ltl::And(..) => prec::AND,
            Ltl::Or(..) => prec::OR,
            Ltl::Implies(..) => prec::IMPLIES,
            Ltl::Until(..) => prec::UNTIL,
        }
    }

    /// Operands printed without parentheses after a temporal prefix.
    fn is_simple_operand(&self) -> bool {
        match self {
            Ltl::Atom(Expr::Unary(UnOp::Not, e)) => e.prec() == prec::PRIMARY,
            Ltl::Atom(e) => e.prec() == prec::PRIMARY,
            Ltl::Next(f) => f.is_simple_operand(),
            _ => false,
        }
    }

    fn write_prec(&self, out: &mut String, min: u8) {
        if let Ltl::Atom(e) = self {
            e.write_prec(out, min);
            return;
        }
        if self.prec() < min {
            out.push('(');
            self.write_bare(out);
            out.push(')');
        } else {
            self.write_bare(out);
        }
    }

    fn write_bare(&self, out: &mut String) {
        let unary = |out: &mut String, op: &str, f: &Ltl| {
            out.push_str(op);
            if f.is_simple_operand() {
                out.push(' ');
                f.write_prec(out, prec::UNARY);
            } else {
                out.push_str(" (");
                f.write_prec(out, prec::COND);
                out.push(')');
            }
        };
        match self {
            Ltl::Atom(e) => e.write_prec(out, prec::COND),
            Ltl::Not(f) => {
                out.push_str("!(");
                f.write_prec(out, prec::COND);
                out.push(')');
            }
            Ltl::Next(f) => unary(out, "X", f),
            Ltl::Finally(f) => unary(out, "F", f),
            Ltl::Globally(f) => unary(out, "G", f),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::Until(a, b) => {
                let p = self.prec();
                let (lmin, rmin, sym) = match self {
                    Ltl::And(..) => (p, p + 1, "&&"),
                    Ltl::Or(..) => (p, p + 1, "||"),
                    Ltl::Implies(..) => (p + 1, p, "->"),
                    _ => (p + 1, p, "U"),
                };
                a.write_prec(out, lmin);
                out.push(' ');
                out.push_str(sym);
                out.push(' ');
                b.write_prec(out, rmin);
            }
        }
    }
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_prec(&mut s, prec::COND);
        f.write_str(&s)
    }
}

/// Which temporal-free subtrees count as coverage subformulas.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum SubformulaMode {
    /// Maximal temporal-free subtrees only.
    #[default]
    Maximal,
    /// Also every Boolean-connective descendant of those subtrees.
    All,
}

/// Temporal-free subformulas of `f` in pre-order, structurally deduplicated.
pub fn boolean_subformulas(f: &Ltl, mode: SubformulaMode) -> Vec<Expr> {
    let mut out: Vec<Expr> = Vec::new();
    let mut push = |e: &Expr, out: &mut Vec<Expr>| {
        if !out.contains(e) {
            out.push(e.clone());
        }
    };
    fn descend(e: &Expr, out: &mut Vec<Expr>, push: &mut impl FnMut(&Expr, &mut Vec<Expr>)) {
        push(e, out);
        match e {
            Expr::Unary(UnOp::Not, a) => descend(a, out, push),
            Expr::Binary(op, a, b) if op.is_logical() => {
                descend(a, out, push);
                descend(b, out, push);
            }
            _ => {}
        }
    }
    f.for_each_atom(&mut |e| match mode {
        SubformulaMode::Maximal => push(e, &mut out),
        SubformulaMode::All => descend(e, &mut out, &mut push),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Ltl {
        Ltl::atom(Expr::ident(n))
    }

    #[test]
    fn constructors_merge_temporal_free_parts() {
        let f = Ltl::and(v("a"), Ltl::not(v("b")));
        assert_eq!(
            f,
            Ltl::Atom(Expr::and(Expr::ident("a"), Expr::not(Expr::ident("b"))))
        );
        assert!(!Ltl::and(v("a"), Ltl::finally(v("b"))).is_temporal_free());
    }

    #[test]
    fn maximal_subformulas() {
        let f = Ltl::next(Ltl::globally(Ltl::implies(v("x"), Ltl::finally(v("y")))));
        assert_eq!(
            boolean_subformulas(&f, SubformulaMode::Maximal),
            vec![Expr::ident("x"), Expr::ident("y")]
        );
        let g = Ltl::globally(Ltl::and(v("a"), v("b")));
        assert_eq!(
            boolean_subformulas(&g, SubformulaMode::Maximal),
            vec![Expr::and(Expr::ident("a"), Expr::ident("b"))]
        );
        assert_eq!(
            boolean_subformulas(&g, SubformulaMode::All),
            vec![
                Expr::and(Expr::ident("a"), Expr::ident("b")),
                Expr::ident("a"),
                Expr::ident("b")
            ]
        );
        let t = Ltl::globally(Ltl::atom(Expr::Bool(true)));
        assert_eq!(boolean_subformulas(&t, SubformulaMode::Maximal), vec![Expr::Bool(true)]);
    }

    #[test]
    fn prints_temporal_operands() {
        let f = Ltl::next(Ltl::globally(Ltl::implies(v("x"), Ltl::finally(v("y")))));
        assert_eq!(f.to_string(), "X (G (x -> F y))");
        let chain = Ltl::next(Ltl::next(Ltl::not(v("d.0"))));
        assert_eq!(chain.to_string(), "X X !d[0]");
        let u = Ltl::until(v("a"), Ltl::until(v("b"), v("c")));
        assert_eq!(u.to_string(), "a U b U c");
        let l = Ltl::until(Ltl::until(v("a"), v("b")), v("c"));
        assert_eq!(l.to_string(), "(a U b) U c");
    }
}

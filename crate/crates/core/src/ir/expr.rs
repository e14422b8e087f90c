use std::fmt;

use super::types::display_name;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    And,
    Or,
    Implies,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "mod",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Implies => "->",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
        }
    }

    pub(crate) fn prec(self) -> u8 {
        match self {
            BinOp::Implies => prec::IMPLIES,
            BinOp::Or => prec::OR,
            BinOp::And => prec::AND,
            BinOp::Eq | BinOp::Ne => prec::EQ,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => prec::REL,
            BinOp::Add | BinOp::Sub => prec::ADD,
            BinOp::Mul | BinOp::Div | BinOp::Mod => prec::MUL,
        }
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies)
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(
            self,
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod
        )
    }
}

/// Binding strength shared by the expression and LTL printers and parsers.
pub(crate) mod prec {
    pub const COND: u8 = 0;
    pub const IMPLIES: u8 = 1;
    pub const OR: u8 = 2;
    pub const UNTIL: u8 = 3;
    pub const AND: u8 = 4;
    pub const EQ: u8 = 5;
    pub const REL: u8 = 6;
    pub const ADD: u8 = 7;
    pub const MUL: u8 = 8;
    pub const UNARY: u8 = 9;
    pub const PRIMARY: u8 = 10;
}

/// Expression over model variables. Identifiers hold flattened names; an
/// identifier that names no variable is read as an enum label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Bool(bool),
    Int(i64),
    Ident(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn ident(name: impl Into<String>) -> Self {
        Expr::Ident(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Self {
        Expr::Unary(UnOp::Not, Box::new(e))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: Expr) -> Self {
        Expr::Unary(UnOp::Neg, Box::new(e))
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Self {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn cond(c: Expr, a: Expr, b: Expr) -> Self {
        Expr::Cond(Box::new(c), Box::new(a), Box::new(b))
    }

    pub fn and(a: Expr, b: Expr) -> Self {
        Self::bin(BinOp::And, a, b)
    }

    pub fn or(a: Expr, b: Expr) -> Self {
        Self::bin(BinOp::Or, a, b)
    }

    pub fn eq(a: Expr, b: Expr) -> Self {
        Self::bin(BinOp::Eq, a, b)
    }

    /// Visits every identifier in the expression.
    pub fn for_each_ident<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Expr::Bool(_) | Expr::Int(_) => {}
            Expr::Ident(n) => f(n),
            Expr::Unary(_, e) => e.for_each_ident(f),
            Expr::Binary(_, a, b) => {
                a.for_each_ident(f);
                b.for_each_ident(f);
            }
            Expr::Cond(c, a, b) => {
                c.for_each_ident(f);
                a.for_each_ident(f);
                b.for_each_ident(f);
            }
        }
    }

    pub(crate) fn prec(&self) -> u8 {
        match self {
            Expr::Bool(_) | Expr::Ident(_) => prec::PRIMARY,
            // Negative literals print with a leading minus.
            Expr::Int(i) if *i < 0 => prec::UNARY,
            Expr::Int(_) => prec::PRIMARY,
            Expr::Unary(..) => prec::UNARY,
            Expr::Binary(op, ..) => op.prec(),
            Expr::Cond(..) => prec::COND,
        }
    }

    /// Writes the expression, parenthesised if it binds looser than `min`.
    pub(crate) fn write_prec(&self, out: &mut String, min: u8) {
        if self.prec() < min {
            out.push('(');
            self.write_bare(out);
            out.push(')');
        } else {
            self.write_bare(out);
        }
    }

    fn write_bare(&self, out: &mut String) {
        match self {
            Expr::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Expr::Int(i) => out.push_str(&i.to_string()),
            Expr::Ident(n) => out.push_str(&display_name(n)),
            Expr::Unary(op, e) => {
                out.push(match op {
                    UnOp::Not => '!',
                    UnOp::Neg => '-',
                });
                // `-3` parses as a literal, so a negated literal keeps its parentheses.
                if *op == UnOp::Neg && matches!(**e, Expr::Int(_)) {
                    out.push('(');
                    e.write_bare(out);
                    out.push(')');
                } else {
                    e.write_prec(out, prec::UNARY);
                }
            }
            Expr::Binary(op, a, b) => {
                let p = op.prec();
                let (lmin, rmin) = match op {
                    BinOp::Implies => (p + 1, p),
                    _ if op.is_comparison() => (p + 1, p + 1),
                    _ => (p, p + 1),
                };
                a.write_prec(out, lmin);
                out.push(' ');
                out.push_str(op.symbol());
                out.push(' ');
                b.write_prec(out, rmin);
            }
            Expr::Cond(c, a, b) => {
                c.write_prec(out, prec::IMPLIES);
                out.push_str(" ? ");
                a.write_prec(out, prec::IMPLIES);
                out.push_str(" : ");
                b.write_prec(out, prec::COND);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_prec(&mut s, prec::COND);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_minimal_parentheses() {
        let e = Expr::bin(
            BinOp::Sub,
            Expr::ident("a"),
            Expr::bin(BinOp::Sub, Expr::ident("b"), Expr::ident("c")),
        );
        assert_eq!(e.to_string(), "a - (b - c)");
        let e = Expr::bin(
            BinOp::Implies,
            Expr::and(Expr::not(Expr::ident("x.0")), Expr::ident("y")),
            Expr::ident("z"),
        );
        assert_eq!(e.to_string(), "!x[0] && y -> z");
        let e = Expr::cond(
            Expr::bin(BinOp::Gt, Expr::Int(3), Expr::Int(2)),
            Expr::Int(7),
            Expr::Int(-1),
        );
        assert_eq!(e.to_string(), "3 > 2 ? 7 : -1");
        assert_eq!(Expr::neg(Expr::Int(3)).to_string(), "-(3)");
    }
}

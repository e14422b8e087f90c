use std::collections::HashSet;

use super::lexer::{lex, Tok, Token};
use super::{Expectation, ParseError, Requirement, RequirementSet};
use crate::ir::{
    element_name, prec, validate_model, Assignment, BinOp, ClosedLoopModel, Domain, Expr,
    Location, SourceSpan, Value, VarKind, Variable,
};
use crate::ltl::Ltl;

const RESERVED: &[&str] = &["true", "false", "mod"];
const TEMPORAL: &[&str] = &["X", "F", "G", "U"];
const DECL_WORDS: &[&str] = &[
    "model", "nondet", "input", "output", "plantvar", "ctrlvar", "plant", "controller", "bool",
    "int", "enum",
];

pub(crate) struct Parser<'a> {
    file: &'a str,
    toks: Vec<Token>,
    pos: usize,
    ltl: bool,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    pub(crate) fn new(file: &'a str, toks: Vec<Token>, ltl: bool) -> Self {
        Self {
            file,
            toks,
            pos: 0,
            ltl,
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        let t = &self.toks[self.pos];
        SourceSpan::new(self.file, t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::new(self.span(), msg))
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(wanted)
        }
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.at_word(w) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{w}`"))
        }
    }

    fn is_keyword(&self, s: &str) -> bool {
        RESERVED.contains(&s) || (self.ltl && TEMPORAL.contains(&s))
    }

    fn name(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !self.is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected(what),
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => self.unexpected("integer"),
        }
    }

    /// `name` or `name[INT]`, flattened.
    fn reference(&mut self, base: String) -> PResult<String> {
        if *self.peek() == Tok::LBracket {
            self.bump();
            let Tok::Int(i) = self.peek().clone() else {
                return self.unexpected("array index");
            };
            self.bump();
            self.expect(Tok::RBracket, "`]`")?;
            Ok(element_name(&base, i as u64))
        } else {
            Ok(base)
        }
    }

    // Expressions. Both languages share one grammar; in model mode the
    // temporal letters are ordinary identifiers and every result is an atom.

    pub(crate) fn formula(&mut self) -> PResult<Ltl> {
        let start = self.span();
        let c = self.binary(prec::IMPLIES)?;
        if *self.peek() != Tok::Question {
            return Ok(c);
        }
        self.bump();
        let a = self.formula()?;
        self.expect(Tok::Colon, "`:`")?;
        let b = self.formula()?;
        match (c, a, b) {
            (Ltl::Atom(c), Ltl::Atom(a), Ltl::Atom(b)) => Ok(Ltl::Atom(Expr::cond(c, a, b))),
            _ => Err(ParseError::new(start, "temporal operator inside a conditional expression")),
        }
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        match self.formula()? {
            Ltl::Atom(e) => Ok(e),
            _ => unreachable!("model expressions have no temporal operators"),
        }
    }

    fn peek_binop(&self) -> Option<(Option<BinOp>, u8)> {
        let op = match self.peek() {
            Tok::Arrow => BinOp::Implies,
            Tok::OrOr => BinOp::Or,
            Tok::AndAnd => BinOp::And,
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Ident(s) if s == "mod" => BinOp::Mod,
            Tok::Ident(s) if self.ltl && s == "U" => return Some((None, prec::UNTIL)),
            _ => return None,
        };
        Some((Some(op), op.prec()))
    }

    fn binary(&mut self, min: u8) -> PResult<Ltl> {
        let mut lhs = self.unary()?;
        while let Some((op, p)) = self.peek_binop() {
            if p < min {
                break;
            }
            let op_span = self.span();
            self.bump();
            let right_assoc = matches!(op, None | Some(BinOp::Implies));
            let rhs = self.binary(if right_assoc { p } else { p + 1 })?;
            lhs = match op {
                None => Ltl::until(lhs, rhs),
                Some(BinOp::And) => Ltl::and(lhs, rhs),
                Some(BinOp::Or) => Ltl::or(lhs, rhs),
                Some(BinOp::Implies) => Ltl::implies(lhs, rhs),
                Some(op) => match (lhs, rhs) {
                    (Ltl::Atom(a), Ltl::Atom(b)) => Ltl::Atom(Expr::bin(op, a, b)),
                    _ => {
                        return Err(ParseError::new(
                            op_span,
                            format!("temporal operator inside operand of `{}`", op.symbol()),
                        ))
                    }
                },
            };
            if let Some(op) = op {
                if op.is_comparison() && matches!(self.peek_binop(), Some((_, q)) if q == p) {
                    return self.error("comparison operators do not chain");
                }
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Ltl> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Ltl::not(self.unary()?))
            }
            Tok::Minus => {
                self.bump();
                if let Tok::Int(v) = *self.peek() {
                    self.bump();
                    return Ok(Ltl::Atom(Expr::Int(-v)));
                }
                match self.unary()? {
                    Ltl::Atom(e) => Ok(Ltl::Atom(Expr::neg(e))),
                    _ => Err(ParseError::new(start, "temporal operator inside operand of `-`")),
                }
            }
            Tok::Ident(s) if self.ltl && matches!(s.as_str(), "X" | "F" | "G") => {
                self.bump();
                let f = self.unary()?;
                Ok(match s.as_str() {
                    "X" => Ltl::next(f),
                    "F" => Ltl::finally(f),
                    _ => Ltl::globally(f),
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<Ltl> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Ltl::Atom(Expr::Int(v)))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Ltl::Atom(Expr::Bool(s == "true")))
            }
            Tok::Ident(s) if !self.is_keyword(&s) => {
                self.bump();
                Ok(Ltl::Atom(Expr::Ident(self.reference(s)?)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => self.unexpected("expression"),
        }
    }

    // Model language.

    fn domain(&mut self) -> PResult<Domain> {
        if self.at_word("bool") {
            self.bump();
            Ok(Domain::Bool)
        } else if self.at_word("int") {
            self.bump();
            let lo = self.signed_int()?;
            self.expect(Tok::DotDot, "`..`")?;
            let hi = self.signed_int()?;
            Ok(Domain::IntRange { lo, hi })
        } else if self.at_word("enum") {
            self.bump();
            self.expect(Tok::LBrace, "`{`")?;
            let mut labels = vec![self.name("enum label")?];
            while *self.peek() == Tok::Comma {
                self.bump();
                labels.push(self.name("enum label")?);
            }
            self.expect(Tok::RBrace, "`}`")?;
            Ok(Domain::Enum { labels })
        } else {
            self.unexpected("`bool`, `int` or `enum`")
        }
    }

    fn init_value(&mut self) -> PResult<Value> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Value::Bool(s == "true"))
            }
            Tok::Ident(s) if !self.is_keyword(&s) => {
                self.bump();
                Ok(Value::Label(s))
            }
            Tok::Int(_) | Tok::Minus => Ok(Value::Int(self.signed_int()?)),
            _ => self.unexpected("init value"),
        }
    }

    fn declaration(&mut self, kind: VarKind, out: &mut Vec<Variable>) -> PResult<()> {
        self.bump();
        let span = self.span();
        let name = self.name("variable name")?;
        if DECL_WORDS.contains(&name.as_str()) || TEMPORAL.contains(&name.as_str()) {
            return Err(ParseError::new(span, format!("`{name}` is a reserved word")));
        }
        let count = if *self.peek() == Tok::LBracket {
            self.bump();
            let Tok::Int(n) = *self.peek() else {
                return self.unexpected("array size");
            };
            if n < 1 {
                return self.error("array size must be at least 1");
            }
            self.bump();
            self.expect(Tok::RBracket, "`]`")?;
            Some(n as u64)
        } else {
            None
        };
        self.expect(Tok::Colon, "`:`")?;
        let domain = self.domain()?;
        let init = if *self.peek() == Tok::Assign {
            self.bump();
            Some(self.init_value()?)
        } else if kind == VarKind::Nondeterministic {
            None
        } else {
            domain.values().next()
        };
        let names: Vec<String> = match count {
            Some(n) => (0..n).map(|i| element_name(&name, i)).collect(),
            None => vec![name],
        };
        for n in names {
            let mut v = Variable::new(n, kind, domain.clone(), init.clone());
            v.span = Some(span.clone());
            out.push(v);
        }
        Ok(())
    }

    fn block(&mut self, word: &str) -> PResult<Vec<Assignment>> {
        self.expect_word(word)?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut out = Vec::new();
        while *self.peek() != Tok::RBrace {
            let span = self.span();
            let base = self.name("assignment target or `}`")?;
            let target = self.reference(base)?;
            self.expect(Tok::Assign, "`=`")?;
            let rhs = self.expr()?;
            self.expect(Tok::Semi, "`;`")?;
            out.push(Assignment {
                target,
                rhs,
                span: Some(span),
            });
        }
        self.bump();
        Ok(out)
    }

    fn model(&mut self) -> PResult<ClosedLoopModel> {
        let start = self.span();
        self.expect_word("model")?;
        let name = self.name("model name")?;
        let mut model = ClosedLoopModel::new(name);
        loop {
            let kind = match self.peek() {
                Tok::Ident(s) => VarKind::from_keyword(s),
                _ => None,
            };
            match kind {
                Some(k) => self.declaration(k, &mut model.variables)?,
                None => break,
            }
        }
        model.plant.assignments = self.block("plant")?;
        model.controller.assignments = self.block("controller")?;
        self.expect_eof()?;
        if let Some(d) = validate_model(&model).into_iter().next() {
            let span = d
                .span
                .clone()
                .or_else(|| match &d.location {
                    Location::Variable(n) => model.variable(n).and_then(|v| v.span.clone()),
                    _ => None,
                })
                .unwrap_or(start);
            return Err(ParseError::new(span, format!("{}: {}", d.location, d.message)));
        }
        Ok(model)
    }
}

/// Leading `//` lines, with the marker and one following space removed.
fn header_lines(text: &str) -> (Vec<String>, usize) {
    let mut header = Vec::new();
    for line in text.lines() {
        match line.trim_start().strip_prefix("//") {
            Some(rest) => header.push(rest.strip_prefix(' ').unwrap_or(rest).to_string()),
            None => break,
        }
    }
    let n = header.len();
    (header, n)
}

/// Parses and validates a model file.
pub fn parse_model_file(file: &str, text: &str) -> Result<ClosedLoopModel, ParseError> {
    let (header, _) = header_lines(text);
    let toks = lex(file, text, 1)?;
    let mut model = Parser::new(file, toks, false).model()?;
    model.header = header;
    Ok(model)
}

pub fn parse_model(text: &str) -> Result<ClosedLoopModel, ParseError> {
    parse_model_file("<model>", text)
}

/// Parses a standalone LTL formula. Variables are resolved later, on binding.
pub fn parse_ltl(text: &str) -> Result<Ltl, ParseError> {
    parse_ltl_at("<ltl>", text, 1)
}

fn parse_ltl_at(file: &str, text: &str, line: usize) -> Result<Ltl, ParseError> {
    let toks = lex(file, text, line)?;
    let mut p = Parser::new(file, toks, true);
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parses a model-language expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = lex("<expr>", text, 1)?;
    let mut p = Parser::new("<expr>", toks, false);
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_requirements_file(file: &str, text: &str) -> Result<RequirementSet, ParseError> {
    let (header, skip) = header_lines(text);
    let mut set = RequirementSet {
        header,
        requirements: Vec::new(),
    };
    let mut ids = HashSet::new();
    for (i, line) in text.lines().enumerate().skip(skip) {
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with("//") {
            continue;
        }
        let toks = lex(file, line, i + 1)?;
        let mut p = Parser::new(file, toks, true);
        let id_span = p.span();
        let id = p.name("requirement id")?;
        let mut expectation = None;
        if p.at_word("expect") {
            p.bump();
            p.expect(Tok::Minus, "`-`")?;
            expectation = match p.peek() {
                Tok::Ident(s) if s == "pass" => Some(Expectation::Pass),
                Tok::Ident(s) if s == "fail" => Some(Expectation::Fail),
                _ => return p.unexpected("`pass` or `fail`"),
            };
            p.bump();
        }
        p.expect(Tok::Colon, "`:`")?;
        let formula = p.formula()?;
        p.expect_eof()?;
        if !ids.insert(id.clone()) {
            return Err(ParseError::new(id_span, format!("duplicate requirement id `{id}`")));
        }
        set.requirements.push(Requirement {
            id,
            formula,
            expectation,
            span: Some(id_span),
        });
    }
    Ok(set)
}

pub fn parse_requirements(text: &str) -> Result<RequirementSet, ParseError> {
    parse_requirements_file("<requirements>", text)
}

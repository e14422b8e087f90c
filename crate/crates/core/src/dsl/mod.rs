//! Surface syntax: model files, requirement files and test-suite files.
//!
//! Every artifact has a canonical printer; printing a parsed artifact and
//! parsing the result again yields a structurally equal value.

mod lexer;
mod parser;
mod printer;
mod suite;

use thiserror::Error;

use crate::ir::SourceSpan;
use crate::ltl::Ltl;

pub use parser::{
    parse_expr, parse_ltl, parse_model, parse_model_file, parse_requirements,
    parse_requirements_file,
};
pub use printer::{print_model, print_requirements};
pub use suite::{parse_suite, parse_suite_file, serialize_suite};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    pub fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        Self {
            span,
            message: message.into(),
        }
    }
}

/// Outcome the harness expects a requirement to have on a generated suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Expectation {
    Pass,
    Fail,
}

impl Expectation {
    pub fn keyword(self) -> &'static str {
        match self {
            Expectation::Pass => "expect-pass",
            Expectation::Fail => "expect-fail",
        }
    }
}

/// Equality ignores source spans.
#[derive(Debug, Clone)]
pub struct Requirement {
    pub id: String,
    pub formula: Ltl,
    pub expectation: Option<Expectation>,
    pub span: Option<SourceSpan>,
}

impl Requirement {
    pub fn new(id: impl Into<String>, formula: Ltl, expectation: Option<Expectation>) -> Self {
        Self {
            id: id.into(),
            formula,
            expectation,
            span: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RequirementSet {
    pub header: Vec<String>,
    pub requirements: Vec<Requirement>,
}

impl PartialEq for Requirement {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.formula == other.formula && self.expectation == other.expectation
    }
}

impl Eq for Requirement {}

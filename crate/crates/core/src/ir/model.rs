use std::fmt;

use super::expr::Expr;
use super::types::{SourceSpan, VarKind, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Plant,
    Controller,
}

impl BlockKind {
    pub fn keyword(self) -> &'static str {
        match self {
            BlockKind::Plant => "plant",
            BlockKind::Controller => "controller",
        }
    }

    /// Whether this block may assign variables of `kind`.
    pub fn may_assign(self, kind: VarKind) -> bool {
        match self {
            BlockKind::Plant => matches!(kind, VarKind::Input | VarKind::PlantInternal),
            BlockKind::Controller => {
                matches!(kind, VarKind::Output | VarKind::ControllerInternal)
            }
        }
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Equality ignores source spans.
#[derive(Debug, Clone)]
pub struct Assignment {
    pub target: String,
    pub rhs: Expr,
    pub span: Option<SourceSpan>,
}

impl Assignment {
    pub fn new(target: impl Into<String>, rhs: Expr) -> Self {
        Self {
            target: target.into(),
            rhs,
            span: None,
        }
    }
}

/// Sequential assignments; each reads the most recent values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UpdateBlock {
    pub assignments: Vec<Assignment>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedLoopModel {
    pub name: String,
    /// Leading `//` comment lines, kept verbatim (without the slashes).
    pub header: Vec<String>,
    pub variables: Vec<Variable>,
    pub plant: UpdateBlock,
    pub controller: UpdateBlock,
}

impl ClosedLoopModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            header: Vec::new(),
            variables: Vec::new(),
            plant: UpdateBlock::default(),
            controller: UpdateBlock::default(),
        }
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn block(&self, kind: BlockKind) -> &UpdateBlock {
        match kind {
            BlockKind::Plant => &self.plant,
            BlockKind::Controller => &self.controller,
        }
    }

    pub fn count_kind(&self, kind: VarKind) -> usize {
        self.variables.iter().filter(|v| v.kind == kind).count()
    }

    pub fn nondet_variables(&self) -> impl Iterator<Item = &Variable> {
        self.variables
            .iter()
            .filter(|v| v.kind == VarKind::Nondeterministic)
    }

    pub fn state_variables(&self) -> impl Iterator<Item = &Variable> {
        self.variables
            .iter()
            .filter(|v| v.kind != VarKind::Nondeterministic)
    }
}

impl PartialEq for Assignment {
    fn eq(&self, other: &Self) -> bool {
        self.target == other.target && self.rhs == other.rhs
    }
}

impl Eq for Assignment {}

//! Coverage goals and test-suite generation by bounded reachability.
//!
//! Goals are processed in a fixed order. Each goal not already covered by an
//! earlier test is handed to a reachability backend; a witness becomes a new
//! test case, and every pending goal that its trace passes through is marked
//! as subsumed.

mod bmc;
mod explicit;
mod sat;

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::dsl::RequirementSet;
use crate::engine::{finite_trace, NondetValues, SimError, SystemState, TestCase, TestSuite};
use crate::ir::{display_name, ClosedLoopModel, CompiledExpr, CompiledModel, Expr, Value};
use crate::ltl::{boolean_subformulas, SubformulaMode};

pub use bmc::BmcEngine;
pub use explicit::Explorer;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoalOrigin {
    VariableValue { var: String, value: Value },
    Subformula { requirement: String, expr: Expr, positive: bool },
}

impl fmt::Display for GoalOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoalOrigin::VariableValue { var, value } => {
                write!(f, "value {} == {}", display_name(var), value)
            }
            GoalOrigin::Subformula {
                requirement,
                expr,
                positive,
            } => {
                let sign = if *positive { '+' } else { '-' };
                write!(f, "sub {requirement} {sign} {expr}")
            }
        }
    }
}

/// A state predicate to reach; its never claim is `G !p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageGoal {
    pub predicate: Expr,
    pub origin: GoalOrigin,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GoalConfig {
    pub subformulas: SubformulaMode,
    /// Also emit value goals for nondeterministic variables.
    pub include_nondet: bool,
}

impl fmt::Display for GoalConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = match self.subformulas {
            SubformulaMode::Maximal => "maximal",
            SubformulaMode::All => "all",
        };
        let kinds = if self.include_nondet {
            "all-kinds"
        } else {
            "non-nondet"
        };
        write!(f, "subformulas={sub} variables={kinds}")
    }
}

fn literal(value: &Value) -> Expr {
    match value {
        Value::Bool(b) => Expr::Bool(*b),
        Value::Int(i) => Expr::Int(*i),
        Value::Label(l) => Expr::Ident(l.clone()),
    }
}

/// Value goals for every variable and value in declaration/domain order, then
/// both polarities of every requirement subformula. Duplicates are dropped.
pub fn enumerate_goals(
    model: &ClosedLoopModel,
    reqs: &RequirementSet,
    cfg: GoalConfig,
) -> Vec<CoverageGoal> {
    let mut goals: Vec<CoverageGoal> = Vec::new();
    let mut push = |goal: CoverageGoal| {
        if !goals.iter().any(|g| g.predicate == goal.predicate) {
            goals.push(goal);
        }
    };
    for v in &model.variables {
        if v.kind == crate::ir::VarKind::Nondeterministic && !cfg.include_nondet {
            continue;
        }
        for value in v.domain.values() {
            push(CoverageGoal {
                predicate: Expr::eq(Expr::Ident(v.name.clone()), literal(&value)),
                origin: GoalOrigin::VariableValue {
                    var: v.name.clone(),
                    value,
                },
            });
        }
    }
    for r in &reqs.requirements {
        for f in boolean_subformulas(&r.formula, cfg.subformulas) {
            for positive in [true, false] {
                let predicate = if positive { f.clone() } else { Expr::not(f.clone()) };
                push(CoverageGoal {
                    predicate,
                    origin: GoalOrigin::Subformula {
                        requirement: r.id.clone(),
                        expr: f.clone(),
                        positive,
                    },
                });
            }
        }
    }
    goals
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Backend {
    /// Breadth-first search over concrete states.
    Explicit,
    /// Incremental SAT-based bounded model checking.
    Bmc,
    /// Explicit when the per-step input branching is small, BMC otherwise.
    #[default]
    Auto,
}

/// Largest number of nondet combinations per step for which `Auto` picks the
/// explicit backend.
pub const AUTO_EXPLICIT_MAX_BRANCHING: u64 = 256;

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Explicit => "explicit",
            Backend::Bmc => "bmc",
            Backend::Auto => "auto",
        }
    }

    /// Concrete backend used for `model`.
    pub fn resolve(self, model: &CompiledModel) -> Backend {
        match self {
            Backend::Auto => {
                let branching = (0..model.nondet_len())
                    .map(|i| model.nondet_domain(i).size())
                    .try_fold(1u64, |acc, s| acc.checked_mul(s));
                match branching {
                    Some(b) if b <= AUTO_EXPLICIT_MAX_BRANCHING => Backend::Explicit,
                    _ => Backend::Bmc,
                }
            }
            b => b,
        }
    }
}

pub const DEFAULT_STATE_CAP: usize = 10_000_000;

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    /// Longest test case; the BMC bound is `max_len - 1`.
    pub max_len: usize,
    pub backend: Backend,
    pub goals: GoalConfig,
    /// Maximum number of distinct states the explicit backend may store.
    pub state_cap: usize,
    /// Reserved; both backends are deterministic.
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            max_len: 10,
            backend: Backend::Auto,
            goals: GoalConfig::default(),
            state_cap: DEFAULT_STATE_CAP,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("goal `{goal}`: {message}")]
    Goal { goal: String, message: String },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("state cap of {cap} states exceeded")]
    StateCapExceeded { cap: usize },
    #[error("nondet branching of {0} combinations per step is too large for the explicit backend")]
    Branching(u128),
    #[error("bmc: {0}")]
    Bmc(String),
    #[error("test case `{0}` has no generation trace")]
    MissingTrace(String),
    #[error("internal: {0}")]
    Internal(String),
}

/// A shortest input sequence reaching a goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub columns: Vec<NondetValues>,
    pub trace: Vec<SystemState>,
    pub hit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reach {
    Witness(Witness),
    Unreachable,
}

/// Whether `pred` holds at a trace position. Nondet variables read the column
/// applied on the step into the state, so they are false at `s_0`.
pub fn goal_holds(
    model: &CompiledModel,
    pred: &CompiledExpr,
    state: &[i64],
    applied: Option<&[i64]>,
    env: &mut Vec<i64>,
) -> bool {
    env.clear();
    env.extend_from_slice(state);
    match applied {
        Some(col) => env.extend_from_slice(col),
        None if pred.uses_nondet() => return false,
        None => env.resize(model.state_len() + model.nondet_len(), 0),
    }
    pred.holds(env)
}

/// First position of `states` (with the columns that produced them) where
/// `pred` holds.
pub(crate) fn first_hit(
    model: &CompiledModel,
    pred: &CompiledExpr,
    states: &[SystemState],
    columns: &[NondetValues],
) -> Option<usize> {
    let mut env = Vec::new();
    (0..states.len()).find(|&k| {
        let applied = if k == 0 { None } else { columns.get(k - 1).map(Vec::as_slice) };
        goal_holds(model, pred, &states[k], applied, &mut env)
    })
}

/// Reachability engine shared across the goals of one generation run.
pub(crate) trait Reachability {
    /// Depth and input columns of a shortest path to a state satisfying
    /// `pred`, exploring at most `max_len` steps.
    fn reach(
        &mut self,
        pred: &CompiledExpr,
        max_len: usize,
    ) -> Result<Option<(usize, Vec<NondetValues>)>, GenError>;
}

fn make_engine<'m>(
    model: &'m CompiledModel,
    backend: Backend,
    cfg: &GeneratorConfig,
) -> Result<Box<dyn Reachability + 'm>, GenError> {
    Ok(match backend.resolve(model) {
        Backend::Bmc => Box::new(BmcEngine::new(model)?),
        _ => Box::new(Explorer::new(model, cfg.state_cap)?),
    })
}

fn first_column(model: &CompiledModel) -> NondetValues {
    (0..model.nondet_len())
        .map(|i| model.nondet_domain(i).code_range().0)
        .collect()
}

fn to_witness(
    model: &CompiledModel,
    pred: &CompiledExpr,
    depth: usize,
    mut columns: Vec<NondetValues>,
) -> Result<Witness, GenError> {
    if columns.is_empty() {
        columns.push(first_column(model));
    }
    let trace = finite_trace(model, &columns)?;
    let hit = first_hit(model, pred, &trace[..=depth], &columns)
        .filter(|&h| h == depth)
        .ok_or_else(|| GenError::Internal(format!("witness replay misses goal at depth {depth}")))?;
    Ok(Witness {
        columns,
        trace,
        hit,
    })
}

/// Shortest witness for a single goal, or proof that none exists within `max_len` steps.
pub fn bounded_reach(
    model: &CompiledModel,
    pred: &Expr,
    cfg: &GeneratorConfig,
) -> Result<Reach, GenError> {
    let compiled = compile_goal(model, pred)?;
    let mut engine = make_engine(model, cfg.backend, cfg)?;
    match engine.reach(&compiled, cfg.max_len)? {
        Some((depth, columns)) => Ok(Reach::Witness(to_witness(model, &compiled, depth, columns)?)),
        None => Ok(Reach::Unreachable),
    }
}

fn compile_goal(model: &CompiledModel, pred: &Expr) -> Result<CompiledExpr, GenError> {
    model.compile_predicate(pred).map_err(|message| GenError::Goal {
        goal: pred.to_string(),
        message,
    })
}

/// First position of the cached generation trace satisfying the goal.
pub fn covers(
    model: &CompiledModel,
    t: &TestCase,
    pred: &CompiledExpr,
) -> Result<Option<usize>, GenError> {
    let trace = t
        .gen_trace
        .as_ref()
        .ok_or_else(|| GenError::MissingTrace(t.id.clone()))?;
    Ok(first_hit(model, pred, trace, &t.columns))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoalOutcome {
    Covered { test: String, pos: usize },
    Subsumed { test: String },
    Unreachable { bound: usize },
}

impl fmt::Display for GoalOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoalOutcome::Covered { test, pos } => write!(f, "COVERED test={test} pos={pos}"),
            GoalOutcome::Subsumed { test } => write!(f, "SUBSUMED test={test}"),
            GoalOutcome::Unreachable { bound } => write!(f, "UNREACHABLE(bound={bound})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationReport {
    pub goal_config: GoalConfig,
    pub backend: Backend,
    pub resolved_backend: Backend,
    pub max_len: usize,
    /// Goals in enumeration order with their outcome; `None` only in the
    /// partial report of an aborted run.
    pub goals: Vec<(CoverageGoal, Option<GoalOutcome>)>,
    pub tests: usize,
    pub elements: usize,
}

impl GenerationReport {
    pub fn processed(&self) -> usize {
        self.goals.iter().filter(|(_, o)| o.is_some()).count()
    }

    pub fn count(&self, pred: impl Fn(&GoalOutcome) -> bool) -> usize {
        self.goals
            .iter()
            .filter(|(_, o)| o.as_ref().is_some_and(&pred))
            .count()
    }

    pub fn summary(&self) -> String {
        format!("suite {}/{}", self.tests, self.elements)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let backend = if self.backend == self.resolved_backend {
            self.backend.name().to_string()
        } else {
            format!("{}({})", self.backend.name(), self.resolved_backend.name())
        };
        let _ = writeln!(out, "# goals {}", self.goal_config);
        let _ = writeln!(
            out,
            "# backend={} max-len={} bmc-bound={}",
            backend,
            self.max_len,
            self.max_len.saturating_sub(1)
        );
        for (i, (goal, outcome)) in self.goals.iter().enumerate() {
            let outcome = outcome
                .as_ref()
                .map_or_else(|| "PENDING".to_string(), |o| o.to_string());
            let _ = writeln!(out, "goal {i} {} :: {outcome}", goal.origin);
        }
        let _ = writeln!(out, "{}", self.summary());
        out
    }
}

/// Generation aborted; the report holds every outcome decided before the error.
#[derive(Debug, Clone, Error)]
#[error("{error}")]
pub struct GenFailure {
    pub error: GenError,
    pub partial: Box<GenerationReport>,
}

/// Runs the goal loop: reach, append, prune.
pub fn generate_suite(
    model: &CompiledModel,
    reqs: &RequirementSet,
    cfg: &GeneratorConfig,
) -> Result<(TestSuite, GenerationReport), GenFailure> {
    let goals = enumerate_goals(model.model(), reqs, cfg.goals);
    let mut report = GenerationReport {
        goal_config: cfg.goals,
        backend: cfg.backend,
        resolved_backend: cfg.backend.resolve(model),
        max_len: cfg.max_len,
        goals: goals.into_iter().map(|g| (g, None)).collect(),
        tests: 0,
        elements: 0,
    };
    let mut suite = TestSuite {
        nondet_names: model.nondet_names(),
        tests: Vec::new(),
    };
    match run_goals(model, cfg, &mut report, &mut suite) {
        Ok(()) => Ok((suite, report)),
        Err(error) => Err(GenFailure {
            error,
            partial: Box::new(report),
        }),
    }
}

fn run_goals(
    model: &CompiledModel,
    cfg: &GeneratorConfig,
    report: &mut GenerationReport,
    suite: &mut TestSuite,
) -> Result<(), GenError> {
    let preds = report
        .goals
        .iter()
        .map(|(g, _)| compile_goal(model, &g.predicate))
        .collect::<Result<Vec<_>, _>>()?;
    let mut engine = make_engine(model, cfg.backend, cfg)?;
    for i in 0..preds.len() {
        if report.goals[i].1.is_some() {
            continue;
        }
        let Some((depth, columns)) = engine.reach(&preds[i], cfg.max_len)? else {
            report.goals[i].1 = Some(GoalOutcome::Unreachable { bound: cfg.max_len });
            continue;
        };
        let w = to_witness(model, &preds[i], depth, columns)?;
        let id = format!("t{}", suite.tests.len());
        let test = TestCase {
            id: id.clone(),
            columns: w.columns,
            gen_trace: Some(w.trace),
        };
        report.goals[i].1 = Some(GoalOutcome::Covered {
            test: id.clone(),
            pos: w.hit,
        });
        for (j, pred) in preds.iter().enumerate().skip(i + 1) {
            if report.goals[j].1.is_none() && covers(model, &test, pred)?.is_some() {
                report.goals[j].1 = Some(GoalOutcome::Subsumed { test: id.clone() });
            }
        }
        report.tests += 1;
        report.elements += test.len();
        suite.tests.push(test);
    }
    Ok(())
}

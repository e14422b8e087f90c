//! Typed model representation: variables, domains, expressions, update blocks.

mod compile;
mod expr;
mod model;
mod types;

pub use compile::{
    eval_expr, validate_model, CompiledExpr, CompiledModel, Diagnostic, EvalError, EvalExprError,
    Location, Ty, ValidationErrors,
};
pub(crate) use compile::{CAssign, CExpr};
pub(crate) use expr::prec;
pub use expr::{BinOp, Expr, UnOp};
pub use model::{Assignment, BlockKind, ClosedLoopModel, UpdateBlock};
pub use types::{display_name, element_name, Domain, SourceSpan, Value, VarKind, Variable};

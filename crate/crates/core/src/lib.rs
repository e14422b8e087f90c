//! Closed-loop coverage test generation and LTL test execution.
//!
//! A model couples a plant and a controller over typed variables. Coverage
//! goals are derived from variable values and from the Boolean subformulas of
//! the requirements; bounded reachability turns each goal into a test case,
//! and every test case is unwound into a lasso on which the requirements are
//! evaluated exactly.

pub mod casegen;
pub mod dsl;
pub mod engine;
pub mod exec;
pub mod ir;
pub mod ltl;
pub mod oracle;
pub mod par;
pub mod testgen;

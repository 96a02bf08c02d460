//! Fault-tolerant models of Boolean formulas.
//!
//! A model `x` of `φ` is a *δ(r,s)-model* when every break of at most `r`
//! bits can be repaired by flipping at most `s` other bits so that the
//! result is again a model. Degrees `δᵏ` and `δ*` additionally require the
//! repaired models to be robust themselves.
//!
//! The crate provides an exhaustive [`oracle`] for small instances, the
//! polynomial procedures for 2-SAT ([`twosat`]) and affine formulas
//! ([`affine`]), and instance generators from the hardness constructions
//! ([`reductions`]).

pub mod affine;
pub mod formula;
pub mod oracle;
pub mod random;
pub mod reductions;
pub mod report;
pub mod twosat;

pub use formula::{
    classify, emit, parse, validate, Assignment, ClassFlag, Clause, Formula, FormulaClass,
    FormulaError, Format, Literal, SemanticFormula, Var,
};
pub use oracle::{Degree, Oracle, OracleError, RobustnessSpec};

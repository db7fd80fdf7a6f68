//! Executable security checks: observation and erasure, trace
//! indistinguishability, noninterference and robust declassification.
//!
//! Both checks are conditional on side conditions relating the protected
//! principal `H`, the observer and the delegation context. When a side
//! condition fails the check answers `Inapplicable` rather than guessing.

mod ni;
mod observe;
mod rd;

use thiserror::Error;

use crate::delegation::FactorError;
use crate::syntax::{Binding, Context, Term, Type};
use crate::typecheck::TypeError;

pub use ni::{bracket_adequacy, ni_check, Condition, NiOptions, NiProblem, NiReport, NiVerdict, Violation};
pub use observe::{observe, observe_trace, project_trace, trace_equiv, Observer};
pub use rd::{fair_attack_check, fill_holes, rd_check, RdCondition, RdOptions, RdProblem, RdVerdict, Unfair};

/// Reasons a harness run could not produce a verdict.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("the program must be source-level")]
    NotSourceLevel,
    #[error("{what} is ill-typed: {source}")]
    Type { what: String, source: TypeError },
    #[error("{what} has type {found}, expected {expected}")]
    Mismatch { what: String, expected: Box<Type>, found: Box<Type> },
    #[error("{what} must be a value")]
    NotAValue { what: String },
    #[error("variable `{0}` is not bound in the context")]
    Unbound(String),
    #[error("free variables remain after substitution: {0:?}")]
    NotClosed(Vec<String>),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error("{what} ran out of fuel")]
    OutOfFuel { what: String },
    #[error("{what} got stuck: {reason}")]
    Stuck { what: String, reason: String },
    #[error(transparent)]
    Unfair(#[from] Unfair),
}

/// The context keeping only the type variables of `gamma`.
fn type_vars(gamma: &Context) -> Context {
    gamma.bindings().iter().filter(|b| matches!(b, Binding::TyVar(_))).cloned().collect()
}

fn expect_type(what: &str, found: Type, expected: &Type) -> Result<(), HarnessError> {
    if found.equiv(expected) {
        Ok(())
    } else {
        Err(HarnessError::Mismatch {
            what: what.to_string(),
            expected: Box::new(expected.clone()),
            found: Box::new(found),
        })
    }
}

fn type_error(what: &str) -> impl FnOnce(TypeError) -> HarnessError + '_ {
    move |source| HarnessError::Type { what: what.to_string(), source }
}

fn first_difference(a: &[Term], b: &[Term]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

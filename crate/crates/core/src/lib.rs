//! Flow-limited authorization calculus.
//!
//! Principals combine confidentiality and integrity authority; programs
//! delegate authority dynamically with `assume`, protect values with labels,
//! and are checked by a type system that bounds what an attacker can learn
//! or influence. The crate provides the principal algebra, robust
//! authority judgments, the type checker, a small-step interpreter with
//! paired (bracketed) execution, and harnesses for noninterference and
//! robust declassification.

pub mod delegation;
pub mod eval;
pub mod generate;
pub mod principal;
pub mod security;
pub mod syntax;
pub mod typecheck;

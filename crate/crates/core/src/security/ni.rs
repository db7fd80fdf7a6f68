//! Noninterference for confidentiality and integrity, checked by running a
//! bracketed program and the two programs it stands for.

use std::fmt;

use super::observe::{project_trace, Observer};
use super::{expect_type, first_difference, type_error, type_vars, HarnessError};
use crate::delegation::{robust_acts_for, robust_flows_to, subtract, Delegation, Delegations, DEFAULT_FACTOR_BOUND};
use crate::eval::{run, Outcome, Run, DEFAULT_FUEL};
use crate::principal::{Axis, Principal};
use crate::syntax::{Context, Side, Term, Type};
use crate::typecheck::{protects, typecheck_with, CheckOptions, Harness};

/// One noninterference question: do runs of `term` that differ only in the
/// value of `x` look the same to `observer`?
#[derive(Clone, Debug)]
pub struct NiProblem {
    pub pi: Delegations,
    /// Typing context for the free variables of `term` other than `x`.
    pub gamma: Context,
    pub pc: Principal,
    pub term: Term,
    pub x: String,
    pub input_type: Type,
    pub inputs: [Term; 2],
    /// Closing substitution for the variables of `gamma`.
    pub subst: Vec<(String, Term)>,
    /// The principal whose data the inputs carry.
    pub h: Principal,
    pub observer: Principal,
    pub axis: Axis,
}

#[derive(Clone, Debug)]
pub struct NiOptions {
    pub fuel: usize,
    pub factor_bound: usize,
    pub check: CheckOptions,
}

impl Default for NiOptions {
    fn default() -> Self {
        NiOptions { fuel: DEFAULT_FUEL, factor_bound: DEFAULT_FACTOR_BOUND, check: CheckOptions::default() }
    }
}

/// The side condition that failed when a check does not apply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    /// Condition 1: `H` protects the input type.
    InputProtected,
    /// Condition 2: `H` must not flow to the observer.
    NoFlow,
    /// Condition 3: the pc must not be able to close the authority gap.
    NoDowngrade,
    /// A substitution entry is neither source-level nor protected by `H`.
    Substitution(String),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::InputProtected => f.write_str("condition 1 (H protects the input type)"),
            Condition::NoFlow => f.write_str("condition 2 (H does not flow to the observer)"),
            Condition::NoDowngrade => f.write_str("condition 3 (pc cannot close the authority gap)"),
            Condition::Substitution(y) => write!(f, "substitution entry `{y}` is neither source-level nor protected"),
        }
    }
}

/// A concrete counterexample found while checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The observed traces of the two runs differ at `index`.
    Traces { index: usize, left: Option<Box<Term>>, right: Option<Box<Term>> },
    /// After `step` bracketed steps the observed projections disagree.
    ErasureConservation { step: usize, left: Box<Term>, right: Box<Term> },
    /// The projected bracketed trace is not the standalone trace.
    Soundness { side: Side, index: usize },
    /// The bracketed run and the standalone runs end differently.
    Completeness,
    /// A delegation escaped whose voice the pc lacks into an unprotected result.
    Compartmentalization { delegation: Delegation },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |t: &Option<Box<Term>>| t.as_ref().map_or_else(|| "(end)".to_string(), |t| t.to_string());
        match self {
            Violation::Traces { index, left, right } => {
                write!(f, "observed traces differ at {index}: {} vs {}", show(left), show(right))
            }
            Violation::ErasureConservation { step, left, right } => {
                write!(f, "erasure not conserved at step {step}: {left} vs {right}")
            }
            Violation::Soundness { side, index } => {
                write!(f, "projection {} of the bracketed trace departs from its run at {index}", side.index())
            }
            Violation::Completeness => f.write_str("bracketed run and standalone runs end differently"),
            Violation::Compartmentalization { delegation } => {
                write!(f, "delegation {delegation} escaped compartmentalization")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct NiReport {
    /// Steps taken by the two standalone runs.
    pub steps: [usize; 2],
    pub bracket_steps: usize,
    /// The common observed trace.
    pub observed: Vec<Term>,
    /// Bracketed steps at which the two observed projections were not
    /// literally equal (one side ahead of the other); informational.
    pub lagging_steps: usize,
}

#[derive(Clone, Debug)]
pub enum NiVerdict {
    Pass(NiReport),
    Fail(Violation),
    Inapplicable(Condition),
}

impl NiVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, NiVerdict::Pass(_))
    }
}

fn finish(what: &str, r: &Run) -> Result<(), HarnessError> {
    match &r.outcome {
        Outcome::Value => Ok(()),
        Outcome::OutOfFuel => Err(HarnessError::OutOfFuel { what: what.to_string() }),
        Outcome::Stuck(reason) => Err(HarnessError::Stuck { what: what.to_string(), reason: reason.clone() }),
    }
}

/// Compare a bracketed run with the two runs it stands for: each projection
/// of the bracketed trace is the corresponding standalone trace up to
/// repeated elements, and the bracketed run ends in a value exactly when
/// both runs do, with the projections of its value as their values.
pub fn bracket_adequacy(bracketed: &Run, runs: [&Run; 2]) -> Result<(), Violation> {
    for (side, r) in [Side::Left, Side::Right].into_iter().zip(runs) {
        let projected = project_trace(&bracketed.trace, side);
        let standalone = project_trace(&r.trace, side);
        // A run cut short by fuel only has to be a prefix of the other.
        let n = if bracketed.outcome == Outcome::OutOfFuel || r.outcome == Outcome::OutOfFuel {
            projected.len().min(standalone.len())
        } else {
            projected.len().max(standalone.len())
        };
        if projected.get(..n) != standalone.get(..n) {
            let index = first_difference(&projected, &standalone);
            return Err(Violation::Soundness { side, index });
        }
    }
    let done = |r: &Run| r.outcome == Outcome::Value;
    if done(bracketed) != (done(runs[0]) && done(runs[1])) {
        return Err(Violation::Completeness);
    }
    if done(bracketed) {
        for (side, r) in [Side::Left, Side::Right].into_iter().zip(runs) {
            if !bracketed.last().project_side(side).alpha_eq(r.last()) {
                return Err(Violation::Completeness);
            }
        }
    }
    Ok(())
}

/// Check noninterference for one problem.
pub fn ni_check(p: &NiProblem, opts: &NiOptions) -> Result<NiVerdict, HarnessError> {
    if !p.term.is_source_level() {
        return Err(HarnessError::NotSourceLevel);
    }
    let pi = &p.pi;
    let plain = CheckOptions { harness: None, ..opts.check.clone() };
    let gamma_x = p.gamma.with_var(&p.x, p.input_type.clone());
    let ty = typecheck_with(&plain, pi, &gamma_x, &p.pc, &p.term, None).map_err(type_error("program"))?;

    let hp = p.h.project(p.axis);
    let lp = p.observer.project(p.axis);
    if !protects(pi, &hp, &p.input_type.project(p.axis)) {
        return Ok(NiVerdict::Inapplicable(Condition::InputProtected));
    }
    if robust_flows_to(pi, &hp, &lp) {
        return Ok(NiVerdict::Inapplicable(Condition::NoFlow));
    }
    let gap = match p.axis {
        Axis::Conf => subtract(pi, &hp, &lp, opts.factor_bound)?.voice(),
        Axis::Integ => subtract(pi, &lp, &hp, opts.factor_bound)?,
    };
    if robust_acts_for(pi, &p.pc, &gap) {
        return Ok(NiVerdict::Inapplicable(Condition::NoDowngrade));
    }

    let closed = type_vars(&p.gamma);
    let mut program = p.term.clone();
    for (y, w) in &p.subst {
        let expected = p.gamma.lookup(y).ok_or_else(|| HarnessError::Unbound(y.clone()))?;
        let what = format!("substitution entry `{y}`");
        let found = typecheck_with(&plain, pi, &closed, &p.pc, w, None).map_err(type_error(&what))?;
        expect_type(&what, found, expected)?;
        if !w.is_source_level() && !protects(pi, &hp, &expected.project(p.axis)) {
            return Ok(NiVerdict::Inapplicable(Condition::Substitution(y.clone())));
        }
        program = program.subst(y, w);
    }
    let open: Vec<String> = program.free_vars().into_iter().filter(|v| *v != p.x).collect();
    if !open.is_empty() {
        return Err(HarnessError::NotClosed(open));
    }
    for (i, v) in p.inputs.iter().enumerate() {
        let what = format!("input {}", i + 1);
        if !v.is_where_value() {
            return Err(HarnessError::NotAValue { what });
        }
        let found = typecheck_with(&plain, pi, &closed, &p.pc, v, None).map_err(type_error(&what))?;
        expect_type(&what, found, &p.input_type)?;
    }

    let [v1, v2] = &p.inputs;
    let bracketed = program.subst(&p.x, &Term::bracket(v1.clone(), v2.clone()));
    let harness = CheckOptions { harness: Some(Harness { h: p.h.clone(), axis: p.axis }), ..opts.check.clone() };
    let bty =
        typecheck_with(&harness, pi, &closed, &p.pc, &bracketed, None).map_err(type_error("bracketed program"))?;
    expect_type("bracketed program", bty, &ty)?;

    let rb = run(&bracketed, opts.fuel);
    let r1 = run(&program.subst(&p.x, v1), opts.fuel);
    let r2 = run(&program.subst(&p.x, v2), opts.fuel);
    finish("run 1", &r1)?;
    finish("run 2", &r2)?;
    if rb.outcome != Outcome::Value {
        finish("bracketed run", &rb)?;
    }

    if let Err(v) = bracket_adequacy(&rb, [&r1, &r2]) {
        return Ok(NiVerdict::Fail(v));
    }

    // Erasure conservation, per bracketed step. One-sided steps inside a
    // bracket let one projection run ahead, so the observed projections are
    // required to stay prefix-compatible rather than equal at every index.
    let obs = Observer::new(pi, &p.observer, p.axis);
    let mut seen: [Vec<Term>; 2] = [Vec::new(), Vec::new()];
    let mut lagging_steps = 0;
    for (k, e) in rb.trace.iter().enumerate() {
        for (i, side) in [Side::Left, Side::Right].into_iter().enumerate() {
            let o = obs.term(&e.project_side(side)).canonical();
            if seen[i].last() != Some(&o) {
                seen[i].push(o);
            }
        }
        let n = seen[0].len().min(seen[1].len());
        if seen[0][..n] != seen[1][..n] {
            let at = first_difference(&seen[0], &seen[1]);
            return Ok(NiVerdict::Fail(Violation::ErasureConservation {
                step: k,
                left: Box::new(seen[0][at].clone()),
                right: Box::new(seen[1][at].clone()),
            }));
        }
        if seen[0].len() != seen[1].len() {
            lagging_steps += 1;
        }
    }

    let t1 = obs.trace(&r1.trace);
    let t2 = obs.trace(&r2.trace);
    if t1 != t2 {
        let index = first_difference(&t1, &t2);
        return Ok(NiVerdict::Fail(Violation::Traces {
            index,
            left: t1.get(index).cloned().map(Box::new),
            right: t2.get(index).cloned().map(Box::new),
        }));
    }

    let result_protected = protects(pi, &hp, &ty.project(p.axis));
    for r in [&r1, &r2] {
        let mut end = r.last();
        while let Term::Where(body, ev) = end {
            if let Term::Del(sup, inf) = &**ev {
                if !robust_acts_for(pi, &p.pc, &inf.voice()) && !result_protected {
                    let delegation = Delegation::new(sup.clone(), inf.clone());
                    return Ok(NiVerdict::Fail(Violation::Compartmentalization { delegation }));
                }
            }
            end = body;
        }
    }

    Ok(NiVerdict::Pass(NiReport {
        steps: [r1.rules.len(), r2.rules.len()],
        bracket_steps: rb.rules.len(),
        observed: t1,
        lagging_steps,
    }))
}

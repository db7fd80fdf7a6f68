//! Robust declassification: attacker-supplied code placed in holes cannot
//! change which secrets the program discloses.

use std::fmt;

use thiserror::Error;

use super::observe::Observer;
use super::{expect_type, type_error, HarnessError};
use crate::delegation::{robust_acts_for, robust_flows_to, Delegations};
use crate::eval::{run, step, Outcome, Step, DEFAULT_FUEL};
use crate::principal::{Axis, Principal};
use crate::syntax::{Binding, Context, Term, Type};
use crate::typecheck::{hole_sites, protects, typecheck_with, CheckOptions, Harness, TypeError};

/// A program with holes, its secret input and two attack vectors.
#[derive(Clone, Debug)]
pub struct RdProblem {
    /// Delegations the program is typed under.
    pub pi: Delegations,
    /// Delegations the attacker is judged under.
    pub pi_h: Delegations,
    /// Typing context for the free variables of `term` other than `x`.
    pub gamma: Context,
    pub pc: Principal,
    pub term: Term,
    pub x: String,
    pub input_type: Type,
    pub inputs: [Term; 2],
    pub attacks: [Vec<Term>; 2],
    /// The principal whose secrets the program holds; its integrity part is
    /// the attacker.
    pub h: Principal,
}

#[derive(Clone, Debug)]
pub struct RdOptions {
    pub fuel: usize,
    /// Compare complete runs instead of single steps. This goes beyond the
    /// guarantee, which speaks about one step from the initial term.
    pub multi_step: bool,
    pub check: CheckOptions,
}

impl Default for RdOptions {
    fn default() -> Self {
        RdOptions { fuel: DEFAULT_FUEL, multi_step: false, check: CheckOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RdCondition {
    /// Condition 1: `H→` protects the input type.
    InputProtected,
    /// Condition 2: the attacker cannot read `H→`.
    AttackerBlind,
    /// Condition 3: the attacker cannot speak for `H→`.
    AttackerVoiceless,
}

impl fmt::Display for RdCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RdCondition::InputProtected => "condition 1 (H→ protects the input type)",
            RdCondition::AttackerBlind => "condition 2 (H→ does not flow to Δ(H←))",
            RdCondition::AttackerVoiceless => "condition 3 (H← does not act for ∇(H→))",
        })
    }
}

/// Why an attack vector is not fair.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Unfair {
    #[error("the program has {holes} holes but the attack fills {attacks}")]
    Arity { holes: usize, attacks: usize },
    #[error("attack {attack} mentions `{var}`, whose type is protected by H→ (no free secrets)")]
    FreeSecret { attack: usize, var: String },
    #[error("attack {attack} is ill-typed at the attacker's pc: {source}")]
    IllTyped { attack: usize, source: TypeError },
    #[error("attack {attack} has type {found}, the hole expects {expected}")]
    WrongType { attack: usize, expected: Type, found: Type },
}

/// The outcome of the biconditional between the two attack columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RdVerdict {
    /// `first` is whether the two inputs look alike under the first attack,
    /// `second` the same under the second attack.
    Pass {
        first: bool,
        second: bool,
    },
    Fail {
        first: bool,
        second: bool,
    },
    Inapplicable(RdCondition),
}

impl RdVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, RdVerdict::Pass { .. })
    }
}

/// Replace the holes of `e`, in left-to-right order, with `attacks`.
/// Filling is textual: attacks may refer to variables bound around a hole.
pub fn fill_holes(e: &Term, attacks: &[Term]) -> Term {
    fn go<'a>(e: &Term, next: &mut impl Iterator<Item = &'a Term>) -> Term {
        match e {
            Term::Hole(_) => next.next().cloned().unwrap_or_else(|| e.clone()),
            _ => e.map_children(|c| go(c, next)),
        }
    }
    go(e, &mut attacks.iter())
}

fn holes_of(e: &Term) -> usize {
    usize::from(matches!(e, Term::Hole(_))) + e.children().iter().map(|c| holes_of(c)).sum::<usize>()
}

/// Check that `attacks` is a fair attack on the program with holes `p.term`.
///
/// Each attack must type at the attacker's pc `H← ∧ Δ(H←)` under the
/// bindings around its hole that the attacker may read, and may not mention
/// a variable whose type `H→` protects when the attacker cannot read `H→`.
pub fn fair_attack_check(p: &RdProblem, attacks: &[Term], check: &CheckOptions) -> Result<(), HarnessError> {
    let holes = holes_of(&p.term);
    if holes != attacks.len() {
        return Err(Unfair::Arity { holes, attacks: attacks.len() }.into());
    }
    let opts = CheckOptions { harness: Some(Harness { h: p.h.clone(), axis: Axis::Conf }), ..check.clone() };
    let gamma_x = p.gamma.with_var(&p.x, p.input_type.clone());
    let (_, sites) = hole_sites(&opts, &p.pi, &gamma_x, &p.pc, &p.term).map_err(type_error("program with holes"))?;

    let pi_h = &p.pi_h;
    let attacker = p.h.integ();
    let view = attacker.view();
    let attacker_pc = attacker.and(&view);
    let hidden = !robust_flows_to(pi_h, &p.h.conf(), &view);
    let plain = CheckOptions { harness: None, ..check.clone() };

    for (i, (a, site)) in attacks.iter().zip(&sites).enumerate() {
        let attack = i + 1;
        let free = a.free_vars();
        for (y, ty) in site.gamma.visible_vars() {
            if hidden && free.contains(&y) && protects(pi_h, &p.h.conf(), &ty.project(Axis::Conf)) {
                return Err(Unfair::FreeSecret { attack, var: y }.into());
            }
        }
        let fair_gamma: Context = site
            .gamma
            .bindings()
            .iter()
            .filter(|b| match b {
                Binding::TyVar(_) => true,
                Binding::Var(_, Type::Says(l, _)) => robust_flows_to(pi_h, &l.conf(), &view),
                Binding::Var(..) => false,
            })
            .cloned()
            .collect();
        let found = typecheck_with(&plain, pi_h, &fair_gamma, &attacker_pc, a, None)
            .map_err(|source| Unfair::IllTyped { attack, source })?;
        if !found.equiv(&site.ty) {
            return Err(Unfair::WrongType { attack, expected: site.ty.clone(), found }.into());
        }
    }
    Ok(())
}

/// Check robust declassification for two inputs and two fair attacks.
pub fn rd_check(p: &RdProblem, opts: &RdOptions) -> Result<RdVerdict, HarnessError> {
    let pi_h = &p.pi_h;
    let h_conf = p.h.conf();
    let attacker = p.h.integ();
    if !protects(pi_h, &h_conf, &p.input_type.project(Axis::Conf)) {
        return Ok(RdVerdict::Inapplicable(RdCondition::InputProtected));
    }
    if robust_flows_to(pi_h, &h_conf, &attacker.view()) {
        return Ok(RdVerdict::Inapplicable(RdCondition::AttackerBlind));
    }
    if robust_acts_for(pi_h, &attacker, &h_conf.voice()) {
        return Ok(RdVerdict::Inapplicable(RdCondition::AttackerVoiceless));
    }
    for attacks in &p.attacks {
        fair_attack_check(p, attacks, &opts.check)?;
    }

    let plain = CheckOptions { harness: None, ..opts.check.clone() };
    let opts_h = CheckOptions { harness: Some(Harness { h: p.h.clone(), axis: Axis::Conf }), ..opts.check.clone() };
    let gamma_x = p.gamma.with_var(&p.x, p.input_type.clone());
    let ty =
        typecheck_with(&opts_h, &p.pi, &gamma_x, &p.pc, &p.term, None).map_err(type_error("program with holes"))?;
    for (i, v) in p.inputs.iter().enumerate() {
        let what = format!("input {}", i + 1);
        if !v.is_where_value() {
            return Err(HarnessError::NotAValue { what });
        }
        let found = typecheck_with(&plain, &p.pi, &p.gamma, &p.pc, v, None).map_err(type_error(&what))?;
        expect_type(&what, found, &p.input_type)?;
    }

    // traces[j][i]: attack j, input i.
    let mut traces: Vec<Vec<Vec<Term>>> = Vec::new();
    for (j, attacks) in p.attacks.iter().enumerate() {
        let filled = fill_holes(&p.term, attacks);
        let what = format!("program under attack {}", j + 1);
        let found = typecheck_with(&plain, &p.pi, &gamma_x, &p.pc, &filled, None).map_err(type_error(&what))?;
        expect_type(&what, found, &ty)?;
        let mut column = Vec::new();
        for v in &p.inputs {
            let e = filled.subst(&p.x, v);
            let what = format!("program under attack {}", j + 1);
            column.push(if opts.multi_step {
                let r = run(&e, opts.fuel);
                match r.outcome {
                    Outcome::Value => r.trace,
                    Outcome::OutOfFuel => return Err(HarnessError::OutOfFuel { what }),
                    Outcome::Stuck(reason) => return Err(HarnessError::Stuck { what, reason }),
                }
            } else {
                match step(&e) {
                    Step::Reduced(next, _) => vec![e, next],
                    Step::Value => vec![e],
                    Step::Stuck(reason) => return Err(HarnessError::Stuck { what, reason }),
                }
            });
        }
        traces.push(column);
    }

    let view = attacker.view();
    let obs = Observer::new(&p.pi, &view, Axis::Conf);
    let first = obs.equivalent(&traces[0][0], &traces[0][1]);
    let second = obs.equivalent(&traces[1][0], &traces[1][1]);
    Ok(if first == second { RdVerdict::Pass { first, second } } else { RdVerdict::Fail { first, second } })
}

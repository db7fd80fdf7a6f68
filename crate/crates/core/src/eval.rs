//! Small-step call-by-value evaluation.
//!
//! The step function is deterministic. Where the reduction relation leaves
//! a choice, it is resolved as follows: a `where`-annotated function is
//! unwrapped before its argument is evaluated, and inside a bracket the left
//! side steps before the right side.

use std::fmt;

use crate::syntax::{Side, Term};

pub const DEFAULT_FUEL: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    App,
    TApp,
    BindM,
    Ctx,
    UnPair,
    Case,
    Assume,
    UnitM,
    WApp,
    WTApp,
    WUnPair,
    WCase,
    WBindM,
    WAssume,
    BApp,
    BTApp,
    BUnPair,
    BCase,
    BBindM,
    BAssume,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::App => "E-App",
            Rule::TApp => "E-TApp",
            Rule::BindM => "E-BindM",
            Rule::Ctx => "O-Ctx",
            Rule::UnPair => "E-UnPair",
            Rule::Case => "E-Case",
            Rule::Assume => "E-Assume",
            Rule::UnitM => "E-UnitM",
            Rule::WApp => "W-App",
            Rule::WTApp => "W-TApp",
            Rule::WUnPair => "W-UnPair",
            Rule::WCase => "W-Case",
            Rule::WBindM => "W-BindM",
            Rule::WAssume => "W-Assume",
            Rule::BApp => "B-App",
            Rule::BTApp => "B-TApp",
            Rule::BUnPair => "B-UnPair",
            Rule::BCase => "B-Case",
            Rule::BBindM => "B-BindM",
            Rule::BAssume => "B-Assume",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Reduced(Term, Rule),
    Value,
    Stuck(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Value,
    Stuck(String),
    OutOfFuel,
}

/// A finished (or fuel-limited) execution.
#[derive(Clone, Debug)]
pub struct Run {
    /// Every term visited, starting with the initial one.
    pub trace: Vec<Term>,
    /// The rule applied at each step; one shorter than `trace`.
    pub rules: Vec<Rule>,
    pub outcome: Outcome,
}

impl Run {
    pub fn last(&self) -> &Term {
        self.trace.last().expect("trace is never empty")
    }
}

pub fn run(e: &Term, fuel: usize) -> Run {
    let mut trace = vec![e.clone()];
    let mut rules = Vec::new();
    loop {
        if rules.len() >= fuel {
            return Run { trace, rules, outcome: Outcome::OutOfFuel };
        }
        match step(trace.last().expect("non-empty")) {
            Step::Reduced(next, rule) => {
                trace.push(next);
                rules.push(rule);
            }
            Step::Value => return Run { trace, rules, outcome: Outcome::Value },
            Step::Stuck(why) => return Run { trace, rules, outcome: Outcome::Stuck(why) },
        }
    }
}

fn within(e: &Term, rebuild: impl FnOnce(Term) -> Term) -> Step {
    match step(e) {
        Step::Reduced(e2, r) => Step::Reduced(rebuild(e2), r),
        Step::Value => Step::Stuck("subterm unexpectedly a value".into()),
        stuck => stuck,
    }
}

fn bx(e: Term) -> Box<Term> {
    Box::new(e)
}

/// Perform one reduction step.
pub fn step(e: &Term) -> Step {
    if e.is_where_value() {
        return Step::Value;
    }
    match e {
        Term::App(f, a) => {
            if !f.is_where_value() {
                return within(f, |f2| Term::App(bx(f2), a.clone()));
            }
            if !a.is_where_value() {
                return within(a, |a2| Term::App(f.clone(), bx(a2)));
            }
            match &**f {
                Term::Where(w, v) => {
                    Step::Reduced(Term::Where(bx(Term::App(w.clone(), a.clone())), v.clone()), Rule::WApp)
                }
                Term::Lam { param, pc, body, .. } => {
                    Step::Reduced(Term::ProtCtx(pc.clone(), bx(body.subst(param, a))), Rule::App)
                }
                Term::Bracket(w1, w2) => Step::Reduced(
                    Term::bracket(
                        Term::App(w1.clone(), bx(a.project_side(Side::Left))),
                        Term::App(w2.clone(), bx(a.project_side(Side::Right))),
                    ),
                    Rule::BApp,
                ),
                _ => Step::Stuck("application of a non-function".into()),
            }
        }
        Term::TApp(f, t) => {
            if !f.is_where_value() {
                return within(f, |f2| Term::TApp(bx(f2), t.clone()));
            }
            match &**f {
                Term::Where(w, v) => {
                    Step::Reduced(Term::Where(bx(Term::TApp(w.clone(), t.clone())), v.clone()), Rule::WTApp)
                }
                Term::TLam { tvar, pc, body } => {
                    Step::Reduced(Term::ProtCtx(pc.clone(), bx(body.subst_type(tvar, t))), Rule::TApp)
                }
                Term::Bracket(w1, w2) => Step::Reduced(
                    Term::bracket(Term::TApp(w1.clone(), t.clone()), Term::TApp(w2.clone(), t.clone())),
                    Rule::BTApp,
                ),
                _ => Step::Stuck("type application of a non-polymorphic value".into()),
            }
        }
        Term::Pair(a, b) => {
            if !a.is_where_value() {
                within(a, |a2| Term::Pair(bx(a2), b.clone()))
            } else {
                within(b, |b2| Term::Pair(a.clone(), bx(b2)))
            }
        }
        Term::Proj(side, p) => {
            if !p.is_where_value() {
                return within(p, |p2| Term::Proj(*side, bx(p2)));
            }
            let pick = |a: &Term, b: &Term| match side {
                Side::Left => a.clone(),
                Side::Right => b.clone(),
            };
            match &**p {
                Term::Where(w, v) => {
                    Step::Reduced(Term::Where(bx(Term::Proj(*side, w.clone())), v.clone()), Rule::WUnPair)
                }
                Term::Pair(a, b) => Step::Reduced(pick(a, b), Rule::UnPair),
                Term::Bracket(w1, w2) => {
                    let next = match (&**w1, &**w2) {
                        (Term::Pair(a1, b1), Term::Pair(a2, b2)) => Term::bracket(pick(a1, b1), pick(a2, b2)),
                        _ => Term::bracket(Term::Proj(*side, w1.clone()), Term::Proj(*side, w2.clone())),
                    };
                    Step::Reduced(next, Rule::BUnPair)
                }
                _ => Step::Stuck("projection from a non-pair".into()),
            }
        }
        Term::Inj(side, t, body) => within(body, |b2| Term::Inj(*side, t.clone(), bx(b2))),
        Term::Case { scrutinee, binder, left, right } => {
            if !scrutinee.is_where_value() {
                return within(scrutinee, |s2| Term::Case {
                    scrutinee: bx(s2),
                    binder: binder.clone(),
                    left: left.clone(),
                    right: right.clone(),
                });
            }
            match &**scrutinee {
                Term::Where(w, v) => Step::Reduced(
                    Term::Where(
                        bx(Term::Case {
                            scrutinee: w.clone(),
                            binder: binder.clone(),
                            left: left.clone(),
                            right: right.clone(),
                        }),
                        v.clone(),
                    ),
                    Rule::WCase,
                ),
                Term::Inj(side, _, w) => {
                    let branch = match side {
                        Side::Left => left,
                        Side::Right => right,
                    };
                    Step::Reduced(branch.subst(binder, w), Rule::Case)
                }
                Term::Bracket(w1, w2) => {
                    let side = |w: &Term, s: Side| Term::Case {
                        scrutinee: bx(w.clone()),
                        binder: binder.clone(),
                        left: bx(left.project_side(s)),
                        right: bx(right.project_side(s)),
                    };
                    Step::Reduced(Term::bracket(side(w1, Side::Left), side(w2, Side::Right)), Rule::BCase)
                }
                _ => Step::Stuck("case on a non-injection".into()),
            }
        }
        Term::UnitM(l, body) => {
            if body.is_where_value() {
                Step::Reduced(Term::Sealed(l.clone(), body.clone()), Rule::UnitM)
            } else {
                within(body, |b2| Term::UnitM(l.clone(), bx(b2)))
            }
        }
        Term::Bind { binder, bound, body } => {
            if !bound.is_where_value() {
                return within(bound, |b2| Term::Bind { binder: binder.clone(), bound: bx(b2), body: body.clone() });
            }
            match &**bound {
                Term::Where(w, v) => Step::Reduced(
                    Term::Where(
                        bx(Term::Bind { binder: binder.clone(), bound: w.clone(), body: body.clone() }),
                        v.clone(),
                    ),
                    Rule::WBindM,
                ),
                Term::Sealed(l, w) => Step::Reduced(Term::ProtCtx(l.clone(), bx(body.subst(binder, w))), Rule::BindM),
                Term::Bracket(w1, w2) => {
                    let side = |w: &Term, s: Side| Term::Bind {
                        binder: binder.clone(),
                        bound: bx(w.clone()),
                        body: bx(body.project_side(s)),
                    };
                    Step::Reduced(Term::bracket(side(w1, Side::Left), side(w2, Side::Right)), Rule::BBindM)
                }
                _ => Step::Stuck("bind on an unlabeled value".into()),
            }
        }
        Term::Assume(ev, body) => {
            if !ev.is_where_value() {
                return within(ev, |e2| Term::Assume(bx(e2), body.clone()));
            }
            match &**ev {
                Term::Where(w, v) => {
                    Step::Reduced(Term::Where(bx(Term::Assume(w.clone(), body.clone())), v.clone()), Rule::WAssume)
                }
                Term::Del(..) => Step::Reduced(Term::Where(body.clone(), ev.clone()), Rule::Assume),
                Term::Bracket(w1, w2) => Step::Reduced(
                    Term::bracket(
                        Term::Assume(w1.clone(), bx(body.project_side(Side::Left))),
                        Term::Assume(w2.clone(), bx(body.project_side(Side::Right))),
                    ),
                    Rule::BAssume,
                ),
                _ => Step::Stuck("assume without delegation evidence".into()),
            }
        }
        Term::Where(body, v) => within(body, |b2| Term::Where(bx(b2), v.clone())),
        Term::ProtCtx(l, body) => {
            if body.is_where_value() {
                Step::Reduced((**body).clone(), Rule::Ctx)
            } else {
                within(body, |b2| Term::ProtCtx(l.clone(), bx(b2)))
            }
        }
        Term::Bracket(a, b) => {
            if !a.is_where_value() {
                if let Step::Reduced(a2, r) = step(a) {
                    return Step::Reduced(Term::Bracket(bx(a2), b.clone()), r);
                }
            }
            if !b.is_where_value() {
                if let Step::Reduced(b2, r) = step(b) {
                    return Step::Reduced(Term::Bracket(a.clone(), bx(b2)), r);
                }
            }
            Step::Stuck("both sides of a bracket are stuck".into())
        }
        Term::Var(x) => Step::Stuck(format!("free variable `{x}`")),
        Term::Hole(_) => Step::Stuck("unfilled hole".into()),
        Term::Opaque => Step::Stuck("erased term".into()),
        Term::Sealed(l, body) => within(body, |b2| Term::Sealed(l.clone(), bx(b2))),
        Term::Unit | Term::Del(..) | Term::Lam { .. } | Term::TLam { .. } => Step::Value,
    }
}

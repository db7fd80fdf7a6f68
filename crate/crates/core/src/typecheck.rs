//! Type checking.
//!
//! The checker is syntax directed. Every authority premise is a robust
//! judgment under the current delegation context, and failures report the
//! rule, the premise and the judgment that could not be established.
//!
//! Runtime forms (`sealed`, `where`, `ctx`) are always accepted so that
//! intermediate states of an execution can be checked. Brackets and holes
//! need a [`Harness`] naming the principal `H` whose secrets or influence
//! they carry.

use std::cell::RefCell;
use std::fmt;

use thiserror::Error;

use crate::delegation::{robust_acts_for, robust_flows_to, Delegation, Delegations};
use crate::principal::{Axis, Principal};
use crate::syntax::{Binding, Context, Span, SpanTree, Term, Type};

/// Configuration for checking bracketed terms and holes.
#[derive(Clone, Debug)]
pub struct Harness {
    /// The principal whose data the brackets carry.
    pub h: Principal,
    /// The axis being observed.
    pub axis: Axis,
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    /// The least pc at which `where` annotations are checked.
    pub pc_lowest: Principal,
    pub harness: Option<Harness>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { pc_lowest: Principal::Top.integ(), harness: None }
    }
}

impl CheckOptions {
    pub fn harness(h: Principal, axis: Axis) -> Self {
        CheckOptions { harness: Some(Harness { h, axis }), ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    ActsFor,
    FlowsTo,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::ActsFor => "≽",
            Relation::FlowsTo => "⊑",
        })
    }
}

/// What a failing premise expected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expected {
    Judgment { pi: Delegations, lhs: Principal, rel: Relation, rhs: Principal },
    Protects { label: Principal, ty: Type },
    Type { expected: Type, found: Type },
    Shape { wanted: &'static str, found: Type },
    Other(String),
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Judgment { pi, lhs, rel, rhs } => {
                write!(f, "expected Π ⊩ {lhs} {rel} {rhs} with Π = {pi}")
            }
            Expected::Protects { label, ty } => write!(f, "expected {label} to protect {ty}"),
            Expected::Type { expected, found } => write!(f, "expected type {expected}, found {found}"),
            Expected::Shape { wanted, found } => write!(f, "expected {wanted}, found {found}"),
            Expected::Other(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub struct TypeError {
    pub rule: &'static str,
    pub premise: &'static str,
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub span: Option<Span>,
    pub expected: Box<Expected>,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{} at ", self.rule, self.premise)?;
        match self.span {
            Some(s) => write!(f, "{s}")?,
            None => write!(f, "node {:?}", self.path)?,
        }
        write!(f, "; {}", self.expected)
    }
}

/// Whether `l` protects values of type `t`.
pub fn protects(pi: &Delegations, l: &Principal, t: &Type) -> bool {
    match t {
        Type::Unit => true,
        Type::Prod(a, b) => protects(pi, l, a) && protects(pi, l, b),
        Type::Fun(_, pc, b) => protects(pi, l, b) && robust_flows_to(pi, l, pc),
        Type::Forall(_, pc, b) => protects(pi, l, b) && robust_flows_to(pi, l, pc),
        Type::Says(l2, _) => robust_flows_to(pi, l, l2),
        Type::Sum(..) | Type::Var(_) | Type::ActsFor(..) => false,
    }
}

/// Type of `e` under the default options.
pub fn typecheck(pi: &Delegations, gamma: &Context, pc: &Principal, e: &Term) -> Result<Type, TypeError> {
    typecheck_with(&CheckOptions::default(), pi, gamma, pc, e, None)
}

/// Type of `e`, with source positions taken from `spans` when given.
pub fn typecheck_with(
    opts: &CheckOptions,
    pi: &Delegations,
    gamma: &Context,
    pc: &Principal,
    e: &Term,
    spans: Option<&SpanTree>,
) -> Result<Type, TypeError> {
    let checker = Checker { opts, holes: RefCell::new(Vec::new()) };
    let mut gamma = gamma.clone();
    checker.check(pi, &mut gamma, pc, e, &mut Vec::new(), spans)
}

/// Well-formedness: every type variable is bound in the context.
pub fn well_formed(gamma: &Context, t: &Type) -> bool {
    t.free_vars().iter().all(|x| gamma.has_tyvar(x))
}

struct Checker<'a> {
    opts: &'a CheckOptions,
    holes: RefCell<Vec<HoleSite>>,
}

/// The typing judgment in force at a hole.
#[derive(Clone, Debug)]
pub struct HoleSite {
    pub ty: Type,
    pub pi: Delegations,
    pub gamma: Context,
    pub pc: Principal,
}

/// Type `e` in harness mode and report the judgment at every hole, in
/// left-to-right order.
pub fn hole_sites(
    opts: &CheckOptions,
    pi: &Delegations,
    gamma: &Context,
    pc: &Principal,
    e: &Term,
) -> Result<(Type, Vec<HoleSite>), TypeError> {
    let checker = Checker { opts, holes: RefCell::new(Vec::new()) };
    let mut gamma = gamma.clone();
    let t = checker.check(pi, &mut gamma, pc, e, &mut Vec::new(), None)?;
    Ok((t, checker.holes.into_inner()))
}

struct Site<'p, 's> {
    path: &'p [usize],
    spans: Option<&'s SpanTree>,
}

impl Site<'_, '_> {
    fn fail(&self, rule: &'static str, premise: &'static str, expected: Expected) -> TypeError {
        TypeError {
            rule,
            premise,
            path: self.path.to_vec(),
            span: self.spans.map(|s| s.span),
            expected: Box::new(expected),
        }
    }
}

impl Checker<'_> {
    fn check(
        &self,
        pi: &Delegations,
        gamma: &mut Context,
        pc: &Principal,
        e: &Term,
        path: &mut Vec<usize>,
        spans: Option<&SpanTree>,
    ) -> Result<Type, TypeError> {
        let site = Site { path: &path.clone(), spans };
        // Check child `i` with the given context, delegations and pc.
        macro_rules! child {
            ($i:expr, $pi:expr, $gamma:expr, $pc:expr, $e:expr) => {{
                path.push($i);
                let r = self.check($pi, $gamma, $pc, $e, path, spans.and_then(|s| s.child($i)));
                path.pop();
                r?
            }};
        }
        let acts_for = |pi: &Delegations, rule, premise, lhs: &Principal, rhs: &Principal| {
            if robust_acts_for(pi, lhs, rhs) {
                Ok(())
            } else {
                Err(site.fail(
                    rule,
                    premise,
                    Expected::Judgment {
                        pi: pi.clone(),
                        lhs: lhs.canonical(),
                        rel: Relation::ActsFor,
                        rhs: rhs.canonical(),
                    },
                ))
            }
        };
        let flows = |pi: &Delegations, rule, premise, lhs: &Principal, rhs: &Principal| {
            if robust_flows_to(pi, lhs, rhs) {
                Ok(())
            } else {
                Err(site.fail(
                    rule,
                    premise,
                    Expected::Judgment {
                        pi: pi.clone(),
                        lhs: lhs.canonical(),
                        rel: Relation::FlowsTo,
                        rhs: rhs.canonical(),
                    },
                ))
            }
        };
        let protecting = |pi: &Delegations, rule, premise, l: &Principal, t: &Type| {
            if protects(pi, l, t) {
                Ok(())
            } else {
                Err(site.fail(rule, premise, Expected::Protects { label: l.clone(), ty: t.clone() }))
            }
        };
        let same = |rule, premise, expected: &Type, found: &Type| {
            if expected.equiv(found) {
                Ok(())
            } else {
                Err(site.fail(rule, premise, Expected::Type { expected: expected.clone(), found: found.clone() }))
            }
        };
        let wf = |gamma: &Context, rule, t: &Type| {
            if well_formed(gamma, t) {
                Ok(())
            } else {
                Err(site.fail(rule, "well-formed", Expected::Other(format!("unbound type variable in {t}"))))
            }
        };

        match e {
            Term::Var(x) => gamma
                .lookup(x)
                .cloned()
                .ok_or_else(|| site.fail("Var", "bound", Expected::Other(format!("unbound variable `{x}`")))),
            Term::Unit => Ok(Type::Unit),
            Term::Del(p, q) => Ok(Type::ActsFor(p.clone(), q.clone())),
            Term::Lam { param, ty, pc: pc2, body } => {
                wf(gamma, "Lam", ty)?;
                gamma.push(Binding::Var(param.clone(), ty.clone()));
                path.push(0);
                let r = self.check(pi, gamma, pc2, body, path, spans.and_then(|s| s.child(0)));
                path.pop();
                gamma.pop();
                Ok(Type::fun(ty.clone(), pc2.clone(), r?))
            }
            Term::TLam { tvar, pc: pc2, body } => {
                gamma.push(Binding::TyVar(tvar.clone()));
                path.push(0);
                let r = self.check(pi, gamma, pc2, body, path, spans.and_then(|s| s.child(0)));
                path.pop();
                gamma.pop();
                Ok(Type::forall(tvar, pc2.clone(), r?))
            }
            Term::App(f, a) => {
                let tf = child!(0, pi, gamma, pc, f);
                let Type::Fun(t1, pc2, t2) = tf else {
                    return Err(site.fail("App", "function", Expected::Shape { wanted: "a function", found: tf }));
                };
                let ta = child!(1, pi, gamma, pc, a);
                same("App", "argument", &t1, &ta)?;
                flows(pi, "App", "pc ⊑ pc'", pc, &pc2)?;
                Ok(*t2)
            }
            Term::TApp(f, t) => {
                let tf = child!(0, pi, gamma, pc, f);
                let Type::Forall(x, pc2, body) = tf else {
                    return Err(site.fail(
                        "TApp",
                        "polymorphic",
                        Expected::Shape { wanted: "a polymorphic type", found: tf },
                    ));
                };
                wf(gamma, "TApp", t)?;
                flows(pi, "TApp", "pc ⊑ pc'", pc, &pc2)?;
                Ok(body.subst(&x, t))
            }
            Term::Pair(a, b) => {
                let ta = child!(0, pi, gamma, pc, a);
                let tb = child!(1, pi, gamma, pc, b);
                Ok(Type::prod(ta, tb))
            }
            Term::Proj(side, p) => {
                let tp = child!(0, pi, gamma, pc, p);
                match tp {
                    Type::Prod(a, b) => Ok(match side {
                        crate::syntax::Side::Left => *a,
                        crate::syntax::Side::Right => *b,
                    }),
                    other => Err(site.fail("UnPair", "product", Expected::Shape { wanted: "a product", found: other })),
                }
            }
            Term::Inj(side, ann, body) => {
                wf(gamma, "Inj", ann)?;
                let Type::Sum(a, b) = ann else {
                    return Err(site.fail(
                        "Inj",
                        "annotation",
                        Expected::Shape { wanted: "a sum type", found: ann.clone() },
                    ));
                };
                let tb = child!(0, pi, gamma, pc, body);
                let want = match side {
                    crate::syntax::Side::Left => a,
                    crate::syntax::Side::Right => b,
                };
                same("Inj", "component", want, &tb)?;
                Ok(ann.clone())
            }
            Term::Case { scrutinee, binder, left, right } => {
                let ts = child!(0, pi, gamma, pc, scrutinee);
                let Type::Sum(a, b) = ts else {
                    return Err(site.fail("Case", "sum", Expected::Shape { wanted: "a sum", found: ts }));
                };
                gamma.push(Binding::Var(binder.clone(), *a));
                path.push(1);
                let r1 = self.check(pi, gamma, pc, left, path, spans.and_then(|s| s.child(1)));
                path.pop();
                gamma.pop();
                let t1 = r1?;
                gamma.push(Binding::Var(binder.clone(), *b));
                path.push(2);
                let r2 = self.check(pi, gamma, pc, right, path, spans.and_then(|s| s.child(2)));
                path.pop();
                gamma.pop();
                let t2 = r2?;
                same("Case", "branches agree", &t1, &t2)?;
                protecting(pi, "Case", "pc protects τ", pc, &t1)?;
                Ok(t1)
            }
            Term::UnitM(l, body) => {
                let t = child!(0, pi, gamma, pc, body);
                flows(pi, "UnitM", "pc ⊑ ℓ", pc, l)?;
                Ok(Type::says(l.clone(), t))
            }
            Term::Sealed(l, body) => {
                if !body.is_where_value() {
                    return Err(site.fail(
                        "Sealed",
                        "value",
                        Expected::Other("sealed contents must be a value".into()),
                    ));
                }
                let t = child!(0, pi, gamma, pc, body);
                Ok(Type::says(l.clone(), t))
            }
            Term::Bind { binder, bound, body } => {
                let tb = child!(0, pi, gamma, pc, bound);
                let Type::Says(l, inner) = tb else {
                    return Err(site.fail("BindM", "says", Expected::Shape { wanted: "a labeled type", found: tb }));
                };
                let raised = pc.flow_join(&l);
                gamma.push(Binding::Var(binder.clone(), *inner));
                path.push(1);
                let r = self.check(pi, gamma, &raised, body, path, spans.and_then(|s| s.child(1)));
                path.pop();
                gamma.pop();
                let t = r?;
                protecting(pi, "BindM", "pc ⊔ ℓ protects τ", &raised, &t)?;
                Ok(t)
            }
            Term::Assume(ev, body) => {
                let te = child!(0, pi, gamma, pc, ev);
                let Type::ActsFor(p, q) = te else {
                    return Err(site.fail(
                        "Assume",
                        "evidence",
                        Expected::Shape { wanted: "delegation evidence", found: te },
                    ));
                };
                acts_for(pi, "Assume", "pc ≽ ∇(q)", pc, &q.voice())?;
                acts_for(pi, "Assume", "∇(p→) ≽ ∇(q→)", &p.conf().voice(), &q.conf().voice())?;
                let extended = pi.with(Delegation::new(p, q));
                Ok(child!(1, &extended, gamma, pc, body))
            }
            Term::Where(body, v) => {
                if !v.is_value() {
                    return Err(site.fail("Where", "value", Expected::Other("annotation must be a value".into())));
                }
                let tv = child!(1, pi, gamma, pc, v);
                let Type::ActsFor(p, q) = tv else {
                    return Err(site.fail(
                        "Where",
                        "evidence",
                        Expected::Shape { wanted: "delegation evidence", found: tv },
                    ));
                };
                let low = &self.opts.pc_lowest;
                acts_for(pi, "Where", "pc⌄ ≽ ∇(q)", low, &q.voice())?;
                acts_for(pi, "Where", "∇(p→) ≽ ∇(q→)", &p.conf().voice(), &q.conf().voice())?;
                let extended = pi.with(Delegation::new(p, q));
                Ok(child!(0, &extended, gamma, pc, body))
            }
            Term::ProtCtx(l, body) => {
                let inner = pc.flow_join(l);
                Ok(child!(0, pi, gamma, &inner, body))
            }
            Term::Bracket(a, b) => {
                let Some(h) = &self.opts.harness else {
                    return Err(site.fail(
                        "Bracket",
                        "harness",
                        Expected::Other("brackets need an observer configuration".into()),
                    ));
                };
                let hp = h.h.project(h.axis);
                let (rule, inner_pc) = if a.is_where_value() && b.is_where_value() {
                    ("Bracket-Values", pc.clone())
                } else {
                    ("Bracket", bracket_pc(&hp, pc, h.axis))
                };
                let ta = child!(0, pi, gamma, &inner_pc, a);
                let tb = child!(1, pi, gamma, &inner_pc, b);
                same(rule, "sides agree", &ta, &tb)?;
                protecting(pi, rule, "H protects τ", &hp, &ta.project(h.axis))?;
                Ok(ta)
            }
            Term::Hole(t) => {
                let Some(h) = &self.opts.harness else {
                    return Err(site.fail(
                        "Hole",
                        "harness",
                        Expected::Other("holes need an observer configuration".into()),
                    ));
                };
                wf(gamma, "Hole", t)?;
                acts_for(pi, "Hole", "H← ≽ pc←", &h.h.integ(), &pc.integ())?;
                flows(pi, "Hole", "pc→ ⊑ Δ(H←)", &pc.conf(), &h.h.integ().view())?;
                self.holes.borrow_mut().push(HoleSite {
                    ty: t.clone(),
                    pi: pi.clone(),
                    gamma: gamma.clone(),
                    pc: pc.clone(),
                });
                Ok(t.clone())
            }
            Term::Opaque => Err(site.fail("Opaque", "typeable", Expected::Other("erased terms have no type".into()))),
        }
    }
}

/// The least pc (in the flow order) whose projection covers both the
/// bracket principal and the current pc.
fn bracket_pc(hp: &Principal, pc: &Principal, axis: Axis) -> Principal {
    let joined = hp.flow_join(&pc.project(axis));
    match axis {
        Axis::Conf => joined.conf().and(&Principal::Top.integ()).canonical(),
        Axis::Integ => joined.integ().canonical(),
    }
}

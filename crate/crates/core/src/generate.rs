//! Random principals, types and type-directed terms for fuzzing.
//!
//! Term generation aims at well-typed output but does not guarantee it;
//! callers filter candidates through the type checker.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::delegation::{robust_acts_for, robust_flows_to, Delegation, Delegations};
use crate::eval::{run, Outcome};
use crate::principal::Principal;
use crate::syntax::{Binding, Context, Side, Term, Type};
use crate::typecheck::{protects, typecheck};

/// A random principal over `names` with at most `depth` nested operators.
pub fn random_principal(rng: &mut impl Rng, names: &[&str], depth: usize) -> Principal {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..10) {
            0 => Principal::Top,
            1 => Principal::Bot,
            _ => Principal::name(names.choose(rng).expect("at least one name")),
        };
    }
    let sub = |rng: &mut _| random_principal(rng, names, depth - 1);
    match rng.gen_range(0..4) {
        0 => sub(rng).conf(),
        1 => sub(rng).integ(),
        2 => sub(rng).and(&sub(rng)),
        _ => sub(rng).or(&sub(rng)),
    }
}

/// An open term in `x` with two closed inputs of the type of `x`, the raw
/// material of a bracketed run.
#[derive(Clone, Debug)]
pub struct BracketCase {
    pub pc: Principal,
    pub term: Term,
    pub ty: Type,
    pub x: String,
    pub input_type: Type,
    /// The protection label of `input_type`.
    pub label: Principal,
    pub inputs: [Term; 2],
}

/// Type-directed generator of closed terms over a small principal pool.
pub struct Generator<R> {
    pub rng: R,
    pub pool: Vec<Principal>,
    fresh: usize,
}

impl<R: Rng> Generator<R> {
    pub fn new(rng: R) -> Self {
        let mut pool = Vec::new();
        for n in ["Alice", "Bob"] {
            let p = Principal::name(n);
            pool.extend([p.conf(), p.integ(), p]);
        }
        pool.extend([Principal::Top, Principal::Bot, Principal::Top.integ(), Principal::Bot.conf()]);
        Generator { rng, pool, fresh: 0 }
    }

    pub fn principal(&mut self) -> Principal {
        self.pool.choose(&mut self.rng).expect("non-empty pool").clone()
    }

    fn fresh(&mut self, base: &str) -> String {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    /// A random closed type.
    pub fn ty(&mut self, depth: usize) -> Type {
        if depth == 0 {
            return Type::Unit;
        }
        match self.rng.gen_range(0..9) {
            0 | 1 => Type::Unit,
            2 => Type::sum(self.ty(depth - 1), self.ty(depth - 1)),
            3 => Type::prod(self.ty(depth - 1), self.ty(depth - 1)),
            4 | 5 => {
                let l = self.principal();
                Type::says(l, self.ty(depth - 1))
            }
            6 | 7 => {
                let pc = self.principal();
                Type::fun(self.ty(depth - 1), pc, self.ty(depth - 1))
            }
            _ => Type::ActsFor(self.principal(), self.principal()),
        }
    }

    /// A term of type `ty`, aiming to type under `pi`, `gamma` and `pc`.
    pub fn term(&mut self, pi: &Delegations, gamma: &Context, pc: &Principal, ty: &Type, depth: usize) -> Term {
        if depth > 0 && self.rng.gen_bool(0.6) {
            for _ in 0..3 {
                if let Some(e) = self.elimination(pi, gamma, pc, ty, depth) {
                    return e;
                }
            }
        }
        let vars: Vec<String> = gamma.visible_vars().into_iter().filter(|(_, t)| t.equiv(ty)).map(|(x, _)| x).collect();
        if !vars.is_empty() && self.rng.gen_bool(0.5) {
            return Term::var(vars.choose(&mut self.rng).expect("non-empty"));
        }
        self.introduction(pi, gamma, pc, ty, depth)
    }

    fn introduction(&mut self, pi: &Delegations, gamma: &Context, pc: &Principal, ty: &Type, depth: usize) -> Term {
        let d = depth.saturating_sub(1);
        match ty {
            Type::Unit | Type::Var(_) => Term::Unit,
            Type::Sum(a, b) => {
                let side = if self.rng.gen_bool(0.5) { Side::Left } else { Side::Right };
                let inner = if side == Side::Left { a } else { b };
                Term::Inj(side, ty.clone(), Box::new(self.term(pi, gamma, pc, inner, d)))
            }
            Type::Prod(a, b) => Term::pair(self.term(pi, gamma, pc, a, d), self.term(pi, gamma, pc, b, d)),
            Type::Says(l, t) => Term::eta(l.clone(), self.term(pi, gamma, pc, t, d)),
            Type::Fun(a, pc2, b) => {
                let x = self.fresh("x");
                let inner = gamma.with_var(&x, (**a).clone());
                Term::lam(&x, (**a).clone(), pc2.clone(), self.term(pi, &inner, pc2, b, d))
            }
            Type::Forall(x, pc2, t) => {
                let mut inner = gamma.clone();
                inner.push(Binding::TyVar(x.clone()));
                Term::tlam(x, pc2.clone(), self.term(pi, &inner, pc2, t, d))
            }
            Type::ActsFor(p, q) => Term::Del(p.clone(), q.clone()),
        }
    }

    fn elimination(
        &mut self,
        pi: &Delegations,
        gamma: &Context,
        pc: &Principal,
        ty: &Type,
        depth: usize,
    ) -> Option<Term> {
        let d = depth - 1;
        match self.rng.gen_range(0..7) {
            0 => {
                let a = self.ty(1);
                let x = self.fresh("f");
                let inner = gamma.with_var(&x, a.clone());
                let body = self.term(pi, &inner, pc, ty, d);
                let f = Term::lam(&x, a.clone(), pc.clone(), body);
                Some(Term::app(f, self.term(pi, gamma, pc, &a, d)))
            }
            1 => {
                let other = self.ty(1);
                let (pair, side) = if self.rng.gen_bool(0.5) {
                    (Type::prod(ty.clone(), other), Side::Left)
                } else {
                    (Type::prod(other, ty.clone()), Side::Right)
                };
                Some(Term::Proj(side, Box::new(self.term(pi, gamma, pc, &pair, d))))
            }
            2 if protects(pi, pc, ty) => {
                let sum = Type::sum(self.ty(1), self.ty(1));
                let Type::Sum(a, b) = &sum else { unreachable!() };
                let x = self.fresh("c");
                let scrutinee = self.term(pi, gamma, pc, &sum, d);
                let left = self.term(pi, &gamma.with_var(&x, (**a).clone()), pc, ty, d);
                let right = self.term(pi, &gamma.with_var(&x, (**b).clone()), pc, ty, d);
                Some(Term::Case {
                    scrutinee: Box::new(scrutinee),
                    binder: x,
                    left: Box::new(left),
                    right: Box::new(right),
                })
            }
            3 | 4 => {
                let l = self.principal();
                let raised = pc.flow_join(&l);
                if !protects(pi, &raised, ty) {
                    return None;
                }
                let a = self.ty(1);
                let x = self.fresh("y");
                let bound = self.term(pi, gamma, pc, &Type::says(l, a.clone()), d);
                let body = self.term(pi, &gamma.with_var(&x, a), &raised, ty, d);
                Some(Term::bind(&x, bound, body))
            }
            5 => {
                let (p, q) = (self.principal(), self.principal());
                if !robust_acts_for(pi, pc, &q.voice()) || !robust_acts_for(pi, &p.conf().voice(), &q.conf().voice()) {
                    return None;
                }
                let extended = pi.with(Delegation::new(p.clone(), q.clone()));
                let body = self.term(&extended, gamma, pc, ty, d);
                Some(Term::assume(Term::Del(p, q), body))
            }
            _ => {
                let pc2 = self.principal();
                if !robust_flows_to(pi, pc, &pc2) {
                    return None;
                }
                let x = self.fresh("X");
                let mut inner = gamma.clone();
                inner.push(Binding::TyVar(x.clone()));
                let body = self.term(pi, &inner, &pc2, ty, d);
                let arg = self.ty(1);
                Some(Term::tapp(Term::tlam(&x, pc2, body), arg))
            }
        }
    }

    /// A closed term that typechecks under `pi`, with its pc and type.
    /// Gives up after `tries` candidates.
    pub fn well_typed(&mut self, pi: &Delegations, depth: usize, tries: usize) -> Option<(Principal, Term, Type)> {
        self.well_typed_in(pi, &Context::new(), depth, tries)
    }

    /// Like [`Generator::well_typed`], for terms open in `gamma`.
    pub fn well_typed_in(
        &mut self,
        pi: &Delegations,
        gamma: &Context,
        depth: usize,
        tries: usize,
    ) -> Option<(Principal, Term, Type)> {
        for _ in 0..tries {
            let pc = self.principal();
            let ty = self.ty(2);
            let e = self.term(pi, gamma, &pc, &ty, depth);
            if let Ok(t) = typecheck(pi, gamma, &pc, &e) {
                return Some((pc, e, t));
            }
        }
        None
    }

    /// A term that mentions `x : ℓ says τ`, with two closed values for `x`
    /// obtained by running generated terms. Gives up after `tries`
    /// candidates.
    pub fn bracket_case(&mut self, pi: &Delegations, depth: usize, tries: usize, fuel: usize) -> Option<BracketCase> {
        let x = "x".to_string();
        for _ in 0..tries {
            let label = self.principal();
            let input_type = Type::says(label.clone(), self.ty(1));
            let gamma = Context::new().with_var(&x, input_type.clone());
            let pc = self.principal();
            // Target types that make using `x` likely.
            let ty = match self.rng.gen_range(0..4) {
                0 => input_type.clone(),
                1 => Type::prod(input_type.clone(), self.ty(1)),
                2 => Type::says(label.clone(), self.ty(1)),
                _ => self.ty(2),
            };
            let term = self.term(pi, &gamma, &pc, &ty, depth);
            if !term.free_vars().contains(&x) {
                continue;
            }
            let Ok(ty) = typecheck(pi, &gamma, &pc, &term) else { continue };
            let mut input = || {
                let e = self.term(pi, &Context::new(), &pc, &input_type, depth.min(3));
                typecheck(pi, &Context::new(), &pc, &e).ok()?;
                let r = run(&e, fuel);
                (r.outcome == Outcome::Value).then(|| r.last().clone())
            };
            let Some(v1) = input() else { continue };
            // Prefer distinct inputs; equal ones still exercise the rules.
            let mut v2 = None;
            for _ in 0..5 {
                v2 = input();
                if v2.as_ref().is_some_and(|v| !v.alpha_eq(&v1)) {
                    break;
                }
            }
            let Some(v2) = v2 else { continue };
            return Some(BracketCase { pc, term, ty, x, input_type, label, inputs: [v1, v2] });
        }
        None
    }
}

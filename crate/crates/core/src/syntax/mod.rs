//! Abstract syntax of types and terms, concrete syntax, and substitution.

mod parse;
mod pretty;
mod subst;

use std::collections::BTreeSet;

use crate::delegation::{Delegation, Delegations};
use crate::principal::{Axis, Principal};

pub use parse::{
    parse_delegation, parse_extended, parse_principal, parse_program, parse_term, parse_type, ParseError, Program,
    Span, SpanTree,
};
pub use subst::fresh_name;

/// Which component of a pair or sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::Left => 1,
            Side::Right => 2,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Type {
    /// Evidence that the first principal acts for the second.
    ActsFor(Principal, Principal),
    Unit,
    Sum(Box<Type>, Box<Type>),
    Prod(Box<Type>, Box<Type>),
    /// Function type with the pc its body runs at.
    Fun(Box<Type>, Principal, Box<Type>),
    Says(Principal, Box<Type>),
    Var(String),
    Forall(String, Principal, Box<Type>),
}

impl Type {
    pub fn sum(a: Type, b: Type) -> Type {
        Type::Sum(Box::new(a), Box::new(b))
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    pub fn fun(a: Type, pc: Principal, b: Type) -> Type {
        Type::Fun(Box::new(a), pc, Box::new(b))
    }

    pub fn says(l: Principal, t: Type) -> Type {
        Type::Says(l, Box::new(t))
    }

    pub fn forall(x: &str, pc: Principal, t: Type) -> Type {
        Type::Forall(x.to_string(), pc, Box::new(t))
    }

    /// Projection of a type onto one axis: the labels and pcs that govern
    /// observation are projected, function arguments and the contents of a
    /// labeled value are left alone.
    pub fn project(&self, axis: Axis) -> Type {
        match self {
            Type::Fun(a, pc, b) => Type::fun((**a).clone(), pc.project(axis), b.project(axis)),
            Type::Says(l, t) => Type::says(l.project(axis), (**t).clone()),
            Type::Prod(a, b) => Type::prod(a.project(axis), b.project(axis)),
            Type::Forall(x, pc, t) => Type::forall(x, pc.project(axis), t.project(axis)),
            other => other.clone(),
        }
    }

    /// Free type variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Type::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Type::ActsFor(..) | Type::Unit => {}
            Type::Sum(a, b) | Type::Prod(a, b) | Type::Fun(a, _, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Type::Says(_, t) => t.collect_free(bound, out),
            Type::Forall(x, _, t) => {
                bound.push(x.clone());
                t.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Type equality: principals compared by normal form, bound type
    /// variables compared up to renaming.
    pub fn equiv(&self, other: &Type) -> bool {
        fn go(a: &Type, b: &Type, env: &mut Vec<(String, String)>) -> bool {
            match (a, b) {
                (Type::ActsFor(p, q), Type::ActsFor(p2, q2)) => {
                    p.normalize() == p2.normalize() && q.normalize() == q2.normalize()
                }
                (Type::Unit, Type::Unit) => true,
                (Type::Sum(a1, b1), Type::Sum(a2, b2)) | (Type::Prod(a1, b1), Type::Prod(a2, b2)) => {
                    go(a1, a2, env) && go(b1, b2, env)
                }
                (Type::Fun(a1, pc1, b1), Type::Fun(a2, pc2, b2)) => {
                    pc1.normalize() == pc2.normalize() && go(a1, a2, env) && go(b1, b2, env)
                }
                (Type::Says(l1, t1), Type::Says(l2, t2)) => l1.normalize() == l2.normalize() && go(t1, t2, env),
                (Type::Var(x), Type::Var(y)) => match env.iter().rev().find(|(l, r)| l == x || r == y) {
                    Some((l, r)) => l == x && r == y,
                    None => x == y,
                },
                (Type::Forall(x, pc1, t1), Type::Forall(y, pc2, t2)) => {
                    if pc1.normalize() != pc2.normalize() {
                        return false;
                    }
                    env.push((x.clone(), y.clone()));
                    let r = go(t1, t2, env);
                    env.pop();
                    r
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(String),
    Unit,
    Pair(Box<Term>, Box<Term>),
    Proj(Side, Box<Term>),
    /// Injection annotated with the full sum type.
    Inj(Side, Type, Box<Term>),
    Case {
        scrutinee: Box<Term>,
        binder: String,
        left: Box<Term>,
        right: Box<Term>,
    },
    Lam {
        param: String,
        ty: Type,
        pc: Principal,
        body: Box<Term>,
    },
    App(Box<Term>, Box<Term>),
    TLam {
        tvar: String,
        pc: Principal,
        body: Box<Term>,
    },
    TApp(Box<Term>, Type),
    /// Delegation value `<p |> q>`.
    Del(Principal, Principal),
    /// Protect a value at a label: `eta[l] e`.
    UnitM(Principal, Box<Term>),
    /// A value that has been protected: `sealed[l] w`.
    Sealed(Principal, Box<Term>),
    Bind {
        binder: String,
        bound: Box<Term>,
        body: Box<Term>,
    },
    Assume(Box<Term>, Box<Term>),
    /// A value carrying the delegation it was computed under.
    Where(Box<Term>, Box<Term>),
    /// Protection context `ctx[l] e`.
    ProtCtx(Principal, Box<Term>),
    /// Paired execution of two terms: `{e1 | e2}`.
    Bracket(Box<Term>, Box<Term>),
    /// A hole to be filled by an attacker.
    Hole(Type),
    /// Marker for an erased subterm in an observation.
    Opaque,
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn tapp(f: Term, t: Type) -> Term {
        Term::TApp(Box::new(f), t)
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn lam(x: &str, ty: Type, pc: Principal, body: Term) -> Term {
        Term::Lam { param: x.to_string(), ty, pc, body: Box::new(body) }
    }

    pub fn tlam(x: &str, pc: Principal, body: Term) -> Term {
        Term::TLam { tvar: x.to_string(), pc, body: Box::new(body) }
    }

    pub fn eta(l: Principal, e: Term) -> Term {
        Term::UnitM(l, Box::new(e))
    }

    pub fn sealed(l: Principal, e: Term) -> Term {
        Term::Sealed(l, Box::new(e))
    }

    pub fn bind(x: &str, e: Term, body: Term) -> Term {
        Term::Bind { binder: x.to_string(), bound: Box::new(e), body: Box::new(body) }
    }

    pub fn assume(e: Term, body: Term) -> Term {
        Term::Assume(Box::new(e), Box::new(body))
    }

    pub fn bracket(a: Term, b: Term) -> Term {
        Term::Bracket(Box::new(a), Box::new(b))
    }

    pub fn delegation(d: &Delegation) -> Term {
        Term::Del(d.superior.clone(), d.inferior.clone())
    }

    /// Immediate subterms in a fixed order used for source locations.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) | Term::Unit | Term::Del(..) | Term::Hole(_) | Term::Opaque => vec![],
            Term::Proj(_, e)
            | Term::Inj(_, _, e)
            | Term::Lam { body: e, .. }
            | Term::TLam { body: e, .. }
            | Term::TApp(e, _)
            | Term::UnitM(_, e)
            | Term::Sealed(_, e)
            | Term::ProtCtx(_, e) => vec![e],
            Term::Pair(a, b) | Term::App(a, b) | Term::Assume(a, b) | Term::Where(a, b) | Term::Bracket(a, b) => {
                vec![a, b]
            }
            Term::Bind { bound, body, .. } => vec![bound, body],
            Term::Case { scrutinee, left, right, .. } => vec![scrutinee, left, right],
        }
    }

    /// Terms a user may write: no runtime or harness forms.
    pub fn is_source_level(&self) -> bool {
        match self {
            Term::Sealed(..)
            | Term::Where(..)
            | Term::ProtCtx(..)
            | Term::Bracket(..)
            | Term::Hole(_)
            | Term::Opaque => false,
            other => other.children().iter().all(|c| c.is_source_level()),
        }
    }

    /// Values: results that do not step further on their own.
    pub fn is_value(&self) -> bool {
        match self {
            Term::Unit | Term::Del(..) | Term::Lam { .. } | Term::TLam { .. } => true,
            Term::Pair(a, b) => a.is_where_value() && b.is_where_value(),
            Term::Inj(_, _, e) | Term::Sealed(_, e) => e.is_where_value(),
            _ => false,
        }
    }

    /// Values possibly wrapped in `where` annotations or brackets.
    pub fn is_where_value(&self) -> bool {
        match self {
            Term::Where(w, v) => w.is_where_value() && v.is_value(),
            Term::Bracket(a, b) => a.is_where_value() && b.is_where_value(),
            other => other.is_value(),
        }
    }

    pub fn contains_bracket(&self) -> bool {
        matches!(self, Term::Bracket(..)) || self.children().iter().any(|c| c.contains_bracket())
    }

    pub fn contains_hole(&self) -> bool {
        matches!(self, Term::Hole(_)) || self.children().iter().any(|c| c.contains_hole())
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Project a bracketed term onto one side.
    pub fn project_side(&self, side: Side) -> Term {
        if let Term::Bracket(a, b) = self {
            return match side {
                Side::Left => a.project_side(side),
                Side::Right => b.project_side(side),
            };
        }
        self.map_children(|c| c.project_side(side))
    }

    /// Rebuild the node with every immediate subterm transformed.
    pub fn map_children(&self, mut f: impl FnMut(&Term) -> Term) -> Term {
        let mut b = |e: &Term| Box::new(f(e));
        match self {
            Term::Var(_) | Term::Unit | Term::Del(..) | Term::Hole(_) | Term::Opaque => self.clone(),
            Term::Pair(x, y) => {
                let x = b(x);
                Term::Pair(x, b(y))
            }
            Term::Proj(s, e) => Term::Proj(*s, b(e)),
            Term::Inj(s, t, e) => Term::Inj(*s, t.clone(), b(e)),
            Term::Case { scrutinee, binder, left, right } => {
                let scrutinee = b(scrutinee);
                let left = b(left);
                Term::Case { scrutinee, binder: binder.clone(), left, right: b(right) }
            }
            Term::Lam { param, ty, pc, body } => {
                Term::Lam { param: param.clone(), ty: ty.clone(), pc: pc.clone(), body: b(body) }
            }
            Term::App(x, y) => {
                let x = b(x);
                Term::App(x, b(y))
            }
            Term::TLam { tvar, pc, body } => Term::TLam { tvar: tvar.clone(), pc: pc.clone(), body: b(body) },
            Term::TApp(e, t) => Term::TApp(b(e), t.clone()),
            Term::UnitM(l, e) => Term::UnitM(l.clone(), b(e)),
            Term::Sealed(l, e) => Term::Sealed(l.clone(), b(e)),
            Term::Bind { binder, bound, body } => {
                let bound = b(bound);
                Term::Bind { binder: binder.clone(), bound, body: b(body) }
            }
            Term::Assume(x, y) => {
                let x = b(x);
                Term::Assume(x, b(y))
            }
            Term::Where(x, y) => {
                let x = b(x);
                Term::Where(x, b(y))
            }
            Term::ProtCtx(l, e) => Term::ProtCtx(l.clone(), b(e)),
            Term::Bracket(x, y) => {
                let x = b(x);
                Term::Bracket(x, b(y))
            }
        }
    }
}

/// One entry of a typing context.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Binding {
    Var(String, Type),
    TyVar(String),
}

/// Typing context. Later entries shadow earlier ones.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct Context(Vec<Binding>);

impl Context {
    pub fn new() -> Self {
        Context(Vec::new())
    }

    pub fn bindings(&self) -> &[Binding] {
        &self.0
    }

    pub fn push(&mut self, b: Binding) {
        self.0.push(b);
    }

    pub fn pop(&mut self) {
        self.0.pop();
    }

    pub fn with_var(&self, x: &str, t: Type) -> Context {
        let mut c = self.clone();
        c.push(Binding::Var(x.to_string(), t));
        c
    }

    pub fn lookup(&self, x: &str) -> Option<&Type> {
        self.0.iter().rev().find_map(|b| match b {
            Binding::Var(y, t) if y == x => Some(t),
            _ => None,
        })
    }

    pub fn has_tyvar(&self, x: &str) -> bool {
        self.0.iter().any(|b| matches!(b, Binding::TyVar(y) if y == x))
    }

    /// Term variables with their types, innermost binding first, shadowed
    /// entries removed.
    pub fn visible_vars(&self) -> Vec<(String, Type)> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for b in self.0.iter().rev() {
            if let Binding::Var(x, t) = b {
                if seen.insert(x.clone()) {
                    out.push((x.clone(), t.clone()));
                }
            }
        }
        out
    }
}

impl FromIterator<Binding> for Context {
    fn from_iter<I: IntoIterator<Item = Binding>>(iter: I) -> Self {
        Context(iter.into_iter().collect())
    }
}

/// Convenience for building delegation contexts from pairs.
pub fn delegations<I: IntoIterator<Item = (Principal, Principal)>>(pairs: I) -> Delegations {
    pairs.into_iter().map(|(p, q)| Delegation::new(p, q)).collect()
}

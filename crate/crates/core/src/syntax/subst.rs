//! Free variables, capture-avoiding substitution and canonical renaming.

use std::collections::BTreeSet;

use super::{Term, Type};

/// A variant of `base` that is not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let root = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let root = if root.is_empty() { "v" } else { root };
    (1..).map(|i| format!("{root}{i}")).find(|c| !avoid.contains(c)).expect("unbounded supply of names")
}

impl Type {
    /// Capture-avoiding substitution of a type variable.
    pub fn subst(&self, x: &str, t: &Type) -> Type {
        match self {
            Type::Var(y) if y == x => t.clone(),
            Type::Var(_) | Type::Unit | Type::ActsFor(..) => self.clone(),
            Type::Sum(a, b) => Type::sum(a.subst(x, t), b.subst(x, t)),
            Type::Prod(a, b) => Type::prod(a.subst(x, t), b.subst(x, t)),
            Type::Fun(a, pc, b) => Type::fun(a.subst(x, t), pc.clone(), b.subst(x, t)),
            Type::Says(l, a) => Type::says(l.clone(), a.subst(x, t)),
            Type::Forall(y, pc, body) => {
                if y == x {
                    return self.clone();
                }
                let ftv = t.free_vars();
                if ftv.contains(y) && body.free_vars().contains(x) {
                    let mut avoid = ftv;
                    avoid.extend(body.free_vars());
                    avoid.insert(x.to_string());
                    let y2 = fresh_name(y, &avoid);
                    let body = body.subst(y, &Type::Var(y2.clone()));
                    Type::forall(&y2, pc.clone(), body.subst(x, t))
                } else {
                    Type::forall(y, pc.clone(), body.subst(x, t))
                }
            }
        }
    }
}

impl Term {
    /// Free term variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(e: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            let under = |x: &str, body: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>| {
                bound.push(x.to_string());
                go(body, bound, out);
                bound.pop();
            };
            match e {
                Term::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Term::Lam { param, body, .. } => under(param, body, bound, out),
                Term::Case { scrutinee, binder, left, right } => {
                    go(scrutinee, bound, out);
                    under(binder, left, bound, out);
                    under(binder, right, bound, out);
                }
                Term::Bind { binder, bound: e1, body } => {
                    go(e1, bound, out);
                    under(binder, body, bound, out);
                }
                other => {
                    for c in other.children() {
                        go(c, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Free type variables, including those in annotations.
    pub fn free_type_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let own: Option<&Type> = match self {
            Term::Lam { ty, .. } | Term::Inj(_, ty, _) | Term::TApp(_, ty) | Term::Hole(ty) => Some(ty),
            _ => None,
        };
        if let Some(t) = own {
            out.extend(t.free_vars());
        }
        if let Term::TLam { tvar, body, .. } = self {
            let mut inner = body.free_type_vars();
            inner.remove(tvar);
            out.extend(inner);
            return out;
        }
        for c in self.children() {
            out.extend(c.free_type_vars());
        }
        out
    }

    /// Capture-avoiding substitution `self[x ↦ w]`.
    pub fn subst(&self, x: &str, w: &Term) -> Term {
        let fv_w = w.free_vars();
        let ftv_w = w.free_type_vars();
        self.subst_with(x, w, &fv_w, &ftv_w)
    }

    fn subst_with(&self, x: &str, w: &Term, fv_w: &BTreeSet<String>, ftv_w: &BTreeSet<String>) -> Term {
        // Rename a binder if it would capture a free variable of `w`.
        let under = |y: &str, body: &Term| -> (String, Term) {
            if y == x {
                return (y.to_string(), body.clone());
            }
            if fv_w.contains(y) && body.free_vars().contains(x) {
                let mut avoid = fv_w.clone();
                avoid.extend(body.free_vars());
                avoid.insert(x.to_string());
                let y2 = fresh_name(y, &avoid);
                let renamed = body.subst(y, &Term::Var(y2.clone()));
                (y2, renamed.subst_with(x, w, fv_w, ftv_w))
            } else {
                (y.to_string(), body.subst_with(x, w, fv_w, ftv_w))
            }
        };
        match self {
            Term::Var(y) if y == x => w.clone(),
            Term::Lam { param, ty, pc, body } => {
                let (param, body) = under(param, body);
                Term::Lam { param, ty: ty.clone(), pc: pc.clone(), body: Box::new(body) }
            }
            Term::Case { scrutinee, binder, left, right } => {
                let scrutinee = Box::new(scrutinee.subst_with(x, w, fv_w, ftv_w));
                if binder == x {
                    return Term::Case { scrutinee, binder: binder.clone(), left: left.clone(), right: right.clone() };
                }
                let mentions = left.free_vars().contains(x) || right.free_vars().contains(x);
                let (binder, left, right) = if fv_w.contains(binder) && mentions {
                    let mut avoid = fv_w.clone();
                    avoid.extend(left.free_vars());
                    avoid.extend(right.free_vars());
                    avoid.insert(x.to_string());
                    let b2 = fresh_name(binder, &avoid);
                    let v = Term::Var(b2.clone());
                    (b2, left.subst(binder, &v), right.subst(binder, &v))
                } else {
                    (binder.clone(), (**left).clone(), (**right).clone())
                };
                Term::Case {
                    scrutinee,
                    binder,
                    left: Box::new(left.subst_with(x, w, fv_w, ftv_w)),
                    right: Box::new(right.subst_with(x, w, fv_w, ftv_w)),
                }
            }
            Term::Bind { binder, bound, body } => {
                let bound = Box::new(bound.subst_with(x, w, fv_w, ftv_w));
                let (binder, body) = under(binder, body);
                Term::Bind { binder, bound, body: Box::new(body) }
            }
            Term::TLam { tvar, pc, body } => {
                if ftv_w.contains(tvar) && body.free_vars().contains(x) {
                    let mut avoid = ftv_w.clone();
                    avoid.extend(body.free_type_vars());
                    let t2 = fresh_name(tvar, &avoid);
                    let body = body.subst_type(tvar, &Type::Var(t2.clone()));
                    Term::TLam { tvar: t2, pc: pc.clone(), body: Box::new(body.subst_with(x, w, fv_w, ftv_w)) }
                } else {
                    Term::TLam {
                        tvar: tvar.clone(),
                        pc: pc.clone(),
                        body: Box::new(body.subst_with(x, w, fv_w, ftv_w)),
                    }
                }
            }
            other => other.map_children(|c| c.subst_with(x, w, fv_w, ftv_w)),
        }
    }

    /// Capture-avoiding substitution of a type variable in all annotations.
    pub fn subst_type(&self, x: &str, t: &Type) -> Term {
        match self {
            Term::Lam { param, ty, pc, body } => Term::Lam {
                param: param.clone(),
                ty: ty.subst(x, t),
                pc: pc.clone(),
                body: Box::new(body.subst_type(x, t)),
            },
            Term::Inj(s, ty, e) => Term::Inj(*s, ty.subst(x, t), Box::new(e.subst_type(x, t))),
            Term::TApp(e, ty) => Term::TApp(Box::new(e.subst_type(x, t)), ty.subst(x, t)),
            Term::Hole(ty) => Term::Hole(ty.subst(x, t)),
            Term::TLam { tvar, pc, body } => {
                if tvar == x {
                    return self.clone();
                }
                let ftv = t.free_vars();
                if ftv.contains(tvar) && body.free_type_vars().contains(x) {
                    let mut avoid = ftv;
                    avoid.extend(body.free_type_vars());
                    avoid.insert(x.to_string());
                    let t2 = fresh_name(tvar, &avoid);
                    let body = body.subst_type(tvar, &Type::Var(t2.clone()));
                    Term::TLam { tvar: t2, pc: pc.clone(), body: Box::new(body.subst_type(x, t)) }
                } else {
                    Term::TLam { tvar: tvar.clone(), pc: pc.clone(), body: Box::new(body.subst_type(x, t)) }
                }
            }
            other => other.map_children(|c| c.subst_type(x, t)),
        }
    }

    /// Rename every bound variable to a name determined by its position, so
    /// that alpha-equivalent terms become structurally equal.
    pub fn canonical(&self) -> Term {
        let mut r = Renamer::default();
        r.term(self)
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.canonical() == other.canonical()
    }
}

#[derive(Default)]
struct Renamer {
    vars: Vec<(String, String)>,
    tvars: Vec<(String, String)>,
    next: usize,
}

impl Renamer {
    fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}%{}", self.next)
    }

    fn lookup(env: &[(String, String)], x: &str) -> String {
        env.iter().rev().find(|(a, _)| a == x).map_or_else(|| x.to_string(), |(_, b)| b.clone())
    }

    fn ty(&mut self, t: &Type) -> Type {
        match t {
            Type::Var(x) => Type::Var(Self::lookup(&self.tvars, x)),
            Type::Unit => Type::Unit,
            Type::ActsFor(p, q) => Type::ActsFor(p.clone(), q.clone()),
            Type::Sum(a, b) => {
                let a = self.ty(a);
                Type::sum(a, self.ty(b))
            }
            Type::Prod(a, b) => {
                let a = self.ty(a);
                Type::prod(a, self.ty(b))
            }
            Type::Fun(a, pc, b) => {
                let a = self.ty(a);
                Type::fun(a, pc.clone(), self.ty(b))
            }
            Type::Says(l, a) => Type::says(l.clone(), self.ty(a)),
            Type::Forall(x, pc, body) => {
                let n = self.fresh("T");
                self.tvars.push((x.clone(), n.clone()));
                let body = self.ty(body);
                self.tvars.pop();
                Type::forall(&n, pc.clone(), body)
            }
        }
    }

    fn under_var(&mut self, x: &str, body: &Term) -> (String, Term) {
        let n = self.fresh("x");
        self.vars.push((x.to_string(), n.clone()));
        let body = self.term(body);
        self.vars.pop();
        (n, body)
    }

    fn term(&mut self, e: &Term) -> Term {
        match e {
            Term::Var(x) => Term::Var(Self::lookup(&self.vars, x)),
            Term::Lam { param, ty, pc, body } => {
                let ty = self.ty(ty);
                let (param, body) = self.under_var(param, body);
                Term::Lam { param, ty, pc: pc.clone(), body: Box::new(body) }
            }
            Term::Case { scrutinee, binder, left, right } => {
                let scrutinee = Box::new(self.term(scrutinee));
                let n = self.fresh("x");
                self.vars.push((binder.clone(), n.clone()));
                let left = Box::new(self.term(left));
                let right = Box::new(self.term(right));
                self.vars.pop();
                Term::Case { scrutinee, binder: n, left, right }
            }
            Term::Bind { binder, bound, body } => {
                let bound = Box::new(self.term(bound));
                let (binder, body) = self.under_var(binder, body);
                Term::Bind { binder, bound, body: Box::new(body) }
            }
            Term::TLam { tvar, pc, body } => {
                let n = self.fresh("T");
                self.tvars.push((tvar.clone(), n.clone()));
                let body = self.term(body);
                self.tvars.pop();
                Term::TLam { tvar: n, pc: pc.clone(), body: Box::new(body) }
            }
            Term::Inj(s, t, b) => {
                let t = self.ty(t);
                Term::Inj(*s, t, Box::new(self.term(b)))
            }
            Term::TApp(b, t) => {
                let b = self.term(b);
                Term::TApp(Box::new(b), self.ty(t))
            }
            Term::Hole(t) => Term::Hole(self.ty(t)),
            other => other.map_children(|c| self.term(c)),
        }
    }
}

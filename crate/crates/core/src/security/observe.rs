//! What a principal can see of a term or a trace.

use crate::delegation::{robust_flows_to, Delegations};
use crate::principal::{Axis, Principal};
use crate::syntax::Term;

/// An observer: principal `p` looking along one axis under `Π`.
#[derive(Clone, Copy, Debug)]
pub struct Observer<'a> {
    pub pi: &'a Delegations,
    pub p: &'a Principal,
    pub axis: Axis,
}

impl<'a> Observer<'a> {
    pub fn new(pi: &'a Delegations, p: &'a Principal, axis: Axis) -> Self {
        Observer { pi, p, axis }
    }

    fn sees(&self, l: &Principal) -> bool {
        robust_flows_to(self.pi, &l.project(self.axis), &self.p.project(self.axis))
    }

    /// Erase the parts of `e` this observer may not see, replacing them with
    /// the opaque marker.
    pub fn term(&self, e: &Term) -> Term {
        let o = |e: &Term| self.term(e);
        let opaque = Term::Opaque;
        match e {
            Term::Var(_) | Term::Unit | Term::Del(..) | Term::Hole(_) | Term::Opaque => e.clone(),
            Term::UnitM(l, body) => Term::UnitM(l.clone(), Box::new(o(body))),
            Term::Sealed(l, _) | Term::ProtCtx(l, _) if !self.sees(l) => opaque,
            Term::Lam { pc, .. } | Term::TLam { pc, .. } if !self.sees(pc) => opaque,
            Term::Sealed(..) | Term::ProtCtx(..) | Term::Lam { .. } | Term::TLam { .. } => e.map_children(o),
            Term::App(..) | Term::Pair(..) | Term::Inj(..) | Term::TApp(..) | Term::Bracket(..) => {
                let seen = e.map_children(o);
                if seen.children().iter().any(|c| matches!(c, Term::Opaque)) {
                    opaque
                } else {
                    seen
                }
            }
            Term::Proj(..) | Term::Case { .. } | Term::Bind { .. } => e.map_children(o),
            Term::Assume(..) => {
                let seen = e.map_children(o);
                if seen.children().iter().all(|c| matches!(c, Term::Opaque)) {
                    opaque
                } else {
                    seen
                }
            }
            Term::Where(body, _) => o(body),
        }
    }

    /// Observe every element of a trace and drop adjacent duplicates.
    /// Elements are put in canonical form so that comparison is up to
    /// renaming of bound variables.
    pub fn trace<'t>(&self, trace: impl IntoIterator<Item = &'t Term>) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        for e in trace {
            let seen = self.term(e).canonical();
            if out.last() != Some(&seen) {
                out.push(seen);
            }
        }
        out
    }

    /// Trace indistinguishability.
    pub fn equivalent(&self, t1: &[Term], t2: &[Term]) -> bool {
        self.trace(t1) == self.trace(t2)
    }
}

pub fn observe(e: &Term, pi: &Delegations, p: &Principal, axis: Axis) -> Term {
    Observer::new(pi, p, axis).term(e)
}

pub fn observe_trace(t: &[Term], pi: &Delegations, p: &Principal, axis: Axis) -> Vec<Term> {
    Observer::new(pi, p, axis).trace(t)
}

pub fn trace_equiv(t1: &[Term], t2: &[Term], pi: &Delegations, p: &Principal, axis: Axis) -> bool {
    Observer::new(pi, p, axis).equivalent(t1, t2)
}

/// Project every element of a trace onto one side and drop the adjacent
/// duplicates left behind by steps on the other side.
pub fn project_trace(t: &[Term], side: crate::syntax::Side) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for e in t {
        let p = e.project_side(side).canonical();
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    out
}

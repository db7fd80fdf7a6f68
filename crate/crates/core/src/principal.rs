//! Principals and their canonical normal form.
//!
//! A principal denotes a pair of elements of free distributive lattices over
//! the primitive names: one confidentiality component and one integrity
//! component. `p /\ q` combines authority (lattice join in both components),
//! `p \/ q` keeps only shared authority (lattice meet), and the projections
//! `p->` / `p<-` keep one component and drop the other to the bottom.
//!
//! Each component is kept as a disjunction of conjunction clauses with the
//! clause set reduced to an antichain, which makes equality of normal forms
//! coincide with equivalence in the static acts-for order.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

/// A primitive principal name such as `Alice`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One of the two authority components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    Conf,
    Integ,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::Conf, Axis::Integ];

    pub fn arrow(self) -> &'static str {
        match self {
            Axis::Conf => "->",
            Axis::Integ => "<-",
        }
    }
}

/// Principal expressions as written by users.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Principal {
    Name(Name),
    Top,
    Bot,
    /// Confidentiality projection `p->`.
    Conf(Box<Principal>),
    /// Integrity projection `p<-`.
    Integ(Box<Principal>),
    /// Conjunction `p /\ q`: the authority of both.
    And(Box<Principal>, Box<Principal>),
    /// Disjunction `p \/ q`: the authority common to both.
    Or(Box<Principal>, Box<Principal>),
}

impl Principal {
    pub fn name(s: &str) -> Self {
        Principal::Name(Name::new(s))
    }

    pub fn conf(&self) -> Self {
        Principal::Conf(Box::new(self.clone()))
    }

    pub fn integ(&self) -> Self {
        Principal::Integ(Box::new(self.clone()))
    }

    pub fn project(&self, axis: Axis) -> Self {
        match axis {
            Axis::Conf => self.conf(),
            Axis::Integ => self.integ(),
        }
    }

    pub fn and(&self, other: &Principal) -> Self {
        Principal::And(Box::new(self.clone()), Box::new(other.clone()))
    }

    pub fn or(&self, other: &Principal) -> Self {
        Principal::Or(Box::new(self.clone()), Box::new(other.clone()))
    }

    /// Least upper bound in the information-flow order.
    pub fn flow_join(&self, other: &Principal) -> Self {
        self.and(other).conf().and(&self.or(other).integ())
    }

    /// Greatest lower bound in the information-flow order.
    pub fn flow_meet(&self, other: &Principal) -> Self {
        self.or(other).conf().and(&self.and(other).integ())
    }

    /// Greatest element of the flow order: secret and untrusted.
    pub fn flow_top() -> Self {
        Principal::Top.conf().and(&Principal::Bot.integ())
    }

    /// Least element of the flow order: public and trusted.
    pub fn flow_bottom() -> Self {
        Principal::Bot.conf().and(&Principal::Top.integ())
    }

    /// The voice of a principal: the integrity needed to speak for it.
    pub fn voice(&self) -> Self {
        let nf = self.normalize();
        NormalForm { conf: Component::bot(), integ: nf.conf.and(&nf.integ) }.to_principal()
    }

    /// The view of a principal: the confidentiality matching its integrity.
    pub fn view(&self) -> Self {
        let nf = self.normalize();
        NormalForm { conf: nf.conf.and(&nf.integ), integ: Component::bot() }.to_principal()
    }

    /// All primitive names occurring in the expression.
    pub fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    pub fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Principal::Name(n) => {
                out.insert(n.clone());
            }
            Principal::Top | Principal::Bot => {}
            Principal::Conf(p) | Principal::Integ(p) => p.collect_names(out),
            Principal::And(p, q) | Principal::Or(p, q) => {
                p.collect_names(out);
                q.collect_names(out);
            }
        }
    }

    /// Canonical normal form. Results are cached per thread.
    pub fn normalize(&self) -> NormalForm {
        thread_local! {
            static CACHE: RefCell<HashMap<Principal, NormalForm>> = RefCell::new(HashMap::new());
        }
        if let Some(hit) = CACHE.with(|c| c.borrow().get(self).cloned()) {
            return hit;
        }
        let nf = self.normalize_uncached();
        CACHE.with(|c| {
            let mut c = c.borrow_mut();
            if c.len() > 1 << 16 {
                c.clear();
            }
            c.insert(self.clone(), nf.clone());
        });
        nf
    }

    fn normalize_uncached(&self) -> NormalForm {
        match self {
            Principal::Name(n) => NormalForm { conf: Component::atom(n.clone()), integ: Component::atom(n.clone()) },
            Principal::Top => NormalForm { conf: Component::top(), integ: Component::top() },
            Principal::Bot => NormalForm { conf: Component::bot(), integ: Component::bot() },
            Principal::Conf(p) => NormalForm { conf: p.normalize().conf, integ: Component::bot() },
            Principal::Integ(p) => NormalForm { conf: Component::bot(), integ: p.normalize().integ },
            Principal::And(p, q) => {
                let (a, b) = (p.normalize(), q.normalize());
                NormalForm { conf: a.conf.and(&b.conf), integ: a.integ.and(&b.integ) }
            }
            Principal::Or(p, q) => {
                let (a, b) = (p.normalize(), q.normalize());
                NormalForm { conf: a.conf.or(&b.conf), integ: a.integ.or(&b.integ) }
            }
        }
    }

    /// The canonical representative of this principal's equivalence class.
    pub fn canonical(&self) -> Principal {
        self.normalize().to_principal()
    }

    fn precedence(&self) -> u8 {
        match self {
            Principal::Or(..) => 1,
            Principal::And(..) => 2,
            Principal::Conf(_) | Principal::Integ(_) => 3,
            _ => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Principal::Name(n) => write!(f, "{n}"),
            Principal::Top => f.write_str("top"),
            Principal::Bot => f.write_str("bot"),
            Principal::Conf(p) => {
                p.fmt_at(f, 3)?;
                f.write_str("->")
            }
            Principal::Integ(p) => {
                p.fmt_at(f, 3)?;
                f.write_str("<-")
            }
            Principal::And(p, q) => {
                p.fmt_at(f, 2)?;
                f.write_str(" /\\ ")?;
                q.fmt_at(f, 3)
            }
            Principal::Or(p, q) => {
                p.fmt_at(f, 1)?;
                f.write_str(" \\/ ")?;
                q.fmt_at(f, 2)
            }
        }
    }
}

impl fmt::Display for Principal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl fmt::Debug for Principal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// One component of a normal form: a disjunction of conjunction clauses.
///
/// The empty disjunction is the top element and the disjunction holding only
/// the empty clause is the bottom element. Clauses form an antichain: a clause
/// containing another one is absorbed by it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Component {
    clauses: BTreeSet<BTreeSet<Name>>,
}

impl Component {
    pub fn top() -> Self {
        Component { clauses: BTreeSet::new() }
    }

    pub fn bot() -> Self {
        Component { clauses: BTreeSet::from([BTreeSet::new()]) }
    }

    pub fn atom(n: Name) -> Self {
        Component { clauses: BTreeSet::from([BTreeSet::from([n])]) }
    }

    pub fn from_clauses(clauses: impl IntoIterator<Item = BTreeSet<Name>>) -> Self {
        Component::minimize(clauses.into_iter().collect())
    }

    pub fn clauses(&self) -> &BTreeSet<BTreeSet<Name>> {
        &self.clauses
    }

    pub fn is_top(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_bot(&self) -> bool {
        self.clauses.iter().any(BTreeSet::is_empty)
    }

    fn minimize(clauses: BTreeSet<BTreeSet<Name>>) -> Self {
        let kept = clauses.iter().filter(|c| !clauses.iter().any(|d| d != *c && d.is_subset(c))).cloned().collect();
        Component { clauses: kept }
    }

    /// Conjunction (more authority).
    pub fn and(&self, other: &Component) -> Component {
        let mut out = BTreeSet::new();
        for a in &self.clauses {
            for b in &other.clauses {
                out.insert(a.union(b).cloned().collect());
            }
        }
        Component::minimize(out)
    }

    /// Disjunction (shared authority).
    pub fn or(&self, other: &Component) -> Component {
        Component::minimize(self.clauses.union(&other.clauses).cloned().collect())
    }

    /// Lattice order: `self` has at least the authority of `other`.
    pub fn geq(&self, other: &Component) -> bool {
        self.clauses.iter().all(|a| other.clauses.iter().any(|b| b.is_subset(a)))
    }

    /// Value under a two-valued interpretation of the names.
    pub fn eval(&self, holds: impl Fn(&Name) -> bool) -> bool {
        self.clauses.iter().all(|c| c.iter().any(&holds))
    }

    fn to_expr(&self) -> Principal {
        if self.is_top() {
            return Principal::Top;
        }
        if self.is_bot() {
            return Principal::Bot;
        }
        let clause = |c: &BTreeSet<Name>| {
            c.iter()
                .map(|n| Principal::Name(n.clone()))
                .reduce(|a, b| Principal::And(Box::new(a), Box::new(b)))
                .expect("non-empty clause")
        };
        self.clauses
            .iter()
            .map(clause)
            .reduce(|a, b| Principal::Or(Box::new(a), Box::new(b)))
            .expect("non-empty component")
    }
}

/// Canonical form of a principal: one component per axis.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NormalForm {
    pub conf: Component,
    pub integ: Component,
}

impl NormalForm {
    pub fn component(&self, axis: Axis) -> &Component {
        match axis {
            Axis::Conf => &self.conf,
            Axis::Integ => &self.integ,
        }
    }

    pub fn geq(&self, other: &NormalForm) -> bool {
        self.conf.geq(&other.conf) && self.integ.geq(&other.integ)
    }

    /// Rebuild a principal expression in canonical shape.
    pub fn to_principal(&self) -> Principal {
        match (self.conf.is_bot(), self.integ.is_bot()) {
            (true, true) => return Principal::Bot,
            _ if self.conf == self.integ => return self.conf.to_expr(),
            _ => {}
        }
        let conf = (!self.conf.is_bot()).then(|| self.conf.to_expr().conf());
        let integ = (!self.integ.is_bot()).then(|| self.integ.to_expr().integ());
        match (conf, integ) {
            (Some(c), Some(i)) => c.and(&i),
            (Some(c), None) => c,
            (None, Some(i)) => i,
            (None, None) => Principal::Bot,
        }
    }
}

/// Static acts-for: `p` has at least the authority of `q` with no delegations.
pub fn static_acts_for(p: &Principal, q: &Principal) -> bool {
    p.normalize().geq(&q.normalize())
}

/// Static equivalence of principals.
pub fn static_equiv(p: &Principal, q: &Principal) -> bool {
    p.normalize() == q.normalize()
}

/// Static information flow `p ⊑ q`.
pub fn static_flows_to(p: &Principal, q: &Principal) -> bool {
    static_acts_for(&p.integ().and(&q.conf()), &q.integ().and(&p.conf()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Principal {
        Principal::name(s)
    }

    #[test]
    fn projection_identities() {
        let p = n("p");
        assert!(static_equiv(&p.integ().conf(), &Principal::Bot));
        assert!(static_equiv(&p.conf().integ(), &Principal::Bot));
        assert!(static_equiv(&p.conf().and(&p.integ()), &p));
        assert!(static_equiv(&p.or(&Principal::Bot), &Principal::Bot));
        assert!(static_equiv(&p.and(&Principal::Top), &Principal::Top));
    }

    #[test]
    fn canonical_printing() {
        let a = n("Alice");
        assert_eq!(a.conf().and(&a.integ()).canonical().to_string(), "Alice");
        assert_eq!(a.integ().conf().canonical().to_string(), "bot");
        let b = n("Bob");
        assert_eq!(a.conf().and(&b.integ()).view().to_string(), "(Alice /\\ Bob)->");
        assert_eq!(b.integ().view().to_string(), "Bob->");
        assert_eq!(Principal::Top.view().to_string(), "top->");
    }
}

//! Delegation contexts and robust authority judgments.
//!
//! A delegation `<p |> q>` lets `p` act for `q`. A delegation is usable only
//! if the voice of `p->` acts for the voice of `q->` under the usable
//! delegations; the usable subset is the least fixed point of that condition.
//!
//! Judgments are decided semantically. The principal algebra is a product of
//! two free distributive lattices, so a judgment holds in the quotient by the
//! usable delegations exactly when it holds under every two-valued
//! interpretation that picks one axis, assigns truth values to the names and
//! respects every usable delegation. The interpretations are enumerated
//! over the finite set of names in scope.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::principal::{Axis, Component, Name, NormalForm, Principal};

/// Largest number of distinct names a single judgment may mention.
pub const MAX_NAMES: usize = 20;

/// Default bound on the atom set used by [`subtract`].
pub const DEFAULT_FACTOR_BOUND: usize = 6;

/// A delegation `<superior |> inferior>`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Delegation {
    pub superior: Principal,
    pub inferior: Principal,
}

impl Delegation {
    pub fn new(superior: Principal, inferior: Principal) -> Self {
        Delegation { superior, inferior }
    }
}

impl fmt::Display for Delegation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |> {}", self.superior, self.inferior)
    }
}

impl fmt::Debug for Delegation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{self}>")
    }
}

/// An ordered delegation context.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct Delegations(Vec<Delegation>);

impl Delegations {
    pub fn new() -> Self {
        Delegations(Vec::new())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Delegation> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, d: Delegation) {
        self.0.push(d);
    }

    /// A copy of the context extended with one more delegation.
    pub fn with(&self, d: Delegation) -> Self {
        let mut out = self.clone();
        out.push(d);
        out
    }

    pub fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for d in &self.0 {
            d.superior.collect_names(&mut out);
            d.inferior.collect_names(&mut out);
        }
        out
    }
}

impl FromIterator<Delegation> for Delegations {
    fn from_iter<I: IntoIterator<Item = Delegation>>(iter: I) -> Self {
        Delegations(iter.into_iter().collect())
    }
}

impl fmt::Display for Delegations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("candidate space exceeded: {atoms} atoms, bound is {bound}")]
    CandidateSpaceExceeded { atoms: usize, bound: usize },
}

/// A component compiled to clause bitmasks over a fixed name index.
#[derive(Clone)]
struct Compiled {
    conf: Vec<u64>,
    integ: Vec<u64>,
}

impl Compiled {
    fn new(nf: &NormalForm, index: &HashMap<Name, usize>) -> Self {
        let masks =
            |c: &Component| c.clauses().iter().map(|cl| cl.iter().fold(0u64, |m, n| m | (1 << index[n]))).collect();
        Compiled { conf: masks(&nf.conf), integ: masks(&nf.integ) }
    }

    fn holds(&self, axis: Axis, sigma: u64) -> bool {
        let clauses = match axis {
            Axis::Conf => &self.conf,
            Axis::Integ => &self.integ,
        };
        clauses.iter().all(|m| m & sigma != 0)
    }
}

/// The usable part of a delegation context over a fixed set of names,
/// together with all interpretations respecting it.
pub struct Theory {
    names: Vec<Name>,
    index: HashMap<Name, usize>,
    usable: Vec<Delegation>,
    models: [Vec<u64>; 2],
}

impl Theory {
    /// Build the theory of `pi` over its names plus the names of `extra`.
    ///
    /// # Panics
    /// If more than [`MAX_NAMES`] distinct names are involved.
    pub fn new<'a>(pi: &Delegations, extra: impl IntoIterator<Item = &'a Principal>) -> Self {
        let mut set = pi.names();
        for p in extra {
            p.collect_names(&mut set);
        }
        assert!(set.len() <= MAX_NAMES, "authority judgment mentions {} names, limit is {MAX_NAMES}", set.len());
        let names: Vec<Name> = set.into_iter().collect();
        let index: HashMap<Name, usize> = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let compiled: Vec<(Compiled, Compiled)> = pi
            .iter()
            .map(|d| (Compiled::new(&d.superior.normalize(), &index), Compiled::new(&d.inferior.normalize(), &index)))
            .collect();
        let space = 1u64 << names.len();

        let entails = |used: &[usize], p: &Compiled, q: &Compiled| {
            Axis::BOTH.iter().all(|&axis| {
                (0..space).all(|sigma| {
                    let respects = used.iter().all(|&k| {
                        let (sup, inf) = &compiled[k];
                        !inf.holds(axis, sigma) || sup.holds(axis, sigma)
                    });
                    !respects || !q.holds(axis, sigma) || p.holds(axis, sigma)
                })
            })
        };

        let voices: Vec<(Compiled, Compiled)> = pi
            .iter()
            .map(|d| {
                (
                    Compiled::new(&d.superior.conf().voice().normalize(), &index),
                    Compiled::new(&d.inferior.conf().voice().normalize(), &index),
                )
            })
            .collect();
        let mut used: Vec<usize> = Vec::new();
        loop {
            let before = used.len();
            for (k, (sup, inf)) in voices.iter().enumerate() {
                if !used.contains(&k) && entails(&used, sup, inf) {
                    used.push(k);
                }
            }
            if used.len() == before {
                break;
            }
        }
        used.sort_unstable();

        let models_for = |axis: Axis| {
            (0..space)
                .filter(|&sigma| {
                    used.iter().all(|&k| {
                        let (sup, inf) = &compiled[k];
                        !inf.holds(axis, sigma) || sup.holds(axis, sigma)
                    })
                })
                .collect::<Vec<u64>>()
        };
        let models = [models_for(Axis::Conf), models_for(Axis::Integ)];
        let usable = used.iter().map(|&k| pi.0[k].clone()).collect();
        Theory { names, index, usable, models }
    }

    pub fn usable(&self) -> &[Delegation] {
        &self.usable
    }

    fn compile(&self, p: &Principal) -> Compiled {
        Compiled::new(&p.normalize(), &self.index)
    }

    /// `p` acts for `q` under the usable delegations.
    pub fn acts_for(&self, p: &Principal, q: &Principal) -> bool {
        let (cp, cq) = (self.compile(p), self.compile(q));
        Axis::BOTH
            .iter()
            .zip(&self.models)
            .all(|(&axis, models)| models.iter().all(|&s| !cq.holds(axis, s) || cp.holds(axis, s)))
    }

    /// The least `r` with `q ≡ (p \/ q) /\ r`, built from the up-closure of
    /// the interpretations where `q` holds and `p` does not.
    fn gap(&self, q: &Principal, p: &Principal) -> Principal {
        let (cp, cq) = (self.compile(p), self.compile(q));
        let mut parts = NormalForm { conf: Component::bot(), integ: Component::bot() };
        for (&axis, models) in Axis::BOTH.iter().zip(&self.models) {
            let mut acc = Component::bot();
            for &sigma in models {
                if cq.holds(axis, sigma) && !cp.holds(axis, sigma) {
                    let upset = self
                        .names
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| sigma & (1 << i) != 0)
                        .map(|(_, n)| Component::atom(n.clone()))
                        .fold(Component::top(), |a, b| a.or(&b));
                    acc = acc.and(&upset);
                }
            }
            match axis {
                Axis::Conf => parts.conf = acc,
                Axis::Integ => parts.integ = acc,
            }
        }
        parts.to_principal()
    }
}

thread_local! {
    static JUDGMENTS: RefCell<HashMap<(Delegations, Principal, Principal), bool>> =
        RefCell::new(HashMap::new());
}

/// Delegations of `pi` that satisfy the usability condition.
pub fn usable(pi: &Delegations) -> Vec<Delegation> {
    Theory::new(pi, []).usable().to_vec()
}

/// Robust acts-for `pi ⊩ p ≽ q`.
pub fn robust_acts_for(pi: &Delegations, p: &Principal, q: &Principal) -> bool {
    let key = (pi.clone(), p.clone(), q.clone());
    if let Some(hit) = JUDGMENTS.with(|c| c.borrow().get(&key).copied()) {
        return hit;
    }
    let answer = Theory::new(pi, [p, q]).acts_for(p, q);
    JUDGMENTS.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() > 1 << 16 {
            c.clear();
        }
        c.insert(key, answer);
    });
    answer
}

/// Robust equivalence.
pub fn robust_equiv(pi: &Delegations, p: &Principal, q: &Principal) -> bool {
    robust_acts_for(pi, p, q) && robust_acts_for(pi, q, p)
}

/// Robust information flow `pi ⊩ p ⊑ q`.
pub fn robust_flows_to(pi: &Delegations, p: &Principal, q: &Principal) -> bool {
    robust_acts_for(pi, &p.integ().and(&q.conf()), &q.integ().and(&p.conf()))
}

/// Principal subtraction `q - p`: the part of `q` not already covered by `p`.
///
/// Returns the least `r` such that `q` is equivalent to `(p \/ q) /\ r` under
/// the usable delegations of `pi`.
pub fn subtract(pi: &Delegations, q: &Principal, p: &Principal, bound: usize) -> Result<Principal, FactorError> {
    let mut atoms = pi.names();
    p.collect_names(&mut atoms);
    q.collect_names(&mut atoms);
    if atoms.len() > bound {
        return Err(FactorError::CandidateSpaceExceeded { atoms: atoms.len(), bound });
    }
    Ok(Theory::new(pi, [p, q]).gap(q, p))
}

//! Independent oracles for the principal algebra and robust judgments.
//!
//! A principal over `n` names is evaluated per axis as a monotone boolean
//! function of the `2^n` atom assignments (truth table as a bitmask).
//! Conjunction is pointwise "or", disjunction pointwise "and". Robust
//! acts-for is decided by forward-chaining the robust rules (static,
//! assumption, conjunction on the right, disjunction on the left,
//! transitivity) over every normal form on the names of the query.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use flac::delegation::{Delegation, Delegations};
use flac::principal::Principal;
use proptest::prelude::*;

/// Truth tables of the two components.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Tt {
    pub conf: u64,
    pub integ: u64,
}

impl Tt {
    pub fn geq(self, o: Tt) -> bool {
        o.conf & !self.conf == 0 && o.integ & !self.integ == 0
    }
    fn and(self, o: Tt) -> Tt {
        Tt { conf: self.conf | o.conf, integ: self.integ | o.integ }
    }
    fn or(self, o: Tt) -> Tt {
        Tt { conf: self.conf & o.conf, integ: self.integ & o.integ }
    }
}

pub struct Names(Vec<String>);

impl Names {
    pub fn of<'a>(ps: impl IntoIterator<Item = &'a Principal>) -> Names {
        let mut set = BTreeSet::new();
        for p in ps {
            collect(p, &mut set);
        }
        assert!(set.len() <= 4, "oracle limited to four names");
        Names(set.into_iter().collect())
    }

    pub fn from(names: &[&str]) -> Names {
        Names(names.iter().map(|s| s.to_string()).collect())
    }

    fn rows(&self) -> usize {
        1 << self.0.len()
    }

    fn full(&self) -> u64 {
        if self.rows() == 64 {
            u64::MAX
        } else {
            (1u64 << self.rows()) - 1
        }
    }

    /// Truth table of `p`.
    pub fn tt(&self, p: &Principal) -> Tt {
        let mut t = Tt { conf: 0, integ: 0 };
        for a in 0..self.rows() {
            if self.eval(p, true, a) {
                t.conf |= 1 << a;
            }
            if self.eval(p, false, a) {
                t.integ |= 1 << a;
            }
        }
        t
    }

    fn eval(&self, p: &Principal, conf: bool, a: usize) -> bool {
        match p {
            Principal::Name(n) => {
                let i = self.0.iter().position(|m| m == n.as_str()).expect("name in universe");
                a >> i & 1 == 1
            }
            Principal::Top => true,
            Principal::Bot => false,
            Principal::Conf(q) => conf && self.eval(q, conf, a),
            Principal::Integ(q) => !conf && self.eval(q, conf, a),
            Principal::And(x, y) => self.eval(x, conf, a) || self.eval(y, conf, a),
            Principal::Or(x, y) => self.eval(x, conf, a) && self.eval(y, conf, a),
        }
    }

    /// All monotone truth tables over the names.
    fn monotone(&self) -> Vec<u64> {
        let rows = self.rows();
        let mut out = Vec::new();
        let limit: u64 = if rows == 64 { panic!("too many names") } else { 1 << rows };
        for f in 0..limit {
            let monotone = (0..rows).all(|a| f >> a & 1 == 0 || (0..rows).all(|b| b & a != a || f >> b & 1 == 1));
            if monotone {
                out.push(f);
            }
        }
        out
    }

    /// Every normal form over the names, up to static equivalence.
    pub fn universe(&self) -> Vec<Tt> {
        let m = self.monotone();
        m.iter().flat_map(|&c| m.iter().map(move |&i| Tt { conf: c, integ: i })).collect()
    }

    /// A principal expression with truth table `t`.
    pub fn principal(&self, t: Tt) -> Principal {
        let c = self.component(t.conf).conf();
        let i = self.component(t.integ).integ();
        c.and(&i)
    }

    fn component(&self, f: u64) -> Principal {
        if f == self.full() {
            return Principal::Top;
        }
        let rows = self.rows();
        let minimal: Vec<usize> = (0..rows)
            .filter(|&a| f >> a & 1 == 1 && (0..rows).all(|b| b == a || b & a != b || f >> b & 1 == 0))
            .collect();
        minimal
            .into_iter()
            .map(|a| {
                (0..self.0.len())
                    .filter(|i| a >> i & 1 == 1)
                    .map(|i| Principal::name(&self.0[i]))
                    .reduce(|x, y| x.or(&y))
                    .unwrap_or(Principal::Top)
            })
            .reduce(|x, y| x.and(&y))
            .unwrap_or(Principal::Bot)
    }
}

fn collect(p: &Principal, out: &mut BTreeSet<String>) {
    match p {
        Principal::Name(n) => {
            out.insert(n.as_str().to_string());
        }
        Principal::Top | Principal::Bot => {}
        Principal::Conf(q) | Principal::Integ(q) => collect(q, out),
        Principal::And(x, y) | Principal::Or(x, y) => {
            collect(x, out);
            collect(y, out);
        }
    }
}

/// Brute-force static acts-for.
pub fn truth_acts_for(p: &Principal, q: &Principal) -> bool {
    let names = Names::of([p, q]);
    names.tt(p).geq(names.tt(q))
}

/// The acts-for relation derivable from a delegation context by forward
/// chaining the robust rules over a finite universe.
pub struct RuleSearch {
    names: Names,
    elems: Vec<Tt>,
    index: HashMap<Tt, usize>,
    rel: Vec<Vec<bool>>,
}

impl RuleSearch {
    pub fn new<'a>(pi: &'a Delegations, extra: impl IntoIterator<Item = &'a Principal>) -> RuleSearch {
        let mut all: Vec<&Principal> = pi.iter().flat_map(|d| [&d.superior, &d.inferior]).collect();
        all.extend(extra);
        let names = Names::of(all);
        let elems = names.universe();
        let index = elems.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let n = elems.len();
        let rel = (0..n).map(|i| (0..n).map(|j| elems[i].geq(elems[j])).collect()).collect();
        let mut s = RuleSearch { names, elems, index, rel };
        let mut usable = vec![false; pi.len()];
        loop {
            s.saturate();
            let mut grew = false;
            for (k, d) in pi.iter().enumerate() {
                if !usable[k] && s.holds(&d.superior.conf().voice(), &d.inferior.conf().voice()) {
                    usable[k] = true;
                    grew = true;
                    let (a, b) = (s.idx(&d.superior), s.idx(&d.inferior));
                    s.rel[a][b] = true;
                }
            }
            if !grew {
                return s;
            }
        }
    }

    fn idx(&self, p: &Principal) -> usize {
        self.index[&self.names.tt(p)]
    }

    fn saturate(&mut self) {
        let n = self.elems.len();
        loop {
            let mut changed = false;
            for k in 0..n {
                for i in 0..n {
                    if self.rel[i][k] {
                        for j in 0..n {
                            if self.rel[k][j] && !self.rel[i][j] {
                                self.rel[i][j] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
            for p in 0..n {
                let below: Vec<usize> = (0..n).filter(|&q| self.rel[p][q]).collect();
                for &a in &below {
                    for &b in &below {
                        let c = self.index[&self.elems[a].and(self.elems[b])];
                        if !self.rel[p][c] {
                            self.rel[p][c] = true;
                            changed = true;
                        }
                    }
                }
            }
            for q in 0..n {
                let above: Vec<usize> = (0..n).filter(|&p| self.rel[p][q]).collect();
                for &a in &above {
                    for &b in &above {
                        let c = self.index[&self.elems[a].or(self.elems[b])];
                        if !self.rel[c][q] {
                            self.rel[c][q] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    pub fn holds(&self, p: &Principal, q: &Principal) -> bool {
        self.rel[self.idx(p)][self.idx(q)]
    }

    pub fn equiv(&self, p: &Principal, q: &Principal) -> bool {
        self.holds(p, q) && self.holds(q, p)
    }

    /// `q - p` by enumerating every `r` with `q ≡ (p ∨ q) ∧ r` and taking
    /// their disjunction.
    pub fn gap(&self, q: &Principal, p: &Principal) -> Principal {
        let base = p.or(q);
        let d: Vec<Tt> =
            self.elems.iter().copied().filter(|&r| self.equiv(q, &base.and(&self.names.principal(r)))).collect();
        let join = d.into_iter().reduce(|a, b| a.or(b)).expect("q itself is a candidate");
        self.names.principal(join)
    }
}

/// Every normal form over two names `a` and `b`.
pub fn two_name_normal_forms() -> Vec<Principal> {
    let names = Names::from(&["a", "b"]);
    names.universe().into_iter().map(|t| names.principal(t)).collect()
}

/// Principals over at most three names with at most four nested operators.
pub fn arb_principal() -> impl Strategy<Value = Principal> {
    let leaf = prop_oneof![
        1 => Just(Principal::Top),
        1 => Just(Principal::Bot),
        6 => prop::sample::select(vec!["a", "b", "c"]).prop_map(Principal::name),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|p| p.conf()),
            inner.clone().prop_map(|p| p.integ()),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| p.and(&q)),
            (inner.clone(), inner).prop_map(|(p, q)| p.or(&q)),
        ]
    })
}

/// Principals over two names, for delegation contexts.
pub fn arb_small_principal() -> impl Strategy<Value = Principal> {
    let leaf = prop_oneof![
        1 => Just(Principal::Top),
        1 => Just(Principal::Bot),
        6 => prop::sample::select(vec!["a", "b"]).prop_map(Principal::name),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|p| p.conf()),
            inner.clone().prop_map(|p| p.integ()),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| p.and(&q)),
            (inner.clone(), inner).prop_map(|(p, q)| p.or(&q)),
        ]
    })
}

pub fn arb_delegations() -> impl Strategy<Value = Delegations> {
    prop::collection::vec((arb_small_principal(), arb_small_principal()), 0..3)
        .prop_map(|ds| ds.into_iter().map(|(p, q)| Delegation::new(p, q)).collect())
}

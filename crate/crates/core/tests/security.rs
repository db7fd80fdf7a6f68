mod common;

use common::arb_delegations;
use flac::delegation::Delegations;
use flac::eval::{run, step, Outcome, Step, DEFAULT_FUEL};
use flac::generate::Generator;
use flac::principal::{Axis, Principal};
use flac::security::{
    bracket_adequacy, fair_attack_check, ni_check, observe, observe_trace, rd_check, trace_equiv, Condition,
    HarnessError, NiOptions, NiProblem, NiVerdict, RdOptions, RdProblem, RdVerdict, Unfair,
};
use flac::syntax::{parse_extended, parse_program, parse_term, parse_type, Context, Side, Term};
use flac::typecheck::CheckOptions;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> Principal {
    flac::syntax::parse_principal(s).unwrap()
}

fn x(s: &str) -> Term {
    parse_extended(s).unwrap()
}

fn none() -> Delegations {
    Delegations::new()
}

#[test]
fn observation_examples() {
    let e = none();
    assert_eq!(observe(&x("sealed[Alice->] ()"), &e, &p("Bob"), Axis::Conf), Term::Opaque);
    assert_eq!(observe(&x("sealed[Alice->] ()"), &e, &p("Alice"), Axis::Conf), x("sealed[Alice->] ()"));
    assert_eq!(observe(&Term::Unit, &e, &p("bot"), Axis::Integ), Term::Unit);
    assert_eq!(observe(&x("<sealed[Alice->] (), ()>"), &e, &p("Bob"), Axis::Conf), Term::Opaque);
    let w = x("sealed[Bob] () where <Alice |> Bob>");
    assert_eq!(observe(&w, &e, &p("Bob"), Axis::Conf), observe(&x("sealed[Bob] ()"), &e, &p("Bob"), Axis::Conf));
}

#[test]
fn assume_is_hidden_only_when_both_parts_are() {
    let e = none();
    let both = x("assume sealed[Alice->] () in sealed[Alice->] ()");
    assert_eq!(observe(&both, &e, &p("Bob"), Axis::Conf), Term::Opaque);
    let one = x("assume sealed[Alice->] () in ()");
    assert_eq!(observe(&one, &e, &p("Bob"), Axis::Conf), Term::assume(Term::Opaque, Term::Unit));
}

#[test]
fn trace_observation_drops_repeats() {
    let e = none();
    assert_eq!(observe_trace(&[Term::Unit], &e, &p("Bob"), Axis::Conf).len(), 1);
    // Two steps inside a context Bob cannot see, then the context exits.
    let r = run(&x("ctx[Alice->] proj1 <proj1 <(), ()>, ()>"), DEFAULT_FUEL);
    assert_eq!(r.trace.len(), 4);
    assert_eq!(observe_trace(&r.trace[..3], &e, &p("Bob"), Axis::Conf), vec![Term::Opaque]);
    assert_eq!(observe_trace(&r.trace, &e, &p("Bob"), Axis::Conf), vec![Term::Opaque, Term::Unit]);
    let raw: Vec<Term> = r.trace.iter().map(Term::canonical).collect();
    assert_eq!(observe_trace(&r.trace, &e, &p("top"), Axis::Conf), raw);
}

#[test]
fn traces_differing_in_hidden_values_are_indistinguishable() {
    let e = none();
    let prog = |v: &str| {
        run(&x(&format!("(\\z: Alice says (unit + unit) [top<-]. ()) (sealed[Alice] {v})")), DEFAULT_FUEL).trace
    };
    let t1 = prog("inj1 @(unit + unit) ()");
    let t2 = prog("inj2 @(unit + unit) ()");
    assert!(trace_equiv(&t1, &t1, &e, &p("Bob"), Axis::Conf));
    assert!(trace_equiv(&t1, &t2, &e, &p("Bob"), Axis::Conf));
    assert!(!trace_equiv(&t1, &t2, &e, &p("Alice"), Axis::Conf));
    let public = |v: &str| run(&x(&format!("proj1 <{v}, ()>")), DEFAULT_FUEL).trace;
    assert!(!trace_equiv(
        &public("inj1 @(unit + unit) ()"),
        &public("inj2 @(unit + unit) ()"),
        &e,
        &p("Bob"),
        Axis::Conf
    ));
}

fn commitment_problem(term: &str) -> NiProblem {
    let inputs = ["inj1", "inj2"].map(|i| x(&format!("sealed[p] <(), {i} @(unit + unit) ()>")));
    NiProblem {
        pi: none(),
        gamma: Context::new(),
        pc: p("q<-"),
        term: parse_term(term).unwrap(),
        x: "x".into(),
        input_type: parse_type("p says (unit * (unit + unit))").unwrap(),
        inputs,
        subst: Vec::new(),
        h: p("p-> /\\ q<-"),
        observer: p("q-> /\\ p<-"),
        axis: Axis::Conf,
    }
}

#[test]
fn commitment_stays_secret() {
    let problem = commitment_problem("(\\z: p says (unit * (unit + unit)) [q<-]. eta[q->] ()) x");
    let verdict = ni_check(&problem, &NiOptions::default()).unwrap();
    let NiVerdict::Pass(report) = verdict else { panic!("{verdict:?}") };
    assert_eq!(report.steps, [3, 3]);
}

#[test]
fn side_conditions_are_checked_before_running() {
    let mut problem = commitment_problem("eta[q->] ()");
    problem.observer = p("p");
    assert!(matches!(ni_check(&problem, &NiOptions::default()).unwrap(), NiVerdict::Inapplicable(Condition::NoFlow)));
    let mut problem = commitment_problem("eta[q->] ()");
    problem.input_type = parse_type("unit + unit").unwrap();
    problem.inputs = [x("inj1 @(unit + unit) ()"), x("inj2 @(unit + unit) ()")];
    assert!(matches!(
        ni_check(&problem, &NiOptions::default()).unwrap(),
        NiVerdict::Inapplicable(Condition::InputProtected)
    ));
}

#[test]
fn a_pc_that_can_downgrade_is_out_of_scope() {
    let prog = parse_program("context: [q<- |> p<-]\n()", false).unwrap();
    let problem = NiProblem {
        pi: prog.delegations,
        gamma: Context::new(),
        pc: p("top<-"),
        term: parse_term("assume <q-> |> p->> in bind y = x in eta[q->] y").unwrap(),
        x: "x".into(),
        input_type: parse_type("p-> says (unit + unit)").unwrap(),
        inputs: [x("sealed[p->] inj1 @(unit + unit) ()"), x("sealed[p->] inj2 @(unit + unit) ()")],
        subst: Vec::new(),
        h: p("p->"),
        observer: p("q->"),
        axis: Axis::Conf,
    };
    let verdict = ni_check(&problem, &NiOptions::default()).unwrap();
    assert!(matches!(verdict, NiVerdict::Inapplicable(Condition::NoDowngrade)), "{verdict:?}");
}

#[test]
fn holes_are_rejected_by_the_noninterference_check() {
    let mut problem = commitment_problem("eta[q->] ()");
    problem.term = x("hole[q-> says unit]");
    assert!(matches!(ni_check(&problem, &NiOptions::default()), Err(HarnessError::NotSourceLevel)));
}

const RD_PROGRAM: &str = "context: [alice<- |> bob<-, carol<- |> bob<-]
pc: (alice /\\ carol)<-
gamma: [x : alice-> /\\ carol<- says (unit + unit)]
(\\y: bob says (unit + unit) [bob<-]. hole[bob says (unit + unit)]) (
 (\\y: bob-> /\\ carol<- says (unit + unit) [carol<-]. assume <bob<- |> carol<-> in assume <bob |> carol> in bind y' = y in eta[bob-> /\\ bob<-] y')
 ((\\y: alice-> /\\ carol<- says (unit + unit) [(alice /\\ carol)<-]. assume <bob<- |> alice<-> in assume <bob |> alice> in bind y' = y in eta[bob-> /\\ carol<-] y') x))";

fn rd_problem(first: &str, second: &str) -> RdProblem {
    let prog = parse_program(RD_PROGRAM, true).unwrap();
    let inputs = ["inj1", "inj2"].map(|i| x(&format!("sealed[alice-> /\\ carol<-] {i} @(unit + unit) ()")));
    RdProblem {
        pi: prog.delegations.clone(),
        pi_h: prog.delegations,
        gamma: Context::new(),
        pc: prog.pc.unwrap(),
        term: prog.term,
        x: "x".into(),
        input_type: prog.gamma.lookup("x").unwrap().clone(),
        inputs,
        attacks: [vec![parse_term(first).unwrap()], vec![parse_term(second).unwrap()]],
        h: p("bob<- /\\ alice->"),
    }
}

#[test]
fn fair_attacks_cannot_steer_the_declassification() {
    let problem = rd_problem("y", "eta[bob] inj1 @(unit + unit) ()");
    let verdict = rd_check(&problem, &RdOptions::default()).unwrap();
    assert_eq!(verdict, RdVerdict::Pass { first: true, second: true });
    let same = rd_problem("y", "y");
    assert!(rd_check(&same, &RdOptions::default()).unwrap().passed());
}

#[test]
fn attacks_reading_the_secret_are_unfair() {
    let problem = rd_problem("y", "bind q = x in eta[bob] q");
    let err = rd_check(&problem, &RdOptions::default()).unwrap_err();
    assert!(matches!(err, HarnessError::Unfair(Unfair::FreeSecret { ref var, .. }) if var == "x"), "{err}");
    let check = CheckOptions::default();
    assert!(fair_attack_check(&problem, &problem.attacks[0], &check).is_ok());
    assert!(matches!(fair_attack_check(&problem, &[], &check), Err(HarnessError::Unfair(Unfair::Arity { .. }))));
}

#[test]
fn programs_without_holes_accept_the_empty_attack() {
    let mut problem = rd_problem("y", "y");
    problem.term = parse_term("x").unwrap();
    problem.attacks = [Vec::new(), Vec::new()];
    assert!(fair_attack_check(&problem, &[], &CheckOptions::default()).is_ok());
}

#[test]
fn bracket_projection_is_homomorphic() {
    let e = x("\\z: unit [Alice]. {() | <(), ()>}");
    assert_eq!(e.project_side(Side::Right), x("\\z: unit [Alice]. <(), ()>"));
    assert_eq!(x("{() | <(), ()>}").project_side(Side::Left), Term::Unit);
}

/// Runs of generated well-typed terms, each observed by several principals.
fn generated_trace(seed: u64) -> Option<Vec<Term>> {
    let mut g = Generator::new(ChaCha8Rng::seed_from_u64(seed));
    let (_, e, _) = g.well_typed(&none(), 4, 20)?;
    Some(run(&e, DEFAULT_FUEL).trace)
}

fn observer(seed: u64) -> Principal {
    Generator::new(ChaCha8Rng::seed_from_u64(seed)).principal()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn observation_is_idempotent(seed in any::<u64>(), o in any::<u64>(), pi in arb_delegations()) {
        if let Some(t) = generated_trace(seed) {
            let who = observer(o);
            for axis in [Axis::Conf, Axis::Integ] {
                for e in &t {
                    let once = observe(e, &pi, &who, axis);
                    prop_assert_eq!(observe(&once, &pi, &who, axis), once);
                }
            }
        }
    }

    /// An observer whose view flows to another's sees no more than it.
    #[test]
    fn lower_observers_see_no_more(seed in any::<u64>(), o in any::<u64>(), pi in arb_delegations()) {
        if let Some(t) = generated_trace(seed) {
            let high = observer(o);
            let low = observer(o.wrapping_add(1));
            for axis in [Axis::Conf, Axis::Integ] {
                if !flac::delegation::robust_flows_to(&pi, &low.project(axis), &high.project(axis)) {
                    continue;
                }
                for e in &t {
                    let via = observe(&observe(e, &pi, &high, axis), &pi, &low, axis);
                    prop_assert_eq!(via, observe(e, &pi, &low, axis));
                }
            }
        }
    }

    #[test]
    fn trace_equivalence_is_an_equivalence(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), o in any::<u64>()) {
        let (Some(t1), Some(t2), Some(t3)) = (generated_trace(a), generated_trace(b), generated_trace(c)) else {
            return Ok(());
        };
        let who = observer(o);
        let eq = |s: &[Term], t: &[Term]| trace_equiv(s, t, &none(), &who, Axis::Conf);
        prop_assert!(eq(&t1, &t1));
        prop_assert_eq!(eq(&t1, &t2), eq(&t2, &t1));
        if eq(&t1, &t2) && eq(&t2, &t3) {
            prop_assert!(eq(&t1, &t3));
        }
    }

    #[test]
    fn bracketed_runs_match_their_projections(seed in any::<u64>()) {
        let mut g = Generator::new(ChaCha8Rng::seed_from_u64(seed));
        if let Some(c) = g.bracket_case(&none(), 4, 20, 10_000) {
            let b = c.term.subst(&c.x, &Term::bracket(c.inputs[0].clone(), c.inputs[1].clone()));
            let rb = run(&b, DEFAULT_FUEL);
            let r1 = run(&c.term.subst(&c.x, &c.inputs[0]), DEFAULT_FUEL);
            let r2 = run(&c.term.subst(&c.x, &c.inputs[1]), DEFAULT_FUEL);
            prop_assert_eq!(bracket_adequacy(&rb, [&r1, &r2]), Ok(()), "{}", b);
        }
    }

    /// A stuck bracketed term has a stuck projection, also for ill-typed
    /// terms, which are built here by bracketing values of unrelated types.
    #[test]
    fn stuck_brackets_have_a_stuck_side(seed in any::<u64>()) {
        let mut g = Generator::new(ChaCha8Rng::seed_from_u64(seed));
        if let Some(c) = g.bracket_case(&none(), 4, 20, 10_000) {
            let junk = match g.rng.gen_range(0..3) {
                0 => Term::Unit,
                1 => x("inj1 @(unit + unit) ()"),
                _ => x("\\z: unit [top<-]. z"),
            };
            let b = c.term.subst(&c.x, &Term::bracket(c.inputs[0].clone(), junk));
            let r = run(&b, DEFAULT_FUEL);
            if let Outcome::Stuck(_) = r.outcome {
                let e = r.last();
                let stuck = |s| matches!(step(&e.project_side(s)), Step::Stuck(_));
                prop_assert!(stuck(Side::Left) || stuck(Side::Right), "{}", e);
            }
        }
    }
}

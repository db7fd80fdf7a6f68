use flac::delegation::Delegations;
use flac::eval::{run, step, Outcome, Rule, Step, DEFAULT_FUEL};
use flac::syntax::{parse_extended, parse_program, parse_term, Context, Term};
use flac::typecheck::typecheck;

fn eval(src: &str) -> (Term, Vec<Rule>) {
    let e = parse_term(src).unwrap();
    let r = run(&e, DEFAULT_FUEL);
    assert_eq!(r.outcome, Outcome::Value, "{src}");
    (r.last().clone(), r.rules)
}

#[test]
fn beta_goes_through_a_protection_context() {
    let (v, rules) = eval("(\\x: unit [Alice]. x) ()");
    assert_eq!(v, Term::Unit);
    assert_eq!(rules, vec![Rule::App, Rule::Ctx]);
}

#[test]
fn bind_unwraps_a_sealed_value() {
    let (v, rules) = eval("bind x = eta[Alice] () in eta[Alice] x");
    assert_eq!(v, parse_extended("sealed[Alice] ()").unwrap());
    assert_eq!(rules, vec![Rule::UnitM, Rule::BindM, Rule::UnitM, Rule::Ctx]);
}

#[test]
fn assume_leaves_its_evidence_on_the_result() {
    let (v, _) = eval("assume <Bob |> Alice> in \\x: unit [Alice]. x");
    assert!(matches!(v, Term::Where(..)));
    assert!(v.is_where_value());
}

#[test]
fn where_annotations_float_past_elimination_forms() {
    let e = parse_extended("((\\x: unit [Alice]. x) where <Bob |> Alice>) ()").unwrap();
    let Step::Reduced(next, rule) = step(&e) else { panic!() };
    assert_eq!(rule, Rule::WApp);
    assert_eq!(next, parse_extended("((\\x: unit [Alice]. x) ()) where <Bob |> Alice>").unwrap());
}

#[test]
fn case_selects_the_matching_branch() {
    let (v, _) = eval("case inj2 @(unit + unit) () of x. inj1 @(unit + unit) x | x. inj2 @(unit + unit) x");
    assert_eq!(v, parse_term("inj2 @(unit + unit) ()").unwrap());
}

#[test]
fn brackets_split_eliminations() {
    let e =
        parse_extended("case {inj1 @(unit + unit) () | inj2 @(unit + unit) ()} of x. <x, ()> | x. <(), x>").unwrap();
    let r = run(&e, DEFAULT_FUEL);
    assert_eq!(r.outcome, Outcome::Value);
    assert_eq!(r.rules[0], Rule::BCase);
    assert_eq!(r.last(), &parse_extended("{<(), ()> | <(), ()>}").unwrap());
}

#[test]
fn stuck_terms_report_a_reason() {
    let e = parse_extended("proj1 ()").unwrap();
    assert!(matches!(step(&e), Step::Stuck(_)));
}

#[test]
fn fuel_bounds_the_run() {
    let e = parse_term("(\\x: unit [Alice]. x) ()").unwrap();
    assert_eq!(run(&e, 1).outcome, Outcome::OutOfFuel);
}

#[test]
fn well_typed_program_keeps_its_type() {
    let p = parse_program("pc: Alice\n bind x = eta[Alice] () in eta[Alice] <x, x>", false).unwrap();
    let pi = Delegations::new();
    let pc = p.pc.clone().unwrap();
    let t = typecheck(&pi, &Context::new(), &pc, &p.term).unwrap();
    let r = run(&p.term, DEFAULT_FUEL);
    for e in &r.trace {
        let t2 = typecheck(&pi, &Context::new(), &pc, e).unwrap();
        assert!(t2.equiv(&t), "{e}: {t2} vs {t}");
    }
}

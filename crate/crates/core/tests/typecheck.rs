mod common;

use common::arb_delegations;
use flac::delegation::{Delegation, Delegations};
use flac::generate::Generator;
use flac::principal::{Axis, Principal};
use flac::syntax::{parse_extended, parse_program, parse_term, parse_type, Binding, Context, Term, Type};
use flac::typecheck::{protects, typecheck, typecheck_with, CheckOptions, TypeError};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> Principal {
    flac::syntax::parse_principal(s).unwrap()
}

fn t(s: &str) -> Type {
    parse_type(s).unwrap()
}

/// Type a program with headers, at `top<-` when it has no `pc:` line.
fn check(src: &str) -> Result<Type, TypeError> {
    let prog = parse_program(src, false).unwrap();
    let pc = prog.pc.clone().unwrap_or_else(|| Principal::Top.integ());
    typecheck(&prog.delegations, &prog.gamma, &pc, &prog.term)
}

fn rejected_at(src: &str) -> String {
    let err = check(src).unwrap_err();
    format!("{}.{}", err.rule, err.premise)
}

#[test]
fn protection_examples() {
    let e = Delegations::new();
    assert!(protects(&e, &p("Alice"), &Type::Unit));
    assert!(!protects(&e, &p("p<-"), &t("q<- says unit")));
    let pi: Delegations = [Delegation::new(p("p<-"), p("q<-"))].into_iter().collect();
    assert!(protects(&pi, &p("p<-"), &t("q<- says unit")));
    for l in ["Alice", "Alice->", "top", "top<-"] {
        assert!(!protects(&e, &p(l), &t("unit + unit")), "{l}");
    }
    assert!(!protects(&e, &p("bot"), &t("X")));
}

#[test]
fn type_projection_examples() {
    assert_eq!(t("Alice says unit").project(Axis::Conf), t("Alice-> says unit"));
    assert_eq!(Type::Unit.project(Axis::Integ), Type::Unit);
    assert_eq!(t("unit [Alice]-> Bob says unit").project(Axis::Integ), t("unit [Alice<-]-> Bob<- says unit"));
}

#[test]
fn relabeling_needs_a_delegation() {
    let body = "bind x' = x in eta[q<-] x'";
    // The first premise to fail in checking order is the unit rule inside
    // the bind, whose pc has been raised by p<-.
    assert_eq!(rejected_at(&format!("pc: q<-\ngamma: [x : p<- says unit]\n{body}")), "UnitM.pc ⊑ ℓ");
    let ok = check(&format!("pc: q<-\ngamma: [x : p<- says unit]\nassume <p<- |> q<-> in {body}")).unwrap();
    assert!(ok.equiv(&t("q<- says unit")));
}

#[test]
fn declassification_needs_the_owner_in_the_pc() {
    let f = "\\x: Alice-> says unit [Alice<-].\n  assume <Bob<- |> Alice<-> in assume <Bob-> |> Alice->> in bind y = x in eta[Bob->] y";
    let ty = check(&format!("pc: Alice<-\n{f}")).unwrap();
    assert!(ty.equiv(&t("Alice-> says unit [Alice<-]-> Bob-> says unit")));
    let by_bob = f.replace("[Alice<-]", "[Bob<-]");
    assert_eq!(rejected_at(&format!("pc: Bob<-\n{by_bob}")), "Assume.pc ≽ ∇(q)");
}

#[test]
fn commitment_operations_have_their_signatures() {
    let commit = "pc: p<-\n/\\N [p<-]. /\\X [p<-]. \\n: N [p<-]. \\x: p-> says X [p<-].\n  assume <bot<- |> p<-> in bind x' = x in eta[p] <n, x'>";
    let ty = check(commit).unwrap();
    assert!(ty.equiv(&t("forall N [p<-]. forall X [p<-]. N [p<-]-> p-> says X [p<-]-> p says (N * X)")));
    let reveal = "pc: p<-\n/\\N [p<-]. assume <q<- |> p<-> in assume <q-> |> p->> in\n  /\\X [q<-]. \\x: p says (N * X) [q<-]. bind x' = x in eta[q-> /\\ p<-] x'";
    let ty = check(reveal).unwrap();
    assert!(ty.equiv(&t("forall N [p<-]. forall X [q<-]. p says (N * X) [q<-]-> q-> /\\ p<- says (N * X)")));
    let wrapper = "pc: q<-\n/\\N [q<-]. assume <q |> p> in\n  /\\X [q<-]. \\x: p says (N * X) [q<-]. bind x' = x in eta[q-> /\\ p<-] x'";
    assert_eq!(rejected_at(wrapper), "Assume.pc ≽ ∇(q)");
}

#[test]
fn says_does_not_commute() {
    let swap = |l1: &str, l2: &str| {
        format!(
            "pc: bot<-\n\\x: {l1} says {l2} says unit [bot<-].\n  bind y = x in bind z = y in eta[{l2}] (eta[{l1}] z)"
        )
    };
    assert_eq!(rejected_at(&swap("Alice", "Bob")), "UnitM.pc ⊑ ℓ");
    assert_eq!(rejected_at(&swap("k1", "k2")), "UnitM.pc ⊑ ℓ");
    // Unwrapping only the outer label and rewrapping it is fine.
    assert!(check("pc: Alice<-\n\\x: Alice says Bob says unit [Alice<-]. bind y = x in eta[Alice] y").is_ok());
}

#[test]
fn extended_forms_are_rejected_outside_the_harness() {
    let e = parse_extended("{sealed[Alice] () | sealed[Alice] ()}").unwrap();
    let pi = Delegations::new();
    assert!(typecheck(&pi, &Context::new(), &p("top<-"), &e).is_err());
    let harness = CheckOptions::harness(p("Alice"), Axis::Conf);
    let ty = typecheck_with(&harness, &pi, &Context::new(), &p("top<-"), &e, None).unwrap();
    assert!(ty.equiv(&t("Alice says unit")));
}

#[test]
fn bracket_type_must_be_protected_by_h() {
    let e = parse_extended("{inj1 @(unit + unit) () | inj2 @(unit + unit) ()}").unwrap();
    let harness = CheckOptions::harness(p("Alice"), Axis::Conf);
    let err = typecheck_with(&harness, &Delegations::new(), &Context::new(), &p("top<-"), &e, None).unwrap_err();
    assert_eq!(err.rule, "Bracket-Values");
}

#[test]
fn where_values_are_checked_at_the_configured_pc() {
    let e = parse_extended("sealed[q<-] () where <p<- |> q<->").unwrap();
    let pi = Delegations::new();
    assert!(typecheck(&pi, &Context::new(), &p("bot"), &e).is_ok());
    let low = CheckOptions { pc_lowest: p("bot"), harness: None };
    assert!(typecheck_with(&low, &pi, &Context::new(), &p("bot"), &e, None).is_err());
}

#[test]
fn errors_point_at_source_positions() {
    let prog = parse_program("pc: Bob<-\n\\x: unit [Alice<-]. x", false).unwrap();
    let ok = typecheck_with(
        &CheckOptions::default(),
        &prog.delegations,
        &prog.gamma,
        &p("Bob<-"),
        &prog.term,
        Some(&prog.spans),
    );
    assert!(ok.is_ok());
    let prog = parse_program("pc: Bob<-\n(\\x: unit [Alice<-]. x) ()", false).unwrap();
    let err = typecheck_with(
        &CheckOptions::default(),
        &prog.delegations,
        &prog.gamma,
        &p("Bob<-"),
        &prog.term,
        Some(&prog.spans),
    )
    .unwrap_err();
    assert_eq!((err.rule, err.premise), ("App", "pc ⊑ pc'"));
    let span = err.span.expect("span");
    assert_eq!(span.line, 2);
    assert!(err.to_string().starts_with("App.pc ⊑ pc' at 2:"), "{err}");
}

#[test]
fn rightmost_binding_wins() {
    let prog = parse_program("gamma: [x : unit, x : Alice says unit]\nx", false).unwrap();
    let ty = typecheck(&prog.delegations, &prog.gamma, &p("top<-"), &prog.term).unwrap();
    assert_eq!(ty, t("Alice says unit"));
    assert!(parse_term("x").is_ok());
}

/// A type mentioning the type variable `X`.
fn type_over_x(g: &mut Generator<ChaCha8Rng>) -> Type {
    let x = Type::Var("X".into());
    match g.rng.gen_range(0..4) {
        0 => x,
        1 => Type::prod(x, g.ty(1)),
        2 => Type::says(g.principal(), x),
        _ => Type::fun(x.clone(), g.principal(), x),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn protection_commutes_with_projection(seed in any::<u64>(), pi in arb_delegations()) {
        let mut g = Generator::new(ChaCha8Rng::seed_from_u64(seed));
        let l = g.principal();
        let ty = g.ty(3);
        let conf = protects(&pi, &l.project(Axis::Conf), &ty.project(Axis::Conf));
        prop_assert_eq!(conf, protects(&pi, &l.conf().and(&Principal::Top.integ()), &ty), "{} / {}", l, ty);
        let integ = protects(&pi, &l.project(Axis::Integ), &ty.project(Axis::Integ));
        prop_assert_eq!(integ, protects(&pi, &l.integ(), &ty), "{} / {}", l, ty);
    }

    #[test]
    fn substituting_a_value_keeps_the_type(seed in any::<u64>()) {
        let mut g = Generator::new(ChaCha8Rng::seed_from_u64(seed));
        let pi = Delegations::new();
        if let Some(c) = g.bracket_case(&pi, 4, 20, 10_000) {
            for v in &c.inputs {
                let e = c.term.subst(&c.x, v);
                let ty = typecheck(&pi, &Context::new(), &c.pc, &e);
                prop_assert!(ty.as_ref().is_ok_and(|ty| ty.equiv(&c.ty)), "{e}: {ty:?}");
            }
        }
    }

    #[test]
    fn substituting_a_type_keeps_the_typing(seed in any::<u64>()) {
        let mut g = Generator::new(ChaCha8Rng::seed_from_u64(seed));
        let pi = Delegations::new();
        let mut gamma = Context::new();
        gamma.push(Binding::TyVar("X".into()));
        let pc = g.principal();
        let target = type_over_x(&mut g);
        let e = g.term(&pi, &gamma, &pc, &target, 4);
        if let Ok(ty) = typecheck(&pi, &gamma, &pc, &e) {
            let arg = g.ty(2);
            let closed = typecheck(&pi, &Context::new(), &pc, &e.subst_type("X", &arg));
            let want = ty.subst("X", &arg);
            prop_assert!(closed.as_ref().is_ok_and(|c| c.equiv(&want)), "{e} at {arg}: {closed:?}");
        }
    }
}

#[test]
fn type_application_instantiates_the_body() {
    let e = parse_term("(/\\X [top<-]. \\x: X [top<-]. <x, x>) (Alice says unit)").unwrap();
    let ty = typecheck(&Delegations::new(), &Context::new(), &p("top<-"), &e).unwrap();
    assert_eq!(ty, t("Alice says unit [top<-]-> Alice says unit * Alice says unit"));
}

#[test]
fn unbound_variables_are_reported() {
    let e = Term::var("nope");
    let err = typecheck(&Delegations::new(), &Context::new(), &p("top<-"), &e).unwrap_err();
    assert_eq!(err.rule, "Var");
}

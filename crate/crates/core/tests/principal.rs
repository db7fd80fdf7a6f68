mod common;

use common::{arb_principal, truth_acts_for, Names};
use flac::principal::{static_acts_for, static_equiv, static_flows_to, Axis, Principal};
use flac::syntax::parse_principal;
use proptest::prelude::*;

fn p(s: &str) -> Principal {
    parse_principal(s).unwrap()
}

#[test]
fn conjunction_with_a_projection_normalizes() {
    let nf = p("Alice-> /\\ Bob").normalize();
    let expected = p("(Alice /\\ Bob)-> /\\ Bob<-").normalize();
    assert_eq!(nf, expected);
    assert!(static_equiv(&p("Alice-> /\\ Bob"), &p("(Alice /\\ Bob)-> /\\ Bob<-")));
}

#[test]
fn crossed_projection_is_bottom() {
    let nf = p("(p<-)->").normalize();
    assert!(nf.conf.is_bot() && nf.integ.is_bot());
    assert!(static_equiv(&p("(p->)<-"), &Principal::Bot));
}

#[test]
fn principal_is_both_projections() {
    assert!(static_acts_for(&p("p-> /\\ p<-"), &p("p")));
    assert!(static_acts_for(&p("p"), &p("p-> /\\ p<-")));
}

#[test]
fn asymmetric_authority_does_not_act_for() {
    assert!(!static_acts_for(&p("Alice-> /\\ Bob<-"), &p("Alice<- /\\ Bob<-")));
}

#[test]
fn secret_untrusted_is_top_of_flow() {
    assert!(static_flows_to(&p("bot-> /\\ top<-"), &p("top-> /\\ bot<-")));
    assert!(!static_flows_to(&p("Alice->"), &p("Bob->")));
    assert!(!truth_acts_for(&p("Alice<- /\\ Bob->"), &p("Bob<- /\\ Alice->")));
}

#[test]
fn join_and_meet() {
    let (a, b) = (p("Alice"), p("Bob"));
    assert!(static_equiv(&a.flow_join(&b), &p("(Alice /\\ Bob)-> /\\ (Alice \\/ Bob)<-")));
    for x in [p("Alice"), p("Bob<-"), p("Alice-> \\/ Bob"), Principal::Top, Principal::Bot] {
        assert!(static_equiv(&Principal::flow_top().flow_meet(&x), &x));
    }
}

#[test]
fn voice_and_view() {
    assert_eq!(p("Alice").voice().canonical(), p("Alice<-").canonical());
    assert!(static_equiv(&p("Alice->").voice(), &p("Alice<-")));
    assert!(static_equiv(&p("Bob<-").view(), &p("Bob->")));
    let names = Names::from(&["Alice", "Bob"]);
    assert_eq!(names.tt(&p("Alice-> /\\ Bob<-").view()), names.tt(&p("(Alice /\\ Bob)->")));
}

#[test]
fn projections() {
    assert!(static_equiv(&p("(p /\\ q)<-"), &p("p<- /\\ q<-")));
    assert!(static_equiv(&p("(p->)->"), &p("p->")));
    assert!(static_equiv(&p("(p<-)->"), &Principal::Bot));
}

#[test]
fn printing_round_trips() {
    for s in ["Alice", "top", "bot", "p->", "(p /\\ q)<-", "a \\/ b /\\ c", "(a \\/ b)-> /\\ c<-"] {
        let x = p(s);
        assert_eq!(p(&x.to_string()), x, "{s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn static_acts_for_matches_truth_tables(x in arb_principal(), y in arb_principal()) {
        prop_assert_eq!(static_acts_for(&x, &y), truth_acts_for(&x, &y));
    }

    #[test]
    fn acts_for_is_a_preorder(x in arb_principal(), y in arb_principal(), z in arb_principal()) {
        prop_assert!(static_acts_for(&x, &x));
        if static_acts_for(&x, &y) && static_acts_for(&y, &z) {
            prop_assert!(static_acts_for(&x, &z));
        }
    }

    #[test]
    fn acts_for_and_flow_share_equivalence(x in arb_principal(), y in arb_principal()) {
        prop_assert_eq!(static_equiv(&x, &y), static_flows_to(&x, &y) && static_flows_to(&y, &x));
    }

    #[test]
    fn flow_lattice_laws(x in arb_principal(), y in arb_principal(), z in arb_principal()) {
        let eq = static_equiv;
        prop_assert!(eq(&x.flow_join(&y), &y.flow_join(&x)));
        prop_assert!(eq(&x.flow_meet(&y), &y.flow_meet(&x)));
        prop_assert!(eq(&x.flow_join(&y).flow_join(&z), &x.flow_join(&y.flow_join(&z))));
        prop_assert!(eq(&x.flow_meet(&y).flow_meet(&z), &x.flow_meet(&y.flow_meet(&z))));
        prop_assert!(eq(&x.flow_join(&x), &x));
        prop_assert!(eq(&x.flow_meet(&x), &x));
        prop_assert!(eq(&x.flow_join(&x.flow_meet(&y)), &x));
        prop_assert!(eq(&x.flow_meet(&x.flow_join(&y)), &x));
        prop_assert!(static_flows_to(&x, &x.flow_join(&y)));
        prop_assert!(static_flows_to(&x.flow_meet(&y), &x));
    }

    #[test]
    fn voice_and_view_are_monotone(x in arb_principal(), y in arb_principal()) {
        if static_acts_for(&x, &y) {
            prop_assert!(static_acts_for(&x.voice(), &y.voice()));
            prop_assert!(static_acts_for(&x.view(), &y.view()));
        }
    }

    #[test]
    fn projection_distributes(x in arb_principal(), y in arb_principal()) {
        for axis in [Axis::Conf, Axis::Integ] {
            prop_assert!(static_equiv(&x.and(&y).project(axis), &x.project(axis).and(&y.project(axis))));
            prop_assert!(static_equiv(&x.or(&y).project(axis), &x.project(axis).or(&y.project(axis))));
            prop_assert!(static_equiv(&x.project(axis).project(axis), &x.project(axis)));
        }
        prop_assert!(static_equiv(&x, &x.conf().and(&x.integ())));
        prop_assert!(static_equiv(&x.integ().conf(), &Principal::Bot));
    }

    #[test]
    fn canonical_form_is_equivalent_and_reparses(x in arb_principal()) {
        let c = x.canonical();
        prop_assert!(static_equiv(&c, &x));
        prop_assert_eq!(parse_principal(&c.to_string()).unwrap(), c.clone());
        prop_assert_eq!(c.canonical(), c);
    }
}

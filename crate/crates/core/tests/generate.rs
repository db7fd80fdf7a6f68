use flac::delegation::Delegations;
use flac::eval::{run, Outcome, DEFAULT_FUEL};
use flac::generate::Generator;
use flac::syntax::Context;
use flac::typecheck::typecheck;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn generated_terms_preserve_types_and_make_progress() {
    let mut g = Generator::new(ChaCha8Rng::seed_from_u64(7));
    let pi = Delegations::new();
    let mut sizes = 0;
    for _ in 0..300 {
        let (pc, e, t) = g.well_typed(&pi, 4, 50).expect("generator yields a well-typed term");
        sizes += e.size();
        let r = run(&e, DEFAULT_FUEL);
        assert_eq!(r.outcome, Outcome::Value, "{e}");
        for s in &r.trace {
            let t2 = typecheck(&pi, &Context::new(), &pc, s).unwrap_or_else(|err| panic!("{s}: {err}"));
            assert!(t2.equiv(&t), "{s}: {t2} vs {t}");
        }
        assert_eq!(run(&e, DEFAULT_FUEL).trace, r.trace);
    }
    assert!(sizes > 300 * 8, "terms too small: {sizes}");
}

//! Randomized end-to-end agreement checks: classification of sampled
//! fields must produce only passing exact certificates, reports that
//! re-verify after a JSON round trip, and identical exact output under
//! different advisory seeds.

use difforder::classifier::{classify, SearchBounds, Verdict};
use difforder::report::{build_report, from_json, reverify, to_json};
use difforder::vectorfield::VectorField;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Small bounds keep randomized runs fast while still exercising every
/// stage of the pipeline.
fn quick_bounds(seed: u64) -> SearchBounds {
    SearchBounds {
        num_deg: 3,
        n_range: 2,
        max_denom_power: 2,
        darboux_deg: 2,
        cofactor_height: 1,
        series_order: 5,
        trials: 5,
        seed,
    }
}

#[test]
fn random_fields_produce_self_verifying_reports() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let bounds = quick_bounds(1);
    for _ in 0..8 {
        let field = VectorField::sample(&mut rng, 2, 2);
        let out = classify(&field, &bounds);
        for c in &out.checks {
            assert!(
                c.advisory || c.passed,
                "exact check failed on {field}: {} ({})",
                c.name,
                c.detail
            );
        }
        if let Verdict::Finite(w) = &out.verdict {
            assert!(w.verify(&field), "witness fails re-verification on {field}");
            for e in &out.exclusions {
                assert!(e.order < w.order(), "excluded order above the verdict on {field}");
            }
        }
        let doc = build_report(&field, &bounds, &out);
        let json = to_json(&doc);
        let back = from_json(&json).expect("report JSON parses");
        assert_eq!(to_json(&back), json, "round trip must be byte-stable for {field}");
        assert!(reverify(&back).expect("report strings parse"), "reverify on {field}");
    }
}

#[test]
fn advisory_seed_does_not_change_the_exact_outcome() {
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    for _ in 0..4 {
        let field = VectorField::sample(&mut rng, 2, 2);
        let a = classify(&field, &quick_bounds(1));
        let b = classify(&field, &quick_bounds(99));
        assert_eq!(a.verdict, b.verdict, "verdict changed with the seed on {field}");
        assert_eq!(a.exclusions, b.exclusions);
        assert_eq!(a.generators, b.generators);
        assert_eq!(a.integrating_factor, b.integrating_factor);
        assert_eq!(a.series, b.series);
    }
}

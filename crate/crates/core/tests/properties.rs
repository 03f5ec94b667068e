//! Randomized cross-checks: combinatorial identities on generated sets,
//! the two pair-sum forms against brute force, conjugate symmetry of the
//! zeta evaluator, and the two Z routes against each other.

use proptest::prelude::*;
use zeropair::counting::{pair_count, zero_census};
use zeropair::eval::{hardy_z, zeta_em, EvalConfig};
use zeropair::gue::{sample_control, ControlKind};
use zeropair::moments::{m_main, pair_triangle_sum};
use zeropair::zeros::{scan_zeros, synthesize, SyntheticSpec, ZeroSet};
use zeropair::ComplexValue;

fn spec_strategy() -> impl Strategy<Value = SyntheticSpec> {
    (
        0u32..150,
        0u32..25,
        0u32..12,
        3.0f64..50.0,
        60.0f64..400.0,
        any::<u64>(),
    )
        .prop_map(|(n_critical, pairs, extras, lo, span, seed)| SyntheticSpec {
            n_critical,
            n_quadruple_pairs: pairs,
            // extra horizontal zeros borrow pair ordinates, so none
            // without pairs
            n_extra_horizontal: if pairs == 0 { 0 } else { extras },
            mult_distribution: vec![(1, 0.6), (2, 0.3), (3, 0.1)],
            range: (lo, lo + span),
            seed,
        })
}

fn brute_force_pairs(zs: &ZeroSet, t: f64, u: f64) -> u64 {
    let recs: Vec<_> = zs.records.iter().filter(|r| r.gamma <= t).collect();
    let mut total = 0u64;
    for a in &recs {
        for b in &recs {
            let gap = b.gamma - a.gamma;
            if gap > 0.0 && gap <= u {
                total += a.mult as u64 * b.mult as u64;
            }
        }
    }
    total
}

proptest! {
    #[test]
    fn census_identity_on_generated_sets(spec in spec_strategy()) {
        let zs = synthesize(&spec).unwrap();
        // zero_census verifies n_circledast == n_star + offline + ominus
        // internally and rejects non-closed sets
        let c = zero_census(&zs, spec.range.1).unwrap();
        prop_assert!(c.n_circledast >= c.n_star);
        prop_assert!(c.n_star >= c.n);
        prop_assert!(c.n_zero <= c.n);
        prop_assert!((c.n_simple as i64) >= c.simple_lower_bound.max(0));
        let mid = 0.5 * (spec.range.0 + spec.range.1);
        zero_census(&zs, mid).unwrap();
    }

    #[test]
    fn generated_sets_mirror_their_offline_zeros(spec in spec_strategy()) {
        let zs = synthesize(&spec).unwrap();
        for r in zs.records.iter().filter(|r| r.beta != 0.5) {
            let mirrored = zs.records.iter().any(|p| {
                p.gamma == r.gamma && p.beta == 1.0 - r.beta && p.mult == r.mult
            });
            prop_assert!(mirrored, "unmirrored zero at beta={} gamma={}", r.beta, r.gamma);
        }
    }

    #[test]
    fn pair_count_matches_brute_force(spec in spec_strategy(), u in 0.01f64..40.0) {
        let zs = synthesize(&spec).unwrap();
        let t = spec.range.1;
        prop_assert_eq!(pair_count(&zs, t, u).unwrap(), brute_force_pairs(&zs, t, u));
        let mid = 0.5 * (spec.range.0 + t);
        prop_assert_eq!(pair_count(&zs, mid, u).unwrap(), brute_force_pairs(&zs, mid, u));
    }

    #[test]
    fn triangle_forms_agree(spec in spec_strategy(), u in 0.1f64..5.0) {
        let mut zs = synthesize(&spec).unwrap();
        let t = zs.range_hi + u;
        zs.range_hi = t + u;
        let tri = pair_triangle_sum(&zs, t, u).unwrap();
        let scale = tri.direct.abs().max(1.0);
        prop_assert!(
            (tri.direct - tri.stieltjes).abs() < 1e-9 * scale,
            "direct {} vs stieltjes {}", tri.direct, tri.stieltjes
        );
    }

    #[test]
    fn zeta_conjugate_symmetry(sigma in 0.1f64..4.0, t in 0.1f64..40.0) {
        let cfg = EvalConfig::default();
        let s = ComplexValue::new(sigma, t);
        if (s - ComplexValue::new(1.0, 0.0)).norm() < 0.1 {
            return Ok(());
        }
        let upper = zeta_em(s, &cfg).unwrap();
        let lower = zeta_em(s.conj(), &cfg).unwrap();
        prop_assert!((lower - upper.conj()).norm() <= 1e-12 * upper.norm());
    }

    #[test]
    fn z_routes_agree_inside_error_band(t in 30.0f64..400.0) {
        let rs = EvalConfig::default();
        let em = EvalConfig {
            em_crossover_t: 1.0e9,
            ..EvalConfig::default()
        };
        let z_rs = hardy_z(t, &rs).unwrap();
        let z_em = hardy_z(t, &em).unwrap();
        prop_assert!((z_rs - z_em).abs() < 3e-5, "rs {z_rs} em {z_em} at t={t}");
    }

    #[test]
    fn control_sets_validate_and_count(seed in 0u64..200, t in 200.0f64..2000.0) {
        let poisson = sample_control(ControlKind::Poisson, t, seed).unwrap();
        poisson.validate().unwrap();
        let expected = m_main(t) + 1.0;
        let n = poisson.records.len() as f64;
        prop_assert!((n - expected).abs() < 6.0 * expected.sqrt() + 10.0);
        let fence = sample_control(ControlKind::PicketFence, t, seed).unwrap();
        fence.validate().unwrap();
        prop_assert_eq!(fence.records.len() as u64, m_main(t).floor() as u64);
    }
}

#[test]
fn scanned_gaps_match_counting_density() {
    let zs = scan_zeros(1000.0, 2000.0, &EvalConfig::default()).unwrap();
    let g: Vec<f64> = zs.records.iter().map(|r| r.gamma).collect();
    assert!(g.windows(2).all(|w| w[1] > w[0]), "ordinates strictly increase");
    let mean_gap = (g.last().unwrap() - g[0]) / (g.len() - 1) as f64;
    let predicted = 1000.0 / (m_main(2000.0) - m_main(1000.0));
    assert!(
        (mean_gap / predicted - 1.0).abs() < 0.05,
        "mean gap {mean_gap} vs density prediction {predicted}"
    );
}

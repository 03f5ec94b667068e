//! The GUE pair-correlation density 1 - (sin pi a / pi a)^2, its
//! cumulative integral, the triangle-weighted integral with its large
//! lambda asymptote, and control point processes (Poisson, picket fence)
//! for contrast with computed zeros.

use crate::error::{Error, Result};
use crate::moments::{m_density, m_main};
use crate::quad::{adaptive_gl, pairwise_sum};
use crate::zeros::{Provenance, ZeroRecord, ZeroSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Pair density 1 - sinc^2(pi alpha); the removable singularity at 0 is
/// taken by series below |alpha| = 1e-4. Always in [0, 1].
pub fn gue_pair_density(alpha: f64) -> f64 {
    let x = PI * alpha;
    if alpha.abs() < 1e-4 {
        let x2 = x * x;
        return x2 / 3.0 - 2.0 * x2 * x2 / 45.0;
    }
    let s = x.sin() / x;
    1.0 - s * s
}

fn sinc2(alpha: f64) -> f64 {
    1.0 - gue_pair_density(alpha)
}

// Integrate f over [0, hi] in half-period panels [k/2, (k+1)/2] so the
// oscillation never straddles a panel; each panel is smooth.
fn integrate_half_periods<F: Fn(f64) -> f64>(f: &F, hi: f64, rel_tol: f64) -> f64 {
    let mut parts = Vec::new();
    let mut a = 0.0;
    while a < hi {
        let b = (a + 0.5).min(hi);
        parts.push(adaptive_gl(f, a, b, rel_tol));
        a = b;
    }
    pairwise_sum(&parts)
}

/// F(lambda) = int_0^lambda (1 - sinc^2(pi a)) da to absolute tolerance
/// `tol`. Nondecreasing, F(lambda) <= lambda, F(0) = 0.
pub fn gue_cdf(lambda: f64, tol: f64) -> f64 {
    assert!(lambda >= 0.0 && tol >= 1e-12, "gue_cdf domain");
    if lambda == 0.0 {
        return 0.0;
    }
    // lambda minus the sinc^2 mass is better conditioned than integrating
    // the density near 0
    lambda - integrate_half_periods(&sinc2, lambda, (tol / lambda).min(1e-13).max(1e-15))
}

/// TL * F(UL): the predicted pair count up to height T within gap U.
pub fn predicted_pairs(t: f64, u: f64) -> f64 {
    assert!(t >= 2.0 && u > 0.0, "predicted_pairs domain");
    let l = t.ln() / (2.0 * PI);
    t * l * gue_cdf(u * l, 1e-9)
}

/// The triangle-weighted integral and its decomposition.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TriangleGue {
    /// int_{-lambda}^{lambda} (lambda - |a|) sinc^2(pi a) da
    pub value: f64,
    /// value - (lambda - log lambda / pi^2); O(1), meaningful for
    /// lambda >= 1
    pub asymptote_residual: f64,
    /// int_{-lambda}^{lambda} sinc^2(pi a) da, which tends to 1
    pub sinc_component: f64,
    /// (1/pi^2) int_0^lambda (1 - cos 2 pi a)/a da
    pub cosine_component: f64,
}

/// Evaluate the triangle integral, folded by symmetry to [0, lambda],
/// together with its two component integrals; value equals
/// lambda * sinc_component - cosine_component to ~10x the quadrature
/// tolerance.
pub fn triangle_gue_integral(lambda: f64, tol: f64) -> TriangleGue {
    assert!(lambda > 0.0 && tol >= 1e-12, "triangle_gue_integral domain");
    let value = 2.0 * integrate_half_periods(&|a| (lambda - a) * sinc2(a), lambda, 1e-13);
    let sinc_component = 2.0 * integrate_half_periods(&sinc2, lambda, 1e-13);
    // (1 - cos 2 pi a)/a, series below 1e-3 where the ratio cancels
    let cos_kernel = |a: f64| {
        if a < 1e-3 {
            let p2 = PI * PI;
            2.0 * p2 * a * (1.0 - p2 * a * a / 3.0)
        } else {
            (1.0 - (2.0 * PI * a).cos()) / a
        }
    };
    let cosine_component = integrate_half_periods(&cos_kernel, lambda, 1e-13) / (PI * PI);
    TriangleGue {
        value,
        asymptote_residual: value - (lambda - lambda.ln() / (PI * PI)),
        sinc_component,
        cosine_component,
    }
}

/// The two null models: memoryless and rigid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlKind {
    Poisson,
    PicketFence,
}

// Invert M on (2 pi, inf): bisection to a short bracket, Newton polish.
fn m_inverse(target: f64, hi: f64) -> f64 {
    let mut a = 2.0 * PI * (1.0 + 1e-12);
    let mut b = hi;
    debug_assert!(
        m_main(a) <= target && target <= m_main(b) + 1e-9,
        "m_inverse bracket: M({a}) = {} <= {target} <= M({b}) = {}",
        m_main(a),
        m_main(b)
    );
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if m_main(m) < target {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-6 * b {
            break;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..4 {
        x -= (m_main(x) - target) / m_density(x);
        x = x.clamp(a - 1.0, b + 1.0);
    }
    x
}

/// Sample a control zero set on (0, T]: an inhomogeneous Poisson process
/// with the counting density M'(t), or the rigid picket fence with
/// M(gamma_n) = n exactly. Deterministic per seed; the fence ignores it.
pub fn sample_control(kind: ControlKind, t: f64, seed: u64) -> Result<ZeroSet> {
    if !(t >= 100.0) {
        return Err(Error::Domain {
            what: "sample_control t",
            value: t,
        });
    }
    let top = m_main(t);
    let mut gammas: Vec<f64> = Vec::with_capacity(top as usize + 8);
    match kind {
        ControlKind::Poisson => {
            // time-change: unit-rate arrivals in the measure coordinate,
            // mapped back through the inverse of M; M(2 pi) = -1 anchors
            // the start of the positive-density range
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = -1.0;
            loop {
                s += (-(1.0 - rng.gen::<f64>()).ln()).max(1e-12);
                if s > top {
                    break;
                }
                gammas.push(m_inverse(s, t * 1.000001));
            }
        }
        ControlKind::PicketFence => {
            for n in 1..=(top.floor() as u64) {
                gammas.push(m_inverse(n as f64, t * 1.000001));
            }
        }
    }
    // equal ordinates would alias distinct points; bump the second of any
    // colliding pair by one ulp
    for i in 1..gammas.len() {
        if gammas[i] <= gammas[i - 1] {
            gammas[i] = f64::from_bits(gammas[i - 1].to_bits() + 1);
        }
    }
    let records = gammas
        .into_iter()
        .map(|gamma| ZeroRecord {
            beta: 0.5,
            gamma,
            mult: 1,
        })
        .collect();
    let zs = ZeroSet {
        records,
        range_lo: 0.0,
        range_hi: t,
        provenance: Provenance::Synthetic,
        complete: true,
    };
    zs.validate()?;
    Ok(zs)
}

/// Precomputed F and triangle values over a lambda grid, for reports.
#[derive(Debug, Clone, Serialize)]
pub struct GueIntegralTable {
    pub lambda_grid: Vec<f64>,
    pub f_values: Vec<f64>,
    pub triangle_values: Vec<f64>,
    pub quadrature_tol: f64,
}

impl GueIntegralTable {
    pub fn build(lambda_grid: &[f64], tol: f64) -> Result<Self> {
        if lambda_grid.is_empty() || lambda_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "lambda grid must be strictly increasing".into(),
            ));
        }
        if !(lambda_grid[0] > 0.0) || !(tol >= 1e-12) {
            return Err(Error::InvalidConfig(
                "lambda grid must be positive and tol >= 1e-12".into(),
            ));
        }
        let f_values = lambda_grid.iter().map(|&l| gue_cdf(l, tol)).collect();
        let triangle_values = lambda_grid
            .iter()
            .map(|&l| triangle_gue_integral(l, tol).value)
            .collect();
        Ok(GueIntegralTable {
            lambda_grid: lambda_grid.to_vec(),
            f_values,
            triangle_values,
            quadrature_tol: tol,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,F,triangle,residual\n");
        for i in 0..self.lambda_grid.len() {
            let l = self.lambda_grid[i];
            let resid = self.triangle_values[i] - (l - l.ln() / (PI * PI));
            out.push_str(&format!(
                "{l},{},{},{resid}\n",
                self.f_values[i], self.triangle_values[i]
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn density_closed_forms() {
        assert_eq!(gue_pair_density(0.0), 0.0);
        assert_relative_eq!(gue_pair_density(1.0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(
            gue_pair_density(0.5),
            1.0 - 4.0 / (PI * PI),
            epsilon = 1e-14
        );
    }

    #[test]
    fn density_series_joins_smoothly() {
        let below = gue_pair_density(0.999999999e-4);
        let above = gue_pair_density(1.000000001e-4);
        assert!((below - above).abs() < 1e-13);
        for i in 0..200 {
            let a = i as f64 * 0.05;
            let d = gue_pair_density(a);
            assert!((0.0..=1.0).contains(&d), "density({a}) = {d}");
        }
    }

    #[test]
    fn cdf_matches_oracle() {
        let cases = [
            (0.25, 0.016315217554374185005),
            (0.5, 0.11315249504859190777),
            (1.0, 0.5485883332098596866),
            (2.0, 1.5250303301163449227),
            (3.0, 2.5167947825022528675),
            (10.0, 9.5050635004293045289),
        ];
        for (l, want) in cases {
            let got = gue_cdf(l, 1e-10);
            assert!((got - want).abs() < 1e-9, "F({l}) = {got}, want {want}");
        }
        assert_eq!(gue_cdf(0.0, 1e-9), 0.0);
    }

    #[test]
    fn cdf_shape() {
        let mut prev = 0.0;
        for i in 1..=40 {
            let l = i as f64 * 0.25;
            let f = gue_cdf(l, 1e-10);
            assert!(f >= prev, "F must be nondecreasing");
            assert!(f <= l + 1e-12, "F({l}) = {f} exceeds lambda");
            prev = f;
        }
        // lambda - F climbs monotonically toward 1/2
        let mut gap_prev = 0.0;
        for l in [2.0, 3.0, 5.0, 10.0, 20.0] {
            let gap = l - gue_cdf(l, 1e-10);
            assert!(gap > gap_prev && gap < 0.5);
            gap_prev = gap;
        }
        assert!((10.0 - gue_cdf(10.0, 1e-10)) - (0.5 - 1.0 / (2.0 * PI * PI * 10.0)) < 1e-4);
    }

    #[test]
    fn triangle_matches_oracle() {
        let t1 = triangle_gue_integral(1.0, 1e-10);
        assert!((t1.value - 0.65583740648596181465).abs() < 1e-9);
        assert!(t1.value > 0.0 && t1.value < 1.0);
        let t10 = triangle_gue_integral(10.0, 1e-10);
        assert!((t10.value - 9.4207036640670022325).abs() < 1e-8);
        assert!((t10.asymptote_residual + 0.34599568887363866964).abs() < 1e-8);
        let t100 = triangle_gue_integral(100.0, 1e-10);
        assert!((t100.value - 99.187377724734374954).abs() < 1e-7);
        assert!(t100.asymptote_residual.abs() < 1.0);
    }

    #[test]
    fn triangle_component_identity() {
        for l in [1.0, 2.0, 5.0, 10.0, 100.0] {
            let t = triangle_gue_integral(l, 1e-10);
            let recombined = l * t.sinc_component - t.cosine_component;
            assert!(
                (t.value - recombined).abs() < 1e-9,
                "identity off at lambda={l}: {} vs {recombined}",
                t.value
            );
        }
    }

    #[test]
    fn sinc_component_tends_to_one() {
        for l in [10.0, 100.0, 1000.0] {
            let t = triangle_gue_integral(l, 1e-10);
            assert!(
                (t.sinc_component - 1.0).abs() < 2.0 / l,
                "sinc integral at {l}: {}",
                t.sinc_component
            );
        }
    }

    #[test]
    fn predicted_pairs_scales() {
        let t: f64 = 1.0e5;
        let l = t.ln() / (2.0 * PI);
        assert_relative_eq!(
            predicted_pairs(t, 1.0 / l),
            t * l * 0.5485883332098596866,
            max_relative = 1e-7
        );
        // repulsion bound: F(lambda) <= lambda
        let lambda0 = 0.05;
        assert!(predicted_pairs(t, lambda0 / l) <= lambda0 * t * l);
        // the density is near 1 between lambda = 1 and 2
        let df = gue_cdf(2.0, 1e-10) - gue_cdf(1.0, 1e-10);
        assert!(df > 0.9 && df < 1.0);
    }

    #[test]
    fn fence_has_unit_unfolded_gaps() {
        let zs = sample_control(ControlKind::PicketFence, 1000.0, 0).unwrap();
        assert!(!zs.records.is_empty());
        for w in zs.records.windows(2) {
            let d = m_main(w[1].gamma) - m_main(w[0].gamma);
            assert!((d - 1.0).abs() < 1e-6, "unfolded gap {d}");
        }
        assert!((m_main(zs.records[0].gamma) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn poisson_count_concentrates() {
        let t = 1.0e4;
        let expect = m_main(t);
        for seed in 0..10 {
            let zs = sample_control(ControlKind::Poisson, t, seed).unwrap();
            let n = zs.records.len() as f64;
            assert!(
                (n - expect).abs() < 3.0 * expect.sqrt() + 10.0,
                "seed {seed}: {n} vs {expect}"
            );
        }
    }

    #[test]
    fn controls_are_deterministic() {
        let a = sample_control(ControlKind::Poisson, 2000.0, 7).unwrap();
        let b = sample_control(ControlKind::Poisson, 2000.0, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_control(ControlKind::Poisson, 2000.0, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn table_builds_and_serializes() {
        let table = GueIntegralTable::build(&[0.5, 1.0, 2.0, 4.0], 1e-9).unwrap();
        assert_eq!(table.f_values.len(), 4);
        for w in table.f_values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        let csv = table.to_csv();
        assert!(csv.starts_with("lambda,F,triangle,residual\n"));
        assert_eq!(csv.lines().count(), 5);
        assert!(GueIntegralTable::build(&[1.0, 0.5], 1e-9).is_err());
    }
}

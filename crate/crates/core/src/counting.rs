//! Counting statistics over zero sets: the census of diagonal, symmetric
//! and horizontal pair terms, the pair-correlation counting function
//! N(T, U), binned correlation histograms against the GUE prediction,
//! and the small-gap repulsion probe.

use crate::error::{Error, Result};
use crate::gue::gue_cdf;
use crate::moments::m_main;
use crate::zeros::ZeroSet;
use serde::Serialize;
use std::f64::consts::PI;

/// Height T with its global unfolding scale L = (1/2pi) log T.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScaleContext {
    pub t: f64,
    pub l: f64,
}

impl ScaleContext {
    pub fn new(t: f64) -> Result<Self> {
        if !(t >= 2.0) {
            return Err(Error::Domain {
                what: "scale height",
                value: t,
            });
        }
        Ok(ScaleContext {
            t,
            l: t.ln() / (2.0 * PI),
        })
    }
}

/// A gap window U with its unfolded length lambda = U L and the bracket
/// [lambda0, lambda1] it is studied in.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorrelationWindow {
    pub u: f64,
    pub lambda: f64,
    pub lambda0: f64,
    pub lambda1: f64,
}

impl CorrelationWindow {
    pub fn new(ctx: &ScaleContext, lambda: f64, lambda0: f64, lambda1: f64) -> Result<Self> {
        if !(lambda0 > 0.0 && lambda0 <= lambda && lambda <= lambda1) {
            return Err(Error::InvalidConfig(format!(
                "lambda {lambda} outside [{lambda0}, {lambda1}]"
            )));
        }
        Ok(CorrelationWindow {
            u: lambda / ctx.l,
            lambda,
            lambda0,
            lambda1,
        })
    }
}

/// All counting functions at one height, multiplicity-weighted.
///
/// `n_ominus` is classified directly: ordered pairs of distinct zeros at
/// the same ordinate that are not a mirror pair (beta' = 1 - beta with
/// beta != 1/2). The decomposition n_circledast = n_star +
/// n_star_offline + n_ominus is then a genuine check, not a definition;
/// it holds exactly when the set is closed under beta -> 1 - beta with
/// matching multiplicities, as every zeta-like set is.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Census {
    /// sum of m over gamma <= T
    pub n: u64,
    /// sum of m^2 over distinct zeros (diagonal pairs)
    pub n_star: u64,
    /// sum over ordinate groups of (sum of m)^2 (all same-ordinate pairs)
    pub n_circledast: u64,
    /// sum of m^2 over distinct off-line zeros (symmetric pairs)
    pub n_star_offline: u64,
    /// non-symmetric horizontal pairs
    pub n_ominus: u64,
    /// sum of m over beta = 1/2
    pub n_zero: u64,
    /// distinct zeros with m = 1
    pub n_simple: u64,
    /// 2N - N*, the lower bound for n_simple
    pub simple_lower_bound: i64,
}

impl Census {
    pub fn validate(&self) -> Result<()> {
        let ok = self.n_circledast == self.n_star + self.n_star_offline + self.n_ominus
            && self.n_circledast >= self.n_star
            && self.n_star >= self.n
            && self.n_zero <= self.n
            && (self.simple_lower_bound < 0
                || self.n_simple >= self.simple_lower_bound as u64);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSet(format!("census invariants violated: {self:?}")))
        }
    }
}

fn require_complete(zs: &ZeroSet, t: f64) -> Result<()> {
    zs.validate()?;
    if !zs.complete || t > zs.range_hi + 1e-9 {
        return Err(Error::IncompleteSet {
            lo: zs.range_lo,
            hi: zs.range_hi,
        });
    }
    Ok(())
}

/// Count every pair class at height T. Errors if the decomposition
/// identity fails, which happens only on sets that are not closed under
/// the reflection beta -> 1 - beta at fixed ordinate.
pub fn zero_census(zs: &ZeroSet, t: f64) -> Result<Census> {
    require_complete(zs, t)?;
    let recs = &zs.records[..zs.records.partition_point(|r| r.gamma <= t)];
    let mut c = Census {
        n: 0,
        n_star: 0,
        n_circledast: 0,
        n_star_offline: 0,
        n_ominus: 0,
        n_zero: 0,
        n_simple: 0,
        simple_lower_bound: 0,
    };
    let mut i = 0;
    while i < recs.len() {
        let mut j = i;
        while j < recs.len() && recs[j].gamma == recs[i].gamma {
            j += 1;
        }
        let group = &recs[i..j];
        let group_m: u64 = group.iter().map(|r| r.mult as u64).sum();
        c.n += group_m;
        c.n_circledast += group_m * group_m;
        for r in group {
            let m = r.mult as u64;
            c.n_star += m * m;
            if r.beta != 0.5 {
                c.n_star_offline += m * m;
            } else {
                c.n_zero += m;
            }
            if r.mult == 1 {
                c.n_simple += 1;
            }
        }
        // classify the off-diagonal same-ordinate pairs
        for (a, ra) in group.iter().enumerate() {
            for (b, rb) in group.iter().enumerate() {
                if a == b {
                    continue;
                }
                let mirror = ra.beta != 0.5 && rb.beta == 1.0 - ra.beta;
                if !mirror {
                    c.n_ominus += (ra.mult as u64) * (rb.mult as u64);
                }
            }
        }
        i = j;
    }
    c.simple_lower_bound = 2 * c.n as i64 - c.n_star as i64;
    c.validate()?;
    Ok(c)
}

/// N(T, U): multiplicity-weighted ordered pairs with 0 < gamma,
/// gamma' <= T and 0 < gamma' - gamma <= U, by a two-pointer sweep.
pub fn pair_count(zs: &ZeroSet, t: f64, u: f64) -> Result<u64> {
    if !(u > 0.0) {
        return Err(Error::Domain {
            what: "pair gap U",
            value: u,
        });
    }
    require_complete(zs, t)?;
    let recs = &zs.records[..zs.records.partition_point(|r| r.gamma <= t)];
    let mut prefix: Vec<u64> = Vec::with_capacity(recs.len() + 1);
    prefix.push(0);
    for r in recs {
        prefix.push(prefix.last().unwrap() + r.mult as u64);
    }
    let mut total = 0u64;
    let (mut lo, mut hi) = (0usize, 0usize);
    for (i, r) in recs.iter().enumerate() {
        if lo < i + 1 {
            lo = i + 1;
        }
        while lo < recs.len() && recs[lo].gamma <= r.gamma {
            lo += 1;
        }
        if hi < lo {
            hi = lo;
        }
        while hi < recs.len() && recs[hi].gamma <= r.gamma + u {
            hi += 1;
        }
        total += r.mult as u64 * (prefix[hi] - prefix[lo]);
    }
    Ok(total)
}

/// A binned view of pair gaps against the GUE prediction. `counts[i]`
/// holds the weighted pairs with unfolded gap in (edges[i], edges[i+1]];
/// `normalizer` is the scale that turns a bin count into a density
/// (T L for the global unfolding, the weighted zero count for the local
/// one).
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationHistogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<f64>,
    pub predicted: Vec<f64>,
    pub t: f64,
    pub l: f64,
    pub normalizer: f64,
}

impl CorrelationHistogram {
    /// Empirical pair density in bin i, comparable to
    /// \int_bin (1 - sinc^2) / width.
    pub fn scaled_density(&self, i: usize) -> f64 {
        let width = self.bin_edges[i + 1] - self.bin_edges[i];
        self.counts[i] / (self.normalizer * width)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda_lo,lambda_hi,count,predicted\n");
        for i in 0..self.counts.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.bin_edges[i],
                self.bin_edges[i + 1],
                self.counts[i],
                self.predicted[i]
            ));
        }
        out
    }
}

fn histogram_shell(
    t: f64,
    lambda_max: f64,
    n_bins: usize,
    normalizer: f64,
) -> Result<CorrelationHistogram> {
    if !(lambda_max > 0.0 && lambda_max <= 10.0) || n_bins < 4 {
        return Err(Error::InvalidConfig(format!(
            "histogram wants 0 < lambda_max <= 10 and >= 4 bins, got {lambda_max}, {n_bins}"
        )));
    }
    let bin_edges: Vec<f64> = (0..=n_bins)
        .map(|i| lambda_max * i as f64 / n_bins as f64)
        .collect();
    let predicted = bin_edges
        .windows(2)
        .map(|w| normalizer * (gue_cdf(w[1], 1e-9) - gue_cdf(w[0], 1e-9)))
        .collect();
    Ok(CorrelationHistogram {
        counts: vec![0.0; n_bins],
        bin_edges,
        predicted,
        t,
        l: t.ln() / (2.0 * PI),
        normalizer,
    })
}

/// Histogram of pair gaps under the global unfolding lambda = (gamma' -
/// gamma) L, exactly the counting function differenced over the bin
/// edges U_i = lambda_i / L.
pub fn correlation_histogram(
    zs: &ZeroSet,
    t: f64,
    lambda_max: f64,
    n_bins: usize,
) -> Result<CorrelationHistogram> {
    let ctx = ScaleContext::new(t)?;
    let mut hist = histogram_shell(t, lambda_max, n_bins, t * ctx.l)?;
    let mut prev = 0u64;
    for i in 0..n_bins {
        let n_tu = pair_count(zs, t, hist.bin_edges[i + 1] / ctx.l)?;
        hist.counts[i] = (n_tu - prev) as f64;
        prev = n_tu;
    }
    Ok(hist)
}

// Weighted pair gaps under the local unfolding M(gamma') - M(gamma),
// capped at `cap`. The scan breaks on the monotone tail above 2 pi e.
fn unfolded_gaps(zs: &ZeroSet, t: f64, cap: f64) -> Vec<(f64, f64)> {
    let recs = &zs.records[..zs.records.partition_point(|r| r.gamma <= t)];
    let ms: Vec<f64> = recs.iter().map(|r| m_main(r.gamma)).collect();
    let mut gaps = Vec::new();
    for i in 0..recs.len() {
        for j in (i + 1)..recs.len() {
            let lambda = ms[j] - ms[i];
            if lambda > cap && recs[j].gamma > 2.0 * PI * std::f64::consts::E {
                break;
            }
            if lambda > 0.0 && lambda <= cap {
                gaps.push((lambda, (recs[i].mult * recs[j].mult) as f64));
            }
        }
    }
    gaps
}

/// Histogram of pair gaps under the local unfolding lambda = M(gamma') -
/// M(gamma), normalized by the weighted zero count, so a unit-intensity
/// process (Poisson after unfolding) has scaled density 1 in every bin.
pub fn unfolded_histogram(
    zs: &ZeroSet,
    t: f64,
    lambda_max: f64,
    n_bins: usize,
) -> Result<CorrelationHistogram> {
    require_complete(zs, t)?;
    let w = zs.count_to(t) as f64;
    let mut hist = histogram_shell(t, lambda_max, n_bins, w)?;
    let width = lambda_max / n_bins as f64;
    for (lambda, weight) in unfolded_gaps(zs, t, lambda_max) {
        // right-closed bins (a, b], matching the global differencing
        let idx = ((lambda / width).ceil() as usize).max(1) - 1;
        if idx < n_bins {
            hist.counts[idx] += weight;
        }
    }
    Ok(hist)
}

/// One row of the small-gap probe: the counting ratio of the source
/// statement plus its locally unfolded counterpart (which is the one a
/// unit-intensity null model pins at lambda0).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RepulsionRow {
    pub lambda0: f64,
    /// N(T, lambda0/L) / (T L)
    pub ratio: f64,
    /// weighted pairs with unfolded gap <= lambda0, over the weighted count
    pub unfolded_ratio: f64,
}

/// Probe N(T, lambda0/L)/(TL) for each lambda0, in caller order.
pub fn repulsion_probe(zs: &ZeroSet, t: f64, lambda0_list: &[f64]) -> Result<Vec<RepulsionRow>> {
    let ctx = ScaleContext::new(t)?;
    require_complete(zs, t)?;
    let cap = lambda0_list.iter().cloned().fold(0.0, f64::max);
    if !(cap < 1.0) || lambda0_list.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidConfig(format!(
            "repulsion lambda0 values must lie in (0, 1): {lambda0_list:?}"
        )));
    }
    let gaps = unfolded_gaps(zs, t, cap);
    let w = zs.count_to(t) as f64;
    let mut rows = Vec::with_capacity(lambda0_list.len());
    for &lambda0 in lambda0_list {
        let n_tu = pair_count(zs, t, lambda0 / ctx.l)?;
        let unfolded: f64 = gaps
            .iter()
            .filter(|&&(g, _)| g <= lambda0)
            .map(|&(_, w)| w)
            .sum();
        rows.push(RepulsionRow {
            lambda0,
            ratio: n_tu as f64 / (t * ctx.l),
            unfolded_ratio: unfolded / w,
        });
    }
    Ok(rows)
}

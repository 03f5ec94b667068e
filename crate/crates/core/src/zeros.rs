//! Zero sets: scanning sign changes of Z, ingesting published ordinate
//! tables, synthesizing configurations with off-line zeros, persistence,
//! and the Riemann-von Mangoldt consistency check.

use crate::error::{Error, Result};
use crate::eval::{hardy_z, rs_theta, s_direct, EvalConfig};
use crate::moments::m_main;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::time::Duration;

/// How a zero set came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Computed,
    Ingested,
    Synthetic,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Computed => "computed",
            Provenance::Ingested => "ingested",
            Provenance::Synthetic => "synthetic",
        })
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "computed" => Ok(Provenance::Computed),
            "ingested" => Ok(Provenance::Ingested),
            "synthetic" => Ok(Provenance::Synthetic),
            other => Err(Error::InvalidSet(format!("unknown provenance {other:?}"))),
        }
    }
}

/// One zero beta + i gamma with its multiplicity. Computed records always
/// have beta = 1/2 and mult = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub beta: f64,
    pub gamma: f64,
    pub mult: u32,
}

/// An ordered multiset of zeros over (range_lo, range_hi].
///
/// `complete` asserts every zero with ordinate in the range is present;
/// only then are census and counting results meaningful at the top of the
/// range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub records: Vec<ZeroRecord>,
    pub range_lo: f64,
    pub range_hi: f64,
    pub provenance: Provenance,
    pub complete: bool,
}

impl ZeroSet {
    /// Check the structural invariants: sorted by (gamma, beta), fields in
    /// range, ordinates inside (range_lo, range_hi].
    pub fn validate(&self) -> Result<()> {
        if !(self.range_lo < self.range_hi) {
            return Err(Error::InvalidSet(format!(
                "range ({}, {}] is empty",
                self.range_lo, self.range_hi
            )));
        }
        for (i, r) in self.records.iter().enumerate() {
            if !(r.beta > 0.0 && r.beta < 1.0) || !(r.gamma > 0.0) || r.mult < 1 {
                return Err(Error::InvalidSet(format!(
                    "record {i} out of domain: beta={}, gamma={}, mult={}",
                    r.beta, r.gamma, r.mult
                )));
            }
            if !(r.gamma > self.range_lo && r.gamma <= self.range_hi) {
                return Err(Error::InvalidSet(format!(
                    "record {i} ordinate {} outside ({}, {}]",
                    r.gamma, self.range_lo, self.range_hi
                )));
            }
            if i > 0 {
                let p = &self.records[i - 1];
                if (p.gamma, p.beta) > (r.gamma, r.beta) {
                    return Err(Error::InvalidSet(format!("records unsorted at index {i}")));
                }
            }
            if self.provenance == Provenance::Computed && (r.beta != 0.5 || r.mult != 1) {
                return Err(Error::InvalidSet(format!(
                    "computed record {i} must have beta=1/2, mult=1"
                )));
            }
        }
        Ok(())
    }

    /// Multiplicity-weighted count of zeros with gamma <= t.
    pub fn count_to(&self, t: f64) -> u64 {
        self.records
            .iter()
            .take_while(|r| r.gamma <= t)
            .map(|r| r.mult as u64)
            .sum()
    }

    /// Multiplicity-weighted size of the whole set.
    pub fn weighted_count(&self) -> u64 {
        self.records.iter().map(|r| r.mult as u64).sum()
    }
}

/// Recipe for a synthetic configuration: critical-line zeros, symmetric
/// off-line pairs (beta, gamma) + (1-beta, gamma), and extra critical
/// zeros sharing an ordinate with one of the pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_critical: u32,
    pub n_quadruple_pairs: u32,
    pub n_extra_horizontal: u32,
    /// (multiplicity, weight) choices; empty means all multiplicities 1.
    pub mult_distribution: Vec<(u32, f64)>,
    pub range: (f64, f64),
    pub seed: u64,
}

/// Result of the Riemann-von Mangoldt consistency check at height t.
#[derive(Debug, Clone, Serialize)]
pub struct RvmReport {
    pub count: u64,
    pub rvm_value: f64,
    pub s_at_t: f64,
    pub pass: bool,
}

// Mean vertical gap near height t from the counting density, capped for
// low t where the asymptotic density degenerates.
fn local_spacing(t: f64) -> f64 {
    let density = (t / (2.0 * PI)).ln().max(0.8) / (2.0 * PI);
    1.0 / density
}

// Grid step for the sign scan: 4 points per mean spacing.
fn grid_step(t: f64) -> f64 {
    local_spacing(t) / 4.0
}

/// Sign changes of Z on [a, b] with step <= h, each bracket refined to
/// 1e-9. Cells where |Z| dips without a sign change are rescanned at
/// 16x density to catch close pairs.
fn raw_scan(a: f64, b: f64, h: f64, cfg: &EvalConfig) -> Result<Vec<f64>> {
    let n = (((b - a) / h).ceil() as usize).max(2);
    let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let zs: Vec<f64> = xs.iter().map(|&x| hardy_z(x, cfg)).collect::<Result<_>>()?;
    let mut found = Vec::new();
    for i in 0..n {
        if zs[i] * zs[i + 1] < 0.0 {
            found.push(refine_zero(xs[i], xs[i + 1], 1e-9, cfg)?);
        }
    }
    // Close pairs hide inside one cell as a dip that never crosses zero;
    // same-sign local minima that are small in absolute terms get a
    // finer look.
    for i in 1..n {
        let (z0, z1, z2) = (zs[i - 1], zs[i], zs[i + 1]);
        if z0 * z1 > 0.0
            && z1 * z2 > 0.0
            && z1.abs() < 0.3 * z0.abs().min(z2.abs())
            && z1.abs() < 0.5
        {
            let fine = ((xs[i + 1] - xs[i - 1]) / (h / 16.0)).ceil() as usize;
            let mut px = xs[i - 1];
            let mut pz = z0;
            for j in 1..=fine {
                let x = xs[i - 1] + (xs[i + 1] - xs[i - 1]) * j as f64 / fine as f64;
                let z = hardy_z(x, cfg)?;
                if pz * z < 0.0 {
                    found.push(refine_zero(px, x, 1e-9, cfg)?);
                }
                px = x;
                pz = z;
            }
        }
    }
    found.sort_by(|p, q| p.partial_cmp(q).unwrap());
    found.dedup_by(|p, q| (*p - *q).abs() < 1e-7);
    found.retain(|&g| g > a && g <= b);
    Ok(found)
}

// round(theta/pi + 1 + S) at a probe height near `t`, stepping the probe
// away from suspected ordinates until the value sits clearly on an
// integer. `dir` is +1 to nudge upward, -1 downward.
fn probe_expected(t: f64, dir: f64, cfg: &EvalConfig) -> Result<(f64, i64)> {
    let h = grid_step(t);
    let mut last_err = None;
    for k in 0..16 {
        let p = t + dir * 0.29 * h * k as f64;
        if p < 2.0 {
            break;
        }
        match s_direct(p, cfg) {
            Ok(s) => {
                let v = rs_theta(p)? / PI + 1.0 + s;
                if (v - v.round()).abs() < 0.25 {
                    return Ok((p, v.round() as i64));
                }
            }
            Err(e @ Error::UnwrapFailure { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or(Error::NonConvergence { iterations: 16 }))
}

fn count_in(zeros: &[f64], lo: f64, hi: f64) -> usize {
    let a = zeros.partition_point(|&g| g <= lo);
    let b = zeros.partition_point(|&g| g <= hi);
    b - a
}

/// Scan (t_lo, t_hi] for critical-line zeros by sign changes of Z.
///
/// The range is cut into chunks of roughly 256 mean spacings, scanned in
/// parallel, and verified against round(theta/pi + 1 + S) hierarchically:
/// two endpoint probes when all is well, bisection to localize a missing
/// zero otherwise, with up to six grid doublings on the offending chunk
/// before giving up. Deterministic for fixed inputs regardless of thread
/// count.
pub fn scan_zeros(t_lo: f64, t_hi: f64, cfg: &EvalConfig) -> Result<ZeroSet> {
    if !(t_lo >= 2.0 && t_lo < t_hi && t_hi <= 1.0e6) {
        return Err(Error::Domain {
            what: "scan_zeros range",
            value: t_hi,
        });
    }
    cfg.validate()?;
    let mut edges = vec![t_lo];
    let mut t = t_lo;
    while t < t_hi {
        t = (t + 256.0 * local_spacing(t)).min(t_hi);
        edges.push(t);
    }
    let mut chunks: Vec<Vec<f64>> = edges
        .par_windows(2)
        .map(|w| raw_scan(w[0], w[1], grid_step(w[1]), cfg))
        .collect::<Result<_>>()?;

    let mut probes: HashMap<usize, (f64, i64)> = HashMap::new();
    let probe = |i: usize, probes: &mut HashMap<usize, (f64, i64)>| -> Result<(f64, i64)> {
        if let Some(&p) = probes.get(&i) {
            return Ok(p);
        }
        // interior and top probes nudge downward; the bottom probe nudges
        // upward so it stays inside the scanned range
        let dir = if i == 0 { 1.0 } else { -1.0 };
        let p = probe_expected(edges[i], dir, cfg)?;
        probes.insert(i, p);
        Ok(p)
    };

    // verify [lo_edge, hi_edge); on mismatch bisect, then rescan the
    // single offending chunk at doubled densities
    let mut stack = vec![(0usize, edges.len() - 1)];
    while let Some((lo, hi)) = stack.pop() {
        let (pa, ea) = probe(lo, &mut probes)?;
        let (pb, eb) = probe(hi, &mut probes)?;
        let merged: Vec<f64> = chunks.iter().flatten().copied().collect();
        let found = count_in(&merged, pa, pb) as i64;
        let expected = eb - ea;
        if found == expected {
            continue;
        }
        if hi - lo > 1 {
            let mid = (lo + hi) / 2;
            stack.push((lo, mid));
            stack.push((mid, hi));
            continue;
        }
        let mut fixed = false;
        for doubling in 1..=6u32 {
            let h = grid_step(edges[hi]) / (1 << doubling) as f64;
            chunks[lo] = raw_scan(edges[lo], edges[hi], h, cfg)?;
            let merged: Vec<f64> = chunks.iter().flatten().copied().collect();
            if count_in(&merged, pa, pb) as i64 == expected {
                fixed = true;
                break;
            }
        }
        if !fixed {
            let merged: Vec<f64> = chunks.iter().flatten().copied().collect();
            return Err(Error::CountMismatch {
                lo: pa,
                hi: pb,
                found: count_in(&merged, pa, pb) as i64,
                expected,
            });
        }
    }

    let records = chunks
        .into_iter()
        .flatten()
        .filter(|&g| g > t_lo && g <= t_hi)
        .map(|gamma| ZeroRecord {
            beta: 0.5,
            gamma,
            mult: 1,
        })
        .collect();
    let zs = ZeroSet {
        records,
        range_lo: t_lo,
        range_hi: t_hi,
        provenance: Provenance::Computed,
        complete: true,
    };
    zs.validate()?;
    Ok(zs)
}

/// Refine a sign-change bracket of Z to an ordinate: bisection until the
/// bracket is narrower than `tol`, then a secant polish.
pub fn refine_zero(bracket_lo: f64, bracket_hi: f64, tol: f64, cfg: &EvalConfig) -> Result<f64> {
    if !(tol >= 1e-12) {
        return Err(Error::Domain {
            what: "refine_zero tol",
            value: tol,
        });
    }
    let (mut a, mut b) = (bracket_lo, bracket_hi);
    let mut fa = hardy_z(a, cfg)?;
    let mut fb = hardy_z(b, cfg)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }
    let mut iterations = 0u32;
    while b - a > tol {
        iterations += 1;
        if iterations > 200 {
            return Err(Error::NonConvergence { iterations: 200 });
        }
        let m = 0.5 * (a + b);
        let fm = hardy_z(m, cfg)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    // secant step inside the final bracket squeezes |Z| further
    let denom = fb - fa;
    if denom != 0.0 {
        let s = b - fb * (b - a) / denom;
        if s > a && s < b {
            return Ok(s);
        }
    }
    Ok(0.5 * (a + b))
}

/// Compare the multiplicity-weighted count of `zs` up to T against
/// M(T) + 7/8 + S(T). Zeros below the set's own range are counted
/// analytically so subrange sets check cleanly.
pub fn rvm_consistency(zs: &ZeroSet, t: f64, cfg: &EvalConfig) -> Result<RvmReport> {
    zs.validate()?;
    if t < 2.0 {
        return Err(Error::Domain {
            what: "rvm_consistency t",
            value: t,
        });
    }
    if !zs.complete || t > zs.range_hi {
        return Err(Error::IncompleteSet {
            lo: zs.range_lo,
            hi: zs.range_hi,
        });
    }
    // no zeros below the first ordinate; otherwise count the missing head
    // with the same identity being tested
    let base = if zs.range_lo < 14.0 {
        0
    } else {
        let s0 = s_direct(zs.range_lo, cfg)?;
        (rs_theta(zs.range_lo)? / PI + 1.0 + s0).round() as i64
    };
    let count = base as u64 + zs.count_to(t);
    let s = s_direct(t, cfg)?;
    let rvm_value = m_main(t) + 7.0 / 8.0 + s;
    let pass = (count as f64 - rvm_value).abs() < 0.5 && count as i64 == rvm_value.round() as i64;
    Ok(RvmReport {
        count,
        rvm_value,
        s_at_t: s,
        pass,
    })
}

const HTTP_RETRIES: u32 = 3;

fn fetch_source(source: &str, timeout_secs: u64) -> Result<String> {
    if let Some(url) = source
        .starts_with("http://")
        .then_some(source)
        .or_else(|| source.starts_with("https://").then_some(source))
    {
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs(timeout_secs.max(1)))
            .build();
        let mut last = String::new();
        for _ in 0..HTTP_RETRIES {
            match agent.get(url).call() {
                Ok(resp) => {
                    return resp.into_string().map_err(|e| Error::Network {
                        retries: HTTP_RETRIES,
                        msg: e.to_string(),
                    })
                }
                Err(e) => last = e.to_string(),
            }
        }
        return Err(Error::Network {
            retries: HTTP_RETRIES,
            msg: last,
        });
    }
    let path = source.strip_prefix("file:").unwrap_or(source);
    Ok(std::fs::read_to_string(path)?)
}

/// Ingest a plain-text ordinate table: one decimal ordinate per line,
/// strictly increasing, '#' comments allowed. `source` is a file path
/// (optionally `file:`-prefixed) or an http(s) URL.
///
/// Ingested values are trusted, not re-verified against Z. The result is
/// flagged complete only when `first_index_one` asserts the table starts
/// at the first zero.
pub fn ingest_zeros(
    source: &str,
    range_hint: Option<(f64, f64)>,
    first_index_one: bool,
    timeout_secs: u64,
) -> Result<ZeroSet> {
    let body = fetch_source(source, timeout_secs)?;
    let mut records: Vec<ZeroRecord> = Vec::new();
    for (idx, raw) in body.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let gamma: f64 = line.parse().map_err(|e| Error::Parse {
            line: idx + 1,
            msg: format!("{e}: {line:?}"),
        })?;
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("ordinate {gamma} not positive"),
            });
        }
        if let Some(prev) = records.last() {
            if gamma <= prev.gamma {
                return Err(Error::InvalidSet(format!(
                    "ordinates not strictly increasing at line {}",
                    idx + 1
                )));
            }
        }
        records.push(ZeroRecord {
            beta: 0.5,
            gamma,
            mult: 1,
        });
    }
    let (range_lo, range_hi) = range_hint.unwrap_or_else(|| {
        let hi = records.last().map(|r| r.gamma).unwrap_or(1.0);
        (0.0, hi)
    });
    let zs = ZeroSet {
        complete: first_index_one && !records.is_empty(),
        records,
        range_lo,
        range_hi,
        provenance: Provenance::Ingested,
    };
    zs.validate()?;
    Ok(zs)
}

/// Build a deterministic synthetic configuration. Off-line zeros appear in
/// mirror pairs (beta, gamma) and (1 - beta, gamma) with equal
/// multiplicity, betas on the grid j/2048 so the mirror is exact. Extra
/// horizontal zeros sit at beta = 1/2 with an ordinate bit-identical to
/// one of the pairs, cycling through them.
pub fn synthesize(spec: &SyntheticSpec) -> Result<ZeroSet> {
    let (lo, hi) = spec.range;
    if !(lo >= 0.0 && lo < hi) {
        return Err(Error::InvalidSpec(format!("range ({lo}, {hi}] is empty")));
    }
    if spec.n_extra_horizontal > 0 && spec.n_quadruple_pairs == 0 {
        return Err(Error::InvalidSpec(
            "extra horizontal zeros need a quadruple pair ordinate to share".into(),
        ));
    }
    for &(m, w) in &spec.mult_distribution {
        if m < 1 || !(w > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "multiplicity distribution entry ({m}, {w}) invalid"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let total_w: f64 = spec.mult_distribution.iter().map(|&(_, w)| w).sum();
    let draw_mult = |rng: &mut ChaCha8Rng| -> u32 {
        if spec.mult_distribution.is_empty() {
            return 1;
        }
        let mut u = rng.gen::<f64>() * total_w;
        for &(m, w) in &spec.mult_distribution {
            if u < w {
                return m;
            }
            u -= w;
        }
        spec.mult_distribution.last().unwrap().0
    };
    // u in [0,1) maps to gamma in (lo, hi]
    let draw_gamma = |rng: &mut ChaCha8Rng| -> f64 { lo + (hi - lo) * (1.0 - rng.gen::<f64>()) };

    let mut records: Vec<ZeroRecord> = Vec::new();
    for _ in 0..spec.n_critical {
        let gamma = draw_gamma(&mut rng);
        let mult = draw_mult(&mut rng);
        records.push(ZeroRecord {
            beta: 0.5,
            gamma,
            mult,
        });
    }
    let mut pair_gammas = Vec::new();
    for _ in 0..spec.n_quadruple_pairs {
        let gamma = draw_gamma(&mut rng);
        let j = rng.gen_range(1..1024u32);
        let beta = j as f64 / 2048.0;
        let mult = draw_mult(&mut rng);
        records.push(ZeroRecord { beta, gamma, mult });
        records.push(ZeroRecord {
            beta: 1.0 - beta,
            gamma,
            mult,
        });
        pair_gammas.push(gamma);
    }
    for i in 0..spec.n_extra_horizontal {
        let gamma = pair_gammas[i as usize % pair_gammas.len()];
        let mult = draw_mult(&mut rng);
        records.push(ZeroRecord {
            beta: 0.5,
            gamma,
            mult,
        });
    }
    records.sort_by(|p, q| {
        (p.gamma, p.beta)
            .partial_cmp(&(q.gamma, q.beta))
            .unwrap()
    });
    let zs = ZeroSet {
        records,
        range_lo: lo,
        range_hi: hi,
        provenance: Provenance::Synthetic,
        complete: true,
    };
    zs.validate()?;
    Ok(zs)
}

const CACHE_MAGIC: &str = "zeropair-v1";

fn cache_body(zs: &ZeroSet) -> String {
    let mut body = String::new();
    for r in &zs.records {
        // default float formatting is the shortest string that parses back
        // to the same bits, so the round trip is exact
        body.push_str(&format!("{},{},{}\n", r.beta, r.gamma, r.mult));
    }
    body
}

struct LockGuard(std::path::PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

fn acquire_lock(path: &Path) -> Result<LockGuard> {
    let lock = path.with_extension("lock");
    match std::fs::OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(&lock)
    {
        Ok(_) => Ok(LockGuard(lock)),
        Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
            Err(Error::CacheLocked(lock.display().to_string()))
        }
        Err(e) => Err(e.into()),
    }
}

/// Persist a zero set: a versioned header with a body checksum, then one
/// `beta,gamma,mult` line per record. Guarded by a `.lock` sibling file;
/// the write goes to a temp file and is renamed into place.
pub fn store_zeros(zs: &ZeroSet, path: &Path) -> Result<()> {
    zs.validate()?;
    let _lock = acquire_lock(path)?;
    let body = cache_body(zs);
    let sha = hex(&Sha256::digest(body.as_bytes()));
    let header = format!(
        "{CACHE_MAGIC} {} {} {} {} {}\n",
        zs.provenance, zs.range_lo, zs.range_hi, zs.complete, sha
    );
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, header + &body)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Load a zero set written by `store_zeros`; the round trip is exact.
pub fn load_zeros(path: &Path) -> Result<ZeroSet> {
    let text = std::fs::read_to_string(path)?;
    let (header, body) = text.split_once('\n').ok_or(Error::ChecksumMismatch)?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 6 || fields[0] != CACHE_MAGIC {
        return Err(Error::VersionMismatch(format!(
            "expected {CACHE_MAGIC} header, found {:?}",
            fields.first().copied().unwrap_or("")
        )));
    }
    if hex(&Sha256::digest(body.as_bytes())) != fields[5] {
        return Err(Error::ChecksumMismatch);
    }
    let parse_field = |s: &str, what| -> Result<f64> {
        s.parse().map_err(|e| Error::Parse {
            line: 1,
            msg: format!("{what}: {e}"),
        })
    };
    let provenance: Provenance = fields[1].parse()?;
    let range_lo = parse_field(fields[2], "range_lo")?;
    let range_hi = parse_field(fields[3], "range_hi")?;
    let complete = match fields[4] {
        "true" => true,
        "false" => false,
        other => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("complete flag {other:?}"),
            })
        }
    };
    let mut records = Vec::new();
    for (i, line) in body.lines().enumerate() {
        let mut cols = line.split(',');
        let err = |msg: String| Error::Parse {
            line: i + 2,
            msg,
        };
        let mut next = |what: &str| {
            cols.next()
                .ok_or_else(|| err(format!("missing {what}")))
        };
        let beta: f64 = next("beta")?.parse().map_err(|e| err(format!("beta: {e}")))?;
        let gamma: f64 = next("gamma")?
            .parse()
            .map_err(|e| err(format!("gamma: {e}")))?;
        let mult: u32 = next("mult")?.parse().map_err(|e| err(format!("mult: {e}")))?;
        records.push(ZeroRecord { beta, gamma, mult });
    }
    let zs = ZeroSet {
        records,
        range_lo,
        range_hi,
        provenance,
        complete,
    };
    zs.validate()?;
    Ok(zs)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn scan_finds_first_zero_alone() {
        let zs = scan_zeros(2.0, 20.0, &cfg()).unwrap();
        assert_eq!(zs.records.len(), 1);
        let g = zs.records[0].gamma;
        assert!((g - 14.13472514173469379).abs() < 1e-8, "gamma = {g}");
        assert!(g > 14.1);
        assert!(zs.complete);
        assert_eq!(zs.provenance, Provenance::Computed);
    }

    #[test]
    fn scan_to_100_yields_29_zeros() {
        let zs = scan_zeros(2.0, 100.0, &cfg()).unwrap();
        assert_eq!(zs.records.len(), 29);
        let g: Vec<f64> = zs.records.iter().map(|r| r.gamma).collect();
        // the scan locates zeros of the evaluated Z, whose own error near
        // t = 50..100 is a few 1e-6; the roots inherit that envelope
        assert!((g[9] - 49.773832477672302182).abs() < 5e-6, "g10 = {}", g[9]);
        assert!((g[28] - 98.831194218193692233).abs() < 5e-6, "g29 = {}", g[28]);
    }

    #[test]
    fn scan_subrange() {
        let zs = scan_zeros(20.0, 30.0, &cfg()).unwrap();
        let g: Vec<f64> = zs.records.iter().map(|r| r.gamma).collect();
        assert_eq!(g.len(), 2);
        assert!((g[0] - 21.022039638771554993).abs() < 1e-8);
        assert!((g[1] - 25.010857580145688763).abs() < 1e-8);
    }

    #[test]
    fn scan_rejects_bad_range() {
        assert!(scan_zeros(1.0, 20.0, &cfg()).is_err());
        assert!(scan_zeros(30.0, 20.0, &cfg()).is_err());
        assert!(scan_zeros(2.0, 2.0e6, &cfg()).is_err());
    }

    #[test]
    fn refine_matches_oracle() {
        let g1 = refine_zero(14.0, 14.2, 1e-9, &cfg()).unwrap();
        assert!((g1 - 14.13472514173469379).abs() < 1e-9);
        let g2 = refine_zero(21.0, 21.1, 1e-9, &cfg()).unwrap();
        assert!((g2 - 21.022039638771554993).abs() < 1e-9);
    }

    #[test]
    fn refine_errors() {
        assert!(matches!(
            refine_zero(15.0, 16.0, 1e-9, &cfg()),
            Err(Error::NoSignChange { .. })
        ));
        assert!(refine_zero(14.0, 14.2, 1e-13, &cfg()).is_err());
    }

    #[test]
    fn rvm_passes_on_scanned_set() {
        let zs = scan_zeros(2.0, 100.0, &cfg()).unwrap();
        let rep = rvm_consistency(&zs, 100.0, &cfg()).unwrap();
        assert_eq!(rep.count, 29);
        assert!((rep.rvm_value - 29.0).abs() < 0.5);
        assert!((rep.rvm_value - 0.875 - rep.s_at_t - 28.127343587325347988).abs() < 1e-6);
        assert!(rep.pass);
    }

    #[test]
    fn rvm_empty_below_first_zero() {
        let zs = scan_zeros(2.0, 20.0, &cfg()).unwrap();
        let rep = rvm_consistency(&zs, 10.0, &cfg()).unwrap();
        assert_eq!(rep.count, 0);
        assert!(rep.pass);
    }

    #[test]
    fn rvm_detects_deleted_record() {
        let mut zs = scan_zeros(2.0, 100.0, &cfg()).unwrap();
        zs.records.pop();
        let rep = rvm_consistency(&zs, 100.0, &cfg()).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn rvm_subrange_set_counts_missing_head() {
        let zs = scan_zeros(20.0, 30.0, &cfg()).unwrap();
        let rep = rvm_consistency(&zs, 30.0, &cfg()).unwrap();
        assert_eq!(rep.count, 3); // one head zero plus two scanned
        assert!(rep.pass);
    }

    #[test]
    fn ingest_file_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("zeros.txt");
        std::fs::write(&path, "# first three\n14.134725142\n21.022039639\n25.010857580\n")
            .unwrap();
        let zs = ingest_zeros(path.to_str().unwrap(), None, true, 5).unwrap();
        assert_eq!(zs.records.len(), 3);
        assert_eq!(zs.provenance, Provenance::Ingested);
        assert!(zs.complete);
        assert_eq!(zs.records[0].beta, 0.5);
        assert_eq!(zs.records[0].mult, 1);
    }

    #[test]
    fn ingest_empty_is_incomplete() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.txt");
        std::fs::write(&path, "").unwrap();
        let zs = ingest_zeros(path.to_str().unwrap(), None, true, 5).unwrap();
        assert!(zs.records.is_empty());
        assert!(!zs.complete);
    }

    #[test]
    fn ingest_parse_and_monotonicity_errors() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.txt");
        std::fs::write(&bad, "abc\n").unwrap();
        match ingest_zeros(bad.to_str().unwrap(), None, false, 5) {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("expected parse error at line 1, got {other:?}"),
        }
        let mono = dir.path().join("mono.txt");
        std::fs::write(&mono, "14.1\n14.0\n").unwrap();
        assert!(matches!(
            ingest_zeros(mono.to_str().unwrap(), None, false, 5),
            Err(Error::InvalidSet(_))
        ));
    }

    fn demo_spec() -> SyntheticSpec {
        SyntheticSpec {
            n_critical: 5,
            n_quadruple_pairs: 3,
            n_extra_horizontal: 2,
            mult_distribution: vec![(1, 0.7), (2, 0.3)],
            range: (10.0, 500.0),
            seed: 42,
        }
    }

    #[test]
    fn synthesize_mirrors_offline_zeros() {
        let zs = synthesize(&demo_spec()).unwrap();
        for r in zs.records.iter().filter(|r| r.beta != 0.5) {
            let mirror = zs
                .records
                .iter()
                .find(|q| q.gamma == r.gamma && q.beta == 1.0 - r.beta);
            let m = mirror.expect("mirror record missing");
            assert_eq!(m.mult, r.mult);
        }
        assert!(zs.complete);
        assert_eq!(zs.provenance, Provenance::Synthetic);
        // 5 critical + 3 pairs (2 records each) + 2 extras
        assert_eq!(zs.records.len(), 13);
    }

    #[test]
    fn synthesize_is_deterministic() {
        let a = synthesize(&demo_spec()).unwrap();
        let b = synthesize(&demo_spec()).unwrap();
        assert_eq!(a, b);
        let c = synthesize(&SyntheticSpec {
            seed: 43,
            ..demo_spec()
        })
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn synthesize_single_pair_closure() {
        let zs = synthesize(&SyntheticSpec {
            n_critical: 0,
            n_quadruple_pairs: 1,
            n_extra_horizontal: 0,
            mult_distribution: vec![],
            range: (1.0, 100.0),
            seed: 7,
        })
        .unwrap();
        assert_eq!(zs.records.len(), 2);
        let (a, b) = (&zs.records[0], &zs.records[1]);
        assert_eq!(a.gamma, b.gamma);
        assert!(a.beta != 0.5 && b.beta == 1.0 - a.beta);
    }

    #[test]
    fn synthesize_mult_distribution() {
        let zs = synthesize(&SyntheticSpec {
            n_critical: 1,
            n_quadruple_pairs: 0,
            n_extra_horizontal: 0,
            mult_distribution: vec![(2, 1.0)],
            range: (1.0, 100.0),
            seed: 1,
        })
        .unwrap();
        assert_eq!(zs.records.len(), 1);
        assert_eq!(zs.records[0].mult, 2);
    }

    #[test]
    fn synthesize_rejects_orphan_extras() {
        assert!(matches!(
            synthesize(&SyntheticSpec {
                n_critical: 1,
                n_quadruple_pairs: 0,
                n_extra_horizontal: 1,
                mult_distribution: vec![],
                range: (1.0, 10.0),
                seed: 0,
            }),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn store_load_round_trip() {
        let zs = synthesize(&demo_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.zp");
        store_zeros(&zs, &path).unwrap();
        let back = load_zeros(&path).unwrap();
        assert_eq!(zs, back);
    }

    #[test]
    fn load_rejects_wrong_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.zp");
        std::fs::write(&path, "otherformat-v9 computed 1 2 true 00\n").unwrap();
        assert!(matches!(load_zeros(&path), Err(Error::VersionMismatch(_))));
    }

    #[test]
    fn load_rejects_truncation() {
        let zs = synthesize(&demo_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.zp");
        store_zeros(&zs, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let cut = text.len() - 10;
        std::fs::write(&path, &text[..cut]).unwrap();
        assert!(matches!(load_zeros(&path), Err(Error::ChecksumMismatch)));
    }

    #[test]
    fn store_respects_lock() {
        let zs = synthesize(&demo_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.zp");
        std::fs::write(path.with_extension("lock"), "").unwrap();
        assert!(matches!(
            store_zeros(&zs, &path),
            Err(Error::CacheLocked(_))
        ));
        std::fs::remove_file(path.with_extension("lock")).unwrap();
        store_zeros(&zs, &path).unwrap();
        assert!(!path.with_extension("lock").exists(), "lock must be released");
    }

    #[test]
    fn count_to_is_weighted() {
        let zs = synthesize(&SyntheticSpec {
            n_critical: 1,
            n_quadruple_pairs: 0,
            n_extra_horizontal: 0,
            mult_distribution: vec![(3, 1.0)],
            range: (1.0, 10.0),
            seed: 5,
        })
        .unwrap();
        assert_eq!(zs.count_to(10.0), 3);
        assert_eq!(zs.weighted_count(), 3);
    }
}

//! Critical-line evaluation: the Riemann-Siegel theta function, Hardy's Z,
//! Euler-Maclaurin zeta in the right half-plane, and the argument function
//! S(t) tracked continuously along a fixed path.

use crate::error::{Error, Result};
use crate::rs_tables::{RS_C0, RS_C1, RS_C2, RS_C3};
use crate::ComplexValue;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Knobs for the evaluators. The defaults favor speed over the last few
/// digits; see the accuracy notes on each function.
#[derive(Debug, Clone)]
pub struct EvalConfig {
    /// Number of Riemann-Siegel remainder terms (0..=4).
    pub rs_correction_terms: u32,
    /// Number of Euler-Maclaurin tail corrections (1..=15).
    pub em_terms: u32,
    /// Below this height Z(t) is computed from the Euler-Maclaurin zeta
    /// instead of the Riemann-Siegel sum.
    pub em_crossover_t: f64,
    /// Initial sigma step when tracking arg zeta toward the critical line.
    pub arg_path_step: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            rs_correction_terms: 3,
            em_terms: 12,
            em_crossover_t: 30.0,
            arg_path_step: 0.05,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rs_correction_terms > 4 {
            return Err(Error::InvalidConfig(format!(
                "rs_correction_terms = {} exceeds the 4 implemented terms",
                self.rs_correction_terms
            )));
        }
        if !(1..=15).contains(&self.em_terms) {
            return Err(Error::InvalidConfig(format!(
                "em_terms = {} outside 1..=15",
                self.em_terms
            )));
        }
        if !(self.em_crossover_t >= 10.0) {
            return Err(Error::InvalidConfig(format!(
                "em_crossover_t = {} below 10",
                self.em_crossover_t
            )));
        }
        if !(self.arg_path_step > 0.0 && self.arg_path_step <= 0.5) {
            return Err(Error::InvalidConfig(format!(
                "arg_path_step = {} outside (0, 0.5]",
                self.arg_path_step
            )));
        }
        Ok(())
    }
}

// B_{2k}/(2k)! for the Euler-Maclaurin tail, k = 1..=15.
const B2K_OVER_FACT: [f64; 15] = [
    8.333333333333333e-2,
    -1.3888888888888889e-3,
    3.30687830687830688e-5,
    -8.26719576719576720e-7,
    2.08767569878680990e-8,
    -5.28419013868749318e-10,
    1.33825365306846788e-11,
    -3.38968029632258287e-13,
    8.58606205627784456e-15,
    -2.17486869855806187e-16,
    5.50900282836022952e-18,
    -1.39544646858125233e-19,
    3.53470703962946747e-21,
    -8.95351742703754685e-23,
    2.26795245233768306e-24,
];

// Lanczos g = 7, n = 9 coefficients for log-Gamma in the right half-plane.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_C: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// log Gamma(z) for Re(z) > 0, accurate to ~1e-13 relative.
fn lgamma_complex(z: Complex64) -> Complex64 {
    // Shift so the Lanczos kernel sees Re >= 2.25; the recurrence
    // lgamma(z) = lgamma(z + n) - sum log(z + k) is exact.
    let mut shift = Complex64::new(0.0, 0.0);
    let mut zz = z;
    while zz.re < 2.0 {
        shift += zz.ln();
        zz += 1.0;
    }
    let zm1 = zz - 1.0;
    let mut acc = Complex64::new(LANCZOS_C[0], 0.0);
    for (i, &c) in LANCZOS_C.iter().enumerate().skip(1) {
        acc += c / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    let half_log_2pi = 0.918_938_533_204_672_74; // log(2 pi)/2
    (zm1 + 0.5) * t.ln() - t + half_log_2pi + acc.ln() - shift
}

/// Riemann-Siegel theta.
///
/// For t >= 10 the asymptotic expansion through the 1/t^9 term is used
/// (absolute error below 3e-14 at t = 10, falling fast); for 1 <= t < 10
/// theta comes from log-Gamma directly. Requires t >= 1.
pub fn rs_theta(t: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::Domain {
            what: "rs_theta t",
            value: t,
        });
    }
    if t < 10.0 {
        let lg = lgamma_complex(Complex64::new(0.25, t / 2.0));
        return Ok(lg.im - t / 2.0 * PI.ln());
    }
    let x = t / (2.0 * PI);
    let t2 = t * t;
    let inv = 1.0 / t;
    let series = inv
        * (1.0 / 48.0
            + (7.0 / 5760.0 + (31.0 / 80640.0 + (127.0 / 430080.0 + 511.0 / (1216512.0 * t2) / t2) / t2) / t2)
                / t2);
    Ok(t / 2.0 * x.ln() - t / 2.0 - PI / 8.0 + series)
}

/// d theta/dt, same domain as `rs_theta`. Only the leading terms; the
/// neglected part is O(1/t^2).
pub fn rs_theta_deriv(t: f64) -> f64 {
    0.5 * (t / (2.0 * PI)).ln()
}

fn horner(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

/// Hardy's Z(t) = e^{i theta(t)} zeta(1/2 + it), real for real t.
///
/// Below `cfg.em_crossover_t` the Euler-Maclaurin route is used (error
/// ~1e-12). Above it, the Riemann-Siegel main sum plus `rs_correction_terms`
/// remainder terms; measured absolute error with the default 3 terms is
/// ~1e-5 at t = 30, ~2e-6 at t = 100, ~3e-8 at t = 1000, ~2e-10 at t = 1e4.
pub fn hardy_z(t: f64, cfg: &EvalConfig) -> Result<f64> {
    if !(t >= 2.0) {
        return Err(Error::Domain {
            what: "hardy_z t",
            value: t,
        });
    }
    cfg.validate()?;
    if t < cfg.em_crossover_t {
        let z = zeta_em(Complex64::new(0.5, t), cfg)?;
        let theta = rs_theta(t)?;
        let rotated = Complex64::from_polar(1.0, theta) * z;
        debug_assert!(rotated.im.abs() < 1e-6 * rotated.re.abs().max(1.0));
        return Ok(rotated.re);
    }
    let theta = rs_theta(t)?;
    let a = (t / (2.0 * PI)).sqrt();
    let n = a.floor();
    let p = a - n;
    let n_main = n as usize;
    let mut main = 0.0;
    for k in 1..=n_main {
        let kf = k as f64;
        main += (theta - t * kf.ln()).cos() / kf.sqrt();
    }
    main *= 2.0;
    let z = 2.0 * p - 1.0;
    let tables: [&[f64]; 4] = [&RS_C0, &RS_C1, &RS_C2, &RS_C3];
    let mut rem = 0.0;
    let mut scale = 1.0;
    for j in 0..cfg.rs_correction_terms.min(4) as usize {
        rem += horner(tables[j], z) * scale;
        scale /= a;
    }
    let sign = if n_main % 2 == 1 { 1.0 } else { -1.0 };
    Ok(main + sign * rem / a.sqrt())
}

/// zeta(s) by Euler-Maclaurin for Re(s) > 0, s != 1.
///
/// Relative error is below 1e-10 for |Im s| <= 1e3 with the default twelve
/// tail terms, degrading gracefully at larger heights. Cost grows linearly
/// with |Im s|.
pub fn zeta_em(s: ComplexValue, cfg: &EvalConfig) -> Result<ComplexValue> {
    cfg.validate()?;
    if !(s.re > 0.0) || !s.im.is_finite() {
        return Err(Error::Domain {
            what: "zeta_em re(s)",
            value: s.re,
        });
    }
    if (s - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
        return Err(Error::Pole);
    }
    let m = cfg.em_terms as usize;
    // Truncation point: keeps (|s| + 2m)/(2 pi N) comfortably below 1/pi so
    // the first omitted tail term is ~1e-13 relative.
    let n = 16.0_f64.max((s.im.abs() / 2.0).ceil() + 4.0 * m as f64) as usize;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        let kf = k as f64;
        sum += (-s * kf.ln()).exp();
    }
    let nf = n as f64;
    let n_pow = (-s * nf.ln()).exp(); // N^{-s}
    sum += 0.5 * n_pow;
    sum += n_pow * nf / (s - 1.0); // N^{1-s}/(s-1)
    // Tail: sum_k B_{2k}/(2k)! * N^{1-s-2k} * prod_{j=0}^{2k-2} (s + j)
    let inv_n2 = 1.0 / (nf * nf);
    let mut prod = s;
    let mut n_fac = n_pow * nf * inv_n2; // N^{-1-s}
    for (k, &b) in B2K_OVER_FACT.iter().enumerate().take(m) {
        sum += b * prod * n_fac;
        let j = 2.0 * (k as f64 + 1.0);
        prod = prod * (s + (j - 1.0)) * (s + j);
        n_fac *= inv_n2;
    }
    Ok(sum)
}

/// S(t) = (1/pi) arg zeta(1/2 + it), the argument tracked continuously
/// along 2 -> 2 + it -> 1/2 + it.
///
/// On sigma = 2 the Dirichlet series keeps |zeta - 1| <= zeta(2) - 1 < 1, so
/// the value never leaves the right half-plane and the continuous argument
/// at 2 + it is already the principal one; only the horizontal leg needs
/// stepping. The caller must keep t >= 2 and at least ~1e-6 away from a zero
/// ordinate.
pub fn s_direct(t: f64, cfg: &EvalConfig) -> Result<f64> {
    if !(t >= 2.0) {
        return Err(Error::Domain {
            what: "s_direct t",
            value: t,
        });
    }
    cfg.validate()?;
    let at = |sigma: f64| zeta_em(Complex64::new(sigma, t), cfg);
    let mut prev_sigma = 2.0;
    let mut prev = at(prev_sigma)?;
    let mut total = prev.arg(); // vertical leg: principal arg is exact
    while prev_sigma > 0.5 {
        let next_sigma = (prev_sigma - cfg.arg_path_step).max(0.5);
        let next = at(next_sigma)?;
        total += unwrap_arg(&at, prev_sigma, prev, next_sigma, next, 0)?;
        prev_sigma = next_sigma;
        prev = next;
    }
    Ok(total / PI)
}

/// Argument increment from (s0, z0) to (s1, z1), subdividing until each
/// piece turns by less than 0.9 pi.
fn unwrap_arg(
    eval: &dyn Fn(f64) -> Result<Complex64>,
    s0: f64,
    z0: Complex64,
    s1: f64,
    z1: Complex64,
    depth: u32,
) -> Result<f64> {
    let delta = wrap_angle(z1.arg() - z0.arg());
    if delta.abs() < 0.9 * PI {
        return Ok(delta);
    }
    if depth >= 24 {
        return Err(Error::UnwrapFailure {
            sigma: s0,
            t: z0.im,
            min_step: (s0 - s1).abs(),
        });
    }
    let sm = 0.5 * (s0 + s1);
    let zm = eval(sm)?;
    Ok(unwrap_arg(eval, s0, z0, sm, zm, depth + 1)?
        + unwrap_arg(eval, sm, zm, s1, z1, depth + 1)?)
}

fn wrap_angle(a: f64) -> f64 {
    let mut x = a;
    while x > PI {
        x -= 2.0 * PI;
    }
    while x <= -PI {
        x += 2.0 * PI;
    }
    x
}

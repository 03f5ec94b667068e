//! Fixed and adaptive Gauss-Legendre quadrature used by the moment and
//! correlation integrals. All integrands here are smooth between the
//! breakpoints the callers pass in, so an 8-point panel with bisection on
//! disagreement converges fast.

// 8-point Gauss-Legendre nodes (positive half) and weights on [-1, 1].
const GL8_X: [f64; 4] = [
    0.18343464249564980494,
    0.52553240991632898582,
    0.79666647741362673959,
    0.96028985649753623168,
];
const GL8_W: [f64; 4] = [
    0.36268378337836198297,
    0.31370664587788728734,
    0.22238103445337447054,
    0.10122853629037625915,
];

/// One 8-point Gauss-Legendre panel over [a, b].
pub(crate) fn gl8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..4 {
        acc += GL8_W[i] * (f(c + h * GL8_X[i]) + f(c - h * GL8_X[i]));
    }
    acc * h
}

/// Adaptive Gauss-Legendre: bisect until the two-panel refinement agrees
/// with the single panel to `rel_tol` (relative) or 1e-14 absolute.
pub(crate) fn adaptive_gl<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        rel_tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = gl8(f, a, m);
        let right = gl8(f, m, b);
        let refined = left + right;
        let err = (refined - whole).abs();
        if depth >= 48 || err <= rel_tol * refined.abs().max(1e-30) || err <= 1e-14 {
            return refined;
        }
        recurse(f, a, m, left, rel_tol, depth + 1) + recurse(f, m, b, right, rel_tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    recurse(f, a, b, gl8(f, a, b), rel_tol, 0)
}

/// Pairwise (cascade) summation; error grows like log n rather than n.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

//! Shared oracle numerics for the integration tests.
//!
//! Everything in this module is computed independently of the library under
//! test: plain adaptive quadrature, closed-form Gaussian derivatives, and an
//! integral representation for the scaled Bessel values. Test files compare
//! library output against these oracles and against values frozen from them.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`. A minimum recursion depth is forced so that narrow features cannot
/// hide between the initial probe points.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48, 12)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    force: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || (force == 0 && delta.abs() <= 15.0 * tol) {
        left + right + delta / 15.0
    } else {
        let fnext = force.saturating_sub(1);
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, fnext)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, fnext)
    }
}

/// Quadrature of `f` over a partition given by `points`, summing the pieces.
pub fn quad_pieces<F: Fn(f64) -> f64>(f: &F, points: &[f64], tol: f64) -> f64 {
    points
        .windows(2)
        .map(|w| adaptive_simpson(f, w[0], w[1], tol))
        .sum()
}

/// Gaussian density with variance `s`.
pub fn gauss_s(x: f64, s: f64) -> f64 {
    (-x * x / (2.0 * s)).exp() / (2.0 * PI * s).sqrt()
}

/// Gaussian density with standard deviation `sigma`.
pub fn gauss_sigma(x: f64, sigma: f64) -> f64 {
    gauss_s(x, sigma * sigma)
}

/// Gaussian derivative of order `alpha` (0..=4) at standard deviation `sigma`,
/// written out from the Hermite recursion rather than taken from the library.
pub fn gauss_deriv_oracle(x: f64, sigma: f64, alpha: u32) -> f64 {
    let s2 = sigma * sigma;
    let g = gauss_sigma(x, sigma);
    match alpha {
        0 => g,
        1 => -x / s2 * g,
        2 => (x * x - s2) / (s2 * s2) * g,
        3 => -(x * x * x - 3.0 * s2 * x) / (s2 * s2 * s2) * g,
        4 => {
            let x2 = x * x;
            (x2 * x2 - 6.0 * s2 * x2 + 3.0 * s2 * s2) / (s2 * s2 * s2 * s2) * g
        }
        _ => panic!("oracle supports orders 0..=4"),
    }
}

/// Scaled modified Bessel value e^{-s} I_n(s) from the integral representation
/// (1/pi) * Int_0^pi e^{s (cos t - 1)} cos(n t) dt.
pub fn bessel_i_scaled_oracle(n: u32, s: f64) -> f64 {
    let f = |t: f64| (s * (t.cos() - 1.0)).exp() * (n as f64 * t).cos();
    adaptive_simpson(&f, 0.0, PI, 1e-15) / PI
}

/// Gaussian tail-aware integration limit: beyond `cut` the integrands used in
/// these tests are below 1e-18.
pub fn gauss_cut(sigma: f64) -> f64 {
    10.0 * sigma + 10.0
}

/// Central finite difference of order 1 with step `h`.
pub fn fd1<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central finite difference of order 2 with step `h`.
pub fn fd2<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Plain direct convolution of two symmetric-support coefficient arrays
/// (radius-indexed, lengths 2*ra+1 and 2*rb+1), independent of the library.
pub fn conv_arrays(a: &[f64], b: &[f64]) -> Vec<f64> {
    let out_len = a.len() + b.len() - 1;
    let mut out = vec![0.0; out_len];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Deterministic 64-bit mixer for reproducible pseudo-random test signals.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform sample in [-1, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }
}

/// Asserts `|a - b| <= tol` with a readable failure message.
pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!(
        (a - b).abs() <= tol,
        "{what}: {a:.17e} vs {b:.17e} (|diff| = {:.3e}, tol = {tol:.1e})",
        (a - b).abs()
    );
}

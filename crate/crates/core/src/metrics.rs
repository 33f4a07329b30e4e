//! Quality measures for discrete smoothing and derivative kernels.
//!
//! Smoothing kernels are judged by how well their sum, variance, and
//! two-step cascade reproduce the ideal semigroup; derivative kernels by
//! their l1 norm against the continuous Gaussian derivative norm, their
//! spatial spread, and their own cascade identity. Monomial probes measure
//! the response to polynomial inputs at the origin.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernels::{
    convolve_kernels, derivative_kernel, smoothing_kernel, DerivKernelFamily, DiscreteKernel1D,
    KernelFamily, KernelTag, TruncationPolicy,
};
use crate::specfun::{ref_l1_norm, ref_spread, DerivOrder, ScaleParam};

/// A single measured quantity: a finite number, or a flagged singularity
/// (for measures that are undefined on the given kernel, such as the
/// variance of a zero-sum kernel).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricValue {
    Value(f64),
    Singular,
}

impl MetricValue {
    pub fn value(&self) -> Option<f64> {
        match *self {
            MetricValue::Value(v) => Some(v),
            MetricValue::Singular => None,
        }
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, MetricValue::Singular)
    }
}

/// Named measurements for one kernel family at one scale, in a fixed
/// (alphabetical) entry order.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    family: &'static str,
    alpha: Option<u32>,
    paired_smoother: Option<&'static str>,
    sigma: f64,
    entries: Vec<(&'static str, MetricValue)>,
}

impl MetricReport {
    pub fn family(&self) -> &'static str {
        self.family
    }

    /// Derivative order for derivative reports, absent for smoothing ones.
    pub fn alpha(&self) -> Option<u32> {
        self.alpha
    }

    /// Smoothing family used as the cascade step of a derivative report.
    pub fn paired_smoother(&self) -> Option<&'static str> {
        self.paired_smoother
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn entries(&self) -> &[(&'static str, MetricValue)] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&MetricValue> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v)
    }
}

/// Accumulates `term(n, T(n))` over the support as mirrored pairs from the
/// inside out with the center last, so that symmetric pairs add exactly and
/// antisymmetric pairs cancel exactly.
fn mirrored_sum(k: &DiscreteKernel1D, term: impl Fn(i64, f64) -> f64) -> f64 {
    let r = k.radius() as i64;
    let mut acc = 0.0;
    for n in 1..=r {
        acc += term(-n, k.coeff(-n)) + term(n, k.coeff(n));
    }
    acc + term(0, k.coeff(0))
}

fn int_pow(base: f64, exponent: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exponent {
        acc *= base;
    }
    acc
}

/// Sum of absolute coefficient values.
pub fn l1_norm(k: &DiscreteKernel1D) -> f64 {
    mirrored_sum(k, |_, c| if c < 0.0 { -c } else { c })
}

/// Variance of the coefficient distribution, `m2/m0 - (m1/m0)^2`.
///
/// Zero-sum kernels (every odd-order difference or derivative kernel) have
/// no such distribution; use [`spread_measure`] for those.
pub fn kernel_variance(k: &DiscreteKernel1D) -> Result<f64> {
    let m0 = mirrored_sum(k, |_, c| c);
    if m0 == 0.0 {
        return Err(Error::UndefinedVariance);
    }
    let m1 = mirrored_sum(k, |n, c| n as f64 * c);
    let m2 = mirrored_sum(k, |n, c| (n * n) as f64 * c);
    let mean = m1 / m0;
    Ok(m2 / m0 - mean * mean)
}

/// Standard deviation of the distribution proportional to `|T(n)|`.
pub fn spread_measure(k: &DiscreteKernel1D) -> Result<f64> {
    let l1 = l1_norm(k);
    if l1 == 0.0 {
        return Err(Error::EmptyKernel);
    }
    let m1 = mirrored_sum(k, |n, c| n as f64 * abs(c));
    let m2 = mirrored_sum(k, |n, c| (n * n) as f64 * abs(c));
    let mean = m1 / l1;
    let variance = m2 / l1 - mean * mean;
    Ok(libm::sqrt(if variance > 0.0 { variance } else { 0.0 }))
}

fn abs(c: f64) -> f64 {
    if c < 0.0 {
        -c
    } else {
        c
    }
}

/// l1 distance between two odd-length coefficient arrays aligned at their
/// centers, with zero extension to the wider support.
fn l1_diff_centered(a: &[f64], b: &[f64]) -> f64 {
    let ra = (a.len() / 2) as i64;
    let rb = (b.len() / 2) as i64;
    let r = ra.max(rb);
    let mut acc = 0.0;
    for n in -r..=r {
        let av = if n.abs() <= ra {
            a[(n + ra) as usize]
        } else {
            0.0
        };
        let bv = if n.abs() <= rb {
            b[(n + rb) as usize]
        } else {
            0.0
        };
        acc += abs(av - bv);
    }
    acc
}

fn doubled(s: ScaleParam) -> ScaleParam {
    ScaleParam::new(2.0 * s.s()).expect("doubling a valid scale stays valid")
}

/// Smoothing-kernel error report at one scale: normalization error
/// `E_norm = sum T - 1`, absolute scale difference `E_delta_s = V(T) - s`,
/// relative scale difference `E_relscale = sqrt(V(T)/s) - 1`, and the
/// cascade error `|T(s) * T(s) - T(2s)|_1 / |T(2s)|_1`.
///
/// `E_relscale` is derived from the reported `E_delta_s`, so the identity
/// `E_relscale = sqrt((s + E_delta_s)/s) - 1` holds exactly.
pub fn smoothing_error_report(
    family: KernelFamily,
    s: ScaleParam,
    policy: TruncationPolicy,
) -> MetricReport {
    let k = smoothing_kernel(family, s, policy);
    let e_norm = k.sum() - 1.0;
    let (e_ds, e_rel) = match kernel_variance(&k) {
        Ok(v) => {
            let e_ds = v - s.s();
            let e_rel = libm::sqrt((s.s() + e_ds) / s.s()) - 1.0;
            (MetricValue::Value(e_ds), MetricValue::Value(e_rel))
        }
        Err(_) => (MetricValue::Singular, MetricValue::Singular),
    };

    let k2 = smoothing_kernel(family, doubled(s), policy);
    let cascade = convolve_kernels(&k, &k, KernelTag::Smoothing(family), doubled(s).s());
    let e_cascade = l1_diff_centered(cascade.coeffs(), k2.coeffs()) / l1_norm(&k2);

    MetricReport {
        family: family.name(),
        alpha: None,
        paired_smoother: None,
        sigma: s.sigma(),
        entries: alloc::vec![
            ("E_cascade", MetricValue::Value(e_cascade)),
            ("E_delta_s", e_ds),
            ("E_norm", MetricValue::Value(e_norm)),
            ("E_relscale", e_rel),
        ],
    }
}

/// Spread of the derivative kernel minus the continuous reference spread
/// `S_alpha(1) * sigma`.
pub fn spread_offset(
    family: DerivKernelFamily,
    alpha: DerivOrder,
    s: ScaleParam,
    policy: TruncationPolicy,
) -> Result<f64> {
    let k = derivative_kernel(family, alpha, s, policy)?;
    Ok(spread_measure(&k)? - ref_spread(alpha, s.sigma())?)
}

/// Derivative-kernel error report at one scale: normalization error
/// `E_norm = |T_alpha|_1 / N_alpha(sigma) - 1`, the spread and its offset
/// from the continuous reference, and the cascade error against smoothing
/// by the family's paired smoother:
/// `|T_smooth(s) * T_alpha(s) - T_alpha(2s)|_1 / |T_alpha(2s)|_1`.
pub fn derivative_error_report(
    family: DerivKernelFamily,
    alpha: DerivOrder,
    s: ScaleParam,
    policy: TruncationPolicy,
) -> Result<MetricReport> {
    let k = derivative_kernel(family, alpha, s, policy)?;
    let e_norm = l1_norm(&k) / ref_l1_norm(alpha, s.sigma())? - 1.0;
    let spread = spread_measure(&k)?;
    let offset = spread - ref_spread(alpha, s.sigma())?;

    let smoother = smoothing_kernel(family.paired_smoothing(), s, policy);
    let k2 = derivative_kernel(family, alpha, doubled(s), policy)?;
    let cascade = convolve_kernels(&smoother, &k, k.tag(), doubled(s).s());
    let e_cascade = l1_diff_centered(cascade.coeffs(), k2.coeffs()) / l1_norm(&k2);

    Ok(MetricReport {
        family: family.name(),
        alpha: Some(alpha.get()),
        paired_smoother: Some(family.paired_smoothing().name()),
        sigma: s.sigma(),
        entries: alloc::vec![
            ("E_cascade", MetricValue::Value(e_cascade)),
            ("E_norm", MetricValue::Value(e_norm)),
            ("spread", MetricValue::Value(spread)),
            ("spread_offset", MetricValue::Value(offset)),
        ],
    })
}

/// Response of the derivative kernel to the monomial `x^degree` at `x = 0`:
/// `P = sum_n T(n) (-n)^degree`.
///
/// The sum runs over mirrored pairs, so responses that vanish by parity
/// (odd kernel with even monomial and vice versa) are exactly zero.
pub fn monomial_response(
    family: DerivKernelFamily,
    alpha: DerivOrder,
    degree: DerivOrder,
    s: ScaleParam,
    policy: TruncationPolicy,
) -> Result<f64> {
    let k = derivative_kernel(family, alpha, s, policy)?;
    Ok(mirrored_sum(&k, |n, c| {
        c * int_pow(-n as f64, degree.get())
    }))
}

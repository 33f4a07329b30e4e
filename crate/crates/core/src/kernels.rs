//! Kernel construction: support truncation, the four smoothing families,
//! central difference masks, and the five derivative families.
//!
//! All kernels are dense coefficient arrays over a symmetric integer support
//! `[-N, N]`, stored as convolution kernels: a kernel `T` acts on a signal
//! `f` as `L(x) = sum_n T(n) f(x - n)`. Central difference operators are
//! conventionally written as correlation stencils, so their odd orders are
//! stored index-reflected here; see [`central_difference_mask`].

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::specfun::{
    bessel_i_scaled_seq, erg, erg_tail, gauss, gauss_deriv, DerivOrder, ScaleParam,
};

/// Smoothing kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    /// Sampled Gaussian `T(n) = g(n; s)`.
    Sampled,
    /// Sampled Gaussian normalized to unit sum over the truncated support.
    NormSampled,
    /// Integrated Gaussian `T(n) = erg(n + 1/2; s) - erg(n - 1/2; s)`.
    Integrated,
    /// Discrete analogue of the Gaussian `T(n) = e^{-s} I_n(s)`.
    DiscAnalogue,
}

impl KernelFamily {
    /// All four families, in canonical order.
    pub const ALL: [KernelFamily; 4] = [
        KernelFamily::Sampled,
        KernelFamily::NormSampled,
        KernelFamily::Integrated,
        KernelFamily::DiscAnalogue,
    ];

    /// Stable lowercase identifier used in CSV output and CLI flags.
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Sampled => "sampled",
            KernelFamily::NormSampled => "normsampled",
            KernelFamily::Integrated => "integrated",
            KernelFamily::DiscAnalogue => "disc",
        }
    }

    /// Inverse of [`KernelFamily::name`].
    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Derivative kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivKernelFamily {
    /// Sampled Gaussian derivative `T(n) = g_{x^alpha}(n; s)`.
    Sampled,
    /// Integrated Gaussian derivative, cell differences of `g_{x^(alpha-1)}`.
    Integrated,
    /// Central differences of the discrete analogue of the Gaussian.
    DiscAnalogue,
    /// Central differences of the normalized sampled Gaussian.
    HybridSampled,
    /// Central differences of the integrated Gaussian.
    HybridIntegrated,
}

impl DerivKernelFamily {
    /// All five families, in canonical order.
    pub const ALL: [DerivKernelFamily; 5] = [
        DerivKernelFamily::Sampled,
        DerivKernelFamily::Integrated,
        DerivKernelFamily::DiscAnalogue,
        DerivKernelFamily::HybridSampled,
        DerivKernelFamily::HybridIntegrated,
    ];

    /// Stable lowercase identifier used in CSV output and CLI flags.
    pub fn name(self) -> &'static str {
        match self {
            DerivKernelFamily::Sampled => "sampled",
            DerivKernelFamily::Integrated => "integrated",
            DerivKernelFamily::DiscAnalogue => "disc",
            DerivKernelFamily::HybridSampled => "hybridsampled",
            DerivKernelFamily::HybridIntegrated => "hybridintegrated",
        }
    }

    /// Inverse of [`DerivKernelFamily::name`].
    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    /// The smoothing family this derivative family is built on, used for
    /// cross-axis smoothing in 2-D and for cascade comparisons.
    pub fn paired_smoothing(self) -> KernelFamily {
        match self {
            DerivKernelFamily::Sampled => KernelFamily::Sampled,
            DerivKernelFamily::Integrated => KernelFamily::Integrated,
            DerivKernelFamily::DiscAnalogue => KernelFamily::DiscAnalogue,
            DerivKernelFamily::HybridSampled => KernelFamily::NormSampled,
            DerivKernelFamily::HybridIntegrated => KernelFamily::Integrated,
        }
    }
}

/// Provenance tag carried by a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelTag {
    /// A smoothing kernel of the given family.
    Smoothing(KernelFamily),
    /// A derivative kernel of the given family and order.
    Derivative {
        family: DerivKernelFamily,
        order: u32,
    },
    /// A pure central difference operator of the given order.
    Difference { order: u32 },
}

/// Support truncation policy: the smallest radius `N >= 1` is used for which
/// the continuous two-sided tail mass `2 (1 - erg(N; s))` is at most
/// `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    epsilon: f64,
}

impl TruncationPolicy {
    /// Validates a truncation threshold in the open interval (0, 0.1).
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_finite() && epsilon > 0.0 && epsilon < 0.1 {
            Ok(TruncationPolicy { epsilon })
        } else {
            Err(Error::InvalidEpsilon { value: epsilon })
        }
    }

    /// The tail-mass threshold.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Default for TruncationPolicy {
    /// The default threshold of 1e-8.
    fn default() -> Self {
        TruncationPolicy { epsilon: 1e-8 }
    }
}

/// A dense 1-D kernel over the symmetric support `[-radius, radius]`.
///
/// `coeffs()[i]` is the coefficient at `n = i - radius`. Kernels act by
/// convolution: `L(x) = sum_n coeff(n) f(x - n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteKernel1D {
    radius: usize,
    coeffs: Vec<f64>,
    scale: f64,
    tag: KernelTag,
}

impl DiscreteKernel1D {
    /// Builds a kernel from a dense coefficient array of odd length.
    pub fn from_parts(coeffs: Vec<f64>, scale: f64, tag: KernelTag) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() % 2 == 0 {
            return Err(Error::MismatchedLengths {
                left: coeffs.len(),
                right: coeffs.len() + 1,
            });
        }
        for &c in &coeffs {
            if !c.is_finite() {
                return Err(Error::NegativeScale { value: c });
            }
        }
        let radius = coeffs.len() / 2;
        Ok(DiscreteKernel1D {
            radius,
            coeffs,
            scale,
            tag,
        })
    }

    fn new_unchecked(coeffs: Vec<f64>, scale: f64, tag: KernelTag) -> Self {
        let radius = coeffs.len() / 2;
        DiscreteKernel1D {
            radius,
            coeffs,
            scale,
            tag,
        }
    }

    /// Support radius `N`.
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Number of coefficients, `2 N + 1`.
    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Dense coefficients, index `i` holding the value at `n = i - radius`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient at offset `n`, zero outside the support.
    pub fn coeff(&self, n: i64) -> f64 {
        let idx = n + self.radius as i64;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            0.0
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// The nominal scale `s` the kernel was built for (zero for difference
    /// masks).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The provenance tag.
    pub fn tag(&self) -> KernelTag {
        self.tag
    }

    /// Iterates `(n, coeff(n))` over the support in ascending `n`.
    pub fn indexed(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let radius = self.radius as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - radius, c))
    }

    /// Sum of the coefficients, accumulated as mirrored pairs from the inside
    /// out with the center added last. Symmetric pairs add exactly and
    /// antisymmetric pairs cancel exactly, so unit-normalized kernels sum to
    /// exactly 1 and odd kernels to exactly 0.
    pub fn sum(&self) -> f64 {
        let r = self.radius;
        let mut acc = 0.0;
        for n in 1..=r {
            acc += self.coeffs[r - n] + self.coeffs[r + n];
        }
        acc + self.coeffs[r]
    }
}

/// Smallest support radius `N >= 1` with `2 (1 - erg(N; s)) <= epsilon`.
pub fn truncation_radius(s: ScaleParam, epsilon: f64) -> Result<usize> {
    let policy = TruncationPolicy::new(epsilon)?;
    Ok(radius_for(s, policy))
}

fn radius_for(s: ScaleParam, policy: TruncationPolicy) -> usize {
    let mut n = 1usize;
    while 2.0 * erg_tail(n as f64, s) > policy.epsilon() {
        n += 1;
    }
    n
}

/// Builds a smoothing kernel of the given family at scale `s`.
///
/// The support radius comes from [`truncation_radius`]. The discrete
/// analogue has heavier tails than the continuous Gaussian at small scales
/// (factorial rather than Gaussian decay), so its radius is extended until
/// the kernel's own tail mass is at most `epsilon`; the continuous bound is
/// already a valid tail bound for the other families.
pub fn smoothing_kernel(
    family: KernelFamily,
    s: ScaleParam,
    policy: TruncationPolicy,
) -> DiscreteKernel1D {
    let radius = radius_for(s, policy);
    let half: Vec<f64> = match family {
        KernelFamily::Sampled | KernelFamily::NormSampled => {
            (0..=radius).map(|n| gauss(n as f64, s)).collect()
        }
        KernelFamily::Integrated => (0..=radius)
            .map(|n| erg(n as f64 + 0.5, s) - erg(n as f64 - 0.5, s))
            .collect(),
        KernelFamily::DiscAnalogue => disc_analogue_half(s, radius, policy.epsilon()),
    };

    let mut coeffs = mirror_even(&half);
    if family == KernelFamily::NormSampled {
        normalize_to_unit_sum(&mut coeffs);
    }
    DiscreteKernel1D::new_unchecked(coeffs, s.s(), KernelTag::Smoothing(family))
}

/// Half profile of the discrete analogue with radius at least `base` and
/// tail mass `2 sum_{n > N} e^{-s} I_n(s)` at most `epsilon`.
fn disc_analogue_half(s: ScaleParam, base: usize, epsilon: f64) -> Vec<f64> {
    let sv = s.s();
    let hi = {
        let generous = (sv + 12.0 * libm::sqrt(sv) + 60.0) as usize;
        if base + 8 > generous {
            base + 8
        } else {
            generous
        }
    };
    let seq = bessel_i_scaled_seq(hi as u32, sv).expect("scale is validated positive");

    // Walk inward while the remaining tail stays under the threshold; the
    // tail is accumulated from the far end, smallest terms first.
    let mut tail = 0.0;
    let mut radius = hi;
    let mut n = hi;
    loop {
        if tail <= epsilon && n >= base {
            radius = n;
        } else {
            break;
        }
        if n == 0 {
            break;
        }
        tail += 2.0 * seq[n];
        n -= 1;
    }
    seq[..=radius].to_vec()
}

/// Mirrors a half profile `half[0..=N]` into a full symmetric array.
fn mirror_even(half: &[f64]) -> Vec<f64> {
    let radius = half.len() - 1;
    let mut coeffs = vec![0.0; 2 * radius + 1];
    for (n, &c) in half.iter().enumerate() {
        coeffs[radius + n] = c;
        coeffs[radius - n] = c;
    }
    coeffs
}

/// Mirrors a half profile with the parity sign of order `alpha`; odd orders
/// get an exact zero at the center.
fn mirror_with_parity(half: &[f64], alpha: u32) -> Vec<f64> {
    let radius = half.len() - 1;
    let sign = if alpha % 2 == 0 { 1.0 } else { -1.0 };
    let mut coeffs = vec![0.0; 2 * radius + 1];
    coeffs[radius] = if alpha % 2 == 0 { half[0] } else { 0.0 };
    for (n, &c) in half.iter().enumerate().skip(1) {
        coeffs[radius + n] = c;
        coeffs[radius - n] = sign * c;
    }
    coeffs
}

/// Divides by the support sum, then fixes the center coefficient so that the
/// mirrored-pair summation used by [`DiscreteKernel1D::sum`] yields exactly 1.
fn normalize_to_unit_sum(coeffs: &mut [f64]) {
    let radius = coeffs.len() / 2;
    let mut total = 0.0;
    for n in 1..=radius {
        total += coeffs[radius - n] + coeffs[radius + n];
    }
    total += coeffs[radius];
    for c in coeffs.iter_mut() {
        *c /= total;
    }
    let mut off_center = 0.0;
    for n in 1..=radius {
        off_center += coeffs[radius - n] + coeffs[radius + n];
    }
    coeffs[radius] = 1.0 - off_center;
}

/// Central difference operator of order `alpha` in `1..=4`, returned as the
/// equivalent convolution kernel.
///
/// The operators are defined by correlation stencils, `(delta_x f)(x) =
/// (f(x+1) - f(x-1)) / 2` and so on; a convolution kernel reproducing the
/// same action carries the stencil reversed, which flips the stored sign
/// pattern of the odd orders.
pub fn central_difference_mask(alpha: DerivOrder) -> Result<DiscreteKernel1D> {
    let coeffs: Vec<f64> = match alpha.get() {
        1 => vec![0.5, 0.0, -0.5],
        2 => vec![1.0, -2.0, 1.0],
        3 => vec![0.5, -1.0, 0.0, 1.0, -0.5],
        4 => vec![1.0, -4.0, 6.0, -4.0, 1.0],
        order => return Err(Error::UnsupportedOrder { order }),
    };
    Ok(DiscreteKernel1D::new_unchecked(
        coeffs,
        0.0,
        KernelTag::Difference { order: alpha.get() },
    ))
}

/// Builds a derivative kernel of the given family and order at scale `s`.
///
/// Sampled and integrated families share the smoothing-kernel radius for the
/// same scale; composed families (difference of a smoothing kernel) widen the
/// support by the mask radius.
pub fn derivative_kernel(
    family: DerivKernelFamily,
    alpha: DerivOrder,
    s: ScaleParam,
    policy: TruncationPolicy,
) -> Result<DiscreteKernel1D> {
    let a = alpha.get();
    if a == 0 {
        return Err(Error::UnsupportedOrder { order: 0 });
    }
    let tag = KernelTag::Derivative { family, order: a };
    let sigma = s.sigma();
    let radius = radius_for(s, policy);

    let coeffs = match family {
        DerivKernelFamily::Sampled => {
            let half: Vec<f64> = (0..=radius)
                .map(|n| gauss_deriv(n as f64, sigma, alpha).expect("sigma validated"))
                .collect();
            mirror_with_parity(&half, a)
        }
        DerivKernelFamily::Integrated => {
            let lower = DerivOrder::new(a - 1).expect("order in range");
            let half: Vec<f64> = (0..=radius)
                .map(|n| {
                    gauss_deriv(n as f64 + 0.5, sigma, lower).expect("sigma validated")
                        - gauss_deriv(n as f64 - 0.5, sigma, lower).expect("sigma validated")
                })
                .collect();
            mirror_with_parity(&half, a)
        }
        DerivKernelFamily::DiscAnalogue
        | DerivKernelFamily::HybridSampled
        | DerivKernelFamily::HybridIntegrated => {
            let mask = central_difference_mask(alpha)?;
            let smooth = smoothing_kernel(family.paired_smoothing(), s, policy);
            let full = convolve_coeff_arrays(mask.coeffs(), smooth.coeffs());
            let out_radius = full.len() / 2;
            let half: Vec<f64> = (0..=out_radius).map(|n| full[out_radius + n]).collect();
            mirror_with_parity(&half, a)
        }
    };
    Ok(DiscreteKernel1D::new_unchecked(coeffs, s.s(), tag))
}

/// Full discrete convolution of two dense symmetric-support arrays.
pub(crate) fn convolve_coeff_arrays(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Convolution of two kernels as a kernel, used for cascade comparisons.
pub(crate) fn convolve_kernels(
    a: &DiscreteKernel1D,
    b: &DiscreteKernel1D,
    tag: KernelTag,
    scale: f64,
) -> DiscreteKernel1D {
    let coeffs = convolve_coeff_arrays(a.coeffs(), b.coeffs());
    DiscreteKernel1D::new_unchecked(coeffs, scale, tag)
}

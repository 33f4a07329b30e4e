//! Scale-normalized feature detectors and automatic scale selection.
//!
//! A detector response is built from gamma-normalized derivatives: each
//! spatial derivative of total order `m` is multiplied by `s^{gamma m / 2}`
//! so that the response of a matching feature attains an extremum over
//! scale at a position proportional to the feature width. A
//! [`ScaleSignature`] collects the response at one image point over an
//! ascending set of scales, [`select_scale`] locates the interior extremum
//! nearest a reference scale with log-scale parabolic refinement, and
//! [`run_scale_selection_experiment`] benchmarks the selected scale against
//! the known width of a synthetic feature.

use crate::error::{Error, Result};
use crate::kernels::{
    derivative_kernel, smoothing_kernel, DerivKernelFamily, DiscreteKernel1D, TruncationPolicy,
};
use crate::signal::{
    diffuse_edge, diffuse_ridge, gaussian_blob, separable_convolve_2d, separable_value_at,
    BoundaryPolicy, Image2D,
};
use crate::specfun::{DerivOrder, ScaleParam};
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Scale-normalization power, valid on `(0, 2]`.
///
/// `gamma = 1` makes second-derivative detectors scale covariant; smaller
/// powers damp the growth of responses at coarse scales.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaPower(f64);

impl GammaPower {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma.is_finite() && gamma > 0.0 && gamma <= 2.0 {
            Ok(GammaPower(gamma))
        } else {
            Err(Error::InvalidGamma { value: gamma })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Normalization factor `s^{gamma * order / 2}` attached to a derivative
/// expression of total order `order` at scale `s`.
pub fn gamma_normalization(s: f64, gamma: GammaPower, order: u32) -> f64 {
    libm::pow(s, gamma.get() * order as f64 / 2.0)
}

/// Whether a detector localizes features at response minima or maxima.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Min,
    Max,
}

/// How a selected scale was determined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremumKind {
    /// A strict interior extremum, refined by parabolic interpolation.
    InteriorExtremum,
    /// No interior extremum existed; the best sample sits at the grid edge.
    BoundaryExtremum,
}

impl ExtremumKind {
    pub fn name(self) -> &'static str {
        match self {
            ExtremumKind::InteriorExtremum => "interior",
            ExtremumKind::BoundaryExtremum => "boundary",
        }
    }
}

/// The four calibrated scale-normalized detectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detector {
    /// `s (L_xx + L_yy)`, minimal at bright blob centers.
    LaplacianNorm,
    /// `s^2 (L_xx L_yy - L_xy^2)`, maximal at blob centers.
    DetHessianNorm,
    /// `s^{1/4} sqrt(L_x^2 + L_y^2)` (power `s^{gamma/2}` with `gamma = 1/2`),
    /// maximal on diffuse edges.
    GradMagNorm,
    /// `s^{3/4} (L_xx + L_yy - sqrt((L_xx - L_yy)^2 + 4 L_xy^2))`, minimal on
    /// bright ridges.
    RidgeStrengthNorm,
}

impl Detector {
    pub const ALL: [Detector; 4] = [
        Detector::LaplacianNorm,
        Detector::DetHessianNorm,
        Detector::GradMagNorm,
        Detector::RidgeStrengthNorm,
    ];

    pub fn gamma(self) -> GammaPower {
        GammaPower(match self {
            Detector::LaplacianNorm | Detector::DetHessianNorm => 1.0,
            Detector::GradMagNorm => 0.5,
            Detector::RidgeStrengthNorm => 0.75,
        })
    }

    pub fn polarity(self) -> Polarity {
        match self {
            Detector::LaplacianNorm | Detector::RidgeStrengthNorm => Polarity::Min,
            Detector::DetHessianNorm | Detector::GradMagNorm => Polarity::Max,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Detector::LaplacianNorm => "laplacian",
            Detector::DetHessianNorm => "dethessian",
            Detector::GradMagNorm => "gradmag",
            Detector::RidgeStrengthNorm => "ridge",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Detector::ALL.iter().copied().find(|d| d.name() == name)
    }

    /// Derivative orders `(i, j)` consumed by [`Detector::combine`].
    fn needed_orders(self) -> &'static [(u32, u32)] {
        match self {
            Detector::LaplacianNorm => &[(2, 0), (0, 2)],
            Detector::DetHessianNorm => &[(2, 0), (0, 2), (1, 1)],
            Detector::GradMagNorm => &[(1, 0), (0, 1)],
            Detector::RidgeStrengthNorm => &[(2, 0), (0, 2), (1, 1)],
        }
    }

    /// Combines derivative values fetched by `(i, j)` order into the
    /// normalized response at scale `s`. Both the full-image path and the
    /// single-point path funnel through this so they agree bit for bit.
    fn combine(self, s: f64, fetch: &mut dyn FnMut(u32, u32) -> Result<f64>) -> Result<f64> {
        let value = match self {
            Detector::LaplacianNorm => {
                let lxx = fetch(2, 0)?;
                let lyy = fetch(0, 2)?;
                gamma_normalization(s, self.gamma(), 2) * (lxx + lyy)
            }
            Detector::DetHessianNorm => {
                let lxx = fetch(2, 0)?;
                let lyy = fetch(0, 2)?;
                let lxy = fetch(1, 1)?;
                gamma_normalization(s, self.gamma(), 4) * (lxx * lyy - lxy * lxy)
            }
            Detector::GradMagNorm => {
                let lx = fetch(1, 0)?;
                let ly = fetch(0, 1)?;
                gamma_normalization(s, self.gamma(), 1) * libm::sqrt(lx * lx + ly * ly)
            }
            Detector::RidgeStrengthNorm => {
                let lxx = fetch(2, 0)?;
                let lyy = fetch(0, 2)?;
                let lxy = fetch(1, 1)?;
                let d = lxx - lyy;
                gamma_normalization(s, self.gamma(), 2)
                    * (lxx + lyy - libm::sqrt(d * d + 4.0 * lxy * lxy))
            }
        };
        Ok(value)
    }
}

/// Separable factor for one axis: the derivative kernel for `order >= 1`,
/// the family's paired smoothing kernel for `order == 0`.
fn axis_kernel(
    family: DerivKernelFamily,
    order: u32,
    s: ScaleParam,
    policy: TruncationPolicy,
) -> Result<DiscreteKernel1D> {
    if order == 0 {
        Ok(smoothing_kernel(family.paired_smoothing(), s, policy))
    } else {
        derivative_kernel(family, DerivOrder::new(order)?, s, policy)
    }
}

/// Full-image normalized detector response at scale `s` (variance units).
///
/// Derivatives are computed separably with the given boundary extension;
/// the output shares the input's shape and origin.
pub fn detector_response(
    img: &Image2D,
    detector: Detector,
    s: ScaleParam,
    family: DerivKernelFamily,
    policy: TruncationPolicy,
    boundary: BoundaryPolicy<'_>,
) -> Result<Image2D> {
    let mut derivs: Vec<((u32, u32), Image2D)> = Vec::new();
    for &(i, j) in detector.needed_orders() {
        let kx = axis_kernel(family, i, s, policy)?;
        let ky = axis_kernel(family, j, s, policy)?;
        let out = separable_convolve_2d(img, &kx, &ky, boundary);
        derivs.push(((i, j), out));
    }
    let len = img.width() * img.height();
    let mut samples = Vec::with_capacity(len);
    for idx in 0..len {
        let mut fetch = |i: u32, j: u32| -> Result<f64> {
            let (_, planes) = derivs
                .iter()
                .find(|(o, _)| *o == (i, j))
                .expect("every fetched order was precomputed");
            Ok(planes.samples()[idx])
        };
        samples.push(detector.combine(s.s(), &mut fetch)?);
    }
    Image2D::new(
        img.width(),
        img.height(),
        img.origin_x(),
        img.origin_y(),
        samples,
    )
}

/// Normalized detector response at a single point, evaluating each
/// separable derivative only inside the kernel footprint around `(x, y)`.
fn response_at(
    img: &Image2D,
    detector: Detector,
    s: ScaleParam,
    family: DerivKernelFamily,
    policy: TruncationPolicy,
    boundary: BoundaryPolicy<'_>,
    x: i64,
    y: i64,
) -> Result<f64> {
    let mut fetch = |i: u32, j: u32| -> Result<f64> {
        let kx = axis_kernel(family, i, s, policy)?;
        let ky = axis_kernel(family, j, s, policy)?;
        separable_value_at(img, &kx, &ky, boundary, x, y)
    };
    detector.combine(s.s(), &mut fetch)
}

/// Detector responses at one image point over an ascending set of scales.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSignature {
    scales: Vec<f64>,
    responses: Vec<f64>,
    point: (i64, i64),
}

impl ScaleSignature {
    /// Wraps precomputed responses. `scales` holds standard deviations and
    /// must be finite, positive, and strictly increasing.
    pub fn new(scales: Vec<f64>, responses: Vec<f64>, point: (i64, i64)) -> Result<Self> {
        if scales.len() != responses.len() {
            return Err(Error::MismatchedLengths {
                left: scales.len(),
                right: responses.len(),
            });
        }
        let positive = scales.iter().all(|v| v.is_finite() && *v > 0.0);
        let ascending = scales.windows(2).all(|w| w[0] < w[1]);
        if !positive || !ascending {
            return Err(Error::InvalidGrid);
        }
        Ok(ScaleSignature {
            scales,
            responses,
            point,
        })
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    pub fn point(&self) -> (i64, i64) {
        self.point
    }
}

/// Samples the detector response at `point` for each standard deviation in
/// `scales`, producing a [`ScaleSignature`].
pub fn scale_signature(
    img: &Image2D,
    detector: Detector,
    point: (i64, i64),
    scales: &[f64],
    family: DerivKernelFamily,
    policy: TruncationPolicy,
    boundary: BoundaryPolicy<'_>,
) -> Result<ScaleSignature> {
    let (x, y) = point;
    if img.get(x, y).is_none() {
        return Err(Error::PointOutsideImage { x, y });
    }
    let mut responses = Vec::with_capacity(scales.len());
    for &sigma in scales {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::NonPositiveScale { value: sigma });
        }
        let s = ScaleParam::new(sigma * sigma)?;
        responses.push(response_at(
            img, detector, s, family, policy, boundary, x, y,
        )?);
    }
    ScaleSignature::new(scales.to_vec(), responses, point)
}

/// Closed-form signature of a detector on its matching unit-amplitude
/// feature of width `sigma_ref`, under exact Gaussian smoothing.
///
/// With `t = s0 + s` the center responses are: normalized Laplacian on a
/// blob `-s / (pi t^2)`, Hessian determinant on a blob `s^2 / (4 pi^2 t^4)`,
/// gradient magnitude on a diffuse edge `s^{1/4} / sqrt(2 pi t)`, and ridge
/// strength on a diffuse ridge `-2 s^{3/4} (2 pi t^3)^{-1/2}`. Each attains
/// its extremum at `s = s0`.
pub fn analytic_signature(
    detector: Detector,
    sigma_ref: f64,
    scales: &[f64],
) -> Result<ScaleSignature> {
    if !(sigma_ref.is_finite() && sigma_ref > 0.0) {
        return Err(Error::NonPositiveScale { value: sigma_ref });
    }
    let s0 = sigma_ref * sigma_ref;
    let mut responses = Vec::with_capacity(scales.len());
    for &sigma in scales {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::NonPositiveScale { value: sigma });
        }
        let s = sigma * sigma;
        let t = s0 + s;
        responses.push(match detector {
            Detector::LaplacianNorm => -s / (PI * t * t),
            Detector::DetHessianNorm => s * s / (4.0 * PI * PI * t * t * t * t),
            Detector::GradMagNorm => libm::pow(s, 0.25) / libm::sqrt(2.0 * PI * t),
            Detector::RidgeStrengthNorm => {
                -2.0 * libm::pow(s, 0.75) / libm::sqrt(2.0 * PI * t * t * t)
            }
        });
    }
    ScaleSignature::new(scales.to_vec(), responses, (0, 0))
}

/// Scale reported by [`select_scale`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleEstimate {
    /// Selected standard deviation, refined for interior extrema.
    pub sigma_hat: f64,
    pub kind: ExtremumKind,
    pub polarity: Polarity,
}

/// Vertex abscissa of the parabola through `(u_i, r_i)` in log-scale
/// coordinates `u = ln sigma`, clamped to the bracketing interval. Falls
/// back to the middle sample when the three points are collinear.
fn refine_log_parabola(sig: &ScaleSignature, i: usize) -> f64 {
    let u0 = libm::log(sig.scales[i - 1]);
    let u1 = libm::log(sig.scales[i]);
    let u2 = libm::log(sig.scales[i + 1]);
    let r0 = sig.responses[i - 1];
    let r1 = sig.responses[i];
    let r2 = sig.responses[i + 1];
    let denom = r0 * (u1 - u2) + r1 * (u2 - u0) + r2 * (u0 - u1);
    if denom == 0.0 {
        return sig.scales[i];
    }
    let numer = r0 * (u1 * u1 - u2 * u2) + r1 * (u2 * u2 - u0 * u0) + r2 * (u0 * u0 - u1 * u1);
    let u = 0.5 * numer / denom;
    libm::exp(u.clamp(u0, u2))
}

/// Locates the extremum of `polarity` in a signature.
///
/// Strict interior extrema are refined by [`refine_log_parabola`]; among
/// several, the one nearest `sigma_ref` in log scale wins. Without any
/// interior extremum the best boundary sample is returned, flagged
/// [`ExtremumKind::BoundaryExtremum`].
pub fn select_scale(
    sig: &ScaleSignature,
    polarity: Polarity,
    sigma_ref: f64,
) -> Result<ScaleEstimate> {
    let n = sig.scales.len();
    if n < 3 {
        return Err(Error::ShortSignature { len: n });
    }
    if !(sigma_ref.is_finite() && sigma_ref > 0.0) {
        return Err(Error::NonPositiveScale { value: sigma_ref });
    }
    let better = |a: f64, b: f64| match polarity {
        Polarity::Max => a > b,
        Polarity::Min => a < b,
    };
    let r = &sig.responses;
    let mut best: Option<f64> = None;
    let mut best_dist = f64::INFINITY;
    for i in 1..n - 1 {
        if better(r[i], r[i - 1]) && better(r[i], r[i + 1]) {
            let sigma_hat = refine_log_parabola(sig, i);
            let dist = libm::fabs(libm::log(sigma_hat / sigma_ref));
            if dist < best_dist {
                best_dist = dist;
                best = Some(sigma_hat);
            }
        }
    }
    if let Some(sigma_hat) = best {
        return Ok(ScaleEstimate {
            sigma_hat,
            kind: ExtremumKind::InteriorExtremum,
            polarity,
        });
    }
    let mut arg = 0;
    for i in 1..n {
        if better(r[i], r[arg]) {
            arg = i;
        }
    }
    Ok(ScaleEstimate {
        sigma_hat: sig.scales[arg],
        kind: ExtremumKind::BoundaryExtremum,
        polarity,
    })
}

/// Relative scale-selection error `sigma_hat / sigma_ref - 1`.
pub fn relative_scale_error(sigma_hat: f64, sigma_ref: f64) -> Result<f64> {
    if !(sigma_hat.is_finite() && sigma_hat > 0.0) {
        return Err(Error::NonPositiveScale { value: sigma_hat });
    }
    if !(sigma_ref.is_finite() && sigma_ref > 0.0) {
        return Err(Error::NonPositiveScale { value: sigma_ref });
    }
    Ok(sigma_hat / sigma_ref - 1.0)
}

/// Logarithmic scale grid between two standard deviations, inclusive.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleGrid {
    sigma_min: f64,
    sigma_max: f64,
    count: usize,
}

impl ScaleGrid {
    pub fn new(sigma_min: f64, sigma_max: f64, count: usize) -> Result<Self> {
        let usable = sigma_min.is_finite()
            && sigma_max.is_finite()
            && sigma_min > 0.0
            && sigma_max > sigma_min
            && count >= 2;
        if usable {
            Ok(ScaleGrid {
                sigma_min,
                sigma_max,
                count,
            })
        } else {
            Err(Error::InvalidGrid)
        }
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Grid points `sigma_min * ratio^i` with the constant ratio
    /// `(sigma_max / sigma_min)^{1/(count-1)}`; both endpoints are exact.
    pub fn sigmas(&self) -> Vec<f64> {
        let ratio = libm::pow(
            self.sigma_max / self.sigma_min,
            1.0 / (self.count - 1) as f64,
        );
        let mut out = Vec::with_capacity(self.count);
        for i in 0..self.count {
            out.push(self.sigma_min * libm::pow(ratio, i as f64));
        }
        out[self.count - 1] = self.sigma_max;
        out
    }
}

/// One benchmark measurement: the scale selected on a synthetic feature of
/// width `sigma_ref`, with its relative error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleSelectionRow {
    pub sigma_ref: f64,
    pub sigma_hat: f64,
    pub rel_error: f64,
    pub kind: ExtremumKind,
}

/// Runs one reference scale of the selection benchmark: synthesize the
/// detector's matching feature of width `sigma_ref`, sweep the accuracy
/// grid at the feature center, and select with the detector's polarity.
///
/// The image half-width is `ceil(4 (sigma_ref + sigma_max))` so that both
/// the feature and the largest kernel footprint fit.
pub fn benchmark_reference_scale(
    detector: Detector,
    family: DerivKernelFamily,
    sigma_ref: f64,
    acc_grid: &ScaleGrid,
    policy: TruncationPolicy,
    boundary: BoundaryPolicy<'_>,
) -> Result<ScaleSelectionRow> {
    if !(sigma_ref.is_finite() && sigma_ref > 0.0) {
        return Err(Error::NonPositiveScale { value: sigma_ref });
    }
    let extent = libm::ceil(4.0 * (sigma_ref + acc_grid.sigma_max())) as usize;
    let s0 = ScaleParam::new(sigma_ref * sigma_ref)?;
    let img = match detector {
        Detector::LaplacianNorm | Detector::DetHessianNorm => gaussian_blob(s0, extent)?,
        Detector::GradMagNorm => diffuse_edge(s0, extent)?,
        Detector::RidgeStrengthNorm => diffuse_ridge(s0, extent)?,
    };
    let sig = scale_signature(
        &img,
        detector,
        (0, 0),
        &acc_grid.sigmas(),
        family,
        policy,
        boundary,
    )?;
    let est = select_scale(&sig, detector.polarity(), sigma_ref)?;
    Ok(ScaleSelectionRow {
        sigma_ref,
        sigma_hat: est.sigma_hat,
        rel_error: relative_scale_error(est.sigma_hat, sigma_ref)?,
        kind: est.kind,
    })
}

/// Sweeps [`benchmark_reference_scale`] over a reference grid.
pub fn run_scale_selection_experiment(
    detector: Detector,
    family: DerivKernelFamily,
    ref_grid: &ScaleGrid,
    acc_grid: &ScaleGrid,
    policy: TruncationPolicy,
    boundary: BoundaryPolicy<'_>,
) -> Result<Vec<ScaleSelectionRow>> {
    let refs = ref_grid.sigmas();
    let mut rows = Vec::with_capacity(refs.len());
    for &sigma_ref in &refs {
        rows.push(benchmark_reference_scale(
            detector, family, sigma_ref, acc_grid, policy, boundary,
        )?);
    }
    Ok(rows)
}

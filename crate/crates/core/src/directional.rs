//! Small-support derivative masks, steerable directional derivatives, and
//! affine Gaussian kernels.
//!
//! Cartesian masks realize the central-difference approximation of
//! `d^{mx}/dx^{mx} d^{my}/dy^{my}` on a 3x3 grid (total order up to 2) or a
//! 5x5 grid (orders 3 and 4). A directional derivative of order
//! `(m1, m2)` along orientation `phi` and its orthogonal is synthesized as
//! a trigonometric combination of Cartesian masks, obtained by expanding
//! `(cos phi d_x + sin phi d_y)^{m1} (-sin phi d_x + cos phi d_y)^{m2}`.
//! Affine Gaussian kernels sample or pixel-integrate the anisotropic
//! Gaussian with covariance parameterized by two axis standard deviations
//! and an orientation.

use crate::error::{Error, Result};
use crate::kernels::TruncationPolicy;
use crate::signal::{fetch_image, BoundaryPolicy, Image2D};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Derivative orders attached to a mask: along the grid axes, or along a
/// rotated direction pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MaskOrders {
    Cartesian { mx: u32, my: u32 },
    Directional { m1: u32, m2: u32, phi: f64 },
}

/// Small fixed-size coefficient grid used as a correlation stencil.
///
/// `coeff(dx, dy)` is the weight applied to the sample at `(x + dx,
/// y + dy)`; storage is row-major with `dy` ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Mask2D {
    half: usize,
    coeffs: Vec<f64>,
    orders: MaskOrders,
}

impl Mask2D {
    fn new(half: usize, coeffs: Vec<f64>, orders: MaskOrders) -> Self {
        debug_assert_eq!(coeffs.len(), (2 * half + 1) * (2 * half + 1));
        Mask2D {
            half,
            coeffs,
            orders,
        }
    }

    /// Loads a grid written in display orientation (top row holds the
    /// largest `dy`) into ascending-`dy` storage.
    fn from_display_rows(rows: &[&[f64]], orders: MaskOrders) -> Self {
        let size = rows.len();
        let mut coeffs = Vec::with_capacity(size * size);
        for row in rows.iter().rev() {
            coeffs.extend_from_slice(row);
        }
        Mask2D::new(size / 2, coeffs, orders)
    }

    pub fn half(&self) -> usize {
        self.half
    }

    /// Side length, 3 or 5.
    pub fn size(&self) -> usize {
        2 * self.half + 1
    }

    /// Coefficients in row-major order with `dy` ascending.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Weight at offset `(dx, dy)`, zero outside the grid.
    pub fn coeff(&self, dx: i64, dy: i64) -> f64 {
        let h = self.half as i64;
        if dx.abs() > h || dy.abs() > h {
            0.0
        } else {
            self.coeffs[((dy + h) * (2 * h + 1) + (dx + h)) as usize]
        }
    }

    pub fn orders(&self) -> &MaskOrders {
        &self.orders
    }

    /// Iterates `(dx, dy, weight)` over the grid, rows in ascending `dy`.
    pub fn indexed(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        let h = self.half as i64;
        let size = 2 * h + 1;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 % size - h, i as i64 / size - h, c))
    }
}

const D_X: [&[f64]; 3] = [&[0., 0., 0.], &[-0.5, 0., 0.5], &[0., 0., 0.]];
const D_Y: [&[f64]; 3] = [&[0., 0.5, 0.], &[0., 0., 0.], &[0., -0.5, 0.]];
const D_XX: [&[f64]; 3] = [&[0., 0., 0.], &[1., -2., 1.], &[0., 0., 0.]];
const D_XY: [&[f64]; 3] = [&[-0.25, 0., 0.25], &[0., 0., 0.], &[0.25, 0., -0.25]];
const D_YY: [&[f64]; 3] = [&[0., 1., 0.], &[0., -2., 0.], &[0., 1., 0.]];

const Z5: &[f64] = &[0., 0., 0., 0., 0.];
const D_XXX: [&[f64]; 5] = [Z5, Z5, &[-0.5, 1., 0., -1., 0.5], Z5, Z5];
const D_XXY: [&[f64]; 5] = [
    Z5,
    &[0., 0.5, -1., 0.5, 0.],
    Z5,
    &[0., -0.5, 1., -0.5, 0.],
    Z5,
];
const D_XYY: [&[f64]; 5] = [
    Z5,
    &[0., -0.5, 0., 0.5, 0.],
    &[0., 1., 0., -1., 0.],
    &[0., -0.5, 0., 0.5, 0.],
    Z5,
];
const D_YYY: [&[f64]; 5] = [
    &[0., 0., 0.5, 0., 0.],
    &[0., 0., -1., 0., 0.],
    Z5,
    &[0., 0., 1., 0., 0.],
    &[0., 0., -0.5, 0., 0.],
];
const D_XXXX: [&[f64]; 5] = [Z5, Z5, &[1., -4., 6., -4., 1.], Z5, Z5];
const D_XXXY: [&[f64]; 5] = [
    Z5,
    &[-0.25, 0.5, 0., -0.5, 0.25],
    Z5,
    &[0.25, -0.5, 0., 0.5, -0.25],
    Z5,
];
const D_XXYY: [&[f64]; 5] = [
    Z5,
    &[0., 1., -2., 1., 0.],
    &[0., -2., 4., -2., 0.],
    &[0., 1., -2., 1., 0.],
    Z5,
];
const D_XYYY: [&[f64]; 5] = [
    &[0., -0.25, 0., 0.25, 0.],
    &[0., 0.5, 0., -0.5, 0.],
    Z5,
    &[0., -0.5, 0., 0.5, 0.],
    &[0., 0.25, 0., -0.25, 0.],
];
const D_YYYY: [&[f64]; 5] = [
    &[0., 0., 1., 0., 0.],
    &[0., 0., -4., 0., 0.],
    &[0., 0., 6., 0., 0.],
    &[0., 0., -4., 0., 0.],
    &[0., 0., 1., 0., 0.],
];

/// Central-difference mask for `d^{mx}/dx^{mx} d^{my}/dy^{my}`.
///
/// The grids are embedded as literal data; each equals the outer product
/// of the 1-D central-difference stencils along the two axes (the tests
/// regenerate them from that rule).
pub fn cartesian_mask(mx: u32, my: u32) -> Result<Mask2D> {
    let total = mx + my;
    if total == 0 || total > 4 {
        return Err(Error::UnsupportedOrder { order: total });
    }
    let orders = MaskOrders::Cartesian { mx, my };
    let rows: &[&[f64]] = match (mx, my) {
        (1, 0) => &D_X,
        (0, 1) => &D_Y,
        (2, 0) => &D_XX,
        (1, 1) => &D_XY,
        (0, 2) => &D_YY,
        (3, 0) => &D_XXX,
        (2, 1) => &D_XXY,
        (1, 2) => &D_XYY,
        (0, 3) => &D_YYY,
        (4, 0) => &D_XXXX,
        (3, 1) => &D_XXXY,
        (2, 2) => &D_XXYY,
        (1, 3) => &D_XYYY,
        (0, 4) => &D_YYYY,
        _ => unreachable!("total order bounds leave exactly 14 combinations"),
    };
    Ok(Mask2D::from_display_rows(rows, orders))
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut value = 1.0;
    for i in 0..k {
        value = value * (n - i) as f64 / (i + 1) as f64;
    }
    value
}

fn powi(base: f64, exp: u32) -> f64 {
    let mut value = 1.0;
    for _ in 0..exp {
        value *= base;
    }
    value
}

/// Weights `w_k` such that the directional derivative operator of order
/// `(m1, m2)` along `(phi, phi + pi/2)` expands as
/// `sum_k w_k d^k/dx^k d^{m1+m2-k}/dy^{m1+m2-k}`.
///
/// Returned for every `k` in `0..=m1+m2`, ascending, including zeros.
pub fn directional_weights(m1: u32, m2: u32, phi: f64) -> Result<Vec<(u32, f64)>> {
    let total = m1 + m2;
    if total == 0 || total > 4 {
        return Err(Error::UnsupportedOrder { order: total });
    }
    if !phi.is_finite() {
        return Err(Error::InvalidAngle { value: phi });
    }
    let c = libm::cos(phi);
    let s = libm::sin(phi);
    let mut weights = vec![0.0; total as usize + 1];
    for i in 0..=m1 {
        for j in 0..=m2 {
            let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
            let term = sign
                * binomial(m1, i)
                * binomial(m2, j)
                * powi(c, i + m2 - j)
                * powi(s, m1 - i + j);
            weights[(i + j) as usize] += term;
        }
    }
    Ok(weights
        .into_iter()
        .enumerate()
        .map(|(k, w)| (k as u32, w))
        .collect())
}

/// Directional derivative mask `(m1, m2, phi)` as the weighted sum of
/// Cartesian masks; 3x3 for total order up to 2, otherwise 5x5.
pub fn directional_mask(m1: u32, m2: u32, phi: f64) -> Result<Mask2D> {
    let weights = directional_weights(m1, m2, phi)?;
    let total = m1 + m2;
    let half = if total <= 2 { 1usize } else { 2 };
    let size = 2 * half + 1;
    let mut coeffs = vec![0.0; size * size];
    for &(k, w) in &weights {
        let base = cartesian_mask(k, total - k)?;
        for (dst, &v) in coeffs.iter_mut().zip(base.coeffs()) {
            *dst += w * v;
        }
    }
    Ok(Mask2D::new(
        half,
        coeffs,
        MaskOrders::Directional { m1, m2, phi },
    ))
}

/// Correlates an image with a mask: `out(x, y) = sum mask(dx, dy) *
/// f(x + dx, y + dy)`, same size as the input.
///
/// Out-of-domain samples are resolved by `boundary` on each axis
/// independently; an analytic extension is evaluated directly at the
/// out-of-domain position.
pub fn apply_directional(img: &Image2D, mask: &Mask2D, boundary: BoundaryPolicy<'_>) -> Image2D {
    let h = mask.half() as i64;
    let mut out = Vec::with_capacity(img.width() * img.height());
    for y in img.min_y()..=img.max_y() {
        for x in img.min_x()..=img.max_x() {
            let mut acc = 0.0;
            for dy in -h..=h {
                for dx in -h..=h {
                    let c = mask.coeff(dx, dy);
                    if c != 0.0 {
                        acc += c * fetch_image(img, boundary, x + dx, y + dy);
                    }
                }
            }
            out.push(acc);
        }
    }
    Image2D::new(
        img.width(),
        img.height(),
        img.origin_x(),
        img.origin_y(),
        out,
    )
    .expect("output shape mirrors the input")
}

/// Anisotropic Gaussian shape: standard deviations along two orthogonal
/// principal axes and the orientation of the first axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineParams {
    sigma1: f64,
    sigma2: f64,
    phi: f64,
}

impl AffineParams {
    /// `phi` is wrapped into `[0, pi)`; a half turn leaves the shape
    /// unchanged.
    pub fn new(sigma1: f64, sigma2: f64, phi: f64) -> Result<Self> {
        if !(sigma1.is_finite() && sigma1 > 0.0) {
            return Err(Error::NonPositiveScale { value: sigma1 });
        }
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::NonPositiveScale { value: sigma2 });
        }
        if !phi.is_finite() {
            return Err(Error::InvalidAngle { value: phi });
        }
        let mut wrapped = libm::fmod(phi, PI);
        if wrapped < 0.0 {
            wrapped += PI;
        }
        Ok(AffineParams {
            sigma1,
            sigma2,
            phi: wrapped,
        })
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Covariance entry `lambda_1 cos^2 phi + lambda_2 sin^2 phi` with
    /// `lambda_i = sigma_i^2`.
    pub fn cxx(&self) -> f64 {
        let (c, s) = (libm::cos(self.phi), libm::sin(self.phi));
        self.sigma1 * self.sigma1 * c * c + self.sigma2 * self.sigma2 * s * s
    }

    /// Covariance entry `(lambda_1 - lambda_2) cos phi sin phi`.
    pub fn cxy(&self) -> f64 {
        let (c, s) = (libm::cos(self.phi), libm::sin(self.phi));
        (self.sigma1 * self.sigma1 - self.sigma2 * self.sigma2) * c * s
    }

    /// Covariance entry `lambda_1 sin^2 phi + lambda_2 cos^2 phi`.
    pub fn cyy(&self) -> f64 {
        let (c, s) = (libm::cos(self.phi), libm::sin(self.phi));
        self.sigma1 * self.sigma1 * s * s + self.sigma2 * self.sigma2 * c * c
    }
}

/// Anisotropic Gaussian density
/// `exp(-A / (2 sigma1^2 sigma2^2)) / (2 pi sigma1 sigma2)` with
/// `A = (sigma2^2 x^2 + sigma1^2 y^2) cos^2 phi + (sigma1^2 x^2 +
/// sigma2^2 y^2) sin^2 phi - 2 (sigma1^2 - sigma2^2) cos phi sin phi x y`.
pub fn affine_gaussian(x: f64, y: f64, p: AffineParams) -> f64 {
    let c = libm::cos(p.phi);
    let s = libm::sin(p.phi);
    let l1 = p.sigma1 * p.sigma1;
    let l2 = p.sigma2 * p.sigma2;
    let a = (l2 * x * x + l1 * y * y) * c * c + (l1 * x * x + l2 * y * y) * s * s
        - 2.0 * (l1 - l2) * c * s * x * y;
    libm::exp(-a / (2.0 * l1 * l2)) / (2.0 * PI * p.sigma1 * p.sigma2)
}

/// Axis-aligned support box holding at least `1 - epsilon` of the mass:
/// the bounding box of the ellipse at Mahalanobis radius `r` with
/// `e^{-r^2/2} = epsilon`, which projects to `r sqrt(Cxx)` and
/// `r sqrt(Cyy)` on the axes.
fn support_half_widths(p: AffineParams, policy: TruncationPolicy) -> (usize, usize) {
    let r = libm::sqrt(2.0 * libm::log(1.0 / policy.epsilon()));
    let hx = libm::ceil(r * libm::sqrt(p.cxx())) as usize;
    let hy = libm::ceil(r * libm::sqrt(p.cyy())) as usize;
    (hx.max(1), hy.max(1))
}

fn affine_image(
    p: AffineParams,
    policy: TruncationPolicy,
    value: impl Fn(i64, i64) -> f64,
) -> Image2D {
    let (hx, hy) = support_half_widths(p, policy);
    let (w, h) = (2 * hx + 1, 2 * hy + 1);
    let mut samples = Vec::with_capacity(w * h);
    for iy in 0..h as i64 {
        for ix in 0..w as i64 {
            samples.push(value(ix - hx as i64, iy - hy as i64));
        }
    }
    Image2D::new(w, h, hx as i64, hy as i64, samples).expect("box dimensions match samples")
}

/// Grid samples of [`affine_gaussian`] over the support box.
pub fn sampled_affine_kernel(p: AffineParams, policy: TruncationPolicy) -> Image2D {
    affine_image(p, policy, |m, n| affine_gaussian(m as f64, n as f64, p))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    for i in 0..(order + 1) / 2 {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (order as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=order {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if libm::fabs(step) < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Tensor Gauss-Legendre estimate of the integral of `affine_gaussian`
/// over the unit pixel square centered at `(m, n)`.
fn pixel_integral(p: AffineParams, m: i64, n: i64, nodes: &[f64], weights: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (ty, wy) in nodes.iter().zip(weights) {
        let y = n as f64 + 0.5 * ty;
        let mut row = 0.0;
        for (tx, wx) in nodes.iter().zip(weights) {
            let x = m as f64 + 0.5 * tx;
            row += wx * affine_gaussian(x, y, p);
        }
        acc += wy * row;
    }
    0.25 * acc
}

/// Pixel-integrated affine Gaussian kernel: each coefficient is the mass
/// of the density over its unit pixel square.
///
/// Quadrature starts at 8x8 points per pixel and doubles until two
/// successive estimates agree to 1e-10 (capped at 128x128; the integrand
/// is an analytic density, so in practice one doubling suffices).
pub fn integrated_affine_kernel(p: AffineParams, policy: TruncationPolicy) -> Image2D {
    let rules: Vec<(Vec<f64>, Vec<f64>)> = [8usize, 16, 32, 64, 128]
        .iter()
        .map(|&q| gauss_legendre(q))
        .collect();
    affine_image(p, policy, |m, n| {
        let mut estimate = pixel_integral(p, m, n, &rules[0].0, &rules[0].1);
        for rule in &rules[1..] {
            let refined = pixel_integral(p, m, n, &rule.0, &rule.1);
            let settled = libm::fabs(refined - estimate) <= 1e-10;
            estimate = refined;
            if settled {
                break;
            }
        }
        estimate
    })
}

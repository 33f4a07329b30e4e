//! Discrete convolution engine and synthetic test signals.
//!
//! Convolution is the literal sum `L(x) = sum_n T(n) f(x - n)` over the
//! kernel support, with the out-of-domain samples supplied by a
//! [`BoundaryPolicy`]. Two-dimensional smoothing is separable: a row pass
//! followed by a column pass.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernels::DiscreteKernel1D;
use crate::specfun::{erg, gauss, ScaleParam};

/// Boundary extension used when a convolution window leaves the domain.
#[derive(Clone, Copy)]
pub enum BoundaryPolicy<'a> {
    /// Repeat the nearest edge sample.
    Replicate,
    /// Reflect about the edge samples, without repeating the edge itself.
    Mirror,
    /// Treat everything outside the domain as zero.
    ZeroPad,
    /// Evaluate a closed-form extension at the outside coordinates. One
    /// dimensional convolutions pass `y = 0`. Keeps polynomial probes free
    /// of boundary effects.
    Analytic(&'a dyn Fn(f64, f64) -> f64),
}

impl core::fmt::Debug for BoundaryPolicy<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let name = match self {
            BoundaryPolicy::Replicate => "Replicate",
            BoundaryPolicy::Mirror => "Mirror",
            BoundaryPolicy::ZeroPad => "ZeroPad",
            BoundaryPolicy::Analytic(_) => "Analytic(..)",
        };
        f.write_str(name)
    }
}

/// One-dimensional signal on an integer grid.
///
/// Array position `i` holds the sample at coordinate `x = i - origin`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal1D {
    samples: Vec<f64>,
    origin: i64,
}

impl Signal1D {
    /// Wraps samples with the origin index; the origin must lie within or
    /// directly adjacent to the index range.
    pub fn new(samples: Vec<f64>, origin: i64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        let len = samples.len();
        if origin < -1 || origin > len as i64 {
            return Err(Error::OriginOutOfRange { origin, len });
        }
        Ok(Self { samples, origin })
    }

    /// Samples `f` on the integer coordinates `min..=max`.
    pub fn from_fn(min: i64, max: i64, f: impl Fn(f64) -> f64) -> Result<Self> {
        if min > max {
            return Err(Error::EmptySignal);
        }
        let samples = (min..=max).map(|x| f(x as f64)).collect();
        Self::new(samples, -min)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    /// Coordinate of the sample stored at `index`.
    pub fn coord(&self, index: usize) -> i64 {
        index as i64 - self.origin
    }

    /// Sample at coordinate `x`, if inside the domain.
    pub fn value(&self, x: i64) -> Option<f64> {
        let idx = x + self.origin;
        if (0..self.samples.len() as i64).contains(&idx) {
            Some(self.samples[idx as usize])
        } else {
            None
        }
    }
}

/// Two-dimensional image on an integer grid, stored row-major.
///
/// Position `(ix, iy)` holds the sample at `(x, y) = (ix - origin_x,
/// iy - origin_y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image2D {
    width: usize,
    height: usize,
    origin_x: i64,
    origin_y: i64,
    samples: Vec<f64>,
}

impl Image2D {
    pub fn new(
        width: usize,
        height: usize,
        origin_x: i64,
        origin_y: i64,
        samples: Vec<f64>,
    ) -> Result<Self> {
        if width == 0 || height == 0 || width * height != samples.len() {
            return Err(Error::BadImageShape {
                width,
                height,
                samples: samples.len(),
            });
        }
        Ok(Self {
            width,
            height,
            origin_x,
            origin_y,
            samples,
        })
    }

    /// Square image sampling `f(x, y)` for `x, y` in `-half..=half`.
    pub fn centered(half: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let side = 2 * half + 1;
        let h = half as i64;
        let mut samples = Vec::with_capacity(side * side);
        for iy in 0..side as i64 {
            for ix in 0..side as i64 {
                samples.push(f((ix - h) as f64, (iy - h) as f64));
            }
        }
        Self {
            width: side,
            height: side,
            origin_x: h,
            origin_y: h,
            samples,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn origin_x(&self) -> i64 {
        self.origin_x
    }

    pub fn origin_y(&self) -> i64 {
        self.origin_y
    }

    pub fn min_x(&self) -> i64 {
        -self.origin_x
    }

    pub fn max_x(&self) -> i64 {
        self.width as i64 - 1 - self.origin_x
    }

    pub fn min_y(&self) -> i64 {
        -self.origin_y
    }

    pub fn max_y(&self) -> i64 {
        self.height as i64 - 1 - self.origin_y
    }

    /// Sample at coordinates `(x, y)`, if inside the domain.
    pub fn get(&self, x: i64, y: i64) -> Option<f64> {
        let ix = x + self.origin_x;
        let iy = y + self.origin_y;
        if (0..self.width as i64).contains(&ix) && (0..self.height as i64).contains(&iy) {
            Some(self.samples[iy as usize * self.width + ix as usize])
        } else {
            None
        }
    }

    fn row(&self, iy: usize) -> &[f64] {
        &self.samples[iy * self.width..(iy + 1) * self.width]
    }
}

/// Inner product of the kernel with fetched samples, in a fixed order:
/// offsets `n = -radius..=radius`, plain accumulation up to 32 taps,
/// pairwise halving beyond that to bound cancellation noise.
pub(crate) fn kernel_dot(
    k: &DiscreteKernel1D,
    scratch: &mut Vec<f64>,
    mut fetch: impl FnMut(i64) -> f64,
) -> f64 {
    let r = k.radius() as i64;
    scratch.clear();
    for (j, &c) in k.coeffs().iter().enumerate() {
        scratch.push(c * fetch(j as i64 - r));
    }
    sum_in_order(scratch)
}

fn sum_in_order(terms: &[f64]) -> f64 {
    if terms.len() <= 32 {
        terms.iter().sum()
    } else {
        pairwise(terms)
    }
}

fn pairwise(terms: &[f64]) -> f64 {
    if terms.len() <= 8 {
        terms.iter().sum()
    } else {
        let mid = terms.len() / 2;
        pairwise(&terms[..mid]) + pairwise(&terms[mid..])
    }
}

/// Folds an index into `0..len` by reflection about the edge samples.
fn mirror_fold(idx: i64, len: i64) -> usize {
    if len == 1 {
        return 0;
    }
    let period = 2 * (len - 1);
    let mut j = idx.rem_euclid(period);
    if j >= len {
        j = period - j;
    }
    j as usize
}

fn fetch_signal(f: &Signal1D, idx: i64, boundary: BoundaryPolicy<'_>) -> f64 {
    let len = f.samples.len() as i64;
    if (0..len).contains(&idx) {
        return f.samples[idx as usize];
    }
    match boundary {
        BoundaryPolicy::Replicate => f.samples[idx.clamp(0, len - 1) as usize],
        BoundaryPolicy::Mirror => f.samples[mirror_fold(idx, len)],
        BoundaryPolicy::ZeroPad => 0.0,
        BoundaryPolicy::Analytic(g) => g((idx - f.origin) as f64, 0.0),
    }
}

/// Convolves a signal with a kernel: `out(x) = sum_n T(n) f(x - n)`.
///
/// Output length and origin match the input; samples the window needs from
/// outside the domain come from the boundary policy.
pub fn convolve_1d(f: &Signal1D, k: &DiscreteKernel1D, boundary: BoundaryPolicy<'_>) -> Signal1D {
    let mut scratch = Vec::with_capacity(k.support_len());
    let mut samples = Vec::with_capacity(f.samples.len());
    for i in 0..f.samples.len() as i64 {
        samples.push(kernel_dot(k, &mut scratch, |n| {
            fetch_signal(f, i - n, boundary)
        }));
    }
    Signal1D {
        samples,
        origin: f.origin,
    }
}

/// Samples the image at `(x, y)` with out-of-domain positions resolved by
/// `boundary` on each axis independently (clamp, fold, zero, or direct
/// evaluation of the analytic extension).
pub(crate) fn fetch_image(img: &Image2D, boundary: BoundaryPolicy<'_>, x: i64, y: i64) -> f64 {
    if let Some(v) = img.get(x, y) {
        return v;
    }
    match boundary {
        BoundaryPolicy::Replicate => {
            let cx = x.clamp(img.min_x(), img.max_x());
            let cy = y.clamp(img.min_y(), img.max_y());
            img.get(cx, cy).expect("clamped coordinates are in range")
        }
        BoundaryPolicy::Mirror => {
            let ix = mirror_fold(x + img.origin_x, img.width as i64);
            let iy = mirror_fold(y + img.origin_y, img.height as i64);
            img.samples[iy * img.width + ix]
        }
        BoundaryPolicy::ZeroPad => 0.0,
        BoundaryPolicy::Analytic(g) => g(x as f64, y as f64),
    }
}

fn fetch_in_row(img: &Image2D, iy: usize, ix: i64, boundary: BoundaryPolicy<'_>) -> f64 {
    let w = img.width as i64;
    if (0..w).contains(&ix) {
        return img.row(iy)[ix as usize];
    }
    match boundary {
        BoundaryPolicy::Replicate => img.row(iy)[ix.clamp(0, w - 1) as usize],
        BoundaryPolicy::Mirror => img.row(iy)[mirror_fold(ix, w)],
        BoundaryPolicy::ZeroPad => 0.0,
        BoundaryPolicy::Analytic(g) => g(
            (ix - img.origin_x) as f64,
            (iy as i64 - img.origin_y) as f64,
        ),
    }
}

/// Row convolution of row `iy_ext` (which may lie outside the domain)
/// evaluated at column `ix`. Out-of-domain rows resolve per policy: to a
/// concrete row for Replicate and Mirror, to zero for ZeroPad, and to the
/// row convolution of the closed-form extension for Analytic.
fn row_value(
    img: &Image2D,
    kx: &DiscreteKernel1D,
    boundary: BoundaryPolicy<'_>,
    ix: i64,
    iy_ext: i64,
    scratch: &mut Vec<f64>,
) -> f64 {
    let h = img.height as i64;
    let iy = if (0..h).contains(&iy_ext) {
        iy_ext as usize
    } else {
        match boundary {
            BoundaryPolicy::Replicate => iy_ext.clamp(0, h - 1) as usize,
            BoundaryPolicy::Mirror => mirror_fold(iy_ext, h),
            BoundaryPolicy::ZeroPad => return 0.0,
            BoundaryPolicy::Analytic(g) => {
                let x0 = ix - img.origin_x;
                let y = (iy_ext - img.origin_y) as f64;
                return kernel_dot(kx, scratch, |n| g((x0 - n) as f64, y));
            }
        }
    };
    kernel_dot(kx, scratch, |n| fetch_in_row(img, iy, ix - n, boundary))
}

/// Separable 2-D convolution: a row pass with `kx` followed by a column
/// pass with `ky`. The passes commute up to summation rounding.
pub fn separable_convolve_2d(
    img: &Image2D,
    kx: &DiscreteKernel1D,
    ky: &DiscreteKernel1D,
    boundary: BoundaryPolicy<'_>,
) -> Image2D {
    let mut scratch = Vec::with_capacity(kx.support_len());
    let mut rows = Vec::with_capacity(img.samples.len());
    for iy in 0..img.height {
        for ix in 0..img.width as i64 {
            rows.push(kernel_dot(kx, &mut scratch, |n| {
                fetch_in_row(img, iy, ix - n, boundary)
            }));
        }
    }
    let rows_img = Image2D {
        width: img.width,
        height: img.height,
        origin_x: img.origin_x,
        origin_y: img.origin_y,
        samples: rows,
    };

    let mut col_scratch = Vec::with_capacity(ky.support_len());
    let mut row_scratch = Vec::with_capacity(kx.support_len());
    let mut out = Vec::with_capacity(img.samples.len());
    let h = img.height as i64;
    for iy in 0..h {
        for ix in 0..img.width as i64 {
            out.push(kernel_dot(ky, &mut col_scratch, |m| {
                let ry = iy - m;
                if (0..h).contains(&ry) {
                    rows_img.row(ry as usize)[ix as usize]
                } else {
                    match boundary {
                        BoundaryPolicy::Replicate => {
                            rows_img.row(ry.clamp(0, h - 1) as usize)[ix as usize]
                        }
                        BoundaryPolicy::Mirror => rows_img.row(mirror_fold(ry, h))[ix as usize],
                        BoundaryPolicy::ZeroPad => 0.0,
                        BoundaryPolicy::Analytic(_) => {
                            row_value(img, kx, boundary, ix, ry, &mut row_scratch)
                        }
                    }
                }
            }));
        }
    }
    Image2D {
        width: img.width,
        height: img.height,
        origin_x: img.origin_x,
        origin_y: img.origin_y,
        samples: out,
    }
}

/// Separable convolution evaluated at the single point `(x, y)`, summing in
/// exactly the same order as [`separable_convolve_2d`], so the two agree
/// bit for bit.
pub(crate) fn separable_value_at(
    img: &Image2D,
    kx: &DiscreteKernel1D,
    ky: &DiscreteKernel1D,
    boundary: BoundaryPolicy<'_>,
    x: i64,
    y: i64,
) -> Result<f64> {
    let ix = x + img.origin_x;
    let iy = y + img.origin_y;
    if !(0..img.width as i64).contains(&ix) || !(0..img.height as i64).contains(&iy) {
        return Err(Error::PointOutsideImage { x, y });
    }
    let mut col_scratch = Vec::with_capacity(ky.support_len());
    let mut row_scratch = Vec::with_capacity(kx.support_len());
    let value = kernel_dot(ky, &mut col_scratch, |m| {
        row_value(img, kx, boundary, ix, iy - m, &mut row_scratch)
    });
    Ok(value)
}

fn required_extent(s0: ScaleParam) -> usize {
    libm::ceil(4.0 * s0.sigma()) as usize
}

fn checked_extent(s0: ScaleParam, extent: usize) -> Result<usize> {
    let required = required_extent(s0);
    if extent < required {
        return Err(Error::ExtentTooSmall { extent, required });
    }
    Ok(extent)
}

/// Rotationally symmetric Gaussian intensity profile of size `s0`, sampled
/// for `x, y` in `-extent..=extent`.
pub fn gaussian_blob(s0: ScaleParam, extent: usize) -> Result<Image2D> {
    let extent = checked_extent(s0, extent)?;
    Ok(Image2D::centered(extent, |x, y| {
        gauss(x, s0) * gauss(y, s0)
    }))
}

/// Diffuse step edge: the Gaussian cumulative along x, constant along y.
pub fn diffuse_edge(s0: ScaleParam, extent: usize) -> Result<Image2D> {
    let extent = checked_extent(s0, extent)?;
    Ok(Image2D::centered(extent, |x, _| erg(x, s0)))
}

/// Diffuse ridge: the Gaussian density along x, constant along y.
pub fn diffuse_ridge(s0: ScaleParam, extent: usize) -> Result<Image2D> {
    let extent = checked_extent(s0, extent)?;
    Ok(Image2D::centered(extent, |x, _| gauss(x, s0)))
}

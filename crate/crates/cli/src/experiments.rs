//! The seven experiment renderers.
//!
//! Each renderer validates the fields it uses (error messages name the
//! offending field), computes its sweep, and returns the complete output
//! text. Sweeps run on the worker pool from [`crate::sweep`], but cells are
//! laid out in sorted order beforehand, so the bytes never depend on
//! scheduling.

use crate::output::{fmt_metric, fmt_sig, render_csv, render_grid};
use crate::sweep::{parallel_map, SigmaSpec};
use crate::ExperimentConfig;
use anyhow::{anyhow, bail, Result};
use scsp_core::directional::{
    directional_mask, integrated_affine_kernel, sampled_affine_kernel, AffineParams, Mask2D,
};
use scsp_core::kernels::{
    derivative_kernel, smoothing_kernel, DerivKernelFamily, DiscreteKernel1D, KernelFamily,
    TruncationPolicy,
};
use scsp_core::metrics::{derivative_error_report, monomial_response, smoothing_error_report};
use scsp_core::scalesel::{benchmark_reference_scale, Detector, ScaleGrid};
use scsp_core::signal::{BoundaryPolicy, Image2D};
use scsp_core::specfun::{DerivOrder, ScaleParam};
use std::f64::consts::PI;

/// Default sweep for the smoothing and derivative metric experiments.
const METRIC_SWEEP: SigmaSpec = SigmaSpec::Range {
    min: 0.1,
    max: 4.0,
    count: 100,
    log: true,
};

/// Default sweep for the monomial-response experiment.
const MONOMIAL_SWEEP: SigmaSpec = SigmaSpec::Range {
    min: 0.1,
    max: 2.0,
    count: 50,
    log: true,
};

/// Default reference-scale sweep for the scale-selection benchmark.
const REFERENCE_SWEEP: SigmaSpec = SigmaSpec::Range {
    min: 0.1,
    max: 4.0,
    count: 50,
    log: true,
};

/// Accuracy grid the selection benchmark searches over.
const ACCURACY_MIN: f64 = 0.1;
const ACCURACY_MAX: f64 = 6.0;
const ACCURACY_COUNT: usize = 80;

/// Boundary extension, reduced to the tags the CLI can name. Unlike
/// [`BoundaryPolicy`] it carries no closure, so sweeps can share it across
/// worker threads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BoundaryTag {
    Replicate,
    Mirror,
    ZeroPad,
}

impl BoundaryTag {
    fn parse(raw: Option<&str>) -> Result<Self> {
        match raw {
            None | Some("replicate") => Ok(BoundaryTag::Replicate),
            Some("mirror") => Ok(BoundaryTag::Mirror),
            Some("zeropad") => Ok(BoundaryTag::ZeroPad),
            Some(other) => {
                bail!("boundary: unknown policy '{other}' (valid: replicate, mirror, zeropad)")
            }
        }
    }

    fn name(self) -> &'static str {
        match self {
            BoundaryTag::Replicate => "replicate",
            BoundaryTag::Mirror => "mirror",
            BoundaryTag::ZeroPad => "zeropad",
        }
    }

    fn policy(self) -> BoundaryPolicy<'static> {
        match self {
            BoundaryTag::Replicate => BoundaryPolicy::Replicate,
            BoundaryTag::Mirror => BoundaryPolicy::Mirror,
            BoundaryTag::ZeroPad => BoundaryPolicy::ZeroPad,
        }
    }
}

fn epsilon_policy(cfg: &ExperimentConfig) -> Result<TruncationPolicy> {
    let eps = cfg.epsilon.unwrap_or(1e-8);
    TruncationPolicy::new(eps).map_err(|e| anyhow!("epsilon: {e}"))
}

fn split_names(list: &str) -> Vec<&str> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

fn smoothing_families(cfg: &ExperimentConfig) -> Result<Vec<KernelFamily>> {
    let mut fams = match cfg.families.as_deref() {
        None | Some("all") => KernelFamily::ALL.to_vec(),
        Some(list) => split_names(list)
            .into_iter()
            .map(|name| {
                KernelFamily::from_name(name).ok_or_else(|| {
                    anyhow!(
                        "families: unknown smoothing family '{name}' (valid: {}, all)",
                        valid_names(KernelFamily::ALL.iter().map(|f| f.name()))
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    fams.sort_by_key(|f| f.name());
    fams.dedup();
    Ok(fams)
}

fn derivative_families(cfg: &ExperimentConfig) -> Result<Vec<DerivKernelFamily>> {
    let mut fams = match cfg.families.as_deref() {
        None | Some("all") => DerivKernelFamily::ALL.to_vec(),
        Some(list) => split_names(list)
            .into_iter()
            .map(|name| {
                DerivKernelFamily::from_name(name).ok_or_else(|| {
                    anyhow!(
                        "families: unknown derivative family '{name}' (valid: {}, all)",
                        valid_names(DerivKernelFamily::ALL.iter().map(|f| f.name()))
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    fams.sort_by_key(|f| f.name());
    fams.dedup();
    Ok(fams)
}

fn detectors(cfg: &ExperimentConfig) -> Result<Vec<Detector>> {
    let mut dets = match cfg.detector.as_deref() {
        None | Some("all") => Detector::ALL.to_vec(),
        Some(list) => split_names(list)
            .into_iter()
            .map(|name| {
                Detector::from_name(name).ok_or_else(|| {
                    anyhow!(
                        "detector: unknown detector '{name}' (valid: {}, all)",
                        valid_names(Detector::ALL.iter().map(|d| d.name()))
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    dets.sort_by_key(|d| d.name());
    dets.dedup();
    Ok(dets)
}

fn valid_names<'a>(names: impl Iterator<Item = &'a str>) -> String {
    let mut sorted: Vec<&str> = names.collect();
    sorted.sort_unstable();
    sorted.join(", ")
}

/// Families list echoed in metadata.
fn family_list<T: Copy>(fams: &[T], name: impl Fn(T) -> &'static str) -> String {
    fams.iter().map(|&f| name(f)).collect::<Vec<_>>().join(",")
}

fn sigma_spec(cfg: &ExperimentConfig, default: Option<SigmaSpec>) -> Result<SigmaSpec> {
    match (cfg.sigma.as_deref(), default) {
        (Some(raw), _) => SigmaSpec::parse(raw),
        (None, Some(spec)) => Ok(spec),
        (None, None) => bail!("sigma: required for {}", cfg.experiment.name()),
    }
}

fn parse_plain_order(cfg: &ExperimentConfig, default: u32, min: u32) -> Result<u32> {
    let order = match cfg.order.as_deref() {
        None => default,
        Some(raw) => raw
            .parse::<u32>()
            .map_err(|_| anyhow!("order: expected an integer, got '{raw}'"))?,
    };
    if order < min || order > 4 {
        bail!("order: must lie in {min}..=4, got {order}");
    }
    Ok(order)
}

/// Parses `m1` or `m1:m2` for the directional mask orders.
fn parse_mask_orders(cfg: &ExperimentConfig) -> Result<(u32, u32)> {
    let raw = cfg
        .order
        .as_deref()
        .ok_or_else(|| anyhow!("order: required for directional-dump ('m1' or 'm1:m2')"))?;
    let parse = |part: &str| {
        part.parse::<u32>()
            .map_err(|_| anyhow!("order: expected an integer, got '{part}'"))
    };
    let (m1, m2) = match raw.split_once(':') {
        None => (parse(raw)?, 0),
        Some((a, b)) => (parse(a)?, parse(b)?),
    };
    let total = m1 + m2;
    if total == 0 || total > 4 {
        bail!("order: total order m1+m2 must lie in 1..=4, got {m1}:{m2}");
    }
    Ok((m1, m2))
}

/// Rejects fields that were given explicitly but have no effect on the
/// chosen experiment, so a flag never silently does nothing.
fn reject_unused(cfg: &ExperimentConfig, used: &[&str]) -> Result<()> {
    let given: [(&str, bool); 8] = [
        ("families", cfg.families.is_some()),
        ("detector", cfg.detector.is_some()),
        ("order", cfg.order.is_some()),
        ("monomial", cfg.monomial.is_some()),
        ("sigma", cfg.sigma.is_some()),
        ("epsilon", cfg.epsilon.is_some()),
        ("boundary", cfg.boundary.is_some()),
        ("phi", cfg.phi.is_some()),
    ];
    for (name, present) in given {
        if present && !used.contains(&name) {
            bail!("{name}: not used by {}", cfg.experiment.name());
        }
    }
    Ok(())
}

fn reject_grid_output(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.wants_grid_output() {
        bail!("out: .pgm grid output applies only to directional-dump and affine-dump");
    }
    Ok(())
}

fn scale_param(sigma: f64) -> Result<ScaleParam> {
    ScaleParam::from_sigma(sigma).map_err(|e| anyhow!("sigma: {e}"))
}

/// `kernel-dump`: the taps of one kernel, `n,coeff` per row.
pub fn kernel_dump(cfg: &ExperimentConfig) -> Result<String> {
    reject_unused(cfg, &["families", "order", "sigma", "epsilon"])?;
    reject_grid_output(cfg)?;
    let policy = epsilon_policy(cfg)?;
    let order = parse_plain_order(cfg, 0, 0)?;
    let sigma = sigma_spec(cfg, None)?.single_value()?;
    let s = scale_param(sigma)?;

    let raw = cfg
        .families
        .as_deref()
        .ok_or_else(|| anyhow!("families: kernel-dump needs exactly one family"))?;
    let names = split_names(raw);
    let [name] = names.as_slice() else {
        bail!("families: kernel-dump needs exactly one family, got '{raw}'");
    };

    let (kernel, family_kind): (DiscreteKernel1D, &str) = if order == 0 {
        let fam = KernelFamily::from_name(name).ok_or_else(|| {
            anyhow!(
                "families: unknown smoothing family '{name}' (valid: {})",
                valid_names(KernelFamily::ALL.iter().map(|f| f.name()))
            )
        })?;
        (smoothing_kernel(fam, s, policy), "smoothing")
    } else {
        let fam = DerivKernelFamily::from_name(name).ok_or_else(|| {
            anyhow!(
                "families: unknown derivative family '{name}' (valid: {})",
                valid_names(DerivKernelFamily::ALL.iter().map(|f| f.name()))
            )
        })?;
        let alpha = DerivOrder::new(order).map_err(|e| anyhow!("order: {e}"))?;
        (
            derivative_kernel(fam, alpha, s, policy).map_err(|e| anyhow!("order: {e}"))?,
            "derivative",
        )
    };

    let meta = vec![
        "experiment: kernel-dump".to_string(),
        format!("family: {name} ({family_kind})"),
        format!("order: {order}"),
        format!("sigma: {sigma}"),
        format!("epsilon: {:e}", policy.epsilon()),
    ];
    let rows: Vec<String> = kernel
        .indexed()
        .map(|(n, c)| format!("{n},{}", fmt_sig(c)))
        .collect();
    Ok(render_csv(&meta, "n,coeff", &rows))
}

/// `smoothing-metrics`: the smoothing error report over a scale sweep.
pub fn smoothing_metrics(cfg: &ExperimentConfig) -> Result<String> {
    reject_unused(cfg, &["families", "sigma", "epsilon"])?;
    reject_grid_output(cfg)?;
    let policy = epsilon_policy(cfg)?;
    let fams = smoothing_families(cfg)?;
    let spec = sigma_spec(cfg, Some(METRIC_SWEEP))?;
    let sigmas = spec.range_values()?;

    let mut cells = Vec::with_capacity(fams.len() * sigmas.len());
    for &fam in &fams {
        for &sigma in &sigmas {
            cells.push((fam, sigma));
        }
    }
    let chunks = parallel_map(&cells, |&(fam, sigma)| -> Result<Vec<String>> {
        let report = smoothing_error_report(fam, scale_param(sigma)?, policy);
        Ok(report
            .entries()
            .iter()
            .map(|(metric, v)| {
                format!(
                    "{},{},{metric},{}",
                    fam.name(),
                    fmt_sig(sigma),
                    fmt_metric(v)
                )
            })
            .collect())
    });

    let meta = vec![
        "experiment: smoothing-metrics".to_string(),
        format!("families: {}", family_list(&fams, KernelFamily::name)),
        format!("sigma: {}", spec.describe()),
        format!("epsilon: {:e}", policy.epsilon()),
    ];
    let mut rows = Vec::new();
    for chunk in chunks {
        rows.extend(chunk?);
    }
    Ok(render_csv(&meta, "family,sigma,metric,value", &rows))
}

/// `derivative-metrics`: the derivative error report over a scale sweep.
pub fn derivative_metrics(cfg: &ExperimentConfig) -> Result<String> {
    reject_unused(cfg, &["families", "order", "sigma", "epsilon"])?;
    reject_grid_output(cfg)?;
    let policy = epsilon_policy(cfg)?;
    let fams = derivative_families(cfg)?;
    let alpha = DerivOrder::new(parse_plain_order(cfg, 1, 1)?).expect("validated above");
    let spec = sigma_spec(cfg, Some(METRIC_SWEEP))?;
    let sigmas = spec.range_values()?;

    let mut cells = Vec::with_capacity(fams.len() * sigmas.len());
    for &fam in &fams {
        for &sigma in &sigmas {
            cells.push((fam, sigma));
        }
    }
    let chunks = parallel_map(&cells, |&(fam, sigma)| -> Result<Vec<String>> {
        let report = derivative_error_report(fam, alpha, scale_param(sigma)?, policy)
            .map_err(|e| anyhow!("sigma: {e}"))?;
        Ok(report
            .entries()
            .iter()
            .map(|(metric, v)| {
                format!(
                    "{},{},{metric},{}",
                    fam.name(),
                    fmt_sig(sigma),
                    fmt_metric(v)
                )
            })
            .collect())
    });

    let mut meta = vec![
        "experiment: derivative-metrics".to_string(),
        format!("families: {}", family_list(&fams, DerivKernelFamily::name)),
        format!("order: {}", alpha.get()),
        format!("sigma: {}", spec.describe()),
        format!("epsilon: {:e}", policy.epsilon()),
    ];
    for &fam in &fams {
        meta.push(format!(
            "cascade smoother: {} -> {}",
            fam.name(),
            fam.paired_smoothing().name()
        ));
    }
    let mut rows = Vec::new();
    for chunk in chunks {
        rows.extend(chunk?);
    }
    Ok(render_csv(&meta, "family,sigma,metric,value", &rows))
}

/// `monomial-response`: responses to the probe `x^k` over a scale sweep.
pub fn monomial_response_sweep(cfg: &ExperimentConfig) -> Result<String> {
    reject_unused(cfg, &["families", "order", "monomial", "sigma", "epsilon"])?;
    reject_grid_output(cfg)?;
    let policy = epsilon_policy(cfg)?;
    let fams = derivative_families(cfg)?;
    let order = parse_plain_order(cfg, 1, 1)?;
    let alpha = DerivOrder::new(order).expect("validated above");
    let degree = match cfg.monomial {
        None => alpha,
        Some(k) => DerivOrder::new(k).map_err(|e| anyhow!("monomial: {e}"))?,
    };
    let spec = sigma_spec(cfg, Some(MONOMIAL_SWEEP))?;
    let sigmas = spec.range_values()?;

    let mut cells = Vec::with_capacity(fams.len() * sigmas.len());
    for &fam in &fams {
        for &sigma in &sigmas {
            cells.push((fam, sigma));
        }
    }
    let rows = parallel_map(&cells, |&(fam, sigma)| -> Result<String> {
        let value = monomial_response(fam, alpha, degree, scale_param(sigma)?, policy)
            .map_err(|e| anyhow!("sigma: {e}"))?;
        Ok(format!(
            "{},{},{}",
            fam.name(),
            fmt_sig(sigma),
            fmt_sig(value)
        ))
    });

    let meta = vec![
        "experiment: monomial-response".to_string(),
        format!("families: {}", family_list(&fams, DerivKernelFamily::name)),
        format!("order: {}", alpha.get()),
        format!("monomial: {}", degree.get()),
        format!("sigma: {}", spec.describe()),
        format!("epsilon: {:e}", policy.epsilon()),
    ];
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(render_csv(&meta, "family,sigma,value", &rows))
}

/// `scale-selection`: the selection benchmark over reference scales.
pub fn scale_selection(cfg: &ExperimentConfig) -> Result<String> {
    reject_unused(
        cfg,
        &["families", "detector", "sigma", "epsilon", "boundary"],
    )?;
    reject_grid_output(cfg)?;
    let policy = epsilon_policy(cfg)?;
    let dets = detectors(cfg)?;
    let fams = derivative_families(cfg)?;
    let spec = sigma_spec(cfg, Some(REFERENCE_SWEEP))?;
    let refs = spec.range_values()?;
    let boundary = BoundaryTag::parse(cfg.boundary.as_deref())?;
    let acc_grid = ScaleGrid::new(ACCURACY_MIN, ACCURACY_MAX, ACCURACY_COUNT)
        .expect("accuracy grid constants are valid");

    let mut cells = Vec::with_capacity(dets.len() * fams.len() * refs.len());
    for &det in &dets {
        for &fam in &fams {
            for &sigma_ref in &refs {
                cells.push((det, fam, sigma_ref));
            }
        }
    }
    let rows = parallel_map(&cells, |&(det, fam, sigma_ref)| -> Result<String> {
        let row =
            benchmark_reference_scale(det, fam, sigma_ref, &acc_grid, policy, boundary.policy())
                .map_err(|e| anyhow!("sigma: {e}"))?;
        Ok(format!(
            "{},{},{},{},{},{}",
            det.name(),
            fam.name(),
            fmt_sig(row.sigma_ref),
            fmt_sig(row.sigma_hat),
            fmt_sig(row.rel_error),
            row.kind.name()
        ))
    });

    let meta = vec![
        "experiment: scale-selection".to_string(),
        format!("detectors: {}", family_list(&dets, Detector::name)),
        format!("families: {}", family_list(&fams, DerivKernelFamily::name)),
        format!("reference sigma: {}", spec.describe()),
        format!("accuracy sigma: {ACCURACY_MIN}:{ACCURACY_MAX}:{ACCURACY_COUNT} (log)"),
        format!("epsilon: {:e}", policy.epsilon()),
        format!("boundary: {}", boundary.name()),
        "image half-width: ceil(4 (sigma_ref + sigma_max))".to_string(),
        "refinement: parabola through (ln sigma, response) triplets".to_string(),
    ];
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(render_csv(
        &meta,
        "detector,family,sigma_ref,sigma_hat,rel_error,extremum_kind",
        &rows,
    ))
}

/// `directional-dump`: one difference mask as `x,y,value` rows.
pub fn directional_dump(cfg: &ExperimentConfig) -> Result<String> {
    reject_unused(cfg, &["order", "phi"])?;
    let (m1, m2) = parse_mask_orders(cfg)?;
    let phi = cfg.phi.unwrap_or(0.0);
    let mask = directional_mask(m1, m2, phi).map_err(|e| anyhow!("phi: {e}"))?;

    let meta = vec![
        "experiment: directional-dump".to_string(),
        format!("order: {m1}:{m2} (along phi : along the orthogonal)"),
        format!("phi: {phi}"),
        format!("size: {0}x{0}", mask.size()),
    ];
    if cfg.wants_grid_output() {
        return Ok(render_grid(&meta, mask.size(), mask.size(), mask.coeffs()));
    }
    Ok(render_csv(&meta, "x,y,value", &mask_rows(&mask)))
}

fn mask_rows(mask: &Mask2D) -> Vec<String> {
    mask.indexed()
        .map(|(dx, dy, c)| format!("{dx},{dy},{}", fmt_sig(c)))
        .collect()
}

/// `affine-dump`: a sampled or integrated anisotropic Gaussian kernel as
/// `x,y,value` rows over its support box.
pub fn affine_dump(cfg: &ExperimentConfig) -> Result<String> {
    reject_unused(cfg, &["families", "sigma", "phi", "epsilon"])?;
    let policy = epsilon_policy(cfg)?;
    let raw = cfg
        .families
        .as_deref()
        .ok_or_else(|| anyhow!("families: affine-dump needs 'sampled' or 'integrated'"))?;
    let names = split_names(raw);
    let [name] = names.as_slice() else {
        bail!("families: affine-dump needs exactly one family, got '{raw}'");
    };
    let (sigma1, sigma2) = sigma_spec(cfg, None)?.pair_values()?;
    let phi = cfg.phi.unwrap_or(PI / 6.0);
    if !phi.is_finite() {
        bail!("phi: must be finite, got {phi}");
    }
    let params = AffineParams::new(sigma1, sigma2, phi).map_err(|e| anyhow!("sigma: {e}"))?;

    let kernel: Image2D = match *name {
        "sampled" => sampled_affine_kernel(params, policy),
        "integrated" => integrated_affine_kernel(params, policy),
        other => bail!("families: unknown affine family '{other}' (valid: integrated, sampled)"),
    };

    let meta = vec![
        "experiment: affine-dump".to_string(),
        format!("family: {name}"),
        format!("sigma: {sigma1}:{sigma2}"),
        format!("phi: {}", params.phi()),
        format!("epsilon: {:e}", policy.epsilon()),
        format!(
            "support: x in [{},{}], y in [{},{}]",
            kernel.min_x(),
            kernel.max_x(),
            kernel.min_y(),
            kernel.max_y()
        ),
    ];
    if cfg.wants_grid_output() {
        return Ok(render_grid(
            &meta,
            kernel.width(),
            kernel.height(),
            kernel.samples(),
        ));
    }
    let mut rows = Vec::with_capacity(kernel.width() * kernel.height());
    for y in kernel.min_y()..=kernel.max_y() {
        for x in kernel.min_x()..=kernel.max_x() {
            let v = kernel.get(x, y).expect("in-range grid walk");
            rows.push(format!("{x},{y},{}", fmt_sig(v)));
        }
    }
    Ok(render_csv(&meta, "x,y,value", &rows))
}

//! Experiment runner library behind the `scsp` binary.
//!
//! Seven deterministic experiments sweep the kernel families, error
//! metrics, and scale-selection benchmarks of `scsp-core` and write CSV
//! (or, for the 2-D dumps, a plain-text float grid). Outputs carry a
//! `#`-prefixed metadata block echoing the configuration and contain no
//! timestamps or randomness, so equal configurations always produce
//! byte-identical files.

mod experiments;
mod output;
mod sweep;

pub use sweep::SigmaSpec;

use anyhow::{bail, Context, Result};
use std::path::PathBuf;

/// The experiments the runner knows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    /// One kernel's taps as `n,coeff` rows.
    KernelDump,
    /// Smoothing-kernel error measures over a scale sweep.
    SmoothingMetrics,
    /// Derivative-kernel error measures over a scale sweep.
    DerivativeMetrics,
    /// Derivative-kernel responses to monomial probes over a scale sweep.
    MonomialResponse,
    /// Selected scales on synthetic blobs, edges, and ridges.
    ScaleSelection,
    /// One directional or axis-aligned difference mask as `x,y,value` rows.
    DirectionalDump,
    /// One anisotropic Gaussian kernel as `x,y,value` rows.
    AffineDump,
}

impl ExperimentKind {
    /// All experiments, in catalog order.
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::KernelDump,
        ExperimentKind::SmoothingMetrics,
        ExperimentKind::DerivativeMetrics,
        ExperimentKind::MonomialResponse,
        ExperimentKind::ScaleSelection,
        ExperimentKind::DirectionalDump,
        ExperimentKind::AffineDump,
    ];

    /// Stable identifier used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::KernelDump => "kernel-dump",
            ExperimentKind::SmoothingMetrics => "smoothing-metrics",
            ExperimentKind::DerivativeMetrics => "derivative-metrics",
            ExperimentKind::MonomialResponse => "monomial-response",
            ExperimentKind::ScaleSelection => "scale-selection",
            ExperimentKind::DirectionalDump => "directional-dump",
            ExperimentKind::AffineDump => "affine-dump",
        }
    }

    /// Inverse of [`ExperimentKind::name`].
    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    /// One-line catalog description.
    pub fn description(self) -> &'static str {
        match self {
            ExperimentKind::KernelDump => {
                "taps of one smoothing or derivative kernel at one scale (n,coeff)"
            }
            ExperimentKind::SmoothingMetrics => {
                "normalization, scale-offset, relative-scale, and cascade errors per family and scale"
            }
            ExperimentKind::DerivativeMetrics => {
                "derivative normalization, spread, spread-offset, and cascade errors per family and scale"
            }
            ExperimentKind::MonomialResponse => {
                "responses of derivative kernels to x^k probes per family and scale"
            }
            ExperimentKind::ScaleSelection => {
                "selected scales and relative errors on synthetic blobs, edges, and ridges"
            }
            ExperimentKind::DirectionalDump => {
                "one directional or axis-aligned difference mask (x,y,value)"
            }
            ExperimentKind::AffineDump => {
                "one sampled or integrated anisotropic Gaussian kernel (x,y,value)"
            }
        }
    }
}

/// A fully specified run: the experiment, its raw option values, and the
/// output path. Fields left `None` fall back to per-experiment defaults;
/// fields that an experiment does not use must stay `None`. There is no
/// randomness anywhere, so a config determines the output bytes.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Comma-separated family names, or `all`.
    pub families: Option<String>,
    /// Comma-separated detector names, or `all`.
    pub detector: Option<String>,
    /// Derivative order; `m1:m2` for directional masks.
    pub order: Option<String>,
    /// Monomial degree `k` of the probe `x^k`.
    pub monomial: Option<u32>,
    /// Scale argument: `value`, `sigma1:sigma2`, or `min:max:count[:log|:linear]`.
    pub sigma: Option<String>,
    /// Kernel truncation tail mass.
    pub epsilon: Option<f64>,
    /// Boundary extension for image convolutions.
    pub boundary: Option<String>,
    /// Orientation in radians.
    pub phi: Option<f64>,
    /// Output file; a `.pgm` extension selects the float-grid format for
    /// the 2-D dumps.
    pub out: PathBuf,
}

impl ExperimentConfig {
    /// Minimal config for `experiment` writing to `out`.
    pub fn new(experiment: ExperimentKind, out: PathBuf) -> Self {
        ExperimentConfig {
            experiment,
            families: None,
            detector: None,
            order: None,
            monomial: None,
            sigma: None,
            epsilon: None,
            boundary: None,
            phi: None,
            out,
        }
    }

    pub(crate) fn wants_grid_output(&self) -> bool {
        self.out.extension().is_some_and(|e| e == "pgm")
    }
}

/// Renders the configured experiment to its complete output text.
pub fn render(config: &ExperimentConfig) -> Result<String> {
    match config.experiment {
        ExperimentKind::KernelDump => experiments::kernel_dump(config),
        ExperimentKind::SmoothingMetrics => experiments::smoothing_metrics(config),
        ExperimentKind::DerivativeMetrics => experiments::derivative_metrics(config),
        ExperimentKind::MonomialResponse => experiments::monomial_response_sweep(config),
        ExperimentKind::ScaleSelection => experiments::scale_selection(config),
        ExperimentKind::DirectionalDump => experiments::directional_dump(config),
        ExperimentKind::AffineDump => experiments::affine_dump(config),
    }
}

/// Runs the configured experiment and writes its output file.
pub fn run(config: &ExperimentConfig) -> Result<()> {
    let text = render(config)?;
    std::fs::write(&config.out, text)
        .with_context(|| format!("out: cannot write '{}'", config.out.display()))?;
    Ok(())
}

/// Resolves an experiment name, listing the valid names on failure.
pub fn experiment_from_name(name: &str) -> Result<ExperimentKind> {
    match ExperimentKind::from_name(name) {
        Some(kind) => Ok(kind),
        None => {
            let valid: Vec<&str> = ExperimentKind::ALL.iter().map(|e| e.name()).collect();
            bail!(
                "experiment: unknown experiment '{name}' (valid: {})",
                valid.join(", ")
            );
        }
    }
}

/// The experiment catalog printed when no experiment is requested.
pub fn list_experiments() -> String {
    let mut out = String::from("experiments:\n");
    for kind in ExperimentKind::ALL {
        out.push_str(&format!("  {:<20} {}\n", kind.name(), kind.description()));
    }
    out.push_str("\nrun one with: scsp --experiment <name> --out <path> [options]\n");
    out
}

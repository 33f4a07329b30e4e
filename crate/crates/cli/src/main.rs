//! `scsp`: deterministic experiment runner for discrete scale-space
//! kernels. Invoked without arguments it prints the experiment catalog.

use clap::Parser;
use scsp_cli::{experiment_from_name, list_experiments, run, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "scsp",
    version,
    about = "Deterministic experiment runner for discrete scale-space kernels",
    after_help = "Without --experiment the catalog of experiments is printed.\n\
                  SCSP_THREADS caps the worker count; it never changes output bytes."
)]
struct Cli {
    /// Experiment to run (see the catalog).
    #[arg(long)]
    experiment: Option<String>,

    /// Comma-separated kernel families, or 'all'.
    #[arg(long, visible_alias = "family")]
    families: Option<String>,

    /// Comma-separated detectors for scale-selection, or 'all'.
    #[arg(long)]
    detector: Option<String>,

    /// Derivative order; 'm1:m2' for directional masks.
    #[arg(long)]
    order: Option<String>,

    /// Monomial degree k of the probe x^k.
    #[arg(long)]
    monomial: Option<u32>,

    /// Scale: 'value', 'sigma1:sigma2', or 'min:max:count[:log|:linear]'.
    #[arg(long)]
    sigma: Option<String>,

    /// Kernel truncation tail mass.
    #[arg(long)]
    epsilon: Option<f64>,

    /// Boundary extension for image convolutions: replicate, mirror, or
    /// zeropad.
    #[arg(long)]
    boundary: Option<String>,

    /// Orientation in radians.
    #[arg(long)]
    phi: Option<f64>,

    /// Output file; '.pgm' selects the float-grid format for 2-D dumps.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    let Some(name) = cli.experiment.as_deref() else {
        print!("{}", list_experiments());
        return Ok(());
    };
    let experiment = experiment_from_name(name)?;
    let Some(out) = cli.out else {
        anyhow::bail!("out: required (path of the output file)");
    };
    let config = ExperimentConfig {
        experiment,
        families: cli.families,
        detector: cli.detector,
        order: cli.order,
        monomial: cli.monomial,
        sigma: cli.sigma,
        epsilon: cli.epsilon,
        boundary: cli.boundary,
        phi: cli.phi,
        out,
    };
    run(&config)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

//! Acceptance gate for the whole workspace: twelve end-to-end checks, one
//! test per criterion, each printing a single PASS/FAIL verdict line. All
//! tolerances are pinned as constants next to the check that uses them.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scsp_core::directional::{cartesian_mask, directional_mask, Mask2D};
use scsp_core::kernels::{
    central_difference_mask, smoothing_kernel, DerivKernelFamily, KernelFamily, TruncationPolicy,
};
use scsp_core::metrics::{monomial_response, smoothing_error_report, spread_measure, MetricReport};
use scsp_core::scalesel::{
    analytic_signature, benchmark_reference_scale, relative_scale_error,
    run_scale_selection_experiment, select_scale, Detector, ExtremumKind, ScaleGrid,
};
use scsp_core::signal::{convolve_1d, BoundaryPolicy, Signal1D};
use scsp_core::specfun::{gauss_deriv, ref_l1_norm, ref_spread, DerivOrder, ScaleParam};

fn sp(s: f64) -> ScaleParam {
    ScaleParam::new(s).unwrap()
}

fn pol(epsilon: f64) -> TruncationPolicy {
    TruncationPolicy::new(epsilon).unwrap()
}

fn ord(alpha: u32) -> DerivOrder {
    DerivOrder::new(alpha).unwrap()
}

fn metric(report: &MetricReport, key: &str) -> f64 {
    report.get(key).and_then(|m| m.value()).unwrap_or(f64::NAN)
}

fn ck(failures: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        failures.push(msg());
    }
}

fn verdict(id: u32, slug: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("criterion {id:02} {slug}: PASS");
    } else {
        println!(
            "criterion {id:02} {slug}: FAIL ({} problem(s))",
            failures.len()
        );
        for f in &failures {
            println!("  - {f}");
        }
        panic!("criterion {id:02} {slug} failed:\n{}", failures.join("\n"));
    }
}

const C1_EPSILON: f64 = 1e-12;
const C1_NORM_TOL: f64 = 1e-8;
const C1_DELTA_S_TOL: f64 = 1e-8;
const C1_CASCADE_TOL: f64 = 1e-7;
const C1_TIME_LIMIT: Duration = Duration::from_secs(5);

#[test]
fn c01_discrete_analogue_exactness() {
    let mut failures = Vec::new();
    let start = Instant::now();
    let sigmas = ScaleGrid::new(0.1, 4.0, 100).unwrap().sigmas();
    for &sigma in &sigmas {
        let report = smoothing_error_report(
            KernelFamily::DiscAnalogue,
            sp(sigma * sigma),
            pol(C1_EPSILON),
        );
        let e_norm = metric(&report, "E_norm");
        let e_ds = metric(&report, "E_delta_s");
        let e_cascade = metric(&report, "E_cascade");
        ck(&mut failures, e_norm.abs() <= C1_NORM_TOL, || {
            format!("sigma {sigma}: E_norm {e_norm}")
        });
        ck(&mut failures, e_ds.abs() <= C1_DELTA_S_TOL, || {
            format!("sigma {sigma}: E_delta_s {e_ds}")
        });
        ck(&mut failures, e_cascade.abs() <= C1_CASCADE_TOL, || {
            format!("sigma {sigma}: E_cascade {e_cascade}")
        });
    }
    let elapsed = start.elapsed();
    ck(&mut failures, elapsed < C1_TIME_LIMIT, || {
        format!("100-scale sweep took {elapsed:?}")
    });
    verdict(1, "discrete-analogue exactness", failures);
}

const C2_EPSILON: f64 = 1e-12;
const C2_OFFSET: f64 = 1.0 / 12.0;
const C2_TOL: f64 = 5e-3;

#[test]
fn c02_integrated_kernel_scale_offset() {
    let mut failures = Vec::new();
    let report = smoothing_error_report(KernelFamily::Integrated, sp(16.0), pol(C2_EPSILON));
    let e_ds = metric(&report, "E_delta_s");
    ck(&mut failures, (e_ds - C2_OFFSET).abs() <= C2_TOL, || {
        format!("E_delta_s at sigma 4 is {e_ds}, expected about {C2_OFFSET}")
    });
    verdict(2, "integrated-kernel scale offset", failures);
}

const C3_EPSILON: f64 = 1e-12;
const C3_COARSE_TOL: f64 = 1e-4;

#[test]
fn c03_sampled_kernel_fine_scale_failure() {
    let mut failures = Vec::new();
    let fine = smoothing_error_report(KernelFamily::Sampled, sp(0.09), pol(C3_EPSILON));
    let coarse = smoothing_error_report(KernelFamily::Sampled, sp(2.25), pol(C3_EPSILON));
    let e_fine = metric(&fine, "E_norm");
    let e_coarse = metric(&coarse, "E_norm");
    ck(&mut failures, e_fine > 0.1, || {
        format!("E_norm at sigma 0.3 is {e_fine}, expected > 0.1")
    });
    ck(&mut failures, e_coarse.abs() < C3_COARSE_TOL, || {
        format!("E_norm at sigma 1.5 is {e_coarse}, expected < {C3_COARSE_TOL}")
    });
    verdict(3, "sampled-kernel fine-scale failure", failures);
}

const C4_EPSILON: f64 = 1e-12;
const C4_TOL: f64 = 1e-8;
const C4_FAMILIES: [DerivKernelFamily; 3] = [
    DerivKernelFamily::DiscAnalogue,
    DerivKernelFamily::HybridSampled,
    DerivKernelFamily::HybridIntegrated,
];

#[test]
fn c04_monomial_exactness() {
    let mut failures = Vec::new();
    let factorial = [1.0, 1.0, 2.0, 6.0, 24.0];
    let sigmas = ScaleGrid::new(0.1, 2.0, 50).unwrap().sigmas();
    for family in C4_FAMILIES {
        for &sigma in &sigmas {
            let s = sp(sigma * sigma);
            for alpha in 1..=4u32 {
                let p =
                    monomial_response(family, ord(alpha), ord(alpha), s, pol(C4_EPSILON)).unwrap();
                let want = factorial[alpha as usize];
                ck(&mut failures, (p - want).abs() <= C4_TOL, || {
                    format!(
                        "{} alpha {alpha} sigma {sigma}: {p} vs {want}",
                        family.name()
                    )
                });
                if alpha >= 2 {
                    let p =
                        monomial_response(family, ord(alpha), ord(alpha - 2), s, pol(C4_EPSILON))
                            .unwrap();
                    ck(&mut failures, p.abs() <= C4_TOL, || {
                        format!(
                            "{} alpha {alpha} degree {} sigma {sigma}: {p} vs 0",
                            family.name(),
                            alpha - 2
                        )
                    });
                }
            }
        }
    }
    verdict(4, "monomial exactness", failures);
}

const C5_EPSILON: f64 = 1e-12;
const C5_COARSE_TOL: f64 = 1e-3;

#[test]
fn c05_sampled_derivative_fine_scale_breakdown() {
    let mut failures = Vec::new();
    let fine = monomial_response(
        DerivKernelFamily::Sampled,
        ord(1),
        ord(1),
        sp(0.16),
        pol(C5_EPSILON),
    )
    .unwrap();
    let coarse = monomial_response(
        DerivKernelFamily::Sampled,
        ord(1),
        ord(1),
        sp(2.25),
        pol(C5_EPSILON),
    )
    .unwrap();
    ck(&mut failures, (fine - 1.0).abs() > 0.05, || {
        format!("slope response at sigma 0.4 is {fine}, expected well off 1")
    });
    ck(&mut failures, (coarse - 1.0).abs() <= C5_COARSE_TOL, || {
        format!("slope response at sigma 1.5 is {coarse}, expected 1 within {C5_COARSE_TOL}")
    });
    verdict(5, "sampled-derivative fine-scale breakdown", failures);
}

const C6_QUAD_TOL: f64 = 1e-6;
const C6_PRINT_TOL: f64 = 5e-4;
const C6_PRINTED_L1: [f64; 5] = [1.0, 0.798, 0.968, 1.510, 2.801];
const C6_PRINTED_SPREAD: [f64; 5] = [1.0, 1.414, 1.498, 1.498, 1.481];

/// Composite Simpson rule over [a, b] with an even interval count.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn c06_continuous_reference_constants() {
    let mut failures = Vec::new();
    for alpha in 0..=4u32 {
        let a = ord(alpha);
        let abs_deriv = |x: f64| gauss_deriv(x, 1.0, a).unwrap().abs();
        let mass = 2.0 * simpson(abs_deriv, 0.0, 12.0, 400_000);
        let second = 2.0 * simpson(|x| x * x * abs_deriv(x), 0.0, 12.0, 400_000);
        let quad_spread = (second / mass).sqrt();

        let l1 = ref_l1_norm(a, 1.0).unwrap();
        let spread = ref_spread(a, 1.0).unwrap();
        ck(&mut failures, (l1 - mass).abs() <= C6_QUAD_TOL, || {
            format!("order {alpha}: ref_l1_norm {l1} vs quadrature {mass}")
        });
        ck(
            &mut failures,
            (spread - quad_spread).abs() <= C6_QUAD_TOL,
            || format!("order {alpha}: ref_spread {spread} vs quadrature {quad_spread}"),
        );
        let printed = C6_PRINTED_L1[alpha as usize];
        ck(&mut failures, (l1 - printed).abs() <= C6_PRINT_TOL, || {
            format!("order {alpha}: ref_l1_norm {l1} rounds away from {printed}")
        });
        let printed = C6_PRINTED_SPREAD[alpha as usize];
        ck(
            &mut failures,
            (spread - printed).abs() <= C6_PRINT_TOL,
            || format!("order {alpha}: ref_spread {spread} rounds away from {printed}"),
        );
    }
    verdict(6, "continuous reference constants", failures);
}

#[test]
fn c07_central_difference_spread_floors() {
    let mut failures = Vec::new();
    let floors = [1.0, 0.5f64.sqrt(), 2.0f64.sqrt(), 1.0];
    for alpha in 1..=4u32 {
        let mask = central_difference_mask(ord(alpha)).unwrap();
        let spread = spread_measure(&mask).unwrap();
        let want = floors[(alpha - 1) as usize];
        ck(&mut failures, spread == want, || {
            format!("order {alpha}: spread {spread:?} != {want:?} exactly")
        });
    }
    verdict(7, "central-difference spread floors", failures);
}

const C8_TOL: f64 = 5e-3;
const C8_REF_COUNT: usize = 12;

#[test]
fn c08_analytic_scale_selection_oracle() {
    let mut failures = Vec::new();
    let scales = ScaleGrid::new(0.1, 6.0, 80).unwrap().sigmas();
    let refs = ScaleGrid::new(0.5, 4.0, C8_REF_COUNT).unwrap().sigmas();
    for detector in Detector::ALL {
        for &sigma_ref in &refs {
            let sig = analytic_signature(detector, sigma_ref, &scales).unwrap();
            let est = select_scale(&sig, detector.polarity(), sigma_ref).unwrap();
            let rel = relative_scale_error(est.sigma_hat, sigma_ref).unwrap();
            ck(
                &mut failures,
                est.kind == ExtremumKind::InteriorExtremum,
                || {
                    format!(
                        "{} ref {sigma_ref}: {} extremum",
                        detector.name(),
                        est.kind.name()
                    )
                },
            );
            ck(&mut failures, rel.abs() <= C8_TOL, || {
                format!(
                    "{} ref {sigma_ref}: sigma_hat {} off by {rel}",
                    detector.name(),
                    est.sigma_hat
                )
            });
        }
    }
    verdict(8, "analytic scale-selection oracle", failures);
}

const C9_EPSILON: f64 = 1e-8;
const C9_COARSE_TOL: f64 = 0.05;
const C9_TIME_LIMIT: Duration = Duration::from_secs(180);
const C9_SWEEP_FAMILIES: [DerivKernelFamily; 3] = [
    DerivKernelFamily::Sampled,
    DerivKernelFamily::Integrated,
    DerivKernelFamily::DiscAnalogue,
];

#[test]
fn c09_discrete_scale_selection_behavior() {
    let mut failures = Vec::new();
    let acc = ScaleGrid::new(0.1, 6.0, 80).unwrap();
    let boundary = BoundaryPolicy::Replicate;

    let row = benchmark_reference_scale(
        Detector::LaplacianNorm,
        DerivKernelFamily::Sampled,
        0.5,
        &acc,
        pol(C9_EPSILON),
        boundary,
    )
    .unwrap();
    ck(
        &mut failures,
        row.kind == ExtremumKind::BoundaryExtremum,
        || format!("sampled laplacian at ref 0.5: {} extremum", row.kind.name()),
    );
    ck(&mut failures, row.sigma_hat == acc.sigmas()[0], || {
        format!(
            "sampled laplacian at ref 0.5 picked {}, not the minimum scale",
            row.sigma_hat
        )
    });

    for detector in Detector::ALL {
        for family in DerivKernelFamily::ALL {
            let row =
                benchmark_reference_scale(detector, family, 3.0, &acc, pol(C9_EPSILON), boundary)
                    .unwrap();
            ck(&mut failures, row.rel_error.abs() < C9_COARSE_TOL, || {
                format!(
                    "{} {} at ref 3: rel_error {}",
                    detector.name(),
                    family.name(),
                    row.rel_error
                )
            });
        }
    }

    let start = Instant::now();
    let refs = ScaleGrid::new(0.1, 4.0, 50).unwrap();
    for detector in Detector::ALL {
        for family in C9_SWEEP_FAMILIES {
            let rows = run_scale_selection_experiment(
                detector,
                family,
                &refs,
                &acc,
                pol(C9_EPSILON),
                boundary,
            )
            .unwrap();
            ck(&mut failures, rows.len() == 50, || {
                format!("{} {}: {} rows", detector.name(), family.name(), rows.len())
            });
        }
    }
    let elapsed = start.elapsed();
    ck(&mut failures, elapsed < C9_TIME_LIMIT, || {
        format!("full 4x3 benchmark took {elapsed:?}")
    });
    verdict(9, "discrete scale-selection behavior", failures);
}

const C10_STEER_TOL: f64 = 1e-14;

/// Reads a coefficient from a grid written in display orientation (top row
/// is the largest y, columns run left to right in x).
fn displayed(grid: &[&[f64]], dx: i64, dy: i64) -> f64 {
    let h = (grid.len() / 2) as i64;
    grid[(h - dy) as usize][(dx + h) as usize]
}

fn grid_mismatch(mask: &Mask2D, grid: &[&[f64]]) -> Option<String> {
    if grid.len() != mask.size() {
        return Some(format!("size {} vs {}", mask.size(), grid.len()));
    }
    let h = mask.half() as i64;
    for dy in -h..=h {
        for dx in -h..=h {
            let got = mask.coeff(dx, dy);
            let want = displayed(grid, dx, dy);
            if got != want {
                return Some(format!("({dx},{dy}): {got} vs {want}"));
            }
        }
    }
    None
}

#[test]
fn c10_steering_identities() {
    let mut failures = Vec::new();

    let laplacian: Vec<f64> = {
        let dxx = cartesian_mask(2, 0).unwrap();
        let dyy = cartesian_mask(0, 2).unwrap();
        dxx.coeffs()
            .iter()
            .zip(dyy.coeffs())
            .map(|(a, b)| a + b)
            .collect()
    };
    for i in 0..36 {
        let phi = i as f64 * std::f64::consts::PI / 18.0;
        let along = directional_mask(2, 0, phi).unwrap();
        let across = directional_mask(0, 2, phi).unwrap();
        let worst = along
            .coeffs()
            .iter()
            .zip(across.coeffs())
            .zip(&laplacian)
            .map(|((a, b), want)| (a + b - want).abs())
            .fold(0.0f64, f64::max);
        ck(&mut failures, worst <= C10_STEER_TOL, || {
            format!("rotated laplacian at phi {phi}: deviation {worst}")
        });
    }

    for mx in 0..=4u32 {
        for my in 0..=4u32 {
            let total = mx + my;
            if total == 0 || total > 4 {
                continue;
            }
            let aligned = directional_mask(mx, my, 0.0).unwrap();
            let cart = cartesian_mask(mx, my).unwrap();
            ck(&mut failures, aligned.coeffs() == cart.coeffs(), || {
                format!("({mx},{my}) at phi 0 differs from the Cartesian mask")
            });
        }
    }

    let h = 0.5;
    let q = 0.25;
    let z5: &[f64] = &[0., 0., 0., 0., 0.];
    let grids: [(u32, u32, &[&[f64]]); 14] = [
        (1, 0, &[&[0., 0., 0.], &[-h, 0., h], &[0., 0., 0.]]),
        (0, 1, &[&[0., h, 0.], &[0., 0., 0.], &[0., -h, 0.]]),
        (2, 0, &[&[0., 0., 0.], &[1., -2., 1.], &[0., 0., 0.]]),
        (1, 1, &[&[-q, 0., q], &[0., 0., 0.], &[q, 0., -q]]),
        (0, 2, &[&[0., 1., 0.], &[0., -2., 0.], &[0., 1., 0.]]),
        (3, 0, &[z5, z5, &[-h, 1., 0., -1., h], z5, z5]),
        (
            2,
            1,
            &[z5, &[0., h, -1., h, 0.], z5, &[0., -h, 1., -h, 0.], z5],
        ),
        (
            1,
            2,
            &[
                z5,
                &[0., -h, 0., h, 0.],
                &[0., 1., 0., -1., 0.],
                &[0., -h, 0., h, 0.],
                z5,
            ],
        ),
        (
            0,
            3,
            &[
                &[0., 0., h, 0., 0.],
                &[0., 0., -1., 0., 0.],
                z5,
                &[0., 0., 1., 0., 0.],
                &[0., 0., -h, 0., 0.],
            ],
        ),
        (4, 0, &[z5, z5, &[1., -4., 6., -4., 1.], z5, z5]),
        (
            3,
            1,
            &[z5, &[-q, h, 0., -h, q], z5, &[q, -h, 0., h, -q], z5],
        ),
        (
            2,
            2,
            &[
                z5,
                &[0., 1., -2., 1., 0.],
                &[0., -2., 4., -2., 0.],
                &[0., 1., -2., 1., 0.],
                z5,
            ],
        ),
        (
            1,
            3,
            &[
                &[0., -q, 0., q, 0.],
                &[0., h, 0., -h, 0.],
                z5,
                &[0., -h, 0., h, 0.],
                &[0., q, 0., -q, 0.],
            ],
        ),
        (
            0,
            4,
            &[
                &[0., 0., 1., 0., 0.],
                &[0., 0., -4., 0., 0.],
                &[0., 0., 6., 0., 0.],
                &[0., 0., -4., 0., 0.],
                &[0., 0., 1., 0., 0.],
            ],
        ),
    ];
    for (mx, my, grid) in grids {
        let mask = cartesian_mask(mx, my).unwrap();
        if let Some(problem) = grid_mismatch(&mask, grid) {
            failures.push(format!("({mx},{my}) vs printed grid: {problem}"));
        }
    }
    verdict(10, "steering identities", failures);
}

const C11_EPSILON: f64 = 1e-12;
const C11_TOL: f64 = 1e-12;

#[test]
fn c11_smoothing_difference_commutation() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5c5e);
    let boundary = BoundaryPolicy::ZeroPad;
    for signal_id in 0..3 {
        let samples: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = Signal1D::new(samples, 128).unwrap();
        for s in [1.0, 2.25] {
            let t = smoothing_kernel(KernelFamily::DiscAnalogue, sp(s), pol(C11_EPSILON));
            for alpha in 1..=4u32 {
                let mask = central_difference_mask(ord(alpha)).unwrap();
                let smooth_first = convolve_1d(&convolve_1d(&f, &t, boundary), &mask, boundary);
                let diff_first = convolve_1d(&convolve_1d(&f, &mask, boundary), &t, boundary);
                let margin = (t.radius() + mask.radius()) as i64;
                let mut worst = 0.0f64;
                for x in (-128 + margin)..=(127 - margin) {
                    let a = smooth_first.value(x).unwrap();
                    let b = diff_first.value(x).unwrap();
                    worst = worst.max((a - b).abs());
                }
                ck(&mut failures, worst <= C11_TOL, || {
                    format!("signal {signal_id} s {s} order {alpha}: deviation {worst}")
                });
            }
        }
    }
    verdict(11, "smoothing-difference commutation", failures);
}

const C12_RUNS: [(&str, &[&str]); 7] = [
    ("kernel-dump", &["--families", "disc", "--sigma", "1.5"]),
    (
        "smoothing-metrics",
        &["--families", "all", "--sigma", "0.5:2:5"],
    ),
    (
        "derivative-metrics",
        &["--families", "all", "--order", "2", "--sigma", "0.5:2:4"],
    ),
    (
        "monomial-response",
        &[
            "--families",
            "all",
            "--order",
            "2",
            "--monomial",
            "2",
            "--sigma",
            "0.5:2:6",
        ],
    ),
    (
        "scale-selection",
        &[
            "--detector",
            "gradmag",
            "--families",
            "disc",
            "--sigma",
            "1:2:2",
        ],
    ),
    ("directional-dump", &["--order", "2:1", "--phi", "0.7"]),
    (
        "affine-dump",
        &["--families", "integrated", "--sigma", "2:1", "--phi", "1"],
    ),
];

#[test]
fn c12_cli_determinism() {
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    for (index, (experiment, extra)) in C12_RUNS.iter().enumerate() {
        let mut outputs = Vec::new();
        for (run, threads) in [("a", "1"), ("b", "6")] {
            let path = dir.path().join(format!("{index}-{run}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_scsp"))
                .args(["--experiment", experiment])
                .args(*extra)
                .args(["--out", path.to_str().unwrap()])
                .env("SCSP_THREADS", threads)
                .output()
                .expect("binary runs");
            if !status.status.success() {
                failures.push(format!(
                    "{experiment}: run failed: {}",
                    String::from_utf8_lossy(&status.stderr)
                ));
                break;
            }
            outputs.push(std::fs::read(&path).unwrap());
        }
        if outputs.len() == 2 {
            ck(&mut failures, outputs[0] == outputs[1], || {
                format!("{experiment}: reruns differ")
            });
            ck(&mut failures, !outputs[0].is_empty(), || {
                format!("{experiment}: empty output")
            });
        }
    }
    verdict(12, "CLI determinism", failures);
}

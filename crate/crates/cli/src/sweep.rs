//! Parsing of the `--sigma` flag and the deterministic worker pool.

use anyhow::{bail, Result};
use scsp_core::scalesel::ScaleGrid;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

/// Parsed form of the `--sigma` flag.
///
/// `x` is a single standard deviation, `a:b` an anisotropic pair
/// (`sigma1:sigma2`), and `min:max:count[:log|:linear]` a sweep with
/// logarithmic spacing by default.
#[derive(Clone, Debug, PartialEq)]
pub enum SigmaSpec {
    Single(f64),
    Pair(f64, f64),
    Range {
        min: f64,
        max: f64,
        count: usize,
        log: bool,
    },
}

fn parse_positive(part: &str) -> Result<f64> {
    match part.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => bail!("sigma: expected a positive number, got '{part}'"),
    }
}

impl SigmaSpec {
    pub fn parse(raw: &str) -> Result<Self> {
        let parts: Vec<&str> = raw.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(SigmaSpec::Single(parse_positive(v)?)),
            [a, b] => Ok(SigmaSpec::Pair(parse_positive(a)?, parse_positive(b)?)),
            [min, max, count] | [min, max, count, _] => {
                let log = match parts.get(3) {
                    None | Some(&"log") => true,
                    Some(&"linear") => false,
                    Some(other) => {
                        bail!("sigma: spacing must be 'log' or 'linear', got '{other}'")
                    }
                };
                let min = parse_positive(min)?;
                let max = parse_positive(max)?;
                let count: usize = match count.parse() {
                    Ok(c) if c >= 2 => c,
                    _ => bail!("sigma: count must be an integer >= 2, got '{count}'"),
                };
                if max <= min {
                    bail!("sigma: max must exceed min, got {min}:{max}");
                }
                Ok(SigmaSpec::Range {
                    min,
                    max,
                    count,
                    log,
                })
            }
            _ => bail!(
                "sigma: expected 'value', 'sigma1:sigma2', or 'min:max:count[:log|:linear]', \
                 got '{raw}'"
            ),
        }
    }

    /// Canonical text form, echoed in output metadata.
    pub fn describe(&self) -> String {
        match *self {
            SigmaSpec::Single(v) => format!("{v}"),
            SigmaSpec::Pair(a, b) => format!("{a}:{b}"),
            SigmaSpec::Range {
                min,
                max,
                count,
                log,
            } => format!(
                "{min}:{max}:{count} ({})",
                if log { "log" } else { "linear" }
            ),
        }
    }

    /// The sweep values of a `Range` spec, endpoints exact.
    pub fn range_values(&self) -> Result<Vec<f64>> {
        match *self {
            SigmaSpec::Range {
                min,
                max,
                count,
                log: true,
            } => Ok(ScaleGrid::new(min, max, count)
                .map_err(|e| anyhow::anyhow!("sigma: {e}"))?
                .sigmas()),
            SigmaSpec::Range {
                min,
                max,
                count,
                log: false,
            } => {
                let step = (max - min) / (count - 1) as f64;
                let mut out: Vec<f64> = (0..count).map(|i| min + step * i as f64).collect();
                out[count - 1] = max;
                Ok(out)
            }
            _ => bail!("sigma: this experiment needs a sweep 'min:max:count[:log|:linear]'"),
        }
    }

    pub fn single_value(&self) -> Result<f64> {
        match *self {
            SigmaSpec::Single(v) => Ok(v),
            _ => bail!("sigma: this experiment needs a single value"),
        }
    }

    pub fn pair_values(&self) -> Result<(f64, f64)> {
        match *self {
            SigmaSpec::Pair(a, b) => Ok((a, b)),
            SigmaSpec::Single(v) => Ok((v, v)),
            _ => bail!("sigma: this experiment needs 'sigma1:sigma2'"),
        }
    }
}

/// Number of workers: `SCSP_THREADS` when set (minimum 1), otherwise the
/// available parallelism, never more than the number of tasks.
fn worker_count(tasks: usize) -> usize {
    let cap = std::env::var("SCSP_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .map(|n| n.max(1));
    let default = thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    cap.unwrap_or(default).min(tasks.max(1))
}

/// Applies `f` to every item, possibly across threads, and returns results
/// in item order. Work is handed out through a shared counter, so the
/// assignment of items to workers varies but the output never does.
pub fn parallel_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let workers = worker_count(items.len());
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let slots: Vec<std::sync::Mutex<Option<U>>> = (0..items.len())
        .map(|_| std::sync::Mutex::new(None))
        .collect();
    let next = AtomicUsize::new(0);
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let value = f(&items[i]);
                *slots[i].lock().expect("result slot lock") = Some(value);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("result slot lock")
                .expect("every item was processed")
        })
        .collect()
}

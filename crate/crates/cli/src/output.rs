//! Deterministic text rendering for experiment outputs.
//!
//! Every file is assembled as one string: `#`-prefixed metadata lines, then
//! a header, then data rows, all with `\n` endings. Numeric data fields are
//! printed with 17 significant digits; non-finite values become the literal
//! token `SINGULAR`. Nothing here depends on time, locale, or thread
//! scheduling, so equal configurations always produce identical bytes.

use scsp_core::metrics::MetricValue;

/// Formats a data-field number with 17 significant digits, or `SINGULAR`
/// when it is not finite.
pub fn fmt_sig(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "SINGULAR".to_string()
    }
}

/// Formats a measured metric, mapping flagged singularities to `SINGULAR`.
pub fn fmt_metric(v: &MetricValue) -> String {
    match v.value() {
        Some(x) => fmt_sig(x),
        None => "SINGULAR".to_string(),
    }
}

/// Renders a CSV document: metadata lines (prefixed with `# `), one header
/// row, then the data rows.
pub fn render_csv(meta: &[String], header: &str, rows: &[String]) -> String {
    let mut out = String::new();
    push_meta(&mut out, meta);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}

/// Renders a plain-text float grid: metadata lines, a `width height`
/// header, then `height` rows of `width` space-separated values in
/// row-major order.
pub fn render_grid(meta: &[String], width: usize, height: usize, samples: &[f64]) -> String {
    debug_assert_eq!(samples.len(), width * height);
    let mut out = String::new();
    push_meta(&mut out, meta);
    out.push_str(&format!("{width} {height}\n"));
    for row in samples.chunks(width) {
        let line: Vec<String> = row.iter().map(|&v| fmt_sig(v)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn push_meta(out: &mut String, meta: &[String]) {
    out.push_str(&format!("# scsp {}\n", env!("CARGO_PKG_VERSION")));
    for line in meta {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
}

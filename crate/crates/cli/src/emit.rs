//! Output shaping: significant-digit formatting, CSV assembly, and the
//! self-contained SVG digit histogram.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use zeckford::DigitHistogram;

/// Formats `x` in plain decimal with `sig` significant digits (never
/// scientific notation), the stable format used in CSV columns.
pub fn fmt_sig(x: f64, sig: u32) -> String {
    if !x.is_finite() || x == 0.0 {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Decimal digit count of the `i`-th Fibonacci number from the Binet
/// logarithm, exact for every index a desktop can decompose (the
/// fractional part never lands within f64 error of an integer).
pub fn fib_digits10(i: u32) -> u64 {
    const LOG10_PHI: f64 = 0.208_987_640_249_978_73;
    const LOG10_SQRT5: f64 = 0.349_485_002_168_009_4;
    ((i as f64 + 1.0) * LOG10_PHI - LOG10_SQRT5).floor() as u64 + 1
}

/// Writes to `--out` when given, else to stdout.
pub struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    pub fn new(out: Option<PathBuf>) -> Self {
        Sink { out }
    }

    pub fn write(&self, content: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))
            }
            None => {
                print!("{content}");
                Ok(())
            }
        }
    }
}

/// One CSV document: a `#` metadata comment recording version, seed, and
/// parameters, then a header row, then data rows.
pub fn csv(
    command: &str,
    params: &str,
    seed: Option<u64>,
    header: &str,
    rows: &[String],
) -> String {
    let seed = match seed {
        Some(s) => s.to_string(),
        None => "none".into(),
    };
    let mut doc = format!(
        "# zeckford v{} | {command} {params} | seed={seed}\n{header}\n",
        env!("CARGO_PKG_VERSION")
    );
    for row in rows {
        doc.push_str(row);
        doc.push('\n');
    }
    doc
}

/// Shared metadata object embedded in every JSON summary.
pub fn meta(command: &str, seed: Option<u64>, params: serde_json::Value) -> serde_json::Value {
    serde_json::json!({
        "tool": "zeckford",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": seed,
        "params": params,
    })
}

pub fn to_json(value: &serde_json::Value) -> String {
    let mut doc = serde_json::to_string_pretty(value).expect("reports serialize");
    doc.push('\n');
    doc
}

/// Self-contained SVG 1.1 document: one bar per leading digit at its
/// observed frequency, overlaid with the Benford density `1/(x ln B)`
/// (whose integral over `[d, d+1)` is the Benford probability of `d`).
pub fn svg_histogram(hist: &DigitHistogram, title: &str, subtitle: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const LEFT: f64 = 54.0;
    const RIGHT: f64 = 618.0;
    const TOP: f64 = 52.0;
    const BOTTOM: f64 = 352.0;

    let base = hist.base();
    let total = hist.total().max(1) as f64;
    let freqs: Vec<f64> = (1..base).map(|d| hist.count(d) as f64 / total).collect();
    let ln_base = (base as f64).ln();
    let y_max = freqs.iter().copied().fold(1.0 / ln_base, f64::max) * 1.15;

    let x_px = |x: f64| LEFT + (x - 1.0) / (base as f64 - 1.0) * (RIGHT - LEFT);
    let y_px = |y: f64| BOTTOM - y / y_max * (BOTTOM - TOP);

    let mut s = String::with_capacity(8 * 1024);
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\" fill=\"#222222\">{}</text>",
        W / 2.0,
        title
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"41\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\">{}</text>",
        W / 2.0,
        subtitle
    );

    // horizontal grid and y tick labels at quarters of the range
    for k in 0..=4u32 {
        let y = y_max * k as f64 / 4.0;
        let py = y_px(y);
        let _ = writeln!(
            s,
            "<line x1=\"{LEFT:.1}\" y1=\"{py:.1}\" x2=\"{RIGHT:.1}\" y2=\"{py:.1}\" stroke=\"#dddddd\" stroke-width=\"1\"/>"
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#555555\">{}</text>",
            LEFT - 6.0,
            py + 3.5,
            fmt_sig(y, 3)
        );
    }

    // frequency bars, one per digit, width 1 in data coordinates
    for (idx, f) in freqs.iter().enumerate() {
        let d = idx as f64 + 1.0;
        let x0 = x_px(d) + 1.0;
        let width = (x_px(d + 1.0) - x_px(d) - 2.0).max(1.0);
        let py = y_px(*f);
        let _ = writeln!(
            s,
            "<rect x=\"{x0:.1}\" y=\"{py:.1}\" width=\"{width:.1}\" height=\"{:.1}\" fill=\"#5b8fc9\"/>",
            BOTTOM - py
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">{}</text>",
            x_px(d + 0.5),
            BOTTOM + 16.0,
            idx + 1
        );
    }

    // reference density polyline 1/(x ln B)
    let mut points = String::new();
    let steps = 160;
    for k in 0..=steps {
        let x = 1.0 + (base as f64 - 1.0) * k as f64 / steps as f64;
        let y = 1.0 / (x * ln_base);
        let _ = write!(points, "{:.1},{:.1} ", x_px(x), y_px(y));
    }
    let _ = writeln!(
        s,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\"/>",
        points.trim_end()
    );

    // axes and legend
    let _ = writeln!(
        s,
        "<line x1=\"{LEFT:.1}\" y1=\"{TOP:.1}\" x2=\"{LEFT:.1}\" y2=\"{BOTTOM:.1}\" stroke=\"#333333\" stroke-width=\"1\"/>"
    );
    let _ = writeln!(
        s,
        "<line x1=\"{LEFT:.1}\" y1=\"{BOTTOM:.1}\" x2=\"{RIGHT:.1}\" y2=\"{BOTTOM:.1}\" stroke=\"#333333\" stroke-width=\"1\"/>"
    );
    let _ = writeln!(
        s,
        "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"12\" height=\"12\" fill=\"#5b8fc9\"/>",
        RIGHT - 190.0,
        TOP + 4.0
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#333333\">observed frequency</text>",
        RIGHT - 174.0,
        TOP + 14.0
    );
    let _ = writeln!(
        s,
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#c0392b\" stroke-width=\"2\"/>",
        RIGHT - 190.0,
        TOP + 26.0,
        RIGHT - 178.0,
        TOP + 26.0
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#333333\">density 1/(x ln {base})</text>",
        RIGHT - 174.0,
        TOP + 30.0
    );
    s.push_str("</svg>\n");
    s
}

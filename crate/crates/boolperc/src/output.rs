//! Artifact writers: CSV rows, JSON documents and SVG line plots.
//!
//! CSV files start with one `#` comment line naming the library version and
//! the master seed, followed by the header `op,t,n,reps,mean,stderr,seed,extra`.
//! Floats use 17 significant digits so that files round-trip bit-exactly.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use boolperc_core::Estimate;
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed CSV column order.
pub const CSV_COLUMNS: [&str; 8] = ["op", "t", "n", "reps", "mean", "stderr", "seed", "extra"];

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One estimator output row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub op: String,
    pub t: Option<f64>,
    pub n: Option<f64>,
    pub reps: u64,
    pub mean: f64,
    pub stderr: f64,
    /// `master_seed/stream_label`.
    pub seed: String,
    /// `key=value` pairs joined by `;`.
    pub extra: String,
}

impl Row {
    pub fn from_estimate(op: &str, t: Option<f64>, n: Option<f64>, e: &Estimate) -> Self {
        Self {
            op: op.to_string(),
            t,
            n,
            reps: e.reps,
            mean: e.mean,
            stderr: e.stderr,
            seed: format!("{}/{}", e.seed.master_seed, e.seed.stream_label),
            extra: String::new(),
        }
    }

    pub fn with_extra(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        if !self.extra.is_empty() {
            self.extra.push(';');
        }
        let _ = write!(self.extra, "{key}={value}");
        self
    }

    fn record(&self) -> [String; 8] {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        [
            self.op.clone(),
            opt(self.t),
            opt(self.n),
            self.reps.to_string(),
            fmt_f64(self.mean),
            fmt_f64(self.stderr),
            self.seed.clone(),
            self.extra.clone(),
        ]
    }
}

/// Renders rows as CSV text with the comment header line.
pub fn csv_string(master_seed: u64, kind: &str, rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in rows {
        w.write_record(r.record()).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv");
    format!("# boolperc {VERSION} master_seed={master_seed} kind={kind}\n{body}")
}

/// Pretty JSON with a trailing newline.
pub fn json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

/// Collects the files of one run in an output directory.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> io::Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, contents: &str) -> io::Result<()> {
        let path = self.root.join(name);
        std::fs::write(&path, contents)?;
        self.written.push(path);
        Ok(())
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.written
    }
}

/// One curve with pointwise standard errors.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub se: Vec<f64>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Self-contained SVG line plot with shaded `±k_sigma` bands.
pub fn svg_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    k_sigma: f64,
) -> String {
    let finite = |v: f64| v.is_finite();
    let xs = series
        .iter()
        .flat_map(|s| s.x.iter().copied())
        .filter(|&v| finite(v));
    let (mut x0, mut x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    let ys = series.iter().flat_map(|s| {
        s.y.iter()
            .zip(&s.se)
            .flat_map(move |(&y, &e)| [y - k_sigma * e, y + k_sigma * e])
    });
    let (mut y0, mut y1) = ys
        .filter(|&v| finite(v))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !(x0 < x1) {
        x0 = if x0.is_finite() { x0 - 1.0 } else { 0.0 };
        x1 = x0 + 2.0;
    }
    if !(y0 < y1) {
        y0 = if y0.is_finite() { y0 - 1.0 } else { 0.0 };
        y1 = y0 + 2.0;
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<polyline points="{l},{t} {l},{b} {r},{b}" fill="none" stroke="black"/>"#
    );
    for (v, label) in [(y0, y0), (y1, y1)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{:.4}</text>"#,
            l - 4.0,
            py(v) + 4.0,
            label
        );
    }
    for v in [x0, x1] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{:.4}</text>"#,
            px(v),
            b + 16.0,
            v
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (k, ser) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<(f64, f64, f64)> = ser
            .x
            .iter()
            .zip(&ser.y)
            .zip(&ser.se)
            .filter(|((x, y), e)| x.is_finite() && y.is_finite() && e.is_finite())
            .map(|((&x, &y), &e)| (x, y, e))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let upper = pts
            .iter()
            .map(|&(x, y, e)| format!("{:.2},{:.2}", px(x), py(y + k_sigma * e)));
        let lower = pts
            .iter()
            .rev()
            .map(|&(x, y, e)| format!("{:.2},{:.2}", px(x), py(y - k_sigma * e)));
        let band: Vec<String> = upper.chain(lower).collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            band.join(" ")
        );
        let line: Vec<String> = pts
            .iter()
            .map(|&(x, y, _)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            line.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            r - 120.0,
            t + 14.0 * (k as f64 + 1.0),
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

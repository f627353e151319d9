//! Error-versus-dataset-size chart: observed points with std bars, the
//! fitted law on a logarithmic size axis, and its asymptote.
//!
//! The SVG is self-contained. Elements carry classes (`marker`,
//! `fit-curve`, `asymptote`, `x-tick`, ...) and `data-*` attributes with the
//! plotted values so that the output can be checked structurally.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::eval_data_law;
use crate::types::{DataLawParams, ObservationPoint};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    /// Largest dataset size the fitted curve is drawn to.
    pub n_max: f64,
    pub samples_per_decade: usize,
    pub width: f64,
    pub height: f64,
    pub title: String,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            n_max: 2e7,
            samples_per_decade: 40,
            width: 720.0,
            height: 480.0,
            title: "Probability of error vs. training set size".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub n: f64,
    pub error: f64,
}

/// Log-spaced samples of the law from the decade below the smallest
/// observation to `n_max`, with every observed size included exactly.
pub fn curve_samples(
    params: &DataLawParams,
    points: &[ObservationPoint],
    opts: &ReportOptions,
) -> Result<Vec<CurveSample>> {
    if points.is_empty() {
        return Err(Error::EmptyObservations);
    }
    if opts.samples_per_decade == 0 {
        return Err(Error::Validation("samples_per_decade must be >= 1".into()));
    }
    let n_obs_min = points.iter().map(|p| p.n).fold(f64::INFINITY, f64::min);
    let n_obs_max = points.iter().map(|p| p.n).fold(0.0, f64::max);
    let n_max = opts.n_max.max(n_obs_max);
    let lo = n_obs_min.log10().floor();
    let hi = n_max.log10();

    let steps = ((hi - lo) * opts.samples_per_decade as f64).ceil().max(1.0) as usize;
    let mut sizes: Vec<f64> = (0..=steps)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / steps as f64))
        .collect();
    sizes[steps] = n_max;
    sizes.extend(points.iter().map(|p| p.n));
    sizes.sort_by(f64::total_cmp);
    sizes.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());

    sizes
        .into_iter()
        .map(|n| {
            Ok(CurveSample {
                n,
                error: eval_data_law(params, n)?,
            })
        })
        .collect()
}

/// CSV with one row per plotted value: `series` is `observed` or `fit`.
pub fn samples_csv(points: &[ObservationPoint], samples: &[CurveSample]) -> String {
    let mut out = String::from("series,n,error,std\n");
    for p in points {
        let std = p.std.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(out, "observed,{},{},{}", p.n, p.error, std);
    }
    for s in samples {
        let _ = writeln!(out, "fit,{},{},", s.n, s.error);
    }
    out
}

struct Frame {
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
    log_lo: f64,
    log_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn x(&self, n: f64) -> f64 {
        self.left + (n.log10() - self.log_lo) / (self.log_hi - self.log_lo) * (self.right - self.left)
    }

    fn y(&self, e: f64) -> f64 {
        self.bottom - (e - self.y_lo) / (self.y_hi - self.y_lo) * (self.bottom - self.top)
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the chart as an SVG 1.1 document.
pub fn render_svg(
    points: &[ObservationPoint],
    params: &DataLawParams,
    opts: &ReportOptions,
) -> Result<String> {
    let samples = curve_samples(params, points, opts)?;
    let (first, last) = (samples[0], samples[samples.len() - 1]);

    let mut y_lo = params.c_inf();
    let mut y_hi = first.error;
    for p in points {
        let s = p.std.unwrap_or(0.0);
        y_lo = y_lo.min(p.error - s);
        y_hi = y_hi.max(p.error + s);
    }
    let step = nice_step((y_hi - y_lo).max(1e-3));
    let y_lo = ((y_lo / step).floor() * step).max(0.0);
    let y_hi = ((y_hi / step).ceil() * step).min(1.0).max(y_lo + step);

    let frame = Frame {
        left: 80.0,
        right: opts.width - 30.0,
        top: 50.0,
        bottom: opts.height - 70.0,
        log_lo: first.n.log10().floor(),
        log_hi: last.n.log10().ceil(),
        y_lo,
        y_hi,
    };

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(w, r##"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"##);
    let _ = writeln!(
        w,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{1}" viewBox="0 0 {0} {1}" font-family="sans-serif" font-size="12">"##,
        opts.width, opts.height
    );
    let _ = writeln!(w, "<title>{}</title>", escape(&opts.title));
    let _ = writeln!(
        w,
        r##"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"##,
        opts.width, opts.height
    );
    let _ = writeln!(
        w,
        r##"<text class="title" x="{}" y="28" text-anchor="middle" font-size="15">{}</text>"##,
        opts.width / 2.0,
        escape(&opts.title)
    );

    // grid and ticks
    let _ = writeln!(w, r##"<g class="x-ticks" stroke="#ccc">"##);
    for k in frame.log_lo as i32..=frame.log_hi as i32 {
        let x = frame.x(10f64.powi(k));
        let _ = writeln!(
            w,
            r##"<line class="x-tick" data-decade="{k}" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}"/>"##,
            frame.top, frame.bottom
        );
        let _ = writeln!(
            w,
            r##"<text class="x-tick-label" x="{x:.2}" y="{:.2}" text-anchor="middle" stroke="none" fill="black">10<tspan dy="-6" font-size="9">{k}</tspan></text>"##,
            frame.bottom + 18.0
        );
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, r##"<g class="y-ticks" stroke="#ccc">"##);
    let ticks = ((y_hi - y_lo) / step).round() as i32;
    for i in 0..=ticks {
        let v = y_lo + i as f64 * step;
        let y = frame.y(v);
        let _ = writeln!(
            w,
            r##"<line class="y-tick" data-value="{v:.4}" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"##,
            frame.left, frame.right
        );
        let _ = writeln!(
            w,
            r##"<text class="y-tick-label" x="{:.2}" y="{:.2}" text-anchor="end" stroke="none" fill="black">{:.1}%</text>"##,
            frame.left - 6.0,
            y + 4.0,
            v * 100.0
        );
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(
        w,
        r##"<rect class="frame" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"##,
        frame.left,
        frame.top,
        frame.right - frame.left,
        frame.bottom - frame.top
    );
    let _ = writeln!(
        w,
        r##"<text class="x-label" x="{:.2}" y="{:.2}" text-anchor="middle">Training set size n (log scale)</text>"##,
        (frame.left + frame.right) / 2.0,
        opts.height - 22.0
    );
    let _ = writeln!(
        w,
        r##"<text class="y-label" transform="translate(22 {:.2}) rotate(-90)" text-anchor="middle">Probability of error</text>"##,
        (frame.top + frame.bottom) / 2.0
    );

    // asymptote
    if params.c_inf() >= y_lo {
        let y = frame.y(params.c_inf());
        let _ = writeln!(
            w,
            r##"<line class="asymptote" data-c-inf="{}" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#888" stroke-dasharray="6 4"/>"##,
            params.c_inf(),
            frame.left,
            frame.right
        );
    }
    let label_y = frame.y(params.c_inf().max(y_lo)) - 6.0;
    let _ = writeln!(
        w,
        r##"<text class="asymptote-label" x="{:.2}" y="{label_y:.2}" text-anchor="end" fill="#555">c&#8734; = {:.4} ({:.1}%)</text>"##,
        frame.right - 6.0,
        params.c_inf(),
        params.c_inf() * 100.0
    );

    // fitted curve
    let mut d = String::new();
    for (i, s) in samples.iter().enumerate() {
        let _ = write!(
            d,
            "{}{:.3},{:.3}",
            if i == 0 { "M" } else { " L" },
            frame.x(s.n),
            frame.y(s.error)
        );
    }
    let _ = writeln!(
        w,
        r##"<path class="fit-curve" data-n-min="{}" data-n-max="{}" d="{d}" fill="none" stroke="#c0392b" stroke-width="2"/>"##,
        first.n, last.n
    );

    // observations
    let _ = writeln!(w, r##"<g class="observations">"##);
    for p in points {
        let x = frame.x(p.n);
        if let Some(s) = p.std.filter(|s| *s > 0.0) {
            let _ = writeln!(
                w,
                r##"<line class="error-bar" data-std="{s}" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"##,
                frame.y(p.error - s),
                frame.y(p.error + s)
            );
        }
        let _ = writeln!(
            w,
            r##"<circle class="marker" data-n="{}" data-error="{}" cx="{x:.2}" cy="{:.2}" r="4" fill="#2c3e50"/>"##,
            p.n,
            p.error,
            frame.y(p.error)
        );
    }
    let _ = writeln!(w, "</g>");

    // legend
    let (lx, ly) = (frame.right - 190.0, frame.top + 14.0);
    let _ = writeln!(w, r##"<g class="legend">"##);
    let _ = writeln!(
        w,
        r##"<rect x="{:.2}" y="{:.2}" width="180" height="62" fill="white" stroke="#999"/>"##,
        lx - 8.0,
        ly - 12.0
    );
    let _ = writeln!(
        w,
        r##"<circle class="legend-marker" cx="{:.2}" cy="{ly:.2}" r="4" fill="#2c3e50"/><text x="{:.2}" y="{:.2}">observed (&#177; std)</text>"##,
        lx + 10.0,
        lx + 26.0,
        ly + 4.0
    );
    let _ = writeln!(
        w,
        r##"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"##,
        ly + 20.0,
        lx + 20.0,
        ly + 20.0,
        lx + 26.0,
        ly + 24.0,
        escape(&format!(
            "{:.4}·n^-{:.4} + {:.4}",
            params.a(),
            params.alpha(),
            params.c_inf()
        ))
    );
    let _ = writeln!(
        w,
        r##"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}">irreducible error</text>"##,
        ly + 40.0,
        lx + 20.0,
        ly + 40.0,
        lx + 26.0,
        ly + 44.0
    );
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

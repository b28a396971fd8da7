//! CSV, JSON and SVG rendering of result envelopes.
//!
//! Rendering is a pure function of the envelope: no timestamps or
//! environment data are added, so emitting the same envelope twice gives
//! byte-identical files. CSV uses CRLF record separators.

use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::VerdictTag;
use crate::error::{Error, Result};
use crate::io::execute::{OrbitRecord, Payload, ResultEnvelope};
use crate::io::literal::{format_complex, format_seed};
use crate::io::runspec::Format;
use crate::map::Orbit;
use crate::scan::{ClassificationGrid, ComplexRect, ExtremaReport};
use crate::C64;

const CRLF: &str = "\r\n";

/// Distinct stroke colors, cycled per seed.
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub fn render(envelope: &ResultEnvelope, format: Format) -> Result<String> {
    match format {
        Format::Json => render_json(envelope),
        Format::Csv => render_csv(payload_of(envelope)?),
        Format::Svg => render_svg(payload_of(envelope)?),
    }
}

/// Writes the rendered envelope to `path`, or to stdout when `path` is `None`.
pub fn emit(envelope: &ResultEnvelope, format: Format, path: Option<&Path>) -> Result<()> {
    let body = render(envelope, format)?;
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn render_json(envelope: &ResultEnvelope) -> Result<String> {
    let mut s = serde_json::to_string_pretty(envelope).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn parse_json(text: &str) -> Result<ResultEnvelope> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

fn payload_of(envelope: &ResultEnvelope) -> Result<&Payload> {
    envelope
        .payload
        .as_ref()
        .ok_or_else(|| Error::Format("envelope carries no payload".into()))
}

fn csv_row(out: &mut String, fields: &[String]) {
    let quoted: Vec<String> = fields
        .iter()
        .map(|f| {
            if f.contains([',', '"', '\r', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect();
    out.push_str(&quoted.join(","));
    out.push_str(CRLF);
}

macro_rules! row {
    ($out:expr, $($f:expr),* $(,)?) => { csv_row($out, &[$($f.to_string()),*]) };
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn render_csv(payload: &Payload) -> Result<String> {
    let mut out = String::new();
    match payload {
        Payload::Orbit { orbits } => {
            let multi = orbits.len() > 1;
            if multi {
                row!(&mut out, "seed", "n", "re", "im");
            } else {
                row!(&mut out, "n", "re", "im");
            }
            for (k, rec) in orbits.iter().enumerate() {
                for (i, z) in rec.points.iter().enumerate() {
                    let n = Orbit::index_of(i);
                    if multi {
                        row!(&mut out, k, n, z.re, z.im);
                    } else {
                        row!(&mut out, n, z.re, z.im);
                    }
                }
            }
        }
        Payload::Equilibria { equilibria } => {
            row!(&mut out, "branch", "re", "im", "coincident", "residual");
            for e in equilibria {
                row!(
                    &mut out,
                    label(&e.branch),
                    e.z_bar.re,
                    e.z_bar.im,
                    e.coincident,
                    opt(e.residual)
                );
            }
        }
        Payload::Stability { rows } => {
            row!(
                &mut out,
                "branch",
                "re",
                "im",
                "abs_a",
                "abs_c",
                "clark_margin",
                "clark_holds",
                "spectral",
                "lambda1",
                "lambda2"
            );
            for r in rows {
                row!(
                    &mut out,
                    label(&r.branch),
                    r.z_bar.re,
                    r.z_bar.im,
                    r.abs_a,
                    r.abs_c,
                    r.clark_margin,
                    r.clark_holds,
                    label(&r.spectral),
                    format_complex(r.roots.0),
                    format_complex(r.roots.1),
                );
            }
        }
        Payload::Trichotomy {
            class,
            admissible_epsilon,
            certificate,
        } => {
            row!(
                &mut out,
                "verdict",
                "abs_beta",
                "abs_alpha_plus_one",
                "epsilon_lo",
                "epsilon_hi",
                "certificate_margin"
            );
            row!(
                &mut out,
                label(&class.verdict),
                class.lhs,
                class.rhs,
                opt(admissible_epsilon.map(|i| i.lo)),
                opt(admissible_epsilon.map(|i| i.hi)),
                opt(certificate.map(|c| c.margin)),
            );
        }
        Payload::Period { records } => {
            row!(&mut out, "seed", "period", "onset", "residual", "k", "re", "im");
            for (s, rec) in records.iter().enumerate() {
                match &rec.cycle {
                    Some(c) => {
                        for (k, z) in c.cycle_points.iter().enumerate() {
                            row!(&mut out, s, c.period, c.onset, c.residual, k, z.re, z.im);
                        }
                    }
                    None => row!(&mut out, s, "", "", "", "", "", ""),
                }
            }
        }
        Payload::Lyapunov { records } => {
            row!(
                &mut out,
                "seed",
                "lambda_max",
                "divergence_oracle",
                "n_transient",
                "n_sample",
                "converged"
            );
            for r in records {
                row!(
                    &mut out,
                    format_seed(&r.seed),
                    r.estimate.lambda_max,
                    r.divergence_oracle,
                    r.estimate.n_transient,
                    r.estimate.n_sample,
                    r.estimate.converged,
                );
            }
        }
        Payload::Scan { report, .. } => {
            row!(&mut out, "extremum", "value", "alpha", "beta");
            row!(
                &mut out,
                "max",
                report.max_value,
                format_complex(report.argmax.0),
                format_complex(report.argmax.1)
            );
            row!(
                &mut out,
                "min",
                report.min_value,
                format_complex(report.argmin.0),
                format_complex(report.argmin.1)
            );
        }
        Payload::Grid { grid } => {
            row!(&mut out, "ix", "iy", "re", "im", "verdict");
            for (iy, cells) in grid.cells.iter().enumerate() {
                for (ix, tag) in cells.iter().enumerate() {
                    let c = grid.region.cell_center(ix, iy, grid.nx, grid.ny);
                    row!(&mut out, ix, iy, c.re, c.im, tag.label());
                }
            }
        }
        Payload::Identities { records } => {
            row!(
                &mut out,
                "seed",
                "j_recurrence",
                "difference_from_j",
                "difference_recurrence",
                "product_form",
                "checked"
            );
            for r in records {
                let rep = &r.report;
                row!(
                    &mut out,
                    format_seed(&r.seed),
                    rep.j_recurrence,
                    rep.difference_from_j,
                    rep.difference_recurrence,
                    rep.product_form,
                    rep.checked,
                );
            }
        }
    }
    Ok(out)
}

fn label<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|j| j.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Linear map from data bounds onto a pixel box.
struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    lo: (f64, f64),
    hi: (f64, f64),
}

impl Frame {
    fn new(x0: f64, y0: f64, w: f64, h: f64, lo: (f64, f64), hi: (f64, f64)) -> Self {
        // pad degenerate extents so everything lands inside the box
        let pad = |a: f64, b: f64| {
            if b - a > 0.0 {
                (a, b)
            } else {
                (a - 0.5, b + 0.5)
            }
        };
        let (lx, hx) = pad(lo.0, hi.0);
        let (ly, hy) = pad(lo.1, hi.1);
        Self {
            x0,
            y0,
            w,
            h,
            lo: (lx, ly),
            hi: (hx, hy),
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let u = (x - self.lo.0) / (self.hi.0 - self.lo.0);
        let v = (y - self.lo.1) / (self.hi.1 - self.lo.1);
        (self.x0 + u * self.w, self.y0 + (1.0 - v) * self.h)
    }

    fn axes(&self, out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let _ = write!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333333"/>"##,
            self.x0, self.y0, self.w, self.h
        );
        let _ = write!(
            out,
            r##"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"##,
            self.x0 + self.w / 2.0,
            self.y0 - 8.0,
            xml_escape(title)
        );
        let _ = write!(
            out,
            r##"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"##,
            self.x0 + self.w / 2.0,
            self.y0 + self.h + 32.0,
            xml_escape(xlabel)
        );
        let _ = write!(
            out,
            r##"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"##,
            self.x0 - 40.0,
            self.y0 + self.h / 2.0,
            self.x0 - 40.0,
            self.y0 + self.h / 2.0,
            xml_escape(ylabel)
        );
        let ticks = [(self.lo.0, self.lo.1), (self.hi.0, self.hi.1)];
        let (xa, ya) = self.px(ticks[0].0, ticks[0].1);
        let (xb, yb) = self.px(ticks[1].0, ticks[1].1);
        let _ = write!(
            out,
            r##"<text x="{xa:.2}" y="{:.2}" font-size="10" text-anchor="start">{}</text>"##,
            ya + 14.0,
            short(ticks[0].0)
        );
        let _ = write!(
            out,
            r##"<text x="{xb:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"##,
            ya + 14.0,
            short(ticks[1].0)
        );
        let _ = write!(
            out,
            r##"<text x="{:.2}" y="{ya:.2}" font-size="10" text-anchor="end">{}</text>"##,
            xa - 4.0,
            short(ticks[0].1)
        );
        let _ = write!(
            out,
            r##"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"##,
            xa - 4.0,
            yb + 10.0,
            short(ticks[1].1)
        );
    }
}

fn short(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn svg_open(out: &mut String, width: u32, height: u32) {
    let _ = write!(
        out,
        r##"<?xml version="1.0" encoding="UTF-8"?>{CRLF}<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">{CRLF}<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>{CRLF}"##
    );
}

fn svg_close(out: &mut String) {
    out.push_str("</svg>");
    out.push_str(CRLF);
}

fn bounds(points: impl Iterator<Item = (f64, f64)>) -> ((f64, f64), (f64, f64)) {
    points.fold(
        (
            (f64::INFINITY, f64::INFINITY),
            (f64::NEG_INFINITY, f64::NEG_INFINITY),
        ),
        |(lo, hi), (x, y)| ((lo.0.min(x), lo.1.min(y)), (hi.0.max(x), hi.1.max(y))),
    )
}

/// Trajectory panel (index against real part) and orbit panel (complex
/// plane), one color per seed.
fn orbit_svg(orbits: &[OrbitRecord]) -> String {
    let mut out = String::new();
    svg_open(&mut out, 1000, 460);
    let traj_pts = orbits.iter().flat_map(|r| {
        r.points
            .iter()
            .enumerate()
            .map(|(i, z)| (Orbit::index_of(i) as f64, z.re))
    });
    let (lo, hi) = bounds(traj_pts);
    if !lo.0.is_finite() {
        svg_close(&mut out);
        return out;
    }
    let traj = Frame::new(70.0, 40.0, 400.0, 360.0, lo, hi);
    traj.axes(&mut out, "Trajectory", "n", "Re z(n)");
    let (lo, hi) = bounds(
        orbits
            .iter()
            .flat_map(|r| r.points.iter().map(|z| (z.re, z.im))),
    );
    let phase = Frame::new(570.0, 40.0, 400.0, 360.0, lo, hi);
    phase.axes(&mut out, "Orbit", "Re z", "Im z");

    for (k, rec) in orbits.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut line = String::new();
        for (i, z) in rec.points.iter().enumerate() {
            let (x, y) = traj.px(Orbit::index_of(i) as f64, z.re);
            let _ = write!(line, "{x:.2},{y:.2} ");
        }
        let _ = write!(
            out,
            r##"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>{CRLF}"##,
            line.trim_end()
        );
        let _ = write!(out, r##"<g fill="{color}">"##);
        for z in &rec.points {
            let (x, y) = phase.px(z.re, z.im);
            let _ = write!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="2"/>"##);
        }
        let _ = write!(out, "</g>{CRLF}");
    }
    svg_close(&mut out);
    out
}

fn tag_color(tag: &VerdictTag) -> String {
    match tag {
        VerdictTag::Converges => "#2ca02c".into(),
        VerdictTag::Periodic(p) => {
            // hue walks with the period so neighbouring periods differ
            let hue = (*p as u64 * 47) % 360;
            format!("hsl({hue},70%,55%)")
        }
        VerdictTag::Unbounded => "#000000".into(),
        VerdictTag::Chaotic => "#d62728".into(),
        VerdictTag::Singular => "#7f7f7f".into(),
        VerdictTag::Undetermined => "#dddddd".into(),
    }
}

fn grid_svg(grid: &ClassificationGrid) -> String {
    let mut out = String::new();
    svg_open(&mut out, 560, 560);
    let r = &grid.region;
    let frame = Frame::new(
        80.0,
        40.0,
        440.0,
        440.0,
        (r.re_min, r.im_min),
        (r.re_max, r.im_max),
    );
    let (cw, ch) = (frame.w / grid.nx as f64, frame.h / grid.ny as f64);
    out.push_str("<g stroke=\"none\">");
    for (iy, row) in grid.cells.iter().enumerate() {
        for (ix, tag) in row.iter().enumerate() {
            let x = frame.x0 + ix as f64 * cw;
            let y = frame.y0 + frame.h - (iy as f64 + 1.0) * ch;
            let _ = write!(
                out,
                r##"<rect class="cell" x="{x:.2}" y="{y:.2}" width="{cw:.2}" height="{ch:.2}" fill="{}"><title>{}</title></rect>"##,
                tag_color(tag),
                tag.label()
            );
        }
    }
    out.push_str("</g>");
    out.push_str(CRLF);
    frame.axes(
        &mut out,
        &format!("Classification over {}", grid.axis),
        "Re",
        "Im",
    );
    svg_close(&mut out);
    out
}

fn scan_svg(report: &ExtremaReport, ra: &ComplexRect, rb: &ComplexRect) -> String {
    let mut out = String::new();
    svg_open(&mut out, 1000, 460);
    let panels = [
        (
            Frame::new(
                70.0,
                40.0,
                400.0,
                360.0,
                (ra.re_min, ra.im_min),
                (ra.re_max, ra.im_max),
            ),
            "alpha",
            report.argmax.0,
            report.argmin.0,
        ),
        (
            Frame::new(
                570.0,
                40.0,
                400.0,
                360.0,
                (rb.re_min, rb.im_min),
                (rb.re_max, rb.im_max),
            ),
            "beta",
            report.argmax.1,
            report.argmin.1,
        ),
    ];
    for (frame, name, at_max, at_min) in panels {
        frame.axes(&mut out, &format!("{name} region"), "Re", "Im");
        let marker = |out: &mut String, z: C64, color: &str, what: &str, v: f64| {
            let (x, y) = frame.px(z.re, z.im);
            let _ = write!(
                out,
                r##"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="{color}"><title>{what} {v}</title></circle>{CRLF}"##
            );
        };
        marker(&mut out, at_max, "#d62728", "max", report.max_value);
        marker(&mut out, at_min, "#1f77b4", "min", report.min_value);
    }
    svg_close(&mut out);
    out
}

pub fn render_svg(payload: &Payload) -> Result<String> {
    match payload {
        Payload::Orbit { orbits } => Ok(orbit_svg(orbits)),
        Payload::Grid { grid } => Ok(grid_svg(grid)),
        Payload::Scan {
            report,
            region_alpha,
            region_beta,
            ..
        } => Ok(scan_svg(report, region_alpha, region_beta)),
        other => Err(Error::Format(format!(
            "svg output is available for orbit, grid and scan results, not '{}'",
            label_kind(other)
        ))),
    }
}

fn label_kind(p: &Payload) -> String {
    serde_json::to_value(p)
        .ok()
        .and_then(|v| v.get("kind").and_then(|k| k.as_str()).map(str::to_string))
        .unwrap_or_default()
}

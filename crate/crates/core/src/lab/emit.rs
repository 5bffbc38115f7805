//! CSV and SVG rendering with fixed decimal formatting.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::experiments::{GapSeries, RatioSeries, SampleRow, Sign};
use crate::exactnum::{LogMag, Rational};
use crate::polydyn::OrbitRecord;
use crate::{Error, Result};

pub const DIGITS: u32 = 12;
pub const SVG_WIDTH: u32 = 800;
pub const SVG_HEIGHT: u32 = 500;

/// `q` with `digits` fractional digits, rounding half away from zero.
pub fn rational_decimal(q: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let num: BigInt = q.numer().abs() * &scale * 2 + q.denom();
    let rounded = num.div_floor(&(q.denom() * 2));
    let negative = q.is_negative() && !rounded.is_zero();
    let s = format!("{:0>width$}", rounded.to_string(), width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// `a / b` rendered from the enclosure midpoints (or exactly when both are exact and the
/// quotient was proved rational).
pub fn quotient_decimal(a: &LogMag, b: &LogMag, exact: Option<&Rational>, digits: u32) -> Option<String> {
    if let Some(q) = exact {
        return Some(rational_decimal(q, digits));
    }
    let (ea, eb) = (a.enclose(), b.enclose());
    if eb.mid_ulps().is_zero() {
        return None;
    }
    let q = Rational::new(ea.mid_ulps().clone(), eb.mid_ulps().clone());
    Some(rational_decimal(&q, digits))
}

fn opt(s: Option<String>) -> String {
    s.unwrap_or_default()
}

fn refuse_empty(rows: usize, what: &str) -> Result<()> {
    if rows == 0 {
        Err(Error::InvalidArgument(format!("refusing to emit an empty {what}")))
    } else {
        Ok(())
    }
}

pub fn ratio_csv(series: &RatioSeries) -> Result<String> {
    refuse_empty(series.rows.len(), "ratio series")?;
    let mut out = String::from("n,h,lambda_S,ratio,skipped\n");
    for r in &series.rows {
        let ratio = r
            .ratio
            .as_ref()
            .and_then(|q| quotient_decimal(r.lambda_s.as_ref()?, &r.h_l, q.exact.as_ref(), DIGITS));
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            r.h_l.to_decimal(DIGITS),
            opt(r.lambda_s.as_ref().map(|l| l.to_decimal(DIGITS))),
            opt(ratio),
            u8::from(r.skipped)
        );
    }
    Ok(out)
}

fn sign_str(s: Option<Sign>) -> &'static str {
    match s {
        Some(Sign::Negative) => "-",
        Some(Sign::Zero) => "0",
        Some(Sign::Positive) => "+",
        Some(Sign::Unresolved) => "?",
        None => "",
    }
}

pub fn gap_csv(series: &GapSeries) -> Result<String> {
    refuse_empty(series.rows.len(), "gap series")?;
    let mut out = String::from("n,h,lambda_S,gap,sign,skipped\n");
    for r in &series.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            r.h_l.to_decimal(DIGITS),
            opt(r.lambda_s.as_ref().map(|l| l.to_decimal(DIGITS))),
            opt(r.gap.as_ref().map(|g| g.to_decimal(DIGITS))),
            sign_str(r.sign),
            u8::from(r.skipped)
        );
    }
    Ok(out)
}

pub fn sample_csv(rows: &[SampleRow]) -> Result<String> {
    refuse_empty(rows.len(), "point sample")?;
    let mut out = String::from("point,h,lambda_S,gap,sign\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            full_point(r.point.coords()),
            r.h_l.to_decimal(DIGITS),
            r.lambda_s.to_decimal(DIGITS),
            r.gap.to_decimal(DIGITS),
            sign_str(Some(r.sign))
        );
    }
    Ok(out)
}

pub fn orbit_csv(orbit: &OrbitRecord) -> String {
    let mut out = String::from("n,point,h\n");
    for s in orbit.steps() {
        let _ = writeln!(
            out,
            "{},{},{}",
            s.n,
            full_point(s.point.coords()),
            s.h.to_decimal(DIGITS)
        );
    }
    out
}

fn full_point(c: &[BigInt]) -> String {
    let parts: Vec<String> = c.iter().map(BigInt::to_string).collect();
    parts.join(":")
}

/// One named polyline; `None` values are left out.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub label: String,
    pub points: Vec<(f64, Option<f64>)>,
}

/// Self-contained SVG line chart, one polyline per series.
pub fn svg_chart(series: &[Polyline], x_label: &str, y_label: &str) -> Result<String> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| {
            s.points
                .iter()
                .filter_map(|&(x, y)| y.filter(|v| v.is_finite()).map(|y| (x, y)))
        })
        .collect();
    refuse_empty(pts.len(), "chart")?;
    let (w, h) = (SVG_WIDTH as f64, SVG_HEIGHT as f64);
    let (left, right, top, bottom) = (70.0, 20.0, 20.0, 50.0);
    let fold = |f: fn(f64, f64) -> f64, init: f64, sel: fn(&(f64, f64)) -> f64| pts.iter().map(sel).fold(init, f);
    let (x0, x1) = (
        fold(f64::min, f64::INFINITY, |p| p.0),
        fold(f64::max, f64::NEG_INFINITY, |p| p.0),
    );
    let (mut y0, mut y1) = (
        fold(f64::min, f64::INFINITY, |p| p.1),
        fold(f64::max, f64::NEG_INFINITY, |p| p.1),
    );
    y0 = y0.min(0.0);
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let xspan = if x1 > x0 { x1 - x0 } else { 1.0 };
    let sx = |x: f64| left + (x - x0) / xspan * (w - left - right);
    let sy = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        h - bottom,
        w - right,
        h - bottom
    );
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{:.2}" stroke="black"/>"#,
        h - bottom
    );
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="{anchor}">{}</text>"#,
            sx(x),
            h - bottom + 16.0,
            tick(x)
        );
    }
    for y in [y0, y1] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
            left - 6.0,
            sy(y) + 4.0,
            tick(y)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
        (left + w - right) / 2.0,
        h - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (top + h - bottom) / 2.0,
        (top + h - bottom) / 2.0,
        escape(y_label)
    );
    for (i, line) in series.iter().enumerate() {
        let coords: Vec<String> = line
            .points
            .iter()
            .filter_map(|&(x, y)| {
                y.filter(|v| v.is_finite())
                    .map(|y| format!("{:.2},{:.2}", sx(x), sy(y)))
            })
            .collect();
        let color = colors[i % colors.len()];
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"><title>{}</title></polyline>"#,
            coords.join(" "),
            escape(&line.label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" fill="{color}" text-anchor="end">{}</text>"#,
            w - right - 4.0,
            top + 14.0 * (i as f64 + 1.0),
            escape(&line.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e6) {
        format!("{v:.3e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn ratio_svg(series: &RatioSeries) -> Result<String> {
    let mut lines = vec![Polyline {
        label: "S".into(),
        points: series
            .rows
            .iter()
            .map(|r| (r.n as f64, r.ratio.as_ref().map(|q| q.approx)))
            .collect(),
    }];
    for (k, label) in series.per_w_labels.iter().enumerate() {
        lines.push(Polyline {
            label: label.clone(),
            points: series
                .rows
                .iter()
                .map(|r| {
                    let l = r.per_w.get(k)?.as_ref()?;
                    positive(&r.h_l).then(|| l.to_f64() / r.h_l.to_f64())
                })
                .enumerate()
                .map(|(i, y)| (series.rows[i].n as f64, y))
                .collect(),
        });
    }
    svg_chart(&lines, "n", "ratio")
}

fn positive(h: &LogMag) -> bool {
    h.signum() == Some(std::cmp::Ordering::Greater)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn rational_rendering() {
        assert_eq!(rational_decimal(&rat(1), 12), "1.000000000000");
        assert_eq!(rational_decimal(&(rat(-1) / rat(3)), 12), "-0.333333333333");
        assert_eq!(rational_decimal(&(rat(2) / rat(3)), 3), "0.667");
        assert_eq!(rational_decimal(&(rat(-1) / rat(10_000)), 3), "0.000");
        assert_eq!(rational_decimal(&(rat(5) / rat(2)), 0), "3");
    }

    #[test]
    fn chart_has_fixed_size_and_labels() {
        let s = svg_chart(
            &[Polyline {
                label: "a".into(),
                points: vec![(0.0, Some(1.0)), (1.0, None), (2.0, Some(0.5))],
            }],
            "n",
            "ratio",
        )
        .unwrap();
        assert!(s.contains(r#"width="800" height="500""#));
        assert_eq!(s.matches("<polyline").count(), 1);
        assert!(s.contains(">n</text>") && s.contains(">ratio</text>"));
        assert!(!s.contains("href"));
    }

    #[test]
    fn empty_chart_is_refused() {
        let line = Polyline {
            label: "a".into(),
            points: vec![(0.0, None)],
        };
        assert!(svg_chart(&[line], "n", "ratio").is_err());
    }

    #[test]
    fn write_errors_carry_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let target = blocker.join("sub").join("out.csv");
        let err = write_file(&target, "data").unwrap_err().to_string();
        assert!(err.contains("file"), "{err}");
    }
}

//! Hand-written SVG 1.1 plots: runtime boxplots, primal/dual progress and
//! two-dimensional region maps.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">
<rect width="{W}" height="{H}" fill="white"/>
<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0, x1, y1) = (LEFT, H - BOTTOM, W - RIGHT, TOP);
    let _ = writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        H - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

/// Linear map from `[lo, hi]` onto the vertical plot area.
fn y_of(v: f64, lo: f64, hi: f64) -> f64 {
    let span = if hi > lo { hi - lo } else { 1.0 };
    H - BOTTOM - (v - lo) / span * (H - BOTTOM - TOP)
}

fn y_ticks(out: &mut String, lo: f64, hi: f64, log: bool) {
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let y = y_of(v, lo, hi);
        let shown = if log { 10f64.powf(v) } else { v };
        let _ = writeln!(out, r#"<line x1="{}" y1="{y:.1}" x2="{LEFT}" y2="{y:.1}" stroke="black"/>"#, LEFT - 4.0);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            fmt_tick(shown)
        );
    }
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 100.0 || v == v.round() {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    match sorted.get(i + 1) {
        Some(next) => sorted[i] + frac * (next - sorted[i]),
        None => sorted[i],
    }
}

/// One box per group (quartiles, whiskers at the extremes). With `log`, the
/// values are plotted on a log10 axis; non-positive values are clamped.
pub fn boxplot(title: &str, y_label: &str, groups: &[(String, Vec<f64>)], log: bool) -> String {
    let tf = |v: f64| if log { v.max(1e-3).log10() } else { v };
    let all: Vec<f64> = groups.iter().flat_map(|(_, v)| v.iter().map(|&x| tf(x))).collect();
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if all.is_empty() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 1.0, hi + 1.0)
    };
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, "", y_label);
    y_ticks(&mut out, lo, hi, log);
    let slot = (W - LEFT - RIGHT) / groups.len().max(1) as f64;
    for (k, (name, values)) in groups.iter().enumerate() {
        let cx = LEFT + slot * (k as f64 + 0.5);
        let _ = writeln!(
            out,
            r#"<text x="{cx:.1}" y="{}" text-anchor="middle">{}</text>"#,
            H - BOTTOM + 16.0,
            escape(name)
        );
        if values.is_empty() {
            continue;
        }
        let mut v: Vec<f64> = values.iter().map(|&x| tf(x)).collect();
        v.sort_by(f64::total_cmp);
        let [min, q1, med, q3, max] = [0.0, 0.25, 0.5, 0.75, 1.0].map(|q| y_of(quantile(&v, q), lo, hi));
        let half = (slot * 0.3).min(40.0);
        let _ = writeln!(out, r#"<line x1="{cx:.1}" y1="{min:.1}" x2="{cx:.1}" y2="{max:.1}" stroke="black"/>"#);
        let _ = writeln!(
            out,
            r##"<rect x="{:.1}" y="{q3:.1}" width="{:.1}" height="{:.1}" fill="#9ecae1" stroke="black"/>"##,
            cx - half,
            2.0 * half,
            (q1 - q3).max(0.5)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{med:.1}" x2="{:.1}" y2="{med:.1}" stroke="black" stroke-width="2"/>"#,
            cx - half,
            cx + half
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Primal and dual bound trajectories of one run, already normalized: `x` is
/// the fraction of the value range visited and `y` the bound divided by the
/// run's optimum.
#[derive(Debug, Clone, Default)]
pub struct ProgressRun {
    pub primal: Vec<(f64, f64)>,
    pub dual: Vec<(f64, f64)>,
}

pub fn progress(title: &str, runs: &[ProgressRun]) -> String {
    const Y_MAX: f64 = 2.0;
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, "fraction of candidate values", "bound / optimum");
    y_ticks(&mut out, 0.0, Y_MAX, false);
    let x_of = |x: f64| LEFT + x.clamp(0.0, 1.0) * (W - LEFT - RIGHT);
    for k in 0..=4 {
        let x = x_of(k as f64 / 4.0);
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{}" text-anchor="middle">{}</text>"#,
            H - BOTTOM + 16.0,
            k as f64 / 4.0
        );
    }
    for run in runs {
        for (points, colour) in [(&run.primal, "red"), (&run.dual, "blue")] {
            if points.is_empty() {
                continue;
            }
            let path: Vec<String> = points
                .iter()
                .map(|&(x, y)| format!("{:.1},{:.1}", x_of(x), y_of(y.clamp(0.0, Y_MAX), 0.0, Y_MAX)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-opacity="0.5"/>"#,
                path.join(" ")
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Colours a grid of labelled points; `present` is circled.
pub fn region_map(title: &str, axes_names: (&str, &str), cells: &[(i64, i64, &str)], present: (i64, i64)) -> String {
    let (xs, ys): (Vec<i64>, Vec<i64>) = cells.iter().map(|&(x, y, _)| (x, y)).unzip();
    let bounds = |v: &[i64]| (v.iter().copied().min().unwrap_or(0), v.iter().copied().max().unwrap_or(0));
    let ((x_lo, x_hi), (y_lo, y_hi)) = (bounds(&xs), bounds(&ys));
    let cw = (W - LEFT - RIGHT) / (x_hi - x_lo + 1) as f64;
    let ch = (H - TOP - BOTTOM) / (y_hi - y_lo + 1) as f64;
    let centre =
        |x: i64, y: i64| (LEFT + (x - x_lo) as f64 * cw + cw / 2.0, H - BOTTOM - (y - y_lo) as f64 * ch - ch / 2.0);
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, axes_names.0, axes_names.1);
    for &(x, y, label) in cells {
        let fill = match label {
            "strong" => "#c8ffc8",
            "weak" => "#ffe6c8",
            _ => "#e6e6e6",
        };
        let (cx, cy) = centre(x, y);
        let _ = writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="{cw:.1}" height="{ch:.1}" fill="{fill}" stroke="white"/>"#,
            cx - cw / 2.0,
            cy - ch / 2.0
        );
        let _ = writeln!(out, r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#, cy + 4.0);
    }
    for x in x_lo..=x_hi {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{x}</text>"#,
            centre(x, y_lo).0,
            H - BOTTOM + 16.0
        );
    }
    for y in y_lo..=y_hi {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{y}</text>"#,
            LEFT - 6.0,
            centre(x_lo, y).1 + 4.0
        );
    }
    let (px, py) = centre(present.0, present.1);
    let _ = writeln!(
        out,
        r#"<circle cx="{px:.1}" cy="{py:.1}" r="{:.1}" fill="none" stroke="black" stroke-width="2"/>"#,
        cw.min(ch) * 0.4
    );
    out.push_str("</svg>\n");
    out
}

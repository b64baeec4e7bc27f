//! Static SVG renderings of barcodes, score scatters, attribution swarms and
//! layer curves. Output is a pure function of the input.

use std::fmt::Write;

use crate::global::ShapValues;
use crate::ph::Barcode;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;
const PALETTE: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = write!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = write!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        width / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Maps `[lo, hi]` onto `[a, b]`; a degenerate range maps to the middle.
fn scale(lo: f64, hi: f64, a: f64, b: f64) -> impl Fn(f64) -> f64 {
    move |v| {
        if hi > lo {
            a + (v - lo) / (hi - lo) * (b - a)
        } else {
            (a + b) / 2.0
        }
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        r##"<line x1="{PAD}" y1="{y}" x2="{x2}" y2="{y}" stroke="#333"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{y}" stroke="#333"/>"##,
        y = H - PAD,
        x2 = W - PAD
    );
    let _ = write!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 12.0,
        escape(x_label)
    );
    let _ = write!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
}

fn tick_labels(out: &mut String, lo: f64, hi: f64, horizontal: bool) {
    let (a, b) = if horizontal { (PAD, W - PAD) } else { (H - PAD, PAD) };
    let f = scale(lo, hi, a, b);
    for t in 0..=4 {
        let v = lo + (hi - lo) * t as f64 / 4.0;
        let p = f(v);
        if horizontal {
            let _ = write!(
                out,
                r#"<text x="{p:.1}" y="{}" text-anchor="middle">{v:.3}</text>"#,
                H - PAD + 14.0
            );
        } else {
            let _ = write!(
                out,
                r#"<text x="{}" y="{p:.1}" text-anchor="end">{v:.3}</text>"#,
                PAD - 4.0
            );
        }
    }
}

/// One horizontal bar per interval, dimension 0 above dimension 1. Infinite
/// bars run to the right edge.
pub fn barcode_svg(barcode: &Barcode, title: &str) -> String {
    let finite_max = bounds(barcode.intervals.iter().map(|i| i.death))
        .1
        .max(barcode.threshold);
    let right = if finite_max.is_finite() && finite_max > 0.0 {
        finite_max * 1.05
    } else {
        1.0
    };
    let n = barcode.intervals.len().max(1) as f64;
    let row = ((H - 2.0 * PAD) / n).clamp(0.5, 8.0);
    let height = (2.0 * PAD + row * n).max(H.min(2.0 * PAD + 40.0));
    let x = scale(0.0, right, PAD, W - PAD);
    let mut out = String::new();
    header(&mut out, W, height, title);
    for (r, iv) in barcode.intervals.iter().enumerate() {
        let y = PAD + r as f64 * row;
        let end = if iv.death.is_finite() { x(iv.death) } else { W - PAD };
        let color = PALETTE[iv.dim as usize % PALETTE.len()];
        let _ = write!(
            out,
            r#"<rect x="{:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
            x(iv.birth),
            (end - x(iv.birth)).max(0.5),
            (row * 0.8).max(0.4)
        );
    }
    let _ = write!(
        out,
        r##"<line x1="{PAD}" y1="{y}" x2="{}" y2="{y}" stroke="#333"/>"##,
        W - PAD,
        y = height - PAD + 4.0
    );
    let _ = write!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">filtration value (0 to {right:.3})</text>"#,
        W / 2.0,
        height - 12.0
    );
    out.push_str("</svg>\n");
    out
}

/// Scatter of 2D points coloured by a small integer label.
pub fn scatter_svg(points: &[[f64; 2]], labels: &[u8], title: &str, x_label: &str, y_label: &str) -> String {
    let (x_lo, x_hi) = bounds(points.iter().map(|p| p[0]));
    let (y_lo, y_hi) = bounds(points.iter().map(|p| p[1]));
    let fx = scale(x_lo, x_hi, PAD + 6.0, W - PAD - 6.0);
    let fy = scale(y_lo, y_hi, H - PAD - 6.0, PAD + 6.0);
    let mut out = String::new();
    header(&mut out, W, H, title);
    axes(&mut out, x_label, y_label);
    if x_lo.is_finite() {
        tick_labels(&mut out, x_lo, x_hi, true);
        tick_labels(&mut out, y_lo, y_hi, false);
    }
    for (p, &l) in points.iter().zip(labels) {
        let _ = write!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}" fill-opacity="0.75"/>"#,
            fx(p[0]),
            fy(p[1]),
            PALETTE[l as usize % PALETTE.len()]
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Attribution swarm: one row per feature in importance order, points at
/// their attribution, coloured from low (blue) to high (red) feature value.
pub fn beeswarm_svg(shap: &ShapValues, rows: &[Vec<f64>], title: &str) -> String {
    let order = shap.importance_order();
    let (lo, hi) = bounds(shap.attributions.iter().flatten().copied());
    let (lo, hi) = if lo.is_finite() {
        (lo.min(0.0), hi.max(0.0))
    } else {
        (-1.0, 1.0)
    };
    let label_w = 200.0;
    let row_h = 28.0;
    let height = 2.0 * PAD + row_h * order.len().max(1) as f64;
    let fx = scale(lo, hi, label_w, W - PAD);
    let mut out = String::new();
    header(&mut out, W, height, title);
    let _ = write!(
        out,
        r##"<line x1="{x:.2}" y1="{PAD}" x2="{x:.2}" y2="{}" stroke="#999"/>"##,
        height - PAD,
        x = fx(0.0)
    );
    for (r, &j) in order.iter().enumerate() {
        let y = PAD + row_h * (r as f64 + 0.5);
        let _ = write!(
            out,
            r#"<text x="{}" y="{y:.1}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            label_w - 8.0,
            escape(&shap.feature_names[j])
        );
        let (vlo, vhi) = bounds(rows.iter().map(|x| x[j]));
        let shade = scale(vlo, vhi, 0.0, 1.0);
        for (i, a) in shap.attributions.iter().enumerate() {
            // deterministic vertical jitter
            let jitter = ((i * 7919 % 97) as f64 / 97.0 - 0.5) * row_h * 0.6;
            let t = shade(rows[i][j]);
            let color = format!("rgb({},{},{})", (255.0 * t) as u8, 60, (255.0 * (1.0 - t)) as u8);
            let _ = write!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}" fill-opacity="0.8"/>"#,
                fx(a[j]),
                y + jitter
            );
        }
    }
    let _ = write!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">attribution (logit)</text>"#,
        (label_w + W - PAD) / 2.0,
        height - 12.0
    );
    out.push_str("</svg>\n");
    out
}

/// Line chart of named series over a shared categorical axis.
pub fn lines_svg(series: &[(String, Vec<f64>)], x_labels: &[String], title: &str, y_label: &str) -> String {
    let (lo, hi) = bounds(series.iter().flat_map(|s| s.1.iter().copied()));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let n = x_labels.len().max(1);
    let fx = |i: usize| {
        if n > 1 {
            PAD + (W - 2.0 * PAD - 120.0) * i as f64 / (n - 1) as f64
        } else {
            W / 2.0
        }
    };
    let fy = scale(lo, hi, H - PAD, PAD);
    let mut out = String::new();
    header(&mut out, W, H, title);
    axes(&mut out, "layer pair", y_label);
    tick_labels(&mut out, lo, hi, false);
    let step = n.div_ceil(10);
    for (i, l) in x_labels.iter().enumerate().step_by(step) {
        let _ = write!(
            out,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            fx(i),
            H - PAD + 14.0,
            escape(l)
        );
    }
    for (s, (name, ys)) in series.iter().enumerate() {
        let color = PALETTE[s % PALETTE.len()];
        let pts: Vec<String> = ys
            .iter()
            .enumerate()
            .filter(|(_, y)| y.is_finite())
            .map(|(i, &y)| format!("{:.2},{:.2}", fx(i), fy(y)))
            .collect();
        let _ = write!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        let _ = write!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            W - PAD - 110.0,
            PAD + 14.0 * s as f64,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

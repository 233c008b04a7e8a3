//! Minimal static SVG plots. Coordinates are printed with fixed precision so
//! the same data always yields the same bytes.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 56.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Frame {
        let (x0, x1) = bounds(xs);
        let (y0, y1) = bounds(ys);
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(x), b.max(x))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn header(out: &mut String, title: &str, xlabel: &str, ylabel: &str, f: &Frame) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">
<rect width="{W}" height="{H}" fill="white"/>
<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>
<rect x="{PAD}" y="{PAD}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>
<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>
<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>
"#,
        W / 2.0,
        escape(title),
        W - 2.0 * PAD,
        H - 2.0 * PAD,
        W / 2.0,
        H - 12.0,
        escape(xlabel),
        H / 2.0,
        H / 2.0,
        escape(ylabel),
    );
    for (v, anchor, x, y) in [
        (f.x0, "start", PAD, H - PAD + 16.0),
        (f.x1, "end", W - PAD, H - PAD + 16.0),
    ] {
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}">{}</text>"#,
            tick(v)
        );
    }
    for (v, y) in [(f.y0, H - PAD), (f.y1, PAD + 10.0)] {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{y:.1}" text-anchor="end">{}</text>"#,
            PAD - 4.0,
            tick(v)
        );
    }
}

fn tick(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Polyline through `(x, y)` points.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, pts: &[(f64, f64)]) -> String {
    let f = Frame::new(
        pts.iter().map(|p| p.0),
        pts.iter().map(|p| p.1).chain([0.0]),
    );
    let mut out = String::new();
    header(&mut out, title, xlabel, ylabel, &f);
    let path: Vec<String> = pts
        .iter()
        .filter(|p| p.1.is_finite())
        .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        path.join(" ")
    );
    out.push_str("</svg>\n");
    out
}

/// Horizontal ticks at `(x, y)`: eigenvalue ladders with `x` the phase.
pub fn ladder(title: &str, xlabel: &str, ylabel: &str, pts: &[(f64, f64)]) -> String {
    let f = Frame::new(pts.iter().map(|p| p.0), pts.iter().map(|p| p.1));
    let mut out = String::new();
    header(&mut out, title, xlabel, ylabel, &f);
    for &(x, y) in pts {
        let (cx, cy) = (f.px(x), f.py(y));
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{cy:.2}" x2="{:.2}" y2="{cy:.2}" stroke="black" stroke-width="0.6"/>"#,
            cx - 4.0,
            cx + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Cells `values[row][col]` on the grid `ys[row] × xs[col]`, shaded from
/// white (0) to dark red (the maximum).
pub fn heatmap(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[Vec<f64>],
) -> String {
    let f = Frame::new(xs.iter().copied(), ys.iter().copied());
    let mut out = String::new();
    header(&mut out, title, xlabel, ylabel, &f);
    let vmax = values
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max)
        .max(1e-12);
    let cw = (W - 2.0 * PAD) / xs.len().max(1) as f64;
    let ch = (H - 2.0 * PAD) / ys.len().max(1) as f64;
    for (r, row) in values.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let t = (v / vmax).clamp(0.0, 1.0);
            let g = (255.0 * (1.0 - t)).round() as u8;
            let red = (255.0 - 115.0 * t).round() as u8;
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#{red:02x}{g:02x}{g:02x}"/>"##,
                PAD + c as f64 * cw,
                H - PAD - (r + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

//! CSV and SVG output helpers.

use std::fmt::Write as _;
use std::io::Write;

/// Floats are written with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a header and rows as RFC-4180 CSV with LF line endings.
pub fn write_csv<W: Write, S: AsRef<str>>(out: W, header: &[&str], rows: &[Vec<S>]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|s| s.as_ref()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string<S: AsRef<str>>(header: &[&str], rows: &[Vec<S>]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, header, rows).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

const PALETTE: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// A line plot with equal-aspect option, enough for trajectory and
/// spectrum figures.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Points drawn as filled circles (e.g. the dipole position).
    pub markers: Vec<(f64, f64)>,
    pub equal_aspect: bool,
    /// Fixed bounds `(x0, x1, y0, y1)`; computed from the data when absent.
    pub bounds: Option<(f64, f64, f64, f64)>,
}

impl LinePlot {
    fn data_bounds(&self) -> (f64, f64, f64, f64) {
        if let Some(b) = self.bounds {
            return b;
        }
        let pts = self.series.iter().flat_map(|s| s.points.iter()).chain(self.markers.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts.filter(|(x, y)| x.is_finite() && y.is_finite()) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |a: f64, b: f64| if b > a { 0.05 * (b - a) } else { 0.5 };
        let (px, py) = (pad(x0, x1), pad(y0, y1));
        (x0 - px, x1 + px, y0 - py, y1 + py)
    }

    pub fn to_svg(&self) -> String {
        let (w, h, m) = (640.0, 480.0, 56.0);
        let (mut x0, mut x1, mut y0, mut y1) = self.data_bounds();
        if self.equal_aspect {
            let sx = (x1 - x0) / (w - 2.0 * m);
            let sy = (y1 - y0) / (h - 2.0 * m);
            let s = sx.max(sy);
            let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
            x0 = cx - 0.5 * s * (w - 2.0 * m);
            x1 = cx + 0.5 * s * (w - 2.0 * m);
            y0 = cy - 0.5 * s * (h - 2.0 * m);
            y1 = cy + 0.5 * s * (h - 2.0 * m);
        }
        let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
        let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            w - 2.0 * m,
            h - 2.0 * m
        );
        let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(&self.title));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w / 2.0, h - 12.0, escape(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            h / 2.0,
            h / 2.0,
            escape(&self.y_label)
        );
        for (i, (a, b)) in [(x0, y0), (x1, y1)].into_iter().enumerate() {
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, px(a), h - m + 16.0, tick(a));
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, m - 4.0, py(b) + 4.0 * if i == 0 { 1.0 } else { 0.0 }, tick(b));
        }
        let _ = writeln!(s, r#"<clipPath id="plot"><rect x="{m}" y="{m}" width="{}" height="{}"/></clipPath>"#, w - 2.0 * m, h - 2.0 * m);
        for (i, series) in self.series.iter().enumerate() {
            if series.points.is_empty() {
                continue;
            }
            let mut d = String::new();
            for (j, &(x, y)) in series.points.iter().enumerate() {
                let _ = write!(d, "{}{:.2},{:.2} ", if j == 0 { "M" } else { "L" }, px(x), py(y));
            }
            let _ = writeln!(
                s,
                r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.2" clip-path="url(#plot)"><title>{}</title></path>"#,
                d.trim_end(),
                PALETTE[i % PALETTE.len()],
                escape(&series.label)
            );
        }
        for &(x, y) in &self.markers {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="black"/>"#, px(x), py(y));
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Grayscale heatmap of `values[row][col]`, row 0 at the bottom.
pub fn heatmap_svg(title: &str, values: &[Vec<f64>]) -> String {
    let rows = values.len();
    let cols = values.first().map_or(0, |r| r.len());
    let cell = (480.0 / rows.max(cols).max(1) as f64).max(1.0);
    let (w, h) = (cols as f64 * cell + 40.0, rows as f64 * cell + 60.0);
    let peak = values.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle">{}</text>"#, w / 2.0, escape(title));
    for (r, row) in values.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            // Blue for negative, red for positive.
            let a = if peak > 0.0 { (v.abs() / peak).clamp(0.0, 1.0) } else { 0.0 };
            let fade = (255.0 * (1.0 - a)).round() as u8;
            let color = if *v >= 0.0 { format!("rgb(255,{fade},{fade})") } else { format!("rgb({fade},{fade},255)") };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{cell:.2}" height="{cell:.2}" fill="{color}"/>"#,
                20.0 + c as f64 * cell,
                40.0 + (rows - 1 - r) as f64 * cell
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn tick(x: f64) -> String {
    if x == 0.0 || (1e-2..1e4).contains(&x.abs()) {
        format!("{x:.2}")
    } else {
        format!("{x:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting_and_line_endings() {
        let text = csv_string(&["a", "b"], &[vec!["1".to_string(), "x,\"y\"".to_string()]]);
        assert_eq!(text, "a,b\n1,\"x,\"\"y\"\"\"\n");
    }

    #[test]
    fn float_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let p = LinePlot {
            title: "a < b".into(),
            series: vec![Series { label: "s".into(), points: vec![(0.0, 0.0), (1.0, 2.0)] }],
            markers: vec![(0.0, 0.0)],
            equal_aspect: true,
            ..Default::default()
        };
        let svg = p.to_svg();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a &lt; b"));
        assert!(heatmap_svg("h", &[vec![1.0, -1.0]]).contains("rgb(255,0,0)"));
    }
}

//! Minimal SVG charts: line plots and heatmaps. CSV stays the canonical
//! output; these are for a quick look.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
            dashed: false,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>
"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), x_label: &str, y_label: &str) {
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<path d="M{l},{t} L{l},{b} L{r},{b}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let px = l + f * (r - l);
        let py = b - f * (b - t);
        let _ = writeln!(
            out,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            b + 16.0,
            tick(x.0 + f * (x.1 - x.0))
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            l - 6.0,
            py + 4.0,
            tick(y.0 + f * (y.1 - y.0))
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(y_label)
    );
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.2}")
    }
}

impl LinePlot {
    pub fn to_svg(&self) -> String {
        let x = bounds(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
        let y = bounds(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
        let map = |(px, py): (f64, f64)| {
            (
                MARGIN + (px - x.0) / (x.1 - x.0) * (WIDTH - 2.0 * MARGIN),
                HEIGHT - MARGIN - (py - y.0) / (y.1 - y.0) * (HEIGHT - 2.0 * MARGIN),
            )
        };
        let mut out = String::new();
        header(&mut out, &self.title);
        axes(&mut out, x, y, &self.x_label, &self.y_label);
        for (k, s) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let d: Vec<String> = s
                .points
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    let (px, py) = map(p);
                    format!("{}{px:.1},{py:.1}", if i == 0 { "M" } else { "L" })
                })
                .collect();
            let dash = if s.dashed { r#" stroke-dasharray="5,3""# } else { "" };
            let _ = writeln!(
                out,
                r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                d.join(" ")
            );
            let ly = MARGIN + 14.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{ly:.1}" fill="{color}" text-anchor="end">{}</text>"#,
                WIDTH - MARGIN - 4.0,
                escape(&s.name)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// A grid of values drawn as coloured cells, `values[row][col]` with row 0
/// at the bottom.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Heatmap {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl Heatmap {
    pub fn to_svg(&self) -> String {
        let (lo, hi) = bounds(self.values.iter().flatten().copied());
        let mut out = String::new();
        header(&mut out, &self.title);
        let cols = self.x.len().max(1) as f64;
        let rows = self.y.len().max(1) as f64;
        let cw = (WIDTH - 2.0 * MARGIN) / cols;
        let ch = (HEIGHT - 2.0 * MARGIN) / rows;
        for (r, row) in self.values.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                let f = (v - lo) / (hi - lo);
                let shade = (255.0 * (1.0 - f)).round() as u8;
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="rgb(255,{shade},{shade})"/>"#,
                    MARGIN + c as f64 * cw,
                    HEIGHT - MARGIN - (r + 1) as f64 * ch,
                    cw,
                    ch
                );
            }
        }
        let x = (
            self.x.first().copied().unwrap_or(0.0),
            self.x.last().copied().unwrap_or(1.0),
        );
        let y = (
            self.y.first().copied().unwrap_or(0.0),
            self.y.last().copied().unwrap_or(1.0),
        );
        axes(&mut out, x, y, &self.x_label, &self.y_label);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">range {} to {}</text>"#,
            WIDTH - MARGIN,
            MARGIN - 8.0,
            tick(lo),
            tick(hi)
        );
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_plot_is_well_formed() {
        let p = LinePlot {
            title: "a < b".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![
                Series::new("one", vec![(0.0, 0.0), (1.0, 1.0)]),
                Series::new("two", vec![(0.0, 1.0), (1.0, 0.5)]).dashed(),
            ],
        };
        let svg = p.to_svg();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
    }

    #[test]
    fn heatmap_has_one_cell_per_value() {
        let h = Heatmap {
            x: vec![0.0, 1.0],
            y: vec![0.0, 1.0, 2.0],
            values: vec![vec![1.0, 2.0]; 3],
            ..Heatmap::default()
        };
        assert_eq!(h.to_svg().matches("<rect x=").count(), 6);
    }

    #[test]
    fn empty_plots_render() {
        assert!(LinePlot::default().to_svg().contains("</svg>"));
        assert!(Heatmap::default().to_svg().contains("</svg>"));
    }
}

//! Minimal static SVG line plots. Output depends only on the inputs, so
//! plots are byte-identical across runs unless a stamp is requested.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

impl Scale {
    fn map(self, x: f64) -> Option<f64> {
        match self {
            Scale::Linear => x.is_finite().then_some(x),
            Scale::Log => (x > 0.0 && x.is_finite()).then(|| x.log10()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.into(),
            points,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<Series>,
}

impl LinePlot {
    pub fn new(title: &str, x_label: &str, y_label: &str, x_scale: Scale, y_scale: Scale) -> Self {
        LinePlot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_scale,
            y_scale,
            series: Vec::new(),
        }
    }

    pub fn with(mut self, series: Series) -> Self {
        self.series.push(series);
        self
    }

    /// Points that survive the axis scales, per series.
    fn mapped(&self) -> Vec<Vec<(f64, f64)>> {
        self.series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .filter_map(|&(x, y)| Some((self.x_scale.map(x)?, self.y_scale.map(y)?)))
                    .collect()
            })
            .collect()
    }

    pub fn render(&self, stamp: Option<&str>) -> String {
        let mapped = self.mapped();
        let all = mapped.iter().flatten();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        if y1 <= y0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        );
        for (k, (lo, hi)) in [(x0, x1), (y0, y1)].into_iter().enumerate() {
            let (scale, is_x) = if k == 0 { (self.x_scale, true) } else { (self.y_scale, false) };
            for step in 0..=4 {
                let val = lo + (hi - lo) * step as f64 / 4.0;
                let label = tick_label(val, scale);
                if is_x {
                    let _ = writeln!(
                        out,
                        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
                        sx(val),
                        HEIGHT - MARGIN + 16.0
                    );
                } else {
                    let _ = writeln!(
                        out,
                        r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
                        MARGIN - 6.0,
                        sy(val) + 4.0
                    );
                }
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 18.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for (k, (series, pts)) in self.series.iter().zip(&mapped).enumerate() {
            let color = COLORS[k % COLORS.len()];
            if !pts.is_empty() {
                let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    path.join(" ")
                );
            }
            let ly = MARGIN + 16.0 + 16.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{ly:.2}" text-anchor="end" fill="{color}">{}</text>"#,
                WIDTH - MARGIN - 8.0,
                escape(&series.label)
            );
        }
        if let Some(stamp) = stamp {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="end" font-size="9">{}</text>"#,
                WIDTH - 4.0,
                HEIGHT - 4.0,
                escape(stamp)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn tick_label(v: f64, scale: Scale) -> String {
    match scale {
        Scale::Linear => format!("{v:.3}"),
        Scale::Log => format!("1e{v:.2}"),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plot() -> LinePlot {
        LinePlot::new("a < b", "T", "E", Scale::Log, Scale::Log)
            .with(Series::new("E", vec![(1.0, 1.0), (10.0, 0.1), (100.0, 0.01)]))
            .with(Series::new("empty", vec![(0.0, -1.0)]))
    }

    #[test]
    fn deterministic_without_stamp() {
        let a = plot().render(None);
        assert_eq!(a, plot().render(None));
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert!(a.contains("a &lt; b"));
        assert!(!a.contains("stamp"));
    }

    #[test]
    fn log_scale_drops_non_positive_points() {
        let s = plot().render(None);
        assert_eq!(s.matches("<polyline").count(), 1);
        assert!(s.contains("60.00,60.00 320.00,210.00 580.00,360.00"));
    }

    #[test]
    fn stamp_only_adds_text() {
        let plain = plot().render(None);
        let stamped = plot().render(Some("stamp 1"));
        assert!(stamped.contains("stamp 1"));
        assert_eq!(stamped.replace("<text x=\"636\" y=\"416\" text-anchor=\"end\" font-size=\"9\">stamp 1</text>\n", ""), plain);
    }

    #[test]
    fn empty_plot_renders() {
        let s = LinePlot::new("none", "x", "y", Scale::Linear, Scale::Linear).render(None);
        assert!(s.contains("</svg>"));
    }
}

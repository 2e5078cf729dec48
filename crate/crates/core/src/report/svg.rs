//! Self-contained SVG line charts and heatmaps on a fixed 960x540 canvas.
//!
//! Output depends only on the input values: coordinates are printed with two
//! decimals and nothing is timestamped, so identical specs give identical
//! bytes.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const WIDTH: f64 = 960.0;
pub const HEIGHT: f64 = 540.0;

const LEFT: f64 = 80.0;
const RIGHT: f64 = 740.0;
const TOP: f64 = 60.0;
const BOTTOM: f64 = 470.0;
const LEGEND_X: f64 = 760.0;

const PALETTE: [&str; 8] = [
    "#c0392b", "#2471a3", "#229954", "#8e44ad", "#d68910", "#17a589", "#566573", "#a04000",
];
const DASHES: [&str; 3] = ["", "8 4", "2 3"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Index into the colour palette; indices past the palette also cycle
    /// through dash patterns.
    pub style: usize,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, style: usize) -> Self {
        Self {
            label: label.into(),
            points,
            style,
        }
    }
}

/// Horizontal reference line, e.g. the reversibility threshold.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RefLine {
    pub label: String,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChartSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Requested ranges; widened as needed so every point and the reference
    /// line fit, then snapped outward to tick multiples.
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    pub series: Vec<Series>,
    pub reference: Option<RefLine>,
}

/// A resolved axis: `[lo, hi]` with ticks at multiples of `step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Axis {
    /// Smallest tick-aligned axis covering `[lo, hi]` with roughly six
    /// intervals of 1, 2 or 5 times a power of ten.
    pub fn covering(lo: f64, hi: f64) -> Self {
        let (mut lo, mut hi) = (lo, hi);
        if hi - lo <= f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
            lo -= 0.5;
            hi += 0.5;
        }
        let rough = (hi - lo) / 6.0;
        let mag = 10f64.powf(rough.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .into_iter()
            .map(|m| m * mag)
            .find(|s| *s >= rough * (1.0 - 1e-9))
            .unwrap_or(10.0 * mag);
        Self {
            lo: (lo / step + 1e-9).floor() * step,
            hi: (hi / step - 1e-9).ceil() * step,
            step,
        }
    }

    pub fn ticks(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step).round() as i64;
        let first = (self.lo / self.step).round() as i64;
        (0..=n).map(|k| (first + k) as f64 * self.step).collect()
    }

    fn decimals(&self) -> usize {
        (-self.step.log10().floor()).max(0.0) as usize
    }

    fn label(&self, v: f64) -> String {
        let s = format!("{:.*}", self.decimals(), v);
        if s.trim_start_matches('-').trim_matches(|c| c == '0' || c == '.').is_empty() {
            "0".to_string()
        } else {
            s
        }
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

fn extent(values: impl Iterator<Item = f64>, requested: Option<(f64, f64)>) -> Option<(f64, f64)> {
    let mut acc = requested;
    for v in values {
        acc = Some(match acc {
            None => (v, v),
            Some((lo, hi)) => (lo.min(v), hi.max(v)),
        });
    }
    acc
}

/// Resolved x and y axes for `spec`.
pub fn chart_axes(spec: &ChartSpec) -> Result<(Axis, Axis)> {
    if spec.series.is_empty() {
        return Err(Error::Config("chart needs at least one series".into()));
    }
    for s in &spec.series {
        if s.points.is_empty() {
            return Err(Error::Config(format!("series `{}` has no points", s.label)));
        }
        if s.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Config(format!("series `{}` has non-finite points", s.label)));
        }
    }
    for (name, r) in [("x", spec.x_range), ("y", spec.y_range)] {
        if let Some((lo, hi)) = r {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Config(format!("invalid {name} range [{lo}, {hi}]")));
            }
        }
    }
    let points = || spec.series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = extent(points().map(|p| p.0), spec.x_range).expect("nonempty");
    let ref_y = spec.reference.as_ref().map(|r| r.y).filter(|y| y.is_finite());
    let (y0, y1) = extent(points().map(|p| p.1).chain(ref_y), spec.y_range).expect("nonempty");
    Ok((Axis::covering(x0, x1), Axis::covering(y0, y1)))
}

fn px(v: f64, axis: &Axis, from: f64, to: f64) -> f64 {
    from + (v - axis.lo) / (axis.hi - axis.lo) * (to - from)
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="32" text-anchor="middle" font-size="18">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        escape(title)
    );
}

fn axis_labels(out: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 45.0,
        escape(x_label)
    );
    let cy = (TOP + BOTTOM) / 2.0;
    let _ = writeln!(
        out,
        r#"<text x="22" y="{cy}" text-anchor="middle" transform="rotate(-90 22 {cy})">{}</text>"#,
        escape(y_label)
    );
}

pub fn render_svg_chart(spec: &ChartSpec) -> Result<String> {
    let (xa, ya) = chart_axes(spec)?;
    let mut out = String::new();
    header(&mut out, &spec.title);

    out.push_str("<g class=\"grid\" stroke=\"#e5e5e5\">\n");
    for t in xa.ticks() {
        let x = px(t, &xa, LEFT, RIGHT);
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{BOTTOM}"/>"#);
    }
    for t in ya.ticks() {
        let y = px(t, &ya, BOTTOM, TOP);
        let _ = writeln!(out, r#"<line x1="{LEFT}" y1="{y:.2}" x2="{RIGHT}" y2="{y:.2}"/>"#);
    }
    out.push_str("</g>\n");

    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    out.push_str("<g class=\"ticks\">\n");
    for t in xa.ticks() {
        let x = px(t, &xa, LEFT, RIGHT);
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            BOTTOM + 20.0,
            xa.label(t)
        );
    }
    for t in ya.ticks() {
        let y = px(t, &ya, BOTTOM, TOP);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            ya.label(t)
        );
    }
    out.push_str("</g>\n");
    axis_labels(&mut out, &spec.x_label, &spec.y_label);

    if let Some(r) = spec.reference.as_ref().filter(|r| r.y.is_finite()) {
        let y = px(r.y, &ya, BOTTOM, TOP);
        let _ = writeln!(
            out,
            r#"<line class="reference" x1="{LEFT}" y1="{y:.2}" x2="{RIGHT}" y2="{y:.2}" stroke="black" stroke-dasharray="6 4"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="12">{}</text>"#,
            RIGHT - 6.0,
            y - 6.0,
            escape(&r.label)
        );
    }

    for s in &spec.series {
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x, &xa, LEFT, RIGHT), px(y, &ya, BOTTOM, TOP)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke-width="2"{} points="{}"/>"#,
            stroke_attrs(s.style),
            coords.join(" ")
        );
    }

    out.push_str("<g class=\"legend\">\n");
    for (i, s) in spec.series.iter().enumerate() {
        let y = TOP + 10.0 + 22.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{LEGEND_X}" y1="{y}" x2="{}" y2="{y}" stroke-width="2"{}/>"#,
            LEGEND_X + 28.0,
            stroke_attrs(s.style)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}">{}</text>"#,
            LEGEND_X + 36.0,
            y + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

fn stroke_attrs(style: usize) -> String {
    let colour = PALETTE[style % PALETTE.len()];
    let dash = DASHES[(style / PALETTE.len()) % DASHES.len()];
    if dash.is_empty() {
        format!(r#" stroke="{colour}""#)
    } else {
        format!(r#" stroke="{colour}" stroke-dasharray="{dash}""#)
    }
}

/// Grid of optional values; `None` cells are drawn in a separate colour and
/// labelled `none_label`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HeatmapSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    /// Row-major by y index, then x index.
    pub cells: Vec<Option<f64>>,
    pub value_label: String,
    pub none_label: String,
}

/// Linear ramp from dark red (low) through amber to pale blue (high).
fn ramp(f: f64) -> String {
    const STOPS: [(f64, [f64; 3]); 3] = [
        (0.0, [165.0, 0.0, 38.0]),
        (0.5, [253.0, 174.0, 97.0]),
        (1.0, [171.0, 217.0, 233.0]),
    ];
    let f = f.clamp(0.0, 1.0);
    let (a, b) = if f <= 0.5 { (STOPS[0], STOPS[1]) } else { (STOPS[1], STOPS[2]) };
    let w = (f - a.0) / (b.0 - a.0);
    let c: Vec<u8> = (0..3)
        .map(|k| (a.1[k] + w * (b.1[k] - a.1[k])).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn render_svg_heatmap(spec: &HeatmapSpec) -> Result<String> {
    let (nx, ny) = (spec.x_values.len(), spec.y_values.len());
    if nx == 0 || ny == 0 || spec.cells.len() != nx * ny {
        return Err(Error::Config(format!(
            "heatmap needs {}x{} cells, got {}",
            ny,
            nx,
            spec.cells.len()
        )));
    }
    let finite: Vec<f64> = spec.cells.iter().flatten().copied().filter(|v| v.is_finite()).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let frac = |v: f64| if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };

    let mut out = String::new();
    header(&mut out, &spec.title);
    let cw = (RIGHT - LEFT) / nx as f64;
    let ch = (BOTTOM - TOP) / ny as f64;
    let font = (cw.min(ch) * 0.28).clamp(7.0, 13.0);
    out.push_str("<g class=\"cells\">\n");
    for j in 0..ny {
        // first row at the bottom so y grows upward
        let y = BOTTOM - ch * (j + 1) as f64;
        for i in 0..nx {
            let x = LEFT + cw * i as f64;
            let (fill, text) = match spec.cells[j * nx + i] {
                Some(v) if v.is_finite() => (ramp(frac(v)), format!("{v:.1}")),
                _ => ("#d9d9d9".to_string(), spec.none_label.clone()),
            };
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{cw:.2}" height="{ch:.2}" fill="{fill}" stroke="white"/>"#
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="{font:.1}">{}</text>"#,
                x + cw / 2.0,
                y + ch / 2.0 + font / 3.0,
                escape(&text)
            );
        }
    }
    out.push_str("</g>\n<g class=\"ticks\">\n");
    for (i, v) in spec.x_values.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            LEFT + cw * (i as f64 + 0.5),
            BOTTOM + 20.0,
            tick_label(*v)
        );
    }
    for (j, v) in spec.y_values.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            BOTTOM - ch * (j as f64 + 0.5) + 4.0,
            tick_label(*v)
        );
    }
    out.push_str("</g>\n");
    axis_labels(&mut out, &spec.x_label, &spec.y_label);

    out.push_str("<g class=\"legend\">\n");
    let _ = writeln!(out, r#"<text x="{LEGEND_X}" y="{}">{}</text>"#, TOP + 4.0, escape(&spec.value_label));
    let steps = 10;
    for k in 0..steps {
        let f = k as f64 / (steps - 1) as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{LEGEND_X}" y="{}" width="24" height="20" fill="{}"/>"#,
            TOP + 14.0 + 20.0 * k as f64,
            ramp(f)
        );
    }
    if !finite.is_empty() {
        let _ = writeln!(out, r#"<text x="{}" y="{}">{lo:.1}</text>"#, LEGEND_X + 32.0, TOP + 28.0);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}">{hi:.1}</text>"#,
            LEGEND_X + 32.0,
            TOP + 14.0 + 20.0 * (steps - 1) as f64 + 14.0
        );
    }
    let ny_box = TOP + 24.0 + 20.0 * steps as f64;
    let _ = writeln!(out, r##"<rect x="{LEGEND_X}" y="{ny_box}" width="24" height="20" fill="#d9d9d9"/>"##);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}">{}</text>"#,
        LEGEND_X + 32.0,
        ny_box + 14.0,
        escape(&spec.none_label)
    );
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(points: Vec<(f64, f64)>) -> ChartSpec {
        ChartSpec {
            title: "t".into(),
            series: vec![Series::new("a", points, 0)],
            ..Default::default()
        }
    }

    #[test]
    fn nice_axes() {
        let a = Axis::covering(0.0, 60.0);
        assert_eq!((a.lo, a.hi, a.step), (0.0, 60.0, 10.0));
        let a = Axis::covering(0.03, 0.97);
        assert_eq!((a.lo, a.hi), (0.0, 1.0));
        assert!((a.step - 0.2).abs() < 1e-15);
        assert_eq!(a.ticks().len(), 6);
        let a = Axis::covering(1.0, 1.0);
        assert!(a.lo <= 0.5 && a.hi >= 1.5);
        assert_eq!(a.label(0.0), "0");
    }

    #[test]
    fn two_points_one_polyline() {
        let svg = render_svg_chart(&one(vec![(0.0, 1.0), (1.0, 0.5)])).unwrap();
        let lines: Vec<&str> = svg.lines().filter(|l| l.starts_with("<polyline")).collect();
        assert_eq!(lines.len(), 1);
        let pts = lines[0].split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        assert_eq!(pts.split(' ').count(), 2);
        assert!(svg.contains(r#"viewBox="0 0 960 540""#));
    }

    #[test]
    fn legend_matches_series() {
        let mut spec = one(vec![(0.0, 1.0), (1.0, 0.5)]);
        spec.series.push(Series::new("b <&>", vec![(0.0, 0.2), (2.0, 0.1)], 9));
        let svg = render_svg_chart(&spec).unwrap();
        let legend = svg.split("<g class=\"legend\">").nth(1).unwrap();
        assert_eq!(legend.matches("<text").count(), 2);
        assert!(svg.contains("b &lt;&amp;&gt;"));
        assert!(svg.contains("stroke-dasharray=\"8 4\""));
    }

    #[test]
    fn ranges_expand_to_fit() {
        let mut spec = one(vec![(0.0, 1.0), (10.0, 3.0)]);
        spec.y_range = Some((0.0, 1.0));
        spec.reference = Some(RefLine {
            label: "ref".into(),
            y: -0.5,
        });
        let (xa, ya) = chart_axes(&spec).unwrap();
        assert!(xa.lo <= 0.0 && xa.hi >= 10.0);
        assert!(ya.lo <= -0.5 && ya.hi >= 3.0);
    }

    #[test]
    fn empty_series_rejected() {
        let spec = ChartSpec::default();
        assert!(render_svg_chart(&spec).is_err());
        assert!(render_svg_chart(&one(vec![])).is_err());
        assert!(render_svg_chart(&one(vec![(0.0, f64::NAN)])).is_err());
    }

    #[test]
    fn heatmap_shape() {
        let spec = HeatmapSpec {
            title: "h".into(),
            x_values: vec![0.1, 0.2],
            y_values: vec![0.1, 0.2, 0.3],
            cells: vec![Some(1.0), Some(2.0), None, Some(3.0), Some(4.0), Some(5.0)],
            none_label: "none".into(),
            ..Default::default()
        };
        let svg = render_svg_heatmap(&spec).unwrap();
        let cells = svg.split("<g class=\"cells\">").nth(1).unwrap().split("</g>").next().unwrap();
        assert_eq!(cells.matches("<rect").count(), 6);
        assert_eq!(cells.matches(">none<").count(), 1);
        let bad = HeatmapSpec {
            cells: vec![None],
            ..spec
        };
        assert!(render_svg_heatmap(&bad).is_err());
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp(0.0), "#a50026");
        assert_eq!(ramp(1.0), "#abd9e9");
    }
}

//! A small SVG plotter for result tables. It draws axes with ticks, linear
//! or log scales, line series, vertical markers and bar charts. Everything
//! comes from CSV text; nothing is recomputed.

use std::fmt::Write as _;

use crate::table::Table;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Clone, Debug, Default)]
pub struct LinePlot {
    pub title: String,
    pub x: String,
    pub ys: Vec<String>,
    pub log_x: bool,
    pub log_y: bool,
    /// `(label, x)` pairs drawn as dashed vertical lines.
    pub markers: Vec<(String, f64)>,
}

#[derive(Clone, Copy, Debug)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Option<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return None;
        }
        if log {
            lo = 10f64.powf(lo.log10().floor());
            hi = 10f64.powf(hi.log10().ceil());
            if hi <= lo {
                hi = lo * 10.0;
            }
        } else if hi <= lo {
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
            lo -= pad;
            hi += pad;
        }
        Some(Self { lo, hi, log })
    }

    /// Position in `[0, 1]`, or `None` for values a log axis cannot show.
    fn unit(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        Some(if self.log {
            (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10())
        } else {
            (v - self.lo) / (self.hi - self.lo)
        })
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.log10().round() as i32, self.hi.log10().round() as i32);
            let stride = ((b - a) / 8).max(1);
            (a..=b).step_by(stride as usize).map(|e| 10f64.powi(e)).collect()
        } else {
            let raw = (self.hi - self.lo) / 6.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|m| m * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            let first = (self.lo / step).ceil() as i64;
            let last = (self.hi / step).floor() as i64;
            (first..=last).map(|k| k as f64 * step).collect()
        }
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (1e-2..1e4).contains(&v.abs()) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Canvas {
    out: String,
}

impl Canvas {
    fn new(title: &str) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + 0.5 * (WIDTH - LEFT - RIGHT),
            escape(title)
        );
        Self { out }
    }

    fn px(ux: f64) -> f64 {
        LEFT + ux * (WIDTH - LEFT - RIGHT)
    }

    fn py(uy: f64) -> f64 {
        HEIGHT - BOTTOM - uy * (HEIGHT - TOP - BOTTOM)
    }

    fn frame(&mut self, x: Option<(&Axis, &str)>, y: (&Axis, &str)) {
        let (x0, x1, y0, y1) = (Self::px(0.0), Self::px(1.0), Self::py(0.0), Self::py(1.0));
        let _ = writeln!(
            self.out,
            r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y0 - y1
        );
        if let Some((ax, label)) = x {
            for t in ax.ticks() {
                let Some(u) = ax.unit(t) else { continue };
                let px = Self::px(u);
                let _ = writeln!(
                    self.out,
                    r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
                    y0 + 5.0,
                    y0 + 18.0,
                    tick_label(t)
                );
            }
            let _ = writeln!(
                self.out,
                r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                0.5 * (x0 + x1),
                HEIGHT - 15.0,
                escape(label)
            );
        }
        let (ay, label) = y;
        for t in ay.ticks() {
            let Some(u) = ay.unit(t) else { continue };
            let py = Self::py(u);
            let _ = writeln!(
                self.out,
                r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 5.0,
                x0 - 8.0,
                py + 4.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            self.out,
            r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
            0.5 * (y0 + y1),
            escape(label)
        );
    }

    fn legend(&mut self, i: usize, label: &str, color: &str, dashed: bool) {
        let x = WIDTH - RIGHT + 12.0;
        let y = TOP + 8.0 + 18.0 * i as f64;
        let dash = if dashed { r#" stroke-dasharray="5 3""# } else { "" };
        let _ = writeln!(
            self.out,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
            x + 22.0,
            x + 28.0,
            y + 4.0,
            escape(label)
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

/// Line plot of columns `spec.ys` against `spec.x`. Points a log axis cannot
/// show break the line.
pub fn line_plot(table: &Table, spec: &LinePlot) -> Result<String, String> {
    let xs = table
        .numbers(&spec.x)
        .ok_or_else(|| format!("no column {:?}", spec.x))?;
    let mut series = Vec::new();
    for name in &spec.ys {
        series.push((name, table.numbers(name).ok_or_else(|| format!("no column {name:?}"))?));
    }
    let xa = Axis::fit(
        xs.iter().copied().chain(spec.markers.iter().map(|m| m.1)),
        spec.log_x,
    )
    .ok_or("no plottable x values")?;
    let ya = Axis::fit(series.iter().flat_map(|(_, v)| v.iter().copied()), spec.log_y)
        .ok_or("no plottable y values")?;

    let mut c = Canvas::new(&spec.title);
    c.frame(Some((&xa, &spec.x)), (&ya, if spec.ys.len() == 1 { &spec.ys[0] } else { "" }));
    for (k, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut path = String::new();
        let mut pen_down = false;
        for (x, y) in xs.iter().zip(ys) {
            match (xa.unit(*x), ya.unit(*y)) {
                (Some(ux), Some(uy)) => {
                    let cmd = if pen_down { 'L' } else { 'M' };
                    let _ = write!(path, "{cmd}{:.2} {:.2} ", Canvas::px(ux), Canvas::py(uy));
                    pen_down = true;
                }
                _ => pen_down = false,
            }
        }
        let _ = writeln!(
            c.out,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            path.trim_end()
        );
        c.legend(k, name, color, false);
    }
    for (label, x) in &spec.markers {
        let Some(u) = xa.unit(*x) else { continue };
        let px = Canvas::px(u);
        let _ = writeln!(
            c.out,
            r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="gray" stroke-dasharray="5 3"/>"#,
            Canvas::py(1.0),
            Canvas::py(0.0)
        );
        let _ = writeln!(
            c.out,
            r#"<text x="{:.2}" y="{}" font-size="10" fill="gray" transform="rotate(-90 {:.2} {})">{}</text>"#,
            px - 3.0,
            Canvas::py(1.0) + 4.0,
            px - 3.0,
            Canvas::py(1.0) + 4.0,
            escape(label)
        );
    }
    Ok(c.finish())
}

/// Bar chart of `value` per `label`, skipping rows whose value a log axis
/// cannot show and keeping at most `max_bars` of the largest.
pub fn bar_plot(
    table: &Table,
    label: &str,
    value: &str,
    title: &str,
    log_y: bool,
    max_bars: usize,
) -> Result<String, String> {
    let labels = table.texts(label).ok_or_else(|| format!("no column {label:?}"))?;
    let values = table.numbers(value).ok_or_else(|| format!("no column {value:?}"))?;
    let mut bars: Vec<(String, f64)> = labels
        .into_iter()
        .zip(values)
        .filter(|(_, v)| v.is_finite() && (!log_y || *v > 0.0))
        .collect();
    bars.sort_by(|a, b| b.1.total_cmp(&a.1));
    bars.truncate(max_bars);
    if bars.is_empty() {
        return Err("no plottable bars".into());
    }
    let mut ya = Axis::fit(bars.iter().map(|b| b.1), log_y).ok_or("no plottable bars")?;
    if !log_y {
        ya.lo = ya.lo.min(0.0);
    }
    let mut c = Canvas::new(title);
    c.frame(None, (&ya, value));
    let w = 1.0 / bars.len() as f64;
    let base = if log_y { 0.0 } else { ya.unit(0.0).unwrap_or(0.0) };
    for (i, (name, v)) in bars.iter().enumerate() {
        let top = ya.unit(*v).unwrap_or(0.0);
        let (x0, x1) = (Canvas::px((i as f64 + 0.15) * w), Canvas::px((i as f64 + 0.85) * w));
        let (ya_px, yb_px) = (Canvas::py(top.max(base)), Canvas::py(top.min(base)));
        let _ = writeln!(
            c.out,
            r#"<rect class="bar" x="{x0:.2}" y="{ya_px:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            x1 - x0,
            yb_px - ya_px,
            COLORS[0]
        );
        let xm = 0.5 * (x0 + x1);
        let yl = Canvas::py(0.0) + 12.0;
        let _ = writeln!(
            c.out,
            r#"<text x="{xm:.2}" y="{yl:.2}" font-size="10" text-anchor="end" transform="rotate(-45 {xm:.2} {yl:.2})">{}</text>"#,
            escape(name)
        );
    }
    Ok(c.finish())
}

//! Self-contained SVG scatter plots: axes, ticks, points, an optional
//! fitted line and square percentile markers. No external assets; every
//! coordinate is computed here and formatted with fixed precision, so
//! output bytes are stable.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log10,
}

impl Scale {
    fn apply(self, v: f64) -> f64 {
        match self {
            Scale::Linear => v,
            Scale::Log10 => v.log10(),
        }
    }
}

pub struct PlotSeries {
    pub name: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// Straight line y = slope*x + intercept in the transformed space.
pub struct PlotLine {
    pub slope: f64,
    pub intercept: f64,
    pub color: &'static str,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<PlotSeries>,
    /// Square markers, in data coordinates.
    pub markers: Vec<(f64, f64)>,
    pub lines: Vec<PlotLine>,
}

pub const SERIES_COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 42.0;
const MARGIN_B: f64 = 54.0;

pub fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let range = hi - lo;
    if range <= 0.0 {
        return vec![lo];
    }
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| range / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut t = first;
    while t <= hi + 1e-9 * step {
        ticks.push(t);
        t += step;
    }
    ticks
}

fn tick_label(value: f64, scale: Scale) -> String {
    match scale {
        Scale::Linear => {
            if value.abs() >= 1000.0 || (value != 0.0 && value.abs() < 0.01) {
                format!("{value:.1e}")
            } else {
                let s = format!("{value:.2}");
                s.trim_end_matches('0').trim_end_matches('.').to_string()
            }
        }
        Scale::Log10 => {
            // value is an exponent
            let k = value.round() as i32;
            if (0..=5).contains(&k) {
                format!("{}", 10f64.powi(k) as u64)
            } else {
                format!("1e{k}")
            }
        }
    }
}

impl Plot {
    pub fn render(&self) -> String {
        // transformed bounds over series and markers
        let mut txs: Vec<f64> = Vec::new();
        let mut tys: Vec<f64> = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                txs.push(self.x_scale.apply(x));
                tys.push(self.y_scale.apply(y));
            }
        }
        for &(x, y) in &self.markers {
            txs.push(self.x_scale.apply(x));
            tys.push(self.y_scale.apply(y));
        }
        let (mut x_lo, mut x_hi) = bounds(&txs);
        let (mut y_lo, mut y_hi) = bounds(&tys);
        pad(&mut x_lo, &mut x_hi);
        pad(&mut y_lo, &mut y_hi);

        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = |v: f64| MARGIN_L + (v - x_lo) / (x_hi - x_lo) * plot_w;
        let sy = |v: f64| MARGIN_T + (y_hi - v) / (y_hi - y_lo) * plot_h;

        let mut out = String::new();
        out.push_str(&format!(
            "<svg version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             xmlns=\"http://www.w3.org/2000/svg\">\n"
        ));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        out.push_str(&format!(
            "<defs><clipPath id=\"plot\"><rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" \
             width=\"{plot_w}\" height=\"{plot_h}\"/></clipPath></defs>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"14\">{}</text>\n",
            WIDTH / 2.0,
            escape_xml(&self.title)
        ));

        // axes frame
        out.push_str(&format!(
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" \
             fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n"
        ));

        // ticks
        let x_ticks = match self.x_scale {
            Scale::Linear => linear_ticks(x_lo, x_hi),
            Scale::Log10 => (x_lo.ceil() as i64..=x_hi.floor() as i64)
                .map(|k| k as f64)
                .collect(),
        };
        let y_ticks = match self.y_scale {
            Scale::Linear => linear_ticks(y_lo, y_hi),
            Scale::Log10 => (y_lo.ceil() as i64..=y_hi.floor() as i64)
                .map(|k| k as f64)
                .collect(),
        };
        for &t in &x_ticks {
            let x = sx(t);
            out.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{0:.2}\" x2=\"{x:.2}\" y2=\"{1:.2}\" \
                 stroke=\"black\"/>\n",
                MARGIN_T + plot_h,
                MARGIN_T + plot_h + 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" \
                 font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                MARGIN_T + plot_h + 18.0,
                tick_label(t, self.x_scale)
            ));
        }
        for &t in &y_ticks {
            let y = sy(t);
            out.push_str(&format!(
                "<line x1=\"{0:.2}\" y1=\"{y:.2}\" x2=\"{1:.2}\" y2=\"{y:.2}\" \
                 stroke=\"black\"/>\n",
                MARGIN_L - 5.0,
                MARGIN_L
            ));
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" \
                 font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                MARGIN_L - 8.0,
                y + 4.0,
                tick_label(t, self.y_scale)
            ));
        }

        // axis labels
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"12\">{}</text>\n",
            MARGIN_L + plot_w / 2.0,
            HEIGHT - 12.0,
            escape_xml(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"12\" transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
            MARGIN_T + plot_h / 2.0,
            MARGIN_T + plot_h / 2.0,
            escape_xml(&self.y_label)
        ));

        out.push_str("<g clip-path=\"url(#plot)\">\n");
        for line in &self.lines {
            let y1 = line.slope * x_lo + line.intercept;
            let y2 = line.slope * x_hi + line.intercept;
            out.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" \
                 stroke-width=\"1.5\" stroke-dasharray=\"6 3\"/>\n",
                sx(x_lo),
                sy(y1),
                sx(x_hi),
                sy(y2),
                line.color
            ));
        }
        for s in &self.series {
            for &(x, y) in &s.points {
                out.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.5\" fill=\"{}\" \
                     fill-opacity=\"0.65\"/>\n",
                    sx(self.x_scale.apply(x)),
                    sy(self.y_scale.apply(y)),
                    s.color
                ));
            }
        }
        for &(x, y) in &self.markers {
            let cx = sx(self.x_scale.apply(x));
            let cy = sy(self.y_scale.apply(y));
            out.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"7\" height=\"7\" fill=\"white\" \
                 stroke=\"black\" stroke-width=\"1.2\"/>\n",
                cx - 3.5,
                cy - 3.5
            ));
        }
        out.push_str("</g>\n");

        // legend
        for (i, s) in self.series.iter().enumerate() {
            let y = MARGIN_T + 14.0 + 16.0 * i as f64;
            out.push_str(&format!(
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
                MARGIN_L + 8.0,
                y - 9.0,
                s.color
            ));
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{y:.1}\" font-family=\"sans-serif\" \
                 font-size=\"11\">{}</text>\n",
                MARGIN_L + 22.0,
                escape_xml(&s.name)
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo.is_finite() && hi.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

fn pad(lo: &mut f64, hi: &mut f64) {
    if *hi - *lo < 1e-12 {
        *lo -= 0.5;
        *hi += 0.5;
    } else {
        let pad = (*hi - *lo) * 0.04;
        *lo -= pad;
        *hi += pad;
    }
}

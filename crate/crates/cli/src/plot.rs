//! Two-panel SVG of a tracking run.
//!
//! Top: the (1,1) and (2,1) entries of `R_r` (dashed) and `R₁` (solid)
//! against time. Bottom: the law's error measure on a log scale.

use std::fmt::Write as _;

use so3_track::controllers::{ControlLaw, Metric};
use so3_track::integrator::TrajectoryRecord;

const WIDTH: f64 = 800.0;
const PANEL_HEIGHT: f64 = 260.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const GAP: f64 = 60.0;
const LOG_FLOOR: f64 = 1e-16;

struct Panel {
    top: f64,
    t_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Panel {
    fn x(&self, t: f64) -> f64 {
        let w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        MARGIN_LEFT + if self.t_max > 0.0 { t / self.t_max * w } else { 0.0 }
    }

    fn y(&self, v: f64) -> f64 {
        let span = self.y_max - self.y_min;
        let frac = if span > 0.0 { (v - self.y_min) / span } else { 0.5 };
        self.top + PANEL_HEIGHT * (1.0 - frac)
    }

    fn frame(&self, out: &mut String, title: &str) {
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            MARGIN_LEFT,
            self.top,
            WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
            PANEL_HEIGHT
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="13">{}</text>"#,
            MARGIN_LEFT,
            self.top - 6.0,
            title
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">t = {}</text>"#,
            WIDTH - MARGIN_RIGHT,
            self.top + PANEL_HEIGHT + 16.0,
            trim(self.t_max)
        );
    }

    fn y_tick(&self, out: &mut String, v: f64, label: &str) {
        let y = self.y(v);
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ccc"/>"##,
            MARGIN_LEFT,
            WIDTH - MARGIN_RIGHT
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{label}</text>"#,
            MARGIN_LEFT - 6.0,
            y + 4.0
        );
    }

    fn polyline(&self, out: &mut String, points: impl Iterator<Item = (f64, f64)>, style: &str) {
        out.push_str("<polyline fill=\"none\" ");
        out.push_str(style);
        out.push_str(" points=\"");
        for (i, (t, v)) in points.enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.2},{:.2}", self.x(t), self.y(v));
        }
        out.push_str("\"/>\n");
    }
}

fn trim(x: f64) -> String {
    let s = format!("{x:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Renders the run as a standalone SVG document.
pub fn render_svg(records: &[TrajectoryRecord], law: ControlLaw) -> String {
    let t_max = records.last().map_or(0.0, |r| r.t);
    let height = MARGIN_TOP + 2.0 * PANEL_HEIGHT + GAP + 30.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="20" font-size="15" text-anchor="middle">{} tracking</text>"#,
        WIDTH / 2.0,
        law.name()
    );

    let top = Panel {
        top: MARGIN_TOP,
        t_max,
        y_min: -1.0,
        y_max: 1.0,
    };
    top.frame(&mut out, "attitude entries: target dashed, follower solid");
    for (v, label) in [(-1.0, "-1"), (0.0, "0"), (1.0, "1")] {
        top.y_tick(&mut out, v, label);
    }
    let series: [(usize, usize, &str); 2] = [(0, 0, "#1f77b4"), (1, 0, "#d62728")];
    for (i, j, colour) in series {
        let dashed = format!(r#"stroke="{colour}" stroke-dasharray="6,4""#);
        let solid = format!(r#"stroke="{colour}""#);
        top.polyline(&mut out, records.iter().map(|r| (r.t, r.rr.matrix()[(i, j)])), &dashed);
        top.polyline(&mut out, records.iter().map(|r| (r.t, r.r1.matrix()[(i, j)])), &solid);
    }

    let metric = law.metric();
    let logs: Vec<(f64, f64)> = records
        .iter()
        .map(|r| {
            let e = r.error_measure(metric);
            (r.t, if e.is_finite() { e.max(LOG_FLOOR).log10() } else { 1.0 })
        })
        .collect();
    let hi = logs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).ceil();
    let lo = logs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).floor();
    let (lo, hi) = if lo < hi { (lo, hi) } else { (lo - 1.0, lo + 1.0) };
    let bottom = Panel {
        top: MARGIN_TOP + PANEL_HEIGHT + GAP,
        t_max,
        y_min: lo,
        y_max: hi,
    };
    let name = match metric {
        Metric::Geodesic => "d_R",
        Metric::Frobenius => "d_F",
    };
    bottom.frame(&mut out, &format!("{name} (log scale)"));
    let stride = ((hi - lo) / 6.0).ceil().max(1.0) as i64;
    let mut e = lo as i64;
    while e <= hi as i64 {
        bottom.y_tick(&mut out, e as f64, &format!("1e{e}"));
        e += stride;
    }
    bottom.polyline(&mut out, logs.into_iter(), r#"stroke="black""#);
    out.push_str("</svg>\n");
    out
}

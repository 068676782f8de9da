//! Minimal static SVG line plots generated from report rows only, so plots
//! are reproducible from the CSVs alone.

use std::collections::BTreeMap;

use speclab_core::experiments::ExperimentReport;

fn extract_x(key: &str) -> Option<f64> {
    // keys look like "h=0.125,theta=0" or "lambda=20" or "r=4" or "j=6"
    let first = key.split(',').next()?;
    let value = first.split('=').nth(1)?;
    value.parse().ok()
}

/// Group rows by the tail of the key (after the first comma) and plot the
/// chosen column against the leading numeric key on log-log axes.
pub fn render_svg(report: &ExperimentReport, column: &str) -> Option<String> {
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for row in &report.rows {
        let x = extract_x(&row.key)?;
        let y = *row.values.get(column)?;
        let group = row
            .key
            .split_once(',')
            .map(|(_, rest)| rest.to_string())
            .unwrap_or_default();
        series.entry(group).or_default().push((x, y));
    }
    if series.is_empty() {
        return None;
    }
    let (w, h) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 30.0, 50.0);
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for pts in series.values() {
        for &(x, y) in pts {
            if x > 0.0 && y.is_finite() {
                xs.push(x.ln());
                if y > 0.0 {
                    ys.push(y.ln());
                }
            }
        }
    }
    if xs.is_empty() || ys.is_empty() {
        return None;
    }
    let log_y = ys.len() == xs.len();
    let (x_lo, x_hi) = bounds(&xs);
    let raw_ys: Vec<f64> = if log_y {
        ys
    } else {
        series
            .values()
            .flat_map(|pts| pts.iter().map(|p| p.1))
            .collect()
    };
    let (y_lo, y_hi) = bounds(&raw_ys);
    let sx = |x: f64| ml + (x.ln() - x_lo) / (x_hi - x_lo).max(1e-12) * (w - ml - mr);
    let sy = |y: f64| {
        let t = if log_y { y.max(1e-300).ln() } else { y };
        h - mb - (t - y_lo) / (y_hi - y_lo).max(1e-12) * (h - mt - mb)
    };
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">{}: {}</text>\n",
        w / 2.0,
        report.experiment,
        column
    );
    // axes
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb,
        w - mr,
        h - mb,
        h - mb
    ));
    for (si, (label, pts)) in series.iter().enumerate() {
        let color = colors[si % colors.len()];
        let mut sorted = pts.clone();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let path: Vec<String> = sorted
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        ));
        for &(x, y) in &sorted {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                sx(x),
                sy(y)
            ));
        }
        let label_text = if label.is_empty() { "series" } else { label };
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{color}\">{label_text}</text>\n",
            w - mr - 180.0,
            mt + 16.0 * si as f64 + 10.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">key (log)</text>\n",
        (w + ml - mr) / 2.0,
        h - 12.0
    ));
    svg.push_str("</svg>\n");
    Some(svg)
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if (hi - lo).abs() < 1e-12 {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

/// Default plotted column per experiment.
pub fn default_column(experiment: &str) -> Option<&'static str> {
    match experiment {
        "sobolev-scan" => Some("ratio_to_sqrt_log"),
        "lr-scan" => Some("median"),
        "two-sided" => Some("ratio"),
        "window-uniformity" => Some("normalized"),
        "ergodicity" => Some("variance"),
        "que" => Some("median_d"),
        "heat-bound" => Some("ratio"),
        "no-smoothing-divergence" => Some("median_s_div"),
        "weyl-law" => Some("count"),
        _ => None,
    }
}

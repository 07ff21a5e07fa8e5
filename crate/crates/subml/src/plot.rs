//! Minimal self-contained SVG line plots for the two sweep figures:
//! search complexity vs SNR (linear y) and BER vs SNR (log y). Hand-emitted
//! paths and axes, no plotting dependency.

use std::fmt::Write as _;

use crate::harness::SweepPoint;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YScale {
    Linear,
    Log,
}

/// One named polyline.
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

/// Render a complete standalone SVG document.
pub fn render_plot(title: &str, xlabel: &str, ylabel: &str, yscale: YScale, series: &[Series]) -> String {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|&(_, y)| yscale == YScale::Linear || y > 0.0)
        .collect();
    let (x0, x1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(x, _)| {
            (lo.min(x), hi.max(x))
        });
    let (x0, x1) = if pts.is_empty() {
        (0.0, 1.0)
    } else if x0 == x1 {
        (x0 - 0.5, x1 + 0.5)
    } else {
        (x0, x1)
    };
    let map_y = |y: f64| match yscale {
        YScale::Linear => y,
        YScale::Log => y.log10(),
    };
    let (mut y0, mut y1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| {
            (lo.min(map_y(y)), hi.max(map_y(y)))
        });
    if pts.is_empty() || y0 == y1 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    if pts.is_empty() {
        (y0, y1) = (0.0, 1.0);
    }
    match yscale {
        YScale::Log => {
            // snap to whole decades
            y0 = y0.floor();
            y1 = y1.ceil();
            if y0 == y1 {
                y1 += 1.0;
            }
        }
        YScale::Linear => {
            let pad = 0.05 * (y1 - y0);
            y0 -= pad;
            y1 += pad;
        }
    }

    let px = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (map_y(y) - y0) / (y1 - y0) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
        WIDTH / 2.0,
        title
    );

    // axes
    let _ = writeln!(
        svg,
        "<line x1=\"{MARGIN_L}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{}\" stroke=\"black\"/>",
        HEIGHT - MARGIN_B
    );

    // x ticks: 8 evenly spaced
    for i in 0..=8 {
        let x = x0 + (x1 - x0) * i as f64 / 8.0;
        let xp = px(x);
        let yb = HEIGHT - MARGIN_B;
        let _ = writeln!(svg, "<line x1=\"{xp}\" y1=\"{yb}\" x2=\"{xp}\" y2=\"{}\" stroke=\"black\"/>", yb + 5.0);
        let _ = writeln!(
            svg,
            "<text x=\"{xp}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            yb + 18.0,
            fmt_tick(x)
        );
    }
    // y ticks
    let yticks: Vec<f64> = match yscale {
        YScale::Linear => (0..=5).map(|i| y0 + (y1 - y0) * i as f64 / 5.0).collect(),
        YScale::Log => {
            let mut v = Vec::new();
            let mut d = y0;
            while d <= y1 + 1e-9 {
                v.push(d);
                d += 1.0;
            }
            v
        }
    };
    for &t in &yticks {
        let yp = HEIGHT - MARGIN_B - (t - y0) / (y1 - y0) * (HEIGHT - MARGIN_T - MARGIN_B);
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{yp}\" x2=\"{MARGIN_L}\" y2=\"{yp}\" stroke=\"black\"/>",
            MARGIN_L - 5.0
        );
        let label = match yscale {
            YScale::Linear => fmt_tick(t),
            YScale::Log => format!("1e{t:.0}"),
        };
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{label}</text>",
            MARGIN_L - 8.0,
            yp + 4.0
        );
        // light gridline
        let _ = writeln!(
            svg,
            "<line x1=\"{MARGIN_L}\" y1=\"{yp}\" x2=\"{}\" y2=\"{yp}\" stroke=\"#dddddd\"/>",
            WIDTH - MARGIN_R
        );
    }

    // axis labels
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 12.0,
        xlabel
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        ylabel
    );

    // series polylines and legend
    for (si, s) in series.iter().enumerate() {
        let path: Vec<String> = s
            .points
            .iter()
            .filter(|&&(_, y)| yscale == YScale::Linear || y > 0.0)
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        if !path.is_empty() {
            let _ = writeln!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
                path.join(" "),
                s.color
            );
            for p in &path {
                let (xp, yp) = p.split_once(',').unwrap();
                let _ = writeln!(
                    svg,
                    "<circle cx=\"{xp}\" cy=\"{yp}\" r=\"2.5\" fill=\"{}\"/>",
                    s.color
                );
            }
        }
        let ly = MARGIN_T + 14.0 * si as f64 + 4.0;
        let lx = WIDTH - MARGIN_R - 170.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            lx + 22.0,
            s.color
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\">{}</text>",
            lx + 27.0,
            ly + 4.0,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Normalized search cost vs SNR with the constant full-search baseline.
pub fn complexity_plot(points: &[SweepPoint]) -> String {
    let proposed = Series {
        label: "early-exit detector".to_string(),
        color: "#1f77b4",
        points: points.iter().map(|p| (p.snr_db, p.norm_complexity)).collect(),
    };
    let baseline = Series {
        label: "full search (normalized)".to_string(),
        color: "#d62728",
        points: points
            .iter()
            .map(|p| (p.snr_db, p.ml_norm_complexity))
            .collect(),
    };
    render_plot(
        "Query complexity vs SNR",
        "Es/N0 (dB)",
        "normalized CF evaluations",
        YScale::Linear,
        &[proposed, baseline],
    )
}

/// BER vs SNR on a log axis, proposed detector next to the paired full
/// search and the analytic target.
pub fn ber_plot(points: &[SweepPoint]) -> String {
    let proposed = Series {
        label: "early-exit detector".to_string(),
        color: "#1f77b4",
        points: points.iter().map(|p| (p.snr_db, p.ber)).collect(),
    };
    let ml = Series {
        label: "full search".to_string(),
        color: "#d62728",
        points: points.iter().map(|p| (p.snr_db, p.ml_ber)).collect(),
    };
    let target = Series {
        label: "target BER".to_string(),
        color: "#2ca02c",
        points: points.iter().map(|p| (p.snr_db, p.target_p)).collect(),
    };
    render_plot(
        "BER vs SNR",
        "Es/N0 (dB)",
        "bit error rate",
        YScale::Log,
        &[proposed, ml, target],
    )
}

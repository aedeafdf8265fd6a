//! Self-contained SVG charts, written directly without a plotting
//! dependency so outputs are byte-stable and golden-testable.
//!
//! Three shapes: F1-vs-k line charts (one series per histogram segment
//! length plus the time-based series, matched points boxed), a
//! row-normalized confusion heat map, and per-subject stacked annotation
//! distributions. All coordinates are formatted with fixed precision.

use std::fmt::Write as _;

use bpd_core::dataset::{AnnotationLabel, N_LABELS};

/// Distinct series/class colors.
pub const PALETTE: [&str; 7] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#17becf",
];

/// Short class names for axis labels.
pub fn short_label(label: AnnotationLabel) -> &'static str {
    match label {
        AnnotationLabel::Apathy => "apathy",
        AnnotationLabel::Restlessness => "restless",
        AnnotationLabel::Mannerisms => "manner",
        AnnotationLabel::Pacing => "pacing",
        AnnotationLabel::Aggression => "aggress",
        AnnotationLabel::LocomotionIntent => "locomot",
        AnnotationLabel::Normal => "normal",
    }
}

pub struct Series {
    pub name: String,
    pub color: String,
    /// (k, mean F1) points, ascending k.
    pub points: Vec<(f64, f64)>,
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn svg_header(width: u32, height: u32) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    )
}

/// F1 against the number of BPDs. `markers` are (x, y) data points that get
/// a small rectangle, marking matched BPD structures across strategies.
pub fn f1_line_chart(title: &str, series: &[Series], markers: &[(f64, f64)]) -> String {
    const W: u32 = 860;
    const H: u32 = 520;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 680.0;
    const TOP: f64 = 50.0;
    const BOTTOM: f64 = 460.0;

    let x_min = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .fold(f64::INFINITY, f64::min);
    let x_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .fold(1.0, f64::max);
    let span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let to_x = |k: f64| LEFT + (k - x_min) / span * (RIGHT - LEFT);
    let to_y = |f1: f64| BOTTOM - f1.clamp(0.0, 1.0) * (BOTTOM - TOP);

    let mut out = svg_header(W, H);
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"28\" font-size=\"17\" text-anchor=\"middle\">{title}</text>",
        (LEFT + RIGHT) / 2.0
    );

    // Axes and grid.
    for i in 0..=10 {
        let f1 = i as f64 / 10.0;
        let y = to_y(f1);
        let _ = writeln!(
            out,
            "<line x1=\"{LEFT}\" y1=\"{y:.1}\" x2=\"{RIGHT}\" y2=\"{y:.1}\" stroke=\"#dddddd\" stroke-width=\"1\"/>"
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            LEFT - 6.0,
            y + 4.0,
            fmt(f1)
        );
    }
    let tick_step = if span > 25.0 { 5 } else { 1 };
    let mut k = x_min.ceil() as i64;
    while k as f64 <= x_max {
        if (k - x_min.ceil() as i64) % tick_step == 0 {
            let x = to_x(k as f64);
            let _ = writeln!(
                out,
                "<line x1=\"{x:.1}\" y1=\"{BOTTOM}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#999999\" stroke-width=\"1\"/>",
                BOTTOM + 4.0
            );
            let _ = writeln!(
                out,
                "<text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{k}</text>",
                BOTTOM + 18.0
            );
        }
        k += 1;
    }
    let _ = writeln!(
        out,
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"black\" stroke-width=\"1.5\"/>"
    );
    let _ = writeln!(
        out,
        "<line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"black\" stroke-width=\"1.5\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">number of BPDs (k)</text>",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 40.0
    );
    let _ = writeln!(
        out,
        "<text x=\"20\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.1})\">mean F1</text>",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );

    // Series.
    for s in series {
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(k, f1)| format!("{:.1},{:.1}", to_x(k), to_y(f1)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>",
            s.color,
            path.join(" ")
        );
        for &(k, f1) in &s.points {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"2.5\" fill=\"{}\"/>",
                to_x(k),
                to_y(f1),
                s.color
            );
        }
    }

    // Matched-point rectangles.
    for &(k, f1) in markers {
        let _ = writeln!(
            out,
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"16\" height=\"16\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"/>",
            to_x(k) - 8.0,
            to_y(f1) - 8.0
        );
    }

    // Legend.
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 18.0 * i as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"{}\" stroke-width=\"3\"/>",
            RIGHT + 14.0,
            RIGHT + 38.0,
            s.color
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">{}</text>",
            RIGHT + 44.0,
            y + 4.0,
            s.name
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Row-normalized 7x7 confusion heat map; rows are true labels, columns
/// predictions.
pub fn confusion_heatmap(title: &str, rows: &[[f64; N_LABELS]; N_LABELS]) -> String {
    const CELL: f64 = 54.0;
    const LEFT: f64 = 110.0;
    const TOP: f64 = 70.0;
    let width = (LEFT + CELL * N_LABELS as f64 + 40.0) as u32;
    let height = (TOP + CELL * N_LABELS as f64 + 90.0) as u32;

    let mut out = svg_header(width, height);
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"30\" font-size=\"16\" text-anchor=\"middle\">{title}</text>",
        LEFT + CELL * 3.5
    );
    for (i, row) in rows.iter().enumerate() {
        let label = short_label(AnnotationLabel::ALL[i]);
        let y = TOP + CELL * i as f64;
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"end\">{label}</text>",
            LEFT - 8.0,
            y + CELL / 2.0 + 4.0
        );
        for (j, &value) in row.iter().enumerate() {
            let x = LEFT + CELL * j as f64;
            // White to deep blue.
            let channel = |base: f64| (255.0 - (255.0 - base) * value.clamp(0.0, 1.0)).round();
            let fill = format!(
                "rgb({},{},{})",
                channel(8.0),
                channel(81.0),
                channel(156.0)
            );
            let _ = writeln!(
                out,
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{fill}\" stroke=\"#ffffff\"/>"
            );
            let text_color = if value > 0.5 { "white" } else { "#333333" };
            let _ = writeln!(
                out,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\" fill=\"{text_color}\">{}</text>",
                x + CELL / 2.0,
                y + CELL / 2.0 + 4.0,
                fmt(value)
            );
        }
    }
    for j in 0..N_LABELS {
        let label = short_label(AnnotationLabel::ALL[j]);
        let x = LEFT + CELL * j as f64 + CELL / 2.0;
        let y = TOP + CELL * N_LABELS as f64 + 16.0;
        let _ = writeln!(
            out,
            "<text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"12\" text-anchor=\"end\" transform=\"rotate(-45 {x:.1} {y:.1})\">{label}</text>"
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">predicted</text>",
        LEFT + CELL * 3.5,
        TOP + CELL * 7.0 + 70.0
    );
    let _ = writeln!(
        out,
        "<text x=\"24\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 24 {:.1})\">true</text>",
        TOP + CELL * 3.5,
        TOP + CELL * 3.5
    );
    out.push_str("</svg>\n");
    out
}

/// Stacked horizontal bars: one row per subject, segment widths
/// proportional to that subject's annotation distribution.
pub fn distribution_chart(title: &str, subjects: &[(String, [f64; N_LABELS])]) -> String {
    const LEFT: f64 = 90.0;
    const TOP: f64 = 56.0;
    const BAR_H: f64 = 26.0;
    const GAP: f64 = 12.0;
    const BAR_W: f64 = 560.0;
    let height = (TOP + subjects.len() as f64 * (BAR_H + GAP) + 70.0) as u32;
    let width = (LEFT + BAR_W + 40.0) as u32;

    let mut out = svg_header(width, height);
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"30\" font-size=\"16\" text-anchor=\"middle\">{title}</text>",
        LEFT + BAR_W / 2.0
    );
    for (i, (subject, dist)) in subjects.iter().enumerate() {
        let y = TOP + i as f64 * (BAR_H + GAP);
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"end\">{subject}</text>",
            LEFT - 8.0,
            y + BAR_H / 2.0 + 4.0
        );
        let mut x = LEFT;
        for (c, &share) in dist.iter().enumerate() {
            let w = share.clamp(0.0, 1.0) * BAR_W;
            if w > 0.0 {
                let _ = writeln!(
                    out,
                    "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{w:.1}\" height=\"{BAR_H}\" fill=\"{}\"/>",
                    PALETTE[c]
                );
            }
            x += w;
        }
    }
    // Legend.
    let legend_y = TOP + subjects.len() as f64 * (BAR_H + GAP) + 20.0;
    let mut x = LEFT;
    for (c, label) in AnnotationLabel::ALL.iter().enumerate() {
        let _ = writeln!(
            out,
            "<rect x=\"{x:.1}\" y=\"{:.1}\" width=\"12\" height=\"12\" fill=\"{}\"/>",
            legend_y - 10.0,
            PALETTE[c]
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{legend_y:.1}\" font-size=\"11\">{}</text>",
            x + 16.0,
            short_label(*label)
        );
        x += 80.0;
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_chart_is_deterministic_and_well_formed() {
        let series = vec![Series {
            name: "kmeans 30 min".into(),
            color: PALETTE[0].into(),
            points: vec![(1.0, 0.1), (2.0, 0.3), (5.0, 0.45)],
        }];
        let a = f1_line_chart("test", &series, &[(5.0, 0.45)]);
        let b = f1_line_chart("test", &series, &[(5.0, 0.45)]);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<polyline").count(), 1);
        assert_eq!(a.matches("<rect").count(), 2); // background + marker
    }

    #[test]
    fn heatmap_has_49_cells() {
        let mut rows = [[0.0; N_LABELS]; N_LABELS];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let svg = confusion_heatmap("cm", &rows);
        assert_eq!(svg.matches("<rect").count(), 49 + 1); // + background
    }

    #[test]
    fn distribution_chart_renders_rows() {
        let subjects = vec![
            ("s01".to_owned(), [0.5, 0.1, 0.1, 0.1, 0.1, 0.05, 0.05]),
            ("s02".to_owned(), [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
        ];
        let svg = distribution_chart("dist", &subjects);
        assert!(svg.contains("s01"));
        assert!(svg.contains("s02"));
    }
}

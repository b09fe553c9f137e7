//! Deterministic SVG rendering of classification maps: one colored cell per
//! grid point, the analytic stability boundary overlaid as a gray polyline.

use std::fmt::Write;

use crate::stability::{LabelGrid, LobeBoundary};

const COLOR_STABLE: &str = "#2a6fb0";
const COLOR_CHATTER: &str = "#d1495b";
const COLOR_MISCLASSIFIED: &str = "#f0a202";
const COLOR_BOUNDARY: &str = "#808080";

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;
const MARGIN_RIGHT: f64 = 20.0;
const PLOT_W: f64 = 500.0;
const PLOT_H: f64 = 400.0;

fn px(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders the grid with an optional boundary overlay. `misclassified`
/// holds (speed index, depth index) cells to paint in the highlight color.
/// Output bytes are a pure function of the inputs.
pub fn render_map(
    grid: &LabelGrid,
    boundary: Option<&LobeBoundary>,
    misclassified: &[(usize, usize)],
) -> String {
    let w = grid.speed_axis.len();
    let h = grid.depth_axis.len();
    let cw = PLOT_W / w as f64;
    let ch = PLOT_H / h as f64;
    let width = MARGIN_LEFT + PLOT_W + MARGIN_RIGHT;
    let height = MARGIN_TOP + PLOT_H + MARGIN_BOTTOM;

    // Cell-center value maps; single-sample axes pin to the plot middle.
    let (s0, s1) = (grid.speed_axis[0], *grid.speed_axis.last().unwrap());
    let (b0, b1) = (grid.depth_axis[0], *grid.depth_axis.last().unwrap());
    let x_of = |s: f64| {
        let frac = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.5 };
        MARGIN_LEFT + (0.5 + frac * (w as f64 - 1.0)) * cw
    };
    let y_of = |b: f64| {
        let frac = if b1 > b0 { (b - b0) / (b1 - b0) } else { 0.5 };
        MARGIN_TOP + PLOT_H - (0.5 + frac * (h as f64 - 1.0)) * ch
    };

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    );
    let _ = write!(svg, "<rect width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>\n");

    let _ = svg.write_str("<g shape-rendering=\"crispEdges\">\n");
    for (i, row) in grid.labels.iter().enumerate() {
        for (j, &chatter) in row.iter().enumerate() {
            let color = if misclassified.contains(&(i, j)) {
                COLOR_MISCLASSIFIED
            } else if chatter {
                COLOR_CHATTER
            } else {
                COLOR_STABLE
            };
            let x = MARGIN_LEFT + i as f64 * cw;
            let y = MARGIN_TOP + PLOT_H - (j as f64 + 1.0) * ch;
            let _ = write!(
                svg,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\"/>\n",
                px(x),
                px(y),
                px(cw),
                px(ch)
            );
        }
    }
    let _ = svg.write_str("</g>\n");

    if let Some(boundary) = boundary {
        let mut points = String::new();
        for &(s, b) in &boundary.samples {
            if s < s0 || s > s1 {
                continue;
            }
            // Clamp off-scale depths to the plot box so the overlay hugs the
            // top edge where the boundary leaves the mapped range.
            let y = y_of(b).clamp(MARGIN_TOP, MARGIN_TOP + PLOT_H);
            if !points.is_empty() {
                points.push(' ');
            }
            let _ = write!(points, "{},{}", px(x_of(s)), px(y));
        }
        if !points.is_empty() {
            let _ = write!(
                svg,
                "<polyline fill=\"none\" stroke=\"{COLOR_BOUNDARY}\" stroke-width=\"2\" \
                 points=\"{points}\"/>\n"
            );
        }
    }

    let axis_y = MARGIN_TOP + PLOT_H;
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
        px(MARGIN_LEFT),
        px(axis_y + 18.0),
        format_axis(s0)
    );
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"end\">{}</text>\n",
        px(MARGIN_LEFT + PLOT_W),
        px(axis_y + 18.0),
        format_axis(s1)
    );
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\">speed ratio</text>\n",
        px(MARGIN_LEFT + PLOT_W / 2.0),
        px(axis_y + 36.0)
    );
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"end\">{}</text>\n",
        px(MARGIN_LEFT - 6.0),
        px(axis_y),
        format_axis(b0)
    );
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"end\">{}</text>\n",
        px(MARGIN_LEFT - 6.0),
        px(MARGIN_TOP + 10.0),
        format_axis(b1)
    );

    svg.push_str("</svg>\n");
    svg
}

fn format_axis(v: f64) -> String {
    format!("{v:.3}")
}

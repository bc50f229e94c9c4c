//! Bare-bones line plot: data and model as two polylines on an 800x500 canvas.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 40.0;

fn extent<'a>(vals: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

fn polyline(out: &mut String, t: &[f64], y: &[f64], x_ext: (f64, f64), y_ext: (f64, f64), style: &str) {
    let sx = (WIDTH - 2.0 * MARGIN) / (x_ext.1 - x_ext.0);
    let sy = (HEIGHT - 2.0 * MARGIN) / (y_ext.1 - y_ext.0);
    out.push_str("<polyline fill=\"none\" ");
    out.push_str(style);
    out.push_str(" points=\"");
    for (i, (a, b)) in t.iter().zip(y).enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let px = MARGIN + (a - x_ext.0) * sx;
        let py = HEIGHT - MARGIN - (b - y_ext.0) * sy;
        let _ = write!(out, "{px:.2},{py:.2}");
    }
    out.push_str("\"/>\n");
}

/// Data as a thin grey line, model as a thicker dark one.
pub fn plot(data_t: &[f64], data_y: &[f64], model_t: &[f64], model_y: &[f64]) -> String {
    let x_ext = extent(data_t.iter().chain(model_t));
    let y_ext = extent(data_y.iter().chain(model_y));
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    polyline(&mut out, data_t, data_y, x_ext, y_ext, "stroke=\"#999999\" stroke-width=\"1\"");
    polyline(&mut out, model_t, model_y, x_ext, y_ext, "stroke=\"#1f3b73\" stroke-width=\"2\"");
    out.push_str("</svg>\n");
    out
}

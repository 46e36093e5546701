//! Standalone SVG plot of a grid solution: one polyline in a 900x540 viewBox
//! with linear axes and tick labels. No plotting dependency; the output is
//! plain well-formed XML.

use navier_bvp::Solution;
use std::io::{self, Write};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 48.0;

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if (1e-3..1e4).contains(&v.abs()) {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

/// Render the u component of `solution` against x.
pub fn emit_svg<W: Write>(solution: &Solution, w: &mut W) -> io::Result<()> {
    let n = solution.grid.n();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &solution.u {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    // pad 5% of the data span; a flat line still gets a visible band
    let mut pad = 0.05 * (hi - lo);
    if pad == 0.0 {
        pad = 0.5;
    }
    let (y_lo, y_hi) = (lo - pad, hi + pad);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + x * plot_w;
    let py = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">"#
    )?;
    writeln!(w, r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##)?;

    // axes
    writeln!(
        w,
        r##"<g stroke="#000000" stroke-width="1" fill="none">"##
    )?;
    writeln!(
        w,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}"/>"#,
        TOP + plot_h
    )?;
    writeln!(
        w,
        r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}"/>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    )?;
    writeln!(w, "</g>")?;

    // ticks and labels
    writeln!(w, r##"<g font-family="sans-serif" font-size="13" fill="#000000">"##)?;
    for k in 0..=4 {
        let x = k as f64 / 4.0;
        let gx = px(x);
        writeln!(
            w,
            r##"<line x1="{gx}" y1="{}" x2="{gx}" y2="{}" stroke="#000000"/>"##,
            TOP + plot_h,
            TOP + plot_h + 6.0
        )?;
        writeln!(
            w,
            r#"<text x="{gx}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 22.0,
            tick_label(x)
        )?;
    }
    for k in 0..=4 {
        let y = y_lo + (y_hi - y_lo) * k as f64 / 4.0;
        let gy = py(y);
        writeln!(
            w,
            r##"<line x1="{}" y1="{gy}" x2="{LEFT}" y2="{gy}" stroke="#000000"/>"##,
            LEFT - 6.0
        )?;
        writeln!(
            w,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            LEFT - 10.0,
            gy + 4.0,
            tick_label(y)
        )?;
    }
    writeln!(w, "</g>")?;

    // the solution curve
    let mut points = String::new();
    for (i, &u) in solution.u.iter().enumerate() {
        let x = i as f64 / n as f64;
        points.push_str(&format!("{:.3},{:.3} ", px(x), py(u)));
    }
    writeln!(
        w,
        r##"<polyline fill="none" stroke="#1f5fbf" stroke-width="2" points="{}"/>"##,
        points.trim_end()
    )?;
    writeln!(w, "</svg>")?;
    Ok(())
}

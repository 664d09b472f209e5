//! Scatter plot of moves against edge count as a standalone SVG.

use std::fmt::Write;

use anyhow::{bail, Result};

use crate::experiment::{fit_line, mode_name, ExperimentRow};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// A named series with its points and optional fitted line.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub fit: Option<(f64, f64)>,
}

/// One series per (topology, mode) present in `rows`, in row order.
pub fn series(rows: &[ExperimentRow]) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    let modes: Vec<_> = rows.iter().map(|r| r.mode).collect();
    let several_modes = modes.windows(2).any(|w| w[0] != w[1]);
    for r in rows {
        let label =
            if several_modes { format!("{} {}", r.topology, mode_name(r.mode)) } else { r.topology.to_string() };
        let point = (r.m as f64, r.moves as f64);
        match out.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push(point),
            None => out.push(Series { label, points: vec![point], fit: None }),
        }
    }
    for s in &mut out {
        s.fit = fit_line(&s.points).map(|f| (f.slope, f.intercept));
    }
    out
}

/// Upper end of a "nice" axis range covering `max`.
fn nice_max(max: f64) -> f64 {
    if max <= 0.0 {
        return 1.0;
    }
    let step = 10f64.powf(max.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|f| f * step).find(|&v| v >= max).unwrap_or(10.0 * step)
}

pub fn render_svg(rows: &[ExperimentRow]) -> Result<String> {
    if rows.is_empty() {
        bail!("no data to plot");
    }
    let all = series(rows);
    let xmax = nice_max(rows.iter().map(|r| r.m).max().unwrap_or(0) as f64);
    let ymax = nice_max(rows.iter().map(|r| r.moves).max().unwrap_or(0) as f64);
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + x / xmax * pw;
    let sy = |y: f64| TOP + ph - y / ymax * ph;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )?;
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    // axes and ticks
    writeln!(s, r#"<path d="M{LEFT},{TOP} V{} H{}" fill="none" stroke="black"/>"#, TOP + ph, LEFT + pw)?;
    for i in 0..=5 {
        let (xv, yv) = (xmax * i as f64 / 5.0, ymax * i as f64 / 5.0);
        let (x, y) = (sx(xv), sy(yv));
        writeln!(s, r#"<line x1="{x:.1}" y1="{}" x2="{x:.1}" y2="{}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0)?;
        writeln!(s, r#"<text x="{x:.1}" y="{}" text-anchor="middle">{xv}</text>"#, TOP + ph + 18.0)?;
        writeln!(s, r#"<line x1="{}" y1="{y:.1}" x2="{LEFT}" y2="{y:.1}" stroke="black"/>"#, LEFT - 5.0)?;
        writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{yv}</text>"#, LEFT - 8.0, y + 4.0)?;
    }
    writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">m</text>"#, LEFT + pw / 2.0, HEIGHT - 12.0)?;
    writeln!(
        s,
        r#"<text x="18" y="{0:.1}" text-anchor="middle" transform="rotate(-90 18 {0:.1})">moves</text>"#,
        TOP + ph / 2.0
    )?;

    for (i, ser) in all.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        writeln!(s, r#"<g class="series" fill="{color}" fill-opacity="0.5">"#)?;
        for &(x, y) in &ser.points {
            writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="2.5"/>"#, sx(x), sy(y))?;
        }
        writeln!(s, "</g>")?;
        if let Some((slope, icept)) = ser.fit {
            let x0 = ser.points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            let x1 = ser.points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
            writeln!(
                s,
                r#"<line class="fit" x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="1.5"/>"#,
                sx(x0),
                sy(slope * x0 + icept),
                sx(x1),
                sy(slope * x1 + icept)
            )?;
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        writeln!(s, r#"<circle cx="{lx}" cy="{ly}" r="4" fill="{color}"/>"#)?;
        writeln!(s, r#"<text class="legend" x="{}" y="{}">{}</text>"#, lx + 10.0, ly + 4.0, ser.label)?;
    }
    s.push_str("</svg>\n");
    Ok(s)
}

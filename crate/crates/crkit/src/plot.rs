//! Deterministic SVG rendering of grid functions.
//!
//! Colours come from [`COLORMAP`], a fixed 256-entry table obtained by
//! linear interpolation between the nine [`ANCHORS`] (a viridis-like ramp).
//! Index 0 is the minimum of the plotted quantity, index 255 the maximum.

use std::fmt::Write;

use crkit_core::{GridFunction, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Style {
    /// Cell colour = `|f|`.
    Heatmap,
    /// Arrow direction = `arg f`, arrow colour = `|f|`.
    Quiver,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PlotError {
    #[error("every node of the field is masked")]
    AllMasked,
}

pub const ANCHORS: [[u8; 3]; 9] = [
    [68, 1, 84],
    [71, 44, 122],
    [59, 81, 139],
    [44, 113, 142],
    [33, 144, 141],
    [39, 173, 129],
    [92, 200, 99],
    [170, 220, 50],
    [253, 231, 37],
];

const fn build_colormap() -> [[u8; 3]; 256] {
    let mut out = [[0u8; 3]; 256];
    let mut i = 0;
    while i < 256 {
        // position in anchor units, in 1/255 steps: i * 8 / 255
        let num = i * 8;
        let seg = if num / 255 >= 8 { 7 } else { num / 255 };
        let rem = num - seg * 255;
        let mut c = 0;
        while c < 3 {
            let a = ANCHORS[seg][c] as usize;
            let b = ANCHORS[seg + 1][c] as usize;
            // rounded (a * (255 - rem) + b * rem) / 255
            out[i][c] = ((a * (255 - rem) + b * rem + 127) / 255) as u8;
            c += 1;
        }
        i += 1;
    }
    out
}

pub const COLORMAP: [[u8; 3]; 256] = build_colormap();

const MASKED_FILL: &str = "#d0d0d0";
const CANVAS: f64 = 512.0;
const LEGEND_W: f64 = 24.0;
const MARGIN: f64 = 8.0;
const MAX_ARROWS: usize = 32;

fn color(idx: usize) -> String {
    let [r, g, b] = COLORMAP[idx];
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn color_index(m: f64, lo: f64, hi: f64) -> usize {
    if hi > lo {
        (((m - lo) / (hi - lo)) * 255.0).round().clamp(0.0, 255.0) as usize
    } else {
        0
    }
}

fn magnitude_range(field: &GridFunction) -> Result<(f64, f64), PlotError> {
    let mut it = field.iter_unmasked().map(|(_, v)| v.norm());
    let first = it.next().ok_or(PlotError::AllMasked)?;
    Ok(it.fold((first, first), |(lo, hi), m| (lo.min(m), hi.max(m))))
}

/// Renders `field` as an SVG document. Identical inputs give identical bytes.
pub fn plot(field: &GridFunction, style: Style, title: &str) -> Result<String, PlotError> {
    let (lo, hi) = magnitude_range(field)?;
    let geom = field.geometry();
    let cell = CANVAS / geom.nx.max(geom.ny) as f64;
    let (pw, ph) = (cell * geom.nx as f64, cell * geom.ny as f64);
    let width = MARGIN * 3.0 + pw + LEGEND_W + 110.0;
    let height = MARGIN * 2.0 + ph.max(160.0) + 20.0;
    // node (i, j) occupies the cell whose lower-left corner is (i, j); y grows upward
    let x = |i: f64| MARGIN + i * cell;
    let y = |j: f64| MARGIN + 20.0 + ph - j * cell;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="18" font-family="monospace" font-size="12">{}</text>"#, escape(title));

    match style {
        Style::Heatmap => {
            for j in 0..geom.ny {
                for i in 0..geom.nx {
                    let k = geom.index(i, j);
                    let fill = match field.get(k) {
                        Some(v) => color(color_index(v.norm(), lo, hi)),
                        None => MASKED_FILL.to_string(),
                    };
                    let _ = writeln!(
                        s,
                        r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#,
                        x(i as f64),
                        y(j as f64 + 1.0),
                        cell,
                        cell
                    );
                }
            }
        }
        Style::Quiver => {
            let stride = geom.nx.max(geom.ny).div_ceil(MAX_ARROWS).max(1);
            let len = 0.45 * stride as f64 * cell;
            let _ = writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{pw:.3}" height="{ph:.3}" fill="none" stroke="black" stroke-width="0.5"/>"#,
                x(0.0),
                y(geom.ny as f64)
            );
            for j in (stride / 2..geom.ny).step_by(stride) {
                for i in (stride / 2..geom.nx).step_by(stride) {
                    let Some(v) = field.get(geom.index(i, j)) else { continue };
                    let (cx, cy) = (x(i as f64 + 0.5), y(j as f64 + 0.5));
                    let dir = if v == C64::default() { C64::default() } else { v / v.norm() };
                    let (tx, ty) = (cx + len * dir.re, cy - len * dir.im);
                    let c = color(color_index(v.norm(), lo, hi));
                    let _ = writeln!(
                        s,
                        r#"<line x1="{:.3}" y1="{:.3}" x2="{tx:.3}" y2="{ty:.3}" stroke="{c}" stroke-width="1.5"/><circle cx="{tx:.3}" cy="{ty:.3}" r="1.5" fill="{c}"/>"#,
                        cx - len * dir.re,
                        cy + len * dir.im
                    );
                }
            }
        }
    }

    // legend: 256 bands, max at the top
    let lx = MARGIN * 2.0 + pw;
    let (ly, lh) = (MARGIN + 20.0, ph.max(160.0));
    let band = lh / 256.0;
    for idx in 0..256 {
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.3}" y="{:.3}" width="{LEGEND_W:.3}" height="{:.3}" fill="{}"/>"#,
            ly + lh - (idx + 1) as f64 * band,
            band,
            color(idx)
        );
    }
    let tx = lx + LEGEND_W + 4.0;
    let _ = writeln!(
        s,
        r#"<text x="{tx:.3}" y="{:.3}" font-family="monospace" font-size="11">max {hi:.6e}</text>"#,
        ly + 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{tx:.3}" y="{:.3}" font-family="monospace" font-size="11">min {lo:.6e}</text>"#,
        ly + lh
    );
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

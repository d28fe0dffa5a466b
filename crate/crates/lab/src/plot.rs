//! Static scatter plots as SVG (written by hand) or PNG.

use std::fmt::Write as _;
use std::path::Path;

use gtn_core::points::norm;
use gtn_core::synth::swiss_roll_embed;
use gtn_core::PointSet;
use image::{Rgb, RgbImage};

use crate::config::PlotFormat;
use crate::csvio::Table;
use crate::error::{LabError, Result};

pub const SIZE: u32 = 640;
const PAD: f64 = 40.0;

/// Points in plot coordinates, optionally with one scalar per point that
/// picks its color.
#[derive(Debug, Clone, PartialEq)]
pub struct Scatter {
    pub points: Vec<[f64; 2]>,
    pub colors: Option<Vec<f64>>,
    pub title: String,
}

impl Scatter {
    /// 2D points as they are. 1D values: embedded on the swiss roll when
    /// `swiss` is set, otherwise drawn as their empirical CDF.
    pub fn from_points(points: &PointSet, colors: Option<Vec<f64>>, swiss: bool, title: &str) -> Result<Self> {
        if points.is_empty() {
            return Err(LabError::Usage("nothing to plot: no rows".into()));
        }
        let pts: Vec<[f64; 2]> = match points.d() {
            1 if swiss => swiss_roll_embed(points)?.rows().map(|r| [r[0], r[1]]).collect(),
            1 => {
                let mut order: Vec<usize> = (0..points.n()).collect();
                order.sort_by(|&a, &b| points.row(a)[0].total_cmp(&points.row(b)[0]));
                let mut out = vec![[0.0; 2]; points.n()];
                for (rank, &i) in order.iter().enumerate() {
                    out[i] = [points.row(i)[0], (rank as f64 + 0.5) / points.n() as f64];
                }
                out
            }
            2 => points.rows().map(|r| [r[0], r[1]]).collect(),
            d => {
                return Err(LabError::Usage(format!(
                    "data has {d} dimensions; choose two with --dims i,j"
                )))
            }
        };
        if let Some(c) = &colors {
            assert_eq!(c.len(), pts.len(), "one color value per point");
        }
        Ok(Scatter { points: pts, colors, title: title.into() })
    }

    /// A CSV table: pairs files plot their `x` columns colored by the norm of
    /// the source `y`; other files plot their columns (or `dims`) uncolored.
    pub fn from_table(table: &Table, dims: Option<(usize, usize)>, swiss: bool, title: &str) -> Result<Self> {
        let (points, colors) = if table.is_pairs() {
            let has_cluster = table.header.last().is_some_and(|h| h == "cluster");
            let d = (table.header.len() - usize::from(has_cluster)) / 2;
            let ys: Vec<usize> = (0..d).collect();
            let xs: Vec<usize> = (d..2 * d).collect();
            let colors = project(&table.rows, &ys).rows().map(norm).collect();
            (project(&table.rows, &xs), Some(colors))
        } else {
            (table.rows.clone(), None)
        };
        let points = match dims {
            Some((i, j)) => {
                let d = points.d();
                if i >= d || j >= d {
                    return Err(LabError::Usage(format!("--dims {i},{j} out of range for {d} columns")));
                }
                project(&points, &[i, j])
            }
            None => points,
        };
        Scatter::from_points(&points, colors, swiss, title)
    }

    fn bounds(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for p in &self.points {
            b[0] = b[0].min(p[0]);
            b[1] = b[1].max(p[0]);
            b[2] = b[2].min(p[1]);
            b[3] = b[3].max(p[1]);
        }
        for k in [0, 2] {
            let span = (b[k + 1] - b[k]).max(1e-9);
            b[k] -= 0.05 * span;
            b[k + 1] += 0.05 * span;
        }
        b
    }

    /// Pixel coordinates of every point, `y` pointing down.
    fn pixels(&self) -> Vec<(f64, f64)> {
        let [x0, x1, y0, y1] = self.bounds();
        let inner = SIZE as f64 - 2.0 * PAD;
        self.points
            .iter()
            .map(|p| (PAD + (p[0] - x0) / (x1 - x0) * inner, PAD + (y1 - p[1]) / (y1 - y0) * inner))
            .collect()
    }

    fn rgb(&self) -> Vec<[u8; 3]> {
        match &self.colors {
            None => vec![[31, 119, 180]; self.points.len()],
            Some(c) => {
                let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let span = (hi - lo).max(1e-12);
                c.iter().map(|v| viridis((v - lo) / span)).collect()
            }
        }
    }

    pub fn to_svg(&self) -> String {
        let mut s = String::new();
        let size = SIZE;
        let inner = SIZE as f64 - 2.0 * PAD;
        let [x0, x1, y0, y1] = self.bounds();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
        );
        let _ = writeln!(s, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r##"<rect x="{PAD}" y="{PAD}" width="{inner}" height="{inner}" fill="none" stroke="#888"/>"##
        );
        let _ = writeln!(s, r#"<text x="{PAD}" y="24" font-family="sans-serif" font-size="14">{}</text>"#, escape(&self.title));
        let _ = writeln!(
            s,
            r#"<text x="{PAD}" y="{}" font-family="sans-serif" font-size="11">x: [{x0:.3}, {x1:.3}]  y: [{y0:.3}, {y1:.3}]</text>"#,
            SIZE as f64 - 14.0
        );
        let _ = writeln!(s, r#"<g fill-opacity="0.7">"#);
        for ((px, py), c) in self.pixels().into_iter().zip(self.rgb()) {
            let _ = writeln!(
                s,
                r##"<circle cx="{px:.2}" cy="{py:.2}" r="1.5" fill="#{:02x}{:02x}{:02x}"/>"##,
                c[0], c[1], c[2]
            );
        }
        s.push_str("</g>\n</svg>\n");
        s
    }

    pub fn to_png(&self) -> RgbImage {
        let mut img = RgbImage::from_pixel(SIZE, SIZE, Rgb([255, 255, 255]));
        let (a, b) = (PAD as u32, SIZE - PAD as u32);
        for t in a..=b {
            for (x, y) in [(t, a), (t, b), (a, t), (b, t)] {
                img.put_pixel(x, y, Rgb([136, 136, 136]));
            }
        }
        for ((px, py), c) in self.pixels().into_iter().zip(self.rgb()) {
            let (cx, cy) = (px.round() as i64, py.round() as i64);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let (x, y) = (cx + dx, cy + dy);
                    if (0..SIZE as i64).contains(&x) && (0..SIZE as i64).contains(&y) {
                        img.put_pixel(x as u32, y as u32, Rgb(c));
                    }
                }
            }
        }
        img
    }

    pub fn write(&self, path: &Path, format: PlotFormat) -> Result<()> {
        match format {
            PlotFormat::Svg => std::fs::write(path, self.to_svg()).map_err(|e| LabError::io(path, e)),
            PlotFormat::Png => self
                .to_png()
                .save_with_format(path, image::ImageFormat::Png)
                .map_err(|e| match e {
                    image::ImageError::IoError(io) => LabError::io(path, io),
                    other => LabError::Usage(other.to_string()),
                }),
        }
    }
}

fn project(points: &PointSet, cols: &[usize]) -> PointSet {
    let data = points.rows().flat_map(|r| cols.iter().map(move |&j| r[j])).collect();
    PointSet::from_flat(cols.len(), data).expect("columns of valid data")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Five-stop approximation of the viridis color map, `t` in `[0, 1]`.
fn viridis(t: f64) -> [u8; 3] {
    const STOPS: [[f64; 3]; 5] = [
        [68.0, 1.0, 84.0],
        [59.0, 82.0, 139.0],
        [33.0, 145.0, 140.0],
        [94.0, 201.0, 98.0],
        [253.0, 231.0, 37.0],
    ];
    let t = t.clamp(0.0, 1.0) * 4.0;
    let i = (t.floor() as usize).min(3);
    let f = t - i as f64;
    let mut out = [0u8; 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = (STOPS[i][k] + f * (STOPS[i + 1][k] - STOPS[i][k])).round() as u8;
    }
    out
}

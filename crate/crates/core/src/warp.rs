//! Backward warping: a coarse lattice of source coordinates, bilinearly
//! interpolated per output pixel, then bilinear sampling of the input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::mls::{deform_point, ControlPointSet, DeformationMode, Point2};

/// How to resolve samples that fall outside the input image.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum FillRule {
    /// Use the nearest border pixel.
    #[default]
    Replicate,
    /// Use a constant value on every channel.
    Constant(u8),
}

impl std::str::FromStr for FillRule {
    type Err = String;

    /// `replicate` or `constant:<0-255>`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("replicate") {
            return Ok(Self::Replicate);
        }
        if let Some(v) = s.strip_prefix("constant:") {
            return v
                .parse::<u8>()
                .map(Self::Constant)
                .map_err(|e| format!("bad constant fill {v:?}: {e}"));
        }
        Err(format!(
            "unknown fill rule {s:?} (expected replicate or constant:<0-255>)"
        ))
    }
}

impl std::fmt::Display for FillRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Replicate => f.write_str("replicate"),
            Self::Constant(v) => write!(f, "constant:{v}"),
        }
    }
}

/// Source coordinates sampled on a lattice over the output image.
///
/// Node `(r, c)` sits at output position `(c * step, r * step)`. The lattice
/// has `ceil(height / step) + 1` rows and `ceil(width / step) + 1` columns,
/// so it always reaches past the far border.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpGrid {
    width: usize,
    height: usize,
    step: usize,
    rows: usize,
    cols: usize,
    src_coords: Vec<Point2>,
}

/// Lattice shape `(rows, cols)` for an image and step.
pub fn lattice_shape(width: usize, height: usize, step: usize) -> (usize, usize) {
    (height.div_ceil(step) + 1, width.div_ceil(step) + 1)
}

impl WarpGrid {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn src_coords(&self) -> &[Point2] {
        &self.src_coords
    }

    #[inline]
    pub fn node(&self, row: usize, col: usize) -> Point2 {
        self.src_coords[row * self.cols + col]
    }

    /// Output position of lattice node `(row, col)`.
    pub fn node_position(&self, row: usize, col: usize) -> Point2 {
        Point2::new((col * self.step) as f64, (row * self.step) as f64)
    }

    /// Source coordinate for output pixel `(x, y)`, bilinear in the lattice.
    #[inline]
    pub fn source_of(&self, x: usize, y: usize) -> Point2 {
        let (c, fx) = (x / self.step, (x % self.step) as f64 / self.step as f64);
        let (r, fy) = (y / self.step, (y % self.step) as f64 / self.step as f64);
        lerp2(
            self.node(r, c),
            self.node(r, c + 1),
            self.node(r + 1, c),
            self.node(r + 1, c + 1),
            fx,
            fy,
        )
    }

    /// The grid that maps every output pixel to itself.
    pub fn identity(width: usize, height: usize, step: usize) -> Result<Self> {
        check_grid_args(width, height, step)?;
        let (rows, cols) = lattice_shape(width, height, step);
        let src_coords = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| Point2::new((c * step) as f64, (r * step) as f64)))
            .collect();
        Ok(Self {
            width,
            height,
            step,
            rows,
            cols,
            src_coords,
        })
    }
}

#[inline]
fn lerp2(p00: Point2, p10: Point2, p01: Point2, p11: Point2, fx: f64, fy: f64) -> Point2 {
    if fx == 0.0 && fy == 0.0 {
        return p00;
    }
    let top = p00 + fx * (p10 - p00);
    let bottom = p01 + fx * (p11 - p01);
    top + fy * (bottom - top)
}

fn check_grid_args(width: usize, height: usize, step: usize) -> Result<()> {
    if width < 2 || height < 2 {
        return Err(Error::InvalidDimensions(format!(
            "image must be at least 2x2, got {width}x{height}"
        )));
    }
    if step == 0 {
        return Err(Error::InvalidDimensions("grid step must be >= 1".into()));
    }
    Ok(())
}

/// Samples the backward map of `cps` on the output lattice.
///
/// Sampling the input at the returned coordinates realizes the forward
/// deformation `p -> q`: each node is deformed with the control roles
/// swapped (sources `q`, targets `p`).
pub fn build_warp_grid(
    width: usize,
    height: usize,
    cps: &ControlPointSet,
    mode: DeformationMode,
    step: usize,
) -> Result<WarpGrid> {
    check_grid_args(width, height, step)?;
    let backward = cps.swapped()?;
    let (rows, cols) = lattice_shape(width, height, step);
    let mut src_coords = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = Point2::new((c * step) as f64, (r * step) as f64);
            src_coords.push(deform_point(v, &backward, mode)?);
        }
    }
    Ok(WarpGrid {
        width,
        height,
        step,
        rows,
        cols,
        src_coords,
    })
}

/// Exact per-pixel backward map, row-major over the output image.
pub fn exact_backward_map(
    width: usize,
    height: usize,
    cps: &ControlPointSet,
    mode: DeformationMode,
) -> Result<Vec<Point2>> {
    check_grid_args(width, height, 1)?;
    let backward = cps.swapped()?;
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            out.push(deform_point(
                Point2::new(x as f64, y as f64),
                &backward,
                mode,
            )?);
        }
    }
    Ok(out)
}

#[inline]
fn quantize(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Bilinear sample of `img` at `(sx, sy)` into `out` (one value per channel).
#[inline]
fn sample_bilinear(img: &Image, sx: f64, sy: f64, fill: FillRule, out: &mut [u8]) {
    let (w, h, ch) = (img.width() as isize, img.height() as isize, img.channels());
    let data = img.as_bytes();
    let x0f = sx.floor();
    let y0f = sy.floor();
    let (fx, fy) = (sx - x0f, sy - y0f);
    let (x0, y0) = (x0f as isize, y0f as isize);

    let inside = x0 >= 0 && y0 >= 0 && x0 + 1 < w && y0 + 1 < h;
    let idx = |x: isize, y: isize| (y as usize * w as usize + x as usize) * ch;
    let fetch = |x: isize, y: isize, c: usize| -> f64 {
        if inside {
            return data[idx(x, y) + c] as f64;
        }
        match fill {
            FillRule::Replicate => data[idx(x.clamp(0, w - 1), y.clamp(0, h - 1)) + c] as f64,
            FillRule::Constant(v) => {
                if x < 0 || y < 0 || x >= w || y >= h {
                    v as f64
                } else {
                    data[idx(x, y) + c] as f64
                }
            }
        }
    };

    for (c, o) in out.iter_mut().enumerate() {
        let v00 = fetch(x0, y0, c);
        let v10 = fetch(x0 + 1, y0, c);
        let v01 = fetch(x0, y0 + 1, c);
        let v11 = fetch(x0 + 1, y0 + 1, c);
        let top = v00 + fx * (v10 - v00);
        let bottom = v01 + fx * (v11 - v01);
        *o = quantize(top + fy * (bottom - top));
    }
}

/// Resamples `img` through `grid`.
pub fn warp_image(img: &Image, grid: &WarpGrid, fill: FillRule) -> Result<Image> {
    if img.width() != grid.width || img.height() != grid.height {
        return Err(Error::DimensionMismatch {
            expected_w: grid.width,
            expected_h: grid.height,
            actual_w: img.width(),
            actual_h: img.height(),
        });
    }
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let mut data = vec![0u8; w * h * ch];
    for (y, row) in data.chunks_exact_mut(w * ch).enumerate() {
        for (x, px) in row.chunks_exact_mut(ch).enumerate() {
            let s = grid.source_of(x, y);
            sample_bilinear(img, s.x, s.y, fill, px);
        }
    }
    Image::new(w, h, ch, data)
}

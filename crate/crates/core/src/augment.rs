//! Border fiducials, moving states, and the one-call augmentation pipeline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::mls::{ControlPointSet, DeformationMode, Point2};
use crate::rng::RandomSource;
use crate::warp::{build_warp_grid, warp_image, FillRule};

/// `2(N+1)` fiducial points: `N+1` along the top border left to right, then
/// `N+1` along the bottom border left to right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiducialLayout {
    n_patches: usize,
    width: usize,
    height: usize,
    points: Vec<Point2>,
}

impl FiducialLayout {
    pub fn n_patches(&self) -> usize {
        self.n_patches
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Number of fiducial points for `n_patches` patches.
pub const fn point_count(n_patches: usize) -> usize {
    2 * (n_patches + 1)
}

/// Splits the image into `n_patches` vertical patches and places fiducials on
/// the patch boundaries along the top and bottom borders.
pub fn init_fiducials(width: usize, height: usize, n_patches: usize) -> Result<FiducialLayout> {
    if width < 2 || height < 2 {
        return Err(Error::InvalidDimensions(format!(
            "image must be at least 2x2, got {width}x{height}"
        )));
    }
    if n_patches == 0 {
        return Err(Error::InvalidDimensions("n_patches must be >= 1".into()));
    }
    let xs: Vec<f64> = (0..=n_patches)
        .map(|k| (k as f64 * width as f64 / n_patches as f64).min((width - 1) as f64))
        .collect();
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidDimensions(format!(
            "{n_patches} patches do not fit in width {width}"
        )));
    }
    let bottom = (height - 1) as f64;
    let points = xs
        .iter()
        .map(|&x| Point2::new(x, 0.0))
        .chain(xs.iter().map(|&x| Point2::new(x, bottom)))
        .collect();
    Ok(FiducialLayout {
        n_patches,
        width,
        height,
        points,
    })
}

/// Direction of movement along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Pos,
    #[serde(rename = "-")]
    Neg,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Pos => 1.0,
            Sign::Neg => -1.0,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn from_bool(positive: bool) -> Sign {
        if positive {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }
}

/// Per-point, per-axis movement directions.
///
/// Components are stored flat: component `2 * point + axis`, with axis 0 = x
/// and axis 1 = y.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MovingState {
    signs: Vec<Sign>,
}

impl MovingState {
    pub fn from_signs(signs: Vec<Sign>) -> Result<Self> {
        if signs.is_empty() || signs.len() % 4 != 0 {
            return Err(Error::InvalidDimensions(format!(
                "moving state needs 2(N+1)*2 components, got {}",
                signs.len()
            )));
        }
        Ok(Self { signs })
    }

    pub fn uniform(n_patches: usize, sign: Sign) -> Self {
        Self {
            signs: vec![sign; 2 * point_count(n_patches)],
        }
    }

    /// Top row pushed outward horizontally and upward, bottom row outward and
    /// downward.
    pub fn stretch(n_patches: usize) -> Self {
        let per_row = n_patches + 1;
        let mut signs = Vec::with_capacity(4 * per_row);
        for row in 0..2 {
            for k in 0..per_row {
                signs.push(Sign::from_bool(2 * k >= n_patches));
                signs.push(Sign::from_bool(row == 1));
            }
        }
        Self { signs }
    }

    /// Left edge contracts vertically while the right edge expands, giving a
    /// keystone-like effect.
    pub fn perspective(n_patches: usize) -> Self {
        let per_row = n_patches + 1;
        let mut signs = Vec::with_capacity(4 * per_row);
        for row in 0..2 {
            for k in 0..per_row {
                let right = 2 * k >= n_patches;
                signs.push(Sign::Pos);
                // top row: right goes up (-), left goes down (+); bottom mirrored
                signs.push(Sign::from_bool(right == (row == 1)));
            }
        }
        Self { signs }
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    /// Number of sign components (`2 * points`).
    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn n_points(&self) -> usize {
        self.signs.len() / 2
    }

    pub fn n_patches(&self) -> usize {
        self.n_points() / 2 - 1
    }

    pub fn get(&self, point: usize, axis: usize) -> Sign {
        self.signs[2 * point + axis]
    }

    pub fn with_flipped(&self, component: usize) -> Self {
        let mut out = self.clone();
        out.signs[component] = out.signs[component].flipped();
        out
    }

    /// Componentwise negation of the whole state.
    pub fn negated(&self) -> Self {
        Self {
            signs: self.signs.iter().map(|s| s.flipped()).collect(),
        }
    }

    pub fn hamming(&self, other: &MovingState) -> usize {
        self.signs
            .iter()
            .zip(&other.signs)
            .filter(|(a, b)| a != b)
            .count()
            + self.signs.len().abs_diff(other.signs.len())
    }
}

impl std::fmt::Display for MovingState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in &self.signs {
            f.write_str(if *s == Sign::Pos { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Each component independently `+1` or `-1` with probability 1/2.
pub fn random_state(n_patches: usize, rng: &mut RandomSource) -> MovingState {
    MovingState {
        signs: (0..2 * point_count(n_patches))
            .map(|_| Sign::from_bool(rng.coin()))
            .collect(),
    }
}

/// Flips one uniformly chosen component. Returns the new state and the
/// flipped component index.
pub fn perturb_state(state: &MovingState, rng: &mut RandomSource) -> (MovingState, usize) {
    let idx = rng.below(state.len() as u64) as usize;
    (state.with_flipped(idx), idx)
}

/// Moves each fiducial by `(sx * dx, sy * dy)` with `dx, dy` drawn
/// independently from `U[0, radius)`. Draw order: point 0 x, point 0 y,
/// point 1 x, ... Moved points are not clamped to the image.
pub fn sample_offsets(
    layout: &FiducialLayout,
    state: &MovingState,
    radius: f64,
    rng: &mut RandomSource,
) -> Result<Vec<Point2>> {
    if state.n_points() != layout.len() {
        return Err(Error::LengthMismatch {
            expected: 2 * layout.len(),
            actual: state.len(),
        });
    }
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::InvalidDimensions(format!(
            "radius must be >= 0, got {radius}"
        )));
    }
    Ok(layout
        .points()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let dx = rng.next_f64() * radius;
            let dy = rng.next_f64() * radius;
            p + Point2::new(state.get(i, 0).value() * dx, state.get(i, 1).value() * dy)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    pub n_patches: usize,
    /// Maximum per-axis movement in pixels.
    pub radius: f64,
    pub mode: DeformationMode,
    /// Warp lattice spacing in pixels. At 2 the interpolated map stays within
    /// half a pixel of the exact one for border fiducials at radius 10; at 4
    /// it can stray past a pixel next to the moved points.
    pub step: usize,
    pub fill: FillRule,
    pub rng_seed: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            n_patches: 3,
            radius: 10.0,
            mode: DeformationMode::Similarity,
            step: 2,
            fill: FillRule::Replicate,
            rng_seed: 0,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_patches == 0 {
            return Err(Error::InvalidDimensions("n_patches must be >= 1".into()));
        }
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidDimensions(format!(
                "radius must be >= 0, got {}",
                self.radius
            )));
        }
        if self.step == 0 {
            return Err(Error::InvalidDimensions("step must be >= 1".into()));
        }
        Ok(())
    }
}

/// Warps `img` by moving the border fiducials in the directions of `state`
/// by random distances within `cfg.radius`.
///
/// Returns the augmented image and the realized control points.
pub fn augment(
    img: &Image,
    cfg: &AugmentConfig,
    state: &MovingState,
    rng: &mut RandomSource,
) -> Result<(Image, ControlPointSet)> {
    cfg.validate()?;
    let layout = init_fiducials(img.width(), img.height(), cfg.n_patches)?;
    let q = sample_offsets(&layout, state, cfg.radius, rng)?;
    let cps = ControlPointSet::new(layout.points().to_vec(), q)?;
    let out = augment_with_controls(img, &cps, cfg.mode, cfg.step, cfg.fill)?;
    Ok((out, cps))
}

/// Warps `img` with explicit control points. This is the replay path for
/// recorded augmentations.
pub fn augment_with_controls(
    img: &Image,
    cps: &ControlPointSet,
    mode: DeformationMode,
    step: usize,
    fill: FillRule,
) -> Result<Image> {
    let grid = build_warp_grid(img.width(), img.height(), cps, mode, step)?;
    warp_image(img, &grid, fill)
}

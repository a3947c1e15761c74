use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use super::manifest::ReplayRecord;
use super::DeformFlags;
use crate::augment::{augment, init_fiducials, random_state, FiducialLayout};
use crate::error::Result;
use crate::image::Image;
use crate::mls::Point2;
use crate::rng::{RandomSource, STREAM_VERSION};
use crate::warp::{build_warp_grid, WarpGrid};

#[derive(Clone, Debug, Args)]
pub struct InspectArgs {
    pub image: PathBuf,
    #[command(flatten)]
    pub deform: DeformFlags,
    /// Write the JSON dump here instead of stdout.
    #[arg(long)]
    pub dump_grid: Option<PathBuf>,
    /// Write the augmented image.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the augmented image with source (red) and moved (green)
    /// control points drawn on it.
    #[arg(long)]
    pub render: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InspectDump {
    pub layout: FiducialLayout,
    /// Same shape as a line of the reproduction manifest.
    pub record: ReplayRecord,
    pub grid: WarpGrid,
}

fn mark(img: &mut Image, at: Point2, color: [u8; 3]) {
    let (cx, cy) = (at.x.round() as i64, at.y.round() as i64);
    for dy in -1..=1 {
        for dx in -1..=1 {
            let (x, y) = (cx + dx, cy + dy);
            if x >= 0 && y >= 0 && (x as usize) < img.width() && (y as usize) < img.height() {
                img.pixel_mut(x as usize, y as usize)
                    .copy_from_slice(&color);
            }
        }
    }
}

fn to_rgb(img: &Image) -> Result<Image> {
    if img.channels() == 3 {
        return Ok(img.clone());
    }
    let data = img.as_bytes().iter().flat_map(|&v| [v, v, v]).collect();
    Image::new(img.width(), img.height(), 3, data)
}

/// Augments one image exactly as the first copy of the first manifest row
/// would be under the same seed, and dumps the geometry.
pub fn cmd_inspect(args: &InspectArgs) -> Result<InspectDump> {
    let cfg = args.deform.config();
    cfg.validate()?;
    let img = Image::load(&args.image)?;
    let layout = init_fiducials(img.width(), img.height(), cfg.n_patches)?;

    let stream_seed = RandomSource::new(cfg.rng_seed)
        .substream(0)
        .substream_seed(0);
    let mut rng = RandomSource::new(stream_seed);
    let state = random_state(cfg.n_patches, &mut rng);
    let (out, cps) = augment(&img, &cfg, &state, &mut rng)?;
    let grid = build_warp_grid(img.width(), img.height(), &cps, cfg.mode, cfg.step)?;

    let dump = InspectDump {
        layout,
        record: ReplayRecord {
            output: args.output.clone().unwrap_or_default(),
            source: args.image.clone(),
            ground_truth: String::new(),
            copy: 0,
            stream_seed,
            rng: STREAM_VERSION.to_string(),
            mode: cfg.mode,
            step: cfg.step,
            fill: cfg.fill,
            radius: cfg.radius,
            alpha: cps.alpha(),
            state,
            p: cps.p().to_vec(),
            q: cps.q().to_vec(),
        },
        grid,
    };

    let json = serde_json::to_string_pretty(&dump)?;
    match &args.dump_grid {
        Some(path) => std::fs::write(path, json)?,
        None => println!("{json}"),
    }
    if let Some(path) = &args.output {
        out.save_png(path)?;
    }
    if let Some(path) = &args.render {
        let mut canvas = to_rgb(&out)?;
        for &p in cps.p() {
            mark(&mut canvas, p, [220, 30, 30]);
        }
        for &q in cps.q() {
            mark(&mut canvas, q, [30, 180, 30]);
        }
        canvas.save_png(path)?;
    }
    Ok(dump)
}

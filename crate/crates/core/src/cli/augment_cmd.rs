use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use super::manifest::{read_manifest, write_manifest, write_replay, ManifestRow, ReplayRecord};
use super::{resolve_threads, thread_pool, DeformFlags};
use crate::augment::{augment, random_state};
use crate::error::Result;
use crate::image::Image;
use crate::rng::{RandomSource, STREAM_VERSION};

/// Name of the reproduction manifest written next to the outputs.
pub const REPLAY_FILE: &str = "replay.jsonl";
/// Name of the TSV manifest listing the outputs and their labels.
pub const OUTPUT_MANIFEST: &str = "augmented.tsv";

#[derive(Clone, Debug, Args)]
pub struct AugmentArgs {
    /// TSV manifest of `image_path<TAB>text` rows.
    pub manifest: PathBuf,
    /// Output directory (created if missing).
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub deform: DeformFlags,
    /// Augmented copies per input image.
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
    /// Worker threads (overridden by TEXTMORPH_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct AugmentSummary {
    pub written: usize,
    pub records: Vec<ReplayRecord>,
    pub failures: Vec<(PathBuf, String)>,
}

/// `<stem>_augNN.png`
pub fn output_name(source: &Path, copy: usize) -> String {
    let stem = source
        .file_stem()
        .map_or_else(|| "image".into(), |s| s.to_string_lossy());
    format!("{stem}_aug{copy:02}.png")
}

fn augment_row(
    index: usize,
    row: &ManifestRow,
    args: &AugmentArgs,
    root: &RandomSource,
) -> std::result::Result<Vec<ReplayRecord>, String> {
    let img = Image::load(&row.image).map_err(|e| e.to_string())?;
    let cfg = args.deform.config();
    let row_stream = root.substream(index as u64);
    let mut records = Vec::with_capacity(args.copies);
    for copy in 0..args.copies {
        let stream_seed = row_stream.substream_seed(copy as u64);
        let mut rng = RandomSource::new(stream_seed);
        let state = random_state(cfg.n_patches, &mut rng);
        let (out, cps) = augment(&img, &cfg, &state, &mut rng).map_err(|e| e.to_string())?;
        let output = args.out_dir.join(output_name(&row.image, copy));
        out.save_png(&output).map_err(|e| e.to_string())?;
        records.push(ReplayRecord {
            output,
            source: row.image.clone(),
            ground_truth: row.text.clone(),
            copy,
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
        });
    }
    Ok(records)
}

/// Augments every manifest row `copies` times.
///
/// Row `i`, copy `k` draws from sub-stream `k` of sub-stream `i` of the
/// seed, so results do not depend on scheduling. Unreadable images are
/// reported in the summary and skipped.
pub fn cmd_augment(args: &AugmentArgs) -> Result<AugmentSummary> {
    args.deform.config().validate()?;
    let rows = read_manifest(&args.manifest)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let root = RandomSource::new(args.deform.seed);
    let pool = thread_pool(resolve_threads(args.threads))?;
    let results: Vec<_> = pool.install(|| {
        rows.par_iter()
            .enumerate()
            .map(|(i, row)| augment_row(i, row, args, &root))
            .collect()
    });

    let mut summary = AugmentSummary::default();
    for (row, result) in rows.iter().zip(results) {
        match result {
            Ok(records) => summary.records.extend(records),
            Err(msg) => {
                eprintln!("{}: {msg}", row.image.display());
                summary.failures.push((row.image.clone(), msg));
            }
        }
    }
    summary.written = summary.records.len();
    write_replay(&args.out_dir.join(REPLAY_FILE), &summary.records)?;
    let outputs: Vec<ManifestRow> = summary
        .records
        .iter()
        .map(|r| ManifestRow {
            image: r.output.clone(),
            text: r.ground_truth.clone(),
        })
        .collect();
    write_manifest(&args.out_dir.join(OUTPUT_MANIFEST), &outputs)?;
    Ok(summary)
}

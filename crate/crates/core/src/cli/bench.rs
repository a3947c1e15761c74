use std::time::{Duration, Instant};

use clap::Args;
use rayon::prelude::*;

use super::{resolve_threads, thread_pool};
use crate::augment::{augment, random_state, AugmentConfig};
use crate::error::Result;
use crate::image::Image;
use crate::mls::DeformationMode;
use crate::rng::RandomSource;

/// Per-image augmentation time for a 32x100 image reported in the original
/// work, on a 2.0 GHz CPU.
pub const PAPER_REFERENCE_MS: f64 = 2.0;

#[derive(Clone, Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 100)]
    pub width: usize,
    #[arg(long, default_value_t = 32)]
    pub height: usize,
    #[arg(long, default_value_t = 500)]
    pub iters: usize,
    #[arg(long, default_value_t = 4)]
    pub step: usize,
    /// Threads for the parallel run (overridden by TEXTMORPH_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub n_patches: usize,
    #[arg(long, default_value_t = 10.0)]
    pub radius: f64,
    #[arg(long, default_value_t = DeformationMode::Similarity)]
    pub mode: DeformationMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Default for BenchArgs {
    fn default() -> Self {
        Self {
            width: 100,
            height: 32,
            iters: 500,
            step: 4,
            threads: None,
            n_patches: 3,
            radius: 10.0,
            mode: DeformationMode::Similarity,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchSummary {
    pub width: usize,
    pub height: usize,
    pub step: usize,
    pub samples: usize,
    pub median_ms: f64,
    pub p95_ms: f64,
    pub threads: usize,
    /// Images per second, sequential.
    pub single_throughput: f64,
    /// Images per second with `threads` workers.
    pub multi_throughput: f64,
}

impl BenchSummary {
    pub fn speedup(&self) -> f64 {
        self.multi_throughput / self.single_throughput
    }
}

impl std::fmt::Display for BenchSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{}x{} (w x h), step {}, {} samples",
            self.width, self.height, self.step, self.samples
        )?;
        writeln!(
            f,
            "single-threaded: median {:.3} ms, p95 {:.3} ms (reference figure: {PAPER_REFERENCE_MS} ms)",
            self.median_ms, self.p95_ms
        )?;
        writeln!(
            f,
            "throughput: {:.0} img/s on 1 thread, {:.0} img/s on {} threads ({:.2}x)",
            self.single_throughput,
            self.multi_throughput,
            self.threads,
            self.speedup()
        )
    }
}

fn bench_image(width: usize, height: usize) -> Result<Image> {
    Image::from_fn_gray(width, height, |x, y| {
        if ((x / 6) + (y / 6)) % 2 == 0 {
            30
        } else {
            225
        }
    })
}

fn percentile(sorted: &[Duration], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx].as_secs_f64() * 1e3
}

/// Times full augmentations (offset sampling, lattice, resampling).
pub fn cmd_bench(args: &BenchArgs) -> Result<BenchSummary> {
    let cfg = AugmentConfig {
        n_patches: args.n_patches,
        radius: args.radius,
        mode: args.mode,
        step: args.step,
        rng_seed: args.seed,
        ..Default::default()
    };
    cfg.validate()?;
    let img = bench_image(args.width, args.height)?;
    let iters = args.iters.max(1);
    let root = RandomSource::new(args.seed);

    let run_one = |i: u64| -> Result<Image> {
        let mut rng = root.substream(i);
        let state = random_state(cfg.n_patches, &mut rng);
        Ok(augment(&img, &cfg, &state, &mut rng)?.0)
    };

    for i in 0..iters.min(10) {
        std::hint::black_box(run_one(u64::MAX - i as u64)?);
    }

    let mut samples = Vec::with_capacity(iters);
    let start = Instant::now();
    for i in 0..iters {
        let t = Instant::now();
        std::hint::black_box(run_one(i as u64)?);
        samples.push(t.elapsed());
    }
    let single_wall = start.elapsed().as_secs_f64();
    samples.sort();

    let threads = resolve_threads(args.threads);
    let pool = thread_pool(threads)?;
    let jobs = iters * threads;
    let start = Instant::now();
    pool.install(|| {
        (0..jobs as u64)
            .into_par_iter()
            .try_for_each(|i| run_one(i).map(|img| drop(std::hint::black_box(img))))
    })?;
    let multi_wall = start.elapsed().as_secs_f64();

    Ok(BenchSummary {
        width: args.width,
        height: args.height,
        step: args.step,
        samples: iters,
        median_ms: percentile(&samples, 0.5),
        p95_ms: percentile(&samples, 0.95),
        threads,
        single_throughput: iters as f64 / single_wall.max(1e-12),
        multi_throughput: jobs as f64 / multi_wall.max(1e-12),
    })
}

//! Command-line front end: batch augmentation, the joint-learning demo,
//! throughput benchmarking, and deformation inspection.
//!
//! Every command is a plain function over an argument struct so it can be
//! driven from tests and examples as well as from the `textmorph` binary.

use clap::{Args, Parser, Subcommand};

use crate::augment::AugmentConfig;
use crate::mls::DeformationMode;
use crate::warp::FillRule;

mod augment_cmd;
mod bench;
mod inspect;
pub mod manifest;
mod train_demo;

pub use augment_cmd::{cmd_augment, output_name, AugmentArgs, AugmentSummary};
pub use bench::{cmd_bench, BenchArgs, BenchSummary, PAPER_REFERENCE_MS};
pub use inspect::{cmd_inspect, InspectArgs, InspectDump};
pub use train_demo::{cmd_train_demo, TrainDemoArgs, TrainDemoSummary, TrainLogRecord};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for invalid flags or unusable inputs.
pub const EXIT_USAGE: i32 = 1;
/// Exit status when some, but not all, inputs failed.
pub const EXIT_PARTIAL: i32 = 2;

/// Environment variable that overrides `--threads`.
pub const THREADS_ENV: &str = "TEXTMORPH_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "textmorph",
    version,
    about = "Moving-least-squares text image augmentation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write augmented copies of every image in a manifest.
    Augment(AugmentArgs),
    /// Run the joint agent/recognizer loop on the bundled digit task.
    TrainDemo(TrainDemoArgs),
    /// Time augmentation of one image, single- and multi-threaded.
    Bench(BenchArgs),
    /// Dump fiducials, moved points, and the warp lattice for one image.
    Inspect(InspectArgs),
}

/// Deformation flags shared by `augment` and `inspect`.
#[derive(Clone, Debug, Args)]
pub struct DeformFlags {
    /// Number of patches N; 2(N+1) fiducials are placed.
    #[arg(long, default_value_t = 3)]
    pub n_patches: usize,
    /// Maximum per-axis movement in pixels.
    #[arg(long, default_value_t = 10.0)]
    pub radius: f64,
    /// affine, similarity, or rigid.
    #[arg(long, default_value_t = DeformationMode::Similarity)]
    pub mode: DeformationMode,
    /// Warp lattice spacing in pixels.
    #[arg(long, default_value_t = 2)]
    pub step: usize,
    /// replicate or constant:<0-255>.
    #[arg(long, default_value_t = FillRule::Replicate)]
    pub fill: FillRule,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Default for DeformFlags {
    fn default() -> Self {
        let cfg = AugmentConfig::default();
        Self {
            n_patches: cfg.n_patches,
            radius: cfg.radius,
            mode: cfg.mode,
            step: cfg.step,
            fill: cfg.fill,
            seed: cfg.rng_seed,
        }
    }
}

impl DeformFlags {
    pub fn config(&self) -> AugmentConfig {
        AugmentConfig {
            n_patches: self.n_patches,
            radius: self.radius,
            mode: self.mode,
            step: self.step,
            fill: self.fill,
            rng_seed: self.seed,
        }
    }
}

/// Worker count: `TEXTMORPH_THREADS` if set and valid, else the flag, else
/// the number of available cores.
pub fn resolve_threads(flag: Option<usize>) -> usize {
    let from_env = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok());
    from_env
        .or(flag)
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub(crate) fn thread_pool(threads: usize) -> crate::Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::Error::Io(std::io::Error::other(e)))
}

/// Parses arguments and runs a command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Augment(a) => cmd_augment(&a).map(|s| {
            println!("wrote {} images, {} failures", s.written, s.failures.len());
            if s.failures.is_empty() {
                EXIT_OK
            } else {
                EXIT_PARTIAL
            }
        }),
        Command::TrainDemo(a) => cmd_train_demo(&a).map(|s| {
            print!("{s}");
            EXIT_OK
        }),
        Command::Bench(a) => cmd_bench(&a).map(|s| {
            print!("{s}");
            EXIT_OK
        }),
        Command::Inspect(a) => cmd_inspect(&a).map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

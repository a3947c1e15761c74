use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::agent::{
    train_step, AgentPolicy, DistanceDraws, ReferencePolicy, ReversalScope, StepReport,
    TrainOptions,
};
use crate::augment::{augment, random_state, AugmentConfig};
use crate::error::{Error, Result};
use crate::metrics::{edit_distance, Transcript};
use crate::mls::DeformationMode;
use crate::recognizer::{render_word, GlyphTask, Recognizer, TemplateRecognizer};
use crate::rng::RandomSource;

const WORD_STREAM: u64 = 1;
const TRAIN_STREAM: u64 = 2;
const BASELINE_STREAM: u64 = 3;

#[derive(Clone, Debug, Args)]
pub struct TrainDemoArgs {
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    #[arg(long, default_value_t = 3)]
    pub n_patches: usize,
    #[arg(long, default_value_t = 10.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write one JSON record per step to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = DeformationMode::Similarity)]
    pub mode: DeformationMode,
    /// How the target is reversed when S' is easier: flipped or whole.
    #[arg(long, default_value = "flipped")]
    pub reversal: ReversalScope,
    /// Whether S and S' share movement distances: shared or independent.
    #[arg(long, default_value = "independent")]
    pub distances: DistanceDraws,
    /// Digits per training word.
    #[arg(long, default_value_t = 4)]
    pub word_len: usize,
    #[arg(long, default_value_t = 100)]
    pub width: usize,
    #[arg(long, default_value_t = 32)]
    pub height: usize,
    /// Steps at the end of the run used for the agent-vs-random comparison.
    #[arg(long, default_value_t = 200)]
    pub window: usize,
}

impl Default for TrainDemoArgs {
    fn default() -> Self {
        Self {
            steps: 2000,
            lr: 0.1,
            n_patches: 3,
            radius: 10.0,
            seed: 0,
            report: None,
            mode: DeformationMode::Similarity,
            reversal: ReversalScope::FlippedComponent,
            distances: DistanceDraws::Independent,
            word_len: 4,
            width: 100,
            height: 32,
            window: 200,
        }
    }
}

/// One line of the step log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainLogRecord {
    pub step: usize,
    pub ground_truth: Transcript,
    #[serde(flatten)]
    pub report: StepReport,
    /// Edit distance under a uniformly random moving state on the same image.
    pub ed_random: usize,
    pub prediction_random: Transcript,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainDemoSummary {
    pub steps: usize,
    pub probabilities: Vec<f64>,
    pub window: usize,
    pub mean_ed_agent: f64,
    pub mean_ed_random: f64,
    pub records: Vec<TrainLogRecord>,
}

impl TrainDemoSummary {
    /// `mean_ed_agent - mean_ed_random` over the final window.
    pub fn margin(&self) -> f64 {
        self.mean_ed_agent - self.mean_ed_random
    }
}

impl std::fmt::Display for TrainDemoSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "steps: {}", self.steps)?;
        writeln!(f, "P(+) per fiducial (x, y):")?;
        for (i, pair) in self.probabilities.chunks(2).enumerate() {
            writeln!(f, "  point {i:2}: {:.3} {:.3}", pair[0], pair[1])?;
        }
        writeln!(
            f,
            "final {} steps: mean ed agent {:.3}, random {:.3}, margin {:+.3}",
            self.window,
            self.mean_ed_agent,
            self.mean_ed_random,
            self.margin()
        )
    }
}

/// Runs the joint loop on randomly rendered digit words.
///
/// Words, training draws, and the random baseline each use their own
/// sub-stream of `--seed`.
pub fn cmd_train_demo(args: &TrainDemoArgs) -> Result<TrainDemoSummary> {
    if !(args.lr > 0.0 && args.lr.is_finite()) {
        return Err(Error::InvalidDimensions(format!(
            "lr must be > 0, got {}",
            args.lr
        )));
    }
    let cfg = AugmentConfig {
        n_patches: args.n_patches,
        radius: args.radius,
        mode: args.mode,
        rng_seed: args.seed,
        ..Default::default()
    };
    cfg.validate()?;
    let task = Arc::new(GlyphTask::digits());
    if args.word_len == 0 || args.word_len > task.max_chars(args.width, args.height) {
        return Err(Error::DoesNotFit {
            chars: args.word_len,
            width: args.width,
            height: args.height,
        });
    }

    let root = RandomSource::new(args.seed);
    let mut words = root.substream(WORD_STREAM);
    let mut train_rng = root.substream(TRAIN_STREAM);
    let mut baseline_rng = root.substream(BASELINE_STREAM);

    let mut policy = ReferencePolicy::new(args.n_patches);
    let mut recognizer = TemplateRecognizer::new(task.clone(), args.word_len);
    let opts = TrainOptions {
        lr: args.lr,
        reversal: args.reversal,
        distances: args.distances,
    };

    let mut log = match &args.report {
        Some(path) => Some(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => None,
    };

    let alphabet = task.alphabet();
    let mut records = Vec::with_capacity(args.steps);
    for step in 0..args.steps {
        let word: String = (0..args.word_len)
            .map(|_| alphabet[words.below(alphabet.len() as u64) as usize])
            .collect();
        let gt = Transcript::new(word)?;
        let img = render_word(&task, gt.as_str(), args.width, args.height)?;

        let report = train_step(
            &mut policy,
            &mut recognizer,
            &img,
            &gt,
            &cfg,
            &opts,
            &mut train_rng,
        )?;

        let baseline_state = random_state(cfg.n_patches, &mut baseline_rng);
        let (baseline_img, _) = augment(&img, &cfg, &baseline_state, &mut baseline_rng)?;
        let prediction_random = recognizer.recognize(&baseline_img)?;
        let ed_random = edit_distance(prediction_random.as_str(), gt.as_str());

        let record = TrainLogRecord {
            step,
            ground_truth: gt,
            report,
            ed_random,
            prediction_random,
        };
        if let Some(out) = log.as_mut() {
            serde_json::to_writer(&mut *out, &record)?;
            out.write_all(b"\n")?;
        }
        records.push(record);
    }
    if let Some(mut out) = log {
        out.flush()?;
    }

    let window = args.window.min(records.len());
    let tail = &records[records.len() - window..];
    let mean = |f: &dyn Fn(&TrainLogRecord) -> usize| {
        if tail.is_empty() {
            0.0
        } else {
            tail.iter().map(f).sum::<usize>() as f64 / tail.len() as f64
        }
    };
    let probe_img = render_word(&task, "", args.width, args.height)?;
    Ok(TrainDemoSummary {
        steps: args.steps,
        probabilities: policy.predict(&probe_img),
        window,
        mean_ed_agent: mean(&|r| r.report.ed_state),
        mean_ed_random: mean(&|r| r.ed_random),
        records,
    })
}

//! Learnable augmentation agent and the joint agent/recognizer training step.
//!
//! One step: sample a moving state `S` from the policy, flip one random
//! component to get `S'`, augment the input under both, recognize both,
//! feed the `S` sample to the recognizer's training hook, then push the
//! policy toward whichever direction made recognition harder. Ties go to
//! `S'`.

use serde::{Deserialize, Serialize};

use crate::augment::{augment, perturb_state, AugmentConfig, MovingState, Sign};
use crate::error::Result;
use crate::image::Image;
use crate::metrics::{edit_distance, Transcript};
use crate::recognizer::Recognizer;
use crate::rng::RandomSource;

/// Smallest/largest probability a policy may report.
const PROB_FLOOR: f64 = 1e-15;

/// A distribution over moving states, one independent Bernoulli per
/// component.
pub trait AgentPolicy {
    /// Probability that each component is `+`, in component order. Values lie
    /// strictly inside `(0, 1)`.
    fn predict(&self, img: &Image) -> Vec<f64>;

    /// One gradient step on the negative log-likelihood of `target`.
    /// Returns the NLL before the step.
    fn update(&mut self, img: &Image, target: &MovingState, lr: f64) -> f64;
}

#[inline]
fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Context-free policy: one logit per component, image ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferencePolicy {
    logits: Vec<f64>,
}

impl ReferencePolicy {
    /// All logits zero: every direction equally likely.
    pub fn new(n_patches: usize) -> Self {
        Self {
            logits: vec![0.0; 4 * (n_patches + 1)],
        }
    }

    pub fn from_logits(logits: Vec<f64>) -> Self {
        assert!(
            logits.iter().all(|l| l.is_finite()),
            "logits must be finite"
        );
        Self { logits }
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    /// d NLL(target) / d logit, per component: `sigmoid(l) - [target = +]`.
    pub fn gradient(&self, target: &MovingState) -> Vec<f64> {
        assert_eq!(target.len(), self.logits.len(), "target shape");
        self.logits
            .iter()
            .zip(target.signs())
            .map(|(&l, &s)| logistic(l) - if s == Sign::Pos { 1.0 } else { 0.0 })
            .collect()
    }
}

impl AgentPolicy for ReferencePolicy {
    fn predict(&self, _img: &Image) -> Vec<f64> {
        self.logits
            .iter()
            .map(|&l| logistic(l).clamp(PROB_FLOOR, 1.0 - PROB_FLOOR))
            .collect()
    }

    fn update(&mut self, img: &Image, target: &MovingState, lr: f64) -> f64 {
        let loss = nll(self, img, target);
        let grad = self.gradient(target);
        for (l, g) in self.logits.iter_mut().zip(grad) {
            *l -= lr * g;
        }
        loss
    }
}

/// Draws each component independently: `+` with the predicted probability.
pub fn sample_state(policy: &dyn AgentPolicy, img: &Image, rng: &mut RandomSource) -> MovingState {
    let signs = policy
        .predict(img)
        .into_iter()
        .map(|p| Sign::from_bool(rng.bernoulli(p)))
        .collect();
    MovingState::from_signs(signs).expect("policy output has moving-state shape")
}

/// `-sum_i log P(target_i | img)` over every component.
pub fn nll(policy: &dyn AgentPolicy, img: &Image, target: &MovingState) -> f64 {
    policy
        .predict(img)
        .iter()
        .zip(target.signs())
        .map(|(&p, &s)| -(if s == Sign::Pos { p } else { 1.0 - p }).ln())
        .sum()
}

/// Componentwise negation of the whole state.
pub fn negate(state: &MovingState) -> MovingState {
    state.negated()
}

/// What "reverse the direction of `S'`" means when `S'` made recognition
/// easier.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReversalScope {
    /// Undo only the perturbed component, i.e. learn toward `S`.
    #[default]
    FlippedComponent,
    /// Negate every component of `S'`.
    WholeState,
}

impl std::str::FromStr for ReversalScope {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "flipped" | "flipped_component" => Ok(Self::FlippedComponent),
            "whole" | "whole_state" => Ok(Self::WholeState),
            other => Err(format!(
                "unknown reversal scope {other:?} (expected flipped or whole)"
            )),
        }
    }
}

/// Whether `q` and `q'` reuse the same random movement distances.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceDraws {
    /// Fresh distances for `q'`.
    #[default]
    Independent,
    /// One set of distances; `q` and `q'` differ only in the flipped
    /// direction.
    Shared,
}

impl std::str::FromStr for DistanceDraws {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "shared" => Ok(Self::Shared),
            "independent" => Ok(Self::Independent),
            other => Err(format!(
                "unknown distance draw mode {other:?} (expected shared or independent)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub lr: f64,
    pub reversal: ReversalScope,
    pub distances: DistanceDraws,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            lr: 0.1,
            reversal: ReversalScope::default(),
            distances: DistanceDraws::default(),
        }
    }
}

/// Record of one joint training step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub state: MovingState,
    pub state_prime: MovingState,
    pub flipped_index: usize,
    pub ed_state: usize,
    pub ed_state_prime: usize,
    pub learning_target: MovingState,
    pub agent_loss: f64,
    pub prediction_state: Transcript,
    pub prediction_state_prime: Transcript,
}

impl StepReport {
    /// Whether `S'` was judged at least as hard as `S`.
    pub fn prime_is_harder(&self) -> bool {
        self.ed_state <= self.ed_state_prime
    }

    /// The learning target implied by the edit distances.
    pub fn expected_target(&self, reversal: ReversalScope) -> MovingState {
        learning_target(
            &self.state_prime,
            self.flipped_index,
            self.prime_is_harder(),
            reversal,
        )
    }
}

fn learning_target(
    state_prime: &MovingState,
    flipped_index: usize,
    prime_is_harder: bool,
    reversal: ReversalScope,
) -> MovingState {
    if prime_is_harder {
        return state_prime.clone();
    }
    match reversal {
        ReversalScope::WholeState => negate(state_prime),
        ReversalScope::FlippedComponent => state_prime.with_flipped(flipped_index),
    }
}

/// One step of the joint agent/recognizer learning scheme.
///
/// Draw order on `rng`: the sampled state, the flipped index, the offsets
/// for `S`, then (with [`DistanceDraws::Independent`]) the offsets for `S'`.
/// With shared draws the offsets for `S'` replay the stream used for `S`.
pub fn train_step(
    policy: &mut dyn AgentPolicy,
    recognizer: &mut dyn Recognizer,
    img: &Image,
    gt: &Transcript,
    cfg: &AugmentConfig,
    opts: &TrainOptions,
    rng: &mut RandomSource,
) -> Result<StepReport> {
    let state = sample_state(policy, img, rng);
    let (state_prime, flipped_index) = perturb_state(&state, rng);

    let mut replay = rng.clone();
    let (aug, _) = augment(img, cfg, &state, rng)?;
    let (aug_prime, _) = match opts.distances {
        DistanceDraws::Shared => augment(img, cfg, &state_prime, &mut replay)?,
        DistanceDraws::Independent => augment(img, cfg, &state_prime, rng)?,
    };

    recognizer.announce_state(&state);
    let prediction_state = recognizer.recognize(&aug)?;
    recognizer.announce_state(&state_prime);
    let prediction_state_prime = recognizer.recognize(&aug_prime)?;

    recognizer.observe_training_example(&aug, gt)?;

    let ed_state = edit_distance(prediction_state.as_str(), gt.as_str());
    let ed_state_prime = edit_distance(prediction_state_prime.as_str(), gt.as_str());

    let target = learning_target(
        &state_prime,
        flipped_index,
        ed_state <= ed_state_prime,
        opts.reversal,
    );
    let agent_loss = policy.update(img, &target, opts.lr);
    Ok(StepReport {
        state,
        state_prime,
        flipped_index,
        ed_state,
        ed_state_prime,
        learning_target: target,
        agent_loss,
        prediction_state,
        prediction_state_prime,
    })
}

/// Test double whose difficulty is a known function of the moving state.
///
/// For the state most recently announced through
/// [`Recognizer::announce_state`], it returns the ground truth followed by
/// one `#` per component that agrees with `hidden`. The edit distance to the
/// ground truth therefore equals that agreement count.
#[derive(Clone, Debug)]
pub struct DifficultyProbe {
    hidden: MovingState,
    gt: Transcript,
    realized: Option<MovingState>,
}

impl DifficultyProbe {
    pub fn new(hidden: MovingState, gt: Transcript) -> Self {
        Self {
            hidden,
            gt,
            realized: None,
        }
    }

    pub fn hidden(&self) -> &MovingState {
        &self.hidden
    }

    pub fn agreement(&self, state: &MovingState) -> usize {
        state.len() - state.hamming(&self.hidden).min(state.len())
    }
}

impl Recognizer for DifficultyProbe {
    fn recognize(&mut self, _img: &Image) -> Result<Transcript> {
        let extra = self.realized.as_ref().map_or(0, |s| self.agreement(s));
        Transcript::new(format!("{}{}", self.gt, "#".repeat(extra)))
    }

    fn announce_state(&mut self, state: &MovingState) {
        self.realized = Some(state.clone());
    }
}

/// Builds the difficulty probe for a hidden direction vector.
pub fn difficulty_probe_seam(hidden: MovingState, gt: Transcript) -> DifficultyProbe {
    DifficultyProbe::new(hidden, gt)
}

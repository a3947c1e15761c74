//! Text-image geometric augmentation with moving least squares.
//!
//! Fiducial points are laid out along the top and bottom borders of a text
//! image, moved by random distances in chosen directions, and the image is
//! warped with a moving-least-squares deformation (affine, similarity, or
//! rigid). A learnable agent picks the directions, trained jointly with a
//! recognizer to produce samples the recognizer finds hard.
//!
//! ```
//! use textmorph::{augment, random_state, AugmentConfig, GlyphTask, RandomSource, render_word};
//!
//! let task = GlyphTask::digits();
//! let img = render_word(&task, "2024", 100, 32).unwrap();
//! let cfg = AugmentConfig::default();
//! let mut rng = RandomSource::new(7);
//! let state = random_state(cfg.n_patches, &mut rng);
//! let (warped, controls) = augment(&img, &cfg, &state, &mut rng).unwrap();
//! assert_eq!((warped.width(), warped.height()), (100, 32));
//! assert_eq!(controls.len(), 8);
//! ```

pub mod agent;
pub mod augment;
pub mod cli;
pub mod error;
pub mod image;
pub mod metrics;
pub mod mls;
pub mod recognizer;
pub mod rng;
pub mod warp;

pub use agent::{
    difficulty_probe_seam, negate, nll, sample_state, train_step, AgentPolicy, DifficultyProbe,
    DistanceDraws, ReferencePolicy, ReversalScope, StepReport, TrainOptions,
};
pub use augment::{
    augment, augment_with_controls, init_fiducials, perturb_state, random_state, sample_offsets,
    AugmentConfig, FiducialLayout, MovingState, Sign,
};
pub use error::{Error, Result};
pub use image::Image;
pub use metrics::{cer, edit_distance, wer, word_accuracy, Comparison, Transcript};
pub use mls::{
    apply_transform, centroids, deform_point, solve_transform, weights, ControlPointSet,
    DeformationMode, LocalTransform, Mat2, Point2, Weights,
};
pub use recognizer::{render_word, template_recognize, GlyphTask, Recognizer, TemplateRecognizer};
pub use rng::RandomSource;
pub use warp::{build_warp_grid, exact_backward_map, warp_image, FillRule, WarpGrid};

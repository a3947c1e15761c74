use textmorph::recognizer::ConstantRecognizer;
use textmorph::{
    difficulty_probe_seam, edit_distance, nll, random_state, train_step, AgentPolicy,
    AugmentConfig, Image, RandomSource, ReferencePolicy, ReversalScope, TrainOptions, Transcript,
};

fn canvas() -> Image {
    Image::from_fn_gray(100, 32, |x, y| ((x * 7 + y * 3) % 256) as u8).unwrap()
}

/// Component-wise sign accuracy of the policy mean against `hidden` after
/// `steps` joint steps against the difficulty probe.
fn probe_accuracy(seed: u64, steps: usize, reversal: ReversalScope) -> f64 {
    let mut rng = RandomSource::new(seed);
    let hidden = random_state(3, &mut rng.substream(1));
    let gt = Transcript::new("0").unwrap();
    let mut probe = difficulty_probe_seam(hidden.clone(), gt.clone());
    let mut policy = ReferencePolicy::new(3);
    let cfg = AugmentConfig {
        radius: 0.0,
        ..Default::default()
    };
    let opts = TrainOptions {
        reversal,
        ..Default::default()
    };
    let img = canvas();
    for _ in 0..steps {
        train_step(&mut policy, &mut probe, &img, &gt, &cfg, &opts, &mut rng).unwrap();
    }
    let probs = policy.predict(&img);
    let agree = probs
        .iter()
        .zip(hidden.signs())
        .filter(|(p, s)| (**p > 0.5) == (s.value() > 0.0))
        .count();
    agree as f64 / probs.len() as f64
}

#[test]
fn policy_learns_hidden_direction() {
    for seed in 1..=5 {
        let acc = probe_accuracy(seed, 2000, ReversalScope::FlippedComponent);
        assert!(acc > 0.9, "seed {seed}: accuracy {acc}");
    }
}

#[test]
fn indifferent_recognizer_gives_no_direction() {
    let gt = Transcript::new("123").unwrap();
    let mut rec = ConstantRecognizer(gt.clone());
    let mut policy = ReferencePolicy::new(3);
    let cfg = AugmentConfig::default();
    let mut rng = RandomSource::new(2);
    let img = canvas();
    for _ in 0..10_000 {
        train_step(
            &mut policy,
            &mut rec,
            &img,
            &gt,
            &cfg,
            &TrainOptions::default(),
            &mut rng,
        )
        .unwrap();
    }
    let centered: Vec<f64> = policy.predict(&img).iter().map(|p| p - 0.5).collect();
    let n = centered.len() as f64;
    let mean = centered.iter().sum::<f64>() / n;
    let sd = (centered.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() <= 3.0 * sd / n.sqrt(), "mean {mean}, sd {sd}");
}

#[test]
fn reports_are_consistent() {
    let mut rng = RandomSource::new(6);
    let task = std::sync::Arc::new(textmorph::GlyphTask::digits());
    let mut rec = textmorph::TemplateRecognizer::new(task.clone(), 4);
    let cfg = AugmentConfig::default();
    for reversal in [ReversalScope::FlippedComponent, ReversalScope::WholeState] {
        let opts = TrainOptions {
            reversal,
            ..Default::default()
        };
        let mut policy = ReferencePolicy::new(3);
        for _ in 0..250 {
            let word: String = (0..4)
                .map(|_| char::from(b'0' + rng.below(10) as u8))
                .collect();
            let gt = Transcript::new(word).unwrap();
            let img = textmorph::render_word(&task, gt.as_str(), 100, 32).unwrap();
            let before = policy.clone();
            let r = train_step(&mut policy, &mut rec, &img, &gt, &cfg, &opts, &mut rng).unwrap();

            assert_eq!(r.state.hamming(&r.state_prime), 1);
            assert_eq!(
                r.state_prime.signs()[r.flipped_index],
                r.state.signs()[r.flipped_index].flipped()
            );
            assert_eq!(
                r.ed_state,
                edit_distance(r.prediction_state.as_str(), gt.as_str())
            );
            assert_eq!(
                r.ed_state_prime,
                edit_distance(r.prediction_state_prime.as_str(), gt.as_str())
            );
            assert_eq!(r.learning_target, r.expected_target(reversal));
            assert!((r.agent_loss - nll(&before, &img, &r.learning_target)).abs() < 1e-12);
            assert!(nll(&policy, &img, &r.learning_target) < r.agent_loss);
        }
    }
}

mod common;

use std::sync::Arc;

use textmorph::{
    augment, edit_distance, random_state, render_word, AugmentConfig, GlyphTask, RandomSource,
    Recognizer, TemplateRecognizer,
};

fn random_word(rng: &mut RandomSource, alphabet: &[char], len: usize) -> String {
    (0..len)
        .map(|_| alphabet[rng.below(alphabet.len() as u64) as usize])
        .collect()
}

#[test]
fn every_character_in_every_cell_round_trips() {
    // Cells are rendered and read independently, so covering every
    // (length, position, character) triple covers every word up to length 8.
    let task = Arc::new(GlyphTask::digits());
    for len in 1..=8 {
        let mut rec = TemplateRecognizer::new(task.clone(), len);
        for &c in task.alphabet() {
            let word: String = std::iter::repeat(c).take(len).collect();
            let img = render_word(&task, &word, 160, 32).unwrap();
            assert_eq!(rec.recognize(&img).unwrap().as_str(), word);
        }
    }
}

#[test]
fn random_words_round_trip() {
    let task = Arc::new(GlyphTask::digits());
    let mut rng = RandomSource::new(4);
    for len in 1..=8 {
        let mut rec = TemplateRecognizer::new(task.clone(), len);
        for _ in 0..300 {
            let word = random_word(&mut rng, task.alphabet(), len);
            let img = render_word(&task, &word, 160, 32).unwrap();
            assert_eq!(rec.recognize(&img).unwrap().as_str(), word);
        }
    }
}

#[test]
fn rendering_is_deterministic() {
    let task = GlyphTask::digits();
    assert_eq!(
        render_word(&task, "90210", 100, 32).unwrap(),
        render_word(&task, "90210", 100, 32).unwrap()
    );
    let blank = render_word(&task, "", 100, 32).unwrap();
    assert!(blank.as_bytes().iter().all(|&v| v == 255));
}

/// Mean and standard error of the edit distance over `words` random
/// four-digit words augmented at `radius`.
fn degradation_at(radius: f64, words: usize, seed: u64) -> (f64, f64) {
    let task = Arc::new(GlyphTask::digits());
    let mut rec = TemplateRecognizer::new(task.clone(), 4);
    let cfg = AugmentConfig {
        radius,
        ..Default::default()
    };
    let mut rng = RandomSource::new(seed);
    let eds: Vec<f64> = (0..words)
        .map(|_| {
            let word = random_word(&mut rng, task.alphabet(), 4);
            let img = render_word(&task, &word, 100, 32).unwrap();
            let state = random_state(cfg.n_patches, &mut rng);
            let (out, _) = augment(&img, &cfg, &state, &mut rng).unwrap();
            edit_distance(rec.recognize(&out).unwrap().as_str(), &word) as f64
        })
        .collect();
    let n = eds.len() as f64;
    let mean = eds.iter().sum::<f64>() / n;
    let var = eds.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn larger_radius_is_not_easier() {
    let points: Vec<(f64, f64)> = [0.0, 5.0, 10.0, 15.0]
        .iter()
        .map(|&r| degradation_at(r, 200, 31))
        .collect();
    assert_eq!(points[0].0, 0.0);
    for w in points.windows(2) {
        let ((m0, s0), (m1, s1)) = (w[0], w[1]);
        assert!(m1 >= m0 - (s0 * s0 + s1 * s1).sqrt(), "{points:?}");
    }
}

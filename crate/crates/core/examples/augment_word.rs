//! Renders a digit word and augments it with a few hand-picked moving states
//! and a random one. PNGs go to the directory given as the first argument
//! (default: current directory).

use std::path::PathBuf;

use textmorph::{
    augment, random_state, render_word, AugmentConfig, GlyphTask, MovingState, RandomSource, Sign,
};

fn main() -> textmorph::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;
    let task = GlyphTask::digits();
    let img = render_word(&task, "4071", 100, 32)?;
    img.save_png(dir.join("word.png"))?;

    let cfg = AugmentConfig::default();
    let mut rng = RandomSource::new(3);
    let states = [
        ("stretch", MovingState::stretch(cfg.n_patches)),
        ("perspective", MovingState::perspective(cfg.n_patches)),
        (
            "all_positive",
            MovingState::uniform(cfg.n_patches, Sign::Pos),
        ),
        ("random", random_state(cfg.n_patches, &mut rng)),
    ];
    for (name, state) in states {
        let (out, cps) = augment(&img, &cfg, &state, &mut rng)?;
        let path = dir.join(format!("word_{name}.png"));
        out.save_png(&path)?;
        let moved: f64 = cps
            .p()
            .iter()
            .zip(cps.q())
            .map(|(p, q)| (p.x - q.x).abs() + (p.y - q.y).abs())
            .sum();
        println!(
            "{name:12} {state}  total L1 movement {moved:6.2} px -> {}",
            path.display()
        );
    }
    Ok(())
}

//! Runs the joint agent/recognizer loop on rendered digit words and prints
//! the learned direction probabilities and the agent-vs-random comparison.
//!
//! Optional arguments: seed, steps.

use textmorph::cli::{cmd_train_demo, TrainDemoArgs};

fn main() -> textmorph::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let steps = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);
    let summary = cmd_train_demo(&TrainDemoArgs {
        seed,
        steps,
        ..Default::default()
    })?;
    print!("{summary}");

    let harder = summary
        .records
        .iter()
        .filter(|r| r.report.prime_is_harder())
        .count();
    println!(
        "S' judged at least as hard on {harder} of {} steps",
        summary.records.len()
    );
    Ok(())
}

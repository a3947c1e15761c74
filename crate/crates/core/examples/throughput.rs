//! Times 32x100 augmentations at lattice steps 1, 2, and 4.

use textmorph::cli::{cmd_bench, BenchArgs};

fn main() -> textmorph::Result<()> {
    for step in [1, 2, 4] {
        let s = cmd_bench(&BenchArgs {
            step,
            iters: 300,
            ..Default::default()
        })?;
        print!("{s}");
    }
    Ok(())
}

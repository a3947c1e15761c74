//! Builds the warp lattice for a checkerboard and compares it with the exact
//! per-pixel map at several lattice steps. Writes the warped image to the
//! path given as the first argument, if any.

use textmorph::{
    build_warp_grid, exact_backward_map, init_fiducials, random_state, sample_offsets, warp_image,
    ControlPointSet, DeformationMode, FillRule, Image, RandomSource,
};

fn main() -> textmorph::Result<()> {
    let (w, h) = (100, 32);
    let img = Image::from_fn_gray(w, h, |x, y| if (x / 6 + y / 6) % 2 == 0 { 20 } else { 235 })?;

    let mut rng = RandomSource::new(5);
    let layout = init_fiducials(w, h, 3)?;
    let state = random_state(3, &mut rng);
    let q = sample_offsets(&layout, &state, 10.0, &mut rng)?;
    let cps = ControlPointSet::new(layout.points().to_vec(), q)?;
    let mode = DeformationMode::Similarity;

    let exact = exact_backward_map(w, h, &cps, mode)?;
    for step in [8, 4, 2, 1] {
        let grid = build_warp_grid(w, h, &cps, mode, step)?;
        let mut worst: f64 = 0.0;
        for y in 0..h {
            for x in 0..w {
                let (a, b) = (grid.source_of(x, y), exact[y * w + x]);
                worst = worst.max(((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt());
            }
        }
        println!(
            "step {step}: lattice {}x{}, max error {worst:.3} px",
            grid.rows(),
            grid.cols()
        );
    }

    let grid = build_warp_grid(w, h, &cps, mode, 2)?;
    let out = warp_image(&img, &grid, FillRule::Constant(128))?;
    if let Some(path) = std::env::args().nth(1) {
        out.save_png(&path)?;
        println!("wrote {path}");
    }
    Ok(())
}

//! Deforms a few query points under each mode with the same control points.

use textmorph::{deform_point, solve_transform, ControlPointSet, DeformationMode, Point2};

fn main() -> textmorph::Result<()> {
    let p = vec![
        Point2::new(0.0, 0.0),
        Point2::new(100.0, 0.0),
        Point2::new(0.0, 32.0),
        Point2::new(100.0, 32.0),
    ];
    let mut q = p.clone();
    q[1] = Point2::new(110.0, -10.0);
    let cps = ControlPointSet::new(p, q)?;

    let queries = [
        Point2::new(50.0, 16.0),
        Point2::new(90.0, 4.0),
        Point2::new(10.0, 30.0),
    ];
    for mode in [
        DeformationMode::Affine,
        DeformationMode::Similarity,
        DeformationMode::Rigid,
    ] {
        println!("{mode}");
        for u in queries {
            let t = solve_transform(u, &cps, mode)?;
            let v = deform_point(u, &cps, mode)?;
            println!(
                "  ({:6.2}, {:6.2}) -> ({:7.3}, {:7.3})   M = [[{:+.3}, {:+.3}], [{:+.3}, {:+.3}]]",
                u.x, u.y, v.x, v.y, t.m.0[0][0], t.m.0[0][1], t.m.0[1][0], t.m.0[1][1]
            );
        }
    }
    Ok(())
}

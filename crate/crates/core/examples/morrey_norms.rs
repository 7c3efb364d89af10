//! Lebesgue and Morrey norms, strong and weak, of indicators and bumps.

use morrey_lab::harness::corpus::poly_bump;
use morrey_lab::lattice::{make_ball_family, BallFamily, FamilySpec, GridFunction, Lattice};
use morrey_lab::spaces::{lebesgue_norm, morrey_norm, weak_lebesgue_norm, weak_morrey_norm, MorreyParams};
use morrey_lab::weights::Weight;

fn main() -> morrey_lab::Result<()> {
    let l = Lattice::new(1, 2.0, 129)?;
    let one = Weight::unit(1);
    let indicator = GridFunction::indicator_box(&l, &[-1.0], &[1.0])?;
    let radii: Vec<f64> = (0..80).map(|k| 0.05 * 1.05f64.powi(k)).collect();
    let centered = BallFamily::centered(&l, &radii)?;
    let mp = MorreyParams::new(1.0, 0.5)?;
    println!("‖χ[-1,1]‖_L1 = {:.5}", lebesgue_norm(&indicator, &one, 1.0)?);
    let r = morrey_norm(&indicator, &one, mp, &centered)?;
    println!(
        "‖χ[-1,1]‖ Morrey (p = 1, κ = 1/2) = {:.5} at radius {:.3} (√2 = {:.5})",
        r.value,
        r.ball.as_ref().map_or(f64::NAN, |b| b.radius()),
        std::f64::consts::SQRT_2
    );
    println!("weak Morrey: {:.5}", weak_morrey_norm(&indicator, &one, mp, &centered)?.value);

    let family = make_ball_family(&l, &FamilySpec::new(2, l.spacing(), 7))?;
    let bump = poly_bump(&l, &[0.2], 0.5)?;
    for a in [-0.5, 0.0, 0.5] {
        let w = Weight::power(1, a)?;
        for kappa in [0.25, 0.5, 0.75] {
            let mp = MorreyParams::new(2.0, kappa)?;
            println!(
                "bump, w = |x|^{a:4.1}, κ = {kappa}: L2 {:.5}, weak L2 {:.5}, Morrey {:.5}, weak Morrey {:.5}",
                lebesgue_norm(&bump, &w, 2.0)?,
                weak_lebesgue_norm(&bump, &w, 2.0)?.value,
                morrey_norm(&bump, &w, mp, &family)?.value,
                weak_morrey_norm(&bump, &w, mp, &family)?.value
            );
        }
    }
    Ok(())
}

//! Weight-class constants of power weights and their behaviour under refinement.

use morrey_lab::lattice::{make_ball_family, FamilySpec, Lattice};
use morrey_lab::weights::{
    ainfty_diagnostics, apq_constant, doubling_constant, muckenhoupt_constant, multi_ap_constant, nu_weight,
    ExponentVector, NuMode, Trend, Weight,
};

fn main() -> morrey_lab::Result<()> {
    let spec = FamilySpec::new(2, 0.0625, 7);
    let coarse = Lattice::new(1, 4.0, 129)?;
    let fine = coarse.refined();
    let families = [make_ball_family(&coarse, &spec)?, make_ball_family(&fine, &spec.refined())?];

    println!("A_2 constants of |x|^a (window -1 < a < 1):");
    for a in [-0.9, -0.5, 0.0, 0.5, 0.9, 1.0, 1.5] {
        let w = Weight::power(1, a)?;
        let c = muckenhoupt_constant(&w, 2.0, &families[0])?.value;
        let f = muckenhoupt_constant(&w, 2.0, &families[1])?.value;
        println!("  a = {a:5.2}: {c:12.6} -> {f:12.6}  {:?}", Trend::classify(c, f));
    }

    // A_(2,4) needs -1/4 < a < 1/2
    for a in [0.2, 0.5] {
        let w = Weight::power(1, a)?;
        println!("A_(2,4) of |x|^{a}: {:.6}", apq_constant(&w, 2.0, 4.0, &families[0])?.value);
    }
    let w = Weight::power(1, 0.5)?;
    println!("doubling of |x|^0.5: {:.6} (2^1.5 = {:.6})", doubling_constant(&w, &families[0])?.value, 2f64.powf(1.5));
    let d = ainfty_diagnostics(&w, &families[0])?;
    println!(
        "reverse Jensen {:.6}, fitted δ {:?}",
        d.reverse_jensen.value,
        d.delta.as_ref().map(|r| r.value)
    );

    let ws = [Weight::power(1, 0.5)?, Weight::power(1, -0.5)?];
    let exps = ExponentVector::new(vec![2.0, 2.0])?;
    println!("multiple A_P of (|x|^0.5, |x|^-0.5): {:.6}", multi_ap_constant(&ws, &exps, &families[0])?.value);
    let nu = nu_weight(&ws, &exps, NuMode::Czo, &coarse)?;
    println!("composite weight: {:?}", nu.as_power());
    Ok(())
}

//! Weight-class implication chains for power weights inside and outside the windows.

use morrey_lab::harness::config::{ExperimentConfig, TheoremId};
use morrey_lab::harness::corollary::check_corollaries;

fn main() -> morrey_lab::Result<()> {
    let base = ExperimentConfig::from_toml_str(include_str!("../configs/theorem13.toml"))?;
    for (theorem, power) in [
        (TheoremId::Fractional, vec![0.2, -0.1]),
        (TheoremId::Fractional, vec![0.6, 0.0]),
        (TheoremId::Czo, vec![0.5, -0.5]),
        (TheoremId::Czo, vec![1.2, 0.0]),
    ] {
        let mut config = base.clone();
        config.weights.power = power.clone();
        if theorem == TheoremId::Czo {
            config.operator.alpha = None;
            config.exponents.kappa = 0.5;
        }
        let r = check_corollaries(&config, theorem, false)?;
        let finite: Vec<bool> = r.components.iter().map(|c| c.finite).collect();
        println!(
            "{theorem} {power:?}: components finite {finite:?}, multiple {}, composite {}, implications hold {}",
            r.multiple.finite, r.composite.finite, r.implications_hold
        );
    }
    Ok(())
}

//! Ratio sweeps for the four boundedness statements on the shipped configurations.

use morrey_lab::harness::config::{ExperimentConfig, TheoremId};
use morrey_lab::harness::theorem::sweep;

fn main() -> morrey_lab::Result<()> {
    let configs = [
        (TheoremId::Czo, include_str!("../configs/theorem11.toml")),
        (TheoremId::CzoWeak, include_str!("../configs/theorem12.toml")),
        (TheoremId::Fractional, include_str!("../configs/theorem13.toml")),
        (TheoremId::Fractional, include_str!("../configs/theorem13-weighted.toml")),
        (TheoremId::FractionalWeak, include_str!("../configs/theorem14.toml")),
    ];
    for (theorem, text) in configs {
        let config = ExperimentConfig::from_toml_str(text)?;
        let r = sweep(&config, theorem)?;
        let ratios = r.ratios();
        println!(
            "{theorem}: weights {:?}, {} instances, ratio {:.4}..{:.4}, spread {:.3}{}, verdict {:?}",
            config.weights.power,
            ratios.len(),
            r.min,
            r.max,
            r.spread,
            r.truncation
                .as_ref()
                .map(|t| format!(", δ-halving change {:.3}", t.max_change))
                .unwrap_or_default(),
            r.verdict
        );
    }
    Ok(())
}

//! Chains of weight-class implications, checked on finite families.
//!
//! A constant counts as finite when it is finite on the configured family and
//! does not at least double under one refinement step.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::config::{ExperimentConfig, TheoremId};
use crate::harness::lemma::RefinementCheck;
use crate::harness::theorem::sweep;
use crate::lattice::{make_ball_family, BallFamily};
use crate::weights::{
    apq_constant, conjugate, muckenhoupt_constant, multi_ap_constant, multi_apq_constant, nu_weight,
    EstimateReport, NuMode, Trend, Weight,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantStage {
    pub name: String,
    pub refinement: RefinementCheck,
    pub finite: bool,
}

impl ConstantStage {
    fn new(name: String, coarse: EstimateReport, fine: EstimateReport) -> Self {
        let refinement = RefinementCheck::new(coarse.value, fine.value);
        let finite = coarse.value.is_finite() && refinement.trend != Trend::Unbounded;
        Self {
            name,
            refinement,
            finite,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub theorem: TheoremId,
    /// Per-component class constants.
    pub components: Vec<ConstantStage>,
    /// The multiple-weight constant.
    pub multiple: ConstantStage,
    /// The composite weight in its single-weight class.
    pub composite: ConstantStage,
    /// Fractional case: `A_{p,q}` against `A_{1+q/p'}` of `w^q`, per component.
    pub equivalences: Vec<(ConstantStage, ConstantStage, bool)>,
    pub sweep_spread: Option<f64>,
    pub sweep_passed: Option<bool>,
    pub implications_hold: bool,
    pub pass: bool,
}

fn both<F>(coarse: &BallFamily, fine: &BallFamily, name: String, f: F) -> Result<ConstantStage>
where
    F: Fn(&BallFamily) -> Result<EstimateReport>,
{
    Ok(ConstantStage::new(name, f(coarse)?, f(fine)?))
}

/// Checks: components finite ⇒ multiple constant finite ⇒ composite weight
/// finite in its class ⇒ sweep passes; in the fractional case also that the
/// two characterizations of `A_{p,q}` agree on finiteness.
pub fn check_corollaries(config: &ExperimentConfig, theorem: TheoremId, run_sweep: bool) -> Result<CorollaryReport> {
    config.validate(theorem)?;
    let lattice = config.build_lattice()?;
    let coarse = config.build_family(&lattice)?;
    let fine_lattice = lattice.refined();
    let fine = make_ball_family(&fine_lattice, &config.family.refined())?;
    let exps = config.exponent_vector()?;
    let ws = config.build_weights()?;
    let m = exps.m();

    let mut components = Vec::new();
    let mut equivalences = Vec::new();
    let (multiple, composite) = if theorem.is_fractional() {
        let fp = config.fractional_params()?;
        for (i, w) in ws.iter().enumerate() {
            let (p, q) = (exps.component(i), fp.q_k(i));
            let apq = both(&coarse, &fine, format!("A_({p},{q}) of w_{}", i + 1), |f| {
                apq_constant(w, p, q, f)
            })?;
            let wq = w.pow(q)?;
            let r = 1.0 + q / conjugate(p);
            let ap = both(&coarse, &fine, format!("A_{r} of w_{}^{q}", i + 1), |f| {
                muckenhoupt_constant(&wq, r, f)
            })?;
            let agree = apq.finite == ap.finite;
            components.push(apq.clone());
            equivalences.push((apq, ap, agree));
        }
        let q = fp.q();
        let multiple = both(&coarse, &fine, format!("A_(P,{q})"), |f| multi_apq_constant(&ws, &exps, q, f))?;
        let nu_q = |lat| -> Result<Weight> { nu_weight(&ws, &exps, NuMode::Fractional, lat)?.pow(q) };
        let (nc, nf) = (nu_q(&lattice)?, nu_q(&fine_lattice)?);
        let mq = m as f64 * q;
        let composite = ConstantStage::new(
            format!("A_{mq} of ν^{q}"),
            muckenhoupt_constant(&nc, mq, &coarse)?,
            muckenhoupt_constant(&nf, mq, &fine)?,
        );
        (multiple, composite)
    } else {
        for (i, w) in ws.iter().enumerate() {
            let p = exps.component(i);
            components.push(both(&coarse, &fine, format!("A_{p} of w_{}", i + 1), |f| {
                muckenhoupt_constant(w, p, f)
            })?);
        }
        let multiple = both(&coarse, &fine, "A_P".to_string(), |f| multi_ap_constant(&ws, &exps, f))?;
        let (nc, nf) = (
            nu_weight(&ws, &exps, NuMode::Czo, &lattice)?,
            nu_weight(&ws, &exps, NuMode::Czo, &fine_lattice)?,
        );
        let mp = m as f64 * exps.p();
        let composite = ConstantStage::new(
            format!("A_{mp} of ν"),
            muckenhoupt_constant(&nc, mp, &coarse)?,
            muckenhoupt_constant(&nf, mp, &fine)?,
        );
        (multiple, composite)
    };

    let (sweep_spread, sweep_passed) = if run_sweep {
        let r = sweep(config, theorem)?;
        (Some(r.spread), Some(r.passed()))
    } else {
        (None, None)
    };

    let singles = components.iter().all(|c| c.finite);
    let mut implications_hold = (!singles || multiple.finite) && (!multiple.finite || composite.finite);
    if let Some(passed) = sweep_passed {
        implications_hold &= !multiple.finite || passed;
    }
    implications_hold &= equivalences.iter().all(|(_, _, agree)| *agree);
    let pass = implications_hold && singles;

    Ok(CorollaryReport {
        theorem,
        components,
        multiple,
        composite,
        equivalences,
        sweep_spread,
        sweep_passed,
        implications_hold,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(power: Vec<f64>) -> ExperimentConfig {
        let mut c = ExperimentConfig::from_toml_str(
            r#"
            [lattice]
            half_width = 4.0
            points = 65
            [family]
            center_stride = 2
            base_radius = 0.125
            count = 5
            [operator]
            alpha = 0.5
            [exponents]
            p = [2.0, 2.0]
            kappa = 0.25
            [corpus]
            dilations = { min = 0.25, max = 1.0, count = 10 }
            "#,
        )
        .unwrap();
        c.weights.power = power;
        c
    }

    #[test]
    fn unit_weights_pass_every_stage() {
        let r = check_corollaries(&config(vec![]), TheoremId::Fractional, false).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.multiple.refinement.coarse - 1.0).abs() < 1e-10);
        let r = check_corollaries(&config(vec![]), TheoremId::Czo, false).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn windowed_power_weights_pass() {
        let r = check_corollaries(&config(vec![0.2, -0.1]), TheoremId::Fractional, false).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn apq_equivalence_agrees_outside_the_window() {
        // a = 0.6 > 1/p' = 1/2: both characterizations diverge at the origin
        let r = check_corollaries(&config(vec![0.6, 0.0]), TheoremId::Fractional, false).unwrap();
        assert!(r.equivalences.iter().all(|(_, _, agree)| *agree), "{r:?}");
        assert!(!r.equivalences[0].0.finite);
    }
}

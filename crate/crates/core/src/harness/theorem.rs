//! Ratio experiments for the boundedness statements.
//!
//! For every instance `f = (f_1, ..., f_m)` the ratio
//! `R = ‖Op(f)‖_left / Π ‖f_i‖_right` is computed with the norm pairing of
//! the chosen statement. A bounded operator keeps `R` within a bounded band
//! over the corpus, so a sweep passes when `max R / min R` stays below the
//! configured spread.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, TheoremId};
use crate::harness::corpus::{instance_inputs, sweep_instances, Instance};
use crate::lattice::{BallFamily, GridFunction, Lattice};
use crate::operators::{apply_czo, apply_fractional, KernelSpec, TruncationPolicy};
use crate::spaces::{morrey_norm, two_weight_morrey_norm, weak_morrey_norm, MorreyParams};
use crate::weights::{nu_weight, FractionalParams, NuMode, Weight};

enum Operator {
    Czo {
        kernel: KernelSpec,
        truncation: TruncationPolicy,
        check_half: bool,
    },
    Fractional(FractionalParams),
}

/// Right-hand norm of one input: `(u, v, params)` for the two-weight Morrey
/// norm (`u = v` in the singular-integral case).
struct InputNorm {
    u: Weight,
    v: Weight,
    params: MorreyParams,
}

/// A configuration resolved into lattice, family, operator and norm data.
pub struct Experiment {
    pub theorem: TheoremId,
    pub lattice: Lattice,
    pub family: BallFamily,
    offsets: Vec<f64>,
    operator: Operator,
    output_weight: Weight,
    output_params: MorreyParams,
    inputs: Vec<InputNorm>,
    pub warnings: Vec<String>,
}

/// Norms of one evaluated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub left_strong: f64,
    pub left_weak: f64,
    pub right: Vec<f64>,
    /// Strong-left ratio.
    pub ratio_strong: f64,
    /// Weak-left ratio.
    pub ratio_weak: f64,
    /// Ratio of the statement under test recomputed with half the
    /// truncation radius.
    pub ratio_half_delta: Option<f64>,
}

impl InstanceOutcome {
    pub fn ratio(&self, theorem: TheoremId) -> f64 {
        if theorem.is_weak() {
            self.ratio_weak
        } else {
            self.ratio_strong
        }
    }

    /// `|R(δ/2) - R(δ)| / R(δ)` for the statement under test.
    pub fn truncation_change(&self, theorem: TheoremId) -> Option<f64> {
        let r = self.ratio(theorem);
        self.ratio_half_delta.map(|h| (h - r).abs() / r)
    }
}

impl Experiment {
    pub fn new(config: &ExperimentConfig, theorem: TheoremId) -> Result<Self> {
        let warnings = config.validate(theorem)?;
        let lattice = config.build_lattice()?;
        let family = config.build_family(&lattice)?;
        let exps = config.exponent_vector()?;
        let weights = config.build_weights()?;
        let kappa = config.exponents.kappa;
        let relaxed = !warnings.is_empty();
        let params = |p: f64, k: f64| {
            if relaxed {
                MorreyParams::any_kappa(p, k)
            } else {
                MorreyParams::new(p, k)
            }
        };

        let (operator, output_weight, output_params, inputs) = if theorem.is_fractional() {
            let fp = config.fractional_params()?;
            let p = exps.p();
            let q = fp.q();
            let nu = nu_weight(&weights, &exps, NuMode::Fractional, &lattice)?;
            let inputs = weights
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let pi = exps.component(i);
                    let qi = fp.q_k(i);
                    Ok(InputNorm {
                        u: w.pow(pi)?,
                        v: w.pow(qi)?,
                        params: params(pi, kappa * pi * q / (p * qi))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (
                Operator::Fractional(fp),
                nu.pow(q)?,
                params(q, kappa * q / p)?,
                inputs,
            )
        } else {
            let nu = nu_weight(&weights, &exps, NuMode::Czo, &lattice)?;
            let inputs = weights
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    Ok(InputNorm {
                        u: w.clone(),
                        v: w.clone(),
                        params: params(exps.component(i), kappa)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (
                Operator::Czo {
                    kernel: config.build_kernel()?,
                    truncation: config.truncation(&lattice)?,
                    check_half: config.operator.check_truncation,
                },
                nu,
                params(exps.p(), kappa)?,
                inputs,
            )
        };

        Ok(Self {
            theorem,
            lattice,
            family,
            offsets: config.offsets(),
            operator,
            output_weight,
            output_params,
            inputs,
            warnings,
        })
    }

    pub fn inputs_for(&self, instance: &Instance) -> Result<Vec<GridFunction>> {
        instance_inputs(&self.lattice, &self.offsets, instance)
    }

    /// The operator applied to `fs` (with the configured truncation).
    pub fn apply(&self, fs: &[GridFunction]) -> Result<GridFunction> {
        match &self.operator {
            Operator::Czo {
                kernel, truncation, ..
            } => apply_czo(kernel, fs, *truncation),
            Operator::Fractional(fp) => apply_fractional(fp, fs),
        }
    }

    fn right_norms(&self, fs: &[GridFunction]) -> Result<Vec<f64>> {
        fs.iter()
            .zip(&self.inputs)
            .map(|(f, n)| Ok(two_weight_morrey_norm(f, &n.u, &n.v, n.params, &self.family)?.value))
            .collect()
    }

    fn left_norms(&self, out: &GridFunction) -> Result<(f64, f64)> {
        let strong = morrey_norm(out, &self.output_weight, self.output_params, &self.family)?.value;
        let weak = weak_morrey_norm(out, &self.output_weight, self.output_params, &self.family)?.value;
        Ok((strong, weak))
    }

    /// Evaluates both left norms, the right norms and the ratios.
    pub fn evaluate(&self, fs: &[GridFunction]) -> Result<InstanceOutcome> {
        let right = self.right_norms(fs)?;
        let denominator: f64 = right.iter().product();
        if !(denominator > 0.0) || !denominator.is_finite() {
            return Err(Error::RejectedInstance(format!(
                "product of input norms is {denominator}"
            )));
        }
        let out = self.apply(fs)?;
        let (left_strong, left_weak) = self.left_norms(&out)?;
        let ratio_half_delta = match &self.operator {
            Operator::Czo {
                kernel,
                truncation,
                check_half: true,
            } => {
                let half = TruncationPolicy::new(0.5 * truncation.delta(), &self.lattice)?;
                let out = apply_czo(kernel, fs, half)?;
                let (s, w) = self.left_norms(&out)?;
                Some(if self.theorem.is_weak() { w } else { s } / denominator)
            }
            _ => None,
        };
        Ok(InstanceOutcome {
            left_strong,
            left_weak,
            ratio_strong: left_strong / denominator,
            ratio_weak: left_weak / denominator,
            right,
            ratio_half_delta,
        })
    }
}

/// `R` for one instance of the configured corpus.
pub fn theorem_ratio(config: &ExperimentConfig, theorem: TheoremId, instance: &Instance) -> Result<f64> {
    let exp = Experiment::new(config, theorem)?;
    let fs = exp.inputs_for(instance)?;
    Ok(exp.evaluate(&fs)?.ratio(theorem))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub instance: Instance,
    pub outcome: Option<InstanceOutcome>,
    pub rejected: Option<String>,
}

impl SweepRow {
    pub fn ratio(&self, theorem: TheoremId) -> Option<f64> {
        self.outcome.as_ref().map(|o| o.ratio(theorem))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationSummary {
    pub max_change: f64,
    pub worst_instance: usize,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub theorem: TheoremId,
    pub rows: Vec<SweepRow>,
    pub max: f64,
    pub min: f64,
    pub spread: f64,
    pub argmax: Option<usize>,
    pub argmin: Option<usize>,
    pub threshold: f64,
    pub spread_pass: bool,
    pub truncation: Option<TruncationSummary>,
    /// `None` when a hypothesis is violated: the spread is reported without
    /// a verdict.
    pub verdict: Option<bool>,
    pub warnings: Vec<String>,
}

impl RatioReport {
    pub fn passed(&self) -> bool {
        self.verdict == Some(true)
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.ratio(self.theorem)).collect()
    }
}

/// Runs the whole corpus and summarizes the ratio band.
pub fn sweep(config: &ExperimentConfig, theorem: TheoremId) -> Result<RatioReport> {
    let exp = Experiment::new(config, theorem)?;
    sweep_experiment(&exp, &sweep_instances(config), config.tolerance.spread, config.tolerance.truncation_change)
}

pub fn sweep_experiment(
    exp: &Experiment,
    instances: &[Instance],
    threshold: f64,
    truncation_threshold: f64,
) -> Result<RatioReport> {
    let theorem = exp.theorem;
    let rows: Vec<SweepRow> = instances
        .par_iter()
        .map(|inst| {
            let result = exp.inputs_for(inst).and_then(|fs| exp.evaluate(&fs));
            match result {
                Ok(outcome) => SweepRow {
                    instance: *inst,
                    outcome: Some(outcome),
                    rejected: None,
                },
                Err(e) => SweepRow {
                    instance: *inst,
                    outcome: None,
                    rejected: Some(e.to_string()),
                },
            }
        })
        .collect();

    let mut warnings = exp.warnings.clone();
    for r in &rows {
        if let Some(reason) = &r.rejected {
            warnings.push(format!("instance {} rejected: {reason}", r.instance.id));
        }
    }

    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    let (mut argmax, mut argmin) = (None, None);
    for r in &rows {
        if let Some(v) = r.ratio(theorem) {
            if v > max {
                max = v;
                argmax = Some(r.instance.id);
            }
            if v < min {
                min = v;
                argmin = Some(r.instance.id);
            }
        }
    }
    let spread = if argmax.is_some() && min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    };
    let spread_pass = spread.is_finite() && spread <= threshold;

    let truncation = rows
        .iter()
        .filter_map(|r| {
            let c = r.outcome.as_ref()?.truncation_change(theorem)?;
            Some((c, r.instance.id))
        })
        .fold(None, |best: Option<(f64, usize)>, (c, id)| match best {
            Some((b, _)) if b >= c => best,
            _ => Some((c, id)),
        })
        .map(|(max_change, worst_instance)| TruncationSummary {
            max_change,
            worst_instance,
            threshold: truncation_threshold,
            pass: max_change <= truncation_threshold,
        });

    let verdict = if exp.warnings.is_empty() {
        Some(spread_pass && truncation.as_ref().is_none_or(|t| t.pass) && argmax.is_some())
    } else {
        None
    };

    Ok(RatioReport {
        theorem,
        rows,
        max,
        min,
        spread,
        argmax,
        argmin,
        threshold,
        spread_pass,
        truncation,
        verdict,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> ExperimentConfig {
        ExperimentConfig::from_toml_str(
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
        .unwrap()
    }

    #[test]
    fn amplitude_scaling_leaves_ratio_unchanged() {
        let c = config();
        let base = Instance {
            id: 0,
            translation: 0.0,
            dilation: 0.5,
            amplitude: 1.0,
        };
        let scaled = Instance {
            amplitude: -7.5,
            ..base
        };
        let a = theorem_ratio(&c, TheoremId::Fractional, &base).unwrap();
        let b = theorem_ratio(&c, TheoremId::Fractional, &scaled).unwrap();
        assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn identical_instances_have_unit_spread() {
        let mut c = config();
        c.corpus.dilations = crate::harness::config::Dilations::List(vec![0.5; 10]);
        let r = sweep(&c, TheoremId::Fractional).unwrap();
        assert_eq!(r.spread, 1.0);
        assert_eq!(r.verdict, Some(true));
    }

    #[test]
    fn broken_kappa_reports_without_verdict() {
        let mut c = config();
        c.exponents.kappa = 0.7;
        let r = sweep(&c, TheoremId::Fractional).unwrap();
        assert!(r.verdict.is_none());
        assert!(!r.warnings.is_empty());
        assert!(r.spread.is_finite());
    }
}

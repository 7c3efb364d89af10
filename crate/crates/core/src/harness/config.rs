//! Experiment configuration (TOML) and its validation.
//!
//! Structural problems (bad lattice, wrong arity, supports leaving
//! `[-L/2, L/2]^n`, ...) are errors. Violated theorem hypotheses (the `κ`
//! window, weight exponents outside the power-weight windows) are warnings:
//! the run proceeds but no pass/fail verdict is issued.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{make_ball_family, BallFamily, FamilySpec, Lattice};
use crate::operators::{KernelKind, KernelSpec, TruncationPolicy};
use crate::weights::{conjugate, ExponentVector, FractionalParams, Weight};

/// Which boundedness statement a sweep exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// Singular integral, strong Morrey norm on the left.
    #[serde(rename = "1.1")]
    Czo,
    /// Singular integral, weak Morrey norm on the left.
    #[serde(rename = "1.2")]
    CzoWeak,
    /// Fractional integral, strong Morrey norm on the left.
    #[serde(rename = "1.3")]
    Fractional,
    /// Fractional integral, weak Morrey norm on the left.
    #[serde(rename = "1.4")]
    FractionalWeak,
}

impl TheoremId {
    pub const ALL: [Self; 4] = [Self::Czo, Self::CzoWeak, Self::Fractional, Self::FractionalWeak];

    pub fn is_fractional(self) -> bool {
        matches!(self, Self::Fractional | Self::FractionalWeak)
    }

    pub fn is_weak(self) -> bool {
        matches!(self, Self::CzoWeak | Self::FractionalWeak)
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Czo => "1.1",
            Self::CzoWeak => "1.2",
            Self::Fractional => "1.3",
            Self::FractionalWeak => "1.4",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown theorem {s:?}; expected 1.1, 1.2, 1.3 or 1.4")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub half_width: f64,
    pub points: usize,
}

fn default_dim() -> usize {
    1
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelTag {
    #[default]
    HomogeneousOdd,
    FractionalSize,
    AngularStep,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    #[serde(default)]
    pub kernel: KernelTag,
    /// Truncation radius in lattice spacings.
    #[serde(default = "default_truncation_cells")]
    pub truncation_cells: f64,
    /// Re-run every singular-integral instance with half the truncation
    /// radius and report the relative change of the ratio.
    #[serde(default)]
    pub check_truncation: bool,
    /// Order of the fractional integral.
    pub alpha: Option<f64>,
}

fn default_truncation_cells() -> f64 {
    2.0
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            kernel: KernelTag::default(),
            truncation_cells: default_truncation_cells(),
            check_truncation: false,
            alpha: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentConfig {
    pub p: Vec<f64>,
    pub kappa: f64,
}

/// Power weights `|x|^{a_i}`; an empty list means `w_i ≡ 1`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    #[serde(default)]
    pub power: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Dilations {
    List(Vec<f64>),
    Geometric { min: f64, max: f64, count: usize },
}

impl Dilations {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::List(v) => v.clone(),
            Self::Geometric { min, max, count } => match count {
                0 => Vec::new(),
                1 => vec![*min],
                _ => (0..*count)
                    .map(|k| min * (max / min).powf(k as f64 / (*count - 1) as f64))
                    .collect(),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BumpShape {
    /// `(1 - |x/s|²)³` on `|x| < s`.
    #[default]
    Poly,
}

/// Instances are the cross product translations × dilations × amplitudes.
/// Input `i` is a bump of scale `s` centred at `x0 + offsets[i]·s` along the
/// first axis; the amplitude multiplies the first input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    #[serde(default)]
    pub shape: BumpShape,
    #[serde(default = "default_translations")]
    pub translations: Vec<f64>,
    pub dilations: Dilations,
    #[serde(default = "default_amplitudes")]
    pub amplitudes: Vec<f64>,
    /// Relative offsets of the bump centres; defaults to evenly spread
    /// offsets in `[-0.25, 0.25]`.
    #[serde(default)]
    pub offsets: Option<Vec<f64>>,
}

fn default_translations() -> Vec<f64> {
    vec![0.0]
}

fn default_amplitudes() -> Vec<f64> {
    vec![1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    /// Maximal max/min ratio spread of a passing sweep.
    pub spread: f64,
    /// Maximal relative ratio change when the truncation radius is halved.
    pub truncation_change: f64,
    /// Maximal relative change of a constant under one refinement step.
    pub refinement: f64,
    /// Tolerance for algebraic identities.
    pub identity: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            spread: 10.0,
            truncation_change: 0.2,
            refinement: 0.05,
            identity: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Default theorem for `verify theorem` when none is given.
    #[serde(default)]
    pub theorem: Option<TheoremId>,
    #[serde(default)]
    pub seed: u64,
    pub lattice: LatticeConfig,
    pub family: FamilySpec,
    #[serde(default)]
    pub operator: OperatorConfig,
    pub exponents: ExponentConfig,
    #[serde(default)]
    pub weights: WeightConfig,
    pub corpus: CorpusConfig,
    #[serde(default)]
    pub tolerance: ToleranceConfig,
}

/// Minimal number of instances for a sweep.
pub const MIN_INSTANCES: usize = 10;

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn m(&self) -> usize {
        self.exponents.p.len()
    }

    pub fn build_lattice(&self) -> Result<Lattice> {
        Lattice::new(self.lattice.dim, self.lattice.half_width, self.lattice.points)
    }

    pub fn build_family(&self, lattice: &Lattice) -> Result<BallFamily> {
        make_ball_family(lattice, &self.family)
    }

    pub fn exponent_vector(&self) -> Result<ExponentVector> {
        ExponentVector::new(self.exponents.p.clone())
    }

    pub fn fractional_params(&self) -> Result<FractionalParams> {
        let alpha = self
            .operator
            .alpha
            .ok_or_else(|| Error::Config("fractional experiments need operator.alpha".into()))?;
        FractionalParams::new(self.exponent_vector()?, alpha, self.lattice.dim)
    }

    pub fn build_weights(&self) -> Result<Vec<Weight>> {
        let m = self.m();
        let n = self.lattice.dim;
        if self.weights.power.is_empty() {
            return Ok(vec![Weight::unit(n); m]);
        }
        if self.weights.power.len() != m {
            return Err(Error::Arity {
                expected: m,
                got: self.weights.power.len(),
            });
        }
        self.weights.power.iter().map(|&a| Weight::power(n, a)).collect()
    }

    pub fn build_kernel(&self) -> Result<KernelSpec> {
        let m = self.m();
        let n = self.lattice.dim;
        match self.operator.kernel {
            KernelTag::HomogeneousOdd => {
                if (m, n) != (2, 1) {
                    return Err(Error::Config(
                        "homogeneous-odd kernel needs m = 2 and dim = 1".into(),
                    ));
                }
                Ok(KernelSpec::homogeneous_odd())
            }
            KernelTag::AngularStep => {
                if (m, n) != (2, 1) {
                    return Err(Error::Config("angular-step kernel needs m = 2 and dim = 1".into()));
                }
                Ok(KernelSpec::angular_step())
            }
            KernelTag::FractionalSize => KernelSpec::fractional_size(m, n),
            KernelTag::Zero => KernelSpec::new(m, n, KernelKind::Zero, 0.0, 1.0),
        }
    }

    pub fn truncation(&self, lattice: &Lattice) -> Result<TruncationPolicy> {
        TruncationPolicy::in_cells(self.operator.truncation_cells, lattice)
    }

    pub fn offsets(&self) -> Vec<f64> {
        let m = self.m();
        self.corpus.offsets.clone().unwrap_or_else(|| {
            (0..m)
                .map(|i| {
                    if m == 1 {
                        0.0
                    } else {
                        -0.25 + 0.5 * i as f64 / (m - 1) as f64
                    }
                })
                .collect()
        })
    }

    /// Structural validation for `theorem`; returns the hypothesis warnings.
    pub fn validate(&self, theorem: TheoremId) -> Result<Vec<String>> {
        let lattice = self.build_lattice()?;
        self.build_family(&lattice)?;
        let exps = self.exponent_vector()?;
        self.build_weights()?;
        if !(self.exponents.kappa > 0.0) || !self.exponents.kappa.is_finite() {
            return Err(Error::Config(format!(
                "κ must be positive, got {}",
                self.exponents.kappa
            )));
        }
        if theorem.is_fractional() {
            self.fractional_params()?;
        } else {
            self.build_kernel()?;
            self.truncation(&lattice)?;
        }
        self.validate_corpus(&lattice)?;
        Ok(self.hypothesis_warnings(theorem, &exps))
    }

    fn validate_corpus(&self, lattice: &Lattice) -> Result<()> {
        let c = &self.corpus;
        let dilations = c.dilations.values();
        let count = c.translations.len() * dilations.len() * c.amplitudes.len();
        if count < MIN_INSTANCES {
            return Err(Error::Config(format!(
                "a sweep needs at least {MIN_INSTANCES} instances, the corpus has {count}"
            )));
        }
        if let Some(s) = dilations.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return Err(Error::Config(format!("dilations must be positive, got {s}")));
        }
        if let Some(a) = c.amplitudes.iter().find(|a| **a == 0.0 || !a.is_finite()) {
            return Err(Error::Config(format!("amplitudes must be nonzero, got {a}")));
        }
        let offsets = self.offsets();
        if offsets.len() != self.m() {
            return Err(Error::Arity {
                expected: self.m(),
                got: offsets.len(),
            });
        }
        let limit = 0.5 * lattice.half_width() * (1.0 + 1e-12);
        let widest = offsets.iter().fold(0.0f64, |a, o| a.max(o.abs()));
        for &x0 in &c.translations {
            for &s in &dilations {
                let reach = x0.abs() + widest * s + s;
                if reach > limit || s > limit {
                    return Err(Error::Config(format!(
                        "bump at translation {x0}, scale {s} reaches {reach}, outside [-L/2, L/2] = [-{l}, {l}]",
                        l = 0.5 * lattice.half_width()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Hypotheses of `theorem` that this configuration does not meet. The weak
    /// statements are also accepted with every `p_i > 1`, where they follow
    /// from the strong ones.
    pub fn hypothesis_warnings(&self, theorem: TheoremId, exps: &ExponentVector) -> Vec<String> {
        let mut warnings = Vec::new();
        let kappa = self.exponents.kappa;
        let n = self.lattice.dim as f64;
        let p = exps.p();
        let ps = exps.components();
        let powers = if self.weights.power.is_empty() {
            vec![0.0; ps.len()]
        } else {
            self.weights.power.clone()
        };
        match theorem {
            TheoremId::Czo | TheoremId::CzoWeak => {
                if kappa >= 1.0 {
                    warnings.push(format!("κ = {kappa} lies outside (0, 1)"));
                }
                if theorem == TheoremId::Czo && ps.iter().any(|&pi| pi <= 1.0) {
                    warnings.push("the strong bound needs every p_i > 1".into());
                }
                for (i, (&a, &pi)) in powers.iter().zip(ps).enumerate() {
                    let upper = n * (pi - 1.0);
                    let inside = a > -n && if pi == 1.0 { a <= 0.0 } else { a < upper };
                    if !inside {
                        warnings.push(format!(
                            "w_{} = |x|^{a} is outside the A_{pi} window (-{n}, {upper})",
                            i + 1
                        ));
                    }
                }
            }
            TheoremId::Fractional | TheoremId::FractionalWeak => {
                let Ok(fp) = self.fractional_params() else {
                    return warnings;
                };
                let q = fp.q();
                if kappa >= p / q {
                    warnings.push(format!("κ = {kappa} is not below p/q = {}", p / q));
                }
                if theorem == TheoremId::Fractional && ps.iter().any(|&pi| pi <= 1.0) {
                    warnings.push("the strong bound needs every p_i > 1".into());
                }
                for (i, (&a, &pi)) in powers.iter().zip(ps).enumerate() {
                    let qi = fp.q_k(i);
                    let lower = -n / qi;
                    let upper = n / conjugate(pi);
                    let inside = a > lower && if pi == 1.0 { a <= 0.0 } else { a < upper };
                    if !inside {
                        warnings.push(format!(
                            "w_{} = |x|^{a} is outside the A_({pi},{qi}) window ({lower}, {upper})",
                            i + 1
                        ));
                    }
                }
            }
        }
        warnings
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const THEOREM13: &str = r#"
        seed = 1
        [lattice]
        half_width = 4.0
        points = 129
        [family]
        center_stride = 2
        base_radius = 0.0625
        count = 7
        [operator]
        alpha = 0.5
        [exponents]
        p = [2.0, 2.0]
        kappa = 0.25
        [corpus]
        dilations = { min = 0.016, max = 1.6, count = 20 }
    "#;

    #[test]
    fn parses_and_validates() {
        let c = ExperimentConfig::from_toml_str(THEOREM13).unwrap();
        assert!(c.validate(TheoremId::Fractional).unwrap().is_empty());
        assert_eq!(c.offsets(), vec![-0.25, 0.25]);
        let d = c.corpus.dilations.values();
        assert_eq!(d.len(), 20);
        assert!((d[19] / d[0] - 100.0).abs() < 1e-9);
        let back = ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn kappa_window_flags_exactly_the_bad_configs() {
        let mut c = ExperimentConfig::from_toml_str(THEOREM13).unwrap();
        // p/q = 1/2 here
        for (kappa, flagged) in [(0.25, false), (0.49, false), (0.5, true), (0.8, true)] {
            c.exponents.kappa = kappa;
            let w = c.validate(TheoremId::Fractional).unwrap();
            assert_eq!(w.iter().any(|m| m.contains("κ")), flagged, "κ = {kappa}");
        }
        c.operator.alpha = None;
        c.operator.kernel = KernelTag::HomogeneousOdd;
        for (kappa, flagged) in [(0.5, false), (0.99, false), (1.0, true), (1.5, true)] {
            c.exponents.kappa = kappa;
            let w = c.validate(TheoremId::Czo).unwrap();
            assert_eq!(w.iter().any(|m| m.contains("κ")), flagged, "κ = {kappa}");
        }
    }

    #[test]
    fn weight_windows() {
        let mut c = ExperimentConfig::from_toml_str(THEOREM13).unwrap();
        c.weights.power = vec![0.2, -0.1];
        assert!(c.validate(TheoremId::Fractional).unwrap().is_empty());
        c.weights.power = vec![0.6, -0.1];
        assert_eq!(c.validate(TheoremId::Fractional).unwrap().len(), 1);
        c.weights.power = vec![0.2, -0.3];
        assert_eq!(c.validate(TheoremId::Fractional).unwrap().len(), 1);
        c.weights.power = vec![-1.0, 0.0];
        assert!(c.validate(TheoremId::Fractional).is_err());
    }

    #[test]
    fn structural_errors() {
        let mut c = ExperimentConfig::from_toml_str(THEOREM13).unwrap();
        c.corpus.dilations = Dilations::List(vec![0.5; 5]);
        assert!(c.validate(TheoremId::Fractional).is_err());
        let mut c = ExperimentConfig::from_toml_str(THEOREM13).unwrap();
        c.corpus.dilations = Dilations::Geometric { min: 0.1, max: 2.0, count: 12 };
        assert!(c.validate(TheoremId::Fractional).is_err());
        let mut c = ExperimentConfig::from_toml_str(THEOREM13).unwrap();
        c.lattice.points = 128;
        assert!(c.validate(TheoremId::Fractional).is_err());
        let mut c = ExperimentConfig::from_toml_str(THEOREM13).unwrap();
        c.operator.alpha = Some(3.0);
        assert!(c.validate(TheoremId::Fractional).is_err());
        assert!(ExperimentConfig::from_toml_str("[lattice]\nhalf_width = 1.0").is_err());
        assert!("2.1".parse::<TheoremId>().is_err());
        assert_eq!("1.4".parse::<TheoremId>().unwrap(), TheoremId::FractionalWeak);
    }
}

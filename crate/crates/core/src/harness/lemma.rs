//! Lemma-level checks: the product inequality for composite weights and the
//! pointwise tail bounds behind the Morrey estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::corpus::TailInstance;
use crate::lattice::{make_ball_family, split_at_ball, Ball, BallFamily, FamilySpec, GridFunction, Lattice};
use crate::operators::{apply_czo_at, apply_fractional_at, tail_majorant, KernelSpec, TailMode, TruncationPolicy};
use crate::weights::{Density, ExponentVector, FractionalParams, Route, Trend, Weight};

/// Exponent data of the product lemma.
#[derive(Clone, Debug, PartialEq)]
pub enum ProductExponents {
    /// `Π (∫_B w_i)^{p/p_i}` against `∫_B Π w_i^{p/p_i}`.
    Czo(ExponentVector),
    /// `Π (∫_B w_i^{q_i})^{q/q_i}` against `∫_B (Π w_i)^q`.
    Fractional(FractionalParams),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductLemmaReport {
    /// `max_B LHS/RHS`.
    pub constant: f64,
    pub extremal: Option<Ball>,
    /// `max_B RHS/LHS`; Hölder's inequality keeps it at most 1.
    pub holder_ratio: f64,
    pub holder_holds: bool,
    pub balls: usize,
    pub skipped: usize,
}

/// Relative slack allowed on the Hölder direction.
pub const HOLDER_SLACK: f64 = 1e-8;

pub fn check_product_lemma(
    ws: &[Weight],
    exponents: &ProductExponents,
    family: &BallFamily,
) -> Result<ProductLemmaReport> {
    let m = match exponents {
        ProductExponents::Czo(e) => e.m(),
        ProductExponents::Fractional(fp) => fp.m(),
    };
    if ws.len() != m {
        return Err(Error::Arity {
            expected: m,
            got: ws.len(),
        });
    }
    let refs: Vec<&Weight> = ws.iter().collect();
    let route = Route::for_weights(&refs, family.lattice());
    let densities = ws.iter().map(|w| route.density(w)).collect::<Result<Vec<_>>>()?;

    // factor i: (∫ d_i^{s_i})^{t_i}; right side ∫ Π d_i^{r_i}
    let (powers, outer, inner): (Vec<f64>, Vec<f64>, Vec<f64>) = match exponents {
        ProductExponents::Czo(e) => {
            let p = e.p();
            let t: Vec<f64> = e.components().iter().map(|pi| p / pi).collect();
            (vec![1.0; m], t.clone(), t)
        }
        ProductExponents::Fractional(fp) => {
            let q = fp.q();
            let qs = fp.q_components();
            (qs.clone(), qs.iter().map(|qi| q / qi).collect(), vec![q; m])
        }
    };
    let factors: Vec<Density> = densities.iter().zip(&powers).map(|(d, &s)| d.powf(s)).collect();
    let product = Density::product(&densities, &inner);

    let mut report = ProductLemmaReport {
        constant: 0.0,
        extremal: None,
        holder_ratio: 0.0,
        holder_holds: true,
        balls: 0,
        skipped: 0,
    };
    for ball in family {
        let Some(rhs) = route.integral(&product, ball) else {
            report.skipped += 1;
            continue;
        };
        let mut lhs = 1.0;
        for (f, &t) in factors.iter().zip(&outer) {
            match route.integral(f, ball) {
                Some(v) => lhs *= v.powf(t),
                None => lhs = f64::NAN,
            }
        }
        if lhs.is_nan() {
            report.skipped += 1;
            continue;
        }
        report.balls += 1;
        let c = lhs / rhs;
        if c > report.constant || report.extremal.is_none() {
            report.constant = c;
            report.extremal = Some(ball.clone());
        }
        report.holder_ratio = report.holder_ratio.max(rhs / lhs);
        if rhs > lhs * (1.0 + HOLDER_SLACK) {
            report.holder_holds = false;
        }
    }
    if report.balls == 0 {
        return Err(Error::InvalidFamily("no ball of the family contains a lattice point".into()));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementCheck {
    pub coarse: f64,
    pub fine: f64,
    pub relative_change: f64,
    pub trend: Trend,
}

impl RefinementCheck {
    pub fn new(coarse: f64, fine: f64) -> Self {
        Self {
            coarse,
            fine,
            relative_change: ((fine - coarse) / coarse).abs(),
            trend: Trend::classify(coarse, fine),
        }
    }
}

/// The product-lemma constant on `(lattice, spec)` and after one refinement
/// step (`N → 2N - 1`, stride doubled, base radius halved, one more radius).
/// Sampled weights are not refinable; pass power weights.
pub fn product_lemma_refinement(
    ws: &[Weight],
    exponents: &ProductExponents,
    lattice: &Lattice,
    spec: &FamilySpec,
) -> Result<RefinementCheck> {
    let coarse = check_product_lemma(ws, exponents, &make_ball_family(lattice, spec)?)?;
    let fine_lattice = lattice.refined();
    let fine = check_product_lemma(ws, exponents, &make_ball_family(&fine_lattice, &spec.refined())?)?;
    Ok(RefinementCheck::new(coarse.constant, fine.constant))
}

// ---------------------------------------------------------------------------
// pointwise tail bounds

/// Which parts of the split inputs enter the operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailCase {
    /// Every input replaced by its part outside `2B`.
    AllFar,
    /// Input `far` replaced by its outer part, the others by their parts
    /// inside `2B`.
    Mixed { far: usize },
}

/// Operator whose tails are bounded.
#[derive(Clone, Debug)]
pub enum TailOperator {
    Czo { kernel: KernelSpec, truncation: TruncationPolicy },
    Fractional(FractionalParams),
}

impl TailOperator {
    fn mode(&self) -> TailMode {
        match self {
            Self::Czo { .. } => TailMode::Czo,
            Self::Fractional(fp) => TailMode::Fractional { alpha: fp.alpha() },
        }
    }

    fn apply_at(&self, fs: &[GridFunction], nodes: &[usize]) -> Result<Vec<f64>> {
        match self {
            Self::Czo { kernel, truncation } => apply_czo_at(kernel, fs, *truncation, nodes),
            Self::Fractional(fp) => apply_fractional_at(fp, fs, nodes),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Czo { .. } => "czo",
            Self::Fractional(_) => "fractional",
        }
    }
}

/// Number of dyadic annuli whose outermost ball `2^{J+1}B` covers the whole
/// domain from any centre inside it.
pub fn covering_annuli(lattice: &Lattice, ball: &Ball) -> usize {
    let diameter = 2.0 * lattice.half_width() * (lattice.dim() as f64).sqrt();
    let mut j = 1;
    while 2f64.powi(j as i32 + 1) * ball.radius() < 2.0 * diameter {
        j += 1;
    }
    j
}

/// `(|Op(parts)(x)|, majorant)` for every node `x` of the ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailSample {
    pub node: usize,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn tail_samples(op: &TailOperator, instance: &TailInstance, case: TailCase) -> Result<Vec<TailSample>> {
    let fs = &instance.inputs;
    let lattice = fs
        .first()
        .ok_or(Error::Arity { expected: 1, got: 0 })?
        .lattice();
    let parts: Vec<GridFunction> = fs
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let (near, far) = split_at_ball(f, &instance.ball);
            match case {
                TailCase::AllFar => far,
                TailCase::Mixed { far: k } if k == i => far,
                TailCase::Mixed { .. } => near,
            }
        })
        .collect();
    if let TailCase::Mixed { far } = case {
        if far >= fs.len() {
            return Err(Error::Config(format!("input {far} does not exist")));
        }
    }
    let nodes = lattice.nodes_in_ball(&instance.ball);
    let annuli = covering_annuli(lattice, &instance.ball);
    let rhs = tail_majorant(fs, &instance.ball, annuli, op.mode())?;
    let values = op.apply_at(&parts, &nodes)?;
    Ok(nodes
        .into_iter()
        .zip(values)
        .map(|(node, v)| TailSample {
            node,
            lhs: v.abs(),
            rhs,
        })
        .collect())
}

/// Held-out samples may exceed the calibrated constant by this factor.
pub const TAIL_HOLDOUT_FACTOR: f64 = 1.2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailCaseReport {
    pub operator: String,
    pub case: TailCase,
    /// `max LHS/RHS` over the calibration corpus.
    pub constant: f64,
    /// `max LHS/RHS` over the held-out corpus.
    pub held_out_max: f64,
    pub held_out_samples: usize,
    pub violations: usize,
    pub pass: bool,
}

fn max_ratio(samples: &[TailSample]) -> f64 {
    samples
        .iter()
        .filter(|s| s.rhs > 0.0)
        .map(|s| s.lhs / s.rhs)
        .fold(0.0, f64::max)
}

/// Calibrates `C_tail` for `case` and checks the held-out corpus against
/// `1.2·C_tail`.
pub fn calibrate_tail(
    op: &TailOperator,
    case: TailCase,
    calibration: &[TailInstance],
    held_out: &[TailInstance],
) -> Result<TailCaseReport> {
    let mut cal = Vec::new();
    for inst in calibration {
        cal.extend(tail_samples(op, inst, case)?);
    }
    let constant = max_ratio(&cal);
    let mut held = Vec::new();
    for inst in held_out {
        held.extend(tail_samples(op, inst, case)?);
    }
    let bound = TAIL_HOLDOUT_FACTOR * constant;
    let violations = held
        .iter()
        .filter(|s| s.lhs > bound * s.rhs + 1e-14 * s.lhs.max(1e-300))
        .count();
    Ok(TailCaseReport {
        operator: op.name().to_string(),
        case,
        constant,
        held_out_max: max_ratio(&held),
        held_out_samples: held.len(),
        violations,
        pass: violations == 0 && constant.is_finite() && !held.is_empty(),
    })
}

/// All-far and single-far mixed cases for an `m`-linear operator.
pub fn tail_cases(m: usize) -> Vec<TailCase> {
    std::iter::once(TailCase::AllFar)
        .chain((0..m).map(|far| TailCase::Mixed { far }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::corpus::random_positive_weights;

    #[test]
    fn unit_weights_give_unit_constant() {
        let l = Lattice::new(1, 4.0, 129).unwrap();
        let fam = make_ball_family(&l, &FamilySpec::new(4, l.spacing(), 6)).unwrap();
        let e = ExponentVector::new(vec![2.0, 3.0]).unwrap();
        let ws = vec![Weight::unit(1), Weight::unit(1)];
        let r = check_product_lemma(&ws, &ProductExponents::Czo(e.clone()), &fam).unwrap();
        assert!((r.constant - 1.0).abs() < 1e-12);
        let fp = FractionalParams::new(e, 0.5, 1).unwrap();
        let r = check_product_lemma(&ws, &ProductExponents::Fractional(fp), &fam).unwrap();
        assert!((r.constant - 1.0).abs() < 1e-12);
        assert!(r.holder_holds);
    }

    #[test]
    fn holder_direction_on_random_weights() {
        let l = Lattice::new(1, 2.0, 65).unwrap();
        let fam = make_ball_family(&l, &FamilySpec::new(2, l.spacing(), 5)).unwrap();
        let ws = random_positive_weights(&l, 4, 5).unwrap();
        let e = ExponentVector::new(vec![1.5, 3.0]).unwrap();
        for pair in ws.chunks(2) {
            let r = check_product_lemma(pair, &ProductExponents::Czo(e.clone()), &fam).unwrap();
            assert!(r.holder_holds, "{r:?}");
            assert!(r.constant >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn reciprocal_square_roots_centered_value() {
        // centred balls: (4/3 r^{3/2})^{1/2} (4 r^{1/2})^{1/2} / (2r) = 2/√3
        let l = Lattice::new(1, 4.0, 129).unwrap();
        let fam = BallFamily::centered(&l, &[0.5, 1.0]).unwrap();
        let ws = vec![Weight::power(1, 0.5).unwrap(), Weight::power(1, -0.5).unwrap()];
        let e = ExponentVector::new(vec![2.0, 2.0]).unwrap();
        let r = check_product_lemma(&ws, &ProductExponents::Czo(e), &fam).unwrap();
        assert!((r.constant - 2.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn covering_annuli_reach_the_domain() {
        let l = Lattice::new(1, 4.0, 129).unwrap();
        let b = Ball::new(vec![0.0], 0.1).unwrap();
        let j = covering_annuli(&l, &b);
        assert!(2f64.powi(j as i32 + 1) * 0.1 >= 16.0);
    }
}

//! Weighted Lebesgue, weak Lebesgue, Morrey, weak Morrey and two-weight
//! Morrey norms.
//!
//! Every measure is a midpoint sum over lattice nodes, including the
//! normalizing ball measure `w(B)` of the Morrey norms, so numerator and
//! denominator see the same node set. Weak norms enumerate the attained values
//! of `|f|` as levels with the closed threshold `{|f| >= λ}`, which is exact on
//! a finite lattice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Ball, BallFamily, GridFunction, Lattice, Provenance};
use crate::weights::Weight;

/// Exponent `p > 0` and Morrey parameter `0 < κ < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorreyParams {
    p: f64,
    kappa: f64,
}

impl MorreyParams {
    pub fn new(p: f64, kappa: f64) -> Result<Self> {
        check_exponent(p)?;
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::InvalidExponent(format!(
                "Morrey parameter must lie in (0, 1), got {kappa}"
            )));
        }
        Ok(Self { p, kappa })
    }

    /// Accepts any `κ > 0`. The norm formula stays meaningful for `κ >= 1`;
    /// this exists so that experiments outside the admissible range can run
    /// and be reported.
    pub fn any_kappa(p: f64, kappa: f64) -> Result<Self> {
        check_exponent(p)?;
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidExponent(format!(
                "Morrey parameter must be positive, got {kappa}"
            )));
        }
        Ok(Self { p, kappa })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(format!(
            "exponent must be positive and finite, got {p}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    /// Maximizing ball (Morrey norms).
    pub ball: Option<Ball>,
    /// Maximizing level (weak norms).
    pub level: Option<f64>,
    pub family: Option<Provenance>,
    pub flags: Vec<String>,
}

impl NormReport {
    fn zero(flag: Option<&str>) -> Self {
        Self {
            value: 0.0,
            ball: None,
            level: None,
            family: None,
            flags: flag.into_iter().map(str::to_string).collect(),
        }
    }
}

fn weight_values(w: &Weight, f: &GridFunction) -> Result<Vec<f64>> {
    w.node_values(f.lattice())
}

/// `(∫ |f|^p w)^{1/p}` over the whole domain.
pub fn lebesgue_norm(f: &GridFunction, w: &Weight, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let wv = weight_values(w, f)?;
    let sum: f64 = f
        .values()
        .iter()
        .zip(&wv)
        .filter(|(v, _)| **v != 0.0)
        .map(|(v, wi)| v.abs().powf(p) * wi)
        .sum();
    Ok((f.lattice().cell_volume() * sum).powf(1.0 / p))
}

/// `max_λ λ · w({|f| >= λ})^{1/p}` over the given nodes, with `λ` ranging
/// over attained positive values. Returns `(value, level)`.
fn weak_level_scan(
    f: &GridFunction,
    wv: &[f64],
    nodes: impl Iterator<Item = usize>,
    p: f64,
    cell: f64,
) -> Option<(f64, f64)> {
    let mut pairs: Vec<(f64, f64)> = nodes
        .map(|i| (f.value(i).abs(), wv[i]))
        .filter(|(v, _)| *v > 0.0)
        .collect();
    if pairs.is_empty() {
        return None;
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best: Option<(f64, f64)> = None;
    let mut measure = 0.0;
    for (k, &(level, wi)) in pairs.iter().enumerate() {
        measure += wi * cell;
        // evaluate once per distinct level, after absorbing all ties
        if pairs.get(k + 1).is_some_and(|next| next.0 == level) {
            continue;
        }
        let value = level * measure.powf(1.0 / p);
        if best.is_none_or(|(b, _)| value > b) {
            best = Some((value, level));
        }
    }
    best
}

pub fn weak_lebesgue_norm(f: &GridFunction, w: &Weight, p: f64) -> Result<NormReport> {
    check_exponent(p)?;
    let wv = weight_values(w, f)?;
    let cell = f.lattice().cell_volume();
    Ok(match weak_level_scan(f, &wv, 0..f.lattice().len(), p, cell) {
        None => NormReport::zero(Some("f vanishes identically; no level attained")),
        Some((value, level)) => NormReport {
            value,
            ball: None,
            level: Some(level),
            family: None,
            flags: Vec::new(),
        },
    })
}

fn check_family(f: &GridFunction, family: &BallFamily) -> Result<()> {
    if family.lattice() != f.lattice() {
        return Err(Error::LatticeMismatch);
    }
    Ok(())
}

fn nodes_of(lattice: &Lattice, ball: &Ball) -> Vec<usize> {
    lattice.nodes_in_ball(ball)
}

/// Shared ball loop: `per_ball` returns `(value, level)` or `None` for balls
/// without nodes. Ties keep the first ball.
fn max_over_balls(
    family: &BallFamily,
    mut per_ball: impl FnMut(&Ball) -> Option<(f64, Option<f64>)>,
) -> NormReport {
    let mut report = NormReport::zero(None);
    report.family = Some(family.provenance().clone());
    let mut best: Option<(f64, usize, Option<f64>)> = None;
    let mut skipped = 0;
    for (k, ball) in family.iter().enumerate() {
        match per_ball(ball) {
            Some((value, level)) => {
                if best.is_none_or(|(b, _, _)| value > b) {
                    best = Some((value, k, level));
                }
            }
            None => skipped += 1,
        }
    }
    if skipped > 0 {
        report
            .flags
            .push(format!("{skipped} ball(s) contain no lattice point; skipped"));
    }
    if let Some((value, k, level)) = best {
        report.value = value;
        report.ball = Some(family.balls()[k].clone());
        report.level = level;
    }
    report
}

/// `max_B (v(B)^{-κ} ∫_B |f|^p u)^{1/p}`.
pub fn two_weight_morrey_norm(
    f: &GridFunction,
    u: &Weight,
    v: &Weight,
    mp: MorreyParams,
    family: &BallFamily,
) -> Result<NormReport> {
    check_family(f, family)?;
    let uv = weight_values(u, f)?;
    let vv = weight_values(v, f)?;
    let lattice = f.lattice();
    let cell = lattice.cell_volume();
    let p = mp.p();
    Ok(max_over_balls(family, |ball| {
        let nodes = nodes_of(lattice, ball);
        if nodes.is_empty() {
            return None;
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for &i in &nodes {
            let x = f.value(i);
            if x != 0.0 {
                num += x.abs().powf(p) * uv[i];
            }
            den += vv[i];
        }
        let value = (cell * num / (cell * den).powf(mp.kappa())).powf(1.0 / p);
        Some((value, None))
    }))
}

/// `max_B (w(B)^{-κ} ∫_B |f|^p w)^{1/p}`.
pub fn morrey_norm(
    f: &GridFunction,
    w: &Weight,
    mp: MorreyParams,
    family: &BallFamily,
) -> Result<NormReport> {
    two_weight_morrey_norm(f, w, w, mp, family)
}

/// `max_B max_λ w(B)^{-κ/p} λ w({x ∈ B : |f(x)| >= λ})^{1/p}`.
pub fn weak_morrey_norm(
    f: &GridFunction,
    w: &Weight,
    mp: MorreyParams,
    family: &BallFamily,
) -> Result<NormReport> {
    check_family(f, family)?;
    let wv = weight_values(w, f)?;
    let lattice = f.lattice();
    let cell = lattice.cell_volume();
    let p = mp.p();
    let mut report = max_over_balls(family, |ball| {
        let nodes = nodes_of(lattice, ball);
        if nodes.is_empty() {
            return None;
        }
        let wb: f64 = cell * nodes.iter().map(|&i| wv[i]).sum::<f64>();
        let scale = wb.powf(-mp.kappa() / p);
        match weak_level_scan(f, &wv, nodes.into_iter(), p, cell) {
            Some((value, level)) => Some((scale * value, Some(level))),
            None => Some((0.0, None)),
        }
    });
    if report.level.is_none() {
        report
            .flags
            .push("f vanishes on every ball; no level attained".to_string());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_ball_family, FamilySpec};

    fn setup() -> (Lattice, GridFunction) {
        let l = Lattice::new(1, 4.0, 801).unwrap();
        let f = GridFunction::indicator_box(&l, &[0.0], &[1.0]).unwrap();
        (l, f)
    }

    #[test]
    fn lebesgue_examples() {
        let (l, f) = setup();
        let h = l.spacing();
        let one = Weight::unit(1);
        assert!((lebesgue_norm(&f, &one, 2.0).unwrap() - 1.0).abs() < 2.0 * h);
        let sqrt = Weight::power(1, 0.5).unwrap();
        assert!((lebesgue_norm(&f, &sqrt, 1.0).unwrap() - 2.0 / 3.0).abs() < 2.0 * h);
        assert_eq!(lebesgue_norm(&GridFunction::zeros(&l), &one, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn weak_lebesgue_indicator() {
        let l = Lattice::new(1, 4.0, 801).unwrap();
        // node-exact indicator of [0, 1): 100 nodes of width 0.01
        let f = GridFunction::from_fn(&l, |x| if (-1e-9..1.0 - 1e-9).contains(&x[0]) { 1.0 } else { 0.0 }).unwrap();
        let r = weak_lebesgue_norm(&f, &Weight::unit(1), 2.0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(r.level, Some(1.0));
        let zero = weak_lebesgue_norm(&GridFunction::zeros(&l), &Weight::unit(1), 2.0).unwrap();
        assert_eq!(zero.value, 0.0);
        assert!(!zero.flags.is_empty());
    }

    #[test]
    fn weak_level_uses_closed_threshold() {
        let l = Lattice::new(1, 1.0, 5).unwrap();
        // values 0, 1, 2, 1, 0 on h = 0.5
        let f = GridFunction::new(l.clone(), vec![0.0, 1.0, 2.0, 1.0, 0.0]).unwrap();
        let r = weak_lebesgue_norm(&f, &Weight::unit(1), 1.0).unwrap();
        // λ = 1: measure 1.5 → 1.5; λ = 2: measure 0.5 → 1.0
        assert!((r.value - 1.5).abs() < 1e-15);
        assert_eq!(r.level, Some(1.0));
    }

    #[test]
    fn morrey_indicator_example() {
        let l = Lattice::new(1, 4.0, 801).unwrap();
        let f = GridFunction::indicator_box(&l, &[-1.0], &[1.0]).unwrap();
        let radii: Vec<f64> = (0..80).map(|k| 0.05 * 1.05f64.powi(k)).collect();
        let fam = BallFamily::centered(&l, &radii).unwrap();
        let mp = MorreyParams::new(1.0, 0.5).unwrap();
        let r = morrey_norm(&f, &Weight::unit(1), mp, &fam).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() < 0.05 * 2f64.sqrt());
        let weak = weak_morrey_norm(&f, &Weight::unit(1), mp, &fam).unwrap();
        assert!(weak.value <= r.value * (1.0 + 1e-12));
        assert!((weak.value - 2f64.sqrt()).abs() < 0.05 * 2f64.sqrt());
    }

    #[test]
    fn morrey_of_zero_and_two_weight_collapse() {
        let (l, f) = setup();
        let fam = make_ball_family(&l, &FamilySpec::new(40, 0.05, 6)).unwrap();
        let mp = MorreyParams::new(2.0, 0.3).unwrap();
        let w = Weight::power(1, 0.3).unwrap();
        let zero = morrey_norm(&GridFunction::zeros(&l), &w, mp, &fam).unwrap();
        assert_eq!(zero.value, 0.0);
        let a = morrey_norm(&f, &w, mp, &fam).unwrap();
        let b = two_weight_morrey_norm(&f, &w, &w, mp, &fam).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn morrey_decreasing_in_kappa_when_measure_exceeds_one() {
        let (l, f) = setup();
        let fam = BallFamily::centered(&l, &[2.0]).unwrap();
        let one = Weight::unit(1);
        let mut last = f64::INFINITY;
        for kappa in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let v = morrey_norm(&f, &one, MorreyParams::new(1.0, kappa).unwrap(), &fam)
                .unwrap()
                .value;
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn params_validation() {
        assert!(MorreyParams::new(1.0, 0.0).is_err());
        assert!(MorreyParams::new(1.0, 1.0).is_err());
        assert!(MorreyParams::new(0.0, 0.5).is_err());
        assert!(MorreyParams::new(0.5, 0.5).is_ok());
    }
}

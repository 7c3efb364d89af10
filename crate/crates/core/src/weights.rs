//! Weights and weight-class constants.
//!
//! A weight is either a power weight `c|x|^a` or a strictly positive sampled
//! grid function. Every constant below is a maximum over a [`BallFamily`] of a
//! per-ball expression built from averages, infima and suprema.
//!
//! Two evaluation routes exist. When every density entering a constant is a
//! power weight in one dimension, averages use exact antiderivatives and
//! infima/suprema are exact over the closed ball. Otherwise all densities are
//! sampled on the family's lattice and averages are node means over the ball
//! (so `|B|` is measured by the same quadrature as the integrand).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{unit_ball_volume, Ball, BallFamily, GridFunction, Lattice};

/// `scale * |x|^exponent` on `R^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerWeight {
    pub dim: usize,
    pub scale: f64,
    pub exponent: f64,
}

impl PowerWeight {
    /// Value at the origin node: the mean of `|x|^a` over the origin-centered
    /// ball whose volume equals one cell, `n/(n+a) * rho^a`. Infinite when
    /// `a <= -n`.
    fn origin_cell_value(&self, lattice: &Lattice) -> f64 {
        let n = self.dim as f64;
        let a = self.exponent;
        if a == 0.0 {
            return self.scale;
        }
        if a <= -n {
            return f64::INFINITY;
        }
        let rho = (lattice.cell_volume() / unit_ball_volume(self.dim)).powf(1.0 / n);
        self.scale * n / (n + a) * rho.powf(a)
    }

    fn node_values(&self, lattice: &Lattice) -> Vec<f64> {
        let origin = lattice.origin_index();
        let mut x = vec![0.0; lattice.dim()];
        (0..lattice.len())
            .map(|i| {
                if i == origin {
                    self.origin_cell_value(lattice)
                } else {
                    lattice.point_into(i, &mut x);
                    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    self.scale * r.powf(self.exponent)
                }
            })
            .collect()
    }

    fn powf(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            scale: self.scale.powf(s),
            exponent: self.exponent * s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Weight {
    Power(PowerWeight),
    Sampled(GridFunction),
}

impl Weight {
    /// `|x|^a` on `R^dim`; requires `a > -dim` for local integrability.
    pub fn power(dim: usize, exponent: f64) -> Result<Self> {
        Self::scaled_power(dim, 1.0, exponent)
    }

    pub fn scaled_power(dim: usize, scale: f64, exponent: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidWeight("dimension must be positive".into()));
        }
        if !(scale > 0.0) || !scale.is_finite() || !exponent.is_finite() {
            return Err(Error::InvalidWeight(format!(
                "power weight needs a positive scale and finite exponent, got {scale}|x|^{exponent}"
            )));
        }
        if exponent <= -(dim as f64) {
            return Err(Error::InvalidWeight(format!(
                "|x|^{exponent} is not locally integrable in dimension {dim}"
            )));
        }
        Ok(Self::Power(PowerWeight {
            dim,
            scale,
            exponent,
        }))
    }

    /// The constant weight 1.
    pub fn unit(dim: usize) -> Self {
        Self::Power(PowerWeight {
            dim,
            scale: 1.0,
            exponent: 0.0,
        })
    }

    /// A sampled weight; every node value must be finite and positive.
    pub fn sampled(values: GridFunction) -> Result<Self> {
        if let Some(v) = values.values().iter().find(|v| !(**v > 0.0)) {
            return Err(Error::InvalidWeight(format!(
                "sampled weights must be strictly positive, found {v}"
            )));
        }
        Ok(Self::Sampled(values))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Power(pw) => pw.dim,
            Self::Sampled(g) => g.lattice().dim(),
        }
    }

    pub fn as_power(&self) -> Option<&PowerWeight> {
        match self {
            Self::Power(pw) => Some(pw),
            Self::Sampled(_) => None,
        }
    }

    /// Node values on `lattice` (power weights use the origin-cell mean at the
    /// origin node).
    pub fn node_values(&self, lattice: &Lattice) -> Result<Vec<f64>> {
        match self {
            Self::Power(pw) => {
                if pw.dim != lattice.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: lattice.dim(),
                        got: pw.dim,
                    });
                }
                Ok(pw.node_values(lattice))
            }
            Self::Sampled(g) => {
                if g.lattice() != lattice {
                    return Err(Error::LatticeMismatch);
                }
                Ok(g.values().to_vec())
            }
        }
    }

    /// The same weight as a sampled grid function on `lattice`.
    pub fn sample(&self, lattice: &Lattice) -> Result<Self> {
        let values = self.node_values(lattice)?;
        Self::sampled(GridFunction::new(lattice.clone(), values)?)
    }

    /// `w^s`, exact for power weights.
    pub fn pow(&self, s: f64) -> Result<Self> {
        match self {
            Self::Power(pw) => {
                let p = pw.powf(s);
                Self::scaled_power(p.dim, p.scale, p.exponent)
            }
            Self::Sampled(g) => Self::sampled(g.map(|v| v.powf(s))?),
        }
    }

    /// `c·w` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidWeight(format!("scale must be positive, got {c}")));
        }
        match self {
            Self::Power(pw) => Self::scaled_power(pw.dim, pw.scale * c, pw.exponent),
            Self::Sampled(g) => Self::sampled(g.scale(c)),
        }
    }

    fn density(&self) -> Density {
        match self {
            Self::Power(pw) => Density::Power(*pw),
            Self::Sampled(g) => Density::Nodes(g.values().to_vec()),
        }
    }
}

/// `w(B)`: exact antiderivative for one-dimensional power weights, midpoint
/// quadrature otherwise.
pub fn weight_measure(w: &Weight, ball: &Ball, lattice: &Lattice) -> Result<f64> {
    if ball.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            got: ball.dim(),
        });
    }
    match w {
        Weight::Power(pw) if pw.dim == 1 => Ok(power_ball_integral(pw, ball)),
        _ => {
            let values = w.node_values(lattice)?;
            let mut sum = 0.0;
            lattice.for_each_node_in_ball(ball, |i| sum += values[i]);
            Ok(lattice.cell_volume() * sum)
        }
    }
}

// ---------------------------------------------------------------------------
// exact one-dimensional calculus for power densities

/// `∫_0^t x^a dx` for `t >= 0`.
fn power_from_zero(a: f64, t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else if a <= -1.0 {
        f64::INFINITY
    } else {
        t.powf(a + 1.0) / (a + 1.0)
    }
}

/// `∫_lo^hi x^a dx` for `0 <= lo <= hi`.
fn power_positive_interval(a: f64, lo: f64, hi: f64) -> f64 {
    if lo == 0.0 {
        return power_from_zero(a, hi);
    }
    if a == -1.0 {
        (hi / lo).ln()
    } else {
        (hi.powf(a + 1.0) - lo.powf(a + 1.0)) / (a + 1.0)
    }
}

/// `∫_lo^hi |x|^a dx`.
fn power_interval(a: f64, lo: f64, hi: f64) -> f64 {
    if lo >= 0.0 {
        power_positive_interval(a, lo, hi)
    } else if hi <= 0.0 {
        power_positive_interval(a, -hi, -lo)
    } else {
        power_from_zero(a, -lo) + power_from_zero(a, hi)
    }
}

/// `∫_lo^hi log|x| dx`, via the antiderivative `x log|x| - x`.
fn log_interval(lo: f64, hi: f64) -> f64 {
    let g = |x: f64| if x == 0.0 { 0.0 } else { x * x.abs().ln() - x };
    g(hi) - g(lo)
}

fn interval(ball: &Ball) -> (f64, f64) {
    let c = ball.center()[0];
    (c - ball.radius(), c + ball.radius())
}

fn power_ball_integral(pw: &PowerWeight, ball: &Ball) -> f64 {
    let (lo, hi) = interval(ball);
    pw.scale * power_interval(pw.exponent, lo, hi)
}

/// `(min |x|, max |x|)` over the closed interval.
fn abs_range(lo: f64, hi: f64) -> (f64, f64) {
    let max = lo.abs().max(hi.abs());
    let min = if lo <= 0.0 && hi >= 0.0 {
        0.0
    } else {
        lo.abs().min(hi.abs())
    };
    (min, max)
}

fn power_value(scale: f64, r: f64, a: f64) -> f64 {
    if a == 0.0 {
        scale
    } else {
        scale * r.powf(a)
    }
}

// ---------------------------------------------------------------------------
// evaluation routes

/// An integrand: a power density or node values on the route's lattice.
#[derive(Clone, Debug)]
pub(crate) enum Density {
    Power(PowerWeight),
    Nodes(Vec<f64>),
}

impl Density {
    pub(crate) fn powf(&self, s: f64) -> Self {
        match self {
            Self::Power(pw) => Self::Power(pw.powf(s)),
            Self::Nodes(v) => Self::Nodes(v.iter().map(|x| x.powf(s)).collect()),
        }
    }

    pub(crate) fn product(items: &[Density], exponents: &[f64]) -> Self {
        if let Some(powers) = items
            .iter()
            .map(|d| match d {
                Self::Power(pw) => Some(*pw),
                Self::Nodes(_) => None,
            })
            .collect::<Option<Vec<_>>>()
        {
            let dim = powers[0].dim;
            let mut scale = 1.0;
            let mut exponent = 0.0;
            for (pw, &s) in powers.iter().zip(exponents) {
                scale *= pw.scale.powf(s);
                exponent += pw.exponent * s;
            }
            return Self::Power(PowerWeight {
                dim,
                scale,
                exponent,
            });
        }
        let len = items
            .iter()
            .find_map(|d| match d {
                Self::Nodes(v) => Some(v.len()),
                Self::Power(_) => None,
            })
            .unwrap_or(0);
        let mut out = vec![1.0; len];
        for (d, &s) in items.iter().zip(exponents) {
            match d {
                Self::Nodes(v) => {
                    for (o, x) in out.iter_mut().zip(v) {
                        *o *= x.powf(s);
                    }
                }
                Self::Power(_) => unreachable!("mixed densities are sampled first"),
            }
        }
        Self::Nodes(out)
    }
}

/// Averages, infima and suprema over balls, evaluated consistently for every
/// density of one constant.
#[derive(Clone, Debug)]
pub(crate) struct Route {
    lattice: Lattice,
    exact: bool,
}

impl Route {
    /// Exact when every weight is a one-dimensional power weight.
    pub(crate) fn for_weights(weights: &[&Weight], lattice: &Lattice) -> Self {
        let exact = lattice.dim() == 1
            && weights
                .iter()
                .all(|w| matches!(w, Weight::Power(pw) if pw.dim == 1));
        Self {
            lattice: lattice.clone(),
            exact,
        }
    }

    pub(crate) fn is_exact(&self) -> bool {
        self.exact
    }

    pub(crate) fn density(&self, w: &Weight) -> Result<Density> {
        if w.dim() != self.lattice.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.lattice.dim(),
                got: w.dim(),
            });
        }
        if self.exact {
            Ok(w.density())
        } else {
            Ok(Density::Nodes(w.node_values(&self.lattice)?))
        }
    }

    fn fold_nodes(&self, ball: &Ball, values: &[f64], mut f: impl FnMut(f64)) -> usize {
        let mut count = 0;
        self.lattice.for_each_node_in_ball(ball, |i| {
            f(values[i]);
            count += 1;
        });
        count
    }

    /// Integral over the ball; `None` when the quadrature sees no node.
    pub(crate) fn integral(&self, d: &Density, ball: &Ball) -> Option<f64> {
        match d {
            Density::Power(pw) if self.exact => Some(power_ball_integral(pw, ball)),
            Density::Power(_) => unreachable!("power densities only appear on the exact route"),
            Density::Nodes(v) => {
                let mut sum = 0.0;
                let count = self.fold_nodes(ball, v, |x| sum += x);
                (count > 0).then(|| self.lattice.cell_volume() * sum)
            }
        }
    }

    /// Measure of the ball on this route (exact volume, or node count · h^n).
    pub(crate) fn volume(&self, ball: &Ball) -> Option<f64> {
        if self.exact {
            Some(ball.volume())
        } else {
            let count = self.lattice.count_in_ball(ball);
            (count > 0).then(|| count as f64 * self.lattice.cell_volume())
        }
    }

    pub(crate) fn average(&self, d: &Density, ball: &Ball) -> Option<f64> {
        Some(self.integral(d, ball)? / self.volume(ball)?)
    }

    fn log_average(&self, d: &Density, ball: &Ball) -> Option<f64> {
        match d {
            Density::Power(pw) => {
                let (lo, hi) = interval(ball);
                Some(pw.scale.ln() + pw.exponent * log_interval(lo, hi) / (hi - lo))
            }
            Density::Nodes(v) => {
                let mut sum = 0.0;
                let count = self.fold_nodes(ball, v, |x| sum += x.ln());
                (count > 0).then(|| sum / count as f64)
            }
        }
    }

    fn inf(&self, d: &Density, ball: &Ball) -> Option<f64> {
        match d {
            Density::Power(pw) => {
                let (lo, hi) = interval(ball);
                let (rmin, rmax) = abs_range(lo, hi);
                let r = if pw.exponent >= 0.0 { rmin } else { rmax };
                Some(power_value(pw.scale, r, pw.exponent))
            }
            Density::Nodes(v) => {
                let mut m = f64::INFINITY;
                let count = self.fold_nodes(ball, v, |x| m = m.min(x));
                (count > 0).then_some(m)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// reports

/// A family-relative estimate: the extreme value, where it was attained and
/// how many balls contributed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub name: String,
    pub value: f64,
    pub extremal: Option<Ball>,
    pub evaluated: usize,
    pub skipped: usize,
    pub warnings: Vec<String>,
    pub config: BTreeMap<String, String>,
}

impl EstimateReport {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value: f64::NAN,
            extremal: None,
            evaluated: 0,
            skipped: 0,
            warnings: Vec::new(),
            config: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Extreme {
    Max,
    Min,
}

/// Runs `per_ball` over the family and keeps the extreme value; the first
/// ball wins ties. Balls returning `None` are skipped with a warning.
fn extreme_over_family(
    name: &str,
    family: &BallFamily,
    extreme: Extreme,
    mut per_ball: impl FnMut(&Ball) -> Option<f64>,
) -> Result<EstimateReport> {
    let mut report = EstimateReport::new(name);
    let mut best: Option<(f64, usize)> = None;
    for (k, ball) in family.iter().enumerate() {
        match per_ball(ball) {
            Some(v) => {
                report.evaluated += 1;
                let v = if v.is_nan() { f64::INFINITY } else { v };
                let better = match best {
                    None => true,
                    Some((b, _)) => match extreme {
                        Extreme::Max => v > b,
                        Extreme::Min => v < b,
                    },
                };
                if better {
                    best = Some((v, k));
                }
            }
            None => {
                report.skipped += 1;
                report.warnings.push(format!(
                    "ball {k} (center {:?}, radius {}) contains no lattice point; skipped",
                    ball.center(),
                    ball.radius()
                ));
            }
        }
    }
    let (value, k) = best.ok_or_else(|| {
        Error::InvalidFamily(format!("{name}: no ball of the family contains a lattice point"))
    })?;
    report.value = value;
    report.extremal = Some(family.balls()[k].clone());
    Ok(report)
}

fn max_over_family(
    name: &str,
    family: &BallFamily,
    per_ball: impl FnMut(&Ball) -> Option<f64>,
) -> Result<EstimateReport> {
    extreme_over_family(name, family, Extreme::Max, per_ball)
}

// ---------------------------------------------------------------------------
// exponents

/// `(p_1, ..., p_m)` with `1/p = Σ 1/p_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentVector {
    components: Vec<f64>,
}

impl ExponentVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::InvalidExponent(format!(
                "need at least two exponents, got {}",
                components.len()
            )));
        }
        if let Some(p) = components.iter().find(|p| !(**p >= 1.0) || !p.is_finite()) {
            return Err(Error::InvalidExponent(format!(
                "exponents must lie in [1, ∞), got {p}"
            )));
        }
        Ok(Self { components })
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn component(&self, i: usize) -> f64 {
        self.components[i]
    }

    /// `p` with `1/p = Σ 1/p_i`.
    pub fn p(&self) -> f64 {
        1.0 / self.components.iter().map(|p| 1.0 / p).sum::<f64>()
    }

    /// `p'_i = p_i / (p_i - 1)`, infinite when `p_i = 1`.
    pub fn conjugate(&self, i: usize) -> f64 {
        conjugate(self.components[i])
    }

    pub fn min(&self) -> f64 {
        self.components.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Hölder conjugate `p / (p - 1)`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Order `α` of a fractional integral together with its exponent data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalParams {
    alpha: f64,
    dim: usize,
    exponents: ExponentVector,
}

impl FractionalParams {
    pub fn new(exponents: ExponentVector, alpha: f64, dim: usize) -> Result<Self> {
        let mn = (exponents.m() * dim) as f64;
        if !(alpha > 0.0 && alpha < mn) {
            return Err(Error::InvalidExponent(format!(
                "order α = {alpha} must lie in (0, {mn})"
            )));
        }
        for &p in exponents.components() {
            if !(1.0 / p - alpha / mn > 0.0) {
                return Err(Error::InvalidExponent(format!(
                    "p_k = {p} must be below mn/α = {}",
                    mn / alpha
                )));
            }
        }
        Ok(Self {
            alpha,
            dim,
            exponents,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.exponents.m()
    }

    pub fn exponents(&self) -> &ExponentVector {
        &self.exponents
    }

    /// `q_k` with `1/q_k = 1/p_k - α/(mn)`.
    pub fn q_k(&self, k: usize) -> f64 {
        let mn = (self.m() * self.dim) as f64;
        1.0 / (1.0 / self.exponents.component(k) - self.alpha / mn)
    }

    pub fn q_components(&self) -> Vec<f64> {
        (0..self.m()).map(|k| self.q_k(k)).collect()
    }

    /// `q` with `1/q = 1/p - α/n`.
    pub fn q(&self) -> f64 {
        1.0 / (1.0 / self.exponents.p() - self.alpha / self.dim as f64)
    }
}

// ---------------------------------------------------------------------------
// single-weight constants

fn check_dims(weights: &[&Weight], family: &BallFamily) -> Result<()> {
    let dim = family.lattice().dim();
    for w in weights {
        if w.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: w.dim(),
            });
        }
    }
    Ok(())
}

/// `A_p` constant: max over the family of
/// `(avg_B w)(avg_B w^{-1/(p-1)})^{p-1}`, or `(avg_B w)/(inf_B w)` for `p = 1`.
pub fn muckenhoupt_constant(w: &Weight, p: f64, family: &BallFamily) -> Result<EstimateReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(format!("A_p needs p >= 1, got {p}")));
    }
    check_dims(&[w], family)?;
    let route = Route::for_weights(&[w], family.lattice());
    let d = route.density(w)?;
    let report = if p == 1.0 {
        max_over_family("A_1", family, |b| {
            Some(route.average(&d, b)? / route.inf(&d, b)?)
        })?
    } else {
        let dual = d.powf(-1.0 / (p - 1.0));
        max_over_family("A_p", family, |b| {
            Some(route.average(&d, b)? * route.average(&dual, b)?.powf(p - 1.0))
        })?
    };
    Ok(report.with_param("p", p).with_param("exact", route.is_exact()))
}

/// `A_{p,q}` constant: max of `(avg w^q)^{1/q}(avg w^{-p'})^{1/p'}`, with
/// `sup_B 1/w` in place of the second factor when `p = 1`.
pub fn apq_constant(w: &Weight, p: f64, q: f64, family: &BallFamily) -> Result<EstimateReport> {
    if !(p >= 1.0 && p < q && q.is_finite()) {
        return Err(Error::InvalidExponent(format!(
            "A_(p,q) needs 1 <= p < q < ∞, got p = {p}, q = {q}"
        )));
    }
    check_dims(&[w], family)?;
    let route = Route::for_weights(&[w], family.lattice());
    let d = route.density(w)?;
    let wq = d.powf(q);
    let report = if p == 1.0 {
        max_over_family("A_(1,q)", family, |b| {
            Some(route.average(&wq, b)?.powf(1.0 / q) / route.inf(&d, b)?)
        })?
    } else {
        let pp = conjugate(p);
        let dual = d.powf(-pp);
        max_over_family("A_(p,q)", family, |b| {
            Some(route.average(&wq, b)?.powf(1.0 / q) * route.average(&dual, b)?.powf(1.0 / pp))
        })?
    };
    Ok(report
        .with_param("p", p)
        .with_param("q", q)
        .with_param("exact", route.is_exact()))
}

// ---------------------------------------------------------------------------
// multiple weights

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NuMode {
    /// `ν = Π w_i^{p/p_i}`
    Czo,
    /// `ν = Π w_i`
    Fractional,
}

fn nu_exponents(exps: &ExponentVector, mode: NuMode) -> Vec<f64> {
    match mode {
        NuMode::Czo => {
            let p = exps.p();
            exps.components().iter().map(|pi| p / pi).collect()
        }
        NuMode::Fractional => vec![1.0; exps.m()],
    }
}

fn check_arity(ws: &[Weight], exps: &ExponentVector) -> Result<()> {
    if ws.len() != exps.m() {
        return Err(Error::Arity {
            expected: exps.m(),
            got: ws.len(),
        });
    }
    Ok(())
}

/// The composite weight `ν_w`. Power inputs give an exact power weight; any
/// sampled input makes the result sampled on `lattice`.
pub fn nu_weight(
    ws: &[Weight],
    exps: &ExponentVector,
    mode: NuMode,
    lattice: &Lattice,
) -> Result<Weight> {
    check_arity(ws, exps)?;
    let exponents = nu_exponents(exps, mode);
    let refs: Vec<&Weight> = ws.iter().collect();
    if refs.iter().all(|w| w.as_power().is_some()) {
        let dim = ws[0].dim();
        if ws.iter().any(|w| w.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: ws.iter().map(Weight::dim).find(|&d| d != dim).unwrap_or(dim),
            });
        }
        let densities: Vec<Density> = ws.iter().map(Weight::density).collect();
        match Density::product(&densities, &exponents) {
            Density::Power(pw) => Weight::scaled_power(pw.dim, pw.scale, pw.exponent),
            Density::Nodes(_) => unreachable!(),
        }
    } else {
        let densities = ws
            .iter()
            .map(|w| w.node_values(lattice).map(Density::Nodes))
            .collect::<Result<Vec<_>>>()?;
        match Density::product(&densities, &exponents) {
            Density::Nodes(v) => Weight::sampled(GridFunction::new(lattice.clone(), v)?),
            Density::Power(_) => unreachable!(),
        }
    }
}

/// Per-ball factor `(avg w^{-s·p'})^{1/p'}` with `(inf w)^{-1}` when `p = 1`.
fn dual_factor(route: &Route, d: &Density, p: f64, shift: f64, ball: &Ball) -> Option<f64> {
    if p == 1.0 {
        Some(1.0 / route.inf(d, ball)?)
    } else {
        let pp = conjugate(p);
        Some(route.average(&d.powf(shift * pp), ball)?.powf(1.0 / pp))
    }
}

/// Multiple `A_P` constant:
/// max of `(avg ν)^{1/p} Π (avg w_i^{1-p'_i})^{1/p'_i}`.
pub fn multi_ap_constant(
    ws: &[Weight],
    exps: &ExponentVector,
    family: &BallFamily,
) -> Result<EstimateReport> {
    check_arity(ws, exps)?;
    let refs: Vec<&Weight> = ws.iter().collect();
    check_dims(&refs, family)?;
    let route = Route::for_weights(&refs, family.lattice());
    let densities = ws.iter().map(|w| route.density(w)).collect::<Result<Vec<_>>>()?;
    let nu = Density::product(&densities, &nu_exponents(exps, NuMode::Czo));
    let p = exps.p();
    let report = max_over_family("A_P", family, |b| {
        let mut value = route.average(&nu, b)?.powf(1.0 / p);
        for (d, &pi) in densities.iter().zip(exps.components()) {
            // 1 - p'_i = -p'_i / p_i
            value *= dual_factor(&route, d, pi, -1.0 / pi, b)?;
        }
        Some(value)
    })?;
    Ok(report
        .with_param("P", format!("{:?}", exps.components()))
        .with_param("exact", route.is_exact()))
}

/// Multiple `A_{P,q}` constant:
/// max of `(avg ν^q)^{1/q} Π (avg w_i^{-p'_i})^{1/p'_i}`, `ν = Π w_i`.
pub fn multi_apq_constant(
    ws: &[Weight],
    exps: &ExponentVector,
    q: f64,
    family: &BallFamily,
) -> Result<EstimateReport> {
    check_arity(ws, exps)?;
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidExponent(format!("q must be positive, got {q}")));
    }
    let refs: Vec<&Weight> = ws.iter().collect();
    check_dims(&refs, family)?;
    let route = Route::for_weights(&refs, family.lattice());
    let densities = ws.iter().map(|w| route.density(w)).collect::<Result<Vec<_>>>()?;
    let nu_q = Density::product(&densities, &vec![q; ws.len()]);
    let report = max_over_family("A_(P,q)", family, |b| {
        let mut value = route.average(&nu_q, b)?.powf(1.0 / q);
        for (d, &pi) in densities.iter().zip(exps.components()) {
            value *= dual_factor(&route, d, pi, -1.0, b)?;
        }
        Some(value)
    })?;
    Ok(report
        .with_param("P", format!("{:?}", exps.components()))
        .with_param("q", q)
        .with_param("exact", route.is_exact()))
}

// ---------------------------------------------------------------------------
// doubling and A_∞ diagnostics

/// max over the family of `w(2B)/w(B)`.
pub fn doubling_constant(w: &Weight, family: &BallFamily) -> Result<EstimateReport> {
    check_dims(&[w], family)?;
    let route = Route::for_weights(&[w], family.lattice());
    let d = route.density(w)?;
    let report = max_over_family("doubling", family, |b| {
        let inner = route.integral(&d, b)?;
        let outer = route.integral(&d, &b.dilate(2.0))?;
        (inner > 0.0).then(|| outer / inner)
    })?;
    Ok(report.with_param("exact", route.is_exact()))
}

/// Number of nested concentric sub-balls `B(c, r/2^k)`, `k = 1..=4`, used to
/// fit the `A_∞` exponent.
pub const DELTA_SUBBALLS: u32 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightDiagnostics {
    pub doubling: EstimateReport,
    /// max of `∫_B w / (|B| exp(avg_B log w))`; at least 1 by Jensen.
    pub reverse_jensen: EstimateReport,
    /// Smallest fitted slope of `log(w(E)/w(B))` against `log(|E|/|B|)`.
    pub delta: Option<EstimateReport>,
    /// Same fit for `w^q` when requested.
    pub delta_prime: Option<EstimateReport>,
    pub flags: Vec<String>,
}

/// Least-squares slope; `None` with fewer than two distinct abscissae.
pub(crate) fn ls_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn fit_delta(route: &Route, d: &Density, ball: &Ball) -> Option<f64> {
    let whole = route.integral(d, ball)?;
    let vol = route.volume(ball)?;
    let points: Vec<(f64, f64)> = (1..=DELTA_SUBBALLS)
        .filter_map(|k| {
            let sub = ball.dilate(0.5f64.powi(k as i32));
            let we = route.integral(d, &sub)?;
            let ve = route.volume(&sub)?;
            (we > 0.0).then(|| ((ve / vol).ln(), (we / whole).ln()))
        })
        .collect();
    ls_slope(&points)
}

fn delta_report(
    name: &str,
    route: &Route,
    d: &Density,
    family: &BallFamily,
    flags: &mut Vec<String>,
) -> Option<EstimateReport> {
    match extreme_over_family(name, family, Extreme::Min, |b| fit_delta(route, d, b)) {
        Ok(r) => {
            if r.skipped > 0 {
                flags.push(format!(
                    "{name}: {} ball(s) too small for a sub-ball regression",
                    r.skipped
                ));
            }
            Some(r)
        }
        Err(_) => {
            flags.push(format!("{name}: degenerate regression on every ball; omitted"));
            None
        }
    }
}

pub fn ainfty_diagnostics(w: &Weight, family: &BallFamily) -> Result<WeightDiagnostics> {
    check_dims(&[w], family)?;
    let route = Route::for_weights(&[w], family.lattice());
    let d = route.density(w)?;
    if let Density::Nodes(v) = &d {
        if v.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidWeight(
                "A_∞ diagnostics need a finite positive weight at every node".into(),
            ));
        }
    }
    let doubling = doubling_constant(w, family)?;
    let reverse_jensen = max_over_family("reverse Jensen", family, |b| {
        Some(route.average(&d, b)? / route.log_average(&d, b)?.exp())
    })?;
    let mut flags = Vec::new();
    let delta = delta_report("delta", &route, &d, family, &mut flags);
    Ok(WeightDiagnostics {
        doubling,
        reverse_jensen,
        delta,
        delta_prime: None,
        flags,
    })
}

/// Diagnostics of `w` plus the fitted exponent `δ'` of `w^q`.
pub fn ainfty_diagnostics_with_power(
    w: &Weight,
    q: f64,
    family: &BallFamily,
) -> Result<WeightDiagnostics> {
    let mut diag = ainfty_diagnostics(w, family)?;
    let wq = w.pow(q)?;
    let route = Route::for_weights(&[&wq], family.lattice());
    let d = route.density(&wq)?;
    diag.delta_prime = delta_report("delta'", &route, &d, family, &mut diag.flags);
    Ok(diag)
}

// ---------------------------------------------------------------------------
// refinement trends

/// Outcome of comparing a constant before and after one refinement step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trend {
    /// Both finite and within the relative tolerance.
    Stable,
    /// Infinite, or at least doubled.
    Unbounded,
    Undetermined,
}

/// Relative change tolerated for "stable under refinement".
pub const STABILITY_TOLERANCE: f64 = 0.05;

impl Trend {
    pub fn classify(coarse: f64, fine: f64) -> Self {
        if !coarse.is_finite() || !fine.is_finite() || fine >= 2.0 * coarse {
            Self::Unbounded
        } else if ((fine - coarse) / coarse).abs() <= STABILITY_TOLERANCE {
            Self::Stable
        } else {
            Self::Undetermined
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_ball_family, FamilySpec};

    fn lattice() -> Lattice {
        Lattice::new(1, 4.0, 129).unwrap()
    }

    fn family(l: &Lattice) -> BallFamily {
        make_ball_family(l, &FamilySpec::new(4, l.spacing(), 6)).unwrap()
    }

    #[test]
    fn closed_form_measures() {
        let l = lattice();
        let b = Ball::centered(1, 1.0).unwrap();
        assert_eq!(weight_measure(&Weight::unit(1), &b, &l).unwrap(), 2.0);
        let sqrt = Weight::power(1, 0.5).unwrap();
        let m = weight_measure(&sqrt, &b, &l).unwrap();
        assert!((m - 4.0 / 3.0).abs() < 1e-14);
        let off = Ball::new(vec![2.0], 1.0).unwrap();
        let m = weight_measure(&sqrt, &off, &l).unwrap();
        assert!((m - 2.0 / 3.0 * (3f64.powf(1.5) - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn non_integrable_power_rejected() {
        assert!(Weight::power(1, -1.0).is_err());
        assert!(Weight::power(1, -1.5).is_err());
        assert!(Weight::power(2, -1.5).is_ok());
        assert!(Weight::power(2, -2.0).is_err());
    }

    #[test]
    fn sampled_weight_must_be_positive() {
        let l = lattice();
        assert!(Weight::sampled(GridFunction::zeros(&l)).is_err());
        assert!(Weight::sampled(GridFunction::constant(&l, 2.0)).is_ok());
    }

    #[test]
    fn origin_cell_value_is_cell_mean() {
        let l = Lattice::new(1, 1.0, 5).unwrap();
        let w = Weight::power(1, -0.5).unwrap();
        let v = w.node_values(&l).unwrap();
        let h = l.spacing();
        // mean of |x|^{-1/2} over [-h/2, h/2]
        let mean = 2.0 * (0.5 * h).sqrt() / h * 2.0;
        assert!((v[l.origin_index()] - mean).abs() < 1e-14);
    }

    #[test]
    fn unit_weight_constants_are_one() {
        let l = lattice();
        let fam = family(&l);
        let w = Weight::unit(1);
        for p in [1.0, 1.5, 2.0, 3.0] {
            assert!((muckenhoupt_constant(&w, p, &fam).unwrap().value - 1.0).abs() < 1e-10);
        }
        assert!((apq_constant(&w, 1.0, 3.0, &fam).unwrap().value - 1.0).abs() < 1e-10);
        assert!((apq_constant(&w, 2.0, 4.0, &fam).unwrap().value - 1.0).abs() < 1e-10);
        let sampled = Weight::sampled(GridFunction::constant(&l, 1.0)).unwrap();
        assert!((muckenhoupt_constant(&sampled, 2.0, &fam).unwrap().value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sqrt_weight_centered_a2_value() {
        let l = lattice();
        let fam = BallFamily::centered(&l, &[0.25, 0.5, 1.0, 2.0]).unwrap();
        let w = Weight::power(1, 0.5).unwrap();
        let r = muckenhoupt_constant(&w, 2.0, &fam).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-12);
        // the full family is at least the centered value
        let r = muckenhoupt_constant(&w, 2.0, &family(&l)).unwrap();
        assert!(r.value >= 4.0 / 3.0 - 1e-12);
    }

    #[test]
    fn a1_of_positive_power_is_infinite_on_centered_balls() {
        let l = lattice();
        let fam = BallFamily::centered(&l, &[1.0]).unwrap();
        let w = Weight::power(1, 0.5).unwrap();
        assert!(muckenhoupt_constant(&w, 1.0, &fam).unwrap().value.is_infinite());
        let w = Weight::power(1, -0.5).unwrap();
        // avg |x|^{-1/2} on B(0,1) is 2, inf is 1
        let r = muckenhoupt_constant(&w, 1.0, &fam).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nu_weight_exponent_arithmetic() {
        let l = lattice();
        let exps = ExponentVector::new(vec![2.0, 2.0]).unwrap();
        let ws = [Weight::power(1, 0.4).unwrap(), Weight::power(1, -0.2).unwrap()];
        let nu = nu_weight(&ws, &exps, NuMode::Czo, &l).unwrap();
        assert!((nu.as_power().unwrap().exponent - 0.1).abs() < 1e-15);
        let nu = nu_weight(&ws, &exps, NuMode::Fractional, &l).unwrap();
        assert!((nu.as_power().unwrap().exponent - 0.2).abs() < 1e-15);
        let units = [Weight::unit(1), Weight::unit(1)];
        let nu = nu_weight(&units, &exps, NuMode::Czo, &l).unwrap();
        assert_eq!(nu, Weight::unit(1));
        let mixed = [Weight::unit(1), Weight::sampled(GridFunction::constant(&l, 4.0)).unwrap()];
        let nu = nu_weight(&mixed, &exps, NuMode::Czo, &l).unwrap();
        match nu {
            Weight::Sampled(g) => assert!(g.values().iter().all(|v| (v - 2.0).abs() < 1e-14)),
            Weight::Power(_) => panic!("mixed inputs must give a sampled weight"),
        }
    }

    #[test]
    fn doubling_examples() {
        let l = lattice();
        let fam = BallFamily::centered(&l, &[0.25, 0.5, 1.0]).unwrap();
        let r = doubling_constant(&Weight::unit(1), &fam).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        let r = doubling_constant(&Weight::power(1, 0.5).unwrap(), &fam).unwrap();
        assert!((r.value - 2f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn ainfty_examples() {
        let l = lattice();
        let fam = BallFamily::centered(&l, &[0.5, 1.0, 2.0]).unwrap();
        let d = ainfty_diagnostics(&Weight::unit(1), &fam).unwrap();
        assert!((d.reverse_jensen.value - 1.0).abs() < 1e-12);
        assert!((d.delta.unwrap().value - 1.0).abs() < 1e-12);

        let d = ainfty_diagnostics(&Weight::power(1, 0.5).unwrap(), &fam).unwrap();
        assert!((d.delta.unwrap().value - 1.5).abs() < 1e-12);
        assert!(d.reverse_jensen.value >= 1.0);

        let sampled = Weight::sampled(GridFunction::constant(&l, 3.0)).unwrap();
        let d = ainfty_diagnostics(&sampled, &fam).unwrap();
        assert!((d.delta.unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_prime_of_power() {
        let l = lattice();
        let fam = BallFamily::centered(&l, &[1.0]).unwrap();
        let d = ainfty_diagnostics_with_power(&Weight::power(1, 0.5).unwrap(), 2.0, &fam).unwrap();
        // (|x|^{1/2})^2 = |x| → w(E)/w(B) = (|E|/|B|)^2
        assert!((d.delta_prime.unwrap().value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_delta_is_flagged() {
        let l = Lattice::new(1, 1.0, 5).unwrap();
        let fam = BallFamily::centered(&l, &[0.6]).unwrap();
        let w = Weight::sampled(GridFunction::constant(&l, 1.0)).unwrap();
        let d = ainfty_diagnostics(&w, &fam).unwrap();
        assert!(d.delta.is_none());
        assert!(!d.flags.is_empty());
    }

    #[test]
    fn exponent_vector_and_fractional_params() {
        let e = ExponentVector::new(vec![2.0, 2.0]).unwrap();
        assert_eq!(e.p(), 1.0);
        assert_eq!(e.conjugate(0), 2.0);
        assert!(ExponentVector::new(vec![2.0]).is_err());
        assert!(ExponentVector::new(vec![0.5, 2.0]).is_err());
        assert!(ExponentVector::new(vec![1.0, 3.0]).unwrap().conjugate(0).is_infinite());

        let f = FractionalParams::new(e.clone(), 0.5, 1).unwrap();
        assert!((f.q() - 2.0).abs() < 1e-12);
        assert!((f.q_k(0) - 4.0).abs() < 1e-12);
        let inv: f64 = f.q_components().iter().map(|q| 1.0 / q).sum();
        assert!((inv - 1.0 / f.q()).abs() < 1e-12);
        assert!(FractionalParams::new(e.clone(), 2.0, 1).is_err());
        assert!(FractionalParams::new(e, 1.0, 1).is_err());
    }

    #[test]
    fn trend_classification() {
        assert_eq!(Trend::classify(1.0, 1.03), Trend::Stable);
        assert_eq!(Trend::classify(1.0, 2.5), Trend::Unbounded);
        assert_eq!(Trend::classify(1.0, f64::INFINITY), Trend::Unbounded);
        assert_eq!(Trend::classify(1.0, 1.3), Trend::Undetermined);
    }
}

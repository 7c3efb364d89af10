//! Truncated uniform discretization of `R^n`.
//!
//! A [`Lattice`] samples `[-L, L]^n` with `N` points per axis (`N` odd, so the
//! origin is a node). Every integral in the crate is the midpoint sum
//! `h^n * sum f(x)` over the nodes of a region, and ball membership is decided
//! by the node position alone with the strict test `|x - c| < r`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack applied to the strict membership test, so that nodes whose
/// distance equals the radius up to rounding are consistently excluded.
const MEMBERSHIP_SLACK: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
    half_width: f64,
    points_per_axis: usize,
}

impl Lattice {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidLattice("dimension must be positive".into()));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidLattice(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        if points_per_axis < 3 || points_per_axis.is_multiple_of(2) {
            return Err(Error::InvalidLattice(format!(
                "points per axis must be odd and at least 3, got {points_per_axis}"
            )));
        }
        let total = (points_per_axis as u128).checked_pow(dim as u32);
        if total.is_none_or(|t| t > u32::MAX as u128) {
            return Err(Error::InvalidLattice("too many lattice points".into()));
        }
        Ok(Self {
            dim,
            half_width,
            points_per_axis,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Grid spacing `h = 2L / (N - 1)`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis - 1) as f64
    }

    /// Volume `h^n` of one quadrature cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of nodes, `N^n`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of the `i`-th node along any axis.
    pub fn axis_coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Writes the coordinates of node `index` into `out` (length `dim`).
    pub fn point_into(&self, index: usize, out: &mut [f64]) {
        let n = self.points_per_axis;
        let mut rest = index;
        for k in (0..self.dim).rev() {
            out[k] = self.axis_coordinate(rest % n);
            rest /= n;
        }
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.point_into(index, &mut out);
        out
    }

    /// Row-major linear index of a multi-index (axis 0 varies slowest).
    pub fn linear_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .fold(0, |acc, &i| acc * self.points_per_axis + i)
    }

    pub fn origin_index(&self) -> usize {
        let mid = self.points_per_axis / 2;
        self.linear_index(&vec![mid; self.dim])
    }

    /// Same domain, spacing halved: `N -> 2N - 1`.
    pub fn refined(&self) -> Self {
        Self {
            points_per_axis: 2 * self.points_per_axis - 1,
            ..self.clone()
        }
    }

    /// Indices of nodes strictly inside `ball`, in increasing order.
    pub fn nodes_in_ball(&self, ball: &Ball) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_node_in_ball(ball, |i| out.push(i));
        out
    }

    /// Number of nodes strictly inside `ball`.
    pub fn count_in_ball(&self, ball: &Ball) -> usize {
        let mut count = 0;
        self.for_each_node_in_ball(ball, |_| count += 1);
        count
    }

    pub(crate) fn for_each_node_in_ball(&self, ball: &Ball, mut visit: impl FnMut(usize)) {
        debug_assert_eq!(ball.center.len(), self.dim);
        let h = self.spacing();
        let n = self.points_per_axis;
        let r = ball.radius;
        let r2 = r * r * (1.0 - MEMBERSHIP_SLACK);

        let mut lo = vec![0usize; self.dim];
        let mut hi = vec![0usize; self.dim];
        for k in 0..self.dim {
            let c = ball.center[k] + self.half_width;
            let a = ((c - r) / h).ceil();
            let b = ((c + r) / h).floor();
            if b < 0.0 || a > (n - 1) as f64 {
                return;
            }
            lo[k] = a.max(0.0) as usize;
            hi[k] = (b.min((n - 1) as f64)) as usize;
        }

        let mut multi = lo.clone();
        loop {
            let mut d2 = 0.0;
            for (&i, c) in multi.iter().zip(&ball.center) {
                let d = self.axis_coordinate(i) - c;
                d2 += d * d;
            }
            if d2 < r2 {
                visit(self.linear_index(&multi));
            }
            // odometer over the bounding box, last axis fastest
            let mut k = self.dim;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                if multi[k] < hi[k] {
                    multi[k] += 1;
                    break;
                }
                multi[k] = lo[k];
            }
        }
    }

    /// Whether the open ball meets the closed domain `[-L, L]^n`.
    pub fn ball_meets_domain(&self, ball: &Ball) -> bool {
        let d2: f64 = ball
            .center
            .iter()
            .map(|&c| {
                let excess = (c.abs() - self.half_width).max(0.0);
                excess * excess
            })
            .sum();
        d2 < ball.radius * ball.radius
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidBall(format!("radius must be positive, got {radius}")));
        }
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidBall("center must be a finite point".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn centered(dim: usize, radius: f64) -> Result<Self> {
        Self::new(vec![0.0; dim], radius)
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `λB`: same center, radius multiplied by `factor`.
    pub fn dilate(&self, factor: f64) -> Self {
        assert!(factor > 0.0, "dilation factor must be positive");
        Self {
            center: self.center.clone(),
            radius: self.radius * factor,
        }
    }

    /// Strict membership `|x - c| < r` (up to rounding slack).
    pub fn contains(&self, x: &[f64]) -> bool {
        let d2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        d2 < self.radius * self.radius * (1.0 - MEMBERSHIP_SLACK)
    }

    /// Exact Lebesgue measure of the ball.
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / dim as f64 * unit_ball_volume(dim - 2),
    }
}

/// A real function sampled at every node of a lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    lattice: Lattice,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(lattice: Lattice, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::InvalidGridFunction(format!(
                "expected {} values, got {}",
                lattice.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGridFunction(format!(
                "non-finite value at node {i}"
            )));
        }
        Ok(Self { lattice, values })
    }

    pub fn constant(lattice: &Lattice, value: f64) -> Self {
        Self {
            values: vec![value; lattice.len()],
            lattice: lattice.clone(),
        }
    }

    pub fn zeros(lattice: &Lattice) -> Self {
        Self::constant(lattice, 0.0)
    }

    pub fn from_fn(lattice: &Lattice, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut x = vec![0.0; lattice.dim()];
        let values = (0..lattice.len())
            .map(|i| {
                lattice.point_into(i, &mut x);
                f(&x)
            })
            .collect();
        Self::new(lattice.clone(), values)
    }

    /// Indicator of the box `prod [lo_k, hi_k]`, sampled as the fraction of
    /// each node's cell that lies inside the box. Interior nodes get 1,
    /// nodes sitting on a face get 1/2.
    pub fn indicator_box(lattice: &Lattice, lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != lattice.dim() || hi.len() != lattice.dim() {
            return Err(Error::DimensionMismatch {
                expected: lattice.dim(),
                got: lo.len().min(hi.len()),
            });
        }
        let h = lattice.spacing();
        Self::from_fn(lattice, |x| {
            x.iter()
                .zip(lo.iter().zip(hi))
                .map(|(&xk, (&a, &b))| {
                    let overlap = (xk + 0.5 * h).min(b) - (xk - 0.5 * h).max(a);
                    (overlap / h).clamp(0.0, 1.0)
                })
                .product()
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.lattice.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            lattice: self.lattice.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            lattice: self.lattice.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        Self::new(
            self.lattice.clone(),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Indices of nonzero nodes.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Largest `|x|_∞` over nodes where the function is nonzero.
    pub fn support_radius_sup(&self) -> f64 {
        let mut x = vec![0.0; self.lattice.dim()];
        let mut out: f64 = 0.0;
        for i in self.support() {
            self.lattice.point_into(i, &mut x);
            for &c in &x {
                out = out.max(c.abs());
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Integration region: a ball or the whole lattice domain.
#[derive(Clone, Copy, Debug)]
pub enum Region<'a> {
    Ball(&'a Ball),
    Domain,
}

/// Result of a quadrature sum; `nodes == 0` flags an empty intersection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub nodes: usize,
}

impl Quadrature {
    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }
}

/// Midpoint sum `h^n * sum_{x in region} f(x)`.
pub fn integrate(f: &GridFunction, region: Region<'_>) -> f64 {
    integrate_detailed(f, region).value
}

pub fn integrate_detailed(f: &GridFunction, region: Region<'_>) -> Quadrature {
    let lattice = f.lattice();
    let cell = lattice.cell_volume();
    match region {
        Region::Domain => Quadrature {
            value: cell * f.values().iter().sum::<f64>(),
            nodes: lattice.len(),
        },
        Region::Ball(ball) => {
            let mut sum = 0.0;
            let mut nodes = 0;
            lattice.for_each_node_in_ball(ball, |i| {
                sum += f.value(i);
                nodes += 1;
            });
            Quadrature {
                value: cell * sum,
                nodes,
            }
        }
    }
}

/// Splits `f` into `f·χ_{2B}` and the remainder.
pub fn split_at_ball(f: &GridFunction, ball: &Ball) -> (GridFunction, GridFunction) {
    let lattice = f.lattice();
    let doubled = ball.dilate(2.0);
    let mut near = vec![0.0; lattice.len()];
    let mut far = f.values().to_vec();
    lattice.for_each_node_in_ball(&doubled, |i| {
        near[i] = f.value(i);
        far[i] = 0.0;
    });
    (
        GridFunction {
            lattice: lattice.clone(),
            values: near,
        },
        GridFunction {
            lattice: lattice.clone(),
            values: far,
        },
    )
}

/// Generation recipe for a [`BallFamily`]: centers on the sublattice of nodes
/// whose offset from the origin index is a multiple of `center_stride` along
/// every axis, radii `base_radius * ratio^j` for `j < count`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub center_stride: usize,
    pub base_radius: f64,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    pub count: usize,
}

fn default_ratio() -> f64 {
    2.0
}

impl FamilySpec {
    pub fn new(center_stride: usize, base_radius: f64, count: usize) -> Self {
        Self {
            center_stride,
            base_radius,
            ratio: 2.0,
            count,
        }
    }

    /// Recipe for the refined lattice: same physical centers, radii extended
    /// one dyadic step downward.
    pub fn refined(&self) -> Self {
        Self {
            center_stride: self.center_stride * 2,
            base_radius: self.base_radius / self.ratio,
            ratio: self.ratio,
            count: self.count + 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Generated(FamilySpec),
    Explicit,
}

/// Finite set of balls standing in for "all balls".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallFamily {
    lattice: Lattice,
    balls: Vec<Ball>,
    provenance: Provenance,
}

impl BallFamily {
    /// Explicit family; every ball must meet the lattice domain.
    pub fn explicit(lattice: &Lattice, balls: Vec<Ball>) -> Result<Self> {
        if balls.is_empty() {
            return Err(Error::InvalidFamily("family is empty".into()));
        }
        for b in &balls {
            if b.dim() != lattice.dim() {
                return Err(Error::DimensionMismatch {
                    expected: lattice.dim(),
                    got: b.dim(),
                });
            }
            if !lattice.ball_meets_domain(b) {
                return Err(Error::InvalidFamily(format!(
                    "ball at {:?} with radius {} misses the domain",
                    b.center(),
                    b.radius()
                )));
            }
        }
        Ok(Self {
            lattice: lattice.clone(),
            balls,
            provenance: Provenance::Explicit,
        })
    }

    /// Balls centered at the origin with the given radii.
    pub fn centered(lattice: &Lattice, radii: &[f64]) -> Result<Self> {
        let balls = radii
            .iter()
            .map(|&r| Ball::centered(lattice.dim(), r))
            .collect::<Result<Vec<_>>>()?;
        Self::explicit(lattice, balls)
    }

    /// The lattice the family was built against.
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Ball> {
        self.balls.iter()
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Union of two families on the same lattice, `self` first.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        let mut balls = self.balls.clone();
        balls.extend(other.balls.iter().cloned());
        Ok(Self {
            lattice: self.lattice.clone(),
            balls,
            provenance: Provenance::Explicit,
        })
    }

    /// Sub-family of the balls at the given positions.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let balls: Vec<Ball> = indices.iter().map(|&i| self.balls[i].clone()).collect();
        Self::explicit(&self.lattice, balls)
    }
}

impl<'a> IntoIterator for &'a BallFamily {
    type Item = &'a Ball;
    type IntoIter = std::slice::Iter<'a, Ball>;

    fn into_iter(self) -> Self::IntoIter {
        self.balls.iter()
    }
}

/// Builds the family `{B(c, r0·ratio^j)}`, center-major and radius-minor.
pub fn make_ball_family(lattice: &Lattice, spec: &FamilySpec) -> Result<BallFamily> {
    let h = lattice.spacing();
    if spec.base_radius < h * (1.0 - 1e-12) {
        return Err(Error::InvalidFamily(format!(
            "base radius {} is smaller than the lattice spacing {h}",
            spec.base_radius
        )));
    }
    if spec.count == 0 {
        return Err(Error::InvalidFamily("radius count must be at least 1".into()));
    }
    if spec.center_stride == 0 {
        return Err(Error::InvalidFamily("center stride must be positive".into()));
    }
    if !(spec.ratio > 1.0) {
        return Err(Error::InvalidFamily("radius ratio must exceed 1".into()));
    }

    let n = lattice.points_per_axis();
    let mid = n / 2;
    let stride = spec.center_stride;
    let first = mid % stride;
    let axis: Vec<usize> = (first..n).step_by(stride).collect();

    let dim = lattice.dim();
    let mut balls = Vec::new();
    let mut multi = vec![0usize; dim];
    loop {
        let center: Vec<f64> = multi.iter().map(|&k| lattice.axis_coordinate(axis[k])).collect();
        for j in 0..spec.count {
            let ball = Ball::new(center.clone(), spec.base_radius * spec.ratio.powi(j as i32))?;
            if lattice.ball_meets_domain(&ball) {
                balls.push(ball);
            }
        }
        let mut k = dim;
        loop {
            if k == 0 {
                if balls.is_empty() {
                    return Err(Error::InvalidFamily("no ball meets the domain".into()));
                }
                return Ok(BallFamily {
                    lattice: lattice.clone(),
                    balls,
                    provenance: Provenance::Generated(spec.clone()),
                });
            }
            k -= 1;
            if multi[k] + 1 < axis.len() {
                multi[k] += 1;
                break;
            }
            multi[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_examples() {
        let l = Lattice::new(1, 4.0, 9).unwrap();
        assert_eq!(l.spacing(), 1.0);
        let pts: Vec<f64> = (0..l.len()).map(|i| l.point(i)[0]).collect();
        assert_eq!(pts, vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0]);

        let l = Lattice::new(1, 1.0, 3).unwrap();
        let pts: Vec<f64> = (0..l.len()).map(|i| l.point(i)[0]).collect();
        assert_eq!(pts, vec![-1.0, 0.0, 1.0]);

        let l = Lattice::new(2, 2.0, 5).unwrap();
        assert_eq!(l.len(), 25);
        assert_eq!(l.spacing(), 1.0);
        assert_eq!(l.point(l.origin_index()), vec![0.0, 0.0]);
    }

    #[test]
    fn lattice_rejects_bad_input() {
        assert!(Lattice::new(1, 1.0, 4).is_err());
        assert!(Lattice::new(1, 1.0, 1).is_err());
        assert!(Lattice::new(1, 0.0, 5).is_err());
        assert!(Lattice::new(1, -1.0, 5).is_err());
        assert!(Lattice::new(0, 1.0, 5).is_err());
    }

    #[test]
    fn integrate_examples() {
        let l = Lattice::new(1, 2.0, 401).unwrap();
        let h = l.spacing();
        let ball = Ball::centered(1, 1.0).unwrap();

        let one = GridFunction::constant(&l, 1.0);
        assert!((integrate(&one, Region::Ball(&ball)) - 2.0).abs() <= 2.0 * h);

        let abs = GridFunction::from_fn(&l, |x| x[0].abs()).unwrap();
        assert!((integrate(&abs, Region::Ball(&ball)) - 1.0).abs() <= 2.0 * h);

        let zero = GridFunction::zeros(&l);
        assert_eq!(integrate(&zero, Region::Ball(&ball)), 0.0);
        assert_eq!(integrate(&zero, Region::Domain), 0.0);
    }

    #[test]
    fn empty_intersection_is_flagged() {
        let l = Lattice::new(1, 1.0, 5).unwrap();
        let far = Ball::new(vec![10.0], 1.0).unwrap();
        let q = integrate_detailed(&GridFunction::constant(&l, 1.0), Region::Ball(&far));
        assert_eq!(q.value, 0.0);
        assert!(q.is_empty());
    }

    #[test]
    fn ball_membership_is_strict() {
        let l = Lattice::new(1, 4.0, 9).unwrap();
        let b = Ball::centered(1, 2.0).unwrap();
        let inside: Vec<f64> = l.nodes_in_ball(&b).iter().map(|&i| l.point(i)[0]).collect();
        assert_eq!(inside, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn split_examples() {
        let l = Lattice::new(1, 4.0, 17).unwrap();
        let f = GridFunction::constant(&l, 1.0);
        let b = Ball::centered(1, 1.0).unwrap();
        let (near, far) = split_at_ball(&f, &b);
        for i in 0..l.len() {
            let x = l.point(i)[0];
            let expect_near = if x.abs() < 2.0 { 1.0 } else { 0.0 };
            assert_eq!(near.value(i), expect_near, "x = {x}");
            assert_eq!(far.value(i), 1.0 - expect_near);
            assert_eq!(near.value(i) * far.value(i), 0.0);
        }

        let inner = GridFunction::from_fn(&l, |x| if x[0].abs() < 1.5 { x[0] } else { 0.0 }).unwrap();
        let (near, far) = split_at_ball(&inner, &b);
        assert!(far.is_zero());
        assert_eq!(near, inner);
    }

    #[test]
    fn family_examples() {
        let l = Lattice::new(1, 2.0, 9).unwrap();
        let fam = make_ball_family(&l, &FamilySpec::new(4, 0.5, 3)).unwrap();
        assert_eq!(fam.len(), 9);
        let first: Vec<(f64, f64)> = fam.iter().take(3).map(|b| (b.center()[0], b.radius())).collect();
        assert_eq!(first, vec![(-2.0, 0.5), (-2.0, 1.0), (-2.0, 2.0)]);

        let single = BallFamily::centered(&l, &[1.0]).unwrap();
        assert_eq!(single.len(), 1);

        assert!(make_ball_family(&l, &FamilySpec::new(4, 0.25, 1)).is_err());
        assert!(make_ball_family(&l, &FamilySpec::new(4, 0.5, 0)).is_err());
    }

    #[test]
    fn indicator_box_half_weights_faces() {
        let l = Lattice::new(1, 2.0, 9).unwrap();
        let f = GridFunction::indicator_box(&l, &[0.0], &[1.0]).unwrap();
        let v: Vec<f64> = f.values().to_vec();
        assert_eq!(v, vec![0.0, 0.0, 0.0, 0.0, 0.5, 1.0, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn unit_ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
    }
}

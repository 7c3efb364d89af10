//! Multilinear singular and fractional integrals on the lattice.
//!
//! Both operators are plain tensor-product midpoint sums
//! `h^{mn} Σ_{y_1..y_m} K(x, y_1, ..., y_m) Π f_i(y_i)`, restricted to the
//! supports of the inputs and evaluated independently per output node. The
//! singular integral drops every tuple within distance `δ` of the diagonal
//! (a node-level principal value); the fractional integral only drops the
//! singular node itself.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{integrate, Ball, GridFunction, Lattice, Region};
use crate::weights::FractionalParams;

/// Kernel evaluated at `x` and the flattened tuple `ys = (y_1, ..., y_m)`.
pub type KernelFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum KernelKind {
    /// `(u + v) / (u² + v²)^{3/2}` with `u = x - y_1`, `v = x - y_2` (n = 1, m = 2).
    HomogeneousOdd,
    /// `(Σ |x - y_k|)^{-mn}`.
    FractionalSize,
    /// `sgn(u) / (|u| + |v|)²` (n = 1, m = 2): right size, jump across `u = 0`.
    AngularStep,
    Zero,
    Custom(Arc<KernelFn>),
}

impl fmt::Debug for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HomogeneousOdd => f.write_str("HomogeneousOdd"),
            Self::FractionalSize => f.write_str("FractionalSize"),
            Self::AngularStep => f.write_str("AngularStep"),
            Self::Zero => f.write_str("Zero"),
            Self::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// A kernel with its declared class constants `A` and `ε`.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    m: usize,
    n: usize,
    kind: KernelKind,
    size_constant: f64,
    epsilon: f64,
}

impl KernelSpec {
    pub fn new(m: usize, n: usize, kind: KernelKind, size_constant: f64, epsilon: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Config("kernel degree and dimension must be positive".into()));
        }
        if matches!(kind, KernelKind::HomogeneousOdd | KernelKind::AngularStep) && (m, n) != (2, 1) {
            return Err(Error::Config(format!(
                "{kind:?} is defined for m = 2, n = 1 only, got m = {m}, n = {n}"
            )));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Config(format!("ε must lie in (0, 1], got {epsilon}")));
        }
        let zero = matches!(kind, KernelKind::Zero);
        if !(size_constant > 0.0 || zero && size_constant >= 0.0) || !size_constant.is_finite() {
            return Err(Error::Config(format!(
                "declared constant A must be positive, got {size_constant}"
            )));
        }
        Ok(Self {
            m,
            n,
            kind,
            size_constant,
            epsilon,
        })
    }

    /// The odd bilinear kernel on the line with `A = 40`, `ε = 1`. Its size
    /// constant is `2√2`; the regularity constants are just under 40.
    pub fn homogeneous_odd() -> Self {
        Self::new(2, 1, KernelKind::HomogeneousOdd, 40.0, 1.0).expect("valid builtin")
    }

    /// `(Σ|x - y_k|)^{-mn}` with `A = 2m·mn·2^{mn}`, `ε = 1`.
    pub fn fractional_size(m: usize, n: usize) -> Result<Self> {
        let mn = (m * n) as f64;
        Self::new(m, n, KernelKind::FractionalSize, 2.0 * m as f64 * mn * 2f64.powf(mn), 1.0)
    }

    /// A size-class kernel that violates the regularity condition.
    pub fn angular_step() -> Self {
        Self::new(2, 1, KernelKind::AngularStep, 2.0, 1.0).expect("valid builtin")
    }

    pub fn zero(m: usize, n: usize) -> Result<Self> {
        Self::new(m, n, KernelKind::Zero, 0.0, 1.0)
    }

    pub fn custom(m: usize, n: usize, f: Arc<KernelFn>, size_constant: f64, epsilon: f64) -> Result<Self> {
        Self::new(m, n, KernelKind::Custom(f), size_constant, epsilon)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn size_constant(&self) -> f64 {
        self.size_constant
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `K(x, y_1, ..., y_m)` with `ys` flattened; callers keep off the diagonal.
    pub fn evaluate(&self, x: &[f64], ys: &[f64]) -> f64 {
        match &self.kind {
            KernelKind::HomogeneousOdd => {
                let u = x[0] - ys[0];
                let v = x[0] - ys[1];
                let r2 = u * u + v * v;
                (u + v) / (r2 * r2.sqrt())
            }
            KernelKind::FractionalSize => {
                let s = sum_of_distances(x, ys);
                s.powi(-((self.m * self.n) as i32))
            }
            KernelKind::AngularStep => {
                let u = x[0] - ys[0];
                let v = x[0] - ys[1];
                let s = u.abs() + v.abs();
                u.signum() / (s * s)
            }
            KernelKind::Zero => 0.0,
            KernelKind::Custom(f) => f(x, ys),
        }
    }
}

/// `Σ_k |x - y_k|`.
fn sum_of_distances(x: &[f64], ys: &[f64]) -> f64 {
    ys.chunks(x.len())
        .map(|y| x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .sum()
}

/// `max_k |x - y_k|`.
fn max_distance(x: &[f64], ys: &[f64]) -> f64 {
    ys.chunks(x.len())
        .map(|y| x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// kernel-class verification

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub count: usize,
    pub seed: u64,
    /// Shift magnitudes are `t · ½ max_k |x - y_k|` with `t` log-uniform in
    /// `[min_shift_fraction, 1]`.
    pub min_shift_fraction: f64,
}

impl SamplingPlan {
    pub fn new(count: usize, seed: u64) -> Self {
        Self {
            count,
            seed,
            min_shift_fraction: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelClassReport {
    pub declared_constant: f64,
    pub epsilon: f64,
    /// `max |K| (Σ|x - y_k|)^{mn}`.
    pub size: f64,
    /// `max |K(x) - K(x')| (Σ|x - y_k|)^{mn+ε} / |x - x'|^ε`.
    pub regularity_x: f64,
    /// Same for a shift of `y_k`, one entry per variable.
    pub regularity_y: Vec<f64>,
    pub samples: usize,
    pub skipped: usize,
    pub pass: bool,
}

/// Slack on the declared constant when judging a kernel-class check.
pub const KERNEL_CLASS_SLACK: f64 = 1.05;

fn uniform_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v = uniform_vector(rng, n);
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// Samples off-diagonal tuples and perturbations obeying
/// `|x - x'| <= ½ max_k |x - y_k|` (and the same bound for each `y_k`), and
/// records the empirical size and regularity constants.
pub fn verify_kernel_class(kernel: &KernelSpec, plan: &SamplingPlan) -> KernelClassReport {
    let (m, n) = (kernel.m, kernel.n);
    let mn = (m * n) as f64;
    let eps = kernel.epsilon;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut report = KernelClassReport {
        declared_constant: kernel.size_constant,
        epsilon: eps,
        size: 0.0,
        regularity_x: 0.0,
        regularity_y: vec![0.0; m],
        samples: 0,
        skipped: 0,
        pass: false,
    };
    let t_min = plan.min_shift_fraction.clamp(1e-12, 1.0);

    for _ in 0..plan.count {
        let x = uniform_vector(&mut rng, n);
        let scale = log_uniform(&mut rng, 1e-3, 10.0);
        let ys: Vec<f64> = (0..m)
            .flat_map(|_| uniform_vector(&mut rng, n))
            .zip(x.iter().cycle())
            .map(|(z, xi)| xi + scale * z)
            .collect();
        let s = sum_of_distances(&x, &ys);
        let k0 = kernel.evaluate(&x, &ys);
        if !(s > 0.0) || !k0.is_finite() {
            report.skipped += 1;
            continue;
        }
        report.samples += 1;
        report.size = report.size.max(k0.abs() * s.powf(mn));

        let reach = 0.5 * max_distance(&x, &ys);
        let shift = |rng: &mut ChaCha8Rng| -> (Vec<f64>, f64) {
            let t = log_uniform(rng, t_min, 1.0);
            let dir = random_direction(rng, n);
            let d: Vec<f64> = dir.iter().map(|a| a * t * reach).collect();
            (d, t * reach)
        };

        let (d, len) = shift(&mut rng);
        let x2: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
        let k1 = kernel.evaluate(&x2, &ys);
        if k1.is_finite() && len > 0.0 {
            let c = (k0 - k1).abs() * s.powf(mn + eps) / len.powf(eps);
            report.regularity_x = report.regularity_x.max(c);
        }
        for k in 0..m {
            let (d, len) = shift(&mut rng);
            let mut ys2 = ys.clone();
            for (a, b) in ys2[k * n..(k + 1) * n].iter_mut().zip(&d) {
                *a += b;
            }
            let k1 = kernel.evaluate(&x, &ys2);
            if k1.is_finite() && len > 0.0 {
                let c = (k0 - k1).abs() * s.powf(mn + eps) / len.powf(eps);
                report.regularity_y[k] = report.regularity_y[k].max(c);
            }
        }
    }

    let limit = KERNEL_CLASS_SLACK * kernel.size_constant;
    report.pass = report.samples > 0
        && report.size <= limit
        && report.regularity_x <= limit
        && report.regularity_y.iter().all(|&c| c <= limit);
    report
}

/// Brute-force size constant of a convolution-type bilinear kernel on the
/// line: `max_θ |K(0, -cos θ, -sin θ)| (|cos θ| + |sin θ|)²` over `steps`
/// angles.
pub fn angular_size_sweep(kernel: &KernelSpec, steps: usize) -> f64 {
    (0..steps)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
            let (u, v) = (th.cos(), th.sin());
            let s = u.abs() + v.abs();
            kernel.evaluate(&[0.0], &[-u, -v]).abs() * s * s
        })
        .fold(0.0, f64::max)
}

/// The size constant `2√2` of [`KernelSpec::homogeneous_odd`].
pub const HOMOGENEOUS_ODD_SIZE: f64 = 2.0 * SQRT_2;

// ---------------------------------------------------------------------------
// operators

/// Drop tuples with `|(x - y_1, ..., x - y_m)| <= δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    delta: f64,
}

impl TruncationPolicy {
    pub fn new(delta: f64, lattice: &Lattice) -> Result<Self> {
        if !(delta >= lattice.spacing() * (1.0 - 1e-12)) || !delta.is_finite() {
            return Err(Error::Config(format!(
                "truncation radius {delta} is below the lattice spacing {}",
                lattice.spacing()
            )));
        }
        Ok(Self { delta })
    }

    /// `δ = 2h`.
    pub fn default_for(lattice: &Lattice) -> Self {
        Self {
            delta: 2.0 * lattice.spacing(),
        }
    }

    /// `δ = c·h` for `c >= 1`.
    pub fn in_cells(cells: f64, lattice: &Lattice) -> Result<Self> {
        Self::new(cells * lattice.spacing(), lattice)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Support coordinates and values of one input.
struct Support {
    points: Vec<f64>,
    values: Vec<f64>,
}

fn supports(fs: &[GridFunction]) -> Vec<Support> {
    fs.iter()
        .map(|f| {
            let lattice = f.lattice();
            let n = lattice.dim();
            let idx = f.support();
            let mut points = vec![0.0; idx.len() * n];
            for (k, &i) in idx.iter().enumerate() {
                lattice.point_into(i, &mut points[k * n..(k + 1) * n]);
            }
            Support {
                points,
                values: idx.iter().map(|&i| f.value(i)).collect(),
            }
        })
        .collect()
}

fn common_lattice(fs: &[GridFunction], m: usize, n: usize) -> Result<&Lattice> {
    if fs.len() != m {
        return Err(Error::Arity {
            expected: m,
            got: fs.len(),
        });
    }
    let lattice = fs[0].lattice();
    if fs.iter().any(|f| f.lattice() != lattice) {
        return Err(Error::LatticeMismatch);
    }
    if lattice.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: lattice.dim(),
        });
    }
    Ok(lattice)
}

/// `Σ_{tuples} kernel(x, ys, |x - ys|²) Π f_i(y_i)` over the support tuples,
/// walking variables depth first and carrying the partial product and
/// squared distance.
fn tuple_sum(
    x: &[f64],
    sup: &[Support],
    ys: &mut [f64],
    level: usize,
    product: f64,
    dist2: f64,
    kernel: &impl Fn(&[f64], &[f64], f64) -> f64,
) -> f64 {
    let n = x.len();
    if level == sup.len() {
        return product * kernel(x, ys, dist2);
    }
    let s = &sup[level];
    let mut total = 0.0;
    for (k, &v) in s.values.iter().enumerate() {
        let y = &s.points[k * n..(k + 1) * n];
        let mut d2 = 0.0;
        for (a, b) in x.iter().zip(y) {
            d2 += (a - b) * (a - b);
        }
        ys[level * n..(level + 1) * n].copy_from_slice(y);
        total += tuple_sum(x, sup, ys, level + 1, product * v, dist2 + d2, kernel);
    }
    total
}

fn apply_with(
    lattice: &Lattice,
    fs: &[GridFunction],
    nodes: &[usize],
    kernel: impl Fn(&[f64], &[f64], f64) -> f64 + Sync,
) -> Vec<f64> {
    let n = lattice.dim();
    let m = fs.len();
    let sup = supports(fs);
    if sup.iter().any(|s| s.values.is_empty()) {
        return vec![0.0; nodes.len()];
    }
    let weight = lattice.cell_volume().powi(m as i32);
    nodes
        .par_iter()
        .map(|&i| {
            let x = lattice.point(i);
            let mut ys = vec![0.0; m * n];
            weight * tuple_sum(&x, &sup, &mut ys, 0, 1.0, 0.0, &kernel)
        })
        .collect()
}

/// Truncated singular integral at the listed nodes.
pub fn apply_czo_at(
    kernel: &KernelSpec,
    fs: &[GridFunction],
    trunc: TruncationPolicy,
    nodes: &[usize],
) -> Result<Vec<f64>> {
    let lattice = common_lattice(fs, kernel.m, kernel.n)?;
    let d2 = trunc.delta * trunc.delta * (1.0 + 1e-10);
    Ok(apply_with(lattice, fs, nodes, |x, ys, dist2| {
        if dist2 <= d2 {
            0.0
        } else {
            kernel.evaluate(x, ys)
        }
    }))
}

/// `T(f_1, ..., f_m)` on every node, dropping tuples within `δ` of the
/// diagonal.
pub fn apply_czo(kernel: &KernelSpec, fs: &[GridFunction], trunc: TruncationPolicy) -> Result<GridFunction> {
    let lattice = common_lattice(fs, kernel.m, kernel.n)?;
    let nodes: Vec<usize> = (0..lattice.len()).collect();
    let values = apply_czo_at(kernel, fs, trunc, &nodes)?;
    GridFunction::new(lattice.clone(), values)
}

/// Fractional integral at the listed nodes.
pub fn apply_fractional_at(fp: &FractionalParams, fs: &[GridFunction], nodes: &[usize]) -> Result<Vec<f64>> {
    let lattice = common_lattice(fs, fp.m(), fp.dim())?;
    let h = lattice.spacing();
    let skip = 0.25 * h * h;
    let power = -0.5 * ((fp.m() * fp.dim()) as f64 - fp.alpha());
    Ok(apply_with(lattice, fs, nodes, |_, _, dist2| {
        if dist2 < skip {
            0.0
        } else {
            dist2.powf(power)
        }
    }))
}

/// `I_α(f_1, ..., f_m)` on every node, skipping only the singular node.
pub fn apply_fractional(fp: &FractionalParams, fs: &[GridFunction]) -> Result<GridFunction> {
    let lattice = common_lattice(fs, fp.m(), fp.dim())?;
    let nodes: Vec<usize> = (0..lattice.len()).collect();
    let values = apply_fractional_at(fp, fs, &nodes)?;
    GridFunction::new(lattice.clone(), values)
}

// ---------------------------------------------------------------------------
// tail majorants

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum TailMode {
    Czo,
    Fractional { alpha: f64 },
}

/// `Σ_{j=1}^{J} Π_i |2^{j+1}B|^{-γ} ∫_{2^{j+1}B} |f_i|` with `γ = 1` for the
/// singular integral and `γ = 1 - α/(mn)` for the fractional one; volumes are
/// exact.
pub fn tail_majorant(fs: &[GridFunction], ball: &Ball, annuli: usize, mode: TailMode) -> Result<f64> {
    if fs.is_empty() {
        return Err(Error::Arity { expected: 1, got: 0 });
    }
    if annuli == 0 {
        return Err(Error::Config("tail majorant needs at least one annulus".into()));
    }
    let lattice = fs[0].lattice();
    if fs.iter().any(|f| f.lattice() != lattice) {
        return Err(Error::LatticeMismatch);
    }
    let m = fs.len();
    let gamma = match mode {
        TailMode::Czo => 1.0,
        TailMode::Fractional { alpha } => 1.0 - alpha / (m * lattice.dim()) as f64,
    };
    let abs: Vec<GridFunction> = fs.iter().map(GridFunction::abs).collect();
    let mut total = 0.0;
    for j in 1..=annuli {
        let big = ball.dilate(2f64.powi(j as i32 + 1));
        let vol = big.volume().powf(gamma);
        total += abs
            .iter()
            .map(|f| integrate(f, Region::Ball(&big)) / vol)
            .product::<f64>();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::ExponentVector;

    fn bump(l: &Lattice, c: f64, s: f64) -> GridFunction {
        GridFunction::from_fn(l, |x| {
            let t = (x[0] - c) / s;
            if t.abs() < 1.0 {
                (1.0 - t * t).powi(3)
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn size_constants() {
        let r = verify_kernel_class(&KernelSpec::fractional_size(2, 1).unwrap(), &SamplingPlan::new(2000, 1));
        assert!((r.size - 1.0).abs() < 1e-12);
        let odd = KernelSpec::homogeneous_odd();
        let sweep = angular_size_sweep(&odd, 100_000);
        assert!((sweep - HOMOGENEOUS_ODD_SIZE).abs() < 1e-6);
    }

    #[test]
    fn zero_kernel_passes() {
        let r = verify_kernel_class(&KernelSpec::zero(2, 1).unwrap(), &SamplingPlan::new(500, 3));
        assert_eq!(r.size, 0.0);
        assert_eq!(r.regularity_x, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn builtin_shapes_are_checked() {
        assert!(KernelSpec::new(2, 2, KernelKind::HomogeneousOdd, 1.0, 1.0).is_err());
        assert!(KernelSpec::new(2, 1, KernelKind::HomogeneousOdd, 1.0, 0.0).is_err());
        assert!(KernelSpec::new(2, 1, KernelKind::HomogeneousOdd, -1.0, 1.0).is_err());
    }

    #[test]
    fn odd_kernel_cancels_on_even_inputs() {
        let l = Lattice::new(1, 2.0, 65).unwrap();
        let f = bump(&l, 0.0, 0.7);
        let g = bump(&l, 0.0, 0.4);
        let t = apply_czo(&KernelSpec::homogeneous_odd(), &[f, g], TruncationPolicy::default_for(&l)).unwrap();
        assert!(t.value(l.origin_index()).abs() < 1e-12);
    }

    #[test]
    fn multilinear_in_each_slot() {
        let l = Lattice::new(1, 2.0, 33).unwrap();
        let f = bump(&l, 0.1, 0.6);
        let g = bump(&l, -0.2, 0.5);
        let k = KernelSpec::homogeneous_odd();
        let tr = TruncationPolicy::default_for(&l);
        let base = apply_czo(&k, &[f.clone(), g.clone()], tr).unwrap();
        let scaled = apply_czo(&k, &[f.scale(3.0), g], tr).unwrap();
        for (a, b) in base.values().iter().zip(scaled.values()) {
            assert!((3.0 * a - b).abs() <= 1e-12 * b.abs().max(1e-300));
        }
    }

    #[test]
    fn truncation_rejects_sub_cell_radius() {
        let l = Lattice::new(1, 2.0, 33).unwrap();
        assert!(TruncationPolicy::new(0.5 * l.spacing(), &l).is_err());
        assert!(TruncationPolicy::in_cells(1.0, &l).is_ok());
    }

    #[test]
    fn fractional_zero_and_positive() {
        let l = Lattice::new(1, 2.0, 33).unwrap();
        let fp = FractionalParams::new(ExponentVector::new(vec![2.0, 2.0]).unwrap(), 0.5, 1).unwrap();
        let f = bump(&l, 0.2, 0.5);
        let zero = apply_fractional(&fp, &[f.clone(), GridFunction::zeros(&l)]).unwrap();
        assert!(zero.is_zero());
        let out = apply_fractional(&fp, &[f.clone(), f]).unwrap();
        assert!(out.values().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn tail_majorant_examples() {
        let l = Lattice::new(1, 4.0, 129).unwrap();
        let ball = Ball::new(vec![0.0], 0.25).unwrap();
        let zero = GridFunction::zeros(&l);
        assert_eq!(tail_majorant(&[zero.clone(), zero], &ball, 3, TailMode::Czo).unwrap(), 0.0);
        // f ≡ 1 on 4B exactly: each average over 4B is (node count · h)/|4B| = 1
        let one = GridFunction::from_fn(&l, |x| if x[0].abs() < 1.0 { 1.0 } else { 0.0 }).unwrap();
        let term = tail_majorant(&[one.clone(), one.clone()], &ball, 1, TailMode::Czo).unwrap();
        assert!((term - 1.0).abs() < 2.0 * l.spacing());
        let mut last = 0.0;
        for j in 1..=5 {
            let v = tail_majorant(&[one.clone(), one.clone()], &ball, j, TailMode::Czo).unwrap();
            assert!(v >= last);
            last = v;
        }
    }
}

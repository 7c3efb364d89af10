//! Dense reference sums shared by the integration tests.
#![allow(dead_code)]

use morrey_lab::lattice::{GridFunction, Lattice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Node coordinate recomputed from the lattice parameters.
fn coordinate(l: &Lattice, i: usize) -> f64 {
    -l.half_width() + i as f64 * l.spacing()
}

/// Bilinear singular integral on a 1-D lattice by a full triple loop, with
/// kernel `(u + v) / (u² + v²)^{3/2}` and tuples within `δ` dropped.
pub fn dense_odd_czo(f: &GridFunction, g: &GridFunction, delta: f64) -> Vec<f64> {
    let l = f.lattice();
    let n = l.points_per_axis();
    let h = l.spacing();
    let cut = delta * delta * (1.0 + 1e-10);
    (0..n)
        .map(|ix| {
            let x = coordinate(l, ix);
            let mut sum = 0.0;
            for j in 0..n {
                for k in 0..n {
                    let u = x - coordinate(l, j);
                    let v = x - coordinate(l, k);
                    let r2 = u * u + v * v;
                    if r2 > cut {
                        sum += (u + v) / r2.powf(1.5) * f.value(j) * g.value(k);
                    }
                }
            }
            sum * h * h
        })
        .collect()
}

/// Bilinear fractional integral of order `alpha` on a 1-D lattice, skipping
/// the singular node.
pub fn dense_fractional(f: &GridFunction, g: &GridFunction, alpha: f64) -> Vec<f64> {
    let l = f.lattice();
    let n = l.points_per_axis();
    let h = l.spacing();
    (0..n)
        .map(|ix| {
            let x = coordinate(l, ix);
            let mut sum = 0.0;
            for j in 0..n {
                for k in 0..n {
                    let u = x - coordinate(l, j);
                    let v = x - coordinate(l, k);
                    let r2 = u * u + v * v;
                    if r2 >= 0.25 * h * h {
                        sum += r2.powf(-(2.0 - alpha) / 2.0) * f.value(j) * g.value(k);
                    }
                }
            }
            sum * h * h
        })
        .collect()
}

/// `max |a - b| / max |b|`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Deterministic signed test function with a ragged support.
pub fn ragged(l: &Lattice, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..l.len())
        .map(|_| {
            let r: f64 = rng.gen();
            if r < 0.3 {
                0.0
            } else {
                2.0 * r - 1.3
            }
        })
        .collect();
    GridFunction::new(l.clone(), values).unwrap()
}

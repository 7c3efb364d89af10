//! Test-function and weight corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::lattice::{Ball, GridFunction, Lattice};
use crate::weights::Weight;

/// `(1 - |x - c|²/s²)³` on `|x - c| < s`, zero elsewhere.
pub fn poly_bump(lattice: &Lattice, center: &[f64], scale: f64) -> Result<GridFunction> {
    GridFunction::from_fn(lattice, |x| {
        let t2: f64 = x
            .iter()
            .zip(center)
            .map(|(a, c)| ((a - c) / scale).powi(2))
            .sum();
        if t2 < 1.0 {
            (1.0 - t2).powi(3)
        } else {
            0.0
        }
    })
}

/// One sweep instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: usize,
    pub translation: f64,
    pub dilation: f64,
    pub amplitude: f64,
}

/// Cross product translations × dilations × amplitudes, translation-major.
pub fn sweep_instances(config: &ExperimentConfig) -> Vec<Instance> {
    let c = &config.corpus;
    let dilations = c.dilations.values();
    let mut out = Vec::new();
    for &translation in &c.translations {
        for &dilation in &dilations {
            for &amplitude in &c.amplitudes {
                out.push(Instance {
                    id: out.len(),
                    translation,
                    dilation,
                    amplitude,
                });
            }
        }
    }
    out
}

/// The inputs of `instance`: bump `i` sits at `x0 + offsets[i]·s` on the
/// first axis, and the first bump carries the amplitude.
pub fn instance_inputs(
    lattice: &Lattice,
    offsets: &[f64],
    instance: &Instance,
) -> Result<Vec<GridFunction>> {
    offsets
        .iter()
        .enumerate()
        .map(|(i, &o)| {
            let mut center = vec![0.0; lattice.dim()];
            center[0] = instance.translation + o * instance.dilation;
            let f = poly_bump(lattice, &center, instance.dilation)?;
            Ok(if i == 0 { f.scale(instance.amplitude) } else { f })
        })
        .collect()
}

/// Strictly positive sampled weights: smooth log-trigonometric ones
/// alternating with rough log-normal ones.
pub fn random_positive_weights(lattice: &Lattice, count: usize, seed: u64) -> Result<Vec<Weight>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = lattice.half_width();
    (0..count)
        .map(|k| {
            let values: Vec<f64> = if k % 2 == 0 {
                let modes: Vec<(f64, f64, f64)> = (0..4)
                    .map(|_| {
                        (
                            rng.gen_range(0.2..2.0),
                            rng.gen_range(0.5..6.0) / l,
                            rng.gen_range(0.0..std::f64::consts::TAU),
                        )
                    })
                    .collect();
                let mut x = vec![0.0; lattice.dim()];
                (0..lattice.len())
                    .map(|i| {
                        lattice.point_into(i, &mut x);
                        let s: f64 = modes
                            .iter()
                            .map(|(a, f, ph)| a * (f * x.iter().sum::<f64>() + ph).sin())
                            .sum();
                        s.exp()
                    })
                    .collect()
            } else {
                let sigma = rng.gen_range(0.1..1.5);
                let dist = LogNormal::new(0.0, sigma).expect("positive sigma");
                (0..lattice.len()).map(|_| dist.sample(&mut rng)).collect()
            };
            Weight::sampled(GridFunction::new(lattice.clone(), values)?)
        })
        .collect()
}

/// A tail-estimate instance: inputs and the ball they are split at.
#[derive(Clone, Debug)]
pub struct TailInstance {
    pub label: String,
    pub inputs: Vec<GridFunction>,
    pub ball: Ball,
}

/// Ball placements relative to a scale `s`: `(centre / s, radius / s)`.
const TAIL_GEOMETRIES: [(f64, f64); 10] = [
    (-0.6, 0.15),
    (-0.3, 0.15),
    (0.0, 0.15),
    (0.3, 0.15),
    (0.6, 0.15),
    (-0.6, 0.3),
    (-0.3, 0.3),
    (0.0, 0.3),
    (0.3, 0.3),
    (0.6, 0.3),
];

/// Calibration and held-out corpora for the pointwise tail bounds.
///
/// Both use the same ten ball placements around a pair of bumps at `±0.3 s`;
/// the calibration corpus takes scales `{0.55, 1.0}` and the held-out corpus
/// the interleaved scales `{0.75, 1.4}`, so no instance is shared.
pub fn tail_corpora(lattice: &Lattice) -> Result<(Vec<TailInstance>, Vec<TailInstance>)> {
    let build = |scales: &[f64]| -> Result<Vec<TailInstance>> {
        let mut out = Vec::new();
        for &s in scales {
            for &(c, r) in &TAIL_GEOMETRIES {
                let mut left = vec![0.0; lattice.dim()];
                let mut right = vec![0.0; lattice.dim()];
                left[0] = -0.3 * s;
                right[0] = 0.3 * s;
                let mut center = vec![0.0; lattice.dim()];
                center[0] = c * s;
                out.push(TailInstance {
                    label: format!("s={s} c={c} r={r}"),
                    inputs: vec![poly_bump(lattice, &left, s)?, poly_bump(lattice, &right, s)?],
                    ball: Ball::new(center, r * s)?,
                });
            }
        }
        Ok(out)
    };
    Ok((build(&[0.55, 1.0])?, build(&[0.75, 1.4])?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shape() {
        let l = Lattice::new(1, 2.0, 81).unwrap();
        let b = poly_bump(&l, &[0.5], 0.5).unwrap();
        assert_eq!(b.value(l.linear_index(&[50])), 1.0);
        assert!(b.support_radius_sup() <= 1.0 + 1e-12);
        assert!(b.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn random_weights_are_positive_and_deterministic() {
        let l = Lattice::new(1, 2.0, 65).unwrap();
        let a = random_positive_weights(&l, 6, 11).unwrap();
        let b = random_positive_weights(&l, 6, 11).unwrap();
        assert_eq!(a, b);
        for w in &a {
            assert!(w.node_values(&l).unwrap().iter().all(|v| *v > 0.0));
        }
    }

    #[test]
    fn tail_corpora_are_disjoint_and_supported() {
        let l = Lattice::new(1, 4.0, 257).unwrap();
        let (cal, held) = tail_corpora(&l).unwrap();
        assert_eq!(cal.len(), 20);
        assert_eq!(held.len(), 20);
        for t in cal.iter().chain(&held) {
            for f in &t.inputs {
                assert!(f.support_radius_sup() <= 2.0);
            }
        }
        assert!(cal.iter().all(|c| held.iter().all(|h| h.label != c.label)));
    }
}

mod common;

use common::{dense_fractional, dense_odd_czo, ragged, relative_error};
use morrey_lab::lattice::Lattice;
use morrey_lab::operators::{apply_czo, apply_fractional, KernelSpec, TruncationPolicy};
use morrey_lab::weights::{ExponentVector, FractionalParams};

const TOLERANCE: f64 = 1e-10;

#[test]
fn czo_matches_dense_sum() {
    let l = Lattice::new(1, 2.0, 33).unwrap();
    let (f, g) = (ragged(&l, 1), ragged(&l, 2));
    for cells in [1.0, 2.0, 3.5] {
        let trunc = TruncationPolicy::in_cells(cells, &l).unwrap();
        let fast = apply_czo(&KernelSpec::homogeneous_odd(), &[f.clone(), g.clone()], trunc).unwrap();
        let dense = dense_odd_czo(&f, &g, trunc.delta());
        let err = relative_error(fast.values(), &dense);
        assert!(err <= TOLERANCE, "δ = {cells}h: relative error {err:e}");
    }
}

#[test]
fn fractional_matches_dense_sum() {
    let l = Lattice::new(1, 2.0, 33).unwrap();
    let (f, g) = (ragged(&l, 3), ragged(&l, 4));
    for alpha in [0.25, 0.5, 1.0, 1.5] {
        let fp = FractionalParams::new(ExponentVector::new(vec![1.2, 1.2]).unwrap(), alpha, 1).unwrap();
        let fast = apply_fractional(&fp, &[f.clone(), g.clone()]).unwrap();
        let dense = dense_fractional(&f, &g, alpha);
        let err = relative_error(fast.values(), &dense);
        assert!(err <= TOLERANCE, "α = {alpha}: relative error {err:e}");
    }
}

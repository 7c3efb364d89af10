//! Bilinear singular and fractional integrals of two bumps.

use morrey_lab::harness::corpus::poly_bump;
use morrey_lab::lattice::{GridFunction, Lattice};
use morrey_lab::operators::{apply_czo, apply_fractional, apply_fractional_at, KernelSpec, TruncationPolicy};
use morrey_lab::weights::{ExponentVector, FractionalParams};

fn main() -> morrey_lab::Result<()> {
    let l = Lattice::new(1, 4.0, 257)?;
    let fs = [poly_bump(&l, &[-0.3], 0.5)?, poly_bump(&l, &[0.3], 0.5)?];
    let kernel = KernelSpec::homogeneous_odd();
    for cells in [1.0, 2.0, 4.0] {
        let t = apply_czo(&kernel, &fs, TruncationPolicy::in_cells(cells, &l)?)?;
        println!("T with δ = {cells}h: max |T| = {:.6}", t.max_abs());
    }
    let fp = FractionalParams::new(ExponentVector::new(vec![2.0, 2.0])?, 0.5, 1)?;
    let i = apply_fractional(&fp, &fs)?;
    println!("I_0.5: value at 0 = {:.6}, at 3 = {:.6}", i.value(l.origin_index()), i.value(l.origin_index() + 96));

    // ∫_0^1 ∫_0^1 (y₁² + y₂²)^{-1/2} = 2 ln(1 + √2)
    let exact = 2.0 * (1.0 + std::f64::consts::SQRT_2).ln();
    for points in [65, 129, 257] {
        let l = Lattice::new(1, 2.0, points)?;
        let f = GridFunction::indicator_box(&l, &[0.0], &[1.0])?;
        let fp = FractionalParams::new(ExponentVector::new(vec![1.5, 1.5])?, 1.0, 1)?;
        let v = apply_fractional_at(&fp, &[f.clone(), f], &[l.origin_index()])?[0];
        println!("I_1(χ[0,1], χ[0,1])(0) at N = {points}: {v:.5} (exact {exact:.5})");
    }
    Ok(())
}

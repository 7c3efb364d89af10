//! Calibrated pointwise tail bounds for both operators.

use morrey_lab::harness::corpus::tail_corpora;
use morrey_lab::harness::lemma::{calibrate_tail, tail_cases, TailOperator};
use morrey_lab::lattice::Lattice;
use morrey_lab::operators::{KernelSpec, TruncationPolicy};
use morrey_lab::weights::{ExponentVector, FractionalParams};

fn main() -> morrey_lab::Result<()> {
    let l = Lattice::new(1, 4.0, 257)?;
    let (calibration, held_out) = tail_corpora(&l)?;
    let ops = [
        TailOperator::Czo {
            kernel: KernelSpec::homogeneous_odd(),
            truncation: TruncationPolicy::in_cells(2.0, &l)?,
        },
        TailOperator::Fractional(FractionalParams::new(ExponentVector::new(vec![2.0, 2.0])?, 0.5, 1)?),
    ];
    for op in &ops {
        for case in tail_cases(2) {
            let r = calibrate_tail(op, case, &calibration, &held_out)?;
            println!(
                "{:10} {:18}: C_tail {:.4}, held-out max {:.4}, {} of {} samples violate",
                r.operator,
                format!("{:?}", r.case),
                r.constant,
                r.held_out_max,
                r.violations,
                r.held_out_samples
            );
        }
    }
    Ok(())
}

//! Empirical size and regularity constants of the builtin kernels.

use morrey_lab::operators::{
    angular_size_sweep, verify_kernel_class, KernelSpec, SamplingPlan, HOMOGENEOUS_ODD_SIZE,
};

fn main() {
    let plan = SamplingPlan::new(10_000, 7);
    let kernels = [
        ("homogeneous-odd", KernelSpec::homogeneous_odd()),
        ("fractional-size", KernelSpec::fractional_size(2, 1).expect("valid kernel")),
        ("angular-step", KernelSpec::angular_step()),
    ];
    for (name, kernel) in &kernels {
        let r = verify_kernel_class(kernel, &plan);
        println!(
            "{name:16} A = {:6.2}  size = {:.6}  reg_x = {:.3}  reg_y = {:.3?}  {}",
            r.declared_constant,
            r.size,
            r.regularity_x,
            r.regularity_y,
            if r.pass { "pass" } else { "fail" }
        );
    }
    let odd = KernelSpec::homogeneous_odd();
    println!(
        "angle sweep size of homogeneous-odd: {:.8} (2√2 = {:.8})",
        angular_size_sweep(&odd, 1 << 20),
        HOMOGENEOUS_ODD_SIZE
    );
}

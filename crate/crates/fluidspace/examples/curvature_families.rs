//! The modified curvature family (projective, concircular, conformal,
//! conharmonic), the semisymmetry residuals they generate, and the
//! closed-form pressures those conditions force.
//!
//! ```bash
//! cargo run --example curvature_families
//! ```

use fluidspace::catalog::builtin;
use fluidspace::curvature::{
    curvature_tensor_at, factor_value, predicted_pressures, semisym_st_residual,
    semisym_ts_residual, CurvatureKind, SemisymDirection,
};

fn main() {
    let spec = builtin("desitter-torse").unwrap();
    let point = spec.center();

    // the family tensors on a constant-curvature background: the conformal
    // tensor vanishes there
    println!("family tensors on the expanding entry:");
    for kind in CurvatureKind::ALL {
        let t = curvature_tensor_at(kind, &spec.metric, point).unwrap();
        println!("   |{:<12}|_max = {:.6}", kind.name(), t.max_abs());
    }
    println!();

    // semisymmetry residuals with the entry's own fluid (a vacuum: the
    // curvature-on-Ricci direction vanishes for every kind)
    let (a, b) = (spec.fluid.quasi_einstein_a(), spec.fluid.quasi_einstein_b());
    println!("semisymmetry slices with the entry fluid (A = {a}, B = {b}):");
    for kind in CurvatureKind::ALL {
        let ts = semisym_ts_residual(kind, &spec.metric, point, &spec.xi, a, b).unwrap();
        let st = semisym_st_residual(kind, &spec.metric, point, &spec.xi, a, b).unwrap();
        println!(
            "   {:<12} curvature-on-S = {:.3e}   S-on-curvature = {:.3e}",
            kind.name(),
            ts.xi_slice,
            st.xi_slice
        );
    }
    println!();

    // the closed-form pressure table for sample constants
    let (lambda, k, sigma) = (3.0, 1.0, 3.0);
    println!("closed-form pressures at lambda={lambda}, k={k}, sigma={sigma}:");
    for direction in [SemisymDirection::TensorOnS, SemisymDirection::SOnTensor] {
        let label = match direction {
            SemisymDirection::TensorOnS => "curvature wedge on S",
            SemisymDirection::SOnTensor => "S wedge on curvature",
        };
        println!("   {label}:");
        for kind in CurvatureKind::ALL {
            let roots = predicted_pressures(kind, direction, lambda, k, sigma).unwrap();
            let rendered: Vec<String> = roots
                .iter()
                .map(|r| format!("{:.6} ({:?})", r.value, r.branch))
                .collect();
            println!("      {:<12} {}", kind.name(), rendered.join(", "));
            // the reported factor vanishes at each root
            for root in &roots {
                let f = factor_value(kind, direction, lambda, k, sigma, root.value).unwrap();
                assert!(f.abs() < 1e-9, "{kind:?} {direction:?} root {}", root.value);
            }
        }
    }
}

//! Perfect-fluid matter analysis: energy-momentum, field-equation residual,
//! quasi-Einstein decomposition, recurrence classification of `nabla S` and
//! `nabla T`, and energy conditions.
//!
//! ```bash
//! cargo run --example fluid_analysis
//! ```

use fluidspace::catalog::builtin;
use fluidspace::fluid::{
    classify_nabla_s, classify_nabla_t, field_equation_residual, fit_quasi_einstein,
    plebanski_check, ricci_eigenvalue_of_xi, QuasiEinsteinSample,
};

fn main() {
    for name in ["desitter-torse", "einstein-static", "flrw(1 + t^2/4, 1, 0)"] {
        let spec = builtin(name).unwrap();
        let points = spec.sample_points();
        println!(
            "== {name}  (lambda={}, k={}, sigma={}, p={})",
            spec.fluid.lambda, spec.fluid.k, spec.fluid.sigma, spec.fluid.p
        );

        // does the metric/fluid pair solve the field equations?
        let mut field_eq: f64 = 0.0;
        let mut samples = Vec::new();
        for &p in points.iter().take(10) {
            field_eq = field_eq
                .max(field_equation_residual(&spec.metric, &spec.xi, spec.fluid, p).unwrap());
            let geo = spec.metric.curvature_at(p).unwrap();
            let eta = geo.metric.lower(&spec.xi.evaluate(p));
            samples.push(QuasiEinsteinSample {
                ricci: geo.ricci.clone(),
                metric: geo.metric.clone(),
                eta,
            });
        }
        println!("   field-equation residual = {field_eq:.3e}");

        // decompose the geometric Ricci tensor over the samples
        let fit = fit_quasi_einstein(&samples).unwrap();
        let (sigma, p) = fit.recover_fluid(spec.fluid.k, spec.fluid.lambda);
        println!(
            "   quasi-Einstein fit      : A = {:.6}, B = {:.6}, residual {:.3e}",
            fit.a, fit.b, fit.residual
        );
        println!("   recovered fluid         : sigma = {sigma:.6}, p = {p:.6}");

        // velocity eigenvalue of the Ricci operator
        let eig = ricci_eigenvalue_of_xi(&spec.metric, &spec.xi, spec.center()).unwrap();
        println!(
            "   Q xi = mu xi            : mu = {:.6} (expected {:.6})",
            eig.mu,
            spec.fluid.xi_eigenvalue()
        );

        // recurrence structure of nabla S and nabla T
        let subset: Vec<_> = points.iter().copied().take(5).collect();
        let ns = classify_nabla_s(&spec.metric, &spec.xi, spec.fluid, &subset, 1e-7).unwrap();
        println!(
            "   nabla S                 : symmetric={} codazzi={} recurrent={}",
            ns.ricci_symmetric.fires, ns.codazzi.fires, ns.alpha_recurrent.fires
        );
        if let Some(holds) = ns.implication.holds {
            println!("   classification implication holds: {holds}");
        }
        let nt = classify_nabla_t(&spec.metric, &spec.xi, spec.fluid, &subset, 1e-7).unwrap();
        println!(
            "   nabla T                 : constant={} (scal spread {:.3e})",
            nt.covariantly_constant.fires, nt.scal_spread
        );

        let energy = plebanski_check(spec.fluid);
        println!(
            "   energy conditions       : weak={} dominant={} density bound {:.3} ok={}",
            energy.weak, energy.dominant, energy.density_bound, energy.density_bound_ok
        );
        println!();
    }
}

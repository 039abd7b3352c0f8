//! Soliton structures of the fluid: coefficient solving, equation residuals,
//! shrinking/steady/expanding classification and the gradient-potential
//! Laplacian identity.
//!
//! ```bash
//! cargo run --example solitons
//! ```

use fluidspace::catalog::builtin;
use fluidspace::fluid::FluidParams;
use fluidspace::soliton::{
    classify_ricci_soliton, conformal_killing_analysis, laplacian_equation_check, soliton_residual,
    solve_coefficients_sampled, torse_forming_soliton_bound, SolitonKind,
};
use fluidspace::Expr;

fn main() {
    let spec = builtin("desitter-torse").unwrap();
    let points = spec.sample_points();

    for kind in [SolitonKind::EtaRicci, SolitonKind::EtaEinstein] {
        let (coeffs, div) =
            solve_coefficients_sampled(kind, spec.fluid, &spec.metric, &spec.xi, &points, 1e-9)
                .unwrap();
        let mut residual: f64 = 0.0;
        for &p in points.iter().take(10) {
            residual =
                residual.max(soliton_residual(kind, &spec.metric, &spec.xi, coeffs, p).unwrap());
        }
        println!(
            "{:<13} a = {:+.4}, b = {:+.4}  (div xi = {:.6}, equation residual {:.3e})",
            kind.name(),
            coeffs.a,
            coeffs.b,
            div.mean,
            residual
        );
    }
    println!();

    // pure Ricci soliton classification sweep
    println!("b = 0 classification at lambda=3, k=1, sigma=3:");
    for p in [0.5, 1.0, 2.0] {
        let params = FluidParams::new(3.0, 1.0, 3.0, p).unwrap();
        let report = classify_ricci_soliton(params, 1e-9);
        println!(
            "   p = {p:>4}: {:?} (a = {:+.3}, steady at p = {:.3})",
            report.class, report.a, report.steady_pressure
        );
    }
    println!();

    // gradient potential: xi = grad(-t) on the expanding entry
    let f = Expr::parse("-t", &spec.coords).unwrap();
    let lap = laplacian_equation_check(&f, &spec.metric, spec.fluid, -1.0, &points, 1e-9).unwrap();
    println!(
        "gradient potential -t: laplacian = {:.9}, expected {:.9}, pass = {}",
        lap.laplacians[0], lap.expected, lap.pass
    );

    // conformally Killing velocity with factor r
    let ck =
        conformal_killing_analysis(FluidParams::new(1.0, 1.0, 0.0, 3.0).unwrap(), 2.0).unwrap();
    println!(
        "conformally Killing (r = 2): steady at p = {}, this fluid is {:?}",
        ck.steady_pressure, ck.class
    );

    // energy-condition window for the torse-forming coefficient
    let bound = torse_forming_soliton_bound(FluidParams::new(1.0, 1.0, 2.0, 1.0).unwrap());
    println!(
        "torse coefficient alpha = {} in [{}, 0): {}",
        bound.alpha, bound.window_low, bound.in_window
    );
}

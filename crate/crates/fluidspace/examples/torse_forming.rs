//! Torse-forming structure of the velocity field: the defining equation
//! `nabla xi = I + eta (x) xi` and the curvature identities it implies.
//!
//! ```bash
//! cargo run --example torse_forming
//! ```

use fluidspace::catalog::builtin;
use fluidspace::geometry::torse_forming_report;

fn main() {
    for name in ["desitter-torse", "minkowski", "einstein-static"] {
        let spec = builtin(name).unwrap();
        println!("== {name}");
        let r = spec
            .sample_points()
            .into_iter()
            .take(10)
            .map(|p| torse_forming_report(&spec.xi, &spec.metric, p).unwrap())
            .max_by(|a, b| a.nabla_xi.total_cmp(&b.nabla_xi))
            .unwrap();
        println!("   defining equation residual   = {:.3e}", r.nabla_xi);
        println!(
            "   R(X,Y)xi identity            = {:.3e}",
            r.curvature_velocity
        );
        println!("   eta(R(X,Y)Z) identity        = {:.3e}", r.eta_curvature);
        println!("   d eta (closedness)           = {:.3e}", r.d_eta);
        println!("   nabla_xi xi (geodesic)       = {:.3e}", r.geodesic);
        println!("   g(nabla xi, xi)              = {:.3e}", r.orthogonality);
        println!();
    }
    println!("only the expanding entry satisfies the torse-forming normalization;");
    println!("on flat space the defect equals the spatial projector (max-norm 1),");
    println!("and the static entry has a parallel velocity field instead.");
}

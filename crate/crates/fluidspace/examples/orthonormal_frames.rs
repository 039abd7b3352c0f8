//! Pointwise tensor algebra: metric contraction, index raising/lowering,
//! signed Gram-Schmidt frames and the spatial projector.
//!
//! ```bash
//! cargo run --example orthonormal_frames
//! ```

use fluidspace::catalog::builtin;
use fluidspace::tensor::{build_frame, projection_tensor, TensorComponents};
use nalgebra::Vector4;

fn main() {
    let spec = builtin("desitter-torse").unwrap();
    let point = spec.center();
    let metric = spec.metric.evaluate(point).unwrap();

    // trace of the identity and the full metric contraction both give dim
    let id = TensorComponents::identity();
    println!(
        "trace of identity        = {}",
        id.contract(0, 1, None).unwrap().data()[0]
    );
    println!(
        "g^ij g_ij                = {}",
        metric
            .as_tensor()
            .contract(0, 1, Some(&metric))
            .unwrap()
            .data()[0]
    );

    // raising the velocity one-form recovers the velocity vector
    let xi = spec.xi.evaluate(point);
    let eta = metric.lower(&xi);
    let raised = metric.raise(&eta);
    println!("xi                       = {:?}", xi.as_slice());
    println!("raise(lower(xi))         = {:?}", raised.as_slice());

    // signed Gram-Schmidt frame from the timelike leg
    let frame = build_frame(&metric, &xi).unwrap();
    println!(
        "frame orthonormality     = {:.3e} (signed residual)",
        frame.orthonormality_residual(&metric)
    );
    for (i, e) in frame.vectors.iter().enumerate() {
        println!("  E_{}                    = {:?}", i + 1, e.as_slice());
    }

    // the projector h = I + eta (x) xi annihilates xi and is idempotent
    let h = projection_tensor(&xi, &metric).unwrap();
    let mut h_xi: Vector4<f64> = Vector4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            h_xi[i] += h.get(&[i, j]) * xi[j];
        }
    }
    println!("h xi                     = {:?}", h_xi.as_slice());
}

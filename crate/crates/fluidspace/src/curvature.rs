//! The modified curvature tensor family (projective, concircular, conformal,
//! conharmonic) built from the Riemann tensor, the semisymmetry residuals
//! they generate against a quasi-Einstein Ricci form, and the closed-form
//! pressure solutions those conditions force on the fluid.

use nalgebra::Vector4;
use serde::Serialize;
use thiserror::Error;

use crate::fluid::FluidParams;
use crate::geometry::{torse_forming_report, GeometryError, MetricField, VectorFieldExpr};
use crate::tensor::{
    build_frame, MetricAtPoint, OrthonormalFrame, SpacetimePoint, TensorComponents, Variance, DIM,
};

/// The five curvature tensors the semisymmetry conditions range over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CurvatureKind {
    Riemann,
    Projective,
    Concircular,
    Conformal,
    Conharmonic,
}

impl CurvatureKind {
    pub const ALL: [CurvatureKind; 5] = [
        CurvatureKind::Riemann,
        CurvatureKind::Projective,
        CurvatureKind::Concircular,
        CurvatureKind::Conformal,
        CurvatureKind::Conharmonic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CurvatureKind::Riemann => "riemann",
            CurvatureKind::Projective => "projective",
            CurvatureKind::Concircular => "concircular",
            CurvatureKind::Conformal => "conformal",
            CurvatureKind::Conharmonic => "conharmonic",
        }
    }
}

/// Which side of the semisymmetry pairing acts as the derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SemisymDirection {
    /// The curvature wedge acts on the Ricci form.
    TensorOnS,
    /// The Ricci wedge acts on the curvature tensor.
    SOnTensor,
}

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error("curvature coefficients need dimension >= 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("gravitational coupling k must be nonzero")]
    ZeroCoupling,
    #[error("xi is not unit timelike at {point:?}: g(xi,xi) = {norm}")]
    XiNotUnitTimelike { norm: f64, point: [f64; 4] },
    #[error(
        "background is not torse-forming (defining residual {residual:.3e} exceeds {tol:.1e}); \
         the closed-form pressure constants presuppose the unit torse-forming normalization"
    )]
    NotTorseForming { residual: f64, tol: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Scalar coefficients of the curvature family at a given dimension.
///
/// `c` is stored in its general-dimension form `-scal/((dim-1)(dim-2))`; at
/// dimension 4 this equals `-scal/6`, which the constructor asserts.
#[derive(Clone, Copy, Debug)]
pub struct CoefficientSet {
    pub dim: usize,
    /// `1/(dim-1)`.
    pub a: f64,
    /// `scal/(dim(dim-1))`.
    pub b: f64,
    /// `-scal/((dim-1)(dim-2))`.
    pub c: f64,
    /// `1/(dim-2)`.
    pub d: f64,
}

impl CoefficientSet {
    pub fn new(dim: usize, scal: f64) -> Result<CoefficientSet, CurvatureError> {
        if dim < 3 {
            return Err(CurvatureError::UnsupportedDimension(dim));
        }
        let dm1 = (dim - 1) as f64;
        let dm2 = (dim - 2) as f64;
        let set = CoefficientSet {
            dim,
            a: 1.0 / dm1,
            b: scal / (dim as f64 * dm1),
            c: -scal / (dm1 * dm2),
            d: 1.0 / dm2,
        };
        if dim == 4 {
            debug_assert!((set.c - (-scal / 6.0)).abs() <= 1e-12 * scal.abs().max(1.0));
        }
        Ok(set)
    }

    pub fn dim4(scal: f64) -> CoefficientSet {
        CoefficientSet::new(4, scal).expect("dimension 4 is supported")
    }
}

/// Build one of the family tensors from the Riemann tensor and the supplied
/// Ricci data. `Riemann` returns the input unchanged (bit-identical).
pub fn curvature_tensor(
    kind: CurvatureKind,
    riemann: &TensorComponents,
    metric: &MetricAtPoint,
    ricci: &TensorComponents,
    q: &TensorComponents,
    coeffs: &CoefficientSet,
) -> TensorComponents {
    if kind == CurvatureKind::Riemann {
        return riemann.clone();
    }
    let g = metric.components();
    let kr = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut out = TensorComponents::zeros(&[
        Variance::Upper,
        Variance::Lower,
        Variance::Lower,
        Variance::Lower,
    ]);
    for l in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    let g_ki = g[(k, i)];
                    let g_jk = g[(j, k)];
                    let q_term = g_ki * q.get(&[l, j]) - g_jk * q.get(&[l, i]);
                    let g_term = g_ki * kr(l, j) - g_jk * kr(l, i);
                    let s_term = ricci.get(&[k, i]) * kr(l, j) - ricci.get(&[j, k]) * kr(l, i);
                    let extra = match kind {
                        CurvatureKind::Riemann => unreachable!(),
                        CurvatureKind::Projective => coeffs.a * q_term,
                        CurvatureKind::Concircular => coeffs.b * g_term,
                        CurvatureKind::Conformal => {
                            coeffs.c * g_term + coeffs.d * (q_term + s_term)
                        }
                        CurvatureKind::Conharmonic => coeffs.d * (q_term + s_term),
                    };
                    out.set(&[l, i, j, k], riemann.get(&[l, i, j, k]) + extra);
                }
            }
        }
    }
    out
}

/// Convenience form computing the geometric Ricci data at a point.
pub fn curvature_tensor_at(
    kind: CurvatureKind,
    g: &MetricField,
    p: SpacetimePoint,
) -> Result<TensorComponents, CurvatureError> {
    let geo = g.curvature_at(p)?;
    let q = geo.ricci.raise_lower(0, &geo.metric).expect("slot 0");
    let coeffs = CoefficientSet::dim4(geo.scal);
    Ok(curvature_tensor(
        kind,
        &geo.riemann,
        &geo.metric,
        &geo.ricci,
        &q,
        &coeffs,
    ))
}

/// Semisymmetry residual: the largest violation over all frame tuples, and
/// the slice obtained by pinning the trailing arguments to the velocity
/// field. The closed-form pressure theorems characterize the slice; the
/// full maximum is reported for diagnostics.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SemisymResidual {
    /// The value the pressure theorems control: trailing arguments at `xi`.
    pub xi_slice: f64,
    /// Max over all frame tuples of the defining expression.
    pub max_over_frames: f64,
}

struct SemisymContext {
    frame: OrthonormalFrame,
    xi: Vector4<f64>,
    eta: Vector4<f64>,
    s: [[f64; 4]; 4],
    tensor: TensorComponents,
}

impl SemisymContext {
    fn new(
        kind: CurvatureKind,
        g: &MetricField,
        p: SpacetimePoint,
        xi_field: &VectorFieldExpr,
        qe_a: f64,
        qe_b: f64,
    ) -> Result<SemisymContext, CurvatureError> {
        let geo = g.curvature_at(p)?;
        let xi = xi_field.evaluate(p);
        let norm = geo.metric.inner(&xi, &xi);
        if (norm + 1.0).abs() > 1e-9 {
            return Err(CurvatureError::XiNotUnitTimelike {
                norm,
                point: p.coords,
            });
        }
        let eta = geo.metric.lower(&xi);
        let gm = geo.metric.components();

        // synthetic quasi-Einstein data: S = A g + B eta (x) eta,
        // Q = A I + B xi (x) eta, scal = 4A - B
        let mut s = [[0.0; 4]; 4];
        let mut s_tensor = TensorComponents::zeros(&[Variance::Lower, Variance::Lower]);
        let mut q = TensorComponents::zeros(&[Variance::Upper, Variance::Lower]);
        for i in 0..DIM {
            for j in 0..DIM {
                s[i][j] = qe_a * gm[(i, j)] + qe_b * eta[i] * eta[j];
                s_tensor.set(&[i, j], s[i][j]);
                let kr = if i == j { 1.0 } else { 0.0 };
                q.set(&[i, j], qe_a * kr + qe_b * xi[i] * eta[j]);
            }
        }
        let scal = 4.0 * qe_a - qe_b;
        let coeffs = CoefficientSet::dim4(scal);
        let tensor = curvature_tensor(kind, &geo.riemann, &geo.metric, &s_tensor, &q, &coeffs);
        let frame = build_frame(&geo.metric, &xi).map_err(|source| GeometryError::Tensor {
            point: p.coords,
            source,
        })?;
        Ok(SemisymContext {
            frame,
            xi,
            eta,
            s,
            tensor,
        })
    }

    fn t_vec(&self, u: &Vector4<f64>, v: &Vector4<f64>, w: &Vector4<f64>) -> Vector4<f64> {
        let mut out = Vector4::zeros();
        for l in 0..DIM {
            let mut sum = 0.0;
            for i in 0..DIM {
                for j in 0..DIM {
                    for k in 0..DIM {
                        sum += self.tensor.get(&[l, i, j, k]) * u[i] * v[j] * w[k];
                    }
                }
            }
            out[l] = sum;
        }
        out
    }

    fn s2(&self, u: &Vector4<f64>, v: &Vector4<f64>) -> f64 {
        let mut sum = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                sum += self.s[i][j] * u[i] * v[j];
            }
        }
        sum
    }

    fn eta_of(&self, v: &Vector4<f64>) -> f64 {
        (0..DIM).map(|i| self.eta[i] * v[i]).sum()
    }
}

/// Residual of the condition where the curvature wedge `(xi, X)` acts as a
/// derivation on the quasi-Einstein Ricci form, evaluated on frame tuples.
pub fn semisym_ts_residual(
    kind: CurvatureKind,
    g: &MetricField,
    p: SpacetimePoint,
    xi: &VectorFieldExpr,
    qe_a: f64,
    qe_b: f64,
) -> Result<SemisymResidual, CurvatureError> {
    let ctx = SemisymContext::new(kind, g, p, xi, qe_a, qe_b)?;
    // E(X,Y,Z) = S(T(xi,X)Y, Z) + S(Y, T(xi,X)Z)
    let expr = |x: &Vector4<f64>, y: &Vector4<f64>, z: &Vector4<f64>| {
        let t_xy = ctx.t_vec(&ctx.xi, x, y);
        let t_xz = ctx.t_vec(&ctx.xi, x, z);
        ctx.s2(&t_xy, z) + ctx.s2(y, &t_xz)
    };
    let mut max_over_frames: f64 = 0.0;
    let mut xi_slice: f64 = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                let v = expr(
                    &ctx.frame.vectors[a],
                    &ctx.frame.vectors[b],
                    &ctx.frame.vectors[c],
                )
                .abs();
                max_over_frames = max_over_frames.max(v);
            }
            let v = expr(&ctx.frame.vectors[a], &ctx.frame.vectors[b], &ctx.xi).abs();
            xi_slice = xi_slice.max(v);
        }
    }
    Ok(SemisymResidual {
        xi_slice,
        max_over_frames,
    })
}

/// Residual of the condition where the Ricci wedge `(xi, X)` acts as a
/// derivation on the curvature tensor, contracted against the velocity and
/// evaluated on frame tuples.
pub fn semisym_st_residual(
    kind: CurvatureKind,
    g: &MetricField,
    p: SpacetimePoint,
    xi: &VectorFieldExpr,
    qe_a: f64,
    qe_b: f64,
) -> Result<SemisymResidual, CurvatureError> {
    let ctx = SemisymContext::new(kind, g, p, xi, qe_a, qe_b)?;
    // the xi-contracted eight-term expansion
    let expr = |x: &Vector4<f64>, y: &Vector4<f64>, z: &Vector4<f64>, w: &Vector4<f64>| {
        let t_yzw = ctx.t_vec(y, z, w);
        -ctx.s2(x, &t_yzw) - ctx.s2(&ctx.xi, &t_yzw) * ctx.eta_of(x)
            + ctx.s2(x, y) * ctx.eta_of(&ctx.t_vec(&ctx.xi, z, w))
            - ctx.s2(&ctx.xi, y) * ctx.eta_of(&ctx.t_vec(x, z, w))
            + ctx.s2(x, z) * ctx.eta_of(&ctx.t_vec(y, &ctx.xi, w))
            - ctx.s2(&ctx.xi, z) * ctx.eta_of(&ctx.t_vec(y, x, w))
            + ctx.s2(x, w) * ctx.eta_of(&ctx.t_vec(y, z, &ctx.xi))
            - ctx.s2(&ctx.xi, w) * ctx.eta_of(&ctx.t_vec(y, z, x))
    };
    let mut max_over_frames: f64 = 0.0;
    let mut xi_slice: f64 = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    let v = expr(
                        &ctx.frame.vectors[a],
                        &ctx.frame.vectors[b],
                        &ctx.frame.vectors[c],
                        &ctx.frame.vectors[d],
                    )
                    .abs();
                    max_over_frames = max_over_frames.max(v);
                }
            }
            let v = expr(
                &ctx.frame.vectors[a],
                &ctx.frame.vectors[b],
                &ctx.xi,
                &ctx.xi,
            )
            .abs();
            xi_slice = xi_slice.max(v);
        }
    }
    Ok(SemisymResidual {
        xi_slice,
        max_over_frames,
    })
}

/// Quasi-Einstein coefficients from the fluid constants.
pub fn quasi_einstein_from_params(params: &FluidParams) -> (f64, f64) {
    (params.quasi_einstein_a(), params.quasi_einstein_b())
}

/// The scalar factor whose vanishing characterizes the semisymmetry
/// condition on a unit torse-forming background, normalized so that the
/// velocity-slice residual equals `|factor| * max|g + eta (x) eta|`.
///
/// For the projective tensor in the `SOnTensor` direction the returned
/// quadratic is the one whose roots are exactly the closed-form pressure
/// pair of [`predicted_pressures`]; see that function for the branch
/// structure.
pub fn factor_value(
    kind: CurvatureKind,
    direction: SemisymDirection,
    lambda: f64,
    k: f64,
    sigma: f64,
    p: f64,
) -> Result<f64, CurvatureError> {
    if k == 0.0 {
        return Err(CurvatureError::ZeroCoupling);
    }
    let a = lambda + k * (sigma - p) / 2.0;
    let b = k * (sigma + p);
    Ok(match direction {
        SemisymDirection::TensorOnS => ts_slice_coefficient(kind, a, b),
        SemisymDirection::SOnTensor => match kind {
            CurvatureKind::Projective => 2.0 * a - b + (2.0 * a * b - 2.0 * a * a + b * b) / 3.0,
            _ => st_slice_coefficient(kind, a, b),
        },
    })
}

/// Velocity-slice coefficient of the `TensorOnS` condition in terms of the
/// quasi-Einstein coefficients.
pub fn ts_slice_coefficient(kind: CurvatureKind, a: f64, b: f64) -> f64 {
    let scal = 4.0 * a - b;
    // family-coefficient weights of the Q-term and the plain g-term
    let (alpha1, alpha2) = match kind {
        CurvatureKind::Riemann => (0.0, 0.0),
        CurvatureKind::Projective => (1.0 / 3.0, 0.0),
        CurvatureKind::Concircular => (0.0, scal / 12.0),
        CurvatureKind::Conformal => (0.5, -scal / 6.0),
        CurvatureKind::Conharmonic => (0.5, 0.0),
    };
    b * (alpha1 * (2.0 * a - b) + alpha2 - 1.0)
}

/// Velocity-slice coefficient of the `SOnTensor` condition. This is what the
/// pointwise residual reduces to; for every kind except the projective
/// tensor it coincides with [`factor_value`].
pub fn st_slice_coefficient(kind: CurvatureKind, a: f64, b: f64) -> f64 {
    let scal = 4.0 * a - b;
    let two_a_b = 2.0 * a - b;
    let (alpha1, alpha2, alpha3) = match kind {
        CurvatureKind::Riemann => (0.0, 0.0, 0.0),
        CurvatureKind::Projective => (1.0 / 3.0, 0.0, 0.0),
        CurvatureKind::Concircular => (0.0, scal / 12.0, 0.0),
        CurvatureKind::Conformal => (0.5, -scal / 6.0, 0.5),
        CurvatureKind::Conharmonic => (0.5, 0.0, 0.5),
    };
    two_a_b - alpha1 * (a * a + (a - b) * (a - b)) - alpha2 * two_a_b - alpha3 * 2.0 * a * (a - b)
}

/// A closed-form pressure root together with the branch it belongs to.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PredictedPressure {
    pub value: f64,
    pub branch: PressureBranch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PressureBranch {
    /// `p = -sigma`.
    Vacuum,
    /// A constant-pressure solution.
    ConstantPressure,
}

/// Closed-form pressure solutions of the semisymmetry conditions. The
/// constants baked into these formulas presuppose the unit torse-forming
/// normalization of the velocity field.
pub fn predicted_pressures(
    kind: CurvatureKind,
    direction: SemisymDirection,
    lambda: f64,
    k: f64,
    sigma: f64,
) -> Result<Vec<PredictedPressure>, CurvatureError> {
    if k == 0.0 {
        return Err(CurvatureError::ZeroCoupling);
    }
    let vac = PredictedPressure {
        value: -sigma,
        branch: PressureBranch::Vacuum,
    };
    let cp = |value: f64| PredictedPressure {
        value,
        branch: PressureBranch::ConstantPressure,
    };
    Ok(match direction {
        SemisymDirection::TensorOnS => match kind {
            CurvatureKind::Riemann => vec![vac],
            CurvatureKind::Projective => vec![vac, cp((2.0 * lambda - 3.0) / (2.0 * k))],
            CurvatureKind::Concircular => {
                vec![vac, cp((4.0 * lambda + k * sigma - 12.0) / (3.0 * k))]
            }
            CurvatureKind::Conformal => {
                vec![vac, cp((2.0 * lambda - k * sigma - 6.0) / (3.0 * k))]
            }
            CurvatureKind::Conharmonic => vec![vac, cp((lambda - 1.0) / k)],
        },
        SemisymDirection::SOnTensor => {
            let principal = cp(lambda / k);
            match kind {
                CurvatureKind::Riemann => vec![principal],
                CurvatureKind::Projective => {
                    // quadratic pair; the discriminant argument is a
                    // completed square plus a positive constant, so both
                    // roots are always real
                    let u = lambda + k * sigma;
                    let disc = 3.0 * (u * u - 3.0 * u + 3.0);
                    let root = disc.sqrt();
                    vec![
                        cp((lambda - 6.0 + 3.0 * u + 2.0 * root) / k),
                        cp((lambda - 6.0 + 3.0 * u - 2.0 * root) / k),
                    ]
                }
                CurvatureKind::Concircular => {
                    vec![principal, cp((4.0 * lambda + k * sigma - 12.0) / (3.0 * k))]
                }
                CurvatureKind::Conformal => {
                    vec![principal, cp((2.0 * lambda - k * sigma - 6.0) / (3.0 * k))]
                }
                CurvatureKind::Conharmonic => vec![principal, cp((lambda - 1.0) / k)],
            }
        }
    })
}

/// Verify the background satisfies the unit torse-forming normalization at
/// every supplied point; the pressure constants are meaningless otherwise.
pub fn require_torse_forming(
    g: &MetricField,
    xi: &VectorFieldExpr,
    points: &[SpacetimePoint],
    tol: f64,
) -> Result<(), CurvatureError> {
    let mut worst: f64 = 0.0;
    for &p in points {
        let report = torse_forming_report(xi, g, p)?;
        worst = worst.max(report.defining_residual());
    }
    if worst > tol {
        return Err(CurvatureError::NotTorseForming {
            residual: worst,
            tol,
        });
    }
    Ok(())
}

//! Perfect-fluid matter model: energy-momentum tensor, field-equation
//! residual, the quasi-Einstein decomposition of the Ricci tensor, and the
//! classifiers for recurrence conditions on `nabla S` and `nabla T`.

use std::array::from_fn;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::Expr;
use crate::geometry::{
    covariant_derivative_2form_at, nabla_vector, CurvatureData, GeometryError, MetricField,
    TensorField2, VectorFieldExpr,
};
use crate::tensor::{
    build_frame, MetricAtPoint, SpacetimePoint, TensorComponents, Variance, DIM, FRAME_SIGNS,
};

/// The constants entering every fluid formula: cosmological constant,
/// gravitational coupling, energy density and isotropic pressure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    pub lambda: f64,
    pub k: f64,
    pub sigma: f64,
    pub p: f64,
}

impl FluidParams {
    pub fn new(lambda: f64, k: f64, sigma: f64, p: f64) -> Result<FluidParams, FluidError> {
        let params = FluidParams {
            lambda,
            k,
            sigma,
            p,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), FluidError> {
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(FluidError::InvalidCoupling(self.k));
        }
        if ![self.lambda, self.sigma, self.p]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(FluidError::NonFiniteParams);
        }
        Ok(())
    }

    /// Metric coefficient of the effective Ricci form.
    pub fn quasi_einstein_a(&self) -> f64 {
        self.lambda + self.k * (self.sigma - self.p) / 2.0
    }

    /// `eta (x) eta` coefficient of the effective Ricci form.
    pub fn quasi_einstein_b(&self) -> f64 {
        self.k * (self.sigma + self.p)
    }

    /// Trace of the effective Ricci form: `4 lambda + k (sigma - 3 p)`.
    pub fn effective_scal(&self) -> f64 {
        4.0 * self.lambda + self.k * (self.sigma - 3.0 * self.p)
    }

    /// Eigenvalue of the Ricci operator on the velocity field:
    /// `lambda - k (sigma + 3 p) / 2`.
    pub fn xi_eigenvalue(&self) -> f64 {
        self.lambda - self.k * (self.sigma + 3.0 * self.p) / 2.0
    }

    /// The pressure forced by a (weakly) pseudo Ricci symmetric structure,
    /// `(2 lambda - k sigma) / (3 k)`. The steady-soliton threshold in the
    /// soliton module is this same function.
    pub fn pseudo_symmetric_pressure(&self) -> f64 {
        (2.0 * self.lambda - self.k * self.sigma) / (3.0 * self.k)
    }

    /// Vacuum means `p = -sigma`.
    pub fn is_vacuum(&self, tol: f64) -> bool {
        (self.p + self.sigma).abs() < tol
    }

    /// Radiation means `sigma = 3 p`.
    pub fn is_radiation(&self, tol: f64) -> bool {
        (self.sigma - 3.0 * self.p).abs() < tol
    }
}

#[derive(Debug, Error)]
pub enum FluidError {
    #[error("gravitational coupling must be positive and finite, got {0}")]
    InvalidCoupling(f64),
    #[error("fluid parameters must be finite")]
    NonFiniteParams,
    #[error("eta is not unit timelike: g^(eta,eta) = {0}")]
    EtaNotUnitTimelike(f64),
    #[error("xi is not unit timelike at {point:?}: g(xi,xi) = {norm}")]
    XiNotUnitTimelike { norm: f64, point: [f64; 4] },
    #[error("quasi-Einstein fit is singular (eta vanishes or samples are degenerate)")]
    SingularFit,
    #[error("classification needs at least one sample point")]
    NoSamples,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

const UNIT_TOL: f64 = 1e-9;

/// Perfect-fluid energy-momentum `T = p g + (sigma + p) eta (x) eta` at a
/// point. `eta` must be unit timelike with respect to the metric.
pub fn energy_momentum(
    metric: &MetricAtPoint,
    eta: &Vector4<f64>,
    params: FluidParams,
) -> Result<TensorComponents, FluidError> {
    let xi = metric.raise(eta);
    let norm: f64 = (0..DIM).map(|i| eta[i] * xi[i]).sum();
    if (norm + 1.0).abs() > UNIT_TOL {
        return Err(FluidError::EtaNotUnitTimelike(norm));
    }
    let g = metric.components();
    let mut out = TensorComponents::zeros(&[Variance::Lower, Variance::Lower]);
    for i in 0..DIM {
        for j in 0..DIM {
            out.set(
                &[i, j],
                params.p * g[(i, j)] + (params.sigma + params.p) * eta[i] * eta[j],
            );
        }
    }
    Ok(out)
}

/// Energy-momentum tensor as an expression-backed field, differentiable
/// through the exact pipeline.
pub fn energy_momentum_field(
    g: &MetricField,
    xi: &VectorFieldExpr,
    params: FluidParams,
) -> TensorField2 {
    quasi_einstein_field(g, xi, params.p, params.sigma + params.p)
}

/// Effective Ricci form of the fluid:
/// `S = (lambda + k(sigma-p)/2) g + k(sigma+p) eta (x) eta` at a point.
pub fn effective_ricci(
    metric: &MetricAtPoint,
    eta: &Vector4<f64>,
    params: FluidParams,
) -> TensorComponents {
    let a = params.quasi_einstein_a();
    let b = params.quasi_einstein_b();
    let g = metric.components();
    let mut out = TensorComponents::zeros(&[Variance::Lower, Variance::Lower]);
    for i in 0..DIM {
        for j in 0..DIM {
            out.set(&[i, j], a * g[(i, j)] + b * eta[i] * eta[j]);
        }
    }
    out
}

/// Effective Ricci form as an expression-backed field.
pub fn effective_ricci_field(
    g: &MetricField,
    xi: &VectorFieldExpr,
    params: FluidParams,
) -> TensorField2 {
    quasi_einstein_field(g, xi, params.quasi_einstein_a(), params.quasi_einstein_b())
}

/// `a g + b eta (x) eta` with `eta` the symbolic metric dual of `xi`.
pub fn quasi_einstein_field(g: &MetricField, xi: &VectorFieldExpr, a: f64, b: f64) -> TensorField2 {
    let eta = crate::geometry::OneFormExpr::lowered(xi, g);
    TensorField2 {
        components: from_fn(|i| {
            from_fn(|j| {
                Expr::constant(a) * g.component(i, j).clone()
                    + Expr::constant(b) * eta.components[i].clone() * eta.components[j].clone()
            })
        }),
    }
}

/// Max-norm of `k T - S - (lambda - scal/2) g` at a point; vanishes exactly
/// when the metric and fluid solve the field equations there.
pub fn field_equation_residual(
    g: &MetricField,
    xi: &VectorFieldExpr,
    params: FluidParams,
    p: SpacetimePoint,
) -> Result<f64, FluidError> {
    let geo = g.curvature_at(p)?;
    field_equation_residual_at(xi, params, &geo)
}

pub fn field_equation_residual_at(
    xi: &VectorFieldExpr,
    params: FluidParams,
    geo: &CurvatureData,
) -> Result<f64, FluidError> {
    let xi_val = xi.evaluate(geo.point);
    let norm = geo.metric.inner(&xi_val, &xi_val);
    if (norm + 1.0).abs() > UNIT_TOL {
        return Err(FluidError::XiNotUnitTimelike {
            norm,
            point: geo.point.coords,
        });
    }
    let eta = geo.metric.lower(&xi_val);
    let t = energy_momentum(&geo.metric, &eta, params)?;
    let gm = geo.metric.components();
    let mut worst: f64 = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            let v = params.k * t.get(&[i, j])
                - geo.ricci.get(&[i, j])
                - (params.lambda - geo.scal / 2.0) * gm[(i, j)];
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}

/// Least-squares decomposition `S = A g + B eta (x) eta` over sample points.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuasiEinsteinFit {
    pub a: f64,
    pub b: f64,
    /// Max-norm of `S - A g - B eta (x) eta` over the samples.
    pub residual: f64,
}

impl QuasiEinsteinFit {
    /// Recover `(sigma, p)` given the externally supplied constants: the
    /// decomposition alone cannot separate them.
    pub fn recover_fluid(&self, k: f64, lambda: f64) -> (f64, f64) {
        let sigma = (self.a - lambda) / k + self.b / (2.0 * k);
        let p = self.b / (2.0 * k) - (self.a - lambda) / k;
        (sigma, p)
    }
}

pub struct QuasiEinsteinSample {
    pub ricci: TensorComponents,
    pub metric: MetricAtPoint,
    pub eta: Vector4<f64>,
}

pub fn fit_quasi_einstein(samples: &[QuasiEinsteinSample]) -> Result<QuasiEinsteinFit, FluidError> {
    if samples.is_empty() {
        return Err(FluidError::NoSamples);
    }
    // normal equations for the 2-parameter linear model
    let mut gg = 0.0;
    let mut ge = 0.0;
    let mut ee = 0.0;
    let mut gs = 0.0;
    let mut es = 0.0;
    for sample in samples {
        let g = sample.metric.components();
        for i in 0..DIM {
            for j in 0..DIM {
                let gij = g[(i, j)];
                let eij = sample.eta[i] * sample.eta[j];
                let sij = sample.ricci.get(&[i, j]);
                gg += gij * gij;
                ge += gij * eij;
                ee += eij * eij;
                gs += gij * sij;
                es += eij * sij;
            }
        }
    }
    let det = gg * ee - ge * ge;
    if det.abs() < 1e-12 {
        return Err(FluidError::SingularFit);
    }
    let a = (gs * ee - es * ge) / det;
    let b = (es * gg - gs * ge) / det;
    let mut residual: f64 = 0.0;
    for sample in samples {
        let g = sample.metric.components();
        for i in 0..DIM {
            for j in 0..DIM {
                let model = a * g[(i, j)] + b * sample.eta[i] * sample.eta[j];
                residual = residual.max((sample.ricci.get(&[i, j]) - model).abs());
            }
        }
    }
    Ok(QuasiEinsteinFit { a, b, residual })
}

/// Eigenvalue of the Ricci operator `Q` on the velocity field, with the
/// least-squares residual of `Q xi - mu xi`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct XiEigenvalue {
    pub mu: f64,
    pub residual: f64,
}

pub fn ricci_eigenvalue_of_xi(
    g: &MetricField,
    xi: &VectorFieldExpr,
    p: SpacetimePoint,
) -> Result<XiEigenvalue, FluidError> {
    let geo = g.curvature_at(p)?;
    Ok(ricci_eigenvalue_of_xi_at(xi, &geo))
}

pub fn ricci_eigenvalue_of_xi_at(xi: &VectorFieldExpr, geo: &CurvatureData) -> XiEigenvalue {
    let xi_val = xi.evaluate(geo.point);
    let q = geo
        .ricci
        .raise_lower(0, &geo.metric)
        .expect("slot 0 exists");
    let mut q_xi = Vector4::zeros();
    for i in 0..DIM {
        for j in 0..DIM {
            q_xi[i] += q.get(&[i, j]) * xi_val[j];
        }
    }
    let mu = q_xi.dot(&xi_val) / xi_val.dot(&xi_val);
    let residual = (q_xi - xi_val * mu).amax();
    XiEigenvalue { mu, residual }
}

/// Plebanski energy conditions plus the derived lower bound on the energy
/// density relevant to the (weakly) pseudo Ricci symmetric case.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PlebanskiReport {
    /// `sigma >= 0`.
    pub weak: bool,
    /// `-sigma <= p <= sigma`.
    pub dominant: bool,
    /// `max(-lambda/k, lambda/(2k))`.
    pub density_bound: f64,
    /// `sigma >= density_bound`.
    pub density_bound_ok: bool,
}

impl PlebanskiReport {
    pub fn energy_conditions_ok(&self) -> bool {
        self.weak && self.dominant
    }
}

pub fn plebanski_check(params: FluidParams) -> PlebanskiReport {
    let bound = (-params.lambda / params.k).max(params.lambda / (2.0 * params.k));
    PlebanskiReport {
        weak: params.sigma >= 0.0,
        dominant: -params.sigma <= params.p && params.p <= params.sigma,
        density_bound: bound,
        density_bound_ok: params.sigma >= bound,
    }
}

/// One recurrence condition: its aggregated residual and whether it holds at
/// the classification tolerance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RecurrenceFlag {
    pub residual: f64,
    pub fires: bool,
}

/// A recurrence condition driven by a recovered one-form. `applicable` is
/// false when the tensor is identically zero, in which case the condition is
/// vacuous by definition and the flag never fires.
#[derive(Clone, Debug, Serialize)]
pub struct AlphaFlag {
    pub residual: f64,
    pub fires: bool,
    pub applicable: bool,
    /// Recovered one-form in frame components at the first sample.
    pub alpha: Option<[f64; 4]>,
}

/// Structure flags reported when a (weakly) pseudo condition fires.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StructureFlags {
    /// `alpha(xi)` in the recovered one-form.
    pub alpha_xi: f64,
    /// `alpha(xi) != 0`.
    pub lorentzian_concircular: bool,
    /// `alpha(xi) = -1`.
    pub lp_sasakian: bool,
    /// Residual of `div(xi) + 3 alpha(xi)`.
    pub divergence_relation: f64,
}

/// Residuals of the consequences the classification implies for the fluid.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ImplicationReport {
    /// `|sigma + p|` (vacuum branch).
    pub vacuum: f64,
    /// `|p - lambda/k|` (vacuum-with-constant branch of the recurrent case).
    pub vacuum_scale: f64,
    /// max-norm of `nabla xi` over the samples (parallel branch).
    pub parallel: f64,
    /// `|p - (2 lambda - k sigma)/(3 k)|` (pseudo branch).
    pub pseudo_pressure: f64,
    /// Whether the implication of the strongest fired flag holds; `None`
    /// when no flag fires.
    pub holds: Option<bool>,
}

/// Classification of the covariant derivative of the effective Ricci form.
#[derive(Clone, Debug, Serialize)]
pub struct NablaSClassification {
    pub ricci_symmetric: RecurrenceFlag,
    pub codazzi: RecurrenceFlag,
    pub alpha_recurrent: AlphaFlag,
    pub weakly_pseudo_symmetric: AlphaFlag,
    pub pseudo_symmetric: AlphaFlag,
    pub implication: ImplicationReport,
    pub structure: Option<StructureFlags>,
}

/// Classification of the covariant derivative of the energy-momentum tensor,
/// with the scalar-curvature relation each fired condition implies.
#[derive(Clone, Debug, Serialize)]
pub struct NablaTClassification {
    pub covariantly_constant: RecurrenceFlag,
    pub codazzi: RecurrenceFlag,
    pub alpha_recurrent: AlphaFlag,
    /// Spread (max - min) of the geometric scalar curvature over samples.
    pub scal_spread: f64,
    /// Populated when `nabla T = 0` fires: max-norm of the exact scalar
    /// curvature gradient (the consequent says it is constant).
    pub constant_scal_residual: Option<f64>,
    /// Populated when the Codazzi condition fires: residual of
    /// `grad(scal) + (d scal)(xi) xi + 2 k (sigma + p) nabla_xi xi`.
    pub codazzi_relation_residual: Option<f64>,
    /// Populated when the recurrent condition fires: residual of
    /// `d scal + [4 lambda - scal - k (sigma + 3 p)] alpha`.
    pub alpha_relation_residual: Option<f64>,
}

struct FramePointData {
    /// Field values in frame components.
    value: [[f64; 4]; 4],
    /// Covariant derivative in frame components, direction slot first.
    nabla: [[[f64; 4]; 4]; 4],
    geo: CurvatureData,
    frame: crate::tensor::OrthonormalFrame,
    xi_val: Vector4<f64>,
}

fn frame_point_data(
    field: &TensorField2,
    g: &MetricField,
    xi: &VectorFieldExpr,
    p: SpacetimePoint,
) -> Result<FramePointData, FluidError> {
    let geo = g.curvature_at(p)?;
    let xi_val = xi.evaluate(p);
    let norm = geo.metric.inner(&xi_val, &xi_val);
    if (norm + 1.0).abs() > UNIT_TOL {
        return Err(FluidError::XiNotUnitTimelike {
            norm,
            point: p.coords,
        });
    }
    let frame = build_frame(&geo.metric, &xi_val).map_err(|source| GeometryError::Tensor {
        point: p.coords,
        source,
    })?;
    let value_coord = field.evaluate(p);
    let nabla_coord = covariant_derivative_2form_at(field, &geo);

    let e = &frame.vectors;
    let value: [[f64; 4]; 4] = from_fn(|a| {
        from_fn(|b| {
            let mut v = 0.0;
            for i in 0..DIM {
                for j in 0..DIM {
                    v += value_coord.get(&[i, j]) * e[a][i] * e[b][j];
                }
            }
            v
        })
    });
    let nabla: [[[f64; 4]; 4]; 4] = from_fn(|a| {
        from_fn(|b| {
            from_fn(|c| {
                let mut v = 0.0;
                for i in 0..DIM {
                    for j in 0..DIM {
                        for k in 0..DIM {
                            v += nabla_coord.get(&[i, j, k]) * e[a][i] * e[b][j] * e[c][k];
                        }
                    }
                }
                v
            })
        })
    });
    Ok(FramePointData {
        value,
        nabla,
        geo,
        frame,
        xi_val,
    })
}

/// Least squares for `nabla F = alpha (x) F`: each direction component is
/// independent. Returns `(alpha, residual)`.
fn fit_simple_recurrence(value: &[[f64; 4]; 4], nabla: &[[[f64; 4]; 4]; 4]) -> ([f64; 4], f64) {
    let mut denom = 0.0;
    for b in 0..DIM {
        for c in 0..DIM {
            denom += value[b][c] * value[b][c];
        }
    }
    let alpha: [f64; 4] = from_fn(|a| {
        let mut num = 0.0;
        for b in 0..DIM {
            for c in 0..DIM {
                num += nabla[a][b][c] * value[b][c];
            }
        }
        if denom > 0.0 {
            num / denom
        } else {
            0.0
        }
    });
    let mut residual: f64 = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                residual = residual.max((nabla[a][b][c] - alpha[a] * value[b][c]).abs());
            }
        }
    }
    (alpha, residual)
}

/// Least squares for the pseudo-symmetry ansatz
/// `nabla_a F_bc = w alpha_a F_bc + alpha_b F_ca + alpha_c F_ab`
/// with weight `w = 1` (weak form) or `w = 2` (strict form).
fn fit_pseudo_recurrence(
    value: &[[f64; 4]; 4],
    nabla: &[[[f64; 4]; 4]; 4],
    weight: f64,
) -> ([f64; 4], f64) {
    let mut m = Matrix4::zeros();
    let mut rhs = Vector4::zeros();
    let coeff = |d: usize, a: usize, b: usize, c: usize| {
        let mut v = 0.0;
        if d == a {
            v += weight * value[b][c];
        }
        if d == b {
            v += value[c][a];
        }
        if d == c {
            v += value[a][b];
        }
        v
    };
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    rhs[d] += coeff(d, a, b, c) * nabla[a][b][c];
                    for e in 0..DIM {
                        m[(d, e)] += coeff(d, a, b, c) * coeff(e, a, b, c);
                    }
                }
            }
        }
    }
    let alpha = m
        .lu()
        .solve(&rhs)
        .map(|v| [v[0], v[1], v[2], v[3]])
        .unwrap_or([0.0; 4]);
    let mut residual: f64 = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                let model = weight * alpha[a] * value[b][c]
                    + alpha[b] * value[c][a]
                    + alpha[c] * value[a][b];
                residual = residual.max((nabla[a][b][c] - model).abs());
            }
        }
    }
    (alpha, residual)
}

/// Classify the recurrence structure of the effective Ricci form over the
/// sample points; `tol` is the classification tolerance.
pub fn classify_nabla_s(
    g: &MetricField,
    xi: &VectorFieldExpr,
    params: FluidParams,
    points: &[SpacetimePoint],
    tol: f64,
) -> Result<NablaSClassification, FluidError> {
    if points.is_empty() {
        return Err(FluidError::NoSamples);
    }
    let field = effective_ricci_field(g, xi, params);

    let mut sym_res: f64 = 0.0;
    let mut codazzi_res: f64 = 0.0;
    let mut recurrent_res: f64 = 0.0;
    let mut weak_res: f64 = 0.0;
    let mut pseudo_res: f64 = 0.0;
    let mut value_max: f64 = 0.0;
    let mut parallel_res: f64 = 0.0;
    let mut first_alpha: Option<([f64; 4], [f64; 4], [f64; 4])> = None;
    let mut div_relation: f64 = 0.0;
    let mut alpha_xi_first: Option<f64> = None;

    for &p in points {
        let data = frame_point_data(&field, g, xi, p)?;
        for a in 0..DIM {
            for b in 0..DIM {
                value_max = value_max.max(data.value[a][b].abs());
                for c in 0..DIM {
                    sym_res = sym_res.max(data.nabla[a][b][c].abs());
                    codazzi_res =
                        codazzi_res.max((data.nabla[a][b][c] - data.nabla[b][a][c]).abs());
                }
            }
        }
        parallel_res = parallel_res.max(nabla_vector(xi, &data.geo).max_abs());

        let (alpha_r, res_r) = fit_simple_recurrence(&data.value, &data.nabla);
        let (alpha_w, res_w) = fit_pseudo_recurrence(&data.value, &data.nabla, 1.0);
        let (alpha_p, res_p) = fit_pseudo_recurrence(&data.value, &data.nabla, 2.0);
        recurrent_res = recurrent_res.max(res_r);
        weak_res = weak_res.max(res_w);
        pseudo_res = pseudo_res.max(res_p);
        if first_alpha.is_none() {
            // frame leg 0 is xi itself, so alpha(xi) is the first component
            let alpha_xi = alpha_w[0];
            let div = crate::geometry::divergence_at(xi, &data.geo);
            div_relation = (div + 3.0 * alpha_xi).abs();
            alpha_xi_first = Some(alpha_xi);
            first_alpha = Some((alpha_r, alpha_w, alpha_p));
        }
    }

    let applicable = value_max > tol;
    let (alpha_r, alpha_w, alpha_p) = first_alpha.expect("at least one point");
    let nonzero = |a: &[f64; 4]| a.iter().any(|v| v.abs() > tol);

    let alpha_recurrent = AlphaFlag {
        residual: recurrent_res,
        fires: applicable && recurrent_res < tol && nonzero(&alpha_r),
        applicable,
        alpha: applicable.then_some(alpha_r),
    };
    let weakly = AlphaFlag {
        residual: weak_res,
        fires: applicable && weak_res < tol && nonzero(&alpha_w),
        applicable,
        alpha: applicable.then_some(alpha_w),
    };
    let pseudo = AlphaFlag {
        residual: pseudo_res,
        fires: applicable && pseudo_res < tol && nonzero(&alpha_p),
        applicable,
        alpha: applicable.then_some(alpha_p),
    };
    let ricci_symmetric = RecurrenceFlag {
        residual: sym_res,
        fires: sym_res < tol,
    };
    let codazzi = RecurrenceFlag {
        residual: codazzi_res,
        fires: codazzi_res < tol,
    };

    let vacuum = (params.sigma + params.p).abs();
    let vacuum_scale = (params.p - params.lambda / params.k).abs();
    let pseudo_pressure = (params.p - params.pseudo_symmetric_pressure()).abs();
    let holds = if weakly.fires || pseudo.fires {
        Some(pseudo_pressure < tol)
    } else if alpha_recurrent.fires {
        Some((vacuum < tol && vacuum_scale < tol) || parallel_res < tol)
    } else if ricci_symmetric.fires || codazzi.fires {
        Some(vacuum < tol || parallel_res < tol)
    } else {
        None
    };

    let structure = if weakly.fires || pseudo.fires {
        alpha_xi_first.map(|alpha_xi| StructureFlags {
            alpha_xi,
            lorentzian_concircular: alpha_xi.abs() > tol,
            lp_sasakian: (alpha_xi + 1.0).abs() < tol,
            divergence_relation: div_relation,
        })
    } else {
        None
    };

    Ok(NablaSClassification {
        ricci_symmetric,
        codazzi,
        alpha_recurrent,
        weakly_pseudo_symmetric: weakly,
        pseudo_symmetric: pseudo,
        implication: ImplicationReport {
            vacuum,
            vacuum_scale,
            parallel: parallel_res,
            pseudo_pressure,
            holds,
        },
        structure,
    })
}

/// Classify the recurrence structure of the energy-momentum tensor over the
/// sample points, evaluating the implied scalar-curvature relations.
pub fn classify_nabla_t(
    g: &MetricField,
    xi: &VectorFieldExpr,
    params: FluidParams,
    points: &[SpacetimePoint],
    tol: f64,
) -> Result<NablaTClassification, FluidError> {
    if points.is_empty() {
        return Err(FluidError::NoSamples);
    }
    let field = energy_momentum_field(g, xi, params);

    let mut const_res: f64 = 0.0;
    let mut codazzi_res: f64 = 0.0;
    let mut recurrent_res: f64 = 0.0;
    let mut value_max: f64 = 0.0;
    let mut first_alpha: Option<[f64; 4]> = None;
    let mut scal_min = f64::INFINITY;
    let mut scal_max = f64::NEG_INFINITY;
    let mut dscal_max: f64 = 0.0;
    let mut codazzi_relation: f64 = 0.0;
    let mut alpha_relation: f64 = 0.0;

    for &p in points {
        let data = frame_point_data(&field, g, xi, p)?;
        for a in 0..DIM {
            for b in 0..DIM {
                value_max = value_max.max(data.value[a][b].abs());
                for c in 0..DIM {
                    const_res = const_res.max(data.nabla[a][b][c].abs());
                    codazzi_res =
                        codazzi_res.max((data.nabla[a][b][c] - data.nabla[b][a][c]).abs());
                }
            }
        }
        let (alpha_r, res_r) = fit_simple_recurrence(&data.value, &data.nabla);
        recurrent_res = recurrent_res.max(res_r);

        scal_min = scal_min.min(data.geo.scal);
        scal_max = scal_max.max(data.geo.scal);
        dscal_max = dscal_max.max(data.geo.dscal.iter().fold(0.0f64, |m, v| m.max(v.abs())));

        // Codazzi consequent: grad(scal) + (d scal)(xi) xi + 2k(sigma+p) nabla_xi xi
        let grad_scal = data.geo.grad_scal();
        let dscal_xi: f64 = (0..DIM).map(|i| data.geo.dscal[i] * data.xi_val[i]).sum();
        let nxi = nabla_vector(xi, &data.geo);
        let mut acc: f64 = 0.0;
        for m in 0..DIM {
            let mut nabla_xi_xi = 0.0;
            for i in 0..DIM {
                nabla_xi_xi += nxi.get(&[m, i]) * data.xi_val[i];
            }
            let v = grad_scal[m]
                + dscal_xi * data.xi_val[m]
                + 2.0 * params.k * (params.sigma + params.p) * nabla_xi_xi;
            acc = acc.max(v.abs());
        }
        codazzi_relation = codazzi_relation.max(acc);

        // recurrent consequent: d scal + [4 lambda - scal - k(sigma+3p)] alpha
        // with alpha converted to coordinate components
        let bracket =
            4.0 * params.lambda - data.geo.scal - params.k * (params.sigma + 3.0 * params.p);
        let gm = data.geo.metric.components();
        let mut acc: f64 = 0.0;
        for i in 0..DIM {
            // alpha(partial_i) = sum_a eps_aa g(partial_i, E_a) alpha_a
            let mut alpha_i = 0.0;
            for (a, sign) in FRAME_SIGNS.iter().enumerate() {
                let mut g_ie = 0.0;
                for j in 0..DIM {
                    g_ie += gm[(i, j)] * data.frame.vectors[a][j];
                }
                alpha_i += sign * g_ie * alpha_r[a];
            }
            acc = acc.max((data.geo.dscal[i] + bracket * alpha_i).abs());
        }
        alpha_relation = alpha_relation.max(acc);

        if first_alpha.is_none() {
            first_alpha = Some(alpha_r);
        }
    }

    let applicable = value_max > tol;
    let alpha_r = first_alpha.expect("at least one point");
    let covariantly_constant = RecurrenceFlag {
        residual: const_res,
        fires: const_res < tol,
    };
    let codazzi = RecurrenceFlag {
        residual: codazzi_res,
        fires: codazzi_res < tol,
    };
    let alpha_recurrent = AlphaFlag {
        residual: recurrent_res,
        fires: applicable && recurrent_res < tol && alpha_r.iter().any(|v| v.abs() > tol),
        applicable,
        alpha: applicable.then_some(alpha_r),
    };

    Ok(NablaTClassification {
        constant_scal_residual: covariantly_constant.fires.then_some(dscal_max),
        codazzi_relation_residual: codazzi.fires.then_some(codazzi_relation),
        alpha_relation_residual: alpha_recurrent.fires.then_some(alpha_relation),
        covariantly_constant,
        codazzi,
        alpha_recurrent,
        scal_spread: scal_max - scal_min,
    })
}

//! Soliton structures driven by the velocity field: residuals of the two
//! soliton equations, closed-form coefficient solving for a perfect fluid,
//! shrinking/steady/expanding classification, and the Laplacian identity for
//! gradient potentials.

use serde::Serialize;
use thiserror::Error;

use crate::expr::Expr;
use crate::fluid::FluidParams;
use crate::geometry::{
    divergence_at, gradient, laplacian, lie_derivative_metric_at, GeometryError, MetricField,
    VectorFieldExpr,
};
use crate::tensor::{SpacetimePoint, DIM};

/// The two soliton equations: the plain one couples `2a g`, the Einstein
/// variant replaces it with `(2a - scal) g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolitonKind {
    EtaRicci,
    EtaEinstein,
}

impl SolitonKind {
    pub fn name(self) -> &'static str {
        match self {
            SolitonKind::EtaRicci => "eta-ricci",
            SolitonKind::EtaEinstein => "eta-einstein",
        }
    }
}

/// The constant pair `(a, b)` of a soliton structure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolitonCoefficients {
    pub a: f64,
    pub b: f64,
}

/// Ricci-soliton class by the sign of `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolitonClass {
    Shrinking,
    Steady,
    Expanding,
}

#[derive(Debug, Error)]
pub enum SolitonError {
    #[error("potential gradient is not unit timelike at {point:?}: g(grad f, grad f) = {norm}")]
    GradientNotUnitTimelike { norm: f64, point: [f64; 4] },
    #[error("conformal factor r must be nonzero")]
    ZeroConformalFactor,
    #[error(
        "div(xi) varies over the samples (spread {spread:.3e} > {tol:.1e}); the soliton \
         coefficients are constants, so a point-dependent divergence admits no solution"
    )]
    DivergenceSpread { spread: f64, tol: f64 },
    #[error("at least one sample point is required")]
    NoSamples,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Max-norm of the soliton equation left-hand side at a point, with the
/// geometric Ricci tensor and scalar curvature.
pub fn soliton_residual(
    kind: SolitonKind,
    g: &MetricField,
    xi: &VectorFieldExpr,
    coeffs: SolitonCoefficients,
    p: SpacetimePoint,
) -> Result<f64, SolitonError> {
    let geo = g.curvature_at(p)?;
    let lie = lie_derivative_metric_at(xi, &geo);
    let xi_val = xi.evaluate(p);
    let eta = geo.metric.lower(&xi_val);
    let gm = geo.metric.components();
    let metric_coeff = match kind {
        SolitonKind::EtaRicci => 2.0 * coeffs.a,
        SolitonKind::EtaEinstein => 2.0 * coeffs.a - geo.scal,
    };
    let mut worst: f64 = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            let v = lie.get(&[i, j])
                + 2.0 * geo.ricci.get(&[i, j])
                + metric_coeff * gm[(i, j)]
                + 2.0 * coeffs.b * eta[i] * eta[j];
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}

/// Closed-form soliton coefficients of a perfect fluid with the given
/// divergence of the velocity field.
pub fn solve_coefficients(
    kind: SolitonKind,
    params: FluidParams,
    div_xi: f64,
) -> SolitonCoefficients {
    let b = -params.k * (params.sigma + params.p) - div_xi / 3.0;
    let a = match kind {
        SolitonKind::EtaRicci => {
            -params.lambda - params.k * (params.sigma - params.p) / 2.0 - div_xi / 3.0
        }
        SolitonKind::EtaEinstein => params.lambda - params.k * params.p - div_xi / 3.0,
    };
    SolitonCoefficients { a, b }
}

/// Statistics of the geometric divergence over the sample set.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DivergenceStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub spread: f64,
}

/// Solve the coefficients with the divergence measured geometrically over
/// the samples. The coefficients are constants, so the solve refuses when
/// the measured divergence is not constant to within `spread_tol`.
pub fn solve_coefficients_sampled(
    kind: SolitonKind,
    params: FluidParams,
    g: &MetricField,
    xi: &VectorFieldExpr,
    points: &[SpacetimePoint],
    spread_tol: f64,
) -> Result<(SolitonCoefficients, DivergenceStats), SolitonError> {
    if points.is_empty() {
        return Err(SolitonError::NoSamples);
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &p in points {
        let geo = g.curvature_at(p)?;
        let d = divergence_at(xi, &geo);
        min = min.min(d);
        max = max.max(d);
        sum += d;
    }
    let stats = DivergenceStats {
        mean: sum / points.len() as f64,
        min,
        max,
        spread: max - min,
    };
    if stats.spread > spread_tol {
        return Err(SolitonError::DivergenceSpread {
            spread: stats.spread,
            tol: spread_tol,
        });
    }
    Ok((solve_coefficients(kind, params, stats.mean), stats))
}

/// Independent audit of the solved coefficients: the trace of the soliton
/// equation. Returns the residual of the contracted identity, which holds
/// for any soliton, fluid or not.
pub fn audit_trace_identity(
    kind: SolitonKind,
    coeffs: SolitonCoefficients,
    scal: f64,
    div_xi: f64,
) -> f64 {
    let dim = DIM as f64;
    match kind {
        // scal = -a dim + b - div(xi)
        SolitonKind::EtaRicci => (scal + dim * coeffs.a - coeffs.b + div_xi).abs(),
        // (2 - dim)/2 scal = -a dim + b - div(xi)
        SolitonKind::EtaEinstein => {
            ((2.0 - dim) / 2.0 * scal + dim * coeffs.a - coeffs.b + div_xi).abs()
        }
    }
}

/// Classification data of the pure Ricci soliton branch (`b = 0`).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RicciSolitonReport {
    pub class: SolitonClass,
    /// `a = -lambda + k (sigma + 3p) / 2` on this branch.
    pub a: f64,
    /// Pressure at which the soliton is steady.
    pub steady_pressure: f64,
    /// `div(xi) = -3 k (sigma + p)` implied on this branch.
    pub implied_div_xi: f64,
}

/// Classify the `b = 0` Ricci soliton of the fluid. Steady means `|a|`
/// below `steady_tol`; the steady pressure equals the pressure forced by a
/// (weakly) pseudo Ricci symmetric structure, and both call sites share
/// [`FluidParams::pseudo_symmetric_pressure`].
pub fn classify_ricci_soliton(params: FluidParams, steady_tol: f64) -> RicciSolitonReport {
    let a = -params.lambda + params.k * (params.sigma + 3.0 * params.p) / 2.0;
    let class = if a.abs() < steady_tol {
        SolitonClass::Steady
    } else if a > 0.0 {
        SolitonClass::Expanding
    } else {
        SolitonClass::Shrinking
    };
    RicciSolitonReport {
        class,
        a,
        steady_pressure: params.pseudo_symmetric_pressure(),
        implied_div_xi: -3.0 * params.k * (params.sigma + params.p),
    }
}

/// Residuals of the Laplacian identity for a gradient potential
/// `xi = grad f` with unit timelike gradient: `Delta f = -3 [b + k (sigma + p)]`.
#[derive(Clone, Debug, Serialize)]
pub struct LaplacianReport {
    /// `Delta f` at each sample.
    pub laplacians: Vec<f64>,
    /// `-3 [b + k (sigma + p)]`.
    pub expected: f64,
    pub max_residual: f64,
    pub pass: bool,
}

pub fn laplacian_equation_check(
    f: &Expr,
    g: &MetricField,
    params: FluidParams,
    b: f64,
    points: &[SpacetimePoint],
    tol: f64,
) -> Result<LaplacianReport, SolitonError> {
    if points.is_empty() {
        return Err(SolitonError::NoSamples);
    }
    let expected = -3.0 * (b + params.k * (params.sigma + params.p));
    let mut laplacians = Vec::with_capacity(points.len());
    let mut max_residual: f64 = 0.0;
    for &p in points {
        let metric = g.evaluate(p)?;
        let grad = gradient(f, g, p)?;
        let norm = metric.inner(&grad, &grad);
        if (norm + 1.0).abs() > 1e-9 {
            return Err(SolitonError::GradientNotUnitTimelike {
                norm,
                point: p.coords,
            });
        }
        let lap = laplacian(f, g, p)?;
        max_residual = max_residual.max((lap - expected).abs());
        laplacians.push(lap);
    }
    Ok(LaplacianReport {
        laplacians,
        expected,
        max_residual,
        pass: max_residual < tol,
    })
}

/// Classification thresholds when the velocity field is conformally Killing
/// with a nonzero factor `r`: the `b = 0` soliton forces the vacuum case and
/// is steady at `p = lambda/k + r/(2k)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConformalKillingReport {
    pub steady_pressure: f64,
    pub class: SolitonClass,
    /// The vacuum implication: `|sigma + p|`.
    pub vacuum_residual: f64,
}

pub fn conformal_killing_analysis(
    params: FluidParams,
    r: f64,
) -> Result<ConformalKillingReport, SolitonError> {
    if r == 0.0 {
        return Err(SolitonError::ZeroConformalFactor);
    }
    let steady_pressure = params.lambda / params.k + r / (2.0 * params.k);
    let class = if (params.p - steady_pressure).abs() < 1e-12 {
        SolitonClass::Steady
    } else if params.p > steady_pressure {
        SolitonClass::Expanding
    } else {
        SolitonClass::Shrinking
    };
    Ok(ConformalKillingReport {
        steady_pressure,
        class,
        vacuum_residual: (params.sigma + params.p).abs(),
    })
}

/// For a torse-forming velocity field with coefficient `alpha`, the `b = 0`
/// soliton forces `alpha = -k (sigma + p)` and `div(xi) = 3 alpha`; the
/// energy conditions then confine `alpha` to `[-2 k sigma, 0)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TorseSolitonBound {
    pub alpha: f64,
    pub div_xi: f64,
    pub window_low: f64,
    /// `alpha >= -2 k sigma`.
    pub above_lower_bound: bool,
    /// `alpha < 0`.
    pub negative: bool,
    pub in_window: bool,
}

pub fn torse_forming_soliton_bound(params: FluidParams) -> TorseSolitonBound {
    let alpha = -params.k * (params.sigma + params.p);
    let window_low = -2.0 * params.k * params.sigma;
    let above_lower_bound = alpha >= window_low;
    let negative = alpha < 0.0;
    TorseSolitonBound {
        alpha,
        div_xi: 3.0 * alpha,
        window_low,
        above_lower_bound,
        negative,
        in_window: above_lower_bound && negative,
    }
}

//! Coordinate charts, expression-backed fields and the curvature pipeline:
//! Levi-Civita connection, Riemann/Ricci/scalar curvature, covariant and Lie
//! derivatives, divergence/gradient/Laplacian, and the torse-forming
//! diagnostics.
//!
//! Differentiation is exact throughout: metric components are expression
//! trees, their first, second and third coordinate derivatives are obtained
//! symbolically, and everything downstream (connection, curvature, curvature
//! gradients) combines those exact values with pointwise linear algebra.
//! Finite differences appear only in test oracles.
//!
//! # Curvature convention
//!
//! `R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`, stored
//! as `R^l_{ijk}` with `R(E_i,E_j)E_k = R^l_{ijk} E_l`, and the Ricci tensor
//! is `S(Y,Z) = trace(X -> R(X,Y)Z)`. With this choice the velocity field of
//! the expanding catalog entry satisfies `R(X,Y)xi = eta(Y)X - eta(X)Y`
//! directly, which is the orientation every residual in this crate expects.

use std::array::from_fn;

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;
use thiserror::Error;

use crate::expr::Expr;
use crate::tensor::{
    MetricAtPoint, OrthonormalFrame, SpacetimePoint, TensorComponents, TensorError, Variance, DIM,
    FRAME_SIGNS,
};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("at {point:?}: {source}")]
    Tensor {
        point: [f64; 4],
        #[source]
        source: TensorError,
    },
    #[error("metric component ({row},{col}) is not finite at {point:?}")]
    NonFiniteMetric {
        row: usize,
        col: usize,
        point: [f64; 4],
    },
    #[error("field `{name}` is not unit timelike at {point:?}: g(v,v) = {norm}")]
    NotUnitTimelike {
        name: &'static str,
        norm: f64,
        point: [f64; 4],
    },
}

type Grid2<T> = [[T; 4]; 4];
type Grid3<T> = [Grid2<T>; 4];
type Grid4<T> = [Grid3<T>; 4];
type Grid5<T> = [Grid4<T>; 4];

/// Symmetric 4x4 array of scalar field expressions, with the first three
/// coordinate-derivative levels of every component prepared at construction.
#[derive(Clone, Debug)]
pub struct MetricField {
    coords: [String; 4],
    components: Grid2<Expr>,
    d1: Box<Grid3<Expr>>,
    d2: Box<Grid4<Expr>>,
    d3: Box<Grid5<Expr>>,
}

impl PartialEq for MetricField {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && self.components == other.components
    }
}

impl MetricField {
    /// Build a metric field from its upper triangle (entries below the
    /// diagonal are mirrored, making symmetry structural).
    pub fn new(coords: [String; 4], components: [[Expr; 4]; 4]) -> MetricField {
        let sym: [[Expr; 4]; 4] = from_fn(|i| {
            from_fn(|j| {
                if i <= j {
                    components[i][j].clone()
                } else {
                    components[j][i].clone()
                }
            })
        });
        let d1: Box<Grid3<Expr>> =
            Box::new(from_fn(|k| from_fn(|i| from_fn(|j| sym[i][j].diff(k)))));
        let d2: Box<Grid4<Expr>> = Box::new(from_fn(|k| {
            from_fn(|l| from_fn(|i| from_fn(|j| d1[l][i][j].diff(k))))
        }));
        let d3: Box<Grid5<Expr>> = Box::new(from_fn(|k| {
            from_fn(|l| from_fn(|m| from_fn(|i| from_fn(|j| d2[l][m][i][j].diff(k)))))
        }));
        MetricField {
            coords,
            components: sym,
            d1,
            d2,
            d3,
        }
    }

    pub fn from_diagonal(coords: [String; 4], diag: [Expr; 4]) -> MetricField {
        let components: [[Expr; 4]; 4] = from_fn(|i| {
            from_fn(|j| {
                if i == j {
                    diag[i].clone()
                } else {
                    Expr::zero()
                }
            })
        });
        MetricField::new(coords, components)
    }

    pub fn coords(&self) -> &[String; 4] {
        &self.coords
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[i][j]
    }

    /// Evaluate and validate the metric at a point.
    pub fn evaluate(&self, p: SpacetimePoint) -> Result<MetricAtPoint, GeometryError> {
        let mut g = Matrix4::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                let v = self.components[i][j].eval(&p.coords);
                if !v.is_finite() {
                    return Err(GeometryError::NonFiniteMetric {
                        row: i,
                        col: j,
                        point: p.coords,
                    });
                }
                g[(i, j)] = v;
            }
        }
        MetricAtPoint::new(g).map_err(|source| GeometryError::Tensor {
            point: p.coords,
            source,
        })
    }

    /// Evaluate the full curvature stack at a point.
    pub fn curvature_at(&self, p: SpacetimePoint) -> Result<CurvatureData, GeometryError> {
        let metric = self.evaluate(p)?;
        let x = &p.coords;

        // exact partials of g, g^-1 and their repeats
        let dg: Grid3<f64> = from_fn(|k| from_fn(|i| from_fn(|j| self.d1[k][i][j].eval(x))));
        let d2g: Grid4<f64> =
            from_fn(|k| from_fn(|l| from_fn(|i| from_fn(|j| self.d2[k][l][i][j].eval(x)))));
        let d3g: Box<Grid5<f64>> = Box::new(from_fn(|k| {
            from_fn(|l| from_fn(|m| from_fn(|i| from_fn(|j| self.d3[k][l][m][i][j].eval(x)))))
        }));

        let ginv = *metric.inverse();
        let dg_m: [Matrix4<f64>; 4] = from_fn(|k| Matrix4::from_fn(|i, j| dg[k][i][j]));
        let dginv_m: [Matrix4<f64>; 4] = from_fn(|k| -ginv * dg_m[k] * ginv);
        let d2ginv_m: [[Matrix4<f64>; 4]; 4] = from_fn(|k| {
            from_fn(|n| {
                let d2g_kn = Matrix4::from_fn(|i, j| d2g[k][n][i][j]);
                -(dginv_m[n] * dg_m[k] * ginv + ginv * d2g_kn * ginv + ginv * dg_m[k] * dginv_m[n])
            })
        });

        // D[m][i][j] = partial_i g_jm + partial_j g_im - partial_m g_ij
        let dsym = |m: usize, i: usize, j: usize| dg[i][j][m] + dg[j][i][m] - dg[m][i][j];
        let dsym_k = |k: usize, m: usize, i: usize, j: usize| {
            d2g[k][i][j][m] + d2g[k][j][i][m] - d2g[k][m][i][j]
        };
        let dsym_kn = |k: usize, n: usize, m: usize, i: usize, j: usize| {
            d3g[k][n][i][j][m] + d3g[k][n][j][i][m] - d3g[k][n][m][i][j]
        };

        let gamma: [[[f64; 4]; 4]; 4] = from_fn(|l| {
            from_fn(|i| {
                from_fn(|j| {
                    let mut sum = 0.0;
                    for m in 0..DIM {
                        sum += ginv[(l, m)] * dsym(m, i, j);
                    }
                    0.5 * sum
                })
            })
        });

        // dgamma[k][l][i][j] = partial_k Gamma^l_ij
        let dgamma: Grid4<f64> = from_fn(|k| {
            from_fn(|l| {
                from_fn(|i| {
                    from_fn(|j| {
                        let mut sum = 0.0;
                        for m in 0..DIM {
                            sum += dginv_m[k][(l, m)] * dsym(m, i, j)
                                + ginv[(l, m)] * dsym_k(k, m, i, j);
                        }
                        0.5 * sum
                    })
                })
            })
        });

        // d2gamma[k][n][l][i][j] = partial_k partial_n Gamma^l_ij
        let d2gamma: Box<Grid5<f64>> = Box::new(from_fn(|k| {
            from_fn(|n| {
                from_fn(|l| {
                    from_fn(|i| {
                        from_fn(|j| {
                            let mut sum = 0.0;
                            for m in 0..DIM {
                                sum += d2ginv_m[k][n][(l, m)] * dsym(m, i, j)
                                    + dginv_m[k][(l, m)] * dsym_k(n, m, i, j)
                                    + dginv_m[n][(l, m)] * dsym_k(k, m, i, j)
                                    + ginv[(l, m)] * dsym_kn(k, n, m, i, j);
                            }
                            0.5 * sum
                        })
                    })
                })
            })
        }));

        // R^l_ijk = partial_i Gamma^l_jk - partial_j Gamma^l_ik
        //           + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
        let mut riemann = TensorComponents::zeros(&[
            Variance::Upper,
            Variance::Lower,
            Variance::Lower,
            Variance::Lower,
        ]);
        for l in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    for k in 0..DIM {
                        let mut v = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                        for m in 0..DIM {
                            v += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                        }
                        riemann.set(&[l, i, j, k], v);
                    }
                }
            }
        }

        // S_jk = R^m_mjk and its exact coordinate gradient
        let mut ricci = TensorComponents::zeros(&[Variance::Lower, Variance::Lower]);
        for j in 0..DIM {
            for k in 0..DIM {
                let mut v = 0.0;
                for m in 0..DIM {
                    v += riemann.get(&[m, m, j, k]);
                }
                ricci.set(&[j, k], v);
            }
        }
        let dricci: Grid3<f64> = from_fn(|n| {
            from_fn(|j| {
                from_fn(|k| {
                    let mut v = 0.0;
                    for m in 0..DIM {
                        v += d2gamma[n][m][m][j][k] - d2gamma[n][j][m][m][k];
                        for a in 0..DIM {
                            v += dgamma[n][m][m][a] * gamma[a][j][k]
                                + gamma[m][m][a] * dgamma[n][a][j][k]
                                - dgamma[n][m][j][a] * gamma[a][m][k]
                                - gamma[m][j][a] * dgamma[n][a][m][k];
                        }
                    }
                    v
                })
            })
        });

        let mut scal = 0.0;
        for j in 0..DIM {
            for k in 0..DIM {
                scal += ginv[(j, k)] * ricci.get(&[j, k]);
            }
        }
        let dscal: [f64; 4] = from_fn(|n| {
            let mut v = 0.0;
            for j in 0..DIM {
                for k in 0..DIM {
                    v += dginv_m[n][(j, k)] * ricci.get(&[j, k]) + ginv[(j, k)] * dricci[n][j][k];
                }
            }
            v
        });

        Ok(CurvatureData {
            point: p,
            metric,
            dg,
            gamma: ConnectionCoefficients { gamma },
            riemann,
            ricci,
            dricci,
            scal,
            dscal,
        })
    }
}

/// Levi-Civita connection coefficients at a point, `gamma[l][i][j]`
/// symmetric in the lower pair.
#[derive(Clone, Debug)]
pub struct ConnectionCoefficients {
    pub gamma: [[[f64; 4]; 4]; 4],
}

/// Everything the curvature pipeline produces at one point.
#[derive(Clone, Debug)]
pub struct CurvatureData {
    pub point: SpacetimePoint,
    pub metric: MetricAtPoint,
    /// `dg[k][i][j] = partial_k g_ij`, exact.
    pub dg: [[[f64; 4]; 4]; 4],
    pub gamma: ConnectionCoefficients,
    /// `(1,3)` curvature, `R^l_{ijk}`.
    pub riemann: TensorComponents,
    /// `(0,2)` Ricci tensor.
    pub ricci: TensorComponents,
    /// `dricci[k][i][j] = partial_k S_ij`, exact.
    pub dricci: [[[f64; 4]; 4]; 4],
    pub scal: f64,
    /// Exact coordinate gradient of the scalar curvature.
    pub dscal: [f64; 4],
}

impl CurvatureData {
    /// Covariant derivative of the geometric Ricci tensor as a `(0,3)`
    /// tensor, direction slot first.
    pub fn nabla_ricci(&self) -> TensorComponents {
        let mut out = TensorComponents::zeros(&[Variance::Lower, Variance::Lower, Variance::Lower]);
        let gamma = &self.gamma.gamma;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    let mut v = self.dricci[i][j][k];
                    for m in 0..DIM {
                        v -= gamma[m][i][j] * self.ricci.get(&[m, k]);
                        v -= gamma[m][i][k] * self.ricci.get(&[j, m]);
                    }
                    out.set(&[i, j, k], v);
                }
            }
        }
        out
    }

    /// Gradient of the scalar curvature as a contravariant vector.
    pub fn grad_scal(&self) -> Vector4<f64> {
        self.metric.raise(&Vector4::from_row_slice(&self.dscal))
    }
}

/// Standalone connection computation (errors if the metric degenerates).
pub fn christoffel(
    g: &MetricField,
    p: SpacetimePoint,
) -> Result<ConnectionCoefficients, GeometryError> {
    Ok(g.curvature_at(p)?.gamma)
}

pub fn riemann(g: &MetricField, p: SpacetimePoint) -> Result<TensorComponents, GeometryError> {
    Ok(g.curvature_at(p)?.riemann)
}

pub fn ricci(g: &MetricField, p: SpacetimePoint) -> Result<TensorComponents, GeometryError> {
    Ok(g.curvature_at(p)?.ricci)
}

pub fn scalar_curvature(g: &MetricField, p: SpacetimePoint) -> Result<f64, GeometryError> {
    Ok(g.curvature_at(p)?.scal)
}

/// Frame-sum form of the scalar curvature: the signed sum of the Ricci
/// tensor over an orthonormal frame. Agrees with the inverse-metric
/// contraction; kept separate so the two routes can be compared.
pub fn scalar_curvature_frame(ricci: &TensorComponents, frame: &OrthonormalFrame) -> f64 {
    let mut sum = 0.0;
    for (a, sign) in FRAME_SIGNS.iter().enumerate() {
        let e = &frame.vectors[a];
        let mut s_ee = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                s_ee += ricci.get(&[i, j]) * e[i] * e[j];
            }
        }
        sum += sign * s_ee;
    }
    sum
}

/// Contravariant vector field with expression components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldExpr {
    pub components: [Expr; 4],
}

impl VectorFieldExpr {
    pub fn new(components: [Expr; 4]) -> VectorFieldExpr {
        VectorFieldExpr { components }
    }

    /// The coordinate basis vector `partial_index`.
    pub fn coordinate_basis(index: usize) -> VectorFieldExpr {
        VectorFieldExpr {
            components: from_fn(|i| {
                if i == index {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }),
        }
    }

    pub fn evaluate(&self, p: SpacetimePoint) -> Vector4<f64> {
        Vector4::from_fn(|i, _| self.components[i].eval(&p.coords))
    }

    /// `partials[i][m] = partial_i xi^m`, exact.
    pub fn partials(&self, p: SpacetimePoint) -> [[f64; 4]; 4] {
        from_fn(|i| from_fn(|m| self.components[m].diff(i).eval(&p.coords)))
    }
}

/// Covariant one-form field with expression components.
#[derive(Clone, Debug, PartialEq)]
pub struct OneFormExpr {
    pub components: [Expr; 4],
}

impl OneFormExpr {
    /// Metric dual of a vector field, built symbolically.
    pub fn lowered(xi: &VectorFieldExpr, g: &MetricField) -> OneFormExpr {
        OneFormExpr {
            components: from_fn(|i| {
                let mut sum = Expr::zero();
                for m in 0..DIM {
                    sum = sum + g.component(i, m).clone() * xi.components[m].clone();
                }
                sum
            }),
        }
    }

    pub fn evaluate(&self, p: SpacetimePoint) -> Vector4<f64> {
        Vector4::from_fn(|i, _| self.components[i].eval(&p.coords))
    }
}

/// A `(0,2)` tensor field backed by expressions, so the covariant derivative
/// can differentiate it through the same exact pipeline as the metric.
#[derive(Clone, Debug)]
pub struct TensorField2 {
    pub components: [[Expr; 4]; 4],
}

impl TensorField2 {
    pub fn evaluate(&self, p: SpacetimePoint) -> TensorComponents {
        let mut data = Vec::with_capacity(16);
        for i in 0..DIM {
            for j in 0..DIM {
                data.push(self.components[i][j].eval(&p.coords));
            }
        }
        TensorComponents::from_data(&[Variance::Lower, Variance::Lower], data)
    }
}

/// Covariant derivative of a `(0,1)` field (a one-form), `(nabla eta)_{ij}`
/// with the direction slot first.
pub fn nabla_one_form(eta: &OneFormExpr, geo: &CurvatureData) -> TensorComponents {
    let p = geo.point;
    let mut out = TensorComponents::zeros(&[Variance::Lower, Variance::Lower]);
    for i in 0..DIM {
        for j in 0..DIM {
            let mut v = eta.components[j].diff(i).eval(&p.coords);
            for m in 0..DIM {
                v -= geo.gamma.gamma[m][i][j] * eta.components[m].eval(&p.coords);
            }
            out.set(&[i, j], v);
        }
    }
    out
}

/// Covariant derivative `(nabla_X F)(Y,Z)` of an expression-backed `(0,2)`
/// field, returned as a `(0,3)` tensor with the direction slot first.
pub fn covariant_derivative_2form(
    field: &TensorField2,
    g: &MetricField,
    p: SpacetimePoint,
) -> Result<TensorComponents, GeometryError> {
    let geo = g.curvature_at(p)?;
    Ok(covariant_derivative_2form_at(field, &geo))
}

/// Same as [`covariant_derivative_2form`] on an already-evaluated point.
pub fn covariant_derivative_2form_at(
    field: &TensorField2,
    geo: &CurvatureData,
) -> TensorComponents {
    let x = &geo.point.coords;
    let value: [[f64; 4]; 4] = from_fn(|i| from_fn(|j| field.components[i][j].eval(x)));
    let mut out = TensorComponents::zeros(&[Variance::Lower, Variance::Lower, Variance::Lower]);
    let gamma = &geo.gamma.gamma;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let mut v = field.components[j][k].diff(i).eval(x);
                for m in 0..DIM {
                    v -= gamma[m][i][j] * value[m][k];
                    v -= gamma[m][i][k] * value[j][m];
                }
                out.set(&[i, j, k], v);
            }
        }
    }
    out
}

/// `(nabla xi)^m_i` as a `(1,1)` tensor (value slot first).
pub fn nabla_vector(xi: &VectorFieldExpr, geo: &CurvatureData) -> TensorComponents {
    let p = geo.point;
    let xi_val = xi.evaluate(p);
    let dxi = xi.partials(p);
    let mut out = TensorComponents::zeros(&[Variance::Upper, Variance::Lower]);
    for m in 0..DIM {
        for i in 0..DIM {
            let mut v = dxi[i][m];
            for a in 0..DIM {
                v += geo.gamma.gamma[m][i][a] * xi_val[a];
            }
            out.set(&[m, i], v);
        }
    }
    out
}

/// Lie derivative of the metric along `xi`:
/// `(L_xi g)(X,Y) = g(nabla_X xi, Y) + g(X, nabla_Y xi)`.
pub fn lie_derivative_metric(
    xi: &VectorFieldExpr,
    g: &MetricField,
    p: SpacetimePoint,
) -> Result<TensorComponents, GeometryError> {
    let geo = g.curvature_at(p)?;
    Ok(lie_derivative_metric_at(xi, &geo))
}

pub fn lie_derivative_metric_at(xi: &VectorFieldExpr, geo: &CurvatureData) -> TensorComponents {
    let nxi = nabla_vector(xi, geo);
    let g = geo.metric.components();
    let mut out = TensorComponents::zeros(&[Variance::Lower, Variance::Lower]);
    for i in 0..DIM {
        for j in 0..DIM {
            let mut v = 0.0;
            for m in 0..DIM {
                v += g[(m, j)] * nxi.get(&[m, i]) + g[(i, m)] * nxi.get(&[m, j]);
            }
            out.set(&[i, j], v);
        }
    }
    out
}

/// Coordinate-formula divergence: the trace of `nabla xi`.
pub fn divergence(
    xi: &VectorFieldExpr,
    g: &MetricField,
    p: SpacetimePoint,
) -> Result<f64, GeometryError> {
    let geo = g.curvature_at(p)?;
    Ok(divergence_at(xi, &geo))
}

pub fn divergence_at(xi: &VectorFieldExpr, geo: &CurvatureData) -> f64 {
    let nxi = nabla_vector(xi, geo);
    (0..DIM).map(|m| nxi.get(&[m, m])).sum()
}

/// Frame-sum divergence: the signed sum of `g(nabla_{E_i} xi, E_i)`.
/// Must agree with [`divergence`]; kept as an independent route.
pub fn divergence_frame(
    xi: &VectorFieldExpr,
    geo: &CurvatureData,
    frame: &OrthonormalFrame,
) -> f64 {
    let nxi = nabla_vector(xi, geo);
    let g = geo.metric.components();
    let mut sum = 0.0;
    for (a, sign) in FRAME_SIGNS.iter().enumerate() {
        let e = &frame.vectors[a];
        // nabla_{E_a} xi = e^i (nabla xi)^m_i
        let mut term = 0.0;
        for m in 0..DIM {
            let mut dir = 0.0;
            for i in 0..DIM {
                dir += nxi.get(&[m, i]) * e[i];
            }
            for n in 0..DIM {
                term += g[(m, n)] * dir * e[n];
            }
        }
        sum += sign * term;
    }
    sum
}

/// Contravariant gradient of a scalar expression field.
pub fn gradient(
    f: &Expr,
    g: &MetricField,
    p: SpacetimePoint,
) -> Result<Vector4<f64>, GeometryError> {
    let metric = g.evaluate(p)?;
    let df = Vector4::from_fn(|i, _| f.diff(i).eval(&p.coords));
    Ok(metric.raise(&df))
}

/// Laplace-Beltrami operator `Delta f = div(grad f)`, computed directly as
/// `g^{ij}(partial_i partial_j f - Gamma^m_{ij} partial_m f)`.
pub fn laplacian(f: &Expr, g: &MetricField, p: SpacetimePoint) -> Result<f64, GeometryError> {
    let geo = g.curvature_at(p)?;
    let x = &p.coords;
    let df: [f64; 4] = from_fn(|i| f.diff(i).eval(x));
    let hess: [[f64; 4]; 4] = from_fn(|i| from_fn(|j| f.diff(i).diff(j).eval(x)));
    let ginv = geo.metric.inverse();
    let mut sum = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            let mut v = hess[i][j];
            for m in 0..DIM {
                v -= geo.gamma.gamma[m][i][j] * df[m];
            }
            sum += ginv[(i, j)] * v;
        }
    }
    Ok(sum)
}

/// Residuals of the torse-forming structure equations of a unit timelike
/// field: `nabla xi = I + eta (x) xi` plus the curvature identities it
/// implies, evaluated on an orthonormal frame.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TorseFormingReport {
    /// max-norm of `nabla xi - (I + eta (x) xi)`.
    pub nabla_xi: f64,
    /// max over frame pairs of `R(X,Y)xi - [eta(Y)X - eta(X)Y]`.
    pub curvature_velocity: f64,
    /// max over frame triples of `eta(R(X,Y)Z) + eta(Y)g(X,Z) - eta(X)g(Y,Z)`.
    pub eta_curvature: f64,
    /// max-norm of the exterior derivative of `eta`.
    pub d_eta: f64,
    /// max-norm of `nabla_xi xi`.
    pub geodesic: f64,
    /// max over directions of `g(nabla_X xi, xi)`.
    pub orthogonality: f64,
}

impl TorseFormingReport {
    /// The residual of the defining equation; the gate used by suites that
    /// presuppose the unit torse-forming normalization.
    pub fn defining_residual(&self) -> f64 {
        self.nabla_xi
    }

    pub fn max_identity_residual(&self) -> f64 {
        self.nabla_xi
            .max(self.curvature_velocity)
            .max(self.eta_curvature)
            .max(self.d_eta)
            .max(self.geodesic)
    }
}

pub fn torse_forming_report(
    xi: &VectorFieldExpr,
    g: &MetricField,
    p: SpacetimePoint,
) -> Result<TorseFormingReport, GeometryError> {
    let geo = g.curvature_at(p)?;
    torse_forming_report_at(xi, &geo)
}

pub fn torse_forming_report_at(
    xi: &VectorFieldExpr,
    geo: &CurvatureData,
) -> Result<TorseFormingReport, GeometryError> {
    const UNIT_TOL: f64 = 1e-9;
    let p = geo.point;
    let xi_val = xi.evaluate(p);
    let norm = geo.metric.inner(&xi_val, &xi_val);
    if (norm + 1.0).abs() > UNIT_TOL {
        return Err(GeometryError::NotUnitTimelike {
            name: "xi",
            norm,
            point: p.coords,
        });
    }
    let eta = geo.metric.lower(&xi_val);
    let nxi = nabla_vector(xi, geo);

    let mut nabla_xi_res: f64 = 0.0;
    for m in 0..DIM {
        for i in 0..DIM {
            let unit = if m == i { 1.0 } else { 0.0 };
            let expected = unit + xi_val[m] * eta[i];
            nabla_xi_res = nabla_xi_res.max((nxi.get(&[m, i]) - expected).abs());
        }
    }

    let frame = crate::tensor::build_frame(&geo.metric, &xi_val).map_err(|source| {
        GeometryError::Tensor {
            point: p.coords,
            source,
        }
    })?;
    let gm = geo.metric.components();

    let mut curvature_velocity: f64 = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            let x_vec = &frame.vectors[a];
            let y_vec = &frame.vectors[b];
            let eta_x: f64 = (0..DIM).map(|i| eta[i] * x_vec[i]).sum();
            let eta_y: f64 = (0..DIM).map(|i| eta[i] * y_vec[i]).sum();
            for l in 0..DIM {
                let mut r = 0.0;
                for i in 0..DIM {
                    for j in 0..DIM {
                        for k in 0..DIM {
                            r += geo.riemann.get(&[l, i, j, k]) * x_vec[i] * y_vec[j] * xi_val[k];
                        }
                    }
                }
                let expected = eta_y * x_vec[l] - eta_x * y_vec[l];
                curvature_velocity = curvature_velocity.max((r - expected).abs());
            }
        }
    }

    let mut eta_curvature: f64 = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                let x_vec = &frame.vectors[a];
                let y_vec = &frame.vectors[b];
                let z_vec = &frame.vectors[c];
                let mut eta_r = 0.0;
                for l in 0..DIM {
                    let mut r = 0.0;
                    for i in 0..DIM {
                        for j in 0..DIM {
                            for k in 0..DIM {
                                r +=
                                    geo.riemann.get(&[l, i, j, k]) * x_vec[i] * y_vec[j] * z_vec[k];
                            }
                        }
                    }
                    eta_r += eta[l] * r;
                }
                let eta_x: f64 = (0..DIM).map(|i| eta[i] * x_vec[i]).sum();
                let eta_y: f64 = (0..DIM).map(|i| eta[i] * y_vec[i]).sum();
                let gxz = (0..DIM)
                    .flat_map(|i| (0..DIM).map(move |j| (i, j)))
                    .map(|(i, j)| gm[(i, j)] * x_vec[i] * z_vec[j])
                    .sum::<f64>();
                let gyz = (0..DIM)
                    .flat_map(|i| (0..DIM).map(move |j| (i, j)))
                    .map(|(i, j)| gm[(i, j)] * y_vec[i] * z_vec[j])
                    .sum::<f64>();
                eta_curvature = eta_curvature.max((eta_r + eta_y * gxz - eta_x * gyz).abs());
            }
        }
    }

    // d eta from exact partials of eta_j = g_jm xi^m
    let dxi = xi.partials(p);
    let deta: [[f64; 4]; 4] = from_fn(|i| {
        from_fn(|j| {
            let mut v = 0.0;
            for m in 0..DIM {
                v += geo.dg[i][j][m] * xi_val[m] + gm[(j, m)] * dxi[i][m];
            }
            v
        })
    });
    let mut d_eta: f64 = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            d_eta = d_eta.max((deta[i][j] - deta[j][i]).abs());
        }
    }

    let mut geodesic: f64 = 0.0;
    for m in 0..DIM {
        let mut v = 0.0;
        for i in 0..DIM {
            v += nxi.get(&[m, i]) * xi_val[i];
        }
        geodesic = geodesic.max(v.abs());
    }

    let mut orthogonality: f64 = 0.0;
    for i in 0..DIM {
        let mut v = 0.0;
        for m in 0..DIM {
            for n in 0..DIM {
                v += gm[(m, n)] * nxi.get(&[m, i]) * xi_val[n];
            }
        }
        orthogonality = orthogonality.max(v.abs());
    }

    Ok(TorseFormingReport {
        nabla_xi: nabla_xi_res,
        curvature_velocity,
        eta_curvature,
        d_eta,
        geodesic,
        orthogonality,
    })
}

/// Riemann symmetry diagnostics: antisymmetry in the argument pair, the
/// antisymmetry of the lowered tensor in its last two slots, and the first
/// Bianchi sum.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RiemannSymmetryReport {
    pub argument_antisymmetry: f64,
    pub lowered_antisymmetry: f64,
    pub first_bianchi: f64,
}

impl RiemannSymmetryReport {
    pub fn max(&self) -> f64 {
        self.argument_antisymmetry
            .max(self.lowered_antisymmetry)
            .max(self.first_bianchi)
    }
}

pub fn riemann_symmetry_report(geo: &CurvatureData) -> RiemannSymmetryReport {
    let r = &geo.riemann;
    let lowered = r.raise_lower(0, &geo.metric).expect("slot 0 exists");
    let mut argument_antisymmetry: f64 = 0.0;
    let mut lowered_antisymmetry: f64 = 0.0;
    let mut first_bianchi: f64 = 0.0;
    for l in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    argument_antisymmetry = argument_antisymmetry
                        .max((r.get(&[l, i, j, k]) + r.get(&[l, j, i, k])).abs());
                    lowered_antisymmetry = lowered_antisymmetry
                        .max((lowered.get(&[l, i, j, k]) + lowered.get(&[k, i, j, l])).abs());
                    first_bianchi = first_bianchi.max(
                        (r.get(&[l, i, j, k]) + r.get(&[l, j, k, i]) + r.get(&[l, k, i, j])).abs(),
                    );
                }
            }
        }
    }
    RiemannSymmetryReport {
        argument_antisymmetry,
        lowered_antisymmetry,
        first_bianchi,
    }
}

/// Max-norm of `nabla g` at a point; vanishes for the Levi-Civita connection.
pub fn metric_compatibility_residual(g: &MetricField, geo: &CurvatureData) -> f64 {
    let field = TensorField2 {
        components: from_fn(|i| from_fn(|j| g.component(i, j).clone())),
    };
    covariant_derivative_2form_at(&field, geo).max_abs()
}

//! Built-in example spacetimes with known fluid data, plus parsing and
//! serialization of user spacetime specifications.
//!
//! A spec file is a single JSON document:
//!
//! ```json
//! {
//!   "name": "expanding-vacuum",
//!   "coords": ["t", "x", "y", "z"],
//!   "metric": [["-1", "0", "0", "0"],
//!              ["exp(2*t)", "0", "0"],
//!              ["exp(2*t)", "0"],
//!              ["exp(2*t)"]],
//!   "xi": ["1", "0", "0", "0"],
//!   "fluid": {"lambda": 2.0, "k": 1.0, "sigma": 1.0, "p": -1.0},
//!   "domain": {"t": [-0.5, 0.5], "x": [-1, 1], "y": [-1, 1], "z": [-1, 1]},
//!   "samples": 50,
//!   "seed": 7
//! }
//! ```
//!
//! Metric rows list the entries from the diagonal rightward (row `i` holds
//! `g[i][i..4]`), so the lower triangle is omitted; full 4-entry rows are
//! accepted too, in which case the sub-diagonal entries must agree with
//! their mirror images. Expressions use the grammar of [`crate::expr`].
//! Every load validates that the metric has signature `(-,+,+,+)` and the
//! velocity field satisfies `g(xi,xi) = -1` at all sampled points.

use std::array::from_fn;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Expr, ExprError};
use crate::fluid::{FluidError, FluidParams};
use crate::geometry::{GeometryError, MetricField, VectorFieldExpr};
use crate::tensor::SpacetimePoint;

/// A complete analyzable scene: chart, metric, velocity field, fluid
/// constants and the sampling recipe.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacetimeSpec {
    pub name: String,
    pub coords: [String; 4],
    pub metric: MetricField,
    pub xi: VectorFieldExpr,
    pub fluid: FluidParams,
    /// Closed sampling interval per coordinate.
    pub domain: [[f64; 2]; 4],
    pub samples: usize,
    pub seed: u64,
}

pub const BUILTIN_NAMES: [&str; 5] = [
    "minkowski",
    "desitter-torse",
    "einstein-static",
    "radiation-flrw",
    "flrw(a(t) [, sigma, p])",
];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown builtin spacetime `{0}`")]
    UnknownBuiltin(String),
    #[error("malformed builtin `{name}`: {message}")]
    MalformedBuiltin { name: String, message: String },
    #[error("spec file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {source}")]
    Expression {
        field: String,
        #[source]
        source: ExprError,
    },
    #[error("field `{field}`: {message}")]
    Shape { field: String, message: String },
    #[error("metric entry ({row},{col}) does not match its mirror image")]
    AsymmetricMetric { row: usize, col: usize },
    #[error("velocity field violates the constraint g(xi,xi) = -1 at {point:?}: got {norm}")]
    XiNotUnit { norm: f64, point: [f64; 4] },
    #[error("metric validation failed: {0}")]
    Metric(#[from] GeometryError),
    #[error(transparent)]
    Fluid(#[from] FluidError),
}

impl SpacetimeSpec {
    /// Seeded sample points, uniform over the domain box. Deterministic for
    /// a given seed.
    pub fn sample_points(&self) -> Vec<SpacetimePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.samples)
            .map(|_| {
                let coords = from_fn(|i| {
                    let [lo, hi] = self.domain[i];
                    rng.gen::<f64>() * (hi - lo) + lo
                });
                SpacetimePoint::new(coords)
            })
            .collect()
    }

    /// Center of the sampling domain.
    pub fn center(&self) -> SpacetimePoint {
        SpacetimePoint::new(from_fn(|i| (self.domain[i][0] + self.domain[i][1]) / 2.0))
    }

    /// Check signature and velocity normalization at every sampled point.
    pub fn validate(&self) -> Result<(), CatalogError> {
        self.fluid.validate()?;
        for p in self.sample_points() {
            let metric = self.metric.evaluate(p)?;
            let xi = self.xi.evaluate(p);
            let norm = metric.inner(&xi, &xi);
            if (norm + 1.0).abs() > 1e-9 {
                return Err(CatalogError::XiNotUnit {
                    norm,
                    point: p.coords,
                });
            }
        }
        Ok(())
    }
}

fn txyz() -> [String; 4] {
    ["t", "x", "y", "z"].map(String::from)
}

fn diagonal_metric(spatial: Expr) -> MetricField {
    MetricField::from_diagonal(
        txyz(),
        [
            Expr::constant(-1.0),
            spatial.clone(),
            spatial.clone(),
            spatial,
        ],
    )
}

fn time_axis() -> VectorFieldExpr {
    VectorFieldExpr::coordinate_basis(0)
}

const DEFAULT_DOMAIN: [[f64; 2]; 4] = [[-0.5, 0.5], [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]];

/// Look up (or construct) a built-in spacetime.
///
/// Accepted names: `minkowski`, `desitter-torse`, `einstein-static`,
/// `radiation-flrw`, and the parametrized family `flrw(a(t))` or
/// `flrw(a(t), sigma, p)` with `a(t)` an expression in `t`. The one-argument
/// form fits the fluid from the quasi-Einstein decomposition at the domain
/// center with `lambda = k = 1`.
pub fn builtin(name: &str) -> Result<SpacetimeSpec, CatalogError> {
    let trimmed = name.trim();
    match trimmed {
        "minkowski" => Ok(SpacetimeSpec {
            name: "minkowski".into(),
            coords: txyz(),
            metric: diagonal_metric(Expr::one()),
            xi: time_axis(),
            fluid: FluidParams::new(0.0, 1.0, 0.0, 0.0)?,
            domain: DEFAULT_DOMAIN,
            samples: 50,
            seed: 0,
        }),
        "desitter-torse" => Ok(SpacetimeSpec {
            name: "desitter-torse".into(),
            coords: txyz(),
            metric: diagonal_metric(Expr::parse("exp(2*t)", &txyz()).expect("fixed expression")),
            xi: time_axis(),
            fluid: FluidParams::new(2.0, 1.0, 1.0, -1.0)?,
            domain: DEFAULT_DOMAIN,
            samples: 50,
            seed: 0,
        }),
        "einstein-static" => {
            // static slice of constant spatial curvature K = 1 in its
            // conformally flat chart; solves the field equations exactly
            // with lambda = K, k sigma = 2K, p = 0
            let conformal =
                Expr::parse("(1 + (x^2 + y^2 + z^2)/4)^-2", &txyz()).expect("fixed expression");
            Ok(SpacetimeSpec {
                name: "einstein-static".into(),
                coords: txyz(),
                metric: diagonal_metric(conformal),
                xi: time_axis(),
                fluid: FluidParams::new(1.0, 1.0, 2.0, 0.0)?,
                domain: [[-0.5, 0.5], [-0.2, 0.2], [-0.2, 0.2], [-0.2, 0.2]],
                samples: 50,
                seed: 0,
            })
        }
        "radiation-flrw" => {
            // a(t)^2 = t has identically zero scalar curvature, matching the
            // radiation trace 4*lambda with lambda = 0; fluid values are the
            // Friedmann densities at t = 1
            Ok(SpacetimeSpec {
                name: "radiation-flrw".into(),
                coords: txyz(),
                metric: diagonal_metric(Expr::parse("t", &txyz()).expect("fixed expression")),
                xi: time_axis(),
                fluid: FluidParams::new(0.0, 1.0, 0.75, 0.25)?,
                domain: [[0.5, 1.5], [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
                samples: 50,
                seed: 0,
            })
        }
        other if other.starts_with("flrw(") && other.ends_with(')') => flrw_builtin(other),
        other => Err(CatalogError::UnknownBuiltin(other.to_string())),
    }
}

fn flrw_builtin(invocation: &str) -> Result<SpacetimeSpec, CatalogError> {
    let inner = &invocation["flrw(".len()..invocation.len() - 1];
    let args = split_top_level(inner);
    let malformed = |message: &str| CatalogError::MalformedBuiltin {
        name: invocation.to_string(),
        message: message.to_string(),
    };
    if args.is_empty() || args.len() == 2 || args.len() > 3 {
        return Err(malformed("expected flrw(a(t)) or flrw(a(t), sigma, p)"));
    }
    let scale =
        Expr::parse(args[0].trim(), &txyz()).map_err(|source| CatalogError::Expression {
            field: "flrw scale factor".into(),
            source,
        })?;
    let spatial = Expr::Pow(Arc::new(scale), Arc::new(Expr::constant(2.0)));
    let metric = diagonal_metric(spatial);
    let domain = [[0.5, 1.5], [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]];

    let fluid = if args.len() == 3 {
        let sigma: f64 = args[1]
            .trim()
            .parse()
            .map_err(|_| malformed("sigma must be a number"))?;
        let p: f64 = args[2]
            .trim()
            .parse()
            .map_err(|_| malformed("p must be a number"))?;
        FluidParams::new(1.0, 1.0, sigma, p)?
    } else {
        // fit the quasi-Einstein decomposition of the geometric Ricci
        // tensor at the domain center, with lambda = k = 1
        let center = SpacetimePoint::new([1.0, 0.0, 0.0, 0.0]);
        let geo = metric.curvature_at(center)?;
        let xi_val = time_axis().evaluate(center);
        let eta = geo.metric.lower(&xi_val);
        let fit = crate::fluid::fit_quasi_einstein(&[crate::fluid::QuasiEinsteinSample {
            ricci: geo.ricci.clone(),
            metric: geo.metric.clone(),
            eta,
        }])?;
        let (sigma, p) = fit.recover_fluid(1.0, 1.0);
        FluidParams::new(1.0, 1.0, sigma, p)?
    };

    Ok(SpacetimeSpec {
        name: invocation.to_string(),
        coords: txyz(),
        metric,
        xi: time_axis(),
        fluid,
        domain,
        samples: 50,
        seed: 0,
    })
}

fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !text[start..].trim().is_empty() || !parts.is_empty() {
        parts.push(&text[start..]);
    }
    parts
}

/// On-disk JSON shape of a spacetime spec.
#[derive(Serialize, Deserialize)]
struct SpecFile {
    name: String,
    coords: Vec<String>,
    metric: Vec<Vec<String>>,
    xi: Vec<String>,
    fluid: FluidParams,
    #[serde(default)]
    domain: serde_json::Map<String, serde_json::Value>,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default)]
    seed: u64,
}

fn default_samples() -> usize {
    50
}

/// Parse and validate a spacetime spec from JSON text.
pub fn parse_spec(text: &str) -> Result<SpacetimeSpec, CatalogError> {
    let file: SpecFile = serde_json::from_str(text)?;

    if file.coords.len() != 4 {
        return Err(CatalogError::Shape {
            field: "coords".into(),
            message: format!("expected 4 coordinate names, got {}", file.coords.len()),
        });
    }
    let coords: [String; 4] = from_fn(|i| file.coords[i].clone());
    for (i, c) in coords.iter().enumerate() {
        let valid = !c.is_empty()
            && c.chars().next().unwrap().is_ascii_alphabetic()
            && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_');
        if !valid {
            return Err(CatalogError::Shape {
                field: format!("coords[{i}]"),
                message: format!("`{c}` is not a valid coordinate name"),
            });
        }
        if coords[..i].contains(c) {
            return Err(CatalogError::Shape {
                field: format!("coords[{i}]"),
                message: format!("duplicate coordinate name `{c}`"),
            });
        }
    }

    if file.metric.len() != 4 {
        return Err(CatalogError::Shape {
            field: "metric".into(),
            message: format!("expected 4 rows, got {}", file.metric.len()),
        });
    }
    let mut upper: [[Option<Expr>; 4]; 4] = Default::default();
    let mut lower_checks: Vec<(usize, usize, Expr)> = Vec::new();
    for (i, row) in file.metric.iter().enumerate() {
        let expected_triangular = 4 - i;
        if row.len() != 4 && row.len() != expected_triangular {
            return Err(CatalogError::Shape {
                field: format!("metric[{i}]"),
                message: format!(
                    "row must have 4 entries or {expected_triangular} (diagonal rightward), got {}",
                    row.len()
                ),
            });
        }
        for (slot, text) in row.iter().enumerate() {
            // triangular rows start at the diagonal
            let j = if row.len() == 4 { slot } else { i + slot };
            let expr = Expr::parse(text, &coords).map_err(|source| CatalogError::Expression {
                field: format!("metric[{i}][{j}]"),
                source,
            })?;
            if j < i {
                lower_checks.push((i, j, expr));
            } else {
                upper[i][j] = Some(expr);
            }
        }
    }
    let components: [[Expr; 4]; 4] = from_fn(|i| {
        from_fn(|j| {
            let (r, c) = if i <= j { (i, j) } else { (j, i) };
            upper[r][c].clone().unwrap_or_else(Expr::zero)
        })
    });

    // domain
    let mut domain = DEFAULT_DOMAIN;
    for (key, value) in &file.domain {
        let Some(index) = coords.iter().position(|c| c == key) else {
            return Err(CatalogError::Shape {
                field: format!("domain.{key}"),
                message: "not a coordinate of this chart".into(),
            });
        };
        let pair: [f64; 2] =
            serde_json::from_value(value.clone()).map_err(|_| CatalogError::Shape {
                field: format!("domain.{key}"),
                message: "expected [lo, hi]".into(),
            })?;
        if !(pair[0].is_finite() && pair[1].is_finite() && pair[0] < pair[1]) {
            return Err(CatalogError::Shape {
                field: format!("domain.{key}"),
                message: "interval must be finite with lo < hi".into(),
            });
        }
        domain[index] = pair;
    }

    if file.xi.len() != 4 {
        return Err(CatalogError::Shape {
            field: "xi".into(),
            message: format!("expected 4 components, got {}", file.xi.len()),
        });
    }
    let xi_components: [Expr; 4] = {
        let mut out: [Option<Expr>; 4] = Default::default();
        for (i, text) in file.xi.iter().enumerate() {
            out[i] =
                Some(
                    Expr::parse(text, &coords).map_err(|source| CatalogError::Expression {
                        field: format!("xi[{i}]"),
                        source,
                    })?,
                );
        }
        from_fn(|i| out[i].take().unwrap())
    };

    if file.samples == 0 {
        return Err(CatalogError::Shape {
            field: "samples".into(),
            message: "must be at least 1".into(),
        });
    }

    let spec = SpacetimeSpec {
        name: file.name,
        coords: coords.clone(),
        metric: MetricField::new(coords, components),
        xi: VectorFieldExpr::new(xi_components),
        fluid: file.fluid,
        domain,
        samples: file.samples,
        seed: file.seed,
    };

    // explicit sub-diagonal entries must agree with their mirror images;
    // structurally different expressions are probed at sampled points
    let mut probes = vec![spec.center()];
    probes.extend(spec.sample_points().into_iter().take(8));
    for (i, j, expr) in lower_checks {
        let mirrored = spec.metric.component(j, i);
        if expr != *mirrored {
            for probe in &probes {
                let a = expr.eval(&probe.coords);
                let b = mirrored.eval(&probe.coords);
                if !((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)) {
                    return Err(CatalogError::AsymmetricMetric { row: i, col: j });
                }
            }
        }
    }

    spec.validate()?;
    Ok(spec)
}

/// Serialize a spec to its JSON file form (metric as the upper triangle).
pub fn serialize_spec(spec: &SpacetimeSpec) -> String {
    let metric: Vec<Vec<String>> = (0..4)
        .map(|i| {
            (i..4)
                .map(|j| spec.metric.component(i, j).render(&spec.coords))
                .collect()
        })
        .collect();
    let xi: Vec<String> = spec
        .xi
        .components
        .iter()
        .map(|e| e.render(&spec.coords))
        .collect();
    let mut domain = serde_json::Map::new();
    for (i, c) in spec.coords.iter().enumerate() {
        domain.insert(
            c.clone(),
            serde_json::json!([spec.domain[i][0], spec.domain[i][1]]),
        );
    }
    let file = SpecFile {
        name: spec.name.clone(),
        coords: spec.coords.to_vec(),
        metric,
        xi,
        fluid: spec.fluid,
        domain,
        samples: spec.samples,
        seed: spec.seed,
    };
    serde_json::to_string_pretty(&file).expect("spec serialization cannot fail")
}

//! Pointwise multilinear algebra over a 4-dimensional Lorentzian tangent
//! space: dense tensor components, metric contraction, index raising and
//! lowering, and signed orthonormal frames.
//!
//! # Index convention
//!
//! Components are stored dense and row-major, slots appearing in the order
//! the indices are written. A `(0,2)` tensor `S(X,Y)` stores `S[i][j]` with
//! slot 0 bound to `X`. The curvature `(1,3)` tensor is stored as
//! `R^l_{ijk}`, slot order `(l, i, j, k)`, meaning `R(E_i, E_j)E_k =
//! R^l_{ijk} E_l`: the contravariant value slot comes first, followed by the
//! argument slots left to right. Every module in this crate uses this
//! convention.

use nalgebra::{Matrix4, Vector4};
use thiserror::Error;

pub const DIM: usize = 4;

/// Signature signs of an orthonormal frame: the timelike leg first.
pub const FRAME_SIGNS: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// A chart point. Coordinates are plain chart values, all finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpacetimePoint {
    pub coords: [f64; 4],
}

impl SpacetimePoint {
    pub fn new(coords: [f64; 4]) -> SpacetimePoint {
        assert!(
            coords.iter().all(|c| c.is_finite()),
            "chart coordinates must be finite"
        );
        SpacetimePoint { coords }
    }

    pub fn origin() -> SpacetimePoint {
        SpacetimePoint { coords: [0.0; 4] }
    }
}

/// Variance of a tensor slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    /// Contravariant (vector-like) slot.
    Upper,
    /// Covariant (argument) slot.
    Lower,
}

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("slot {slot} out of range for rank {rank}")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("cannot contract slot {0} with itself")]
    EqualSlots(usize),
    #[error("contracting two slots of equal variance requires the metric")]
    MetricRequired,
    #[error("metric is degenerate (not invertible)")]
    DegenerateMetric,
    #[error("metric eigenvalue signs are not (-,+,+,+)")]
    WrongSignature,
    #[error("metric is not symmetric")]
    NotSymmetric,
    #[error("vector is not timelike (g(v,v) = {0})")]
    NotTimelike(f64),
    #[error("vector is not unit timelike (g(v,v) = {0})")]
    NotUnitTimelike(f64),
    #[error("frame construction degenerated at leg {0}")]
    DegenerateFrame(usize),
}

/// Dense component array of a rank-`r` tensor at a point, with per-slot
/// variance. Immutable in practice: operations return new values.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorComponents {
    variance: Vec<Variance>,
    data: Vec<f64>,
}

impl TensorComponents {
    pub fn zeros(variance: &[Variance]) -> TensorComponents {
        TensorComponents {
            variance: variance.to_vec(),
            data: vec![0.0; DIM.pow(variance.len() as u32)],
        }
    }

    pub fn from_data(variance: &[Variance], data: Vec<f64>) -> TensorComponents {
        assert_eq!(
            data.len(),
            DIM.pow(variance.len() as u32),
            "component array length must be 4^rank"
        );
        assert!(
            data.iter().all(|v| v.is_finite()),
            "components must be finite"
        );
        TensorComponents {
            variance: variance.to_vec(),
            data,
        }
    }

    pub fn scalar(value: f64) -> TensorComponents {
        TensorComponents {
            variance: Vec::new(),
            data: vec![value],
        }
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.rank());
        index.iter().fold(0, |acc, &i| acc * DIM + i)
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.offset(index)]
    }

    pub fn set(&mut self, index: &[usize], value: f64) {
        let off = self.offset(index);
        self.data[off] = value;
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Componentwise `self - other` (same shape).
    pub fn sub(&self, other: &TensorComponents) -> TensorComponents {
        assert_eq!(self.variance, other.variance, "shape mismatch");
        TensorComponents {
            variance: self.variance.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> TensorComponents {
        TensorComponents {
            variance: self.variance.clone(),
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &TensorComponents) -> TensorComponents {
        assert_eq!(self.variance, other.variance, "shape mismatch");
        TensorComponents {
            variance: self.variance.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// The `(1,1)` identity tensor.
    pub fn identity() -> TensorComponents {
        let mut t = TensorComponents::zeros(&[Variance::Upper, Variance::Lower]);
        for i in 0..DIM {
            t.set(&[i, i], 1.0);
        }
        t
    }

    /// Contract two slots. Mixed-variance pairs trace directly; equal-variance
    /// pairs need the metric (inverse metric for two lower slots, the metric
    /// itself for two upper slots).
    pub fn contract(
        &self,
        slot_a: usize,
        slot_b: usize,
        metric: Option<&MetricAtPoint>,
    ) -> Result<TensorComponents, TensorError> {
        let rank = self.rank();
        if slot_a >= rank {
            return Err(TensorError::SlotOutOfRange { slot: slot_a, rank });
        }
        if slot_b >= rank {
            return Err(TensorError::SlotOutOfRange { slot: slot_b, rank });
        }
        if slot_a == slot_b {
            return Err(TensorError::EqualSlots(slot_a));
        }
        let (lo, hi) = if slot_a < slot_b {
            (slot_a, slot_b)
        } else {
            (slot_b, slot_a)
        };
        let va = self.variance[lo];
        let vb = self.variance[hi];
        let pairing: Option<&Matrix4<f64>> = if va != vb {
            None
        } else {
            let metric = metric.ok_or(TensorError::MetricRequired)?;
            Some(match va {
                Variance::Lower => metric.inverse(),
                Variance::Upper => metric.components(),
            })
        };

        let mut out_variance = Vec::with_capacity(rank - 2);
        for (i, v) in self.variance.iter().enumerate() {
            if i != lo && i != hi {
                out_variance.push(*v);
            }
        }
        let mut out = TensorComponents::zeros(&out_variance);
        let mut out_index = vec![0usize; rank - 2];
        loop {
            let mut full = vec![0usize; rank];
            let mut byte = 0;
            for (i, item) in full.iter_mut().enumerate() {
                if i != lo && i != hi {
                    *item = out_index[byte];
                    byte += 1;
                }
            }
            let mut sum = 0.0;
            match pairing {
                None => {
                    for m in 0..DIM {
                        full[lo] = m;
                        full[hi] = m;
                        sum += self.get(&full);
                    }
                }
                Some(g) => {
                    for m in 0..DIM {
                        for n in 0..DIM {
                            let w = g[(m, n)];
                            if w == 0.0 {
                                continue;
                            }
                            full[lo] = m;
                            full[hi] = n;
                            sum += w * self.get(&full);
                        }
                    }
                }
            }
            out.set(&out_index, sum);
            if !increment(&mut out_index) {
                break;
            }
        }
        Ok(out)
    }

    /// Flip the variance of one slot, pairing it with the metric (lowering)
    /// or its inverse (raising). Applying twice returns the original
    /// components up to rounding.
    pub fn raise_lower(
        &self,
        slot: usize,
        metric: &MetricAtPoint,
    ) -> Result<TensorComponents, TensorError> {
        let rank = self.rank();
        if slot >= rank {
            return Err(TensorError::SlotOutOfRange { slot, rank });
        }
        let (pairing, new_variance) = match self.variance[slot] {
            Variance::Lower => (metric.inverse(), Variance::Upper),
            Variance::Upper => (metric.components(), Variance::Lower),
        };
        let mut variance = self.variance.clone();
        variance[slot] = new_variance;
        let mut out = TensorComponents::zeros(&variance);
        let mut index = vec![0usize; rank];
        loop {
            let mut sum = 0.0;
            let saved = index[slot];
            for m in 0..DIM {
                index[slot] = m;
                sum += pairing[(saved, m)] * self.get(&index);
            }
            index[slot] = saved;
            out.set(&index, sum);
            if !increment(&mut index) {
                break;
            }
        }
        Ok(out)
    }
}

/// Advance a multi-index in row-major order; false once exhausted.
pub(crate) fn increment(index: &mut [usize]) -> bool {
    for slot in index.iter_mut().rev() {
        *slot += 1;
        if *slot < DIM {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Evaluated metric at a point together with its inverse, validated to be
/// symmetric, invertible and of signature (-,+,+,+).
#[derive(Clone, Debug, PartialEq)]
pub struct MetricAtPoint {
    g: Matrix4<f64>,
    g_inv: Matrix4<f64>,
}

impl MetricAtPoint {
    pub fn new(g: Matrix4<f64>) -> Result<MetricAtPoint, TensorError> {
        const SYM_TOL: f64 = 1e-12;
        for i in 0..DIM {
            for j in 0..DIM {
                if (g[(i, j)] - g[(j, i)]).abs() > SYM_TOL {
                    return Err(TensorError::NotSymmetric);
                }
            }
        }
        let g_inv = g.try_inverse().ok_or(TensorError::DegenerateMetric)?;
        let eigen = nalgebra::SymmetricEigen::new(g);
        let negative = eigen.eigenvalues.iter().filter(|v| **v < 0.0).count();
        let positive = eigen.eigenvalues.iter().filter(|v| **v > 0.0).count();
        if negative != 1 || positive != 3 {
            return Err(TensorError::WrongSignature);
        }
        Ok(MetricAtPoint { g, g_inv })
    }

    pub fn components(&self) -> &Matrix4<f64> {
        &self.g
    }

    pub fn inverse(&self) -> &Matrix4<f64> {
        &self.g_inv
    }

    /// Inner product of two contravariant vectors.
    pub fn inner(&self, u: &Vector4<f64>, v: &Vector4<f64>) -> f64 {
        (u.transpose() * self.g * v)[(0, 0)]
    }

    /// Lower a vector to its metric-dual covector.
    pub fn lower(&self, v: &Vector4<f64>) -> Vector4<f64> {
        self.g * v
    }

    /// Raise a covector to its metric-dual vector.
    pub fn raise(&self, omega: &Vector4<f64>) -> Vector4<f64> {
        self.g_inv * omega
    }

    pub fn as_tensor(&self) -> TensorComponents {
        let mut data = Vec::with_capacity(16);
        for i in 0..DIM {
            for j in 0..DIM {
                data.push(self.g[(i, j)]);
            }
        }
        TensorComponents::from_data(&[Variance::Lower, Variance::Lower], data)
    }

    pub fn inverse_as_tensor(&self) -> TensorComponents {
        let mut data = Vec::with_capacity(16);
        for i in 0..DIM {
            for j in 0..DIM {
                data.push(self.g_inv[(i, j)]);
            }
        }
        TensorComponents::from_data(&[Variance::Upper, Variance::Upper], data)
    }
}

/// Orthonormal frame `E_1..E_4` with `g(E_i, E_j) = eps_ii delta_ij`,
/// `eps = (-1, 1, 1, 1)`; the timelike leg comes first.
#[derive(Clone, Debug)]
pub struct OrthonormalFrame {
    pub vectors: [Vector4<f64>; 4],
}

impl OrthonormalFrame {
    pub fn signs() -> [f64; 4] {
        FRAME_SIGNS
    }

    /// Largest deviation from the signed orthonormality relations.
    pub fn orthonormality_residual(&self, metric: &MetricAtPoint) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                let expected = if i == j { FRAME_SIGNS[i] } else { 0.0 };
                let got = metric.inner(&self.vectors[i], &self.vectors[j]);
                worst = worst.max((got - expected).abs());
            }
        }
        worst
    }
}

/// Signed Gram-Schmidt frame construction starting from a timelike vector.
///
/// The first leg is the normalized input with `g(E_1, E_1) = -1`; the
/// remaining legs are built from the standard basis, projecting out earlier
/// legs with their signature signs.
pub fn build_frame(
    metric: &MetricAtPoint,
    timelike: &Vector4<f64>,
) -> Result<OrthonormalFrame, TensorError> {
    let norm2 = metric.inner(timelike, timelike);
    if norm2 >= 0.0 {
        return Err(TensorError::NotTimelike(norm2));
    }
    let mut vectors: Vec<Vector4<f64>> = Vec::with_capacity(4);
    vectors.push(timelike / (-norm2).sqrt());

    let mut candidates = (0..DIM).map(|i| {
        let mut v = Vector4::zeros();
        v[i] = 1.0;
        v
    });
    while vectors.len() < DIM {
        let leg = vectors.len();
        let mut accepted = None;
        for candidate in candidates.by_ref() {
            let mut w = candidate;
            for (j, built) in vectors.iter().enumerate() {
                let coeff = FRAME_SIGNS[j] * metric.inner(built, &w);
                w -= built * coeff;
            }
            let n = metric.inner(&w, &w);
            if n > 1e-10 {
                accepted = Some(w / n.sqrt());
                break;
            }
        }
        match accepted {
            Some(v) => vectors.push(v),
            None => return Err(TensorError::DegenerateFrame(leg)),
        }
    }
    Ok(OrthonormalFrame {
        vectors: [vectors[0], vectors[1], vectors[2], vectors[3]],
    })
}

/// The projection tensor of a unit timelike vector: the `(1,1)` tensor
/// `h` with `hX = X + eta(X) v`, where `eta` is the metric dual of `v`.
/// It is idempotent and annihilates `v`.
pub fn projection_tensor(
    v: &Vector4<f64>,
    metric: &MetricAtPoint,
) -> Result<TensorComponents, TensorError> {
    const UNIT_TOL: f64 = 1e-9;
    let norm2 = metric.inner(v, v);
    if (norm2 + 1.0).abs() > UNIT_TOL {
        return Err(TensorError::NotUnitTimelike(norm2));
    }
    let eta = metric.lower(v);
    let mut h = TensorComponents::identity();
    for i in 0..DIM {
        for j in 0..DIM {
            let val = h.get(&[i, j]) + v[i] * eta[j];
            h.set(&[i, j], val);
        }
    }
    Ok(h)
}

pub fn minkowski_metric() -> MetricAtPoint {
    MetricAtPoint::new(Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0))).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn de_sitter_at(t: f64) -> MetricAtPoint {
        let s = (2.0 * t).exp();
        MetricAtPoint::new(Matrix4::from_diagonal(&Vector4::new(-1.0, s, s, s))).unwrap()
    }

    #[test]
    fn trace_of_identity_is_four() {
        let id = TensorComponents::identity();
        let tr = id.contract(0, 1, None).unwrap();
        assert_eq!(tr.rank(), 0);
        assert_eq!(tr.data()[0], 4.0);
    }

    #[test]
    fn full_metric_contraction_is_dimension() {
        let g = de_sitter_at(0.37);
        let tr = g.as_tensor().contract(0, 1, Some(&g)).unwrap();
        assert!((tr.data()[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn equal_variance_contraction_requires_metric() {
        let g = minkowski_metric();
        let err = g.as_tensor().contract(0, 1, None).unwrap_err();
        assert_eq!(err, TensorError::MetricRequired);
    }

    #[test]
    fn slot_out_of_range_is_reported() {
        let id = TensorComponents::identity();
        assert!(matches!(
            id.contract(0, 5, None),
            Err(TensorError::SlotOutOfRange { slot: 5, rank: 2 })
        ));
    }

    #[test]
    fn raising_eta_recovers_velocity() {
        // on the expanding slicing at the origin, eta = (-1, 0, 0, 0)
        let g = de_sitter_at(0.0);
        let eta = TensorComponents::from_data(&[Variance::Lower], vec![-1.0, 0.0, 0.0, 0.0]);
        let xi = eta.raise_lower(0, &g).unwrap();
        // oracle: solve g * xi = eta directly
        let solved = g
            .components()
            .lu()
            .solve(&Vector4::new(-1.0, 0.0, 0.0, 0.0))
            .unwrap();
        for i in 0..4 {
            assert!((xi.get(&[i]) - solved[i]).abs() < 1e-12);
        }
        assert!((xi.get(&[0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frame_on_flat_metric_is_standard_basis() {
        let g = minkowski_metric();
        let frame = build_frame(&g, &Vector4::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((frame.vectors[i][j] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn frame_orthonormality_residual_is_tiny() {
        let g = de_sitter_at(0.3);
        let frame = build_frame(&g, &Vector4::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(frame.orthonormality_residual(&g) < 1e-12);
    }

    #[test]
    fn null_vector_is_rejected() {
        let g = minkowski_metric();
        let err = build_frame(&g, &Vector4::new(1.0, 1.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, TensorError::NotTimelike(_)));
    }

    #[test]
    fn projector_on_flat_space_is_spatial() {
        let g = minkowski_metric();
        let h = projection_tensor(&Vector4::new(1.0, 0.0, 0.0, 0.0), &g).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j && i > 0 { 1.0 } else { 0.0 };
                assert_eq!(h.get(&[i, j]), expected);
            }
        }
    }

    #[test]
    fn projector_annihilates_its_vector() {
        let g = de_sitter_at(0.2);
        let frame = build_frame(&g, &Vector4::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        let v = frame.vectors[0];
        let h = projection_tensor(&v, &g).unwrap();
        for i in 0..4 {
            let mut hv = 0.0;
            for j in 0..4 {
                hv += h.get(&[i, j]) * v[j];
            }
            assert!(hv.abs() < 1e-12);
        }
    }

    #[test]
    fn projector_is_idempotent() {
        let g = de_sitter_at(-0.4);
        let h = projection_tensor(&Vector4::new(1.0, 0.0, 0.0, 0.0), &g).unwrap();
        let mut hh = TensorComponents::zeros(&[Variance::Upper, Variance::Lower]);
        for i in 0..4 {
            for j in 0..4 {
                let mut sum = 0.0;
                for m in 0..4 {
                    sum += h.get(&[i, m]) * h.get(&[m, j]);
                }
                hh.set(&[i, j], sum);
            }
        }
        assert!(hh.sub(&h).max_abs() < 1e-12);
    }

    fn arb_rank2() -> impl Strategy<Value = TensorComponents> {
        proptest::collection::vec(-5.0f64..5.0, 16)
            .prop_map(|data| TensorComponents::from_data(&[Variance::Lower, Variance::Lower], data))
    }

    proptest! {
        #[test]
        fn contraction_is_linear(a in arb_rank2(), b in arb_rank2(), s in -3.0f64..3.0) {
            let g = de_sitter_at(0.1);
            let lhs = a.scale(s).add(&b).contract(0, 1, Some(&g)).unwrap();
            let rhs = a.contract(0, 1, Some(&g)).unwrap().data()[0] * s
                + b.contract(0, 1, Some(&g)).unwrap().data()[0];
            prop_assert!((lhs.data()[0] - rhs).abs() < 1e-12);
        }

        #[test]
        fn raise_lower_is_an_involution(t in arb_rank2(), slot in 0usize..2) {
            let g = de_sitter_at(0.25);
            let once = t.raise_lower(slot, &g).unwrap();
            let twice = once.raise_lower(slot, &g).unwrap();
            prop_assert!(twice.sub(&t).max_abs() < 1e-12);
        }
    }
}

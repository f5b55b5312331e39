use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Gw0Error, Result};
use crate::matrix::Matrix;

/// The state space `H` with its pairing `g` in a basis whose first vector is the unit.
///
/// Basis indices are 1-based to match the usual `phi_1 = 1` convention.
#[derive(Clone, PartialEq, Eq)]
pub struct Frame {
    metric: Matrix,
    inverse: Matrix,
}

impl Frame {
    pub fn new(metric: Matrix) -> Result<Self> {
        if metric.dim() == 0 {
            return Err(Gw0Error::InvalidFrame("dimension must be positive".into()));
        }
        if !metric.is_symmetric() {
            return Err(Gw0Error::InvalidFrame("metric is not symmetric".into()));
        }
        let inverse = metric
            .inverse()
            .ok_or_else(|| Gw0Error::InvalidFrame("metric is degenerate".into()))?;
        Ok(Frame { metric, inverse })
    }

    /// Rank one with `g_11 = 1`.
    pub fn rank_one() -> Self {
        Self::standard(1)
    }

    /// Identity metric of dimension `n`.
    pub fn standard(n: usize) -> Self {
        Frame::new(Matrix::identity(n)).expect("identity metric")
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn metric(&self) -> &Matrix {
        &self.metric
    }

    pub fn inverse_metric(&self) -> &Matrix {
        &self.inverse
    }

    /// `(A x, y) = (x, A* y)`, i.e. `A* = g^{-1} A^T g`.
    pub fn adjoint(&self, a: &Matrix) -> Matrix {
        &(&self.inverse * &a.transpose()) * &self.metric
    }

    /// Lowered-index form `(g A)_{ab}`, so that `(A x, y) = sum_{a,b} y^a (gA)_{ab} x^b`.
    pub fn lower(&self, a: &Matrix) -> Matrix {
        &self.metric * a
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame(dim={}, metric={:?})", self.dim(), self.metric)
    }
}

#[derive(Serialize, Deserialize)]
struct FrameDoc {
    dim: usize,
    metric: Matrix,
}

impl Serialize for Frame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FrameDoc { dim: self.dim(), metric: self.metric.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Frame {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = FrameDoc::deserialize(d)?;
        if doc.metric.dim() != doc.dim {
            return Err(serde::de::Error::custom("frame dim does not match metric size"));
        }
        Frame::new(doc.metric).map_err(serde::de::Error::custom)
    }
}

//! Teleportation as an unnormalized channel.
//!
//! With no `u`–`φ` cross terms, conditioning `ω^{CB} ⊗ ω^A` on the effect
//! `e^{BA}_k` acts on the Bloch vector of `A` as the matrix product `Ω H`
//! with overall weight `p_k`. [`teleport_brute`] computes the same object by
//! full tensor contraction and serves as its oracle.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, GptError, Result};
use crate::gpt::{GptVector, State, Transformation};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// `ω^{CB} = u u + Σ Ω_{γν} φ_γ φ_ν`; rows of `Ω` index `C`, columns `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntangledState {
    omega: Matrix,
}

impl EntangledState {
    pub fn new(omega: Matrix) -> Result<Self> {
        if omega.rows() == 0 || omega.cols() == 0 {
            return Err(GptError::InvalidParameter("empty correlation matrix".into()));
        }
        Ok(EntangledState { omega })
    }

    pub fn omega(&self) -> &Matrix {
        &self.omega
    }

    /// `(d_C, d_B)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.omega.rows(), self.omega.cols())
    }

    pub fn to_tensor(&self) -> Tensor {
        correlation_tensor(&Scalar::one(), &self.omega)
    }

    /// The same state with the two subsystems swapped.
    pub fn swapped(&self) -> EntangledState {
        EntangledState {
            omega: self.omega.transpose(),
        }
    }
}

/// `e^{BA}_k = p_k (u u + Σ H_{νμ} φ_ν φ_μ)`; rows of `H` index `B`, columns `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntangledEffect {
    p: Scalar,
    #[serde(rename = "H")]
    h: Matrix,
}

impl EntangledEffect {
    pub fn new(p: Scalar, h: Matrix) -> Result<Self> {
        if !p.is_positive() {
            return Err(GptError::InvalidParameter(format!("effect scale {p} must be positive")));
        }
        if h.rows() == 0 || h.cols() == 0 {
            return Err(GptError::InvalidParameter("empty correlation matrix".into()));
        }
        Ok(EntangledEffect { p, h })
    }

    pub fn scale(&self) -> &Scalar {
        &self.p
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    /// `(d_B, d_A)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.h.rows(), self.h.cols())
    }

    pub fn to_tensor(&self) -> Tensor {
        correlation_tensor(&self.p, &self.h)
    }

    pub fn swapped(&self) -> EntangledEffect {
        EntangledEffect {
            p: self.p.clone(),
            h: self.h.transpose(),
        }
    }
}

fn correlation_tensor(scale: &Scalar, m: &Matrix) -> Tensor {
    let mut t = Tensor::zeros(vec![m.rows() + 1, m.cols() + 1]);
    t.set(&[0, 0], scale.clone());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            t.set(&[i + 1, j + 1], scale * m.get(i, j));
        }
    }
    t
}

/// Closed-form channel: weight `p_k`, zero shift, block `Ω H` (A → C).
pub fn teleport_channel(state: &EntangledState, effect: &EntangledEffect) -> Result<Transformation> {
    check_dim(state.omega.cols(), effect.h.rows())?;
    let block = state.omega.mul(&effect.h)?;
    let shift = vec![Scalar::zero(); block.rows()];
    Transformation::new(effect.p.clone(), shift, block)
}

/// Oracle: build `ω^{CB} ⊗ ω^A` as a three-system tensor and contract
/// systems `B` and `A` against the effect coefficients.
pub fn teleport_brute(state: &EntangledState, effect: &EntangledEffect, input: &State) -> Result<GptVector> {
    let (_, d_b) = state.dims();
    let (e_b, e_a) = effect.dims();
    check_dim(d_b, e_b)?;
    check_dim(e_a, input.dim())?;
    let joint = state.to_tensor().outer(&Tensor::from_vector(&input.to_vector()));
    let out = joint.contract(&[1, 2], &effect.to_tensor())?;
    GptVector::new(out.coeffs().to_vec())
}

/// Post-selection bookkeeping: the weight and the normalized state. A
/// weight `<= 0` is an inconsistency witness and comes back as
/// [`GptError::NonPositiveWeight`].
pub fn condition_and_normalize(v: &GptVector) -> Result<(Scalar, State)> {
    v.normalized()
}

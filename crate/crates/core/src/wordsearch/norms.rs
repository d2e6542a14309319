use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{best_rational_pair, Matrix};
use crate::scalar::Scalar;
use crate::verdict::NormKind;

/// Exact brackets on the spectral norm of a square matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Norms {
    pub frobenius_sq: Scalar,
    pub induced_inf: Scalar,
    pub induced_1: Scalar,
    /// Certified lower bound: a Rayleigh value at rational unit vectors.
    pub rayleigh_lb: Scalar,
}

pub fn norms(m: &Matrix) -> Result<Norms> {
    m.ensure_square()?;
    let rayleigh_lb = if m.rows() == 0 {
        Scalar::zero()
    } else {
        best_rational_pair(m, None).value
    };
    Ok(Norms {
        frobenius_sq: m.frobenius_sq(),
        induced_inf: m.induced_inf(),
        induced_1: m.induced_1(),
        rayleigh_lb,
    })
}

/// The value a certificate tracks for `norm`: squared for Frobenius,
/// plain for the induced norms.
pub(crate) fn tracked(norm: NormKind, m: &Matrix) -> Scalar {
    match norm {
        NormKind::Frobenius => m.frobenius_sq(),
        NormKind::InducedInf => m.induced_inf(),
        NormKind::Induced1 => m.induced_1(),
    }
}

/// Converts a bound on the tracked value into a bound on the squared
/// spectral norm of a `d x d` matrix.
pub(crate) fn spectral_sq_bound(norm: NormKind, d: usize, tracked: &Scalar) -> Scalar {
    match norm {
        NormKind::Frobenius => tracked.clone(),
        NormKind::InducedInf | NormKind::Induced1 => Scalar::int(d as i64) * tracked.square(),
    }
}

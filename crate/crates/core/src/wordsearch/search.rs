use super::{acceptance, product, EnumerateOptions, Enumerator, MatrixSet, PfaInstance};
use crate::error::{GptError, Result};
use crate::linalg::best_rational_pair;
use crate::scalar::Scalar;
use crate::verdict::{ConsistencyVerdict, Witness};

/// Looks for a word with acceptance strictly above the cut point. Never
/// answers `Consistent`: emptiness has no finite certificate in general.
pub fn cutpoint_witness_search(pfa: &PfaInstance, opts: EnumerateOptions) -> Result<ConsistencyVerdict> {
    let mut en = Enumerator::new(pfa.matrices(), opts)?;
    for level in en.by_ref() {
        for node in level {
            let value = pfa.acceptance_of_product(&node.matrix)?;
            if value > *pfa.lambda() {
                let rechecked = acceptance(pfa, &node.word)?;
                assert_eq!(rechecked, value, "acceptance re-verification failed");
                return Ok(ConsistencyVerdict::Inconsistent {
                    witness: Witness::CutPoint {
                        word: node.word,
                        acceptance: rechecked,
                        lambda: pfa.lambda().clone(),
                    },
                });
            }
        }
    }
    Ok(ConsistencyVerdict::Unknown { budget: en.report() })
}

/// Looks for `w` and rational unit vectors with `n'^T M_w n > Λ`.
pub fn unboundedness_witness_search(ms: &MatrixSet, lambda: &Scalar, opts: EnumerateOptions) -> Result<ConsistencyVerdict> {
    if !lambda.is_positive() {
        return Err(GptError::InvalidParameter(format!("Λ = {lambda} must be positive")));
    }
    let lambda_sq = lambda.square();
    let mut en = Enumerator::new(ms, opts)?;
    for level in en.by_ref() {
        for node in level {
            // Spectral norm is at most the Frobenius norm.
            if node.frobenius_sq <= lambda_sq {
                continue;
            }
            let pair = best_rational_pair(&node.matrix, Some(lambda));
            if pair.value > *lambda {
                let m = product(ms, &node.word)?;
                assert!(pair.verify(&m)?, "Rayleigh re-verification failed");
                return Ok(ConsistencyVerdict::Inconsistent {
                    witness: Witness::Unbounded {
                        word: node.word,
                        pair,
                        threshold: lambda.clone(),
                    },
                });
            }
        }
    }
    Ok(ConsistencyVerdict::Unknown { budget: en.report() })
}

/// Looks for `w` and `p <= max_power` with `|tr(M_w^p)| > d`. Such a product
/// has an eigenvalue of modulus above one, so `M_{w^n}` is unbounded in `n`
/// and no ball embedding of any radius survives every word.
pub fn growth_witness_search(ms: &MatrixSet, opts: EnumerateOptions, max_power: u32) -> Result<ConsistencyVerdict> {
    let d = Scalar::int(ms.dim() as i64);
    let mut en = Enumerator::new(ms, opts)?;
    for level in en.by_ref() {
        for node in level.into_iter().filter(|n| !n.word.is_empty()) {
            let mut power = node.matrix.clone();
            for p in 1..=max_power {
                if p > 1 {
                    power = power.mul(&node.matrix)?;
                }
                let trace = power.trace();
                if trace.abs() > d {
                    let mut check = product(ms, &node.word)?;
                    let base = check.clone();
                    for _ in 1..p {
                        check = check.mul(&base)?;
                    }
                    assert_eq!(check.trace(), trace, "trace re-verification failed");
                    return Ok(ConsistencyVerdict::Inconsistent {
                        witness: Witness::Growth {
                            word: node.word,
                            power: p,
                            trace,
                            dim: ms.dim(),
                        },
                    });
                }
            }
        }
    }
    Ok(ConsistencyVerdict::Unknown { budget: en.report() })
}

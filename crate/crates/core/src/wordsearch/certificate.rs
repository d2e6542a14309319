use super::norms::{spectral_sq_bound, tracked};
use super::{product, Dedup, EnumerateOptions, Enumerator, MatrixSet, ProductNode};
use crate::error::{GptError, Result};
use crate::hypersphere::{embed_certificate, embed_certificate_sq};
use crate::scalar::Scalar;
use crate::verdict::{Certificate, ConsistencyVerdict, NormKind};

/// Sub-multiplicative norm certificate for the semigroup generated by `ms`.
///
/// For a norm `N` and block length `t`, if every product of length `t` has
/// `N <= 1` then every product has `N` at most the largest value over
/// lengths below `t`. The result is converted into a bound `Λ²` on the
/// squared spectral norm. The first `t` that works is used; among norms
/// certifying at that `t` the smallest `Λ²` wins.
pub fn boundedness_certificate(ms: &MatrixSet, t_max: usize, max_nodes: usize) -> Result<ConsistencyVerdict> {
    if t_max == 0 {
        return Err(GptError::InvalidParameter("block length must be at least 1".into()));
    }
    let d = ms.dim();
    let opts = EnumerateOptions::new(t_max, max_nodes).dedup(Dedup::PerLength);
    let mut en = Enumerator::new(ms, opts)?;
    let mut prefix: Vec<Option<Scalar>> = vec![None; NormKind::PREFERENCE.len()];
    let mut levels: Vec<Vec<ProductNode>> = Vec::new();

    while let Some(level) = en.next() {
        let t = levels.len();
        if en.report().node_budget_exhausted {
            break;
        }
        if t >= 1 {
            let mut best: Option<(Scalar, NormKind, Scalar)> = None;
            for (i, &norm) in NormKind::PREFERENCE.iter().enumerate() {
                let block = level_max(&level, norm);
                if block > Scalar::one() {
                    continue;
                }
                let lambda_sq = spectral_sq_bound(norm, d, prefix[i].as_ref().expect("prefix filled"));
                if best.as_ref().is_none_or(|(b, _, _)| lambda_sq < *b) {
                    best = Some((lambda_sq, norm, block));
                }
            }
            if let Some((lambda_sq, norm, block_max)) = best {
                levels.push(level);
                let prefix_max = prefix[NormKind::PREFERENCE.iter().position(|n| *n == norm).unwrap()]
                    .clone()
                    .unwrap();
                reverify(ms, &levels, norm, &block_max, &prefix_max)?;
                return Ok(ConsistencyVerdict::Consistent {
                    certificate: build(d, norm, t, block_max, prefix_max, lambda_sq)?,
                });
            }
        }
        for (i, &norm) in NormKind::PREFERENCE.iter().enumerate() {
            let m = level_max(&level, norm);
            prefix[i] = Some(match prefix[i].take() {
                Some(p) => p.max(m),
                None => m,
            });
        }
        levels.push(level);
    }
    Ok(ConsistencyVerdict::Unknown { budget: en.report() })
}

fn level_max(level: &[ProductNode], norm: NormKind) -> Scalar {
    level
        .iter()
        .map(|n| tracked(norm, &n.matrix))
        .max()
        .unwrap_or_else(Scalar::zero)
}

/// Recompute every product from its word and both maxima, single-threaded.
fn reverify(ms: &MatrixSet, levels: &[Vec<ProductNode>], norm: NormKind, block_max: &Scalar, prefix_max: &Scalar) -> Result<()> {
    let t = levels.len() - 1;
    let mut prefix = Scalar::zero();
    let mut block = Scalar::zero();
    for (len, level) in levels.iter().enumerate() {
        for node in level {
            let m = product(ms, &node.word)?;
            assert_eq!(m, node.matrix, "product re-verification failed");
            let v = tracked(norm, &m);
            if len < t {
                prefix = prefix.max(v);
            } else {
                block = block.max(v);
            }
        }
    }
    assert_eq!(&block, block_max, "block maximum re-verification failed");
    assert_eq!(&prefix, prefix_max, "prefix maximum re-verification failed");
    assert!(block <= Scalar::one());
    Ok(())
}

fn build(d: usize, norm: NormKind, t: usize, block_max: Scalar, prefix_max: Scalar, lambda_sq: Scalar) -> Result<Certificate> {
    let lambda = lambda_sq.exact_sqrt();
    let embedding = if d == 0 {
        None
    } else {
        Some(match &lambda {
            Some(l) => embed_certificate(d, l)?,
            None => embed_certificate_sq(d, &lambda_sq)?,
        })
    };
    Ok(Certificate {
        norm,
        block_length: t,
        block_max,
        prefix_max,
        lambda_sq,
        lambda,
        embedding,
        checks: Vec::new(),
    })
}

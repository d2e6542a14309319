//! Dense multi-system coefficient arrays.
//!
//! Axis `i` runs over the basis labels `0..=d_i` of subsystem `i`, with
//! label 0 standing for the unit effect direction. The basis is
//! orthonormal, so pairings are plain coefficient-wise dot products.

use crate::error::{check_dim, GptError, Result};
use crate::gpt::{Effect, GptVector, State};
use crate::scalar::{dot, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    dims: Vec<usize>,
    coeffs: Vec<Scalar>,
}

impl Tensor {
    pub fn new(dims: Vec<usize>, coeffs: Vec<Scalar>) -> Result<Self> {
        let total: usize = dims.iter().product();
        check_dim(total, coeffs.len())?;
        Ok(Tensor { dims, coeffs })
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let total = dims.iter().product();
        Tensor {
            dims,
            coeffs: vec![Scalar::zero(); total],
        }
    }

    /// The rank-0 tensor holding a single number.
    pub fn scalar(x: Scalar) -> Self {
        Tensor {
            dims: Vec::new(),
            coeffs: vec![x],
        }
    }

    pub fn from_vector(v: &GptVector) -> Self {
        Tensor {
            dims: vec![v.coords().len()],
            coeffs: v.coords().to_vec(),
        }
    }

    /// Axis sizes `d_i + 1`.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn systems(&self) -> usize {
        self.dims.len()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    fn strides(&self) -> Vec<usize> {
        strides_of(&self.dims)
    }

    pub fn get(&self, index: &[usize]) -> &Scalar {
        assert_eq!(index.len(), self.dims.len());
        let offset: usize = index.iter().zip(self.strides()).map(|(i, s)| i * s).sum();
        &self.coeffs[offset]
    }

    pub fn set(&mut self, index: &[usize], x: Scalar) {
        assert_eq!(index.len(), self.dims.len());
        let offset: usize = index.iter().zip(self.strides()).map(|(i, s)| i * s).sum();
        self.coeffs[offset] = x;
    }

    /// The value of a rank-0 tensor.
    pub fn as_scalar(&self) -> Option<&Scalar> {
        self.dims.is_empty().then(|| &self.coeffs[0])
    }

    /// `self ⊗ other`, axes of `self` first.
    pub fn outer(&self, other: &Tensor) -> Tensor {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() * other.coeffs.len());
        for a in &self.coeffs {
            for b in &other.coeffs {
                coeffs.push(if a.is_zero() || b.is_zero() {
                    Scalar::zero()
                } else {
                    a * b
                });
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Tensor { dims, coeffs }
    }

    /// Contract the listed axes of `self`, in order, against every axis of
    /// `other`. The result keeps the remaining axes of `self` in order.
    pub fn contract(&self, axes: &[usize], other: &Tensor) -> Result<Tensor> {
        check_dim(other.systems(), axes.len())?;
        for (k, &a) in axes.iter().enumerate() {
            if a >= self.systems() {
                return Err(GptError::BadIndex {
                    what: "tensor axis",
                    index: a,
                    len: self.systems(),
                });
            }
            if axes[..k].contains(&a) {
                return Err(GptError::InvalidParameter(format!("axis {a} repeated")));
            }
            check_dim(self.dims[a], other.dims[k])?;
        }
        let strides = self.strides();
        let keep: Vec<usize> = (0..self.systems()).filter(|a| !axes.contains(a)).collect();
        let keep_dims: Vec<usize> = keep.iter().map(|&a| self.dims[a]).collect();
        let keep_strides: Vec<usize> = keep.iter().map(|&a| strides[a]).collect();
        let inner_strides: Vec<usize> = axes.iter().map(|&a| strides[a]).collect();

        // Offsets into self for every multi-index of `other`, row-major.
        let inner_offsets: Vec<usize> = MultiIndex::new(&other.dims)
            .map(|idx| idx.iter().zip(&inner_strides).map(|(i, s)| i * s).sum())
            .collect();
        let nonzero: Vec<(usize, &Scalar)> = inner_offsets
            .iter()
            .zip(&other.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&o, c)| (o, c))
            .collect();

        let coeffs = MultiIndex::new(&keep_dims)
            .map(|idx| {
                let base: usize = idx.iter().zip(&keep_strides).map(|(i, s)| i * s).sum();
                let mut acc = Scalar::zero();
                for &(o, c) in &nonzero {
                    let x = &self.coeffs[base + o];
                    if !x.is_zero() {
                        acc += &(x * c);
                    }
                }
                acc
            })
            .collect();
        Ok(Tensor {
            dims: keep_dims,
            coeffs,
        })
    }

    /// Contract `axis` against the unit effect of that subsystem.
    pub fn discard(&self, axis: usize) -> Result<Tensor> {
        let d = *self.dims.get(axis).ok_or(GptError::BadIndex {
            what: "tensor axis",
            index: axis,
            len: self.systems(),
        })?;
        self.contract(&[axis], &Tensor::from_vector(&GptVector::unit(d - 1)))
    }
}

pub fn tensor_states(a: &State, b: &State) -> Tensor {
    Tensor::from_vector(&a.to_vector()).outer(&Tensor::from_vector(&b.to_vector()))
}

pub fn tensor_effects(a: &Effect, b: &Effect) -> Tensor {
    Tensor::from_vector(&a.to_vector()).outer(&Tensor::from_vector(&b.to_vector()))
}

/// Marginal of a bipartite tensor on subsystem `keep` (0 or 1), obtained by
/// contracting the other side against its unit effect.
pub fn marginalize(psi: &Tensor, keep: usize) -> Result<GptVector> {
    if psi.systems() != 2 {
        return Err(GptError::NotBipartite(psi.systems()));
    }
    if keep > 1 {
        return Err(GptError::BadIndex {
            what: "subsystem",
            index: keep,
            len: 2,
        });
    }
    let reduced = psi.discard(1 - keep)?;
    GptVector::new(reduced.coeffs)
}

/// Full coefficient-wise contraction `E^T Ψ`.
pub fn pair_tensor(e: &Tensor, psi: &Tensor) -> Result<Scalar> {
    if e.dims != psi.dims {
        return Err(GptError::InvalidParameter(format!(
            "tensor dimensions differ: {:?} vs {:?}",
            e.dims, psi.dims
        )));
    }
    Ok(dot(&e.coeffs, &psi.coeffs))
}

fn strides_of(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    strides
}

/// Row-major iteration over all multi-indices of a shape.
struct MultiIndex {
    dims: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl MultiIndex {
    fn new(dims: &[usize]) -> Self {
        let next = (!dims.contains(&0)).then(|| vec![0; dims.len()]);
        MultiIndex {
            dims: dims.to_vec(),
            next,
        }
    }
}

impl Iterator for MultiIndex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.dims[i] {
                self.next = Some(succ);
                return Some(current);
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpt::pair;
    use crate::scalar::q;

    #[test]
    fn mixed_product_is_single_coefficient() {
        let t = tensor_states(&State::mixed(2), &State::mixed(3));
        assert_eq!(t.dims(), &[3, 4]);
        assert_eq!(t.get(&[0, 0]), &Scalar::one());
        assert_eq!(t.coeffs().iter().filter(|c| !c.is_zero()).count(), 1);
    }

    #[test]
    fn unit_product_is_composite_unit() {
        let u = tensor_effects(&Effect::unit(1), &Effect::unit(2));
        let mut expected = Tensor::zeros(vec![2, 3]);
        expected.set(&[0, 0], Scalar::one());
        assert_eq!(u, expected);
    }

    #[test]
    fn expansion_one_dimensional() {
        let (a, b) = (q(2, 3), q(-5, 7));
        let t = tensor_states(&State::new(vec![a.clone()]), &State::new(vec![b.clone()]));
        assert_eq!(t.coeffs(), &[Scalar::one(), b.clone(), a.clone(), &a * &b]);
    }

    #[test]
    fn marginal_recovers_factor() {
        let wa = State::new(vec![q(1, 2), q(1, 3)]);
        let wb = State::new(vec![q(-1, 4)]);
        let psi = tensor_states(&wa, &wb);
        assert_eq!(marginalize(&psi, 0).unwrap(), wa.to_vector());
        assert_eq!(marginalize(&psi, 1).unwrap(), wb.to_vector());
        assert!(marginalize(&Tensor::from_vector(&wa.to_vector()), 0).is_err());
    }

    #[test]
    fn product_pairing_factorizes() {
        let wa = State::new(vec![q(1, 2)]);
        let wb = State::new(vec![q(1, 5), q(-1, 5)]);
        let ea = Effect::new(q(1, 3), vec![q(-1, 1)]).unwrap();
        let eb = Effect::new(q(1, 2), vec![q(1, 1), q(2, 1)]).unwrap();
        let joint = pair_tensor(&tensor_effects(&ea, &eb), &tensor_states(&wa, &wb)).unwrap();
        assert_eq!(joint, pair(&ea, &wa).unwrap() * pair(&eb, &wb).unwrap());
        let unit = tensor_effects(&Effect::unit(1), &Effect::unit(2));
        assert_eq!(pair_tensor(&unit, &tensor_states(&wa, &wb)).unwrap(), 1);
    }

    #[test]
    fn contraction_order_of_remaining_axes() {
        // 3-system product; contract the middle system against its unit.
        let a = State::new(vec![q(1, 2)]);
        let b = State::new(vec![q(1, 3)]);
        let c = State::new(vec![q(1, 5)]);
        let t = tensor_states(&a, &b).outer(&Tensor::from_vector(&c.to_vector()));
        let r = t.discard(1).unwrap();
        assert_eq!(r, tensor_states(&a, &c));
        let s = t.contract(&[2, 0], &tensor_states(&c, &a)).unwrap();
        assert_eq!(s.dims(), &[2]);
        let wa = &Scalar::one() + &q(1, 4);
        let wc = &Scalar::one() + &q(1, 25);
        assert_eq!(s.get(&[0]), &(&wa * &wc));
    }
}

//! Single-system GPT objects in the basis where the unit effect is the
//! first coordinate vector.
//!
//! A state is `(1; v)`, an effect `p (1; f)`, and a transformation has the
//! block form `scale * (1, 0; s, R)`. `v`, `f` and `s` are Bloch vectors.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, GptError, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, Scalar};

/// A raw `(d+1)`-coordinate vector; coordinate 0 is the `u` component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GptVector(Vec<Scalar>);

impl GptVector {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        if coords.is_empty() {
            return Err(GptError::InvalidParameter("empty GPT vector".into()));
        }
        Ok(GptVector(coords))
    }

    pub fn from_parts(head: Scalar, bloch: &[Scalar]) -> Self {
        let mut coords = Vec::with_capacity(bloch.len() + 1);
        coords.push(head);
        coords.extend_from_slice(bloch);
        GptVector(coords)
    }

    /// Bloch dimension `d`.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }

    pub fn head(&self) -> &Scalar {
        &self.0[0]
    }

    pub fn bloch(&self) -> &[Scalar] {
        &self.0[1..]
    }

    pub fn dot(&self, other: &GptVector) -> Result<Scalar> {
        check_dim(self.0.len(), other.0.len())?;
        Ok(dot(&self.0, &other.0))
    }

    pub fn add(&self, other: &GptVector) -> Result<GptVector> {
        check_dim(self.0.len(), other.0.len())?;
        Ok(GptVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn scaled(&self, s: &Scalar) -> GptVector {
        GptVector(self.0.iter().map(|x| x * s).collect())
    }

    /// Split an unnormalized vector into its weight and normalized state.
    /// A non-positive weight is returned as an error carrying the weight.
    pub fn normalized(&self) -> Result<(Scalar, State)> {
        let w = self.head().clone();
        if !w.is_positive() {
            return Err(GptError::NonPositiveWeight(w));
        }
        let inv = w.recip();
        let bloch = self.bloch().iter().map(|x| x * &inv).collect();
        Ok((w, State::new(bloch)))
    }

    pub fn unit(d: usize) -> GptVector {
        GptVector::from_parts(Scalar::one(), &vec![Scalar::zero(); d])
    }
}

/// A normalized state `(1; v)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct State {
    v: Vec<Scalar>,
}

impl State {
    pub fn new(bloch: Vec<Scalar>) -> Self {
        State { v: bloch }
    }

    /// The completely mixed state `(1; 0)`.
    pub fn mixed(d: usize) -> Self {
        State::new(vec![Scalar::zero(); d])
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn bloch(&self) -> &[Scalar] {
        &self.v
    }

    pub fn to_vector(&self) -> GptVector {
        GptVector::from_parts(Scalar::one(), &self.v)
    }
}

/// An effect `p (1; f)` with `p >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Effect {
    p: Scalar,
    f: Vec<Scalar>,
}

impl Effect {
    pub fn new(scale: Scalar, bloch: Vec<Scalar>) -> Result<Self> {
        if scale.is_negative() {
            return Err(GptError::InvalidParameter(format!(
                "effect scale {scale} is negative"
            )));
        }
        Ok(Effect { p: scale, f: bloch })
    }

    pub fn unit(d: usize) -> Self {
        Effect {
            p: Scalar::one(),
            f: vec![Scalar::zero(); d],
        }
    }

    pub fn zero(d: usize) -> Self {
        Effect {
            p: Scalar::zero(),
            f: vec![Scalar::zero(); d],
        }
    }

    /// `p (1; -f)`, which together with `self` sums to `2p u`.
    pub fn mirrored(&self) -> Self {
        Effect {
            p: self.p.clone(),
            f: self.f.iter().map(|x| -x).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    pub fn scale(&self) -> &Scalar {
        &self.p
    }

    pub fn bloch(&self) -> &[Scalar] {
        &self.f
    }

    pub fn is_unit(&self) -> bool {
        self.p.is_one() && self.f.iter().all(Scalar::is_zero)
    }

    pub fn to_vector(&self) -> GptVector {
        let bloch: Vec<Scalar> = self.f.iter().map(|x| &self.p * x).collect();
        GptVector::from_parts(self.p.clone(), &bloch)
    }

    /// `e^T x` for an arbitrary (possibly unnormalized) vector.
    pub fn pair_vector(&self, x: &GptVector) -> Result<Scalar> {
        check_dim(self.dim(), x.dim())?;
        Ok(&self.p * (x.head() + dot(&self.f, x.bloch())))
    }
}

/// Outcome value `e^T ω = p (1 + f^T v)`.
pub fn pair(e: &Effect, w: &State) -> Result<Scalar> {
    check_dim(e.dim(), w.dim())?;
    Ok(&e.p * (Scalar::one() + dot(&e.f, &w.v)))
}

/// A finite list of effects on one system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    effects: Vec<Effect>,
}

impl Measurement {
    pub fn new(effects: Vec<Effect>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| GptError::InvalidParameter("measurement has no effects".into()))?;
        let d = first.dim();
        for e in &effects {
            check_dim(d, e.dim())?;
        }
        Ok(Measurement { effects })
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// Outcome values on `w`; they sum to one for a valid measurement.
    pub fn outcomes(&self, w: &State) -> Result<Vec<Scalar>> {
        self.effects.iter().map(|e| pair(e, w)).collect()
    }
}

/// True iff the effects sum coordinate-wise to the unit effect.
pub fn validate_measurement(m: &Measurement) -> bool {
    let d = m.dim();
    let total = m
        .effects()
        .iter()
        .try_fold(GptVector::from_parts(Scalar::zero(), &vec![Scalar::zero(); d]), |acc, e| {
            acc.add(&e.to_vector())
        });
    matches!(total, Ok(t) if t == GptVector::unit(d))
}

/// `scale * (1, 0; s, R)` mapping `in_dim` Bloch vectors to `out_dim` ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transformation {
    scale: Scalar,
    shift: Vec<Scalar>,
    #[serde(rename = "R")]
    block: Matrix,
}

impl Transformation {
    pub fn new(scale: Scalar, shift: Vec<Scalar>, block: Matrix) -> Result<Self> {
        if !scale.is_positive() {
            return Err(GptError::InvalidParameter(format!(
                "transformation scale {scale} must be positive"
            )));
        }
        check_dim(block.rows(), shift.len())?;
        Ok(Transformation {
            scale,
            shift,
            block,
        })
    }

    /// Zero shift, unit scale.
    pub fn linear(block: Matrix) -> Self {
        let shift = vec![Scalar::zero(); block.rows()];
        Transformation {
            scale: Scalar::one(),
            shift,
            block,
        }
    }

    pub fn identity(d: usize) -> Self {
        Transformation::linear(Matrix::identity(d))
    }

    pub fn scale(&self) -> &Scalar {
        &self.scale
    }

    pub fn shift(&self) -> &[Scalar] {
        &self.shift
    }

    pub fn block(&self) -> &Matrix {
        &self.block
    }

    pub fn in_dim(&self) -> usize {
        self.block.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.block.rows()
    }

    /// Action on a state: `scale * (1; s + R v)`.
    pub fn apply(&self, w: &State) -> Result<GptVector> {
        self.apply_vector(&w.to_vector())
    }

    /// Action on an arbitrary vector `(a; b)`: `scale * (a; a s + R b)`.
    pub fn apply_vector(&self, x: &GptVector) -> Result<GptVector> {
        check_dim(self.in_dim(), x.dim())?;
        let rb = self.block.mul_vec(x.bloch())?;
        let bloch: Vec<Scalar> = rb
            .iter()
            .zip(&self.shift)
            .map(|(r, s)| &self.scale * (r + x.head() * s))
            .collect();
        Ok(GptVector::from_parts(&self.scale * x.head(), &bloch))
    }

    /// Transpose action on an effect vector: `scale * (a + s^T b; R^T b)`.
    pub fn dual_apply(&self, e: &GptVector) -> Result<GptVector> {
        check_dim(self.out_dim(), e.dim())?;
        let head = &self.scale * (e.head() + dot(&self.shift, e.bloch()));
        let bloch: Vec<Scalar> = self
            .block
            .transpose()
            .mul_vec(e.bloch())?
            .iter()
            .map(|x| &self.scale * x)
            .collect();
        Ok(GptVector::from_parts(head, &bloch))
    }

    /// The full `(d_out+1) x (d_in+1)` matrix.
    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.out_dim() + 1, self.in_dim() + 1);
        m.set(0, 0, self.scale.clone());
        for i in 0..self.out_dim() {
            m.set(i + 1, 0, &self.scale * &self.shift[i]);
            for j in 0..self.in_dim() {
                m.set(i + 1, j + 1, &self.scale * self.block.get(i, j));
            }
        }
        m
    }

    pub fn preserves_unit(&self) -> bool {
        self.scale.is_one()
    }
}

/// `T2 ∘ T1`: block `(1, 0; s2 + R2 s1, R2 R1)`, scales multiply.
pub fn compose(t2: &Transformation, t1: &Transformation) -> Result<Transformation> {
    check_dim(t2.in_dim(), t1.out_dim())?;
    let r2s1 = t2.block.mul_vec(&t1.shift)?;
    let shift = t2.shift.iter().zip(&r2s1).map(|(a, b)| a + b).collect();
    Ok(Transformation {
        scale: &t2.scale * &t1.scale,
        shift,
        block: t2.block.mul(&t1.block)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn s(n: i64) -> Scalar {
        Scalar::int(n)
    }

    #[test]
    fn pair_examples() {
        let w = State::new(vec![q(1, 3), q(-2, 5)]);
        assert_eq!(pair(&Effect::unit(2), &w).unwrap(), 1);
        assert_eq!(pair(&Effect::zero(2), &w).unwrap(), 0);
        let e = Effect::new(q(1, 2), vec![s(1), s(0)]).unwrap();
        let antipode = State::new(vec![s(-1), s(0)]);
        assert_eq!(pair(&e, &antipode).unwrap(), 0);
        assert!(pair(&e, &State::mixed(3)).is_err());
    }

    #[test]
    fn compose_examples() {
        let swap = Transformation::linear(Matrix::from_ints(&[&[0, 1], &[1, 0]]));
        let t = compose(&Transformation::identity(2), &swap).unwrap();
        assert_eq!(t, swap);
        assert_eq!(compose(&swap, &swap).unwrap().block(), &Matrix::identity(2));

        let t1 = Transformation::new(s(1), vec![s(1)], Matrix::from_ints(&[&[2]])).unwrap();
        let t2 = Transformation::new(s(1), vec![s(3)], Matrix::from_ints(&[&[5]])).unwrap();
        let c = compose(&t2, &t1).unwrap();
        assert_eq!(c.shift(), &[s(8)]);
        assert_eq!(c.block(), &Matrix::from_ints(&[&[10]]));
        for v in [q(1, 2), q(-3, 7), s(4)] {
            let w = State::new(vec![v]);
            let direct = t2.apply_vector(&t1.apply(&w).unwrap()).unwrap();
            assert_eq!(c.apply(&w).unwrap(), direct);
        }
    }

    #[test]
    fn apply_examples() {
        let w = State::new(vec![q(1, 2), q(-1, 3)]);
        assert_eq!(Transformation::identity(2).apply(&w).unwrap(), w.to_vector());
        let flip = Transformation::linear(Matrix::identity(2).scaled(&s(-1)));
        assert_eq!(
            flip.apply(&w).unwrap(),
            State::new(vec![q(-1, 2), q(1, 3)]).to_vector()
        );
        let t = Transformation::new(q(1, 2), vec![s(0)], Matrix::from_ints(&[&[3]])).unwrap();
        let out = t.apply(&State::new(vec![s(2)])).unwrap();
        assert_eq!(out.coords(), &[q(1, 2), s(3)]);
        let full = t.to_matrix().mul_vec(State::new(vec![s(2)]).to_vector().coords()).unwrap();
        assert_eq!(out.coords(), full.as_slice());
    }

    #[test]
    fn unit_preservation() {
        assert!(Transformation::identity(3).preserves_unit());
        let t = Transformation::new(q(1, 2), vec![s(0)], Matrix::identity(1)).unwrap();
        assert!(!t.preserves_unit());
        let shifted = Transformation::new(s(1), vec![s(7)], Matrix::from_ints(&[&[-4]])).unwrap();
        assert!(shifted.preserves_unit());
        assert!(Transformation::new(s(0), vec![s(0)], Matrix::identity(1)).is_err());
    }

    #[test]
    fn measurement_examples() {
        assert!(validate_measurement(&Measurement::new(vec![Effect::unit(2)]).unwrap()));
        let half = Effect::new(q(1, 2), vec![s(4), s(0)]).unwrap();
        let m = Measurement::new(vec![half.clone(), half.mirrored()]).unwrap();
        assert!(validate_measurement(&m));
        let bad = Measurement::new(vec![half.clone(), half]).unwrap();
        assert!(!validate_measurement(&bad));
        assert!(Measurement::new(vec![]).is_err());
    }

    #[test]
    fn normalization_contract() {
        let v = GptVector::from_parts(q(1, 2), &[q(1, 4)]);
        let (p, st) = v.normalized().unwrap();
        assert_eq!(p, q(1, 2));
        assert_eq!(st.bloch(), &[q(1, 2)]);
        let neg = GptVector::from_parts(q(-1, 4), &[s(1)]);
        assert_eq!(neg.normalized(), Err(GptError::NonPositiveWeight(q(-1, 4))));
    }
}

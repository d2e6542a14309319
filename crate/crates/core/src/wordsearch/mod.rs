//! Matrix products over a finite alphabet.
//!
//! Words are read left to right as the order of application, so
//! `M_w = M_{i_L} ··· M_{i_1}` for `w = i_1 … i_L`. Labels are 1-based.

mod certificate;
mod enumerate;
mod norms;
mod search;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, GptError, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, Scalar};

pub use certificate::boundedness_certificate;
pub use enumerate::{enumerate, Dedup, EnumerateOptions, Enumeration, Enumerator};
pub use norms::{norms, Norms};
pub use search::{cutpoint_witness_search, growth_witness_search, unboundedness_witness_search};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixSet {
    matrices: Vec<Matrix>,
    #[serde(skip)]
    dim: usize,
}

impl MatrixSet {
    pub fn new(matrices: Vec<Matrix>) -> Result<Self> {
        let dim = matrices.first().map_or(Ok(0), Matrix::ensure_square)?;
        for m in &matrices {
            check_dim(dim, m.ensure_square()?)?;
        }
        Ok(MatrixSet { matrices, dim })
    }

    /// An alphabet with no letters over dimension `dim`.
    pub fn empty(dim: usize) -> Self {
        MatrixSet {
            matrices: Vec::new(),
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    /// The matrix for a 1-based label.
    pub fn get(&self, label: usize) -> Result<&Matrix> {
        label
            .checked_sub(1)
            .and_then(|i| self.matrices.get(i))
            .ok_or(GptError::BadLabel {
                label,
                k: self.matrices.len(),
            })
    }

    pub fn is_column_stochastic(&self) -> bool {
        self.matrices.iter().all(Matrix::is_column_stochastic)
    }

    pub fn transposed(&self) -> MatrixSet {
        MatrixSet {
            matrices: self.matrices.iter().map(Matrix::transpose).collect(),
            dim: self.dim,
        }
    }
}

impl<'de> Deserialize<'de> for MatrixSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            matrices: Vec<Matrix>,
        }
        let raw = Raw::deserialize(deserializer)?;
        MatrixSet::new(raw.matrices).map_err(serde::de::Error::custom)
    }
}

/// A sequence of 1-based labels, in order of application.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(labels: Vec<usize>) -> Self {
        Word(labels)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pushed(&self, label: usize) -> Word {
        let mut labels = self.0.clone();
        labels.push(label);
        Word(labels)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut labels = self.0.clone();
        labels.extend_from_slice(&other.0);
        Word(labels)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l == 0 || l > k) {
            Some(&label) => Err(GptError::BadLabel { label, k }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("(empty)");
        }
        if self.0.iter().all(|&l| l < 10) {
            for l in &self.0 {
                write!(f, "{l}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl FromStr for Word {
    type Err = GptError;

    /// Accepts `"122"`, `"1,2,2"`, `""` and `"(empty)"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "(empty)" {
            return Ok(Word::empty());
        }
        let bad = || GptError::Parse(format!("invalid word {s:?}"));
        let labels: Result<Vec<usize>> = if s.contains(',') {
            s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect()
        };
        Ok(Word(labels?))
    }
}

/// `M_{i_L} ··· M_{i_1}`; the identity for the empty word.
pub fn product(ms: &MatrixSet, w: &Word) -> Result<Matrix> {
    let mut acc = Matrix::identity(ms.dim());
    for &label in w.labels() {
        acc = ms.get(label)?.mul(&acc)?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Columns sum to one; `M q` stays a distribution.
    #[default]
    Column,
    /// Rows sum to one; matrices are transposed on load.
    Row,
}

/// A probabilistic automaton with a cut point, stored column-stochastic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PfaDocument", into = "PfaDocument")]
pub struct PfaInstance {
    matrices: MatrixSet,
    q: Vec<Scalar>,
    f: Vec<u8>,
    lambda: Scalar,
}

/// On-disk form of a [`PfaInstance`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PfaDocument {
    pub matrices: Vec<Matrix>,
    pub q: Vec<Scalar>,
    #[serde(rename = "F")]
    pub f: Vec<u8>,
    pub lambda: Scalar,
    #[serde(default)]
    pub convention: Convention,
}

impl TryFrom<PfaDocument> for PfaInstance {
    type Error = GptError;

    fn try_from(doc: PfaDocument) -> Result<Self> {
        let ms = MatrixSet::new(doc.matrices)?;
        let ms = match doc.convention {
            Convention::Column => ms,
            Convention::Row => ms.transposed(),
        };
        PfaInstance::new(ms, doc.q, doc.f, doc.lambda)
    }
}

impl From<PfaInstance> for PfaDocument {
    fn from(p: PfaInstance) -> Self {
        PfaDocument {
            matrices: p.matrices.matrices,
            q: p.q,
            f: p.f,
            lambda: p.lambda,
            convention: Convention::Column,
        }
    }
}

impl PfaInstance {
    /// Checks the structural invariants: `q >= 0` summing to one, `F`
    /// in `{0,1}`, `0 < λ < 1`, matching dimensions. Stochasticity of the
    /// matrices is checked separately by [`PfaInstance::is_stochastic`].
    pub fn new(matrices: MatrixSet, q: Vec<Scalar>, f: Vec<u8>, lambda: Scalar) -> Result<Self> {
        let d = if matrices.is_empty() { q.len() } else { matrices.dim() };
        check_dim(d, q.len())?;
        check_dim(d, f.len())?;
        if d == 0 {
            return Err(GptError::InvalidInstance("dimension must be positive".into()));
        }
        if q.iter().any(Scalar::is_negative) || q.iter().sum::<Scalar>() != 1 {
            return Err(GptError::InvalidInstance("q must be a probability distribution".into()));
        }
        if f.iter().any(|&x| x > 1) {
            return Err(GptError::InvalidInstance("F entries must be 0 or 1".into()));
        }
        if !lambda.is_positive() || lambda >= Scalar::one() {
            return Err(GptError::InvalidInstance(format!("cut point {lambda} outside (0, 1)")));
        }
        let matrices = if matrices.is_empty() { MatrixSet::empty(d) } else { matrices };
        Ok(PfaInstance {
            matrices,
            q,
            f,
            lambda,
        })
    }

    pub fn matrices(&self) -> &MatrixSet {
        &self.matrices
    }

    pub fn q(&self) -> &[Scalar] {
        &self.q
    }

    pub fn f(&self) -> &[u8] {
        &self.f
    }

    pub fn f_vector(&self) -> Vec<Scalar> {
        self.f.iter().map(|&x| Scalar::int(x as i64)).collect()
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn is_stochastic(&self) -> bool {
        self.matrices.is_column_stochastic()
    }

    pub fn require_stochastic(&self) -> Result<()> {
        for (i, m) in self.matrices.matrices().iter().enumerate() {
            if !m.is_column_stochastic() {
                return Err(GptError::NotStochastic(format!(
                    "matrix {} is not column-stochastic (entries in [0,1], columns summing to 1)",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// `F^T M_w q` given a precomputed product.
    pub fn acceptance_of_product(&self, m: &Matrix) -> Result<Scalar> {
        Ok(dot(&self.f_vector(), &m.mul_vec(&self.q)?))
    }
}

/// `P(F | w, q) = F^T M_w q`.
pub fn acceptance(pfa: &PfaInstance, w: &Word) -> Result<Scalar> {
    pfa.acceptance_of_product(&product(&pfa.matrices, w)?)
}

/// One enumerated word with its exact product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductNode {
    pub word: Word,
    pub matrix: Matrix,
    pub frobenius_sq: Scalar,
}

impl ProductNode {
    pub fn new(word: Word, matrix: Matrix) -> Self {
        let frobenius_sq = matrix.frobenius_sq();
        ProductNode {
            word,
            matrix,
            frobenius_sq,
        }
    }

    /// Recompute the product from scratch and compare.
    pub fn verify(&self, ms: &MatrixSet) -> Result<bool> {
        Ok(product(ms, &self.word)? == self.matrix)
    }
}

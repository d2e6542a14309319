//! Dense exact-rational matrices and the handful of spectral helpers the
//! searches need.
//!
//! Spectral quantities are irrational in general, so this module never
//! computes them. It brackets them instead: upper bounds come from
//! exactly computable norms, lower bounds from bilinear forms
//! `n'^T M n` evaluated exactly at rational vectors inside the unit ball.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, GptError, Result};
use crate::scalar::{dot, norm_sq, sum_of_products, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            check_dim(c, row.len())?;
            data.extend(row);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Build from integer-over-denominator pairs; handy for literals.
    pub fn from_fracs(rows: &[&[(i64, i64)]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&(n, d)| Scalar::new(n, d)).collect())
            .collect();
        Matrix::from_rows(rows).expect("ragged literal")
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&n| Scalar::int(n)).collect())
            .collect();
        Matrix::from_rows(rows).expect("ragged literal")
    }

    pub fn diagonal(entries: &[Scalar]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, x) in entries.iter().enumerate() {
            m.data[i * n + i] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(GptError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        check_dim(self.cols, rhs.rows)?;
        let data = (0..self.rows)
            .flat_map(|i| (0..rhs.cols).map(move |j| (i, j)))
            .map(|(i, j)| sum_of_products((0..self.cols).map(|k| (self.get(i, k), rhs.get(k, j)))))
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        check_dim(self.cols, v.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `a^T M b`.
    pub fn bilinear(&self, a: &[Scalar], b: &[Scalar]) -> Result<Scalar> {
        check_dim(self.rows, a.len())?;
        Ok(dot(a, &self.mul_vec(b)?))
    }

    pub fn scaled(&self, s: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        check_dim(self.rows, rhs.rows)?;
        check_dim(self.cols, rhs.cols)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> Scalar {
        norm_sq(&self.data)
    }

    /// Maximum absolute row sum.
    pub fn induced_inf(&self) -> Scalar {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Scalar::abs).sum::<Scalar>())
            .max()
            .unwrap_or_default()
    }

    /// Maximum absolute column sum.
    pub fn induced_1(&self) -> Scalar {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).abs()).sum::<Scalar>())
            .max()
            .unwrap_or_default()
    }

    /// A rational upper bound on the squared spectral norm.
    ///
    /// Starts from `min(|M|_F^2, |M|_1 |M|_inf)` and tightens it with a
    /// slightly inflated Rayleigh estimate `μ` whenever `μ I - M^T M` is
    /// verified positive definite exactly.
    pub fn spectral_sq_upper(&self) -> Scalar {
        let holder = &self.induced_1() * &self.induced_inf();
        let coarse = self.frobenius_sq().min(holder);
        if self.is_zero() {
            return coarse;
        }
        match self.gram_eigen_upper() {
            Some(mu) if mu < coarse => mu,
            _ => coarse,
        }
    }

    fn gram_eigen_upper(&self) -> Option<Scalar> {
        let (v, _) = power_iteration(&self.to_f64_rows(), self.cols);
        let v = RationalUnitVector::from_f64(&v, 64)?;
        if v.norm_sq().is_zero() {
            return None;
        }
        let mv = self.mul_vec(v.coords()).ok()?;
        let rayleigh = norm_sq(&mv) / v.norm_sq();
        let gram = self.transpose().mul(self).ok()?;
        [40, 24, 12, 6, 3].into_iter().find_map(|k| {
            let mu = &rayleigh * &(Scalar::one() + Scalar::pow2_recip(k)) + Scalar::pow2_recip(4 * k);
            let shifted = Matrix::identity(gram.rows).scaled(&mu).add(&gram.scaled(&-Scalar::one())).ok()?;
            shifted.is_positive_definite().then_some(mu)
        })
    }

    /// Exact test for a symmetric matrix: every pivot of elimination
    /// without row exchanges is positive.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_square() || *self != self.transpose() {
            return false;
        }
        let n = self.rows;
        let mut a = self.to_rows();
        for k in 0..n {
            if !a[k][k].is_positive() {
                return false;
            }
            let inv = a[k][k].recip();
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] * &inv;
                let (upper, lower) = a.split_at_mut(i);
                for (x, p) in lower[0][k..].iter_mut().zip(&upper[k][k..]) {
                    *x -= &(&f * p);
                }
            }
        }
        true
    }

    /// Columns sum to one and every entry lies in `[0, 1]`.
    pub fn is_column_stochastic(&self) -> bool {
        let ok_entries = self
            .data
            .iter()
            .all(|x| !x.is_negative() && *x <= Scalar::one());
        ok_entries
            && (0..self.cols).all(|j| (0..self.rows).map(|i| self.get(i, j)).sum::<Scalar>() == 1)
    }

    pub fn rank(&self) -> usize {
        rank_of_rows(self.to_rows())
    }

    pub(crate) fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Scalar::to_f64).collect())
            .collect()
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Scalar>>::deserialize(deserializer)?;
        Matrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Rank of a list of row vectors by exact Gaussian elimination.
pub fn rank_of_rows(mut rows: Vec<Vec<Scalar>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][c].recip();
        let pivot_row: Vec<Scalar> = rows[rank].iter().map(|x| x * &inv).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &(&f * p);
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// A rational vector whose squared Euclidean norm is exactly known to be
/// at most one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalUnitVector {
    coords: Vec<Scalar>,
    norm_sq: Scalar,
}

impl RationalUnitVector {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        let norm_sq = norm_sq(&coords);
        if norm_sq > Scalar::one() {
            return Err(GptError::InvalidParameter(format!(
                "vector has squared norm {norm_sq} > 1"
            )));
        }
        Ok(RationalUnitVector { coords, norm_sq })
    }

    pub fn basis(d: usize, i: usize, negative: bool) -> Self {
        let mut coords = vec![Scalar::zero(); d];
        coords[i] = if negative { -Scalar::one() } else { Scalar::one() };
        RationalUnitVector {
            coords,
            norm_sq: Scalar::one(),
        }
    }

    /// Rounds `x` to a dyadic grid and rescales it into the closed unit
    /// ball. Returns `None` for a vector that rounds to zero.
    pub fn from_f64(x: &[f64], bits: u32) -> Option<Self> {
        let coords: Vec<Scalar> = x.iter().map(|&v| Scalar::from_f64_dyadic(v, bits)).collect();
        let n2 = norm_sq(&coords);
        if n2.is_zero() {
            return None;
        }
        let shrink = n2.sqrt_upper().recip();
        let coords: Vec<Scalar> = coords.iter().map(|c| c * &shrink).collect();
        RationalUnitVector::new(coords).ok()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn norm_sq(&self) -> &Scalar {
        &self.norm_sq
    }

    pub fn scaled(&self, s: &Scalar) -> Vec<Scalar> {
        self.coords.iter().map(|c| c * s).collect()
    }

    pub fn negated(&self) -> Self {
        RationalUnitVector {
            coords: self.coords.iter().map(|c| -c).collect(),
            norm_sq: self.norm_sq.clone(),
        }
    }
}

/// Unit vectors `n`, `n'` and the exact value `n'^T M n`, a certified lower
/// bound on the spectral norm of `M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayleighPair {
    pub n: RationalUnitVector,
    pub n_prime: RationalUnitVector,
    pub value: Scalar,
}

impl RayleighPair {
    /// Recompute `n'^T M n` from scratch.
    pub fn verify(&self, m: &Matrix) -> Result<bool> {
        Ok(m.bilinear(self.n_prime.coords(), self.n.coords())? == self.value)
    }
}

const START_BITS: u32 = 16;
const MAX_BITS: u32 = 128;

/// Best rational singular pair found for `m`.
///
/// Candidates are signed basis pairs (giving the largest absolute entry)
/// and rounded floating power-iteration singular vectors. When `threshold`
/// is given, rounding precision doubles until the exact value strictly
/// exceeds it or the precision cap is reached.
pub fn best_rational_pair(m: &Matrix, threshold: Option<&Scalar>) -> RayleighPair {
    let (rows, cols) = (m.rows(), m.cols());
    assert!(rows > 0 && cols > 0, "empty matrix");
    let mut best = {
        let (mut bi, mut bj) = (0, 0);
        for i in 0..rows {
            for j in 0..cols {
                if m.get(i, j).abs() > m.get(bi, bj).abs() {
                    (bi, bj) = (i, j);
                }
            }
        }
        let neg = m.get(bi, bj).is_negative();
        RayleighPair {
            n: RationalUnitVector::basis(cols, bj, false),
            n_prime: RationalUnitVector::basis(rows, bi, neg),
            value: m.get(bi, bj).abs(),
        }
    };
    let beats = |p: &RayleighPair| threshold.is_some_and(|t| p.value > *t);
    if beats(&best) || m.is_zero() {
        return best;
    }

    let (right, left) = power_iteration(&m.to_f64_rows(), cols);
    let mut bits = START_BITS;
    while bits <= MAX_BITS {
        if let (Some(n), Some(n_prime)) = (
            RationalUnitVector::from_f64(&right, bits),
            RationalUnitVector::from_f64(&left, bits),
        ) {
            let value = m
                .bilinear(n_prime.coords(), n.coords())
                .expect("shapes agree by construction");
            if value > best.value {
                best = RayleighPair { n, n_prime, value };
            }
        }
        if threshold.is_none() || beats(&best) {
            break;
        }
        bits *= 2;
    }
    best
}

// Top right/left singular vectors of a float matrix via power iteration on
// M^T M. Rows are rescaled by the largest entry first so long products do
// not overflow.
fn power_iteration(rows: &[Vec<f64>], cols: usize) -> (Vec<f64>, Vec<f64>) {
    let peak = rows
        .iter()
        .flatten()
        .fold(0f64, |acc, x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let a: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| if x.is_finite() { x / peak } else { 0.0 }).collect())
        .collect();
    let apply = |v: &[f64]| -> Vec<f64> { a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect() };
    let apply_t = |u: &[f64]| -> Vec<f64> {
        (0..cols)
            .map(|j| a.iter().zip(u).map(|(r, y)| r[j] * y).sum())
            .collect()
    };
    let normalize = |v: &mut Vec<f64>| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            v.iter_mut().for_each(|x| *x /= n);
        }
    };
    let mut v: Vec<f64> = (0..cols).map(|j| 1.0 + 0.1 * j as f64).collect();
    normalize(&mut v);
    for _ in 0..200 {
        let mut next = apply_t(&apply(&v));
        normalize(&mut next);
        if next.iter().all(|x| *x == 0.0) {
            break;
        }
        let delta: f64 = next.iter().zip(&v).map(|(x, y)| (x - y).abs()).sum();
        v = next;
        if delta < 1e-15 {
            break;
        }
    }
    let mut u = apply(&v);
    normalize(&mut u);
    (v, u)
}

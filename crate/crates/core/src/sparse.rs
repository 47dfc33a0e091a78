//! Column-compressed complex matrices, used for operators on `(C^d)^{⊗k}`
//! that are short sums of monomial matrices.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

const DROP_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    /// `cols[c]` holds `(row, value)` sorted by row.
    cols: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            cols: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            cols: (0..dim).map(|c| vec![(c, Complex64::new(1.0, 0.0))]).collect(),
        }
    }

    /// Builds from per-column accumulators, dropping entries below `1e−14`.
    pub fn from_column_maps(cols: Vec<BTreeMap<usize, Complex64>>) -> Self {
        let dim = cols.len();
        let cols = cols
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| v.norm() > DROP_TOL).collect())
            .collect();
        Self { dim, cols }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, c: usize) -> &[(usize, Complex64)] {
        &self.cols[c]
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.cols[c]
            .binary_search_by_key(&r, |&(i, _)| i)
            .map(|k| self.cols[c][k].1)
            .unwrap_or_default()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|c| self.get(c, c)).sum()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (c, col) in self.cols.iter().enumerate() {
            let x = v[c];
            if x.norm_sqr() == 0.0 {
                continue;
            }
            for &(r, a) in col {
                out[r] += a * x;
            }
        }
        out
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.dim, rhs.dim);
        let cols = rhs
            .cols
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
                for &(k, b) in col {
                    for &(r, a) in &self.cols[k] {
                        *acc.entry(r).or_default() += a * b;
                    }
                }
                acc
            })
            .collect();
        SparseMatrix::from_column_maps(cols)
    }

    pub fn adjoint(&self) -> SparseMatrix {
        let mut cols: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); self.dim];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, a) in col {
                cols[r].insert(c, a.conj());
            }
        }
        SparseMatrix::from_column_maps(cols)
    }

    pub fn add(&self, rhs: &SparseMatrix) -> SparseMatrix {
        self.lincomb(Complex64::new(1.0, 0.0), rhs, Complex64::new(1.0, 0.0))
    }

    /// `α·self + β·rhs`.
    pub fn lincomb(&self, alpha: Complex64, rhs: &SparseMatrix, beta: Complex64) -> SparseMatrix {
        assert_eq!(self.dim, rhs.dim);
        let cols = self
            .cols
            .iter()
            .zip(&rhs.cols)
            .map(|(a, b)| {
                let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
                for &(r, v) in a {
                    *acc.entry(r).or_default() += alpha * v;
                }
                for &(r, v) in b {
                    *acc.entry(r).or_default() += beta * v;
                }
                acc
            })
            .collect();
        SparseMatrix::from_column_maps(cols)
    }

    /// Largest entrywise modulus of `self − rhs`.
    pub fn max_diff(&self, rhs: &SparseMatrix) -> f64 {
        let minus = Complex64::new(-1.0, 0.0);
        self.lincomb(Complex64::new(1.0, 0.0), rhs, minus)
            .cols
            .iter()
            .flatten()
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, Complex64::new(0.0, 0.0));
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, a) in col {
                m[(r, c)] = a;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(p: &[usize]) -> SparseMatrix {
        let mut cols = vec![BTreeMap::new(); p.len()];
        for (c, &r) in p.iter().enumerate() {
            cols[c].insert(r, Complex64::new(1.0, 0.0));
        }
        SparseMatrix::from_column_maps(cols)
    }

    #[test]
    fn product_matches_dense() {
        let a = perm(&[1, 2, 0]).add(&SparseMatrix::identity(3));
        let b = perm(&[2, 0, 1]);
        let dense = a.to_dense() * b.to_dense();
        assert_eq!(a.mul(&b).to_dense(), dense);
        assert_eq!(a.adjoint().to_dense(), a.to_dense().adjoint());
        assert_eq!(a.trace(), Complex64::new(3.0, 0.0));
        let v = vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)];
        let want = a.to_dense() * nalgebra::DVector::from_vec(v.clone());
        assert_eq!(a.mul_vec(&v), want.as_slice());
    }

    #[test]
    fn cancellation_is_dropped() {
        let a = SparseMatrix::identity(2);
        let z = a.lincomb(Complex64::new(1.0, 0.0), &a, Complex64::new(-1.0, 0.0));
        assert_eq!(z.nnz(), 0);
        assert_eq!(a.max_diff(&a), 0.0);
    }
}

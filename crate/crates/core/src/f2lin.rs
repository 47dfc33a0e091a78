//! Linear algebra over F₂ with the symplectic form.
//!
//! Vectors of length `2n` are packed into a single `u64`; bit `i` holds
//! coordinate `a_{i+1}`. Qubit `q` owns the pair of bits `(2q, 2q+1)`, read
//! as `(z, x)`, so the symplectic form pairs bit `2q` with bit `2q+1`:
//!
//! ```text
//! ⟨a, b⟩ = aᵀ J b,   J = diag([[0,1],[1,0]], …, [[0,1],[1,0]])
//! ```
//!
//! Matrices are stored as packed rows. Row `i`, bit `j` is the entry
//! `F_{ij}`, so `(F a)_i = parity(row_i & a)`.

use std::collections::HashSet;
use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use rand::Rng;

use crate::error::{Error, Result};

/// Largest qubit count representable in a packed `u64` vector.
pub const MAX_QUBITS: usize = 32;

const EVEN_BITS: u64 = 0x5555_5555_5555_5555;

#[inline]
fn mask(n: usize) -> u64 {
    if 2 * n >= 64 {
        u64::MAX
    } else {
        (1u64 << (2 * n)) - 1
    }
}

#[inline]
fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// Swap each (z, x) pair; this is `J b`.
#[inline]
fn apply_j(b: u64) -> u64 {
    ((b & EVEN_BITS) << 1) | ((b >> 1) & EVEN_BITS)
}

/// Symplectic form on raw packed vectors.
#[inline]
pub fn form_bits(a: u64, b: u64) -> bool {
    parity(a & apply_j(b))
}

/// A vector in F₂^{2n}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Vector {
    bits: u64,
    n: usize,
}

impl F2Vector {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "n = {n} exceeds {MAX_QUBITS}");
        Self { bits: 0, n }
    }

    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::Capacity(format!("n = {n} exceeds {MAX_QUBITS}")));
        }
        if bits & !mask(n) != 0 {
            return Err(Error::Dimension(format!(
                "bits {bits:#x} do not fit in length {}",
                2 * n
            )));
        }
        Ok(Self { bits, n })
    }

    /// Builds a vector from explicit coordinates `a_1 … a_{2n}`.
    pub fn from_coords(coords: &[u8]) -> Result<Self> {
        if !coords.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "odd vector length {}",
                coords.len()
            )));
        }
        let mut bits = 0u64;
        for (i, &c) in coords.iter().enumerate() {
            if c > 1 {
                return Err(Error::InvalidArgument(format!("coordinate {c} is not a bit")));
            }
            bits |= (c as u64) << i;
        }
        Self::from_bits(coords.len() / 2, bits)
    }

    /// The `i`-th standard basis vector.
    pub fn unit(n: usize, i: usize) -> Self {
        assert!(i < 2 * n);
        Self { bits: 1 << i, n }
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        2 * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < 2 * self.n);
        if v {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    /// The `(z, x)` bits of qubit `q`.
    #[inline]
    pub fn qubit(&self, q: usize) -> (bool, bool) {
        (self.get(2 * q), self.get(2 * q + 1))
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Iterates over all `4^n` vectors of F₂^{2n} in numeric order.
    pub fn all(n: usize) -> impl Iterator<Item = F2Vector> {
        assert!(n < MAX_QUBITS);
        (0..1u64 << (2 * n)).map(move |bits| F2Vector { bits, n })
    }

    /// Concatenates vectors qubit-block-wise: `self` occupies the first qubits.
    pub fn concat(&self, other: &F2Vector) -> Result<F2Vector> {
        F2Vector::from_bits(self.n + other.n, self.bits | (other.bits << (2 * self.n)))
    }
}

impl BitXor for F2Vector {
    type Output = F2Vector;

    fn bitxor(self, rhs: F2Vector) -> F2Vector {
        debug_assert_eq!(self.n, rhs.n);
        F2Vector {
            bits: self.bits ^ rhs.bits,
            n: self.n,
        }
    }
}

impl BitXorAssign for F2Vector {
    fn bitxor_assign(&mut self, rhs: F2Vector) {
        debug_assert_eq!(self.n, rhs.n);
        self.bits ^= rhs.bits;
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vector(")?;
        for i in 0..self.len() {
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, ")")
    }
}

/// `⟨a, b⟩ = aᵀ J b` over F₂.
pub fn symplectic_form(a: &F2Vector, b: &F2Vector) -> Result<bool> {
    if a.n != b.n {
        return Err(Error::Dimension(format!(
            "vector lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(form_bits(a.bits, b.bits))
}

/// Rank over F₂ of a set of packed rows.
pub fn rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::with_capacity(rows.len());
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Reduced row echelon form with pivots on the highest set bit, sorted
/// descending. Zero rows are dropped. The result is a canonical key for the
/// span.
pub fn rref(rows: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v == 0 {
            continue;
        }
        let pivot = 63 - v.leading_zeros();
        for b in basis.iter_mut() {
            if (*b >> pivot) & 1 == 1 {
                *b ^= v;
            }
        }
        basis.push(v);
        basis.sort_unstable_by(|a, b| b.cmp(a));
    }
    basis
}

/// A `2n × 2n` matrix over F₂, stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: Vec<u64>,
    n: usize,
}

impl F2Matrix {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        Self {
            rows: (0..2 * n).map(|i| 1u64 << i).collect(),
            n,
        }
    }

    /// The block-diagonal form matrix `J`.
    pub fn j(n: usize) -> Self {
        Self {
            rows: (0..2 * n).map(|i| 1u64 << (i ^ 1)).collect(),
            n,
        }
    }

    pub fn from_rows(rows: Vec<u64>) -> Result<Self> {
        if !rows.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "matrix has {} rows; expected an even count",
                rows.len()
            )));
        }
        let n = rows.len() / 2;
        if n > MAX_QUBITS {
            return Err(Error::Capacity(format!("n = {n} exceeds {MAX_QUBITS}")));
        }
        if rows.iter().any(|r| r & !mask(n) != 0) {
            return Err(Error::Dimension(format!(
                "a row has bits beyond column {}",
                2 * n
            )));
        }
        Ok(Self { rows, n })
    }

    /// Builds the matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(cols: &[u64]) -> Result<Self> {
        let dim = cols.len();
        let mut rows = vec![0u64; dim];
        for (j, &c) in cols.iter().enumerate() {
            for (i, row) in rows.iter_mut().enumerate() {
                *row |= ((c >> i) & 1) << j;
            }
        }
        Self::from_rows(rows)
    }

    /// Parses a dense 0/1 matrix given row by row.
    pub fn from_dense(entries: &[&[u8]]) -> Result<Self> {
        let dim = entries.len();
        let mut rows = Vec::with_capacity(dim);
        for r in entries {
            if r.len() != dim {
                return Err(Error::Dimension("matrix is not square".into()));
            }
            let mut bits = 0u64;
            for (j, &e) in r.iter().enumerate() {
                bits |= ((e & 1) as u64) << j;
            }
            rows.push(bits);
        }
        Self::from_rows(rows)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    #[inline]
    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn column(&self, j: usize) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, r)| acc | (((r >> j) & 1) << i))
    }

    pub fn transpose(&self) -> Self {
        let cols: Vec<u64> = self.rows.clone();
        // Rows of Fᵀ are the columns of F.
        let mut rows = vec![0u64; self.dim()];
        for (i, &r) in cols.iter().enumerate() {
            for (j, row) in rows.iter_mut().enumerate() {
                *row |= ((r >> j) & 1) << i;
            }
        }
        Self { rows, n: self.n }
    }

    #[inline]
    pub fn mul_bits(&self, a: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, r)| acc | ((parity(r & a) as u64) << i))
    }

    pub fn mul_vec(&self, a: &F2Vector) -> Result<F2Vector> {
        if a.n != self.n {
            return Err(Error::Dimension(format!(
                "matrix is {0}×{0}, vector has length {1}",
                self.dim(),
                a.len()
            )));
        }
        Ok(F2Vector {
            bits: self.mul_bits(a.bits),
            n: self.n,
        })
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &F2Matrix) -> Result<F2Matrix> {
        if self.n != rhs.n {
            return Err(Error::Dimension(format!(
                "{0}×{0} times {1}×{1}",
                self.dim(),
                rhs.dim()
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                let mut acc = 0u64;
                let mut bits = r;
                while bits != 0 {
                    let k = bits.trailing_zeros() as usize;
                    acc ^= rhs.rows[k];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        Ok(F2Matrix { rows, n: self.n })
    }

    /// Inverse of a symplectic matrix, `J Fᵀ J`.
    pub fn symplectic_inverse(&self) -> Result<F2Matrix> {
        if !self.is_symplectic() {
            return Err(Error::NotSymplectic);
        }
        let j = F2Matrix::j(self.n);
        j.mul(&self.transpose())?.mul(&j)
    }

    pub fn pow(&self, mut e: u64) -> F2Matrix {
        let mut base = self.clone();
        let mut acc = F2Matrix::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same size");
            }
            base = base.mul(&base).expect("same size");
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order, if it does not exceed `limit`.
    pub fn order(&self, limit: u64) -> Option<u64> {
        let id = F2Matrix::identity(self.n);
        let mut acc = self.clone();
        for k in 1..=limit {
            if acc == id {
                return Some(k);
            }
            acc = acc.mul(self).expect("same size");
        }
        None
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, &r)| r == 1 << i)
    }

    /// `F J Fᵀ = J`, i.e. `⟨row_i, row_j⟩ = J_{ij}`.
    pub fn is_symplectic(&self) -> bool {
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let want = j == (i ^ 1);
                if form_bits(self.rows[i], self.rows[j]) != want {
                    return false;
                }
            }
        }
        true
    }

    /// `dim ker(F − 1)`; the number of fixed points is `2^result`.
    pub fn fixed_space_dim(&self) -> usize {
        let shifted: Vec<u64> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, &r)| r ^ (1 << i))
            .collect();
        self.dim() - rank(&shifted)
    }

    /// One row per line as lower-case hex. Bit `j` of the printed number is
    /// the entry in column `j` (least significant bit = column 0).
    pub fn to_hex_rows(&self) -> String {
        let width = self.dim().div_ceil(4).max(1);
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!("{r:0width$x}\n"));
        }
        out
    }

    pub fn from_hex_rows(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let r = u64::from_str_radix(line, 16).map_err(|e| Error::Parse {
                line: lineno + 1,
                msg: e.to_string(),
            })?;
            rows.push(r);
        }
        Self::from_rows(rows)
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix(n={})", self.n)?;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                write!(f, "{}", self.get(i, j) as u8)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn is_symplectic(f: &F2Matrix) -> bool {
    f.is_symplectic()
}

pub fn fixed_space_dim(f: &F2Matrix) -> usize {
    f.fixed_space_dim()
}

/// `|Sp(2n, F₂)| = 2^{n²} ∏_{i=1}^{n} (4^i − 1)`.
pub fn sp_order(n: usize) -> u128 {
    let mut order: u128 = 1u128 << (n * n);
    for i in 1..=n {
        order *= (1u128 << (2 * i)) - 1;
    }
    order
}

/// Largest `n` for which [`enumerate_sp`] is permitted.
pub const ENUMERATE_SP_MAX_N: usize = 3;

/// Streams every element of Sp(2n, F₂) exactly once.
///
/// Elements are built column by column as images of the standard
/// symplectic basis `(e_1, f_1, …, e_n, f_n)`: `e_k'` ranges over nonzero
/// vectors orthogonal to every earlier image, and `f_k'` over vectors
/// orthogonal to the earlier images with `⟨e_k', f_k'⟩ = 1`.
pub fn enumerate_sp(n: usize) -> Result<SpEnumerator> {
    if n == 0 || n > ENUMERATE_SP_MAX_N {
        return Err(Error::Capacity(format!(
            "enumerate_sp supports 1 ≤ n ≤ {ENUMERATE_SP_MAX_N} (|Sp(2n,F₂)| = {}); use random_symplectic for larger n",
            sp_order(n)
        )));
    }
    Ok(SpEnumerator::new(n, None))
}

/// Depth-first enumerator over Sp(2n, F₂).
pub struct SpEnumerator {
    n: usize,
    cols: Vec<u64>,
    candidates: Vec<Vec<u64>>,
    cursor: Vec<usize>,
    done: bool,
}

impl SpEnumerator {
    fn new(n: usize, first: Option<u64>) -> Self {
        let dim = 2 * n;
        let mut it = SpEnumerator {
            n,
            cols: Vec::with_capacity(dim),
            candidates: Vec::with_capacity(dim),
            cursor: Vec::with_capacity(dim),
            done: false,
        };
        let level0 = match first {
            Some(v) => vec![v],
            None => it.level_candidates(),
        };
        it.candidates.push(level0);
        it.cursor.push(0);
        it
    }

    /// Restricts the enumeration to elements whose first column is `first`.
    /// The first columns range over all nonzero vectors, which partitions the
    /// group into `4^n − 1` equal slices for parallel reduction.
    pub fn with_first_column(n: usize, first: u64) -> Result<Self> {
        if n == 0 || n > ENUMERATE_SP_MAX_N {
            return Err(Error::Capacity(format!("n = {n}")));
        }
        if first == 0 || first & !mask(n) != 0 {
            return Err(Error::InvalidArgument(format!("bad first column {first:#x}")));
        }
        Ok(SpEnumerator::new(n, Some(first)))
    }

    fn level_candidates(&self) -> Vec<u64> {
        let level = self.cols.len();
        let pair_start = level % 2 == 1;
        (0..1u64 << (2 * self.n))
            .filter(|&v| {
                if v == 0 {
                    return false;
                }
                let k = self.cols.len();
                for (idx, &c) in self.cols.iter().enumerate() {
                    let want = pair_start && idx == k - 1;
                    if form_bits(c, v) != want {
                        return false;
                    }
                }
                true
            })
            .collect()
    }
}

impl Iterator for SpEnumerator {
    type Item = F2Matrix;

    fn next(&mut self) -> Option<F2Matrix> {
        if self.done {
            return None;
        }
        let dim = 2 * self.n;
        loop {
            let level = self.cols.len();
            let idx = self.cursor[level];
            if idx >= self.candidates[level].len() {
                // Exhausted this level; backtrack.
                if level == 0 {
                    self.done = true;
                    return None;
                }
                self.candidates.pop();
                self.cursor.pop();
                self.cols.pop();
                let up = self.cols.len();
                self.cursor[up] += 1;
                continue;
            }
            let v = self.candidates[level][idx];
            if level + 1 == dim {
                self.cols.push(v);
                let m = F2Matrix::from_columns(&self.cols).expect("valid size");
                self.cols.pop();
                self.cursor[level] += 1;
                return Some(m);
            }
            self.cols.push(v);
            let next = self.level_candidates();
            self.candidates.push(next);
            self.cursor.push(0);
        }
    }
}

/// Projects `v` onto the symplectic complement of the span of the given
/// symplectic pairs `(e_i, f_i)`.
fn project_off(v: u64, pairs: &[(u64, u64)]) -> u64 {
    let mut w = v;
    for &(e, f) in pairs {
        if form_bits(w, f) {
            w ^= e;
        }
        if form_bits(w, e) {
            w ^= f;
        }
    }
    w
}

/// Uniformly random element of Sp(2n, F₂).
///
/// The image pair `(e_k', f_k')` is drawn uniformly from the valid
/// completions without rejection: `e_k'` as a uniformly random nonzero
/// combination of a basis for the symplectic complement of the earlier
/// pairs, and `f_k'` through an exactly 2-to-1 map from that complement onto
/// the affine set `{v : ⟨e_k', v⟩ = 1}`.
pub fn random_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> F2Matrix {
    assert!((1..MAX_QUBITS).contains(&n), "n = {n} out of range");
    let mut pairs: Vec<(u64, u64)> = Vec::with_capacity(n);
    for _ in 0..n {
        let complement = rref(
            &(0..2 * n)
                .map(|i| project_off(1u64 << i, &pairs))
                .collect::<Vec<_>>(),
        );
        let m = complement.len();
        debug_assert_eq!(m, 2 * (n - pairs.len()));
        let combine = |coeffs: u64| -> u64 {
            complement
                .iter()
                .enumerate()
                .filter(|(i, _)| (coeffs >> i) & 1 == 1)
                .fold(0u64, |acc, (_, &b)| acc ^ b)
        };
        let e = combine(rng.random_range(1..(1u64 << m)));
        let w = *complement
            .iter()
            .find(|&&b| form_bits(e, b))
            .expect("form is nondegenerate on the complement");
        let mut f = combine(rng.random_range(0..(1u64 << m)));
        if !form_bits(e, f) {
            f ^= w;
        }
        pairs.push((e, f));
    }
    let cols: Vec<u64> = pairs.iter().flat_map(|&(e, f)| [e, f]).collect();
    F2Matrix::from_columns(&cols).expect("valid size")
}

/// An isotropic subspace, kept in canonical reduced echelon form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IsotropicSubspace {
    basis: Vec<F2Vector>,
    n: usize,
}

impl IsotropicSubspace {
    /// Spans the given vectors; fails if the span is not isotropic.
    pub fn span(n: usize, vectors: &[F2Vector]) -> Result<Self> {
        for v in vectors {
            if v.n != n {
                return Err(Error::Dimension("vector length mismatch".into()));
            }
        }
        for (i, a) in vectors.iter().enumerate() {
            for b in &vectors[i + 1..] {
                if form_bits(a.bits, b.bits) {
                    return Err(Error::InvalidArgument(format!(
                        "{a:?} and {b:?} are not orthogonal"
                    )));
                }
            }
        }
        let raw: Vec<u64> = vectors.iter().map(|v| v.bits).collect();
        Ok(Self::from_canonical(n, rref(&raw)))
    }

    fn from_canonical(n: usize, rows: Vec<u64>) -> Self {
        Self {
            basis: rows.into_iter().map(|bits| F2Vector { bits, n }).collect(),
            n,
        }
    }

    /// `M_Z = {(p_1, 0, …, p_n, 0)}`, the span of the `z` coordinates.
    pub fn z_type(n: usize) -> Self {
        let vs: Vec<F2Vector> = (0..n).map(|q| F2Vector::unit(n, 2 * q)).collect();
        Self::span(n, &vs).expect("z vectors commute")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[F2Vector] {
        &self.basis
    }

    pub fn is_maximal(&self) -> bool {
        self.dim() == self.n
    }

    pub fn contains(&self, v: &F2Vector) -> bool {
        let mut w = v.bits;
        for b in &self.basis {
            w = w.min(w ^ b.bits);
        }
        w == 0
    }

    /// All `2^dim` elements.
    pub fn elements(&self) -> Vec<F2Vector> {
        let k = self.dim();
        (0..1u64 << k)
            .map(|c| {
                let bits = self
                    .basis
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (c >> i) & 1 == 1)
                    .fold(0u64, |acc, (_, b)| acc ^ b.bits);
                F2Vector { bits, n: self.n }
            })
            .collect()
    }

    /// `dim(M ∩ N) = dim M + dim N − dim(M + N)`.
    pub fn intersection_dim(&self, other: &IsotropicSubspace) -> usize {
        let all: Vec<u64> = self
            .basis
            .iter()
            .chain(other.basis.iter())
            .map(|v| v.bits)
            .collect();
        self.dim() + other.dim() - rank(&all)
    }

    /// Image under a linear map.
    pub fn image(&self, f: &F2Matrix) -> Result<IsotropicSubspace> {
        if f.n != self.n {
            return Err(Error::Dimension("matrix/subspace size mismatch".into()));
        }
        let rows: Vec<u64> = self.basis.iter().map(|v| f.mul_bits(v.bits)).collect();
        let img = Self::from_canonical(self.n, rref(&rows));
        if !img.is_isotropic() {
            return Err(Error::NotSymplectic);
        }
        Ok(img)
    }

    pub fn is_isotropic(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| {
            self.basis[i + 1..]
                .iter()
                .all(|b| !form_bits(a.bits, b.bits))
        })
    }
}

impl fmt::Debug for IsotropicSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.basis.iter()).finish()
    }
}

/// Largest `n` accepted by [`maximal_isotropic_subspaces`].
pub const MAX_ISOTROPIC_N: usize = 4;

/// Every maximal isotropic subspace of F₂^{2n}, in canonical form, sorted.
pub fn maximal_isotropic_subspaces(n: usize) -> Result<Vec<IsotropicSubspace>> {
    if n == 0 || n > MAX_ISOTROPIC_N {
        return Err(Error::Capacity(format!(
            "maximal_isotropic_subspaces supports 1 ≤ n ≤ {MAX_ISOTROPIC_N}"
        )));
    }
    let mut layer: HashSet<Vec<u64>> = HashSet::new();
    layer.insert(Vec::new());
    for _ in 0..n {
        let mut next: HashSet<Vec<u64>> = HashSet::new();
        for basis in &layer {
            let current = IsotropicSubspace::from_canonical(n, basis.clone());
            for v in 1..1u64 << (2 * n) {
                if basis.iter().any(|&b| form_bits(b, v)) {
                    continue;
                }
                if current.contains(&F2Vector { bits: v, n }) {
                    continue;
                }
                let mut ext = basis.clone();
                ext.push(v);
                next.insert(rref(&ext));
            }
        }
        layer = next;
    }
    let mut out: Vec<IsotropicSubspace> = layer
        .into_iter()
        .map(|b| IsotropicSubspace::from_canonical(n, b))
        .collect();
    out.sort_by(|a, b| {
        let ka: Vec<u64> = a.basis.iter().map(|v| v.bits).collect();
        let kb: Vec<u64> = b.basis.iter().map(|v| v.bits).collect();
        ka.cmp(&kb)
    });
    Ok(out)
}

/// `∏_{i=1}^{n} (2^i + 1)`.
pub fn maximal_isotropic_count(n: usize) -> u64 {
    (1..=n).map(|i| (1u64 << i) + 1).product()
}

/// Brute-force search for a vector `v` with `⟨c_i, v⟩ = want_i` for all
/// constraints. Returns the smallest such vector.
pub fn solve_form_constraints(n: usize, constraints: &[(u64, bool)]) -> Option<u64> {
    (0..1u64 << (2 * n)).find(|&v| constraints.iter().all(|&(c, w)| form_bits(c, v) == w))
}

/// A symplectic matrix `B` with `B(M_Z) = M`, built by completing a basis of
/// `M` to a symplectic basis.
pub fn symplectic_basis_for(m: &IsotropicSubspace) -> Result<F2Matrix> {
    if !m.is_maximal() {
        return Err(Error::InvalidArgument("subspace is not maximal".into()));
    }
    let n = m.n;
    let ls: Vec<u64> = m.basis.iter().map(|v| v.bits).collect();
    let mut fs: Vec<u64> = Vec::with_capacity(n);
    for i in 0..n {
        let cons: Vec<(u64, bool)> = ls.iter().enumerate().map(|(j, &l)| (l, i == j)).collect();
        let mut f = solve_form_constraints(n, &cons)
            .ok_or_else(|| Error::Internal("no dual vector found".into()))?;
        for (j, &fj) in fs.iter().enumerate() {
            if form_bits(fj, f) {
                f ^= ls[j];
            }
        }
        fs.push(f);
    }
    let cols: Vec<u64> = ls.iter().zip(&fs).flat_map(|(&e, &f)| [e, f]).collect();
    let b = F2Matrix::from_columns(&cols)?;
    if !b.is_symplectic() {
        return Err(Error::Internal("completed basis is not symplectic".into()));
    }
    Ok(b)
}

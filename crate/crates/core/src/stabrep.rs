//! The stabilizer code `V_{n,k}` fixed by all `W_a^{⊗k}`, Schur–Weyl
//! projectors on `(C^d)^{⊗4}`, and the exact dimension and character
//! bookkeeping around them.
//!
//! Tensor factor `j` of `(C^d)^{⊗k}` occupies amplitude-index bits
//! `(k−1−j)·n .. (k−j)·n`, so factor 0 is the most significant.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::CliffordElement;
use crate::error::{Error, Result};
use crate::f2lin::{
    enumerate_sp, maximal_isotropic_subspaces, sp_order, F2Matrix, F2Vector, IsotropicSubspace,
    SpEnumerator, ENUMERATE_SP_MAX_N,
};
use crate::pauli::{apply_pauli_raw, i_pow, label_masks, PauliLabel};
use crate::sparse::SparseMatrix;
use crate::state::StateVector;

pub type Rational = Ratio<i128>;

/// Sparse vector as `(index, amplitude)` pairs, sorted by index.
pub type SparseVector = Vec<(usize, Complex64)>;

/// Largest `d^k` for which `(C^d)^{⊗k}` operators are built.
pub const MAX_TENSOR_DIM: usize = 1 << 16;

/// Largest `n` for [`isotropic_orbit_states`].
pub const MAX_ORBIT_STATE_N: usize = 2;

/// Largest `n` for [`appendix_a_dimension_oracle`].
pub const MAX_ORACLE_N: usize = 6;

/// The five partitions of 4, in the order `[4], [1,1,1,1], [2,2], [2,1,1], [3,1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Partition4 {
    Four,
    OneOneOneOne,
    TwoTwo,
    TwoOneOne,
    ThreeOne,
}

/// Conjugacy classes of S₄ by cycle type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum S4Class {
    Identity,
    DoubleTransposition,
    Transposition,
    ThreeCycle,
    FourCycle,
}

impl S4Class {
    pub fn of(sigma: &[usize]) -> S4Class {
        match cycle_type(sigma).as_slice() {
            [1, 1, 1, 1] => S4Class::Identity,
            [2, 2] => S4Class::DoubleTransposition,
            [2, 1, 1] => S4Class::Transposition,
            [3, 1] => S4Class::ThreeCycle,
            [4] => S4Class::FourCycle,
            other => panic!("{other:?} is not a cycle type of S4"),
        }
    }
}

impl Partition4 {
    pub const ALL: [Partition4; 5] = [
        Partition4::Four,
        Partition4::OneOneOneOne,
        Partition4::TwoTwo,
        Partition4::TwoOneOne,
        Partition4::ThreeOne,
    ];

    pub fn parts(&self) -> &'static [usize] {
        match self {
            Partition4::Four => &[4],
            Partition4::OneOneOneOne => &[1, 1, 1, 1],
            Partition4::TwoTwo => &[2, 2],
            Partition4::TwoOneOne => &[2, 1, 1],
            Partition4::ThreeOne => &[3, 1],
        }
    }

    /// Dimension of the Specht module.
    pub fn specht_dim(&self) -> i64 {
        self.character(S4Class::Identity)
    }

    pub fn character(&self, class: S4Class) -> i64 {
        use Partition4::*;
        use S4Class::*;
        match (self, class) {
            (Four, _) => 1,
            (OneOneOneOne, Transposition | FourCycle) => -1,
            (OneOneOneOne, _) => 1,
            (TwoTwo, Identity | DoubleTransposition) => 2,
            (TwoTwo, ThreeCycle) => -1,
            (TwoTwo, _) => 0,
            (TwoOneOne, Identity) => 3,
            (TwoOneOne, DoubleTransposition | Transposition) => -1,
            (TwoOneOne, ThreeCycle) => 0,
            (TwoOneOne, FourCycle) => 1,
            (ThreeOne, Identity) => 3,
            (ThreeOne, DoubleTransposition | FourCycle) => -1,
            (ThreeOne, Transposition) => 1,
            (ThreeOne, ThreeCycle) => 0,
        }
    }
}

impl fmt::Display for Partition4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts().iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl FromStr for Partition4 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| c.is_ascii_digit() || *c == ',').collect();
        Partition4::ALL
            .into_iter()
            .find(|p| {
                let want: Vec<String> = p.parts().iter().map(|x| x.to_string()).collect();
                want.join(",") == cleaned
            })
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

impl Serialize for Partition4 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

/// Cycle lengths of a permutation, non-increasing.
pub fn cycle_type(sigma: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; sigma.len()];
    let mut lens = Vec::new();
    for start in 0..sigma.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = sigma[i];
            len += 1;
        }
        lens.push(len);
    }
    lens.sort_unstable_by(|a, b| b.cmp(a));
    lens
}

/// Factor `j` of a `k`-fold index with `n` qubits per factor.
#[inline]
pub fn factor(index: usize, j: usize, k: usize, n: usize) -> usize {
    (index >> ((k - 1 - j) * n)) & ((1 << n) - 1)
}

#[inline]
fn join_factors(parts: &[usize], n: usize) -> usize {
    parts.iter().fold(0usize, |acc, &p| (acc << n) | p)
}

/// `U_σ`: the content of factor `i` moves to factor `σ(i)`.
pub fn permute_factors(index: usize, sigma: &[usize], n: usize) -> usize {
    let k = sigma.len();
    let mut parts = vec![0usize; k];
    for (i, &s) in sigma.iter().enumerate() {
        parts[s] = factor(index, i, k, n);
    }
    join_factors(&parts, n)
}

fn check_tensor(n: usize, k: usize) -> Result<usize> {
    if k == 0 || !k.is_multiple_of(4) {
        return Err(Error::InvalidDegree(k));
    }
    let bits = n * k;
    if n == 0 || bits > 16 {
        return Err(Error::Capacity(format!(
            "d^k = 2^{bits} exceeds {MAX_TENSOR_DIM}"
        )));
    }
    Ok(1 << bits)
}

/// `P_{n,k} = (1/d²) Σ_a W_a^{⊗k}`.
pub fn stab_projector(n: usize, k: usize) -> Result<SparseMatrix> {
    let dim = check_tensor(n, k)?;
    let d = 1usize << n;
    let labels: Vec<(usize, usize, u32)> = (0..(d * d) as u64)
        .map(|a| {
            let (z, x) = label_masks(a, n);
            (z, x, (k as u32) * (z & x).count_ones())
        })
        .collect();
    let inv = 1.0 / (d * d) as f64;
    let cols: Vec<BTreeMap<usize, Complex64>> = (0..dim)
        .into_par_iter()
        .map(|y| {
            let mut acc = BTreeMap::new();
            for &(z, x, base) in &labels {
                let mut out = 0usize;
                let mut sign = 0u32;
                for j in 0..k {
                    let yj = factor(y, j, k, n);
                    out = (out << n) | (yj ^ x);
                    sign += (z & yj).count_ones();
                }
                *acc.entry(out).or_insert(Complex64::new(0.0, 0.0)) +=
                    i_pow(base + 2 * (sign & 1)) * inv;
            }
            acc
        })
        .collect();
    Ok(SparseMatrix::from_column_maps(cols))
}

/// Largest entrywise deviation from `P² = P = P†`.
pub fn projector_residual(p: &SparseMatrix) -> f64 {
    p.mul(p).max_diff(p).max(p.adjoint().max_diff(p))
}

/// Even-weight `u ∈ F₂^k` with `u_1 = 0`, as integers with factor 0 the most
/// significant bit.
fn code_strings(k: usize) -> Vec<usize> {
    (0..1usize << (k - 1))
        .filter(|u| u.count_ones() % 2 == 0)
        .collect()
}

/// Orthonormal basis `{|φ_u⟩}^{⊗n}` of `V_{n,k}`, with
/// `|φ_u⟩ = (|u⟩ + |ū⟩)/√2` on the `q`-th qubit of every factor.
pub fn stab_code_basis(n: usize, k: usize) -> Result<Vec<SparseVector>> {
    check_tensor(n, k)?;
    let strings = code_strings(k);
    let m = strings.len();
    let amp = Complex64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
    let total = m.pow(n as u32);
    let mut out = Vec::with_capacity(total);
    for mut idx in 0..total {
        // Digits of idx choose u^{(q)}; qubit 0 is the leading digit.
        let mut us = vec![0usize; n];
        for q in (0..n).rev() {
            us[q] = strings[idx % m];
            idx /= m;
        }
        let mut v: SparseVector = (0..1usize << n)
            .map(|flip| {
                let mut parts = vec![0usize; k];
                for (q, &u) in us.iter().enumerate() {
                    let c = (flip >> (n - 1 - q)) & 1;
                    for (j, part) in parts.iter_mut().enumerate() {
                        let bit = ((u >> (k - 1 - j)) & 1) ^ c;
                        *part |= bit << (n - 1 - q);
                    }
                }
                (join_factors(&parts, n), amp)
            })
            .collect();
        v.sort_unstable_by_key(|&(i, _)| i);
        out.push(v);
    }
    Ok(out)
}

/// `vec(W_a) ⊗ vec(W_a)` for every `a`, in label order. Each has norm² `d²`.
pub fn vec_pauli_basis(n: usize) -> Result<Vec<(F2Vector, SparseVector)>> {
    if n == 0 || n > 3 {
        return Err(Error::Capacity(format!("vec_pauli_basis supports 1 ≤ n ≤ 3, got {n}")));
    }
    let d = 1usize << n;
    Ok(F2Vector::all(n)
        .map(|a| {
            let (z, x) = label_masks(a.bits(), n);
            let entry = |y: usize| i_pow((z & x).count_ones() + 2 * ((z & y).count_ones() & 1));
            let mut v: SparseVector = Vec::with_capacity(d * d);
            for y in 0..d {
                for y2 in 0..d {
                    let idx = join_factors(&[y ^ x, y, y2 ^ x, y2], n);
                    v.push((idx, entry(y) * entry(y2)));
                }
            }
            v.sort_unstable_by_key(|&(i, _)| i);
            (a, v)
        })
        .collect())
}

pub fn sparse_to_dense(v: &SparseVector, dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for &(i, a) in v {
        out[i] = a;
    }
    out
}

/// `⊗^k U` applied to a dense vector on `(C^d)^{⊗k}`, one factor at a time.
pub fn apply_tensor_power(u: &CliffordElement, k: usize, v: &[Complex64]) -> Vec<Complex64> {
    let n = u.n();
    let d = 1usize << n;
    assert_eq!(v.len(), 1usize << (n * k));
    let m = u.matrix();
    let mut cur = v.to_vec();
    for j in 0..k {
        let shift = (k - 1 - j) * n;
        let mut next = vec![Complex64::new(0.0, 0.0); cur.len()];
        for (idx, &a) in cur.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let yj = (idx >> shift) & (d - 1);
            let rest = idx & !((d - 1) << shift);
            for r in 0..d {
                let c = m[(r, yj)];
                if c.norm_sqr() != 0.0 {
                    next[rest | (r << shift)] += c * a;
                }
            }
        }
        cur = next;
    }
    cur
}

/// `U_σ` as a sparse permutation matrix on `(C^d)^{⊗4}`.
pub fn factor_permutation(sigma: &[usize], n: usize) -> SparseMatrix {
    let dim = 1usize << (n * sigma.len());
    let cols = (0..dim)
        .map(|y| {
            let mut m = BTreeMap::new();
            m.insert(permute_factors(y, sigma, n), Complex64::new(1.0, 0.0));
            m
        })
        .collect();
    SparseMatrix::from_column_maps(cols)
}

/// `P_λ = (d_λ/24) Σ_σ χ_λ(σ) U_σ`.
pub fn young_projector(lambda: Partition4, n: usize) -> Result<SparseMatrix> {
    let dim = check_tensor(n, 4)?;
    let perms = permutations(4);
    let coeffs: Vec<(Vec<usize>, f64)> = perms
        .into_iter()
        .map(|s| {
            let c = lambda.specht_dim() as f64 * lambda.character(S4Class::of(&s)) as f64 / 24.0;
            (s, c)
        })
        .filter(|(_, c)| *c != 0.0)
        .collect();
    let cols: Vec<BTreeMap<usize, Complex64>> = (0..dim)
        .into_par_iter()
        .map(|y| {
            let mut acc = BTreeMap::new();
            for (s, c) in &coeffs {
                *acc.entry(permute_factors(y, s, n))
                    .or_insert(Complex64::new(0.0, 0.0)) += Complex64::new(*c, 0.0);
            }
            acc
        })
        .collect();
    Ok(SparseMatrix::from_column_maps(cols))
}

/// A row of the dimension table for `(C^d)^{⊗4}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionRow {
    pub lambda: Partition4,
    pub d_lambda: i64,
    #[serde(rename = "D")]
    pub d_weyl: i64,
    #[serde(rename = "D_plus")]
    pub d_plus: i64,
    #[serde(rename = "D_minus")]
    pub d_minus: i64,
}

fn as_integer(r: Rational, what: &str) -> Result<i64> {
    if !r.is_integer() {
        return Err(Error::Internal(format!("{what} = {r} is not an integer")));
    }
    r.to_integer()
        .to_i64()
        .ok_or_else(|| Error::Internal(format!("{what} overflows")))
}

/// `D_λ`, `D⁺_λ`, `D⁻_λ` for all five `λ`, in exact arithmetic.
///
/// `D_λ = (1/24) Σ_σ χ_λ(σ) d^{c(σ)}` and
/// `D⁺_λ = (1/d²)[D_λ + (1/24) Σ_σ Σ_{a≠0} χ_λ(σ) tr(U_σ W_a^{⊗4})]`, where the
/// trace is `d^{l(σ)}` when every cycle of `σ` has even length and 0 otherwise.
pub fn dimension_table(n: usize) -> Result<Vec<DimensionRow>> {
    if n == 0 || n > 20 {
        return Err(Error::Capacity(format!("dimension_table supports 1 ≤ n ≤ 20, got {n}")));
    }
    let d = 1i128 << n;
    let perms = permutations(4);
    Partition4::ALL
        .iter()
        .map(|&lambda| {
            let mut weyl = Rational::zero();
            let mut pauli = Rational::zero();
            for s in &perms {
                let ct = cycle_type(s);
                let chi = lambda.character(S4Class::of(s)) as i128;
                weyl += Rational::from_integer(chi * d.pow(ct.len() as u32));
                if ct.iter().all(|l| l % 2 == 0) {
                    pauli += Rational::from_integer(chi * (d * d - 1) * d.pow(ct.len() as u32));
                }
            }
            let weyl = weyl / Rational::from_integer(24);
            let plus = (weyl + pauli / Rational::from_integer(24)) / Rational::from_integer(d * d);
            let d_weyl = as_integer(weyl, "D_λ")?;
            let d_plus = as_integer(plus, "D⁺_λ")?;
            Ok(DimensionRow {
                lambda,
                d_lambda: lambda.specht_dim(),
                d_weyl,
                d_plus,
                d_minus: d_weyl - d_plus,
            })
        })
        .collect()
}

/// `tr(P_{n,4} P_λ) / d_λ` from the sparse matrices.
pub fn numeric_d_plus(lambda: Partition4, n: usize) -> Result<f64> {
    let p = stab_projector(n, 4)?;
    let y = young_projector(lambda, n)?;
    Ok(p.mul(&y).trace().re / lambda.specht_dim() as f64)
}

/// `tr(U_F^{⊗k} P_{n,k}) = [(−4)^{k/4}/2]^{dim ker(F−1)}`.
pub fn symplectic_character(f: &F2Matrix, k: usize) -> Result<f64> {
    if k == 0 || !k.is_multiple_of(4) {
        return Err(Error::InvalidDegree(k));
    }
    let base = (-4.0f64).powi((k / 4) as i32) / 2.0;
    Ok(base.powi(f.fixed_space_dim() as i32))
}

/// `Σ_v ⟨v|U^{⊗k}|v⟩` over the basis of `V_{n,k}`.
pub fn code_trace(u: &CliffordElement, k: usize) -> Result<Complex64> {
    let n = u.n();
    let basis = stab_code_basis(n, k)?;
    let m = u.matrix();
    Ok(basis
        .par_iter()
        .map(|v| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(i, vi) in v {
                for &(j, vj) in v {
                    let mut prod = vi.conj() * vj;
                    for f in 0..k {
                        prod *= m[(factor(i, f, k, n), factor(j, f, k, n))];
                        if prod.norm_sqr() == 0.0 {
                            break;
                        }
                    }
                    acc += prod;
                }
            }
            acc
        })
        .sum())
}

fn check_degree(k: usize) -> Result<()> {
    if k == 0 || !k.is_multiple_of(4) {
        return Err(Error::InvalidDegree(k));
    }
    Ok(())
}

/// Whether `R` is closed under multiplication.
pub fn is_closed(r: &[F2Matrix]) -> bool {
    let set: HashSet<&F2Matrix> = r.iter().collect();
    r.par_iter()
        .all(|a| r.iter().all(|b| set.contains(&a.mul(b).expect("same size"))))
}

/// `M_k(R) = (1/|R|) Σ_{F∈R} f(F)^{k−2}` with `f(F) = 2^{dim ker(F−1)}`.
pub fn multiplicity_sum(r: &[F2Matrix], k: usize, verify_closure: bool) -> Result<Rational> {
    check_degree(k)?;
    if r.is_empty() {
        return Err(Error::InvalidArgument("empty subset".into()));
    }
    if verify_closure && !is_closed(r) {
        return Err(Error::NotAGroup);
    }
    let total: i128 = r
        .iter()
        .map(|f| 1i128 << (f.fixed_space_dim() * (k - 2)))
        .sum();
    Ok(Rational::new(total, r.len() as i128))
}

/// Counts of `dim ker(F−1)` over all of Sp(2n, F₂), computed in parallel over
/// the first column and cached.
pub fn fixed_dim_histogram(n: usize) -> Result<&'static [u64]> {
    static CACHE: [OnceLock<Vec<u64>>; ENUMERATE_SP_MAX_N + 1] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if n == 0 || n > ENUMERATE_SP_MAX_N {
        return Err(Error::Capacity(format!(
            "exact group sums need 1 ≤ n ≤ {ENUMERATE_SP_MAX_N} (|Sp(2n,F₂)| = {})",
            sp_order(n)
        )));
    }
    Ok(CACHE[n].get_or_init(|| {
        let dim = 2 * n;
        let hist = (1..1u64 << dim)
            .into_par_iter()
            .map(|first| {
                let mut h = vec![0u64; dim + 1];
                for f in SpEnumerator::with_first_column(n, first).expect("valid column") {
                    h[f.fixed_space_dim()] += 1;
                }
                h
            })
            .reduce(
                || vec![0u64; dim + 1],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        debug_assert_eq!(hist.iter().sum::<u64>() as u128, sp_order(n));
        hist
    }))
}

fn power_sum(n: usize, exponent: usize) -> Result<Rational> {
    let hist = fixed_dim_histogram(n)?;
    let total: i128 = hist
        .iter()
        .enumerate()
        .map(|(dim, &c)| c as i128 * (1i128 << (dim * exponent)))
        .sum();
    Ok(Rational::new(total, sp_order(n) as i128))
}

/// `Φ_t(C_n) = (1/|Sp|) Σ_F f(F)^{t−1}`.
pub fn clifford_frame_potential(n: usize, t: usize) -> Result<Rational> {
    if t == 0 {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    power_sum(n, t - 1)
}

/// `M_k(Sp(2n, F₂))` from the cached histogram.
pub fn sp_multiplicity_sum(n: usize, k: usize) -> Result<Rational> {
    check_degree(k)?;
    power_sum(n, k - 2)
}

/// `|ψ_M⟩` for every maximal isotropic `M`: the state on `4n` qubits fixed by
/// `W_a^{⊗4}`, `W_m ⊗ W_m ⊗ 1 ⊗ 1` and `W_m ⊗ 1 ⊗ W_m ⊗ 1` (`m ∈ M`).
pub fn isotropic_orbit_states(n: usize) -> Result<Vec<(IsotropicSubspace, StateVector)>> {
    if n == 0 || n > MAX_ORBIT_STATE_N {
        return Err(Error::Capacity(format!(
            "isotropic_orbit_states supports 1 ≤ n ≤ {MAX_ORBIT_STATE_N}"
        )));
    }
    let zero = F2Vector::zero(n);
    let cat = |parts: [&F2Vector; 4]| -> F2Vector {
        parts[0]
            .concat(parts[1])
            .and_then(|v| v.concat(parts[2]))
            .and_then(|v| v.concat(parts[3]))
            .expect("4n ≤ 32")
    };
    let spaces = maximal_isotropic_subspaces(n)?;
    spaces
        .into_iter()
        .map(|m| {
            let mut gens: Vec<PauliLabel> = (0..2 * n)
                .map(|i| {
                    let e = F2Vector::unit(n, i);
                    PauliLabel::bare(cat([&e, &e, &e, &e]))
                })
                .collect();
            for b in m.basis() {
                gens.push(PauliLabel::bare(cat([b, b, &zero, &zero])));
                gens.push(PauliLabel::bare(cat([b, &zero, b, &zero])));
            }
            let dim = 1usize << (4 * n);
            for start in 0..dim {
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                v[start] = Complex64::new(1.0, 0.0);
                for g in &gens {
                    let gv = apply_pauli_raw(g, &v);
                    for (x, y) in v.iter_mut().zip(gv) {
                        *x = (*x + y) * 0.5;
                    }
                }
                let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum();
                if norm > 1e-6 {
                    let psi = StateVector::new(v)?.normalized()?;
                    return Ok((m, psi));
                }
            }
            Err(Error::Internal("stabilizer group has no +1 eigenvector".into()))
        })
        .collect()
}

/// `(D⁺_{[4]}, D⁺_{[1⁴]})` by counting S₄-orbits of strings in `{0,1,2,3}ⁿ`.
///
/// Letters 1, 2, 3 stand for the pairings `{14|23}`, `{13|24}`, `{12|34}` of the
/// four tensor factors; S₄ permutes them. `D⁺_{[4]}` is the number of orbits
/// and `D⁺_{[1⁴]}` the number of orbits whose stabilizer has only even
/// permutations.
pub fn appendix_a_dimension_oracle(n: usize) -> Result<(u64, u64)> {
    if n == 0 || n > MAX_ORACLE_N {
        return Err(Error::Capacity(format!(
            "appendix_a_dimension_oracle supports 1 ≤ n ≤ {MAX_ORACLE_N}"
        )));
    }
    let pairings: [[[usize; 2]; 2]; 3] = [[[0, 3], [1, 2]], [[0, 2], [1, 3]], [[0, 1], [2, 3]]];
    let canon = |p: [[usize; 2]; 2]| -> [[usize; 2]; 2] {
        let mut a = [p[0][0].min(p[0][1]), p[0][0].max(p[0][1])];
        let mut b = [p[1][0].min(p[1][1]), p[1][0].max(p[1][1])];
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        [a, b]
    };
    let perms = permutations(4);
    // Letter map per permutation: 0 ↦ 0, pairing ↦ image pairing.
    let actions: Vec<([usize; 4], bool)> = perms
        .iter()
        .map(|s| {
            let mut map = [0usize; 4];
            for (li, p) in pairings.iter().enumerate() {
                let img = canon([[s[p[0][0]], s[p[0][1]]], [s[p[1][0]], s[p[1][1]]]]);
                let target = pairings.iter().position(|q| canon(*q) == img).expect("pairing");
                map[li + 1] = target + 1;
            }
            let odd = cycle_type(s).iter().filter(|l| *l % 2 == 0).count() % 2 == 1;
            (map, odd)
        })
        .collect();
    let total = 4usize.pow(n as u32);
    let act = |s: usize, map: &[usize; 4]| -> usize {
        let mut out = 0usize;
        for q in 0..n {
            let letter = (s >> (2 * q)) & 3;
            out |= map[letter] << (2 * q);
        }
        out
    };
    let mut seen = vec![false; total];
    let mut orbits = 0u64;
    let mut even_stab = 0u64;
    for s in 0..total {
        if seen[s] {
            continue;
        }
        orbits += 1;
        let mut stab_even = true;
        for (map, odd) in &actions {
            let t = act(s, map);
            seen[t] = true;
            if t == s && *odd {
                stab_even = false;
            }
        }
        if stab_even {
            even_stab += 1;
        }
    }
    Ok((orbits, even_stab))
}

/// All the exact tables for one `n`.
#[derive(Clone, Debug, Serialize)]
pub struct TablesReport {
    pub n: usize,
    pub d: u64,
    pub rows: Vec<DimensionRow>,
    pub completeness: bool,
    pub appendix_a: Option<AppendixAComparison>,
    pub frame_potential_phi4: Option<RationalOut>,
    pub multiplicity_sum_m4: Option<RationalOut>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AppendixAComparison {
    pub d_plus_sym: u64,
    pub d_plus_antisym: u64,
    pub agrees: bool,
}

/// A rational emitted both exactly and as a double.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RationalOut {
    pub exact: String,
    pub value: f64,
}

impl From<Rational> for RationalOut {
    fn from(r: Rational) -> Self {
        RationalOut {
            exact: if r.is_integer() {
                r.to_integer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            },
            value: r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

pub fn tables_report(n: usize) -> Result<TablesReport> {
    let rows = dimension_table(n)?;
    let d = 1i64 << n;
    let completeness = rows.iter().map(|r| r.d_lambda * r.d_weyl).sum::<i64>() == d.pow(4)
        && rows.iter().map(|r| r.d_lambda * r.d_plus).sum::<i64>() == d * d;
    let appendix_a = if n <= MAX_ORACLE_N {
        let (s, a) = appendix_a_dimension_oracle(n)?;
        Some(AppendixAComparison {
            d_plus_sym: s,
            d_plus_antisym: a,
            agrees: s as i64 == rows[0].d_plus && a as i64 == rows[1].d_plus,
        })
    } else {
        None
    };
    let (phi4, m4) = if n <= ENUMERATE_SP_MAX_N {
        (
            Some(clifford_frame_potential(n, 4)?.into()),
            Some(sp_multiplicity_sum(n, 4)?.into()),
        )
    } else {
        (None, None)
    };
    Ok(TablesReport {
        n,
        d: d as u64,
        rows,
        completeness,
        appendix_a,
        frame_potential_phi4: phi4,
        multiplicity_sum_m4: m4,
    })
}

/// Elements of Sp(2n, F₂) from [`enumerate_sp`], collected.
pub fn sp_elements(n: usize) -> Result<Vec<F2Matrix>> {
    Ok(enumerate_sp(n)?.collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{lift_symplectic, random_clifford};
    use crate::pauli::pauli_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Closed forms of the dimension table as printed.
    fn closed_form_row(lambda: Partition4, n: usize) -> (i64, i64, i64, i64) {
        let d = 1i64 << n;
        match lambda {
            Partition4::Four => (
                1,
                d * (d + 1) * (d + 2) * (d + 3) / 24,
                (d + 1) * (d + 2) / 6,
                (d - 1) * (d + 1) * (d + 2) * (d + 4) / 24,
            ),
            Partition4::OneOneOneOne => (
                1,
                d * (d - 1) * (d - 2) * (d - 3) / 24,
                (d - 1) * (d - 2) / 6,
                (d + 1) * (d - 1) * (d - 2) * (d - 4) / 24,
            ),
            Partition4::TwoTwo => (
                2,
                d * d * (d * d - 1) / 12,
                (d * d - 1) / 3,
                (d * d - 4) * (d * d - 1) / 12,
            ),
            Partition4::TwoOneOne => (
                3,
                d * (d - 2) * (d * d - 1) / 8,
                0,
                d * (d - 2) * (d * d - 1) / 8,
            ),
            Partition4::ThreeOne => (
                3,
                d * (d + 2) * (d * d - 1) / 8,
                0,
                d * (d + 2) * (d * d - 1) / 8,
            ),
        }
    }

    #[test]
    fn characters_orthonormal() {
        let perms = permutations(4);
        assert_eq!(perms.len(), 24);
        for a in Partition4::ALL {
            for b in Partition4::ALL {
                let s: i64 = perms
                    .iter()
                    .map(|p| a.character(S4Class::of(p)) * b.character(S4Class::of(p)))
                    .sum();
                assert_eq!(s, if a == b { 24 } else { 0 });
            }
        }
    }

    #[test]
    fn partition_parse() {
        for p in Partition4::ALL {
            assert_eq!(p.to_string().parse::<Partition4>().unwrap(), p);
        }
        assert!("[1^4]".parse::<Partition4>().is_err());
        assert_eq!("1,1,1,1".parse::<Partition4>().unwrap(), Partition4::OneOneOneOne);
    }

    #[test]
    fn table_matches_closed_forms() {
        for n in 1..=8 {
            let rows = dimension_table(n).unwrap();
            for row in &rows {
                let (dl, dw, dp, dm) = closed_form_row(row.lambda, n);
                assert_eq!((row.d_lambda, row.d_weyl, row.d_plus, row.d_minus), (dl, dw, dp, dm));
            }
        }
        let r = &dimension_table(1).unwrap()[0];
        assert_eq!((r.d_lambda, r.d_weyl, r.d_plus, r.d_minus), (1, 5, 2, 3));
        assert_eq!(dimension_table(2).unwrap()[2].d_plus, 5);
    }

    #[test]
    fn appendix_a_small() {
        assert_eq!(appendix_a_dimension_oracle(1).unwrap(), (2, 0));
        assert_eq!(appendix_a_dimension_oracle(2).unwrap(), (5, 1));
        for n in 1..=6 {
            let (s, a) = appendix_a_dimension_oracle(n).unwrap();
            let rows = dimension_table(n).unwrap();
            assert_eq!(s as i64, rows[0].d_plus);
            assert_eq!(a as i64, rows[1].d_plus);
        }
        assert!(appendix_a_dimension_oracle(7).is_err());
    }

    #[test]
    fn projector_basics() {
        for n in 1..=3 {
            let p = stab_projector(n, 4).unwrap();
            let d = (1usize << n) as f64;
            assert!((p.trace().re - d * d).abs() < 1e-10);
            assert!(projector_residual(&p) < 1e-10);
        }
        let p18 = stab_projector(1, 8).unwrap();
        assert!((p18.trace().re - 64.0).abs() < 1e-10);
        assert!(matches!(stab_projector(1, 6), Err(Error::InvalidDegree(6))));
        assert!(matches!(stab_projector(3, 8), Err(Error::Capacity(_))));
    }

    #[test]
    fn projector_dense_oracle_n1() {
        // Direct Kronecker products of the 2×2 Paulis.
        let mut acc = nalgebra::DMatrix::<Complex64>::zeros(16, 16);
        for a in F2Vector::all(1) {
            let w = pauli_matrix(&PauliLabel::bare(a));
            acc += w.kronecker(&w).kronecker(&w).kronecker(&w) * Complex64::new(0.25, 0.0);
        }
        let p = stab_projector(1, 4).unwrap().to_dense();
        assert!((acc - p).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn code_basis_spans_range() {
        for (n, k) in [(1, 4), (2, 4), (3, 4), (1, 8)] {
            let p = stab_projector(n, k).unwrap();
            let basis = stab_code_basis(n, k).unwrap();
            let d = 1usize << n;
            assert_eq!(basis.len(), d.pow(k as u32 - 2));
            let dim = p.dim();
            for (i, v) in basis.iter().enumerate().take(40) {
                let dense = sparse_to_dense(v, dim);
                let pv = p.mul_vec(&dense);
                assert!(pv.iter().zip(&dense).all(|(a, b)| (a - b).norm() < 1e-12));
                for w in basis.iter().skip(i).take(40) {
                    let ip: Complex64 = sparse_to_dense(w, dim)
                        .iter()
                        .zip(&dense)
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    let want = if std::ptr::eq(v, w) { 1.0 } else { 0.0 };
                    assert!((ip.re - want).abs() < 1e-12 && ip.im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn code_basis_n1_matches_listed_states() {
        let basis = stab_code_basis(1, 4).unwrap();
        let mut supports: Vec<Vec<usize>> = basis
            .iter()
            .map(|v| v.iter().map(|&(i, _)| i).collect())
            .collect();
        supports.sort();
        let mut want = vec![
            vec![0b0000, 0b1111],
            vec![0b0110, 0b1001],
            vec![0b0101, 0b1010],
            vec![0b0011, 0b1100],
        ];
        want.sort();
        assert_eq!(supports, want);
    }

    #[test]
    fn young_traces_n1() {
        let want = [5.0, 0.0, 2.0, 0.0, 9.0];
        let mut sum = SparseMatrix::zeros(16);
        for (lambda, w) in Partition4::ALL.into_iter().zip(want) {
            let p = young_projector(lambda, 1).unwrap();
            assert!((p.trace().re - w).abs() < 1e-12);
            assert!(projector_residual(&p) < 1e-12);
            sum = sum.add(&p);
        }
        assert!(sum.max_diff(&SparseMatrix::identity(16)) < 1e-12);
    }

    #[test]
    fn young_projectors_orthogonal_n2() {
        let ps: Vec<SparseMatrix> = Partition4::ALL
            .iter()
            .map(|&l| young_projector(l, 2).unwrap())
            .collect();
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert_eq!(ps[i].mul(&ps[j]).max_diff(&SparseMatrix::zeros(256)), 0.0);
                }
            }
        }
    }

    #[test]
    fn numeric_d_plus_matches_table() {
        for n in 1..=2 {
            let rows = dimension_table(n).unwrap();
            for row in rows {
                let v = numeric_d_plus(row.lambda, n).unwrap();
                assert!((v - row.d_plus as f64).abs() < 1e-9, "{} {v}", row.lambda);
            }
        }
    }

    #[test]
    fn character_closed_form_vs_numeric() {
        let id = F2Matrix::identity(2);
        assert_eq!(symplectic_character(&id, 4).unwrap(), 16.0);
        let tv = F2Matrix::from_dense(&[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(symplectic_character(&tv, 4).unwrap(), -2.0);
        assert!(symplectic_character(&tv, 6).is_err());
        for f in enumerate_sp(1).unwrap() {
            let u = lift_symplectic(&f).unwrap();
            for k in [4, 8] {
                let num = code_trace(&u, k).unwrap();
                let want = symplectic_character(&f, k).unwrap();
                assert!((num.re - want).abs() < 1e-9 && num.im.abs() < 1e-9, "{k} {num} {want}");
            }
        }
    }

    #[test]
    fn code_trace_equals_pauli_trace_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_clifford(2, &mut rng);
        let direct = code_trace(&u, 4).unwrap();
        let mut s = Complex64::new(0.0, 0.0);
        for a in F2Vector::all(2) {
            s += (u.matrix() * pauli_matrix(&PauliLabel::bare(a))).trace().powu(4);
        }
        assert!((direct - s / 16.0).norm() < 1e-9);
    }

    #[test]
    fn multiplicity_sums() {
        let sp1 = sp_elements(1).unwrap();
        assert_eq!(multiplicity_sum(&sp1, 4, true).unwrap(), Rational::from_integer(5));
        let sp2 = sp_elements(2).unwrap();
        assert_eq!(multiplicity_sum(&sp2, 4, true).unwrap(), Rational::from_integer(6));
        let id = vec![F2Matrix::identity(2)];
        assert_eq!(multiplicity_sum(&id, 4, true).unwrap(), Rational::from_integer(256));
        let tv = F2Matrix::from_dense(&[&[1, 1], &[0, 1]]).unwrap();
        let not_group = vec![F2Matrix::identity(1), F2Matrix::j(1).mul(&tv).unwrap()];
        assert!(matches!(multiplicity_sum(&not_group, 4, true), Err(Error::NotAGroup)));
        assert!(matches!(multiplicity_sum(&sp1, 5, false), Err(Error::InvalidDegree(5))));
    }

    #[test]
    fn frame_potentials_small() {
        assert_eq!(clifford_frame_potential(1, 4).unwrap(), Rational::from_integer(15));
        assert_eq!(clifford_frame_potential(2, 4).unwrap(), Rational::from_integer(29));
        assert_eq!(sp_multiplicity_sum(1, 4).unwrap(), Rational::from_integer(5));
        assert_eq!(sp_multiplicity_sum(2, 4).unwrap(), Rational::from_integer(6));
        // A unitary 3-design: Φ_t equals the U(d) value t! for t ≤ d... at t = 1, 2, 3.
        for n in 1..=2 {
            assert_eq!(clifford_frame_potential(n, 1).unwrap(), Rational::from_integer(1));
            assert_eq!(clifford_frame_potential(n, 2).unwrap(), Rational::from_integer(2));
        }
        assert_eq!(clifford_frame_potential(2, 3).unwrap(), Rational::from_integer(6));
        assert!(clifford_frame_potential(4, 4).is_err());
    }

    #[test]
    fn histogram_n1() {
        assert_eq!(fixed_dim_histogram(1).unwrap(), &[2, 3, 1]);
    }

    #[test]
    fn commutes_with_permutations_and_cliffords() {
        let n = 2;
        let p = stab_projector(n, 4).unwrap();
        for s in permutations(4) {
            let u = factor_permutation(&s, n);
            assert!(p.mul(&u).max_diff(&u.mul(&p)) < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let v = StateVector::random(4 * n, &mut rng);
        for _ in 0..10 {
            let u = random_clifford(n, &mut rng);
            let a = p.mul_vec(&apply_tensor_power(&u, 4, v.amplitudes()));
            let b = apply_tensor_power(&u, 4, &p.mul_vec(v.amplitudes()));
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-10));
        }
    }

    #[test]
    fn vec_basis_orthogonal_and_in_code() {
        for n in 1..=2 {
            let d = 1usize << n;
            let basis = vec_pauli_basis(n).unwrap();
            let p = stab_projector(n, 4).unwrap();
            let dim = p.dim();
            for (i, (_, v)) in basis.iter().enumerate() {
                let dv = sparse_to_dense(v, dim);
                let norm: f64 = dv.iter().map(|a| a.norm_sqr()).sum();
                assert!((norm - (d * d) as f64).abs() < 1e-12);
                let pv = p.mul_vec(&dv);
                assert!(pv.iter().zip(&dv).all(|(a, b)| (a - b).norm() < 1e-12));
                for (_, w) in &basis[i + 1..] {
                    let dw = sparse_to_dense(w, dim);
                    let ip: Complex64 = dw.iter().zip(&dv).map(|(a, b)| a.conj() * b).sum();
                    assert!(ip.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn isotropic_states_n1() {
        let states = isotropic_orbit_states(1).unwrap();
        assert_eq!(states.len(), 3);
        for (i, (_, a)) in states.iter().enumerate() {
            for (_, b) in &states[i + 1..] {
                assert!((a.overlap(b) - 0.25).abs() < 1e-12);
            }
        }
        let mz = IsotropicSubspace::z_type(1);
        let (_, psi) = states.iter().find(|(m, _)| *m == mz).unwrap();
        let s = 0.5f64.sqrt();
        assert!((psi.amplitudes()[0].norm() - s).abs() < 1e-12);
        assert!((psi.amplitudes()[15].norm() - s).abs() < 1e-12);
    }

    #[test]
    fn isotropic_states_form_tight_frame() {
        for (n, count) in [(1usize, 3.0), (2, 15.0)] {
            let states = isotropic_orbit_states(n).unwrap();
            assert_eq!(states.len() as f64, count);
            let dplus = dimension_table(n).unwrap()[0].d_plus as f64;
            let pplus = stab_projector(n, 4)
                .unwrap()
                .mul(&young_projector(Partition4::Four, n).unwrap());
            let dim = pplus.dim();
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let v = StateVector::random(4 * n, &mut rng);
            let mut frame = vec![Complex64::new(0.0, 0.0); dim];
            for (_, psi) in &states {
                let c: Complex64 = psi
                    .amplitudes()
                    .iter()
                    .zip(v.amplitudes())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for (f, a) in frame.iter_mut().zip(psi.amplitudes()) {
                    *f += a * c;
                }
            }
            let want = pplus.mul_vec(v.amplitudes());
            for (f, w) in frame.iter().zip(&want) {
                assert!((f - w * (count / dplus)).norm() < 1e-10);
            }
        }
    }
}

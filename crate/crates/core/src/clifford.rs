//! Clifford unitaries: generators, symplectic actions, lifts, sampling and
//! projective orbits.
//!
//! A [`GateWord`] `G_1 G_2 … G_k` denotes the matrix product in written
//! order, so the rightmost gate acts first on a state.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::f2lin::{enumerate_sp, form_bits, random_symplectic, F2Matrix, F2Vector};
use crate::pauli::{i_pow, label_masks, pauli_matrix, pauli_product, PauliLabel};
use crate::state::StateVector;

/// Largest `n` for [`projective_orbit`] and [`projective_clifford_group`].
pub const MAX_ORBIT_N: usize = 2;

const ACTION_TOL: f64 = 1e-8;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// A single generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    S(usize),
    Cnot(usize, usize),
}

impl Gate {
    fn max_qubit(&self) -> usize {
        match *self {
            Gate::H(q) | Gate::S(q) => q,
            Gate::Cnot(c, t) => c.max(t),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H{q}"),
            Gate::S(q) => write!(f, "S{q}"),
            Gate::Cnot(c, t) => write!(f, "CX{c},{t}"),
        }
    }
}

/// A sequence of generators, e.g. `H0 S1 CX0,2`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GateWord {
    pub gates: Vec<Gate>,
}

impl GateWord {
    pub fn new(gates: Vec<Gate>) -> Self {
        Self { gates }
    }

    /// Parses whitespace-separated tokens `H<q>`, `S<q>`, `CX<c>,<t>`
    /// (`CNOT<c>,<t>` is accepted too).
    pub fn parse(text: &str) -> Result<Self> {
        let mut gates = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split_whitespace() {
                let err = |msg: String| Error::Parse {
                    line: lineno + 1,
                    msg,
                };
                let num = |s: &str| -> Result<usize> {
                    s.parse::<usize>()
                        .map_err(|_| err(format!("bad qubit index in `{tok}`")))
                };
                let upper = tok.to_ascii_uppercase();
                let gate = if let Some(rest) = upper
                    .strip_prefix("CNOT")
                    .or_else(|| upper.strip_prefix("CX"))
                {
                    let (c, t) = rest
                        .split_once(',')
                        .ok_or_else(|| err(format!("`{tok}` needs two indices")))?;
                    let (c, t) = (num(c)?, num(t)?);
                    if c == t {
                        return Err(err(format!("`{tok}` uses the same qubit twice")));
                    }
                    Gate::Cnot(c, t)
                } else if let Some(rest) = upper.strip_prefix('H') {
                    Gate::H(num(rest)?)
                } else if let Some(rest) = upper.strip_prefix('S') {
                    Gate::S(num(rest)?)
                } else {
                    return Err(err(format!("unknown gate `{tok}`")));
                };
                gates.push(gate);
            }
        }
        Ok(Self { gates })
    }
}

impl fmt::Display for GateWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self.gates.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", toks.join(" "))
    }
}

/// Symplectic action `U W_a U† = (−1)^{f(a)} W_{Fa}`; `signs[i]` is `f(e_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordAction {
    pub f: F2Matrix,
    pub signs: Vec<bool>,
}

/// A Clifford unitary with its cached symplectic action.
#[derive(Clone, Debug)]
pub struct CliffordElement {
    matrix: DMatrix<Complex64>,
    n: usize,
    action: Option<CliffordAction>,
}

impl CliffordElement {
    /// Wraps a matrix and computes its action; fails if `U` is not Clifford.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = matrix.nrows();
        if d != matrix.ncols() || d == 0 || !d.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "{}×{} is not a qubit operator",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let mut u = Self {
            n: d.trailing_zeros() as usize,
            matrix,
            action: None,
        };
        u.action = Some(extract_action(&u)?);
        Ok(u)
    }

    pub fn identity(n: usize) -> Self {
        let d = 1usize << n;
        Self {
            matrix: DMatrix::identity(d, d),
            n,
            action: Some(CliffordAction {
                f: F2Matrix::identity(n),
                signs: vec![false; 2 * n],
            }),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn action(&self) -> Option<&CliffordAction> {
        self.action.as_ref()
    }

    /// The symplectic matrix `F`.
    pub fn symplectic(&self) -> &F2Matrix {
        &self.action.as_ref().expect("action cached").f
    }

    /// `U V`, with the action composed as `F_U F_V`.
    pub fn compose(&self, other: &CliffordElement) -> Result<CliffordElement> {
        if self.n != other.n {
            return Err(Error::Dimension("Clifford elements of different size".into()));
        }
        CliffordElement::from_matrix(&self.matrix * &other.matrix)
    }

    /// `U ψ`.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "{}-qubit unitary on a {}-qubit state",
                self.n,
                psi.n()
            )));
        }
        StateVector::new(apply_dense(&self.matrix, psi.amplitudes()))
    }

    /// `U (iʲ W_a) U†` as a label, using the cached action.
    pub fn conjugate(&self, p: &PauliLabel) -> Result<PauliLabel> {
        let act = self
            .action
            .as_ref()
            .ok_or_else(|| Error::Internal("action not cached".into()))?;
        if p.n() != self.n {
            return Err(Error::Dimension("label size mismatch".into()));
        }
        // W_a = i^{-c} ∏ W_{e_i}; conjugate factor by factor.
        let mut before = PauliLabel::identity(self.n);
        let mut after = PauliLabel::identity(self.n);
        for i in 0..2 * self.n {
            if p.a.get(i) {
                let e = PauliLabel::bare(F2Vector::unit(self.n, i));
                before = pauli_product(&before, &e)?;
                let img = PauliLabel::new(
                    F2Vector::from_bits(self.n, act.f.column(i))?,
                    if act.signs[i] { 2 } else { 0 },
                );
                after = pauli_product(&after, &img)?;
            }
        }
        let phase = (after.phase_exp + 4 - before.phase_exp + p.phase_exp) & 3;
        Ok(PauliLabel::new(after.a, phase))
    }

    /// CSV of `(row, col, re, im)` for every entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,re,im\n");
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                let z = self.matrix[(r, c)];
                out.push_str(&format!("{r},{c},{:.17e},{:.17e}\n", z.re, z.im));
            }
        }
        out
    }
}

pub(crate) fn apply_dense(m: &DMatrix<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    let d = v.len();
    let mut out = vec![zero(); d];
    for (c, &a) in v.iter().enumerate() {
        if a == zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(m.column(c).iter()) {
            *o += x * a;
        }
    }
    out
}

fn check_qubits(n: usize, gate: &Gate) -> Result<()> {
    if gate.max_qubit() >= n {
        return Err(Error::InvalidArgument(format!(
            "gate {gate} addresses a qubit outside 0..{n}"
        )));
    }
    Ok(())
}

/// `d × d` matrix of a single generator. `H = ((1+i)/2)[[1,1],[1,−1]]`,
/// `S = diag(1, −i)`, `CNOT` the usual permutation.
pub fn generator_matrix(gate: &Gate, n: usize) -> Result<CliffordElement> {
    check_qubits(n, gate)?;
    let d = 1usize << n;
    let mut m = DMatrix::from_element(d, d, zero());
    let half = Complex64::new(0.5, 0.5);
    match *gate {
        Gate::H(q) => {
            let bit = 1usize << (n - 1 - q);
            for y in 0..d {
                let lo = y & !bit;
                let hi = y | bit;
                let sign = if y & bit != 0 { -half } else { half };
                m[(lo, y)] = half;
                m[(hi, y)] = sign;
            }
        }
        Gate::S(q) => {
            let bit = 1usize << (n - 1 - q);
            for y in 0..d {
                m[(y, y)] = if y & bit != 0 {
                    Complex64::new(0.0, -1.0)
                } else {
                    Complex64::new(1.0, 0.0)
                };
            }
        }
        Gate::Cnot(c, t) => {
            let cb = 1usize << (n - 1 - c);
            let tb = 1usize << (n - 1 - t);
            for y in 0..d {
                let out = if y & cb != 0 { y ^ tb } else { y };
                m[(out, y)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    CliffordElement::from_matrix(m)
}

/// `G_1 G_2 ⋯ G_k` for the word `G_1 … G_k`.
pub fn compose_word(word: &GateWord, n: usize) -> Result<CliffordElement> {
    let d = 1usize << n;
    let mut acc = DMatrix::<Complex64>::identity(d, d);
    for g in &word.gates {
        let gm = generator_matrix(g, n)?;
        acc = &acc * gm.matrix();
    }
    CliffordElement::from_matrix(acc)
}

/// Reads off `F` and the signs by conjugating each basis Pauli.
pub fn extract_action(u: &CliffordElement) -> Result<CliffordAction> {
    let n = u.n;
    let d = u.dim();
    let m = &u.matrix;
    let udag = m.adjoint();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let tol = ACTION_TOL * scale * scale;
    let mut cols = Vec::with_capacity(2 * n);
    let mut signs = Vec::with_capacity(2 * n);
    for i in 0..2 * n {
        let w = PauliLabel::bare(F2Vector::unit(n, i));
        let (z, x) = label_masks(w.a.bits(), n);
        // W U† by permuting and phasing the rows of U†.
        let mut wud = DMatrix::from_element(d, d, zero());
        for y in 0..d {
            let ph = i_pow((z & x).count_ones() + 2 * ((z & y).count_ones() & 1));
            for c in 0..d {
                wud[(y ^ x, c)] = udag[(y, c)] * ph;
            }
        }
        let conj = m * wud;
        let (b, sign) = identify_pauli(&conj, n, tol).ok_or_else(|| {
            Error::NotClifford(format!("conjugate of basis Pauli {i} is not ±W_b"))
        })?;
        cols.push(b);
        signs.push(sign);
    }
    let f = F2Matrix::from_columns(&cols)?;
    if !f.is_symplectic() {
        return Err(Error::NotClifford("induced map is not symplectic".into()));
    }
    Ok(CliffordAction { f, signs })
}

/// If `m = ±W_b` within `tol` (entrywise), returns `(b, sign is −)`.
fn identify_pauli(m: &DMatrix<Complex64>, n: usize, tol: f64) -> Option<(u64, bool)> {
    let d = 1usize << n;
    let x = (0..d).max_by(|&a, &b| m[(a, 0)].norm().total_cmp(&m[(b, 0)].norm()))?;
    let lead = m[(x, 0)];
    if (lead.norm() - 1.0).abs() > tol.sqrt() {
        return None;
    }
    let mut z = 0usize;
    for k in 0..n {
        let y = 1usize << k;
        let r = m[(y ^ x, y)] / lead;
        if r.re < 0.0 {
            z |= y;
        }
    }
    let base = i_pow((z & x).count_ones());
    let s = lead / base;
    let neg = if (s - Complex64::new(1.0, 0.0)).norm() < tol.sqrt() {
        false
    } else if (s + Complex64::new(1.0, 0.0)).norm() < tol.sqrt() {
        true
    } else {
        return None;
    };
    let b = crate::pauli::masks_label(z, x, n);
    let want = pauli_matrix(&PauliLabel::new(
        F2Vector::from_bits(n, b).ok()?,
        if neg { 2 } else { 0 },
    ));
    let err = (m - want).iter().map(|v| v.norm_sqr()).sum::<f64>();
    if err > tol * tol * (d * d) as f64 {
        return None;
    }
    Some((b, neg))
}

/// `((1+i)/2)(1 + i W_h)`, which induces `x ↦ x + ⟨x,h⟩h`.
pub fn transvection_lift(h: &F2Vector) -> DMatrix<Complex64> {
    let n = h.n();
    let d = 1usize << n;
    let w = pauli_matrix(&PauliLabel::bare(*h));
    let c = Complex64::new(0.5, 0.5);
    (DMatrix::<Complex64>::identity(d, d) + w * Complex64::new(0.0, 1.0)) * c
}

/// Transvection vectors `h_1, …, h_k` with `F = T_{h_1} ⋯ T_{h_k}`.
pub fn transvection_decomposition(f: &F2Matrix) -> Result<Vec<u64>> {
    if !f.is_symplectic() {
        return Err(Error::NotSymplectic);
    }
    let n = f.n();
    let dim = 2 * n;
    let transvect = |h: u64, v: u64| if form_bits(v, h) { v ^ h } else { v };
    // Reduce T_m ⋯ T_1 F to the identity one basis vector at a time.
    let mut cols: Vec<u64> = (0..dim).map(|j| f.column(j)).collect();
    let mut hs: Vec<u64> = Vec::new();
    let apply = |h: u64, cols: &mut Vec<u64>, hs: &mut Vec<u64>| {
        for c in cols.iter_mut() {
            *c = transvect(h, *c);
        }
        hs.push(h);
    };
    for j in 0..dim {
        let t = 1u64 << j;
        let x = cols[j];
        if x == t {
            continue;
        }
        if form_bits(x, t) {
            apply(x ^ t, &mut cols, &mut hs);
        } else {
            let z = (1..1u64 << dim)
                .find(|&z| {
                    form_bits(x, z)
                        && form_bits(z, t)
                        && (0..j).all(|i| form_bits(1u64 << i, z) == form_bits(1u64 << i, t))
                })
                .ok_or_else(|| Error::Internal("no intermediate transvection vector".into()))?;
            apply(x ^ z, &mut cols, &mut hs);
            apply(z ^ t, &mut cols, &mut hs);
        }
        debug_assert_eq!(cols[j], t);
    }
    debug_assert!(cols.iter().enumerate().all(|(j, &c)| c == 1u64 << j));
    // T_m ⋯ T_1 F = 1 and each T is an involution, so F = T_1 ⋯ T_m.
    Ok(hs)
}

/// Some Clifford unitary with symplectic action `F`.
///
/// The representative is the product of transvection lifts; its entries lie
/// in `Q[i]` with power-of-two denominators.
pub fn lift_symplectic(f: &F2Matrix) -> Result<CliffordElement> {
    let n = f.n();
    let d = 1usize << n;
    let hs = transvection_decomposition(f)?;
    let mut acc = DMatrix::<Complex64>::identity(d, d);
    for h in hs {
        acc = &acc * transvection_lift(&F2Vector::from_bits(n, h)?);
    }
    let u = CliffordElement::from_matrix(acc)?;
    if u.symplectic() != f {
        return Err(Error::Internal("lift has the wrong action".into()));
    }
    Ok(u)
}

/// `U_F W_a` for uniform `F` and `a`: uniform over the projective Clifford
/// group.
pub fn random_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordElement {
    let f = random_symplectic(n, rng);
    let a = F2Vector::from_bits(n, rng.random_range(0..1u64 << (2 * n))).expect("in range");
    let lift = lift_symplectic(&f).expect("symplectic by construction");
    with_pauli(&lift, &a)
}

/// `U W_a`.
pub fn with_pauli(u: &CliffordElement, a: &F2Vector) -> CliffordElement {
    let w = pauli_matrix(&PauliLabel::bare(*a));
    let m = u.matrix() * w;
    let act = u.action.as_ref().map(|act| {
        // U W_a W_{e_i} W_a U† = (−1)^{⟨a, e_i⟩} U W_{e_i} U†.
        let signs = (0..2 * u.n)
            .map(|i| act.signs[i] ^ form_bits(a.bits(), 1u64 << i))
            .collect();
        CliffordAction {
            f: act.f.clone(),
            signs,
        }
    });
    match act {
        Some(action) => CliffordElement {
            matrix: m,
            n: u.n,
            action: Some(action),
        },
        None => CliffordElement::from_matrix(m).expect("Clifford times Pauli"),
    }
}

/// Result of [`clifford_trace_check`].
#[derive(Clone, Debug)]
pub struct TraceReport {
    pub trace: Complex64,
    pub kernel_dim: usize,
    /// `|tr U| ≤ 1e−8`; the identity holds vacuously.
    pub traceless: bool,
    pub residual: f64,
    pub pass: bool,
}

/// Checks `[tr U]⁴ = (−4)^{dim ker(F−1)}` whenever `tr U ≠ 0`.
pub fn clifford_trace_check(u: &CliffordElement) -> Result<TraceReport> {
    let f = &u
        .action
        .as_ref()
        .ok_or_else(|| Error::Internal("action not cached".into()))?
        .f;
    let trace = u.matrix.trace();
    let kernel_dim = f.fixed_space_dim();
    if trace.norm() <= 1e-8 {
        return Ok(TraceReport {
            trace,
            kernel_dim,
            traceless: true,
            residual: 0.0,
            pass: true,
        });
    }
    let want = (-4.0f64).powi(kernel_dim as i32);
    let residual = (trace.powu(4) - Complex64::new(want, 0.0)).norm();
    Ok(TraceReport {
        trace,
        kernel_dim,
        traceless: false,
        residual,
        pass: residual < 1e-6 * 4f64.powi(kernel_dim as i32),
    })
}

/// Every element of the projective Clifford group `{U_F W_a}` for `n ≤ 2`:
/// 24 elements at `n = 1`, 11 520 at `n = 2`.
pub fn projective_clifford_group(n: usize) -> Result<&'static [CliffordElement]> {
    static G1: OnceLock<Vec<CliffordElement>> = OnceLock::new();
    static G2: OnceLock<Vec<CliffordElement>> = OnceLock::new();
    let cell = match n {
        1 => &G1,
        2 => &G2,
        _ => {
            return Err(Error::Capacity(format!(
                "projective Clifford group is enumerated only for 1 ≤ n ≤ {MAX_ORBIT_N}"
            )))
        }
    };
    Ok(cell.get_or_init(|| {
        let fs: Vec<F2Matrix> = enumerate_sp(n).expect("n ≤ 2").collect();
        fs.par_iter()
            .flat_map_iter(|f| {
                let lift = lift_symplectic(f).expect("enumerated elements are symplectic");
                F2Vector::all(n)
                    .map(|a| with_pauli(&lift, &a))
                    .collect::<Vec<_>>()
            })
            .collect()
    }))
}

fn projector_fingerprint(psi: &StateVector) -> Vec<(i64, i64)> {
    let a = psi.amplitudes();
    let mut key = Vec::with_capacity(a.len() * a.len());
    for x in a {
        for y in a {
            let v = x * y.conj();
            key.push(((v.re * 1e9).round() as i64, (v.im * 1e9).round() as i64));
        }
    }
    key
}

/// Distinct states (up to phase) of the Clifford orbit of `ψ`.
pub fn projective_orbit(psi: &StateVector, n: usize) -> Result<Vec<StateVector>> {
    if psi.n() != n {
        return Err(Error::Dimension(format!("state is on {} qubits, not {n}", psi.n())));
    }
    let group = projective_clifford_group(n)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for u in group {
        let phi = u.apply(psi)?;
        if seen.insert(projector_fingerprint(&phi)) {
            out.push(phi);
        }
    }
    Ok(out)
}

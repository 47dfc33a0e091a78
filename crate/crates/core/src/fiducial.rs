//! Named fiducials and constructions of 4-design fiducials: tensor completion
//! by a single qubit, bisection between states of opposite deviation,
//! weighted two-orbit designs and eigenstates of Singer cycles.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clifford::{lift_symplectic, projective_orbit, CliffordElement};
use crate::designs::{
    design_report, frame_potential, orbit_frame_potential, sym_dim, DesignReport, OrbitMode,
};
use crate::error::{Error, Result};
use crate::f2lin::{
    enumerate_sp, random_symplectic, symplectic_basis_for, F2Matrix, F2Vector, IsotropicSubspace,
};
use crate::pauli::{characteristic_function, ell4_norm4};
use crate::state::{StateVector, NORM_TOL};

/// Seed used wherever a construction needs a deterministic random choice.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Largest number of attempts in the Singer-cycle search.
const SINGER_ATTEMPTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let r = x * x + y * y + z * z;
        if (r - 1.0).abs() > 1e-12 {
            return Err(Error::Normalization(r));
        }
        Ok(BlochVector { x, y, z })
    }

    /// `x⁴ + y⁴ + z⁴`.
    pub fn quartic(&self) -> f64 {
        self.x.powi(4) + self.y.powi(4) + self.z.powi(4)
    }

    pub fn to_state(&self) -> StateVector {
        StateVector::from_bloch(self.x, self.y, self.z).expect("unit Bloch vector")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FiducialName {
    /// Bloch vector `(1,1,1)/√3`.
    PsiT,
    /// The three-qubit Hoggar SIC fiducial.
    Hoggar,
    Bloch(f64, f64, f64),
}

impl FromStr for FiducialName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "psi_t" | "t" | "magic" => return Ok(FiducialName::PsiT),
            "hoggar" | "psi_hog" => return Ok(FiducialName::Hoggar),
            _ => {}
        }
        let inner = t
            .strip_prefix("bloch(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix("bloch:"))
            .ok_or_else(|| Error::UnknownName(s.to_string()))?;
        let xs: Vec<f64> = inner
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::UnknownName(s.to_string()))?;
        match xs.as_slice() {
            [x, y, z] => Ok(FiducialName::Bloch(*x, *y, *z)),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

impl fmt::Display for FiducialName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiducialName::PsiT => write!(f, "psi_T"),
            FiducialName::Hoggar => write!(f, "hoggar"),
            FiducialName::Bloch(x, y, z) => write!(f, "bloch({x},{y},{z})"),
        }
    }
}

pub fn psi_t() -> StateVector {
    let r = 1.0 / 3f64.sqrt();
    StateVector::from_bloch(r, r, r).expect("unit")
}

pub fn hoggar() -> StateVector {
    let c = |re: f64, im: f64| Complex64::new(re, im) / 6f64.sqrt();
    StateVector::new(vec![
        c(1.0, 1.0),
        c(0.0, 0.0),
        c(-1.0, 0.0),
        c(1.0, 0.0),
        c(0.0, -1.0),
        c(-1.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
    ])
    .expect("normalized")
}

pub fn named_fiducial(name: FiducialName) -> Result<StateVector> {
    match name {
        FiducialName::PsiT => Ok(psi_t()),
        FiducialName::Hoggar => Ok(hoggar()),
        FiducialName::Bloch(x, y, z) => Ok(BlochVector::new(x, y, z)?.to_state()),
    }
}

/// `(x, y, z)` with `y = z`, `x ≥ y` and `x⁴ + y⁴ + z⁴ = c − 1`.
pub fn solve_bloch_quartic(c: f64) -> Result<BlochVector> {
    let q = c - 1.0;
    const SLACK: f64 = 1e-12;
    if !(1.0 / 3.0 - SLACK..=1.0 + SLACK).contains(&q) {
        return Err(Error::Infeasible(format!(
            "x⁴+y⁴+z⁴ = {q} has no solution on the Bloch sphere"
        )));
    }
    let disc = (6.0 * q - 2.0).max(0.0);
    let s = ((1.0 + disc.sqrt()) / 3.0).min(1.0);
    let x = s.sqrt();
    let y = ((1.0 - s) / 2.0).max(0.0).sqrt();
    BlochVector::new(x, y, y)
}

/// `‖Ξ(ψ)‖₄⁴`.
pub fn ell4_of(psi: &StateVector) -> Result<f64> {
    Ok(ell4_norm4(&characteristic_function(psi)?))
}

/// `ψ_prev ⊗ ψ(x,y,z)`, completing an `(n−1)`-qubit state to an `n`-qubit
/// 4-design fiducial.
pub fn algorithm1(prev: &StateVector, n: usize) -> Result<StateVector> {
    if n < 2 || prev.n() + 1 != n {
        return Err(Error::Dimension(format!(
            "need an {}-qubit state, got {} qubits",
            n.saturating_sub(1),
            prev.n()
        )));
    }
    prev.check_normalized(NORM_TOL)?;
    let d = (1u64 << n) as f64;
    let ell = ell4_of(prev)?;
    let (lo, hi) = (2.0 * d / (d + 2.0), 3.0 * d / (d + 3.0));
    if ell < lo - 1e-12 || ell > hi + 1e-12 {
        return Err(Error::Infeasible(format!(
            "‖Ξ‖₄⁴ = {ell} outside [{lo}, {hi}]"
        )));
    }
    let c = 4.0 * d / ((d + 3.0) * ell);
    Ok(prev.kron(&solve_bloch_quartic(c)?.to_state()))
}

/// The single-qubit target `x⁴+y⁴+z⁴` for [`algorithm1`] on `prev`.
pub fn algorithm1_target(prev: &StateVector) -> Result<f64> {
    let d = (1u64 << (prev.n() + 1)) as f64;
    Ok(4.0 * d / ((d + 3.0) * ell4_of(prev)?) - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BisectionMode {
    /// `ψ₃ ∝ ψ₁ + ψ₂`.
    Midpoint,
    /// `ψ₃ ∝ ε(ψ₁)ψ₁ − ε(ψ₂)ψ₂` with the current deviations.
    Secant,
}

#[derive(Clone, Debug, Serialize)]
pub struct Algorithm2Outcome {
    #[serde(skip)]
    pub state: StateVector,
    pub epsilon: f64,
    pub iterations: usize,
}

fn epsilon(psi: &StateVector) -> Result<f64> {
    Ok(design_report(psi)?.epsilon)
}

/// Bisects between `ψ₁` with `ε > 0` and `ψ₂` with `ε < 0` until `|ε| ≤ tol`.
pub fn algorithm2(
    psi1: &StateVector,
    psi2: &StateVector,
    tol: f64,
    max_iter: usize,
    mode: BisectionMode,
) -> Result<Algorithm2Outcome> {
    if psi1.dim() != psi2.dim() {
        return Err(Error::Dimension(format!("{} vs {}", psi1.dim(), psi2.dim())));
    }
    let mut e1 = epsilon(psi1)?;
    let mut e2 = epsilon(psi2)?;
    for (psi, e) in [(psi2, e2), (psi1, e1)] {
        if e.abs() <= tol {
            return Ok(Algorithm2Outcome {
                state: psi.clone(),
                epsilon: e,
                iterations: 0,
            });
        }
    }
    if !(e1 > 0.0 && e2 < 0.0) {
        return Err(Error::Infeasible(format!(
            "need ε(ψ₁) > 0 > ε(ψ₂), got {e1} and {e2}"
        )));
    }
    let mut a = psi1.clone();
    let mut b = psi2.clone();
    for iter in 1..=max_iter {
        let ip = a.inner(&b);
        if ip.norm() < 1e-12 {
            return Err(Error::InvalidArgument("inputs are orthogonal".into()));
        }
        b = b.scale(ip.conj() / ip.norm());
        let (wa, wb) = match mode {
            BisectionMode::Midpoint => (0.5, 0.5),
            BisectionMode::Secant => (e1 / (e1 - e2), -e2 / (e1 - e2)),
        };
        let amps: Vec<Complex64> = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| x * wa + y * wb)
            .collect();
        let c = StateVector::new(amps)?.normalized()?;
        let e = epsilon(&c)?;
        if e.abs() <= tol {
            return Ok(Algorithm2Outcome {
                state: c,
                epsilon: e,
                iterations: iter,
            });
        }
        if e > 0.0 {
            a = c;
            e1 = e;
        } else {
            b = c;
            e2 = e;
        }
    }
    Err(Error::Convergence(format!(
        "|ε| > {tol} after {max_iter} iterations (bracket {e1}, {e2})"
    )))
}

/// `(|0…0⟩, ψ⁻)` where `ψ⁻` is a Singer eigenvector on `n−1` qubits times
/// `ψ_T` for `n ∈ {2, 3, 5}`, and `ψ_T^{⊗n}` otherwise when that has `ε < 0`.
pub fn algorithm2_default_seeds(n: usize) -> Result<(StateVector, StateVector)> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let zero = StateVector::basis(n, 0);
    let neg = match n {
        1 => psi_t(),
        2 | 3 | 5 => singer_eigenvectors(&singer_unitary(n - 1)?)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Internal("no Singer eigenvector".into()))?
            .kron(&psi_t()),
        _ => (1..n).fold(psi_t(), |acc, _| acc.kron(&psi_t())),
    };
    if epsilon(&neg)? >= 0.0 {
        return Err(Error::Infeasible(format!("no negative-ε seed known for n = {n}")));
    }
    Ok((zero, neg))
}

#[derive(Clone, Debug)]
pub struct WeightedDesign {
    pub states: Vec<StateVector>,
    pub weights: Vec<f64>,
    pub orbit_sizes: [usize; 2],
}

impl WeightedDesign {
    pub fn frame_potential(&self, t: u32) -> Result<f64> {
        frame_potential(&self.states, t, Some(&self.weights))
    }
}

/// The union of the two Clifford orbits, weighted so that the average
/// deviation vanishes.
pub fn weighted_two_orbit(psi1: &StateVector, psi2: &StateVector) -> Result<WeightedDesign> {
    let n = psi1.n();
    if psi2.n() != n {
        return Err(Error::Dimension(format!("{} vs {} qubits", n, psi2.n())));
    }
    let e1 = epsilon(psi1)?;
    let e2 = epsilon(psi2)?;
    if !(e1 > 0.0 && e2 < 0.0) {
        return Err(Error::Infeasible(format!(
            "need ε(ψ₁) > 0 > ε(ψ₂), got {e1} and {e2}"
        )));
    }
    let o1 = projective_orbit(psi1, n)?;
    let o2 = projective_orbit(psi2, n)?;
    let s = e1.abs() + e2.abs();
    let w1 = e2.abs() / (o1.len() as f64 * s);
    let w2 = e1.abs() / (o2.len() as f64 * s);
    let weights = std::iter::repeat_n(w1, o1.len())
        .chain(std::iter::repeat_n(w2, o2.len()))
        .collect();
    let orbit_sizes = [o1.len(), o2.len()];
    let mut states = o1;
    states.extend(o2);
    Ok(WeightedDesign {
        states,
        weights,
        orbit_sizes,
    })
}

#[derive(Clone, Debug)]
pub struct SingerUnitary {
    pub element: CliffordElement,
    /// `d + 1`.
    pub order: u64,
    /// `e^{iφ}` with `(e^{−iφ}U)^{d+1} = 1`.
    pub phase: Complex64,
}

impl SingerUnitary {
    pub fn n(&self) -> usize {
        self.element.n()
    }
}

fn is_singer_cycle(f: &F2Matrix, m: u64) -> bool {
    if !f.pow(m).is_identity() {
        return false;
    }
    let mut p = f.clone();
    for _ in 1..m {
        if p.fixed_space_dim() != 0 {
            return false;
        }
        p = p.mul(f).expect("same size");
    }
    true
}

/// The maximal isotropic subspace `K·v`, where `K ≅ F_d` is the subfield
/// `{X ∈ F₂[F] : X^d = X}` and `v = e_1`. Its images under `F, …, F^d` are
/// pairwise complementary.
pub fn singer_spread_element(f: &F2Matrix) -> Result<IsotropicSubspace> {
    let n = f.n();
    let dim = 2 * n;
    let d = 1u64 << n;
    let mut powers = vec![F2Matrix::identity(n)];
    for _ in 1..dim {
        powers.push(powers.last().expect("nonempty").mul(f)?);
    }
    let e = F2Vector::unit(n, 0);
    let mut vectors = Vec::new();
    for p in 1..1u64 << dim {
        let mut rows = vec![0u64; dim];
        for (i, m) in powers.iter().enumerate() {
            if (p >> i) & 1 == 1 {
                rows.iter_mut().zip(m.rows()).for_each(|(r, x)| *r ^= x);
            }
        }
        let x = F2Matrix::from_rows(rows)?;
        if x.pow(d) == x {
            vectors.push(x.mul_vec(&e)?);
        }
    }
    let l = IsotropicSubspace::span(n, &vectors)?;
    if !l.is_maximal() {
        return Err(Error::Internal("subfield orbit is not a Lagrangian".into()));
    }
    Ok(l)
}

fn mat_pow(m: &DMatrix<Complex64>, mut e: u64) -> DMatrix<Complex64> {
    let d = m.nrows();
    let mut acc = DMatrix::<Complex64>::identity(d, d);
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

/// A Clifford element of projective order `d+1` whose symplectic powers
/// `F, …, F^d` have no nonzero fixed vector.
pub fn singer_unitary(n: usize) -> Result<SingerUnitary> {
    if ![1, 2, 4, 8].contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "Singer unitaries are provided for n ∈ {{1, 2, 4, 8}}, got {n}"
        )));
    }
    let m = (1u64 << n) + 1;
    let f = if n <= 2 {
        enumerate_sp(n)?.find(|f| is_singer_cycle(f, m))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
        (0..SINGER_ATTEMPTS)
            .map(|_| random_symplectic(n, &mut rng))
            .find(|f| is_singer_cycle(f, m))
    }
    .ok_or_else(|| Error::Internal(format!("no Singer cycle found for n = {n}")))?;
    // Conjugate so that the powers cycle the Z-type Lagrangian through a spread.
    let g = symplectic_basis_for(&singer_spread_element(&f)?)?;
    let f = g.symplectic_inverse()?.mul(&f)?.mul(&g)?;
    let element = lift_symplectic(&f)?;
    let power = mat_pow(element.matrix(), m);
    let c = power[(0, 0)];
    let d = element.dim();
    let scalar_dev = (0..d)
        .flat_map(|r| (0..d).map(move |k| (r, k)))
        .map(|(r, k)| {
            let want = if r == k { c } else { Complex64::new(0.0, 0.0) };
            (power[(r, k)] - want).norm()
        })
        .fold(0.0, f64::max);
    if scalar_dev > 1e-9 || (c.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Internal(format!("U^{m} is not scalar ({scalar_dev})")));
    }
    let phase = Complex64::from_polar(1.0, c.arg() / m as f64);
    Ok(SingerUnitary {
        element,
        order: m,
        phase,
    })
}

/// The `d` eigenvectors of a Singer unitary, one per nonzero eigenspace.
pub fn singer_eigenvectors(s: &SingerUnitary) -> Result<Vec<StateVector>> {
    let d = s.element.dim();
    let m = s.order as usize;
    let v = s.element.matrix() * (s.phase.conj());
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let seed = StateVector::random(s.n(), &mut rng);
    let mut powers: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut cur = nalgebra::DVector::from_column_slice(seed.amplitudes());
    for _ in 0..m {
        powers.push(cur.as_slice().to_vec());
        cur = &v * cur;
    }
    let omega = |e: usize| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * e as f64 / m as f64);
    let mut out = Vec::with_capacity(d);
    for j in 0..m {
        let mut proj = vec![Complex64::new(0.0, 0.0); d];
        for (k, p) in powers.iter().enumerate() {
            let w = omega((j * k) % m) / m as f64;
            for (x, y) in proj.iter_mut().zip(p) {
                *x += w * y;
            }
        }
        let norm: f64 = proj.iter().map(|a| a.norm_sqr()).sum();
        if norm > 1e-10 {
            out.push(StateVector::new(proj)?.normalized()?);
        }
    }
    if out.len() != d {
        return Err(Error::Internal(format!(
            "spectrum is degenerate: {} eigenspaces for d = {d}",
            out.len()
        )));
    }
    Ok(out)
}

/// Largest deviation of `|⟨e|f⟩|²` from `1/d` over vectors of distinct bases
/// `U^j·{|y⟩}`, `j = 0..d`.
pub fn singer_mub_deviation(s: &SingerUnitary) -> f64 {
    let d = s.element.dim();
    let mut bases = vec![DMatrix::<Complex64>::identity(d, d)];
    for _ in 1..s.order {
        let next = s.element.matrix() * bases.last().expect("nonempty");
        bases.push(next);
    }
    let mut worst = 0.0f64;
    for i in 0..bases.len() {
        for j in i + 1..bases.len() {
            let g = bases[i].adjoint() * &bases[j];
            for z in g.iter() {
                worst = worst.max((z.norm_sqr() - 1.0 / d as f64).abs());
            }
        }
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingerRow {
    pub n: usize,
    /// `ε(ψ_n ⊗ ψ_T)`, averaged over the eigenvectors.
    pub epsilon: f64,
    /// Largest spread of `ε` across eigenvectors.
    pub spread: f64,
    /// `‖Ξ(ψ_n)‖₄⁴`.
    pub ell4: f64,
}

pub fn singer_epsilon_row(n: usize) -> Result<SingerRow> {
    let s = singer_unitary(n)?;
    let eigs = singer_eigenvectors(&s)?;
    let t = psi_t();
    let mut eps = Vec::with_capacity(eigs.len());
    let mut ells = Vec::with_capacity(eigs.len());
    for v in &eigs {
        ells.push(ell4_of(v)?);
        eps.push(epsilon(&v.kron(&t))?);
    }
    let lo = eps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > 1e-9 {
        return Err(Error::Internal(format!(
            "Singer eigenvectors disagree on ε: spread {}",
            hi - lo
        )));
    }
    Ok(SingerRow {
        n,
        epsilon: eps.iter().sum::<f64>() / eps.len() as f64,
        spread: hi - lo,
        ell4: ells.iter().sum::<f64>() / ells.len() as f64,
    })
}

pub fn singer_epsilon_table(ns: &[usize]) -> Result<Vec<SingerRow>> {
    ns.iter().map(|&n| singer_epsilon_row(n)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Conjecture5Report {
    pub n: usize,
    pub epsilon: f64,
    pub phi4: f64,
    pub phi5: f64,
    pub phi5_design: f64,
    pub phi5_deviation: f64,
    pub phi6: Option<f64>,
    pub phi7: Option<f64>,
}

/// Frame potentials of the exact orbit of a root of `ε`.
pub fn conjecture5_probe(psi: &StateVector) -> Result<Conjecture5Report> {
    let n = psi.n();
    let eps = epsilon(psi)?;
    if eps.abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!("ε = {eps} is not a root")));
    }
    let phi = |t: u32| orbit_frame_potential(psi, t, OrbitMode::Exact).map(|e| e.mean);
    let d = psi.dim() as u64;
    let phi5 = phi(5)?;
    let phi5_design = 1.0 / sym_dim(d, 5) as f64;
    let (phi6, phi7) = if n == 1 {
        (Some(phi(6)?), Some(phi(7)?))
    } else {
        (None, None)
    };
    Ok(Conjecture5Report {
        n,
        epsilon: eps,
        phi4: phi(4)?,
        phi5,
        phi5_design,
        phi5_deviation: phi5 - phi5_design,
        phi6,
        phi7,
    })
}

/// A constructed fiducial and its metrics.
#[derive(Clone, Debug, Serialize)]
pub struct FiducialOutput {
    pub name: String,
    pub amplitudes: Vec<[f64; 2]>,
    pub report: DesignReport,
}

impl FiducialOutput {
    pub fn new(name: impl Into<String>, psi: &StateVector) -> Result<Self> {
        Ok(FiducialOutput {
            name: name.into(),
            amplitudes: psi.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
            report: design_report(psi)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::random_clifford;
    use crate::designs::qubit_four_design_bloch;
    use proptest::prelude::*;

    #[test]
    fn named_states() {
        assert!((ell4_of(&hoggar()).unwrap() - 16.0 / 9.0).abs() < 1e-12);
        assert!((ell4_of(&psi_t()).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        let z = named_fiducial("bloch(0,0,1)".parse().unwrap()).unwrap();
        assert!(z.distance(&StateVector::basis(1, 0)) < 1e-12);
        assert!("nope".parse::<FiducialName>().is_err());
        assert_eq!(
            "bloch:0,0,1".parse::<FiducialName>().unwrap(),
            FiducialName::Bloch(0.0, 0.0, 1.0)
        );
        assert_eq!("Hoggar".parse::<FiducialName>().unwrap(), FiducialName::Hoggar);
        let r = design_report(&hoggar()).unwrap();
        assert!((r.alpha_plus - 1.0 / 36.0).abs() < 1e-12);
        assert!((r.epsilon + 7.0 / 18.0).abs() < 1e-12);
    }

    #[test]
    fn quartic_solutions() {
        let b = solve_bloch_quartic(1.0 + 1.0 / 3.0).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((b.x - r).abs() < 1e-6 && (b.y - r).abs() < 1e-6);
        let b = solve_bloch_quartic(1.6).unwrap();
        let (x, y, _) = qubit_four_design_bloch();
        assert!((b.x - x).abs() < 1e-12 && (b.y - y).abs() < 1e-12);
        let b = solve_bloch_quartic(2.0).unwrap();
        assert!((b.x - 1.0).abs() < 1e-12);
        assert!(matches!(solve_bloch_quartic(1.2), Err(Error::Infeasible(_))));
        assert!(matches!(solve_bloch_quartic(2.1), Err(Error::Infeasible(_))));
    }

    #[test]
    fn algorithm1_constructions() {
        let t = psi_t();
        let tt = t.kron(&t);
        let ttt = tt.kron(&t);
        let cases: [(&StateVector, usize, f64); 5] = [
            (&t, 2, 5.0 / 7.0),
            (&tt, 3, 7.0 / 11.0),
            (&ttt, 4, 8.0 / 19.0),
            (&hoggar(), 4, 17.0 / 19.0),
            (&hoggar().kron(&t), 5, 19.0 / 35.0),
        ];
        for (prev, n, q) in cases {
            assert!((algorithm1_target(prev).unwrap() - q).abs() < 1e-12, "n={n}");
            let out = algorithm1(prev, n).unwrap();
            assert!(design_report(&out).unwrap().epsilon.abs() < 1e-10);
        }
        assert!(matches!(
            algorithm1(&StateVector::basis(1, 0), 2),
            Err(Error::Infeasible(_))
        ));
        assert!(algorithm1(&t, 3).is_err());
    }

    #[test]
    fn algorithm2_qubit_root() {
        let out = algorithm2(
            &StateVector::basis(1, 0),
            &psi_t(),
            1e-10,
            200,
            BisectionMode::Midpoint,
        )
        .unwrap();
        let (x, y, z) = out.state.bloch().unwrap();
        assert!((x.powi(4) + y.powi(4) + z.powi(4) - 0.6).abs() < 1e-8);
    }

    #[test]
    fn algorithm2_multi_qubit() {
        for n in 2..=3 {
            let (a, b) = algorithm2_default_seeds(n).unwrap();
            for mode in [BisectionMode::Midpoint, BisectionMode::Secant] {
                let out = algorithm2(&a, &b, 1e-8, 200, mode).unwrap();
                assert!(epsilon(&out.state).unwrap().abs() <= 1e-8);
            }
        }
        let s = StateVector::basis(2, 0);
        assert!(matches!(
            algorithm2(&s, &s.clone(), 1e-8, 10, BisectionMode::Midpoint),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn algorithm2_returns_existing_root() {
        let (x, y, z) = qubit_four_design_bloch();
        let root = StateVector::from_bloch(x, y, z).unwrap();
        let out = algorithm2(&StateVector::basis(1, 0), &root, 1e-8, 5, BisectionMode::Midpoint)
            .unwrap();
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn weighted_designs() {
        for n in 1..=2 {
            let (a, b) = algorithm2_default_seeds(n).unwrap();
            let w = weighted_two_orbit(&a, &b).unwrap();
            assert!((w.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let d = 1u64 << n;
            let phi = w.frame_potential(4).unwrap();
            assert!((phi - 1.0 / sym_dim(d, 4) as f64).abs() < 1e-9, "n={n} {phi}");
        }
    }

    #[test]
    fn singer_small() {
        for n in [1usize, 2] {
            let s = singer_unitary(n).unwrap();
            assert_eq!(s.order, (1 << n) + 1);
            assert!(singer_mub_deviation(&s) < 1e-9);
        }
        let row = singer_epsilon_row(1).unwrap();
        assert!((row.epsilon + 2.0 / 9.0).abs() < 1e-10);
        let row = singer_epsilon_row(2).unwrap();
        assert!((-row.epsilon - 0.12).abs() < 5e-3, "{row:?}");
        assert!(singer_unitary(3).is_err());
    }

    #[test]
    fn conjecture_probe_qubit() {
        let (x, y, z) = qubit_four_design_bloch();
        let r = conjecture5_probe(&StateVector::from_bloch(x, y, z).unwrap()).unwrap();
        assert!(r.phi5_deviation.abs() < 1e-10);
        assert!(conjecture5_probe(&StateVector::basis(1, 0)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn ell4_multiplicative(n1 in 1usize..=3, n2 in 1usize..=3, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = StateVector::random(n1, &mut rng);
            let b = StateVector::random(n2, &mut rng);
            let lhs = ell4_of(&a.kron(&b)).unwrap();
            prop_assert!((lhs - ell4_of(&a).unwrap() * ell4_of(&b).unwrap()).abs() < 1e-10);
        }

        #[test]
        fn quartic_solution_exact(q in 1.0f64 / 3.0..=1.0) {
            let b = solve_bloch_quartic(1.0 + q).unwrap();
            prop_assert!((b.quartic() - q).abs() < 1e-12);
        }

        #[test]
        fn algorithm1_output_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_clifford(1, &mut rng);
            let prev = u.apply(&psi_t()).unwrap();
            let out = algorithm1(&prev, 2).unwrap();
            prop_assert!(design_report(&out).unwrap().epsilon.abs() < 1e-10);
        }
    }
}

#[cfg(test)]
mod singer_large {
    use super::*;

    #[test]
    fn singer_four_qubits() {
        let s = singer_unitary(4).unwrap();
        assert!(singer_mub_deviation(&s) < 1e-9);
        let row = singer_epsilon_row(4).unwrap();
        assert!((-row.epsilon - 0.0312).abs() < 5e-4, "{row:?}");
    }

    #[test]
    #[ignore = "d = 256"]
    fn singer_eight_qubits() {
        let row = singer_epsilon_row(8).unwrap();
        eprintln!("{row:?}");
        assert!((-row.epsilon - 0.0020).abs() < 5e-5, "{row:?}");
    }
}

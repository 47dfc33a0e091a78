//! Phase-exact Pauli operators `iʲ W_a` and the characteristic function.
//!
//! On one qubit `W_{(z,x)}` is `σ_{(0,0)} = 1`, `σ_{(1,0)} = Z`,
//! `σ_{(0,1)} = X`, `σ_{(1,1)} = Y`. Writing `z`, `x` for the per-qubit bit
//! masks of `a` laid out in amplitude-index order,
//!
//! ```text
//! W_a |y⟩ = i^{|z∧x|} (−1)^{|z∧y|} |y ⊕ x⟩
//! ```
//!
//! which is what [`apply_pauli`] evaluates.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::f2lin::{form_bits, F2Vector};
use crate::state::{StateVector, NORM_TOL};

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// `i^k`.
#[inline]
pub fn i_pow(k: u32) -> Complex64 {
    I_POWERS[(k & 3) as usize]
}

/// Splits a label into `(z, x)` masks over amplitude indices.
#[inline]
pub fn label_masks(a: u64, n: usize) -> (usize, usize) {
    let mut z = 0usize;
    let mut x = 0usize;
    for q in 0..n {
        let shift = n - 1 - q;
        z |= (((a >> (2 * q)) & 1) as usize) << shift;
        x |= (((a >> (2 * q + 1)) & 1) as usize) << shift;
    }
    (z, x)
}

/// Inverse of [`label_masks`].
#[inline]
pub fn masks_label(z: usize, x: usize, n: usize) -> u64 {
    let mut a = 0u64;
    for q in 0..n {
        let shift = n - 1 - q;
        a |= (((z >> shift) & 1) as u64) << (2 * q);
        a |= (((x >> shift) & 1) as u64) << (2 * q + 1);
    }
    a
}

/// `iʲ · W_a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliLabel {
    pub a: F2Vector,
    pub phase_exp: u8,
}

impl PauliLabel {
    pub fn new(a: F2Vector, phase_exp: u8) -> Self {
        Self {
            a,
            phase_exp: phase_exp & 3,
        }
    }

    /// The bare, Hermitian `W_a`.
    pub fn bare(a: F2Vector) -> Self {
        Self::new(a, 0)
    }

    pub fn identity(n: usize) -> Self {
        Self::bare(F2Vector::zero(n))
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    /// `(iʲ W_a)⁻¹ = i^{−j} W_a`.
    pub fn inverse(&self) -> Self {
        Self::new(self.a, (4 - self.phase_exp) & 3)
    }

    /// Power of `i` in the per-qubit `Y = i X Z` factors.
    #[inline]
    fn y_count(bits: u64) -> u32 {
        (bits & (bits >> 1) & 0x5555_5555_5555_5555).count_ones()
    }
}

/// Label of the matrix product `p · q`.
pub fn pauli_product(p: &PauliLabel, q: &PauliLabel) -> Result<PauliLabel> {
    if p.n() != q.n() {
        return Err(Error::Dimension(format!(
            "Pauli labels on {} and {} qubits",
            p.n(),
            q.n()
        )));
    }
    let a = p.a.bits();
    let b = q.a.bits();
    let c = a ^ b;
    // W_a = i^{|z_a∧x_a|} X^{x_a} Z^{z_a}; moving Z^{z_a} past X^{x_b} costs (−1)^{|z_a∧x_b|}.
    let za = a & 0x5555_5555_5555_5555;
    let xb = (b >> 1) & 0x5555_5555_5555_5555;
    let swap = (za & xb).count_ones();
    let e = PauliLabel::y_count(a) + PauliLabel::y_count(b) + 2 * swap + 4 * 16
        - PauliLabel::y_count(c);
    Ok(PauliLabel::new(
        p.a ^ q.a,
        ((p.phase_exp as u32 + q.phase_exp as u32 + e) & 3) as u8,
    ))
}

/// Dense `d × d` realization of `iʲ W_a`.
pub fn pauli_matrix(p: &PauliLabel) -> DMatrix<Complex64> {
    let n = p.n();
    let d = 1usize << n;
    let (z, x) = label_masks(p.a.bits(), n);
    let base = (z & x).count_ones() + p.phase_exp as u32;
    let mut m = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for y in 0..d {
        let sign = 2 * ((z & y).count_ones() & 1);
        m[(y ^ x, y)] = i_pow(base + sign);
    }
    m
}

/// `iʲ W_a ψ` without forming the matrix.
pub fn apply_pauli(p: &PauliLabel, psi: &StateVector) -> Result<StateVector> {
    if p.n() != psi.n() {
        return Err(Error::Dimension(format!(
            "Pauli on {} qubits applied to a {}-qubit state",
            p.n(),
            psi.n()
        )));
    }
    StateVector::new(apply_pauli_raw(p, psi.amplitudes()))
}

pub(crate) fn apply_pauli_raw(p: &PauliLabel, amps: &[Complex64]) -> Vec<Complex64> {
    let n = p.n();
    let (z, x) = label_masks(p.a.bits(), n);
    let base = (z & x).count_ones() + p.phase_exp as u32;
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (y, amp) in amps.iter().enumerate() {
        let sign = 2 * ((z & y).count_ones() & 1);
        out[y ^ x] = amp * i_pow(base + sign);
    }
    out
}

/// Whether `W_a` and `W_b` commute: `⟨a, b⟩ = 0`.
pub fn commutes(a: &F2Vector, b: &F2Vector) -> bool {
    !form_bits(a.bits(), b.bits())
}

/// `Ξ_a(ψ) = ⟨ψ|W_a|ψ⟩` for all `a ∈ F₂^{2n}`, indexed by the packed label.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicFunction {
    values: Vec<f64>,
    n: usize,
}

impl CharacteristicFunction {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, a: &F2Vector) -> f64 {
        self.values[a.bits() as usize]
    }

    /// `Σ_a Ξ_a²`; equals `d` for a normalized state.
    pub fn ell2_norm2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// CSV with one `label,value` row per Pauli; labels are the bit string
    /// `a_1 … a_{2n}`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,value\n");
        for (a, v) in self.values.iter().enumerate() {
            for i in 0..2 * self.n {
                out.push(if (a >> i) & 1 == 1 { '1' } else { '0' });
            }
            out.push_str(&format!(",{v:.17e}\n"));
        }
        out
    }
}

/// In-place unnormalized Walsh–Hadamard transform.
fn walsh_hadamard(buf: &mut [Complex64]) {
    let d = buf.len();
    let mut h = 1;
    while h < d {
        for block in (0..d).step_by(2 * h) {
            for k in block..block + h {
                let (u, v) = (buf[k], buf[k + h]);
                buf[k] = u + v;
                buf[k + h] = u - v;
            }
        }
        h *= 2;
    }
}

/// All `d²` Pauli expectation values of a normalized state.
///
/// For fixed `x`, `Σ_y (−1)^{z·y} conj(ψ_{y⊕x}) ψ_y` over all `z` is one
/// Walsh–Hadamard transform, so the whole table costs `O(d² log d)`.
pub fn characteristic_function(psi: &StateVector) -> Result<CharacteristicFunction> {
    psi.check_normalized(NORM_TOL)?;
    Ok(characteristic_function_unchecked(psi))
}

pub(crate) fn characteristic_function_unchecked(psi: &StateVector) -> CharacteristicFunction {
    let n = psi.n();
    let d = psi.dim();
    let amps = psi.amplitudes();
    let per_x = |x: usize| -> Vec<(u64, f64)> {
        let mut buf: Vec<Complex64> = (0..d).map(|y| amps[y ^ x].conj() * amps[y]).collect();
        walsh_hadamard(&mut buf);
        (0..d)
            .map(|z| {
                let v = buf[z] * i_pow((z & x).count_ones());
                debug_assert!(
                    v.im.abs() < 1e-10,
                    "imaginary part {} in a Hermitian expectation",
                    v.im
                );
                (masks_label(z, x, n), v.re)
            })
            .collect()
    };
    let chunks: Vec<Vec<(u64, f64)>> = if d >= 64 {
        (0..d).into_par_iter().map(per_x).collect()
    } else {
        (0..d).map(per_x).collect()
    };
    let mut values = vec![0.0; d * d];
    for chunk in chunks {
        for (a, v) in chunk {
            values[a as usize] = v;
        }
    }
    CharacteristicFunction { values, n }
}

/// `‖Ξ‖⁴_{ℓ₄} = Σ_a Ξ_a⁴`.
pub fn ell4_norm4(xi: &CharacteristicFunction) -> f64 {
    xi.values.iter().map(|v| (v * v) * (v * v)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(z: u8, x: u8) -> DMatrix<Complex64> {
        pauli_matrix(&PauliLabel::bare(F2Vector::from_coords(&[z, x]).unwrap()))
    }

    #[test]
    fn single_qubit_matrices() {
        let o = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        assert_eq!(single(0, 0), DMatrix::from_row_slice(2, 2, &[one, o, o, one]));
        assert_eq!(single(1, 0), DMatrix::from_row_slice(2, 2, &[one, o, o, -one]));
        assert_eq!(single(0, 1), DMatrix::from_row_slice(2, 2, &[o, one, one, o]));
        assert_eq!(
            single(1, 1),
            DMatrix::from_row_slice(2, 2, &[o, c(0.0, -1.0), c(0.0, 1.0), o])
        );
    }

    #[test]
    fn two_qubit_kron_order() {
        // a = (0,1,1,0) is σ_x ⊗ σ_z.
        let a = F2Vector::from_coords(&[0, 1, 1, 0]).unwrap();
        let m = pauli_matrix(&PauliLabel::bare(a));
        assert_eq!(m, single(0, 1).kronecker(&single(1, 0)));
    }

    #[test]
    fn product_matches_matrices_exhaustive_n1() {
        for a in F2Vector::all(1) {
            for b in F2Vector::all(1) {
                for ja in 0..4 {
                    for jb in 0..4 {
                        let p = PauliLabel::new(a, ja);
                        let q = PauliLabel::new(b, jb);
                        let r = pauli_product(&p, &q).unwrap();
                        assert_eq!(pauli_matrix(&r), pauli_matrix(&p) * pauli_matrix(&q));
                    }
                }
            }
        }
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let x = PauliLabel::bare(F2Vector::from_coords(&[0, 1]).unwrap());
        let z = PauliLabel::bare(F2Vector::from_coords(&[1, 0]).unwrap());
        let r = pauli_product(&x, &z).unwrap();
        assert_eq!(r.a, F2Vector::from_coords(&[1, 1]).unwrap());
        assert_eq!(r.phase_exp, 3);
    }

    #[test]
    fn inverse_gives_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=5 {
            for _ in 0..20 {
                use rand::Rng;
                let a = F2Vector::from_bits(n, rng.random_range(0..1u64 << (2 * n))).unwrap();
                let p = PauliLabel::new(a, rng.random_range(0..4));
                assert_eq!(
                    pauli_product(&p, &p.inverse()).unwrap(),
                    PauliLabel::identity(n)
                );
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let p = PauliLabel::identity(1);
        let q = PauliLabel::identity(2);
        assert!(matches!(pauli_product(&p, &q), Err(Error::Dimension(_))));
        assert!(apply_pauli(&p, &StateVector::basis(2, 0)).is_err());
    }

    #[test]
    fn sigma_x_flips_basis() {
        let x = PauliLabel::bare(F2Vector::from_coords(&[0, 1]).unwrap());
        let out = apply_pauli(&x, &StateVector::basis(1, 0)).unwrap();
        assert_eq!(out, StateVector::basis(1, 1));
        let psi = StateVector::random(3, &mut ChaCha8Rng::seed_from_u64(2));
        assert_eq!(apply_pauli(&PauliLabel::identity(3), &psi).unwrap(), psi);
    }

    #[test]
    fn associativity_exhaustive_n1() {
        let labels: Vec<PauliLabel> = F2Vector::all(1)
            .flat_map(|a| (0..4).map(move |j| PauliLabel::new(a, j)))
            .collect();
        for p in &labels {
            for q in &labels {
                for r in &labels {
                    let left = pauli_product(&pauli_product(p, q).unwrap(), r).unwrap();
                    let right = pauli_product(p, &pauli_product(q, r).unwrap()).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
    }

    fn arb_label(n: usize) -> impl Strategy<Value = PauliLabel> {
        (0..1u64 << (2 * n), 0u8..4)
            .prop_map(move |(bits, j)| PauliLabel::new(F2Vector::from_bits(n, bits).unwrap(), j))
    }

    proptest! {
        #[test]
        fn associativity_random(
            (p, q, r) in (1usize..=5).prop_flat_map(|n| (arb_label(n), arb_label(n), arb_label(n)))
        ) {
            let left = pauli_product(&pauli_product(&p, &q).unwrap(), &r).unwrap();
            let right = pauli_product(&p, &pauli_product(&q, &r).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn commutation_sign(n in 1usize..=5, a in any::<u64>(), b in any::<u64>()) {
            let m = (1u64 << (2 * n)) - 1;
            let p = PauliLabel::bare(F2Vector::from_bits(n, a & m).unwrap());
            let q = PauliLabel::bare(F2Vector::from_bits(n, b & m).unwrap());
            let pq = pauli_product(&p, &q).unwrap();
            let qp = pauli_product(&q, &p).unwrap();
            let diff = (pq.phase_exp + 4 - qp.phase_exp) & 3;
            let anti = form_bits(p.a.bits(), q.a.bits());
            prop_assert_eq!(diff, if anti { 2 } else { 0 });
        }

        #[test]
        fn apply_matches_dense(n in 1usize..=4, bits in any::<u64>(), j in 0u8..4, seed in any::<u64>()) {
            let a = F2Vector::from_bits(n, bits & ((1u64 << (2 * n)) - 1)).unwrap();
            let p = PauliLabel::new(a, j);
            let psi = StateVector::random(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let fast = apply_pauli(&p, &psi).unwrap();
            let dense = pauli_matrix(&p) * nalgebra::DVector::from_column_slice(psi.amplitudes());
            for (u, v) in fast.amplitudes().iter().zip(dense.iter()) {
                prop_assert!((u - v).norm() < 1e-14);
            }
        }

        #[test]
        fn ell4_bounds(n in 1usize..=5, seed in any::<u64>()) {
            let psi = StateVector::random(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let xi = characteristic_function(&psi).unwrap();
            let d = (1usize << n) as f64;
            let v = ell4_norm4(&xi);
            prop_assert!(v >= 2.0 * d / (d + 1.0) - 1e-9);
            prop_assert!(v <= d + 1e-9);
            prop_assert!((xi.ell2_norm2() - d).abs() < 1e-10);
            prop_assert!((xi.values()[0] - 1.0).abs() < 1e-12);
            prop_assert!(xi.values().iter().all(|v| v.abs() <= 1.0 + 1e-12));
        }
    }

    #[test]
    fn characteristic_function_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=3 {
            for _ in 0..5 {
                let psi = StateVector::random(n, &mut rng);
                let xi = characteristic_function(&psi).unwrap();
                let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
                for a in F2Vector::all(n) {
                    let w = pauli_matrix(&PauliLabel::bare(a));
                    let e = (v.adjoint() * &w * &v)[(0, 0)];
                    assert!(e.im.abs() < 1e-12);
                    assert!((e.re - xi.get(&a)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn basis_state_has_z_support() {
        for n in 1..=3 {
            let xi = characteristic_function(&StateVector::basis(n, 0)).unwrap();
            for a in F2Vector::all(n) {
                let z_only = a.bits() & 0xAAAA_AAAA_AAAA_AAAA == 0;
                assert_eq!(xi.get(&a), if z_only { 1.0 } else { 0.0 });
            }
            assert_eq!(ell4_norm4(&xi), (1u64 << n) as f64);
        }
    }

    #[test]
    fn rejects_unnormalized() {
        let psi = StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(
            characteristic_function(&psi),
            Err(Error::Normalization(_))
        ));
    }

    #[test]
    fn csv_export() {
        let xi = characteristic_function(&StateVector::basis(1, 0)).unwrap();
        let csv = xi.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "label,value");
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("10,1.0"));
    }
}

//! Pure states on `n` qubits.
//!
//! Amplitude index `y` encodes the computational basis state `|y_0 … y_{n-1}⟩`
//! with qubit 0 as the most significant bit, matching the Kronecker order
//! `σ_0 ⊗ σ_1 ⊗ …`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance on `‖ψ‖² − 1` for metric inputs.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    n: usize,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let d = amps.len();
        if d == 0 || !d.is_power_of_two() {
            return Err(Error::Dimension(format!("length {d} is not a power of two")));
        }
        Ok(Self {
            n: d.trailing_zeros() as usize,
            amps,
        })
    }

    /// `|y⟩` on `n` qubits.
    pub fn basis(n: usize, y: usize) -> Self {
        let d = 1usize << n;
        assert!(y < d);
        let mut amps = vec![Complex64::new(0.0, 0.0); d];
        amps[y] = Complex64::new(1.0, 0.0);
        Self { amps, n }
    }

    /// Single-qubit state with Bloch vector `(x, y, z)`, i.e.
    /// `⟨σ_x⟩ = x`, `⟨σ_y⟩ = y`, `⟨σ_z⟩ = z`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let r2 = x * x + y * y + z * z;
        if (r2 - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "Bloch vector ({x}, {y}, {z}) has squared length {r2}"
            )));
        }
        let amps = if z > -0.5 {
            let a0 = ((1.0 + z) / 2.0).sqrt();
            let a1 = Complex64::new(x, y) / (2.0 * (1.0 + z)).sqrt();
            vec![Complex64::new(a0, 0.0), a1]
        } else {
            let a1 = ((1.0 - z) / 2.0).sqrt();
            let a0 = Complex64::new(x, -y) / (2.0 * (1.0 - z)).sqrt();
            vec![a0, Complex64::new(a1, 0.0)]
        };
        Self::new(amps)
    }

    /// Haar-random state: a complex Gaussian vector, normalized.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let d = 1usize << n;
        let amps: Vec<Complex64> = (0..d)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        Self { amps, n }.normalized().expect("nonzero with probability one")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm < 1e-300 {
            return Err(Error::Normalization(0.0));
        }
        Ok(Self {
            amps: self.amps.iter().map(|a| a / norm).collect(),
            n: self.n,
        })
    }

    /// Fails with [`Error::Normalization`] unless `|‖ψ‖² − 1| ≤ tol`.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let ns = self.norm_sqr();
        if (ns - 1.0).abs() > tol {
            return Err(Error::Normalization(ns));
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `self ⊗ other`; `self` occupies the leading qubits.
    pub fn kron(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector {
            amps,
            n: self.n + other.n,
        }
    }

    pub fn scale(&self, c: Complex64) -> StateVector {
        StateVector {
            amps: self.amps.iter().map(|a| a * c).collect(),
            n: self.n,
        }
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Bloch vector of a single-qubit state.
    pub fn bloch(&self) -> Result<(f64, f64, f64)> {
        if self.n != 1 {
            return Err(Error::Dimension("Bloch vector needs a single qubit".into()));
        }
        let (a0, a1) = (self.amps[0], self.amps[1]);
        let c = a0.conj() * a1;
        Ok((2.0 * c.re, 2.0 * c.im, a0.norm_sqr() - a1.norm_sqr()))
    }
}

/// On-disk state: `{ "n": int, "amplitudes": [[re, im], ...] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&StateVector> for StateFile {
    fn from(psi: &StateVector) -> Self {
        StateFile {
            n: psi.n(),
            amplitudes: psi.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

impl TryFrom<StateFile> for StateVector {
    type Error = Error;

    fn try_from(file: StateFile) -> Result<Self> {
        if file.amplitudes.len() != 1usize << file.n {
            return Err(Error::Dimension(format!(
                "n = {} requires {} amplitudes, found {}",
                file.n,
                1usize << file.n,
                file.amplitudes.len()
            )));
        }
        StateVector::new(
            file.amplitudes
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl StateVector {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateFile::from(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        file.try_into()
    }
}

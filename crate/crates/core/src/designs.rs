//! Frame potentials, the fourth-moment deviation `ε`, single-qubit closed
//! forms and a few admissibility predicates for Clifford-orbit designs.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{projective_clifford_group, random_clifford, MAX_ORBIT_N};
use crate::error::{Error, Result};
use crate::pauli::{characteristic_function, ell4_norm4};
use crate::state::{StateVector, NORM_TOL};

/// Slack used when asserting lower bounds on frame potentials.
pub const BOUND_SLACK: f64 = 1e-9;

/// Largest `n` for Monte-Carlo orbit potentials.
pub const MAX_MC_N: usize = 5;

/// `C(m, r)` in `u128`.
pub fn binomial(m: u64, r: u64) -> u128 {
    if r > m {
        return 0;
    }
    let r = r.min(m - r);
    (0..r).fold(1u128, |acc, i| acc * (m - i) as u128 / (i + 1) as u128)
}

/// `D_{[t]} = C(d+t−1, t)`.
pub fn sym_dim(d: u64, t: u64) -> u128 {
    binomial(d + t - 1, t)
}

/// Mean and standard error of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Estimate {
        let m = xs.len();
        let mean = xs.iter().sum::<f64>() / m as f64;
        let var = if m > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64
        } else {
            0.0
        };
        Estimate {
            mean,
            stderr: (var / m as f64).sqrt(),
            samples: m,
        }
    }

    /// `|mean − target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.stderr == 0.0 {
            if (self.mean - target).abs() < 1e-12 { 0.0 } else { f64::INFINITY }
        } else {
            (self.mean - target).abs() / self.stderr
        }
    }
}

fn check_states(states: &[StateVector]) -> Result<()> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty state list".into()))?;
    for s in states {
        if s.dim() != first.dim() {
            return Err(Error::Dimension(format!("{} vs {}", s.dim(), first.dim())));
        }
        s.check_normalized(NORM_TOL)?;
    }
    Ok(())
}

/// `Σ_{j,k} w_j w_k |⟨ψ_j|ψ_k⟩|^{2t}`, with uniform weights `1/K` by default.
pub fn frame_potential(states: &[StateVector], t: u32, weights: Option<&[f64]>) -> Result<f64> {
    check_states(states)?;
    let k = states.len();
    let uniform;
    let w = match weights {
        Some(w) => {
            if w.len() != k {
                return Err(Error::Dimension(format!("{} weights for {k} states", w.len())));
            }
            let total: f64 = w.iter().sum();
            if w.iter().any(|x| *x < 0.0) || (total - 1.0).abs() > 1e-10 {
                return Err(Error::Normalization(total));
            }
            w
        }
        None => {
            uniform = vec![1.0 / k as f64; k];
            &uniform[..]
        }
    };
    let rows: Vec<f64> = (0..k)
        .into_par_iter()
        .map(|j| {
            (0..k)
                .map(|i| w[i] * states[j].overlap(&states[i]).powi(t as i32))
                .sum::<f64>()
                * w[j]
        })
        .collect();
    let phi: f64 = rows.iter().sum();
    let floor = 1.0 / sym_dim(states[0].dim() as u64, t as u64) as f64;
    if phi < floor - BOUND_SLACK {
        return Err(Error::Internal(format!("Φ_{t} = {phi} below 1/D = {floor}")));
    }
    Ok(phi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DesignBounds {
    /// `4d/(d+3)`, the value of `‖Ξ‖₄⁴` for a 4-design fiducial.
    pub ell4_design: f64,
    /// `(d−1)/4`.
    pub epsilon_max: f64,
    /// `−(d−1)/(2(d+1))`.
    pub epsilon_min: f64,
    /// `2/(d(d+1))`.
    pub alpha_min: f64,
    /// `1/d`.
    pub alpha_max: f64,
    /// `1/D_{[4]}`.
    pub phi4_design: f64,
}

impl DesignBounds {
    pub fn new(d: f64) -> Self {
        DesignBounds {
            ell4_design: 4.0 * d / (d + 3.0),
            epsilon_max: (d - 1.0) / 4.0,
            epsilon_min: -(d - 1.0) / (2.0 * (d + 1.0)),
            alpha_min: 2.0 / (d * (d + 1.0)),
            alpha_max: 1.0 / d,
            phi4_design: 24.0 / (d * (d + 1.0) * (d + 2.0) * (d + 3.0)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundFlags {
    pub alpha: bool,
    pub epsilon: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DesignReport {
    pub n: usize,
    pub d: u64,
    pub ell4: f64,
    pub alpha_plus: f64,
    pub epsilon: f64,
    pub phi4: f64,
    pub op_norm_dev: f64,
    pub trace_norm_dev: f64,
    pub bounds: DesignBounds,
    pub bounds_ok: BoundFlags,
}

impl DesignReport {
    pub fn all_bounds_ok(&self) -> bool {
        self.bounds_ok.alpha && self.bounds_ok.epsilon
    }
}

/// `ε` from `‖Ξ‖₄⁴`: `(d(d+3)/4)(ℓ/d²) − 1`.
pub fn epsilon_from_ell4(ell4: f64, d: f64) -> f64 {
    d * (d + 3.0) / 4.0 * (ell4 / (d * d)) - 1.0
}

/// `Φ₄` of a Clifford orbit from its deviation.
pub fn phi4_from_epsilon(epsilon: f64, d: f64) -> f64 {
    DesignBounds::new(d).phi4_design * (1.0 + 4.0 * epsilon * epsilon / ((d - 1.0) * (d + 4.0)))
}

pub fn design_report(psi: &StateVector) -> Result<DesignReport> {
    psi.check_normalized(NORM_TOL)?;
    let n = psi.n();
    let d = psi.dim() as f64;
    let ell4 = ell4_norm4(&characteristic_function(psi)?);
    let alpha_plus = ell4 / (d * d);
    let epsilon = epsilon_from_ell4(ell4, d);
    let bounds = DesignBounds::new(d);
    let d_plus = (d + 1.0) * (d + 2.0) / 6.0;
    Ok(DesignReport {
        n,
        d: psi.dim() as u64,
        ell4,
        alpha_plus,
        epsilon,
        phi4: phi4_from_epsilon(epsilon, d),
        op_norm_dev: epsilon.abs(),
        trace_norm_dev: 2.0 * d_plus * epsilon.abs(),
        bounds,
        bounds_ok: BoundFlags {
            alpha: alpha_plus >= bounds.alpha_min - BOUND_SLACK
                && alpha_plus <= bounds.alpha_max + BOUND_SLACK,
            epsilon: epsilon >= bounds.epsilon_min - BOUND_SLACK
                && epsilon <= bounds.epsilon_max + BOUND_SLACK,
        },
    })
}

fn check_bloch(x: f64, y: f64, z: f64) -> Result<()> {
    let r = x * x + y * y + z * z;
    if (r - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization(r));
    }
    Ok(())
}

/// `Φ₄` of the single-qubit Clifford orbit of the Bloch vector `(x, y, z)`.
pub fn qubit_phi4(x: f64, y: f64, z: f64) -> Result<f64> {
    check_bloch(x, y, z)?;
    let s = x.powi(4) + y.powi(4) + z.powi(4);
    Ok((21.0 - 6.0 * s + 5.0 * s * s) / 96.0)
}

/// Roots of `1 − 21u + 105u² − 105u³`, in the order `j = 1, 2, 3`.
pub fn qubit_six_design_roots() -> [f64; 3] {
    let theta = (3.0 * 10f64.sqrt() / 20.0).atan();
    let amp = 2.0 * (0.4f64).sqrt();
    [1.0, 2.0, 3.0].map(|j| {
        (1.0 + amp * ((theta + 2.0 * j * std::f64::consts::PI) / 3.0).cos()) / 3.0
    })
}

/// Bloch vector `(√u₁, √u₂, √u₃)` whose orbit is a 7-design.
pub fn qubit_seven_design_bloch() -> (f64, f64, f64) {
    let [a, b, c] = qubit_six_design_roots();
    (a.sqrt(), b.sqrt(), c.sqrt())
}

/// The explicit 4-design solution `x = √((5+2√10)/15)`, `y = z = √((5−√10)/15)`.
pub fn qubit_four_design_bloch() -> (f64, f64, f64) {
    let r = 10f64.sqrt();
    let y = ((5.0 - r) / 15.0).sqrt();
    (((5.0 + 2.0 * r) / 15.0).sqrt(), y, y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrbitMode {
    /// Full sum over the projective Clifford group (`n ≤ 2`).
    Exact,
    /// Average over uniformly random Cliffords.
    MonteCarlo { samples: usize, seed: u64 },
}

/// `(1/|G|) Σ_U |⟨ψ|Uψ⟩|^{2t}`, exact or sampled. The exact mode has zero
/// standard error.
pub fn orbit_frame_potential(psi: &StateVector, t: u32, mode: OrbitMode) -> Result<Estimate> {
    psi.check_normalized(NORM_TOL)?;
    let n = psi.n();
    let amps = psi.amplitudes();
    let overlap = |m: &nalgebra::DMatrix<Complex64>| -> f64 {
        let d = amps.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..d {
            let mut row = Complex64::new(0.0, 0.0);
            for c in 0..d {
                row += m[(r, c)] * amps[c];
            }
            acc += amps[r].conj() * row;
        }
        acc.norm_sqr().powi(t as i32)
    };
    match mode {
        OrbitMode::Exact => {
            if n > MAX_ORBIT_N {
                return Err(Error::Capacity(format!(
                    "exact orbit potentials need n ≤ {MAX_ORBIT_N}"
                )));
            }
            let group = projective_clifford_group(n)?;
            let vals: Vec<f64> = group.par_iter().map(|u| overlap(u.matrix())).collect();
            Ok(Estimate {
                mean: vals.iter().sum::<f64>() / vals.len() as f64,
                stderr: 0.0,
                samples: vals.len(),
            })
        }
        OrbitMode::MonteCarlo { samples, seed } => {
            if n > MAX_MC_N {
                return Err(Error::Capacity(format!("Monte-Carlo potentials need n ≤ {MAX_MC_N}")));
            }
            if samples == 0 {
                return Err(Error::InvalidArgument("samples must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vals: Vec<f64> = (0..samples)
                .map(|_| overlap(random_clifford(n, &mut rng).matrix()))
                .collect();
            Ok(Estimate::from_samples(&vals))
        }
    }
}

/// `(t+1)·E[Φ_t]` for the orbit of a uniformly random qubit state, sampled.
pub fn random_qubit_orbit_ratio(t: u32, samples: usize, seed: u64) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<StateVector> = (0..samples).map(|_| StateVector::random(1, &mut rng)).collect();
    let vals = states
        .par_iter()
        .map(|psi| orbit_frame_potential(psi, t, OrbitMode::Exact).map(|e| (t + 1) as f64 * e.mean))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_samples(&vals))
}

/// Lower bound on the size of a projective `t`-design in dimension `d`:
/// `C(d+⌈t/2⌉−1, ⌈t/2⌉)·C(d+⌊t/2⌋−1, ⌊t/2⌋)`.
pub fn minimal_design_size(d: u64, t: u64) -> Result<u128> {
    if t == 0 || d == 0 {
        return Err(Error::InvalidArgument("d and t must be positive".into()));
    }
    Ok(sym_dim(d, t.div_ceil(2)) * sym_dim(d, t / 2))
}

/// `tr(P_{n,4}(ρ₁⊗ρ₂⊗ρ₃⊗ρ₄)) = (1/d²) Σ_a Π_j Ξ_j(a)`, checked to lie in `[0, 1/d]`.
pub fn product_state_bound_check(states: [&StateVector; 4]) -> Result<f64> {
    let n = states[0].n();
    let mut xis = Vec::with_capacity(4);
    for s in states {
        if s.n() != n {
            return Err(Error::Dimension(format!("{} vs {n} qubits", s.n())));
        }
        s.check_normalized(NORM_TOL)?;
        xis.push(characteristic_function(s)?);
    }
    let d = (1u64 << n) as f64;
    let sum: f64 = (0..xis[0].values().len())
        .map(|a| xis.iter().map(|x| x.values()[a]).product::<f64>())
        .sum();
    let v = sum / (d * d);
    if !(-1e-10..=1.0 / d + 1e-10).contains(&v) {
        return Err(Error::Internal(format!("product-state trace {v} outside [0, 1/d]")));
    }
    Ok(v)
}

/// Whether `ψ₁⊗…⊗ψ_m` with `ψ_j` on `n_j` qubits may be a 4-design fiducial:
/// the parts must have the form `(1,1,1,1)`, `(3,2,1)`, `(2,2,1)`, `(n₁,1,1)`,
/// `(n₁,n₂)` or a single part.
pub fn tensor_fiducial_admissible(parts: &[usize]) -> bool {
    if parts.is_empty() || parts.contains(&0) {
        return false;
    }
    let mut p = parts.to_vec();
    p.sort_unstable_by(|a, b| b.cmp(a));
    matches!(
        p.as_slice(),
        [_] | [_, _] | [1, 1, 1, 1] | [3, 2, 1] | [2, 2, 1] | [_, 1, 1]
    )
}

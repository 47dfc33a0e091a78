//! Moments of `α₊(ψ) = ‖Ξ(ψ)‖₄⁴/d²` for Haar-random `ψ`: exact values from
//! Pauli-pair counting over S₈, seeded Monte-Carlo estimates, tail bounds and
//! Lipschitz probes.

use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::random_clifford;
use crate::designs::{epsilon_from_ell4, sym_dim, Estimate};
use crate::error::{Error, Result};
use crate::pauli::{characteristic_function, ell4_norm4};
use crate::stabrep::{cycle_type, permutations, stab_projector, RationalOut, Rational};
use crate::state::StateVector;

/// Largest `n` for [`exact_second_moment`].
pub const MAX_EXACT_MOMENT_N: usize = 5;

/// Number of independent RNG streams per Monte-Carlo run.
const SHARDS: u64 = 64;

/// `‖ψ‖ = 1` vector with i.i.d. complex Gaussian components, normalized.
pub fn sample_uniform_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> StateVector {
    let d = 1usize << n;
    loop {
        let amps: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return StateVector::new(amps.into_iter().map(|a| a / norm).collect())
                .expect("normalized");
        }
    }
}

/// One column of the S₈ table: permutations whose cycles all have even length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct S8Row {
    pub cycle_type: Vec<usize>,
    /// All permutations of this type.
    pub n1: i64,
    /// Balanced ones: every cycle meets an even number of the first four and
    /// of the last four parties.
    pub n2: i64,
    /// Balanced ones counted with the sign picked up by `W_a^{⊗4} ⊗ W_b^{⊗4}`
    /// for anticommuting `W_a`, `W_b`.
    pub n3: i64,
}

/// The table as printed, in the order `(2⁴), (2²,4), (4²), (2,6), (8)`.
pub fn s8_table() -> Vec<S8Row> {
    let row = |ct: &[usize], n1, n2, n3| S8Row {
        cycle_type: ct.to_vec(),
        n1,
        n2,
        n3,
    };
    vec![
        row(&[2, 2, 2, 2], 105, 9, 9),
        row(&[4, 2, 2], 1260, 252, 108),
        row(&[4, 4], 1260, 684, 108),
        row(&[6, 2], 3360, 1440, 288),
        row(&[8], 5040, 5040, 432),
    ]
}

fn cycles(sigma: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; sigma.len()];
    let mut out = Vec::new();
    for s in 0..sigma.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            c.push(i);
            i = sigma[i];
        }
        out.push(c);
    }
    out
}

/// `(balanced, sign)` of `σ ∈ S₈` with parties `0..4` carrying `a` and `4..8`
/// carrying `b`.
fn balanced_sign(sigma: &[usize]) -> (bool, i64) {
    let mut sign = 1i64;
    for c in cycles(sigma) {
        let na = c.iter().filter(|&&i| i < 4).count();
        if na % 2 == 1 || (c.len() - na) % 2 == 1 {
            return (false, 0);
        }
        // Sorting the cycle word into a…ab…b swaps each (b, a) pair once.
        let mut bs_seen = 0;
        let mut inversions = 0;
        for &i in &c {
            if i < 4 {
                inversions += bs_seen;
            } else {
                bs_seen += 1;
            }
        }
        if inversions % 2 == 1 {
            sign = -sign;
        }
    }
    (true, sign)
}

/// Regenerates [`s8_table`] from all 40 320 permutations.
pub fn s8_table_brute_force() -> Vec<S8Row> {
    let mut rows: Vec<S8Row> = s8_table()
        .into_iter()
        .map(|r| S8Row {
            n1: 0,
            n2: 0,
            n3: 0,
            ..r
        })
        .collect();
    for sigma in permutations(8) {
        let ct = cycle_type(&sigma);
        if ct.iter().any(|l| l % 2 == 1) {
            continue;
        }
        let row = rows
            .iter_mut()
            .find(|r| r.cycle_type == ct)
            .expect("every even cycle type is listed");
        row.n1 += 1;
        let (bal, sign) = balanced_sign(&sigma);
        if bal {
            row.n2 += 1;
            row.n3 += sign;
        }
    }
    rows
}

/// `tr[P_{[8]}(W_a^{⊗4} ⊗ W_b^{⊗4})]` for the five kinds of pairs
/// `(1,1)`, `(1,b)`, `(a,a)`, commuting, anticommuting.
pub fn pair_traces(d: i128) -> [Rational; 5] {
    let fact8 = Rational::from_integer(40320);
    let d8 = Rational::from_integer(sym_dim(d as u64, 8) as i128);
    let d4 = Rational::from_integer(sym_dim(d as u64, 4) as i128);
    let table = s8_table();
    let sum = |f: fn(&S8Row) -> i64| -> Rational {
        table
            .iter()
            .map(|r| Rational::from_integer(f(r) as i128 * d.pow(r.cycle_type.len() as u32)))
            .sum::<Rational>()
            / fact8
    };
    [
        d8,
        d8 / d4 * Rational::new(3 * d * d + 6 * d, 24),
        sum(|r| r.n1),
        sum(|r| r.n2),
        sum(|r| r.n3),
    ]
}

/// Ordered pair counts `(a, b) ∈ (F₂^{2n})²` of the five kinds.
pub fn pair_counts(d: i128) -> [i128; 5] {
    let nz = d * d - 1;
    [1, 2 * nz, nz, nz * (d * d / 2 - 2), nz * (d * d / 2)]
}

/// `E[α₊²] = (1/(d⁴D_{[8]})) Σ_{a,b} tr[P_{[8]}(W_a^{⊗4} ⊗ W_b^{⊗4})]`.
pub fn exact_second_moment(n: usize) -> Result<Rational> {
    if n == 0 || n > MAX_EXACT_MOMENT_N {
        return Err(Error::Capacity(format!(
            "exact_second_moment supports 1 ≤ n ≤ {MAX_EXACT_MOMENT_N}"
        )));
    }
    let d = 1i128 << n;
    let traces = pair_traces(d);
    let counts = pair_counts(d);
    let total: Rational = traces
        .iter()
        .zip(counts)
        .map(|(t, c)| t * Rational::from_integer(c))
        .sum();
    let d8 = sym_dim(d as u64, 8) as i128;
    Ok(total / Rational::from_integer(d.pow(4) * d8))
}

/// `E[α₊] = 4/(d(d+3))`.
pub fn exact_first_moment(n: usize) -> Rational {
    let d = 1i128 << n;
    Rational::new(4, d * (d + 3))
}

/// `Var[α₊]` from the exact moments.
pub fn exact_variance(n: usize) -> Result<Rational> {
    let m1 = exact_first_moment(n);
    Ok(exact_second_moment(n)? - m1 * m1)
}

/// `E[ε²] = Var[α₊]/E[α₊]²`.
pub fn exact_epsilon_second_moment(n: usize) -> Result<Rational> {
    let m1 = exact_first_moment(n);
    Ok(exact_variance(n)? / (m1 * m1))
}

/// `D_{[4]}·E[Φ₄(orb ψ)] = 1 + 4E[ε²]/((d−1)(d+4))`.
pub fn average_phi4_ratio(n: usize) -> Result<Rational> {
    let d = 1i128 << n;
    Ok(Rational::one() + exact_epsilon_second_moment(n)? * Rational::new(4, (d - 1) * (d + 4)))
}

/// `tr(P_{1,4}^{⊗2} P_{[8]})/D_{[8]}` at `n = 1`, summed over the nine Dicke
/// states that span `Sym₈(C²)`.
pub fn second_moment_dicke_oracle() -> Result<f64> {
    let p = stab_projector(1, 4)?;
    let mut total = 0.0;
    for w in 0..=8u32 {
        let support: Vec<usize> = (0..256usize).filter(|y| y.count_ones() == w).collect();
        let amp = 1.0 / (support.len() as f64).sqrt();
        let mut acc = Complex64::new(0.0, 0.0);
        for &y in &support {
            for &x in &support {
                let (yh, yl) = (y >> 4, y & 15);
                let (xh, xl) = (x >> 4, x & 15);
                acc += p.get(yh, xh) * p.get(yl, xl) * amp * amp;
            }
        }
        total += acc.re;
    }
    Ok(total / sym_dim(2, 8) as f64)
}

/// Seeded sample statistics with the second moment kept alongside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl MomentEstimate {
    fn from_sums(s1: f64, s2: f64, m: usize, seed: u64) -> Self {
        let mean = s1 / m as f64;
        let second_moment = s2 / m as f64;
        let variance = (second_moment - mean * mean).max(0.0) * m as f64 / (m as f64 - 1.0).max(1.0);
        MomentEstimate {
            mean,
            second_moment,
            variance,
            stderr: (variance / m as f64).sqrt(),
            samples: m,
            seed,
        }
    }

    pub fn z_score(&self, target: f64) -> f64 {
        Estimate {
            mean: self.mean,
            stderr: self.stderr,
            samples: self.samples,
        }
        .z_score(target)
    }
}

/// `α₊` of `samples` Haar-random states, drawn from [`SHARDS`] ChaCha streams
/// so that the result does not depend on the thread count.
pub fn sample_alpha_plus(n: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let d = (1u64 << n) as f64;
    let per = samples.div_ceil(SHARDS as usize);
    let shards: Vec<Vec<f64>> = (0..SHARDS)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let start = s as usize * per;
            let count = per.min(samples.saturating_sub(start));
            (0..count)
                .map(|_| {
                    let psi = sample_uniform_state(n, &mut rng);
                    let xi = characteristic_function(&psi).expect("normalized");
                    ell4_norm4(&xi) / (d * d)
                })
                .collect()
        })
        .collect();
    Ok(shards.into_iter().flatten().collect())
}

fn estimate(xs: &[f64], seed: u64) -> MomentEstimate {
    let s1: f64 = xs.iter().sum();
    let s2: f64 = xs.iter().map(|x| x * x).sum();
    MomentEstimate::from_sums(s1, s2, xs.len(), seed)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedForms {
    pub e_alpha: RationalOut,
    pub e_alpha2: RationalOut,
    pub var_alpha: RationalOut,
    pub e_epsilon2: RationalOut,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailRow {
    pub xi: f64,
    pub empirical: f64,
    pub stderr: f64,
    pub chebyshev: f64,
    pub levy: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub d: u64,
    pub samples: usize,
    pub seed: u64,
    pub alpha_plus: MomentEstimate,
    pub epsilon: MomentEstimate,
    /// Samples of `ε²`, whose mean estimates `E[ε²]`.
    pub epsilon_squared: MomentEstimate,
    pub closed_forms: ClosedForms,
    pub z_alpha: f64,
    pub z_epsilon_mean: f64,
    pub z_epsilon2: f64,
    pub tails: Vec<TailRow>,
    pub z_budget: f64,
    pub pass: bool,
}

/// Minimum sample count for [`concentration_report`].
pub const MIN_CONCENTRATION_SAMPLES: usize = 10_000;

/// Standard errors allowed between Monte-Carlo means and exact values.
pub const Z_BUDGET: f64 = 4.0;

/// Monte-Carlo moments of `α₊` and `ε`, and empirical tails of `|ε|` against
/// the Chebyshev bound `6(d−1)/((d+5)(d+6)(d+7)ξ²)` and the Lévy bound
/// `2exp(−dξ²/(509(d+3)²))`.
pub fn concentration_report(
    n: usize,
    samples: usize,
    thresholds: &[f64],
    seed: u64,
) -> Result<ConcentrationReport> {
    if samples < MIN_CONCENTRATION_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_CONCENTRATION_SAMPLES} samples"
        )));
    }
    if n > MAX_EXACT_MOMENT_N {
        return Err(Error::Capacity(format!("closed forms need n ≤ {MAX_EXACT_MOMENT_N}")));
    }
    let d = (1u64 << n) as f64;
    let alphas = sample_alpha_plus(n, samples, seed)?;
    let eps: Vec<f64> = alphas.iter().map(|a| epsilon_from_ell4(a * d * d, d)).collect();
    let eps2: Vec<f64> = eps.iter().map(|e| e * e).collect();
    let alpha_plus = estimate(&alphas, seed);
    let epsilon = estimate(&eps, seed);
    let epsilon_squared = estimate(&eps2, seed);
    let m1 = exact_first_moment(n);
    let m2 = exact_second_moment(n)?;
    let e2 = exact_epsilon_second_moment(n)?;
    let f = |r: Rational| r.to_f64().unwrap_or(f64::NAN);
    let z_alpha = alpha_plus.z_score(f(m1));
    let z_epsilon_mean = epsilon.z_score(0.0);
    let z_epsilon2 = epsilon_squared.z_score(f(e2));
    let m = eps.len() as f64;
    let tails: Vec<TailRow> = thresholds
        .iter()
        .map(|&xi| {
            let hits = eps.iter().filter(|e| e.abs() >= xi).count() as f64;
            let p = hits / m;
            let stderr = (p * (1.0 - p) / m).sqrt().max(1.0 / m);
            let chebyshev = 6.0 * (d - 1.0) / ((d + 5.0) * (d + 6.0) * (d + 7.0) * xi * xi);
            let levy = 2.0 * (-d * xi * xi / (509.0 * (d + 3.0).powi(2))).exp();
            TailRow {
                xi,
                empirical: p,
                stderr,
                chebyshev,
                levy,
                pass: p <= chebyshev.min(levy) + 3.0 * stderr,
            }
        })
        .collect();
    let pass = z_alpha <= Z_BUDGET
        && z_epsilon_mean <= Z_BUDGET
        && z_epsilon2 <= Z_BUDGET
        && tails.iter().all(|t| t.pass);
    Ok(ConcentrationReport {
        n,
        d: d as u64,
        samples: eps.len(),
        seed,
        alpha_plus,
        epsilon,
        epsilon_squared,
        closed_forms: ClosedForms {
            e_alpha: m1.into(),
            e_alpha2: m2.into(),
            var_alpha: (m2 - m1 * m1).into(),
            e_epsilon2: e2.into(),
        },
        z_alpha,
        z_epsilon_mean,
        z_epsilon2,
        tails,
        z_budget: Z_BUDGET,
        pass,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub n: usize,
    pub pairs: usize,
    pub seed: u64,
    /// Largest `d·|α₊(ψ)−α₊(φ)|/‖ψ−φ‖` over independent random pairs.
    pub max_ratio_random: f64,
    /// The same over small perturbations of random stabilizer states.
    pub max_ratio_near_stabilizer: f64,
    pub proven_bound: f64,
    pub conjectured_bound: f64,
    pub pass: bool,
}

pub const MIN_LIPSCHITZ_PAIRS: usize = 1000;

/// Probes the Lipschitz constant of `α₊` on sampled pairs.
pub fn lipschitz_probe(n: usize, pairs: usize, seed: u64) -> Result<LipschitzReport> {
    if pairs < MIN_LIPSCHITZ_PAIRS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_LIPSCHITZ_PAIRS} pairs"
        )));
    }
    let d = (1u64 << n) as f64;
    let alpha = |psi: &StateVector| -> f64 {
        ell4_norm4(&characteristic_function(psi).expect("normalized")) / (d * d)
    };
    let ratio = |a: &StateVector, b: &StateVector| -> f64 {
        let dist = a.distance(b);
        if dist <= 1e-8 {
            0.0
        } else {
            d * (alpha(a) - alpha(b)).abs() / dist
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_random = 0.0f64;
    let mut max_stab = 0.0f64;
    for k in 0..pairs {
        let a = sample_uniform_state(n, &mut rng);
        let b = sample_uniform_state(n, &mut rng);
        max_random = max_random.max(ratio(&a, &b));
        let s = random_clifford(n, &mut rng)
            .apply(&StateVector::basis(n, 0))
            .expect("same size");
        let g = sample_uniform_state(n, &mut rng);
        let eta = 10f64.powf(-1.0 - 3.0 * (k as f64 / pairs as f64));
        let amps: Vec<Complex64> = s
            .amplitudes()
            .iter()
            .zip(g.amplitudes())
            .map(|(x, y)| x + y * eta)
            .collect();
        let p = StateVector::new(amps)?.normalized()?;
        max_stab = max_stab.max(ratio(&s, &p));
    }
    let proven_bound = 5.4;
    Ok(LipschitzReport {
        n,
        pairs,
        seed,
        max_ratio_random: max_random,
        max_ratio_near_stabilizer: max_stab,
        proven_bound,
        conjectured_bound: 1.0,
        pass: max_random.max(max_stab) <= proven_bound,
    })
}

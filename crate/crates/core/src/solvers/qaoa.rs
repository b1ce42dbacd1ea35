//! Statevector QAOA with an X mixer.
//!
//! Basis index `b` encodes the assignment `x_i = (b >> i) & 1`. The state
//! starts in the uniform superposition; each layer applies the diagonal phase
//! `exp(-i gamma E(x))` and then `exp(-i beta H_M)` qubit by qubit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::nelder_mead::{nelder_mead, NelderMeadOptions};
use super::SolveResult;
use crate::error::{Error, Result};
use crate::pbo::{to_ising, BinaryPolynomial, EncodedProblem, IsingModel};

/// Sign of the transverse-field mixer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixerSign {
    /// `H_M = -sum_i X_i`, whose ground state is the uniform superposition.
    #[default]
    Negative,
    /// `H_M = +sum_i X_i`.
    Positive,
}

impl MixerSign {
    /// Rotation angle `a` such that each qubit gets `exp(i a X)`.
    fn rotation(self, beta: f64) -> f64 {
        match self {
            MixerSign::Negative => beta,
            MixerSign::Positive => -beta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub depth: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub top_k: usize,
    pub seed: u64,
    pub max_qubits: usize,
    pub mixer: MixerSign,
}

impl Default for QaoaParams {
    fn default() -> Self {
        Self {
            depth: 1,
            restarts: 10,
            max_iters: 200,
            top_k: 10,
            seed: 0,
            max_qubits: 20,
            mixer: MixerSign::Negative,
        }
    }
}

impl QaoaParams {
    pub fn validate(&self, num_vars: usize) -> Result<()> {
        if self.depth == 0 || self.restarts == 0 || self.top_k == 0 {
            return Err(Error::InvalidParam("depth, restarts and top_k must be positive".into()));
        }
        if num_vars > self.max_qubits {
            return Err(Error::TooLarge(format!(
                "{num_vars} qubits exceed the simulator cap of {}",
                self.max_qubits
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaOutcome {
    /// `|amplitude|^2` per basis state.
    pub probabilities: Vec<f64>,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    /// `<E>` at the returned angles.
    pub expectation: f64,
    /// Objective evaluations spent by the optimiser.
    pub evaluations: usize,
}

/// Energies of all `2^n` basis states.
pub fn diagonal(poly: &BinaryPolynomial) -> Vec<f64> {
    let compiled = poly.compile();
    (0u64..1 << poly.num_vars()).map(|b| compiled.evaluate_bits(b)).collect()
}

/// Final QAOA state for the given angles.
pub fn simulate_state(diag: &[f64], gammas: &[f64], betas: &[f64], mixer: MixerSign) -> Vec<Complex64> {
    let dim = diag.len();
    let n = dim.trailing_zeros() as usize;
    let amp = 1.0 / (dim as f64).sqrt();
    let mut psi = vec![Complex64::new(amp, 0.0); dim];
    for (&gamma, &beta) in gammas.iter().zip(betas) {
        for (a, &d) in psi.iter_mut().zip(diag) {
            *a *= Complex64::cis(-gamma * d);
        }
        let angle = mixer.rotation(beta);
        let (c, s) = (angle.cos(), angle.sin());
        for q in 0..n {
            let stride = 1usize << q;
            for block in (0..dim).step_by(stride << 1) {
                for i in block..block + stride {
                    let (a, b) = (psi[i], psi[i + stride]);
                    // exp(i angle X) = cos I + i sin X
                    psi[i] = Complex64::new(c * a.re - s * b.im, c * a.im + s * b.re);
                    psi[i + stride] = Complex64::new(c * b.re - s * a.im, c * b.im + s * a.re);
                }
            }
        }
    }
    psi
}

fn expectation_from_state(psi: &[Complex64], diag: &[f64]) -> f64 {
    psi.iter().zip(diag).map(|(a, d)| a.norm_sqr() * d).sum()
}

/// Closed-form `<E>` of a single QAOA layer on an Ising energy.
///
/// Heisenberg-picture expansion of `exp(-i beta H_M)` around each one- and
/// two-spin observable; only products over the other spins' couplings
/// remain. Costs `O(n)` per coupled pair instead of `O(n 2^n)`.
pub fn qaoa_expectation_depth1(model: &IsingModel, gamma: f64, beta: f64, mixer: MixerSign) -> f64 {
    let n = model.num_spins();
    let j = model.dense_couplings();
    let theta = 2.0 * gamma;
    let b2 = 2.0 * mixer.rotation(beta);
    let (sb, cb) = (b2.sin(), b2.cos());

    let cj: Vec<f64> = j.iter().map(|&v| (theta * v).cos()).collect();
    let sj: Vec<f64> = j.iter().map(|&v| (theta * v).sin()).collect();
    let h = &model.h;

    let mut total = model.offset;
    for u in 0..n {
        if h[u] != 0.0 {
            let prod: f64 = (0..n).filter(|&w| w != u).map(|w| cj[u * n + w]).product();
            total += h[u] * (-sb * (theta * h[u]).sin() * prod);
        }
    }
    for (&(u, v), &juv) in &model.j {
        let mut pu = 1.0;
        let mut pv = 1.0;
        let mut minus = 1.0;
        let mut plus = 1.0;
        for w in (0..n).filter(|&w| w != u && w != v) {
            let (cu, su, cv, sv) = (cj[u * n + w], sj[u * n + w], cj[v * n + w], sj[v * n + w]);
            pu *= cu;
            pv *= cv;
            minus *= cu * cv + su * sv;
            plus *= cu * cv - su * sv;
        }
        let linear = -sb * cb * (theta * juv).sin() * ((theta * h[u]).cos() * pu + (theta * h[v]).cos() * pv);
        let quad = 0.5
            * sb
            * sb
            * ((theta * (h[u] - h[v])).cos() * minus - (theta * (h[u] + h[v])).cos() * plus);
        total += juv * (linear + quad);
    }
    total
}

/// Optimises the angles from `restarts` uniform starts in `[0, pi)` and
/// returns the final-state distribution at the best angles found.
///
/// Depth-1 runs on polynomials of degree <= 2 optimise the closed-form
/// expectation; everything else uses the statevector.
pub fn qaoa_statevector(poly: &BinaryPolynomial, params: &QaoaParams) -> Result<QaoaOutcome> {
    let nv = poly.num_vars();
    params.validate(nv)?;
    let diag = diagonal(poly);
    let depth = params.depth;
    let mixer = params.mixer;
    let ising = if depth == 1 && poly.degree() <= 2 {
        Some(to_ising(poly)?)
    } else {
        None
    };
    let objective = |angles: &[f64]| -> f64 {
        let (g, b) = angles.split_at(depth);
        match &ising {
            Some(m) => qaoa_expectation_depth1(m, g[0], b[0], mixer),
            None => expectation_from_state(&simulate_state(&diag, g, b, mixer), &diag),
        }
    };

    let opts = NelderMeadOptions {
        max_iters: params.max_iters,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut evaluations = 0;
    for _ in 0..params.restarts {
        let start: Vec<f64> = (0..2 * depth).map(|_| rng.gen_range(0.0..PI)).collect();
        let r = nelder_mead(objective, &start, &opts);
        evaluations += r.evaluations;
        if best.as_ref().is_none_or(|(_, v)| r.value < *v) {
            best = Some((r.x, r.value));
        }
    }
    let (angles, _) = best.expect("at least one restart");
    let (gammas, betas) = angles.split_at(depth);
    let psi = simulate_state(&diag, gammas, betas, mixer);
    Ok(QaoaOutcome {
        expectation: expectation_from_state(&psi, &diag),
        probabilities: psi.iter().map(|a| a.norm_sqr()).collect(),
        gammas: gammas.to_vec(),
        betas: betas.to_vec(),
        evaluations,
    })
}

/// Picks the minimum-cut balanced partition among the `top_k` most probable
/// basis states (ties by smaller index). Falls back to the most probable state,
/// flagged infeasible, when none of them is balanced.
pub fn select_best_balanced(
    dist: &[f64],
    problem: &EncodedProblem,
    top_k: usize,
) -> Result<SolveResult> {
    let nv = problem.num_vars();
    if dist.len() != 1usize << nv {
        return Err(Error::Dimension {
            expected: 1 << nv,
            got: dist.len(),
        });
    }
    let order = |a: &usize, b: &usize| dist[*b].total_cmp(&dist[*a]).then(a.cmp(b));
    let mut idx: Vec<usize> = (0..dist.len()).collect();
    let k = top_k.clamp(1, idx.len());
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, order);
        idx.truncate(k);
    }
    idx.sort_by(order);

    let to_bits = |b: usize| -> Vec<u8> { (0..nv).map(|i| (b >> i & 1) as u8).collect() };
    let mut chosen: Option<SolveResult> = None;
    for &b in &idx {
        let r = SolveResult::from_assignment(problem, to_bits(b), "qaoa", 0, 0.0)?;
        if !r.feasible {
            continue;
        }
        let better = match (&chosen, r.cut_value) {
            (None, _) => true,
            (Some(c), Some(v)) => c.cut_value.is_none_or(|cv| v < cv - 1e-12),
            (Some(_), None) => false,
        };
        if better {
            chosen = Some(r);
        }
    }
    match chosen {
        Some(r) => Ok(r),
        None => SolveResult::from_assignment(problem, to_bits(idx[0]), "qaoa", 0, 0.0),
    }
}

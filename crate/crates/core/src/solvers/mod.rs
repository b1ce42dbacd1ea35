//! Exhaustive, annealing and QAOA solvers, plus the glue that turns raw
//! assignments into decoded, scored [`SolveResult`]s.

mod anneal;
mod exact;
mod nelder_mead;
mod qaoa;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::NodePartition;
use crate::pbo::EncodedProblem;

pub use anneal::{simulated_annealing, SaParams, Sample};
pub use exact::{exact_balanced, exact_min_poly, MAX_EXACT_BITS};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};
pub use qaoa::{
    qaoa_expectation_depth1, qaoa_statevector, select_best_balanced, simulate_state, MixerSign,
    QaoaOutcome, QaoaParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Qaoa,
    Sa,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Qaoa => "qaoa",
            SolverKind::Sa => "sa",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(SolverKind::Exact),
            "sa" => Ok(SolverKind::Sa),
            "qaoa" | "sqaoa" => Ok(SolverKind::Qaoa),
            _ => Err(Error::InvalidParam(format!("unknown solver `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub solver: String,
    pub seed: u64,
    pub assignment: Vec<u8>,
    /// `None` when the assignment is not a valid one-hot encoding.
    pub decoded: Option<NodePartition>,
    pub energy: f64,
    /// Oracle cut value of `decoded`, when it is defined.
    pub cut_value: Option<f64>,
    /// The decoded partition satisfies the balance constraint.
    pub feasible: bool,
    pub wall_seconds: f64,
}

impl SolveResult {
    pub fn from_assignment(
        problem: &EncodedProblem,
        assignment: Vec<u8>,
        solver: &str,
        seed: u64,
        wall_seconds: f64,
    ) -> Result<Self> {
        let energy = problem.energy.evaluate(&assignment)?;
        let decoded = problem.decode(&assignment);
        let cut_value = decoded.as_ref().and_then(|p| problem.cut_value(p).ok());
        let feasible = decoded.as_ref().is_some_and(NodePartition::is_balanced);
        Ok(Self {
            solver: solver.to_string(),
            seed,
            assignment,
            decoded,
            energy,
            cut_value,
            feasible,
            wall_seconds,
        })
    }
}

/// Decodes a one-hot assignment of `n * k` bits. Valid iff every vertex has
/// exactly one bit set.
pub fn decode_one_hot(x: &[u8], n: usize, k: usize) -> Option<NodePartition> {
    if x.len() != n * k || k == 0 {
        return None;
    }
    let labels = x
        .chunks(k)
        .map(|block| {
            let mut set = block.iter().enumerate().filter(|(_, &b)| b != 0);
            match (set.next(), set.next()) {
                (Some((c, _)), None) => Some(c),
                _ => None,
            }
        })
        .collect::<Option<Vec<_>>>()?;
    NodePartition::new(labels, k).ok()
}

/// Exhaustive balanced optimum, returned in the problem's encoding.
pub fn solve_exact(problem: &EncodedProblem) -> Result<SolveResult> {
    let start = Instant::now();
    let (_, best) = exact_balanced(&problem.hypergraph, &problem.spec.cut, problem.spec.k)?;
    let x = problem.encode_partition(&best);
    SolveResult::from_assignment(problem, x, "exact", 0, start.elapsed().as_secs_f64())
}

/// One result per annealing read.
pub fn solve_sa(problem: &EncodedProblem, params: &SaParams) -> Result<Vec<SolveResult>> {
    let start = Instant::now();
    let samples = simulated_annealing(&problem.energy, params)?;
    let secs = start.elapsed().as_secs_f64() / samples.len() as f64;
    samples
        .into_iter()
        .map(|s| SolveResult::from_assignment(problem, s.assignment, "sa", params.seed, secs))
        .collect()
}

/// Energies closer than this count as ties in [`best_read`].
pub const ENERGY_TIE_TOL: f64 = 1e-9;

/// Lowest-energy read. Among reads tied on energy a feasible one is preferred,
/// then the earliest.
pub fn best_read(results: Vec<SolveResult>) -> Option<SolveResult> {
    results.into_iter().reduce(|best, r| {
        let lower = r.energy < best.energy - ENERGY_TIE_TOL;
        let tie = (r.energy - best.energy).abs() <= ENERGY_TIE_TOL;
        if lower || (tie && r.feasible && !best.feasible) {
            r
        } else {
            best
        }
    })
}

/// Optimises the QAOA angles, then applies the top-k balanced selection.
pub fn solve_qaoa(problem: &EncodedProblem, params: &QaoaParams) -> Result<SolveResult> {
    let start = Instant::now();
    let outcome = qaoa_statevector(&problem.energy, params)?;
    let mut result = select_best_balanced(&outcome.probabilities, problem, params.top_k)?;
    result.seed = params.seed;
    result.wall_seconds = start.elapsed().as_secs_f64();
    Ok(result)
}

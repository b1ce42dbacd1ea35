//! Single-flip Metropolis annealing over binary polynomials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pbo::{BinaryPolynomial, CompiledPolynomial};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaParams {
    pub reads: usize,
    pub sweeps: usize,
    pub beta_min: f64,
    pub beta_max: f64,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            reads: 100,
            sweeps: 1000,
            beta_min: 0.1,
            beta_max: 10.0,
            seed: 0,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        if self.reads == 0 || self.sweeps == 0 {
            return Err(Error::InvalidParam("reads and sweeps must be positive".into()));
        }
        if !(self.beta_min > 0.0 && self.beta_min < self.beta_max && self.beta_max.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "need 0 < beta_min < beta_max, got {} and {}",
                self.beta_min, self.beta_max
            )));
        }
        Ok(())
    }

    /// Geometric inverse-temperature ladder, one value per sweep.
    pub fn schedule(&self) -> Vec<f64> {
        if self.sweeps == 1 {
            return vec![self.beta_max];
        }
        let ratio = self.beta_max / self.beta_min;
        (0..self.sweeps)
            .map(|s| self.beta_min * ratio.powf(s as f64 / (self.sweeps - 1) as f64))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub assignment: Vec<u8>,
    pub energy: f64,
}

/// Flip-energy oracle for the Metropolis loop.
trait Moves {
    fn reset(&mut self, x: &[u8]);
    fn delta(&self, x: &[u8], i: usize) -> f64;
    fn commit(&mut self, x: &[u8], i: usize);
}

/// Local fields `f_i = a_i + sum_j Q_ij x_j` for degree <= 2, so that a flip
/// costs `+/- f_i` and updates only the neighbours of `i`.
struct QuadraticFields {
    linear: Vec<f64>,
    neighbours: Vec<Vec<(usize, f64)>>,
    field: Vec<f64>,
}

impl QuadraticFields {
    fn new(poly: &BinaryPolynomial) -> Self {
        let n = poly.num_vars();
        let mut linear = vec![0.0; n];
        let mut neighbours = vec![Vec::new(); n];
        for (k, c) in poly.terms() {
            match *k {
                [] => {}
                [i] => linear[i] += c,
                [i, j] => {
                    neighbours[i].push((j, c));
                    neighbours[j].push((i, c));
                }
                _ => unreachable!("degree <= 2"),
            }
        }
        Self {
            field: linear.clone(),
            linear,
            neighbours,
        }
    }
}

impl Moves for QuadraticFields {
    fn reset(&mut self, x: &[u8]) {
        for i in 0..self.field.len() {
            self.field[i] = self.linear[i]
                + self.neighbours[i]
                    .iter()
                    .filter(|(j, _)| x[*j] != 0)
                    .map(|(_, c)| c)
                    .sum::<f64>();
        }
    }

    fn delta(&self, x: &[u8], i: usize) -> f64 {
        if x[i] != 0 {
            -self.field[i]
        } else {
            self.field[i]
        }
    }

    fn commit(&mut self, x: &[u8], i: usize) {
        // x[i] already holds the new value.
        let step = if x[i] != 0 { 1.0 } else { -1.0 };
        for &(j, c) in &self.neighbours[i] {
            self.field[j] += step * c;
        }
    }
}

impl Moves for CompiledPolynomial {
    fn reset(&mut self, _: &[u8]) {}

    fn delta(&self, x: &[u8], i: usize) -> f64 {
        self.flip_delta(x, i)
    }

    fn commit(&mut self, _: &[u8], _: usize) {}
}

/// Runs `params.reads` independent anneals and returns each final state.
///
/// Each read starts from a uniformly random assignment and performs
/// `sweeps` in-order passes of single-bit Metropolis proposals, with the
/// inverse temperature raised geometrically once per sweep. Read `r` draws from
/// ChaCha stream `r` of `params.seed`, so results are reproducible.
pub fn simulated_annealing(poly: &BinaryPolynomial, params: &SaParams) -> Result<Vec<Sample>> {
    params.validate()?;
    let schedule = params.schedule();
    if poly.degree() <= 2 {
        let mut moves = QuadraticFields::new(poly);
        anneal_reads(poly, params, &schedule, &mut moves)
    } else {
        let mut moves = poly.compile();
        anneal_reads(poly, params, &schedule, &mut moves)
    }
}

fn anneal_reads<M: Moves>(
    poly: &BinaryPolynomial,
    params: &SaParams,
    schedule: &[f64],
    moves: &mut M,
) -> Result<Vec<Sample>> {
    let n = poly.num_vars();
    let mut out = Vec::with_capacity(params.reads);
    for read in 0..params.reads {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(read as u64);
        let mut x: Vec<u8> = (0..n).map(|_| rng.gen::<bool>() as u8).collect();
        moves.reset(&x);
        for &beta in schedule {
            for i in 0..n {
                let delta = moves.delta(&x, i);
                if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                    x[i] ^= 1;
                    moves.commit(&x, i);
                }
            }
        }
        let energy = poly.evaluate(&x)?;
        out.push(Sample { assignment: x, energy });
    }
    Ok(out)
}

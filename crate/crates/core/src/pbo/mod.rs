//! Multilinear pseudo-Boolean polynomials.
//!
//! A polynomial over `num_vars` binary variables is stored as a map from a
//! sorted, duplicate-free index tuple to its coefficient. The empty tuple is
//! the constant term. `x_i^2 = x_i` is applied on insertion, and terms whose
//! magnitude drops below [`ZERO_TOL`] are removed.

mod encode;
mod ising;
mod quadratize;
mod text;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use encode::{
    build_hrwc, build_multi_balance, build_multi_cut, build_multi_partition_penalty,
    build_two_way_balance, build_two_way_cut, compose_energy, one_hot_index, EncodedProblem,
    EncodingSpec, Layout,
};
pub use ising::{to_ising, IsingModel};
pub use quadratize::quadratize_rosenberg;
pub use text::{parse_model_text, write_ising_text, write_poly_text, ModelText};

/// Coefficients at or below this magnitude are dropped.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryPolynomial {
    num_vars: usize,
    terms: BTreeMap<Vec<usize>, f64>,
}

impl BinaryPolynomial {
    pub fn zero(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: f64) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(&[], c);
        p
    }

    /// The single variable `x_i`.
    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(&[i], 1.0);
        p
    }

    pub fn from_terms<I, T>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, f64)>,
        T: AsRef<[usize]>,
    {
        let mut p = Self::zero(num_vars);
        for (vars, c) in terms {
            let vars = vars.as_ref();
            if let Some(&v) = vars.iter().find(|&&v| v >= num_vars) {
                return Err(Error::OutOfRange {
                    index: v,
                    limit: num_vars,
                });
            }
            p.add_term(vars, c);
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Identically zero; same as [`BinaryPolynomial::is_empty`].
    pub fn is_zero(&self) -> bool {
        self.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn coeff(&self, vars: &[usize]) -> f64 {
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.terms.get(&Vec::new()).copied().unwrap_or(0.0)
    }

    /// Highest stored term order; 0 for constant or zero polynomials.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Adds `c * prod(vars)`. Indices are sorted and deduplicated; panics if an
    /// index is out of range.
    pub fn add_term(&mut self, vars: &[usize], c: f64) {
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        assert!(
            key.last().is_none_or(|&v| v < self.num_vars),
            "variable index out of range"
        );
        self.add_canonical(key, c);
    }

    fn add_canonical(&mut self, key: Vec<usize>, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(slot) => {
                if c.abs() > ZERO_TOL {
                    slot.insert(c);
                }
            }
            Entry::Occupied(mut slot) => {
                let sum = *slot.get() + c;
                if sum.abs() <= ZERO_TOL {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &BinaryPolynomial, factor: f64) -> Result<()> {
        self.check_vars(other.num_vars)?;
        if factor == 0.0 {
            return Ok(());
        }
        for (k, &c) in &other.terms {
            self.add_canonical(k.clone(), factor * c);
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (k, &c) in &self.terms {
            out.add_canonical(k.clone(), factor * c);
        }
        out
    }

    /// Same terms over a larger variable set.
    pub fn with_num_vars(&self, num_vars: usize) -> Result<Self> {
        if num_vars < self.num_vars && self.terms.keys().flatten().any(|&v| v >= num_vars) {
            return Err(Error::Dimension {
                expected: self.num_vars,
                got: num_vars,
            });
        }
        Ok(Self {
            num_vars,
            terms: self.terms.clone(),
        })
    }

    fn check_vars(&self, other: usize) -> Result<()> {
        if self.num_vars == other {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.num_vars,
                got: other,
            })
        }
    }

    fn check_assignment(&self, x: &[u8]) -> Result<()> {
        self.check_vars(x.len())
    }

    pub fn evaluate(&self, x: &[u8]) -> Result<f64> {
        self.check_assignment(x)?;
        Ok(self
            .terms
            .iter()
            .filter(|(k, _)| k.iter().all(|&v| x[v] != 0))
            .map(|(_, &c)| c)
            .sum())
    }

    /// `evaluate(x with bit i flipped) - evaluate(x)`, using only the terms
    /// that contain `i`.
    pub fn flip_delta(&self, x: &[u8], i: usize) -> Result<f64> {
        self.check_assignment(x)?;
        if i >= self.num_vars {
            return Err(Error::OutOfRange {
                index: i,
                limit: self.num_vars,
            });
        }
        let sign = if x[i] != 0 { -1.0 } else { 1.0 };
        let partial: f64 = self
            .terms
            .iter()
            .filter(|(k, _)| k.binary_search(&i).is_ok())
            .filter(|(k, _)| k.iter().all(|&v| v == i || x[v] != 0))
            .map(|(_, &c)| c)
            .sum();
        Ok(sign * partial)
    }

    /// Flat representation for hot loops.
    pub fn compile(&self) -> CompiledPolynomial {
        CompiledPolynomial::new(self)
    }
}

impl Add for &BinaryPolynomial {
    type Output = BinaryPolynomial;

    fn add(self, rhs: &BinaryPolynomial) -> BinaryPolynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, 1.0).expect("variable count mismatch");
        out
    }
}

impl Sub for &BinaryPolynomial {
    type Output = BinaryPolynomial;

    fn sub(self, rhs: &BinaryPolynomial) -> BinaryPolynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0).expect("variable count mismatch");
        out
    }
}

impl Neg for &BinaryPolynomial {
    type Output = BinaryPolynomial;

    fn neg(self) -> BinaryPolynomial {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &BinaryPolynomial {
    type Output = BinaryPolynomial;

    fn mul(self, rhs: f64) -> BinaryPolynomial {
        self.scaled(rhs)
    }
}

/// Multilinear product: index tuples are merged and `x^2 = x` applied.
impl Mul for &BinaryPolynomial {
    type Output = BinaryPolynomial;

    fn mul(self, rhs: &BinaryPolynomial) -> BinaryPolynomial {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = BinaryPolynomial::zero(self.num_vars);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &rhs.terms {
                out.add_canonical(merge_sorted(a, b), ca * cb);
            }
        }
        out
    }
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Term list with a per-variable incidence index.
#[derive(Debug, Clone)]
pub struct CompiledPolynomial {
    num_vars: usize,
    constant: f64,
    vars: Vec<Vec<usize>>,
    coeffs: Vec<f64>,
    incident: Vec<Vec<usize>>,
    masks: Option<Vec<u64>>,
}

impl CompiledPolynomial {
    fn new(poly: &BinaryPolynomial) -> Self {
        let mut vars = Vec::new();
        let mut coeffs = Vec::new();
        let mut constant = 0.0;
        let mut incident = vec![Vec::new(); poly.num_vars];
        for (k, c) in poly.terms() {
            if k.is_empty() {
                constant = c;
                continue;
            }
            for &v in k {
                incident[v].push(vars.len());
            }
            vars.push(k.to_vec());
            coeffs.push(c);
        }
        let masks = (poly.num_vars <= 64).then(|| {
            vars.iter()
                .map(|k| k.iter().fold(0u64, |m, &v| m | (1 << v)))
                .collect()
        });
        Self {
            num_vars: poly.num_vars,
            constant,
            vars,
            coeffs,
            incident,
            masks,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn evaluate(&self, x: &[u8]) -> f64 {
        self.constant
            + self
                .vars
                .iter()
                .zip(&self.coeffs)
                .filter(|(k, _)| k.iter().all(|&v| x[v] != 0))
                .map(|(_, c)| c)
                .sum::<f64>()
    }

    /// Evaluates at the assignment whose bit `i` is `x_i`. Requires
    /// `num_vars <= 64`.
    pub fn evaluate_bits(&self, bits: u64) -> f64 {
        let masks = self.masks.as_ref().expect("more than 64 variables");
        self.constant
            + masks
                .iter()
                .zip(&self.coeffs)
                .filter(|(&m, _)| bits & m == m)
                .map(|(_, c)| c)
                .sum::<f64>()
    }

    pub fn flip_delta(&self, x: &[u8], i: usize) -> f64 {
        let sign = if x[i] != 0 { -1.0 } else { 1.0 };
        let partial: f64 = self.incident[i]
            .iter()
            .filter(|&&t| self.vars[t].iter().all(|&v| v == i || x[v] != 0))
            .map(|&t| self.coeffs[t])
            .sum();
        sign * partial
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> BinaryPolynomial {
        // x0 + x1 - x0 x1
        BinaryPolynomial::from_terms(2, [(vec![0], 1.0), (vec![1], 1.0), (vec![0, 1], -1.0)]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(sample().evaluate(&[1, 1]).unwrap(), 1.0);
        assert_eq!(BinaryPolynomial::constant(3, 2.5).evaluate(&[0, 1, 0]).unwrap(), 2.5);
        assert!(sample().evaluate(&[1]).is_err());
    }

    #[test]
    fn flip_delta_examples() {
        let p = BinaryPolynomial::var(1, 0);
        assert_eq!(p.flip_delta(&[0], 0).unwrap(), 1.0);
        let q = BinaryPolynomial::from_terms(2, [(vec![0, 1], 1.0)]).unwrap();
        assert_eq!(q.flip_delta(&[1, 0], 1).unwrap(), 1.0);
        assert!(q.flip_delta(&[1, 0], 2).is_err());
    }

    #[test]
    fn multilinear_normalisation() {
        let mut p = BinaryPolynomial::zero(3);
        p.add_term(&[2, 0, 2], 1.5);
        assert_eq!(p.coeff(&[0, 2]), 1.5);
        p.add_term(&[0, 2], -1.5);
        assert!(p.is_zero());
        let x = BinaryPolynomial::var(3, 1);
        assert_eq!((&x * &x), x);
        assert_eq!(BinaryPolynomial::zero(4).degree(), 0);
    }

    #[test]
    fn out_of_range_terms_rejected() {
        assert!(BinaryPolynomial::from_terms(2, [(vec![2], 1.0)]).is_err());
    }

    fn arb_poly(max_vars: usize) -> impl Strategy<Value = (BinaryPolynomial, Vec<u8>)> {
        (1..=max_vars).prop_flat_map(|n| {
            let term = (proptest::collection::btree_set(0..n, 0..=4.min(n)), -5i32..=5);
            (
                proptest::collection::vec(term, 0..12),
                proptest::collection::vec(0u8..=1, n),
            )
                .prop_map(move |(terms, x)| {
                    let p = BinaryPolynomial::from_terms(
                        n,
                        terms
                            .into_iter()
                            .map(|(s, c)| (s.into_iter().collect::<Vec<_>>(), c as f64)),
                    )
                    .unwrap();
                    (p, x)
                })
        })
    }

    proptest! {
        #[test]
        fn flip_delta_matches_double_evaluation((p, x) in arb_poly(8), seed in 0usize..8) {
            let i = seed % p.num_vars();
            let mut y = x.clone();
            y[i] ^= 1;
            let expected = p.evaluate(&y).unwrap() - p.evaluate(&x).unwrap();
            prop_assert!((p.flip_delta(&x, i).unwrap() - expected).abs() < 1e-9);
            prop_assert!((p.compile().flip_delta(&x, i) - expected).abs() < 1e-9);
        }

        #[test]
        fn compiled_evaluation_agrees((p, x) in arb_poly(10)) {
            let c = p.compile();
            let bits = x.iter().enumerate().fold(0u64, |b, (i, &v)| b | ((v as u64) << i));
            let direct = p.evaluate(&x).unwrap();
            prop_assert!((c.evaluate(&x) - direct).abs() < 1e-9);
            prop_assert!((c.evaluate_bits(bits) - direct).abs() < 1e-9);
        }

        #[test]
        fn product_evaluates_pointwise((p, x) in arb_poly(6), (q, _) in arb_poly(6)) {
            let q = BinaryPolynomial::from_terms(p.num_vars(), q.terms().filter(|(k, _)| k.iter().all(|&v| v < p.num_vars())).map(|(k, c)| (k.to_vec(), c))).unwrap();
            let prod = &p * &q;
            let expected = p.evaluate(&x).unwrap() * q.evaluate(&x).unwrap();
            prop_assert!((prod.evaluate(&x).unwrap() - expected).abs() < 1e-6);
        }
    }
}

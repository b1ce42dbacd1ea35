use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BinaryPolynomial, ZERO_TOL};
use crate::error::{Error, Result};

/// `E(z) = offset + sum_i h_i z_i + sum_{i<j} J_ij z_i z_j` over `z in {-1,+1}^n`.
///
/// Spin `z_i = 2 x_i - 1`, so `z_i = +1` corresponds to `x_i = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    pub h: Vec<f64>,
    /// Keyed by `(i, j)` with `i < j`.
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn zero(n: usize) -> Self {
        Self {
            h: vec![0.0; n],
            j: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn num_spins(&self) -> usize {
        self.h.len()
    }

    pub fn add_coupling(&mut self, a: usize, b: usize, c: f64) -> Result<()> {
        if a == b {
            return Err(Error::InvalidParam(format!("self-coupling on spin {a}")));
        }
        let n = self.num_spins();
        if a.max(b) >= n {
            return Err(Error::OutOfRange {
                index: a.max(b),
                limit: n,
            });
        }
        let key = (a.min(b), a.max(b));
        let v = self.j.entry(key).or_insert(0.0);
        *v += c;
        if v.abs() <= ZERO_TOL {
            self.j.remove(&key);
        }
        Ok(())
    }

    pub fn energy(&self, z: &[i8]) -> Result<f64> {
        if z.len() != self.num_spins() {
            return Err(Error::Dimension {
                expected: self.num_spins(),
                got: z.len(),
            });
        }
        let field: f64 = self.h.iter().zip(z).map(|(h, &s)| h * s as f64).sum();
        let pair: f64 = self
            .j
            .iter()
            .map(|(&(a, b), c)| c * (z[a] * z[b]) as f64)
            .sum();
        Ok(self.offset + field + pair)
    }

    /// Dense symmetric coupling matrix (zero diagonal), row-major.
    pub fn dense_couplings(&self) -> Vec<f64> {
        let n = self.num_spins();
        let mut m = vec![0.0; n * n];
        for (&(a, b), &c) in &self.j {
            m[a * n + b] = c;
            m[b * n + a] = c;
        }
        m
    }

    /// Back-substitution `z = 2x - 1`.
    pub fn to_binary(&self) -> BinaryPolynomial {
        let mut p = BinaryPolynomial::zero(self.num_spins());
        p.add_term(&[], self.offset);
        for (i, &h) in self.h.iter().enumerate() {
            p.add_term(&[i], 2.0 * h);
            p.add_term(&[], -h);
        }
        for (&(a, b), &c) in &self.j {
            p.add_term(&[a, b], 4.0 * c);
            p.add_term(&[a], -2.0 * c);
            p.add_term(&[b], -2.0 * c);
            p.add_term(&[], c);
        }
        p
    }
}

/// Exact substitution `x = (z + 1)/2` of a polynomial of degree <= 2.
pub fn to_ising(poly: &BinaryPolynomial) -> Result<IsingModel> {
    if poly.degree() > 2 {
        return Err(Error::Unsupported(format!(
            "Ising export needs degree <= 2, got {}; quadratize first",
            poly.degree()
        )));
    }
    let mut m = IsingModel::zero(poly.num_vars());
    for (k, c) in poly.terms() {
        match *k {
            [] => m.offset += c,
            [i] => {
                m.h[i] += c / 2.0;
                m.offset += c / 2.0;
            }
            [a, b] => {
                m.add_coupling(a, b, c / 4.0)?;
                m.h[a] += c / 4.0;
                m.h[b] += c / 4.0;
                m.offset += c / 4.0;
            }
            _ => unreachable!("degree checked"),
        }
    }
    for h in &mut m.h {
        if h.abs() <= ZERO_TOL {
            *h = 0.0;
        }
    }
    if m.offset.abs() <= ZERO_TOL {
        m.offset = 0.0;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spins(bits: u32, n: usize) -> Vec<i8> {
        (0..n).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect()
    }

    #[test]
    fn single_variable() {
        let m = to_ising(&BinaryPolynomial::var(1, 0)).unwrap();
        assert_eq!(m.h, vec![0.5]);
        assert_eq!(m.offset, 0.5);
        assert_eq!(m.energy(&[-1]).unwrap(), 0.0);
        assert_eq!(m.energy(&[1]).unwrap(), 1.0);
    }

    #[test]
    fn product_truth_table() {
        let p = BinaryPolynomial::from_terms(2, [(vec![0, 1], 1.0)]).unwrap();
        let m = to_ising(&p).unwrap();
        assert_eq!(m.j.get(&(0, 1)), Some(&0.25));
        assert_eq!(m.h, vec![0.25, 0.25]);
        assert_eq!(m.offset, 0.25);
        let energies: Vec<f64> = (0..4).map(|b| m.energy(&spins(b, 2)).unwrap()).collect();
        assert_eq!(energies, vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_poly_gives_zero_model() {
        assert_eq!(to_ising(&BinaryPolynomial::zero(3)).unwrap(), IsingModel::zero(3));
    }

    #[test]
    fn rejects_cubic() {
        let p = BinaryPolynomial::from_terms(3, [(vec![0, 1, 2], 1.0)]).unwrap();
        assert!(to_ising(&p).is_err());
    }

    #[test]
    fn round_trip_through_spins() {
        let p = BinaryPolynomial::from_terms(
            3,
            [(vec![], 0.5), (vec![0], -1.0), (vec![1, 2], 3.0), (vec![0, 2], -0.75)],
        )
        .unwrap();
        let back = to_ising(&p).unwrap().to_binary();
        for (k, c) in p.terms() {
            assert!((back.coeff(k) - c).abs() < 1e-12);
        }
        assert_eq!(back.len(), p.len());
    }

    #[test]
    fn self_coupling_rejected() {
        let mut m = IsingModel::zero(2);
        assert!(m.add_coupling(1, 1, 1.0).is_err());
        assert!(m.add_coupling(0, 2, 1.0).is_err());
    }
}

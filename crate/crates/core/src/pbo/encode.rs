//! Polynomial builders for the cut, partition-validity and balance terms, and
//! their weighted composition `E = E_cut + alpha * E_partition + lambda * E_balance`.
//!
//! Two-way encodings use one variable per vertex (`x_i = 1` puts vertex `i`
//! in part 1). Multi-way encodings are one-hot: variable `i * k + c` is set
//! when vertex `i` is in part `c`.

use serde::{Deserialize, Serialize};

use super::BinaryPolynomial;
use crate::cut::{total_cut, CutFunction, CutKind, TransitionMatrix};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, NodePartition};

/// Variable index of "vertex `node` is in part `part`" in the one-hot layout.
pub fn one_hot_index(node: usize, part: usize, k: usize) -> usize {
    node * k + part
}

/// `prod_{v in vars} (1 - x_v)`, expanded.
fn prod_one_minus(num_vars: usize, vars: &[usize]) -> BinaryPolynomial {
    let mut p = BinaryPolynomial::zero(num_vars);
    for mask in 0u64..(1u64 << vars.len()) {
        let subset: Vec<usize> = vars
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let sign = if subset.len().is_multiple_of(2) { 1.0 } else { -1.0 };
        p.add_term(&subset, sign);
    }
    p
}

/// `(sum_i coeffs_i * x_i + offset)^2`, expanded.
fn square_of_linear(num_vars: usize, linear: &[(usize, f64)], offset: f64) -> BinaryPolynomial {
    let mut p = BinaryPolynomial::zero(num_vars);
    p.add_term(&[], offset * offset);
    for (a, &(i, ci)) in linear.iter().enumerate() {
        p.add_term(&[i], ci * ci + 2.0 * offset * ci);
        for &(j, cj) in &linear[a + 1..] {
            p.add_term(&[i, j], 2.0 * ci * cj);
        }
    }
    p
}

/// `sum_{i != j in vars} x_i (1 - x_j)`: ordered crossing pairs, equal to
/// `|S| * |vars \ S|` for `S` the set variables.
fn ordered_crossing_pairs(p: &mut BinaryPolynomial, vars: &[usize], scale: f64) {
    let r = vars.len() as f64;
    for (a, &i) in vars.iter().enumerate() {
        p.add_term(&[i], scale * (r - 1.0));
        for &j in &vars[a + 1..] {
            p.add_term(&[i, j], -2.0 * scale);
        }
    }
}

/// Two-way cut term: all-or-nothing or quadratic (ordered pairs).
pub fn build_two_way_cut(h: &Hypergraph, kind: CutKind) -> Result<BinaryPolynomial> {
    let n = h.num_vertices();
    let mut p = BinaryPolynomial::zero(n);
    for (e, &w) in h.edges().iter().zip(h.weights()) {
        match kind {
            CutKind::Aon => {
                p.add_term(&[], w);
                p.add_term(e, -w);
                p.add_scaled(&prod_one_minus(n, e), -w)?;
            }
            CutKind::Quadratic => ordered_crossing_pairs(&mut p, e, w),
            other => {
                return Err(Error::Unsupported(format!("no two-way encoding for {other}")))
            }
        }
    }
    Ok(p)
}

/// `(sum_i x_i - n/2)^2`.
pub fn build_two_way_balance(n: usize) -> BinaryPolynomial {
    let linear: Vec<_> = (0..n).map(|i| (i, 1.0)).collect();
    square_of_linear(n, &linear, -(n as f64) / 2.0)
}

/// `sum_i (sum_c x_ic - 1)^2` over the one-hot layout.
pub fn build_multi_partition_penalty(n: usize, k: usize) -> BinaryPolynomial {
    let mut p = BinaryPolynomial::zero(n * k);
    for i in 0..n {
        let linear: Vec<_> = (0..k).map(|c| (one_hot_index(i, c, k), 1.0)).collect();
        p.add_scaled(&square_of_linear(n * k, &linear, -1.0), 1.0)
            .expect("same layout");
    }
    p
}

/// `sum_c (sum_i x_ic - n/k)^2` over the one-hot layout.
pub fn build_multi_balance(n: usize, k: usize) -> BinaryPolynomial {
    let mut p = BinaryPolynomial::zero(n * k);
    let target = n as f64 / k as f64;
    for c in 0..k {
        let linear: Vec<_> = (0..n).map(|i| (one_hot_index(i, c, k), 1.0)).collect();
        p.add_scaled(&square_of_linear(n * k, &linear, -target), 1.0)
            .expect("same layout");
    }
    p
}

/// One-hot cut term for all-or-nothing, K-1, or the multi-way quadratic
/// surrogate.
pub fn build_multi_cut(h: &Hypergraph, k: usize, kind: CutKind) -> Result<BinaryPolynomial> {
    let n = h.num_vertices();
    let nv = n * k;
    let mut p = BinaryPolynomial::zero(nv);
    for (e, &w) in h.edges().iter().zip(h.weights()) {
        let column = |c: usize| -> Vec<usize> { e.iter().map(|&v| one_hot_index(v, c, k)).collect() };
        match kind {
            CutKind::Aon => {
                p.add_term(&[], w);
                for c in 0..k {
                    p.add_term(&column(c), -w);
                }
            }
            CutKind::KMinus1 => {
                p.add_term(&[], w * (k as f64 - 1.0));
                for c in 0..k {
                    p.add_scaled(&prod_one_minus(nv, &column(c)), -w)?;
                }
            }
            CutKind::QuadraticMulti => {
                let scale = w / e.len() as f64;
                for c in 0..k {
                    ordered_crossing_pairs(&mut p, &column(c), scale);
                }
            }
            other => {
                return Err(Error::Unsupported(format!("no one-hot cut encoding for {other}")))
            }
        }
    }
    Ok(p)
}

/// `(1/n) sum_{i,j} p(i,j) sum_c x_ic (1 - x_jc)`.
pub fn build_hrwc(matrix: &TransitionMatrix, n: usize, k: usize) -> Result<BinaryPolynomial> {
    if matrix.n() != n {
        return Err(Error::Dimension {
            expected: n,
            got: matrix.n(),
        });
    }
    let mut p = BinaryPolynomial::zero(n * k);
    let scale = 1.0 / n as f64;
    for i in 0..n {
        for j in 0..n {
            let pij = matrix.get(i, j);
            if i == j || pij == 0.0 {
                continue;
            }
            for c in 0..k {
                let (xi, xj) = (one_hot_index(i, c, k), one_hot_index(j, c, k));
                p.add_term(&[xi], scale * pij);
                p.add_term(&[xi, xj], -scale * pij);
            }
        }
    }
    Ok(p)
}

/// `cut + alpha * partition + lambda * balance`.
pub fn compose_energy(
    cut: &BinaryPolynomial,
    partition: &BinaryPolynomial,
    balance: &BinaryPolynomial,
    alpha: f64,
    lambda: f64,
) -> Result<BinaryPolynomial> {
    let mut e = cut.clone();
    e.add_scaled(partition, alpha)?;
    e.add_scaled(balance, lambda)?;
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    /// One variable per vertex, `k = 2`.
    TwoWay,
    /// `k` one-hot variables per vertex.
    OneHot,
}

/// Which energy to build: part count, penalty weights and cut function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub k: usize,
    pub lambda: f64,
    /// Partition-validity weight; `None` selects [`EncodingSpec::default_alpha`].
    /// Ignored by the two-way layout.
    pub alpha: Option<f64>,
    pub cut: CutFunction,
}

impl EncodingSpec {
    pub fn new(k: usize, lambda: f64, cut: CutFunction) -> Self {
        Self {
            k,
            lambda,
            alpha: None,
            cut,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    /// Two-way for `k = 2` all-or-nothing or quadratic cuts, one-hot otherwise.
    pub fn layout(&self) -> Layout {
        if self.k == 2 && matches!(self.cut.kind(), CutKind::Aon | CutKind::Quadratic) {
            Layout::TwoWay
        } else {
            Layout::OneHot
        }
    }

    pub fn num_vars(&self, n: usize) -> usize {
        match self.layout() {
            Layout::TwoWay => n,
            Layout::OneHot => n * self.k,
        }
    }

    /// `lambda * n + sum_e w_e + 1`: a single one-hot violation outweighs any
    /// attainable cut-plus-balance improvement.
    pub fn default_alpha(&self, h: &Hypergraph) -> f64 {
        self.lambda * h.num_vertices() as f64 + h.total_weight() + 1.0
    }

    fn validate(&self, h: &Hypergraph) -> Result<()> {
        let kind = self.cut.kind();
        if self.k < 2 {
            return Err(Error::InvalidParam(format!("k must be at least 2, got {}", self.k)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParam(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if let Some(a) = self.alpha {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::InvalidParam(format!("alpha must be >= 0, got {a}")));
            }
        }
        if !kind.is_encodable() {
            return Err(Error::Unsupported(format!(
                "{kind} is not polynomially representable"
            )));
        }
        if kind == CutKind::Quadratic && self.k != 2 {
            return Err(Error::Unsupported(
                "the two-way quadratic cut requires k = 2; use quadratic-multi".into(),
            ));
        }
        if let CutFunction::Hrwc(m) = &self.cut {
            if m.n() != h.num_vertices() {
                return Err(Error::Dimension {
                    expected: h.num_vertices(),
                    got: m.n(),
                });
            }
        }
        Ok(())
    }

    pub fn encode(&self, h: &Hypergraph) -> Result<EncodedProblem> {
        self.validate(h)?;
        let n = h.num_vertices();
        let (energy, alpha) = match self.layout() {
            Layout::TwoWay => {
                let cut = build_two_way_cut(h, self.cut.kind())?;
                let zero = BinaryPolynomial::zero(n);
                let e = compose_energy(&cut, &zero, &build_two_way_balance(n), 0.0, self.lambda)?;
                (e, 0.0)
            }
            Layout::OneHot => {
                let cut = match &self.cut {
                    CutFunction::Hrwc(m) => build_hrwc(m, n, self.k)?,
                    f => build_multi_cut(h, self.k, f.kind())?,
                };
                let alpha = self.alpha.unwrap_or_else(|| self.default_alpha(h));
                let e = compose_energy(
                    &cut,
                    &build_multi_partition_penalty(n, self.k),
                    &build_multi_balance(n, self.k),
                    alpha,
                    self.lambda,
                )?;
                (e, alpha)
            }
        };
        Ok(EncodedProblem {
            hypergraph: h.clone(),
            spec: self.clone(),
            alpha,
            energy,
        })
    }
}

/// A hypergraph together with its composed energy polynomial.
#[derive(Debug, Clone)]
pub struct EncodedProblem {
    pub hypergraph: Hypergraph,
    pub spec: EncodingSpec,
    /// Validity weight actually used (0 for the two-way layout).
    pub alpha: f64,
    pub energy: BinaryPolynomial,
}

impl EncodedProblem {
    pub fn num_vars(&self) -> usize {
        self.energy.num_vars()
    }

    pub fn layout(&self) -> Layout {
        self.spec.layout()
    }

    /// Node partition encoded by `x`, or `None` for an invalid one-hot vector.
    pub fn decode(&self, x: &[u8]) -> Option<NodePartition> {
        let n = self.hypergraph.num_vertices();
        match self.layout() {
            Layout::TwoWay => {
                (x.len() == n).then(|| {
                    NodePartition::new(x.iter().map(|&b| (b != 0) as usize).collect(), 2)
                        .expect("binary labels")
                })
            }
            Layout::OneHot => crate::solvers::decode_one_hot(x, n, self.spec.k),
        }
    }

    /// Inverse of [`EncodedProblem::decode`].
    pub fn encode_partition(&self, p: &NodePartition) -> Vec<u8> {
        match self.layout() {
            Layout::TwoWay => p.labels().iter().map(|&l| l as u8).collect(),
            Layout::OneHot => {
                let k = self.spec.k;
                let mut x = vec![0u8; p.len() * k];
                for (i, &l) in p.labels().iter().enumerate() {
                    x[one_hot_index(i, l, k)] = 1;
                }
                x
            }
        }
    }

    /// Oracle cut value of a decoded partition.
    pub fn cut_value(&self, p: &NodePartition) -> Result<f64> {
        total_cut(&self.hypergraph, p, &self.spec.cut)
    }
}

//! Direct evaluation of hyperedge cut functions on explicit partitions.
//!
//! These evaluators never go through a binary encoding; the polynomial
//! builders in [`crate::pbo`] are checked against them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, NodePartition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutKind {
    Aon,
    Quadratic,
    Linear,
    Ncut2,
    KMinus1,
    QuadraticMulti,
    NcutMulti,
    Hrwc,
}

impl CutKind {
    pub const ALL: [CutKind; 8] = [
        CutKind::Aon,
        CutKind::Quadratic,
        CutKind::Linear,
        CutKind::Ncut2,
        CutKind::KMinus1,
        CutKind::QuadraticMulti,
        CutKind::NcutMulti,
        CutKind::Hrwc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CutKind::Aon => "aon",
            CutKind::Quadratic => "quadratic",
            CutKind::Linear => "linear",
            CutKind::Ncut2 => "ncut2",
            CutKind::KMinus1 => "k-minus1",
            CutKind::QuadraticMulti => "quadratic-multi",
            CutKind::NcutMulti => "ncut-multi",
            CutKind::Hrwc => "hrwc",
        }
    }

    /// Kinds defined only for bipartitions.
    pub fn is_two_way_only(self) -> bool {
        matches!(self, CutKind::Quadratic | CutKind::Linear | CutKind::Ncut2)
    }

    /// Kinds that have a polynomial (QUBO/HUBO) encoding.
    pub fn is_encodable(self) -> bool {
        matches!(
            self,
            CutKind::Aon | CutKind::Quadratic | CutKind::KMinus1 | CutKind::QuadraticMulti | CutKind::Hrwc
        )
    }
}

impl fmt::Display for CutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        CutKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .or(match key.as_str() {
                "kminus1" | "k-1" => Some(CutKind::KMinus1),
                "quadraticmulti" => Some(CutKind::QuadraticMulti),
                "ncutmulti" => Some(CutKind::NcutMulti),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidParam(format!("unknown cut kind `{s}`")))
    }
}

/// Random-walk transition probabilities `p(i, j)`; the diagonal is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    n: usize,
    data: Vec<f64>,
}

impl TransitionMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: data.len(),
            });
        }
        if let Some(v) = data.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParam(format!("transition entry {v} is negative or not finite")));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: r.len(),
            });
        }
        Self::new(n, rows.concat())
    }

    /// Whitespace-separated rows, one per vertex; `%` comments allowed.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|_| Error::Parse {
                        line: i + 1,
                        msg: format!("bad probability `{t}`"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CutFunction {
    Aon,
    Quadratic,
    Linear,
    Ncut2,
    KMinus1,
    QuadraticMulti,
    NcutMulti,
    Hrwc(TransitionMatrix),
}

impl CutFunction {
    pub fn kind(&self) -> CutKind {
        match self {
            CutFunction::Aon => CutKind::Aon,
            CutFunction::Quadratic => CutKind::Quadratic,
            CutFunction::Linear => CutKind::Linear,
            CutFunction::Ncut2 => CutKind::Ncut2,
            CutFunction::KMinus1 => CutKind::KMinus1,
            CutFunction::QuadraticMulti => CutKind::QuadraticMulti,
            CutFunction::NcutMulti => CutKind::NcutMulti,
            CutFunction::Hrwc(_) => CutKind::Hrwc,
        }
    }

    /// Parameter-free cut function for `kind`. HRWC needs a matrix and is
    /// rejected here.
    pub fn from_kind(kind: CutKind) -> Result<Self> {
        Ok(match kind {
            CutKind::Aon => CutFunction::Aon,
            CutKind::Quadratic => CutFunction::Quadratic,
            CutKind::Linear => CutFunction::Linear,
            CutKind::Ncut2 => CutFunction::Ncut2,
            CutKind::KMinus1 => CutFunction::KMinus1,
            CutKind::QuadraticMulti => CutFunction::QuadraticMulti,
            CutKind::NcutMulti => CutFunction::NcutMulti,
            CutKind::Hrwc => {
                return Err(Error::InvalidParam("hrwc requires a transition matrix".into()))
            }
        })
    }
}

/// Per-part volumes `vol(C_c)`; errors if any part has zero volume.
fn part_volumes(h: &Hypergraph, p: &NodePartition) -> Result<Vec<f64>> {
    let deg = h.degrees();
    let mut vols = vec![0.0; p.k()];
    for (v, &l) in p.labels().iter().enumerate() {
        vols[l] += deg[v] as f64;
    }
    if let Some(c) = vols.iter().position(|&v| v == 0.0) {
        return Err(Error::Infeasible(format!("part {c} has zero volume")));
    }
    Ok(vols)
}

/// Cut value of one edge given how many of its vertices fall in each part.
fn value_from_counts(kind: CutKind, counts: &[usize], vols: Option<&[f64]>) -> Result<f64> {
    let size: usize = counts.iter().sum();
    let touched = counts.iter().filter(|&&c| c > 0).count();
    let crossing = |c: usize| (c * (size - c)) as f64;
    Ok(match kind {
        CutKind::Aon => (touched > 1) as u8 as f64,
        CutKind::KMinus1 => touched.saturating_sub(1) as f64,
        CutKind::Quadratic => {
            two_way(counts)?;
            (counts[0] * counts[1]) as f64
        }
        CutKind::Linear => {
            two_way(counts)?;
            counts[0].min(counts[1]) as f64
        }
        CutKind::Ncut2 => {
            two_way(counts)?;
            let vols = vols.expect("volumes required");
            (1.0 / vols[0] + 1.0 / vols[1]) * (counts[0] * counts[1]) as f64 / size as f64
        }
        CutKind::QuadraticMulti => {
            counts.iter().map(|&c| crossing(c)).sum::<f64>() / size as f64
        }
        CutKind::NcutMulti => {
            let vols = vols.expect("volumes required");
            counts
                .iter()
                .zip(vols)
                .map(|(&c, &vol)| crossing(c) / (vol * size as f64))
                .sum()
        }
        CutKind::Hrwc => {
            return Err(Error::Unsupported(
                "hrwc is a whole-partition objective, not a per-edge cut".into(),
            ))
        }
    })
}

fn two_way(counts: &[usize]) -> Result<()> {
    if counts.len() == 2 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "two-way cut evaluated on a {}-way partition",
            counts.len()
        )))
    }
}

/// Value of `f` on a single edge whose induced partition is `parts`.
///
/// `parts` is the output of [`Hypergraph::induced_edge_partition`]; the
/// partition `p` supplies part membership and, for normalized cuts, volumes.
pub fn edge_cut_value(
    f: &CutFunction,
    parts: &[Vec<usize>],
    h: &Hypergraph,
    p: &NodePartition,
) -> Result<f64> {
    p.check_len(h.num_vertices())?;
    let mut counts = vec![0usize; p.k()];
    for set in parts {
        let Some(&first) = set.first() else {
            return Err(Error::InvalidParam("induced partition contains an empty set".into()));
        };
        counts[p.label(first)] += set.len();
    }
    let vols = match f.kind() {
        CutKind::Ncut2 | CutKind::NcutMulti => Some(part_volumes(h, p)?),
        _ => None,
    };
    value_from_counts(f.kind(), &counts, vols.as_deref())
}

/// `sum_e w_e f(P_e)`, or the random-walk conductance for HRWC.
pub fn total_cut(h: &Hypergraph, p: &NodePartition, f: &CutFunction) -> Result<f64> {
    p.check_len(h.num_vertices())?;
    let kind = f.kind();
    if kind.is_two_way_only() && p.k() != 2 {
        return Err(Error::Unsupported(format!("{kind} requires k = 2, got k = {}", p.k())));
    }
    if let CutFunction::Hrwc(matrix) = f {
        return hrwc_conductance(matrix, p);
    }
    let vols = match kind {
        CutKind::Ncut2 | CutKind::NcutMulti => Some(part_volumes(h, p)?),
        _ => None,
    };
    let mut counts = vec![0usize; p.k()];
    let mut total = 0.0;
    for (e, &w) in h.edges().iter().zip(h.weights()) {
        counts.iter_mut().for_each(|c| *c = 0);
        for &v in e {
            counts[p.label(v)] += 1;
        }
        total += w * value_from_counts(kind, &counts, vols.as_deref())?;
    }
    Ok(total)
}

/// `(1/k) sum_C (1/|C|) sum_{i in C, j not in C} p(i, j)`.
pub fn hrwc_conductance(matrix: &TransitionMatrix, p: &NodePartition) -> Result<f64> {
    let n = p.len();
    if matrix.n() != n {
        return Err(Error::Dimension {
            expected: n,
            got: matrix.n(),
        });
    }
    let sizes = p.part_sizes();
    if let Some(c) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Infeasible(format!("part {c} is empty")));
    }
    let mut escape = vec![0.0; p.k()];
    for i in 0..n {
        for j in 0..n {
            if p.label(i) != p.label(j) {
                escape[p.label(i)] += matrix.get(i, j);
            }
        }
    }
    let sum: f64 = escape.iter().zip(&sizes).map(|(e, &s)| e / s as f64).sum();
    Ok(sum / p.k() as f64)
}

/// Largest pairwise difference of part sizes.
pub fn balance_violation(p: &NodePartition) -> usize {
    let sizes = p.part_sizes();
    let max = sizes.iter().copied().max().unwrap_or(0);
    let min = sizes.iter().copied().min().unwrap_or(0);
    max - min
}

//! Hypergraphs, node partitions, random instance generation and the
//! hMETIS-style text format.
//!
//! On disk vertices are 1-indexed; in memory they are 0-indexed. Lines that
//! start with `%` are comments.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rejection-sampling budget for connected instances.
pub const GENERATION_RETRIES: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl Hypergraph {
    /// Builds an unweighted hypergraph (all weights 1).
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let weights = vec![1.0; edges.len()];
        Self::with_weights(n, edges, weights)
    }

    pub fn with_weights(n: usize, edges: Vec<Vec<usize>>, weights: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidHypergraph("vertex count must be positive".into()));
        }
        if edges.len() != weights.len() {
            return Err(Error::Dimension {
                expected: edges.len(),
                got: weights.len(),
            });
        }
        let mut sorted = Vec::with_capacity(edges.len());
        for (idx, (edge, &w)) in edges.into_iter().zip(&weights).enumerate() {
            sorted.push(check_edge(n, edge, w).map_err(|msg| {
                Error::InvalidHypergraph(format!("edge {idx}: {msg}"))
            })?);
        }
        Ok(Self {
            n,
            edges: sorted,
            weights,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Result<&[usize]> {
        self.edges
            .get(e)
            .map(Vec::as_slice)
            .ok_or(Error::OutOfRange {
                index: e,
                limit: self.edges.len(),
            })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Largest hyperedge size, 0 when there are no edges.
    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of hyperedges incident to `v`.
    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.edges.iter().filter(|e| e.contains(&v)).count())
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Sum of degrees over `subset`.
    pub fn volume(&self, subset: &[usize]) -> Result<usize> {
        let deg = self.degrees();
        subset.iter().try_fold(0usize, |acc, &v| {
            self.check_vertex(v)?;
            Ok(acc + deg[v])
        })
    }

    /// True when every vertex is reachable from every other through shared
    /// hyperedges.
    pub fn is_connected(&self) -> bool {
        let mut dsu = DisjointSets::new(self.n);
        for e in &self.edges {
            for w in e.windows(2) {
                dsu.union(w[0], w[1]);
            }
        }
        dsu.components() == 1
    }

    /// The nonempty intersections of edge `e` with the parts of `p`, ordered by
    /// part index.
    pub fn induced_edge_partition(&self, p: &NodePartition, e: usize) -> Result<Vec<Vec<usize>>> {
        let edge = self.edge(e)?;
        p.check_len(self.n)?;
        let mut parts = vec![Vec::new(); p.k()];
        for &v in edge {
            parts[p.label(v)].push(v);
        }
        Ok(parts.into_iter().filter(|s| !s.is_empty()).collect())
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                index: v,
                limit: self.n,
            })
        }
    }
}

fn check_edge(n: usize, mut edge: Vec<usize>, w: f64) -> std::result::Result<Vec<usize>, String> {
    if edge.len() < 2 {
        return Err(format!("size {} is below 2", edge.len()));
    }
    if !(w > 0.0 && w.is_finite()) {
        return Err(format!("weight {w} is not positive"));
    }
    if let Some(&v) = edge.iter().find(|&&v| v >= n) {
        return Err(format!("vertex {v} out of range for n={n}"));
    }
    edge.sort_unstable();
    if let Some(w) = edge.windows(2).find(|w| w[0] == w[1]) {
        return Err(format!("duplicate vertex {}", w[0]));
    }
    Ok(edge)
}

/// A labelling of the `n` vertices into `k` parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodePartition {
    labels: Vec<usize>,
    k: usize,
}

impl NodePartition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPartition("k must be positive".into()));
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::InvalidPartition(format!("label {l} not below k={k}")));
        }
        Ok(Self { labels, k })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn part(&self, c: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&v| self.labels[v] == c).collect()
    }

    /// No empty part and part sizes differ by at most one.
    pub fn is_balanced(&self) -> bool {
        let sizes = self.part_sizes();
        let min = sizes.iter().copied().min().unwrap_or(0);
        let max = sizes.iter().copied().max().unwrap_or(0);
        min > 0 && max - min <= 1
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.labels.len() == n {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: n,
                got: self.labels.len(),
            })
        }
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

/// Edge count used by [`generate_random_uniform`]: `n * avg_degree / r`
/// rounded half-up.
pub fn edge_count_for(n: usize, r: usize, avg_degree: f64) -> usize {
    (n as f64 * avg_degree / r as f64 + 0.5).floor() as usize
}

fn binomial(n: usize, r: usize) -> u128 {
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Draws a connected `r`-uniform hypergraph with `round(n*avg_degree/r)`
/// distinct edges. Disconnected draws are rejected and redrawn on the next
/// ChaCha stream of the same seed.
pub fn generate_random_uniform(n: usize, r: usize, avg_degree: f64, seed: u64) -> Result<Hypergraph> {
    if r < 2 || n < r {
        return Err(Error::InvalidParam(format!("need n >= r >= 2, got n={n}, r={r}")));
    }
    if !(avg_degree.is_finite() && avg_degree * n as f64 / r as f64 >= 1.0) {
        return Err(Error::InvalidParam(format!(
            "avg_degree {avg_degree} yields fewer than one edge"
        )));
    }
    let m = edge_count_for(n, r, avg_degree);
    if m as u128 > binomial(n, r) {
        return Err(Error::Generation(format!(
            "{m} edges requested but only C({n},{r}) = {} exist",
            binomial(n, r)
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..GENERATION_RETRIES {
        rng.set_stream(attempt);
        rng.set_word_pos(0);
        let mut drawn: BTreeSet<Vec<usize>> = BTreeSet::new();
        while drawn.len() < m {
            let mut e = index::sample(&mut rng, n, r).into_vec();
            e.sort_unstable();
            drawn.insert(e);
        }
        let h = Hypergraph::new(n, drawn.into_iter().collect())?;
        if h.is_connected() {
            return Ok(h);
        }
    }
    Err(Error::Generation(format!(
        "no connected instance within {GENERATION_RETRIES} draws (n={n}, r={r}, m={m})"
    )))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_hmetis(text: &str) -> Result<Hypergraph> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if !(2..=3).contains(&fields.len()) {
        return Err(parse_err(hline, "header must be `m n [fmt]`"));
    }
    let m: usize = fields[0]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad edge count `{}`", fields[0])))?;
    let n: usize = fields[1]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad vertex count `{}`", fields[1])))?;
    if n == 0 {
        return Err(parse_err(hline, "vertex count must be positive"));
    }
    let weighted = match fields.get(2) {
        None | Some(&"0") => false,
        Some(&"1") => true,
        Some(f) => return Err(parse_err(hline, format!("unsupported format flag `{f}`"))),
    };

    let mut edges = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(text.lines().count(), format!("expected {m} edges, found {}", edges.len())))?;
        let mut tokens = line.split_whitespace();
        let w = if weighted {
            let tok = tokens.next().unwrap_or("");
            let w: f64 = tok.parse().map_err(|_| parse_err(ln, format!("bad weight `{tok}`")))?;
            if !(w > 0.0 && w.is_finite()) {
                return Err(parse_err(ln, format!("weight {w} is not positive")));
            }
            w
        } else {
            1.0
        };
        let mut edge = Vec::new();
        for tok in tokens {
            let v: usize = tok.parse().map_err(|_| parse_err(ln, format!("bad vertex `{tok}`")))?;
            if v == 0 || v > n {
                return Err(parse_err(ln, format!("vertex {v} out of range 1..={n}")));
            }
            if edge.contains(&(v - 1)) {
                return Err(parse_err(ln, format!("duplicate vertex {v}")));
            }
            edge.push(v - 1);
        }
        if edge.len() < 2 {
            return Err(parse_err(ln, "hyperedge needs at least 2 vertices"));
        }
        edges.push(edge);
        weights.push(w);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, format!("more than {m} edge lines")));
    }
    Hypergraph::with_weights(n, edges, weights)
}

pub fn serialize_hmetis(h: &Hypergraph) -> String {
    let weighted = !h.is_unweighted();
    let mut out = String::new();
    if weighted {
        let _ = writeln!(out, "{} {} 1", h.num_edges(), h.num_vertices());
    } else {
        let _ = writeln!(out, "{} {}", h.num_edges(), h.num_vertices());
    }
    for (e, &w) in h.edges().iter().zip(h.weights()) {
        let verts: Vec<String> = e.iter().map(|v| (v + 1).to_string()).collect();
        if weighted {
            let _ = writeln!(out, "{w} {}", verts.join(" "));
        } else {
            let _ = writeln!(out, "{}", verts.join(" "));
        }
    }
    out
}

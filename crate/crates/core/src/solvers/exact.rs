use crate::cut::{total_cut, CutFunction};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, NodePartition};
use crate::pbo::BinaryPolynomial;

/// Enumeration guard: `n * log2(k)` (or the variable count) must not exceed this.
pub const MAX_EXACT_BITS: f64 = 24.0;

const TIE_TOL: f64 = 1e-9;

/// Minimum of `total_cut` over all balanced `k`-way partitions.
///
/// Partitions are enumerated as canonical label vectors (vertex 0 in part 0,
/// each new part takes the next unused label) in lexicographic order; the
/// first optimum found is returned.
pub fn exact_balanced(h: &Hypergraph, f: &CutFunction, k: usize) -> Result<(f64, NodePartition)> {
    let n = h.num_vertices();
    if k < 1 {
        return Err(Error::InvalidParam("k must be positive".into()));
    }
    if k > n {
        return Err(Error::Infeasible(format!("no balanced {k}-way partition of {n} vertices")));
    }
    if n as f64 * (k as f64).log2() > MAX_EXACT_BITS {
        return Err(Error::TooLarge(format!(
            "n={n}, k={k} exceeds 2^{MAX_EXACT_BITS} enumeration budget"
        )));
    }
    let mut search = BalancedSearch {
        h,
        f,
        k,
        lo: n / k,
        hi: n.div_ceil(k),
        labels: vec![0; n],
        sizes: vec![0; k],
        best: None,
    };
    search.descend(0, 0)?;
    let (value, labels) = search.best.expect("k <= n admits a balanced partition");
    Ok((value, NodePartition::new(labels, k)?))
}

struct BalancedSearch<'a> {
    h: &'a Hypergraph,
    f: &'a CutFunction,
    k: usize,
    lo: usize,
    hi: usize,
    labels: Vec<usize>,
    sizes: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
}

impl BalancedSearch<'_> {
    fn descend(&mut self, pos: usize, used: usize) -> Result<()> {
        let n = self.labels.len();
        if pos == n {
            if used == self.k && self.sizes.iter().all(|&s| s >= self.lo) {
                let p = NodePartition::new(self.labels.clone(), self.k)?;
                let v = total_cut(self.h, &p, self.f)?;
                if self.best.as_ref().is_none_or(|(b, _)| v < b - TIE_TOL) {
                    self.best = Some((v, self.labels.clone()));
                }
            }
            return Ok(());
        }
        let remaining = n - pos;
        let deficit: usize = self.sizes[..used]
            .iter()
            .map(|&s| self.lo.saturating_sub(s))
            .sum::<usize>()
            + (self.k - used) * self.lo.max(1);
        if deficit > remaining {
            return Ok(());
        }
        let limit = if used < self.k { used + 1 } else { used };
        for c in 0..limit {
            if self.sizes[c] == self.hi {
                continue;
            }
            self.labels[pos] = c;
            self.sizes[c] += 1;
            self.descend(pos + 1, used.max(c + 1))?;
            self.sizes[c] -= 1;
        }
        Ok(())
    }
}

/// Global minimum of `poly` over `{0,1}^num_vars` and every assignment that
/// attains it (within 1e-9), in increasing bit order.
pub fn exact_min_poly(poly: &BinaryPolynomial) -> Result<(f64, Vec<Vec<u8>>)> {
    let nv = poly.num_vars();
    if nv as f64 > MAX_EXACT_BITS {
        return Err(Error::TooLarge(format!("{nv} variables exceed the enumeration budget")));
    }
    let compiled = poly.compile();
    let mut min = f64::INFINITY;
    let mut argmins: Vec<u64> = Vec::new();
    for bits in 0u64..(1u64 << nv) {
        let e = compiled.evaluate_bits(bits);
        if e < min - TIE_TOL {
            min = e;
            argmins.clear();
            argmins.push(bits);
        } else if (e - min).abs() <= TIE_TOL {
            min = min.min(e);
            argmins.push(bits);
        }
    }
    let expand = |bits: u64| (0..nv).map(|i| (bits >> i & 1) as u8).collect();
    Ok((min, argmins.into_iter().map(expand).collect()))
}

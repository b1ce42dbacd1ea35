use std::collections::BTreeMap;

use super::BinaryPolynomial;

/// Reduces `poly` to degree <= 2 by Rosenberg substitution.
///
/// While a term of order >= 3 remains, the variable pair occurring in the most
/// such terms (smallest pair on ties) is replaced in all of them by a fresh
/// auxiliary `y`, and `M * (uv - 2uy - 2vy + 3y)` is added with
/// `M = 1 + sum |c|` over the rewritten terms. Auxiliaries are appended after
/// the original variables. Returns the reduced polynomial and the number of
/// auxiliaries.
pub fn quadratize_rosenberg(poly: &BinaryPolynomial) -> (BinaryPolynomial, usize) {
    let mut terms: BTreeMap<Vec<usize>, f64> = poly.terms.clone();
    let mut num_vars = poly.num_vars();
    let mut aux = 0;

    while let Some((u, v)) = most_frequent_pair(&terms) {
        let y = num_vars;
        num_vars += 1;
        aux += 1;

        let rewrite: Vec<Vec<usize>> = terms
            .keys()
            .filter(|k| k.len() >= 3 && k.binary_search(&u).is_ok() && k.binary_search(&v).is_ok())
            .cloned()
            .collect();
        let mut weight = 1.0;
        let mut out = BinaryPolynomial {
            num_vars,
            terms: BTreeMap::new(),
        };
        for key in &rewrite {
            let c = terms.remove(key).expect("collected above");
            weight += c.abs();
            let mut reduced: Vec<usize> = key.iter().copied().filter(|&w| w != u && w != v).collect();
            reduced.push(y);
            out.add_term(&reduced, c);
        }
        for (k, c) in std::mem::take(&mut terms) {
            out.add_canonical(k, c);
        }
        out.add_term(&[u, v], weight);
        out.add_term(&[u, y], -2.0 * weight);
        out.add_term(&[v, y], -2.0 * weight);
        out.add_term(&[y], 3.0 * weight);
        terms = out.terms;
    }

    (BinaryPolynomial { num_vars, terms }, aux)
}

fn most_frequent_pair(terms: &BTreeMap<Vec<usize>, f64>) -> Option<(usize, usize)> {
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for k in terms.keys().filter(|k| k.len() >= 3) {
        for (a, &u) in k.iter().enumerate() {
            for &v in &k[a + 1..] {
                *counts.entry((u, v)).or_default() += 1;
            }
        }
    }
    // max_by_key keeps the last maximum; iterate in reverse so ties go to the
    // smallest pair.
    counts
        .into_iter()
        .rev()
        .max_by_key(|&(_, c)| c)
        .map(|(pair, _)| pair)
}

//! Plain-text model format.
//!
//! ```text
//! vars 3 maxdeg 2
//! 0.5
//! -1 0
//! 3 1 2
//! ```
//!
//! The header is `vars <N> maxdeg <D>` for binary polynomials and
//! `spins <N> maxdeg <D>` for Ising models. Each following line is a
//! coefficient followed by 0-indexed variable indices; a bare coefficient is
//! the constant. Terms are written in lexicographic tuple order. Coefficients
//! use the shortest representation that round-trips.

use std::fmt::Write as _;

use super::{BinaryPolynomial, IsingModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ModelText {
    Binary(BinaryPolynomial),
    Ising(IsingModel),
}

pub fn write_poly_text(poly: &BinaryPolynomial) -> String {
    let mut out = format!("vars {} maxdeg {}\n", poly.num_vars(), poly.degree());
    for (k, c) in poly.terms() {
        write_term(&mut out, c, k);
    }
    out
}

pub fn write_ising_text(model: &IsingModel) -> String {
    let mut terms: Vec<(Vec<usize>, f64)> = Vec::new();
    if model.offset != 0.0 {
        terms.push((vec![], model.offset));
    }
    terms.extend(
        model
            .h
            .iter()
            .enumerate()
            .filter(|(_, &h)| h != 0.0)
            .map(|(i, &h)| (vec![i], h)),
    );
    terms.extend(model.j.iter().map(|(&(a, b), &c)| (vec![a, b], c)));
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    let maxdeg = terms.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = format!("spins {} maxdeg {}\n", model.num_spins(), maxdeg);
    for (k, c) in &terms {
        write_term(&mut out, *c, k);
    }
    out
}

fn write_term(out: &mut String, c: f64, vars: &[usize]) {
    let _ = write!(out, "{c}");
    for v in vars {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_model_text(text: &str) -> Result<ModelText> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (ising, n, maxdeg) = match fields.as_slice() {
        [kind @ ("vars" | "spins"), n, "maxdeg", d] => {
            let n: usize = n.parse().map_err(|_| err(hl, format!("bad variable count `{n}`")))?;
            let d: usize = d.parse().map_err(|_| err(hl, format!("bad degree `{d}`")))?;
            (*kind == "spins", n, d)
        }
        _ => return Err(err(hl, "header must be `vars|spins <N> maxdeg <D>`")),
    };
    if ising && maxdeg > 2 {
        return Err(err(hl, "Ising models have degree at most 2"));
    }

    let mut poly = BinaryPolynomial::zero(n);
    let mut model = IsingModel::zero(n);
    for (ln, line) in lines {
        let mut tokens = line.split_whitespace();
        let tok = tokens.next().expect("non-empty line");
        let c: f64 = tok.parse().map_err(|_| err(ln, format!("bad coefficient `{tok}`")))?;
        let vars = tokens
            .map(|t| t.parse::<usize>().map_err(|_| err(ln, format!("bad index `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        if let Some(&v) = vars.iter().find(|&&v| v >= n) {
            return Err(err(ln, format!("index {v} out of range for {n} variables")));
        }
        if vars.len() > maxdeg {
            return Err(err(ln, format!("term of order {} exceeds maxdeg {maxdeg}", vars.len())));
        }
        if ising {
            match *vars.as_slice() {
                [] => model.offset += c,
                [i] => model.h[i] += c,
                [a, b] => model.add_coupling(a, b, c).map_err(|e| err(ln, e.to_string()))?,
                _ => unreachable!("maxdeg checked"),
            }
        } else {
            poly.add_term(&vars, c);
        }
    }
    Ok(if ising {
        ModelText::Ising(model)
    } else {
        ModelText::Binary(poly)
    })
}

//! Parity systems: elimination over GF(2) and the incidence-column tests.
//!
//! Flipping a set `R` of variables toggles exactly the clauses whose count of
//! `R`-variables is odd, whatever the current values are. So a break `R` is
//! repaired by a disjoint `S` iff the GF(2) column sums of `R` and `S`
//! agree, on every model at once.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{Assignment, Formula, Var};
use crate::oracle::{mask_vars, subsets_by_size};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AffineError {
    #[error("clause {0} is not a parity clause")]
    NotAffine(usize),
    #[error("the (r,s) search packs variables into 64 bits; got {0} variables")]
    TooManyVariables(usize),
}

fn require_affine(f: &Formula) -> Result<(), AffineError> {
    match f.clauses().iter().position(|c| !c.is_parity()) {
        Some(i) => Err(AffineError::NotAffine(i + 1)),
        None => Ok(()),
    }
}

/// A GF(2) vector stored in 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitVec(Vec<u64>);

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec(vec![0; len.div_ceil(64)])
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b)
        })
    }
}

/// Clause-by-variable occurrence matrix; polarity is ignored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    num_clauses: usize,
    /// `columns[v−1]`: the clauses containing `v`.
    columns: Vec<BitVec>,
}

impl IncidenceMatrix {
    pub fn new(f: &Formula) -> Self {
        let m = f.clauses().len();
        let mut columns = vec![BitVec::zeros(m); f.num_vars()];
        for (c, clause) in f.clauses().iter().enumerate() {
            for v in clause.vars() {
                columns[v.offset()].set(c);
            }
        }
        IncidenceMatrix {
            num_clauses: m,
            columns,
        }
    }

    pub fn column(&self, v: Var) -> &BitVec {
        &self.columns[v.offset()]
    }

    pub fn entry(&self, clause: usize, v: Var) -> bool {
        self.columns[v.offset()].get(clause)
    }

    /// GF(2) sum of the columns of `vars`.
    pub fn column_sum<'a, I: IntoIterator<Item = &'a Var>>(&self, vars: I) -> BitVec {
        let mut acc = BitVec::zeros(self.num_clauses);
        for v in vars {
            acc.xor_assign(&self.columns[v.offset()]);
        }
        acc
    }

    fn mask_sum(&self, mask: u64) -> BitVec {
        let n = self.columns.len();
        let mut acc = BitVec::zeros(self.num_clauses);
        for i in 0..n {
            if mask >> (n - 1 - i) & 1 == 1 {
                acc.xor_assign(&self.columns[i]);
            }
        }
        acc
    }
}

/// Break-repair partner of every variable occurring in some clause.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Pairing(pub BTreeMap<Var, Var>);

impl Pairing {
    pub fn partner(&self, v: Var) -> Option<Var> {
        self.0.get(&v).copied()
    }
}

/// A solution with free variables set to 0; pivots are taken at the lowest
/// available column.
pub fn solve_affine(f: &Formula) -> Result<Option<Assignment>, AffineError> {
    require_affine(f)?;
    let n = f.num_vars();
    // each row: coefficients in bits 0..n, right-hand side at bit n
    let mut rows: Vec<BitVec> = f
        .clauses()
        .iter()
        .map(|c| {
            let mut row = BitVec::zeros(n + 1);
            for v in c.vars() {
                row.set(v.offset());
            }
            if c.parity_target() == Some(true) {
                row.set(n);
            }
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    for col in 0..n {
        let Some(p) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next, p);
        let pivot = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push((next, col));
        next += 1;
    }
    // a remaining row 0 = 1 means no solution
    if rows[next..].iter().any(|r| r.get(n)) {
        return Ok(None);
    }
    let mut x = Assignment::zeros(n);
    for (row, col) in pivots {
        x.set(Var::from_index(col + 1), rows[row].get(n));
    }
    Ok(Some(x))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Delta11Affine {
    pub verdict: bool,
    pub satisfiable: bool,
    pub pairing: Option<Pairing>,
    /// First occurring variable without an equal column, on failure.
    pub unmatched: Option<Var>,
    pub model: Option<Assignment>,
}

/// δ(1,1): satisfiable, and every occurring variable has another variable
/// with an identical incidence column (the lowest-index one is chosen).
pub fn delta11_affine(f: &Formula) -> Result<Delta11Affine, AffineError> {
    let model = solve_affine(f)?;
    let m = IncidenceMatrix::new(f);
    let mut pairing = BTreeMap::new();
    let mut unmatched = None;
    for v in f.vars() {
        let col = m.column(v);
        if col.is_zero() {
            continue;
        }
        match f.vars().find(|&w| w != v && m.column(w) == col) {
            Some(w) => {
                pairing.insert(v, w);
            }
            None => {
                unmatched = Some(v);
                break;
            }
        }
    }
    let paired = unmatched.is_none();
    Ok(Delta11Affine {
        verdict: model.is_some() && paired,
        satisfiable: model.is_some(),
        pairing: paired.then_some(Pairing(pairing)),
        unmatched,
        model: if paired { model } else { None },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaRsAffine {
    pub verdict: bool,
    pub satisfiable: bool,
    /// The first break set (by size, then lexicographically) with no repair.
    pub counterexample: Option<Vec<Var>>,
}

/// δ(r,s): satisfiable, and every `R` with `|R| <= r` has a disjoint `S`
/// with `|S| <= s` and the same column sum. Exhaustive over both sets.
pub fn delta_rs_affine(f: &Formula, r: usize, s: usize) -> Result<DeltaRsAffine, AffineError> {
    let satisfiable = solve_affine(f)?.is_some();
    let n = f.num_vars();
    if n > 64 {
        return Err(AffineError::TooManyVariables(n));
    }
    let m = IncidenceMatrix::new(f);
    let repairs: Vec<(u64, BitVec)> = subsets_by_size(n, s, true)
        .into_iter()
        .map(|mask| (mask, m.mask_sum(mask)))
        .collect();
    let counterexample = subsets_by_size(n, r, false)
        .into_par_iter()
        .find_first(|&b| {
            let sum = m.mask_sum(b);
            !repairs.iter().any(|(s, t)| s & b == 0 && *t == sum)
        })
        .map(|b| mask_vars(b, n));
    Ok(DeltaRsAffine {
        verdict: satisfiable && counterexample.is_none(),
        satisfiable,
        counterexample,
    })
}

/// δ*: any δ-model of a parity system is a δ*-model, so this is the δ(1,1) verdict.
pub fn delta_star_affine(f: &Formula) -> Result<bool, AffineError> {
    Ok(delta11_affine(f)?.verdict)
}

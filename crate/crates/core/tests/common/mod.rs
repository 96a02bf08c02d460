//! Reference implementation of the robustness definitions for tests.
//!
//! Deliberately naive: assignments are `Vec<bool>`, sets are `HashSet`s,
//! and every check follows the definition literally. It shares nothing with
//! the library oracle except `evaluate`.

#![allow(dead_code)]

use std::collections::HashSet;

use robustsat::{Assignment, Formula};

pub type Bits = Vec<bool>;

pub fn all_assignments(n: usize) -> Vec<Bits> {
    (0..1u64 << n)
        .map(|i| (0..n).map(|b| i >> (n - 1 - b) & 1 == 1).collect())
        .collect()
}

pub fn models_of(n: usize, eval: impl Fn(&Bits) -> bool) -> Vec<Bits> {
    all_assignments(n).into_iter().filter(|x| eval(x)).collect()
}

pub fn formula_models(f: &Formula) -> Vec<Bits> {
    models_of(f.num_vars(), |x| f.evaluate(&Assignment::new(x.clone())).unwrap())
}

/// Index subsets of `0..n` of size `lo..=hi`.
pub fn subsets(n: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(start: usize, n: usize, hi: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, lo: usize) {
        if cur.len() >= lo {
            out.push(cur.clone());
        }
        if cur.len() == hi {
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, hi, cur, out, lo);
            cur.pop();
        }
    }
    rec(0, n, hi, &mut Vec::new(), &mut out, lo);
    out
}

fn flip(x: &Bits, idx: &[usize]) -> Bits {
    let mut y = x.clone();
    for &i in idx {
        y[i] = !y[i];
    }
    y
}

/// Every break of at most `r` bits of `x` has a disjoint repair of at most
/// `s` bits landing in `target`.
pub fn robust_into(x: &Bits, r: usize, s: usize, target: &HashSet<Bits>) -> bool {
    let n = x.len();
    let repairs = subsets(n, 0, s);
    subsets(n, 1, r).iter().all(|brk| {
        let broken = flip(x, brk);
        repairs
            .iter()
            .filter(|rep| rep.iter().all(|i| !brk.contains(i)))
            .any(|rep| target.contains(&flip(&broken, rep)))
    })
}

/// δ(r,s)-models: models whose breaks repair to models.
pub fn delta_models(models: &[Bits], r: usize, s: usize) -> Vec<Bits> {
    let all: HashSet<Bits> = models.iter().cloned().collect();
    models.iter().filter(|x| robust_into(x, r, s, &all)).cloned().collect()
}

/// Degree-`k` membership by direct recursion on the definition.
pub fn is_delta_k(x: &Bits, models: &HashSet<Bits>, r: usize, s: usize, k: u32) -> bool {
    if !models.contains(x) {
        return false;
    }
    if k == 0 {
        return true;
    }
    let n = x.len();
    let repairs = subsets(n, 0, s);
    subsets(n, 1, r).iter().all(|brk| {
        let broken = flip(x, brk);
        repairs
            .iter()
            .filter(|rep| rep.iter().all(|i| !brk.contains(i)))
            .any(|rep| is_delta_k(&flip(&broken, rep), models, r, s, k - 1))
    })
}

/// Largest stable subset of `models`, by repeated deletion.
pub fn stable_core(models: &[Bits], r: usize, s: usize) -> HashSet<Bits> {
    let mut set: HashSet<Bits> = models.iter().cloned().collect();
    loop {
        let keep: HashSet<Bits> = set.iter().filter(|x| robust_into(x, r, s, &set)).cloned().collect();
        if keep.len() == set.len() {
            return set;
        }
        set = keep;
    }
}

pub fn to_bits(x: &Assignment) -> Bits {
    x.bits().to_vec()
}

pub fn to_assignment(x: &Bits) -> Assignment {
    Assignment::new(x.clone())
}

/// All 12 binary clauses over three variables, as DIMACS pairs.
pub fn binary_clauses_3() -> Vec<[i64; 2]> {
    let mut out = Vec::new();
    for (a, b) in [(1, 2), (1, 3), (2, 3)] {
        for sa in [1, -1] {
            for sb in [1, -1] {
                out.push([sa * a, sb * b]);
            }
        }
    }
    out
}

/// Every validate-clean formula built from a subset of the 12 binary
/// clauses on three variables.
pub fn exhaustive_2sat_3() -> Vec<Formula> {
    let clauses = binary_clauses_3();
    (1u32..1 << clauses.len())
        .map(|mask| {
            let chosen: Vec<&[i64]> = (0..clauses.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| &clauses[i][..])
                .collect();
            Formula::from_dimacs_clauses(3, &chosen).unwrap()
        })
        .filter(|f| robustsat::validate(f).is_clean())
        .collect()
}

/// The random validate-clean 2-SAT corpus used by the cross-validation
/// suites.
pub fn random_2sat_corpus(count: usize, max_vars: usize, seed: u64) -> Vec<Formula> {
    let mut rng = robustsat::random::rng(seed);
    (0..count)
        .map(|_| robustsat::random::random_2sat_sized(&mut rng, max_vars).unwrap())
        .collect()
}

/// Planted formulas (`2..=max_vars` variables, up to two extra clauses).
pub fn planted_2sat_corpus(count: usize, max_vars: usize, seed: u64) -> Vec<Formula> {
    use rand::Rng;
    let mut rng = robustsat::random::rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=max_vars);
            let extra = rng.gen_range(0..=2);
            robustsat::random::random_2sat_planted(&mut rng, n, extra).unwrap()
        })
        .collect()
}

pub fn random_affine_corpus(count: usize, max_vars: usize, max_clauses: usize, seed: u64) -> Vec<Formula> {
    let mut rng = robustsat::random::rng(seed);
    (0..count)
        .map(|_| robustsat::random::random_affine_sized(&mut rng, max_vars, max_clauses).unwrap())
        .collect()
}

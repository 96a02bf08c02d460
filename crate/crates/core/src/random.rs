//! Seeded random instance families for corpora and cross-validation.
//!
//! Every generator draws from a [`ChaCha8Rng`], so a seed reproduces the
//! same instance on every platform.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::formula::{validate, Clause, Formula, FormulaError, Literal, Var};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_literal<R: Rng>(rng: &mut R, var: usize) -> Literal {
    Literal::new(Var::from_index(var), rng.gen())
}

/// A clause over `k` distinct variables of `1..=n` with random polarities.
pub fn random_clause<R: Rng>(rng: &mut R, n: usize, k: usize) -> Result<Clause, FormulaError> {
    let vars: Vec<usize> = (1..=n).collect();
    let lits = vars
        .choose_multiple(rng, k)
        .map(|&v| random_literal(rng, v))
        .collect::<Vec<_>>();
    Clause::disjunction(lits)
}

/// Uniform `k`-CNF with `m` clauses (duplicates allowed).
pub fn random_ksat<R: Rng>(rng: &mut R, n: usize, m: usize, k: usize) -> Result<Formula, FormulaError> {
    if k > n {
        return Err(FormulaError::BadParameters(format!("clause width {k} exceeds {n} variables")));
    }
    let clauses = (0..m).map(|_| random_clause(rng, n, k)).collect::<Result<_, _>>()?;
    Formula::new(n, clauses)
}

/// A 2-CNF over `n >= 2` variables that passes [`validate`]: `m` distinct
/// binary clauses, then one repair clause per missing polarity.
pub fn random_2sat<R: Rng>(rng: &mut R, n: usize, m: usize) -> Result<Formula, FormulaError> {
    if n < 2 {
        return Err(FormulaError::BadParameters("need at least 2 variables".into()));
    }
    let mut f = Formula::empty(n);
    // 2n(n-1) distinct binary clauses exist; stop short of exhausting them
    let limit = (2 * n * (n - 1)).min(m);
    while f.clauses().len() < limit {
        f.push_unique(random_clause(rng, n, 2)?)?;
    }
    let mut attempts = 0;
    while !validate(&f).is_clean() {
        let mut seen = vec![[false; 2]; n];
        for c in f.clauses() {
            for l in c.literals() {
                seen[l.var().offset()][usize::from(l.is_positive())] = true;
            }
        }
        // the first missing polarity gets a clause with a random partner
        let (v, positive) = (0..n)
            .flat_map(|v| [(v, false), (v, true)])
            .find(|&(v, p)| !seen[v][usize::from(p)])
            .expect("only polarity issues can arise");
        let lit = Literal::new(Var::from_index(v + 1), positive);
        let partner = loop {
            let w = rng.gen_range(1..=n);
            if w != v + 1 {
                break w;
            }
        };
        f.push_unique(Clause::disjunction(vec![lit, random_literal(rng, partner)])?)?;
        attempts += 1;
        assert!(attempts < 16 * n * n, "repair loop did not converge");
    }
    Ok(f)
}

/// A validate-clean 2-CNF with a random size: `2..=max_vars` variables and
/// between `n/2` and `2n` sampled clauses before repair.
pub fn random_2sat_sized<R: Rng>(rng: &mut R, max_vars: usize) -> Result<Formula, FormulaError> {
    let n = rng.gen_range(2..=max_vars.max(2));
    let m = rng.gen_range((n / 2).max(1)..=2 * n);
    random_2sat(rng, n, m)
}

/// A validate-clean 2-CNF built around robust structure: variables are
/// paired at random, each pair gets `v = w` or `v ≠ w` as two clauses, and
/// `extra` random binary clauses are added on top. An odd variable left out
/// of the pairing joins the last pair through two more clauses.
pub fn random_2sat_planted<R: Rng>(rng: &mut R, n: usize, extra: usize) -> Result<Formula, FormulaError> {
    if n < 2 {
        return Err(FormulaError::BadParameters("need at least 2 variables".into()));
    }
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut f = Formula::empty(n);
    for pair in order.chunks(2) {
        let (v, w) = match *pair {
            [v, w] => (Var::from_index(v), Var::from_index(w)),
            [v] => (Var::from_index(v), Var::from_index(order[0])),
            _ => unreachable!(),
        };
        let flip: bool = rng.gen();
        f.push_unique(Clause::disjunction(vec![Literal::new(v, flip), Literal::new(w, true)])?)?;
        f.push_unique(Clause::disjunction(vec![Literal::new(v, !flip), Literal::new(w, false)])?)?;
    }
    for _ in 0..extra {
        f.push_unique(random_clause(rng, n, 2)?)?;
    }
    debug_assert!(validate(&f).is_clean());
    Ok(f)
}

/// Parity system with `m` non-empty clauses over `n` variables; each variable
/// joins a clause with probability `density`.
pub fn random_affine<R: Rng>(rng: &mut R, n: usize, m: usize, density: f64) -> Result<Formula, FormulaError> {
    if n == 0 && m > 0 {
        return Err(FormulaError::BadParameters("parity clauses need variables".into()));
    }
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let mut vars: Vec<usize> = (1..=n).filter(|_| rng.gen_bool(density)).collect();
        if vars.is_empty() {
            vars.push(rng.gen_range(1..=n));
        }
        clauses.push(Clause::xor(&vars, rng.gen())?);
    }
    Formula::new(n, clauses)
}

/// A parity system with `1..=max_vars` variables and `1..=max_clauses`
/// clauses at a random density in `[0.2, 0.6]`.
pub fn random_affine_sized<R: Rng>(rng: &mut R, max_vars: usize, max_clauses: usize) -> Result<Formula, FormulaError> {
    let n = rng.gen_range(1..=max_vars.max(1));
    let m = rng.gen_range(1..=max_clauses.max(1));
    let density = rng.gen_range(0.2..=0.6);
    random_affine(rng, n, m, density)
}

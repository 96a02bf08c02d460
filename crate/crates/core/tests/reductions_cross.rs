mod common;

use std::collections::{BTreeSet, HashSet};

use common::*;
use robustsat::random::{random_ksat, rng};
use robustsat::reductions::{
    add_escape_variable, canonical_witness, escape_stable_set, ksat_to_2sat_gadget, threesat_to_dualhorn,
    threesat_to_horn, to_0valid, verify_reduction, HornOptions, ReductionError, ReductionKind,
};
use robustsat::{classify, ClassFlag, Formula, Oracle, OracleError, RobustnessSpec};

fn f(n: usize, clauses: &[&[i64]]) -> Formula {
    Formula::from_dimacs_clauses(n, clauses).unwrap()
}

fn unsat2() -> Formula {
    f(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]])
}

#[test]
fn escape_on_random_small_instances() {
    let o = Oracle::default();
    let mut r = rng(41);
    for i in 0..20 {
        let n = 2 + i % 2;
        let src = random_ksat(&mut r, n, 1 + i % 4, 1 + i % n).unwrap();
        let rep = verify_reduction(&src, ReductionKind::Escape, &o).unwrap();
        assert!(rep.equivalence, "{:?}", src.clause_set());
        assert_eq!(rep.source_satisfiable, !formula_models(&src).is_empty());
    }
}

#[test]
fn escape_of_unsat_has_no_robust_model() {
    let red = add_escape_variable(&unsat2()).unwrap();
    assert!(delta_models(&formula_models(&red.target), 1, 1).is_empty());
}

#[test]
fn escape_stable_set_is_stable() {
    let o = Oracle::default();
    let src = f(3, &[&[1, 2], &[-1, 3], &[-2, -3]]);
    let red = add_escape_variable(&src).unwrap();
    let core = stable_core(&formula_models(&red.target), 1, 1);
    for x in o.enumerate_models(&src).unwrap() {
        let set = escape_stable_set(&x);
        assert_eq!(set.len(), src.num_vars() + 1);
        assert!(o.is_stable_set(&red.target, &set, 1, 1).unwrap());
        assert!(set.iter().all(|y| core.contains(&to_bits(y))));
    }
}

#[test]
fn zero_valid_of_unsat() {
    let red = to_0valid(&unsat2()).unwrap();
    assert!(classify(&red.target).contains(ClassFlag::ZeroValid));
    assert!(delta_models(&formula_models(&red.target), 1, 1).is_empty());
}

#[test]
fn ksat_satisfiable_witness() {
    let o = Oracle::default();
    let src = f(3, &[&[1, 2, 3]]);
    let red = ksat_to_2sat_gadget(&src, 2).unwrap();
    let w = canonical_witness(&red, &to_assignment(&vec![true, false, false])).unwrap();
    assert!(o.is_delta_model(&red.target, &w, RobustnessSpec::delta(1, 2)).unwrap().holds);
}

#[test]
fn ksat_unsat_core_exceeds_cap() {
    // all eight sign patterns on three variables: 3 + 8·7 = 59 target variables
    let clauses: Vec<Vec<i64>> = (0..8)
        .map(|m: i64| (1..=3).map(|v| if m >> (v - 1) & 1 == 1 { -v } else { v }).collect())
        .collect();
    let refs: Vec<&[i64]> = clauses.iter().map(|c| &c[..]).collect();
    let src = f(3, &refs);
    assert!(formula_models(&src).is_empty());
    let err = verify_reduction(&src, ReductionKind::KsatTo2sat { s: 2 }, &Oracle::default()).unwrap_err();
    assert_eq!(err, ReductionError::Oracle(OracleError::CapExceeded { n: 59, cap: 24 }));
}

#[test]
fn ksat_two_clause_sources() {
    let o = Oracle::default();
    let mut r = rng(42);
    for _ in 0..6 {
        let src = random_ksat(&mut r, 4, 2, 3).unwrap();
        let rep = verify_reduction(&src, ReductionKind::KsatTo2sat { s: 2 }, &o).unwrap();
        assert!(rep.equivalence);
        assert!(rep.canonical_witness.unwrap().passes);
    }
}

#[test]
fn horn_variants_are_equivalent() {
    let o = Oracle::default();
    let src = f(3, &[&[1, -2, 3]]);
    for options in [
        HornOptions::default(),
        HornOptions { normalize_pure_literals: true, ..HornOptions::default() },
    ] {
        for kind in [ReductionKind::Horn { s: 1, options }, ReductionKind::DualHorn { s: 1, options }] {
            let rep = verify_reduction(&src, kind, &o).unwrap();
            assert!(rep.equivalence, "{kind} {options:?}");
            assert!(rep.canonical_witness.unwrap().passes, "{kind} {options:?}");
        }
    }
}

#[test]
fn exclusion_clauses_destroy_robust_models() {
    let o = Oracle::default();
    let src = f(3, &[&[1, -2, 3]]);
    let options = HornOptions { exclusion_clauses: true, ..HornOptions::default() };
    for kind in [ReductionKind::Horn { s: 1, options }, ReductionKind::DualHorn { s: 1, options }] {
        let rep = verify_reduction(&src, kind, &o).unwrap();
        assert!(rep.source_satisfiable);
        assert!(!rep.claims[0].target_has_model, "{kind}");
        assert!(!rep.equivalence);
    }
}

#[test]
fn horn_witness_is_found_by_oracle() {
    let o = Oracle::default();
    let src = f(3, &[&[1, 2, 3]]);
    let red = threesat_to_horn(&src, 1, HornOptions::default()).unwrap();
    let robust: BTreeSet<_> = o
        .enumerate_models(&red.target)
        .unwrap()
        .into_iter()
        .filter(|x| o.is_delta_model(&red.target, x, RobustnessSpec::delta11()).unwrap().holds)
        .collect();
    for x in o.enumerate_models(&src).unwrap() {
        assert!(robust.contains(&canonical_witness(&red, &x).unwrap()));
    }
}

/// Negates every literal of every clause.
fn negate_all(phi: &Formula) -> BTreeSet<Vec<i64>> {
    phi.clause_set()
        .into_iter()
        .map(|c| {
            let mut c: Vec<i64> = c.into_iter().map(|l| -l).collect();
            c.sort_unstable_by_key(|l| (l.abs(), *l));
            c
        })
        .collect()
}

fn rename(clauses: BTreeSet<Vec<i64>>, map: impl Fn(i64) -> i64) -> BTreeSet<Vec<i64>> {
    clauses
        .into_iter()
        .map(|c| {
            let mut c: Vec<i64> = c.into_iter().map(|l| l.signum() * map(l.abs())).collect();
            c.sort_unstable_by_key(|l| (l.abs(), *l));
            c
        })
        .collect()
}

fn canon(clauses: BTreeSet<Vec<i64>>) -> BTreeSet<Vec<i64>> {
    rename(clauses, |v| v)
}

#[test]
fn dual_horn_mirrors_horn() {
    for s in 1..=2usize {
        for mask in 0..8i64 {
            let lits: Vec<i64> = (1..=3).map(|v| if mask >> (v - 1) & 1 == 1 { -v } else { v }).collect();
            let flipped: Vec<i64> = lits.iter().map(|l| -l).collect();
            let dual = threesat_to_dualhorn(&f(3, &[&lits]), s, HornOptions::default()).unwrap();
            let horn = threesat_to_horn(&f(3, &[&flipped]), s, HornOptions::default()).unwrap();
            // β-chains run the other way in the mirror
            let beta: HashSet<i64> = horn
                .var_map
                .iter()
                .filter(|(r, _)| r.starts_with("beta"))
                .map(|(_, v)| v.index() as i64)
                .collect();
            let first_beta = *beta.iter().min().unwrap();
            let width = 2 * s as i64;
            let mirrored = rename(negate_all(&horn.target), |v| {
                if beta.contains(&v) {
                    let (block, j) = ((v - first_beta) / width, (v - first_beta) % width);
                    first_beta + block * width + (width - 1 - j)
                } else {
                    v
                }
            });
            assert_eq!(mirrored, canon(dual.target.clause_set()), "s={s} mask={mask}");
        }
    }
}

#[test]
fn var_map_is_injective_and_complete() {
    let src = f(4, &[&[1, 2, 3], &[-2, 3, -4]]);
    for red in [
        threesat_to_horn(&src, 2, HornOptions::default()).unwrap(),
        threesat_to_dualhorn(&src, 1, HornOptions::default()).unwrap(),
        ksat_to_2sat_gadget(&src, 2).unwrap(),
        add_escape_variable(&src).unwrap(),
    ] {
        let vars: BTreeSet<usize> = red.var_map.iter().map(|(_, v)| v.index()).collect();
        assert_eq!(vars.len(), red.var_map.len());
        assert_eq!(vars, (1..=red.target.num_vars()).collect());
        let roles: HashSet<&str> = red.var_map.iter().map(|(r, _)| r).collect();
        assert_eq!(roles.len(), red.var_map.len());
    }
}

//! 2-SAT procedures against the reference definitions.

mod common;

use std::collections::HashSet;

use common::*;
use robustsat::formula::gen_pair_chain;
use robustsat::twosat::{
    algorithm1, algorithm2, build_graph, check_conditions_c1_c2, delta_star_2sat, enforce_strong_3_consistency,
    has_opposite_path, solve_2sat, Consistency, Rejection, TwoSatError,
};
use robustsat::{Formula, Var};

fn f(n: usize, clauses: &[&[i64]]) -> Formula {
    Formula::from_dimacs_clauses(n, clauses).unwrap()
}

fn corpus() -> Vec<Formula> {
    let mut c = random_2sat_corpus(150, 8, 21);
    c.extend(planted_2sat_corpus(150, 8, 22));
    c
}

#[test]
fn solver_matches_enumeration() {
    for phi in corpus().iter().chain(&exhaustive_2sat_3()) {
        let models = formula_models(phi);
        match solve_2sat(phi).unwrap() {
            Some(x) => assert!(models.contains(&to_bits(&x))),
            None => assert!(models.is_empty()),
        }
    }
}

#[test]
fn graph_is_skew_symmetric() {
    for phi in corpus() {
        let g = build_graph(&phi).unwrap();
        assert!(g.is_symmetric());
        assert_eq!(g.num_edges(), 2 * phi.clauses().len());
        for (a, b) in g.edges() {
            assert!(g.has_edge(!b, !a));
        }
    }
}

#[test]
fn algorithm1_witness_is_robust() {
    for phi in corpus() {
        let res = algorithm1(&phi).unwrap();
        let models = formula_models(&phi);
        let robust: HashSet<Bits> = delta_models(&models, 1, 1).into_iter().collect();
        assert_eq!(res.verdict, !robust.is_empty(), "{:?}", phi.clause_set());
        if let Some(x) = res.model {
            assert!(robust.contains(&to_bits(&x)));
            assert!(res.forced.literals.iter().all(|l| l.value(&x)));
        }
    }
}

#[test]
fn algorithm2_never_rejects_a_robust_formula() {
    for phi in corpus() {
        let robust = !delta_models(&formula_models(&phi), 1, 1).is_empty();
        let res = algorithm2(&phi).unwrap();
        if robust {
            assert!(res.verdict, "{:?} rejected: {:?}", phi.clause_set(), res.rejection);
        }
        if let Some(x) = &res.model {
            assert!(phi.evaluate(x).unwrap());
        }
    }
}

#[test]
fn path_conditions_characterize_robust_models() {
    for phi in corpus() {
        if has_opposite_path(&build_graph(&phi).unwrap()).is_some() {
            continue;
        }
        let models = formula_models(&phi);
        let robust: HashSet<Bits> = delta_models(&models, 1, 1).into_iter().collect();
        for x in &models {
            assert_eq!(check_conditions_c1_c2(&phi, &to_assignment(x)).unwrap(), robust.contains(x));
        }
    }
}

#[test]
fn path_condition_examples() {
    let pair = gen_pair_chain(2).unwrap();
    assert!(check_conditions_c1_c2(&pair, &to_assignment(&vec![true, true])).unwrap());
    let diamond = f(5, &[&[-1, 2], &[-2, 3], &[-1, 4], &[-4, 3], &[-1, 5], &[-5, 3]]);
    assert!(!check_conditions_c1_c2(&diamond, &to_assignment(&vec![true; 5])).unwrap());
    assert!(matches!(
        check_conditions_c1_c2(&pair, &to_assignment(&vec![true, false])),
        Err(TwoSatError::NotAModel(_))
    ));
}

#[test]
fn consistency_preserves_models_and_projects_exactly() {
    for phi in corpus() {
        let models = formula_models(&phi);
        match enforce_strong_3_consistency(&phi).unwrap() {
            Consistency::Unsat => assert!(models.is_empty()),
            Consistency::Consistent { f_hat, tables } => {
                assert_eq!(formula_models(&f_hat), models);
                let n = phi.num_vars();
                for u in 1..=n {
                    for v in 1..=n {
                        let (uu, vv) = (Var::from_index(u), Var::from_index(v));
                        let projected: HashSet<(bool, bool)> =
                            models.iter().map(|x| (x[u - 1], x[v - 1])).collect();
                        let table: HashSet<(bool, bool)> = tables.pair(uu, vv).pairs().into_iter().collect();
                        assert_eq!(table, projected, "M(v{u}, v{v}) on {:?}", phi.clause_set());
                    }
                }
            }
        }
    }
}

#[test]
fn delta_star_matches_stable_core() {
    for phi in corpus().iter().chain(&exhaustive_2sat_3()) {
        let core = stable_core(&formula_models(phi), 1, 1);
        let res = delta_star_2sat(phi).unwrap();
        assert_eq!(res.verdict, !core.is_empty(), "{:?}", phi.clause_set());
        if let Some(y0) = res.y0 {
            assert!(core.contains(&to_bits(&y0)));
        }
    }
}

#[test]
fn inequality_pair_witness() {
    let phi = f(2, &[&[1, 2], &[-1, -2]]);
    let res = delta_star_2sat(&phi).unwrap();
    assert_eq!(res.y0.unwrap().to_string(), "01");
    assert_eq!(res.partition.unwrap().cycles.len(), 1);
}

#[test]
fn long_chain_rejected_everywhere_it_should_be() {
    let phi = f(5, &[&[-1, 2], &[-2, 3], &[-3, 4], &[-4, 5]]);
    assert!(delta_models(&formula_models(&phi), 1, 1).is_empty());
    assert!(!algorithm1(&phi).unwrap().verdict);
    let star = delta_star_2sat(&phi).unwrap();
    assert!(matches!(star.rejection, Some(Rejection::LongPath { .. })));
}

#[test]
fn non_2sat_input_is_an_error() {
    let phi = f(3, &[&[1, 2, 3]]);
    assert!(matches!(algorithm1(&phi), Err(TwoSatError::NotTwoSat(_))));
    assert!(matches!(algorithm2(&phi), Err(TwoSatError::NotTwoSat(_))));
    assert!(matches!(delta_star_2sat(&phi), Err(TwoSatError::NotTwoSat(_))));
}

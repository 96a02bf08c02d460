//! 2-SAT machinery: the implication graph, satisfiability, both polynomial
//! δ(1,1) procedures and the δ* decision.
//!
//! Literal vertex numbering: `2(v−1)` is `v`, `2(v−1)+1` is `¬v`, so the
//! complement of vertex `i` is `i ^ 1`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::formula::{classify, Assignment, ClassFlag, Clause, Formula, FormulaError, Literal, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwoSatError {
    #[error("not a 2-SAT formula: {0}")]
    NotTwoSat(String),
    #[error("assignment {0} is not a model")]
    NotAModel(Assignment),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

fn require_two_sat(f: &Formula) -> Result<(), TwoSatError> {
    if classify(f).contains(ClassFlag::TwoSat) {
        return Ok(());
    }
    let reason = if f.has_parity_clauses() {
        "contains parity clauses".to_string()
    } else {
        format!("has a clause with {} literals", f.max_clause_len())
    };
    Err(TwoSatError::NotTwoSat(reason))
}

fn vertex(lit: Literal) -> usize {
    2 * lit.var().offset() + usize::from(!lit.is_positive())
}

fn literal(v: usize) -> Literal {
    Literal::new(Var::from_index(v / 2 + 1), v % 2 == 0)
}

/// `G(φ)`: clause `(a ∨ b)` contributes `¬a → b` and `¬b → a`; a unit
/// clause `(a)` contributes `¬a → a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicationGraph {
    num_vars: usize,
    succ: Vec<BTreeSet<usize>>,
    pred: Vec<BTreeSet<usize>>,
    /// An empty clause makes the formula trivially unsatisfiable.
    has_empty_clause: bool,
}

impl ImplicationGraph {
    fn with_vars(n: usize) -> Self {
        ImplicationGraph {
            num_vars: n,
            succ: vec![BTreeSet::new(); 2 * n],
            pred: vec![BTreeSet::new(); 2 * n],
            has_empty_clause: false,
        }
    }

    fn add_edge(&mut self, from: usize, to: usize) {
        self.succ[from].insert(to);
        self.pred[to].insert(from);
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_vertices(&self) -> usize {
        2 * self.num_vars
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(BTreeSet::len).sum()
    }

    /// All edges, ordered by source then target vertex.
    pub fn edges(&self) -> Vec<(Literal, Literal)> {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, out)| out.iter().map(move |&v| (literal(u), literal(v))))
            .collect()
    }

    pub fn has_edge(&self, from: Literal, to: Literal) -> bool {
        self.succ[vertex(from)].contains(&vertex(to))
    }

    pub fn successors(&self, l: Literal) -> impl Iterator<Item = Literal> + '_ {
        self.succ[vertex(l)].iter().map(|&v| literal(v))
    }

    pub fn in_degree(&self, l: Literal) -> usize {
        self.pred[vertex(l)].len()
    }

    pub fn out_degree(&self, l: Literal) -> usize {
        self.succ[vertex(l)].len()
    }

    fn isolated(&self, v: usize) -> bool {
        self.succ[v].is_empty() && self.pred[v].is_empty()
    }

    /// `(l, l′) ∈ E ⟺ (¬l′, ¬l) ∈ E`.
    pub fn is_symmetric(&self) -> bool {
        (0..self.num_vertices()).all(|u| self.succ[u].iter().all(|&v| self.succ[v ^ 1].contains(&(u ^ 1))))
    }

    /// Literals with in-degree 0 and at least one edge.
    pub fn sources(&self) -> Vec<Literal> {
        (0..self.num_vertices())
            .filter(|&v| self.pred[v].is_empty() && !self.succ[v].is_empty())
            .map(literal)
            .collect()
    }

    /// Literals with out-degree 0 and at least one edge.
    pub fn sinks(&self) -> Vec<Literal> {
        (0..self.num_vertices())
            .filter(|&v| self.succ[v].is_empty() && !self.pred[v].is_empty())
            .map(literal)
            .collect()
    }

    fn reaches(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.num_vertices()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &self.succ[u] {
                if v == to {
                    return true;
                }
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        false
    }

    /// Simple paths `(l₁, l₂, l₃)` over three distinct variables, in vertex order.
    pub fn simple_paths_len2(&self) -> Vec<[Literal; 3]> {
        let mut out = Vec::new();
        for a in 0..self.num_vertices() {
            for &b in &self.succ[a] {
                if b / 2 == a / 2 {
                    continue;
                }
                for &c in &self.succ[b] {
                    if c / 2 != a / 2 && c / 2 != b / 2 {
                        out.push([literal(a), literal(b), literal(c)]);
                    }
                }
            }
        }
        out
    }

    /// Heads of simple paths of length 2.
    pub fn two_ancestors(&self) -> Vec<Literal> {
        let heads: BTreeSet<usize> = self
            .simple_paths_len2()
            .iter()
            .map(|p| vertex(p[0]))
            .collect();
        heads.into_iter().map(literal).collect()
    }

    /// `(l, l₁, l₂)` with `l → l₁`, `l → l₂`, `l₁ ≠ l₂`, each pair once.
    pub fn fans(&self) -> Vec<[Literal; 3]> {
        let mut out = Vec::new();
        for l in 0..self.num_vertices() {
            let outs: Vec<usize> = self.succ[l].iter().copied().filter(|&v| v / 2 != l / 2).collect();
            for (i, &a) in outs.iter().enumerate() {
                for &b in &outs[i + 1..] {
                    out.push([literal(l), literal(a), literal(b)]);
                }
            }
        }
        out
    }

    /// Length (edges) of the longest simple path, stopping once `bound` is exceeded.
    pub fn longest_simple_path(&self, bound: usize) -> usize {
        let mut best = 0;
        let mut used = vec![false; self.num_vars];
        for start in 0..self.num_vertices() {
            used[start / 2] = true;
            self.extend_path(start, 0, bound, &mut used, &mut best);
            used[start / 2] = false;
            if best > bound {
                break;
            }
        }
        best
    }

    fn extend_path(&self, at: usize, len: usize, bound: usize, used: &mut [bool], best: &mut usize) {
        *best = (*best).max(len);
        if *best > bound {
            return;
        }
        for &next in &self.succ[at] {
            if !used[next / 2] {
                used[next / 2] = true;
                self.extend_path(next, len + 1, bound, used, best);
                used[next / 2] = false;
            }
        }
    }

    /// Length of the longest simple cycle (0 when acyclic), stopping once
    /// `bound` is exceeded. A cycle closes on its start vertex; every other
    /// vertex involves a fresh variable.
    pub fn longest_simple_cycle(&self, bound: usize) -> usize {
        let mut best = 0;
        let mut used = vec![false; self.num_vars];
        for start in 0..self.num_vertices() {
            used[start / 2] = true;
            self.extend_cycle(start, start, 0, bound, &mut used, &mut best);
            used[start / 2] = false;
            if best > bound {
                break;
            }
        }
        best
    }

    fn extend_cycle(
        &self,
        start: usize,
        at: usize,
        len: usize,
        bound: usize,
        used: &mut [bool],
        best: &mut usize,
    ) {
        if *best > bound {
            return;
        }
        for &next in &self.succ[at] {
            if next == start && len >= 1 {
                *best = (*best).max(len + 1);
            } else if !used[next / 2] && len < bound {
                used[next / 2] = true;
                self.extend_cycle(start, next, len + 1, bound, used, best);
                used[next / 2] = false;
            }
        }
    }

    /// Strongly connected components (Kosaraju), numbered in topological
    /// order of the condensation.
    fn components(&self) -> Vec<usize> {
        let n = self.num_vertices();
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut stack = vec![(root, self.succ[root].iter())];
            while let Some((u, it)) = stack.last_mut() {
                let u = *u;
                match it.next() {
                    Some(&v) if !seen[v] => {
                        seen[v] = true;
                        stack.push((v, self.succ[v].iter()));
                    }
                    Some(_) => {}
                    None => {
                        order.push(u);
                        stack.pop();
                    }
                }
            }
        }
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for &root in order.iter().rev() {
            if comp[root] != usize::MAX {
                continue;
            }
            comp[root] = next;
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                for &v in &self.pred[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }
}

/// Builds `G(φ)`.
pub fn build_graph(f: &Formula) -> Result<ImplicationGraph, TwoSatError> {
    require_two_sat(f)?;
    let mut g = ImplicationGraph::with_vars(f.num_vars());
    for clause in f.clauses() {
        match *clause.literals() {
            [] => g.has_empty_clause = true,
            [a] => g.add_edge(vertex(!a), vertex(a)),
            [a, b] => {
                g.add_edge(vertex(!a), vertex(b));
                g.add_edge(vertex(!b), vertex(a));
            }
            _ => unreachable!("checked by require_two_sat"),
        }
    }
    Ok(g)
}

fn solve_graph(g: &ImplicationGraph) -> Option<Assignment> {
    if g.has_empty_clause {
        return None;
    }
    let comp = g.components();
    let mut x = Assignment::zeros(g.num_vars);
    for i in 0..g.num_vars {
        let (pos, neg) = (2 * i, 2 * i + 1);
        if comp[pos] == comp[neg] {
            return None;
        }
        if g.isolated(pos) && g.isolated(neg) {
            continue;
        }
        // the literal later in topological order is set true
        x.set(Var::from_index(i + 1), comp[pos] > comp[neg]);
    }
    Some(x)
}

/// A model, or `None` when some `x` and `¬x` share a strongly connected
/// component. Variables without edges get 0.
pub fn solve_2sat(f: &Formula) -> Result<Option<Assignment>, TwoSatError> {
    Ok(solve_graph(&build_graph(f)?))
}

/// The lowest literal `l` with a path `l ⇝ ¬l`, if any.
pub fn has_opposite_path(g: &ImplicationGraph) -> Option<Literal> {
    (0..g.num_vertices())
        .find(|&v| g.reaches(v, v ^ 1))
        .map(literal)
}

/// Literal values every δ-model must take, as collected by a procedure.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ForcedLiterals {
    /// Sorted, without repeats.
    pub literals: Vec<Literal>,
}

impl ForcedLiterals {
    fn insert(&mut self, lit: Literal) {
        if let Err(pos) = self.literals.binary_search(&lit) {
            self.literals.insert(pos, lit);
        }
    }

    /// The forced value, `None` when unforced or forced both ways.
    pub fn value(&self, var: Var) -> Option<bool> {
        let pos = self.literals.binary_search(&var.pos()).is_ok();
        let neg = self.literals.binary_search(&var.neg()).is_ok();
        match (pos, neg) {
            (true, false) => Some(true),
            (false, true) => Some(false),
            _ => None,
        }
    }

    /// No variable forced both ways.
    pub fn is_consistent(&self) -> bool {
        self.literals.windows(2).all(|w| w[0].var() != w[1].var())
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }
}

/// Why a procedure answered no.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum Rejection {
    Unsatisfiable,
    /// A path from the literal to its complement.
    OppositePath { literal: Literal },
    /// The strengthened formula is unsatisfiable.
    ConstraintsUnsatisfiable,
    /// `φ ∧ (u)` or `φ ∧ (¬u)` is unsatisfiable.
    BranchUnsatisfiable { var: Var },
    /// The disjoint pairs of a variable share no member.
    NoCommonMember { var: Var },
    /// A 2-cycle touches other vertices.
    CycleNotIsolated { literal: Literal },
    /// A vertex with positive in- and out-degree, outside 2-cycles.
    LongPath { literal: Literal },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Algorithm1Result {
    pub verdict: bool,
    pub rejection: Option<Rejection>,
    /// `φ` with the added clauses; equal to `φ` when rejected early.
    pub phi_b: Formula,
    /// The clauses added to `φ`, in insertion order.
    pub added: Vec<Clause>,
    pub model: Option<Assignment>,
    pub forced: ForcedLiterals,
}

/// The reduction to plain satisfiability of a strengthened `φ_B`.
pub fn algorithm1(f: &Formula) -> Result<Algorithm1Result, TwoSatError> {
    let g = build_graph(f)?;
    let reject = |rejection| Algorithm1Result {
        verdict: false,
        rejection: Some(rejection),
        phi_b: f.clone(),
        added: Vec::new(),
        model: None,
        forced: ForcedLiterals::default(),
    };
    if solve_graph(&g).is_none() {
        return Ok(reject(Rejection::Unsatisfiable));
    }
    if let Some(literal) = has_opposite_path(&g) {
        return Ok(reject(Rejection::OppositePath { literal }));
    }

    let mut phi_b = f.clone();
    let mut added = Vec::new();
    let mut forced = ForcedLiterals::default();
    let mut add = |phi_b: &mut Formula, lits: Vec<Literal>| -> Result<(), TwoSatError> {
        let clause = Clause::disjunction(lits)?;
        if phi_b.push_unique(clause.clone())? {
            added.push(clause);
        }
        Ok(())
    };

    // (C1): heads of length-2 simple paths are false
    for l in g.two_ancestors() {
        forced.insert(!l);
        add(&mut phi_b, vec![!l])?;
    }
    for l in g.sources() {
        forced.insert(!l);
        add(&mut phi_b, vec![!l])?;
    }
    for l in g.sinks() {
        forced.insert(l);
        add(&mut phi_b, vec![l])?;
    }
    // (C2): of two successors of a literal, at least one is true
    for [_, a, b] in g.fans() {
        if a.var() != b.var() {
            add(&mut phi_b, vec![a, b])?;
        }
    }

    let model = solve_2sat(&phi_b)?;
    Ok(Algorithm1Result {
        verdict: model.is_some(),
        rejection: model.is_none().then_some(Rejection::ConstraintsUnsatisfiable),
        phi_b,
        added,
        model,
        forced,
    })
}

/// Whether model `x` satisfies (C1) on every length-2 simple path and (C2)
/// on every fan.
pub fn check_conditions_c1_c2(f: &Formula, x: &Assignment) -> Result<bool, TwoSatError> {
    let g = build_graph(f)?;
    if !f.evaluate(x)? {
        return Err(TwoSatError::NotAModel(x.clone()));
    }
    let c1 = g
        .simple_paths_len2()
        .iter()
        .all(|[a, _, c]| !a.value(x) && c.value(x));
    let c2 = g
        .fans()
        .iter()
        .all(|p| p.iter().any(|l| l.value(x)));
    Ok(c1 && c2)
}

// ---------------------------------------------------------------------------
// Strong 3-consistency

/// Subset of `{0,1}²`; bit `2a+b` holds the pair `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PairTable(u8);

impl PairTable {
    pub const FULL: PairTable = PairTable(0b1111);
    pub const EMPTY: PairTable = PairTable(0);

    pub fn from_pairs(pairs: &[(bool, bool)]) -> Self {
        PairTable(pairs.iter().fold(0, |m, &(a, b)| m | 1 << (2 * u8::from(a) + u8::from(b))))
    }

    pub fn contains(self, a: bool, b: bool) -> bool {
        self.0 >> (2 * u8::from(a) + u8::from(b)) & 1 == 1
    }

    pub fn pairs(self) -> Vec<(bool, bool)> {
        [(false, false), (false, true), (true, false), (true, true)]
            .into_iter()
            .filter(|&(a, b)| self.contains(a, b))
            .collect()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersect(self, other: PairTable) -> PairTable {
        PairTable(self.0 & other.0)
    }

    /// `{(¬α, β) | (α, β) ∈ self}`.
    pub fn negate_first(self) -> PairTable {
        PairTable((self.0 >> 2) | ((self.0 & 0b11) << 2))
    }

    pub fn transpose(self) -> PairTable {
        let bit = |i: u8| self.0 >> i & 1;
        PairTable(bit(0) | bit(2) << 1 | bit(1) << 2 | bit(3) << 3)
    }

    fn restrict(self, da: u8, db: u8) -> PairTable {
        let mut m = 0;
        for a in 0..2u8 {
            for b in 0..2u8 {
                if da >> a & 1 == 1 && db >> b & 1 == 1 {
                    m |= 1 << (2 * a + b);
                }
            }
        }
        PairTable(self.0 & m)
    }

    /// Relational composition `self ∘ other` through a middle domain mask.
    fn compose(self, other: PairTable, mid: u8) -> PairTable {
        let mut m = 0;
        for a in [false, true] {
            for b in [false, true] {
                let linked = [false, true].into_iter().any(|c| {
                    mid >> u8::from(c) & 1 == 1 && self.contains(a, c) && other.contains(c, b)
                });
                if linked {
                    m |= 1 << (2 * u8::from(a) + u8::from(b));
                }
            }
        }
        PairTable(m)
    }
}

/// `M(u,v)` for every ordered pair, plus single-variable domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyTables {
    num_vars: usize,
    /// Bit 0: value 0 allowed, bit 1: value 1 allowed.
    domains: Vec<u8>,
    pairs: Vec<PairTable>,
}

impl ConsistencyTables {
    fn idx(&self, u: usize, v: usize) -> usize {
        u * self.num_vars + v
    }

    /// `M(u, v)`; for `u = v` the diagonal of the domain.
    pub fn pair(&self, u: Var, v: Var) -> PairTable {
        if u == v {
            let d = self.domains[u.offset()];
            return PairTable(d & 1 | (d & 2) << 2);
        }
        self.pairs[self.idx(u.offset(), v.offset())]
    }

    /// Allowed values of `v`.
    pub fn domain(&self, v: Var) -> Vec<bool> {
        let d = self.domains[v.offset()];
        [false, true].into_iter().filter(|&b| d >> u8::from(b) & 1 == 1).collect()
    }

    fn set(&mut self, u: usize, v: usize, t: PairTable) {
        let i = self.idx(u, v);
        let j = self.idx(v, u);
        self.pairs[i] = t;
        self.pairs[j] = t.transpose();
    }

    fn get(&self, u: usize, v: usize) -> PairTable {
        self.pairs[self.idx(u, v)]
    }

    /// Runs arc and path consistency to a fixpoint; `false` on a wipe-out.
    fn propagate(&mut self) -> bool {
        let n = self.num_vars;
        loop {
            let mut changed = false;
            for u in 0..n {
                for v in 0..n {
                    if u == v {
                        continue;
                    }
                    // arc consistency: every value of u needs a partner in v
                    let t = self.get(u, v).restrict(self.domains[u], self.domains[v]);
                    let support = u8::from(t.contains(false, false) || t.contains(false, true))
                        | u8::from(t.contains(true, false) || t.contains(true, true)) << 1;
                    let d = self.domains[u] & support;
                    if d != self.domains[u] {
                        self.domains[u] = d;
                        changed = true;
                    }
                    if d == 0 {
                        return false;
                    }
                    if t != self.get(u, v) {
                        self.set(u, v, t);
                        changed = true;
                    }
                }
            }
            for u in 0..n {
                for v in u + 1..n {
                    let mut t = self.get(u, v);
                    for w in 0..n {
                        if w != u && w != v {
                            t = t.intersect(self.get(u, w).compose(self.get(w, v), self.domains[w]));
                        }
                    }
                    if t.is_empty() {
                        return false;
                    }
                    if t != self.get(u, v) {
                        self.set(u, v, t);
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }
}

/// Outcome of consistency enforcement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Consistency {
    /// `f_hat` has the same models as the input and its tables are strongly
    /// 3-consistent.
    Consistent {
        f_hat: Formula,
        tables: ConsistencyTables,
    },
    Unsat,
}

/// Tightens every pair table until each allowed pair extends to every third
/// variable, and writes the implied unit and binary clauses back into `f_hat`.
pub fn enforce_strong_3_consistency(f: &Formula) -> Result<Consistency, TwoSatError> {
    require_two_sat(f)?;
    let n = f.num_vars();
    let mut tables = ConsistencyTables {
        num_vars: n,
        domains: vec![0b11; n],
        pairs: vec![PairTable::FULL; n * n],
    };
    for clause in f.clauses() {
        match *clause.literals() {
            [] => return Ok(Consistency::Unsat),
            [a] => tables.domains[a.var().offset()] &= 1 << u8::from(a.is_positive()),
            [a, b] => {
                let (u, v) = (a.var().offset(), b.var().offset());
                let mut t = PairTable::EMPTY;
                for (x, y) in PairTable::FULL.pairs() {
                    if a.value_for(x) || b.value_for(y) {
                        t = PairTable(t.0 | 1 << (2 * u8::from(x) + u8::from(y)));
                    }
                }
                let cur = tables.get(u, v);
                tables.set(u, v, cur.intersect(t));
            }
            _ => unreachable!("checked by require_two_sat"),
        }
    }
    if tables.domains.contains(&0) || !tables.propagate() {
        return Ok(Consistency::Unsat);
    }

    let mut f_hat = f.clone();
    for i in 0..n {
        let var = Var::from_index(i + 1);
        match tables.domains[i] {
            0b01 => {
                f_hat.push_unique(Clause::disjunction(vec![var.neg()])?)?;
            }
            0b10 => {
                f_hat.push_unique(Clause::disjunction(vec![var.pos()])?)?;
            }
            _ => {}
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            let t = tables.get(u, v);
            let (du, dv) = (tables.domains[u], tables.domains[v]);
            for (a, b) in PairTable::FULL.restrict(du, dv).pairs() {
                if !t.contains(a, b) {
                    // exclude (a, b): (u ≠ a) ∨ (v ≠ b)
                    let lu = Literal::new(Var::from_index(u + 1), !a);
                    let lv = Literal::new(Var::from_index(v + 1), !b);
                    f_hat.push_unique(Clause::disjunction(vec![lu, lv])?)?;
                }
            }
        }
    }
    Ok(Consistency::Consistent { f_hat, tables })
}

// ---------------------------------------------------------------------------
// The consistency-based procedure

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Algorithm2Result {
    pub verdict: bool,
    pub rejection: Option<Rejection>,
    pub forced: ForcedLiterals,
    pub model: Option<Assignment>,
    /// Per-variable trace of the disjoint-pair computation.
    pub steps: Vec<Algorithm2Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Algorithm2Step {
    pub var: Var,
    /// Pairs `{v, w}` (both `≠ u`) whose tables are disjoint across the branches.
    pub disjoint_pairs: Vec<(Var, Var)>,
    pub common_member: Option<Var>,
    pub forced: Option<Literal>,
}

fn tables_of(f: &Formula) -> Result<Option<(Formula, ConsistencyTables)>, TwoSatError> {
    Ok(match enforce_strong_3_consistency(f)? {
        Consistency::Consistent { f_hat, tables } => Some((f_hat, tables)),
        Consistency::Unsat => None,
    })
}

/// Variable-by-variable forcing with branch tables, in ascending order.
///
/// For each `u`: both branches `φ ∧ (¬u)` and `φ ∧ (u)` must be satisfiable;
/// the pairs whose tables are disjoint across the branches must share a
/// member `v` (lowest index when several); then the two displayed tests
/// (with first-coordinate negation) may conjoin `(¬u)` or `(u)`, after
/// which `φ` is re-checked and re-closed.
pub fn algorithm2(f: &Formula) -> Result<Algorithm2Result, TwoSatError> {
    require_two_sat(f)?;
    let n = f.num_vars();
    let mut steps = Vec::new();
    let mut forced = ForcedLiterals::default();
    let reject = |rejection, forced, steps| Algorithm2Result {
        verdict: false,
        rejection: Some(rejection),
        forced,
        model: None,
        steps,
    };
    let Some((mut phi, _)) = tables_of(f)? else {
        return Ok(reject(Rejection::Unsatisfiable, forced, steps));
    };

    for ui in 1..=n {
        let u = Var::from_index(ui);
        let (Some((_, t0)), Some((_, t1))) = (tables_of(&phi.with_unit(u.neg()))?, tables_of(&phi.with_unit(u.pos()))?)
        else {
            return Ok(reject(Rejection::BranchUnsatisfiable { var: u }, forced, steps));
        };
        let others: Vec<Var> = (1..=n).filter(|&i| i != ui).map(Var::from_index).collect();
        let mut disjoint_pairs = Vec::new();
        for (i, &v) in others.iter().enumerate() {
            for &w in &others[i + 1..] {
                if t0.pair(v, w).intersect(t1.pair(v, w)).is_empty() {
                    disjoint_pairs.push((v, w));
                }
            }
        }
        let mut step = Algorithm2Step {
            var: u,
            disjoint_pairs,
            common_member: None,
            forced: None,
        };
        if !step.disjoint_pairs.is_empty() {
            let common = others.iter().copied().find(|&v| {
                step.disjoint_pairs.iter().all(|&(a, b)| a == v || b == v)
            });
            let Some(v) = common else {
                steps.push(step);
                return Ok(reject(Rejection::NoCommonMember { var: u }, forced, steps));
            };
            step.common_member = Some(v);
            let ws = || others.iter().copied().filter(move |&w| w != v);
            if ws().any(|w| t0.pair(v, w).negate_first().intersect(t1.pair(v, w)).is_empty()) {
                phi = phi.with_unit(u.neg());
                forced.insert(u.neg());
                step.forced = Some(u.neg());
            }
            if ws().any(|w| t0.pair(v, w).intersect(t1.pair(v, w).negate_first()).is_empty()) {
                phi = phi.with_unit(u.pos());
                forced.insert(u.pos());
                step.forced = Some(u.pos());
            }
        }
        steps.push(step);
        match tables_of(&phi)? {
            Some((f_hat, _)) => phi = f_hat,
            None => return Ok(reject(Rejection::ConstraintsUnsatisfiable, forced, steps)),
        }
    }
    let model = solve_2sat(&phi)?;
    Ok(Algorithm2Result {
        verdict: model.is_some(),
        rejection: model.is_none().then_some(Rejection::ConstraintsUnsatisfiable),
        forced,
        model,
        steps,
    })
}

// ---------------------------------------------------------------------------
// δ*

/// `R`: literals with in-degree 0, `B`: literals with out-degree 0, over
/// vertices outside 2-cycle components that carry an edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipartitionRB {
    pub r: Vec<Literal>,
    pub b: Vec<Literal>,
    /// Isolated 2-cycles `{l₁, l₂}` (one of each complementary pair).
    pub cycles: Vec<(Literal, Literal)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaStarResult {
    pub verdict: bool,
    pub rejection: Option<Rejection>,
    pub y0: Option<Assignment>,
    pub partition: Option<BipartitionRB>,
}

/// Decides whether a δ*(1,1)-model exists, from the shape of `G(φ)`.
pub fn delta_star_2sat(f: &Formula) -> Result<DeltaStarResult, TwoSatError> {
    let g = build_graph(f)?;
    let reject = |rejection| DeltaStarResult {
        verdict: false,
        rejection: Some(rejection),
        y0: None,
        partition: None,
    };
    if solve_graph(&g).is_none() {
        return Ok(reject(Rejection::Unsatisfiable));
    }
    if let Some(literal) = has_opposite_path(&g) {
        return Ok(reject(Rejection::OppositePath { literal }));
    }

    let nv = g.num_vertices();
    let mut in_cycle = vec![false; nv];
    let mut cycles = Vec::new();
    for a in 0..nv {
        for &b in &g.succ[a] {
            if b / 2 != a / 2 && g.succ[b].contains(&a) {
                let isolated = g.succ[a].len() == 1
                    && g.pred[a].len() == 1
                    && g.succ[b].len() == 1
                    && g.pred[b].len() == 1;
                if !isolated {
                    return Ok(reject(Rejection::CycleNotIsolated { literal: literal(a) }));
                }
                in_cycle[a] = true;
                // one representative per complementary pair: the cycle
                // through the positive literal of its lower variable
                if a % 2 == 0 && a / 2 < b / 2 {
                    cycles.push((literal(a), literal(b)));
                }
            }
        }
    }
    cycles.sort();

    for v in 0..nv {
        if !in_cycle[v] && !g.succ[v].is_empty() && !g.pred[v].is_empty() {
            return Ok(reject(Rejection::LongPath { literal: literal(v) }));
        }
    }

    let mut y0 = Assignment::zeros(g.num_vars);
    let r: Vec<Literal> = (0..nv)
        .filter(|&v| !in_cycle[v] && g.pred[v].is_empty() && !g.succ[v].is_empty())
        .map(literal)
        .collect();
    let b: Vec<Literal> = (0..nv)
        .filter(|&v| !in_cycle[v] && g.succ[v].is_empty() && !g.pred[v].is_empty())
        .map(literal)
        .collect();
    for l in &r {
        y0.set(l.var(), !l.is_positive());
    }
    for &(l1, l2) in &cycles {
        // lower variable 0; the partner literal takes the same value
        let (lo, hi) = if l1.var() < l2.var() { (l1, l2) } else { (l2, l1) };
        y0.set(lo.var(), false);
        let lo_value = lo.value_for(false);
        y0.set(hi.var(), lo_value == hi.is_positive());
    }
    Ok(DeltaStarResult {
        verdict: true,
        rejection: None,
        y0: Some(y0),
        partition: Some(BipartitionRB { r, b, cycles }),
    })
}

/// Literal-level summary of `G(φ)` for reports.
pub fn degree_table(g: &ImplicationGraph) -> BTreeMap<String, (usize, usize)> {
    (0..g.num_vertices())
        .map(|v| (literal(v).to_string(), (g.pred[v].len(), g.succ[v].len())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::gen_pair_chain;

    fn f(n: usize, clauses: &[&[i64]]) -> Formula {
        Formula::from_dimacs_clauses(n, clauses).unwrap()
    }

    fn lit(d: i64) -> Literal {
        Literal::from_dimacs(d).unwrap()
    }

    /// The three two-step routes from v1 to v3.
    fn triple_diamond() -> Formula {
        f(5, &[&[-1, 2], &[-2, 3], &[-1, 4], &[-4, 3], &[-1, 5], &[-5, 3]])
    }

    fn long_chain() -> Formula {
        f(5, &[&[-1, 2], &[-2, 3], &[-3, 4], &[-4, 5]])
    }

    #[test]
    fn graph_edges() {
        let g = build_graph(&f(2, &[&[1, 2]])).unwrap();
        assert_eq!(g.edges(), vec![(lit(-1), lit(2)), (lit(-2), lit(1))]);
        assert_eq!(build_graph(&triple_diamond()).unwrap().num_edges(), 12);
        let empty = build_graph(&Formula::empty(3)).unwrap();
        assert_eq!((empty.num_vertices(), empty.num_edges()), (6, 0));
        assert!(build_graph(&f(3, &[&[1, 2, 3]])).is_err());
    }

    #[test]
    fn solves() {
        let x = solve_2sat(&f(2, &[&[1, 2], &[-1, -2]])).unwrap().unwrap();
        assert_ne!(x.bits()[0], x.bits()[1]);
        assert_eq!(solve_2sat(&f(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]])).unwrap(), None);
        let x = solve_2sat(&triple_diamond()).unwrap().unwrap();
        assert!(triple_diamond().evaluate(&x).unwrap());
    }

    #[test]
    fn opposite_paths() {
        assert_eq!(has_opposite_path(&build_graph(&f(2, &[&[1, 2], &[-1, -2]])).unwrap()), None);
        // (v1 ∨ v2) ∧ (v1 ∨ ¬v2) forces v1
        let g = build_graph(&f(2, &[&[1, 2], &[1, -2]])).unwrap();
        assert_eq!(has_opposite_path(&g), Some(lit(-1)));
        assert_eq!(has_opposite_path(&build_graph(&triple_diamond()).unwrap()), None);
    }

    #[test]
    fn triple_diamond_phi_b() {
        let res = algorithm1(&triple_diamond()).unwrap();
        assert!(!res.verdict);
        let added: BTreeSet<Vec<i64>> = Formula::new(5, res.added.clone()).unwrap().clause_set();
        let want = f(
            5,
            &[&[-1], &[3], &[2, 4], &[2, 5], &[4, 5], &[-2, -4], &[-2, -5], &[-4, -5]],
        )
        .clause_set();
        assert_eq!(added, want);
        assert_eq!(res.forced.literals, vec![lit(-1), lit(3)]);
    }

    #[test]
    fn long_chain_is_rejected() {
        let g = build_graph(&long_chain()).unwrap();
        assert_eq!(has_opposite_path(&g), None);
        assert!(!algorithm1(&long_chain()).unwrap().verdict);
        assert!(g.longest_simple_path(10) >= 4);
    }

    #[test]
    fn pair_chain_accepted() {
        let pc = gen_pair_chain(4).unwrap();
        let res = algorithm1(&pc).unwrap();
        assert!(res.verdict);
        assert!(pc.evaluate(&res.model.unwrap()).unwrap());
        assert!(algorithm2(&pc).unwrap().verdict);
    }

    #[test]
    fn conditions() {
        let pc = gen_pair_chain(2).unwrap();
        assert!(check_conditions_c1_c2(&pc, &Assignment::ones(2)).unwrap());
        assert!(!check_conditions_c1_c2(&triple_diamond(), &Assignment::ones(5)).unwrap());
        assert!(check_conditions_c1_c2(&pc, &Assignment::from_bits(&[1, 0])).is_err());
    }

    #[test]
    fn consistency_tables() {
        let Consistency::Consistent { tables, .. } =
            enforce_strong_3_consistency(&f(2, &[&[1, 2], &[-1, -2]])).unwrap()
        else {
            panic!("satisfiable")
        };
        let (v1, v2, v3) = (Var::from_index(1), Var::from_index(2), Var::from_index(3));
        assert_eq!(tables.pair(v1, v2).pairs(), vec![(false, true), (true, false)]);

        let Consistency::Consistent { tables, f_hat } =
            enforce_strong_3_consistency(&f(3, &[&[-1, 2], &[-2, 3]])).unwrap()
        else {
            panic!("satisfiable")
        };
        assert_eq!(
            tables.pair(v1, v3).pairs(),
            vec![(false, false), (false, true), (true, true)]
        );
        assert_eq!(tables.pair(v3, v1).pairs(), vec![(false, false), (true, false), (true, true)]);
        assert!(f_hat.clause_set().contains(&vec![-1, 3]));

        assert_eq!(
            enforce_strong_3_consistency(&f(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]])).unwrap(),
            Consistency::Unsat
        );
    }

    #[test]
    fn pair_table_ops() {
        let t = PairTable::from_pairs(&[(false, true), (true, true)]);
        assert_eq!(t.negate_first().pairs(), vec![(false, true), (true, true)]);
        let t = PairTable::from_pairs(&[(false, false), (false, true)]);
        assert_eq!(t.negate_first().pairs(), vec![(true, false), (true, true)]);
        assert_eq!(t.transpose().pairs(), vec![(false, false), (true, false)]);
    }

    #[test]
    fn triple_diamond_branch_tables_never_separate() {
        // Both branches of every variable admit a common value pair on every
        // {v, w}, so no disjoint pairs arise and nothing is forced; the
        // displayed procedure therefore reports true although no δ-model
        // exists (the acceptance suite reports this disagreement).
        let r = algorithm2(&triple_diamond()).unwrap();
        assert!(r.steps.iter().all(|s| s.disjoint_pairs.is_empty()));
        assert!(r.forced.is_empty());
        assert!(r.verdict);
    }

    #[test]
    fn algorithm2_rejects_forced_variable() {
        // (v1 ∨ v2) ∧ (v1 ∨ ¬v2): branch v1 = 0 is unsatisfiable
        let r = algorithm2(&f(2, &[&[1, 2], &[1, -2]])).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.rejection, Some(Rejection::BranchUnsatisfiable { var: Var::from_index(1) }));
    }

    #[test]
    fn delta_star() {
        let pc = gen_pair_chain(4).unwrap();
        let res = delta_star_2sat(&pc).unwrap();
        assert!(res.verdict);
        assert_eq!(res.y0, Some(Assignment::zeros(4)));
        assert_eq!(res.partition.unwrap().cycles.len(), 2);

        let eq = f(2, &[&[-1, 2], &[-2, 1]]);
        assert!(delta_star_2sat(&eq).unwrap().verdict);

        let chain3 = f(3, &[&[-1, 2], &[-2, 3]]);
        let res = delta_star_2sat(&chain3).unwrap();
        assert!(!res.verdict);
        assert!(matches!(res.rejection, Some(Rejection::LongPath { .. })));
    }

    #[test]
    fn anti_equality_cycle_gets_equal_literal_values() {
        // v1 = ¬v2: the cycle is v1 → ¬v2 → v1
        let g = f(2, &[&[1, 2], &[-1, -2]]);
        let res = delta_star_2sat(&g).unwrap();
        assert!(res.verdict);
        assert_eq!(res.y0, Some(Assignment::from_bits(&[0, 1])));
    }

    #[test]
    fn bounded_path_and_cycle_lengths() {
        let g = build_graph(&gen_pair_chain(2).unwrap()).unwrap();
        assert_eq!(g.longest_simple_path(5), 1);
        assert_eq!(g.longest_simple_cycle(5), 2);
        let g = build_graph(&f(3, &[&[-1, 2], &[-2, 3], &[-3, 1]])).unwrap();
        assert_eq!(g.longest_simple_cycle(5), 3);
        assert!(g.is_symmetric());
    }
}

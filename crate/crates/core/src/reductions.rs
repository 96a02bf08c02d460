//! Gadget constructions turning satisfiability into robust-model existence,
//! with oracle-backed verification on small instances.
//!
//! Variable numbering is fixed: source variables first (`1..n`), then primed
//! copies, then per-clause blocks in clause order (`z`, `w`, `α`), then the
//! global `A` chain, then per-variable `β` blocks. [`VarMap`] records every
//! role.

use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::formula::{Assignment, Clause, ClassFlag, Formula, FormulaError, Literal, Var, classify};
use crate::oracle::{Degree, Oracle, OracleError, RobustnessSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("source must be a disjunctive CNF formula")]
    NotCnf,
    #[error("clause {clause} has {found} literals, expected {expected}")]
    WrongWidth {
        clause: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Ordered role name → variable index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarMap {
    entries: Vec<(String, Var)>,
}

impl VarMap {
    fn push(&mut self, role: String, index: usize) -> Var {
        let v = Var::from_index(index);
        self.entries.push((role, v));
        v
    }

    pub fn get(&self, role: &str) -> Option<Var> {
        self.entries.iter().find(|(r, _)| r == role).map(|&(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Var)> {
        self.entries.iter().map(|(r, v)| (r.as_str(), *v))
    }

    /// Role of a variable, if mapped.
    pub fn role(&self, v: Var) -> Option<&str> {
        self.entries.iter().find(|&&(_, w)| w == v).map(|(r, _)| r.as_str())
    }

    fn originals(n: usize) -> Self {
        let mut map = VarMap::default();
        for k in 1..=n {
            map.push(format!("x{k}"), k);
        }
        map
    }
}

impl Serialize for VarMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.entries.len()))?;
        for (role, v) in &self.entries {
            m.serialize_entry(role, v)?;
        }
        m.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ReductionKind {
    /// Append a fresh positive variable to every clause.
    Escape,
    /// Append `¬y` to every clause.
    ZeroValid,
    /// Append `y` to every clause.
    OneValid,
    /// `(s+1)`-SAT to 2-SAT.
    KsatTo2sat { s: usize },
    /// 3-SAT to Horn.
    Horn { s: usize, options: HornOptions },
    /// 3-SAT to dual-Horn.
    DualHorn { s: usize, options: HornOptions },
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionKind::Escape => write!(f, "escape"),
            ReductionKind::ZeroValid => write!(f, "0valid"),
            ReductionKind::OneValid => write!(f, "1valid"),
            ReductionKind::KsatTo2sat { s } => write!(f, "ksat2sat(s={s})"),
            ReductionKind::Horn { s, .. } => write!(f, "horn(s={s})"),
            ReductionKind::DualHorn { s, .. } => write!(f, "dualhorn(s={s})"),
        }
    }
}

impl ReductionKind {
    /// The robustness properties whose existence the construction ties to
    /// source satisfiability.
    pub fn claims(&self) -> Vec<RobustnessSpec> {
        match *self {
            ReductionKind::Escape => vec![
                RobustnessSpec::delta11(),
                RobustnessSpec::delta11().with_degree(Degree::Finite(2)),
                RobustnessSpec::delta11().with_degree(Degree::Star),
            ],
            ReductionKind::ZeroValid | ReductionKind::OneValid => {
                vec![RobustnessSpec::delta11(), RobustnessSpec::delta(2, 1)]
            }
            ReductionKind::KsatTo2sat { s }
            | ReductionKind::Horn { s, .. }
            | ReductionKind::DualHorn { s, .. } => vec![RobustnessSpec::delta(1, s)],
        }
    }
}

/// Switches for the Horn constructions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct HornOptions {
    /// Fix pure literals and drop the clauses they satisfy before building.
    pub normalize_pure_literals: bool,
    /// Also emit `(¬xₖ ∨ ¬x′ₖ)` (mirrored: `(xₖ ∨ x′ₖ)`). Off by default:
    /// breaking the lower `β` chain forces `xₖ ∧ x′ₖ`, so with this clause
    /// that break is unrepairable and the target has no robust model at all.
    pub exclusion_clauses: bool,
}

/// A constructed instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub kind: ReductionKind,
    pub source: Formula,
    pub target: Formula,
    pub var_map: VarMap,
    /// Pure literals fixed by normalization (Horn kinds only).
    pub fixed: Vec<Literal>,
}

fn require_cnf(f: &Formula) -> Result<(), ReductionError> {
    if f.has_parity_clauses() {
        return Err(ReductionError::NotCnf);
    }
    Ok(())
}

fn require_width(f: &Formula, width: usize) -> Result<(), ReductionError> {
    require_cnf(f)?;
    for (i, c) in f.clauses().iter().enumerate() {
        if c.len() != width {
            return Err(ReductionError::WrongWidth {
                clause: i + 1,
                expected: width,
                found: c.len(),
            });
        }
    }
    Ok(())
}

fn imp(a: Literal, b: Literal) -> Result<Clause, FormulaError> {
    Clause::disjunction(vec![!a, b])
}

fn append_literal(f: &Formula, kind: ReductionKind, role: &str, positive: bool) -> Result<Reduction, ReductionError> {
    require_cnf(f)?;
    let n = f.num_vars();
    let mut var_map = VarMap::originals(n);
    let extra = var_map.push(role.to_string(), n + 1);
    let lit = Literal::new(extra, positive);
    let clauses = f
        .clauses()
        .iter()
        .map(|c| {
            let mut lits = c.literals().to_vec();
            lits.push(lit);
            Clause::disjunction(lits)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Reduction {
        kind,
        source: f.clone(),
        target: Formula::new(n + 1, clauses)?,
        var_map,
        fixed: Vec::new(),
    })
}

/// `φ ∨ v_{n+1}`, clause by clause.
pub fn add_escape_variable(f: &Formula) -> Result<Reduction, ReductionError> {
    append_literal(f, ReductionKind::Escape, "escape", true)
}

/// `φ ∨ ¬y`: satisfied by the all-zero assignment.
pub fn to_0valid(f: &Formula) -> Result<Reduction, ReductionError> {
    let red = append_literal(f, ReductionKind::ZeroValid, "y", false)?;
    assert!(classify(&red.target).contains(ClassFlag::ZeroValid));
    Ok(red)
}

/// `φ ∨ y`: satisfied by the all-one assignment.
pub fn to_1valid(f: &Formula) -> Result<Reduction, ReductionError> {
    let red = append_literal(f, ReductionKind::OneValid, "y", true)?;
    assert!(classify(&red.target).contains(ClassFlag::OneValid));
    Ok(red)
}

/// Per clause `ℓ₁ ∨ … ∨ ℓ_{s+1}`: `z ⇒ ℓⱼ`, `ℓⱼ ⇒ αⱼ,₁`, `αⱼ,ₖ ⇒ αⱼ,ₖ₊₁`,
/// with `1 + s(s+1)` fresh variables.
pub fn ksat_to_2sat_gadget(f: &Formula, s: usize) -> Result<Reduction, ReductionError> {
    if s < 2 {
        return Err(ReductionError::InvalidParameter(format!("s must be at least 2, got {s}")));
    }
    require_width(f, s + 1)?;
    let n = f.num_vars();
    let mut var_map = VarMap::originals(n);
    let mut clauses = Vec::new();
    let mut next = n + 1;
    for (ci, clause) in f.clauses().iter().enumerate() {
        let i = ci + 1;
        let z = var_map.push(format!("z{i}"), next);
        next += 1;
        let mut alphas = Vec::new();
        for j in 1..=s + 1 {
            let chain: Vec<Var> = (1..=s)
                .map(|k| {
                    let v = var_map.push(format!("alpha{i}_{j}_{k}"), next);
                    next += 1;
                    v
                })
                .collect();
            alphas.push(chain);
        }
        for &l in clause.literals() {
            clauses.push(imp(z.pos(), l)?);
        }
        for (&l, chain) in clause.literals().iter().zip(&alphas) {
            clauses.push(imp(l, chain[0].pos())?);
        }
        for chain in &alphas {
            for k in 0..s - 1 {
                clauses.push(imp(chain[k].pos(), chain[k + 1].pos())?);
            }
        }
    }
    let target = Formula::new(next - 1, clauses)?;
    assert!(classify(&target).contains(ClassFlag::TwoSat));
    Ok(Reduction {
        kind: ReductionKind::KsatTo2sat { s },
        source: f.clone(),
        target,
        var_map,
        fixed: Vec::new(),
    })
}

/// Fixes pure literals until none remain; returns the reduced clause list
/// and the fixed literals.
fn strip_pure_literals(f: &Formula) -> (Vec<Clause>, Vec<Literal>) {
    let mut clauses = f.clauses().to_vec();
    let mut fixed = Vec::new();
    loop {
        let mut pos = vec![false; f.num_vars()];
        let mut neg = vec![false; f.num_vars()];
        for c in &clauses {
            for l in c.literals() {
                if l.is_positive() {
                    pos[l.var().offset()] = true;
                } else {
                    neg[l.var().offset()] = true;
                }
            }
        }
        let pure = f.vars().find_map(|v| match (pos[v.offset()], neg[v.offset()]) {
            (true, false) => Some(v.pos()),
            (false, true) => Some(v.neg()),
            _ => None,
        });
        let Some(lit) = pure else {
            return (clauses, fixed);
        };
        fixed.push(lit);
        clauses.retain(|c| !c.literals().contains(&lit));
    }
}

fn horn_like(f: &Formula, s: usize, options: HornOptions, dual: bool) -> Result<Reduction, ReductionError> {
    if s < 1 {
        return Err(ReductionError::InvalidParameter("s must be at least 1".into()));
    }
    require_width(f, 3)?;
    let n = f.num_vars();
    let (clauses_in, fixed) = if options.normalize_pure_literals {
        strip_pure_literals(f)
    } else {
        (f.clauses().to_vec(), Vec::new())
    };
    let m = clauses_in.len();
    let mut var_map = VarMap::originals(n);
    for k in 1..=n {
        var_map.push(format!("x{k}'"), n + k);
    }
    let x = |k: usize| Var::from_index(k);
    let xp = |k: usize| Var::from_index(n + k);
    // implication, reversed for the mirrored construction
    let chain = |a: Var, b: Var| if dual { imp(b.pos(), a.pos()) } else { imp(a.pos(), b.pos()) };

    let mut next = 2 * n + 1;
    let mut blocks = Vec::with_capacity(m);
    for i in 1..=m {
        let z = var_map.push(format!("z{i}"), next);
        let w: Vec<Var> = (1..=3).map(|j| var_map.push(format!("w{i}_{j}"), next + j)).collect();
        next += 4;
        let mut alphas = Vec::new();
        for j in 1..=3 {
            let a: Vec<Var> = (1..s)
                .map(|k| {
                    let v = var_map.push(format!("alpha{i}_{j}_{k}"), next);
                    next += 1;
                    v
                })
                .collect();
            alphas.push(a);
        }
        blocks.push((z, w, alphas));
    }
    let a_vars: Vec<Var> = (1..=s + 1)
        .map(|k| var_map.push(format!("A{k}"), next + k - 1))
        .collect();
    next += s + 1;
    let mut betas = Vec::with_capacity(n);
    for k in 1..=n {
        let b: Vec<Var> = (1..=2 * s)
            .map(|j| var_map.push(format!("beta{k}_{j}"), next + j - 1))
            .collect();
        next += 2 * s;
        betas.push(b);
    }

    let mut target = Formula::empty(next - 1);
    for (clause, (z, w, alphas)) in clauses_in.iter().zip(&blocks) {
        // the clause with every literal mapped to a variable: x′ for the
        // positive literals in the Horn case, for the negative ones in the dual
        let v: Vec<Var> = clause
            .literals()
            .iter()
            .map(|l| {
                let k = l.var().index();
                if l.is_positive() != dual { xp(k) } else { x(k) }
            })
            .collect();
        let gamma1 = std::iter::once(*z).chain(w.iter().copied()).map(|u| Literal::new(u, dual));
        target.push(Clause::disjunction(gamma1.collect())?)?;
        for j in 0..3 {
            let path: Vec<Var> = std::iter::once(v[j])
                .chain(alphas[j].iter().copied())
                .chain(std::iter::once(w[j]))
                .collect();
            for pair in path.windows(2) {
                target.push(chain(pair[0], pair[1])?)?;
            }
        }
        let path: Vec<Var> = std::iter::once(*z).chain(a_vars.iter().copied()).collect();
        for pair in path.windows(2) {
            target.push_unique(chain(pair[0], pair[1])?)?;
        }
    }
    for k in 1..=n {
        let b = &betas[k - 1];
        for j in 0..s - 1 {
            target.push(imp(b[j].pos(), b[j + 1].pos())?)?;
        }
        target.push(imp(b[s - 1].pos(), x(k).pos())?)?;
        target.push(imp(b[s - 1].pos(), xp(k).pos())?)?;
        target.push(imp(x(k).pos(), b[s].pos())?)?;
        target.push(imp(xp(k).pos(), b[s].pos())?)?;
        for j in s..2 * s - 1 {
            target.push(imp(b[j].pos(), b[j + 1].pos())?)?;
        }
        if options.exclusion_clauses {
            target.push(Clause::disjunction(vec![Literal::new(x(k), dual), Literal::new(xp(k), dual)])?)?;
        }
    }
    let flag = if dual { ClassFlag::DualHorn } else { ClassFlag::Horn };
    assert!(classify(&target).contains(flag));
    let kind = if dual {
        ReductionKind::DualHorn { s, options }
    } else {
        ReductionKind::Horn { s, options }
    };
    Ok(Reduction {
        kind,
        source: f.clone(),
        target,
        var_map,
        fixed,
    })
}

/// 3-SAT to Horn: clause gadgets `Γ₁` (all-negative), `Γ₂` (length-`s`
/// chains `v → … → w`), `Γ₃` (`z → A₁ → … → A_{s+1}`), and one two-sided
/// chain gadget per source variable that forces `xₖ ≠ x′ₖ` in robust models.
pub fn threesat_to_horn(f: &Formula, s: usize, options: HornOptions) -> Result<Reduction, ReductionError> {
    horn_like(f, s, options, false)
}

/// The mirror of [`threesat_to_horn`]: `Γ₁` all-positive and the `Γ₂`, `Γ₃`
/// chains reversed.
pub fn threesat_to_dualhorn(f: &Formula, s: usize, options: HornOptions) -> Result<Reduction, ReductionError> {
    horn_like(f, s, options, true)
}

/// The two-sided chain gadget on its own over `x, y, β₁..β_{2s}` (variables
/// `1, 2, 3..2s+2`).
pub fn chain_gadget(s: usize) -> Result<Formula, ReductionError> {
    if s < 1 {
        return Err(ReductionError::InvalidParameter("s must be at least 1".into()));
    }
    let (x, y) = (Var::from_index(1), Var::from_index(2));
    let b: Vec<Var> = (3..=2 * s + 2).map(Var::from_index).collect();
    let mut clauses = Vec::new();
    for j in 0..s - 1 {
        clauses.push(imp(b[j].pos(), b[j + 1].pos())?);
    }
    clauses.push(imp(b[s - 1].pos(), x.pos())?);
    clauses.push(imp(b[s - 1].pos(), y.pos())?);
    clauses.push(imp(x.pos(), b[s].pos())?);
    clauses.push(imp(y.pos(), b[s].pos())?);
    for j in s..2 * s - 1 {
        clauses.push(imp(b[j].pos(), b[j + 1].pos())?);
    }
    Ok(Formula::new(2 * s + 2, clauses)?)
}

/// Extension of a source model that the constructions' proofs exhibit as a
/// robust model of the target.
pub fn canonical_witness(red: &Reduction, source_model: &Assignment) -> Result<Assignment, ReductionError> {
    let n = red.source.num_vars();
    if source_model.len() != n {
        return Err(FormulaError::LengthMismatch {
            expected: n,
            actual: source_model.len(),
        }
        .into());
    }
    let mut bits = source_model.bits().to_vec();
    bits.resize(red.target.num_vars(), false);
    let mut x = Assignment::new(bits);
    let mut set = |role: &str, value: bool| {
        if let Some(v) = red.var_map.get(role) {
            x.set(v, value);
        }
    };
    match red.kind {
        ReductionKind::Escape | ReductionKind::OneValid => set(
            if red.kind == ReductionKind::Escape { "escape" } else { "y" },
            false,
        ),
        ReductionKind::ZeroValid => set("y", true),
        ReductionKind::KsatTo2sat { .. } => {
            for (role, _) in red.var_map.iter() {
                if role.starts_with("alpha") {
                    set(role, true);
                }
            }
        }
        ReductionKind::Horn { s, .. } | ReductionKind::DualHorn { s, .. } => {
            let dual = matches!(red.kind, ReductionKind::DualHorn { .. });
            for k in 1..=n {
                set(&format!("x{k}'"), !source_model.bits()[k - 1]);
                for j in 1..=2 * s {
                    set(&format!("beta{k}_{j}"), j > s);
                }
            }
            let roles: Vec<String> = red.var_map.iter().map(|(r, _)| r.to_string()).collect();
            for role in roles {
                if role.starts_with('A') || role.starts_with('w') || role.starts_with("alpha") {
                    set(&role, !dual);
                } else if role.starts_with('z') {
                    set(&role, dual);
                }
            }
        }
    }
    Ok(x)
}

/// The stable set exhibited for the escape construction: the source model
/// `X` with escape bit 0, and each `X` with bit `i` flipped and escape 1.
pub fn escape_stable_set(source_model: &Assignment) -> Vec<Assignment> {
    let n = source_model.len();
    let with = |x: &Assignment, e: bool| {
        let mut bits = x.bits().to_vec();
        bits.push(e);
        Assignment::new(bits)
    };
    let mut set = vec![with(source_model, false)];
    for i in 1..=n {
        let flipped = source_model.flip([Var::from_index(i)]).expect("in range");
        set.push(with(&flipped, true));
    }
    set.sort();
    set
}

pub fn reduce(f: &Formula, kind: ReductionKind) -> Result<Reduction, ReductionError> {
    match kind {
        ReductionKind::Escape => add_escape_variable(f),
        ReductionKind::ZeroValid => to_0valid(f),
        ReductionKind::OneValid => to_1valid(f),
        ReductionKind::KsatTo2sat { s } => ksat_to_2sat_gadget(f, s),
        ReductionKind::Horn { s, options } => threesat_to_horn(f, s, options),
        ReductionKind::DualHorn { s, options } => threesat_to_dualhorn(f, s, options),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimCheck {
    pub spec: RobustnessSpec,
    pub target_has_model: bool,
    /// `source satisfiable ⟺ target_has_model`.
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    pub assignment: Assignment,
    pub passes: bool,
}

/// Oracle verdicts on both sides of a construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub kind: ReductionKind,
    pub source: Formula,
    pub target: Formula,
    pub var_map: VarMap,
    pub source_satisfiable: bool,
    pub claims: Vec<ClaimCheck>,
    /// Every claim holds on this instance.
    pub equivalence: bool,
    /// The constructed extension of the lex-first source model, checked
    /// against the first claim (satisfiable sources only).
    pub canonical_witness: Option<WitnessCheck>,
    /// Readings of the construction that affect the emitted clauses.
    pub notes: Vec<String>,
}

fn construction_notes(kind: ReductionKind) -> Vec<String> {
    match kind {
        ReductionKind::Horn { options, .. } | ReductionKind::DualHorn { options, .. } => {
            let mut notes = vec![if options.exclusion_clauses {
                "x/x' exclusion clauses emitted alongside the chain gadgets; they block the repair of lower-beta breaks".to_string()
            } else {
                "only clause gadgets and chain gadgets emitted; x != x' is left to the chain gadgets".to_string()
            }];
            if options.normalize_pure_literals {
                notes.push("pure literals fixed and their clauses dropped before construction".into());
            }
            notes
        }
        ReductionKind::OneValid => vec!["1-valid wrapper: y appended to every clause".into()],
        _ => Vec::new(),
    }
}

pub fn verify_reduction(
    source: &Formula,
    kind: ReductionKind,
    oracle: &Oracle,
) -> Result<ReductionReport, ReductionError> {
    let red = reduce(source, kind)?;
    let target_n = red.target.num_vars();
    if target_n > oracle.cap() {
        return Err(OracleError::CapExceeded {
            n: target_n,
            cap: oracle.cap(),
        }
        .into());
    }
    let source_model = oracle.find_delta_model(source, RobustnessSpec::delta11().with_degree(Degree::Finite(0)))?;
    let sat = source_model.is_some();
    let mut claims = Vec::new();
    for spec in kind.claims() {
        let found = oracle.find_delta_model(&red.target, spec)?.is_some();
        claims.push(ClaimCheck {
            spec,
            target_has_model: found,
            holds: found == sat,
        });
    }
    let canonical_witness = match &source_model {
        Some(x) => {
            let w = canonical_witness(&red, x)?;
            let spec = kind.claims()[0];
            let passes = match oracle.is_delta_model(&red.target, &w, spec) {
                Ok(check) => check.holds,
                Err(OracleError::NotAModel(_)) => false,
                Err(e) => return Err(e.into()),
            };
            Some(WitnessCheck { assignment: w, passes })
        }
        None => None,
    };
    Ok(ReductionReport {
        kind,
        equivalence: claims.iter().all(|c| c.holds),
        source: red.source,
        target: red.target,
        var_map: red.var_map,
        source_satisfiable: sat,
        claims,
        canonical_witness,
        notes: construction_notes(kind),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(n: usize, clauses: &[&[i64]]) -> Formula {
        Formula::from_dimacs_clauses(n, clauses).unwrap()
    }

    #[test]
    fn escape_appends() {
        let red = add_escape_variable(&f(2, &[&[1, 2], &[-1, -2]])).unwrap();
        assert_eq!(red.target, f(3, &[&[1, 2, 3], &[-1, -2, 3]]));
        assert_eq!(red.var_map.get("escape"), Some(Var::from_index(3)));
    }

    #[test]
    fn valid_wrappers() {
        let red = to_0valid(&f(2, &[&[1, 2]])).unwrap();
        assert_eq!(red.target, f(3, &[&[1, 2, -3]]));
        let red = to_1valid(&f(2, &[&[-1, -2]])).unwrap();
        assert!(classify(&red.target).contains(ClassFlag::OneValid));
    }

    #[test]
    fn ksat_budget() {
        let red = ksat_to_2sat_gadget(&f(3, &[&[1, 2, 3]]), 2).unwrap();
        assert_eq!(red.target.num_vars(), 3 + 7);
        assert_eq!(red.target.clauses().len(), 9);
        assert!(ksat_to_2sat_gadget(&f(3, &[&[1, 2]]), 2).is_err());
        assert!(ksat_to_2sat_gadget(&f(2, &[&[1, 2]]), 1).is_err());
    }

    #[test]
    fn horn_budget_and_class() {
        let src = f(3, &[&[1, 2, 3]]);
        let red = threesat_to_horn(&src, 1, HornOptions::default()).unwrap();
        assert_eq!(red.target.num_vars(), 18);
        assert_eq!(red.var_map.len(), 18);
        assert!(classify(&red.target).contains(ClassFlag::Horn));
        let red2 = threesat_to_horn(&src, 2, HornOptions::default()).unwrap();
        assert_eq!(red2.target.num_vars(), 6 + 7 + 3 + 12);
        let dual = threesat_to_dualhorn(&src, 1, HornOptions::default()).unwrap();
        assert!(classify(&dual.target).contains(ClassFlag::DualHorn));
        assert!(threesat_to_horn(&f(3, &[&[1, 2]]), 1, HornOptions::default()).is_err());
    }

    #[test]
    fn horn_pure_literal_normalization() {
        let src = f(3, &[&[1, 2, 3]]);
        let opts = HornOptions {
            normalize_pure_literals: true,
            exclusion_clauses: false,
        };
        let red = threesat_to_horn(&src, 1, opts).unwrap();
        assert_eq!(red.fixed, vec![Var::from_index(1).pos()]);
        // no clause gadgets remain: 2n + (s+1) + 2sn
        assert_eq!(red.target.num_vars(), 6 + 2 + 6);
    }

    #[test]
    fn horn_exclusion_clause_flag() {
        let src = f(3, &[&[1, 2, 3]]);
        let base = threesat_to_horn(&src, 1, HornOptions::default()).unwrap();
        let opts = HornOptions {
            exclusion_clauses: true,
            ..HornOptions::default()
        };
        let extra = threesat_to_horn(&src, 1, opts).unwrap();
        assert_eq!(extra.target.clauses().len(), base.target.clauses().len() + 3);
        assert!(extra.target.clause_set().contains(&vec![-4, -1]));
    }

    #[test]
    fn canonical_witnesses_are_models() {
        let src = f(3, &[&[1, -2, 3]]);
        let x = Assignment::from_bits(&[1, 0, 0]);
        for red in [
            threesat_to_horn(&src, 1, HornOptions::default()).unwrap(),
            threesat_to_dualhorn(&src, 1, HornOptions::default()).unwrap(),
            ksat_to_2sat_gadget(&src, 2).unwrap(),
            add_escape_variable(&src).unwrap(),
            to_0valid(&src).unwrap(),
            to_1valid(&src).unwrap(),
        ] {
            let w = canonical_witness(&red, &x).unwrap();
            assert!(red.target.evaluate(&w).unwrap(), "{}", red.kind);
        }
    }

    #[test]
    fn escape_stable_set_shape() {
        let set = escape_stable_set(&Assignment::from_bits(&[1, 0]));
        assert_eq!(set.len(), 3);
        assert!(set.contains(&Assignment::from_bits(&[1, 0, 0])));
        assert!(set.contains(&Assignment::from_bits(&[0, 0, 1])));
        assert!(set.contains(&Assignment::from_bits(&[1, 1, 1])));
    }

    #[test]
    fn verify_small_escape() {
        let o = Oracle::default();
        let rep = verify_reduction(&f(2, &[&[1, 2], &[-1, -2]]), ReductionKind::Escape, &o).unwrap();
        assert!(rep.source_satisfiable && rep.equivalence);
        let unsat = f(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]);
        let rep = verify_reduction(&unsat, ReductionKind::Escape, &o).unwrap();
        assert!(!rep.source_satisfiable && rep.equivalence);
        assert!(rep.claims.iter().all(|c| !c.target_has_model));
    }

    #[test]
    fn verify_respects_cap() {
        let o = Oracle::with_cap(10).unwrap();
        let err = verify_reduction(
            &f(3, &[&[1, 2, 3]]),
            ReductionKind::Horn { s: 1, options: HornOptions::default() },
            &o,
        )
        .unwrap_err();
        assert!(matches!(err, ReductionError::Oracle(OracleError::CapExceeded { n: 18, cap: 10 })));
    }
}

//! Boolean formulas over variables `v1..vn`: clauses, assignments, DIMACS
//! input/output, class recognition and the small formula families used
//! throughout the crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Not;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while building, parsing or evaluating formulas.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("variable {index} exceeds the declared variable count {num_vars}")]
    VariableOutOfRange { index: usize, num_vars: usize },
    #[error("variable index must be at least 1")]
    ZeroVariable,
    #[error("variable v{0} appears more than once in a clause")]
    DuplicateVariable(usize),
    #[error("parity clauses need at least one variable")]
    EmptyParityClause,
    #[error("assignment has {actual} bits but the formula has {expected} variables")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid assignment text: {0}")]
    BadAssignment(String),
    #[error("invalid family parameters: {0}")]
    BadParameters(String),
}

/// A variable `v_i`, `i >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(u32);

impl Var {
    pub fn new(index: usize) -> Result<Self, FormulaError> {
        if index == 0 {
            return Err(FormulaError::ZeroVariable);
        }
        u32::try_from(index)
            .map(Var)
            .map_err(|_| FormulaError::VariableOutOfRange {
                index,
                num_vars: u32::MAX as usize,
            })
    }

    /// Panics on index 0; for indices known to be valid.
    pub fn from_index(index: usize) -> Self {
        Self::new(index).expect("variable index must be >= 1")
    }

    /// One-based index.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Zero-based position in an assignment.
    pub fn offset(self) -> usize {
        self.0 as usize - 1
    }

    pub fn pos(self) -> Literal {
        Literal::new(self, true)
    }

    pub fn neg(self) -> Literal {
        Literal::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A variable or its negation. Ordered by variable, positive before negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: Var,
    negated: bool,
}

impl Literal {
    pub fn new(var: Var, positive: bool) -> Self {
        Literal {
            var,
            negated: !positive,
        }
    }

    /// Literal from a signed DIMACS integer.
    pub fn from_dimacs(value: i64) -> Result<Self, FormulaError> {
        let var = Var::new(value.unsigned_abs() as usize)?;
        Ok(Literal::new(var, value > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let i = self.var.index() as i64;
        if self.negated {
            -i
        } else {
            i
        }
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_positive(self) -> bool {
        !self.negated
    }

    /// Truth value of this literal under a variable value.
    pub fn value_for(self, var_value: bool) -> bool {
        var_value != self.negated
    }

    pub fn value(self, x: &Assignment) -> bool {
        self.value_for(x.get(self.var))
    }
}

impl Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬{}", self.var)
        } else {
            write!(f, "{}", self.var)
        }
    }
}

impl Serialize for Literal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.to_dimacs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ClauseKind {
    /// Satisfied iff at least one literal is true.
    Disjunction,
    /// Satisfied iff the XOR of the variables equals `target`.
    Parity { target: bool },
}

/// A disjunctive or parity clause. No variable occurs twice.
///
/// Parity clauses are kept normalized: every literal is positive and any
/// negations are folded into the target bit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Clause {
    kind: ClauseKind,
    literals: Vec<Literal>,
}

fn check_distinct(literals: &[Literal]) -> Result<(), FormulaError> {
    let mut seen = BTreeSet::new();
    for lit in literals {
        if !seen.insert(lit.var()) {
            return Err(FormulaError::DuplicateVariable(lit.var().index()));
        }
    }
    Ok(())
}

impl Clause {
    pub fn disjunction(literals: Vec<Literal>) -> Result<Self, FormulaError> {
        check_distinct(&literals)?;
        Ok(Clause {
            kind: ClauseKind::Disjunction,
            literals,
        })
    }

    /// Parity clause `l1 ⊕ l2 ⊕ … = target`; each negated literal flips the target.
    pub fn parity(literals: Vec<Literal>, target: bool) -> Result<Self, FormulaError> {
        if literals.is_empty() {
            return Err(FormulaError::EmptyParityClause);
        }
        check_distinct(&literals)?;
        let flips = literals.iter().filter(|l| !l.is_positive()).count();
        let target = target ^ (flips % 2 == 1);
        Ok(Clause {
            kind: ClauseKind::Parity { target },
            literals: literals.into_iter().map(|l| l.var().pos()).collect(),
        })
    }

    /// Parity clause over plain variables.
    pub fn xor(vars: &[usize], target: bool) -> Result<Self, FormulaError> {
        let lits = vars
            .iter()
            .map(|&i| Var::new(i).map(Var::pos))
            .collect::<Result<Vec<_>, _>>()?;
        Clause::parity(lits, target)
    }

    /// Disjunction from signed DIMACS integers.
    pub fn from_dimacs(values: &[i64]) -> Result<Self, FormulaError> {
        let lits = values
            .iter()
            .map(|&v| Literal::from_dimacs(v))
            .collect::<Result<Vec<_>, _>>()?;
        Clause::disjunction(lits)
    }

    pub fn kind(&self) -> ClauseKind {
        self.kind
    }

    pub fn is_parity(&self) -> bool {
        matches!(self.kind, ClauseKind::Parity { .. })
    }

    pub fn parity_target(&self) -> Option<bool> {
        match self.kind {
            ClauseKind::Parity { target } => Some(target),
            ClauseKind::Disjunction => None,
        }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.literals.iter().map(|l| l.var())
    }

    pub fn positive_count(&self) -> usize {
        self.literals.iter().filter(|l| l.is_positive()).count()
    }

    pub fn negative_count(&self) -> usize {
        self.literals.len() - self.positive_count()
    }

    pub fn is_satisfied(&self, x: &Assignment) -> bool {
        match self.kind {
            ClauseKind::Disjunction => self.literals.iter().any(|l| l.value(x)),
            ClauseKind::Parity { target } => {
                self.literals.iter().filter(|l| l.value(x)).count() % 2 == usize::from(target)
            }
        }
    }

    /// Same clause with its literals sorted; used to compare clause sets.
    pub fn normalized(&self) -> Clause {
        let mut literals = self.literals.clone();
        literals.sort();
        Clause {
            kind: self.kind,
            literals,
        }
    }

    /// Disjunction with every literal negated. Parity clauses are returned
    /// with the target adjusted, which is the same constraint on the
    /// complemented assignment.
    pub fn negated_literals(&self) -> Clause {
        match self.kind {
            ClauseKind::Disjunction => Clause {
                kind: self.kind,
                literals: self.literals.iter().map(|&l| !l).collect(),
            },
            ClauseKind::Parity { target } => Clause {
                kind: ClauseKind::Parity {
                    target: target ^ (self.literals.len() % 2 == 1),
                },
                literals: self.literals.clone(),
            },
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.is_parity() { " ⊕ " } else { " ∨ " };
        write!(f, "(")?;
        for (i, lit) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, "{sep}")?;
            }
            write!(f, "{lit}")?;
        }
        if let Some(t) = self.parity_target() {
            write!(f, " = {}", u8::from(t))?;
        }
        write!(f, ")")
    }
}

/// Conjunction of clauses over `v1..vn`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Formula {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self, FormulaError> {
        for clause in &clauses {
            for var in clause.vars() {
                if var.index() > num_vars {
                    return Err(FormulaError::VariableOutOfRange {
                        index: var.index(),
                        num_vars,
                    });
                }
            }
        }
        Ok(Formula { num_vars, clauses })
    }

    pub fn empty(num_vars: usize) -> Self {
        Formula {
            num_vars,
            clauses: Vec::new(),
        }
    }

    /// Disjunctive CNF from signed DIMACS clause lists.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Result<Self, FormulaError> {
        let clauses = clauses
            .iter()
            .map(|c| Clause::from_dimacs(c))
            .collect::<Result<Vec<_>, _>>()?;
        Formula::new(num_vars, clauses)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (1..=self.num_vars).map(Var::from_index)
    }

    pub fn push(&mut self, clause: Clause) -> Result<(), FormulaError> {
        if let Some(var) = clause.vars().find(|v| v.index() > self.num_vars) {
            return Err(FormulaError::VariableOutOfRange {
                index: var.index(),
                num_vars: self.num_vars,
            });
        }
        self.clauses.push(clause);
        Ok(())
    }

    /// Conjoins `clause` unless an equal clause (up to literal order) is present.
    /// Returns whether it was added.
    pub fn push_unique(&mut self, clause: Clause) -> Result<bool, FormulaError> {
        let norm = clause.normalized();
        if self.clauses.iter().any(|c| c.normalized() == norm) {
            return Ok(false);
        }
        self.push(clause)?;
        Ok(true)
    }

    /// `self ∧ (lit)`.
    pub fn with_unit(&self, lit: Literal) -> Formula {
        let mut f = self.clone();
        f.clauses.push(Clause {
            kind: ClauseKind::Disjunction,
            literals: vec![lit],
        });
        f
    }

    pub fn has_parity_clauses(&self) -> bool {
        self.clauses.iter().any(Clause::is_parity)
    }

    pub fn is_cnf(&self) -> bool {
        !self.has_parity_clauses()
    }

    pub fn evaluate(&self, x: &Assignment) -> Result<bool, FormulaError> {
        check_len(self.num_vars, x)?;
        Ok(self.holds(x))
    }

    pub(crate) fn holds(&self, x: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.is_satisfied(x))
    }

    /// Clause set as sorted normalized clauses, for order-insensitive comparison.
    pub fn clause_set(&self) -> BTreeSet<Vec<i64>> {
        self.clauses
            .iter()
            .map(|c| {
                let mut v: Vec<i64> = c.literals().iter().map(|l| l.to_dimacs()).collect();
                v.sort_unstable();
                if let Some(t) = c.parity_target() {
                    v.insert(0, if t { i64::MAX } else { i64::MIN });
                }
                v
            })
            .collect()
    }

    /// Variables occurring in at least one clause.
    pub fn occurring_vars(&self) -> BTreeSet<Var> {
        self.clauses.iter().flat_map(|c| c.vars()).collect()
    }

    pub fn max_clause_len(&self) -> usize {
        self.clauses.iter().map(Clause::len).max().unwrap_or(0)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "⊤");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " ∧ ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn check_len(n: usize, x: &Assignment) -> Result<(), FormulaError> {
    if x.len() != n {
        return Err(FormulaError::LengthMismatch {
            expected: n,
            actual: x.len(),
        });
    }
    Ok(())
}

/// An n-bit vector; bit `i` (one-based) is the value of `v_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        Assignment(vec![true; n])
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        Assignment(bits.iter().map(|&b| b != 0).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, var: Var) -> bool {
        self.0[var.offset()]
    }

    pub fn set(&mut self, var: Var, value: bool) {
        self.0[var.offset()] = value;
    }

    pub fn popcount(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Copy of this assignment with the bits of `vars` flipped.
    pub fn flip<I: IntoIterator<Item = Var>>(&self, vars: I) -> Result<Assignment, FormulaError> {
        let set: BTreeSet<Var> = vars.into_iter().collect();
        let mut out = self.clone();
        for var in set {
            if var.index() > self.len() {
                return Err(FormulaError::VariableOutOfRange {
                    index: var.index(),
                    num_vars: self.len(),
                });
            }
            out.0[var.offset()] ^= true;
        }
        Ok(out)
    }

    /// Bits packed into an integer with `v1` as the most significant bit, so
    /// numeric order is lexicographic order of the bit vector. `len <= 64`.
    pub fn pack(&self) -> u64 {
        debug_assert!(self.len() <= 64);
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub fn unpack(packed: u64, n: usize) -> Assignment {
        Assignment((0..n).map(|i| (packed >> (n - 1 - i)) & 1 == 1).collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = FormulaError;

    /// Parses the assignment file format: one line of `0`/`1` characters.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let line = s.trim();
        if line.contains(char::is_whitespace) {
            return Err(FormulaError::BadAssignment(
                "expected a single line of 0/1 characters".into(),
            ));
        }
        line.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(FormulaError::BadAssignment(format!(
                    "unexpected character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Assignment)
    }
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A Boolean function given by a predicate over all `2^n` assignments, for
/// constructions that have no auxiliary-variable-free CNF.
#[derive(Clone)]
pub struct SemanticFormula {
    num_vars: usize,
    name: String,
    predicate: Arc<dyn Fn(&Assignment) -> bool + Send + Sync>,
}

impl SemanticFormula {
    pub fn new<F>(num_vars: usize, name: impl Into<String>, predicate: F) -> Self
    where
        F: Fn(&Assignment) -> bool + Send + Sync + 'static,
    {
        SemanticFormula {
            num_vars,
            name: name.into(),
            predicate: Arc::new(predicate),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn evaluate(&self, x: &Assignment) -> Result<bool, FormulaError> {
        check_len(self.num_vars, x)?;
        Ok((self.predicate)(x))
    }
}

impl fmt::Debug for SemanticFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemanticFormula")
            .field("num_vars", &self.num_vars)
            .field("name", &self.name)
            .finish()
    }
}

/// Anything that can be evaluated on assignments: clausal or semantic.
pub trait BooleanFunction: Sync {
    fn num_vars(&self) -> usize;

    fn evaluate(&self, x: &Assignment) -> Result<bool, FormulaError>;

    /// Evaluator over packed assignments (see [`Assignment::pack`]).
    fn packed_evaluator(&self) -> Box<dyn Fn(u64) -> bool + Sync + '_>;
}

impl BooleanFunction for Formula {
    fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn evaluate(&self, x: &Assignment) -> Result<bool, FormulaError> {
        Formula::evaluate(self, x)
    }

    fn packed_evaluator(&self) -> Box<dyn Fn(u64) -> bool + Sync + '_> {
        let n = self.num_vars;
        assert!(n <= 64, "packed evaluation needs at most 64 variables");
        let bit = |v: Var| 1u64 << (n - v.index());
        let mut disjunctions = Vec::new();
        let mut parities = Vec::new();
        for clause in &self.clauses {
            match clause.kind {
                ClauseKind::Disjunction => {
                    let (mut pos, mut neg) = (0u64, 0u64);
                    for lit in &clause.literals {
                        if lit.is_positive() {
                            pos |= bit(lit.var());
                        } else {
                            neg |= bit(lit.var());
                        }
                    }
                    disjunctions.push((pos, neg));
                }
                ClauseKind::Parity { target } => {
                    let mask = clause.vars().fold(0u64, |m, v| m | bit(v));
                    parities.push((mask, u32::from(target)));
                }
            }
        }
        Box::new(move |x: u64| {
            disjunctions
                .iter()
                .all(|&(pos, neg)| (x & pos) | (!x & neg) != 0)
                && parities
                    .iter()
                    .all(|&(mask, t)| (x & mask).count_ones() % 2 == t)
        })
    }
}

impl BooleanFunction for SemanticFormula {
    fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn evaluate(&self, x: &Assignment) -> Result<bool, FormulaError> {
        SemanticFormula::evaluate(self, x)
    }

    fn packed_evaluator(&self) -> Box<dyn Fn(u64) -> bool + Sync + '_> {
        let n = self.num_vars;
        Box::new(move |x| (self.predicate)(&Assignment::unpack(x, n)))
    }
}

// ---------------------------------------------------------------------------
// Classification

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ClassFlag {
    TwoSat,
    Horn,
    DualHorn,
    Affine,
    ZeroValid,
    OneValid,
    /// None of the other classes applies.
    GeneralCnf,
}

impl fmt::Display for ClassFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassFlag::TwoSat => "2-SAT",
            ClassFlag::Horn => "Horn",
            ClassFlag::DualHorn => "dual-Horn",
            ClassFlag::Affine => "affine",
            ClassFlag::ZeroValid => "0-valid",
            ClassFlag::OneValid => "1-valid",
            ClassFlag::GeneralCnf => "general",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct FormulaClass(BTreeSet<ClassFlag>);

impl FormulaClass {
    pub fn contains(&self, flag: ClassFlag) -> bool {
        self.0.contains(&flag)
    }

    pub fn flags(&self) -> impl Iterator<Item = ClassFlag> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for FormulaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

pub fn classify(f: &Formula) -> FormulaClass {
    let mut flags = BTreeSet::new();
    let cnf = f.is_cnf();
    let disjunctions = || f.clauses.iter().filter(|c| !c.is_parity());
    if cnf && disjunctions().all(|c| c.len() <= 2) {
        flags.insert(ClassFlag::TwoSat);
    }
    if cnf && disjunctions().all(|c| c.positive_count() <= 1) {
        flags.insert(ClassFlag::Horn);
    }
    if cnf && disjunctions().all(|c| c.negative_count() <= 1) {
        flags.insert(ClassFlag::DualHorn);
    }
    if f.clauses.iter().all(Clause::is_parity) {
        flags.insert(ClassFlag::Affine);
    }
    if f.holds(&Assignment::zeros(f.num_vars)) {
        flags.insert(ClassFlag::ZeroValid);
    }
    if f.holds(&Assignment::ones(f.num_vars)) {
        flags.insert(ClassFlag::OneValid);
    }
    if flags.is_empty() {
        flags.insert(ClassFlag::GeneralCnf);
    }
    FormulaClass(flags)
}

// ---------------------------------------------------------------------------
// Validation against the standing input assumptions

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "issue")]
pub enum ValidationIssue {
    /// The variable occurs in no clause at all.
    AbsentVariable { var: Var },
    /// The variable never occurs with the given polarity.
    MissingPolarity { var: Var, positive: bool },
    /// A single-literal clause; such a formula has no delta-model.
    UnitClause { clause: usize },
    EmptyClause { clause: usize },
    /// Clause `clause` repeats clause `first` up to literal order.
    DuplicateClause { clause: usize, first: usize },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::AbsentVariable { var } => write!(f, "{var} occurs in no clause"),
            ValidationIssue::MissingPolarity { var, positive } => write!(
                f,
                "{var} never appears {}",
                if *positive { "positively" } else { "negatively" }
            ),
            ValidationIssue::UnitClause { clause } => write!(
                f,
                "clause {} is a unit clause; no delta-model is possible",
                clause + 1
            ),
            ValidationIssue::EmptyClause { clause } => {
                write!(f, "clause {} is empty", clause + 1)
            }
            ValidationIssue::DuplicateClause { clause, first } => {
                write!(f, "clause {} repeats clause {}", clause + 1, first + 1)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has_unit_clause(&self) -> bool {
        self.issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::UnitClause { .. }))
    }
}

/// Checks the standing assumptions on inputs. Advisory only.
///
/// Parity clauses count as both polarities for every variable they mention.
pub fn validate(f: &Formula) -> ValidationReport {
    let mut issues = Vec::new();
    let n = f.num_vars;
    let mut pos = vec![false; n];
    let mut neg = vec![false; n];
    let mut seen: BTreeMap<Clause, usize> = BTreeMap::new();
    for (i, clause) in f.clauses.iter().enumerate() {
        for lit in clause.literals() {
            let o = lit.var().offset();
            if clause.is_parity() {
                pos[o] = true;
                neg[o] = true;
            } else if lit.is_positive() {
                pos[o] = true;
            } else {
                neg[o] = true;
            }
        }
        match clause.len() {
            0 => issues.push(ValidationIssue::EmptyClause { clause: i }),
            1 => issues.push(ValidationIssue::UnitClause { clause: i }),
            _ => {}
        }
        if let Some(&first) = seen.get(&clause.normalized()) {
            issues.push(ValidationIssue::DuplicateClause { clause: i, first });
        } else {
            seen.insert(clause.normalized(), i);
        }
    }
    for var in f.vars() {
        let o = var.offset();
        match (pos[o], neg[o]) {
            (false, false) => issues.push(ValidationIssue::AbsentVariable { var }),
            (true, false) => issues.push(ValidationIssue::MissingPolarity {
                var,
                positive: false,
            }),
            (false, true) => issues.push(ValidationIssue::MissingPolarity {
                var,
                positive: true,
            }),
            (true, true) => {}
        }
    }
    ValidationReport { issues }
}

impl PartialOrd for Clause {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Clause {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let key = |c: &Clause| (c.parity_target().map(u8::from), c.literals.clone());
        key(self).cmp(&key(other))
    }
}

// ---------------------------------------------------------------------------
// DIMACS input/output

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// Plain DIMACS CNF.
    DimacsCnf,
    /// DIMACS with `x`-prefixed parity clauses.
    DimacsXcnf,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Parses DIMACS CNF, or XCNF when `format` is [`Format::DimacsXcnf`].
///
/// Disjunctive clauses may span lines. A parity clause starts with `x`
/// (either `x1 2 0` or `x 1 2 0`) and ends at its terminating `0`.
pub fn parse(text: &str, format: Format) -> Result<Formula, FormulaError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<(Literal, usize, usize)> = Vec::new();
    let mut parity = false;
    let mut clause_start = (0, 0);

    for (line_idx, line) in text.lines().enumerate() {
        let lineno = line_idx + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(syntax(lineno, 1, "duplicate problem line"));
            }
            if !current.is_empty() || !clauses.is_empty() {
                return Err(syntax(lineno, 1, "problem line must precede clauses"));
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            let kind_ok = match parts.get(1) {
                Some(&"cnf") => true,
                Some(&"xcnf") => format == Format::DimacsXcnf,
                _ => false,
            };
            if parts.len() != 4 || !kind_ok {
                return Err(syntax(lineno, 1, "expected `p cnf <vars> <clauses>`"));
            }
            let num = |s: &str, col: usize| {
                s.parse::<usize>()
                    .map_err(|_| syntax(lineno, col, format!("expected a count, found {s:?}")))
            };
            let col_of = |tok: &str| line.find(tok).map_or(1, |p| p + 1);
            header = Some((num(parts[2], col_of(parts[2]))?, num(parts[3], col_of(parts[3]))?));
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(syntax(lineno, 1, "clause before the problem line"));
        };

        let mut offset = 0;
        for token in line.split_whitespace() {
            let rel = line[offset..].find(token).expect("token comes from this line");
            let column = offset + rel + 1;
            offset += rel + token.len();

            let mut body = token;
            if let Some(rest) = token.strip_prefix('x') {
                if format != Format::DimacsXcnf {
                    return Err(syntax(lineno, column, "parity clauses need the xcnf format"));
                }
                if !current.is_empty() || parity {
                    return Err(syntax(lineno, column, "`x` must start a clause"));
                }
                parity = true;
                clause_start = (lineno, column);
                if rest.is_empty() {
                    continue;
                }
                body = rest;
            }
            let value: i64 = body
                .parse()
                .map_err(|_| syntax(lineno, column, format!("expected an integer, found {body:?}")))?;
            if value == 0 {
                let lits: Vec<Literal> = current.iter().map(|&(l, _, _)| l).collect();
                let built = if parity {
                    Clause::parity(lits, true)
                } else {
                    Clause::disjunction(lits)
                };
                let clause = built.map_err(|e| {
                    let (l, c) = if current.is_empty() { (lineno, column) } else { clause_start };
                    match e {
                        FormulaError::DuplicateVariable(v) => {
                            syntax(l, c, format!("duplicate variable v{v} in clause"))
                        }
                        other => syntax(l, c, other.to_string()),
                    }
                })?;
                clauses.push(clause);
                current.clear();
                parity = false;
                continue;
            }
            if value.unsigned_abs() as usize > num_vars {
                return Err(syntax(
                    lineno,
                    column,
                    format!("variable {} exceeds declared count {num_vars}", value.unsigned_abs()),
                ));
            }
            if current.is_empty() && !parity {
                clause_start = (lineno, column);
            }
            current.push((Literal::from_dimacs(value)?, lineno, column));
        }
        if parity && !current.is_empty() {
            let (l, c) = clause_start;
            return Err(syntax(l, c, "parity clause must end with 0 on its line"));
        }
    }
    let Some((num_vars, num_clauses)) = header else {
        return Err(syntax(1, 1, "missing problem line"));
    };
    if !current.is_empty() || parity {
        let (l, c) = clause_start;
        return Err(syntax(l, c, "unterminated clause"));
    }
    if clauses.len() != num_clauses {
        return Err(syntax(
            1,
            1,
            format!("header declares {num_clauses} clauses but {} were read", clauses.len()),
        ));
    }
    Formula::new(num_vars, clauses)
}

/// Writes `f` as DIMACS; parity clauses use the `x` line convention.
pub fn emit(f: &Formula) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars, f.clauses.len());
    for clause in &f.clauses {
        let mut ints: Vec<i64> = clause.literals().iter().map(|l| l.to_dimacs()).collect();
        if let Some(target) = clause.parity_target() {
            out.push('x');
            if !target {
                ints[0] = -ints[0];
            }
        }
        for i in ints {
            out.push_str(&i.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

// ---------------------------------------------------------------------------
// Formula families

/// Exactly-`k`-of-`n`: always as a predicate, and as CNF when `k <= 1`.
#[derive(Clone, Debug)]
pub struct ExactlyK {
    pub cnf: Option<Formula>,
    pub semantic: SemanticFormula,
}

/// Formula whose models are the `n`-bit vectors with exactly `k` ones.
///
/// For `k = 1` the CNF is one at-least-one clause followed by the pairwise
/// exclusions `(¬vi ∨ ¬vj)`, `i < j`; for `k = 0` it is the units `(¬vi)`.
pub fn gen_h(n: usize, k: usize) -> Result<ExactlyK, FormulaError> {
    if k > n {
        return Err(FormulaError::BadParameters(format!("k = {k} exceeds n = {n}")));
    }
    let semantic = SemanticFormula::new(n, format!("H({n},{k})"), move |x| x.popcount() == k);
    let cnf = match k {
        0 => {
            let clauses = (1..=n).map(|i| Clause::from_dimacs(&[-(i as i64)]));
            Some(Formula::new(n, clauses.collect::<Result<_, _>>()?)?)
        }
        1 => {
            let mut clauses = vec![Clause::from_dimacs(&(1..=n as i64).collect::<Vec<_>>())?];
            for i in 1..=n as i64 {
                for j in i + 1..=n as i64 {
                    clauses.push(Clause::from_dimacs(&[-i, -j])?);
                }
            }
            Some(Formula::new(n, clauses)?)
        }
        _ => None,
    };
    Ok(ExactlyK { cnf, semantic })
}

/// `(v1 = v2) ∧ (v3 = v4) ∧ … ∧ (v_{n-1} = v_n)`, each equality as two 2-clauses.
pub fn gen_pair_chain(n: usize) -> Result<Formula, FormulaError> {
    if n < 2 || n % 2 == 1 {
        return Err(FormulaError::BadParameters(format!(
            "pair chain needs an even n >= 2, got {n}"
        )));
    }
    let mut clauses = Vec::with_capacity(n);
    for i in (1..n as i64).step_by(2) {
        clauses.push(Clause::from_dimacs(&[-i, i + 1])?);
        clauses.push(Clause::from_dimacs(&[i, -(i + 1)])?);
    }
    Formula::new(n, clauses)
}

/// Pair chain conjoined with "at most four ones". Its models have 0, 2 or 4
/// variables set.
pub fn gen_example3(n: usize) -> Result<SemanticFormula, FormulaError> {
    if n < 6 || n % 2 == 1 {
        return Err(FormulaError::BadParameters(format!(
            "needs an even n >= 6, got {n}"
        )));
    }
    Ok(SemanticFormula::new(n, format!("pairs+H<=4({n})"), |x| {
        let bits = x.bits();
        bits.chunks(2).all(|p| p[0] == p[1]) && x.popcount() <= 4
    }))
}

/// Clauses `(±v_{i1} ∨ … ∨ ±v_{ik})` over every `size`-subset of `vars`.
fn subset_clauses(vars: &[usize], size: usize, positive: bool) -> Result<Vec<Clause>, FormulaError> {
    let n = vars.len();
    crate::oracle::subsets_by_size(n, size, false)
        .into_iter()
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| {
            let lits = crate::oracle::mask_vars(m, n)
                .into_iter()
                .map(|v| Literal::new(Var::from_index(vars[v.offset()]), positive))
                .collect();
            Clause::disjunction(lits)
        })
        .collect()
}

/// Exactly-`k`-of-`n` as CNF for any `k`: a positive clause on every
/// `(n−k+1)`-subset and a negative clause on every `(k+1)`-subset. The
/// clause count is binomial, so this is meant for small `n`.
pub fn exactly_k_cnf(n: usize, k: usize) -> Result<Formula, FormulaError> {
    if k > n || n > 20 {
        return Err(FormulaError::BadParameters(format!("exactly {k} of {n} is not supported")));
    }
    let vars: Vec<usize> = (1..=n).collect();
    let mut clauses = Vec::new();
    if k > 0 {
        clauses.extend(subset_clauses(&vars, n - k + 1, true)?);
    }
    if k < n {
        clauses.extend(subset_clauses(&vars, k + 1, false)?);
    }
    Formula::new(n, clauses)
}

/// CNF with the models of [`gen_example3`]: the pair chain plus a negative
/// clause on every three pair leaders (`v1, v3, …`).
pub fn example3_cnf(n: usize) -> Result<Formula, FormulaError> {
    gen_example3(n)?;
    let mut f = gen_pair_chain(n)?;
    let leaders: Vec<usize> = (1..=n).step_by(2).collect();
    for c in subset_clauses(&leaders, 3, false)? {
        f.push(c)?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(n: usize, clauses: &[&[i64]]) -> Formula {
        Formula::from_dimacs_clauses(n, clauses).unwrap()
    }

    #[test]
    fn explicit_encodings_match_predicates() {
        use crate::oracle::Oracle;
        let o = Oracle::default();
        for n in 1..=6 {
            for k in 0..=n {
                let cnf = exactly_k_cnf(n, k).unwrap();
                let sem = gen_h(n, k).unwrap().semantic;
                assert_eq!(o.enumerate_models(&cnf).unwrap(), o.enumerate_models(&sem).unwrap());
            }
        }
        for n in [6, 8] {
            assert_eq!(
                o.enumerate_models(&example3_cnf(n).unwrap()).unwrap(),
                o.enumerate_models(&gen_example3(n).unwrap()).unwrap()
            );
        }
    }

    fn paired_system() -> Formula {
        Formula::new(
            4,
            vec![
                Clause::xor(&[1, 2, 3, 4], true).unwrap(),
                Clause::xor(&[3, 4], false).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn parses_plain_cnf() {
        let parsed = parse("p cnf 2 2\n1 2 0\n-1 -2 0\n", Format::DimacsCnf).unwrap();
        assert_eq!(parsed, f(2, &[&[1, 2], &[-1, -2]]));
    }

    #[test]
    fn parses_xcnf_parity_clauses() {
        let parsed = parse("p cnf 4 2\nx1 2 3 4 0\nx-3 4 0\n", Format::DimacsXcnf).unwrap();
        assert_eq!(parsed, paired_system());
        assert_eq!(parsed.clauses()[1].parity_target(), Some(false));
        let spaced = parse("p cnf 4 2\nx 1 2 3 4 0\nx -3 4 0\n", Format::DimacsXcnf).unwrap();
        assert_eq!(spaced, paired_system());
    }

    #[test]
    fn rejects_duplicate_variable() {
        let err = parse("p cnf 1 1\n1 1 0\n", Format::DimacsCnf).unwrap_err();
        match err {
            FormulaError::Syntax { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("duplicate"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse("p cnf 2 1\n1 3 0\n", Format::DimacsCnf).unwrap_err();
        assert_eq!(
            err,
            syntax(2, 3, "variable 3 exceeds declared count 2")
        );
        let err = parse("p cnf 2 1\n1 y 0\n", Format::DimacsCnf).unwrap_err();
        assert!(matches!(err, FormulaError::Syntax { line: 2, column: 3, .. }));
        assert!(parse("p cnf 2 1\nx1 2 0\n", Format::DimacsCnf).is_err());
        assert!(parse("1 2 0\n", Format::DimacsCnf).is_err());
        assert!(parse("p cnf 2 2\n1 2 0\n", Format::DimacsCnf).is_err());
        assert!(parse("p cnf 2 1\n1 2\n", Format::DimacsCnf).is_err());
    }

    #[test]
    fn clauses_may_span_lines_and_comments_are_skipped() {
        let parsed = parse("c hello\np cnf 3 1\n1\n -2\n3 0\n", Format::DimacsCnf).unwrap();
        assert_eq!(parsed, f(3, &[&[1, -2, 3]]));
    }

    #[test]
    fn emits_dimacs() {
        assert_eq!(emit(&f(2, &[&[1, 2]])), "p cnf 2 1\n1 2 0\n");
        assert_eq!(emit(&paired_system()), "p cnf 4 2\nx1 2 3 4 0\nx-3 4 0\n");
        assert_eq!(emit(&Formula::empty(0)), "p cnf 0 0\n");
    }

    #[test]
    fn classify_examples() {
        let c = classify(&f(2, &[&[1, 2], &[-1, -2]]));
        assert_eq!(c.flags().collect::<Vec<_>>(), vec![ClassFlag::TwoSat]);

        let c = classify(&f(3, &[&[-1, -2, 3]]));
        assert_eq!(
            c.flags().collect::<Vec<_>>(),
            vec![ClassFlag::Horn, ClassFlag::ZeroValid, ClassFlag::OneValid]
        );

        let c = classify(&paired_system());
        assert_eq!(c.flags().collect::<Vec<_>>(), vec![ClassFlag::Affine]);

        let c = classify(&f(3, &[&[1, 2, 3], &[-1, -2, -3], &[1, -2, 3], &[-1, 2, -3]]));
        assert_eq!(c.flags().collect::<Vec<_>>(), vec![ClassFlag::GeneralCnf]);
    }

    #[test]
    fn evaluate_h41() {
        let h = gen_h(4, 1).unwrap().cnf.unwrap();
        assert!(h.evaluate(&Assignment::from_bits(&[0, 1, 0, 0])).unwrap());
        assert!(!h.evaluate(&Assignment::from_bits(&[1, 1, 0, 0])).unwrap());
        assert!(h.evaluate(&Assignment::zeros(3)).is_err());
    }

    #[test]
    fn zero_valid_formula_holds_at_zero() {
        let g = f(3, &[&[-1, 2], &[-2, -3]]);
        assert!(classify(&g).contains(ClassFlag::ZeroValid));
        assert!(g.evaluate(&Assignment::zeros(3)).unwrap());
    }

    #[test]
    fn validate_reports() {
        assert!(validate(&f(2, &[&[1, 2], &[-1, -2]])).is_clean());

        let r = validate(&f(2, &[&[1, 2]]));
        assert_eq!(
            r.issues,
            vec![
                ValidationIssue::MissingPolarity { var: Var(1), positive: false },
                ValidationIssue::MissingPolarity { var: Var(2), positive: false },
            ]
        );

        let r = validate(&f(2, &[&[1], &[-1, 2]]));
        assert!(r.has_unit_clause());
        assert!(r.issues.contains(&ValidationIssue::UnitClause { clause: 0 }));

        let r = validate(&f(3, &[&[1, 2], &[2, 1], &[-1, -2]]));
        assert!(r.issues.contains(&ValidationIssue::DuplicateClause { clause: 1, first: 0 }));
        assert!(r.issues.contains(&ValidationIssue::AbsentVariable { var: Var(3) }));
    }

    #[test]
    fn flip_examples() {
        let x = Assignment::zeros(3);
        assert_eq!(x.flip([Var(1)]).unwrap(), Assignment::from_bits(&[1, 0, 0]));
        assert_eq!(x.flip([]).unwrap(), x);
        let s = [Var(1), Var(3)];
        assert_eq!(x.flip(s).unwrap().flip(s).unwrap(), x);
        assert!(x.flip([Var(4)]).is_err());
    }

    #[test]
    fn h_family() {
        let h = gen_h(3, 1).unwrap().cnf.unwrap();
        assert_eq!(h, f(3, &[&[1, 2, 3], &[-1, -2], &[-1, -3], &[-2, -3]]));
        let h0 = gen_h(3, 0).unwrap();
        assert!(h0.semantic.evaluate(&Assignment::zeros(3)).unwrap());
        assert!(gen_h(4, 2).unwrap().cnf.is_none());
        assert!(gen_h(2, 3).is_err());
    }

    #[test]
    fn pair_chain_and_capped_chain() {
        assert_eq!(gen_pair_chain(2).unwrap(), f(2, &[&[-1, 2], &[1, -2]]));
        assert!(gen_pair_chain(3).is_err());
        let e = gen_example3(6).unwrap();
        assert!(e.evaluate(&Assignment::zeros(6)).unwrap());
        assert!(e.evaluate(&Assignment::from_bits(&[1, 1, 0, 0, 0, 0])).unwrap());
        assert!(!e.evaluate(&Assignment::from_bits(&[1, 0, 0, 0, 0, 0])).unwrap());
        assert!(!e.evaluate(&Assignment::ones(6)).unwrap());
        assert!(gen_example3(4).is_err());
        assert!(gen_example3(7).is_err());
    }

    #[test]
    fn assignment_text_and_packing() {
        let x: Assignment = "0110".parse().unwrap();
        assert_eq!(x.to_string(), "0110");
        assert_eq!(x.pack(), 0b0110);
        assert_eq!(Assignment::unpack(0b0110, 4), x);
        assert!("01a".parse::<Assignment>().is_err());
    }

    #[test]
    fn packed_evaluator_matches_direct() {
        let g = Formula::new(
            3,
            vec![
                Clause::from_dimacs(&[1, -2]).unwrap(),
                Clause::xor(&[2, 3], true).unwrap(),
            ],
        )
        .unwrap();
        let eval = g.packed_evaluator();
        for p in 0..8u64 {
            let x = Assignment::unpack(p, 3);
            assert_eq!(eval(p), g.evaluate(&x).unwrap(), "{x}");
        }
    }

    #[test]
    fn negated_parity_literals_flip_target() {
        let c = Clause::parity(vec![Var(1).neg(), Var(2).neg()], true).unwrap();
        assert_eq!(c.parity_target(), Some(true));
        let c = Clause::parity(vec![Var(1).neg(), Var(2).pos()], true).unwrap();
        assert_eq!(c.parity_target(), Some(false));
    }
}

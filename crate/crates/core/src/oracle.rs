//! Exhaustive ground truth for every robustness question.
//!
//! Assignments are packed into `u64` with `v1` as the most significant bit
//! (see [`Assignment::pack`]), so scanning packed values upward is a
//! lexicographic scan. The model set is a bitset over all `2^n` assignments,
//! built in parallel and read in deterministic order.
//!
//! Degrees are computed with the set chain `M₀ ⊇ M₁ ⊇ …`: `M₀` is the model
//! set and `M_j` keeps the members of `M_{j−1}` all of whose breaks of at
//! most `r` bits are repaired, with at most `s` disjoint flips, into
//! `M_{j−1}`. The chain stabilizes at the greatest fixpoint `M_∞`, the
//! largest stable set.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::formula::{Assignment, BooleanFunction, FormulaError, Var};

pub const DEFAULT_CAP: usize = 24;
/// No configuration may raise the cap above this.
pub const HARD_CAP: usize = 28;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n} variables exceed the enumeration cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("assignment {0} is not a model")]
    NotAModel(Assignment),
    #[error("assignment has {actual} bits but the formula has {expected} variables")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid robustness spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Robustness degree: a finite `k` or `★` (every `k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Degree {
    Finite(u32),
    Star,
}

impl Degree {
    pub fn is_star(self) -> bool {
        matches!(self, Degree::Star)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(k) => write!(f, "{k}"),
            Degree::Star => f.write_str("*"),
        }
    }
}

impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Degree::Finite(k) => s.serialize_u32(*k),
            Degree::Star => s.serialize_str("*"),
        }
    }
}

/// The triple `(r, s, degree)`. `(1, 1, 1)` is the plain δ-model question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RobustnessSpec {
    pub r: usize,
    pub s: usize,
    pub degree: Degree,
}

impl RobustnessSpec {
    pub fn new(r: usize, s: usize, degree: Degree) -> Result<Self, OracleError> {
        if r == 0 {
            return Err(OracleError::InvalidSpec(
                "r must be at least 1 (a zero-bit break is vacuous)".into(),
            ));
        }
        Ok(RobustnessSpec { r, s, degree })
    }

    /// `δ(r,s)`: degree 1.
    pub fn delta(r: usize, s: usize) -> Self {
        Self::new(r, s, Degree::Finite(1)).expect("r >= 1")
    }

    pub fn delta11() -> Self {
        Self::delta(1, 1)
    }

    pub fn with_degree(self, degree: Degree) -> Self {
        RobustnessSpec { degree, ..self }
    }
}

impl fmt::Display for RobustnessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.degree {
            Degree::Finite(1) => write!(f, "δ({},{})", self.r, self.s),
            d => write!(f, "δ^{d}({},{})", self.r, self.s),
        }
    }
}

/// Variables of a packed mask, ascending.
pub fn mask_vars(mask: u64, n: usize) -> Vec<Var> {
    (1..=n)
        .filter(|&i| mask >> (n - i) & 1 == 1)
        .map(Var::from_index)
        .collect()
}

fn vars_mask(vars: &[usize], n: usize) -> u64 {
    vars.iter().fold(0, |m, &i| m | 1 << (n - i))
}

/// Masks of all subsets of `1..=n` of size `1..=k` (plus `∅` first when
/// `with_empty`), ordered by size then lexicographically.
pub fn subsets_by_size(n: usize, k: usize, with_empty: bool) -> Vec<u64> {
    let mut out = Vec::new();
    if with_empty {
        out.push(0);
    }
    for size in 1..=k.min(n) {
        let mut idx: Vec<usize> = (1..=size).collect();
        loop {
            out.push(vars_mask(&idx, n));
            // advance to the next combination in lex order
            let mut i = size;
            while i > 0 && idx[i - 1] == n - size + i {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// Every break of at most `r` bits with its admissible repairs in search order.
#[derive(Clone, Debug)]
pub struct Neighborhood {
    n: usize,
    breaks: Vec<(u64, Vec<u64>)>,
}

impl Neighborhood {
    pub fn new(n: usize, r: usize, s: usize) -> Self {
        let repairs = subsets_by_size(n, s, true);
        let breaks = subsets_by_size(n, r, false)
            .into_iter()
            .map(|b| (b, repairs.iter().copied().filter(|&m| m & b == 0).collect()))
            .collect();
        Neighborhood { n, breaks }
    }

    pub fn breaks(&self) -> impl Iterator<Item = u64> + '_ {
        self.breaks.iter().map(|(b, _)| *b)
    }

    /// First repair of break `b` at `x` landing in `set`.
    fn repair(&self, x: u64, repairs: &[u64], b: u64, set: &Bitset) -> Option<u64> {
        repairs.iter().copied().find(|&s| set.contains(x ^ b ^ s))
    }

    /// Whether every break of `x` repairs into `set`.
    pub fn all_repairable(&self, x: u64, set: &Bitset) -> bool {
        self.breaks
            .iter()
            .all(|(b, reps)| self.repair(x, reps, *b, set).is_some())
    }

    /// Certificate on success, else the first unrepairable break.
    pub fn certify(&self, x: u64, set: &Bitset) -> Result<RepairCertificate, Vec<Var>> {
        let mut entries = Vec::with_capacity(self.breaks.len());
        for (b, reps) in &self.breaks {
            match self.repair(x, reps, *b, set) {
                Some(s) => entries.push(RepairEntry {
                    break_set: mask_vars(*b, self.n),
                    repair: mask_vars(s, self.n),
                }),
                None => return Err(mask_vars(*b, self.n)),
            }
        }
        Ok(RepairCertificate { entries })
    }
}

/// A set of packed assignments over `2^n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Bitset {
    n: usize,
    words: Vec<u64>,
}

impl Bitset {
    pub fn empty(n: usize) -> Self {
        let len = ((1usize << n) + 63) / 64;
        Bitset {
            n,
            words: vec![0; len],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn contains(&self, x: u64) -> bool {
        self.words[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    pub fn insert(&mut self, x: u64) {
        self.words[(x >> 6) as usize] |= 1 << (x & 63);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in ascending (= lexicographic) order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = (i as u64) << 6;
            BitIter(w).map(move |b| base | b)
        })
    }

    /// Builds `{x ∈ 0..2^n : pred(x)}` in parallel, one 64-bit word per task.
    fn from_predicate<P: Fn(u64) -> bool + Sync>(n: usize, pred: P) -> Self {
        let total = 1u64 << n;
        let len = ((total + 63) / 64) as usize;
        let words = (0..len)
            .into_par_iter()
            .map(|i| {
                let base = (i as u64) << 6;
                let mut w = 0u64;
                for b in 0..64u64 {
                    let x = base | b;
                    if x < total && pred(x) {
                        w |= 1 << b;
                    }
                }
                w
            })
            .collect();
        Bitset { n, words }
    }

    /// Members of `self` satisfying `pred`, in parallel.
    fn filter<P: Fn(u64) -> bool + Sync>(&self, pred: P) -> Self {
        let words = self
            .words
            .par_iter()
            .enumerate()
            .map(|(i, &w)| {
                let base = (i as u64) << 6;
                BitIter(w).fold(0u64, |acc, b| if pred(base | b) { acc | 1 << b } else { acc })
            })
            .collect();
        Bitset { n: self.n, words }
    }

    /// Lex-first member satisfying `pred`.
    fn find_first<P: Fn(u64) -> bool + Sync>(&self, pred: P) -> Option<u64> {
        self.words
            .par_iter()
            .enumerate()
            .filter_map(|(i, &w)| {
                let base = (i as u64) << 6;
                BitIter(w).map(|b| base | b).find(|&x| pred(x))
            })
            .find_first(|_| true)
    }

    pub fn to_assignments(&self) -> Vec<Assignment> {
        self.iter().map(|x| Assignment::unpack(x, self.n)).collect()
    }
}

impl fmt::Debug for Bitset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.iter().map(|x| Assignment::unpack(x, self.n).to_string()))
            .finish()
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as u64;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// One break and the repair chosen for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepairEntry {
    #[serde(rename = "break")]
    pub break_set: Vec<Var>,
    pub repair: Vec<Var>,
}

/// One repair per break, in break order (size, then lexicographic). The
/// repair is the smallest admissible one in the same order; `∅` when the
/// break needs none.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct RepairCertificate {
    pub entries: Vec<RepairEntry>,
}

impl RepairCertificate {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Result of testing one assignment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaCheck {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<RepairCertificate>,
    /// First break without a repair, when `holds` is false.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unrepairable: Option<Vec<Var>>,
}

/// A set of models closed under break-repair (see module docs).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct StableSet {
    pub members: Vec<Assignment>,
}

impl StableSet {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: &Assignment) -> bool {
        self.members.binary_search(x).is_ok()
    }
}

/// Model set of a formula, with the chain computations on top.
#[derive(Clone, Debug)]
pub struct ModelSpace {
    models: Bitset,
}

impl ModelSpace {
    pub fn num_vars(&self) -> usize {
        self.models.n
    }

    pub fn models(&self) -> &Bitset {
        &self.models
    }

    pub fn contains(&self, x: &Assignment) -> bool {
        x.len() == self.models.n && self.models.contains(x.pack())
    }

    /// One pruning step relative to `set`.
    pub fn prune(&self, set: &Bitset, hood: &Neighborhood) -> Bitset {
        set.filter(|x| hood.all_repairable(x, set))
    }

    /// `M₀, M₁, …` up to and including `M_k` (shorter if it stabilizes).
    pub fn chain(&self, r: usize, s: usize, k: u32) -> Vec<Bitset> {
        let hood = Neighborhood::new(self.models.n, r, s);
        let mut chain = vec![self.models.clone()];
        for _ in 0..k {
            let last = chain.last().expect("nonempty");
            let next = self.prune(last, &hood);
            if &next == last {
                break;
            }
            chain.push(next);
        }
        chain
    }

    /// `M_k`, or `M_∞` for [`Degree::Star`].
    pub fn level(&self, r: usize, s: usize, degree: Degree) -> Bitset {
        match degree {
            Degree::Finite(k) => self
                .chain(r, s, k)
                .pop()
                .expect("chain contains M0"),
            Degree::Star => self.fixpoint(r, s),
        }
    }

    pub fn fixpoint(&self, r: usize, s: usize) -> Bitset {
        self.chain(r, s, u32::MAX).pop().expect("chain contains M0")
    }
}

/// Configured exhaustive engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Oracle {
    cap: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { cap: DEFAULT_CAP }
    }
}

impl Oracle {
    pub fn with_cap(cap: usize) -> Result<Self, OracleError> {
        if cap > HARD_CAP {
            return Err(OracleError::InvalidSpec(format!(
                "cap {cap} exceeds the hard limit {HARD_CAP}"
            )));
        }
        Ok(Oracle { cap })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn model_space<F: BooleanFunction + ?Sized>(&self, f: &F) -> Result<ModelSpace, OracleError> {
        let n = f.num_vars();
        if n > self.cap {
            return Err(OracleError::CapExceeded { n, cap: self.cap });
        }
        let eval = f.packed_evaluator();
        Ok(ModelSpace {
            models: Bitset::from_predicate(n, |x| eval(x)),
        })
    }

    /// All models in lexicographic order.
    pub fn enumerate_models<F: BooleanFunction + ?Sized>(
        &self,
        f: &F,
    ) -> Result<Vec<Assignment>, OracleError> {
        Ok(self.model_space(f)?.models.to_assignments())
    }

    fn check_input<F: BooleanFunction + ?Sized>(
        &self,
        f: &F,
        x: &Assignment,
    ) -> Result<ModelSpace, OracleError> {
        if x.len() != f.num_vars() {
            return Err(OracleError::LengthMismatch {
                expected: f.num_vars(),
                actual: x.len(),
            });
        }
        let space = self.model_space(f)?;
        if !space.contains(x) {
            return Err(OracleError::NotAModel(x.clone()));
        }
        Ok(space)
    }

    /// Whether the model `x` meets `spec`: every break repairs into
    /// `M_{degree−1}` (into `M_∞` for `★`; degree 0 only asks for a model).
    pub fn is_delta_model<F: BooleanFunction + ?Sized>(
        &self,
        f: &F,
        x: &Assignment,
        spec: RobustnessSpec,
    ) -> Result<DeltaCheck, OracleError> {
        let space = self.check_input(f, x)?;
        let target = match spec.degree {
            Degree::Finite(0) => {
                return Ok(DeltaCheck {
                    holds: true,
                    certificate: Some(RepairCertificate::default()),
                    unrepairable: None,
                })
            }
            Degree::Finite(k) => space.level(spec.r, spec.s, Degree::Finite(k - 1)),
            Degree::Star => space.fixpoint(spec.r, spec.s),
        };
        let hood = Neighborhood::new(space.num_vars(), spec.r, spec.s);
        Ok(match hood.certify(x.pack(), &target) {
            Ok(cert) => DeltaCheck {
                holds: true,
                certificate: Some(cert),
                unrepairable: None,
            },
            Err(b) => DeltaCheck {
                holds: false,
                certificate: None,
                unrepairable: Some(b),
            },
        })
    }

    /// Largest `j <= k_max` with `x ∈ M_j`, or `★` when `x ∈ M_∞`.
    pub fn delta_degree<F: BooleanFunction + ?Sized>(
        &self,
        f: &F,
        x: &Assignment,
        r: usize,
        s: usize,
        k_max: u32,
    ) -> Result<Degree, OracleError> {
        RobustnessSpec::new(r, s, Degree::Star)?;
        let space = self.check_input(f, x)?;
        let hood = Neighborhood::new(space.num_vars(), r, s);
        let p = x.pack();
        let mut set = space.models.clone();
        let mut j = 0u32;
        loop {
            let next = space.prune(&set, &hood);
            if next == set {
                return Ok(Degree::Star);
            }
            if !next.contains(p) {
                return Ok(Degree::Finite(j.min(k_max)));
            }
            j += 1;
            set = next;
        }
    }

    /// The greatest fixpoint `M_∞`: every member is a `δ*(r,s)`-model.
    pub fn stable_core<F: BooleanFunction + ?Sized>(
        &self,
        f: &F,
        r: usize,
        s: usize,
    ) -> Result<StableSet, OracleError> {
        RobustnessSpec::new(r, s, Degree::Star)?;
        let space = self.model_space(f)?;
        Ok(StableSet {
            members: space.fixpoint(r, s).to_assignments(),
        })
    }

    /// Lex-first model meeting `spec`.
    pub fn find_delta_model<F: BooleanFunction + ?Sized>(
        &self,
        f: &F,
        spec: RobustnessSpec,
    ) -> Result<Option<Assignment>, OracleError> {
        let space = self.model_space(f)?;
        let n = space.num_vars();
        let found = match spec.degree {
            Degree::Finite(0) => space.models.iter().next(),
            Degree::Finite(k) => {
                let target = space.level(spec.r, spec.s, Degree::Finite(k - 1));
                let hood = Neighborhood::new(n, spec.r, spec.s);
                target.find_first(|x| hood.all_repairable(x, &target))
            }
            Degree::Star => space.fixpoint(spec.r, spec.s).iter().next(),
        };
        Ok(found.map(|x| Assignment::unpack(x, n)))
    }

    /// Whether `set` is a nonempty-or-empty stable set of `f`: all members
    /// are models and every break of every member repairs inside the set.
    pub fn is_stable_set<F: BooleanFunction + ?Sized>(
        &self,
        f: &F,
        set: &[Assignment],
        r: usize,
        s: usize,
    ) -> Result<bool, OracleError> {
        let space = self.model_space(f)?;
        let n = space.num_vars();
        let mut bits = Bitset::empty(n);
        for x in set {
            if !space.contains(x) {
                return Ok(false);
            }
            bits.insert(x.pack());
        }
        let hood = Neighborhood::new(n, r, s);
        let closed = bits.iter().all(|x| hood.all_repairable(x, &bits));
        Ok(closed)
    }
}

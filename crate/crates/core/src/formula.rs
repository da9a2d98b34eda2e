//! Propositional data model: literals, normalized clauses and CNF formulas
//! with stable clause identifiers, plus DIMACS I/O, syntactic KB
//! intersection and query negation.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Not, Range};

use thiserror::Error;

/// Largest variable index accepted from external input. Keeps the signed
/// DIMACS representation and internal literal codes within `i32`/`u32`.
pub const MAX_VAR: u32 = (i32::MAX as u32) >> 1;

/// A Boolean variable (1-based) together with a polarity.
///
/// Ordering is by `(var, positive)`, so `¬x` sorts directly before `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: u32,
    positive: bool,
}

impl Literal {
    pub fn new(var: u32, positive: bool) -> Self {
        assert!((1..=MAX_VAR).contains(&var), "variable index {var} out of range");
        Literal { var, positive }
    }

    pub fn pos(var: u32) -> Self {
        Self::new(var, true)
    }

    pub fn neg(var: u32) -> Self {
        Self::new(var, false)
    }

    /// Build from a non-zero DIMACS integer.
    pub fn from_dimacs(value: i32) -> Self {
        assert!(value != 0, "0 is not a literal");
        Self::new(value.unsigned_abs(), value > 0)
    }

    pub fn to_dimacs(self) -> i32 {
        if self.positive {
            self.var as i32
        } else {
            -(self.var as i32)
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    /// Truth value of the literal under a variable assignment.
    pub fn eval(self, var_value: bool) -> bool {
        var_value == self.positive
    }
}

impl Not for Literal {
    type Output = Literal;
    fn not(self) -> Literal {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals, kept sorted and duplicate-free.
///
/// A `Clause` is never a tautology; [`Clause::normalize`] reports those
/// instead of building one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Clause {
    lits: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized {
    Clause(Clause),
    Tautology,
}

impl Clause {
    /// Sort and dedup `lits`; detects complementary pairs.
    pub fn normalize(lits: impl IntoIterator<Item = Literal>) -> Normalized {
        let mut lits: Vec<Literal> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var == w[1].var) {
            Normalized::Tautology
        } else {
            Normalized::Clause(Clause { lits })
        }
    }

    /// Like [`Clause::normalize`] but panics on tautologies. Intended for
    /// clauses built by code that cannot produce complementary literals.
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Clause {
        match Self::normalize(lits) {
            Normalized::Clause(c) => c,
            Normalized::Tautology => panic!("tautological clause"),
        }
    }

    pub fn from_dimacs(lits: &[i32]) -> Clause {
        Self::new(lits.iter().map(|&l| Literal::from_dimacs(l)))
    }

    pub fn unit(lit: Literal) -> Clause {
        Clause { lits: vec![lit] }
    }

    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.lits.len() == 1
    }

    pub fn max_var(&self) -> u32 {
        self.lits.last().map_or(0, |l| l.var)
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    /// `assignment[v]` is the value of variable `v` (index 0 unused).
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.lits
            .iter()
            .any(|l| assignment.get(l.var as usize).is_some_and(|&v| l.eval(v)))
    }

    pub fn to_dimacs(&self) -> Vec<i32> {
        self.lits.iter().map(|l| l.to_dimacs()).collect()
    }
}

impl fmt::Display for Clause {
    /// DIMACS-style literal list terminated by `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lits {
            write!(f, "{l} ")?;
        }
        write!(f, "0")
    }
}

/// Dense 0-based clause identifier within one [`CnfFormula`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClauseId(pub usize);

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0 + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Role {
    #[default]
    Soft,
    Hard,
}

/// Non-fatal events recorded while building a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaWarning {
    /// The `ordinal`-th input clause (0-based) normalized to an existing clause.
    DuplicateMerged { ordinal: usize, into: ClauseId },
    TautologyDropped { ordinal: usize },
    EmptyClause { id: ClauseId },
    /// Header promised a different number of clauses.
    ClauseCountMismatch { declared: usize, found: usize },
}

/// Outcome of [`CnfFormula::push`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pushed {
    New(ClauseId),
    Merged(ClauseId),
    Tautology,
}

impl Pushed {
    pub fn id(self) -> Option<ClauseId> {
        match self {
            Pushed::New(id) | Pushed::Merged(id) => Some(id),
            Pushed::Tautology => None,
        }
    }
}

/// A set of distinct normalized clauses with stable ids and per-clause roles.
#[derive(Clone, Debug, Default)]
pub struct CnfFormula {
    clauses: Vec<Clause>,
    roles: Vec<Role>,
    num_vars: u32,
    index: HashMap<Clause, ClauseId>,
    warnings: Vec<FormulaWarning>,
    pushed: usize,
}

impl PartialEq for CnfFormula {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars && self.clauses == other.clauses && self.roles == other.roles
    }
}

impl Eq for CnfFormula {}

impl CnfFormula {
    pub fn new(num_vars: u32) -> Self {
        CnfFormula {
            num_vars,
            ..Default::default()
        }
    }

    /// Build from DIMACS literal lists; tautologies dropped, duplicates merged.
    pub fn from_dimacs_clauses(num_vars: u32, clauses: &[&[i32]]) -> Self {
        let mut f = CnfFormula::new(num_vars);
        for c in clauses {
            f.push_lits(c.iter().map(|&l| Literal::from_dimacs(l)));
        }
        f
    }

    pub fn from_clauses(num_vars: u32, clauses: impl IntoIterator<Item = Clause>) -> Self {
        let mut f = CnfFormula::new(num_vars);
        for c in clauses {
            f.push(c);
        }
        f
    }

    /// Normalize and append a soft clause.
    pub fn push_lits(&mut self, lits: impl IntoIterator<Item = Literal>) -> Pushed {
        match Clause::normalize(lits) {
            Normalized::Clause(c) => self.push_with_role(c, Role::Soft),
            Normalized::Tautology => {
                self.warnings.push(FormulaWarning::TautologyDropped {
                    ordinal: self.pushed,
                });
                self.pushed += 1;
                Pushed::Tautology
            }
        }
    }

    pub fn push(&mut self, clause: Clause) -> Pushed {
        self.push_with_role(clause, Role::Soft)
    }

    /// Append a clause. A duplicate keeps the existing id; if either copy is
    /// hard the merged clause is hard.
    pub fn push_with_role(&mut self, clause: Clause, role: Role) -> Pushed {
        let ordinal = self.pushed;
        self.pushed += 1;
        if let Some(&id) = self.index.get(&clause) {
            if role == Role::Hard {
                self.roles[id.0] = Role::Hard;
            }
            self.warnings.push(FormulaWarning::DuplicateMerged { ordinal, into: id });
            return Pushed::Merged(id);
        }
        let id = ClauseId(self.clauses.len());
        self.num_vars = self.num_vars.max(clause.max_var());
        if clause.is_empty() {
            self.warnings.push(FormulaWarning::EmptyClause { id });
        }
        self.index.insert(clause.clone(), id);
        self.clauses.push(clause);
        self.roles.push(role);
        Pushed::New(id)
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, id: ClauseId) -> &Clause {
        &self.clauses[id.0]
    }

    pub fn role(&self, id: ClauseId) -> Role {
        self.roles[id.0]
    }

    pub fn set_role(&mut self, id: ClauseId, role: Role) {
        self.roles[id.0] = role;
    }

    pub fn ids(&self) -> impl Iterator<Item = ClauseId> {
        (0..self.clauses.len()).map(ClauseId)
    }

    pub fn find(&self, clause: &Clause) -> Option<ClauseId> {
        self.index.get(clause).copied()
    }

    pub fn contains(&self, clause: &Clause) -> bool {
        self.index.contains_key(clause)
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn set_num_vars(&mut self, num_vars: u32) {
        self.num_vars = self.num_vars.max(num_vars);
    }

    pub fn warnings(&self) -> &[FormulaWarning] {
        &self.warnings
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    /// A copy without the clauses in `remove`, keeping relative order.
    pub fn without(&self, remove: &[Clause]) -> CnfFormula {
        let mut out = CnfFormula::new(self.num_vars);
        for (c, &r) in self.clauses.iter().zip(&self.roles) {
            if !remove.contains(c) {
                out.push_with_role(c.clone(), r);
            }
        }
        out
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.is_satisfied_by(assignment))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed problem header `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("line {line}: duplicate problem header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: invalid literal `{token}`")]
    InvalidLiteral { line: usize, token: String },
    #[error("line {line}: variable {var} exceeds the supported maximum {max}")]
    VariableTooLarge { line: usize, var: u64, max: u32 },
    #[error("clause not terminated by 0 at end of input")]
    UnterminatedClause,
}

/// Parse DIMACS CNF text.
///
/// Comment lines start with `c`. Clauses may span lines; each ends at `0`.
/// A trailing `%` line (as in some benchmark sets) ends the input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut formula: Option<(CnfFormula, usize)> = None;
    let mut current: Vec<Literal> = Vec::new();
    let mut open = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if formula.is_some() {
                return Err(DimacsError::DuplicateHeader { line: line_no });
            }
            formula = Some(parse_header(line, line_no)?);
            continue;
        }
        let Some((f, _)) = formula.as_mut() else {
            return Err(DimacsError::MissingHeader);
        };
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| DimacsError::InvalidLiteral {
                line: line_no,
                token: token.to_string(),
            })?;
            if value == 0 {
                f.push_lits(current.drain(..));
                open = false;
                continue;
            }
            let var = value.unsigned_abs();
            if var > MAX_VAR as u64 {
                return Err(DimacsError::VariableTooLarge {
                    line: line_no,
                    var,
                    max: MAX_VAR,
                });
            }
            current.push(Literal::new(var as u32, value > 0));
            open = true;
        }
    }
    if open {
        return Err(DimacsError::UnterminatedClause);
    }
    let (mut f, declared) = formula.ok_or(DimacsError::MissingHeader)?;
    if declared != f.pushed {
        f.warnings.push(FormulaWarning::ClauseCountMismatch {
            declared,
            found: f.pushed,
        });
    }
    Ok(f)
}

fn parse_header(line: &str, line_no: usize) -> Result<(CnfFormula, usize), DimacsError> {
    let bad = || DimacsError::MalformedHeader {
        line: line_no,
        text: line.to_string(),
    };
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
        return Err(bad());
    }
    let vars: u64 = parts[2].parse().map_err(|_| bad())?;
    let clauses: usize = parts[3].parse().map_err(|_| bad())?;
    if vars > MAX_VAR as u64 {
        return Err(DimacsError::VariableTooLarge {
            line: line_no,
            var: vars,
            max: MAX_VAR,
        });
    }
    Ok((CnfFormula::new(vars as u32), clauses))
}

pub fn write_dimacs(formula: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.num_vars(), formula.len());
    for c in formula.clauses() {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryFileError {
    #[error("line {line}: expected one non-zero signed integer, found `{text}`")]
    InvalidLine { line: usize, text: String },
    #[error(transparent)]
    Dimacs(#[from] DimacsError),
}

/// Parse a literal-list file: one signed integer per line, read as a
/// conjunction of unit clauses. Blank lines and `c` comments are skipped.
pub fn parse_literal_list(text: &str) -> Result<CnfFormula, QueryFileError> {
    let mut f = CnfFormula::new(0);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let value: i32 = line
            .parse()
            .ok()
            .filter(|&v: &i32| v != 0 && v.unsigned_abs() <= MAX_VAR)
            .ok_or_else(|| QueryFileError::InvalidLine {
                line: i + 1,
                text: line.to_string(),
            })?;
        f.push(Clause::unit(Literal::from_dimacs(value)));
    }
    Ok(f)
}

/// Accepts either DIMACS CNF (detected by a `p cnf` header) or a literal list.
pub fn parse_query(text: &str) -> Result<CnfFormula, QueryFileError> {
    let is_dimacs = text
        .lines()
        .map(str::trim)
        .any(|l| l.starts_with("p "));
    if is_dimacs {
        Ok(parse_dimacs(text)?)
    } else {
        parse_literal_list(text)
    }
}

pub fn write_literal_list(lits: &[Literal]) -> String {
    lits.iter().map(|l| format!("{l}\n")).collect()
}

/// Ids of `kb_a` clauses that also occur in `kb_h` (hard) and the rest (soft).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KbPartition {
    pub hard: Vec<ClauseId>,
    pub soft: Vec<ClauseId>,
}

/// Syntactic intersection over normalized clauses.
pub fn intersect_kbs(kb_a: &CnfFormula, kb_h: &CnfFormula) -> KbPartition {
    let (hard, soft) = kb_a.ids().partition(|&id| kb_h.contains(kb_a.clause(id)));
    KbPartition { hard, soft }
}

/// Clausal encoding of `¬φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryNegation {
    pub clauses: Vec<Clause>,
    pub aux_vars: Range<u32>,
    pub single_clause: bool,
}

impl QueryNegation {
    /// First variable index not used by the encoding.
    pub fn next_free_var(&self) -> u32 {
        self.aux_vars.end
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NegationError {
    #[error("query is empty")]
    EmptyQuery,
    #[error("query contains the empty clause, so its negation is valid")]
    EmptyClauseInQuery,
    #[error("query contains complementary unit literals on variable {0}; it is unsatisfiable")]
    ContradictoryUnits(u32),
    #[error("next free variable {next_free} collides with query variable {max_var}")]
    VariableCollision { next_free: u32, max_var: u32 },
}

/// Negate a CNF query.
///
/// A conjunction of unit literals negates to one clause. Otherwise each query
/// clause `D_i` gets a fresh selector `s_i` with `s_i → ¬l` for every `l ∈ D_i`,
/// and `s_1 ∨ … ∨ s_k` requires some clause to be falsified.
pub fn negate_query(query: &CnfFormula, next_free_var: u32) -> Result<QueryNegation, NegationError> {
    if query.is_empty() {
        return Err(NegationError::EmptyQuery);
    }
    if query.has_empty_clause() {
        return Err(NegationError::EmptyClauseInQuery);
    }
    let max_var = query.clauses().iter().map(Clause::max_var).max().unwrap_or(0);
    let next_free_var = next_free_var.max(1);
    if next_free_var <= max_var {
        return Err(NegationError::VariableCollision {
            next_free: next_free_var,
            max_var,
        });
    }
    if query.clauses().iter().all(Clause::is_unit) {
        let negated = query.clauses().iter().map(|c| !c.lits()[0]);
        return match Clause::normalize(negated) {
            Normalized::Clause(c) => Ok(QueryNegation {
                clauses: vec![c],
                aux_vars: next_free_var..next_free_var,
                single_clause: true,
            }),
            Normalized::Tautology => {
                let var = contradictory_var(query);
                Err(NegationError::ContradictoryUnits(var))
            }
        };
    }
    let k = query.len() as u32;
    let aux = next_free_var..next_free_var + k;
    let mut clauses = Vec::new();
    for (i, d) in query.clauses().iter().enumerate() {
        let s = Literal::pos(aux.start + i as u32);
        for &l in d.lits() {
            clauses.push(Clause::new([!s, !l]));
        }
    }
    clauses.push(Clause::new(aux.clone().map(Literal::pos)));
    Ok(QueryNegation {
        clauses,
        aux_vars: aux,
        single_clause: false,
    })
}

fn contradictory_var(query: &CnfFormula) -> u32 {
    let mut seen = HashMap::new();
    for c in query.clauses() {
        let l = c.lits()[0];
        if let Some(&p) = seen.get(&l.var()) {
            if p != l.is_positive() {
                return l.var();
            }
        }
        seen.insert(l.var(), l.is_positive());
    }
    0
}

/// Largest variable over several clause collections.
pub fn max_var<'a>(clauses: impl IntoIterator<Item = &'a Clause>) -> u32 {
    clauses.into_iter().map(Clause::max_var).max().unwrap_or(0)
}

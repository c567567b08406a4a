use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Propositional literal over a 1-based variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: u32,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: u32) -> Self {
        Literal { var, positive: false }
    }

    pub fn negate(self) -> Self {
        Literal { var: self.var, positive: !self.positive }
    }

    pub fn from_dimacs(x: i64) -> Result<Self> {
        if x == 0 || x.unsigned_abs() > u32::MAX as u64 {
            return Err(Error::Parse(format!("bad literal {x}")));
        }
        Ok(Literal { var: x.unsigned_abs() as u32, positive: x > 0 })
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Clause as a set of literals, kept sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause(Vec<Literal>);

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Self {
        let mut v: Vec<Literal> = lits.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Clause(v)
    }

    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    pub fn from_dimacs(xs: &[i64]) -> Result<Self> {
        Ok(Clause::new(xs.iter().map(|&x| Literal::from_dimacs(x)).collect::<Result<Vec<_>>>()?))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, l: Literal) -> bool {
        self.0.binary_search(&l).is_ok()
    }

    pub fn is_tautology(&self) -> bool {
        self.0.windows(2).any(|w| w[0].var == w[1].var)
    }

    pub fn positives(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().filter(|l| l.positive).map(|l| l.var)
    }

    pub fn negatives(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().filter(|l| !l.positive).map(|l| l.var)
    }

    pub fn is_horn(&self) -> bool {
        self.positives().count() <= 1
    }

    pub fn max_var(&self) -> u32 {
        self.0.iter().map(|l| l.var).max().unwrap_or(0)
    }

    /// Resolvent on `pivot` (which must occur in `self`, its negation in `other`).
    pub fn resolve(&self, other: &Clause, pivot: Literal) -> Clause {
        Clause::new(
            self.0.iter().copied().filter(|&l| l != pivot).chain(other.0.iter().copied().filter(|&l| l != pivot.negate())),
        )
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.0.iter().any(|l| assignment[l.var as usize - 1] == l.positive)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l} ")?;
        }
        write!(f, "0")
    }
}

/// CNF formula with set semantics: duplicate clauses are dropped on insertion.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CnfFormula {
    pub num_vars: u32,
    clauses: Vec<Clause>,
    seen: BTreeSet<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: u32) -> Self {
        CnfFormula { num_vars, ..Default::default() }
    }

    pub fn from_clauses(num_vars: u32, clauses: impl IntoIterator<Item = Clause>) -> Self {
        let mut f = CnfFormula::new(num_vars);
        for c in clauses {
            f.add(c);
        }
        f
    }

    /// Adds a clause, growing `num_vars` if needed. Returns false for duplicates.
    pub fn add(&mut self, c: Clause) -> bool {
        self.num_vars = self.num_vars.max(c.max_var());
        if self.seen.insert(c.clone()) {
            self.clauses.push(c);
            true
        } else {
            false
        }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn max_width(&self) -> usize {
        self.clauses.iter().map(Clause::width).max().unwrap_or(0)
    }

    pub fn is_horn(&self) -> bool {
        self.clauses.iter().all(Clause::is_horn)
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.satisfied_by(assignment))
    }

    /// Every literal negated. Maps dual-Horn formulas to Horn formulas and
    /// preserves satisfiability.
    pub fn flip_polarity(&self) -> CnfFormula {
        CnfFormula::from_clauses(
            self.num_vars,
            self.clauses.iter().map(|c| Clause::new(c.literals().iter().map(|l| l.negate()))),
        )
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses DIMACS CNF. Comment lines start with `c`; clauses may span lines.
    pub fn from_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(u32, usize)> = None;
        let mut f = CnfFormula::new(0);
        let mut cur: Vec<i64> = Vec::new();
        let mut count = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" || header.is_some() {
                    return Err(Error::Parse(format!("line {}: bad header {line:?}", lineno + 1)));
                }
                let v = parts[2].parse().map_err(|_| Error::Parse(format!("bad variable count {:?}", parts[2])))?;
                let c = parts[3].parse().map_err(|_| Error::Parse(format!("bad clause count {:?}", parts[3])))?;
                header = Some((v, c));
                f.num_vars = v;
                continue;
            }
            if header.is_none() {
                return Err(Error::Parse(format!("line {}: clause before header", lineno + 1)));
            }
            for tok in line.split_whitespace() {
                let x: i64 = tok.parse().map_err(|_| Error::Parse(format!("line {}: bad token {tok:?}", lineno + 1)))?;
                if x == 0 {
                    f.add(Clause::from_dimacs(&cur)?);
                    cur.clear();
                    count += 1;
                } else {
                    cur.push(x);
                }
            }
        }
        if !cur.is_empty() {
            f.add(Clause::from_dimacs(&cur)?);
            count += 1;
        }
        let (v, c) = header.ok_or_else(|| Error::Parse("missing `p cnf` header".into()))?;
        if f.num_vars > v {
            return Err(Error::Parse(format!("literal exceeds declared variable count {v}")));
        }
        if count != c {
            log::warn!("header declares {c} clauses, found {count}");
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        let text = "c demo\np cnf 3 2\n1 -2 0\n2 3\n-1 0\n";
        let f = CnfFormula::from_dimacs(text).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.clauses()[1], Clause::from_dimacs(&[2, 3, -1]).unwrap());
        assert_eq!(CnfFormula::from_dimacs(&f.to_dimacs()).unwrap(), f);
    }

    #[test]
    fn rejects_bad_dimacs() {
        assert!(CnfFormula::from_dimacs("1 2 0\n").is_err());
        assert!(CnfFormula::from_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(CnfFormula::from_dimacs("p cnf 2 1\n1 x 0\n").is_err());
    }

    #[test]
    fn clause_set_semantics() {
        let c = Clause::from_dimacs(&[2, 1, 2]).unwrap();
        assert_eq!(c.width(), 2);
        assert!(Clause::from_dimacs(&[1, -1]).unwrap().is_tautology());
        let mut f = CnfFormula::new(2);
        assert!(f.add(c.clone()));
        assert!(!f.add(Clause::from_dimacs(&[1, 2]).unwrap()));
    }
}

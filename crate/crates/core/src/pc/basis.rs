use std::collections::BTreeMap;

use super::poly::{Monomial, Polynomial};
use crate::algebra::Field;
use crate::error::{Error, Result};

/// Saturated degree-`k` span, stored as a set of derived monomials `D` plus
/// echelon vectors over the remaining monomials.
///
/// The span is `span(vectors) + span(up(D))`, where `up(D)` is every monomial
/// of degree at most `k` divisible by some element of `D`. The vectors are in
/// reduced row echelon form under graded-lex order, mention no monomial of
/// `up(D)`, and have pairwise distinct leading monomials.
#[derive(Clone, Debug)]
pub struct Basis {
    field: Field,
    k: usize,
    num_vars: u32,
    vectors: Vec<Polynomial>,
    derived: Vec<Monomial>,
    pivots: BTreeMap<Monomial, usize>,
}

impl Basis {
    pub(crate) fn new(field: Field, k: usize, num_vars: u32, vectors: Vec<Polynomial>, derived: Vec<Monomial>) -> Self {
        let pivots = vectors.iter().enumerate().map(|(i, v)| (v.leading().unwrap().0.clone(), i)).collect();
        Basis { field, k, num_vars, vectors, derived, pivots }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Echelon vectors outside `up(D)`, by increasing leading monomial.
    pub fn vectors(&self) -> &[Polynomial] {
        &self.vectors
    }

    /// Minimal derived monomials.
    pub fn derived_monomials(&self) -> &[Monomial] {
        &self.derived
    }

    pub fn contains_one(&self) -> bool {
        self.derived.iter().any(Monomial::is_one)
    }

    pub fn is_derived(&self, m: &Monomial) -> bool {
        m.degree() <= self.k && self.derived.iter().any(|d| d.is_subset_of(m))
    }

    /// Remainder of `p` modulo the span; zero iff `p` lies in it.
    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        let mut r = Polynomial::from_terms(
            p.field(),
            p.terms().filter(|(m, _)| !self.is_derived(m)).map(|(m, c)| (c.clone(), m.clone())),
        );
        loop {
            let hit = r.terms().rev().find(|(m, _)| self.pivots.contains_key(*m)).map(|(m, c)| (m.clone(), c.clone()));
            let Some((m, c)) = hit else { return r };
            let v = &self.vectors[self.pivots[&m]];
            r = r.sub(&v.scale(&c));
        }
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        if p.degree().is_some_and(|d| d > self.k) {
            return false;
        }
        self.reduce(p).is_zero()
    }

    /// Dimension of the span, found by enumerating `up(D)`. Intended for
    /// small instances only.
    pub fn dimension(&self) -> Result<usize> {
        Ok(self.vectors.len() + self.expand_derived()?.len())
    }

    /// Every monomial of `up(D)` of degree at most `k`. Fails when the
    /// enumeration would exceed a million monomials.
    pub fn expand_derived(&self) -> Result<Vec<Monomial>> {
        let mut out = Vec::new();
        let mut level = vec![Monomial::one()];
        for d in 0..=self.k {
            for m in &level {
                if self.is_derived(m) {
                    out.push(m.clone());
                }
            }
            if d == self.k {
                break;
            }
            let mut next = Vec::new();
            for m in &level {
                let start = m.vars().last().map_or(0, |&x| x + 1);
                for x in start..self.num_vars {
                    next.push(m.mul(&Monomial::var(x)));
                }
            }
            if next.len() > 1_000_000 {
                return Err(Error::Unsupported("span too large to enumerate".into()));
            }
            level = next;
        }
        Ok(out)
    }

    /// The span as a plain list of polynomials: every derived monomial plus
    /// the echelon vectors.
    pub fn expand(&self) -> Result<Vec<Polynomial>> {
        let one = self.field.one();
        let mut out: Vec<Polynomial> =
            self.expand_derived()?.into_iter().map(|m| Polynomial::monomial(self.field, one.clone(), m)).collect();
        out.extend(self.vectors.iter().cloned());
        Ok(out)
    }

    /// Whether every element of `self`'s span lies in `other`'s span.
    pub fn is_subspace_of(&self, other: &Basis) -> bool {
        // D is closed upward in both spans, so its minimal elements suffice.
        self.derived.iter().all(|m| other.contains(&Polynomial::monomial(self.field, self.field.one(), m.clone())))
            && self.vectors.iter().all(|v| other.contains(v))
    }
}

//! Degree-bounded saturation shared by the monomial-PC and PC engines.
//!
//! The span is kept as `span(rows) + span(up(D))`, where `D` is a set of
//! minimal monomials already known to lie in the span and `up(D)` is every
//! monomial of degree at most `k` divisible by one of them. Both calculi
//! close monomials of degree below `k` under multiplication by variables, so
//! `up(D)` is always inside the span. Rows are reduced modulo `up(D)` (dead
//! monomials are simply dropped) and kept in echelon form under graded-lex
//! order, with leading term first. A monomial lies in the span exactly when
//! the reduced echelon form has a row consisting of that monomial alone.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::time::Instant;

use super::arith::Arith;
use super::basis::Basis;
use super::poly::{Monomial, Polynomial};
use crate::algebra::{compress_image, gauss_solve, Matrix, Vector};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

pub(crate) type Row<C> = Vec<(u32, C)>;

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct SaturationStats {
    /// Outer rounds (monomial extraction passes, plus lifting rounds for PC).
    pub rounds: usize,
    /// Lifted polynomials handed to the echelon basis.
    pub lifts: usize,
    /// Rows of the final echelon basis outside the derived monomials.
    pub live_rows: usize,
    /// Minimal derived monomials.
    pub derived_generators: usize,
    /// Distinct monomials ever indexed.
    pub columns: usize,
    /// Largest number of stored row entries seen.
    pub peak_entries: usize,
}

pub(crate) struct Engine<A: Arith> {
    ar: A,
    k: usize,
    num_vars: u32,
    mons: Vec<Monomial>,
    index: HashMap<Monomial, u32>,
    dead: Vec<bool>,
    pivot_of: Vec<u32>,
    rows: Vec<Option<Row<A::C>>>,
    free: Vec<usize>,
    gens: HashSet<Monomial>,
    refuted: bool,
    deadline: Option<Instant>,
    max_columns: Option<usize>,
    max_entries: Option<usize>,
    entries: usize,
    ticks: u64,
    stats: SaturationStats,
}

impl<A: Arith> Engine<A> {
    pub fn new(ar: A, k: usize, num_vars: u32, deadline: Option<Instant>, limits: (Option<usize>, Option<usize>)) -> Self {
        Engine {
            ar,
            k,
            num_vars,
            mons: Vec::new(),
            index: HashMap::new(),
            dead: Vec::new(),
            pivot_of: Vec::new(),
            rows: Vec::new(),
            free: Vec::new(),
            gens: HashSet::new(),
            refuted: false,
            deadline,
            max_columns: limits.0,
            max_entries: limits.1,
            entries: 0,
            ticks: 0,
            stats: SaturationStats::default(),
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.ticks += 1;
        if self.ticks % 512 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    return Err(Error::Timeout);
                }
            }
            if let Some(m) = self.max_columns {
                if self.mons.len() > m {
                    return Err(Error::ResourceLimit(format!("more than {m} monomial columns")));
                }
            }
            if let Some(m) = self.max_entries {
                if self.entries > m {
                    return Err(Error::ResourceLimit(format!("more than {m} stored row entries")));
                }
            }
        }
        Ok(())
    }

    fn is_dead_mono(&self, m: &Monomial) -> bool {
        !self.gens.is_empty() && m.subsets().any(|s| self.gens.contains(&s))
    }

    /// Column of a live monomial, or `None` if it is dead.
    fn col(&mut self, m: &Monomial) -> Option<u32> {
        if let Some(&c) = self.index.get(m) {
            return (!self.dead[c as usize]).then_some(c);
        }
        if self.is_dead_mono(m) {
            return None;
        }
        let c = self.mons.len() as u32;
        self.mons.push(m.clone());
        self.index.insert(m.clone(), c);
        self.dead.push(false);
        self.pivot_of.push(NONE);
        Some(c)
    }

    fn cmp(&self, a: u32, b: u32) -> Ordering {
        self.mons[a as usize].cmp(&self.mons[b as usize])
    }

    fn row_from_terms(&mut self, terms: impl IntoIterator<Item = (Monomial, A::C)>) -> Row<A::C> {
        let mut row: Row<A::C> = Vec::new();
        for (m, c) in terms {
            if self.ar.is_zero(&c) {
                continue;
            }
            if let Some(col) = self.col(&m) {
                row.push((col, c));
            }
        }
        row.sort_by(|a, b| self.cmp(b.0, a.0));
        row
    }

    pub fn row_from_poly(&mut self, p: &Polynomial) -> Row<A::C> {
        let ar = self.ar.clone();
        self.row_from_terms(p.terms().map(|(m, c)| (m.clone(), ar.from_scalar(c))))
    }

    /// `dst + c * src`, both sorted with the largest monomial first.
    fn axpy(&self, dst: &Row<A::C>, c: &A::C, src: &Row<A::C>) -> Row<A::C> {
        let mut out = Vec::with_capacity(dst.len() + src.len());
        let (mut i, mut j) = (0, 0);
        while i < dst.len() && j < src.len() {
            match self.cmp(dst[i].0, src[j].0) {
                Ordering::Greater => {
                    out.push(dst[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((src[j].0, self.ar.mul(c, &src[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let x = self.ar.add(&dst[i].1, &self.ar.mul(c, &src[j].1));
                    if !self.ar.is_zero(&x) {
                        out.push((dst[i].0, x));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&dst[i..]);
        out.extend(src[j..].iter().map(|(col, x)| (*col, self.ar.mul(c, x))));
        out
    }

    /// Reduces the leading term until it is not a pivot, then adds the row.
    /// Returns whether the span grew.
    pub fn insert(&mut self, mut r: Row<A::C>) -> Result<bool> {
        self.tick()?;
        loop {
            let Some((lead, c)) = r.first() else { return Ok(false) };
            let s = self.pivot_of[*lead as usize];
            if s == NONE {
                break;
            }
            let coef = self.ar.neg(c);
            r = self.axpy(&r, &coef, self.rows[s as usize].as_ref().expect("pivot row"));
        }
        let inv = self.ar.inv(&r[0].1);
        if r[0].1 != self.ar.one() {
            for e in r.iter_mut() {
                e.1 = self.ar.mul(&e.1, &inv);
            }
        }
        let lead = r[0].0;
        self.entries += r.len();
        self.stats.peak_entries = self.stats.peak_entries.max(self.entries);
        let slot = match self.free.pop() {
            Some(s) => {
                self.rows[s] = Some(r);
                s
            }
            None => {
                self.rows.push(Some(r));
                self.rows.len() - 1
            }
        };
        self.pivot_of[lead as usize] = slot as u32;
        Ok(true)
    }

    /// Slots ordered by increasing leading monomial.
    fn slots_by_pivot(&self) -> Vec<usize> {
        let mut slots: Vec<usize> = (0..self.rows.len()).filter(|&s| self.rows[s].is_some()).collect();
        slots.sort_by(|&a, &b| self.cmp(self.rows[a].as_ref().unwrap()[0].0, self.rows[b].as_ref().unwrap()[0].0));
        slots
    }

    /// Back-substitution to reduced row echelon form.
    fn rref_pass(&mut self) -> Result<()> {
        for slot in self.slots_by_pivot() {
            self.tick()?;
            let row = self.rows[slot].take().unwrap();
            let old_len = row.len();
            let hits: Vec<(u32, A::C)> = row[1..]
                .iter()
                .filter(|(col, _)| self.pivot_of[*col as usize] != NONE)
                .cloned()
                .collect();
            let mut row = row;
            for (col, c) in hits {
                let src = self.rows[self.pivot_of[col as usize] as usize].as_ref().unwrap();
                row = self.axpy(&row, &self.ar.neg(&c), src);
            }
            self.entries = self.entries + row.len() - old_len;
            self.stats.peak_entries = self.stats.peak_entries.max(self.entries);
            self.rows[slot] = Some(row);
        }
        Ok(())
    }

    fn singletons(&self) -> Vec<Monomial> {
        self.rows
            .iter()
            .flatten()
            .filter(|r| r.len() == 1)
            .map(|r| self.mons[r[0].0 as usize].clone())
            .collect()
    }

    /// Adds monomials to `D` and reduces every row modulo the enlarged
    /// up-closure. Returns whether `D` grew.
    pub fn add_derived(&mut self, mut new: Vec<Monomial>) -> Result<bool> {
        new.sort();
        let mut added: HashSet<Monomial> = HashSet::new();
        for m in new {
            if !self.is_dead_mono(&m) {
                self.gens.insert(m.clone());
                added.insert(m);
            }
        }
        if added.is_empty() {
            return Ok(false);
        }
        if added.contains(&Monomial::one()) {
            self.refuted = true;
            self.gens.retain(|m| m.is_one());
            self.rows.clear();
            self.entries = 0;
            self.free.clear();
            self.dead.iter_mut().for_each(|d| *d = true);
            self.pivot_of.iter_mut().for_each(|p| *p = NONE);
            return Ok(true);
        }
        for c in 0..self.mons.len() {
            if !self.dead[c] && self.mons[c].subsets().any(|s| added.contains(&s)) {
                self.dead[c] = true;
            }
        }
        let mut reinsert = Vec::new();
        for slot in 0..self.rows.len() {
            let Some(row) = self.rows[slot].as_mut() else { continue };
            if !row.iter().any(|(c, _)| self.dead[*c as usize]) {
                continue;
            }
            let lead = row[0].0;
            let before = row.len();
            row.retain(|(c, _)| !self.dead[*c as usize]);
            self.entries -= before - row.len();
            if self.dead[lead as usize] {
                self.pivot_of[lead as usize] = NONE;
                self.entries -= row.len();
                reinsert.push(self.rows[slot].take().unwrap());
                self.free.push(slot);
            }
        }
        for r in reinsert {
            self.insert(r)?;
        }
        Ok(true)
    }

    /// Moves every monomial in the span into `D` until none remain.
    pub fn stabilize(&mut self) -> Result<()> {
        while !self.refuted {
            self.stats.rounds += 1;
            self.rref_pass()?;
            let singles = self.singletons();
            if singles.is_empty() || !self.add_derived(singles)? {
                break;
            }
        }
        Ok(())
    }

    /// Live monomials by degree, up to `max_deg`.
    fn live_monomials(&mut self, max_deg: usize) -> Result<Vec<Vec<Monomial>>> {
        let mut levels: Vec<Vec<Monomial>> = vec![vec![Monomial::one()]];
        for d in 0..max_deg {
            let mut next = Vec::new();
            for m in &levels[d] {
                let start = m.vars().last().map_or(0, |&x| x + 1);
                for x in start..self.num_vars {
                    let mut v: smallvec::SmallVec<[u32; 4]> = m.vars().into();
                    v.push(x);
                    let m2 = Monomial::from_sorted(v);
                    if !self.is_dead_mono(&m2) {
                        next.push(m2);
                    }
                }
            }
            self.tick()?;
            levels.push(next);
        }
        Ok(levels)
    }

    /// Inserts `MultLin(m * p)` for every live monomial `m` keeping the
    /// degree within `k`.
    ///
    /// Writing `m = A * B` with `A` inside the variables of `p` and `B`
    /// disjoint from them, `deg(MultLin(m p)) = |B| + deg(MultLin(A p))`, so
    /// the admissible `B` are exactly those of degree at most
    /// `k - deg(MultLin(A p))`.
    fn lift_axiom(&mut self, p: &Polynomial, live: &[Vec<Monomial>]) -> Result<()> {
        let vp = p.vars();
        let vp_set: HashSet<u32> = vp.iter().copied().collect();
        let mut subsets: Vec<Vec<u32>> = vec![Vec::new()];
        combos(&vp, self.k, &mut Vec::new(), 0, &mut subsets);
        for a in subsets {
            let am = Monomial::from_vars(a.iter().copied());
            if self.is_dead_mono(&am) {
                continue;
            }
            let pa = p.mul_monomial(&am);
            let Some(d) = pa.degree() else { continue };
            if d > self.k {
                continue;
            }
            let ar = self.ar.clone();
            let pa_terms: Vec<(Monomial, A::C)> = pa.terms().map(|(m, c)| (m.clone(), ar.from_scalar(c))).collect();
            for level in live.iter().take(self.k - d + 1) {
                for b in level {
                    if b.vars().iter().any(|x| vp_set.contains(x)) {
                        continue;
                    }
                    if !a.is_empty() && self.is_dead_mono(&am.mul(b)) {
                        continue;
                    }
                    let terms: Vec<(Monomial, A::C)> = pa_terms.iter().map(|(m, c)| (m.mul(b), c.clone())).collect();
                    let row = self.row_from_terms(terms);
                    self.stats.lifts += 1;
                    self.insert(row)?;
                }
            }
        }
        Ok(())
    }

    /// Initial phase shared by both calculi: monomial axioms go straight to
    /// `D`, every other axiom is lifted to degree `k`.
    pub fn init(&mut self, axioms: &[Polynomial]) -> Result<()> {
        let monos: Vec<Monomial> =
            axioms.iter().filter(|p| p.num_terms() == 1).map(|p| p.leading().unwrap().0.clone()).collect();
        self.add_derived(monos)?;
        if self.refuted {
            return Ok(());
        }
        let rest: Vec<&Polynomial> = axioms.iter().filter(|p| p.num_terms() > 1).collect();
        if rest.is_empty() {
            return Ok(());
        }
        let live = self.live_monomials(self.k.saturating_sub(1))?;
        for p in rest {
            self.lift_axiom(p, &live)?;
        }
        Ok(())
    }

    /// Seeds the engine with an already saturated basis.
    pub fn seed(&mut self, basis: &Basis) -> Result<()> {
        self.add_derived(basis.derived_monomials().to_vec())?;
        for v in basis.vectors() {
            let r = self.row_from_poly(v);
            self.insert(r)?;
        }
        Ok(())
    }

    fn row_hash(row: &Row<A::C>) -> u64 {
        let mut h = DefaultHasher::new();
        row.hash(&mut h);
        h.finish()
    }

    /// Rows whose leading monomial has degree below `k`; in reduced echelon
    /// form these span `{p in span(rows) : deg p < k}`.
    fn subdegree_rows(&self) -> Vec<Row<A::C>> {
        self.rows
            .iter()
            .flatten()
            .filter(|r| self.mons[r[0].0 as usize].degree() < self.k)
            .cloned()
            .collect()
    }

    /// Generators of the sub-degree space via the linear system
    /// `M x - p = 0, p(m) = 0 for deg m = k`, projected to `p` and compressed
    /// with `N N^T`.
    fn subdegree_rows_gram(&mut self) -> Result<Vec<Row<A::C>>> {
        let rows: Vec<Row<A::C>> = self.rows.iter().flatten().cloned().collect();
        let mut cols: Vec<u32> = rows.iter().flat_map(|r| r.iter().map(|e| e.0)).collect();
        cols.sort_unstable();
        cols.dedup();
        let pos: HashMap<u32, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let f = self.ar.field();
        let (nr, nc) = (rows.len(), cols.len());
        let top: Vec<usize> = (0..nc).filter(|&i| self.mons[cols[i] as usize].degree() == self.k).collect();
        // unknowns: x (0..nr), p (nr..nr+nc)
        let mut sys = Matrix::zeros(f, nc + top.len(), nr + nc);
        for (j, r) in rows.iter().enumerate() {
            for (col, c) in r {
                sys.set(pos[col], j, self.ar.to_scalar(c));
            }
        }
        for i in 0..nc {
            sys.set(i, nr + i, -f.one());
        }
        for (t, &i) in top.iter().enumerate() {
            sys.set(nc + t, nr + i, f.one());
        }
        let sol = gauss_solve(&sys, &Vector::zeros(f, nc + top.len()))?.expect("homogeneous system");
        if sol.kernel.is_empty() {
            return Ok(Vec::new());
        }
        let ps: Vec<Vector> = sol
            .kernel
            .iter()
            .map(|v| Vector::from_scalars(f, (0..nc).map(|i| v.get(nr + i)).collect()))
            .collect();
        let n = Matrix::from_columns(f, nc, &ps);
        let g = compress_image(&n)?;
        let mut out = Vec::new();
        for col in g.columns() {
            if col.is_zero() {
                continue;
            }
            let terms: Vec<(Monomial, A::C)> =
                col.nonzeros().map(|(i, x)| (self.mons[cols[i] as usize].clone(), self.ar.from_scalar(x))).collect();
            out.push(self.row_from_terms(terms));
        }
        Ok(out)
    }

    fn lift_by_variables(&mut self, row: &Row<A::C>) -> Result<bool> {
        let terms: Vec<(Monomial, A::C)> = row.iter().map(|(c, x)| (self.mons[*c as usize].clone(), x.clone())).collect();
        let mut grew = false;
        for x in 0..self.num_vars {
            let xm = Monomial::var(x);
            let mut lifted: HashMap<Monomial, A::C> = HashMap::new();
            for (m, c) in &terms {
                let e = lifted.entry(m.mul(&xm)).or_insert_with(|| self.ar.zero());
                *e = self.ar.add(e, c);
            }
            let r = self.row_from_terms(lifted);
            self.stats.lifts += 1;
            grew |= self.insert(r)?;
        }
        Ok(grew)
    }

    /// Full PC closure: lift the sub-degree space by every variable until the
    /// span is stable.
    pub fn pc_loop(&mut self, gram: bool) -> Result<()> {
        let mut lifted: HashSet<u64> = HashSet::new();
        loop {
            self.stabilize()?;
            if self.refuted {
                return Ok(());
            }
            let gens = if gram { self.subdegree_rows_gram()? } else { self.subdegree_rows() };
            let mut grew = false;
            for g in gens {
                if !gram && !lifted.insert(Self::row_hash(&g)) {
                    continue;
                }
                grew |= self.lift_by_variables(&g)?;
            }
            if !grew {
                return Ok(());
            }
        }
    }

    pub fn finish(mut self) -> (bool, Basis, SaturationStats) {
        let mut vectors = Vec::new();
        for slot in self.slots_by_pivot() {
            let row = self.rows[slot].as_ref().unwrap();
            vectors.push(Polynomial::from_terms(
                self.ar.field(),
                row.iter().map(|(c, x)| (self.ar.to_scalar(x), self.mons[*c as usize].clone())),
            ));
        }
        let mut derived: Vec<Monomial> = self.gens.iter().cloned().collect();
        derived.sort();
        self.stats.live_rows = vectors.len();
        self.stats.derived_generators = derived.len();
        self.stats.columns = self.mons.len();
        let basis = Basis::new(self.ar.field(), self.k, self.num_vars, vectors, derived);
        (self.refuted, basis, self.stats)
    }
}

/// Non-empty subsets of `pool` of size at most `max`, in lexicographic order.
fn combos(pool: &[u32], max: usize, cur: &mut Vec<u32>, start: usize, out: &mut Vec<Vec<u32>>) {
    if cur.len() == max {
        return;
    }
    for i in start..pool.len() {
        cur.push(pool[i]);
        out.push(cur.clone());
        combos(pool, max, cur, i + 1, out);
        cur.pop();
    }
}

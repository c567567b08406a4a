#![allow(dead_code)]
//! Independent oracles and random generators shared by the integration tests.

pub mod lfp;

use std::collections::{BTreeMap, BTreeSet};

use prooflab::algebra::{rank, Field, Matrix, Scalar};
use prooflab::pc::{Monomial, PolySystem, Polynomial};
use prooflab::resolution::{Clause, CnfFormula, Literal};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- CNF ----

pub fn brute_force_sat(f: &CnfFormula) -> bool {
    let n = f.num_vars as usize;
    assert!(n <= 22, "too many variables for brute force");
    let mut a = vec![false; n];
    for mask in 0u64..(1 << n) {
        for (i, x) in a.iter_mut().enumerate() {
            *x = mask >> i & 1 == 1;
        }
        if f.satisfied_by(&a) {
            return true;
        }
    }
    false
}

/// Plain DPLL with unit propagation, for formulas too big to enumerate.
pub fn dpll_sat(f: &CnfFormula) -> bool {
    fn go(clauses: &[Vec<i64>]) -> bool {
        if clauses.is_empty() {
            return true;
        }
        if clauses.iter().any(|c| c.is_empty()) {
            return false;
        }
        let lit = clauses.iter().find(|c| c.len() == 1).map(|c| c[0]).unwrap_or(clauses[0][0]);
        let unit = clauses.iter().any(|c| c.len() == 1);
        let assign = |l: i64| -> Vec<Vec<i64>> {
            clauses
                .iter()
                .filter(|c| !c.contains(&l))
                .map(|c| c.iter().copied().filter(|&x| x != -l).collect())
                .collect()
        };
        if go(&assign(lit)) {
            return true;
        }
        !unit && go(&assign(-lit))
    }
    let cs: Vec<Vec<i64>> = f.clauses().iter().map(|c| c.literals().iter().map(|l| l.to_dimacs()).collect()).collect();
    go(&cs)
}

pub fn random_clause(r: &mut ChaCha8Rng, n: u32, width: usize) -> Clause {
    Clause::new((0..width).map(|_| Literal { var: r.gen_range(1..=n), positive: r.gen_bool(0.5) }))
}

pub fn random_horn(r: &mut ChaCha8Rng, n: u32, m: usize) -> CnfFormula {
    let mut f = CnfFormula::new(n);
    for _ in 0..m {
        let w = r.gen_range(1..=3);
        let mut lits: Vec<Literal> = (0..w).map(|_| Literal::neg(r.gen_range(1..=n))).collect();
        if r.gen_bool(0.7) {
            lits[0] = Literal::pos(r.gen_range(1..=n));
        }
        let c = Clause::new(lits);
        if c.is_horn() {
            f.add(c);
        }
    }
    f
}

// ------------------------------------------------------- polynomials ----

pub fn brute_force_poly_sat(s: &PolySystem) -> bool {
    let n = s.num_vars as usize;
    assert!(n <= 20);
    let mut a = vec![false; n];
    for mask in 0u64..(1 << n) {
        for (i, x) in a.iter_mut().enumerate() {
            *x = mask >> i & 1 == 1;
        }
        if s.satisfied_by(&a) {
            return true;
        }
    }
    false
}

pub fn random_system(r: &mut ChaCha8Rng, field: Field, n: u32, m: usize, max_deg: usize) -> PolySystem {
    let mut s = PolySystem::new(field, n);
    for _ in 0..m {
        let terms = r.gen_range(1..=3);
        let mut p = Polynomial::zero(field);
        for _ in 0..terms {
            let d = r.gen_range(0..=max_deg);
            let mono = Monomial::from_vars((0..d).map(|_| r.gen_range(0..n)));
            let c = if r.gen_bool(0.5) { 1 } else { -1 };
            p.add_term(mono, field.int(c));
        }
        if !p.is_zero() {
            s.push(p);
        }
    }
    s
}

/// All monomials over `n` variables of degree at most `k`, graded-lex.
pub fn all_monomials(n: u32, k: usize) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut level = vec![Monomial::one()];
    for _ in 0..k {
        let mut next = Vec::new();
        for m in &level {
            let start = m.vars().last().map_or(0, |&x| x + 1);
            for x in start..n {
                next.push(m.mul(&Monomial::var(x)));
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Dense span over the monomials of degree at most `k`, built directly from
/// the textbook closure rules with no derived-monomial bookkeeping.
pub struct DenseSpan {
    pub field: Field,
    pub mons: Vec<Monomial>,
    pub index: BTreeMap<Monomial, usize>,
    pub gens: Vec<Vec<Scalar>>,
}

impl DenseSpan {
    pub fn new(field: Field, n: u32, k: usize) -> Self {
        let mons = all_monomials(n, k);
        let index = mons.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        DenseSpan { field, mons, index, gens: Vec::new() }
    }

    pub fn vector(&self, p: &Polynomial) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.mons.len()];
        for (m, c) in p.terms() {
            v[self.index[m]] = c.clone();
        }
        v
    }

    pub fn rank_of(&self, vs: &[Vec<Scalar>]) -> usize {
        if vs.is_empty() {
            return 0;
        }
        rank(&Matrix::from_rows(self.field, vs.to_vec()).unwrap())
    }

    pub fn dim(&self) -> usize {
        self.rank_of(&self.gens)
    }

    pub fn contains_vec(&self, v: &[Scalar]) -> bool {
        let mut with = self.gens.clone();
        with.push(v.to_vec());
        self.rank_of(&with) == self.dim()
    }

    pub fn add(&mut self, p: &Polynomial) -> bool {
        let v = self.vector(p);
        if v.iter().all(Scalar::is_zero) || self.contains_vec(&v) {
            return false;
        }
        self.gens.push(v);
        true
    }

    pub fn to_poly(&self, v: &[Scalar]) -> Polynomial {
        Polynomial::from_terms(self.field, v.iter().enumerate().map(|(i, c)| (c.clone(), self.mons[i].clone())))
    }
}

fn init_lifts(s: &PolySystem, k: usize) -> DenseSpan {
    let mut span = DenseSpan::new(s.field, s.num_vars, k);
    let mons = span.mons.clone();
    for p in &s.axioms {
        for m in &mons {
            let q = p.mul_monomial(m);
            if q.degree().is_some_and(|d| d <= k) {
                span.add(&q);
            }
        }
    }
    span
}

/// Literal monomial-PC closure.
pub fn naive_monpc(s: &PolySystem, k: usize) -> DenseSpan {
    let mut span = init_lifts(s, k);
    loop {
        let mut grew = false;
        for m in span.mons.clone() {
            if m.degree() >= k {
                continue;
            }
            let p = Polynomial::monomial(s.field, s.field.one(), m.clone());
            if !span.contains_vec(&span.vector(&p)) {
                continue;
            }
            for x in 0..s.num_vars {
                grew |= span.add(&p.mul_monomial(&Monomial::var(x)));
            }
        }
        if !grew {
            return span;
        }
    }
}

/// Literal PC closure: lift a basis of the sub-degree space every round.
pub fn naive_pc(s: &PolySystem, k: usize) -> DenseSpan {
    let mut span = init_lifts(s, k);
    loop {
        let low = sub_degree_basis(&span, k);
        let mut grew = false;
        for p in low {
            for x in 0..s.num_vars {
                grew |= span.add(&p.mul_monomial(&Monomial::var(x)));
            }
        }
        if !grew {
            return span;
        }
    }
}

fn sub_degree_basis(span: &DenseSpan, k: usize) -> Vec<Polynomial> {
    // combinations sum_i x_i g_i with no degree-k coefficient
    let f = span.field;
    let g = &span.gens;
    if g.is_empty() {
        return Vec::new();
    }
    let top: Vec<usize> = (0..span.mons.len()).filter(|&i| span.mons[i].degree() == k).collect();
    let rows: Vec<Vec<Scalar>> = top.iter().map(|&i| g.iter().map(|v| v[i].clone()).collect()).collect();
    let m = if rows.is_empty() {
        Matrix::zeros(f, 0, g.len())
    } else {
        Matrix::from_rows(f, rows).unwrap()
    };
    let sol = prooflab::algebra::gauss_solve(&m, &prooflab::algebra::Vector::zeros(f, m.nrows())).unwrap().unwrap();
    sol.kernel
        .iter()
        .map(|x| {
            let mut v = vec![f.zero(); span.mons.len()];
            for (j, gj) in g.iter().enumerate() {
                let c = x.get(j);
                if c.is_zero() {
                    continue;
                }
                for i in 0..v.len() {
                    v[i] = &v[i] + &(&c * &gj[i]);
                }
            }
            span.to_poly(&v)
        })
        .collect()
}

// -------------------------------------------------------------- graphs ----

/// Isomorphism of small simple graphs by trying every permutation.
pub fn brute_force_graph_iso(n: usize, g: &BTreeSet<(usize, usize)>, h: &BTreeSet<(usize, usize)>) -> bool {
    if g.len() != h.len() {
        return false;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    fn next_perm(p: &mut [usize]) -> bool {
        let n = p.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && p[i - 1] >= p[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while p[j] <= p[i - 1] {
            j -= 1;
        }
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }
    loop {
        if g.iter().all(|&(a, b)| {
            let (x, y) = (perm[a], perm[b]);
            h.contains(&(x.min(y), x.max(y)))
        }) {
            return true;
        }
        if !next_perm(&mut perm) {
            return false;
        }
    }
}

pub fn random_graph(r: &mut ChaCha8Rng, n: usize, p: f64) -> BTreeSet<(usize, usize)> {
    let mut e = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.gen_bool(p) {
                e.insert((a, b));
            }
        }
    }
    e
}

// --------------------------------------------------------------- games ----

/// Random acyclic game: edges only go from lower to higher ids, so the node
/// order is topological; thresholds are uniform in `0..=outdeg + 1`.
pub fn random_game(r: &mut ChaCha8Rng, n: usize, max_out: usize) -> prooflab::games::ThresholdGame {
    let mut edges = Vec::new();
    let mut theta = Vec::new();
    for v in 0..n {
        let later: Vec<usize> = (v + 1..n).collect();
        let want = r.gen_range(0..=max_out.min(later.len()));
        let mut picks = rand::seq::index::sample(r, later.len(), want).into_vec();
        picks.sort_unstable();
        for i in picks {
            edges.push((v, later[i]));
        }
        theta.push(r.gen_range(0..=want + 1));
    }
    // relabel so the topological order is not the id order
    let mut perm: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), r);
    let edges = edges.into_iter().map(|(a, b)| (perm[a], perm[b])).collect();
    let mut t = vec![0; n];
    for v in 0..n {
        t[perm[v]] = theta[v];
    }
    prooflab::games::ThresholdGame { n, edges, theta: t, start: perm[0] }
}

/// Winner by explicit play: Player 0 wins at `v` iff some choice of at
/// least `theta(v)` successors leaves Player 1 only Player-0 wins.
pub fn game_oracle(g: &prooflab::games::ThresholdGame) -> Vec<bool> {
    let succ = g.successors();
    let mut memo = vec![None; g.n];
    fn win(v: usize, g: &prooflab::games::ThresholdGame, succ: &[Vec<usize>], memo: &mut Vec<Option<bool>>) -> bool {
        if let Some(w) = memo[v] {
            return w;
        }
        let s = &succ[v];
        let mut result = false;
        for mask in 0u32..(1 << s.len()) {
            if (mask.count_ones() as usize) < g.theta[v] {
                continue;
            }
            if (0..s.len()).filter(|i| mask >> i & 1 == 1).all(|i| win(s[i], g, succ, memo)) {
                result = true;
                break;
            }
        }
        memo[v] = Some(result);
        result
    }
    (0..g.n).map(|v| win(v, g, &succ, &mut memo)).collect()
}

/// Isomorphism of colored multi-relation graphs by backtracking over
/// color-preserving injections, checking every relation pair as it goes.
pub fn colored_iso(g: &prooflab::wl::ColoredGraph, h: &prooflab::wl::ColoredGraph) -> bool {
    if g.n != h.n {
        return false;
    }
    let rels: BTreeSet<&String> = g.relations.keys().chain(h.relations.keys()).collect();
    let adj = |x: &prooflab::wl::ColoredGraph, r: &str, a: usize, b: usize| x.has_edge(r, a as u32, b as u32);
    fn go(
        v: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        g: &prooflab::wl::ColoredGraph,
        h: &prooflab::wl::ColoredGraph,
        ok: &dyn Fn(usize, usize, usize, usize) -> bool,
    ) -> bool {
        if v == g.n {
            return true;
        }
        for w in 0..h.n {
            if used[w] || g.colors[v] != h.colors[w] || !ok(v, w, v, w) {
                continue;
            }
            if (0..v).all(|u| ok(u, map[u], v, w)) {
                map[v] = w;
                used[w] = true;
                if go(v + 1, map, used, g, h, ok) {
                    return true;
                }
                used[w] = false;
            }
        }
        false
    }
    let ok = |a: usize, x: usize, b: usize, y: usize| {
        rels.iter().all(|r| adj(g, r, a, b) == adj(h, r, x, y) && adj(g, r, b, a) == adj(h, r, y, x))
    };
    go(0, &mut vec![0; g.n], &mut vec![false; h.n], g, h, &ok)
}

pub fn colored_from_edges(n: usize, e: &BTreeSet<(usize, usize)>, colors: Vec<u32>) -> prooflab::wl::ColoredGraph {
    let edges: Vec<(u32, u32)> = e.iter().map(|&(a, b)| (a as u32, b as u32)).collect();
    let mut g = prooflab::wl::ColoredGraph::undirected(n, &edges).unwrap();
    g.colors = colors;
    g
}

// ------------------------------------------------------------ structures ----

/// Existence of a homomorphism by trying every map.
pub fn brute_force_hom(a: &prooflab::logic::RelStructure, t: &prooflab::logic::RelStructure) -> bool {
    let (n, m) = (a.n as usize, t.n as u64);
    if n == 0 {
        return true;
    }
    if m == 0 {
        return false;
    }
    let total = m.pow(n as u32);
    (0..total).any(|mut code| {
        let mut h = vec![0u32; n];
        for x in h.iter_mut() {
            *x = (code % m) as u32;
            code /= m;
        }
        a.relations.iter().all(|(name, rel)| {
            rel.tuples.iter().all(|tup| {
                let img: Vec<u32> = tup.iter().map(|&x| h[x as usize]).collect();
                t.holds(name, &img)
            })
        })
    })
}

/// Random structure with one binary and one unary relation.
pub fn random_structure(r: &mut ChaCha8Rng, n: u32, density: f64) -> prooflab::logic::RelStructure {
    let mut s = prooflab::logic::RelStructure::new(n);
    s.add_relation("E", 2).unwrap();
    s.add_relation("U", 1).unwrap();
    for a in 0..n {
        if r.gen_bool(density) {
            s.add_tuple("U", &[a]).unwrap();
        }
        for b in 0..n {
            if r.gen_bool(density / 2.0) {
                s.add_tuple("E", &[a, b]).unwrap();
            }
        }
    }
    s
}

pub fn bfs_reachable(n: usize, edges: &[(u32, u32)], s: u32, t: u32) -> bool {
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([s as usize]);
    seen[s as usize] = true;
    while let Some(v) = queue.pop_front() {
        for &(a, b) in edges {
            if a as usize == v && !seen[b as usize] {
                seen[b as usize] = true;
                queue.push_back(b as usize);
            }
        }
    }
    seen[t as usize]
}

/// Satisfiability of a dual-Horn CNF: start from all-true and switch
/// variables off only when a clause forces it.
pub fn dual_horn_sat(f: &CnfFormula) -> bool {
    let mut val = vec![true; f.num_vars as usize + 1];
    loop {
        let mut changed = false;
        for c in f.clauses() {
            if c.literals().iter().any(|l| val[l.var as usize] == l.positive) {
                continue;
            }
            let neg: Vec<u32> = c.negatives().collect();
            assert!(neg.len() <= 1, "not dual-Horn");
            match neg.first() {
                Some(&x) => {
                    val[x as usize] = false;
                    changed = true;
                }
                None => return false,
            }
        }
        if !changed {
            return true;
        }
    }
}

pub fn random_ints(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<i64>> {
    (0..rows).map(|_| (0..cols).map(|_| r.gen_range(-3..=3)).collect()).collect()
}

/// Rank over Q by fraction-free (Bareiss) elimination on integers.
pub fn bareiss_rank(a: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let (rows, cols) = (m.len(), m.first().map_or(0, Vec::len));
    let (mut rank, mut prev) = (0, 1i128);
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                m[i][j] = (m[rank][c] * m[i][j] - m[i][c] * m[rank][j]) / prev;
            }
            m[i][c] = 0;
        }
        prev = m[rank][c];
        rank += 1;
    }
    rank
}

pub fn augmented(a: &[Vec<i64>], b: &[i64]) -> Vec<Vec<i64>> {
    a.iter().zip(b).map(|(r, &x)| r.iter().copied().chain([x]).collect()).collect()
}

//! Cai-Fürer-Immerman structures over ordered 3-regular base graphs.
//!
//! The universe is `E x F_p` for the directed edge set `E`, ordered
//! lexicographically by vertex id. Element `(e, x)` has id `e * p + x`.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::algebra::{gauss_solve, Field, Matrix, Scalar, Vector};
use crate::error::{Error, Result};
use crate::logic::RelStructure;
use crate::wl::ColoredGraph;

/// Connected 3-regular graph; vertex order is id order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CfiBase {
    pub name: String,
    pub n: u32,
    /// Undirected edges `(a, b)` with `a < b`, sorted.
    pub edges: Vec<(u32, u32)>,
}

impl CfiBase {
    pub fn new(name: &str, n: u32, edges: &[(u32, u32)]) -> Result<Self> {
        let mut es: Vec<(u32, u32)> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        es.sort_unstable();
        es.dedup();
        if es.len() != edges.len() {
            return Err(Error::InvalidInput("duplicate edge in base graph".into()));
        }
        let mut deg = vec![0; n as usize];
        for &(a, b) in &es {
            if a == b || b >= n {
                return Err(Error::InvalidInput(format!("bad base edge ({a}, {b})")));
            }
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        if let Some(v) = deg.iter().position(|&d| d != 3) {
            return Err(Error::InvalidInput(format!("base graph is not 3-regular: vertex {v} has degree {}", deg[v])));
        }
        let b = CfiBase { name: name.to_string(), n, edges: es };
        if !b.connected() {
            return Err(Error::InvalidInput("base graph is not connected".into()));
        }
        Ok(b)
    }

    fn connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let nb = self.neighbours();
        let mut seen = vec![false; self.n as usize];
        let mut q = VecDeque::from([0u32]);
        seen[0] = true;
        while let Some(v) = q.pop_front() {
            for &w in &nb[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    q.push_back(w);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// Sorted neighbour lists.
    pub fn neighbours(&self) -> Vec<Vec<u32>> {
        let mut nb = vec![Vec::new(); self.n as usize];
        for &(a, b) in &self.edges {
            nb[a as usize].push(b);
            nb[b as usize].push(a);
        }
        for l in &mut nb {
            l.sort_unstable();
        }
        nb
    }

    /// Directed edges in lexicographic order; `E(v)` is the contiguous block
    /// `3v .. 3v + 3`.
    pub fn directed_edges(&self) -> Vec<(u32, u32)> {
        let nb = self.neighbours();
        (0..self.n).flat_map(|v| nb[v as usize].iter().map(move |&w| (v, w))).collect()
    }

    /// Index of the directed edge `(v, w)`.
    pub fn edge_index(&self, v: u32, w: u32) -> Option<usize> {
        self.directed_edges().binary_search(&(v, w)).ok()
    }

    /// Shipped bases: `k4`, `prism`, `cube`, `petersen`.
    pub fn library(name: &str) -> Result<Self> {
        match name {
            "k4" => CfiBase::new("k4", 4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
            "prism" => CfiBase::new("prism", 6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]),
            "cube" => CfiBase::new(
                "cube",
                8,
                &[(0, 1), (1, 3), (3, 2), (2, 0), (4, 5), (5, 7), (7, 6), (6, 4), (0, 4), (1, 5), (2, 6), (3, 7)],
            ),
            "petersen" => CfiBase::new(
                "petersen",
                10,
                &[
                    (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                    (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
                    (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
                ],
            ),
            _ => Err(Error::InvalidInput(format!("unknown base graph {name:?} (k4, prism, cube, petersen)"))),
        }
    }

    pub const LIBRARY: [&'static str; 4] = ["k4", "prism", "cube", "petersen"];

    /// Text format `n m` followed by `m` lines `u v`.
    pub fn parse_text(name: &str, text: &str) -> Result<Self> {
        let g = ColoredGraph::parse_text(text)?;
        CfiBase::new(name, g.n as u32, &g.edges())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for (a, b) in &self.edges {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }

    /// Base from the library when `spec` names one, else read from a file.
    pub fn load(spec: &str) -> Result<Self> {
        if CfiBase::LIBRARY.contains(&spec) {
            return CfiBase::library(spec);
        }
        let text = std::fs::read_to_string(spec)?;
        CfiBase::parse_text(spec, &text)
    }
}

/// `CFI[base; p; lambda]` with its relations materialised.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfiStructure {
    pub base: CfiBase,
    pub p: u32,
    pub lambda: Vec<u32>,
    /// Directed edges, index = edge class.
    pub edges: Vec<(u32, u32)>,
    /// `((e, x), (e, x + 1))`.
    pub c: Vec<(u32, u32)>,
    /// `((e, x), (e^-1, -x))`, symmetric.
    pub i: Vec<(u32, u32)>,
    /// Per-vertex tuples `((w1, x1), (w2, x2), (w3, x3))` with
    /// `x1 + x2 + x3 = lambda(v)`, grouped by `v`.
    pub r: Vec<[u32; 3]>,
}

fn check_prime(p: u32) -> Result<()> {
    Field::prime(p).map(|_| ())
}

pub fn build_cfi(base: &CfiBase, p: u32, lambda: &[u32]) -> Result<CfiStructure> {
    check_prime(p)?;
    if lambda.len() != base.n as usize {
        return Err(Error::DimensionMismatch(format!("load has {} entries for {} vertices", lambda.len(), base.n)));
    }
    if lambda.iter().any(|&x| x >= p) {
        return Err(Error::InvalidInput(format!("load entries must lie in 0..{p}")));
    }
    let edges = base.directed_edges();
    let idx: BTreeMap<(u32, u32), u32> = edges.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
    let el = |e: u32, x: u32| e * p + x;
    let mut c = Vec::new();
    let mut inv = Vec::new();
    for (e, &(v, w)) in edges.iter().enumerate() {
        let d = idx[&(w, v)];
        for x in 0..p {
            c.push((el(e as u32, x), el(e as u32, (x + 1) % p)));
            inv.push((el(e as u32, x), el(d, (p - x) % p)));
        }
    }
    let mut r = Vec::new();
    for v in 0..base.n {
        let e0 = 3 * v;
        for x1 in 0..p {
            for x2 in 0..p {
                let x3 = (2 * p + lambda[v as usize] - x1 - x2) % p;
                r.push([el(e0, x1), el(e0 + 1, x2), el(e0 + 2, x3)]);
            }
        }
    }
    Ok(CfiStructure { base: base.clone(), p, lambda: lambda.to_vec(), edges, c, i: inv, r })
}

impl CfiStructure {
    pub fn universe_size(&self) -> usize {
        self.edges.len() * self.p as usize
    }

    /// Edge class of an element.
    pub fn class_of(&self, a: u32) -> u32 {
        a / self.p
    }

    pub fn lambda_sum(&self) -> u32 {
        self.lambda.iter().sum::<u32>() % self.p
    }

    /// As a relational structure with relations `LE` (the preorder), `C`,
    /// `I` and `R`.
    pub fn to_rel_structure(&self) -> RelStructure {
        let mut s = RelStructure::new(self.universe_size() as u32);
        for a in 0..s.n {
            for b in 0..s.n {
                if self.class_of(a) <= self.class_of(b) {
                    s.add_tuple("LE", &[a, b]).unwrap();
                }
            }
        }
        for &(a, b) in &self.c {
            s.add_tuple("C", &[a, b]).unwrap();
        }
        for &(a, b) in &self.i {
            s.add_tuple("I", &[a, b]).unwrap();
        }
        for t in &self.r {
            s.add_tuple("R", t).unwrap();
        }
        s
    }

    /// RelStructure JSON wrapped with the construction parameters.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "meta": {"base": self.base.name, "n": self.base.n, "edges": self.base.edges, "p": self.p, "lambda": self.lambda},
            "structure": self.to_rel_structure(),
        })
        .to_string()
    }
}

/// Solution space of (Inv) + (CFI) over `F_p`, indexed by directed edges.
#[derive(Clone, Debug)]
pub struct AutSpace {
    pub p: u32,
    pub basis: Vec<Vec<u32>>,
}

impl AutSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

fn residue(s: &Scalar) -> u32 {
    match s {
        Scalar::Fp { v, .. } => *v,
        Scalar::Q(_) => unreachable!("prime field scalar expected"),
    }
}

/// Rows of (Inv), one per undirected edge, then (CFI), one per vertex.
fn constraint_matrix(base: &CfiBase, p: u32) -> Result<Matrix> {
    let f = Field::prime(p)?;
    let m = 2 * base.edges.len();
    let mut rows = Vec::new();
    for &(a, b) in &base.edges {
        let mut row = vec![f.zero(); m];
        row[base.edge_index(a, b).unwrap()] = f.one();
        row[base.edge_index(b, a).unwrap()] = f.one();
        rows.push(row);
    }
    for v in 0..base.n as usize {
        let mut row = vec![f.zero(); m];
        for e in 3 * v..3 * v + 3 {
            row[e] = f.one();
        }
        rows.push(row);
    }
    Matrix::from_rows(f, rows)
}

pub fn automorphism_space(base: &CfiBase, p: u32) -> Result<AutSpace> {
    let m = constraint_matrix(base, p)?;
    let zero = Vector::zeros(m.field(), m.nrows());
    let sol = gauss_solve(&m, &zero)?.expect("homogeneous systems are solvable");
    let basis: Vec<Vec<u32>> = sol.kernel.iter().map(|k| k.to_vec().iter().map(residue).collect()).collect();
    for b in &basis {
        debug_assert!(satisfies_inv(base, p, b) && shift_load(base, p, b).iter().all(|&x| x == 0));
    }
    Ok(AutSpace { p, basis })
}

fn satisfies_inv(base: &CfiBase, p: u32, pi: &[u32]) -> bool {
    base.edges.iter().all(|&(a, b)| {
        let (x, y) = (pi[base.edge_index(a, b).unwrap()], pi[base.edge_index(b, a).unwrap()]);
        (x + y) % p == 0
    })
}

/// `pi(v) = sum over E(v) of pi(e)`.
fn shift_load(base: &CfiBase, p: u32, pi: &[u32]) -> Vec<u32> {
    (0..base.n as usize).map(|v| pi[3 * v..3 * v + 3].iter().sum::<u32>() % p).collect()
}

/// Applies an (Inv)-vector: the result is `CFI[base; p; lambda + pi]`.
pub fn apply_shift(s: &CfiStructure, pi: &[u32]) -> Result<CfiStructure> {
    if pi.len() != s.edges.len() {
        return Err(Error::DimensionMismatch(format!("shift has {} entries for {} edges", pi.len(), s.edges.len())));
    }
    if pi.iter().any(|&x| x >= s.p) {
        return Err(Error::InvalidInput(format!("shift entries must lie in 0..{}", s.p)));
    }
    if !satisfies_inv(&s.base, s.p, pi) {
        return Err(Error::InvalidInput("shift violates pi(e) + pi(e^-1) = 0".into()));
    }
    let d = shift_load(&s.base, s.p, pi);
    let lambda: Vec<u32> = s.lambda.iter().zip(d).map(|(a, b)| (a + b) % s.p).collect();
    build_cfi(&s.base, s.p, &lambda)
}

/// Isomorphic iff the loads have the same sum mod `p`.
pub fn cfi_isomorphic(a: &CfiStructure, b: &CfiStructure) -> Result<bool> {
    if a.base != b.base || a.p != b.p {
        return Err(Error::InvalidInput("structures over different bases or primes".into()));
    }
    Ok(a.lambda_sum() == b.lambda_sum())
}

/// Untwisted and twisted structure: loads `0` and the unit load on vertex 0.
pub fn twisted_pair(base: &CfiBase, p: u32) -> Result<(CfiStructure, CfiStructure)> {
    let zero = vec![0; base.n as usize];
    let mut one = zero.clone();
    if let Some(x) = one.first_mut() {
        *x = 1;
    }
    Ok((build_cfi(base, p, &zero)?, build_cfi(base, p, &one)?))
}

/// Colored graph: element vertices `0 .. 2mp` colored by edge class, then one
/// inner vertex per R tuple colored `2m + v`. Relations: `R` joins an inner
/// vertex to its three elements (undirected), `C` is the directed cycle on
/// each class and `I` the symmetric inverse pairing.
pub fn to_graph(s: &CfiStructure) -> ColoredGraph {
    let elems = s.universe_size();
    let mut g = ColoredGraph::new(elems + s.r.len());
    let classes = s.edges.len() as u32;
    for a in 0..elems {
        g.colors[a] = s.class_of(a as u32);
    }
    let per_vertex = (s.p * s.p) as usize;
    for (k, t) in s.r.iter().enumerate() {
        let node = (elems + k) as u32;
        g.colors[node as usize] = classes + (k / per_vertex) as u32;
        for &a in t {
            g.add_undirected("R", node, a).unwrap();
        }
    }
    for &(a, b) in &s.c {
        g.add_edge("C", a, b).unwrap();
    }
    for &(a, b) in &s.i {
        g.add_edge("I", a, b).unwrap();
    }
    g
}

/// Element orbits under the automorphisms spanned by `aut`: a whole edge
/// class when some basis vector moves it, singletons otherwise.
pub fn coordinate_orbits(s: &CfiStructure, aut: &AutSpace) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for e in 0..s.edges.len() {
        let elems: Vec<u32> = (0..s.p).map(|x| e as u32 * s.p + x).collect();
        if aut.basis.iter().any(|b| b[e] != 0) {
            out.push(elems);
        } else {
            out.extend(elems.into_iter().map(|a| vec![a]));
        }
    }
    out
}

//! Colored multi-relation graphs and `dim`-dimensional Weisfeiler-Leman
//! refinement.
//!
//! The two graphs are refined side by side with a shared color table, which
//! is the same as refining their disjoint union and comparing the tuples that
//! stay inside one graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredGraph {
    pub n: usize,
    pub colors: Vec<u32>,
    /// Named directed edge sets; undirected relations hold both directions.
    pub relations: BTreeMap<String, BTreeSet<(u32, u32)>>,
}

impl ColoredGraph {
    pub fn new(n: usize) -> Self {
        ColoredGraph { n, colors: vec![0; n], relations: BTreeMap::new() }
    }

    /// Monochrome undirected graph with the single relation `E`.
    pub fn undirected(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut g = ColoredGraph::new(n);
        for &(a, b) in edges {
            g.add_undirected("E", a, b)?;
        }
        g.relations.entry("E".into()).or_default();
        Ok(g)
    }

    pub fn add_edge(&mut self, rel: &str, a: u32, b: u32) -> Result<()> {
        if a as usize >= self.n || b as usize >= self.n {
            return Err(Error::InvalidInput(format!("edge ({a}, {b}) outside {} vertices", self.n)));
        }
        self.relations.entry(rel.to_string()).or_default().insert((a, b));
        Ok(())
    }

    pub fn add_undirected(&mut self, rel: &str, a: u32, b: u32) -> Result<()> {
        self.add_edge(rel, a, b)?;
        self.add_edge(rel, b, a)
    }

    pub fn has_edge(&self, rel: &str, a: u32, b: u32) -> bool {
        self.relations.get(rel).is_some_and(|r| r.contains(&(a, b)))
    }

    /// Vertices grouped by color, classes ordered by color value.
    pub fn color_classes(&self) -> Vec<Vec<u32>> {
        let mut by: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (v, &c) in self.colors.iter().enumerate() {
            by.entry(c).or_default().push(v as u32);
        }
        by.into_values().collect()
    }

    /// Undirected edges `a < b` of relation `E`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        self.relations
            .get("E")
            .map(|r| r.iter().filter(|(a, b)| a < b).copied().collect())
            .unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        if self.colors.len() != self.n {
            return Err(Error::InvalidInput(format!("{} colors for {} vertices", self.colors.len(), self.n)));
        }
        for (name, r) in &self.relations {
            if r.iter().any(|&(a, b)| a as usize >= self.n || b as usize >= self.n) {
                return Err(Error::InvalidInput(format!("relation {name} leaves the vertex set")));
            }
        }
        Ok(())
    }

    /// Text format: a header `n m`, then `m` lines `u v` of undirected `E`
    /// edges, then optionally a line `colors c_0 ... c_{n-1}`. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("missing header line".into()))?;
        let nums = parse_ints(header)?;
        let [n, m] = nums[..] else { return Err(Error::Parse("header must be `n m`".into())) };
        let mut g = ColoredGraph::new(n as usize);
        g.relations.insert("E".into(), BTreeSet::new());
        for i in 0..m {
            let l = lines.next().ok_or_else(|| Error::Parse(format!("expected {m} edge lines, found {i}")))?;
            let e = parse_ints(l)?;
            let [a, b] = e[..] else { return Err(Error::Parse(format!("bad edge line {l:?}"))) };
            g.add_undirected("E", a as u32, b as u32)?;
        }
        if let Some(l) = lines.next() {
            let rest = l.strip_prefix("colors").ok_or_else(|| Error::Parse(format!("unexpected line {l:?}")))?;
            let cs = parse_ints(rest)?;
            if cs.len() != g.n {
                return Err(Error::Parse(format!("color line has {} entries for {} vertices", cs.len(), g.n)));
            }
            g.colors = cs.into_iter().map(|c| c as u32).collect();
        }
        if let Some(l) = lines.next() {
            return Err(Error::Parse(format!("trailing line {l:?}")));
        }
        Ok(g)
    }

    /// Inverse of `parse_text` for graphs whose only relation is a symmetric
    /// `E`.
    pub fn to_text(&self) -> Result<String> {
        if self.relations.keys().any(|k| k != "E") {
            return Err(Error::Unsupported("text format holds only the relation E; use JSON".into()));
        }
        let e = self.edges();
        let mut out = format!("{} {}\n", self.n, e.len());
        for (a, b) in e {
            out.push_str(&format!("{a} {b}\n"));
        }
        if self.colors.iter().any(|&c| c != 0) {
            let cs: Vec<String> = self.colors.iter().map(u32::to_string).collect();
            out.push_str(&format!("colors {}\n", cs.join(" ")));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: ColoredGraph = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }

    /// Reads JSON when the text starts with `{`, the text format otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::parse_text(text)
        }
    }
}

fn parse_ints(s: &str) -> Result<Vec<i64>> {
    s.split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("not an integer: {t:?}"))))
        .collect::<Result<Vec<_>>>()
        .and_then(|v| {
            if v.iter().any(|&x| x < 0) {
                Err(Error::Parse("negative number".into()))
            } else {
                Ok(v)
            }
        })
}

/// Largest number of tuples per graph the refinement will allocate.
const MAX_TUPLES: usize = 1 << 26;

struct Side<'a> {
    g: &'a ColoredGraph,
    /// Adjacency matrices, one per relation name.
    rels: Vec<Vec<bool>>,
    colors: Vec<u32>,
}

impl Side<'_> {
    fn rel(&self, r: usize, a: usize, b: usize) -> bool {
        self.rels[r][a * self.g.n + b]
    }
}

fn decode(mut idx: usize, n: usize, dim: usize, out: &mut [usize]) {
    for i in (0..dim).rev() {
        out[i] = idx % n;
        idx /= n;
    }
}

fn hash128<T: Hash>(x: &T) -> u128 {
    let mut a = std::collections::hash_map::DefaultHasher::new();
    0xa5u8.hash(&mut a);
    x.hash(&mut a);
    let mut b = std::collections::hash_map::DefaultHasher::new();
    0x3cu8.hash(&mut b);
    x.hash(&mut b);
    (a.finish() as u128) << 64 | b.finish() as u128
}

/// Assigns dense ids to signatures by sorted order, jointly for both sides.
fn canonical<K: Ord + Clone + Hash + Eq>(sigs: [&[K]; 2]) -> ([Vec<u32>; 2], usize) {
    let mut all: Vec<K> = sigs.iter().flat_map(|s| s.iter().cloned()).collect();
    all.sort_unstable();
    all.dedup();
    let ids: HashMap<&K, u32> = all.iter().enumerate().map(|(i, k)| (k, i as u32)).collect();
    let map = |s: &[K]| s.iter().map(|k| ids[k]).collect::<Vec<u32>>();
    ([map(sigs[0]), map(sigs[1])], all.len())
}

fn histogram(colors: &[u32]) -> Vec<u32> {
    let mut h = colors.to_vec();
    h.sort_unstable();
    h
}

fn initial_type(s: &Side, t: &[usize]) -> Vec<u32> {
    let mut ty = Vec::new();
    for &a in t {
        ty.push(s.g.colors[a]);
    }
    for (i, &a) in t.iter().enumerate() {
        for &b in &t[i + 1..] {
            ty.push((a == b) as u32);
        }
    }
    for r in 0..s.rels.len() {
        for &a in t {
            for &b in t {
                ty.push(s.rel(r, a, b) as u32);
            }
        }
    }
    ty
}

/// Relation of a new vertex `w` to the tuple: equalities and edges in both
/// directions for every relation.
fn join_type(s: &Side, t: &[usize], w: usize) -> u64 {
    let mut bits = 0u64;
    let mut pos = 0;
    let mut push = |b: bool| {
        bits |= (b as u64) << (pos % 64);
        pos += 1;
    };
    for &a in t {
        push(a == w);
        for r in 0..s.rels.len() {
            push(s.rel(r, a, w));
            push(s.rel(r, w, a));
        }
    }
    bits
}

/// Runs `dim`-WL on both graphs; true iff the stable color histograms differ.
pub fn wl_distinguishes(g: &ColoredGraph, h: &ColoredGraph, dim: usize) -> Result<bool> {
    wl_distinguishes_with(g, h, dim, None)
}

/// As [`wl_distinguishes`], giving up with `Timeout` after `deadline`.
pub fn wl_distinguishes_with<'a>(
    g: &'a ColoredGraph,
    h: &'a ColoredGraph,
    dim: usize,
    deadline: Option<Instant>,
) -> Result<bool> {
    let late = || deadline.is_some_and(|d| Instant::now() > d);
    if dim < 1 {
        return Err(Error::InvalidInput("WL dimension must be at least 1".into()));
    }
    g.validate()?;
    h.validate()?;
    if g.n != h.n {
        return Ok(true);
    }
    let n = g.n;
    let total = n.checked_pow(dim as u32).filter(|&t| t <= MAX_TUPLES);
    let Some(total) = total else {
        return Err(Error::Unsupported(format!("{n}^{dim} tuples is too many")));
    };
    if dim * (1 + 2 * g.relations.len().max(h.relations.len())) > 64 {
        return Err(Error::Unsupported("too many relations for this dimension".into()));
    }
    let names: BTreeSet<&String> = g.relations.keys().chain(h.relations.keys()).collect();
    let side = |gr: &'a ColoredGraph| -> Side<'a> {
        let rels = names
            .iter()
            .map(|k| {
                let mut m = vec![false; n * n];
                for &(a, b) in gr.relations.get(*k).into_iter().flatten() {
                    m[a as usize * n + b as usize] = true;
                }
                m
            })
            .collect();
        Side { g: gr, rels, colors: Vec::new() }
    };
    let mut sides = [side(g), side(h)];

    let mut t = vec![0usize; dim];
    let init: Vec<Vec<Vec<u32>>> = sides
        .iter()
        .map(|s| {
            (0..total)
                .map(|idx| {
                    decode(idx, n, dim, &mut t);
                    initial_type(s, &t)
                })
                .collect()
        })
        .collect();
    let ([cg, ch], mut classes) = canonical([&init[0], &init[1]]);
    drop(init);
    sides[0].colors = cg;
    sides[1].colors = ch;
    let strides: Vec<usize> = (0..dim).map(|i| n.pow((dim - 1 - i) as u32)).collect();

    loop {
        if histogram(&sides[0].colors) != histogram(&sides[1].colors) {
            return Ok(true);
        }
        let sigs: Vec<Vec<(u32, u128)>> = sides
            .iter()
            .map(|s| {
                let mut t = vec![0usize; dim];
                let mut entries: Vec<SmallVec<[u64; 6]>> = Vec::with_capacity(n);
                (0..total)
                    .map(|idx| {
                        if idx % 4096 == 0 && late() {
                            return Err(Error::Timeout);
                        }
                        decode(idx, n, dim, &mut t);
                        entries.clear();
                        for w in 0..n {
                            let mut e = SmallVec::new();
                            e.push(join_type(s, &t, w));
                            for i in 0..dim {
                                let j = idx - t[i] * strides[i] + w * strides[i];
                                e.push(s.colors[j] as u64);
                            }
                            entries.push(e);
                        }
                        entries.sort_unstable();
                        Ok((s.colors[idx], hash128(&entries)))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let ([cg, ch], now) = canonical([&sigs[0], &sigs[1]]);
        sides[0].colors = cg;
        sides[1].colors = ch;
        if now == classes {
            return Ok(histogram(&sides[0].colors) != histogram(&sides[1].colors));
        }
        classes = now;
    }
}

/// Smallest `dim <= dim_max` at which WL distinguishes the graphs.
pub fn wl_sweep(g: &ColoredGraph, h: &ColoredGraph, dim_max: usize) -> Result<Option<usize>> {
    wl_sweep_with(g, h, dim_max, None)
}

pub fn wl_sweep_with(
    g: &ColoredGraph,
    h: &ColoredGraph,
    dim_max: usize,
    deadline: Option<Instant>,
) -> Result<Option<usize>> {
    if dim_max < 1 {
        return Err(Error::InvalidInput("dim_max must be at least 1".into()));
    }
    for d in 1..=dim_max {
        if wl_distinguishes_with(g, h, d, deadline)? {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

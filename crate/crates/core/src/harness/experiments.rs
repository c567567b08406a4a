//! Experiment drivers. Each experiment is a list of independent cells run on
//! a worker pool; rows are merged back in cell order, so reports do not
//! depend on scheduling.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Field;
use crate::cfi::{automorphism_space, to_graph, twisted_pair, CfiBase};
use crate::encoders::{
    encode_iso_poly_colored, encode_kconsistency_cnf, k_consistency_with, ClassMismatch, KConsistencyOptions,
};
use crate::error::{Error, Result};
use crate::logic::RelStructure;
use crate::pc::{saturate, EngineKind, PolySystem, Polynomial, SaturationOptions};
use crate::resolution::horn_refute;
use crate::wl::{wl_sweep_with, ColoredGraph};

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    /// Wall-clock limit per cell.
    pub timeout: Duration,
    /// Column and stored-entry limits handed to the PC engines.
    pub max_columns: Option<usize>,
    pub max_entries: Option<usize>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { timeout: Duration::from_secs(300), max_columns: Some(4_000_000), max_entries: Some(40_000_000) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Timeout,
    /// A column or entry limit was hit.
    Limit,
}

impl Status {
    fn of(e: &Error) -> Option<Status> {
        match e {
            Error::Timeout => Some(Status::Timeout),
            Error::ResourceLimit(_) => Some(Status::Limit),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeSearch {
    pub status: Status,
    /// Smallest refuting degree found.
    pub degree: Option<usize>,
    /// Largest degree saturated without a refutation.
    pub cleared: Option<usize>,
    /// Columns and live rows of the last completed saturation.
    pub columns: usize,
    pub live_rows: usize,
    pub seconds: f64,
}

/// Saturates at increasing degrees until a refutation, `k_max`, or the
/// budget runs out.
pub fn min_degree_search(sys: &PolySystem, kind: EngineKind, k_max: usize, budget: Budget) -> Result<DegreeSearch> {
    let start = Instant::now();
    let opts = SaturationOptions {
        deadline: Some(start + budget.timeout),
        max_columns: budget.max_columns,
        max_entries: budget.max_entries,
        ..Default::default()
    };
    let mut out =
        DegreeSearch { status: Status::Ok, degree: None, cleared: None, columns: 0, live_rows: 0, seconds: 0.0 };
    if sys.axioms.iter().any(Polynomial::is_nonzero_constant) {
        out.degree = Some(1);
        return Ok(out);
    }
    for k in sys.max_degree().max(1)..=k_max {
        match saturate(sys, k, kind, &opts) {
            Ok(s) => {
                out.columns = s.stats.columns;
                out.live_rows = s.stats.live_rows;
                if s.refuted {
                    out.degree = Some(k);
                    break;
                }
                out.cleared = Some(k);
            }
            Err(e) => match Status::of(&e) {
                Some(st) => {
                    out.status = st;
                    break;
                }
                None => return Err(e),
            },
        }
    }
    out.seconds = start.elapsed().as_secs_f64();
    Ok(out)
}

fn wl_cell(g: &ColoredGraph, h: &ColoredGraph, dim_max: usize, budget: Budget) -> Result<(Status, Option<usize>, f64)> {
    let start = Instant::now();
    match wl_sweep_with(g, h, dim_max, Some(start + budget.timeout)) {
        Ok(d) => Ok((Status::Ok, d, start.elapsed().as_secs_f64())),
        Err(Error::Unsupported(msg)) => {
            info!("wl gave up: {msg}");
            Ok((Status::Limit, None, start.elapsed().as_secs_f64()))
        }
        Err(e) => match Status::of(&e) {
            Some(st) => Ok((st, None, start.elapsed().as_secs_f64())),
            None => Err(e),
        },
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))
}

fn secs(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

// ------------------------------------------------------ degree growth ----

#[derive(Clone, Debug)]
pub struct DegreeGrowthConfig {
    pub bases: Vec<String>,
    pub p: u32,
    pub field: Field,
    pub engine: EngineKind,
    pub k_max: usize,
    pub wl_dim_max: usize,
    /// Highest degree tried on the control pair; 0 skips it.
    pub control_k_max: usize,
    pub budget: Budget,
    pub jobs: usize,
}

impl Default for DegreeGrowthConfig {
    fn default() -> Self {
        DegreeGrowthConfig {
            bases: ["k4", "prism", "cube", "petersen"].map(String::from).to_vec(),
            p: 2,
            field: Field::Rationals,
            engine: EngineKind::MonPc,
            k_max: 5,
            wl_dim_max: 3,
            control_k_max: 3,
            budget: Budget::default(),
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeGrowthRow {
    pub base: String,
    pub base_vertices: u32,
    pub base_edges: usize,
    pub p: u32,
    pub field: String,
    pub engine: String,
    pub graph_vertices: usize,
    pub poly_vars: u32,
    pub poly_axioms: usize,
    pub aut_dimension: usize,
    pub pc_status: Status,
    pub min_degree: Option<usize>,
    pub cleared_degree: Option<usize>,
    pub columns: usize,
    pub live_rows: usize,
    pub pc_seconds: f64,
    pub wl_status: Status,
    pub wl_sweep: Option<usize>,
    pub wl_seconds: f64,
    pub control_status: Option<Status>,
    pub control_refuted: Option<bool>,
    pub control_cleared: Option<usize>,
    pub command: String,
}

enum GrowthTask {
    Pc,
    Wl,
    Control,
}

enum GrowthOut {
    Pc(DegreeSearch),
    Wl(Status, Option<usize>, f64),
    Control(DegreeSearch),
}

/// Per base graph: the minimal refutation degree of the colored ISO system
/// of its twisted CFI pair, the WL dimension separating the pair, and a
/// control run on a structure against itself.
pub fn degree_growth(cfg: &DegreeGrowthConfig, command: &str) -> Result<Vec<DegreeGrowthRow>> {
    if cfg.field.characteristic() == cfg.p {
        return Err(Error::InvalidInput(format!("field characteristic must differ from p = {}", cfg.p)));
    }
    struct Prep {
        base: CfiBase,
        ga: ColoredGraph,
        gb: ColoredGraph,
        sys: PolySystem,
        control: PolySystem,
        aut: usize,
    }
    let mut preps = Vec::new();
    for name in &cfg.bases {
        let base = CfiBase::load(name)?;
        let (a, b) = twisted_pair(&base, cfg.p)?;
        let (ga, gb) = (to_graph(&a), to_graph(&b));
        let sys = encode_iso_poly_colored(&ga, &gb, cfg.field, ClassMismatch::Error)?;
        let control = encode_iso_poly_colored(&ga, &ga, cfg.field, ClassMismatch::Error)?;
        let aut = automorphism_space(&base, cfg.p)?.dimension();
        preps.push(Prep { base, ga, gb, sys, control, aut });
    }
    let mut cells = Vec::new();
    for i in 0..preps.len() {
        cells.push((i, GrowthTask::Pc));
        cells.push((i, GrowthTask::Wl));
        if cfg.control_k_max > 0 {
            cells.push((i, GrowthTask::Control));
        }
    }
    let outs: Vec<Result<GrowthOut>> = pool(cfg.jobs)?.install(|| {
        cells
            .par_iter()
            .map(|(i, task)| {
                let p = &preps[*i];
                let out = match task {
                    GrowthTask::Pc => GrowthOut::Pc(min_degree_search(&p.sys, cfg.engine, cfg.k_max, cfg.budget)?),
                    GrowthTask::Wl => {
                        let (s, d, t) = wl_cell(&p.ga, &p.gb, cfg.wl_dim_max, cfg.budget)?;
                        GrowthOut::Wl(s, d, t)
                    }
                    GrowthTask::Control => {
                        GrowthOut::Control(min_degree_search(&p.control, cfg.engine, cfg.control_k_max, cfg.budget)?)
                    }
                };
                info!("{}: cell done", p.base.name);
                Ok(out)
            })
            .collect()
    });
    let mut rows: Vec<DegreeGrowthRow> = preps
        .iter()
        .map(|p| DegreeGrowthRow {
            base: p.base.name.clone(),
            base_vertices: p.base.n,
            base_edges: p.base.edges.len(),
            p: cfg.p,
            field: cfg.field.to_string(),
            engine: cfg.engine.to_string(),
            graph_vertices: p.ga.n,
            poly_vars: p.sys.num_vars,
            poly_axioms: p.sys.axioms.len(),
            aut_dimension: p.aut,
            pc_status: Status::Ok,
            min_degree: None,
            cleared_degree: None,
            columns: 0,
            live_rows: 0,
            pc_seconds: 0.0,
            wl_status: Status::Ok,
            wl_sweep: None,
            wl_seconds: 0.0,
            control_status: None,
            control_refuted: None,
            control_cleared: None,
            command: command.to_string(),
        })
        .collect();
    for ((i, _), out) in cells.iter().zip(outs) {
        let row = &mut rows[*i];
        match out? {
            GrowthOut::Pc(s) => {
                row.pc_status = s.status;
                row.min_degree = s.degree;
                row.cleared_degree = s.cleared;
                row.columns = s.columns;
                row.live_rows = s.live_rows;
                row.pc_seconds = secs(s.seconds);
            }
            GrowthOut::Wl(s, d, t) => {
                row.wl_status = s;
                row.wl_sweep = d;
                row.wl_seconds = secs(t);
            }
            GrowthOut::Control(s) => {
                row.control_status = Some(s.status);
                row.control_refuted = Some(s.degree.is_some());
                row.control_cleared = s.cleared;
            }
        }
    }
    rows.sort_by(|a, b| (a.base_vertices, a.base_edges, &a.base).cmp(&(b.base_vertices, b.base_edges, &b.base)));
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeGrowthSummary {
    /// Degrees in row order, absent where the search did not finish.
    pub degrees: Vec<Option<usize>>,
    pub non_decreasing: bool,
    pub strict_increase: bool,
    /// Bases whose PC cell ran out of time or columns.
    pub unfinished: Vec<String>,
    pub control_refuted: bool,
}

pub fn summarize_degree_growth(rows: &[DegreeGrowthRow]) -> DegreeGrowthSummary {
    let degrees: Vec<Option<usize>> = rows.iter().map(|r| r.min_degree).collect();
    let known: Vec<usize> = degrees.iter().flatten().copied().collect();
    DegreeGrowthSummary {
        non_decreasing: known.windows(2).all(|w| w[0] <= w[1]),
        strict_increase: known.windows(2).any(|w| w[0] < w[1]),
        unfinished: rows.iter().filter(|r| r.pc_status != Status::Ok).map(|r| r.base.clone()).collect(),
        control_refuted: rows.iter().any(|r| r.control_refuted == Some(true)),
        degrees,
    }
}

// ------------------------------------------------------ calibration ----

#[derive(Clone, Debug)]
pub struct CalibrationConfig {
    pub seed: u64,
    /// Random colored pairs besides the fixed ones.
    pub count: usize,
    pub n_max: usize,
    pub k_max: usize,
    pub wl_dim_max: usize,
    /// CFI bases whose twisted pairs (p = 2) join the corpus.
    pub cfi_bases: Vec<String>,
    pub budget: Budget,
    pub jobs: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            seed: 1,
            count: 15,
            n_max: 8,
            k_max: 4,
            wl_dim_max: 3,
            cfi_bases: vec!["k4".into()],
            budget: Budget::default(),
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrationRow {
    pub pair: String,
    pub n: usize,
    pub wl_status: Status,
    pub wl_sweep: Option<usize>,
    pub pc_status: Status,
    pub min_degree: Option<usize>,
    pub cleared_degree: Option<usize>,
    /// `min_degree - wl_sweep` when both are known.
    pub offset: Option<i64>,
    pub seconds: f64,
    pub command: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrationSummary {
    pub pairs: usize,
    pub compared: usize,
    pub offsets: BTreeMap<i64, usize>,
    /// The offset, when a single one was observed.
    pub c: Option<i64>,
    /// Pairs where one side finished and the other did not, although the
    /// degree search went past `wl_sweep + 1`, or WL separated nothing up to
    /// `wl_dim_max` and PC refuted at or below `wl_dim_max`.
    pub disagreements: Vec<String>,
}

fn cycle_edges(n: u32, offset: u32) -> Vec<(u32, u32)> {
    (0..n).map(|i| (offset + i, offset + (i + 1) % n)).collect()
}

fn cycles(lens: &[u32]) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut off = 0;
    for &l in lens {
        out.extend(cycle_edges(l, off));
        off += l;
    }
    out
}

fn plain(n: u32, edges: &[(u32, u32)]) -> ColoredGraph {
    ColoredGraph::undirected(n as usize, edges).expect("fixed corpus graphs are valid")
}

fn random_colored(r: &mut ChaCha8Rng, colors: &[u32], density: f64) -> ColoredGraph {
    let n = colors.len();
    let mut g = ColoredGraph::new(n);
    g.colors = colors.to_vec();
    g.relations.insert("E".into(), Default::default());
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            if r.gen_bool(density) {
                g.add_undirected("E", a, b).unwrap();
            }
        }
    }
    g
}

fn relabelled(r: &mut ChaCha8Rng, g: &ColoredGraph) -> ColoredGraph {
    let mut perm: Vec<u32> = (0..g.n as u32).collect();
    for i in (1..g.n).rev() {
        perm.swap(i, r.gen_range(0..=i));
    }
    let mut h = ColoredGraph::new(g.n);
    for v in 0..g.n {
        h.colors[perm[v] as usize] = g.colors[v];
    }
    for (name, edges) in &g.relations {
        h.relations.entry(name.clone()).or_default();
        for &(a, b) in edges {
            h.add_edge(name, perm[a as usize], perm[b as usize]).unwrap();
        }
    }
    h
}

/// One double-edge swap `ab, cd -> ad, cb`, keeping degrees and colors.
fn edge_switched(r: &mut ChaCha8Rng, g: &ColoredGraph) -> ColoredGraph {
    let edges: Vec<(u32, u32)> = g.edges();
    for _ in 0..50 {
        if edges.len() < 2 {
            break;
        }
        let (a, b) = edges[r.gen_range(0..edges.len())];
        let (c, d) = edges[r.gen_range(0..edges.len())];
        if [a, b].contains(&c) || [a, b].contains(&d) || g.has_edge("E", a, d) || g.has_edge("E", c, b) {
            continue;
        }
        let mut h = ColoredGraph::new(g.n);
        h.colors = g.colors.clone();
        h.relations.insert("E".into(), Default::default());
        for &(x, y) in &edges {
            if (x, y) != (a, b) && (x, y) != (c, d) {
                h.add_undirected("E", x, y).unwrap();
            }
        }
        h.add_undirected("E", a, d).unwrap();
        h.add_undirected("E", c, b).unwrap();
        return h;
    }
    g.clone()
}

/// The calibration corpus: fixed regular pairs, seeded random colored pairs
/// with equal class counts, and CFI twisted pairs.
pub fn calibration_corpus(cfg: &CalibrationConfig) -> Result<Vec<(String, ColoredGraph, ColoredGraph)>> {
    let mut out = vec![
        ("triangles-c6".to_string(), plain(6, &cycles(&[3, 3])), plain(6, &cycles(&[6]))),
        ("c8-2c4".to_string(), plain(8, &cycles(&[8])), plain(8, &cycles(&[4, 4]))),
        ("c7-c3c4".to_string(), plain(7, &cycles(&[7])), plain(7, &cycles(&[3, 4]))),
        ("c9-3c3".to_string(), plain(9, &cycles(&[9])), plain(9, &cycles(&[3, 3, 3]))),
        (
            "k33-prism".to_string(),
            plain(6, &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]),
            plain(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]),
        ),
        ("c6-identical".to_string(), plain(6, &cycles(&[6])), plain(6, &cycles(&[6]))),
    ];
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..cfg.count {
        let n = r.gen_range(4..=cfg.n_max.max(4));
        let colors: Vec<u32> = (0..n).map(|v| if v == 0 { 0 } else { r.gen_range(0..2) }).collect();
        let g = random_colored(&mut r, &colors, 0.45);
        let (kind, h) = match i % 3 {
            0 => ("iso", relabelled(&mut r, &g)),
            1 => ("switch", {
                let h = edge_switched(&mut r, &g);
                relabelled(&mut r, &h)
            }),
            _ => ("random", {
                let mut c2 = colors.clone();
                c2.reverse();
                random_colored(&mut r, &c2, 0.45)
            }),
        };
        out.push((format!("random-{i}-{kind}-n{n}"), g, h));
    }
    for name in &cfg.cfi_bases {
        let base = CfiBase::load(name)?;
        let (a, b) = twisted_pair(&base, 2)?;
        out.push((format!("cfi-{}-p2", base.name), to_graph(&a), to_graph(&b)));
    }
    Ok(out)
}

pub fn wl_calibrate(cfg: &CalibrationConfig, command: &str) -> Result<Vec<CalibrationRow>> {
    let corpus = calibration_corpus(cfg)?;
    pool(cfg.jobs)?.install(|| {
        corpus
            .par_iter()
            .map(|(name, g, h)| {
                let start = Instant::now();
                let (wl_status, wl, _) = wl_cell(g, h, cfg.wl_dim_max, cfg.budget)?;
                let sys = encode_iso_poly_colored(g, h, Field::Rationals, ClassMismatch::Unsatisfiable)?;
                let s = min_degree_search(&sys, EngineKind::MonPc, cfg.k_max, cfg.budget)?;
                info!("{name}: wl {wl:?}, degree {:?}", s.degree);
                Ok(CalibrationRow {
                    pair: name.clone(),
                    n: g.n,
                    wl_status,
                    wl_sweep: wl,
                    pc_status: s.status,
                    min_degree: s.degree,
                    cleared_degree: s.cleared,
                    offset: match (s.degree, wl) {
                        (Some(d), Some(w)) => Some(d as i64 - w as i64),
                        _ => None,
                    },
                    seconds: secs(start.elapsed().as_secs_f64()),
                    command: command.to_string(),
                })
            })
            .collect()
    })
}

pub fn summarize_calibration(rows: &[CalibrationRow], wl_dim_max: usize) -> CalibrationSummary {
    let mut offsets = BTreeMap::new();
    let mut disagreements = Vec::new();
    for r in rows {
        if let Some(c) = r.offset {
            *offsets.entry(c).or_insert(0) += 1;
        }
        let wl_silent = r.wl_status == Status::Ok && r.wl_sweep.is_none();
        let pc_past = |d: usize| r.cleared_degree.is_some_and(|c| c >= d);
        let bad = match (r.wl_sweep, r.min_degree) {
            (Some(w), None) => pc_past(w + 1),
            (None, Some(d)) => wl_silent && d <= wl_dim_max,
            _ => false,
        };
        if bad {
            disagreements.push(r.pair.clone());
        }
    }
    CalibrationSummary {
        pairs: rows.len(),
        compared: offsets.values().sum(),
        c: if offsets.len() == 1 { offsets.keys().next().copied() } else { None },
        offsets,
        disagreements,
    }
}

// ---------------------------------------------------------- CSP sweep ----

#[derive(Clone, Debug)]
pub struct CspSweepConfig {
    pub seed: u64,
    pub count: usize,
    pub n_max: usize,
    pub density: f64,
    pub ks: Vec<usize>,
    pub templates: Vec<String>,
    pub full_subsets: bool,
    pub budget: Budget,
    pub jobs: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CspSweepRow {
    pub template: String,
    pub instance: usize,
    pub n: u32,
    pub edges: usize,
    pub k: usize,
    pub consistent: bool,
    pub survivors: usize,
    pub cnf_vars: u32,
    pub cnf_clauses: usize,
    pub cnf_width: usize,
    /// Unit propagation on the polarity-flipped (Horn) CNF.
    pub cnf_refuted: bool,
    pub homomorphism: bool,
    pub seconds: f64,
    pub command: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CspSweepSummary {
    /// Per `template/k`: instances, consistent, homomorphisms, instances on
    /// which consistency was exact, instances where the CNF verdict matched.
    pub cells: BTreeMap<String, [usize; 5]>,
}

/// Template structures by name: `kN` (complete graph), `cN` (cycle).
pub fn template(name: &str) -> Result<RelStructure> {
    let bad = || Error::InvalidInput(format!("unknown template {name:?} (expected kN or cN)"));
    let n: u32 = name.get(1..).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let edges: Vec<(u32, u32)> = match name.as_bytes()[0] {
        b'k' => (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect(),
        b'c' if n >= 3 => cycle_edges(n, 0),
        _ => return Err(bad()),
    };
    RelStructure::undirected_graph(n, &edges)
}

/// Backtracking homomorphism search; a tuple is checked once its largest
/// element is assigned.
pub fn homomorphism_exists(a: &RelStructure, t: &RelStructure) -> bool {
    let n = a.n as usize;
    let mut by_max: Vec<Vec<(&str, &Vec<u32>)>> = vec![Vec::new(); n];
    for (name, rel) in &a.relations {
        for tup in &rel.tuples {
            if let Some(&m) = tup.iter().max() {
                by_max[m as usize].push((name.as_str(), tup));
            }
        }
    }
    fn go(i: usize, h: &mut Vec<u32>, by_max: &[Vec<(&str, &Vec<u32>)>], t: &RelStructure) -> bool {
        if i == by_max.len() {
            return true;
        }
        for x in 0..t.n {
            h.push(x);
            let ok = by_max[i].iter().all(|(name, tup)| {
                let img: Vec<u32> = tup.iter().map(|&e| h[e as usize]).collect();
                t.holds(name, &img)
            });
            if ok && go(i + 1, h, by_max, t) {
                return true;
            }
            h.pop();
        }
        false
    }
    go(0, &mut Vec::with_capacity(n), &by_max, t)
}

pub fn csp_sweep(cfg: &CspSweepConfig, command: &str) -> Result<Vec<CspSweepRow>> {
    let templates: Vec<(String, RelStructure)> =
        cfg.templates.iter().map(|t| Ok((t.clone(), template(t)?))).collect::<Result<_>>()?;
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    let instances: Vec<RelStructure> = (0..cfg.count)
        .map(|_| {
            let n = r.gen_range(3..=cfg.n_max.max(3)) as u32;
            let edges: Vec<(u32, u32)> =
                (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| r.gen_bool(cfg.density)).collect();
            RelStructure::undirected_graph(n, &edges)
        })
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    for ti in 0..templates.len() {
        for ii in 0..instances.len() {
            for &k in &cfg.ks {
                cells.push((ti, ii, k));
            }
        }
    }
    let opts = KConsistencyOptions { full_subsets: cfg.full_subsets };
    pool(cfg.jobs)?.install(|| {
        cells
            .par_iter()
            .map(|&(ti, ii, k)| {
                let start = Instant::now();
                let (tname, t) = &templates[ti];
                let a = &instances[ii];
                let kc = k_consistency_with(a, t, k, opts)?;
                let cnf = encode_kconsistency_cnf(a, t, k)?;
                let cnf_refuted = horn_refute(&cnf.flip_polarity())?.refuted;
                Ok(CspSweepRow {
                    template: tname.clone(),
                    instance: ii,
                    n: a.n,
                    edges: a.relations.get("E").map_or(0, |r| r.tuples.len() / 2),
                    k,
                    consistent: kc.consistent,
                    survivors: kc.survivors,
                    cnf_vars: cnf.num_vars,
                    cnf_clauses: cnf.len(),
                    cnf_width: cnf.max_width(),
                    cnf_refuted,
                    homomorphism: homomorphism_exists(a, t),
                    seconds: secs(start.elapsed().as_secs_f64()),
                    command: command.to_string(),
                })
            })
            .collect()
    })
}

pub fn summarize_csp_sweep(rows: &[CspSweepRow]) -> CspSweepSummary {
    let mut cells: BTreeMap<String, [usize; 5]> = BTreeMap::new();
    for r in rows {
        let c = cells.entry(format!("{}/k{}", r.template, r.k)).or_default();
        c[0] += 1;
        c[1] += r.consistent as usize;
        c[2] += r.homomorphism as usize;
        c[3] += (r.consistent == r.homomorphism) as usize;
        c[4] += (r.cnf_refuted != r.consistent) as usize;
    }
    CspSweepSummary { cells }
}

// ------------------------------------------------------------ reports ----

/// Writes `<dir>/<name>.csv` (one row per line) and `<dir>/<name>.json`
/// (the same rows as objects, with the command and summary), and returns
/// the JSON document.
pub fn write_report<R: Serialize, S: Serialize>(
    dir: &Path,
    name: &str,
    command: &str,
    rows: &[R],
    summary: &S,
) -> Result<serde_json::Value> {
    std::fs::create_dir_all(dir)?;
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut w = csv::Writer::from_path(dir.join(format!("{name}.csv"))).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    let doc = serde_json::json!({
        "experiment": name,
        "command": command,
        "summary": summary,
        "rows": rows,
    });
    std::fs::write(dir.join(format!("{name}.json")), serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(doc)
}

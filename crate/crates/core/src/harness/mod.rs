//! Command-line front end and experiment drivers.
//!
//! Verdicts go to stdout as one JSON document; logs go to stderr. Exit codes:
//! 0 completed, 10 refuted or distinguished, 11 not refuted or not
//! distinguished, 2 usage or input error. A run cut short by `--timeout`
//! completes with `"verdict": "timeout"` and exit 0.

mod config;
mod experiments;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::{json, Value};

pub use config::{expand_config, parse_config};
pub use experiments::*;

use crate::algebra::Field;
use crate::cfi::{automorphism_space, build_cfi, cfi_isomorphic, to_graph, twisted_pair, CfiBase};
use crate::encoders::{
    encode_iso_cnf, encode_iso_poly, encode_iso_poly_colored, encode_kconsistency_cnf_with, encode_nonreach,
    k_consistency_with, ClassMismatch, KConsistencyOptions,
};
use crate::error::{Error, Result};
use crate::games::{encode_threshold_axioms, solve_threshold_game, ThresholdGame};
use crate::logic::{eval_poslfp, horn_encode, LfpFormula, RelStructure};
use crate::pc::{saturate, EngineKind, PolySystem, SaturationOptions, SubDegree};
use crate::resolution::{horn_refute, kres_saturate_with, CnfFormula, KresOptions, WidePolicy};
use crate::wl::{wl_sweep_with, ColoredGraph};

pub const EXIT_DONE: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUTED: i32 = 10;
pub const EXIT_NOT_REFUTED: i32 = 11;

#[derive(Parser, Debug)]
#[command(name = "prooflab", version, about = "Bounded-width resolution and polynomial calculus workbench")]
struct Cli {
    /// key=value file with defaults for the subcommand's flags
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Encode a problem as DIMACS or a polynomial system
    #[command(subcommand)]
    Encode(EncodeCmd),
    /// Resolution refuters on a DIMACS file
    #[command(subcommand)]
    Res(ResCmd),
    /// Saturate a polynomial system at a fixed degree
    Pc(PcArgs),
    /// Smallest refuting degree of a polynomial system
    MinDegree(MinDegreeArgs),
    /// Weisfeiler-Leman sweep on two colored graphs
    Wl(WlArgs),
    /// CFI structures
    #[command(subcommand)]
    Cfi(CfiCmd),
    /// Acyclic threshold games
    #[command(subcommand)]
    Game(GameCmd),
    /// k-consistency for CSPs
    #[command(subcommand)]
    Csp(CspCmd),
    /// Positive least fixed-point model checking
    #[command(subcommand)]
    Lfp(LfpCmd),
    /// Experiment drivers writing CSV and JSON reports
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IsoFormat {
    Cnf,
    Poly,
    PolyColored,
}

#[derive(Subcommand, Debug)]
enum EncodeCmd {
    /// Horn CNF, unsatisfiable iff TARGET is reachable from SOURCE
    Nonreach {
        /// Directed graph: `n m` then one `a b` line per edge
        graph: PathBuf,
        #[arg(long)]
        source: u32,
        #[arg(long)]
        target: u32,
    },
    /// Isomorphism of two graphs as a CNF or polynomial system
    Iso {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, value_enum, default_value = "cnf")]
        format: IsoFormat,
        #[arg(long, default_value = "Q")]
        field: Field,
        /// Encode a class-count mismatch as the constant 1 instead of failing
        #[arg(long)]
        mismatch_unsat: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ResCmd {
    /// Horn refutation by unit propagation
    Horn { input: PathBuf },
    /// Width-bounded resolution
    Kres {
        input: PathBuf,
        #[arg(long)]
        width: usize,
        /// Let input clauses wider than the bound act as premises
        #[arg(long)]
        premise_wide: bool,
        /// Compute the whole closure instead of stopping at the empty clause
        #[arg(long)]
        closure: bool,
        #[arg(long, value_name = "SECONDS")]
        timeout: Option<u64>,
    },
}

#[derive(Args, Debug)]
struct EngineArgs {
    #[arg(long, default_value = "monpc")]
    engine: EngineKind,
    /// Override the field of the input system
    #[arg(long)]
    field: Option<Field>,
    #[arg(long, default_value = "auto")]
    subdegree: SubDegree,
    #[arg(long, value_name = "SECONDS")]
    timeout: Option<u64>,
    #[arg(long)]
    max_columns: Option<usize>,
    #[arg(long)]
    max_entries: Option<usize>,
}

#[derive(Args, Debug)]
struct PcArgs {
    /// Polynomial system JSON
    input: PathBuf,
    #[arg(long)]
    degree: usize,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args, Debug)]
struct MinDegreeArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 4)]
    k_max: usize,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args, Debug)]
struct WlArgs {
    /// Colored graph, text or JSON
    g: PathBuf,
    h: PathBuf,
    #[arg(long, default_value_t = 3)]
    dim_max: usize,
    #[arg(long, value_name = "SECONDS")]
    timeout: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum CfiCmd {
    /// Build one CFI structure
    Gen {
        /// Library name (k4, prism, cube, petersen) or base graph file
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 2)]
        p: u32,
        /// Comma-separated vertex loads; all zero by default
        #[arg(long)]
        lambda: Option<String>,
        /// Print the colored graph encoding instead of the structure
        #[arg(long)]
        graph: bool,
    },
    /// The twisted pair (load sums 0 and 1) and its colored graphs
    Pair {
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 2)]
        p: u32,
        /// Write a.json and b.json (colored graphs) here
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Basis of the edge-shift automorphism space
    Aut {
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 2)]
        p: u32,
    },
}

#[derive(Subcommand, Debug)]
enum GameCmd {
    /// Winning regions by backward induction
    Solve { input: PathBuf },
    /// The degree-2 axiom system of the game
    Encode {
        input: PathBuf,
        #[arg(long, default_value = "Q")]
        field: Field,
    },
}

#[derive(Args, Debug)]
struct CspArgs {
    /// Instance structure (JSON or graph text)
    #[arg(long)]
    a: String,
    /// Template structure, or kN / cN for a complete graph / cycle
    #[arg(long)]
    t: String,
    #[arg(long)]
    k: usize,
    /// Extend to every superset domain, not just one element at a time
    #[arg(long)]
    full_subsets: bool,
}

#[derive(Subcommand, Debug)]
enum CspCmd {
    /// Run the k-consistency test
    Check(CspArgs),
    /// The dual-Horn CNF of the test, as DIMACS
    Encode(CspArgs),
}

#[derive(Args, Debug)]
struct LfpArgs {
    /// Structure JSON
    #[arg(long)]
    structure: PathBuf,
    /// Sentence text, or @FILE
    #[arg(long)]
    formula: String,
    /// Constant binding NAME=ELEMENT, repeatable
    #[arg(long = "const", value_name = "NAME=ELEMENT")]
    consts: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum LfpCmd {
    /// Evaluate the sentence
    Eval(LfpArgs),
    /// Horn CNF that is unsatisfiable iff the sentence holds
    Encode(LfpArgs),
}

#[derive(Args, Debug)]
struct PoolArgs {
    /// Wall-clock limit per cell
    #[arg(long, default_value_t = 300, value_name = "SECONDS")]
    timeout: u64,
    /// Column limit for the PC engines; 0 disables it
    #[arg(long, default_value_t = 4_000_000)]
    max_columns: usize,
    /// Limit on stored row entries for the PC engines; 0 disables it
    #[arg(long, default_value_t = 40_000_000)]
    max_entries: usize,
    /// Worker threads; defaults to the number of CPUs
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value = "reports")]
    out_dir: PathBuf,
}

impl PoolArgs {
    fn budget(&self) -> Budget {
        Budget {
            timeout: Duration::from_secs(self.timeout),
            max_columns: (self.max_columns > 0).then_some(self.max_columns),
            max_entries: (self.max_entries > 0).then_some(self.max_entries),
        }
    }

    fn jobs(&self) -> usize {
        self.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1)
    }
}

#[derive(Subcommand, Debug)]
enum ExperimentCmd {
    /// Minimal refutation degree on CFI twisted pairs across base graphs
    DegreeGrowth {
        #[arg(long, default_value = "k4,prism,cube,petersen", value_delimiter = ',')]
        bases: Vec<String>,
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value = "Q")]
        field: Field,
        #[arg(long, default_value = "monpc")]
        engine: EngineKind,
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        #[arg(long, default_value_t = 3)]
        wl_dim_max: usize,
        /// Highest degree tried on the structure-versus-itself control; 0 skips it
        #[arg(long, default_value_t = 3)]
        control_k_max: usize,
        #[command(flatten)]
        pool: PoolArgs,
    },
    /// Offset between minimal MON-PC degree and WL dimension
    WlCalibrate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 15)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[arg(long, default_value_t = 3)]
        wl_dim_max: usize,
        /// CFI bases whose twisted pairs join the corpus (comma-separated, may be empty)
        #[arg(long, default_value = "k4", value_delimiter = ',')]
        cfi: Vec<String>,
        #[command(flatten)]
        pool: PoolArgs,
    },
    /// k-consistency against homomorphism existence on random graphs
    CspSweep {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        count: usize,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        #[arg(long, default_value_t = 0.4)]
        density: f64,
        #[arg(long, default_value = "2,3", value_delimiter = ',')]
        ks: Vec<usize>,
        #[arg(long, default_value = "k2,k3", value_delimiter = ',')]
        templates: Vec<String>,
        #[arg(long)]
        full_subsets: bool,
        #[command(flatten)]
        pool: PoolArgs,
    },
}

/// What a subcommand printed and how it ended.
enum Outcome {
    Json(Value, i32),
    Text(String),
}

fn verdict(refuted: bool, mut v: Value) -> Outcome {
    v["verdict"] = json!(if refuted { "refuted" } else { "not_refuted" });
    Outcome::Json(v, if refuted { EXIT_REFUTED } else { EXIT_NOT_REFUTED })
}

fn timed_out(mut v: Value) -> Outcome {
    v["verdict"] = json!("timeout");
    Outcome::Json(v, EXIT_DONE)
}

fn deadline(secs: Option<u64>) -> Option<Instant> {
    secs.map(|s| Instant::now() + Duration::from_secs(s))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<ColoredGraph> {
    ColoredGraph::parse(&read(path)?)
}

/// `n m` followed by `m` directed edges; `#` starts a comment.
fn parse_digraph(text: &str) -> Result<(u32, Vec<(u32, u32)>)> {
    let mut nums = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for t in line.split_whitespace() {
            nums.push(t.parse::<u32>().map_err(|_| Error::Parse(format!("not a vertex id: {t:?}")))?);
        }
    }
    if nums.len() < 2 {
        return Err(Error::Parse("expected `n m` header".into()));
    }
    let (n, m) = (nums[0], nums[1] as usize);
    if nums.len() != 2 + 2 * m {
        return Err(Error::Parse(format!("expected {m} edges, found {} numbers", nums.len() - 2)));
    }
    Ok((n, nums[2..].chunks(2).map(|c| (c[0], c[1])).collect()))
}

/// A structure from JSON, from graph text, or a named template.
fn read_structure(spec: &str) -> Result<RelStructure> {
    if !Path::new(spec).exists() {
        if let Ok(t) = template(spec) {
            return Ok(t);
        }
    }
    let text = read(Path::new(spec))?;
    if text.trim_start().starts_with('{') {
        RelStructure::from_json(&text)
    } else {
        let g = ColoredGraph::parse_text(&text)?;
        RelStructure::undirected_graph(g.n as u32, &g.edges())
    }
}

fn read_system(path: &Path, field: Option<Field>) -> Result<PolySystem> {
    let sys = PolySystem::from_json(&read(path)?)?;
    match field {
        Some(f) => sys.over_field(f),
        None => Ok(sys),
    }
}

fn parse_lambda(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("not a load: {t:?}"))))
        .collect()
}

fn read_formula(args: &LfpArgs) -> Result<(RelStructure, LfpFormula)> {
    let a = RelStructure::from_json(&read(&args.structure)?)?;
    let text = match args.formula.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => args.formula.clone(),
    };
    let mut consts = BTreeMap::new();
    for c in &args.consts {
        let (k, v) = c.split_once('=').ok_or_else(|| Error::InvalidInput(format!("expected NAME=ELEMENT: {c}")))?;
        let v: u32 = v.parse().map_err(|_| Error::InvalidInput(format!("not an element: {v}")))?;
        consts.insert(k.to_string(), v);
    }
    Ok((a, LfpFormula::parse(&text, &consts)?))
}

fn cnf_summary(f: &CnfFormula) -> Value {
    json!({"vars": f.num_vars, "clauses": f.len(), "max_width": f.max_width()})
}

fn run_engine(sys: &PolySystem, k: usize, e: &EngineArgs) -> Result<Outcome> {
    let opts = SaturationOptions {
        deadline: deadline(e.timeout),
        subdegree: e.subdegree,
        max_columns: e.max_columns,
        max_entries: e.max_entries,
    };
    let base = json!({"engine": e.engine, "degree": k, "field": sys.field.to_string()});
    match saturate(sys, k, e.engine, &opts) {
        Ok(s) => {
            let mut v = base;
            v["stats"] = serde_json::to_value(&s.stats)?;
            Ok(verdict(s.refuted, v))
        }
        Err(Error::Timeout | Error::ResourceLimit(_)) => Ok(timed_out(base)),
        Err(e) => Err(e),
    }
}

fn run(cmd: Cmd, command: &str) -> Result<Outcome> {
    Ok(match cmd {
        Cmd::Encode(EncodeCmd::Nonreach { graph, source, target }) => {
            let (n, edges) = parse_digraph(&read(&graph)?)?;
            Outcome::Text(encode_nonreach(n, &edges, source, target)?.to_dimacs())
        }
        Cmd::Encode(EncodeCmd::Iso { g, h, format, field, mismatch_unsat }) => {
            let (g, h) = (read_graph(&g)?, read_graph(&h)?);
            let mismatch = if mismatch_unsat { ClassMismatch::Unsatisfiable } else { ClassMismatch::Error };
            match format {
                IsoFormat::Cnf => Outcome::Text(encode_iso_cnf(&g, &h)?.to_dimacs()),
                IsoFormat::Poly => Outcome::Text(encode_iso_poly(&g, &h, field)?.to_json()),
                IsoFormat::PolyColored => Outcome::Text(encode_iso_poly_colored(&g, &h, field, mismatch)?.to_json()),
            }
        }
        Cmd::Res(ResCmd::Horn { input }) => {
            let f = CnfFormula::from_dimacs(&read(&input)?)?;
            let r = horn_refute(&f)?;
            verdict(r.refuted, json!({"engine": "horn", "derived": r.derived.len(), "cnf": cnf_summary(&f)}))
        }
        Cmd::Res(ResCmd::Kres { input, width, premise_wide, closure, timeout }) => {
            let f = CnfFormula::from_dimacs(&read(&input)?)?;
            let opts = KresOptions {
                wide: if premise_wide { WidePolicy::Premise } else { WidePolicy::Strict },
                deadline: deadline(timeout),
                stop_on_empty: !closure,
                subsumption: !closure,
            };
            let base = json!({"engine": "kres", "width": width, "cnf": cnf_summary(&f)});
            match kres_saturate_with(&f, width, opts) {
                Ok(r) => {
                    let mut v = base;
                    if closure {
                        v["closure"] = json!(r.clauses.len());
                    }
                    verdict(r.refuted, v)
                }
                Err(Error::Timeout) => timed_out(base),
                Err(e) => return Err(e),
            }
        }
        Cmd::Pc(a) => run_engine(&read_system(&a.input, a.engine.field)?, a.degree, &a.engine)?,
        Cmd::MinDegree(a) => {
            let sys = read_system(&a.input, a.engine.field)?;
            let budget = Budget {
                timeout: Duration::from_secs(a.engine.timeout.unwrap_or(u64::MAX / 4)),
                max_columns: a.engine.max_columns,
                max_entries: a.engine.max_entries,
            };
            let s = min_degree_search(&sys, a.engine.engine, a.k_max, budget)?;
            let v = json!({"engine": a.engine.engine, "field": sys.field.to_string(), "k_max": a.k_max, "search": s});
            if s.degree.is_none() && s.status != Status::Ok {
                timed_out(v)
            } else {
                verdict(s.degree.is_some(), v)
            }
        }
        Cmd::Wl(a) => {
            let (g, h) = (read_graph(&a.g)?, read_graph(&a.h)?);
            let base = json!({"dim_max": a.dim_max, "n": [g.n, h.n]});
            match wl_sweep_with(&g, &h, a.dim_max, deadline(a.timeout)) {
                Ok(d) => {
                    let mut v = base;
                    v["dim"] = json!(d);
                    v["verdict"] = json!(if d.is_some() { "distinguished" } else { "not_distinguished" });
                    Outcome::Json(v, if d.is_some() { EXIT_REFUTED } else { EXIT_NOT_REFUTED })
                }
                Err(Error::Timeout) => timed_out(base),
                Err(e) => return Err(e),
            }
        }
        Cmd::Cfi(CfiCmd::Gen { base, p, lambda, graph }) => {
            let b = CfiBase::load(&base)?;
            let lambda = match lambda {
                Some(s) => parse_lambda(&s)?,
                None => vec![0; b.n as usize],
            };
            let s = build_cfi(&b, p, &lambda)?;
            Outcome::Text(if graph { to_graph(&s).to_json() } else { s.to_json() })
        }
        Cmd::Cfi(CfiCmd::Pair { base, p, out_dir }) => {
            let b = CfiBase::load(&base)?;
            let (x, y) = twisted_pair(&b, p)?;
            let (gx, gy) = (to_graph(&x), to_graph(&y));
            if let Some(dir) = &out_dir {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("a.json"), gx.to_json())?;
                std::fs::write(dir.join("b.json"), gy.to_json())?;
            }
            Outcome::Json(
                json!({
                    "base": b.name, "p": p,
                    "lambda": [x.lambda, y.lambda],
                    "isomorphic": cfi_isomorphic(&x, &y)?,
                    "universe": x.universe_size(),
                    "graph_vertices": gx.n,
                }),
                EXIT_DONE,
            )
        }
        Cmd::Cfi(CfiCmd::Aut { base, p }) => {
            let b = CfiBase::load(&base)?;
            let aut = automorphism_space(&b, p)?;
            Outcome::Json(
                json!({"base": b.name, "p": p, "dimension": aut.dimension(), "basis": aut.basis,
                       "edges": b.directed_edges()}),
                EXIT_DONE,
            )
        }
        Cmd::Game(GameCmd::Solve { input }) => {
            let g = ThresholdGame::from_json(&read(&input)?)?;
            let s = solve_threshold_game(&g)?;
            Outcome::Json(
                json!({"w0": s.w0, "w1": s.w1, "start": g.start, "player0_wins_start": s.player0_wins(g.start)}),
                EXIT_DONE,
            )
        }
        Cmd::Game(GameCmd::Encode { input, field }) => {
            let g = ThresholdGame::from_json(&read(&input)?)?;
            Outcome::Text(encode_threshold_axioms(&g, field)?.system.to_json())
        }
        Cmd::Csp(CspCmd::Check(a)) => {
            let (x, t) = (read_structure(&a.a)?, read_structure(&a.t)?);
            let r = k_consistency_with(&x, &t, a.k, KConsistencyOptions { full_subsets: a.full_subsets })?;
            let v = json!({"k": a.k, "consistent": r.consistent, "part_size": r.part_size,
                           "survivors": r.survivors, "rounds": r.rounds});
            verdict(!r.consistent, v)
        }
        Cmd::Csp(CspCmd::Encode(a)) => {
            let (x, t) = (read_structure(&a.a)?, read_structure(&a.t)?);
            let opts = KConsistencyOptions { full_subsets: a.full_subsets };
            Outcome::Text(encode_kconsistency_cnf_with(&x, &t, a.k, opts)?.0.to_dimacs())
        }
        Cmd::Lfp(LfpCmd::Eval(a)) => {
            let (s, phi) = read_formula(&a)?;
            Outcome::Json(json!({"holds": eval_poslfp(&s, &phi)?}), EXIT_DONE)
        }
        Cmd::Lfp(LfpCmd::Encode(a)) => {
            let (s, phi) = read_formula(&a)?;
            Outcome::Text(horn_encode(&s, &phi)?.cnf.to_dimacs())
        }
        Cmd::Experiment(e) => run_experiment(e, command)?,
    })
}

fn run_experiment(e: ExperimentCmd, command: &str) -> Result<Outcome> {
    let doc = match e {
        ExperimentCmd::DegreeGrowth { bases, p, field, engine, k_max, wl_dim_max, control_k_max, pool } => {
            let cfg = DegreeGrowthConfig {
                bases,
                p,
                field,
                engine,
                k_max,
                wl_dim_max,
                control_k_max,
                budget: pool.budget(),
                jobs: pool.jobs(),
            };
            let rows = degree_growth(&cfg, command)?;
            write_report(&pool.out_dir, "degree_growth", command, &rows, &summarize_degree_growth(&rows))?
        }
        ExperimentCmd::WlCalibrate { seed, count, n_max, k_max, wl_dim_max, cfi, pool } => {
            let cfg = CalibrationConfig {
                seed,
                count,
                n_max,
                k_max,
                wl_dim_max,
                cfi_bases: cfi.into_iter().filter(|s| !s.is_empty()).collect(),
                budget: pool.budget(),
                jobs: pool.jobs(),
            };
            let rows = wl_calibrate(&cfg, command)?;
            write_report(&pool.out_dir, "wl_calibrate", command, &rows, &summarize_calibration(&rows, wl_dim_max))?
        }
        ExperimentCmd::CspSweep { seed, count, n_max, density, ks, templates, full_subsets, pool } => {
            let cfg = CspSweepConfig {
                seed,
                count,
                n_max,
                density,
                ks,
                templates,
                full_subsets,
                budget: pool.budget(),
                jobs: pool.jobs(),
            };
            let rows = csp_sweep(&cfg, command)?;
            write_report(&pool.out_dir, "csp_sweep", command, &rows, &summarize_csp_sweep(&rows))?
        }
    };
    Ok(Outcome::Json(doc, EXIT_DONE))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let command = std::iter::once("prooflab".to_string())
        .chain(args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()))
        .collect::<Vec<_>>()
        .join(" ");
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_DONE };
        }
    };
    info!("running {command}");
    match run(cli.cmd, &command) {
        Ok(Outcome::Json(v, code)) => {
            emit(&(serde_json::to_string_pretty(&v).expect("values serialize") + "\n"));
            code
        }
        Ok(Outcome::Text(s)) => {
            emit(&s);
            if !s.ends_with('\n') {
                emit("\n");
            }
            EXIT_DONE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

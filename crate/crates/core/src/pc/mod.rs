//! Multilinear polynomials and the degree-bounded monomial-PC and PC
//! saturation engines.
//!
//! A refutation degree is never reported below 1: a system containing a
//! nonzero constant is refuted at degree 1.

mod arith;
mod basis;
mod engine;
mod poly;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use arith::{Arith, FpArith, QArith};
use engine::Engine;

pub use basis::Basis;
pub use engine::SaturationStats;
pub use poly::{multlin, Monomial, PolySystem, Polynomial, RawPolynomial};

use crate::algebra::Field;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum EngineKind {
    #[serde(rename = "monpc")]
    MonPc,
    #[serde(rename = "pc")]
    Pc,
}

impl FromStr for EngineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monpc" => Ok(EngineKind::MonPc),
            "pc" => Ok(EngineKind::Pc),
            _ => Err(Error::InvalidInput(format!("unknown engine {s:?} (expected monpc or pc)"))),
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineKind::MonPc => "monpc",
            EngineKind::Pc => "pc",
        })
    }
}

/// How PC extracts the space of span elements below the degree bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SubDegree {
    /// Gram projection over the rationals, elimination over prime fields.
    #[default]
    Auto,
    /// Solve `M x = p` with the top-degree coefficients of `p` forced to zero,
    /// then compress the solution generators with `N N^T`. Rationals only.
    Gram,
    /// Read the space off the reduced echelon form.
    Echelon,
}

impl FromStr for SubDegree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SubDegree::Auto),
            "gram" => Ok(SubDegree::Gram),
            "echelon" => Ok(SubDegree::Echelon),
            _ => Err(Error::InvalidInput(format!("unknown sub-degree mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SaturationOptions {
    pub deadline: Option<Instant>,
    pub subdegree: SubDegree,
    /// Abort with `ResourceLimit` once this many monomials have been indexed.
    pub max_columns: Option<usize>,
    /// Abort with `ResourceLimit` once the echelon rows hold this many entries.
    pub max_entries: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Saturation {
    pub refuted: bool,
    pub basis: Basis,
    pub stats: SaturationStats,
}

fn check(sys: &PolySystem, k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidInput("degree bound must be at least 1".into()));
    }
    if !sys.booleanity {
        return Err(Error::Unsupported("the engines work modulo the booleanity axioms".into()));
    }
    sys.field.validate()?;
    for (i, p) in sys.axioms.iter().enumerate() {
        if p.field() != sys.field {
            return Err(Error::FieldMismatch(format!("axiom {i} is over {}, system over {}", p.field(), sys.field)));
        }
        if p.degree().is_some_and(|d| d > k) {
            return Err(Error::InvalidInput(format!(
                "degree overflow: axiom {i} has degree {} > {k}",
                p.degree().unwrap()
            )));
        }
        if p.max_var().is_some_and(|x| x >= sys.num_vars) {
            return Err(Error::InvalidInput(format!("axiom {i} uses a variable outside 0..{}", sys.num_vars)));
        }
    }
    Ok(())
}

fn run<A: Arith>(
    ar: A,
    sys: &PolySystem,
    k: usize,
    kind: EngineKind,
    opts: &SaturationOptions,
    seed: Option<&Basis>,
) -> Result<Saturation> {
    let mut e = Engine::new(ar, k, sys.num_vars, opts.deadline, (opts.max_columns, opts.max_entries));
    if let Some(b) = seed {
        e.seed(b)?;
    }
    e.init(&sys.axioms)?;
    match kind {
        EngineKind::MonPc => e.stabilize()?,
        EngineKind::Pc => {
            let gram = match opts.subdegree {
                SubDegree::Gram => true,
                SubDegree::Echelon => false,
                SubDegree::Auto => sys.field == Field::Rationals,
            };
            e.pc_loop(gram)?
        }
    }
    let (refuted, basis, stats) = e.finish();
    Ok(Saturation { refuted, basis, stats })
}

fn dispatch(
    sys: &PolySystem,
    k: usize,
    kind: EngineKind,
    opts: &SaturationOptions,
    seed: Option<&Basis>,
) -> Result<Saturation> {
    check(sys, k)?;
    if opts.subdegree == SubDegree::Gram && sys.field != Field::Rationals && kind == EngineKind::Pc {
        return Err(Error::Unsupported("Gram sub-degree extraction requires the rationals".into()));
    }
    match sys.field {
        Field::Rationals => run(QArith, sys, k, kind, opts, seed),
        Field::Prime { p } => run(FpArith { p }, sys, k, kind, opts, seed),
    }
}

/// Degree-`k` monomial-PC closure: all axioms lifted by monomials to degree
/// `k`, closed under multiplying span monomials of degree below `k` by
/// variables. Refuted iff `1` lies in the span.
pub fn monpc_saturate(sys: &PolySystem, k: usize) -> Result<Saturation> {
    monpc_saturate_with(sys, k, &SaturationOptions::default())
}

pub fn monpc_saturate_with(sys: &PolySystem, k: usize, opts: &SaturationOptions) -> Result<Saturation> {
    dispatch(sys, k, EngineKind::MonPc, opts, None)
}

/// Degree-`k` PC closure: as monomial-PC, but every span element of degree
/// below `k` is multiplied by every variable.
pub fn pc_saturate(sys: &PolySystem, k: usize) -> Result<Saturation> {
    pc_saturate_with(sys, k, &SaturationOptions::default())
}

pub fn pc_saturate_with(sys: &PolySystem, k: usize, opts: &SaturationOptions) -> Result<Saturation> {
    dispatch(sys, k, EngineKind::Pc, opts, None)
}

pub fn saturate(sys: &PolySystem, k: usize, kind: EngineKind, opts: &SaturationOptions) -> Result<Saturation> {
    dispatch(sys, k, kind, opts, None)
}

/// Saturates `sys` on top of an existing saturation `base` of the same
/// degree and field. Because saturation is a closure operator, the result
/// equals saturating the union of `base`'s axioms with `sys`.
pub fn extend_saturation(
    base: &Saturation,
    sys: &PolySystem,
    kind: EngineKind,
    opts: &SaturationOptions,
) -> Result<Saturation> {
    let k = base.basis.degree();
    if base.basis.field() != sys.field {
        return Err(Error::FieldMismatch("base saturation is over a different field".into()));
    }
    if base.basis.num_vars() > sys.num_vars {
        return Err(Error::InvalidInput("extension has fewer variables than the base".into()));
    }
    dispatch(sys, k, kind, opts, Some(&base.basis))
}

/// Smallest `k <= k_max` at which the engine refutes `sys`. The search starts
/// at the largest axiom degree, since lower bounds are not admissible.
pub fn min_refutation_degree(sys: &PolySystem, kind: EngineKind, k_max: usize) -> Result<Option<usize>> {
    min_refutation_degree_with(sys, kind, k_max, &SaturationOptions::default())
}

pub fn min_refutation_degree_with(
    sys: &PolySystem,
    kind: EngineKind,
    k_max: usize,
    opts: &SaturationOptions,
) -> Result<Option<usize>> {
    if k_max < 1 {
        return Err(Error::InvalidInput("k_max must be at least 1".into()));
    }
    if sys.axioms.iter().any(Polynomial::is_nonzero_constant) {
        return Ok(Some(1));
    }
    for k in sys.max_degree().max(1)..=k_max {
        if saturate(sys, k, kind, opts)?.refuted {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

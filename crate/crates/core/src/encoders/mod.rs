//! Encoders from reachability, isomorphism and CSP instances to CNFs and
//! polynomial systems.

mod csp;
mod iso;

pub use csp::{
    encode_kconsistency_cnf, encode_kconsistency_cnf_with, k_consistency, k_consistency_with, KConsistency,
    KConsistencyOptions, PartialMap,
};
pub use iso::{encode_iso_cnf, encode_iso_poly, encode_iso_poly_colored, ClassMismatch};

use crate::error::{Error, Result};
use crate::resolution::{Clause, CnfFormula, Literal};

/// Horn CNF that is unsatisfiable iff `t` is reachable from `s`: variable
/// `v + 1` says "v is reachable", with `X_v -> X_w` per edge, `X_s` and
/// `not X_t`.
pub fn encode_nonreach(n: u32, edges: &[(u32, u32)], s: u32, t: u32) -> Result<CnfFormula> {
    if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= n || b >= n) {
        return Err(Error::InvalidInput(format!("edge ({a}, {b}) out of range for {n} vertices")));
    }
    if s >= n || t >= n {
        return Err(Error::InvalidInput(format!("endpoints {s}, {t} out of range for {n} vertices")));
    }
    let mut f = CnfFormula::new(n);
    for &(a, b) in edges {
        f.add(Clause::new([Literal::neg(a + 1), Literal::pos(b + 1)]));
    }
    f.add(Clause::new([Literal::pos(s + 1)]));
    f.add(Clause::new([Literal::neg(t + 1)]));
    Ok(f)
}

//! Clausal formulas, Horn unit propagation and width-bounded resolution.

mod cnf;
mod horn;
mod kres;
mod twosat;

pub use cnf::{Clause, CnfFormula, Literal};
pub use horn::{horn_refute, HornResult};
pub use kres::{kres_refutes, kres_saturate, kres_saturate_with, KresOptions, KresResult, WidePolicy};
pub use twosat::two_sat_oracle;

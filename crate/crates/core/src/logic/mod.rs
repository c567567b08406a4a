//! Finite structures, posLFP sentences, a fixpoint evaluator and the
//! compiler from model checking to Horn formulas.

mod eval;
mod formula;
mod horn;
mod structure;

pub use eval::eval_poslfp;
pub use formula::{Formula, LfpFormula, Term};
pub use horn::{horn_encode, HornEncoding};
pub use structure::{RelStructure, Relation};

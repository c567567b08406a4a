//! Exact arithmetic and linear algebra over the rationals and prime fields.

mod field;
mod matrix;
mod rat;
mod solve;

pub use field::{is_prime, Field, Scalar};
pub use matrix::{Matrix, Vector};
pub use rat::Rat;
pub use solve::{
    compress_image, gauss_solve, gram_solvable, in_column_space, kernel_generators, orbit_solve, rank,
    same_column_space, Solution,
};

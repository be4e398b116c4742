//! Exact integer linear algebra built on Smith and Hermite normal forms.

mod hermite;
mod matrix;
pub mod rational;
mod smith;

pub use hermite::{hermite_normal_form, is_unimodular, same_row_lattice, HermiteForm};
pub use matrix::ExactMatrix;
pub use smith::{
    lattice_index, quotient_invariants, smith_normal_form, solve_integer, SmithDecomposition,
};

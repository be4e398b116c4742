//! Exact combinatorics of associated graded rings along valuations.
//!
//! Everything happens at the level of exponent matrices and value groups.
//! A monomial extension is rewritten into strong monomial form, after which
//! the coset representatives of the value-group quotient give the free
//! graded-module decomposition of rank `e·f`. The lattice and monoid
//! algorithms underneath are exact.
//!
//! The `pipeline` module chains these steps over a JSON scenario; the
//! `ledger` and `semigroup` modules cover ramification bookkeeping and
//! value-semigroup arithmetic.

pub mod corpus;
pub mod encoding;
pub mod engine;
pub mod error;
pub mod extension;
pub mod graded;
pub mod lattice;
pub mod ledger;
pub mod monoid;
pub mod ordered;
pub mod pipeline;
pub mod semigroup;

pub use error::Error;

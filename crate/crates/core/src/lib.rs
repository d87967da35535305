//! Exact character theory and factorization counting for `GL_n(F_q)`.

pub mod arith;
pub mod counting;
pub mod cyclotomic;
pub mod error;
pub mod field_tower;
pub mod green_chars;
pub mod matrix_group;
pub mod oracle;
pub mod partitions_sym;
pub mod poly_irr;

pub use error::{Error, Result};

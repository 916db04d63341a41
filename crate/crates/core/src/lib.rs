//! Exact combinatorics of categories of partitions and the integration theory
//! of the associated easy quantum groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`partitions`]: colored two-row set partitions, lattice operations, diagram calculus
//! * [`categories`]: named categories of partitions as membership predicates
//! * [`linmap`]: the functor `π -> T_π` and its signed twist
//! * [`weingarten`]: Gram and Weingarten matrices, integration, determinant formulas
//! * [`freeprob`]: classical and free cumulants, limit laws
//! * [`fusion`]: fusion rings of free quantum groups
//! * [`haarmc`]: Monte Carlo over classical groups
//! * [`cli`]: the `easyqg` command line

pub mod categories;
pub mod cli;
pub mod error;
pub mod freeprob;
pub mod fusion;
pub mod haarmc;
pub mod linalg;
pub mod linmap;
pub mod partitions;
pub mod weingarten;

pub use error::{Error, Result};

/// Exact rational scalar used throughout.
pub type Q = num_rational::BigRational;

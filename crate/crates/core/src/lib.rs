//! Conjugates, standard solutions and intrinsic dimension in concrete
//! strict tensor C*-categories.
//!
//! The crate works with small finite models: finite dimensional Hilbert
//! spaces, unitary representations of finite groups, and "free" categories
//! specified by explicit hom data (for example the fundamental
//! representation of SU_q(2)). On top of these it solves and verifies the
//! conjugate equations, standardizes solutions, computes dimensions, and
//! checks the surrounding structure: Jones projections, braidings, Q-systems,
//! fusion rings and finite dimensional inclusions.

pub mod braiding;
pub mod builtins;
pub mod category;
pub mod cli;
pub mod conjugation;
pub mod error;
pub mod fusion;
pub mod inclusions;
pub mod jones;
pub mod linalg;
pub mod qsystem;
pub mod random;
pub mod tol;

pub use error::{Error, Result};

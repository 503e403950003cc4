//! Exact computations with finitely presented multiparameter persistence
//! modules over prime fields: step modules on rational grids, shifts and
//! smoothing, interleavings, decomposition, Cauchy limits and stability
//! checks.

#![no_std]

extern crate alloc;

pub mod calculus;
pub mod decompose;
pub mod error;
pub mod factor;
pub mod field;
pub mod grid;
pub mod hom;
pub mod library;
pub mod limits;
pub mod matrix;
pub mod metric;
pub mod morphism;
pub mod pairs;
pub mod pipelines;
pub mod rational;
pub mod search;
pub mod stability;
pub mod stepmodule;

pub use error::{Error, Result};
pub use field::Fp;
pub use grid::Grid;
pub use matrix::Matrix;
pub use morphism::Morphism;
pub use rational::Rat;
pub use search::SearchBudget;
pub use stepmodule::StepModule;

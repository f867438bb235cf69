//! Tree-indexed power-series solutions of the gauged (mean-subtracted) mKdV
//! equation on the torus, computed in truncated Fourier space.
//!
//! The crate is organised bottom-up:
//!
//! - [`spectral`]: Fourier coefficient sequences, weighted `l^{s,p}` norms,
//!   truncation, mass and the gauge phase.
//! - [`tree`]: ordered ternary trees indexing the expansion.
//! - [`exp_poly`]: exact calculus on sums of `c·s^m·e^{iωs}`.
//! - [`resonance`]: the resonance function, admissible index assignments and
//!   per-assignment expansion coefficients.
//! - [`multilinear`]: oscillatory simplex integrals, tree operators, the
//!   positive majorant and the kernel norm scans.
//! - [`series`]: assembly of the series, convergence certificate and ODE
//!   residual.
//! - [`oracle`]: an independent interaction-picture RK4 integrator.
//!
//! Data-parallel loops go through [`par`], which maps to rayon when the
//! `parallel` feature is enabled and to plain iterators otherwise.

// `!(x > 0.0)` guards below are written that way so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exp_poly;
pub mod initial;
pub mod multilinear;
pub mod numerics;
pub mod oracle;
pub mod par;
pub mod resonance;
pub mod series;
pub mod spectral;
pub mod tree;

pub use error::{Error, Result};
pub use exp_poly::ExpPoly;
pub use num_complex::Complex64;
pub use oracle::{Equation, OracleConfig, Trajectory};
pub use resonance::IndexAssignment;
pub use series::{SeriesConfig, SeriesSolution};
pub use spectral::{CoeffSeq, NormIndex};
pub use tree::TernaryTree;

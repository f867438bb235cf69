//! Multilinear tree operators and the estimates that control them.
//!
//! - [`integral`]: the oscillatory integral `I_T(t, j)` over the tree's order
//!   polytope, evaluated exactly, and its decay bounds.
//! - [`operator`]: the tree operator `S_T` (by assignment enumeration and by
//!   symbolic recursion over subtrees) and the positive majorant `S̃`.
//! - [`kernel`]: the trilinear kernels `m`, `m₁`, `m₂` and lattice norm scans.

pub mod integral;
pub mod kernel;
pub mod operator;

pub use integral::{integral_bound, integral_exact, integral_poly, parity_bounds, IntegralMemo};
pub use kernel::{kernel_norm_scan, kernel_value, majorant_bound_constant, scan_rows, Kernel, NormScanRow, Pair};
pub use operator::{
    apply_tree_operator, majorant_apply, majorant_apply_with_cutoff, tree_majorant, tree_majorant_by_assignments,
    TreeEvaluator, TreeTimeFunction,
};

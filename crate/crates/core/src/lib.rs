//! # cpinf
//!
//! An exact-arithmetic workbench for a small corner of derived algebraic
//! geometry. It computes
//!
//! * Ext groups between complexes of line bundles on the non-reduced curve
//!   `{s²u = 0} ⊂ P¹ × P¹`, including chain-map lifts and Yoneda products,
//! * line-bundle cohomology on `P¹`, `P¹ × P¹` and ruled surfaces
//!   `P(O ⊕ O(a))`, and Ext between pushforwards from a divisor,
//! * mutations of exceptional collections on the level of Euler forms,
//! * graded Hom spaces of quiver path algebras with relations, and Ext over
//!   small finite-dimensional graded algebras through the bar complex.
//!
//! All arithmetic is exact (arbitrary-precision rationals). Every dimension
//! that comes out of a truncated infinite complex is recomputed at a larger
//! truncation and rejected if it moves.
//!
//! ```
//! use cpinf::curve_homalg::{ext_dims, build_resolution_p};
//!
//! let p = build_resolution_p(-1, 6);
//! let deep = build_resolution_p(-1, 10);
//! let dims = ext_dims(&p, &deep, 4, 12).unwrap();
//! assert_eq!(dims.to_vec(0, 4), vec![1, 1, 2, 2, 3]);
//! ```

pub mod cli;
pub mod curve_homalg;
pub mod exact_linalg;
pub mod monomial_geometry;
pub mod mutation_engine;
pub mod quiver_algebra;

mod graded;

pub use graded::GradedDims;

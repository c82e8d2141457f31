//! Polyhedral machinery for complex local zeta functions.
//!
//! For a complex polynomial `f` that is non-degenerate with respect to its
//! Newton polyhedron, the poles of the local zeta function
//! `Z_phi(s, f) = \int phi(x) |f(x)|^{2s} |dx|` lie in arithmetic
//! progressions read off the facet normals of `NP(f)`, together with the
//! half-integer family `-(1+N)/2`. This crate computes that refined
//! candidate list and everything it rests on:
//!
//! - exact Laurent polynomials over Gaussian rationals ([`poly`], [`parse`]),
//! - Newton polyhedra with full face lattices ([`newton`]),
//! - dual fans, simplicial subdivisions, dual cones, Hilbert bases,
//!   regularization and toric chart data ([`fan`]),
//! - monomial maps, Jacobians and vertex factorization ([`monomial`]),
//! - non-degeneracy verdicts, exact for vertices and edges ([`nondeg`]),
//! - candidate pole sets with provenance and order bounds ([`poles`]),
//! - a desk-scale numerical validator by polar quadrature ([`zetanum`]).
//!
//! All polyhedral computation is exact rational arithmetic; floating point
//! appears only in the numerical witness search and the quadrature.

pub mod fan;
pub mod gauss;
pub mod linalg;
pub mod lp;
pub mod monomial;
pub mod newton;
pub mod nondeg;
pub mod parse;
pub mod poles;
pub mod poly;
pub mod zetanum;

pub use gauss::GaussianRational;
pub use parse::parse;
pub use poly::{ExponentVector, LaurentPolynomial, Region};

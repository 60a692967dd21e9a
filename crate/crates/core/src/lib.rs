//! Exact combinatorics of snake graphs and polygon cluster algebras.
//!
//! The crate computes cluster-variable expansions for type A (convex
//! polygon) surface cluster algebras through three independent routes:
//!
//! * a determinantal formula over the weighted biadjacency matrix of the
//!   snake graph attached to an arc ([`polygon::expand_det`]),
//! * direct perfect-matching enumeration of the same snake graph
//!   ([`polygon::expand_matchings`]),
//! * seed mutation along flip sequences ([`polygon::expand_mutation_oracle`]).
//!
//! The supporting layers (sparse integer polynomials, loopless multigraphs
//! with orientations, pfaffians by the partition-sum definition, exact
//! determinants, snake graph construction) are exposed as modules so each
//! piece can be exercised on its own.
//!
//! Everything here is pure computation over owned data: the crate is
//! `no_std` (with `alloc`) and all values are immutable once built.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod graph;
pub mod linalg;
pub mod matching;
pub mod pfaffian;
pub mod poly;
pub mod polygon;
pub mod snake;

pub use poly::{LaurentExpr, Monomial, PolyError, Polynomial, VarId, VarPool};

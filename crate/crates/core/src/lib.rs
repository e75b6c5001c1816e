//! Non-rectangular convolution.
//!
//! Computes the anti-diagonal partial sums
//! `c_k = sum_{i+j=k, (i,j) in P} a_i * b_j` over the lattice points of a
//! convex polygon `P`, using a self-contained number-theoretic transform, and
//! uses them to count and enumerate arithmetic-progression patterns in
//! strings (3-sub-cadences, 3-cadences and `(a,b,c)`-partial-`k`-cadences).
//!
//! Module map:
//! - [`ntt`]: prime/root search and exact modular convolution.
//! - [`geometry`]: exact rational points and convex polygons with boundary flags.
//! - [`polyconv`]: diagonal sums over rectangles, triangles and convex polygons.
//! - [`cadence`]: the string layer.
//! - [`oracle`]: brute-force references and seeded instance generators.
//! - [`cli`]: the `nrconv` command-line front end.

pub mod cadence;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod ntt;
pub mod oracle;
pub mod polyconv;

pub use error::{Error, Result};

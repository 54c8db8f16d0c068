//! Exact symbolic and numeric toolkit for stratified nilpotent (Carnot) groups.
//!
//! The crate builds graded Lie algebras from exact structure constants
//! (hand-entered or free nilpotent via a Hall basis), realises the group in
//! exponential coordinates of the second kind, computes the Tanaka
//! prolongation, the extremal polynomials `P_j^v` and their structure
//! identities, and uses them to detect abnormal and Goh extremals. A small
//! fixed-step integrator covers horizontal curves, adjoint equations and
//! normal extremals.
//!
//! All algebra is exact over the rationals; floating point only appears in
//! [`dynamics`] and in numeric rank decisions of [`abnormal`].

pub mod abnormal;
pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod extremal;
pub mod free_lie;
pub mod group;
pub mod io;
pub mod linalg;
pub mod poly;
pub mod prolongation;
pub mod rational;

pub use algebra::{GradedLieAlgebra, MultiIndex, Violation};
pub use error::{Error, Result};
pub use extremal::ExtremalFamily;
pub use poly::{Poly, PolyVectorField};
pub use prolongation::ProlongedAlgebra;
pub use rational::Rational;

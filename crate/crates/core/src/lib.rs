//! Search for, and exact verification of, certificates of non-negativity for
//! multivariate polynomials over possibly unbounded basic semialgebraic sets.
//!
//! * [`poly`]: exact sparse polynomials, homogenization and compactification.
//! * [`lp`]: exact rational feasibility simplex with Farkas rays.
//! * [`sets`]: set descriptions, horizon cones and the horizon-cone conditions.
//! * [`hierarchy`]: the Pólya-type LP hierarchy and certificate verification.
//! * [`reductions`]: equality, inequality and non-conic lifts, plus the
//!   counterexample construction for sets that violate the horizon condition.
//! * [`quadcert`]: degree-2 certificates `σ + λq + μh` with exact PSD checks.

pub mod hierarchy;
pub mod lp;
pub mod poly;
pub mod quadcert;
pub mod rational;
pub mod reductions;
pub mod sets;

pub use poly::{Monomial, Polynomial};
pub use rational::Rational;

//! Symbolic toolkit for unit-additivity of commutative rings.
//!
//! A ring is unit-additive when every sum of two units is again a unit or
//! nilpotent. This crate decides (or bounds) that property for presented
//! rings, computes the multiplicative-set tower and unit-additivity
//! dimension, constructs the unit-additive closure as a localization, and
//! backs every verdict with a replayable certificate. A brute-force oracle
//! over small finite rings cross-checks the symbolic machinery.
//!
//! Module layout:
//! - [`scalar`]: exact coefficient fields (rationals, prime fields, fraction
//!   fields of polynomial rings).
//! - [`poly`]: sparse multivariate polynomials, monomial orders, substitution,
//!   weighted gradings.
//! - [`groebner`]: Buchberger with cofactor tracking, normal forms, radical
//!   membership, elimination.
//! - [`ring`]: presented rings and their elements; zero/nilpotent/unit tests
//!   with certificates.
//! - [`cert`]: verdicts, certificates, and the replay checker.
//! - [`decide`]: the rule pipeline and bounded counterexample search.
//! - [`tower`]: the W/V tower, unit-additivity dimension, closure, chain
//!   rings.
//! - [`finite`]: exhaustive finite-ring oracle and its audits.
//! - [`parse`]: ring-description DSL and polynomial syntax.
//! - [`cli`]: subcommand dispatch shared by the binary and tests.

pub mod cert;
pub mod cli;
pub mod decide;
pub mod error;
pub mod finite;
pub mod groebner;
pub mod parse;
pub mod poly;
pub mod ring;
pub mod scalar;
pub mod testsupport;
pub mod tower;

pub use error::UnitalError;

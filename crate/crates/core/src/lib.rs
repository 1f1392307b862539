//! Lottery systems, covering designs and Turán systems.
//!
//! An `(n, k, r, p)`-lottery system is a family of `k`-subsets of an
//! `n`-set such that every `p`-subset meets some member in at least `r`
//! elements. Coverings are the case `p = r`, Turán systems the case `k = r`.
//!
//! The crate is organized around [`SetSystem`], a canonical uniform block
//! system that every module consumes and produces:
//!
//! - [`setsystem`]: shadows, complements, blow-ups, containment tests.
//! - [`modular`]: exact Vandermonde determinants and unit solving over `Z_N`.
//! - [`construct`]: transversal designs, greedy coverings, patch families and
//!   the blow-up composition `H -> H_N`.
//! - [`verify`]: exhaustive checkers returning counterexample witnesses.
//! - [`solve`]: exact branch-and-bound minimization and density reports.
//! - [`format`] and [`cli`]: the text/JSON system file and command-line front end.

pub mod cli;
pub mod combin;
pub mod construct;
pub mod error;
pub mod format;
pub mod modular;
pub mod setsystem;
pub mod solve;
pub mod verify;

pub use construct::{compose, gdd, greedy_covering, patches, CompositionReport, PartiteLayout};
pub use error::{Error, Result};
pub use setsystem::{ForbiddenFamily, Params, SetSystem, Vertex};
pub use solve::{BoundPair, Budget, DensityReport};
pub use verify::Verdict;

//! Graphs of cyclic submodules over trivial extension algebras `F_p ⋉ F_p^n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: exact linear algebra over `F_p`.
//! * [`trivext`]: the algebra, its ideals and finite-dimensional modules.
//! * [`graph`]: graphs of cyclic submodules, combinatorial dimensions and the
//!   finite categorical constructions on triples and graphs.
//! * [`oracle`]: an endomorphism-algebra based Krull-Schmidt oracle.
//! * [`towers`]: admissible sequences, the recursive module towers and the
//!   search harness.
//! * [`zdomain`]: the same graphs over the integers.
//! * [`suites`]: seeded randomized checks shared by the CLI and the tests.

mod error;

pub mod graph;
pub mod linalg;
pub mod oracle;
pub mod suites;
pub mod towers;
pub mod trivext;
pub mod zdomain;

pub use error::{Error, Result};

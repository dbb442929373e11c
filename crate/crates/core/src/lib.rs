//! Exact Chow-ring calculus for matroid fans, the bipermutohedral fan and
//! combinatorial projective bundles.
//!
//! Everything is computed over the rationals with no tolerance. The crate is
//! `no_std` and only needs an allocator; IO, file formats and the command line
//! live in the companion `tautring` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod biflag_calculus;
pub mod bundle;
pub mod check;
pub mod chow;
pub mod classes;
pub mod error;
pub mod fan;
pub mod kahler;
pub mod linalg;
pub mod matroid;
pub mod rational;
pub mod subset;

pub use error::{Error, Result};
pub use rational::Rational;
pub use subset::Subset;

//! File formats, reports and subcommand drivers on top of [`tautring_core`].

pub use tautring_core as core;

pub mod commands;
pub mod error;
pub mod fan_dump;
pub mod input;
pub mod report;

pub use error::InputError;
pub use input::MatroidSpec;
pub use report::{Status, VerificationReport};

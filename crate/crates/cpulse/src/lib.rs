//! Published composite pulse sequences, a sequence file format and the
//! `cpulse` command-line tool, on top of [`cpulse_core`].
//!
//! All angles at this boundary are in units of π; the core works in radians.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod expr;
pub mod file;
pub mod verify;

pub use catalog::{Catalog, Filter, NamedSequence, Record};
pub use error::{Error, Result};
pub use file::SequenceFile;
pub use verify::{verify, verify_all, Report, Subject, VerifyOptions};

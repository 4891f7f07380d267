//! File formats, verification suites and the `cpb` command line on top of
//! [`cpb_core`].

pub mod cli;
pub mod error;
pub mod formats;
pub mod records;
pub mod sweep;
pub mod verify;

pub use cli::{run, run_with};
pub use error::{CliError, Result};

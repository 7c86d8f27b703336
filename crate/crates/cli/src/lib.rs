//! Front end for `preserve-core`: JSON file formats, reports and the
//! `preserve` subcommands.
//!
//! Exit codes: 0 positive verdict, 1 negative verdict, 2 inconclusive or out
//! of scope, 64 usage error, 65 malformed or unreadable input.

pub mod commands;
pub mod error;
pub mod files;
pub mod report;

pub use commands::{run, Cli};
pub use error::{CliError, EXIT_DATA, EXIT_USAGE};

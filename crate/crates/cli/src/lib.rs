//! Library side of the `shnr` command: operator files, reports and
//! campaigns. The binary only parses flags and maps errors to exit codes.

pub mod campaign;
pub mod error;
pub mod io;
pub mod report;

pub use error::CliError;

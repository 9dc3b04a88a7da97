//! Command-line front end for heightlab: JSON system files in, JSON or CSV
//! tables out.

pub mod commands;
pub mod error;
pub mod report;
pub mod schema;

pub use commands::{run, run_args, Cli, Command, Context, Options};
pub use error::CliError;
pub use report::Report;
pub use schema::{parse_point, SystemDescription, SystemSpec};

//! Command-line front end, configuration ingestion and result emission.

pub mod config;
pub mod emit;
pub mod execute;
pub mod literal;
pub mod runspec;

pub use emit::{emit, parse_json, render};
pub use execute::{execute, Payload, ResultEnvelope};
pub use runspec::{parse_args, Command, Format, RunSpec};

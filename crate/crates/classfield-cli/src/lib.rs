//! Command-line orchestration for `classfield`: subcommands, output
//! rendering and the built-in verification batteries.

pub mod checks;
pub mod commands;
pub mod reference;

/// JSON schema that every `--format json` output validates against.
pub const OUTPUT_SCHEMA: &str = include_str!("../schema/output.schema.json");

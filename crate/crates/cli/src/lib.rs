//! Front end for `toricount`: vector-system input, subcommands, and text,
//! JSON and LaTeX renderings.

pub mod commands;
pub mod input;
pub mod json;
pub mod render;

pub use commands::{CliError, Engine, Format, Outcome};
pub use input::{parse_vectors, InputError, ProblemSpec};

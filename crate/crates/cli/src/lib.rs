//! Command-line front end for jetcalc: the expression DSL, equation files,
//! subcommands and their reports.

pub mod commands;
pub mod eqfile;
pub mod parse;
pub mod report;

pub use commands::{run, Cli, Command, KawaharaCommand, Outcome};
pub use eqfile::{parse_equation_file, parse_f_mode, EquationFile, InputError};
pub use parse::{parse_expr, parse_series, SyntaxError};
pub use report::Report;

//! Command-line front end for the functional-dependency toolkit.
//!
//! The schema file format, the report structure, and the dispatcher live in
//! their own modules; `main` is a thin wrapper over [`run`].

pub mod parse;
pub mod report;
pub mod run;

pub use parse::{
    parse_decomposition_file, parse_schema_file, render_decomposition, render_schema,
    DecompositionError, ParseError, SchemaDocument,
};
pub use report::{AnalysisReport, ClosureSection, SchemaSection, SpuriousDemo, VerificationSection};
pub use run::{run, Cli, Command, Target, EXIT_CLEAN, EXIT_FINDING, EXIT_INPUT, EXIT_LIMIT};

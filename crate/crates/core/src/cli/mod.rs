//! Parsing, serialization, generators and the commands of the binary.

pub mod commands;
pub mod format;
pub mod generate;

pub use commands::{run, Cli, Output};
pub use format::{parse_graph_file, serialize_graph_file, GraphFile};
pub use generate::{generate_instance, named_pattern, Instance, Params};

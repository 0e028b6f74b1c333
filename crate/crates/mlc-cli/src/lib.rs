//! Library side of the `mlc` command-line tool: corpus generation, the
//! bench report, and the command implementations.

pub mod commands;
pub mod corpus;
pub mod report;

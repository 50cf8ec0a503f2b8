//! Library side of the srti command-line tool: file helpers and the
//! benchmark pipeline, kept callable so integration tests can drive them
//! directly.

pub mod files;
pub mod pipeline;

//! Library surface of the command-line tool: the report model and the
//! on-disk cache, shared between the binary and its integration tests.

pub mod cache;
pub mod report;

//! Library surface of the command-line front end: problem-file JSON and SVG
//! plotting, shared with the integration tests.

pub mod json;
pub mod svg;

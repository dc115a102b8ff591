//! Library surface of the `sqw` command-line tool: the expression parser,
//! the JSON wire formats, and the randomized verification suites. The
//! binary in `main.rs` is a thin dispatcher over these.

pub mod output;
pub mod parser;
pub mod verify;

//! Holds the `acceptance` test target, which exercises both the library and
//! the command-line driver. Its package sorts after the others, so
//! `cargo test --workspace` runs the report last.

//! Compiles the code listings of the `book/` guide as doc-tests.
//!
//! mdbook cannot link external crates when testing, so each chapter is
//! pulled in here as the docs of an empty module and `cargo test --doc`
//! runs its `rust` blocks against the real library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/amplitudes.md")]
pub mod amplitudes {}

#[doc = include_str!("../../../book/src/interferometer.md")]
pub mod interferometer {}

#[doc = include_str!("../../../book/src/measurement.md")]
pub mod measurement {}

#[doc = include_str!("../../../book/src/hidden_variables.md")]
pub mod hidden_variables {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

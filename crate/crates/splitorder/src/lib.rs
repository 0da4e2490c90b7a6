//! File formats, seeded instance generators and the command-line driver
//! built on `splitorder-core`.

pub mod cli;
pub mod format;
pub mod generate;

pub use cli::run;

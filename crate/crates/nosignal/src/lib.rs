//! File formats and the `nosignal` command line on top of `nosignal-core`.

pub mod cli;
pub mod format;
pub mod report;

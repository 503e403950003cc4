//! File formats and the command-line front end for `obspers-core`.

pub mod cli;
pub mod format;

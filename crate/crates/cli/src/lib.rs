//! Library surface of the `mnac` command line tool: flat-file run
//! configuration and the five CSV-producing commands.

pub mod commands;
pub mod runconfig;

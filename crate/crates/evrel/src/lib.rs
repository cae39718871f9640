//! File formats and the command-line driver around `evrel-core`: JSON Lines
//! corpora, plain-text checkpoints, `key = value` configs, RED conversion
//! and JSON reports.

pub mod checkpoint;
pub mod config;
pub mod corpus;
pub mod red;
pub mod report;

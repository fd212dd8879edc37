//! File formats, the command-line driver and the acceptance suite for the
//! `iontrap` simulator.

pub mod acceptance;
pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
pub mod schema;

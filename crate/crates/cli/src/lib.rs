//! Verification suites, slice exports and decomposition reports for the
//! `sectorial` command.

pub mod commands;
pub mod config;
pub mod grid;
pub mod verify;

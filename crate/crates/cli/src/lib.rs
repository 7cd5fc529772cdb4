//! Configuration, command execution and record output for the `cmcvol` binary.

pub mod commands;
pub mod config;
pub mod record;

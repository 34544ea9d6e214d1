// SPDX-License-Identifier: MIT

//! Experiment suites, serialization and output for the `qnet` command.

pub mod io;
pub mod suite;
pub mod suites;

pub use suite::{registry, write_outputs, Registry, RunConfig, Suite, Table};

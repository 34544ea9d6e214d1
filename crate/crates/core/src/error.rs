// SPDX-License-Identifier: MIT

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNet(String),
    #[error("input shape: expected length {expected}, got {got}")]
    InputShape { expected: usize, got: usize },
    #[error("composition: front expects {front_in} inputs, back produces {back_out}")]
    Composition { front_in: usize, back_out: usize },
    #[error("depth: {0}")]
    Depth(String),
    #[error("shape: {0}")]
    Shape(String),
    #[error("invalid activation: {0}")]
    InvalidActivation(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("measure: {0}")]
    Measure(String),
    #[error("no contraction: {0}")]
    NoContraction(String),
    #[error("schedule: {0}")]
    Schedule(String),
    #[error("budget: {0}")]
    Budget(String),
    #[error("oracle domain: {0}")]
    OracleDomain(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

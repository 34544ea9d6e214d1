// SPDX-License-Identifier: MIT

//! Feed-forward network calculus, exact max networks, finite-instance
//! fixed-point oracles and multilevel fixed-point (MLFP) networks for
//! Q-functions of discounted Markov decision processes.

// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ann;
pub mod bellman;
pub mod calculus;
pub mod error;
pub mod fixed_point;
pub mod maxnet;
pub mod mlfp;
pub mod sparse;

pub use ann::{Activation, Ann, Arch, Layer};
pub use calculus::IdentityNet;
pub use error::{Error, Result};
pub use sparse::Csr;

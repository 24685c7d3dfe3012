//! Estimators for monotone probability distributions over the Boolean cube.
//!
//! The crate works on dense probability tables over `{0,1}^n`, stored as
//! `2^n` reals indexed by bitmask. It covers the full pipeline used to learn
//! such distributions from samples, estimate their distance to uniform and
//! their support size, together with the slack-removal decomposition those
//! estimators rest on and exact oracles for every sampled quantity.
//!
//! Modules:
//!
//! - [`cube`]: points, dominance, levels, intervals and exact binomial tables.
//! - [`dist`]: dense distributions, slack and level analytics, seeded sampling
//!   and generators (including the subcube-mixture families).
//! - [`structural`]: the forward slack-removal pass and its verifiers.
//! - [`estimators`]: the learner, the distance-to-uniform and support-size
//!   estimators, and the monotonicity tester.
//! - [`verify`]: numerical checks of the conditions the learner's schedule
//!   has to satisfy.
//! - [`lowerbound`]: subcube-mixture constructions and the binomial and
//!   collision computations behind them.
//!
//! The crate is `no_std` (it needs `alloc`). The `parallel` feature pulls in
//! `std` and rayon for data-parallel table computations; results do not
//! depend on the number of threads.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod cube;
pub mod dist;
mod error;
pub mod estimators;
pub mod lowerbound;
pub mod numeric;
pub mod structural;
pub mod verify;

pub use cube::{BinomialTable, CubePoint, MAX_DIM};
pub use dist::{DenseDistribution, SampleSet, SlackProfile};
pub use error::{Error, Result};

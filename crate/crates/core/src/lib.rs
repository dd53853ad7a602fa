//! Simulation and numerical verification of balanced urn schemes with
//! countably many colors.
//!
//! A balanced urn starts from a weight configuration `U_0` of total mass
//! `t > 0` and, at each step, draws a color with probability proportional to
//! its weight, then adds the drawn color's replacement row — a probability
//! measure, so the total mass grows by exactly one per step. The crate
//! provides:
//!
//! - [`kernel`]: replacement kernels (explicit row tables and generated
//!   infinite-support chains), row propagation, stationary distributions,
//!   geometric-ergodicity certificates and Doeblin minorization checks;
//! - [`urn`]: the urn process itself, plus exact finite-horizon laws of the
//!   color sequence over the rationals;
//! - [`rrt`]: weighted recursive trees (the skeleton of the branching
//!   construction), with exact shape enumeration at small sizes;
//! - [`bmc`]: branching Markov chains indexed by those trees, whose vertex
//!   colors reproduce the urn's draw sequence in distribution;
//! - [`analysis`]: the quantitative estimates connecting the two — growth
//!   series with closed forms, covariance decay under an ergodicity
//!   certificate, and variance envelopes for color local times;
//! - [`starwalk`]: a reinforced star-graph walk coupled bit-exactly to an
//!   urn at its reinforcement times.
//!
//! Randomized routines take either a caller-supplied RNG or a master seed
//! from which per-replica streams are derived ([`rng`]); every Monte Carlo
//! estimate in the crate is reproducible given the seed, including the
//! parallel ones.

pub mod analysis;
pub mod bmc;
pub mod error;
pub mod exact;
pub mod kernel;
pub mod law;
pub mod measure;
pub mod rng;
pub mod rrt;
pub mod special;
pub mod starwalk;
pub mod urn;

pub use error::{Error, Result};
pub use exact::ExactMeasure;
pub use kernel::{DoeblinCertificate, ErgodicityCertificate, Kernel};
pub use measure::{ColorId, SparseMeasure};
pub use urn::UrnState;

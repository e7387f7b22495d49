//! Colored interlacing triangles: the ψ statistic, exact and q-weighted
//! enumeration, Dumont permutations and a Metropolis–Hastings sampler.

pub mod colorset;
pub mod dumont;
pub mod enumeration;
pub mod golden;
pub mod error;
pub mod model;
pub mod perm;
pub mod poly;
pub mod psi;
pub mod qenum;
pub mod sampler;

pub use error::{Error, Result};

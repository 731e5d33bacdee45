//! Dynamics-based analysis and coarse-graining of networks.
//!
//! The crate revolves around linear dynamics driven by graph Laplacians:
//! consensus, diffusion and signed consensus on a fixed network. On top of
//! those it provides exact coarse-graining through external equitable
//! partitions, structural-balance analysis of signed graphs, and the Markov
//! Stability family of partition quality functions with a greedy multi-scale
//! optimizer.
//!
//! All numerical code is generic over the scalar type through the [`Real`]
//! trait; every public type defaults to `f64`, so `Graph`, `Spectrum`,
//! `Trajectory` etc. can be used without type parameters.

pub mod balance;
pub mod datasets;
pub mod dynamics;
pub mod eep;
pub mod error;
pub mod expm;
pub mod generate;
pub mod graph;
pub mod io;
pub mod optimize;
pub mod partition;
pub mod real;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};
pub use graph::Graph;
pub use partition::Partition;
pub use real::Real;
pub use spectral::Spectrum;

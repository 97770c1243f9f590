//! Finite ultrametric spaces, chains of ball partitions, zig-zag chains and
//! towers, with exact rational arithmetic throughout.

pub mod chain;
pub mod cli;
pub mod distortion;
pub mod dot;
pub mod error;
pub mod io;
pub mod multimap;
pub mod rational;
pub mod space;
pub mod tower;
pub mod transform;
pub mod zigzag;

pub use error::{Error, Result};
pub use rational::Rational;
pub use space::{BallPartition, DistanceMatrix, UltraSpace, UltrametricVerdict};

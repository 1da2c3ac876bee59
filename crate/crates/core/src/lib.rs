//! Capacity bounds, lattice-coding rates and transceiver simulation for
//! ergodic fading MIMO dirty-paper and broadcast channels.
//!
//! The crate is organised bottom-up:
//!
//! * [`fading`]: channel ensembles, sampling, and the complex-to-real map.
//! * [`mc`]: seeded, block-parallel Monte Carlo expectations.
//! * [`bounds`]: outer bound, Gaussian-binning and lattice inner bounds,
//!   and the closed-form gap bounds.
//! * [`lattice`]: lattice quantisation, modulo reduction, nested codes and
//!   dithers.
//! * [`dpc_sim`]: the dithered nested-lattice transceiver end to end.
//! * [`bc`]: two-user broadcast rate regions.
//!
//! All rates are reported in bits per complex channel use.

pub mod bc;
pub mod bounds;
pub mod dpc_sim;
mod error;
pub mod fading;
pub mod lattice;
pub mod linalg;
pub mod mc;
pub mod quad;

pub use bc::{BcConfig, R1Form, RegionCurve, RegionMode, RegionPoint};
pub use bounds::{PowerConfig, RateBits};
pub use dpc_sim::{DpcConfig, Precoder, TrialStats};
pub use error::{Error, Result};
pub use fading::{ChannelMatrix, FadingKind, FadingSpec};
pub use lattice::{Lattice, NestedLatticeCode};
pub use mc::{Estimate, Execution, MatrixEstimate, McSettings, SeedSpec};

pub use nalgebra;
pub use num_complex::Complex64;

//! Finite-difference time-domain (FDTD) toolchain for microwave-package
//! analysis: package-mode spectra, field slices, and perturbative conductor
//! loss (surface participation) versus chip-to-pedestal gap.
//!
//! The crate is organized along the processing chain:
//!
//! * [`scene`]: materials and prioritized box/sheet geometry,
//! * [`grid`]: voxelization onto a uniform staggered lattice,
//! * [`solver`]: Yee-lattice leapfrog solver with lumped resistive ports,
//! * [`spectral`]: windowed DFT spectra, |S21|, peak finding, mode tables,
//! * [`loss`]: skin depth, surface resistance, Q_cond, T1 scalars,
//! * [`oracle`]: closed-form rectangular-cavity references,
//! * [`pipeline`]: scenario orchestration and CSV artifacts,
//! * [`config`]: strict JSON run configuration (mm/GHz at the boundary).
//!
//! All internal quantities are SI; unit conversion happens exactly once, in
//! [`config`].

pub mod config;
pub mod constants;
pub mod error;
pub mod grid;
pub mod loss;
pub mod oracle;
pub mod pipeline;
pub mod scene;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};

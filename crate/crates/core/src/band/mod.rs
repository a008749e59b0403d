//! Homogeneous condensate in the three-band truncation: b (uniform),
//! c (√2 cos 2kx) and s (√2 sin 2kx) Bloch modes at each quasimomentum.

pub mod fluctuations;
pub mod meanfield;

pub use fluctuations::{
    band_structure, build_lq, build_m, goldstone_check, optomech_mode, polariton_spectrum,
    track_modes, GoldstoneCheck, OptomechMode, SpectrumPoint,
};
pub use meanfield::{
    bistable_window, consistency_residual, equation_residuals, solve_branches, sweep_branches,
    BandMeanField, BandModel, Branch, BranchSweep,
};

//! Harmonically trapped condensate on a real-space grid.

pub mod bdg;
pub mod grid;
pub mod meanfield;

pub use grid::{oscillator_length, thomas_fermi_mu, thomas_fermi_radius, trap_half_width, Grid1D};
pub use meanfield::{
    decompose_envelope, ground_state, ground_state_from, operational_tf_radius, sweep_trapped,
    CondensateProfile, Direction, EnergyBreakdown, Envelope, GroundState, SolverOptions, TrapModel,
    TrappedSweepPoint,
};
pub use bdg::{
    build_trapped_matrix, goldstone_check, identify_optomech_track, optomech_index, spectrum,
    two_mode_flag, OptomechPoint, Parity, TrackedMode, TrackedSweep, TrappedMode, TrappedSpectrum,
};

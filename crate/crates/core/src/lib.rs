//! Mean-field steady states, optical bistability and linear excitation
//! spectra of a Bose-Einstein condensate dispersively coupled to a driven,
//! lossy cavity mode.
//!
//! Two models are provided. The homogeneous band model ([`band`]) keeps the
//! three lowest Bloch-like modes of the condensate and has a closed-form
//! effective radiation-pressure limit ([`effective`]). The trapped model
//! ([`trapped`]) works on a real-space grid with a harmonic trap.
//!
//! All frequencies are in recoil units ω_R and all lengths in optical
//! wavelengths λ; see [`params`].

pub mod band;
pub mod effective;
pub mod error;
pub mod numerics;
pub mod par;
pub mod params;
pub mod table;
pub mod tracking;
pub mod trapped;

pub use error::{Error, Result};
pub use params::{derive, validate_params, DerivedParams, Detuning, SystemParams};

//! Physical parameters in recoil units.
//!
//! Frequencies are measured in units of the recoil frequency ω_R and lengths
//! in units of the optical wavelength λ, with ℏ = 1. The cavity wave number is
//! therefore k = 2π and the kinetic operator is `-(1/(2π)²) d²/dx²`.
//!
//! Config files hold one `key = value` pair per line with `#` comments. The
//! recognised keys are `N, U0, eta, kappa, delta_c, Delta_c, G_coll, gN, V_tr`;
//! anything else is rejected.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Prefactor of `-d²/dx²` in recoil units with lengths in λ: ω_R/k² = 1/(2π)².
pub const KINETIC_PREFACTOR: f64 = 1.0 / (4.0 * PI * PI);

/// Bare "mechanical" frequency of the cos(2kx) density wave, 4 ω_R.
pub const MECHANICAL_FREQUENCY: f64 = 4.0;

pub const KEYS: [&str; 9] = [
    "N", "U0", "eta", "kappa", "delta_c", "Delta_c", "G_coll", "gN", "V_tr",
];

/// Unvalidated key-value record, in file order.
pub type RawParams = IndexMap<String, String>;

/// Which detuning the user supplied. The other one is derived through
/// δ_C = Δ_C − N·U0/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Detuning {
    Shifted(f64),
    Bare(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub atom_number: f64,
    /// U0, one-atom light shift.
    pub light_shift: f64,
    /// η, cavity pump amplitude.
    pub drive: f64,
    /// κ, cavity field decay rate (half linewidth).
    pub cavity_halfwidth: f64,
    pub detuning: Detuning,
    /// 𝒢 = gNλ/L of the homogeneous band model.
    pub band_collision: Option<f64>,
    /// gN of the real-space model, in ω_R·λ.
    pub real_space_collision: Option<f64>,
    /// V_tr of the harmonic trap V_tr·x², in ω_R/λ².
    pub trap_curvature: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// u = U0/(2√2).
    pub u: f64,
    /// G = √(2N)·u, bare optomechanical coupling.
    pub coupling: f64,
    /// ω_M = 4 ω_R.
    pub mechanical_frequency: f64,
    pub shifted_detuning: f64,
    pub bare_detuning: f64,
}

/// Parses the `key = value` config format into a raw record.
pub fn parse_config(text: &str) -> Result<RawParams> {
    let mut raw = RawParams::new();
    for (idx, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: idx + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        insert_unique(&mut raw, key.trim(), value.trim())?;
    }
    Ok(raw)
}

fn insert_unique(raw: &mut RawParams, key: &str, value: &str) -> Result<()> {
    if raw.contains_key(key) {
        return Err(Error::DuplicateKey(key.to_string()));
    }
    raw.insert(key.to_string(), value.to_string());
    Ok(())
}

/// Applies `key=value` overrides on top of a raw record. An override of one
/// detuning removes the other so the result stays unambiguous.
pub fn apply_overrides<'a>(
    raw: &mut RawParams,
    overrides: impl IntoIterator<Item = &'a str>,
) -> Result<()> {
    for item in overrides {
        let (key, value) = item.split_once('=').ok_or_else(|| {
            Error::InvalidValue(format!("override `{item}` is not of the form key=value"))
        })?;
        let key = key.trim();
        match key {
            "delta_c" => {
                raw.shift_remove("Delta_c");
            }
            "Delta_c" => {
                raw.shift_remove("delta_c");
            }
            _ => {}
        }
        raw.insert(key.to_string(), value.trim().to_string());
    }
    Ok(())
}

pub fn validate_params(raw: &RawParams) -> Result<SystemParams> {
    for key in raw.keys() {
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::UnknownKey(key.clone()));
        }
    }
    let get = |key: &str| -> Result<Option<f64>> {
        match raw.get(key) {
            None => Ok(None),
            Some(text) => {
                let value: f64 = text.parse().map_err(|_| Error::NonFinite {
                    key: key.to_string(),
                    value: text.clone(),
                })?;
                if !value.is_finite() {
                    return Err(Error::NonFinite {
                        key: key.to_string(),
                        value: text.clone(),
                    });
                }
                Ok(Some(value))
            }
        }
    };
    let require = |key: &str| -> Result<f64> { get(key)?.ok_or_else(|| Error::MissingKey(key.into())) };

    let atom_number = require("N")?;
    let light_shift = require("U0")?;
    let drive = require("eta")?;
    let cavity_halfwidth = require("kappa")?;
    let detuning = match (get("delta_c")?, get("Delta_c")?) {
        (Some(_), Some(_)) => return Err(Error::AmbiguousDetuning),
        (Some(d), None) => Detuning::Shifted(d),
        (None, Some(d)) => Detuning::Bare(d),
        (None, None) => return Err(Error::MissingKey("delta_c".into())),
    };
    let band_collision = get("G_coll")?;
    let real_space_collision = get("gN")?;
    let trap_curvature = get("V_tr")?;

    if band_collision.is_none() && (real_space_collision.is_none() || trap_curvature.is_none()) {
        let missing = if real_space_collision.is_none() { "gN" } else { "V_tr" };
        return Err(Error::MissingKey(format!(
            "G_coll (band model) or {missing} (trapped model)"
        )));
    }

    let params = SystemParams {
        atom_number,
        light_shift,
        drive,
        cavity_halfwidth,
        detuning,
        band_collision,
        real_space_collision,
        trap_curvature,
    };
    params.check()?;
    Ok(params)
}

fn invalid(msg: &str) -> Error {
    Error::InvalidValue(msg.to_string())
}

impl SystemParams {
    fn check(&self) -> Result<()> {
        if !(self.atom_number > 0.0) {
            return Err(invalid("N must be positive"));
        }
        if !(self.cavity_halfwidth > 0.0) {
            return Err(invalid("kappa must be positive"));
        }
        if self.drive < 0.0 {
            return Err(invalid("eta must be non-negative"));
        }
        if self.band_collision.is_some_and(|g| g < 0.0) {
            return Err(invalid("G_coll must be non-negative"));
        }
        if self.real_space_collision.is_some_and(|g| g < 0.0) {
            return Err(invalid("gN must be non-negative"));
        }
        if self.trap_curvature.is_some_and(|v| v < 0.0) {
            return Err(invalid("V_tr must be non-negative"));
        }
        Ok(())
    }

    /// N·U0/2, the refractive shift between bare and shifted detuning.
    pub fn detuning_shift(&self) -> f64 {
        0.5 * self.atom_number * self.light_shift
    }

    pub fn shifted_detuning(&self) -> f64 {
        match self.detuning {
            Detuning::Shifted(d) => d,
            Detuning::Bare(d) => d - self.detuning_shift(),
        }
    }

    pub fn bare_detuning(&self) -> f64 {
        match self.detuning {
            Detuning::Shifted(d) => d + self.detuning_shift(),
            Detuning::Bare(d) => d,
        }
    }

    /// Copy with δ_C replaced; used by detuning sweeps.
    pub fn with_shifted_detuning(&self, delta_c: f64) -> Self {
        Self {
            detuning: Detuning::Shifted(delta_c),
            ..self.clone()
        }
    }

    pub fn band_collision(&self) -> Result<f64> {
        self.band_collision
            .ok_or_else(|| Error::MissingKey("G_coll".into()))
    }

    pub fn real_space_collision(&self) -> Result<f64> {
        self.real_space_collision
            .ok_or_else(|| Error::MissingKey("gN".into()))
    }

    pub fn trap_curvature(&self) -> Result<f64> {
        self.trap_curvature
            .ok_or_else(|| Error::MissingKey("V_tr".into()))
    }

    pub fn derive(&self) -> DerivedParams {
        derive(self)
    }

    /// Config-file text that validates back to `self`. Values use the
    /// shortest round-trip float representation.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut line = |key: &str, value: f64| {
            let _ = writeln!(out, "{key} = {value:?}");
        };
        line("N", self.atom_number);
        line("U0", self.light_shift);
        line("eta", self.drive);
        line("kappa", self.cavity_halfwidth);
        match self.detuning {
            Detuning::Shifted(d) => line("delta_c", d),
            Detuning::Bare(d) => line("Delta_c", d),
        }
        if let Some(g) = self.band_collision {
            line("G_coll", g);
        }
        if let Some(g) = self.real_space_collision {
            line("gN", g);
        }
        if let Some(v) = self.trap_curvature {
            line("V_tr", v);
        }
        out
    }

    /// Short content hash of the canonical config text.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_config_string().as_bytes());
        hex::encode(&digest[..8])
    }
}

pub fn derive(p: &SystemParams) -> DerivedParams {
    let u = p.light_shift / (2.0 * SQRT_2);
    DerivedParams {
        u,
        coupling: (2.0 * p.atom_number).sqrt() * u,
        mechanical_frequency: MECHANICAL_FREQUENCY,
        shifted_detuning: p.shifted_detuning(),
        bare_detuning: p.bare_detuning(),
    }
}

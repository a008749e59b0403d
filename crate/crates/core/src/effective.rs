//! Two-mode radiation-pressure model of the condensate's cos(2kx) mode.
//!
//! Collisions turn the bare oscillator (ω_M, G) into a Bogoliubov-rescaled
//! one with ω̃ = √(ω_M(ω_M + 2𝒢)) and G̃ = G/χ, χ = ((ω_M + 2𝒢)/ω_M)^{1/4}.
//! The quadratures are X = (c + c†)/√2 and Y = i(c† − c)/√2; in the
//! rescaled quadrature X̃ = χX the static displacement is ⟨X̃⟩ = −G̃I/ω̃.
//! Eliminating it from the cavity equation gives the cubic
//!
//! ```text
//! (G̃⁴/ω̃²) I³ + 2δ_C (G̃²/ω̃) I² + (δ_C² + κ²) I − η² = 0.
//! ```
//!
//! With s = G̃²/ω̃ and the scaled variables y = sI/κ, d = δ_C/κ and
//! e = η²s/κ³ it reads y(d + y)² + y = e, so every photon number y ≤ e sits
//! at d = −y ± √(e/y − 1). Folds of the minus branch are the zeros of
//! g(y) = 4y⁴ − 4ey³ + e², which exist iff e > 8/(3√3).

use crate::error::{Error, Result};
use crate::numerics::cubic::solve_cubic_real;
use crate::numerics::roots::{bisect_bracket, RootSet};
use crate::params::{SystemParams, MECHANICAL_FREQUENCY};

/// Dimensionless drive e = η²s/κ³ at the onset of bistability.
pub fn critical_scaled_drive() -> f64 {
    8.0 / (3.0 * 3f64.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveModel {
    pub mechanical_frequency: f64,
    /// ω̃_M
    pub frequency: f64,
    pub coupling: f64,
    /// G̃
    pub renormalized_coupling: f64,
    pub chi: f64,
    pub collision: f64,
}

/// First-order expansions in 𝒢/ω_M, kept for comparison with the exact forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakCollision {
    pub frequency: f64,
    pub coupling: f64,
}

pub fn renormalize(mechanical_frequency: f64, collision: f64, coupling: f64) -> EffectiveModel {
    assert!(mechanical_frequency > 0.0, "mechanical frequency must be positive");
    assert!(collision >= 0.0, "collision parameter must be non-negative");
    let stiff = mechanical_frequency + 2.0 * collision;
    let chi = (stiff / mechanical_frequency).powf(0.25);
    EffectiveModel {
        mechanical_frequency,
        frequency: (mechanical_frequency * stiff).sqrt(),
        coupling,
        renormalized_coupling: coupling / chi,
        chi,
        collision,
    }
}

/// Photon numbers of the cubic, ascending. With three roots the middle one
/// is unstable.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumbers {
    pub roots: RootSet,
    /// Real roots below zero, dropped as unphysical.
    pub discarded: Vec<f64>,
}

impl PhotonNumbers {
    pub fn values(&self) -> Vec<f64> {
        self.roots.values()
    }

    pub fn is_stable(&self, index: usize) -> bool {
        !(self.roots.len() == 3 && index == 1)
    }
}

impl EffectiveModel {
    /// Model for the band-model parameters in `p`.
    pub fn from_params(p: &SystemParams) -> Result<Self> {
        Ok(renormalize(MECHANICAL_FREQUENCY, p.band_collision()?, p.derive().coupling))
    }

    pub fn weak_collision(&self) -> WeakCollision {
        WeakCollision {
            frequency: self.mechanical_frequency + self.collision,
            coupling: (1.0 - self.collision / (2.0 * self.mechanical_frequency)) * self.coupling,
        }
    }

    /// s = G̃²/ω̃, the photon-number-to-detuning shift of the cavity resonance.
    pub fn spring(&self) -> f64 {
        self.renormalized_coupling.powi(2) / self.frequency
    }

    /// ⟨X̃⟩ = −G̃I/ω̃.
    pub fn displacement(&self, photon_number: f64) -> f64 {
        -self.renormalized_coupling * photon_number / self.frequency
    }

    /// |γ0|² implied by the displacement at photon number I, valid while
    /// the depletion of the homogeneous mode is negligible.
    pub fn mode_population(&self, photon_number: f64, atom_number: f64) -> f64 {
        let x = self.displacement(photon_number) / self.chi;
        x * x / (2.0 * atom_number)
    }

    pub fn cubic_coefficients(&self, kappa: f64, eta: f64, delta_c: f64) -> [f64; 4] {
        let s = self.spring();
        [s * s, 2.0 * delta_c * s, delta_c * delta_c + kappa * kappa, -eta * eta]
    }

    fn scaled_drive(&self, kappa: f64, eta: f64) -> f64 {
        eta * eta * self.spring() / kappa.powi(3)
    }

    /// Fold detunings from the quartic g(y), or `None` below threshold.
    pub fn fold_detunings(&self, kappa: f64, eta: f64) -> Option<(f64, f64)> {
        if self.renormalized_coupling == 0.0 || eta == 0.0 {
            return None;
        }
        let e = self.scaled_drive(kappa, eta);
        let g = |y: f64| 4.0 * y.powi(4) - 4.0 * e * y.powi(3) + e * e;
        let y_star = 0.75 * e;
        if g(y_star) >= 0.0 {
            return None;
        }
        let y1 = bisect_bracket(g, 0.0, y_star, 0.0).ok()?.x;
        let y2 = bisect_bracket(g, y_star, e, 0.0).ok()?.x;
        let d = |y: f64| -y - (e / y - 1.0).max(0.0).sqrt();
        let (a, b) = (kappa * d(y1), kappa * d(y2));
        Some((a.min(b), a.max(b)))
    }

    /// Detuning at y = 3e/4, the minimum of g. Lies inside the window
    /// whenever one exists.
    pub fn window_seed(&self, kappa: f64, eta: f64) -> f64 {
        let e = self.scaled_drive(kappa, eta);
        let y = 0.75 * e;
        kappa * (-y - (e / y - 1.0).max(0.0).sqrt())
    }
}

pub fn cubic_photon_number(
    model: &EffectiveModel,
    kappa: f64,
    eta: f64,
    delta_c: f64,
) -> Result<PhotonNumbers> {
    if model.spring() == 0.0 {
        let i = eta * eta / (delta_c * delta_c + kappa * kappa);
        let set = RootSet {
            roots: vec![crate::numerics::roots::Root { x: i, residual: 0.0, bracket: (i, i) }],
        };
        return Ok(PhotonNumbers { roots: set, discarded: Vec::new() });
    }
    let [a3, a2, a1, a0] = model.cubic_coefficients(kappa, eta, delta_c);
    let all = solve_cubic_real(a3, a2, a1, a0)?;
    let (kept, discarded): (Vec<_>, Vec<_>) = all.roots.into_iter().partition(|r| r.x >= 0.0);
    Ok(PhotonNumbers {
        roots: RootSet { roots: kept },
        discarded: discarded.into_iter().map(|r| r.x).collect(),
    })
}

/// η²_c = (8/(3√3))·ω̃κ³/G̃².
pub fn bistability_threshold(model: &EffectiveModel, kappa: f64) -> Result<f64> {
    if model.renormalized_coupling == 0.0 {
        return Err(Error::NoNonlinearity);
    }
    Ok(critical_scaled_drive() * model.frequency * kappa.powi(3) / model.renormalized_coupling.powi(2))
}

/// Maximal δ_C interval with three photon-number roots.
///
/// Starts inside the window at [`EffectiveModel::window_seed`] and bisects
/// the root count outward on both sides. Returns `None` below threshold or
/// when the window is too narrow for the count to resolve.
pub fn bistable_window(model: &EffectiveModel, kappa: f64, eta: f64) -> Option<(f64, f64)> {
    let threshold = bistability_threshold(model, kappa).ok()?;
    if eta * eta <= threshold {
        return None;
    }
    let count = |d: f64| cubic_photon_number(model, kappa, eta, d).map(|r| r.roots.len()).unwrap_or(0);
    let seed = model.window_seed(kappa, eta);
    if count(seed) != 3 {
        return None;
    }
    // the window lies within y ≤ e of the seed, far outside it the count is 1
    let e = model.scaled_drive(kappa, eta);
    let reach = kappa * (2.0 * e + 2.0);
    let edge = |outer: f64| {
        let (mut inside, mut outside) = (seed, outer);
        if count(outside) == 3 {
            return outside;
        }
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if count(mid) == 3 {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    Some((edge(seed - reach), edge(seed + reach)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cubic::cubic_discriminant;
    use approx::assert_relative_eq;

    const G: f64 = 117.575_507_653_592_55;
    const KAPPA: f64 = 363.9;
    const ETA: f64 = 549.5;

    #[test]
    fn no_collisions_is_identity() {
        let m = renormalize(4.0, 0.0, G);
        assert_eq!((m.frequency, m.renormalized_coupling, m.chi), (4.0, G, 1.0));
    }

    #[test]
    fn collision_rescaling() {
        let m = renormalize(4.0, 1.0, G);
        assert_relative_eq!(m.frequency, 24f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(m.chi, 1.106_681_919_700_321_5, max_relative = 1e-12);
        assert_relative_eq!(m.renormalized_coupling, G / m.chi, max_relative = 1e-15);
        assert_relative_eq!(renormalize(4.0, 2.0, G).frequency, 32f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn weak_collision_expansion_is_first_order() {
        let m = renormalize(4.0, 1e-3, G);
        let w = m.weak_collision();
        assert!((m.frequency - w.frequency).abs() < 1e-6);
        assert!((m.renormalized_coupling - w.coupling).abs() / G < 1e-6);
    }

    #[test]
    fn empty_cavity_lorentzian() {
        let m = renormalize(4.0, 0.0, 0.0);
        let r = cubic_photon_number(&m, KAPPA, ETA, 100.0).unwrap();
        assert_eq!(r.values(), vec![ETA * ETA / (100.0f64.powi(2) + KAPPA * KAPPA)]);
    }

    #[test]
    fn threshold_value_and_scaling() {
        let m = renormalize(4.0, 0.0, G);
        let t = bistability_threshold(&m, KAPPA).unwrap();
        assert_relative_eq!(t, 2.147e4, max_relative = 1e-3);
        assert_relative_eq!(bistability_threshold(&m, 2.0 * KAPPA).unwrap(), 8.0 * t, max_relative = 1e-14);
        let stiffer = renormalize(4.0, 1.0, G);
        assert!(bistability_threshold(&stiffer, KAPPA).unwrap() > t);
        assert!(matches!(
            bistability_threshold(&renormalize(4.0, 0.0, 0.0), KAPPA),
            Err(Error::NoNonlinearity)
        ));
    }

    #[test]
    fn window_matches_fold_formula() {
        for coll in [0.0, 1.0, 2.0] {
            let m = renormalize(4.0, coll, G);
            let (lo, hi) = bistable_window(&m, KAPPA, ETA).unwrap();
            let (flo, fhi) = m.fold_detunings(KAPPA, ETA).unwrap();
            assert_relative_eq!(lo, flo, max_relative = 1e-8);
            assert_relative_eq!(hi, fhi, max_relative = 1e-8);
            let mid = cubic_photon_number(&m, KAPPA, ETA, 0.5 * (lo + hi)).unwrap();
            assert_eq!(mid.roots.len(), 3);
            assert!(!mid.is_stable(1) && mid.is_stable(0) && mid.is_stable(2));
        }
    }

    #[test]
    fn window_vanishes_below_threshold_and_opens_continuously() {
        let m = renormalize(4.0, 0.0, G);
        let eta_c = bistability_threshold(&m, KAPPA).unwrap().sqrt();
        assert!(bistable_window(&m, KAPPA, eta_c * (1.0 - 1e-6)).is_none());
        let widths: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|eps| {
                let (lo, hi) = m.fold_detunings(KAPPA, eta_c * (1.0 + eps)).unwrap();
                hi - lo
            })
            .collect();
        assert!(widths[0] > widths[1] && widths[1] > widths[2] && widths[2] > 0.0);
        assert!(widths[2] < 1e-3 * KAPPA);
    }

    #[test]
    fn double_root_at_threshold() {
        let m = renormalize(4.0, 1.0, G);
        let eta = bistability_threshold(&m, KAPPA).unwrap().sqrt();
        let d = m.window_seed(KAPPA, eta);
        let [a3, a2, a1, a0] = m.cubic_coefficients(KAPPA, eta, d);
        let scale = a2 * a2 * a1 * a1;
        assert!(cubic_discriminant(a3, a2, a1, a0).abs() < 1e-6 * scale);
    }

    #[test]
    fn roots_back_substitute() {
        let m = renormalize(4.0, 2.0, G);
        for d in [-20000.0, -6000.0, -4000.0, -1000.0, 0.0, 5000.0] {
            let r = cubic_photon_number(&m, KAPPA, ETA, d).unwrap();
            let [a3, a2, a1, a0] = m.cubic_coefficients(KAPPA, ETA, d);
            for i in r.values() {
                let scale = (a3 * i.powi(3)).abs() + (a2 * i * i).abs() + (a1 * i).abs() + a0.abs();
                let res = ((a3 * i + a2) * i + a1) * i + a0;
                assert!(res.abs() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn far_detuned_single_small_root() {
        let m = renormalize(4.0, 0.0, G);
        let r = cubic_photon_number(&m, KAPPA, ETA, 1e6).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!(r.values()[0] < 1e-6);
    }

    #[test]
    fn displacement_sign() {
        let m = renormalize(4.0, 1.0, G);
        assert!(m.displacement(0.5) < 0.0);
        // linear response of the cos(2kx) amplitude: γ0 = −uI/(ω_M + 2𝒢)
        let n: f64 = 6e4;
        let u = G / (2.0 * n).sqrt();
        let gamma = -u * 0.5 / 6.0;
        assert_relative_eq!(m.mode_population(0.5, n), gamma * gamma, max_relative = 1e-12);
    }
}

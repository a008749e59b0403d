use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::laplacian::{laplacian_1d_fourth_order, SymmetricBanded};
use crate::params::KINETIC_PREFACTOR;

pub const DEFAULT_POINTS: usize = 1001;
pub const MIN_POINTS_PER_WAVELENGTH: f64 = 40.0;

/// Uniform grid on [−L, L] including both walls. The condensate vanishes
/// on the walls, so only the `n_points − 2` interior nodes are unknowns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub n_points: usize,
    pub half_width: f64,
    pub spacing: f64,
}

impl Grid1D {
    pub fn new(n_points: usize, half_width: f64) -> Result<Self> {
        if n_points < 5 {
            return Err(Error::InvalidGrid(format!("need at least 5 points, got {n_points}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!("half-width must be positive, got {half_width}")));
        }
        let spacing = 2.0 * half_width / (n_points - 1) as f64;
        if 1.0 / spacing < MIN_POINTS_PER_WAVELENGTH {
            return Err(Error::InvalidGrid(format!(
                "{:.1} points per wavelength, need at least {MIN_POINTS_PER_WAVELENGTH}",
                1.0 / spacing
            )));
        }
        Ok(Self { n_points, half_width, spacing })
    }

    pub fn n_interior(&self) -> usize {
        self.n_points - 2
    }

    /// Node i at −L + i·h, written so that x(i) = −x(n − 1 − i) exactly.
    pub fn node(&self, i: usize) -> f64 {
        let n = self.n_points - 1;
        let k = 2 * i as i64 - n as i64;
        self.half_width * k as f64 / n as f64
    }

    pub fn interior(&self) -> Vec<f64> {
        (1..self.n_points - 1).map(|i| self.node(i)).collect()
    }

    /// Kinetic operator −(ω_R/k²)d²/dx² on the interior nodes, fourth order.
    pub fn kinetic(&self) -> SymmetricBanded {
        laplacian_1d_fourth_order(self.n_interior(), self.spacing).scaled(-KINETIC_PREFACTOR)
    }

    /// Grid for a trapped cloud: wide enough that the WKB tail beyond the
    /// Thomas-Fermi edge has decayed by e^{-TAIL_DECAY} at the walls.
    pub fn for_trap(n_points: usize, trap_curvature: f64, collision: f64) -> Result<Self> {
        if !(trap_curvature > 0.0) {
            return Err(Error::InvalidGrid("a trapped grid needs V_tr > 0".into()));
        }
        Self::new(n_points, trap_half_width(trap_curvature, collision))
    }
}

pub const TAIL_DECAY: f64 = 26.0;

/// Smallest L with ∫_R^L 2π√(V_tr(x² − R²))dx = TAIL_DECAY, R the Thomas-Fermi
/// radius.
pub fn trap_half_width(trap_curvature: f64, collision: f64) -> f64 {
    let r = thomas_fermi_radius(trap_curvature, collision);
    let action = |l: f64| {
        let s = (l * l - r * r).max(0.0).sqrt();
        let log = if r > 0.0 { ((l + s) / r).ln() } else { 0.0 };
        PI * trap_curvature.sqrt() * (l * s - r * r * log)
    };
    let (mut lo, mut hi) = (r, r + 1.0);
    while action(hi) < TAIL_DECAY {
        hi = r + 2.0 * (hi - r);
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if action(mid) < TAIL_DECAY {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Ground-state width σ of ψ ∝ exp(−x²/2σ²) in the trap V_tr·x².
pub fn oscillator_length(trap_curvature: f64) -> f64 {
    (1.0 / (2.0 * PI * trap_curvature.sqrt())).sqrt()
}

/// μ of the 1D Thomas-Fermi profile: (4/3)·μ^{3/2}·V_tr^{−1/2} = gN.
pub fn thomas_fermi_mu(trap_curvature: f64, collision: f64) -> f64 {
    (0.75 * collision * trap_curvature.sqrt()).powf(2.0 / 3.0)
}

pub fn thomas_fermi_radius(trap_curvature: f64, collision: f64) -> f64 {
    (thomas_fermi_mu(trap_curvature, collision) / trap_curvature).sqrt()
}

//! Homogeneous steady states in the three-band truncation.
//!
//! With β0 = cos θ and γ0 = sin θ the chemical potential drops out of the
//! two atomic equations, leaving the photon number as an explicit function
//! of θ:
//!
//! ```text
//! u·I(θ) = β0γ0·[4ω_R − 𝒢(1.5γ0² − 2β0²)] / (γ0² − β0²)
//! ```
//!
//! Steady states are the zeros of F(θ) = I(θ)·[κ² + (δ_C − 2Nuβ0γ0)²] − η²
//! on (−π/4, π/4). Wherever I(θ) < 0 the residual is below −η² and cannot
//! produce a sign change, so the scan runs over the whole interval.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::roots::find_roots_scan;
use crate::par::{self, Parallelism};
use crate::params::{SystemParams, MECHANICAL_FREQUENCY};

pub const DEFAULT_SCAN_POINTS: usize = 4096;

/// Keeps the scan off the poles of I(θ) at ±π/4.
const EDGE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Lower,
    Middle,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandMeanField {
    pub theta: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
    pub alpha: Complex64,
    pub photon_number: f64,
    /// Set only when three solutions coexist.
    pub branch: Option<Branch>,
    pub stable: bool,
}

/// Model constants pulled out of [`SystemParams`] once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandModel {
    pub atom_number: f64,
    pub u: f64,
    pub collision: f64,
    pub drive: f64,
    pub kappa: f64,
    pub delta_c: f64,
}

impl BandModel {
    pub fn new(p: &SystemParams) -> Result<Self> {
        Ok(Self {
            atom_number: p.atom_number,
            u: p.derive().u,
            collision: p.band_collision()?,
            drive: p.drive,
            kappa: p.cavity_halfwidth,
            delta_c: p.shifted_detuning(),
        })
    }

    pub fn at_detuning(&self, delta_c: f64) -> Self {
        Self { delta_c, ..*self }
    }

    /// u·I(θ) from the μ-elimination.
    pub fn scaled_photon_number(&self, theta: f64) -> f64 {
        let (g, b) = theta.sin_cos();
        b * g * (MECHANICAL_FREQUENCY - self.collision * (1.5 * g * g - 2.0 * b * b)) / (g * g - b * b)
    }

    /// Detuning seen by the cavity, δ_C − 2Nuβ0γ0.
    pub fn effective_detuning(&self, theta: f64) -> f64 {
        let (g, b) = theta.sin_cos();
        self.delta_c - 2.0 * self.atom_number * self.u * b * g
    }

    fn raw_residual(&self, theta: f64) -> f64 {
        let i = self.scaled_photon_number(theta) / self.u;
        let d = self.effective_detuning(theta);
        i * (self.kappa * self.kappa + d * d) - self.drive * self.drive
    }

    /// Completes a root θ into a full steady state.
    fn complete(&self, theta: f64) -> BandMeanField {
        let (gamma, beta) = theta.sin_cos();
        let alpha = if self.drive == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.drive / Complex64::new(self.effective_detuning(theta), self.kappa)
        };
        let photon_number = alpha.norm_sqr();
        let mu = self.u * photon_number * gamma / beta
            + self.collision * (beta * beta + 3.0 * gamma * gamma);
        BandMeanField {
            theta,
            beta,
            gamma,
            mu,
            alpha,
            photon_number,
            branch: None,
            stable: true,
        }
    }
}

/// F(θ). Errors where the implied photon number is negative.
pub fn consistency_residual(theta: f64, p: &SystemParams) -> Result<f64> {
    let model = BandModel::new(p)?;
    if model.u == 0.0 {
        return Err(Error::InvalidValue("consistency residual needs U0 != 0".into()));
    }
    let photon_number = model.scaled_photon_number(theta) / model.u;
    if photon_number < 0.0 {
        return Err(Error::NonPhysical { theta, photon_number });
    }
    Ok(model.raw_residual(theta))
}

pub fn solve_branches(p: &SystemParams, delta_c: f64) -> Result<Vec<BandMeanField>> {
    solve_model(&BandModel::new(p)?.at_detuning(delta_c), DEFAULT_SCAN_POINTS)
}

pub fn solve_model(model: &BandModel, n_scan: usize) -> Result<Vec<BandMeanField>> {
    // θ = 0 solves both atomic equations whenever the cavity is empty or
    // the atoms do not feel it
    if model.drive == 0.0 || model.u == 0.0 {
        let mut sol = model.complete(0.0);
        if model.u == 0.0 {
            sol.photon_number = model.drive.powi(2) / (model.kappa.powi(2) + model.delta_c.powi(2));
        }
        sol.mu = model.collision;
        return Ok(vec![sol]);
    }
    let roots = find_roots_scan(
        |t| model.raw_residual(t),
        (-FRAC_PI_4 + EDGE, FRAC_PI_4 - EDGE),
        n_scan,
        0.0,
    )?;
    let mut sols: Vec<BandMeanField> = roots
        .roots
        .iter()
        .filter(|r| model.scaled_photon_number(r.x) / model.u >= 0.0)
        .map(|r| model.complete(r.x))
        .collect();
    if sols.is_empty() {
        return Err(Error::NoSteadyState { delta_c: model.delta_c });
    }
    sols.sort_by(|a, b| a.photon_number.total_cmp(&b.photon_number));
    if sols.len() == 3 {
        for (sol, label) in sols.iter_mut().zip([Branch::Lower, Branch::Middle, Branch::Upper]) {
            sol.branch = Some(label);
            sol.stable = label != Branch::Middle;
        }
    }
    Ok(sols)
}

/// Scale-relative residuals of the three steady-state equations, evaluated
/// directly from the stored (θ, μ, I, α).
pub fn equation_residuals(sol: &BandMeanField, p: &SystemParams) -> Result<[f64; 3]> {
    let m = BandModel::new(p)?;
    let (b, g, mu, i) = (sol.beta, sol.gamma, sol.mu, sol.photon_number);
    let d = m.delta_c - 2.0 * m.atom_number * m.u * b * g;
    let cavity = if m.drive == 0.0 {
        i
    } else {
        (i * (m.kappa * m.kappa + d * d) - m.drive * m.drive).abs() / (m.drive * m.drive)
    };
    let scale = mu.abs().max(MECHANICAL_FREQUENCY);
    let eq_b = mu * b - m.u * i * g - m.collision * (b.powi(3) + 3.0 * b * g * g);
    let eq_c = mu * g
        - MECHANICAL_FREQUENCY * g
        - m.u * i * b
        - m.collision * (1.5 * g.powi(3) + 3.0 * b * b * g);
    Ok([cavity, eq_b.abs() / scale, eq_c.abs() / scale])
}

/// Branches along a detuning sweep, connected by nearest photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSweep {
    pub delta_c: Vec<f64>,
    /// Per grid point: (branch id, solution), ascending in I.
    pub points: Vec<Vec<(usize, BandMeanField)>>,
}

pub fn sweep_branches(p: &SystemParams, grid: &[f64], parallelism: Parallelism) -> Result<BranchSweep> {
    let model = BandModel::new(p)?;
    let solved: Vec<Result<Vec<BandMeanField>>> = par::map(grid, parallelism, |&d| {
        solve_model(&model.at_detuning(d), DEFAULT_SCAN_POINTS)
    });
    let mut points = Vec::with_capacity(grid.len());
    let mut previous: Vec<(usize, f64)> = Vec::new();
    let mut next_id = 0usize;
    for sols in solved {
        let sols = sols?;
        let mut ids = vec![usize::MAX; sols.len()];
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (i, &(_, prev_i)) in previous.iter().enumerate() {
            for (j, s) in sols.iter().enumerate() {
                pairs.push(((s.photon_number - prev_i).abs(), i, j));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut used = vec![false; previous.len()];
        for (_, i, j) in pairs {
            if !used[i] && ids[j] == usize::MAX {
                used[i] = true;
                ids[j] = previous[i].0;
            }
        }
        for id in ids.iter_mut().filter(|id| **id == usize::MAX) {
            *id = next_id;
            next_id += 1;
        }
        previous = ids.iter().zip(&sols).map(|(&id, s)| (id, s.photon_number)).collect();
        points.push(ids.into_iter().zip(sols).collect());
    }
    Ok(BranchSweep { delta_c: grid.to_vec(), points })
}

/// Detuning interval with three steady states, from the folds of the
/// exact S-curve δ_C(θ) = 2Nuβ0γ0 ± √(η²/I(θ) − κ²).
pub fn bistable_window(p: &SystemParams) -> Result<Option<(f64, f64)>> {
    let model = BandModel::new(p)?.at_detuning(0.0);
    if model.drive == 0.0 || model.u == 0.0 {
        return Ok(None);
    }
    let n = 20_001;
    let lo = -FRAC_PI_4 + EDGE;
    let step = (2.0 * (FRAC_PI_4 - EDGE)) / (n - 1) as f64;
    let thetas: Vec<f64> = (0..n).map(|k| lo + step * k as f64).collect();
    let mut folds = Vec::new();
    for sign in [-1.0, 1.0] {
        let curve = |t: f64| -> Option<f64> {
            let i = model.scaled_photon_number(t) / model.u;
            let rest = model.drive * model.drive / i - model.kappa * model.kappa;
            (i > 0.0 && rest >= 0.0).then(|| -model.effective_detuning(t) + sign * rest.sqrt())
        };
        let values: Vec<Option<f64>> = thetas.iter().map(|&t| curve(t)).collect();
        for k in 1..n - 1 {
            let (Some(a), Some(b), Some(c)) = (values[k - 1], values[k], values[k + 1]) else {
                continue;
            };
            let is_max = b > a && b >= c;
            let is_min = b < a && b <= c;
            if is_max || is_min {
                let orient = if is_max { -1.0 } else { 1.0 };
                let theta = golden_minimum(
                    |t| curve(t).map_or(f64::INFINITY, |v| orient * v),
                    thetas[k - 1],
                    thetas[k + 1],
                );
                if let Some(v) = curve(theta) {
                    folds.push(v);
                }
            }
        }
    }
    if folds.len() < 2 {
        return Ok(None);
    }
    let lo = folds.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = folds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Some((lo, hi)))
}

fn golden_minimum(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{parse_config, validate_params};

    pub(crate) fn fig2(coll: f64, delta_c: f64) -> SystemParams {
        let text = format!("N=6e4\nU0=0.96\neta=549.5\nkappa=363.9\ndelta_c={delta_c}\nG_coll={coll}");
        validate_params(&parse_config(&text).unwrap()).unwrap()
    }

    #[test]
    fn undriven_is_homogeneous() {
        let mut p = fig2(1.5, 0.0);
        p.drive = 0.0;
        let sols = solve_branches(&p, 0.0).unwrap();
        assert_eq!(sols.len(), 1);
        let s = sols[0];
        assert_eq!((s.gamma, s.photon_number, s.mu), (0.0, 0.0, 1.5));
    }

    #[test]
    fn residual_vanishes_at_zero_drive() {
        let mut p = fig2(0.0, 0.0);
        p.drive = 0.0;
        assert_eq!(consistency_residual(0.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn small_negative_gamma_is_admissible() {
        let p = fig2(0.0, -1000.0);
        let m = BandModel::new(&p).unwrap();
        let t = -1e-4;
        assert!((m.scaled_photon_number(t) + 4.0 * t.sin()).abs() < 1e-6 * t.abs());
        assert!(consistency_residual(t, &p).is_ok());
        assert!(matches!(consistency_residual(1e-4, &p), Err(Error::NonPhysical { .. })));
    }

    #[test]
    fn far_detuned_single_weak_solution() {
        let sols = solve_branches(&fig2(0.0, -40000.0), -40000.0).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].photon_number < 1e-3);
        assert!(sols[0].branch.is_none() && sols[0].stable);
    }

    #[test]
    fn window_center_has_three_solutions() {
        let p = fig2(0.0, 0.0);
        let (lo, hi) = bistable_window(&p).unwrap().unwrap();
        let sols = solve_branches(&p, 0.5 * (lo + hi)).unwrap();
        assert_eq!(sols.len(), 3);
        assert!(sols[0].photon_number < sols[1].photon_number && sols[1].photon_number < sols[2].photon_number);
        assert_eq!(sols[1].branch, Some(Branch::Middle));
        assert!(!sols[1].stable && sols[0].stable && sols[2].stable);
        assert_eq!(solve_branches(&p, lo - 50.0).unwrap().len(), 1);
        assert_eq!(solve_branches(&p, hi + 50.0).unwrap().len(), 1);
        assert_eq!(solve_branches(&p, lo + 1e-3 * (hi - lo)).unwrap().len(), 3);
        assert_eq!(solve_branches(&p, hi - 1e-3 * (hi - lo)).unwrap().len(), 3);
    }

    #[test]
    fn solutions_satisfy_all_equations() {
        for coll in [0.0, 1.0, 2.0] {
            for d in [-9000.0, -6000.0, -5120.0, -4000.0, -2000.0, 0.0, 3000.0] {
                let p = fig2(coll, d);
                for s in solve_branches(&p, d).unwrap() {
                    let r = equation_residuals(&s, &p).unwrap();
                    assert!(r.iter().all(|x| *x < 1e-10), "{coll} {d} {r:?}");
                    assert!((s.beta.powi(2) + s.gamma.powi(2) - 1.0).abs() < 1e-14);
                    assert!(s.beta * s.gamma <= 0.0);
                    assert!((s.alpha.norm_sqr() - s.photon_number).abs() <= 1e-12 * s.photon_number);
                }
            }
        }
    }

    #[test]
    fn sweep_connects_branches() {
        let p = fig2(0.0, 0.0);
        let (lo, hi) = bistable_window(&p).unwrap().unwrap();
        let grid: Vec<f64> = (0..41).map(|k| lo - 1000.0 + (hi - lo + 2000.0) * k as f64 / 40.0).collect();
        let sweep = sweep_branches(&p, &grid, Parallelism::Sequential).unwrap();
        let par = sweep_branches(&p, &grid, Parallelism::Threads(2)).unwrap();
        assert_eq!(sweep, par);
        // along a branch the photon number varies continuously
        let mut last: std::collections::HashMap<usize, f64> = Default::default();
        for row in &sweep.points {
            for (id, s) in row {
                if let Some(prev) = last.insert(*id, s.photon_number) {
                    assert!((prev - s.photon_number).abs() < 0.5, "jump on branch {id}");
                }
            }
        }
        assert!(sweep.points.iter().any(|row| row.len() == 3));
    }
}

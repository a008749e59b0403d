//! Linear excitations of the trapped condensate coupled to the cavity.
//!
//! Fluctuations are ordered [δa, δa†, φ₁..φ_M, φ₁*..φ_M*] with φ_j = √h·δΨ(x_j)
//! in atom-number normalization, so the atomic block is symmetric and the
//! cavity-atom couplings carry √N·√h explicitly.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::meanfield::{CondensateProfile, TrapModel};
use crate::band::fluctuations::subspace_overlap;
use crate::error::{Error, Result};
use crate::numerics::eigen::{eig_dense, ComplexMatrix, EigenPair};
use crate::par::{self, Parallelism};
use crate::tracking::{self, Tracker};

/// Second-largest cavity weight, relative to the largest, above which a point
/// is flagged as having two relevant modes.
pub const TWO_MODE_RATIO: f64 = 0.25;
/// Zero-mode threshold in units of the matrix norm.
pub const ZERO_MODE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrappedMode {
    pub omega: Complex64,
    /// Eigenvector in the parity-reduced coordinates of its sector.
    pub vector: Vec<Complex64>,
    pub parity: Parity,
    pub cavity_weight: f64,
    /// Normalized overlap of the density fluctuation with cos(4πx)ψ(x).
    pub cos_overlap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrappedSpectrum {
    pub modes: Vec<TrappedMode>,
    pub matrix_norm: f64,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn cos2(x: f64) -> f64 {
    let v = (2.0 * PI * x).cos();
    v * v
}

/// The (2M+2)-dimensional fluctuation matrix about `profile`.
pub fn build_trapped_matrix(profile: &CondensateProfile, model: &TrapModel) -> Result<ComplexMatrix> {
    let grid = &profile.grid;
    let m = grid.n_interior();
    if profile.psi.len() != m {
        return Err(Error::GridMismatch { profile: profile.psi.len(), grid: m });
    }
    let h = grid.spacing;
    let x = grid.interior();
    let t = grid.kinetic();
    let psi = &profile.psi;
    let gn = model.collision;
    let lattice = model.light_shift * profile.photon_number;
    let diag: Vec<f64> = (0..m)
        .map(|j| {
            t.diag()[j] + model.trap_potential(x[j]) + lattice * cos2(x[j]) + 2.0 * gn * psi[j] * psi[j]
                - profile.mu
        })
        .collect();
    let coupling: Vec<f64> = (0..m)
        .map(|j| model.light_shift * (model.atom_number * h).sqrt() * cos2(x[j]) * psi[j])
        .collect();
    let cal_a = Complex64::new(-model.effective_detuning(profile.overlap), -model.kappa);
    let a = profile.alpha;
    let ac = a.conj();

    let n = 2 * m + 2;
    let mut out = ComplexMatrix::zeros(n);
    out[(0, 0)] = cal_a;
    out[(1, 1)] = -cal_a.conj();
    for j in 0..m {
        let (u, v) = (2 + j, 2 + m + j);
        let g = coupling[j];
        out[(0, u)] = a * g;
        out[(0, v)] = a * g;
        out[(1, u)] = -ac * g;
        out[(1, v)] = -ac * g;
        out[(u, 0)] = ac * g;
        out[(u, 1)] = a * g;
        out[(v, 0)] = -ac * g;
        out[(v, 1)] = -a * g;

        let b = gn * psi[j] * psi[j];
        out[(u, u)] = c(diag[j]);
        out[(v, v)] = c(-diag[j]);
        out[(u, v)] = c(b);
        out[(v, u)] = c(-b);
        for (k, band) in t.bands.iter().enumerate().skip(1) {
            if let Some(&tk) = band.get(j) {
                out[(u, u + k)] = c(tk);
                out[(u + k, u)] = c(tk);
                out[(v, v + k)] = c(-tk);
                out[(v + k, v)] = c(-tk);
            }
        }
    }
    Ok(out)
}

/// Projects the condensate direction out of the normal and anomalous blocks.
/// The nonzero spectrum is unchanged and the phase mode becomes semisimple.
pub fn number_conserving(matrix: &ComplexMatrix, profile: &CondensateProfile) -> ComplexMatrix {
    let m = profile.psi.len();
    let sh = profile.grid.spacing.sqrt();
    let mut v1 = vec![0.0; 2 * m + 2];
    let mut v2 = vec![0.0; 2 * m + 2];
    for j in 0..m {
        v1[2 + j] = sh * profile.psi[j];
        v2[2 + m + j] = sh * profile.psi[j];
    }
    let norm = v1.iter().map(|x| x * x).sum::<f64>().sqrt();
    v1.iter_mut().for_each(|x| *x /= norm);
    v2.iter_mut().for_each(|x| *x /= norm);
    matrix.project_out(&[v1, v2])
}

/// Orthonormal basis of one parity sector over the full coordinates.
/// Cavity components belong to the even sector.
pub fn parity_basis(m: usize, parity: Parity) -> Vec<Vec<(usize, f64)>> {
    let s = 0.5f64.sqrt();
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    let mut basis = Vec::new();
    if parity == Parity::Even {
        basis.push(vec![(0, 1.0)]);
        basis.push(vec![(1, 1.0)]);
    }
    for offset in [2, 2 + m] {
        for j in 0..m / 2 {
            basis.push(vec![(offset + j, s), (offset + m - 1 - j, sign * s)]);
        }
        if m % 2 == 1 && parity == Parity::Even {
            basis.push(vec![(offset + m / 2, 1.0)]);
        }
    }
    basis
}

pub fn expand(basis: &[Vec<(usize, f64)>], n: usize, coords: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0); n];
    for (b, &z) in basis.iter().zip(coords) {
        for &(k, w) in b {
            out[k] += z * w;
        }
    }
    out
}

fn labels(full: &[Complex64], profile: &CondensateProfile) -> (f64, f64) {
    let m = profile.psi.len();
    let total: f64 = full.iter().map(|z| z.norm_sqr()).sum();
    let cavity_weight = (full[0].norm_sqr() + full[1].norm_sqr()) / total;
    let x = profile.grid.interior();
    let mut dot = c(0.0);
    let mut w2 = 0.0;
    for j in 0..m {
        let w = (4.0 * PI * x[j]).cos() * profile.psi[j];
        dot += (full[2 + j] + full[2 + m + j]) * w;
        w2 += w * w;
    }
    let atom: f64 = full[2..].iter().map(|z| z.norm_sqr()).sum();
    let cos_overlap = if w2 > 0.0 && atom > 0.0 {
        dot.norm() / (2.0 * w2 * atom).sqrt()
    } else {
        0.0
    };
    (cavity_weight, cos_overlap)
}

/// Number-conserving matrix reduced to one parity sector.
pub fn sector_matrix(profile: &CondensateProfile, model: &TrapModel, parity: Parity) -> Result<ComplexMatrix> {
    let full = number_conserving(&build_trapped_matrix(profile, model)?, profile);
    Ok(full.reduce(&parity_basis(profile.psi.len(), parity)))
}

fn sector_modes(
    profile: &CondensateProfile,
    model: &TrapModel,
    parity: Parity,
    keep: &dyn Fn(Complex64) -> bool,
) -> Result<(Vec<TrappedMode>, f64)> {
    let m = profile.psi.len();
    let basis = parity_basis(m, parity);
    let reduced = sector_matrix(profile, model, parity)?;
    let norm = reduced.norm_inf();
    let modes = eig_dense(&reduced)?
        .pairs
        .into_iter()
        .filter(|p| keep(p.value))
        .map(|EigenPair { value, vector }| {
            let full = expand(&basis, 2 * m + 2, &vector);
            let (cavity_weight, cos_overlap) = labels(&full, profile);
            TrappedMode { omega: value, vector, parity, cavity_weight, cos_overlap }
        })
        .collect();
    Ok((modes, norm))
}

/// Modes with 0 < Re ω ≤ `max_frequency` in the requested sectors, sorted by
/// Re ω.
pub fn spectrum(
    profile: &CondensateProfile,
    model: &TrapModel,
    parities: &[Parity],
    max_frequency: f64,
) -> Result<TrappedSpectrum> {
    let mut modes = Vec::new();
    let mut matrix_norm = 0.0f64;
    for &parity in parities {
        let (sector, norm) = sector_modes(profile, model, parity, &|_| true)?;
        let zero = ZERO_MODE_TOL * norm.max(1.0);
        matrix_norm = matrix_norm.max(norm);
        modes.extend(
            sector
                .into_iter()
                .filter(|mode| mode.omega.re > zero && mode.omega.re <= max_frequency),
        );
    }
    modes.sort_by(|a, b| a.omega.re.total_cmp(&b.omega.re).then(a.omega.im.total_cmp(&b.omega.im)));
    Ok(TrappedSpectrum { modes, matrix_norm })
}

/// Every eigenvalue of the unreduced number-conserving matrix, sorted by
/// (Re, Im), with the even-sector weight of each eigenvector.
pub fn full_spectrum(profile: &CondensateProfile, model: &TrapModel) -> Result<Vec<(Complex64, f64)>> {
    let m = profile.psi.len();
    let full = number_conserving(&build_trapped_matrix(profile, model)?, profile);
    Ok(eig_dense(&full)?
        .pairs
        .into_iter()
        .map(|p| {
            let total: f64 = p.vector.iter().map(|z| z.norm_sqr()).sum();
            let mut even = p.vector[0].norm_sqr() + p.vector[1].norm_sqr();
            for offset in [2, 2 + m] {
                for j in 0..m {
                    let mirror = p.vector[offset + m - 1 - j];
                    even += 0.25 * (p.vector[offset + j] + mirror).norm_sqr();
                }
            }
            (p.value, even / total)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldstoneCheck {
    pub min_abs_omega: f64,
    /// Fraction of (0, 0, √hψ, −√hψ) in the span of the zero-mode eigenvectors.
    pub overlap: f64,
}

pub fn goldstone_check(profile: &CondensateProfile, model: &TrapModel) -> Result<GoldstoneCheck> {
    let m = profile.psi.len();
    let basis = parity_basis(m, Parity::Even);
    let reduced = sector_matrix(profile, model, Parity::Even)?;
    let tol = ZERO_MODE_TOL * reduced.norm_inf().max(1.0);
    let pairs = eig_dense(&reduced)?.pairs;
    let min_abs_omega = pairs.iter().map(|p| p.value.norm()).fold(f64::INFINITY, f64::min);
    let zero: Vec<Vec<Complex64>> = pairs
        .iter()
        .filter(|p| p.value.norm() < tol)
        .map(|p| expand(&basis, 2 * m + 2, &p.vector))
        .collect();
    let sh = profile.grid.spacing.sqrt();
    let mut target = vec![c(0.0); 2 * m + 2];
    for j in 0..m {
        target[2 + j] = c(sh * profile.psi[j]);
        target[2 + m + j] = c(-sh * profile.psi[j]);
    }
    let refs: Vec<&[Complex64]> = zero.iter().map(|v| v.as_slice()).collect();
    Ok(GoldstoneCheck { min_abs_omega, overlap: subspace_overlap(&target, &refs) })
}

/// Index of the optomechanical mode: among even, positive-frequency,
/// atom-dominated modes, the one most strongly coupled to the cavity. Without
/// a cavity field the cos(4πx) overlap decides.
pub fn optomech_index(modes: &[TrappedMode]) -> Option<usize> {
    let candidates = || {
        modes
            .iter()
            .enumerate()
            .filter(|(_, m)| m.parity == Parity::Even && m.cavity_weight < 0.5)
    };
    let best = candidates().max_by(|a, b| a.1.cavity_weight.total_cmp(&b.1.cavity_weight))?;
    if best.1.cavity_weight > 0.0 {
        Some(best.0)
    } else {
        candidates()
            .max_by(|a, b| a.1.cos_overlap.total_cmp(&b.1.cos_overlap))
            .map(|(i, _)| i)
    }
}

/// True when a second atom-dominated mode carries more than
/// [`TWO_MODE_RATIO`] of the largest cavity weight.
pub fn two_mode_flag(modes: &[TrappedMode]) -> bool {
    let mut w: Vec<f64> = modes
        .iter()
        .filter(|m| m.parity == Parity::Even && m.cavity_weight < 0.5)
        .map(|m| m.cavity_weight)
        .collect();
    w.sort_by(|a, b| b.total_cmp(a));
    w.len() >= 2 && w[0] > 0.0 && w[1] > TWO_MODE_RATIO * w[0]
}

/// One row of the spectrum dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedMode {
    pub delta_c: f64,
    pub track: usize,
    pub omega: Complex64,
    pub parity: Parity,
    pub cavity_weight: f64,
    pub flag_two_mode: bool,
    pub optomech: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptomechPoint {
    pub delta_c: f64,
    pub omega: Complex64,
    pub cavity_weight: f64,
    pub track: usize,
    pub flag_two_mode: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrackedSweep {
    pub modes: Vec<TrackedMode>,
    pub optomech: Vec<OptomechPoint>,
}

/// Spectra along a mean-field sweep. Points are diagonalized in parallel in
/// batches and stitched sequentially, so only one batch of eigenvectors is
/// held at a time.
pub fn identify_optomech_track(
    points: &[(f64, CondensateProfile)],
    model: &TrapModel,
    parities: &[Parity],
    max_frequency: f64,
    parallelism: Parallelism,
) -> Result<TrackedSweep> {
    let batch = match parallelism {
        Parallelism::Sequential => 1,
        Parallelism::Threads(0) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        Parallelism::Threads(n) => n,
    };
    let mut tracker = Tracker::new();
    let mut out = TrackedSweep::default();
    let mut prev_optomech: Option<Vec<Complex64>> = None;
    for chunk in points.chunks(batch) {
        let spectra = par::map(chunk, parallelism, |(delta_c, profile)| {
            spectrum(profile, &model.at_detuning(*delta_c), parities, max_frequency)
        });
        for ((delta_c, _), spec) in chunk.iter().zip(spectra) {
            let spec = spec?;
            let vectors: Vec<Vec<Complex64>> = spec.modes.iter().map(|m| m.vector.clone()).collect();
            let ids = tracker.push(&vectors);
            let flag = two_mode_flag(&spec.modes);
            let pick = select_optomech(&spec.modes, prev_optomech.as_deref());
            if let Some(k) = pick {
                let mode = &spec.modes[k];
                prev_optomech = Some(mode.vector.clone());
                out.optomech.push(OptomechPoint {
                    delta_c: *delta_c,
                    omega: mode.omega,
                    cavity_weight: mode.cavity_weight,
                    track: ids[k],
                    flag_two_mode: flag,
                });
            }
            for (k, mode) in spec.modes.iter().enumerate() {
                out.modes.push(TrackedMode {
                    delta_c: *delta_c,
                    track: ids[k],
                    omega: mode.omega,
                    parity: mode.parity,
                    cavity_weight: mode.cavity_weight,
                    flag_two_mode: flag,
                    optomech: pick == Some(k),
                });
            }
        }
    }
    Ok(out)
}

/// Away from crossings the strongest-coupled mode; when several modes share
/// the cavity weight, the one continuing the previous optomechanical vector.
fn select_optomech(modes: &[TrappedMode], prev: Option<&[Complex64]>) -> Option<usize> {
    let best = optomech_index(modes)?;
    let (Some(prev), true) = (prev, two_mode_flag(modes)) else {
        return Some(best);
    };
    let floor = TWO_MODE_RATIO * modes[best].cavity_weight;
    modes
        .iter()
        .enumerate()
        .filter(|(_, m)| m.parity == Parity::Even && m.cavity_weight < 0.5 && m.cavity_weight >= floor)
        .filter(|(_, m)| m.vector.len() == prev.len())
        .max_by(|a, b| {
            tracking::overlap(prev, &a.1.vector).total_cmp(&tracking::overlap(prev, &b.1.vector))
        })
        .map(|(i, _)| i)
        .or(Some(best))
}

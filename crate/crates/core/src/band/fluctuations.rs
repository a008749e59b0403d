//! Linear fluctuations around a homogeneous steady state.
//!
//! Modes evolve as e^{−iωt} with ω an eigenvalue of `L_q` or `M`, so
//! Im ω < 0 is damping (cooling) and Im ω > 0 growth (heating).
//!
//! `L_q` acts on (δb_q, δb_{−q}†, δc_q, δc_{−q}†, δs_q, δs_{−q}†) and `M` on
//! (δa, δa†, δb0, δb0†, δc0, δc0†). Atomic fluctuation operators carry their
//! natural normalization, so the cavity-atom entries of `M` include a factor
//! √N from the condensate amplitude.
//!
//! The q = 0 atomic sector always holds the U(1) phase mode, which `M` only
//! represents as a 2×2 Jordan block at zero. Spectra are therefore computed
//! from the number-conserving form P·M·P, where P removes the condensate
//! direction (β0, γ0) from the normal and anomalous atomic components. Its
//! nonzero eigenvalues coincide with those of `M`; the zero eigenvalue
//! becomes semisimple and can be resolved to machine precision.

use num_complex::Complex64;

use super::meanfield::{BandMeanField, BandModel};
use crate::error::{Error, Result};
use crate::numerics::eigen::{eig_dense, ComplexMatrix, EigenPair};
use crate::par::{self, Parallelism};
use crate::params::{SystemParams, MECHANICAL_FREQUENCY};
use crate::tracking;

pub const L_BASIS: [&str; 6] = ["b_q", "b_-q^dag", "c_q", "c_-q^dag", "s_q", "s_-q^dag"];
pub const M_BASIS: [&str; 6] = ["a", "a^dag", "b_0", "b_0^dag", "c_0", "c_0^dag"];

/// Relative threshold, in units of ‖M‖∞, below which an eigenvalue counts
/// as the phase mode.
pub const ZERO_MODE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    /// Quasimomentum in units of k; `None` for the q = 0 polariton matrix.
    pub q: Option<f64>,
    pub omega: Complex64,
    pub vector: Vec<Complex64>,
    pub cavity_weight: f64,
    /// Weight on the cos(2kx) mode.
    pub c_weight: f64,
    pub track: usize,
}

fn weights(v: &[Complex64], cavity: bool) -> (f64, f64) {
    let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let cav = if cavity { (v[0].norm_sqr() + v[1].norm_sqr()) / total } else { 0.0 };
    let (c0, c1) = if cavity { (4, 5) } else { (2, 3) };
    (cav, (v[c0].norm_sqr() + v[c1].norm_sqr()) / total)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

struct Entries {
    g: f64,
    cc: f64,
    bb: f64,
    anom_c: f64,
    anom_s: f64,
}

fn entries(sol: &BandMeanField, m: &BandModel) -> Entries {
    let g = m.collision;
    let cc = 2.0 * g * sol.beta * sol.gamma;
    Entries {
        g,
        cc,
        bb: m.u * sol.photon_number + 2.0 * cc,
        anom_c: g * (1.0 + 0.5 * sol.gamma * sol.gamma),
        anom_s: 0.5 * g * (1.0 + sol.beta * sol.beta),
    }
}

/// Atomic fluctuation matrix at quasimomentum q ≠ 0.
pub fn build_lq(sol: &BandMeanField, q: f64, p: &SystemParams) -> Result<ComplexMatrix> {
    if q == 0.0 {
        return Err(Error::ZeroQuasimomentum);
    }
    let m = BandModel::new(p)?;
    let e = entries(sol, &m);
    let q2 = q * q;
    let w_b = q2 + 2.0 * e.g - sol.mu;
    let w_c = MECHANICAL_FREQUENCY + q2 + e.g * (2.0 + sol.gamma * sol.gamma) - sol.mu;
    let w_s = MECHANICAL_FREQUENCY + q2 + e.g * (1.0 + sol.beta * sol.beta) - sol.mu;
    let k = Complex64::new(0.0, 4.0 * q);
    let z = c(0.0);
    let rows = [
        [c(w_b), c(e.g), c(e.bb), c(e.cc), z, z],
        [c(-e.g), c(-w_b), c(-e.cc), c(-e.bb), z, z],
        [c(e.bb), c(e.cc), c(w_c), c(e.anom_c), k, z],
        [c(-e.cc), c(-e.bb), c(-e.anom_c), c(-w_c), z, -k],
        [z, z, -k, z, c(w_s), c(e.anom_s)],
        [z, z, z, k, c(-e.anom_s), c(-w_s)],
    ];
    Ok(ComplexMatrix::from_fn(6, |i, j| rows[i][j]))
}

/// Cavity-coupled q = 0 fluctuation matrix.
pub fn build_m(sol: &BandMeanField, p: &SystemParams) -> Result<ComplexMatrix> {
    let m = BandModel::new(p)?;
    let e = entries(sol, &m);
    let sqrt_n = m.atom_number.sqrt();
    let cal_a = Complex64::new(
        -m.delta_c + 2.0 * sol.beta * sol.gamma * m.atom_number * m.u,
        -m.kappa,
    );
    let w_b = 2.0 * e.g - sol.mu;
    let w_c = MECHANICAL_FREQUENCY + e.g * (2.0 + sol.gamma * sol.gamma) - sol.mu;
    let a = sol.alpha * (m.u * sqrt_n);
    let ac = a.conj();
    let (bt, gm) = (sol.beta, sol.gamma);
    let z = c(0.0);
    let rows = [
        [cal_a, z, a * gm, a * gm, a * bt, a * bt],
        [z, -cal_a.conj(), -ac * gm, -ac * gm, -ac * bt, -ac * bt],
        [ac * gm, a * gm, c(w_b), c(e.g), c(e.bb), c(e.cc)],
        [-ac * gm, -a * gm, c(-e.g), c(-w_b), c(-e.cc), c(-e.bb)],
        [ac * bt, a * bt, c(e.bb), c(e.cc), c(w_c), c(e.anom_c)],
        [-ac * bt, -a * bt, c(-e.cc), c(-e.bb), c(-e.anom_c), c(-w_c)],
    ];
    Ok(ComplexMatrix::from_fn(6, |i, j| rows[i][j]))
}

/// P·M·P with the condensate direction removed from both atomic sectors.
pub fn number_conserving(m: &ComplexMatrix, sol: &BandMeanField) -> ComplexMatrix {
    let (b, g) = (sol.beta, sol.gamma);
    m.project_out(&[
        vec![0.0, 0.0, b, 0.0, g, 0.0],
        vec![0.0, 0.0, 0.0, b, 0.0, g],
    ])
}

/// All six q = 0 modes, from the number-conserving matrix.
pub fn polariton_spectrum(sol: &BandMeanField, p: &SystemParams) -> Result<Vec<SpectrumPoint>> {
    let m = number_conserving(&build_m(sol, p)?, sol);
    Ok(eig_dense(&m)?
        .pairs
        .into_iter()
        .enumerate()
        .map(|(k, EigenPair { value, vector })| {
            let (cavity_weight, c_weight) = weights(&vector, true);
            SpectrumPoint { q: None, omega: value, vector, cavity_weight, c_weight, track: k }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldstoneCheck {
    pub min_abs_omega: f64,
    /// Norm of the projection of (0, 0, β0, −β0, γ0, −γ0) onto the span of
    /// the zero-mode eigenvectors.
    pub overlap: f64,
}

/// Fraction of the unit vector `target` lying in the span of `vectors`.
pub fn subspace_overlap(target: &[Complex64], vectors: &[&[Complex64]]) -> f64 {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let mut w: Vec<Complex64> = v.to_vec();
        for b in &basis {
            let dot: Complex64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= dot * bi;
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-10 {
            basis.push(w.into_iter().map(|z| z / norm).collect());
        }
    }
    let tn = target.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let proj: f64 = basis
        .iter()
        .map(|b| b.iter().zip(target).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr())
        .sum();
    proj.sqrt() / tn
}

pub fn goldstone_check(sol: &BandMeanField, p: &SystemParams) -> Result<GoldstoneCheck> {
    let m = number_conserving(&build_m(sol, p)?, sol);
    let tol = ZERO_MODE_TOL * m.norm_inf().max(1.0);
    let pairs = eig_dense(&m)?.pairs;
    let min_abs_omega = pairs.iter().map(|p| p.value.norm()).fold(f64::INFINITY, f64::min);
    let zero: Vec<&[Complex64]> = pairs
        .iter()
        .filter(|p| p.value.norm() < tol)
        .map(|p| p.vector.as_slice())
        .collect();
    let (b, g) = (sol.beta, sol.gamma);
    let target = [0.0, 0.0, b, -b, g, -g].map(c);
    Ok(GoldstoneCheck { min_abs_omega, overlap: subspace_overlap(&target, &zero) })
}

/// The optomechanical mode, and a second candidate when the choice is close.
#[derive(Debug, Clone, PartialEq)]
pub struct OptomechMode {
    pub mode: SpectrumPoint,
    pub rival: Option<SpectrumPoint>,
}

impl OptomechMode {
    pub fn ambiguous(&self) -> bool {
        self.rival.is_some()
    }
}

/// Largest cos(2kx) weight among modes with Re ω > 0. When the fold has
/// pushed the mode onto the imaginary axis, modes with Re ω = 0 compete too.
pub fn optomech_mode(sol: &BandMeanField, p: &SystemParams) -> Result<OptomechMode> {
    let modes = polariton_spectrum(sol, p)?;
    let scale = modes.iter().map(|m| m.omega.norm()).fold(0.0, f64::max);
    let zero = ZERO_MODE_TOL * scale.max(1.0);
    let mut candidates: Vec<&SpectrumPoint> =
        modes.iter().filter(|m| m.omega.re > zero).collect();
    if candidates.iter().all(|m| m.c_weight < 0.5) {
        candidates = modes
            .iter()
            .filter(|m| m.omega.re > -zero && m.omega.norm() > zero)
            .collect();
    }
    candidates.sort_by(|a, b| b.c_weight.total_cmp(&a.c_weight));
    let mode = (*candidates.first().ok_or(Error::NoSteadyState { delta_c: p.shifted_detuning() })?).clone();
    let rival = candidates
        .get(1)
        .filter(|r| mode.c_weight - r.c_weight < 0.01)
        .map(|r| (*r).clone());
    Ok(OptomechMode { mode, rival })
}

/// Positive-frequency eigenvalues of `L_q` per q (band index in `track`),
/// followed by the q = 0 optomechanical polariton.
pub fn band_structure(
    sol: &BandMeanField,
    p: &SystemParams,
    q_grid: &[f64],
    parallelism: Parallelism,
) -> Result<Vec<SpectrumPoint>> {
    let per_q: Vec<Result<Vec<SpectrumPoint>>> = par::map(q_grid, parallelism, |&q| {
        let l = build_lq(sol, q, p)?;
        let mut bands: Vec<SpectrumPoint> = eig_dense(&l)?
            .pairs
            .into_iter()
            .filter(|pair| pair.value.re > 0.0)
            .map(|EigenPair { value, vector }| {
                let (_, c_weight) = weights(&vector, false);
                SpectrumPoint { q: Some(q), omega: value, vector, cavity_weight: 0.0, c_weight, track: 0 }
            })
            .collect();
        bands.sort_by(|a, b| a.omega.re.total_cmp(&b.omega.re));
        for (k, b) in bands.iter_mut().enumerate() {
            b.track = k;
        }
        Ok(bands)
    });
    let mut out = Vec::new();
    for bands in per_q {
        out.extend(bands?);
    }
    let mut polariton = optomech_mode(sol, p)?.mode;
    polariton.track = 3;
    out.push(polariton);
    Ok(out)
}

/// Assigns track ids across a sweep by eigenvector overlap.
pub fn track_modes(sweep: &mut [Vec<SpectrumPoint>]) {
    let vectors: Vec<Vec<Vec<Complex64>>> = sweep
        .iter()
        .map(|modes| modes.iter().map(|m| m.vector.clone()).collect())
        .collect();
    for (modes, ids) in sweep.iter_mut().zip(tracking::track_modes(&vectors)) {
        for (m, id) in modes.iter_mut().zip(ids) {
            m.track = id;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::meanfield::{bistable_window, solve_branches, solve_model};
    use crate::numerics::eigen::eigenvalues_dense;
    use crate::params::{parse_config, validate_params};
    use std::f64::consts::PI;

    fn params(coll: f64, u0: f64, eta: f64, delta_c: f64) -> SystemParams {
        let text = format!("N=6e4\nU0={u0}\neta={eta}\nkappa=363.9\ndelta_c={delta_c}\nG_coll={coll}");
        validate_params(&parse_config(&text).unwrap()).unwrap()
    }

    fn free_solution() -> BandMeanField {
        BandMeanField {
            theta: 0.0,
            beta: 1.0,
            gamma: 0.0,
            mu: 0.0,
            alpha: c(0.0),
            photon_number: 0.0,
            branch: None,
            stable: true,
        }
    }

    fn sorted_re(values: &[Complex64]) -> Vec<f64> {
        let mut re: Vec<f64> = values.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        re
    }

    #[test]
    fn free_particle_bands() {
        let p = params(0.0, 0.0, 0.0, 0.0);
        let sol = free_solution();
        for k in 0..101 {
            let q = -1.0 + 0.02 * k as f64;
            if q.abs() < 1e-12 {
                continue;
            }
            let l = build_lq(&sol, q, &p).unwrap();
            let got = sorted_re(&eigenvalues_dense(&l).unwrap());
            let mut want: Vec<f64> = [q * q, (q - 2.0).powi(2), (q + 2.0).powi(2)]
                .into_iter()
                .flat_map(|e| [e, -e])
                .collect();
            want.sort_by(f64::total_cmp);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-10, "q={q}: {got:?} vs {want:?}");
            }
        }
        let edge = sorted_re(&eigenvalues_dense(&build_lq(&sol, 1.0, &p).unwrap()).unwrap());
        for (g, w) in edge.iter().zip([-9.0, -1.0, -1.0, 1.0, 1.0, 9.0]) {
            assert!((g - w).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_quasimomentum_rejected() {
        let p = params(0.0, 0.0, 0.0, 0.0);
        assert!(matches!(build_lq(&free_solution(), 0.0, &p), Err(Error::ZeroQuasimomentum)));
    }

    #[test]
    fn undriven_m_sectors() {
        for coll in [0.0, 1.0, 2.0] {
            let p = params(coll, 0.96, 0.0, -300.0);
            let sol = solve_branches(&p, -300.0).unwrap()[0];
            let m = build_m(&sol, &p).unwrap();
            // cavity block decouples
            for j in 2..6 {
                assert_eq!(m[(0, j)], c(0.0));
                assert_eq!(m[(j, 0)], c(0.0));
            }
            assert_eq!(m[(0, 0)], Complex64::new(300.0, -363.9));
            assert_eq!(m[(1, 1)], Complex64::new(-300.0, -363.9));
            // b sector [[𝒢, 𝒢], [−𝒢, −𝒢]]
            assert_eq!((m[(2, 2)].re, m[(2, 3)].re, m[(3, 2)].re, m[(3, 3)].re), (coll, coll, -coll, -coll));
            let wt = (4.0 * (4.0 + 2.0 * coll)).sqrt();
            let block = ComplexMatrix::from_fn(2, |i, j| m[(4 + i, 4 + j)]);
            let ev = eigenvalues_dense(&block).unwrap();
            assert!((ev[1].re - wt).abs() < 1e-12 && (ev[0].re + wt).abs() < 1e-12);
        }
    }

    /// Linearizes the three-mode mean-field flow numerically.
    fn flow_jacobian(sol: &BandMeanField, p: &SystemParams) -> ComplexMatrix {
        let m = BandModel::new(p).unwrap();
        let n = m.atom_number;
        let gl = m.collision / n;
        let mu = sol.mu;
        // i d/dt (a, b, c)
        let flow = |z: [Complex64; 3]| -> [Complex64; 3] {
            let [a, b, cc] = z;
            let mix = b.conj() * cc + cc.conj() * b;
            let fa = Complex64::new(-m.delta_c, -m.kappa) * a + m.drive + m.u * a * mix;
            let i = a.norm_sqr();
            let fb = m.u * i * cc
                + gl * (b.norm_sqr() * b + b.conj() * cc * cc + 2.0 * cc.norm_sqr() * b)
                - mu * b;
            let fc = MECHANICAL_FREQUENCY * cc
                + m.u * i * b
                + gl * (1.5 * cc.norm_sqr() * cc + cc.conj() * b * b + 2.0 * b.norm_sqr() * cc)
                - mu * cc;
            [fa, fb, fc]
        };
        let z0 = [sol.alpha, c(n.sqrt() * sol.beta), c(n.sqrt() * sol.gamma)];
        let f0 = flow(z0);
        assert!(f0.iter().all(|f| f.norm() < 1e-6), "not a fixed point: {f0:?}");
        let h = 1e-5;
        let mut jac = ComplexMatrix::zeros(6);
        for var in 0..3 {
            let mut dx = [c(0.0); 3];
            let mut dy = [c(0.0); 3];
            let (mut zp, mut zm, mut zpi, mut zmi) = (z0, z0, z0, z0);
            zp[var] += h;
            zm[var] -= h;
            zpi[var] += Complex64::new(0.0, h);
            zmi[var] -= Complex64::new(0.0, h);
            let (fp, fm, fpi, fmi) = (flow(zp), flow(zm), flow(zpi), flow(zmi));
            for eq in 0..3 {
                dx[eq] = (fp[eq] - fm[eq]) / (2.0 * h);
                dy[eq] = (fpi[eq] - fmi[eq]) / (2.0 * h);
            }
            for eq in 0..3 {
                // Wirtinger derivatives
                let d_z = 0.5 * (dx[eq] - Complex64::new(0.0, 1.0) * dy[eq]);
                let d_zc = 0.5 * (dx[eq] + Complex64::new(0.0, 1.0) * dy[eq]);
                jac[(2 * eq, 2 * var)] = d_z;
                jac[(2 * eq, 2 * var + 1)] = d_zc;
                jac[(2 * eq + 1, 2 * var)] = -d_zc.conj();
                jac[(2 * eq + 1, 2 * var + 1)] = -d_z.conj();
            }
        }
        jac
    }

    #[test]
    fn m_matches_linearized_flow() {
        for coll in [0.0, 1.0, 2.0] {
            for d in [-7000.0, -5120.0, -3000.0, 1000.0] {
                let p = params(coll, 0.96, 549.5, d);
                for sol in solve_branches(&p, d).unwrap() {
                    let m = build_m(&sol, &p).unwrap();
                    let j = flow_jacobian(&sol, &p);
                    let scale = m.norm_inf();
                    for r in 0..6 {
                        for col in 0..6 {
                            let diff = (m[(r, col)] - j[(r, col)]).norm();
                            assert!(diff < 1e-6 * scale, "{coll} {d} ({r},{col}): {} vs {}", m[(r, col)], j[(r, col)]);
                        }
                    }
                }
            }
        }
    }

    /// Projects the real-space Bogoliubov operator on the three Bloch
    /// functions e^{iqkx}{1, √2cos 2kx, √2sin 2kx} by quadrature.
    fn galerkin_lq(sol: &BandMeanField, q: f64, p: &SystemParams) -> ComplexMatrix {
        let m = BandModel::new(p).unwrap();
        let k = 2.0 * PI;
        let n_quad = 512;
        let s2 = 2f64.sqrt();
        let mut a = [[c(0.0); 3]; 3];
        let mut b = [[c(0.0); 3]; 3];
        for n in 0..n_quad {
            let x = n as f64 / n_quad as f64;
            let w = 1.0 / n_quad as f64;
            let phase = Complex64::from_polar(1.0, q * k * x);
            let (sn, cs) = (2.0 * k * x).sin_cos();
            let shapes = [(1.0, 0.0, 0.0), (s2 * cs, -s2 * 2.0 * k * sn, -s2 * 4.0 * k * k * cs), (s2 * sn, s2 * 2.0 * k * cs, -s2 * 4.0 * k * k * sn)];
            let ik = Complex64::new(0.0, q * k);
            let phi: Vec<Complex64> = shapes.iter().map(|s| phase * s.0).collect();
            // −(1/k²)(e^{iqkx}h)''
            let t_phi: Vec<Complex64> = shapes
                .iter()
                .map(|&(h, dh, d2h)| -(phase * (ik * ik * h + 2.0 * ik * dh + d2h)) / (k * k))
                .collect();
            let amp = sol.beta + sol.gamma * s2 * cs;
            let potential = s2 * m.u * sol.photon_number * cs + 2.0 * m.collision * amp * amp - sol.mu;
            let pair = m.collision * amp * amp;
            for i in 0..3 {
                for j in 0..3 {
                    a[i][j] += w * phi[i].conj() * (t_phi[j] + potential * phi[j]);
                    b[i][j] += w * phi[i].conj() * pair * phi[j];
                }
            }
        }
        ComplexMatrix::from_fn(6, |r, col| {
            let (i, j) = (r / 2, col / 2);
            match (r % 2, col % 2) {
                (0, 0) => a[i][j],
                (0, 1) => b[i][j],
                (1, 0) => -b[i][j],
                _ => -a[i][j],
            }
        })
    }

    #[test]
    fn lq_matches_real_space_projection() {
        for coll in [0.0, 1.0, 2.0] {
            let p = params(coll, 0.96, 549.5, -5120.0);
            for sol in solve_branches(&p, -5120.0).unwrap() {
                for q in [-0.9, -0.3, 0.25, 0.7, 1.0] {
                    let l = build_lq(&sol, q, &p).unwrap();
                    // the printed ±4iq entries correspond to e^{−iqkx}
                    let g = galerkin_lq(&sol, -q, &p);
                    for r in 0..6 {
                        for col in 0..6 {
                            assert!((l[(r, col)] - g[(r, col)]).norm() < 1e-10, "q={q} ({r},{col}) {} vs {}", l[(r, col)], g[(r, col)]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lq_pairing_and_parity() {
        let p = params(1.0, 0.96, 549.5, -5120.0);
        for sol in solve_branches(&p, -5120.0).unwrap() {
            for q in [0.1, 0.5, 0.93] {
                let l = build_lq(&sol, q, &p).unwrap();
                let ev = eigenvalues_dense(&l).unwrap();
                let tol = 1e-8 * l.norm_inf();
                for w in &ev {
                    assert!(ev.iter().any(|v| (v + w.conj()).norm() < tol));
                }
                let minus = eigenvalues_dense(&build_lq(&sol, -q, &p).unwrap()).unwrap();
                for (a, b) in ev.iter().zip(&minus) {
                    assert!((a - b).norm() < tol);
                }
            }
        }
    }

    #[test]
    fn number_conserving_form_keeps_nonzero_spectrum() {
        let p = params(1.0, 0.96, 549.5, -5120.0);
        for sol in solve_branches(&p, -5120.0).unwrap() {
            let m = build_m(&sol, &p).unwrap();
            let full = eigenvalues_dense(&m).unwrap();
            let proj = eigenvalues_dense(&number_conserving(&m, &sol)).unwrap();
            let nonzero = |v: &Vec<Complex64>| v.iter().copied().filter(|z| z.norm() > 1e-4).collect::<Vec<_>>();
            let (a, b) = (nonzero(&full), nonzero(&proj));
            assert_eq!(a.len(), 4);
            assert_eq!(b.len(), 4);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-9 * m.norm_inf(), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn goldstone_mode_is_exact() {
        let p = params(2.0, 0.96, 549.5, -5000.0);
        for sol in solve_branches(&p, -5000.0).unwrap() {
            let g = goldstone_check(&sol, &p).unwrap();
            assert!(g.min_abs_omega < 1e-8, "{g:?}");
            assert!(g.overlap > 0.999, "{g:?}");
        }
    }

    fn solve_linear(mut a: Vec<Vec<Complex64>>, mut rhs: Vec<Complex64>) -> Vec<Complex64> {
        let n = rhs.len();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).unwrap();
            a.swap(col, piv);
            rhs.swap(col, piv);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    let v = a[col][k];
                    a[row][k] -= f * v;
                }
                let r = rhs[col];
                rhs[row] -= f * r;
            }
        }
        let mut x = vec![c(0.0); n];
        for row in (0..n).rev() {
            let s: Complex64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
            x[row] = (rhs[row] - s) / a[row][row];
        }
        x
    }

    #[test]
    fn static_response_reproduces_cavity_equation() {
        // i dR/dt = M R + d + δμ·s with a drive step d = (ε, −ε, 0, 0, 0, 0);
        // the norm constraint fixes δμ. Compared with central differences of
        // the mean-field solution in η.
        let eps = 1e-3;
        for coll in [0.0, 1.0] {
            for d in [-7000.0, -5120.0, -2000.0] {
                let p = params(coll, 0.96, 549.5, d);
                let base = solve_branches(&p, d).unwrap();
                let mut up = p.clone();
                up.drive += eps;
                let mut down = p.clone();
                down.drive -= eps;
                let ups = solve_branches(&up, d).unwrap();
                let downs = solve_branches(&down, d).unwrap();
                if ups.len() != base.len() || downs.len() != base.len() {
                    continue;
                }
                for (k, sol) in base.iter().enumerate() {
                    // Real gauge: δb = δb* = √N·δβ and δc = δc* = √N·δγ, which
                    // removes the phase-mode direction from the static problem.
                    // Unknowns: Re δa, Im δa, √Nδβ, √Nδγ, δμ.
                    let m = build_m(sol, &p).unwrap();
                    let sn = p.atom_number.sqrt();
                    let (b, g) = (sol.beta, sol.gamma);
                    let i = Complex64::new(0.0, 1.0);
                    let row = |r: usize| -> [Complex64; 4] {
                        [
                            m[(r, 0)] + m[(r, 1)],
                            i * (m[(r, 0)] - m[(r, 1)]),
                            m[(r, 2)] + m[(r, 3)],
                            m[(r, 4)] + m[(r, 5)],
                        ]
                    };
                    let (r0, r2, r4) = (row(0), row(2), row(4));
                    let mut a = vec![vec![c(0.0); 5]; 5];
                    for j in 0..4 {
                        a[0][j] = c(r0[j].re);
                        a[1][j] = c(r0[j].im);
                        a[2][j] = c(r2[j].re);
                        a[3][j] = c(r4[j].re);
                    }
                    a[2][4] = c(-sn * b);
                    a[3][4] = c(-sn * g);
                    a[4][2] = c(b);
                    a[4][3] = c(g);
                    let rhs = vec![c(-1.0), c(0.0), c(0.0), c(0.0), c(0.0)];
                    let x = solve_linear(a, rhs);
                    let dalpha_lin = Complex64::new(x[0].re, x[1].re);
                    let dalpha = (ups[k].alpha - downs[k].alpha) / (2.0 * eps);
                    let dmu = (ups[k].mu - downs[k].mu) / (2.0 * eps);
                    let dgamma = sn * (ups[k].gamma - downs[k].gamma) / (2.0 * eps);
                    assert!(
                        (dalpha_lin - dalpha).norm() < 1e-4 * dalpha.norm().max(1e-3),
                        "{coll} {d}: {dalpha_lin} vs {dalpha}"
                    );
                    assert!((x[3].re - dgamma).abs() < 1e-4 * dgamma.abs().max(1e-3), "{} vs {dgamma}", x[3]);
                    assert!((x[4].re - dmu).abs() < 1e-4 * dmu.abs().max(1e-6), "{} vs {dmu}", x[4]);
                }
            }
        }
    }

    #[test]
    fn far_detuned_optomech_frequency() {
        for (coll, want) in [(0.0, 4.0), (1.0, 24f64.sqrt())] {
            for d in [-1e6, 1e6] {
                let p = params(coll, 0.96, 549.5, d);
                let sol = solve_branches(&p, d).unwrap()[0];
                let mode = optomech_mode(&sol, &p).unwrap();
                assert!((mode.mode.omega.re - want).abs() < 1e-3, "{}", mode.mode.omega);
                assert!(!mode.ambiguous());
            }
        }
    }

    #[test]
    fn lower_branch_cools() {
        let p = params(0.0, 0.96, 549.5, 0.0);
        let (lo, hi) = bistable_window(&p).unwrap().unwrap();
        let model = BandModel::new(&p).unwrap();
        for k in 1..10 {
            let d = lo + (hi - lo) * k as f64 / 10.0;
            let lower = solve_model(&model.at_detuning(d), 4096).unwrap()[0];
            let mode = optomech_mode(&lower, &p.with_shifted_detuning(d)).unwrap();
            assert!(mode.mode.omega.im < 0.0, "{d}: {}", mode.mode.omega);
        }
    }

    #[test]
    fn band_structure_has_sound_and_polariton() {
        let p = params(1.0, 0.96, 549.5, -5120.0);
        let sol = *solve_branches(&p, -5120.0).unwrap().last().unwrap();
        let qs: Vec<f64> = (1..=20).map(|k| 0.001 * k as f64).collect();
        let pts = band_structure(&sol, &p, &qs, Parallelism::Sequential).unwrap();
        let lowest: Vec<f64> = pts.iter().filter(|s| s.track == 0 && s.q.is_some()).map(|s| s.omega.re).collect();
        let slope0 = lowest[0] / qs[0];
        let slope1 = lowest[19] / qs[19];
        assert!(slope0 > 0.1 && (slope0 - slope1).abs() / slope0 < 0.05);
        let polariton = pts.last().unwrap();
        assert!(polariton.q.is_none() && polariton.cavity_weight > 0.0);
        let par = band_structure(&sol, &p, &qs, Parallelism::Threads(2)).unwrap();
        assert_eq!(pts, par);

        let free = params(0.0, 0.0, 0.0, 0.0);
        let fs = free_solution();
        let pts = band_structure(&fs, &free, &[0.01, 0.02], Parallelism::Sequential);
        // the q = 0 matrix of the free gas has no positive c-mode candidate issue
        let pts = pts.unwrap();
        assert!((pts[0].omega.re - 1e-4).abs() < 1e-12);
    }
}

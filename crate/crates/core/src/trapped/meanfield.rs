use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{oscillator_length, thomas_fermi_mu, Grid1D};
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Wall amplitude above which the box is considered too small.
pub const WALL_TOL: f64 = 1e-8;

/// Diagonal shift of the Newton solves, relative to max(|μ|, 1).
const NEWTON_SHIFT: f64 = 1e-6;
const NEWTON_REFINEMENTS: usize = 40;

/// Real-space model of a harmonically trapped condensate in the cavity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapModel {
    pub atom_number: f64,
    pub light_shift: f64,
    pub drive: f64,
    pub kappa: f64,
    /// Δ_C = δ_C + N·U0/2.
    pub bare_detuning: f64,
    /// gN.
    pub collision: f64,
    /// V_tr.
    pub trap_curvature: f64,
}

impl TrapModel {
    pub fn from_params(p: &SystemParams) -> Result<Self> {
        let trap_curvature = p.trap_curvature()?;
        if !(trap_curvature > 0.0) {
            return Err(Error::InvalidValue("the trapped model needs V_tr > 0".into()));
        }
        Ok(Self {
            atom_number: p.atom_number,
            light_shift: p.light_shift,
            drive: p.drive,
            kappa: p.cavity_halfwidth,
            bare_detuning: p.bare_detuning(),
            collision: p.real_space_collision()?,
            trap_curvature,
        })
    }

    /// Copy at shifted detuning δ_C.
    pub fn at_detuning(&self, delta_c: f64) -> Self {
        Self {
            bare_detuning: delta_c + self.shift(),
            ..self.clone()
        }
    }

    pub fn shift(&self) -> f64 {
        0.5 * self.atom_number * self.light_shift
    }

    pub fn shifted_detuning(&self) -> f64 {
        self.bare_detuning - self.shift()
    }

    pub fn cavity_off(&self) -> bool {
        self.light_shift == 0.0 || self.drive == 0.0
    }

    /// Δ_C − U0·N·C for the lattice overlap C = ∫cos²(2πx)|ψ|²dx.
    pub fn effective_detuning(&self, overlap: f64) -> f64 {
        self.bare_detuning - self.light_shift * self.atom_number * overlap
    }

    pub fn cavity_field(&self, overlap: f64) -> Complex64 {
        Complex64::new(self.drive, 0.0)
            / Complex64::new(self.effective_detuning(overlap), self.kappa)
    }

    pub fn photon_number(&self, overlap: f64) -> f64 {
        let d = self.effective_detuning(overlap);
        self.drive * self.drive / (d * d + self.kappa * self.kappa)
    }

    /// Adiabatically eliminated cavity energy per atom; its derivative in C
    /// is U0·I(C).
    fn optical_energy(&self, overlap: f64) -> f64 {
        if self.cavity_off() {
            return 0.0;
        }
        let d = self.effective_detuning(overlap);
        -self.drive * self.drive / (self.atom_number * self.kappa) * (d / self.kappa).atan()
    }

    pub fn trap_potential(&self, x: f64) -> f64 {
        self.trap_curvature * x * x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub trap: f64,
    pub collision: f64,
    pub optical: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.kinetic + self.trap + self.collision + self.optical
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondensateProfile {
    pub grid: Grid1D,
    /// ψ on the interior nodes.
    pub psi: Vec<f64>,
    pub mu: f64,
    pub alpha: Complex64,
    pub photon_number: f64,
    /// C = ∫cos²(2πx)|ψ|²dx.
    pub overlap: f64,
    pub norm_residual: f64,
    /// ‖(H_GP − μ)ψ‖∞.
    pub residual: f64,
    pub energy: EnergyBreakdown,
    pub iterations: usize,
}

impl CondensateProfile {
    pub fn x(&self) -> Vec<f64> {
        self.grid.interior()
    }

    /// Edge of the Thomas-Fermi profile, √((μ − U0·I/2)/V_tr), with the
    /// lattice potential averaged over one period.
    pub fn analytic_tf_radius(&self, model: &TrapModel) -> f64 {
        let edge = self.mu - 0.5 * model.light_shift * self.photon_number;
        (edge.max(0.0) / model.trap_curvature).sqrt()
    }

    /// max |ψ(x) − ψ(−x)|.
    pub fn parity_defect(&self) -> f64 {
        let n = self.psi.len();
        (0..n / 2)
            .map(|i| (self.psi[i] - self.psi[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iter: usize,
    pub tol_mu: f64,
    pub tol_alpha: f64,
    /// Relative to |μ|.
    pub tol_residual: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iter: 200_000, tol_mu: 1e-10, tol_alpha: 1e-10, tol_residual: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub profile: CondensateProfile,
    /// Energy after every accepted step.
    pub energy_trace: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cos2(x: f64) -> f64 {
    let c = (2.0 * PI * x).cos();
    c * c
}

struct Workspace<'a> {
    model: &'a TrapModel,
    grid: &'a Grid1D,
    kinetic: crate::numerics::laplacian::SymmetricBanded,
    trap: Vec<f64>,
    lattice: Vec<f64>,
}

struct State {
    psi: Vec<f64>,
    overlap: f64,
    photon_number: f64,
    alpha: Complex64,
    mu: f64,
    energy: EnergyBreakdown,
}

impl<'a> Workspace<'a> {
    fn new(model: &'a TrapModel, grid: &'a Grid1D) -> Self {
        let x = grid.interior();
        Self {
            model,
            grid,
            kinetic: grid.kinetic(),
            trap: x.iter().map(|&x| model.trap_potential(x)).collect(),
            lattice: x.iter().map(|&x| cos2(x)).collect(),
        }
    }

    fn norm2(&self, psi: &[f64]) -> f64 {
        // the trapezoid rule reduces to a plain sum since ψ vanishes on the walls
        psi.iter().map(|v| v * v).sum::<f64>() * self.grid.spacing
    }

    fn normalize(&self, psi: &mut [f64]) {
        let s = self.norm2(psi).sqrt();
        psi.iter_mut().for_each(|v| *v /= s);
    }

    fn potential(&self, psi: &[f64], photon_number: f64) -> Vec<f64> {
        let m = self.model;
        (0..psi.len())
            .map(|i| {
                self.trap[i]
                    + m.collision * psi[i] * psi[i]
                    + m.light_shift * photon_number * self.lattice[i]
            })
            .collect()
    }

    fn state(&self, psi: Vec<f64>) -> State {
        let m = self.model;
        let h = self.grid.spacing;
        let overlap = psi.iter().zip(&self.lattice).map(|(p, c)| c * p * p).sum::<f64>() * h;
        let photon_number = if m.cavity_off() { 0.0 } else { m.photon_number(overlap) };
        let alpha = if m.cavity_off() { Complex64::new(0.0, 0.0) } else { m.cavity_field(overlap) };
        let tpsi = self.kinetic.apply(&psi);
        let kinetic = psi.iter().zip(&tpsi).map(|(a, b)| a * b).sum::<f64>() * h;
        let trap = psi.iter().zip(&self.trap).map(|(p, v)| v * p * p).sum::<f64>() * h;
        let quartic = psi.iter().map(|p| p.powi(4)).sum::<f64>() * h;
        let energy = EnergyBreakdown {
            kinetic,
            trap,
            collision: 0.5 * m.collision * quartic,
            optical: m.optical_energy(overlap),
        };
        let lattice = if m.cavity_off() { 0.0 } else { m.light_shift * photon_number * overlap };
        let mu = kinetic + trap + m.collision * quartic + lattice;
        State { psi, overlap, photon_number, alpha, mu, energy }
    }

    fn residual(&self, s: &State) -> f64 {
        let w = self.potential(&s.psi, s.photon_number);
        let tpsi = self.kinetic.apply(&s.psi);
        (0..s.psi.len())
            .map(|i| (tpsi[i] + (w[i] - s.mu) * s.psi[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Newton step on the stationary equations (H[ψ] − μ)ψ = 0, ‖ψ‖ = 1 with
    /// the cavity intensity I(C[ψ]) differentiated through the overlap.
    /// The bordered system is reduced to tridiagonal solves by
    /// Sherman-Morrison on the rank-one cavity term.
    fn newton(&self, s: &State) -> State {
        let m = self.model;
        let h = self.grid.spacing;
        let n = s.psi.len();
        let w = self.potential(&s.psi, s.photon_number);
        let tpsi = self.kinetic.apply(&s.psi);
        let f: Vec<f64> = (0..n).map(|i| tpsi[i] + (w[i] - s.mu) * s.psi[i]).collect();
        let norm_defect = self.norm2(&s.psi) - 1.0;
        let shift: Vec<f64> = (0..n)
            .map(|i| w[i] + 2.0 * m.collision * s.psi[i] * s.psi[i] - s.mu)
            .collect();
        // the solves use H − μ + σ, which stays regular when ψ is an exact
        // eigenvector; refinement against the true operator removes σ
        let sigma = NEWTON_SHIFT * s.mu.abs().max(1.0);
        let shifted: Vec<f64> = shift.iter().map(|v| v + sigma).collect();
        let solve_a = |rhs: &[f64]| self.kinetic.solve_shifted(&shifted, rhs);

        let rank_one_raw = self.cavity_feedback(s).map(|(a, b)| {
            let ainv_a = solve_a(&a);
            (a, b, ainv_a)
        });
        let rank_one = rank_one_raw.as_ref().map(|(_, b, ainv_a)| (b, ainv_a, 1.0 + dot(b, ainv_a)));
        let solve_k = |rhs: &[f64]| {
            let mut y = solve_a(rhs);
            if let Some((b, ainv_a, denom)) = rank_one {
                let coef = dot(b, &y) / denom;
                y.iter_mut().zip(ainv_a).for_each(|(yi, ai)| *yi -= coef * ai);
            }
            y
        };
        // bordered system K·δψ − δμ·ψ = r, 2h·ψᵀδψ = c
        let x2 = solve_k(&s.psi);
        let bordered = |r: &[f64], c: f64| {
            let x1 = solve_k(r);
            let dmu = (c - 2.0 * h * dot(&s.psi, &x1)) / (2.0 * h * dot(&s.psi, &x2));
            let dpsi: Vec<f64> = (0..n).map(|i| x1[i] + dmu * x2[i]).collect();
            (dpsi, dmu)
        };
        let apply_k = |v: &[f64]| {
            let mut out = self.kinetic.apply(v);
            out.iter_mut().zip(&shift).zip(v).for_each(|((o, d), x)| *o += d * x);
            if let Some((a, b, _)) = &rank_one_raw {
                let c = dot(b, v);
                out.iter_mut().zip(a).for_each(|(o, ai)| *o += c * ai);
            }
            out
        };
        let minus_f: Vec<f64> = f.iter().map(|v| -v).collect();
        let (mut dpsi, mut dmu) = bordered(&minus_f, -norm_defect);
        for _ in 0..NEWTON_REFINEMENTS {
            let kd = apply_k(&dpsi);
            let r: Vec<f64> = (0..n).map(|i| minus_f[i] - kd[i] + dmu * s.psi[i]).collect();
            let c = -norm_defect - 2.0 * h * dot(&s.psi, &dpsi);
            let (ddpsi, ddmu) = bordered(&r, c);
            dpsi.iter_mut().zip(&ddpsi).for_each(|(x, d)| *x += d);
            dmu += ddmu;
            let size = ddpsi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if size <= 1e-15 * dpsi.iter().fold(0.0f64, |m, v| m.max(v.abs())) {
                break;
            }
        }
        let mut psi: Vec<f64> = (0..n).map(|i| s.psi[i] + dpsi[i]).collect();
        self.normalize(&mut psi);
        self.state(psi)
    }

    /// Rank-one linearization of the cavity potential about `s`: a change δψ
    /// shifts the potential by a·(bᵀδψ), with a = U0·I'(C)·cos²·ψ and
    /// b = 2h·cos²·ψ.
    fn cavity_feedback(&self, s: &State) -> Option<(Vec<f64>, Vec<f64>)> {
        let m = self.model;
        if m.cavity_off() {
            return None;
        }
        let h = self.grid.spacing;
        let d = m.effective_detuning(s.overlap);
        let den = d * d + m.kappa * m.kappa;
        let di_dc = 2.0 * m.light_shift * m.atom_number * d * m.drive * m.drive / (den * den);
        let a = (0..s.psi.len()).map(|i| m.light_shift * di_dc * self.lattice[i] * s.psi[i]).collect();
        let b = (0..s.psi.len()).map(|i| 2.0 * h * self.lattice[i] * s.psi[i]).collect();
        Some((a, b))
    }

    /// One backward-Euler step (1 + Δτ(H[ψ'] − s))ψ' = ψ, then renormalization.
    /// H[ψ'] keeps the collision term at ψ and linearizes the cavity
    /// potential, which is what limits the step under strong optical
    /// feedback.
    fn step(&self, s: &State, dtau: f64) -> State {
        let w = self.potential(&s.psi, s.photon_number);
        let floor = w.iter().cloned().fold(f64::INFINITY, f64::min);
        let shift: Vec<f64> = w.iter().map(|v| 1.0 + dtau * (v - floor)).collect();
        let kinetic = self.kinetic.scaled(dtau);
        let mut psi = kinetic.solve_shifted(&shift, &s.psi);
        if let Some((a, b)) = self.cavity_feedback(s) {
            // (A + Δτ·a bᵀ)ψ' = ψ + λΔτ·a (bᵀψ) by Sherman-Morrison, where
            // λ = 1/(1 + Δτ(μ − s)) is the scale of ψ' before normalization
            let z = kinetic.solve_shifted(&shift, &a);
            let denom = 1.0 + dtau * dot(&b, &z);
            if denom > 0.1 {
                let scale = 1.0 / (1.0 + dtau * (s.mu - floor));
                let coef = dtau * (dot(&b, &psi) - scale * dot(&b, &s.psi)) / denom;
                psi.iter_mut().zip(&z).for_each(|(p, zi)| *p -= coef * zi);
            }
        }
        self.normalize(&mut psi);
        self.state(psi)
    }
}

/// Starting profile: Thomas-Fermi parabola plus a Gaussian of the oscillator
/// width so the guess is positive everywhere inside the cloud.
pub fn initial_guess(model: &TrapModel, grid: &Grid1D) -> Vec<f64> {
    let mu = thomas_fermi_mu(model.trap_curvature, model.collision);
    let sigma = oscillator_length(model.trap_curvature);
    let mut psi: Vec<f64> = grid
        .interior()
        .iter()
        .map(|&x| {
            let tf = if model.collision > 0.0 {
                ((mu - model.trap_potential(x)).max(0.0) / model.collision).sqrt()
            } else {
                0.0
            };
            tf + 0.1 * (-0.5 * x * x / (sigma * sigma)).exp()
        })
        .collect();
    let s = (psi.iter().map(|v| v * v).sum::<f64>() * grid.spacing).sqrt();
    psi.iter_mut().for_each(|v| *v /= s);
    psi
}

pub fn ground_state(model: &TrapModel, grid: &Grid1D) -> Result<CondensateProfile> {
    ground_state_from(model, grid, None, &SolverOptions::default()).map(|g| g.profile)
}

/// Imaginary-time relaxation with the cavity field re-evaluated from ψ at
/// every step. `guess` warm-starts the iteration, which selects the branch
/// inside a bistable window.
pub fn ground_state_from(
    model: &TrapModel,
    grid: &Grid1D,
    guess: Option<&[f64]>,
    opts: &SolverOptions,
) -> Result<GroundState> {
    if !(model.trap_curvature > 0.0) {
        return Err(Error::InvalidValue("the trapped model needs V_tr > 0".into()));
    }
    let ws = Workspace::new(model, grid);
    let psi0 = match guess {
        Some(g) if g.len() == grid.n_interior() => {
            let mut p = g.to_vec();
            ws.normalize(&mut p);
            p
        }
        Some(g) => return Err(Error::GridMismatch { profile: g.len(), grid: grid.n_interior() }),
        None => initial_guess(model, grid),
    };
    let mut state = ws.state(psi0);
    let mu_est = thomas_fermi_mu(model.trap_curvature, model.collision)
        .max(model.trap_curvature.sqrt() / (2.0 * PI));
    let mut dtau = 0.1 / mu_est;
    let mut trace = vec![state.energy.total()];

    let mut dmu = f64::INFINITY;
    let mut dalpha = f64::INFINITY;
    let mut polish_after = 0usize;
    for iter in 1..=opts.max_iter {
        let next = ws.step(&state, dtau);
        let e_old = state.energy.total();
        let e_new = next.energy.total();
        if e_new > e_old + 1e-13 * e_old.abs().max(1.0) && dtau > 1e-8 / mu_est {
            dtau *= 0.5;
            continue;
        }
        dmu = (next.mu - state.mu).abs();
        dalpha = (next.alpha - state.alpha).norm();
        state = next;
        trace.push(state.energy.total());
        dtau = (dtau * 1.25).min(1e4 / mu_est);
        let settled = dmu < 1e2 * opts.tol_mu && dalpha < 1e2 * opts.tol_alpha;
        let stalled = (e_old - e_new).abs() <= 1e-12 * e_old.abs().max(1.0);
        if (settled || stalled) && iter >= polish_after {
            let residual = ws.residual(&state);
            if let Some(polished) = polish(&ws, &state, residual, opts, &mut trace) {
                let residual = ws.residual(&polished);
                return finish(&ws, polished, iter, residual, trace);
            }
            polish_after = iter + 200;
        }
    }
    check_wall(&state.psi)?;
    let residual = ws.residual(&state);
    Err(Error::NotConverged { iterations: opts.max_iter, dmu, dalpha, residual })
}

/// Newton refinement from a relaxed state. Returns `None` when a step fails
/// to reduce the residual, leaving further relaxation to imaginary time.
fn polish(
    ws: &Workspace,
    start: &State,
    start_residual: f64,
    opts: &SolverOptions,
    trace: &mut Vec<f64>,
) -> Option<State> {
    let mut residual = start_residual;
    let mut state = State { psi: start.psi.clone(), ..*start };
    for _ in 0..30 {
        let next = ws.newton(&state);
        let r = ws.residual(&next);
        if !(r.is_finite() && r < residual.max(opts.tol_residual * next.mu.abs())) {
            return None;
        }
        let dmu = (next.mu - state.mu).abs();
        let dalpha = (next.alpha - state.alpha).norm();
        state = next;
        residual = r;
        trace.push(state.energy.total());
        if dmu < opts.tol_mu && dalpha < opts.tol_alpha && residual < opts.tol_residual * state.mu.abs() {
            return Some(state);
        }
    }
    None
}

fn check_wall(psi: &[f64]) -> Result<()> {
    let wall = psi[0].abs().max(psi[psi.len() - 1].abs());
    if wall > WALL_TOL {
        return Err(Error::BoxTooSmall { wall_amplitude: wall });
    }
    Ok(())
}

fn finish(
    ws: &Workspace,
    state: State,
    iterations: usize,
    residual: f64,
    energy_trace: Vec<f64>,
) -> Result<GroundState> {
    check_wall(&state.psi)?;
    let profile = CondensateProfile {
        grid: ws.grid.clone(),
        norm_residual: (ws.norm2(&state.psi) - 1.0).abs(),
        psi: state.psi,
        mu: state.mu,
        alpha: state.alpha,
        photon_number: state.photon_number,
        overlap: state.overlap,
        residual,
        energy: state.energy,
        iterations,
    };
    Ok(GroundState { profile, energy_trace })
}

/// Slowly varying pair with ψ ≈ e + √2·cos(4πx)·f.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub e: Vec<f64>,
    pub f: Vec<f64>,
    /// ‖ψ − e − √2cos(4πx)f‖₂ / ‖ψ‖₂.
    pub reconstruction_error: f64,
}

const FIT_TERMS: usize = 6;

/// Solves the small dense system by Gaussian elimination with partial
/// pivoting; returns `None` when it is numerically singular.
fn solve_small(mut a: [[f64; FIT_TERMS]; FIT_TERMS], mut b: [f64; FIT_TERMS]) -> Option<[f64; FIT_TERMS]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..FIT_TERMS {
        let piv = (col..FIT_TERMS).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..FIT_TERMS {
            let factor = a[row][col] / a[col][col];
            for k in col..FIT_TERMS {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; FIT_TERMS];
    for row in (0..FIT_TERMS).rev() {
        let tail: f64 = (row + 1..FIT_TERMS).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Envelopes by a sliding-window projection: around each node, ψ over one
/// λ/2 period is fitted by (e₀ + e₁t + e₂t²) + √2cos(4πx)(f₀ + f₁t + f₂t²)
/// and (e₀, f₀) is kept. For an unmodulated ψ this is the local average
/// with the curvature bias removed; for a modulated one it is the local
/// cos(4πx) quadrature with the slope bias of e removed. The walls count as
/// nodes with ψ = 0.
pub fn decompose_envelope(grid: &Grid1D, psi: &[f64]) -> Result<Envelope> {
    if psi.len() != grid.n_interior() {
        return Err(Error::GridMismatch { profile: psi.len(), grid: grid.n_interior() });
    }
    let n = grid.n_points;
    let h = grid.spacing;
    let half = 0.25;
    let reach = (half / h + 1e-9).floor() as usize;
    let mut full = Vec::with_capacity(n);
    full.push(0.0);
    full.extend_from_slice(psi);
    full.push(0.0);
    let x: Vec<f64> = (0..n).map(|i| grid.node(i)).collect();
    let carrier: Vec<f64> = x.iter().map(|&x| SQRT_2 * (4.0 * PI * x).cos()).collect();

    let mut e = vec![0.0; psi.len()];
    let mut f = vec![0.0; psi.len()];
    for i in 1..n - 1 {
        let lo = i.saturating_sub(reach);
        let hi = (i + reach).min(n - 1);
        let mut ata = [[0.0; FIT_TERMS]; FIT_TERMS];
        let mut atb = [0.0; FIT_TERMS];
        for k in lo..=hi {
            let t = (x[k] - x[i]) / half;
            let row = [1.0, t, t * t, carrier[k], carrier[k] * t, carrier[k] * t * t];
            for r in 0..FIT_TERMS {
                atb[r] += row[r] * full[k];
                for c in 0..FIT_TERMS {
                    ata[r][c] += row[r] * row[c];
                }
            }
        }
        if let Some(coef) = solve_small(ata, atb) {
            e[i - 1] = coef[0];
            f[i - 1] = coef[3];
        } else {
            e[i - 1] = full[i];
        }
    }

    let mut err2 = 0.0;
    let mut norm2 = 0.0;
    for j in 0..psi.len() {
        let r = psi[j] - e[j] - carrier[j + 1] * f[j];
        err2 += r * r;
        norm2 += psi[j] * psi[j];
    }
    Ok(Envelope { e, f, reconstruction_error: (err2 / norm2).sqrt() })
}

/// Half-width where the averaged density e² first drops below 1e−3 of its
/// central value, linearly interpolated between nodes.
pub fn operational_tf_radius(grid: &Grid1D, envelope: &Envelope) -> f64 {
    let x = grid.interior();
    let n = x.len();
    let centre = n / 2;
    let e2: Vec<f64> = envelope.e.iter().map(|v| v * v).collect();
    let threshold = 1e-3 * e2[centre];
    for i in centre..n - 1 {
        if e2[i + 1] < threshold {
            let t = (e2[i] - threshold) / (e2[i] - e2[i + 1]);
            return x[i] + t * (x[i + 1] - x[i]);
        }
    }
    x[n - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "up" => Ok(Self::Up),
            "down" => Ok(Self::Down),
            other => Err(Error::InvalidValue(format!("direction must be up or down, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrappedSweepPoint {
    pub delta_c: f64,
    pub profile: CondensateProfile,
}

/// Warm-started sweep over δ_C. The grid is traversed in increasing order for
/// `Up` and decreasing order for `Down`; points are returned in traversal order.
pub fn sweep_trapped(
    model: &TrapModel,
    grid: &Grid1D,
    deltas: &[f64],
    direction: Direction,
    opts: &SolverOptions,
) -> Result<Vec<TrappedSweepPoint>> {
    let mut order: Vec<f64> = deltas.to_vec();
    order.sort_by(f64::total_cmp);
    if direction == Direction::Down {
        order.reverse();
    }
    let mut out: Vec<TrappedSweepPoint> = Vec::with_capacity(order.len());
    for &delta_c in &order {
        let guess = out.last().map(|p| p.profile.psi.as_slice());
        let gs = ground_state_from(&model.at_detuning(delta_c), grid, guess, opts)?;
        out.push(TrappedSweepPoint { delta_c, profile: gs.profile });
    }
    Ok(out)
}

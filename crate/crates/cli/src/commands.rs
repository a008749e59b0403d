use bec_optomech::band::{self, BandMeanField, Branch};
use bec_optomech::effective::{self, EffectiveModel};
use bec_optomech::par;
use bec_optomech::table::SweepTable;
use bec_optomech::trapped::{
    decompose_envelope, ground_state, identify_optomech_track, operational_tf_radius,
    sweep_trapped, thomas_fermi_radius, Direction, Grid1D, Parity, SolverOptions, TrapModel,
};
use serde_json::json;

use crate::{
    load_params, parallelism, BandStructureArgs, BandSweepArgs, BranchChoice, Failure,
    ParityChoice, SweepArgs, SweepDirection, TrappedGroundArgs, TrappedSpectrumArgs,
    TrappedSweepArgs,
};

const BAND_RANGE: (f64, f64, usize) = (-15000.0, 5000.0, 401);
const TRAPPED_RANGE: (f64, f64, usize) = (-8000.0, 2000.0, 101);
const SPECTRUM_RANGE: (f64, f64, usize) = (-8000.0, 2000.0, 60);

fn branch_code(b: Option<Branch>) -> i64 {
    match b {
        None => -1,
        Some(Branch::Lower) => 0,
        Some(Branch::Middle) => 1,
        Some(Branch::Upper) => 2,
    }
}

fn direction(d: SweepDirection) -> Direction {
    match d {
        SweepDirection::Up => Direction::Up,
        SweepDirection::Down => Direction::Down,
    }
}

/// One row per steady state: branch track, stability, |γ0|² and the
/// optomechanical mode.
pub fn band_sweep(args: &BandSweepArgs) -> Result<SweepTable, Failure> {
    let p = load_params(&args.common)?;
    let grid = args.grid.resolve(BAND_RANGE)?;
    let par = parallelism(&args.common);
    let sweep = band::sweep_branches(&p, &grid, par)?;
    let rows: Vec<(f64, usize, usize, BandMeanField)> = sweep
        .delta_c
        .iter()
        .zip(&sweep.points)
        .flat_map(|(&d, sols)| sols.iter().map(move |&(id, s)| (d, id, sols.len(), s)))
        .collect();
    let modes = par::map(&rows, par, |(d, _, _, s)| {
        band::optomech_mode(s, &p.with_shifted_detuning(*d))
    });

    let mut table = SweepTable::new("delta_c", &p);
    let mut omega = Vec::with_capacity(rows.len());
    let mut c_weight = Vec::with_capacity(rows.len());
    let mut ambiguous = Vec::with_capacity(rows.len());
    for m in modes {
        let m = m?;
        omega.push(m.mode.omega);
        c_weight.push(m.mode.c_weight);
        ambiguous.push(i64::from(m.ambiguous()));
    }
    table
        .push_real("delta_c", rows.iter().map(|r| r.0).collect())
        .push_integer("track", rows.iter().map(|r| r.1 as i64).collect())
        .push_integer("n_solutions", rows.iter().map(|r| r.2 as i64).collect())
        .push_integer(
            "branch",
            rows.iter().map(|r| branch_code(r.3.branch)).collect(),
        )
        .push_integer(
            "stable",
            rows.iter().map(|r| i64::from(r.3.stable)).collect(),
        )
        .push_real(
            "photon_number",
            rows.iter().map(|r| r.3.photon_number).collect(),
        )
        .push_real(
            "gamma0_sq",
            rows.iter().map(|r| r.3.gamma * r.3.gamma).collect(),
        )
        .push_real("mu", rows.iter().map(|r| r.3.mu).collect())
        .push_complex("omega", &omega)
        .push_real("c_weight", c_weight)
        .push_integer("ambiguous", ambiguous)
        .set_summary(
            "branch_codes",
            "-1 single solution, 0 lower, 1 middle, 2 upper",
        );
    let window = band::bistable_window(&p)?;
    table.set_summary(
        "bistable_window",
        window.map(|(a, b)| json!([a, b])).unwrap_or(json!(null)),
    );
    Ok(table)
}

pub fn band_structure(args: &BandStructureArgs) -> Result<SweepTable, Failure> {
    let p = load_params(&args.common)?;
    let d = p.shifted_detuning();
    let sols = band::solve_branches(&p, d)?;
    if sols.is_empty() {
        return Err(Failure::Runtime(format!(
            "no steady state at delta_c = {d}"
        )));
    }
    let sol = match (sols.len(), args.branch) {
        (1, _) => sols[0],
        (_, BranchChoice::Lower) => sols[0],
        (_, BranchChoice::Middle) => sols[sols.len() / 2],
        (_, BranchChoice::Upper) => sols[sols.len() - 1],
    };
    let q = crate::linspace(-1.0, 1.0, args.q_steps);
    // q = 0 belongs to the cavity-coupled matrix
    let q: Vec<f64> = q.into_iter().filter(|&x| x != 0.0).collect();
    let points = band::band_structure(&sol, &p, &q, parallelism(&args.common))?;

    let mut table = SweepTable::new("q", &p);
    let omega: Vec<_> = points.iter().map(|s| s.omega).collect();
    table
        .push_real("q", points.iter().map(|s| s.q.unwrap_or(0.0)).collect())
        .push_integer("band", points.iter().map(|s| s.track as i64).collect())
        .push_complex("omega", &omega)
        .push_real("c_weight", points.iter().map(|s| s.c_weight).collect())
        .push_real(
            "cavity_weight",
            points.iter().map(|s| s.cavity_weight).collect(),
        )
        .set_summary("photon_number", sol.photon_number)
        .set_summary("gamma0_sq", sol.gamma * sol.gamma)
        .set_summary("branch", branch_code(sol.branch))
        .set_summary("polariton_band", 3);
    Ok(table)
}

pub fn effective(args: &SweepArgs) -> Result<SweepTable, Failure> {
    let p = load_params(&args.common)?;
    let grid = args.grid.resolve(BAND_RANGE)?;
    let model = EffectiveModel::from_params(&p)?;
    let kappa = p.cavity_halfwidth;
    let eta = p.drive;
    let roots = par::map(&grid, parallelism(&args.common), |&d| {
        effective::cubic_photon_number(&model, kappa, eta, d)
    });

    let (mut delta, mut index, mut photon, mut stable, mut population) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (&d, r) in grid.iter().zip(roots) {
        let r = r?;
        for (k, i) in r.values().into_iter().enumerate() {
            delta.push(d);
            index.push(k as i64);
            photon.push(i);
            stable.push(i64::from(r.is_stable(k)));
            population.push(model.mode_population(i, p.atom_number));
        }
    }
    let mut table = SweepTable::new("delta_c", &p);
    table
        .push_real("delta_c", delta)
        .push_integer("root", index)
        .push_real("photon_number", photon)
        .push_integer("stable", stable)
        .push_real("gamma0_sq", population)
        .set_summary("omega_tilde", model.frequency)
        .set_summary("coupling_tilde", model.renormalized_coupling)
        .set_summary("chi", model.chi);
    match effective::bistability_threshold(&model, kappa) {
        Ok(t) => table.set_summary("threshold_eta_sq", t),
        Err(_) => table.set_summary("threshold_eta_sq", json!(null)),
    };
    let window = effective::bistable_window(&model, kappa, eta);
    table.set_summary(
        "bistable_window",
        window.map(|(a, b)| json!([a, b])).unwrap_or(json!(null)),
    );
    Ok(table)
}

fn trap_setup(
    args: &crate::Common,
    points: usize,
) -> Result<(bec_optomech::SystemParams, TrapModel, Grid1D), Failure> {
    let p = load_params(args)?;
    let model = TrapModel::from_params(&p)?;
    let grid = Grid1D::for_trap(points, model.trap_curvature, model.collision)?;
    Ok((p, model, grid))
}

/// Profile (x, ψ) with μ, α, I and the Thomas-Fermi radii in the header.
pub fn trapped_ground(args: &TrappedGroundArgs) -> Result<SweepTable, Failure> {
    let (p, model, grid) = trap_setup(&args.common, args.grid_points)?;
    let profile = ground_state(&model, &grid)?;
    let envelope = decompose_envelope(&grid, &profile.psi)?;
    let mut table = SweepTable::new("x", &p);
    table
        .push_real("x", profile.x())
        .push_real("psi", profile.psi.clone());
    if args.envelope {
        table
            .push_real("e", envelope.e.clone())
            .push_real("f", envelope.f.clone());
    }
    let header = json!({
        "mu": profile.mu,
        "alpha": [profile.alpha.re, profile.alpha.im],
        "photon_number": profile.photon_number,
        "params_hash": p.hash(),
        "overlap": profile.overlap,
        "effective_detuning": model.effective_detuning(profile.overlap),
        "residual": profile.residual,
        "energy": profile.energy.total(),
        "r_tf": profile.analytic_tf_radius(&model),
        "r_tf_closed_form": thomas_fermi_radius(model.trap_curvature, model.collision),
        "r_tf_operational": operational_tf_radius(&grid, &envelope),
        "envelope_error": envelope.reconstruction_error,
        "half_width": grid.half_width,
        "grid_points": grid.n_points,
    });
    table.set_summary("profile", header);
    Ok(table)
}

pub fn trapped_sweep(args: &TrappedSweepArgs) -> Result<SweepTable, Failure> {
    let (p, model, grid) = trap_setup(&args.common, args.grid_points)?;
    let deltas = args.grid.resolve(TRAPPED_RANGE)?;
    let points = sweep_trapped(
        &model,
        &grid,
        &deltas,
        direction(args.direction),
        &SolverOptions::default(),
    )?;
    let alpha: Vec<_> = points.iter().map(|s| s.profile.alpha).collect();
    let mut table = SweepTable::new("delta_c", &p);
    table
        .push_real("delta_c", points.iter().map(|s| s.delta_c).collect())
        .push_real(
            "photon_number",
            points.iter().map(|s| s.profile.photon_number).collect(),
        )
        .push_complex("alpha", &alpha)
        .push_real("mu", points.iter().map(|s| s.profile.mu).collect())
        .push_real(
            "overlap",
            points.iter().map(|s| s.profile.overlap).collect(),
        )
        .push_real(
            "effective_detuning",
            points
                .iter()
                .map(|s| {
                    model
                        .at_detuning(s.delta_c)
                        .effective_detuning(s.profile.overlap)
                })
                .collect(),
        )
        .push_real(
            "energy",
            points.iter().map(|s| s.profile.energy.total()).collect(),
        )
        .set_summary("direction", format!("{:?}", args.direction).to_lowercase())
        .set_summary("half_width", grid.half_width)
        .set_summary("grid_points", grid.n_points);
    Ok(table)
}

pub fn trapped_spectrum(args: &TrappedSpectrumArgs) -> Result<SweepTable, Failure> {
    let (p, model, grid) = trap_setup(&args.common, args.grid_points)?;
    let deltas = args.grid.resolve(SPECTRUM_RANGE)?;
    let points = sweep_trapped(
        &model,
        &grid,
        &deltas,
        direction(args.direction),
        &SolverOptions::default(),
    )?;
    let parities: &[Parity] = match args.parity {
        ParityChoice::Even => &[Parity::Even],
        ParityChoice::Odd => &[Parity::Odd],
        ParityChoice::Both => &[Parity::Even, Parity::Odd],
    };
    let pairs: Vec<_> = points.into_iter().map(|s| (s.delta_c, s.profile)).collect();
    let tracked = identify_optomech_track(
        &pairs,
        &model,
        parities,
        args.max_frequency,
        parallelism(&args.common),
    )?;
    let rows = &tracked.modes;
    let mut table = SweepTable::new("delta_c", &p);
    table
        .push_real("delta_c", rows.iter().map(|m| m.delta_c).collect())
        .push_integer("track_id", rows.iter().map(|m| m.track as i64).collect())
        .push_real("re_omega", rows.iter().map(|m| m.omega.re).collect())
        .push_real("im_omega", rows.iter().map(|m| m.omega.im).collect())
        .push_integer("parity", rows.iter().map(|m| m.parity.sign()).collect())
        .push_real(
            "cavity_weight",
            rows.iter().map(|m| m.cavity_weight).collect(),
        )
        .push_integer(
            "flag_two_mode",
            rows.iter().map(|m| i64::from(m.flag_two_mode)).collect(),
        )
        .push_integer(
            "optomech",
            rows.iter().map(|m| i64::from(m.optomech)).collect(),
        )
        .set_summary("direction", format!("{:?}", args.direction).to_lowercase())
        .set_summary("max_frequency", args.max_frequency)
        .set_summary("grid_points", grid.n_points);
    Ok(table)
}

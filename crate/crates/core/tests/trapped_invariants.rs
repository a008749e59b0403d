use bec_optomech::trapped::{
    ground_state, ground_state_from, sweep_trapped, thomas_fermi_radius, trap_half_width, Direction, Grid1D,
    SolverOptions, TrapModel,
};
use proptest::prelude::*;

fn fig4() -> TrapModel {
    TrapModel {
        atom_number: 6e4,
        light_shift: 0.96,
        drive: 549.5,
        kappa: 363.9,
        bare_detuning: 0.0,
        collision: 2.0,
        trap_curvature: 0.01,
    }
    .at_detuning(0.0)
}

fn grid_for(m: &TrapModel) -> Grid1D {
    let l = trap_half_width(m.trap_curvature, m.collision);
    Grid1D::new((42.0 * 2.0 * l).ceil() as usize + 1, l).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ground_state_invariants(
        delta_c in -8000.0f64..3000.0,
        gn in 0.0f64..3.0,
        v in 0.02f64..0.2,
    ) {
        let m = TrapModel { collision: gn, trap_curvature: v, ..fig4() }.at_detuning(delta_c);
        let p = ground_state(&m, &grid_for(&m)).unwrap();
        let h = p.grid.spacing;
        let norm: f64 = p.psi.iter().map(|x| x * x).sum::<f64>() * h;
        prop_assert!((norm - 1.0).abs() < 1e-10);
        prop_assert!(p.norm_residual < 1e-10);
        prop_assert!(p.parity_defect() < 1e-8, "parity {}", p.parity_defect());
        prop_assert!(p.residual < 1e-8 * p.mu.abs(), "residual {}", p.residual);
        prop_assert!((p.alpha - m.cavity_field(p.overlap)).norm() < 1e-10);
        prop_assert!((p.photon_number - p.alpha.norm_sqr()).abs() < 1e-10);
        prop_assert!(p.psi.iter().all(|x| *x > -1e-12));
    }
}

#[test]
fn grid_refinement_changes_mu_little() {
    let m = fig4();
    let coarse = ground_state(&m, &Grid1D::for_trap(1000, 0.01, 2.0).unwrap()).unwrap();
    let fine = ground_state(&m, &Grid1D::for_trap(2000, 0.01, 2.0).unwrap()).unwrap();
    assert!((coarse.mu - fine.mu).abs() < 1e-4 * fine.mu.abs(), "{} vs {}", coarse.mu, fine.mu);
}

#[test]
fn thomas_fermi_virial() {
    let m = fig4();
    let p = ground_state(&m, &Grid1D::for_trap(1000, 0.01, 2.0).unwrap()).unwrap();
    assert!(p.energy.kinetic < 0.05 * p.energy.collision, "{:?}", p.energy);
    let r = p.analytic_tf_radius(&m);
    assert!((r / thomas_fermi_radius(0.01, 2.0) - 1.0).abs() < 0.03);
}

#[test]
fn hysteresis_between_sweep_directions() {
    let m = fig4();
    let g = Grid1D::for_trap(1000, 0.01, 2.0).unwrap();
    let deltas: Vec<f64> = (0..=20).map(|k| -8000.0 + 500.0 * k as f64).collect();
    let opts = SolverOptions::default();
    let up = sweep_trapped(&m, &g, &deltas, Direction::Up, &opts).unwrap();
    let down = sweep_trapped(&m, &g, &deltas, Direction::Down, &opts).unwrap();
    assert_eq!(up.first().unwrap().delta_c, -8000.0);
    assert_eq!(down.first().unwrap().delta_c, 2000.0);
    let at = |pts: &[bec_optomech::trapped::TrappedSweepPoint], d: f64| {
        pts.iter().find(|p| p.delta_c == d).unwrap().profile.photon_number
    };
    // inside the bistable region the downward sweep stays on the bright branch
    assert!(at(&down, -3000.0) > 10.0 * at(&up, -3000.0));
    // outside it both directions agree
    assert!((at(&down, -8000.0) - at(&up, -8000.0)).abs() < 1e-8);
    assert!((at(&down, 2000.0) - at(&up, 2000.0)).abs() < 1e-8);
}

#[test]
fn warm_start_reaches_the_cold_solution() {
    let m = fig4().at_detuning(-7000.0);
    let g = Grid1D::for_trap(1000, 0.01, 2.0).unwrap();
    let cold = ground_state(&m, &g).unwrap();
    let seed = ground_state(&fig4().at_detuning(-6000.0), &g).unwrap();
    let warm = ground_state_from(&m, &g, Some(&seed.psi), &SolverOptions::default()).unwrap().profile;
    assert!((cold.mu - warm.mu).abs() < 1e-9);
    assert!((cold.photon_number - warm.photon_number).abs() < 1e-9);
}

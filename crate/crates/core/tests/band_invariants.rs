use bec_optomech::band::{
    bistable_window, equation_residuals, goldstone_check, optomech_mode, solve_branches, sweep_branches,
};
use bec_optomech::effective::{cubic_photon_number, renormalize, EffectiveModel};
use bec_optomech::par::Parallelism;
use bec_optomech::params::{parse_config, validate_params};
use bec_optomech::SystemParams;
use proptest::prelude::*;

fn params(g: f64, eta: f64, delta_c: f64) -> SystemParams {
    let text = format!("N=6e4\nU0=0.96\neta={eta}\nkappa=363.9\ndelta_c={delta_c}\nG_coll={g}");
    validate_params(&parse_config(&text).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn steady_states_satisfy_equations(
        g in 0.0f64..2.5,
        eta in 50.0f64..900.0,
        delta_c in -12000.0f64..4000.0,
    ) {
        let p = params(g, eta, delta_c);
        let sols = solve_branches(&p, delta_c).unwrap();
        prop_assert!(!sols.is_empty() && sols.len() != 2 && sols.len() <= 3);
        for s in &sols {
            let r = equation_residuals(s, &p).unwrap();
            prop_assert!(r.iter().all(|v| *v < 1e-8), "{r:?}");
            prop_assert!((s.beta.powi(2) + s.gamma.powi(2) - 1.0).abs() < 1e-12);
            prop_assert!(s.gamma <= 0.0);
            prop_assert!(s.photon_number >= 0.0);
        }
        prop_assert!(sols.windows(2).all(|w| w[0].photon_number <= w[1].photon_number));
    }

    #[test]
    fn phase_mode_at_every_steady_state(
        g in 0.0f64..2.0,
        eta in 100.0f64..800.0,
        delta_c in -10000.0f64..2000.0,
    ) {
        let p = params(g, eta, delta_c);
        for s in solve_branches(&p, delta_c).unwrap() {
            let check = goldstone_check(&s, &p).unwrap();
            prop_assert!(check.min_abs_omega < 1e-8, "{check:?}");
            prop_assert!(check.overlap > 0.999, "{check:?}");
        }
    }

    #[test]
    fn cubic_roots_are_roots(
        g in 0.0f64..3.0,
        eta in 10.0f64..1000.0,
        delta_c in -20000.0f64..5000.0,
    ) {
        let p = params(g, eta, delta_c);
        let m = EffectiveModel::from_params(&p).unwrap();
        let [a, b, c, d] = m.cubic_coefficients(363.9, eta, delta_c);
        let roots = cubic_photon_number(&m, 363.9, eta, delta_c).unwrap();
        prop_assert!(roots.values().len() == 1 || roots.values().len() == 3);
        for i in roots.values() {
            let scale = (a * i.powi(3)).abs() + (b * i * i).abs() + (c * i).abs() + d.abs();
            prop_assert!((((a * i + b) * i + c) * i + d).abs() < 1e-10 * scale);
        }
    }

    #[test]
    fn renormalized_frequency_grows_with_collisions(g1 in 0.0f64..5.0, dg in 1e-3f64..5.0) {
        let a = renormalize(4.0, g1, 100.0);
        let b = renormalize(4.0, g1 + dg, 100.0);
        prop_assert!(b.frequency > a.frequency);
        prop_assert!(b.renormalized_coupling < a.renormalized_coupling);
        prop_assert!((a.chi.powi(4) * 4.0 - (4.0 + 2.0 * g1)).abs() < 1e-12);
    }
}

#[test]
fn parallel_sweep_matches_sequential() {
    let p = params(1.0, 549.5, 0.0);
    let grid: Vec<f64> = (0..120).map(|k| -12000.0 + 120.0 * k as f64).collect();
    let seq = sweep_branches(&p, &grid, Parallelism::Sequential).unwrap();
    let par = sweep_branches(&p, &grid, Parallelism::Threads(3)).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn branches_keep_their_ids_through_the_window() {
    let p = params(1.0, 549.5, 0.0);
    let (lo, hi) = bistable_window(&p).unwrap().unwrap();
    let grid: Vec<f64> = (0..=200).map(|k| lo - 500.0 + (hi - lo + 1000.0) * k as f64 / 200.0).collect();
    let sweep = sweep_branches(&p, &grid, Parallelism::Sequential).unwrap();
    let inside: Vec<_> = sweep.points.iter().filter(|pts| pts.len() == 3).collect();
    assert!(!inside.is_empty());
    for pts in inside.windows(2) {
        let ids = |v: &Vec<(usize, _)>| v.iter().map(|(id, _)| *id).collect::<Vec<_>>();
        assert_eq!(ids(pts[0]), ids(pts[1]));
    }
}

#[test]
fn optomech_mode_is_the_cos_mode_far_from_resonance() {
    for g in [0.0, 1.0, 2.0] {
        let p = params(g, 549.5, -1e6);
        let sol = solve_branches(&p, -1e6).unwrap()[0];
        let mode = optomech_mode(&sol, &p).unwrap().mode;
        let want = (4.0 * (4.0 + 2.0 * g) as f64).sqrt();
        assert!((mode.omega.re - want).abs() < 1e-3, "G = {g}: {}", mode.omega);
        assert!(mode.c_weight > 0.9);
    }
}

use std::f64::consts::PI;

use super::roots::{Root, RootSet};
use crate::error::{Error, Result};

/// Classical discriminant of a3·x³ + a2·x² + a1·x + a0. Positive means three
/// distinct real roots, zero a repeated root, negative one real root.
pub fn cubic_discriminant(a3: f64, a2: f64, a1: f64, a0: f64) -> f64 {
    18.0 * a3 * a2 * a1 * a0 - 4.0 * a2.powi(3) * a0 + a2 * a2 * a1 * a1
        - 4.0 * a3 * a1.powi(3)
        - 27.0 * a3 * a3 * a0 * a0
}

fn eval(coeffs: [f64; 4], x: f64) -> (f64, f64) {
    let [a3, a2, a1, a0] = coeffs;
    let value = ((a3 * x + a2) * x + a1) * x + a0;
    let slope = (3.0 * a3 * x + 2.0 * a2) * x + a1;
    (value, slope)
}

/// All distinct real roots of a3·x³ + a2·x² + a1·x + a0, ascending.
///
/// Closed form on the depressed cubic, one Newton step per root. Whether the
/// cubic has one, two (one of them double) or three distinct roots is decided
/// from the sign of the depressed discriminant, with values within a few ulps
/// of zero treated as a repeated root.
pub fn solve_cubic_real(a3: f64, a2: f64, a1: f64, a0: f64) -> Result<RootSet> {
    if a3 == 0.0 {
        return Err(Error::NotCubic);
    }
    let b = a2 / a3;
    let c = a1 / a3;
    let d = a0 / a3;

    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b.powi(3) / 27.0 - b * c / 3.0 + d;

    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p.powi(3);
    let disc_scale = half_q * half_q + third_p.abs().powi(3);
    let degenerate = disc.abs() <= 64.0 * f64::EPSILON * disc_scale;

    let mut depressed: Vec<f64> = if disc_scale == 0.0 {
        vec![0.0]
    } else if degenerate {
        // One simple and one double root: t = 2m and t = -m with m³ = -q/2.
        let m = (-half_q).cbrt();
        vec![2.0 * m, -m]
    } else if disc > 0.0 {
        let s = disc.sqrt();
        let w = -half_q - half_q.signum() * s;
        let w = if half_q == 0.0 { s } else { w };
        let a = w.cbrt();
        vec![if a == 0.0 { 0.0 } else { a - third_p / a }]
    } else {
        let r = 2.0 * (-third_p).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| r * (phi - 2.0 * PI * k as f64 / 3.0).cos())
            .collect()
    };

    let coeffs = [a3, a2, a1, a0];
    let mut xs: Vec<f64> = depressed
        .drain(..)
        .map(|t| {
            let x = t - shift;
            let (fx, dfx) = eval(coeffs, x);
            // skip the polish at a double root where the slope vanishes
            if degenerate || dfx.abs() <= 1e-12 * (a3.abs() + a2.abs() + a1.abs()) {
                x
            } else {
                let polished = x - fx / dfx;
                if eval(coeffs, polished).0.abs() <= fx.abs() {
                    polished
                } else {
                    x
                }
            }
        })
        .collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * 1f64.max(a.abs()));

    Ok(RootSet {
        roots: xs
            .into_iter()
            .map(|x| Root { x, residual: eval(coeffs, x).0.abs(), bracket: (x, x) })
            .collect(),
    })
}

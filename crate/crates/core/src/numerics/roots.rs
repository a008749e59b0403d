use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    /// Interval that still brackets the sign change after refinement.
    pub bracket: (f64, f64),
}

/// Real roots in strictly increasing order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Root>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.x).collect()
    }
}

/// Samples `f` on `n_scan` uniformly spaced points of `[lo, hi]` and refines
/// every sign change by bisection.
///
/// Refinement stops when `|f| < tol` or the bracket is narrower than
/// `tol·max(1, |x|)`. `tol = 0` bisects down to adjacent floats. Roots where
/// `f` touches zero without changing sign are only found if a sample lands
/// on them exactly.
pub fn find_roots_scan<F>(f: F, interval: (f64, f64), n_scan: usize, tol: f64) -> Result<RootSet>
where
    F: Fn(f64) -> f64,
{
    let (lo, hi) = interval;
    assert!(n_scan >= 2, "n_scan must be at least 2");
    assert!(hi > lo, "empty interval");

    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteFunction { x })
        }
    };

    let step = (hi - lo) / (n_scan - 1) as f64;
    let abscissa = |i: usize| if i == n_scan - 1 { hi } else { lo + step * i as f64 };

    let mut roots = Vec::new();
    let mut x_prev = abscissa(0);
    let mut f_prev = eval(x_prev)?;
    if f_prev == 0.0 {
        roots.push(Root { x: x_prev, residual: 0.0, bracket: (x_prev, x_prev) });
    }
    for i in 1..n_scan {
        let x = abscissa(i);
        let fx = eval(x)?;
        if fx == 0.0 {
            roots.push(Root { x, residual: 0.0, bracket: (x, x) });
        } else if f_prev != 0.0 && (f_prev < 0.0) != (fx < 0.0) {
            roots.push(bisect(&eval, x_prev, x, f_prev, tol)?);
        }
        x_prev = x;
        f_prev = fx;
    }
    Ok(RootSet { roots })
}

fn bisect<F>(eval: &F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> Result<Root>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut best = (a, fa);
    for _ in 0..2000 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = eval(mid)?;
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm == 0.0 || fm.abs() < tol {
            return Ok(Root { x: mid, residual: fm.abs(), bracket: (a, b) });
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if b - a < tol * 1f64.max(mid.abs()) {
            break;
        }
    }
    let x = 0.5 * (a + b);
    let fx = eval(x)?;
    let (x, fx) = if fx.abs() <= best.1.abs() { (x, fx) } else { best };
    Ok(Root { x, residual: fx.abs(), bracket: (a, b) })
}

/// Bisection on a bracket known to contain a sign change.
pub fn bisect_bracket<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Root>
where
    F: Fn(f64) -> f64,
{
    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteFunction { x })
        }
    };
    let fa = eval(a)?;
    if fa == 0.0 {
        return Ok(Root { x: a, residual: 0.0, bracket: (a, a) });
    }
    bisect(&eval, a, b, fa, tol)
}

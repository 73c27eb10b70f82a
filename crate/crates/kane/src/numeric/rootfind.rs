//! Bisection with bracket scanning and a damped two-dimensional
//! Newton–Raphson with forward-difference Jacobian.

use super::Scalar;
use crate::KaneError;

/// Bisect `f` on `[lo, hi]` down to an interval of width `tol`.
///
/// Requires a sign change over the bracket. Returns the midpoint of the
/// final interval.
pub fn bisect<S: Scalar, F: Fn(S) -> S>(
    f: F,
    mut lo: S,
    mut hi: S,
    tol: S,
) -> Result<S, KaneError> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == S::zero() {
        return Ok(lo);
    }
    if fhi == S::zero() {
        return Ok(hi);
    }
    if (flo > S::zero()) == (fhi > S::zero()) {
        return Err(KaneError::NoSignChange {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    for _ in 0..200 {
        let mid = (lo + hi) * S::of(0.5);
        if (hi - lo).abs() <= tol {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == S::zero() {
            return Ok(mid);
        }
        if (fm > S::zero()) == (flo > S::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * S::of(0.5))
}

/// Scan `[lo, hi]` at `n` uniform points and return every sign-change bracket.
pub fn scan_brackets<S: Scalar, F: Fn(S) -> S>(f: F, lo: S, hi: S, n: usize) -> Vec<(S, S)> {
    let mut out = Vec::new();
    let step = (hi - lo) / S::of(n as f64);
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..=n {
        let x = lo + step * S::of(i as f64);
        let fx = f(x);
        if f_prev == S::zero() || (fx > S::zero()) != (f_prev > S::zero()) {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}

/// Outcome of the damped 2-dimensional Newton iteration.
#[derive(Debug, Clone)]
pub struct Newton2Result {
    pub x: [f64; 2],
    pub residual: [f64; 2],
    pub iterations: usize,
    /// max-norm of the residual at the returned iterate
    pub residual_norm: f64,
    /// |J00*J11 - J01*J10| / max row norm^2 at the last Jacobian
    pub jacobian_condition: f64,
    /// true if the loop ended because damping could not reduce the residual
    pub stalled: bool,
}

/// Damped Newton–Raphson for a 2-vector function of 2 unknowns.
///
/// The Jacobian is forward finite differences with relative step `1e-7`;
/// steps are halved while the residual norm fails to decrease; iterates are
/// confined to `domain = [lo0, hi0, lo1, hi1]`. Ends when the max-norm
/// residual is below `tol`, when damping stalls, or after `max_iter`.
pub fn newton2<F: Fn([f64; 2]) -> [f64; 2]>(
    f: F,
    seed: [f64; 2],
    domain: [f64; 4],
    tol: f64,
    max_iter: usize,
) -> Result<Newton2Result, KaneError> {
    let norm = |v: [f64; 2]| v[0].abs().max(v[1].abs());
    let inside = |x: [f64; 2]| {
        x[0] > domain[0] && x[0] < domain[1] && x[1] > domain[2] && x[1] < domain[3]
    };
    if !inside(seed) {
        return Err(KaneError::LeftDomain {
            iterate: seed.to_vec(),
        });
    }

    let mut x = seed;
    let mut fx = f(x);
    let mut cond = f64::NAN;
    for it in 0..max_iter {
        let r = norm(fx);
        if r < tol {
            return Ok(Newton2Result {
                x,
                residual: fx,
                iterations: it,
                residual_norm: r,
                jacobian_condition: cond,
                stalled: false,
            });
        }

        // forward-difference Jacobian
        let mut jac = [[0.0f64; 2]; 2];
        for k in 0..2 {
            let h = 1e-7 * x[k].abs().max(1e-12);
            let mut xp = x;
            xp[k] += h;
            let fp = f(xp);
            jac[0][k] = (fp[0] - fx[0]) / h;
            jac[1][k] = (fp[1] - fx[1]) / h;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let row_scale = (jac[0][0].abs() + jac[0][1].abs())
            .max(jac[1][0].abs() + jac[1][1].abs());
        cond = if row_scale > 0.0 {
            det.abs() / (row_scale * row_scale)
        } else {
            0.0
        };
        if det == 0.0 || !det.is_finite() || cond < 1e-14 {
            return Err(KaneError::SingularJacobian {
                iterate: x.to_vec(),
                residual: r,
            });
        }
        let dx = [
            -(jac[1][1] * fx[0] - jac[0][1] * fx[1]) / det,
            -(-jac[1][0] * fx[0] + jac[0][0] * fx[1]) / det,
        ];

        // damping by halving while the residual norm does not decrease
        let mut lambda = 1.0;
        let mut advanced = false;
        for _ in 0..40 {
            let xn = [x[0] + lambda * dx[0], x[1] + lambda * dx[1]];
            if inside(xn) {
                let fn_ = f(xn);
                if norm(fn_) < r {
                    x = xn;
                    fx = fn_;
                    advanced = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !advanced {
            return Ok(Newton2Result {
                x,
                residual: fx,
                iterations: it,
                residual_norm: r,
                jacobian_condition: cond,
                stalled: true,
            });
        }
    }
    Err(KaneError::MaxIterations {
        solver: "newton2",
        iterations: max_iter,
        residual: norm(fx),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x: f64| x * x - 2.0, 1.0, 2.0, 1e-13).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        assert!(matches!(
            bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(KaneError::NoSignChange { .. })
        ));
    }

    #[test]
    fn scan_finds_all_roots() {
        // sin has roots at pi and 2pi inside (0.1, 7)
        let b = scan_brackets(|x: f64| x.sin(), 0.1, 7.0, 1000);
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn newton_linear_in_one_step() {
        // f(x) = A x - b exact after a single Newton step
        let f = |x: [f64; 2]| [2.0 * x[0] + x[1] - 3.0, x[0] - x[1], ];
        let r = newton2(f, [10.0, -7.0], [-100.0, 100.0, -100.0, 100.0], 1e-12, 50).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-10 && (r.x[1] - 1.0).abs() < 1e-10);
        assert!(r.iterations <= 2);
    }

    #[test]
    fn newton_nonlinear() {
        let f = |x: [f64; 2]| [x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1]];
        let r = newton2(f, [1.0, 2.0], [0.0, 10.0, 0.0, 10.0], 1e-12, 100).unwrap();
        let s = 2.0f64.sqrt();
        assert!((r.x[0] - s).abs() < 1e-9 && (r.x[1] - s).abs() < 1e-9);
    }
}

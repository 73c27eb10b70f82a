//! Real roots of real cubics via the trigonometric/hyperbolic Cardano
//! branches, polished by Newton steps.

use super::Scalar;

/// All real roots of `z^3 + b z^2 + c z + d = 0`, unordered.
///
/// A real cubic always has at least one real root; three are returned in the
/// casus irreducibilis. Each root gets two Newton polish steps against the
/// original (undepressed) cubic.
pub fn real_roots<S: Scalar>(b: S, c: S, d: S) -> Vec<S> {
    let third = S::of(1.0 / 3.0);
    let p = c - b * b * third;
    let q = S::of(2.0 / 27.0) * b * b * b - b * c * third + d;

    let half_q = q * S::of(0.5);
    let p3 = p * third;
    let disc = half_q * half_q + p3 * p3 * p3;

    let shift = b * third;
    let mut roots = Vec::with_capacity(3);
    if disc > S::zero() {
        // one real root
        let s = disc.sqrt();
        let u = -half_q + s;
        let v = -half_q - s;
        let t = u.cbrt() + v.cbrt();
        roots.push(t - shift);
    } else if p == S::zero() && q == S::zero() {
        roots.push(-shift);
        roots.push(-shift);
        roots.push(-shift);
    } else {
        // three real roots (trig branch)
        let m = S::of(2.0) * (-p3).sqrt();
        let arg = (-half_q / ((-p3) * (-p3).sqrt())).max(-S::one()).min(S::one());
        let phi = arg.acos();
        let tau = S::of(2.0 * std::f64::consts::PI);
        for k in 0..3 {
            let ang = (phi + tau * S::of(k as f64)) * third;
            roots.push(m * ang.cos() - shift);
        }
    }

    for z in roots.iter_mut() {
        *z = polish(*z, b, c, d);
    }
    roots
}

fn polish<S: Scalar>(mut z: S, b: S, c: S, d: S) -> S {
    for _ in 0..2 {
        let f = ((z + b) * z + c) * z + d;
        let fp = (S::of(3.0) * z + S::of(2.0) * b) * z + c;
        if fp != S::zero() {
            let step = f / fp;
            if step.is_finite() {
                z = z - step;
            }
        }
    }
    z
}

/// Evaluate `z^3 + b z^2 + c z + d`.
pub fn eval<S: Scalar>(z: S, b: S, c: S, d: S) -> S {
    ((z + b) * z + c) * z + d
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_factorization() {
        // (z-1)(z-2)(z-3) = z^3 - 6z^2 + 11z - 6
        let mut r = real_roots(-6.0f64, 11.0, -6.0);
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((r[0] - 1.0).abs() < 1e-12);
        assert!((r[1] - 2.0).abs() < 1e-12);
        assert!((r[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_real_root() {
        // z^3 + z + 1: one real root near -0.6823278
        let r = real_roots(0.0f64, 1.0, 1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] + 0.682_327_803_828_019_3).abs() < 1e-12);
    }

    proptest! {
        // spec example: random real coefficients -> residual below 1e-9
        // (scaled by the cubic's own magnitude at the root)
        #[test]
        fn residual_small(b in -10.0..10.0f64, c in -10.0..10.0f64, d in -10.0..10.0f64) {
            let roots = real_roots(b, c, d);
            prop_assert!(!roots.is_empty());
            for z in roots {
                let scale = 1.0_f64.max(z.abs().powi(3));
                prop_assert!(eval(z, b, c, d).abs() <= 1e-9 * scale);
            }
        }
    }
}

//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! This is the independent oracle the closed-form eigensystems are checked
//! against, so it deliberately depends on nothing but the rotation algebra
//! below. It also backs the Hermitian matrix exponential used by the
//! propagators (dimensions here are 4 and 16, where Jacobi is entirely
//! adequate).

use super::Scalar;
use ndarray::{Array1, Array2};
use num_complex::Complex;

/// Eigen-decomposition `A = V diag(w) V†` of a Hermitian matrix.
///
/// Eigenvalues ascend; eigenvectors are the columns of `V`, each with its
/// first non-negligible component rotated to the positive real axis.
pub fn hermitian_eigen<S: Scalar>(a: &Array2<Complex<S>>) -> (Array1<S>, Array2<Complex<S>>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut m = a.clone();
    let mut v: Array2<Complex<S>> = Array2::eye(n);

    let norm: S = a.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt();
    let tol = S::of(1e-15) * norm.max(S::of(1e-300));

    for _sweep in 0..60 {
        let mut off = S::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q, tol);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<S> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let mut w = Array1::zeros(n);
    let mut vs = Array2::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        w[col] = diag[i];
        for r in 0..n {
            vs[(r, col)] = v[(r, i)];
        }
    }
    fix_phases(&mut vs);
    (w, vs)
}

fn rotate<S: Scalar>(
    m: &mut Array2<Complex<S>>,
    v: &mut Array2<Complex<S>>,
    p: usize,
    q: usize,
    tol: S,
) {
    let apq = m[(p, q)];
    let a_abs = apq.norm();
    if a_abs <= tol * S::of(1e-2) {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let zeta = (aqq - app) / (S::of(2.0) * a_abs);
    let t = if zeta == S::zero() {
        S::one()
    } else {
        let sgn = if zeta > S::zero() { S::one() } else { -S::one() };
        sgn / (zeta.abs() + (S::one() + zeta * zeta).sqrt())
    };
    let c = S::one() / (S::one() + t * t).sqrt();
    let s = t * c;
    let phase = apq / Complex::new(a_abs, S::zero());
    // 2x2 unitary [[c, sigma], [-conj(sigma), c]] on columns (p, q)
    let sigma = phase * Complex::new(s, S::zero());

    let n = m.nrows();
    let cc = Complex::new(c, S::zero());
    // columns: M <- M J
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * cc - mkq * sigma.conj();
        m[(k, q)] = mkp * sigma + mkq * cc;
    }
    // rows: M <- J^H M
    for l in 0..n {
        let mpl = m[(p, l)];
        let mql = m[(q, l)];
        m[(p, l)] = mpl * cc - mql * sigma;
        m[(q, l)] = mpl * sigma.conj() + mql * cc;
    }
    m[(p, q)] = Complex::new(S::zero(), S::zero());
    m[(q, p)] = Complex::new(S::zero(), S::zero());
    m[(p, p)] = Complex::new(m[(p, p)].re, S::zero());
    m[(q, q)] = Complex::new(m[(q, q)].re, S::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cc - vkq * sigma.conj();
        v[(k, q)] = vkp * sigma + vkq * cc;
    }
}

/// Rotate each column so its first non-negligible entry is real positive.
pub fn fix_phases<S: Scalar>(v: &mut Array2<Complex<S>>) {
    let (n, cols) = (v.nrows(), v.ncols());
    for c in 0..cols {
        let mut lead = None;
        let col_norm: S = (0..n).map(|r| v[(r, c)].norm_sqr()).sum::<S>().sqrt();
        for r in 0..n {
            if v[(r, c)].norm() > S::of(1e-8) * col_norm {
                lead = Some(r);
                break;
            }
        }
        if let Some(r) = lead {
            let z = v[(r, c)];
            let ph = z / Complex::new(z.norm(), S::zero());
            for k in 0..n {
                v[(k, c)] = v[(k, c)] * ph.conj();
            }
        }
    }
}

/// Max-norm of `A - A†`.
pub fn hermitian_defect<S: Scalar>(a: &Array2<Complex<S>>) -> S {
    let n = a.nrows();
    let mut worst = S::zero();
    for i in 0..n {
        for j in 0..n {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Max-norm of `U†U - 1`.
pub fn unitarity_defect<S: Scalar>(u: &Array2<Complex<S>>) -> S {
    let n = u.nrows();
    let mut worst = S::zero();
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex::new(S::zero(), S::zero());
            for k in 0..n {
                s = s + u[(k, i)].conj() * u[(k, j)];
            }
            if i == j {
                s = s - Complex::new(S::one(), S::zero());
            }
            worst = worst.max(s.norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use num_complex::Complex64 as C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn real_symmetric_2x2() {
        let a = array![[c(2.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(2.0, 0.0)]];
        let (w, v) = hermitian_eigen(&a);
        assert!((w[0] - 1.0).abs() < 1e-14);
        assert!((w[1] - 3.0).abs() < 1e-14);
        assert!(unitarity_defect(&v) < 1e-14);
    }

    #[test]
    fn complex_hermitian_known_spectrum() {
        // Pauli-y has eigenvalues -1, +1
        let a = array![[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
        let (w, v) = hermitian_eigen(&a);
        assert!((w[0] + 1.0).abs() < 1e-14);
        assert!((w[1] - 1.0).abs() < 1e-14);
        // residual A v = w v
        for k in 0..2 {
            for r in 0..2 {
                let mut av = c(0.0, 0.0);
                for s in 0..2 {
                    av += a[(r, s)] * v[(s, k)];
                }
                assert!((av - v[(r, k)] * w[k]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn random_hermitian_reconstruction() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 16;
        let mut a = Array2::from_elem((n, n), c(0.0, 0.0));
        for i in 0..n {
            a[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
            for j in (i + 1)..n {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        let (w, v) = hermitian_eigen(&a);
        // reconstruct and compare
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut s = c(0.0, 0.0);
                for k in 0..n {
                    s += v[(i, k)] * c(w[k], 0.0) * v[(j, k)].conj();
                }
                worst = worst.max((s - a[(i, j)]).norm());
            }
        }
        assert!(worst < 1e-12, "reconstruction defect {worst}");
        assert!(unitarity_defect(&v) < 1e-13);
        // ascending order
        for k in 1..n {
            assert!(w[k] >= w[k - 1]);
        }
    }
}

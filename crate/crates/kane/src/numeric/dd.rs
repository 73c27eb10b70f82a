//! Minimal double-double arithmetic (unevaluated sum of two f64).
//!
//! Used where a closed-form eigenvalue assembly cancels ~5 orders of
//! magnitude below f64 ulp scale: the nested-radical arguments behind the
//! resonant Rabi splitting need coefficient sums accurate to ~1e-21 in meV²
//! units, which plain f64 cannot deliver. Based on the classic
//! error-free transformations (TwoSum, Dekker product via FMA).

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = f64::mul_add(a, b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, x: f64) -> Dd {
        self.add(Dd::from(x))
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, x: f64) -> Dd {
        self.mul(Dd::from(x))
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r2 = r.sub(other.mul_f64(q2));
        let q3 = r2.hi / other.hi;
        let (hi, lo) = two_sum(q1, q2);
        Dd { hi, lo: lo + q3 }
    }

    /// Square root by one Newton step on an f64 seed.
    #[inline]
    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = self.hi.sqrt();
        // x' = x + (a - x^2) / (2x)
        let err = self.sub(Dd::from(x).mul_f64(x));
        Dd::from(x).add_f64(err.value() / (2.0 * x))
    }
}

/// Product of two f64 as a double-double.
#[inline]
pub fn prod(a: f64, b: f64) -> Dd {
    let (hi, lo) = two_prod(a, b);
    Dd { hi, lo }
}

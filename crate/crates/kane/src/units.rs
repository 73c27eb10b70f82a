//! Unit conversions between the internal picosecond/meV scales and the
//! microsecond/nanosecond/millikelvin figures used in reports.

use crate::Real;

pub const PS_PER_US: Real = 1.0e6;
pub const PS_PER_NS: Real = 1.0e3;
pub const K_PER_MK: Real = 1.0e-3;

pub fn ps_to_us(t: Real) -> Real {
    t / PS_PER_US
}

pub fn us_to_ps(t: Real) -> Real {
    t * PS_PER_US
}

pub fn ps_to_ns(t: Real) -> Real {
    t / PS_PER_NS
}

pub fn ns_to_ps(t: Real) -> Real {
    t * PS_PER_NS
}

pub fn mk_to_k(t: Real) -> Real {
    t * K_PER_MK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert!((us_to_ps(ps_to_us(123.0)) - 123.0).abs() < 1e-12);
        assert!((ns_to_ps(ps_to_ns(55.5)) - 55.5).abs() < 1e-12);
        assert_eq!(mk_to_k(100.0), 0.1);
    }
}

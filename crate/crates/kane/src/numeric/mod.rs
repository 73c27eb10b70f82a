//! Scalar-generic numeric kernels: cubic roots, adaptive quadrature,
//! root finding, and a dense Hermitian Jacobi eigensolver.
//!
//! Everything here is generic over [`Scalar`] so the kernels can be
//! instantiated at `f32` or `f64`; the physics layer uses the `f64`
//! aliases from the crate root.

pub mod cubic;
pub mod dd;
pub mod jacobi;
pub mod quad;
pub mod rootfind;

use num_traits::Float;
use std::fmt::Debug;
use std::iter::Sum;

/// Floating-point scalar usable by the numeric kernels.
pub trait Scalar: Float + Sum + Debug + 'static {
    /// Lossy conversion from `f64`, for literals inside generic code.
    fn of(x: f64) -> Self;
}

impl Scalar for f64 {
    fn of(x: f64) -> Self {
        x
    }
}

impl Scalar for f32 {
    fn of(x: f64) -> Self {
        x as f32
    }
}

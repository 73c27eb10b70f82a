//! Physical constants and Hamiltonian constructors for the Kane two-qubit
//! model: one ³¹P donor per site, electron and nuclear spin-1/2 each.
//!
//! # Basis convention
//!
//! Fixed throughout the crate:
//!
//! * two-site ordering: site 1 ⊗ site 2, index `4*i1 + i2`;
//! * per site: electron ⊗ nucleus, index `2*e + n`;
//! * per spin: up (electron `|↑⟩`, nucleus `|0⟩`) first, so
//!   `e = 0 ↔ |↑⟩`, `n = 0 ↔ |0⟩` with `σ_z|↑⟩ = +|↑⟩`, `σ_z|0⟩ = +|0⟩`.
//!
//! Site basis order is therefore `|↑0⟩, |↑1⟩, |↓0⟩, |↓1⟩`.
//!
//! Energies are meV, times ps, magnetic fields tesla.

use crate::{C64, Real};
use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

/// Boltzmann constant in meV/K.
pub const KB_MEV_PER_K: Real = 8.617333262e-2;

/// Dense complex operator on the 2-, 4- or 16-dimensional spin space.
pub type Operator = Array2<C64>;

/// Which tensor space a state vector lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    SingleSite,
    TwoSite,
}

impl Basis {
    pub fn dim(self) -> usize {
        match self {
            Basis::SingleSite => 4,
            Basis::TwoSite => 16,
        }
    }
}

/// Normalized state vector over the single-site (4) or two-site (16) basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Array1<C64>,
    pub basis: Basis,
}

impl StateVector {
    pub fn new(amplitudes: Array1<C64>, basis: Basis) -> Self {
        assert_eq!(amplitudes.len(), basis.dim(), "dimension/basis mismatch");
        StateVector { amplitudes, basis }
    }

    /// Build from plain amplitudes.
    pub fn from_amplitudes(amplitudes: Vec<C64>, basis: Basis) -> Self {
        StateVector::new(Array1::from_vec(amplitudes), basis)
    }

    /// Computational-basis state `|index⟩`.
    pub fn basis_state(index: usize, basis: Basis) -> Self {
        let mut amplitudes = Array1::zeros(basis.dim());
        amplitudes[index] = C64::new(1.0, 0.0);
        StateVector { amplitudes, basis }
    }

    pub fn norm(&self) -> Real {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<Real>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes.mapv_inplace(|z| z / n);
        }
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Two-site product state `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        assert_eq!(self.basis, Basis::SingleSite);
        assert_eq!(other.basis, Basis::SingleSite);
        let mut amplitudes = Array1::zeros(16);
        for i in 0..4 {
            for j in 0..4 {
                amplitudes[4 * i + j] = self.amplitudes[i] * other.amplitudes[j];
            }
        }
        StateVector {
            amplitudes,
            basis: Basis::TwoSite,
        }
    }
}

/// Physical constants of the model.
///
/// `mu_b` and `gn_mun` store the paper-quoted Zeeman products divided by the
/// static field, so the quoted meV values are reproduced exactly at
/// `b = 2.0` T rather than re-derived from CODATA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Static field along z (tesla).
    #[serde(rename = "B_tesla")]
    pub b: Real,
    /// Electron Zeeman coefficient (meV/tesla).
    #[serde(rename = "muB_meV_per_tesla")]
    pub mu_b: Real,
    /// Nuclear Zeeman coefficient (meV/tesla).
    #[serde(rename = "gn_mun_meV_per_tesla")]
    pub gn_mun: Real,
    /// Unperturbed hyperfine energy (meV).
    #[serde(rename = "A0_meV")]
    pub a0: Real,
    /// Transverse drive amplitude (tesla).
    #[serde(rename = "Bac_tesla")]
    pub b_ac: Real,
    /// Bath temperature (kelvin).
    #[serde(rename = "temperature_K")]
    pub temperature: Real,
    /// Reduced Planck constant (meV·ps).
    #[serde(rename = "hbar_meV_ps")]
    pub hbar: Real,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            b: 2.0,
            mu_b: 0.116 / 2.0,
            gn_mun: 0.071e-3 / 2.0,
            a0: 0.121e-3,
            b_ac: 2.5e-3,
            temperature: 0.1,
            hbar: 0.6582119,
        }
    }
}

impl ModelParams {
    /// Electron Zeeman energy μ_B·B (meV).
    pub fn mu_b_b(&self) -> Real {
        self.mu_b * self.b
    }

    /// Nuclear Zeeman energy gₙμₙ·B (meV).
    pub fn gn_mun_b(&self) -> Real {
        self.gn_mun * self.b
    }

    /// ε = μ_B·B + gₙμₙ·B (meV), read-only derived quantity.
    pub fn eps(&self) -> Real {
        self.mu_b_b() + self.gn_mun_b()
    }

    /// All fields strictly positive.
    pub fn validate(&self) -> Result<(), crate::KaneError> {
        let fields = [
            ("B_tesla", self.b),
            ("muB_meV_per_tesla", self.mu_b),
            ("gn_mun_meV_per_tesla", self.gn_mun),
            ("A0_meV", self.a0),
            ("Bac_tesla", self.b_ac),
            ("temperature_K", self.temperature),
            ("hbar_meV_ps", self.hbar),
        ];
        for (name, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(crate::KaneError::InvalidParameter {
                    name,
                    value,
                    reason: "must be strictly positive and finite",
                });
            }
        }
        Ok(())
    }
}

/// Pauli axis selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Standard 2×2 Pauli matrix.
pub fn pauli(axis: Axis) -> Operator {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match axis {
        Axis::X => ndarray::array![[z, one], [one, z]],
        Axis::Y => ndarray::array![[z, -i], [i, z]],
        Axis::Z => ndarray::array![[one, z], [z, -one]],
    }
}

fn eye(n: usize) -> Operator {
    Array2::eye(n)
}

/// Electron Pauli operator on the 4-dim site space (electron ⊗ nucleus).
pub fn sigma_e(axis: Axis) -> Operator {
    kron(&pauli(axis), &eye(2))
}

/// Nuclear Pauli operator on the 4-dim site space.
pub fn sigma_n(axis: Axis) -> Operator {
    kron(&eye(2), &pauli(axis))
}

/// Embed a 4×4 site operator into the 16-dim two-site space.
pub fn embed_site(op: &Operator, site: usize) -> Operator {
    match site {
        1 => kron(op, &eye(4)),
        2 => kron(&eye(4), op),
        _ => panic!("site must be 1 or 2"),
    }
}

/// Single-site Hamiltonian
/// `Hⁱ = −gₙμₙB σ_zⁿ + μ_B B σ_zᵉ + A σᵉ·σⁿ` (4×4, Hermitian, real).
pub fn single_site_hamiltonian(p: &ModelParams, a: Real) -> Operator {
    assert!(a >= 0.0, "hyperfine amplitude must be nonnegative");
    let mut h = sigma_n(Axis::Z) * C64::new(-p.gn_mun_b(), 0.0)
        + sigma_e(Axis::Z) * C64::new(p.mu_b_b(), 0.0);
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        h = h + sigma_e(axis).dot(&sigma_n(axis)) * C64::new(a, 0.0);
    }
    h
}

/// Exchange coupling operator `σ¹ᵉ·σ²ᵉ` on the 16-dim space.
pub fn exchange_op() -> Operator {
    let mut j = Array2::zeros((16, 16));
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        let s = sigma_e(axis);
        j = j + embed_site(&s, 1).dot(&embed_site(&s, 2));
    }
    j
}

/// Static two-qubit Hamiltonian `H_C = H¹(A1) + H²(A2) + J σ¹ᵉ·σ²ᵉ` (16×16).
pub fn two_qubit_static_hamiltonian(p: &ModelParams, a1: Real, a2: Real, j: Real) -> Operator {
    assert!(a1 >= 0.0 && a2 >= 0.0 && j >= 0.0);
    embed_site(&single_site_hamiltonian(p, a1), 1)
        + embed_site(&single_site_hamiltonian(p, a2), 2)
        + exchange_op() * C64::new(j, 0.0)
}

/// Transverse-drive Hamiltonian on one site, as a 4×4 operator:
/// `B_ac m(t)·(−gₙμₙ σⁿ + μ_B σᵉ)` with `m(t) = (cos ω t, −sin ω t, 0)`.
pub fn ac_drive_site(p: &ModelParams, t: Real, omega_ac: Real) -> Operator {
    let mx = (omega_ac * t).cos();
    let my = -(omega_ac * t).sin();
    let ex = sigma_e(Axis::X) * C64::new(p.mu_b, 0.0) - sigma_n(Axis::X) * C64::new(p.gn_mun, 0.0);
    let ey = sigma_e(Axis::Y) * C64::new(p.mu_b, 0.0) - sigma_n(Axis::Y) * C64::new(p.gn_mun, 0.0);
    (ex * C64::new(mx, 0.0) + ey * C64::new(my, 0.0)) * C64::new(p.b_ac, 0.0)
}

/// Transverse-drive Hamiltonian embedded on `site` (1 or 2) in the 16-dim space.
pub fn ac_drive_hamiltonian(p: &ModelParams, t: Real, omega_ac: Real, site: usize) -> Operator {
    embed_site(&ac_drive_site(p, t, omega_ac), site)
}

/// Full Hamiltonian of a pulse schedule at time `t` (16×16).
///
/// Rejects `t` outside the schedule horizon.
pub fn full_hamiltonian(
    p: &ModelParams,
    schedule: &crate::profiles::PulseSchedule,
    t: Real,
) -> Result<Operator, crate::KaneError> {
    let horizon = schedule.horizon();
    if !(0.0..=horizon).contains(&t) {
        return Err(crate::KaneError::OutOfHorizon { t, horizon });
    }
    let a1 = schedule.a1(p, t);
    let a2 = schedule.a2(p, t);
    let j = schedule.j(t);
    let mut h = two_qubit_static_hamiltonian(p, a1, a2, j);
    if let Some(omega_ac) = schedule.drive_at(t) {
        h = h + ac_drive_hamiltonian(p, t, omega_ac, 1) + ac_drive_hamiltonian(p, t, omega_ac, 2);
    }
    Ok(h)
}

/// Total spin-z operator `S_z^tot` (16×16, diagonal).
pub fn s_z_total() -> Operator {
    let s1 = embed_site(&(sigma_e(Axis::Z) + sigma_n(Axis::Z)), 1);
    let s2 = embed_site(&(sigma_e(Axis::Z) + sigma_n(Axis::Z)), 2);
    (s1 + s2) * C64::new(0.5, 0.0)
}

/// Site-local spin-z operator `S_zⁱ = (σ_zᵉ + σ_zⁿ)/2` (4×4, diagonal).
pub fn s_z_site() -> Operator {
    (sigma_e(Axis::Z) + sigma_n(Axis::Z)) * C64::new(0.5, 0.0)
}

/// Site-swap parity operator `P` (16×16 permutation, P² = 1).
pub fn parity_op() -> Operator {
    let mut p = Array2::zeros((16, 16));
    for i in 0..4 {
        for j in 0..4 {
            p[(4 * i + j, 4 * j + i)] = C64::new(1.0, 0.0);
        }
    }
    p
}

/// Commutator `[a, b]`.
pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a.dot(b) - b.dot(a)
}

/// Max-norm of a complex matrix.
pub fn max_norm(a: &Operator) -> Real {
    a.iter().map(|z| z.norm()).fold(0.0, Real::max)
}

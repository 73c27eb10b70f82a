//! Error analyses: X-rotation fidelity (exact versus block-diagonal
//! rotating-frame dynamics), its perturbative estimate, thermal state and
//! electron polarization, and the logical controlled-Z gate algebra.

use crate::design::{self, CZDesign, XDesign};
use crate::model::{self, Basis, ModelParams, Operator, StateVector};
use crate::numeric::jacobi;
use crate::profiles::{self, PulseSchedule};
use crate::propagate::{self, StepSize};
use crate::spectra;
use crate::{C64, KaneError, Real};
use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use std::f64::consts::PI;

/// Computational ground state |0_L⟩ = |u₀(A)⟩ in the product basis.
pub fn computational_zero(p: &ModelParams, a: Real) -> StateVector {
    spectra::single_site_eigs(p, a).vectors[0].clone()
}

/// (|0_L⟩ + |1_L⟩)/√2 in the product basis.
pub fn computational_plus(p: &ModelParams, a: Real) -> StateVector {
    let sys = spectra::single_site_eigs(p, a);
    let mut amps = Array1::zeros(4);
    for r in 0..4 {
        amps[r] = (sys.vectors[0].amplitudes[r] + sys.vectors[1].amplitudes[r])
            * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    }
    StateVector::new(amps, Basis::SingleSite)
}

/// Express a single-site product-basis state in the |u_k(A)⟩ basis.
fn to_u_basis(p: &ModelParams, a: Real, phi: &StateVector) -> [C64; 4] {
    let sys = spectra::single_site_eigs(p, a);
    let mut c = [C64::new(0.0, 0.0); 4];
    for (k, u) in sys.vectors.iter().enumerate() {
        c[k] = u.inner(phi);
    }
    c
}

fn from_u_basis(p: &ModelParams, a: Real, c: &[C64; 4]) -> StateVector {
    let sys = spectra::single_site_eigs(p, a);
    let mut amps = Array1::zeros(4);
    for r in 0..4 {
        for (k, u) in sys.vectors.iter().enumerate() {
            amps[r] += u.amplitudes[r] * c[k];
        }
    }
    StateVector::new(amps, Basis::SingleSite)
}

/// The approximate spin flip of the block-diagonal dynamics:
/// `|ψ_rot(t_X)⟩ = e^{−i t_X E₀/ħ} e^{iθ_X σ_X} |φ⟩` in the rotating frame,
/// plus the lab-frame variant carrying the extra `D_z†(ω t_X)`.
///
/// Rejects `phi` outside span{|u₀(A)⟩, |u₁(A)⟩} (tolerance 1e-10).
pub fn approximate_x_rotation(
    p: &ModelParams,
    design: &XDesign,
    phi: &StateVector,
) -> Result<(StateVector, StateVector), KaneError> {
    let a = design.pulse.a_plateau;
    let c = to_u_basis(p, a, phi);
    let leakage = c[2].norm_sqr() + c[3].norm_sqr();
    if leakage > 1e-10 {
        return Err(KaneError::OutsideComputationalSpan { leakage });
    }
    let sys = spectra::single_site_eigs(p, a);
    let t_x = design.pulse.t_x;
    let global = C64::from_polar(1.0, -sys.energies[0] * t_x / p.hbar);
    let (ct, st) = (design.theta_x.cos(), design.theta_x.sin());
    let ist = C64::new(0.0, st);
    let rot = [
        global * (c[0] * ct + c[1] * ist),
        global * (c[0] * ist + c[1] * ct),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ];
    let rot_state = from_u_basis(p, a, &rot);
    // lab frame: apply D_z†(ω t_X) = D_z(-t_X)
    let lab_state = propagate::rotating_frame_transform(&rot_state, -t_x, design.pulse.omega_ac);
    Ok((rot_state, lab_state))
}

/// Fidelity between the exact and block-diagonal rotating-frame evolutions.
#[derive(Debug, Clone)]
pub struct FidelityReport {
    pub a_over_a0: Real,
    pub theta_x: Real,
    pub initial_state: String,
    pub exact_state: StateVector,
    pub approx_state: StateVector,
    pub fidelity: Real,
}

/// Initial states used in the fidelity comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XInitialState {
    /// |0_L⟩ at the plateau hyperfine
    ZeroL,
    /// (|0_L⟩ + |1_L⟩)/√2
    PlusL,
}

impl XInitialState {
    pub fn label(&self) -> &'static str {
        match self {
            XInitialState::ZeroL => "0",
            XInitialState::PlusL => "plus",
        }
    }

    pub fn state(&self, p: &ModelParams, a: Real) -> StateVector {
        match self {
            XInitialState::ZeroL => computational_zero(p, a),
            XInitialState::PlusL => computational_plus(p, a),
        }
    }
}

/// `F = |⟨φ| e^{iH_rot t_X/ħ} e^{−iH_d t_X/ħ} |φ⟩|` under the Larmor
/// condition, with the exact branch assembled from the closed-form
/// rotating-frame eigensystem.
pub fn x_rotation_fidelity(
    p: &ModelParams,
    a_over_a0: Real,
    theta_x: Real,
    state: XInitialState,
) -> Result<FidelityReport, KaneError> {
    let a = a_over_a0 * p.a0;
    let design = design::design_x_rotation(p, theta_x, a, None)?;
    let t_x = design.pulse.t_x;
    let omega = design.pulse.omega_ac;

    let rf = spectra::rot_frame_eigs(p, a, omega)?;
    let phi = state.state(p, a);
    let cu = to_u_basis(p, a, &phi);

    // exact branch: sum of closed-form eigenprojectors
    let mut exact_u = [C64::new(0.0, 0.0); 4];
    for k in 0..4 {
        let w = rf.vectors[k];
        let amp: C64 = (0..4).map(|r| C64::new(w[r], 0.0) * cu[r]).sum();
        let phase = C64::from_polar(1.0, -rf.omegas[k] * t_x / p.hbar);
        for r in 0..4 {
            exact_u[r] += C64::new(w[r], 0.0) * phase * amp;
        }
    }
    // approximate branch: block-diagonal exponential
    let h_d = spectra::rot_frame_block_diagonal(p, a, omega);
    let u_apx = propagate::matrix_exponential_hermitian(&h_d, t_x, p.hbar)?;
    let mut approx_u = [C64::new(0.0, 0.0); 4];
    for r in 0..4 {
        for c in 0..4 {
            approx_u[r] += u_apx[(r, c)] * cu[c];
        }
    }

    let fidelity = (0..4)
        .map(|r| exact_u[r].conj() * approx_u[r])
        .sum::<C64>()
        .norm();
    Ok(FidelityReport {
        a_over_a0,
        theta_x,
        initial_state: state.label().to_string(),
        exact_state: from_u_basis(p, a, &exact_u),
        approx_state: from_u_basis(p, a, &approx_u),
        fidelity,
    })
}

/// Leading-order perturbative fidelity and its phase argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeFidelity {
    pub fidelity: Real,
    /// `t_X (Δ̃₁ − Δ̃₀)/ħ` in rad
    pub phase_argument: Real,
}

/// Perturbative estimate `F = √(1/2 + 1/2 cos[t_X(Δ̃₁ − Δ̃₀)/ħ])`, where
/// Δ̃_k is the shift between the k-th block-diagonal and exact rotating-frame
/// levels, paired by maximal eigenvector overlap.
pub fn perturbative_fidelity(
    p: &ModelParams,
    a_over_a0: Real,
    theta_x: Real,
) -> Result<PerturbativeFidelity, KaneError> {
    let a = a_over_a0 * p.a0;
    let design = design::design_x_rotation(p, theta_x, a, None)?;
    let omega = design.pulse.omega_ac;
    let rf = spectra::rot_frame_eigs(p, a, omega)?;
    let h_d = spectra::rot_frame_block_diagonal(p, a, omega);
    let (wd, vd) = jacobi::hermitian_eigen(&h_d);

    // pair the two lowest H_d levels with exact levels by eigenvector overlap
    let mut shift = [0.0; 2];
    for k in 0..2 {
        let mut best = (0usize, 0.0);
        for (j, w) in rf.vectors.iter().enumerate() {
            let ov: Real = (0..4).map(|r| vd[(r, k)].re * w[r]).sum::<Real>().abs();
            if ov > best.1 {
                best = (j, ov);
            }
        }
        shift[k] = rf.omegas[best.0] - wd[k];
    }
    let phase_argument = design.pulse.t_x * (shift[1] - shift[0]) / p.hbar;
    Ok(PerturbativeFidelity {
        fidelity: (0.5 + 0.5 * phase_argument.cos()).sqrt(),
        phase_argument,
    })
}

/// Gibbs-state populations over the single-site eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalReport {
    pub temperature: Real,
    pub populations: [Real; 4],
    pub ratio_up_down: Real,
}

/// Thermal equilibrium populations `e^{−βE_k}/Z` over |u_k(A)⟩ at
/// temperature `t` (kelvin).
pub fn thermal_state(p: &ModelParams, a: Real, t: Real) -> ThermalReport {
    assert!(t > 0.0, "temperature must be positive");
    let sys = spectra::single_site_eigs(p, a);
    let beta = 1.0 / (model::KB_MEV_PER_K * t);
    let e0 = sys.energies[0];
    let weights: Vec<Real> = sys.energies.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z: Real = weights.iter().sum();
    let mut populations = [0.0; 4];
    for k in 0..4 {
        populations[k] = weights[k] / z;
    }
    ThermalReport {
        temperature: t,
        populations,
        ratio_up_down: polarization_ratio(p, a, t),
    }
}

/// Ratio of thermally up- to down-polarized electrons,
/// `n↑/n↓ = [e^{−βΔ₃₀} + cos²θ e^{−βΔ₂₀} + sin²θ] /
///          [sin²θ e^{−βΔ₂₀} + e^{−βΔ₁₀} + cos²θ]`.
pub fn polarization_ratio(p: &ModelParams, a: Real, t: Real) -> Real {
    assert!(t > 0.0);
    let sys = spectra::single_site_eigs(p, a);
    let beta = 1.0 / (model::KB_MEV_PER_K * t);
    let d = [sys.gap(1), sys.gap(2), sys.gap(3)];
    let (s2, c2) = {
        let s = sys.theta.sin();
        let c = sys.theta.cos();
        (s * s, c * c)
    };
    let up = (-beta * d[2]).exp() + c2 * (-beta * d[1]).exp() + s2;
    let down = s2 * (-beta * d[1]).exp() + (-beta * d[0]).exp() + c2;
    up / down
}

/// A labelled unitary on the 4-dim logical two-qubit space.
#[derive(Debug, Clone)]
pub struct LogicalGate {
    pub label: String,
    pub matrix: Operator,
}

fn pauli_on(axis: model::Axis, qubit: usize) -> Operator {
    let s = model::pauli(axis);
    let id = Array2::eye(2);
    match qubit {
        1 => kron(&s, &id),
        2 => kron(&id, &s),
        _ => unreachable!(),
    }
}

fn two_axis(axis: model::Axis) -> Operator {
    pauli_on(axis, 1).dot(&pauli_on(axis, 2))
}

fn exp_neg_i(h: &Operator, angle: Real) -> Operator {
    propagate::matrix_exponential_hermitian(h, angle, 1.0).expect("Hermitian generator")
}

/// The Hadamard gate as the composition
/// `−i e^{iπσ_z/4} e^{iπσ_x/4} e^{iπσ_z/4}` (2×2).
pub fn hadamard_composed() -> Operator {
    let z = model::pauli(model::Axis::Z);
    let x = model::pauli(model::Axis::X);
    let ez = exp_neg_i(&z, -PI / 4.0);
    let ex = exp_neg_i(&x, -PI / 4.0);
    ez.dot(&ex).dot(&ez) * C64::new(0.0, -1.0)
}

/// Controlled-Z construction from the two-qubit phase elements.
#[derive(Debug, Clone)]
pub struct CzComposition {
    /// `W = e^{−iδ_C(σ_z⊗σ_z + σ_y⊗σ_y)} e^{−iδ′_C σ_x⊗σ_x}`
    pub w: LogicalGate,
    /// `W(1⊗σ_z)W(1⊗σ_z)(1⊗e^{iθσ_z/2})` with θ = 4δ_C
    pub composed: LogicalGate,
    /// `e^{−i(θ/2)σ_z⊗σ_z}(1⊗e^{i(θ/2)σ_z})`
    pub direct: LogicalGate,
    /// `V = e^{−ic} e^{−iδ_s(σ_{1z} + σ_{2z})}`
    pub v: LogicalGate,
}

/// Assemble the controlled-Z gate of angle θ_cz = 4δ_C both as the
/// W-composition and as the direct exponential, along with the single-qubit
/// factor V.
pub fn logical_cz_composition(
    delta_c: Real,
    delta_c_prime: Real,
    delta_s: Real,
    c: Real,
) -> CzComposition {
    let zz = two_axis(model::Axis::Z);
    let yy = two_axis(model::Axis::Y);
    let xx = two_axis(model::Axis::X);
    let sz2 = pauli_on(model::Axis::Z, 2);

    let w = exp_neg_i(&(&zz + &yy), delta_c).dot(&exp_neg_i(&xx, delta_c_prime));
    let theta = 4.0 * delta_c;
    let half_z = exp_neg_i(&sz2, -0.5 * theta); // e^{+i θ σ_z/2 ⊗ on qubit 2}
    let composed = w.dot(&sz2).dot(&w).dot(&sz2).dot(&half_z);
    let direct = exp_neg_i(&zz, 0.5 * theta).dot(&half_z);

    let zsum = pauli_on(model::Axis::Z, 1) + pauli_on(model::Axis::Z, 2);
    let v = exp_neg_i(&zsum, delta_s) * C64::from_polar(1.0, -c);

    CzComposition {
        w: LogicalGate {
            label: "W".into(),
            matrix: w,
        },
        composed: LogicalGate {
            label: "U_cz composed".into(),
            matrix: composed,
        },
        direct: LogicalGate {
            label: "U_cz direct".into(),
            matrix: direct,
        },
        v: LogicalGate {
            label: "V".into(),
            matrix: v,
        },
    }
}

/// Phase elements of the plateau propagator
/// `U_st = Σ e^{−iβ_k}|v_k⟩⟨v_k|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UStDecomposition {
    pub delta_c: Real,
    pub delta_c_prime: Real,
    pub delta_s: Real,
    pub c: Real,
    /// β ordered [1, +, −, 4]
    pub betas: [Real; 4],
}

/// Split β-phases into the (c, δ_s, δ_C, δ′_C) elements.
pub fn decompose_betas(betas: [Real; 4]) -> UStDecomposition {
    let [b1, bp, bm, b4] = betas;
    UStDecomposition {
        delta_c: (bp - bm) / 4.0,
        delta_c_prime: (b1 - bp - bm + b4) / 4.0,
        delta_s: (b1 - b4) / 4.0,
        c: (b1 + bp + bm + b4) / 4.0,
        betas,
    }
}

impl UStDecomposition {
    /// Recover the β-phases; exact inverse of [`decompose_betas`].
    pub fn betas_from_elements(&self) -> [Real; 4] {
        [
            self.c + 2.0 * self.delta_s + self.delta_c_prime,
            self.c + 2.0 * self.delta_c - self.delta_c_prime,
            self.c - 2.0 * self.delta_c - self.delta_c_prime,
            self.c - 2.0 * self.delta_s + self.delta_c_prime,
        ]
    }
}

/// `U_st` on the logical space directly from its β-phases, in the logical
/// product basis.
pub fn u_st_from_betas(betas: [Real; 4]) -> Operator {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    // v-basis columns in the logical basis {|00⟩,|01⟩,|10⟩,|11⟩}
    let v_cols: [[Real; 4]; 4] = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, inv, inv, 0.0],
        [0.0, inv, -inv, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ];
    let mut u = Array2::zeros((4, 4));
    for (k, col) in v_cols.iter().enumerate() {
        let phase = C64::from_polar(1.0, -betas[k]);
        for r in 0..4 {
            for c in 0..4 {
                u[(r, c)] += C64::new(col[r], 0.0) * phase * C64::new(col[c], 0.0);
            }
        }
    }
    u
}

/// Decompose the plateau propagator of a controlled-Z pulse and return the
/// single-qubit factor V together with the phase elements.
pub fn u_st_decomposition(p: &ModelParams, pulse: &profiles::CZPulse) -> (LogicalGate, UStDecomposition) {
    let phases = profiles::cz_phase_integrals(p, pulse);
    let dec = decompose_betas(phases.beta);
    let comp = logical_cz_composition(dec.delta_c, dec.delta_c_prime, dec.delta_s, dec.c);
    (comp.v, dec)
}

/// How the spin-flip (Hadamard) steps of the gate assembly are modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HadamardMode {
    /// exact Hadamard matrices
    Idealized,
    /// X-rotation step taken from the full rotating-frame dynamics,
    /// including the off-diagonal mixing block
    Physical,
}

/// End-to-end controlled-Z verification report.
#[derive(Debug, Clone)]
pub struct CzCheckReport {
    /// max |arg⟨v_k|U_C|v_k⟩ + (α_k + β_k)| over the four eigenvectors, rad
    pub diagonal_phase_max_err: Real,
    /// max population leaving the computational span
    pub leakage_max: Real,
    /// wrap(α₊−α₁−π), wrap(α₋−α₁−π), wrap(α₄−α₁) in rad
    pub alpha_condition_errs: [Real; 3],
    /// phase-aligned max-norm distance of the assembled gate from U_cz(θ)
    pub logical_distance: Real,
    pub hadamard_mode: HadamardMode,
    pub crossing_flagged: bool,
    pub unitarity_defect: Real,
}

fn wrap_angle(x: Real) -> Real {
    let two_pi = 2.0 * PI;
    let mut r = x % two_pi;
    if r > PI {
        r -= two_pi;
    }
    if r < -PI {
        r += two_pi;
    }
    r
}

/// Phase-aligned operator distance `min_φ ‖U − e^{iφ}V‖_max`.
pub fn phase_aligned_distance(u: &Operator, v: &Operator) -> Real {
    let mut tr = C64::new(0.0, 0.0);
    let n = u.nrows();
    for r in 0..n {
        for c in 0..n {
            tr += v[(r, c)].conj() * u[(r, c)];
        }
    }
    let phase = if tr.norm() > 0.0 {
        tr / C64::new(tr.norm(), 0.0)
    } else {
        C64::new(1.0, 0.0)
    };
    let mut worst = 0.0;
    for r in 0..n {
        for c in 0..n {
            worst = Real::max(worst, (u[(r, c)] - phase * v[(r, c)]).norm());
        }
    }
    worst
}

/// Propagate a solved controlled-Z design, verify the adiabatic phases and
/// leakage, and assemble the logical gate.
pub fn end_to_end_cz_check(
    p: &ModelParams,
    design: &CZDesign,
    mode: HadamardMode,
) -> Result<CzCheckReport, KaneError> {
    let pulse = design.pulse;
    let schedule = PulseSchedule::controlled_z(pulse);
    let psi0 = StateVector::basis_state(0, Basis::TwoSite);
    let result = propagate::evolve(p, &schedule, &psi0, 0.0, pulse.duration(), StepSize::Auto)?;
    let u_c = &result.propagator;

    // computational eigenvectors at A0 (two-site, 16-dim)
    let sys = spectra::single_site_eigs(p, p.a0);
    let u0 = &sys.vectors[0];
    let u1 = &sys.vectors[1];
    let mut v_basis: Vec<StateVector> = vec![
        u0.tensor(u0),
        u0.tensor(u1),
        u1.tensor(u0),
        u1.tensor(u1),
    ];
    // v+ and v- from the product pair
    let mut vp = Array1::zeros(16);
    let mut vm = Array1::zeros(16);
    for r in 0..16 {
        let a01 = v_basis[1].amplitudes[r];
        let a10 = v_basis[2].amplitudes[r];
        vp[r] = (a01 + a10) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        vm[r] = (a01 - a10) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    }
    v_basis[1] = StateVector::new(vp, Basis::TwoSite);
    v_basis[2] = StateVector::new(vm, Basis::TwoSite);

    let apply = |m: &Operator, v: &StateVector| -> StateVector {
        let mut out = Array1::zeros(16);
        for r in 0..16 {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..16 {
                acc += m[(r, c)] * v.amplitudes[c];
            }
            out[r] = acc;
        }
        StateVector::new(out, Basis::TwoSite)
    };

    let phases = profiles::cz_phase_integrals(p, &pulse);
    let mut diagonal_phase_max_err: Real = 0.0;
    let mut leakage_max: Real = 0.0;
    for k in 0..4 {
        let image = apply(u_c, &v_basis[k]);
        let kept: Real = v_basis.iter().map(|v| v.inner(&image).norm_sqr()).sum();
        leakage_max = leakage_max.max(1.0 - kept);
        let amp = v_basis[k].inner(&image);
        let predicted = -(phases.alpha[k] + phases.beta[k]);
        let err = wrap_angle(amp.arg() - predicted).abs();
        diagonal_phase_max_err = diagonal_phase_max_err.max(err);
    }

    let alpha_condition_errs = [
        wrap_angle(phases.alpha[1] - phases.alpha[0] - PI),
        wrap_angle(phases.alpha[2] - phases.alpha[0] - PI),
        wrap_angle(phases.alpha[3] - phases.alpha[0]),
    ];

    // logical-gate assembly per the W-composition recipe: project U_C onto
    // the logical basis, strip U_ad and V, sandwich in Hadamards
    let logical_basis = [
        v_basis[0].clone(),
        {
            // |01⟩_L
            u0.tensor(u1)
        },
        u1.tensor(u0),
        u1.tensor(u1),
    ];
    let mut u_logical = Array2::zeros((4, 4));
    for r in 0..4 {
        for c in 0..4 {
            u_logical[(r, c)] = logical_basis[r].inner(&apply(u_c, &logical_basis[c]));
        }
    }
    // U_ad in the logical basis
    let mut u_ad = Array2::zeros((4, 4));
    {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let v_cols: [[Real; 4]; 4] = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, inv, inv, 0.0],
            [0.0, inv, -inv, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        for (k, col) in v_cols.iter().enumerate() {
            let phase = C64::from_polar(1.0, -phases.alpha[k]);
            for r in 0..4 {
                for c in 0..4 {
                    u_ad[(r, c)] += C64::new(col[r], 0.0) * phase * C64::new(col[c], 0.0);
                }
            }
        }
    }
    let dec = decompose_betas(phases.beta);
    let comp = logical_cz_composition(dec.delta_c, dec.delta_c_prime, dec.delta_s, dec.c);

    let h_single = match mode {
        HadamardMode::Idealized => hadamard_composed(),
        HadamardMode::Physical => physical_hadamard(p)?,
    };
    let hh = kron(&h_single, &h_single);
    let dagger = |m: &Operator| -> Operator {
        let mut out = Array2::zeros(m.raw_dim());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                out[(r, c)] = m[(c, r)].conj();
            }
        }
        out
    };
    let w_from_uc = hh
        .dot(&dagger(&comp.v.matrix))
        .dot(&dagger(&u_ad))
        .dot(&u_logical)
        .dot(&hh);
    let theta = design.theta_cz;
    let sz2 = pauli_on(model::Axis::Z, 2);
    let half_z = exp_neg_i(&sz2, -0.5 * theta);
    let assembled = w_from_uc.dot(&sz2).dot(&w_from_uc).dot(&sz2).dot(&half_z);
    let ideal = exp_neg_i(&two_axis(model::Axis::Z), 0.5 * theta).dot(&half_z);
    let logical_distance = phase_aligned_distance(&assembled, &ideal);

    Ok(CzCheckReport {
        diagonal_phase_max_err,
        leakage_max,
        alpha_condition_errs,
        logical_distance,
        hadamard_mode: mode,
        crossing_flagged: design.crossing_flagged || phases.crossing_flagged,
        unitarity_defect: result.max_unitarity_defect,
    })
}

/// The Hadamard assembled from the physical spin-flip step: the θ_X = π/4
/// X rotation taken from the full rotating-frame propagator (mixing block
/// included), projected onto the computational pair, with the overall phase
/// `e^{−i t_X E₀/ħ}` compensated.
pub fn physical_hadamard(p: &ModelParams) -> Result<Operator, KaneError> {
    let a = 0.5 * p.a0;
    let design = design::design_x_rotation(p, PI / 4.0, a, None)?;
    let rf = spectra::rot_frame_eigs(p, a, design.pulse.omega_ac)?;
    let t_x = design.pulse.t_x;
    let mut x_block = Array2::zeros((2, 2));
    for k in 0..4 {
        let w = rf.vectors[k];
        let phase = C64::from_polar(1.0, -rf.omegas[k] * t_x / p.hbar);
        for r in 0..2 {
            for c in 0..2 {
                x_block[(r, c)] += C64::new(w[r], 0.0) * phase * C64::new(w[c], 0.0);
            }
        }
    }
    let sys = spectra::single_site_eigs(p, a);
    let global = C64::from_polar(1.0, sys.energies[0] * t_x / p.hbar);
    let x_block = x_block * global;
    let z = model::pauli(model::Axis::Z);
    let ez = exp_neg_i(&z, -PI / 4.0);
    Ok(ez.dot(&x_block).dot(&ez) * C64::new(0.0, -1.0))
}

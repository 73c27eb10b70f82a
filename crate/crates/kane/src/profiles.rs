//! Piecewise pulse shapes for the hyperfine amplitude A_i(t) and the
//! exchange coupling J(t), plus the adiabatic phase integrals over them.
//!
//! Shapes are quadratic ramps joined at fixed breakpoints; the Heaviside
//! convention at branch seams is Θ(0) = 1. All profiles are continuous and
//! the Z/CZ shapes are time-symmetric about their midpoints.

use crate::model::ModelParams;
use crate::numeric::quad;
use crate::spectra;
use crate::{KaneError, Real};
use serde::{Deserialize, Serialize};

/// Dimensionless hyperfine ramp on τ ∈ [0, 1/2]: unity at 0, `1 − a` at 1/2,
/// quadratic on either side of the τ = 1/4 seam.
pub fn f_a(tau: Real, a: Real) -> Result<Real, KaneError> {
    if !(0.0..=0.5).contains(&tau) {
        return Err(KaneError::InvalidParameter {
            name: "tau",
            value: tau,
            reason: "f_A domain is [0, 1/2]",
        });
    }
    if !(0.0 < a && a < 1.0) {
        return Err(KaneError::InvalidParameter {
            name: "a",
            value: a,
            reason: "ramp depth must lie in (0, 1)",
        });
    }
    Ok(f_a_unchecked(tau, a))
}

#[inline]
fn f_a_unchecked(tau: Real, a: Real) -> Real {
    if tau <= 0.25 {
        1.0 - 8.0 * a * tau * tau
    } else {
        let d = tau - 0.5;
        1.0 - a + 8.0 * a * d * d
    }
}

/// Dimensionless exchange ramp on τ ∈ [0, 1/2]: zero at 0, unity at 1/2,
/// seam at τ = τ′.
pub fn f_j(tau: Real, tau_prime: Real) -> Result<Real, KaneError> {
    if !(0.0..=0.5).contains(&tau) {
        return Err(KaneError::InvalidParameter {
            name: "tau",
            value: tau,
            reason: "f_J domain is [0, 1/2]",
        });
    }
    if !(0.0 < tau_prime && tau_prime < 0.5) {
        return Err(KaneError::InvalidParameter {
            name: "tau_prime",
            value: tau_prime,
            reason: "seam must lie in (0, 1/2)",
        });
    }
    Ok(f_j_unchecked(tau, tau_prime))
}

#[inline]
fn f_j_unchecked(tau: Real, tau_prime: Real) -> Real {
    if tau <= tau_prime {
        2.0 * tau * tau / tau_prime
    } else {
        let u = 1.0 - 2.0 * tau;
        1.0 - u * u / (1.0 - 2.0 * tau_prime)
    }
}

/// Symmetric hyperfine dip used by the Z rotation: `A(0) = A(t_Z) = A₀`,
/// minimum `A₀(1 − a)` at the midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZPulse {
    /// Dip depth, in (0, 1).
    pub a: Real,
    /// Pulse duration (ps).
    pub t_z: Real,
}

impl ZPulse {
    pub fn new(a: Real, t_z: Real) -> Result<Self, KaneError> {
        if !(0.0 < a && a < 1.0) {
            return Err(KaneError::InvalidParameter {
                name: "a",
                value: a,
                reason: "dip depth must lie in (0, 1)",
            });
        }
        if !(t_z > 0.0) {
            return Err(KaneError::InvalidParameter {
                name: "t_z",
                value: t_z,
                reason: "duration must be positive",
            });
        }
        Ok(ZPulse { a, t_z })
    }

    /// Hyperfine amplitude at time `t` (held at A₀ outside [0, t_z]).
    pub fn a_of_t(&self, p: &ModelParams, t: Real) -> Real {
        if !(0.0..=self.t_z).contains(&t) {
            return p.a0;
        }
        let tau = t / self.t_z;
        let tau = if tau <= 0.5 { tau } else { 1.0 - tau };
        p.a0 * f_a_unchecked(tau, self.a)
    }
}

/// Ramp–plateau–ramp hyperfine shape for the X rotation: ramps of total
/// duration `t_x_prime` down to the plateau value `a_plateau`, held for the
/// drive duration `t_x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XPulse {
    /// Plateau hyperfine value (meV), in (0, A₀).
    pub a_plateau: Real,
    /// Total ramp duration — both ramps combined (ps).
    pub t_x_prime: Real,
    /// Drive (plateau) duration (ps).
    pub t_x: Real,
    /// Drive angular frequency (rad/ps).
    pub omega_ac: Real,
    /// Drive amplitude (tesla).
    pub b_ac: Real,
}

impl XPulse {
    /// Ramp depth `a = 1 − A/A₀` linking the plateau to the ramp shape.
    pub fn ramp_depth(&self, p: &ModelParams) -> Real {
        1.0 - self.a_plateau / p.a0
    }

    pub fn validate(&self, p: &ModelParams) -> Result<(), KaneError> {
        if !(0.0 < self.a_plateau && self.a_plateau < p.a0) {
            return Err(KaneError::InvalidParameter {
                name: "a_plateau",
                value: self.a_plateau,
                reason: "plateau must lie strictly between 0 and A0",
            });
        }
        if !(self.t_x > 0.0) || !(self.t_x_prime > 0.0) {
            return Err(KaneError::InvalidParameter {
                name: "t_x",
                value: self.t_x,
                reason: "durations must be positive",
            });
        }
        Ok(())
    }

    /// Total duration `t_x_prime + t_x` (ps).
    pub fn duration(&self) -> Real {
        self.t_x_prime + self.t_x
    }

    /// Drive window `[t_on, t_off]` — the plateau.
    pub fn drive_window(&self) -> (Real, Real) {
        (0.5 * self.t_x_prime, 0.5 * self.t_x_prime + self.t_x)
    }

    pub fn a_of_t(&self, p: &ModelParams, t: Real) -> Real {
        if !(0.0..=self.duration()).contains(&t) {
            return p.a0;
        }
        let a = self.ramp_depth(p);
        let tau = t / self.t_x_prime;
        let tau_sp = 1.0 + self.t_x / self.t_x_prime;
        if tau <= 0.5 {
            p.a0 * f_a_unchecked(tau, a)
        } else if tau <= tau_sp - 0.5 {
            self.a_plateau
        } else {
            p.a0 * f_a_unchecked(tau_sp - tau, a)
        }
    }
}

/// Symmetric exchange pulse for the controlled-Z gate: ramps of combined
/// duration `t_a` up to `j_c`, held for `t_h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CZPulse {
    /// Plateau exchange energy (meV).
    pub j_c: Real,
    /// Ramp seam, in (0, 1/2).
    pub tau_prime: Real,
    /// Combined duration of both ramps (ps).
    pub t_a: Real,
    /// Plateau duration (ps).
    pub t_h: Real,
}

impl CZPulse {
    pub fn new(j_c: Real, tau_prime: Real, t_a: Real, t_h: Real) -> Result<Self, KaneError> {
        if !(j_c > 0.0) {
            return Err(KaneError::InvalidParameter {
                name: "j_c",
                value: j_c,
                reason: "plateau exchange must be positive",
            });
        }
        if !(0.0 < tau_prime && tau_prime < 0.5) {
            return Err(KaneError::InvalidParameter {
                name: "tau_prime",
                value: tau_prime,
                reason: "seam must lie in (0, 1/2)",
            });
        }
        if !(t_a > 0.0) || !(t_h > 0.0) {
            return Err(KaneError::InvalidParameter {
                name: "t_a",
                value: t_a,
                reason: "durations must be positive",
            });
        }
        Ok(CZPulse {
            j_c,
            tau_prime,
            t_a,
            t_h,
        })
    }

    /// Total gate duration `t_C = t_a + t_h` (ps).
    pub fn duration(&self) -> Real {
        self.t_a + self.t_h
    }

    /// Exchange amplitude at time `t` (zero outside [0, t_C]).
    pub fn j_of_t(&self, t: Real) -> Real {
        if !(0.0..=self.duration()).contains(&t) {
            return 0.0;
        }
        let tau = t / self.t_a;
        let tau_c = self.duration() / self.t_a;
        if tau <= 0.5 {
            self.j_c * f_j_unchecked(tau, self.tau_prime)
        } else if tau <= tau_c - 0.5 {
            self.j_c
        } else {
            self.j_c * f_j_unchecked(tau_c - tau, self.tau_prime)
        }
    }
}

/// Hyperfine trajectory of one site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SiteTrajectory {
    /// Held at `a_over_a0 · A₀`.
    Constant { a_over_a0: Real },
    Z(ZPulse),
    X(XPulse),
}

impl SiteTrajectory {
    fn a_of_t(&self, p: &ModelParams, t: Real) -> Real {
        match self {
            SiteTrajectory::Constant { a_over_a0 } => a_over_a0 * p.a0,
            SiteTrajectory::Z(z) => z.a_of_t(p, t),
            SiteTrajectory::X(x) => x.a_of_t(p, t),
        }
    }

    /// Times where the trajectory is non-smooth (segment seams).
    fn breakpoints(&self) -> Vec<Real> {
        match self {
            SiteTrajectory::Constant { .. } => vec![],
            SiteTrajectory::Z(z) => vec![0.25 * z.t_z, 0.5 * z.t_z, 0.75 * z.t_z, z.t_z],
            SiteTrajectory::X(x) => {
                let tp = x.t_x_prime;
                vec![
                    0.25 * tp,
                    0.5 * tp,
                    0.5 * tp + x.t_x,
                    0.75 * tp + x.t_x,
                    x.duration(),
                ]
            }
        }
    }
}

/// Exchange trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExchangeTrajectory {
    Zero,
    Cz(CZPulse),
}

/// Transverse drive window; the drive phase `ω_ac·t` is counted from
/// schedule-absolute time so it is continuous across segment boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveWindow {
    pub t_on: Real,
    pub t_off: Real,
    /// rad/ps
    pub omega_ac: Real,
    /// tesla
    pub b_ac: Real,
}

/// Full control schedule: per-site hyperfine trajectories, the exchange
/// trajectory, and an optional drive window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub site1: SiteTrajectory,
    pub site2: SiteTrajectory,
    pub exchange: ExchangeTrajectory,
    pub drive: Option<DriveWindow>,
    /// Schedule horizon (ps); at least the longest component duration.
    pub duration_ps: Real,
}

impl PulseSchedule {
    /// Z rotation on `site`, the other site held at A₀.
    pub fn z_rotation(site: usize, pulse: ZPulse) -> Self {
        let z = SiteTrajectory::Z(pulse);
        let hold = SiteTrajectory::Constant { a_over_a0: 1.0 };
        let (site1, site2) = if site == 1 { (z, hold) } else { (hold, z) };
        PulseSchedule {
            site1,
            site2,
            exchange: ExchangeTrajectory::Zero,
            drive: None,
            duration_ps: pulse.t_z,
        }
    }

    /// X rotation on `site`: hyperfine ramp-plateau-ramp with the drive on
    /// during the plateau.
    pub fn x_rotation(site: usize, pulse: XPulse) -> Self {
        let x = SiteTrajectory::X(pulse);
        let hold = SiteTrajectory::Constant { a_over_a0: 1.0 };
        let (site1, site2) = if site == 1 { (x, hold) } else { (hold, x) };
        let (t_on, t_off) = pulse.drive_window();
        PulseSchedule {
            site1,
            site2,
            exchange: ExchangeTrajectory::Zero,
            drive: Some(DriveWindow {
                t_on,
                t_off,
                omega_ac: pulse.omega_ac,
                b_ac: pulse.b_ac,
            }),
            duration_ps: pulse.duration(),
        }
    }

    /// Controlled-Z: both hyperfines held at A₀, exchange pulsed.
    pub fn controlled_z(pulse: CZPulse) -> Self {
        PulseSchedule {
            site1: SiteTrajectory::Constant { a_over_a0: 1.0 },
            site2: SiteTrajectory::Constant { a_over_a0: 1.0 },
            exchange: ExchangeTrajectory::Cz(pulse),
            drive: None,
            duration_ps: pulse.duration(),
        }
    }

    /// Time-independent schedule, useful as a propagation cross-check.
    pub fn constant(a1_over_a0: Real, a2_over_a0: Real, j: Real, duration_ps: Real) -> Self {
        PulseSchedule {
            site1: SiteTrajectory::Constant {
                a_over_a0: a1_over_a0,
            },
            site2: SiteTrajectory::Constant {
                a_over_a0: a2_over_a0,
            },
            exchange: if j > 0.0 {
                ExchangeTrajectory::Cz(CZPulse {
                    j_c: j,
                    tau_prime: 0.25,
                    t_a: 1.0,
                    t_h: duration_ps,
                })
            } else {
                ExchangeTrajectory::Zero
            },
            drive: None,
            duration_ps,
        }
    }

    pub fn horizon(&self) -> Real {
        self.duration_ps
    }

    pub fn a1(&self, p: &ModelParams, t: Real) -> Real {
        self.site1.a_of_t(p, t)
    }

    pub fn a2(&self, p: &ModelParams, t: Real) -> Real {
        self.site2.a_of_t(p, t)
    }

    pub fn j(&self, t: Real) -> Real {
        match &self.exchange {
            ExchangeTrajectory::Zero => 0.0,
            ExchangeTrajectory::Cz(cz) => cz.j_of_t(t),
        }
    }

    /// Drive frequency if the drive is on at time `t`.
    pub fn drive_at(&self, t: Real) -> Option<Real> {
        self.drive.as_ref().and_then(|w| {
            if (w.t_on..=w.t_off).contains(&t) {
                Some(w.omega_ac)
            } else {
                None
            }
        })
    }

    /// Times where any control is non-smooth, ascending, deduplicated.
    pub fn breakpoints(&self) -> Vec<Real> {
        let mut pts = self.site1.breakpoints();
        pts.extend(self.site2.breakpoints());
        if let ExchangeTrajectory::Cz(cz) = &self.exchange {
            let tp = cz.tau_prime * cz.t_a;
            let tc = cz.duration();
            pts.extend([tp, 0.5 * cz.t_a, tc - 0.5 * cz.t_a, tc - tp, tc]);
        }
        if let Some(w) = &self.drive {
            pts.extend([w.t_on, w.t_off]);
        }
        pts.retain(|&t| t > 0.0 && t < self.duration_ps);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        pts
    }
}

fn default_site() -> usize {
    1
}

/// Compact wire format for schedules, tagged by pulse family; time fields
/// carry their external units (μs/ns) in the key names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScheduleSpec {
    Z {
        a: Real,
        #[serde(rename = "tZ_us")]
        t_z_us: Real,
        #[serde(default = "default_site")]
        site: usize,
    },
    X {
        #[serde(rename = "A_over_A0")]
        a_over_a0: Real,
        #[serde(rename = "tXprime_us")]
        t_x_prime_us: Real,
        #[serde(rename = "tX_us")]
        t_x_us: Real,
        /// defaults to the Larmor frequency at the plateau
        #[serde(rename = "omega_ac_rad_per_ps", default)]
        omega_ac: Option<Real>,
        /// defaults to the parameter set's drive amplitude
        #[serde(rename = "Bac_tesla", default)]
        b_ac: Option<Real>,
        #[serde(default = "default_site")]
        site: usize,
    },
    Cz {
        #[serde(rename = "Jc_meV")]
        j_c_mev: Real,
        tau_prime: Real,
        #[serde(rename = "ta_ns")]
        t_a_ns: Real,
        #[serde(rename = "th_us")]
        t_h_us: Real,
    },
    Constant {
        a1_over_a0: Real,
        a2_over_a0: Real,
        #[serde(rename = "J_meV")]
        j_mev: Real,
        duration_us: Real,
    },
}

impl ScheduleSpec {
    /// Materialize the schedule; unresolved drive fields default from the
    /// parameter set.
    pub fn into_schedule(self, p: &ModelParams) -> Result<PulseSchedule, KaneError> {
        match self {
            ScheduleSpec::Z { a, t_z_us, site } => Ok(PulseSchedule::z_rotation(
                site,
                ZPulse::new(a, crate::units::us_to_ps(t_z_us))?,
            )),
            ScheduleSpec::X {
                a_over_a0,
                t_x_prime_us,
                t_x_us,
                omega_ac,
                b_ac,
                site,
            } => {
                let a = a_over_a0 * p.a0;
                let omega = omega_ac.unwrap_or_else(|| {
                    let sys = crate::spectra::single_site_eigs(p, a);
                    (sys.energies[1] - sys.energies[0]) / p.hbar
                });
                let pulse = XPulse {
                    a_plateau: a,
                    t_x_prime: crate::units::us_to_ps(t_x_prime_us),
                    t_x: crate::units::us_to_ps(t_x_us),
                    omega_ac: omega,
                    b_ac: b_ac.unwrap_or(p.b_ac),
                };
                pulse.validate(p)?;
                Ok(PulseSchedule::x_rotation(site, pulse))
            }
            ScheduleSpec::Cz {
                j_c_mev,
                tau_prime,
                t_a_ns,
                t_h_us,
            } => Ok(PulseSchedule::controlled_z(CZPulse::new(
                j_c_mev,
                tau_prime,
                crate::units::ns_to_ps(t_a_ns),
                crate::units::us_to_ps(t_h_us),
            )?)),
            ScheduleSpec::Constant {
                a1_over_a0,
                a2_over_a0,
                j_mev,
                duration_us,
            } => Ok(PulseSchedule::constant(
                a1_over_a0,
                a2_over_a0,
                j_mev,
                crate::units::us_to_ps(duration_us),
            )),
        }
    }
}

/// Adiabatic Z-rotation phases `(δ₀, δ₁)` in rad:
/// `δ_k = (t_Z/ħ) ∫₀¹ E_k(A(s)) ds` over the pulse.
pub fn z_phase_integrals(p: &ModelParams, pulse: &ZPulse) -> (Real, Real) {
    let eps = p.eps();
    let a0 = p.a0;
    let depth = pulse.a;
    let shape = move |s: Real| {
        let tau = if s <= 0.5 { s } else { 1.0 - s };
        a0 * f_a_unchecked(tau, depth)
    };
    let e0 = quad::integrate(
        |s| {
            let a = shape(s);
            -a - (eps * eps + 4.0 * a * a).sqrt()
        },
        0.0,
        1.0,
        &[0.25, 0.5, 0.75],
        1e-15,
    );
    let int_a = quad::integrate(shape, 0.0, 1.0, &[0.25, 0.5, 0.75], 1e-16);
    let scale = pulse.t_z / p.hbar;
    let delta0 = scale * e0;
    let delta1 = scale * (p.gn_mun_b() - p.mu_b_b() + int_a);
    (delta0, delta1)
}

/// Closed-form `∫₀¹ A(s)/A₀ ds = 1 − a/2` for the Z shape; used as the
/// quadrature cross-check.
pub fn z_mean_hyperfine_fraction(a: Real) -> Real {
    1.0 - 0.5 * a
}

/// Adiabatic and plateau phases of the controlled-Z pulse, in rad, ordered
/// `[1, +, −, 4]` by the computational eigenvector they act on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CzPhases {
    pub alpha: [Real; 4],
    pub beta: [Real; 4],
    /// Plateau exchange within 2% of the ε/2 level-crossing region.
    pub crossing_flagged: bool,
}

/// Phase integrals of the controlled-Z pulse: `β_k = (t_h/ħ) E_k(J_c)`
/// exactly, `α_k = (2 t_a/ħ) ∫₀^{1/2} E_k(J(τ)) dτ` by adaptive quadrature
/// split at the τ′ seam.
pub fn cz_phase_integrals(p: &ModelParams, pulse: &CZPulse) -> CzPhases {
    let a0 = p.a0;
    let jc = pulse.j_c;
    let tp = pulse.tau_prime;
    let energies = |j: Real| spectra::computational_block_energies(p, a0, j);

    let plateau = energies(jc);
    let beta_scale = pulse.t_h / p.hbar;
    let beta = [
        beta_scale * plateau.e1_01,
        beta_scale * plateau.e1_m1_p1,
        beta_scale * plateau.e1_m1_m1,
        beta_scale * plateau.e1_m2_p1,
    ];

    let alpha_scale = 2.0 * pulse.t_a / p.hbar;
    let integral = |pick: fn(&spectra::ComputationalEnergies) -> Real| {
        quad::integrate(
            |tau: Real| {
                let j = jc * f_j_unchecked(tau, tp);
                pick(&energies(j))
            },
            0.0,
            0.5,
            &[tp],
            1e-14,
        )
    };
    let alpha = [
        alpha_scale * integral(|e| e.e1_01),
        alpha_scale * integral(|e| e.e1_m1_p1),
        alpha_scale * integral(|e| e.e1_m1_m1),
        alpha_scale * integral(|e| e.e1_m2_p1),
    ];

    CzPhases {
        alpha,
        beta,
        crossing_flagged: plateau.crossing_flagged,
    }
}

//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `--nocapture` to see the lines for passing criteria).
//!
//! Criteria 1–4 and 7 encode the published calibration and fidelity tables
//! verbatim. Several of those published values are not reproducible from the
//! published formulas and constants (the repository's calibration solvers
//! return the mathematically consistent values instead), so the
//! corresponding assertions fail by small, fully characterized margins; the
//! failure messages carry measured-versus-expected numbers.

use kane::analysis::{self, HadamardMode, XInitialState};
use kane::design::{self, CzSolveOptions};
use kane::model::{self, Basis, ModelParams, StateVector};
use kane::numeric::jacobi;
use kane::profiles::PulseSchedule;
use kane::propagate::{self, StepSize};
use kane::spectra;
use kane::{C64, Real};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use std::time::Instant;

struct Criterion {
    id: usize,
    title: &'static str,
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new(id: usize, title: &'static str) -> Self {
        Criterion {
            id,
            title,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, pass: bool, detail: String) {
        self.checks.push((detail, pass));
    }

    fn within(&mut self, name: &str, value: Real, expect: Real, tol: Real) {
        let pass = (value - expect).abs() <= tol;
        self.check(
            pass,
            format!("{name}: measured {value:.6e}, expected {expect:.6e} ± {tol:.1e}"),
        );
    }

    fn finish(self) {
        let pass = self.checks.iter().all(|(_, p)| *p);
        println!(
            "[criterion {}] {} — {}",
            self.id,
            if pass { "PASS" } else { "FAIL" },
            self.title
        );
        for (detail, p) in &self.checks {
            println!("    [{}] {detail}", if *p { "ok" } else { "FAIL" });
        }
        assert!(
            pass,
            "criterion {} failed:\n{}",
            self.id,
            self.checks
                .iter()
                .filter(|(_, p)| !p)
                .map(|(d, _)| format!("  {d}"))
                .collect::<Vec<_>>()
                .join("\n")
        );
    }
}

fn wrap(x: Real) -> Real {
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

#[test]
fn criterion_1_z_design_table() {
    let mut c = Criterion::new(1, "Z-rotation calibration table");
    let p = ModelParams::default();
    let start = Instant::now();
    let d1 = design::solve_z_rotation(&p, PI / 4.0, -5, -6).unwrap();
    let d2 = design::solve_z_rotation(&p, PI / 2.0, -5, -6).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    c.within("a(pi/4)", d1.pulse.a, 0.598, 2e-3);
    c.within("a(pi/2)", d2.pulse.a, 0.664, 2e-3);
    c.check(
        d1.pulse.t_z == d2.pulse.t_z,
        format!(
            "t_Z identical for both angles: {} vs {}",
            d1.pulse.t_z, d2.pulse.t_z
        ),
    );
    let t_us = d1.pulse.t_z * 1e-6;
    c.within("t_Z (us)", t_us, 0.05, 0.05 * 0.05);
    c.check(elapsed < 1.0, format!("runtime {elapsed:.3} s < 1 s"));
    c.finish();
}

#[test]
fn criterion_2_x_fidelity_table() {
    let mut c = Criterion::new(2, "X-rotation fidelity table (exact vs block-diagonal)");
    let p = ModelParams::default();
    let cells = [
        (0.75, XInitialState::ZeroL, 0.72514),
        (0.75, XInitialState::PlusL, 0.70458),
        (0.5, XInitialState::ZeroL, 0.72458),
        (0.5, XInitialState::PlusL, 0.70454),
        (0.25, XInitialState::ZeroL, 0.73390),
        (0.25, XInitialState::PlusL, 0.70526),
    ];
    let start = Instant::now();
    for (ratio, state, expect) in cells {
        let rep = kane::analysis::x_rotation_fidelity(&p, ratio, PI / 4.0, state).unwrap();
        c.within(
            &format!("F(A/A0 = {ratio}, |{}>)", state.label()),
            rep.fidelity,
            expect,
            2e-4,
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    c.check(elapsed < 1.0, format!("runtime {elapsed:.3} s < 1 s"));
    c.finish();
}

#[test]
fn criterion_3_cz_design_table() {
    let mut c = Criterion::new(3, "controlled-Z calibration table");
    let p = ModelParams::default();
    let eps = p.eps();
    let rows = [
        (0.1003, 0.1085, 5.391, 33.1),
        (0.1988, 0.0916, 5.391, 12.59),
        (0.01, 0.2203, 5.392, 40.44),
    ];
    let start = Instant::now();
    for (jf, tp, ta_ns, th_us) in rows {
        let d = design::solve_cz(&p, PI, jf * eps, tp, 0, 0, 1, CzSolveOptions::default())
            .unwrap();
        c.within(&format!("J_c/eps (seed {jf})"), d.pulse.j_c / eps, jf, 1e-3);
        c.within(&format!("tau' (seed {jf})"), d.pulse.tau_prime, tp, 2e-3);
        c.within(&format!("t_a ns (seed {jf})"), d.pulse.t_a * 1e-3, ta_ns, 0.02);
        c.within(
            &format!("t_h us (seed {jf})"),
            d.pulse.t_h * 1e-6,
            th_us,
            0.01 * th_us,
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    c.check(elapsed < 10.0, format!("runtime {elapsed:.3} s < 10 s"));
    c.finish();
}

#[test]
fn criterion_4_thermal() {
    let mut c = Criterion::new(4, "thermal populations and polarization ratio");
    let p = ModelParams::default();
    let rep = analysis::thermal_state(&p, p.a0, 0.1);
    c.within("p0 at 100 mK", rep.populations[0], 0.508, 1e-3);
    c.within("p1 at 100 mK", rep.populations[1], 0.492, 1e-3);
    let r = rep.ratio_up_down;
    c.check(
        (1e-6..=1e-4).contains(&r),
        format!("polarization ratio {r:.3e} in [1e-6, 1e-4]"),
    );
    c.finish();
}

#[test]
fn criterion_5_oracle_equivalence() {
    let mut c = Criterion::new(5, "closed-form eigenvalues match the Jacobi oracle to 1e-10");
    let p = ModelParams::default();

    // (A, J) grid for the block closed forms
    let mut worst_block: Real = 0.0;
    for ia in 0..20 {
        let a = p.a0 * (0.05 + 0.95 * ia as Real / 19.0);
        for ij in 0..20 {
            let j = 0.45 * p.eps() * ij as Real / 19.0;
            let closed = spectra::computational_block_energies(&p, a, j);
            for block in spectra::symmetry_blocks(&p, a, j) {
                let dim = block.matrix.nrows();
                let mut m = Array2::zeros((dim, dim));
                for r in 0..dim {
                    for cc in 0..dim {
                        m[(r, cc)] = C64::new(block.matrix[(r, cc)], 0.0);
                    }
                }
                let (w, _) = jacobi::hermitian_eigen(&m);
                let pairs: Vec<(Real, Real)> = match (block.label.s, block.label.p) {
                    (0, 1) => vec![(closed.e1_01, w[0]), (closed.e2_01, w[1])],
                    (-1, -1) => vec![(closed.e1_m1_m1, w[0]), (closed.e2_m1_m1, w[1])],
                    (-1, 1) => vec![(closed.e1_m1_p1, w[0])],
                    (-2, 1) => vec![(closed.e1_m2_p1, w[0])],
                    _ => vec![],
                };
                for (cf, or) in pairs {
                    worst_block = worst_block.max((cf - or).abs() / or.abs().max(1e-6));
                }
            }
        }
    }
    c.check(
        worst_block <= 1e-10,
        format!("block eigenvalues over 20x20 (A, J) grid: worst rel err {worst_block:.3e}"),
    );

    // (A, B_ac) grid for the rotating-frame closed forms
    let mut worst_rot: Real = 0.0;
    for ia in 0..20 {
        let a = p.a0 * (0.05 + 0.95 * ia as Real / 19.0);
        for ib in 0..20 {
            let mut pp = p.clone();
            pp.b_ac = 2.5e-4 + (5e-3 - 2.5e-4) * ib as Real / 19.0;
            let omega = design::larmor_frequency(&pp, a);
            let rf = spectra::rot_frame_eigs(&pp, a, omega).unwrap();
            let h = spectra::rot_frame_hamiltonian(&pp, a, omega);
            let (w, _) = jacobi::hermitian_eigen(&h);
            let mut got = rf.omegas;
            got.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for k in 0..4 {
                worst_rot = worst_rot.max((got[k] - w[k]).abs() / w[k].abs().max(1e-6));
            }
        }
    }
    c.check(
        worst_rot <= 1e-10,
        format!("rotating-frame eigenvalues over 20x20 (A, B_ac) grid: worst rel err {worst_rot:.3e}"),
    );
    c.finish();
}

#[test]
fn criterion_6_propagation_properties() {
    let mut c = Criterion::new(6, "propagation: unitarity, Z phase, CZ leakage, retention");
    let p = ModelParams::default();

    // Z pulse: phase and unitarity
    let zd = design::solve_z_rotation(&p, PI / 4.0, -5, -6).unwrap();
    let z_sched = PulseSchedule::z_rotation(1, zd.pulse);
    let plus = analysis::computational_plus(&p, p.a0);
    let zero = analysis::computational_zero(&p, p.a0);
    let psi0 = plus.tensor(&zero);
    let res = propagate::evolve(&p, &z_sched, &psi0, 0.0, zd.pulse.t_z, StepSize::Auto).unwrap();
    c.check(
        res.max_unitarity_defect < 1e-10,
        format!("Z-pulse unitarity defect {:.2e} < 1e-10", res.max_unitarity_defect),
    );
    let one = spectra::single_site_eigs(&p, p.a0).vectors[1].clone();
    let c0 = zero.tensor(&zero).inner(&res.final_state);
    let c1 = one.tensor(&zero).inner(&res.final_state);
    let phase_err = wrap((c1 / c0).arg() - PI / 4.0).abs();
    c.check(
        phase_err < 1e-3,
        format!("Z-pulse accumulated phase error {phase_err:.2e} rad < 1e-3"),
    );

    // CZ pulse: leakage and unitarity
    let cd = design::solve_cz(
        &p,
        PI,
        0.1003 * p.eps(),
        0.1085,
        0,
        0,
        1,
        CzSolveOptions::default(),
    )
    .unwrap();
    let report = analysis::end_to_end_cz_check(&p, &cd, HadamardMode::Idealized).unwrap();
    c.check(
        report.unitarity_defect < 1e-10,
        format!("CZ-pulse unitarity defect {:.2e} < 1e-10", report.unitarity_defect),
    );
    c.check(
        report.leakage_max < 1e-3,
        format!("CZ computational-subspace leakage {:.2e} < 1e-3", report.leakage_max),
    );

    // adiabatic ground-state retention through the Z pulse
    let mut psi = zero.tensor(&zero);
    let n_check = 16;
    let mut min_pop: Real = 1.0;
    let mut worst_defect: Real = 0.0;
    for k in 0..n_check {
        let t0 = zd.pulse.t_z * k as Real / n_check as Real;
        let t1 = zd.pulse.t_z * (k + 1) as Real / n_check as Real;
        let r = propagate::evolve(&p, &z_sched, &psi, t0, t1, StepSize::Auto).unwrap();
        psi = r.final_state;
        worst_defect = worst_defect.max(r.max_unitarity_defect);
        let ground = spectra::single_site_eigs(&p, z_sched.a1(&p, t1)).vectors[0].clone();
        min_pop = min_pop.min(ground.tensor(&zero).inner(&psi).norm_sqr());
    }
    c.check(
        min_pop > 1.0 - 1e-4,
        format!("instantaneous ground-state retention {min_pop:.8} > 1 − 1e-4"),
    );
    c.check(
        worst_defect < 1e-10,
        format!("checkpointed unitarity defect {worst_defect:.2e} < 1e-10"),
    );
    c.finish();
}

#[test]
fn criterion_7_perturbation_failure_demonstration() {
    let mut c = Criterion::new(
        7,
        "perturbative F > 0.999 while exact F < 0.73 at (A/A0 = 0.5, pi/4)",
    );
    let p = ModelParams::default();
    let pert = analysis::perturbative_fidelity(&p, 0.5, PI / 4.0).unwrap();
    c.check(
        pert.fidelity > 0.999,
        format!("perturbative F = {:.6}", pert.fidelity),
    );
    let exact = analysis::x_rotation_fidelity(&p, 0.5, PI / 4.0, XInitialState::ZeroL)
        .unwrap()
        .fidelity;
    c.check(exact < 0.73, format!("exact F = {exact:.6} (< 0.73 expected)"));
    c.finish();
}

#[test]
fn criterion_8_gate_algebra() {
    let mut c = Criterion::new(8, "controlled-Z composition and Hadamard identities");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240817);
    let mut worst: Real = 0.0;
    for _ in 0..100 {
        let dc = rng.gen_range(-PI..PI);
        let dcp = rng.gen_range(-PI..PI);
        let comp = analysis::logical_cz_composition(dc, dcp, 0.0, 0.0);
        worst = worst.max(model::max_norm(
            &(&comp.composed.matrix - &comp.direct.matrix),
        ));
    }
    c.check(
        worst < 1e-12,
        format!("composed vs direct over 100 draws: worst {worst:.3e} < 1e-12"),
    );
    let h = analysis::hadamard_composed();
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let mut dh: Real = 0.0;
    let want = [[inv, inv], [inv, -inv]];
    for r in 0..2 {
        for cc in 0..2 {
            dh = dh.max((h[(r, cc)] - C64::new(want[r][cc], 0.0)).norm());
        }
    }
    c.check(dh < 1e-14, format!("Hadamard identity defect {dh:.3e} < 1e-14"));
    c.finish();
}

#[test]
fn criterion_9_level_crossing_location() {
    let mut c = Criterion::new(9, "minimal (0,1)-block gap near J = eps/2");
    let p = ModelParams::default();
    let grid: Vec<Real> = (0..=1200)
        .map(|k| 0.3 * p.eps() + 0.4 * p.eps() * k as Real / 1200.0)
        .collect();
    let rows = spectra::energy_level_scan(&p, p.a0, &grid);
    let (mut min_gap, mut argmin) = (Real::INFINITY, 0.0);
    for r in &rows {
        let gap = (r.energies[1] - r.energies[0]).abs();
        if gap < min_gap {
            min_gap = gap;
            argmin = r.j;
        }
    }
    let frac = argmin / p.eps();
    c.check(
        frac > 0.45 && frac < 0.55,
        format!("min gap at J/eps = {frac:.4} in (0.45, 0.55)"),
    );
    c.finish();
}

// keeps the unused-import lint honest for the Array1 helper used above
#[allow(dead_code)]
fn _basis_helper() -> StateVector {
    StateVector::new(Array1::zeros(16), Basis::TwoSite)
}

//! Closed-form eigensystems: single site, the symmetry blocks of the static
//! two-qubit Hamiltonian, and the single-site rotating frame — each
//! cross-checkable against the dense Jacobi oracle in [`crate::numeric`].
//!
//! The block and rotating-frame eigenvalues come from Ferrari-resolvent
//! radicals over a real cubic root. Near the drive resonance the radical
//! argument of the Rabi-split pair cancels ~5 decades below f64 ulp scale,
//! so that assembly runs in double-double arithmetic.

use crate::model::{self, Basis, ModelParams, Operator, StateVector};
use crate::numeric::cubic;
use crate::numeric::dd::{self, Dd};
use crate::{C64, KaneError, Real};
use ndarray::{Array1, Array2};

/// Electron–nuclear mixing angle θ ∈ [0, π/2) with tan 2θ = 2A/ε.
pub fn mixing_angle(a: Real, eps: Real) -> Real {
    assert!(eps > 0.0 && a >= 0.0);
    0.5 * (2.0 * a).atan2(eps)
}

/// ν_θ = μ_B sin θ + gₙμₙ cos θ (meV/tesla).
pub fn nu_theta(p: &ModelParams, theta: Real) -> Real {
    p.mu_b * theta.sin() + p.gn_mun * theta.cos()
}

/// μ_θ = μ_B cos θ − gₙμₙ sin θ (meV/tesla).
pub fn mu_theta(p: &ModelParams, theta: Real) -> Real {
    p.mu_b * theta.cos() - p.gn_mun * theta.sin()
}

/// Single-site closed-form eigensystem.
///
/// Energies ascend for 0 < A ≤ A₀ at the default parameters; the vectors use
/// the sign convention `|u₀⟩ = −sinθ|↑1⟩ + cosθ|↓0⟩`, `|u₂⟩ = cosθ|↑1⟩ +
/// sinθ|↓0⟩`, `|u₁⟩ = |↓1⟩`, `|u₃⟩ = |↑0⟩` (oracle comparisons are made up
/// to a phase).
#[derive(Debug, Clone)]
pub struct SingleSiteEigensystem {
    pub a: Real,
    pub theta: Real,
    pub energies: [Real; 4],
    pub vectors: [StateVector; 4],
}

impl SingleSiteEigensystem {
    /// Energy difference E_k − E₀.
    pub fn gap(&self, k: usize) -> Real {
        self.energies[k] - self.energies[0]
    }
}

/// Closed-form single-site eigensystem at hyperfine amplitude `a`.
pub fn single_site_eigs(p: &ModelParams, a: Real) -> SingleSiteEigensystem {
    assert!(a >= 0.0);
    let eps = p.eps();
    let root = (eps * eps + 4.0 * a * a).sqrt();
    let energies = [
        -a - root,
        -p.mu_b_b() + p.gn_mun_b() + a,
        -a + root,
        p.mu_b_b() - p.gn_mun_b() + a,
    ];
    let theta = mixing_angle(a, eps);
    let (s, c) = (theta.sin(), theta.cos());
    // site basis order: |↑0⟩, |↑1⟩, |↓0⟩, |↓1⟩
    let mk = |amps: [Real; 4]| {
        StateVector::new(
            Array1::from_iter(amps.iter().map(|&x| C64::new(x, 0.0))),
            Basis::SingleSite,
        )
    };
    let vectors = [
        mk([0.0, -s, c, 0.0]),
        mk([0.0, 0.0, 0.0, 1.0]),
        mk([0.0, c, s, 0.0]),
        mk([1.0, 0.0, 0.0, 0.0]),
    ];
    SingleSiteEigensystem {
        a,
        theta,
        energies,
        vectors,
    }
}

/// 4×4 basis-change matrix whose columns are |u₀⟩..|u₃⟩ in the product basis.
pub fn u_basis_matrix(p: &ModelParams, a: Real) -> Operator {
    let sys = single_site_eigs(p, a);
    let mut m = Array2::zeros((4, 4));
    for (k, v) in sys.vectors.iter().enumerate() {
        for r in 0..4 {
            m[(r, k)] = v.amplitudes[r];
        }
    }
    m
}

/// Symmetry-block label: total spin-z `s` and parity `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockLabel {
    pub s: i32,
    pub p: i32,
}

/// One symmetry block of H_C with its orthonormal basis in the 16-dim space.
#[derive(Debug, Clone)]
pub struct SymmetryBlock {
    pub label: BlockLabel,
    /// Product-basis indices with support in this block.
    pub indices: Vec<usize>,
    /// 16 × dim orthonormal basis (columns span the block).
    pub basis: Array2<Real>,
    /// dim × dim real-symmetric block Hamiltonian.
    pub matrix: Array2<Real>,
}

fn site_sz(i: usize) -> i32 {
    // site basis |↑0⟩,|↑1⟩,|↓0⟩,|↓1⟩ has S_z = +1, 0, 0, −1
    match i {
        0 => 1,
        1 | 2 => 0,
        _ => -1,
    }
}

/// Block decomposition of H_C(A, A, J) by (S_z^tot, parity).
///
/// Requires equal hyperfine amplitudes on the two sites (parity symmetry).
pub fn symmetry_blocks(p: &ModelParams, a: Real, j: Real) -> Vec<SymmetryBlock> {
    let h = model::two_qubit_static_hamiltonian(p, a, a, j);
    let mut blocks = Vec::new();
    for s in (-2..=2).rev() {
        for parity in [1, -1] {
            let mut vecs: Vec<[Real; 16]> = Vec::new();
            let mut indices = Vec::new();
            for i in 0..4 {
                for jj in i..4 {
                    if site_sz(i) + site_sz(jj) != s {
                        continue;
                    }
                    let mut v = [0.0; 16];
                    if i == jj {
                        if parity == 1 {
                            v[4 * i + jj] = 1.0;
                        } else {
                            continue;
                        }
                    } else {
                        let w = 0.5_f64.sqrt();
                        v[4 * i + jj] = w;
                        v[4 * jj + i] = if parity == 1 { w } else { -w };
                    }
                    indices.push(4 * i + jj);
                    if i != jj {
                        indices.push(4 * jj + i);
                    }
                    vecs.push(v);
                }
            }
            if vecs.is_empty() {
                continue;
            }
            indices.sort_unstable();
            indices.dedup();
            let dim = vecs.len();
            let mut basis = Array2::zeros((16, dim));
            for (cix, v) in vecs.iter().enumerate() {
                for r in 0..16 {
                    basis[(r, cix)] = v[r];
                }
            }
            let mut matrix = Array2::zeros((dim, dim));
            for ci in 0..dim {
                for cj in 0..dim {
                    let mut acc = 0.0;
                    for r in 0..16 {
                        if basis[(r, ci)] == 0.0 {
                            continue;
                        }
                        for c in 0..16 {
                            acc += basis[(r, ci)] * h[(r, c)].re * basis[(c, cj)];
                        }
                    }
                    matrix[(ci, cj)] = acc;
                }
            }
            blocks.push(SymmetryBlock {
                label: BlockLabel { s, p: parity },
                indices,
                basis,
                matrix,
            });
        }
    }
    blocks
}

/// A real root of `z³ − c₁z² − 4c₃z + 4c₃c₁ − c₂² = 0` together with the
/// residual of the cubic at the returned root.
///
/// Among the real roots, the one maximizing `z − c₁` is returned; that is the
/// branch the nested-radical eigenvalue formulas require.
pub fn real_cubic_root(c1: Real, c2: Real, c3: Real) -> (Real, Real) {
    let b = -c1;
    let c = -4.0 * c3;
    let d = 4.0 * c3 * c1 - c2 * c2;
    let roots = cubic::real_roots(b, c, d);
    let z = roots
        .into_iter()
        .max_by(|x, y| (x - c1).partial_cmp(&(y - c1)).unwrap())
        .expect("a real cubic always has a real root");
    (z, cubic::eval(z, b, c, d).abs())
}

/// The six computational-basis-relevant block energies at (A, J).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComputationalEnergies {
    pub e1_01: Real,
    pub e2_01: Real,
    pub e1_m1_m1: Real,
    pub e2_m1_m1: Real,
    pub e1_m1_p1: Real,
    pub e1_m2_p1: Real,
    /// J within 2% of the ε/2 level-crossing region.
    pub crossing_flagged: bool,
}

impl ComputationalEnergies {
    pub fn as_array(&self) -> [Real; 6] {
        [
            self.e1_01,
            self.e2_01,
            self.e1_m1_m1,
            self.e2_m1_m1,
            self.e1_m1_p1,
            self.e1_m2_p1,
        ]
    }
}

/// Closed-form block energies of H_C(A, A, J) relevant to the computational
/// basis. The (0, +1) pair comes from the resolvent-cubic radicals; the rest
/// are elementary.
pub fn computational_block_energies(p: &ModelParams, a: Real, j: Real) -> ComputationalEnergies {
    let eps = p.eps();
    let g = p.gn_mun_b();
    let root0 = (eps * eps + 4.0 * a * a).sqrt();
    let root_j = ((eps - 2.0 * j) * (eps - 2.0 * j) + 4.0 * a * a).sqrt();

    // (0, +1) block: quartic in (E + A) with Ferrari-resolvent coefficients
    let c1 = -6.0 * j * j + 4.0 * j * a - 22.0 * a * a - 4.0 * eps * eps;
    let c2 = 8.0 * j * j * j - 8.0 * a * j * j + 8.0 * (a * a - eps * eps) * j
        + 8.0 * eps * eps * a
        + 24.0 * a * a * a;
    let c3 = -3.0 * j.powi(4) + 4.0 * a * j.powi(3) + (14.0 * a * a + 12.0 * eps * eps) * j * j
        + (-60.0 * a * a * a + 8.0 * eps * eps * a) * j
        + 12.0 * eps * eps * a * a
        + 45.0 * a.powi(4);
    let (xi, _res) = real_cubic_root(c1, c2, c3);
    let y = (xi - c1).max(0.0);
    let sy = y.sqrt();
    let arg = (-xi - c1 + 2.0 * c2 / sy).max(0.0);
    let sarg = arg.sqrt();
    let mut e1_01 = -a - 0.5 * sy - 0.5 * sarg;
    let mut e2_01 = -a - 0.5 * sy + 0.5 * sarg;
    // one Newton polish per root on the quartic in (E + A)
    let polish = |e: &mut Real| {
        let mut z = *e + a;
        for _ in 0..2 {
            let f = ((z * z + c1) * z + c2) * z + c3;
            let fp = (4.0 * z * z + 2.0 * c1) * z + c2;
            if fp != 0.0 {
                z -= f / fp;
            }
        }
        *e = z - a;
    };
    polish(&mut e1_01);
    polish(&mut e2_01);

    let e1_m1_m1 = -j - eps + 2.0 * g - root_j;
    let e2_m1_m1 = -j - eps + 2.0 * g + root_j;
    let e1_m1_p1 = j - eps + 2.0 * g - root0;
    let e1_m2_p1 = j - 2.0 * eps + 4.0 * g + 2.0 * a;

    let half_eps = 0.5 * eps;
    ComputationalEnergies {
        e1_01,
        e2_01,
        e1_m1_m1,
        e2_m1_m1,
        e1_m1_p1,
        e1_m2_p1,
        crossing_flagged: (j - half_eps).abs() < 0.02 * half_eps,
    }
}

/// Spec record around [`computational_block_energies`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEigenvalues {
    pub a: Real,
    pub j: Real,
    pub energies: ComputationalEnergies,
}

pub fn block_eigenvalues(p: &ModelParams, a: Real, j: Real) -> BlockEigenvalues {
    assert!(a >= 0.0 && j >= 0.0);
    BlockEigenvalues {
        a,
        j,
        energies: computational_block_energies(p, a, j),
    }
}

/// One row of the level scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRow {
    pub j: Real,
    pub energies: [Real; 6],
    pub crossing: bool,
}

/// Level-configuration scan over an exchange grid, rows ordered by J.
pub fn energy_level_scan(p: &ModelParams, a: Real, j_grid: &[Real]) -> Vec<LevelRow> {
    assert!(!j_grid.is_empty(), "grid must be nonempty");
    let mut grid: Vec<Real> = j_grid.to_vec();
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    grid.iter()
        .map(|&j| {
            let e = computational_block_energies(p, a, j);
            LevelRow {
                j,
                energies: e.as_array(),
                crossing: e.crossing_flagged,
            }
        })
        .collect()
}

/// Block-diagonal part H_d of the rotating-frame Hamiltonian, in the
/// |u_k(A)⟩ basis (4×4).
pub fn rot_frame_block_diagonal(p: &ModelParams, a: Real, omega_ac: Real) -> Operator {
    let sys = single_site_eigs(p, a);
    let hw = p.hbar * omega_ac;
    let nu = nu_theta(p, sys.theta) * p.b_ac;
    let nu_m = nu_theta(p, -sys.theta) * p.b_ac;
    let mut h = Array2::zeros((4, 4));
    h[(0, 0)] = C64::new(sys.energies[0], 0.0);
    h[(1, 1)] = C64::new(sys.energies[1] - hw, 0.0);
    h[(2, 2)] = C64::new(sys.energies[2], 0.0);
    h[(3, 3)] = C64::new(sys.energies[3] + hw, 0.0);
    h[(0, 1)] = C64::new(-nu, 0.0);
    h[(1, 0)] = C64::new(-nu, 0.0);
    h[(2, 3)] = C64::new(-nu_m, 0.0);
    h[(3, 2)] = C64::new(-nu_m, 0.0);
    h
}

/// Off-diagonal mixing part H_mix of the rotating-frame Hamiltonian, in the
/// |u_k(A)⟩ basis (4×4).
pub fn rot_frame_mixing(p: &ModelParams, a: Real) -> Operator {
    let theta = mixing_angle(a, p.eps());
    let mu = mu_theta(p, theta) * p.b_ac;
    let mu_m = mu_theta(p, -theta) * p.b_ac;
    let mut h = Array2::zeros((4, 4));
    h[(0, 3)] = C64::new(mu_m, 0.0);
    h[(3, 0)] = C64::new(mu_m, 0.0);
    h[(1, 2)] = C64::new(mu, 0.0);
    h[(2, 1)] = C64::new(mu, 0.0);
    h
}

/// Full rotating-frame Hamiltonian H_rot = H_d + H_mix in the u-basis.
pub fn rot_frame_hamiltonian(p: &ModelParams, a: Real, omega_ac: Real) -> Operator {
    rot_frame_block_diagonal(p, a, omega_ac) + rot_frame_mixing(p, a)
}

/// Rotating-frame eigensystem: eigenvalues ħΩ₀..ħΩ₃ (meV, ascending by the
/// radical assignment: the resonant pair first) and eigenvectors expressed in
/// the |u_k(A)⟩ basis.
#[derive(Debug, Clone)]
pub struct RotFrameEigensystem {
    pub a: Real,
    pub omega_ac: Real,
    pub b_ac: Real,
    pub omegas: [Real; 4],
    /// `vectors[k]` is the eigenvector of `omegas[k]` in the u-basis.
    pub vectors: [[Real; 4]; 4],
}

/// Rotating-frame eigensystem via the resolvent-cubic radicals.
///
/// The radical argument of the resonant pair is a ~1e-13 meV² difference of
/// ~1e-2 meV² quantities, so the coefficient and cubic arithmetic run in
/// double-double. Eigenvectors are adjugate columns of (H_rot − ħΩ), with the
/// resonant pair re-orthonormalized.
pub fn rot_frame_eigs(
    p: &ModelParams,
    a: Real,
    omega_ac: Real,
) -> Result<RotFrameEigensystem, KaneError> {
    assert!(a > 0.0, "mixing angle undefined at A = 0");
    let sys = single_site_eigs(p, a);
    let theta = sys.theta;
    let b = p.b_ac;
    let hw = p.hbar * omega_ac;
    let [e0, e1, e2, e3] = sys.energies;
    let e1t = e1 - hw;
    let e3t = e3 + hw;

    let nu = nu_theta(p, theta);
    let mu = mu_theta(p, theta);
    let nu_m = nu_theta(p, -theta);
    let mu_m = mu_theta(p, -theta);

    if b == 0.0 {
        // exactly diagonal: trivial eigensystem, ordering fixed as
        // (resonant-pair-first) = (0, 1, 2, 3) with the diagonal entries
        let omegas = [e0, e1t, e2, e3t];
        let mut vectors = [[0.0; 4]; 4];
        for (k, v) in vectors.iter_mut().enumerate() {
            v[k] = 1.0;
        }
        return Ok(RotFrameEigensystem {
            a,
            omega_ac,
            b_ac: b,
            omegas,
            vectors,
        });
    }
    for (name, den) in [
        ("nu_theta*Bac", nu * b),
        ("mu_theta*Bac", mu * b),
        ("mu_minus_theta*Bac", mu_m * b),
    ] {
        if den.abs() < 1e-250 {
            return Err(KaneError::IllConditioned { denominator: name });
        }
    }

    // quartic coefficients lambda^4 + d1 lambda^2 + d2 lambda + d3, assembled
    // in double-double with the cancellation-free groupings
    let eps = p.eps();
    let e0e2 = dd::prod(eps, eps).add(dd::prod(a, 3.0 * a)).neg(); // E0 E2 = -(eps^2 + 3A^2)
    let e1e3 = dd::prod(e1t, e3t);
    let b2 = dd::prod(b, b);
    let coupling_sq = dd::prod(p.mu_b, p.mu_b).add(dd::prod(p.gn_mun, p.gn_mun));
    let d1 = e0e2
        .sub(dd::prod(2.0 * a, 2.0 * a))
        .add(e1e3)
        .sub(coupling_sq.mul(b2).mul_f64(2.0));
    let d2 = e0e2
        .sub(e1e3)
        .mul_f64(-2.0 * a)
        .add(dd::prod(p.gn_mun, p.mu_b).mul(b2).mul_f64(8.0 * a));
    let mumu = dd::prod(p.mu_b, p.mu_b).sub(dd::prod(p.gn_mun, p.gn_mun));
    let d3 = e0e2
        .mul(e1e3)
        .add(mumu.mul(mumu).mul(b2).mul(b2))
        .sub(
            dd::prod(e0, nu_m * nu_m)
                .add(dd::prod(e2, mu_m * mu_m))
                .mul(b2)
                .mul_f64(e1t),
        )
        .sub(
            dd::prod(e0, mu * mu)
                .add(dd::prod(e2, nu * nu))
                .mul(b2)
                .mul_f64(e3t),
        );

    // resolvent cubic z^3 - d1 z^2 - 4 d3 z + (4 d1 d3 - d2^2) in double-double
    let cb = d1.neg();
    let cc = d3.mul_f64(-4.0);
    let cd = d1.mul(d3).mul_f64(4.0).sub(d2.mul(d2));
    let seeds = cubic::real_roots(cb.value(), cc.value(), cd.value());

    let mut best: Option<([Real; 4], Real)> = None;
    let mut best_res = Real::INFINITY;
    for &seed in &seeds {
        // polish the root in double-double
        let mut eta = Dd::from(seed);
        for _ in 0..4 {
            let f = eta.add(cb).mul(eta).add(cc).mul(eta).add(cd);
            let fp = {
                let z = eta.value();
                (3.0 * z + 2.0 * cb.value()) * z + cc.value()
            };
            if fp != 0.0 {
                eta = eta.sub(Dd::from(f.value() / fp));
            }
        }
        let y = eta.sub(d1);
        if y.value() <= 0.0 {
            continue;
        }
        let sy = y.sqrt();
        let base = eta.neg().sub(d1);
        let two_q_over = d2.mul_f64(2.0).div(sy);
        let arg_lower = base.add(two_q_over).value().max(0.0);
        let arg_upper = base.sub(two_q_over).value().max(0.0);
        let syv = sy.value();
        let cand = [
            -0.5 * syv - 0.5 * arg_lower.sqrt(),
            -0.5 * syv + 0.5 * arg_lower.sqrt(),
            0.5 * syv - 0.5 * arg_upper.sqrt(),
            0.5 * syv + 0.5 * arg_upper.sqrt(),
        ];
        // validate by the quartic residual, scaled to the coefficient size
        let scale = d3.value().abs().max(d1.value().abs()).max(1e-300);
        let res = cand
            .iter()
            .map(|&z| {
                (Dd::from(z * z)
                    .add(d1)
                    .mul_f64(z * z)
                    .add(d2.mul_f64(z))
                    .add(d3))
                .value()
                .abs()
            })
            .fold(0.0, Real::max)
            / scale;
        if res < best_res {
            best_res = res;
            best = Some((cand, res));
        }
    }
    let (omegas, _res) = best.ok_or(KaneError::NoValidRoot {
        residual: best_res,
    })?;
    if best_res > 1e-9 {
        return Err(KaneError::NoValidRoot { residual: best_res });
    }

    // eigenvectors: adjugate columns of (H - Omega), re-orthonormalizing the
    // resonant pair
    let h = rot_frame_hamiltonian(p, a, omega_ac);
    let mut vectors = [[0.0; 4]; 4];
    for (k, &om) in omegas.iter().enumerate() {
        vectors[k] = adjugate_nullvector(&h, om);
    }
    orthonormalize_pair(&mut vectors, 0, 1);
    orthonormalize_pair(&mut vectors, 2, 3);

    Ok(RotFrameEigensystem {
        a,
        omega_ac,
        b_ac: b,
        omegas,
        vectors,
    })
}

/// Null-vector of the real-symmetric 4×4 `h - om·I` via its adjugate column
/// of largest norm, normalized.
fn adjugate_nullvector(h: &Operator, om: Real) -> [Real; 4] {
    let mut m = [[0.0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = h[(r, c)].re;
        }
        m[r][r] -= om;
    }
    let det3 = |r: [usize; 3], c: [usize; 3]| -> Real {
        m[r[0]][c[0]] * (m[r[1]][c[1]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[1]])
            - m[r[0]][c[1]] * (m[r[1]][c[0]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[0]])
            + m[r[0]][c[2]] * (m[r[1]][c[0]] * m[r[2]][c[1]] - m[r[1]][c[1]] * m[r[2]][c[0]])
    };
    let others = |k: usize| -> [usize; 3] {
        let mut o = [0; 3];
        let mut n = 0;
        for i in 0..4 {
            if i != k {
                o[n] = i;
                n += 1;
            }
        }
        o
    };
    let mut best = [0.0; 4];
    let mut best_norm = -1.0;
    for col in 0..4 {
        let mut v = [0.0; 4];
        for row in 0..4 {
            let sign = if (row + col) % 2 == 0 { 1.0 } else { -1.0 };
            // adj[row][col] = sign * minor with row `col` and column `row` removed
            v[row] = sign * det3(others(col), others(row));
        }
        let n: Real = v.iter().map(|x| x * x).sum::<Real>().sqrt();
        if n > best_norm {
            best_norm = n;
            best = v;
        }
    }
    let n: Real = best.iter().map(|x| x * x).sum::<Real>().sqrt();
    if n > 0.0 {
        for x in best.iter_mut() {
            *x /= n;
        }
    }
    // first non-negligible component positive
    if let Some(&lead) = best.iter().find(|x| x.abs() > 1e-8) {
        if lead < 0.0 {
            for x in best.iter_mut() {
                *x = -*x;
            }
        }
    }
    best
}

fn orthonormalize_pair(vectors: &mut [[Real; 4]; 4], i: usize, j: usize) {
    let dot: Real = (0..4).map(|k| vectors[i][k] * vectors[j][k]).sum();
    for k in 0..4 {
        vectors[j][k] -= dot * vectors[i][k];
    }
    let n: Real = vectors[j].iter().map(|x| x * x).sum::<Real>().sqrt();
    if n > 0.0 {
        for x in vectors[j].iter_mut() {
            *x /= n;
        }
    }
}

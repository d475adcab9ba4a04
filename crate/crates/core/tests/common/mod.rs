//! Reference implementations used as independent oracles. None of these
//! call into the library's numerics.
#![allow(dead_code)]

use std::f64::consts::PI;

use isogeom::linalg::CMat;
use num_complex::Complex64;

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations on the real
/// symmetric embedding `[[A, −B], [B, A]]`, whose spectrum is that of
/// `A + iB` with every value doubled. Returned in non-increasing order.
pub fn jacobi_eigvalsh(h: &CMat) -> Vec<f64> {
    let n = h.nrows();
    let m = 2 * n;
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i + n][j] = z.im;
            a[i][j + n] = -z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
    d.sort_by(|x, y| y.total_cmp(x));
    d.into_iter().step_by(2).collect()
}

/// `exp(A)` by scaling and squaring with a 30-term Taylor series.
pub fn expm_taylor(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = a.norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a.unscale(2f64.powi(squarings));
    let mut term = CMat::identity(n, n);
    let mut sum = CMat::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(−iHτ)` via the Taylor oracle.
pub fn unitary_taylor(h: &CMat, tau: f64) -> CMat {
    expm_taylor(&(h * Complex64::new(0.0, -tau)))
}

/// Berry phase of `cos(θ/2)|0⟩ + sin(θ/2)e^{iφ}|1⟩` around one full turn in
/// `φ`, evaluated as the discrete Pancharatnam product
/// `−arg Π⟨ψ(φ_k)|ψ(φ_{k+1})⟩` on `points` samples. This is the
/// discretized line integral of the Berry connection `i⟨ψ|∂_φψ⟩`, traversed
/// in the direction of precession under `σ_z` with positive frequency.
pub fn berry_phase_precession(theta: f64, points: usize) -> f64 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    // Under +σ_z the relative phase φ grows as ωt.
    let state = |k: usize| {
        let phi = 2.0 * PI * k as f64 / points as f64;
        [Complex64::new(c, 0.0), Complex64::from_polar(s, phi)]
    };
    let mut product = Complex64::new(1.0, 0.0);
    for k in 0..points {
        let a = state(k);
        let b = state(k + 1);
        product *= a[0].conj() * b[0] + a[1].conj() * b[1];
    }
    let g = -product.arg();
    // Map into (−π, π].
    let g = g.rem_euclid(2.0 * PI);
    if g > PI {
        g - 2.0 * PI
    } else {
        g
    }
}

/// Interferometric phase of `ρ0 = diag(p, 1 − p)` under
/// `H = (ħω/2)(sin θ σ_x + cos θ σ_z)` up to time `τ`:
/// `arg Σ_k p_k ⟨k|U(τ)|k⟩ e^{i⟨k|H|k⟩τ/ħ}` with `U(τ)` in closed form.
pub fn interferometric_phase(p: f64, theta: f64, omega: f64, tau: f64, hbar: f64) -> f64 {
    let half = omega * tau / 2.0;
    let (c, s) = (half.cos(), half.sin());
    // U = cos(ωτ/2) − i sin(ωτ/2) n·σ, n = (sin θ, 0, cos θ).
    let u00 = Complex64::new(c, -s * theta.cos());
    let u11 = Complex64::new(c, s * theta.cos());
    let e0 = hbar * omega / 2.0 * theta.cos();
    let e1 = -e0;
    let z = u00 * Complex64::from_polar(p, e0 * tau / hbar)
        + u11 * Complex64::from_polar(1.0 - p, e1 * tau / hbar);
    z.arg()
}

/// Smallest dispersion length of a constant Hamiltonian `a(n·σ)` on
/// `[0, T]` that steers `|0⟩⟨0|` to within `tol` of `|1⟩⟨1|` (Frobenius),
/// found by scanning the Bloch polar angle of `n` and the strength `a`.
/// The azimuth of `n` is irrelevant by rotational symmetry about `z`.
pub fn constant_h_scan(t: f64, hbar: f64, tol: f64) -> f64 {
    let mut best = f64::INFINITY;
    let betas = 400;
    let strengths = 40_000;
    let a_max = 2.0 * PI * hbar / t;
    for ib in 0..=betas {
        let beta = PI / 2.0 * ib as f64 / betas as f64;
        let nz = beta.cos();
        for ia in 1..=strengths {
            let a = a_max * ia as f64 / strengths as f64;
            // z-component of the Bloch vector of |0⟩ after a rotation by
            // 2aT/ħ about n (Rodrigues).
            let angle = 2.0 * a * t / hbar;
            let rz = angle.cos() + nz * nz * (1.0 - angle.cos());
            // ‖ρ − |1⟩⟨1|‖_F² = 1 + r_z for pure qubit states.
            if (1.0 + rz).max(0.0).sqrt() <= tol {
                // ΔE = a·√(1 − (n·z)²), constant in time.
                best = best.min(a * (1.0 - nz * nz).sqrt() * t / hbar);
            }
        }
    }
    best
}

/// Bures distance between commuting states given by their diagonals:
/// `√(2 − 2Σ√(p_i q_i))`.
pub fn bures_diagonal(p: &[f64], q: &[f64]) -> f64 {
    let f: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    (2.0 - 2.0 * f).max(0.0).sqrt()
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Real basis of the block-diagonal anti-Hermitian matrices with the given
/// block sizes.
pub fn gauge_algebra_basis(blocks: &[usize]) -> Vec<CMat> {
    let k: usize = blocks.iter().sum();
    let mut out = Vec::new();
    let mut start = 0;
    for &m in blocks {
        for a in start..start + m {
            let mut d = CMat::zeros(k, k);
            d[(a, a)] = Complex64::new(0.0, 1.0);
            out.push(d);
            for b in (a + 1)..start + m {
                let mut r = CMat::zeros(k, k);
                r[(a, b)] = Complex64::new(1.0, 0.0);
                r[(b, a)] = Complex64::new(-1.0, 0.0);
                out.push(r);
                let mut i = CMat::zeros(k, k);
                i[(a, b)] = Complex64::new(0.0, 1.0);
                i[(b, a)] = Complex64::new(0.0, 1.0);
                out.push(i);
            }
        }
        start += m;
    }
    out
}

/// `Re Σ conj(x_ij) y_ij` by explicit summation.
pub fn re_hs(x: &CMat, y: &CMat) -> f64 {
    let mut s = 0.0;
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            s += (x[(i, j)].conj() * y[(i, j)]).re;
        }
    }
    s
}

/// `argmin_ξ ‖X − Ψξ‖_F` over the gauge algebra, by the normal equations.
pub fn least_squares_vertical_fit(psi: &CMat, x: &CMat, blocks: &[usize]) -> CMat {
    let basis = gauge_algebra_basis(blocks);
    let images: Vec<CMat> = basis.iter().map(|b| psi * b).collect();
    let gram = images
        .iter()
        .map(|u| images.iter().map(|v| re_hs(u, v)).collect())
        .collect();
    let rhs = images.iter().map(|u| re_hs(u, x)).collect();
    let coeffs = solve_dense(gram, rhs);
    let k = psi.ncols();
    let mut xi = CMat::zeros(k, k);
    for (b, c) in basis.iter().zip(coeffs) {
        xi += b * Complex64::new(c, 0.0);
    }
    xi
}

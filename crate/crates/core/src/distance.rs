//! Energy-dispersion length, the dynamic distance between isospectral
//! states, and the Bures distance.
//!
//! The dispersion length of a Hamiltonian path is
//!
//! ```text
//! D(H) = (1/ħ) ∫ √(Tr(H²ρ) − Tr(Hρ)²) dt
//! ```
//!
//! along the solution of `iħρ̇ = [H, ρ]`. Dividing by `ħ` makes `D`
//! invariant under rescaling `ħ`, and with `ħ = 1` it is the plain time
//! integral of the energy uncertainty. For the metric `G` with parameter
//! `ħ`, the `g`-length of the state curve is at most `√(2ħ)·D(H)`, with
//! equality when `H` carries no energy offset between the eigen-branches
//! of `ρ` (see [`horizontal_generator`]).
//!
//! The dynamic distance is the infimum of `D` over Hamiltonians steering
//! `ρ0` to `ρ1`. [`dynamic_distance`] returns an upper bound found by a
//! penalized search over piecewise-constant paths.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{propagate_von_neumann, HamiltonianPath, LiftedTrajectory, TimeGrid};
use crate::error::{Error, Result};
use crate::geometry::GeometryContext;
use crate::linalg::{self, CMat};
use crate::operator::{spectrum_of, DensityOperator, TangentVector, Tolerances};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::random;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionReport {
    /// `D(H)`, dimensionless (action over `ħ`).
    pub value: f64,
    /// `√(Tr(H²ρ) − Tr(Hρ)²)` at each interval midpoint, in energy units.
    pub integrand: Vec<f64>,
    pub grid: TimeGrid,
}

/// `√(Tr(H²ρ) − Tr(Hρ)²)`, evaluated as `√Tr(H̃²ρ)` with the centred
/// `H̃ = H − Tr(Hρ)` so that large energy offsets do not cancel.
pub fn energy_dispersion(h: &CMat, rho: &CMat) -> f64 {
    let mean = linalg::trace(&(h * rho)).re / linalg::trace(rho).re;
    let mut centred = h.clone();
    for j in 0..centred.nrows() {
        centred[(j, j)] -= mean;
    }
    let h_rho = &centred * rho;
    linalg::real_inner(&centred.adjoint(), &h_rho).max(0.0).sqrt()
}

/// Midpoint-rule dispersion length over `steps` equal intervals of
/// `[t0, t1]`.
pub fn dispersion_length(
    h: &HamiltonianPath,
    rho0: &DensityOperator,
    t0: f64,
    t1: f64,
    steps: usize,
    hbar: f64,
) -> Result<DispersionReport> {
    let grid = TimeGrid::uniform(t0, t1, steps)?;
    let states = propagate_von_neumann(h, rho0, &grid, hbar)?;
    let hams = h.on_grid(&grid)?;
    let mut value = 0.0;
    let mut integrand = Vec::with_capacity(grid.intervals());
    for (i, hi) in hams.iter().enumerate() {
        let half = linalg::unitary_from_hermitian(hi, 0.5 * grid.step(i) / hbar);
        let mid = &half * states[i].matrix() * half.adjoint();
        let e = energy_dispersion(hi, &mid);
        value += e * grid.step(i);
        integrand.push(e);
    }
    Ok(DispersionReport {
        value: value / hbar,
        integrand,
        grid,
    })
}

/// Uhlmann fidelity `Tr√(√ρ0 ρ1 √ρ0)`, clamped to `[0, 1]`.
pub fn fidelity(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::ShapeMismatch {
            expected: (rho0.dim(), rho0.dim()),
            found: (rho1.dim(), rho1.dim()),
        });
    }
    let s = linalg::psd_sqrt(rho0.matrix());
    let m = &s * rho1.matrix() * &s;
    let f: f64 = linalg::eigvalsh_descending(&m)
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `√(2 − 2F)` with `F` the Uhlmann fidelity.
pub fn bures_distance(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    let f = fidelity(rho0, rho1)?;
    Ok((2.0 - 2.0 * f).max(0.0).sqrt())
}

/// Removes from `H` its block-diagonal part in the eigenbasis of `ρ`,
/// `H − Σ_j Q_j H Q_j` with `Q_j` the spectral projectors of the positive
/// eigenvalues.
///
/// The result drives the same instantaneous velocity `[H, ρ]` with the least
/// energy dispersion, and its mean energy vanishes on every eigen-branch.
/// A path built from such generators (re-derived at the start of each
/// constant piece) has `g`-length exactly `√(2ħ)` times its dispersion
/// length.
pub fn horizontal_generator(h: &CMat, rho: &DensityOperator, tol: &Tolerances) -> Result<CMat> {
    linalg::check_shape(h, (rho.dim(), rho.dim()))?;
    let spectrum = spectrum_of(rho, tol);
    let (_, vectors) = linalg::eigh_descending(rho.matrix());
    let mut out = linalg::hermitian_part(h);
    for r in spectrum.block_ranges() {
        let v = vectors.columns(r.start, r.len()).into_owned();
        let q = &v * v.adjoint();
        out -= &q * h * &q;
    }
    Ok(linalg::hermitian_part(&out))
}

/// `g`-length of the base curve, computed upstairs: `Σ_i √G(h_i, h_i)·Δt_i`
/// with `h_i` the horizontal part of the lift velocity at the midpoint of
/// interval `i`.
pub fn curve_length_in_base(traj: &LiftedTrajectory, ctx: &GeometryContext) -> Result<f64> {
    let mut length = 0.0;
    for i in 0..traj.grid().intervals() {
        let (psi_mid, velocity) = traj.midpoint_velocity(i);
        let x = TangentVector::from_matrix_unchecked(velocity);
        let h = ctx.horizontal_projection(&psi_mid, &x)?;
        length += ctx.metric(&h, &h)?.max(0.0).sqrt() * traj.grid().step(i);
    }
    Ok(length)
}

/// Settings for [`dynamic_distance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistanceConfig {
    /// Number of constant pieces `M`.
    pub segments: usize,
    pub t0: f64,
    pub t1: f64,
    /// Required `‖ρ(t1) − ρ1‖_F` for a path to count as feasible.
    pub endpoint_tol: f64,
    /// Initial penalty weight `μ`.
    pub penalty_start: f64,
    pub penalty_growth: f64,
    pub max_rounds: usize,
    pub restarts: usize,
    /// Nelder–Mead evaluation budget per restart and penalty round.
    pub evaluations_per_round: usize,
    /// Bound on `‖H‖_F` for every piece; larger pieces are scaled down.
    pub hamiltonian_bound: f64,
    pub seed: u64,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        DistanceConfig {
            segments: 8,
            t0: 0.0,
            t1: 1.0,
            endpoint_tol: 1e-6,
            penalty_start: 1e2,
            penalty_growth: 10.0,
            max_rounds: 6,
            restarts: 4,
            evaluations_per_round: 1500,
            hamiltonian_bound: 50.0,
            seed: 0,
        }
    }
}

impl DistanceConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.segments == 0 {
            return bad("segments must be positive");
        }
        if !(self.t1 > self.t0) {
            return bad("t1 must exceed t0");
        }
        if !(self.endpoint_tol > 0.0) {
            return bad("endpoint_tol must be positive");
        }
        if !(self.penalty_start > 0.0 && self.penalty_growth >= 1.0) {
            return bad("penalty schedule must start positive and not decrease");
        }
        if self.max_rounds == 0 || self.restarts == 0 {
            return bad("max_rounds and restarts must be positive");
        }
        if !(self.hamiltonian_bound > 0.0) {
            return bad("hamiltonian_bound must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub iterations: usize,
    pub evaluations: usize,
    /// Best penalized objective after each simplex iteration of the winning
    /// restart, concatenated over penalty rounds.
    pub best_objective: Vec<f64>,
    pub winning_restart: usize,
}

#[derive(Clone, Debug)]
pub struct DistanceResult {
    /// Unpenalized dispersion length of the returned path.
    pub distance: f64,
    pub endpoint_residual: f64,
    pub hamiltonian: HamiltonianPath,
    pub trace: OptimizerTrace,
    /// No path met `endpoint_tol`; the returned path is the best penalized
    /// one.
    pub stalled: bool,
    /// Some piece of the returned path sits on the `‖H‖_F` bound.
    pub bound_active: bool,
}

/// Orthonormal basis of traceless Hermitian `n×n` matrices under
/// `Tr(AB)` (generalized Gell-Mann matrices scaled by `1/√2`).
pub fn traceless_hermitian_basis(n: usize) -> Vec<CMat> {
    let mut basis = Vec::with_capacity(n * n - 1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n {
        for k in (j + 1)..n {
            let mut sym = CMat::zeros(n, n);
            sym[(j, k)] = linalg::real(s);
            sym[(k, j)] = linalg::real(s);
            basis.push(sym);
            let mut anti = CMat::zeros(n, n);
            anti[(j, k)] = linalg::c(0.0, -s);
            anti[(k, j)] = linalg::c(0.0, s);
            basis.push(anti);
        }
    }
    for l in 1..n {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut d = CMat::zeros(n, n);
        for j in 0..l {
            d[(j, j)] = linalg::real(1.0 / norm);
        }
        d[(l, l)] = linalg::real(-(l as f64) / norm);
        basis.push(d);
    }
    basis
}

struct Problem<'a> {
    rho0: &'a CMat,
    rho1: &'a CMat,
    basis: Vec<CMat>,
    segments: usize,
    dt: f64,
    hbar: f64,
    bound: f64,
}

struct Evaluation {
    dispersion: f64,
    residual: f64,
    bound_active: bool,
}

impl Problem<'_> {
    fn params_per_segment(&self) -> usize {
        self.basis.len()
    }

    fn hamiltonian(&self, coeffs: &[f64]) -> (CMat, bool) {
        let n = self.rho0.nrows();
        let mut h = CMat::zeros(n, n);
        for (b, &x) in self.basis.iter().zip(coeffs) {
            h += b.scale(x);
        }
        let norm = h.norm();
        if norm > self.bound {
            (h.scale(self.bound / norm), true)
        } else {
            (h, false)
        }
    }

    fn evaluate(&self, x: &[f64]) -> Evaluation {
        let mut rho = self.rho0.clone();
        let mut dispersion = 0.0;
        let mut bound_active = false;
        for m in 0..self.segments {
            let p = self.params_per_segment();
            let (h, active) = self.hamiltonian(&x[m * p..(m + 1) * p]);
            bound_active |= active;
            dispersion += energy_dispersion(&h, &rho) * self.dt / self.hbar;
            let u = linalg::unitary_from_hermitian(&h, self.dt / self.hbar);
            rho = linalg::hermitian_part(&(&u * &rho * u.adjoint()));
        }
        Evaluation {
            dispersion,
            residual: (&rho - self.rho1).norm(),
            bound_active,
        }
    }

    fn path(&self, x: &[f64], t0: f64) -> HamiltonianPath {
        let p = self.params_per_segment();
        let breakpoints = (0..=self.segments).map(|m| t0 + m as f64 * self.dt).collect();
        let hamiltonians: Vec<CMat> = (0..self.segments)
            .map(|m| self.hamiltonian(&x[m * p..(m + 1) * p]).0)
            .collect();
        HamiltonianPath::piecewise(breakpoints, &hamiltonians, &Tolerances::default())
            .expect("optimizer produces Hermitian pieces on an increasing grid")
    }

    /// Coefficients of a traceless Hermitian matrix in the basis.
    fn coordinates(&self, h: &CMat) -> Vec<f64> {
        self.basis.iter().map(|b| linalg::real_inner(b, h)).collect()
    }
}

/// A unitary `W` with `Wρ0W† = ρ1`, chosen as close to the identity as the
/// eigenspace freedom allows.
pub fn aligning_unitary(rho0: &DensityOperator, rho1: &DensityOperator, tol: &Tolerances) -> CMat {
    let (vals, v0) = linalg::eigh_descending(rho0.matrix());
    let (_, v1) = linalg::eigh_descending(rho1.matrix());
    let n = vals.len();
    // Blocks of equal eigenvalues, zeros included.
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || (vals[i - 1] - vals[i]).abs() > tol.tol_degeneracy {
            blocks.push(start..i);
            start = i;
        }
    }
    let overlap = v0.adjoint() * &v1;
    let mut gauge = CMat::zeros(n, n);
    for r in blocks {
        let len = r.len();
        let block = overlap.view((r.start, r.start), (len, len)).into_owned();
        // Maximizes Re Tr(D·M) over unitaries D on the block.
        let d = linalg::polar_unitary(&block).adjoint();
        gauge.view_mut((r.start, r.start), (len, len)).copy_from(&d);
    }
    v1 * gauge * v0.adjoint()
}

/// Upper bound on the dynamic distance between isospectral `ρ0` and `ρ1`.
///
/// Minimizes `D(H) + μ‖ρ(t1) − ρ1‖²_F` over `M` piecewise-constant traceless
/// Hamiltonians, raising `μ` geometrically between rounds. Every evaluated
/// path whose endpoint residual is within `endpoint_tol` is a candidate,
/// as is `H = 0`; the shortest candidate across restarts wins (ties go to the lowest
/// restart index). The search starts from the constant Hamiltonian
/// `iħ log(W)/(t1 − t0)` of the aligning unitary; restarts beyond the
/// first perturb that start with seeded noise.
pub fn dynamic_distance(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    config: &DistanceConfig,
    hbar: f64,
    tol: &Tolerances,
) -> Result<DistanceResult> {
    config.validate()?;
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidConfig(format!("hbar must be positive, got {hbar}")));
    }
    if rho0.dim() != rho1.dim() {
        return Err(Error::ShapeMismatch {
            expected: (rho0.dim(), rho0.dim()),
            found: (rho1.dim(), rho1.dim()),
        });
    }
    let (ev0, ev1) = (rho0.eigenvalues(), rho1.eigenvalues());
    if ev0
        .iter()
        .zip(&ev1)
        .any(|(a, b)| (a - b).abs() > tol.tol_degeneracy)
    {
        return Err(Error::NotIsospectral {
            left: spectrum_of(rho0, tol).values().to_vec(),
            right: spectrum_of(rho1, tol).values().to_vec(),
        });
    }

    let n = rho0.dim();
    let span = config.t1 - config.t0;
    let problem = Problem {
        rho0: rho0.matrix(),
        rho1: rho1.matrix(),
        basis: traceless_hermitian_basis(n),
        segments: config.segments,
        dt: span / config.segments as f64,
        hbar,
        bound: config.hamiltonian_bound,
    };

    let w = aligning_unitary(rho0, rho1, tol);
    let generator = linalg::unitary_log_generator(&w);
    // exp(−iHT/ħ) = W = exp(iK)  ⇒  H = −ħK/T.
    let h_init = generator.scale(-hbar / span);
    let seed_coords = problem.coordinates(&h_init);
    let x_init: Vec<f64> = std::iter::repeat_n(seed_coords.iter().copied(), config.segments)
        .flatten()
        .collect();

    let runs: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(&problem, &x_init, r, config))
        .collect();

    let feasible = runs
        .iter()
        .enumerate()
        .filter_map(|(i, run)| run.best_feasible.as_ref().map(|b| (i, b)))
        .min_by(|a, b| a.1.dispersion.total_cmp(&b.1.dispersion).then(a.0.cmp(&b.0)));

    // The zero Hamiltonian is feasible whenever ρ1 is already within
    // tolerance of ρ0, and nothing beats its length.
    let zero = vec![0.0; x_init.len()];
    let zero_feasible = problem.evaluate(&zero).residual <= config.endpoint_tol;

    let (winner, x, stalled) = match feasible {
        _ if zero_feasible => (0, zero, false),
        Some((i, best)) => (i, best.x.clone(), false),
        None => {
            let (i, run) = runs
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.final_objective.total_cmp(&b.1.final_objective).then(a.0.cmp(&b.0)))
                .expect("at least one restart");
            (i, run.final_x.clone(), true)
        }
    };
    let eval = problem.evaluate(&x);
    let run = &runs[winner];
    Ok(DistanceResult {
        distance: eval.dispersion,
        endpoint_residual: eval.residual,
        hamiltonian: problem.path(&x, config.t0),
        trace: OptimizerTrace {
            iterations: run.iterations,
            evaluations: runs.iter().map(|r| r.evaluations).sum(),
            best_objective: run.history.clone(),
            winning_restart: winner,
        },
        stalled,
        bound_active: eval.bound_active,
    })
}

struct Candidate {
    x: Vec<f64>,
    dispersion: f64,
}

struct RestartOutcome {
    best_feasible: Option<Candidate>,
    final_x: Vec<f64>,
    final_objective: f64,
    iterations: usize,
    evaluations: usize,
    history: Vec<f64>,
}

fn run_restart(problem: &Problem, x_init: &[f64], restart: usize, config: &DistanceConfig) -> RestartOutcome {
    use rand::Rng;
    use rand_distr::StandardNormal;

    let mut x = x_init.to_vec();
    if restart > 0 {
        let mut rng = random::rng_from_seed(config.seed.wrapping_add(restart as u64));
        let scale = 0.3 * (1.0 + x_init.iter().map(|v| v * v).sum::<f64>().sqrt() / (x_init.len() as f64).sqrt());
        for v in x.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v += scale * z;
        }
    }

    let mut best_feasible: Option<Candidate> = None;
    let mut iterations = 0;
    let mut evaluations = 0;
    let mut history = Vec::new();
    let mut mu = config.penalty_start;
    let mut final_objective = f64::INFINITY;
    for round in 0..config.max_rounds {
        let opts = NelderMeadOptions {
            initial_step: if round == 0 { 0.1 } else { 0.02 },
            max_evaluations: config.evaluations_per_round,
            ..Default::default()
        };
        let objective = |p: &[f64]| {
            let e = problem.evaluate(p);
            if e.residual <= config.endpoint_tol
                && best_feasible
                    .as_ref()
                    .is_none_or(|b| e.dispersion < b.dispersion)
            {
                best_feasible = Some(Candidate {
                    x: p.to_vec(),
                    dispersion: e.dispersion,
                });
            }
            e.dispersion + mu * e.residual * e.residual
        };
        let m = nelder_mead(objective, &x, &opts);
        iterations += m.iterations;
        evaluations += m.evaluations;
        history.extend(m.history);
        x = m.x;
        final_objective = m.value;
        mu *= config.penalty_growth;
    }
    RestartOutcome {
        best_feasible,
        final_x: x,
        final_objective,
        iterations,
        evaluations,
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;
    use crate::operator::validate_density;

    #[test]
    fn basis_is_orthonormal_and_traceless() {
        for n in 2..5 {
            let b = traceless_hermitian_basis(n);
            assert_eq!(b.len(), n * n - 1);
            for (i, x) in b.iter().enumerate() {
                assert!(linalg::trace(x).norm() < 1e-15);
                assert!(linalg::hermitian_residual(x) < 1e-15);
                for (j, y) in b.iter().enumerate() {
                    let ip = linalg::real_inner(x, y);
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - expected).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn maximally_mixed_qubit_has_unit_dispersion() {
        let t = Tolerances::default();
        let rho = validate_density(&linalg::identity(2).scale(0.5), &t).unwrap();
        let z = linalg::diag_real(&[1.0, -1.0]);
        let h = HamiltonianPath::constant(&z, &t).unwrap();
        let rep = dispersion_length(&h, &rho, 0.0, 2.5, 7, 1.0).unwrap();
        assert!(rep.integrand.iter().all(|e| (e - 1.0).abs() < 1e-15));
        assert!((rep.value - 2.5).abs() < 1e-14);
    }

    #[test]
    fn zero_hamiltonian_has_zero_length() {
        let t = Tolerances::default();
        let rho = validate_density(&linalg::diag_real(&[0.6, 0.4]), &t).unwrap();
        let rep = dispersion_length(&HamiltonianPath::zero(2), &rho, 0.0, 1.0, 4, 0.5).unwrap();
        assert_eq!(rep.value, 0.0);
    }

    #[test]
    fn bures_special_cases() {
        let t = Tolerances::default();
        let a = validate_density(&linalg::diag_real(&[1.0, 0.0]), &t).unwrap();
        let b = validate_density(&linalg::diag_real(&[0.0, 1.0]), &t).unwrap();
        assert!(bures_distance(&a, &a).unwrap() < 1e-7);
        assert!((bures_distance(&a, &b).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let c3 = validate_density(&linalg::identity(3).scale(1.0 / 3.0), &t).unwrap();
        assert!(matches!(bures_distance(&a, &c3), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn identical_states_have_zero_distance() {
        let t = Tolerances::default();
        let rho = validate_density(&linalg::diag_real(&[0.8, 0.2]), &t).unwrap();
        let cfg = DistanceConfig {
            restarts: 1,
            max_rounds: 1,
            evaluations_per_round: 50,
            ..Default::default()
        };
        let r = dynamic_distance(&rho, &rho, &cfg, 0.5, &t).unwrap();
        assert_eq!(r.distance, 0.0);
        assert!(!r.stalled);
    }

    #[test]
    fn non_isospectral_pair_is_rejected() {
        let t = Tolerances::default();
        let a = validate_density(&linalg::diag_real(&[0.8, 0.2]), &t).unwrap();
        let b = validate_density(&linalg::diag_real(&[0.7, 0.3]), &t).unwrap();
        assert!(matches!(
            dynamic_distance(&a, &b, &DistanceConfig::default(), 0.5, &t),
            Err(Error::NotIsospectral { .. })
        ));
    }

    #[test]
    fn aligning_unitary_maps_states() {
        let t = Tolerances::default();
        let mut rng = random::rng_from_seed(11);
        let s = random::random_spectrum(&mut rng, 3, None, &t);
        let a = random::random_density_with_spectrum(&mut rng, 3, &s);
        let b = random::random_density_with_spectrum(&mut rng, 3, &s);
        let w = aligning_unitary(&a, &b, &t);
        assert!(linalg::unitarity_residual(&w) < 1e-12);
        assert!((&w * a.matrix() * w.adjoint() - b.matrix()).norm() < 1e-12);
    }

    #[test]
    fn horizontal_generator_keeps_velocity() {
        let t = Tolerances::default();
        let mut rng = random::rng_from_seed(5);
        let rho = random::random_density(&mut rng, 3);
        let h = random::random_hermitian(&mut rng, 3, 1.0);
        let hh = horizontal_generator(&h, &rho, &t).unwrap();
        let v0 = linalg::commutator(&h, rho.matrix());
        let v1 = linalg::commutator(&hh, rho.matrix());
        assert!((v0 - v1).norm() < 1e-12);
        assert!(energy_dispersion(&hh, rho.matrix()) <= energy_dispersion(&h, rho.matrix()) + 1e-12);
        let _ = real(0.0);
    }
}

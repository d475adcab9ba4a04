mod common;

use std::f64::consts::PI;

use isogeom::distance::curve_length_in_base;
use isogeom::dynamics::*;
use isogeom::geometry::{GeometryContext, DEFAULT_HBAR};
use isogeom::linalg::{self, c, real, CMat};
use isogeom::operator::*;
use isogeom::random::{self, rng_from_seed};
use isogeom::{scenario, Error};
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn ctx_for(rho: &DensityOperator, hbar: f64) -> GeometryContext {
    GeometryContext::new(spectrum_of(rho, &tol()), hbar).unwrap()
}

fn random_piecewise(seed: u64, n: usize, pieces: usize, t1: f64, scale: f64) -> HamiltonianPath {
    let mut rng = rng_from_seed(seed);
    let hams: Vec<CMat> = (0..pieces)
        .map(|_| random::random_hermitian(&mut rng, n, scale))
        .collect();
    let breaks = (0..=pieces).map(|i| t1 * i as f64 / pieces as f64).collect();
    HamiltonianPath::piecewise(breaks, &hams, &tol()).unwrap()
}

#[test]
fn unitary_step_matches_taylor_oracle() {
    let mut rng = rng_from_seed(1);
    for _ in 0..10 {
        let h = random::random_hermitian(&mut rng, 4, 3.0);
        let u = linalg::unitary_from_hermitian(&h, 0.37);
        assert!((u - common::unitary_taylor(&h, 0.37)).norm() < 1e-10);
    }
}

#[test]
fn trivial_propagations() {
    let mut rng = rng_from_seed(2);
    let rho = random::random_density(&mut rng, 3);
    let grid = TimeGrid::uniform(0.0, 1.0, 10).unwrap();
    let states = propagate_von_neumann(&HamiltonianPath::zero(3), &rho, &grid, 0.5).unwrap();
    assert!(states.iter().all(|s| s.matrix() == rho.matrix()));

    let d = validate_density(&linalg::diag_real(&[0.5, 0.3, 0.2]), &tol()).unwrap();
    let h = HamiltonianPath::constant(&linalg::diag_real(&[1.0, -2.0, 0.3]), &tol()).unwrap();
    let states = propagate_von_neumann(&h, &d, &grid, 0.5).unwrap();
    for s in &states {
        assert!((s.matrix() - d.matrix()).norm() < 1e-14);
    }
}

#[test]
fn rabi_flip_matches_closed_form() {
    let omega = 3.0;
    let hbar = 1.0;
    let h = HamiltonianPath::constant(&scenario::pauli_x().scale(omega / 2.0), &tol()).unwrap();
    let rho0 = scenario::pure_state(&[real(1.0), real(0.0)]);
    let grid = TimeGrid::uniform(0.0, PI / omega, 1000).unwrap();
    let states = propagate_von_neumann(&h, &rho0, &grid, hbar).unwrap();
    let one = linalg::diag_real(&[0.0, 1.0]);
    assert!((states.last().unwrap().matrix() - one).norm() < 1e-10);
    // Closed form along the way: population of |1⟩ is sin²(ωt/2).
    for (t, s) in grid.times().iter().zip(&states) {
        assert!((s.matrix()[(1, 1)].re - (omega * t / 2.0).sin().powi(2)).abs() < 1e-10);
    }
}

#[test]
fn raw_lift_examples() {
    let t = tol();
    let rho = validate_density(&linalg::diag_real(&[0.5, 0.3, 0.2]), &t).unwrap();
    let psi0 = standard_purification(&rho, &t);
    let grid = TimeGrid::uniform(0.0, 1.0, 50).unwrap();
    let still = lift_unitary_curve(&HamiltonianPath::zero(3), &psi0, &grid, 0.5).unwrap();
    assert!(still.raw_points().iter().all(|p| p == psi0.matrix()));

    // Columns are propagated basis vectors scaled by √p_j.
    let mut rng = rng_from_seed(3);
    let hm = random::random_hermitian(&mut rng, 3, 1.0);
    let h = HamiltonianPath::constant(&hm, &t).unwrap();
    let traj = lift_unitary_curve(&h, &psi0, &grid, 0.5).unwrap();
    let u_end = common::unitary_taylor(&hm, 1.0 / 0.5);
    for (j, p) in [0.5f64, 0.3, 0.2].iter().enumerate() {
        let want = u_end.column(j) * c(p.sqrt(), 0.0);
        let got = traj.raw_points().last().unwrap().column(j).into_owned();
        let want_abs = psi0.matrix()[(j, j)].norm();
        assert!((want_abs - p.sqrt()).abs() < 1e-14);
        assert!((got - want).norm() < 1e-10);
    }
}

#[test]
fn raw_lift_projects_onto_propagation() {
    let mut rng = rng_from_seed(4);
    let rho = random::random_density(&mut rng, 3);
    let h = random_piecewise(5, 3, 6, 1.0, 1.5);
    let grid = TimeGrid::uniform(0.0, 1.0, 600).unwrap();
    let psi0 = standard_purification(&rho, &tol());
    let traj = lift_unitary_curve(&h, &psi0, &grid, 0.5).unwrap();
    let states = propagate_von_neumann(&h, &rho, &grid, 0.5).unwrap();
    for (d, s) in traj.densities().iter().zip(&states) {
        assert!((d.matrix() - s.matrix()).norm() <= 1e-12);
    }
}

#[test]
fn zero_hamiltonian_gives_identity_gauge() {
    let rho = validate_density(&linalg::diag_real(&[0.7, 0.3]), &tol()).unwrap();
    let ctx = ctx_for(&rho, DEFAULT_HBAR);
    let traj = horizontal_lift(&HamiltonianPath::zero(2), &rho, None, 0.0, 1.0, 20, &ctx).unwrap();
    for v in traj.gauge_factors() {
        assert!((v - linalg::identity(2)).norm() == 0.0);
    }
    let hol = holonomy(&HamiltonianPath::zero(2), &rho, None, 0.0, 1.0, 20, &ctx).unwrap();
    assert!((hol - ctx.spectrum().p_matrix()).norm() < 1e-15);
}

#[test]
fn stationary_state_has_nontrivial_gauge() {
    let rho = validate_density(&linalg::diag_real(&[0.6, 0.3, 0.1]), &tol()).unwrap();
    let ctx = ctx_for(&rho, DEFAULT_HBAR);
    let h = HamiltonianPath::constant(&linalg::diag_real(&[0.4, -1.0, 2.0]), &tol()).unwrap();
    let traj = horizontal_lift(&h, &rho, None, 0.0, 1.0, 1000, &ctx).unwrap();
    for d in traj.densities() {
        assert!((d.matrix() - rho.matrix()).norm() < 1e-12);
    }
    let v_end = traj.gauge_factor(traj.len() - 1);
    assert!((v_end - linalg::identity(3)).norm() > 0.1);
    // V removes the dynamical phase e^{−iE_j t/ħ} of each branch.
    for (j, e) in [0.4f64, -1.0, 2.0].iter().enumerate() {
        let want = c(0.0, e / DEFAULT_HBAR).exp();
        assert!((v_end[(j, j)] - want).norm() < 1e-10);
    }
    let (raw, horizontal) = traj.max_fiber_residuals();
    assert!(raw <= 1e-10 && horizontal <= 1e-10);
    assert!(traj.horizontality_residuals(&ctx).iter().all(|r| *r < 1e-9));
}

#[test]
fn equal_endpoints_give_zero_phase() {
    let s = scenario::precession(1.0, 1.0, 0.5);
    let ctx = ctx_for(&s.rho0, 0.5);
    let g = operational_geometric_phase(&s.hamiltonian, &s.rho0, None, 0.3, 0.3, 10, &ctx).unwrap();
    assert_eq!(g, 0.0);
}

#[test]
fn precession_phase_matches_berry_oracle() {
    for theta in [0.4, PI / 3.0, 2.0] {
        let s = scenario::precession(theta, 1.0, 0.5);
        let ctx = ctx_for(&s.rho0, 0.5);
        let g = operational_geometric_phase(&s.hamiltonian, &s.rho0, None, 0.0, 1.0, 20_000, &ctx).unwrap();
        let oracle = common::berry_phase_precession(theta, 200_000);
        assert!((g - oracle).abs() < 1e-3, "θ = {theta}: {g} vs {oracle}");
        assert!((g - s.expected_phase.unwrap()).abs() < 1e-3);
    }
}

#[test]
fn mixed_qubit_matches_interferometric_oracle() {
    for (p, theta, tau) in [(0.8, 0.7, 1.0), (0.65, 1.9, 0.37), (0.9, 0.2, 0.81)] {
        for hbar in [0.5, 1.3] {
            let s = scenario::mixed_precession(p, theta, 1.0, hbar);
            let ctx = ctx_for(&s.rho0, hbar);
            let g = operational_geometric_phase(&s.hamiltonian, &s.rho0, None, 0.0, tau, 2000, &ctx).unwrap();
            let oracle = common::interferometric_phase(p, theta, 2.0 * PI, tau, hbar);
            assert!((g - oracle).abs() < 1e-8, "{g} vs {oracle}");
        }
    }
}

#[test]
fn orthogonal_endpoint_has_undefined_phase() {
    let s = scenario::rabi(2.0 * PI, 0.5);
    let ctx = ctx_for(&s.rho0, 0.5);
    let r = operational_geometric_phase(&s.hamiltonian, &s.rho0, None, s.t0, s.t1, 100, &ctx);
    assert!(matches!(r, Err(Error::PhaseUndefined { .. })));
}

#[test]
fn unitary_covariance_of_holonomy() {
    let mut rng = rng_from_seed(10);
    let rho = random::random_density(&mut rng, 3);
    let ctx = ctx_for(&rho, 0.5);
    let h = random_piecewise(11, 3, 4, 1.0, 1.0);
    let psi0 = standard_purification(&rho, &tol());
    let w = random::haar_unitary(&mut rng, 3);
    let hol = holonomy(&h, &rho, Some(&psi0), 0.0, 1.0, 400, &ctx).unwrap();
    let rho_w = rho.conjugate_by(&w);
    let psi_w = psi0.left_multiply(&w);
    let hol_w = holonomy(&h.conjugated(&w), &rho_w, Some(&psi_w), 0.0, 1.0, 400, &ctx).unwrap();
    assert!((hol - hol_w).norm() <= 1e-10);
}

#[test]
fn coarse_grid_is_reported() {
    // Sixteen steps per revolution of a fast drive do not resolve the curve.
    let rho = validate_density(&linalg::diag_real(&[0.8, 0.2]), &tol()).unwrap();
    let ctx = ctx_for(&rho, 0.5);
    let h = HamiltonianPath::constant(&(scenario::pauli_x() + scenario::pauli_z()).scale(40.0), &tol()).unwrap();
    let r = horizontal_lift(&h, &rho, None, 0.0, 1.0, 16, &ctx);
    assert!(matches!(r, Err(Error::GridTooCoarse { .. })), "{r:?}");
}

#[test]
fn lift_length_matches_base_length() {
    let mut rng = rng_from_seed(13);
    let rho = random::random_density(&mut rng, 3);
    let ctx = ctx_for(&rho, 0.5);
    let h = random_piecewise(14, 3, 5, 1.0, 1.0);
    let traj = horizontal_lift(&h, &rho, None, 0.0, 1.0, 10_000, &ctx).unwrap();
    let scale = (2.0 * ctx.hbar()).sqrt();
    let chords: f64 = (0..traj.len() - 1)
        .map(|i| (traj.horizontal_matrix(i + 1) - traj.horizontal_matrix(i)).norm() * scale)
        .sum();
    let base = curve_length_in_base(&traj, &ctx).unwrap();
    assert!((chords - base).abs() <= 1e-6 * base.max(1.0), "{chords} vs {base}");
}

#[test]
fn piecewise_breakpoints_must_lie_on_grid() {
    let rho = validate_density(&linalg::diag_real(&[0.8, 0.2]), &tol()).unwrap();
    let ctx = ctx_for(&rho, 0.5);
    let h = random_piecewise(1, 2, 3, 1.0, 1.0);
    assert!(matches!(
        horizontal_lift(&h, &rho, None, 0.0, 1.0, 10, &ctx),
        Err(Error::InvalidGrid(_))
    ));
    assert!(horizontal_lift(&h, &rho, None, 0.0, 1.0, 12, &ctx).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phase_is_gauge_invariant(seed in any::<u64>(), shape in prop_oneof![Just((2usize, vec![1usize, 1])), Just((3, vec![2, 1])), Just((4, vec![1, 1, 1]))]) {
        let (n, blocks) = shape;
        let mut rng = rng_from_seed(seed);
        let k: usize = blocks.iter().sum();
        let s = random::random_spectrum(&mut rng, k, Some(&blocks), &tol());
        let rho = random::random_density_with_spectrum(&mut rng, n, &s);
        let ctx = GeometryContext::new(spectrum_of(&rho, &tol()), 0.5).unwrap();
        let h = random_piecewise(seed ^ 1, n, 4, 1.0, 1.0);
        let psi0 = standard_purification(&rho, &tol());
        let u = random::random_gauge_unitary(&mut rng, ctx.spectrum());
        let psi_u = psi0.gauge_transform(&u, &tol()).unwrap();
        let a = operational_geometric_phase(&h, &rho, Some(&psi0), 0.0, 1.0, 200, &ctx).unwrap();
        let b = operational_geometric_phase(&h, &rho, Some(&psi_u), 0.0, 1.0, 200, &ctx).unwrap();
        let diff = (a - b).rem_euclid(2.0 * PI);
        prop_assert!(diff.min(2.0 * PI - diff) <= 1e-10);
    }

    #[test]
    fn phase_is_hbar_independent(seed in any::<u64>(), hbar in 0.1f64..4.0) {
        // Same physical curve: H/ħ is held fixed.
        let mut rng = rng_from_seed(seed);
        let rho = random::random_density(&mut rng, 2);
        let k = random::random_hermitian(&mut rng, 2, 1.0);
        let phase_at = |hb: f64| {
            let ctx = GeometryContext::new(spectrum_of(&rho, &tol()), hb).unwrap();
            let h = HamiltonianPath::constant(&k.scale(hb), &tol()).unwrap();
            operational_geometric_phase(&h, &rho, None, 0.0, 1.0, 100, &ctx).unwrap()
        };
        prop_assert!((phase_at(0.5) - phase_at(hbar)).abs() <= 1e-10);
    }

    #[test]
    fn fiber_and_gauge_are_preserved(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rho = random::random_density(&mut rng, 3);
        let ctx = GeometryContext::new(spectrum_of(&rho, &tol()), 0.5).unwrap();
        let h = random_piecewise(seed, 3, 5, 1.0, 2.0);
        let traj = horizontal_lift(&h, &rho, None, 0.0, 1.0, 500, &ctx).unwrap();
        let (raw, horizontal) = traj.max_fiber_residuals();
        prop_assert!(raw <= 1e-10 && horizontal <= 1e-10);
        prop_assert!(traj.max_gauge_unitarity_residual() <= 1e-10);
    }
}

//! Canonical test families: precession cones, Rabi drives and seeded
//! isospectral pairs.

use std::f64::consts::PI;

use crate::dynamics::HamiltonianPath;
use crate::linalg::{c, real, CMat};
use crate::operator::{validate_density, DensityOperator, Tolerances};
use crate::random;

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[real(0.0), c(0.0, -1.0), c(0.0, 1.0), real(0.0)])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(-1.0)])
}

/// Pure state `|ψ⟩⟨ψ|` from an unnormalized amplitude vector.
pub fn pure_state(amplitudes: &[num_complex::Complex64]) -> DensityOperator {
    let v = CMat::from_column_slice(amplitudes.len(), 1, amplitudes);
    let v = v.unscale(v.norm());
    validate_density(&(&v * v.adjoint()), &Tolerances::default()).expect("pure state is valid")
}

/// A single-qubit state and Hamiltonian over `[0, t1]`.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: &'static str,
    pub hamiltonian: HamiltonianPath,
    pub rho0: DensityOperator,
    pub t0: f64,
    pub t1: f64,
    pub hbar: f64,
    /// Closed-form phase where one is known.
    pub expected_phase: Option<f64>,
}

fn precession_hamiltonian(hbar: f64, period: f64, axis: &CMat) -> HamiltonianPath {
    let omega = 2.0 * PI / period;
    HamiltonianPath::constant(&axis.scale(hbar * omega / 2.0), &Tolerances::default())
        .expect("Pauli combination is Hermitian")
}

fn wrap(angle: f64) -> f64 {
    let a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a - 2.0 * PI
    } else {
        a
    }
}

/// Pure qubit `cos(θ/2)|0⟩ + sin(θ/2)|1⟩` precessing once about `z`.
/// The cyclic phase is `−π(1 − cos θ)`.
pub fn precession(theta: f64, period: f64, hbar: f64) -> Scenario {
    let rho0 = pure_state(&[real((theta / 2.0).cos()), real((theta / 2.0).sin())]);
    Scenario {
        name: "precession",
        hamiltonian: precession_hamiltonian(hbar, period, &pauli_z()),
        rho0,
        t0: 0.0,
        t1: period,
        hbar,
        expected_phase: Some(wrap(-PI * (1.0 - theta.cos()))),
    }
}

/// `diag(p, 1 − p)` precessing once about the axis `(sin θ, 0, cos θ)`.
pub fn mixed_precession(p: f64, theta: f64, period: f64, hbar: f64) -> Scenario {
    let rho0 = validate_density(&crate::linalg::diag_real(&[p, 1.0 - p]), &Tolerances::default())
        .expect("diag(p, 1 - p) is a state for p in [0, 1]");
    let axis = pauli_x().scale(theta.sin()) + pauli_z().scale(theta.cos());
    Scenario {
        name: "mixed-precession",
        hamiltonian: precession_hamiltonian(hbar, period, &axis),
        rho0,
        t0: 0.0,
        t1: period,
        hbar,
        expected_phase: None,
    }
}

/// `|0⟩` driven by `(ħΩ/2)σ_x` for a π pulse, ending at `|1⟩`.
pub fn rabi(omega: f64, hbar: f64) -> Scenario {
    let h = pauli_x().scale(hbar * omega / 2.0);
    Scenario {
        name: "rabi",
        hamiltonian: HamiltonianPath::constant(&h, &Tolerances::default()).expect("Hermitian"),
        rho0: pure_state(&[real(1.0), real(0.0)]),
        t0: 0.0,
        t1: PI / omega,
        hbar,
        expected_phase: None,
    }
}

/// A random rank-`k` state on `C^n` and a Haar-rotated copy.
pub fn isospectral_pair(n: usize, k: usize, seed: u64) -> (DensityOperator, DensityOperator) {
    let mut rng = random::rng_from_seed(seed);
    let spectrum = random::random_spectrum(&mut rng, k, None, &Tolerances::default());
    let rho0 = random::random_density_with_spectrum(&mut rng, n, &spectrum);
    let w = random::haar_unitary(&mut rng, n);
    let rho1 = rho0.conjugate_by(&w);
    (rho0, rho1)
}

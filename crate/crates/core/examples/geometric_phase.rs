//! Operational geometric phase for pure and mixed precession, compared with
//! the solid-angle formula.

use std::f64::consts::PI;

use isogeom::dynamics::operational_geometric_phase;
use isogeom::geometry::GeometryContext;
use isogeom::operator::{spectrum_of, Tolerances};
use isogeom::{scenario, Error};

fn main() -> isogeom::Result<()> {
    let tol = Tolerances::default();
    println!("{:>6} {:>12} {:>12}", "theta", "gamma", "-pi(1-cos)");
    for theta in [0.3, PI / 4.0, PI / 3.0, 1.2, 2.0] {
        let s = scenario::precession(theta, 1.0, 0.5);
        let ctx = GeometryContext::new(spectrum_of(&s.rho0, &tol), s.hbar)?;
        let g = operational_geometric_phase(&s.hamiltonian, &s.rho0, None, s.t0, s.t1, 20_000, &ctx)?;
        println!("{theta:>6.3} {g:>12.6} {:>12.6}", s.expected_phase.unwrap());
    }

    // Mixing shrinks the Bloch vector and with it the phase.
    println!();
    for p in [1.0, 0.9, 0.75, 0.6] {
        let s = scenario::mixed_precession(p, 0.8, 1.0, 0.5);
        let ctx = GeometryContext::new(spectrum_of(&s.rho0, &tol), s.hbar)?;
        let g = operational_geometric_phase(&s.hamiltonian, &s.rho0, None, s.t0, s.t1, 20_000, &ctx)?;
        println!("p = {p:.2}  gamma = {g:.6}");
    }

    let s = scenario::rabi(2.0 * PI, 0.5);
    let ctx = GeometryContext::new(spectrum_of(&s.rho0, &tol), s.hbar)?;
    match operational_geometric_phase(&s.hamiltonian, &s.rho0, None, s.t0, s.t1, 1000, &ctx) {
        Err(Error::PhaseUndefined { .. }) => println!("\npi pulse: phase undefined, as expected"),
        other => println!("\npi pulse: {other:?}"),
    }
    Ok(())
}

//! Horizontal lift of a precessing pure qubit and the first-order
//! convergence of its horizontality residual.

use std::f64::consts::PI;

use isogeom::dynamics::horizontal_lift;
use isogeom::geometry::GeometryContext;
use isogeom::operator::{spectrum_of, Tolerances};
use isogeom::scenario;

fn main() -> isogeom::Result<()> {
    let tol = Tolerances::default();
    let s = scenario::precession(PI / 3.0, 1.0, 0.5);
    let ctx = GeometryContext::new(spectrum_of(&s.rho0, &tol), s.hbar)?;

    println!("{:>8} {:>14} {:>12}", "steps", "max residual", "fiber");
    let mut previous: Option<f64> = None;
    for steps in [1_250, 2_500, 5_000, 10_000, 20_000] {
        let traj = horizontal_lift(&s.hamiltonian, &s.rho0, None, s.t0, s.t1, steps, &ctx)?;
        let residual = traj.horizontality_residuals(&ctx).into_iter().fold(0.0, f64::max);
        let (raw, horizontal) = traj.max_fiber_residuals();
        print!("{steps:>8} {residual:>14.4e} {:>12.2e}", raw.max(horizontal));
        if let Some(p) = previous {
            print!("   ratio {:.4}", residual / p);
        }
        println!();
        previous = Some(residual);
    }
    Ok(())
}

//! Dynamic distance between isospectral states by optimizing over
//! piecewise-constant Hamiltonians, against the Bures lower bound.

use isogeom::distance::{bures_distance, dynamic_distance, DistanceConfig};
use isogeom::geometry::DEFAULT_HBAR;
use isogeom::linalg;
use isogeom::operator::{validate_density, Tolerances};
use isogeom::scenario;

fn main() -> isogeom::Result<()> {
    let tol = Tolerances::default();
    let config = DistanceConfig::default();

    let up = validate_density(&linalg::diag_real(&[1.0, 0.0]), &tol)?;
    let down = validate_density(&linalg::diag_real(&[0.0, 1.0]), &tol)?;
    let r = dynamic_distance(&up, &down, &config, DEFAULT_HBAR, &tol)?;
    println!(
        "|0> -> |1>: Dist = {:.6} (pi/2 = {:.6}), Bures = {:.6}, residual {:.1e}",
        r.distance,
        std::f64::consts::FRAC_PI_2,
        bures_distance(&up, &down)?,
        r.endpoint_residual
    );

    for seed in 0..4 {
        let (rho0, rho1) = scenario::isospectral_pair(3, 3, seed);
        let r = dynamic_distance(&rho0, &rho1, &DistanceConfig { seed, ..config.clone() }, DEFAULT_HBAR, &tol)?;
        let b = bures_distance(&rho0, &rho1)?;
        println!(
            "qutrit pair {seed}: Dist = {:.6}  Bures = {:.6}  gap = {:.6}  evals = {}{}",
            r.distance,
            b,
            r.distance - b,
            r.trace.evaluations,
            if r.stalled { "  (stalled)" } else { "" }
        );
    }
    Ok(())
}

//! Dispersion length of a Hamiltonian path, the base-curve length it bounds,
//! and the Bures distance between the endpoints.

use isogeom::distance::{bures_distance, curve_length_in_base, dispersion_length, fidelity, horizontal_generator};
use isogeom::dynamics::{horizontal_lift, propagate_von_neumann, HamiltonianPath, TimeGrid};
use isogeom::geometry::{GeometryContext, DEFAULT_HBAR};
use isogeom::operator::{spectrum_of, Tolerances};
use isogeom::random::{self, rng_from_seed};

fn main() -> isogeom::Result<()> {
    let tol = Tolerances::default();
    let hbar = DEFAULT_HBAR;
    let mut rng = rng_from_seed(5);
    let rho = random::random_density(&mut rng, 3);
    let ctx = GeometryContext::new(spectrum_of(&rho, &tol), hbar)?;
    let generic = random::random_hermitian(&mut rng, 3, 1.0);

    for (name, hm) in [
        ("generic", generic.clone()),
        ("horizontal", horizontal_generator(&generic, &rho, &tol)?),
    ] {
        let h = HamiltonianPath::constant(&hm, &tol)?;
        let d = dispersion_length(&h, &rho, 0.0, 1.0, 2000, hbar)?;
        let traj = horizontal_lift(&h, &rho, None, 0.0, 1.0, 2000, &ctx)?;
        let len = curve_length_in_base(&traj, &ctx)?;
        println!(
            "{name:>10}: D = {:.8}  length/sqrt(2hbar) = {:.8}",
            d.value,
            len / (2.0 * hbar).sqrt()
        );
    }

    let h = HamiltonianPath::constant(&generic, &tol)?;
    let grid = TimeGrid::uniform(0.0, 1.0, 100)?;
    let end = propagate_von_neumann(&h, &rho, &grid, hbar)?.pop().unwrap();
    println!("fidelity      {:.10}", fidelity(&rho, &end)?);
    println!("Bures         {:.10}", bures_distance(&rho, &end)?);
    println!("D along path  {:.10}", dispersion_length(&h, &rho, 0.0, 1.0, 100, hbar)?.value);
    Ok(())
}

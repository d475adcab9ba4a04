//! Validate a density matrix, read off its spectrum and build the standard
//! purification Ψ with Ψ†Ψ = P(σ) and ΨΨ† = ρ.

use isogeom::linalg;
use isogeom::operator::{spectrum_of, standard_purification, validate_density, Tolerances};
use isogeom::random::{self, rng_from_seed};

fn main() -> isogeom::Result<()> {
    let tol = Tolerances::default();
    let mut rng = rng_from_seed(3);

    // Rank-2 state in dimension 4 with a doubly degenerate eigenvalue.
    let s = random::random_spectrum(&mut rng, 3, Some(&[2, 1]), &tol);
    let rho = random::random_density_with_spectrum(&mut rng, 4, &s);
    let rho = validate_density(rho.matrix(), &tol)?;

    let sigma = spectrum_of(&rho, &tol);
    println!("eigenvalues     {:?}", sigma.values());
    println!("multiplicities  {:?}", sigma.multiplicities());

    let psi = standard_purification(&rho, &tol);
    println!("Psi is {}x{}", psi.dim(), psi.rank());
    println!("fiber residual  {:.2e}", psi.fiber_residual());
    println!("|PsiPsi^+ - rho| {:.2e}", (psi.project().matrix() - rho.matrix()).norm());

    // Any gauge unitary moves Ψ along its fiber without changing ρ.
    let u = random::random_gauge_unitary(&mut rng, &sigma);
    let moved = psi.gauge_transform(&u, &tol)?;
    println!("after gauge      {:.2e}", (moved.project().matrix() - rho.matrix()).norm());

    match validate_density(&linalg::diag_real(&[0.6, 0.6, -0.2]), &tol) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}

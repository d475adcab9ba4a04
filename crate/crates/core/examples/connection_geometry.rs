//! The mechanical connection on the purification bundle: metric, inertia,
//! moment map, and the vertical/horizontal split of a tangent vector.

use isogeom::geometry::{infinitesimal_generator, GeometryContext, DEFAULT_HBAR};
use isogeom::operator::{project_to_fiber_tangent, Tolerances};
use isogeom::random::{self, rng_from_seed};

fn main() -> isogeom::Result<()> {
    let tol = Tolerances::default();
    let mut rng = rng_from_seed(11);
    let s = random::random_spectrum(&mut rng, 3, Some(&[1, 2]), &tol);
    let ctx = GeometryContext::new(s.clone(), DEFAULT_HBAR)?;

    let psi = random::random_bundle_point(&mut rng, 4, &s);
    let x = project_to_fiber_tangent(&psi, &random::ginibre(&mut rng, 4, 3))?;

    let a = ctx.connection_form(&psi, &x)?;
    let vertical = ctx.vertical_projection(&psi, &x)?;
    let horizontal = ctx.horizontal_projection(&psi, &x)?;
    println!("|A(X)|                 {:.6}", a.matrix().norm());
    println!("G(X_vert, X_hor)       {:.2e}", ctx.metric(&vertical, &horizontal)?);
    println!("|A(X_hor)|             {:.2e}", ctx.connection_form(&psi, &horizontal)?.matrix().norm());

    // The connection reproduces the generator of a gauge direction.
    let xi = random::random_gauge_element(&mut rng, &s);
    let back = ctx.connection_form(&psi, &infinitesimal_generator(&psi, &xi))?;
    println!("|A(Psi xi) - xi|       {:.2e}", (back.matrix() - xi.matrix()).norm());

    // Moment of inertia does not depend on the fiber point.
    let eta = random::random_gauge_element(&mut rng, &s);
    let inertia = ctx.moment_of_inertia(&xi, &eta)?;
    for _ in 0..3 {
        let other = random::random_bundle_point(&mut rng, 4, &s);
        let g = ctx.metric(
            &infinitesimal_generator(&other, &xi),
            &infinitesimal_generator(&other, &eta),
        )?;
        println!("I(xi, eta) = {inertia:.12}  G(Psi xi, Psi eta) = {g:.12}");
    }
    Ok(())
}

//! Seeded ensemble of random isospectral pairs, written as CSV. The output
//! is the same for any number of workers.

use isogeom::cli::{cmd_ensemble, EnsembleConfig};
use isogeom::distance::DistanceConfig;
use isogeom::geometry::DEFAULT_HBAR;
use isogeom::operator::Tolerances;

fn main() -> isogeom::Result<()> {
    let config = |workers| EnsembleConfig {
        n: 2,
        k: 2,
        count: 10,
        seed: 42,
        hbar: DEFAULT_HBAR,
        workers,
        distance: DistanceConfig::default(),
        tol: Tolerances::default(),
    };
    let csv = cmd_ensemble(&config(1))?;
    print!("{csv}");
    let parallel = cmd_ensemble(&config(4))?;
    println!("identical with 4 workers: {}", csv == parallel);
    Ok(())
}

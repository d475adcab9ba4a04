//! Seeded random sampling of states, unitaries and gauge elements.
//!
//! All samplers take a caller-owned RNG; [`rng_from_seed`] gives the
//! ChaCha-based generator the CLI uses so runs are reproducible.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::linalg::{self, c, CMat};
use crate::operator::{BundlePoint, DensityOperator, GaugeElement, Spectrum, Tolerances};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phases of the
/// triangular factor's diagonal divided out).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let qr = ginibre(rng, n, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random Hermitian matrix `(A + A†)/2` with Gaussian `A`, times `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> CMat {
    linalg::hermitian_part(&ginibre(rng, n, n)).scale(scale)
}

/// Random anti-Hermitian matrix.
pub fn random_antihermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> CMat {
    random_hermitian(rng, n, scale) * linalg::I
}

/// A random non-increasing probability vector of length `k`. When
/// `multiplicities` is given, each block gets one shared value.
pub fn random_spectrum_values<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    multiplicities: Option<&[usize]>,
) -> Vec<f64> {
    let blocks: Vec<usize> = match multiplicities {
        Some(m) => m.to_vec(),
        None => vec![1; k],
    };
    debug_assert_eq!(blocks.iter().sum::<usize>(), k);
    // Distinct block weights, kept well separated so that clustering is
    // unambiguous.
    let mut weights: Vec<f64> = (0..blocks.len())
        .map(|_| 0.2 + rng.random::<f64>())
        .collect();
    weights.sort_by(|a, b| b.total_cmp(a));
    for i in 1..weights.len() {
        if weights[i - 1] - weights[i] < 0.05 {
            weights[i] = weights[i - 1] - 0.05 - 0.05 * rng.random::<f64>();
        }
    }
    let min = weights.last().copied().unwrap_or(1.0);
    if min <= 0.05 {
        let shift = 0.1 - min;
        weights.iter_mut().for_each(|w| *w += shift);
    }
    let total: f64 = weights.iter().zip(&blocks).map(|(w, &m)| w * m as f64).sum();
    let mut values = Vec::with_capacity(k);
    for (w, &m) in weights.iter().zip(&blocks) {
        values.extend(std::iter::repeat_n(w / total, m));
    }
    values
}

pub fn random_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    multiplicities: Option<&[usize]>,
    tol: &Tolerances,
) -> Spectrum {
    Spectrum::new(random_spectrum_values(rng, k, multiplicities), tol)
        .expect("sampled spectrum is valid")
}

/// `V diag(σ, 0, …, 0) V†` with Haar `V`.
pub fn random_density_with_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    spectrum: &Spectrum,
) -> DensityOperator {
    let v = haar_unitary(rng, n);
    let mut d = vec![0.0; n];
    d[..spectrum.rank()].copy_from_slice(spectrum.values());
    DensityOperator::from_trusted(&v * linalg::diag_real(&d) * v.adjoint())
}

/// `AA†/Tr(AA†)` with Ginibre `A` (full rank with probability one).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityOperator {
    let a = ginibre(rng, n, n);
    let m = &a * a.adjoint();
    let t = linalg::trace(&m).re;
    DensityOperator::from_trusted(m.unscale(t))
}

/// `V √P(σ)` with `V` the first `k` columns of a Haar unitary.
pub fn random_bundle_point<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    spectrum: &Spectrum,
) -> BundlePoint {
    let k = spectrum.rank();
    let v = haar_unitary(rng, n);
    let mut psi = v.columns(0, k).into_owned();
    for (j, p) in spectrum.values().iter().enumerate() {
        psi.column_mut(j).scale_mut(p.sqrt());
    }
    BundlePoint::from_trusted(psi, spectrum.clone())
}

/// Haar-random element of `U(σ)`: independent Haar unitaries on each block.
pub fn random_gauge_unitary<R: Rng + ?Sized>(rng: &mut R, spectrum: &Spectrum) -> CMat {
    let k = spectrum.rank();
    let mut u = CMat::zeros(k, k);
    for r in spectrum.block_ranges() {
        let block = haar_unitary(rng, r.len());
        u.view_mut((r.start, r.start), (r.len(), r.len()))
            .copy_from(&block);
    }
    u
}

pub fn random_gauge_element<R: Rng + ?Sized>(rng: &mut R, spectrum: &Spectrum) -> GaugeElement {
    let k = spectrum.rank();
    GaugeElement::project(&random_antihermitian(rng, k, 1.0), spectrum)
}

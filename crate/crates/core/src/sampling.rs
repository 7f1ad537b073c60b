//! Seeded random generators for test data: Haar unitaries, contractions
//! and points of G.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry::{pi_map, BidiscPoint, GPoint};
use crate::numerics::{gram_schmidt_qr, CMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (unit variance split over the real and imaginary parts).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    loop {
        let g = gaussian_matrix(rng, n, n);
        let qr = gram_schmidt_qr(&g, false, 0.0);
        if qr.rank() == n {
            return qr.q;
        }
    }
}

/// Uniform point of the open disc with modulus at most `radius`.
pub fn disc_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    C64::from_polar(r, theta)
}

pub fn bidisc_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> BidiscPoint {
    BidiscPoint::new(disc_point(rng, radius), disc_point(rng, radius))
}

/// Image under the symmetrization map of a uniform point of the bidisc of the given radius.
pub fn interior_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> GPoint {
    pi_map(&bidisc_point(rng, radius))
}

/// Random contraction: Haar unitary scaled by a uniform factor in `[lo, hi]`.
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> CMatrix {
    let u = random_unitary(rng, n);
    let scale = rng.random_range(lo..=hi);
    u.scale_re(scale)
}

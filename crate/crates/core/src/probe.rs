//! Seeded random vectors for probe-based checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::seq::{Complex, GeomTail, GeomTailSeq};

/// Shape of the random vectors drawn by [`random_seq`].
#[derive(Debug, Clone, Copy)]
pub struct ProbeShape {
    pub max_prefix: usize,
    pub max_tails: usize,
    /// Upper bound on tail ratio modulus; must be < 1.
    pub max_ratio: f64,
}

impl Default for ProbeShape {
    fn default() -> Self {
        Self {
            max_prefix: 8,
            max_tails: 2,
            max_ratio: 0.8,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex {
    Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// A random point with modulus at most `max_mod`.
pub fn random_in_disc<R: Rng>(rng: &mut R, max_mod: f64) -> Complex {
    let r = max_mod * rng.random::<f64>().sqrt();
    Complex::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

pub fn random_unimodular<R: Rng>(rng: &mut R) -> Complex {
    Complex::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

pub fn random_seq<R: Rng>(rng: &mut R, shape: ProbeShape) -> GeomTailSeq {
    let len = rng.random_range(0..=shape.max_prefix);
    let prefix = (0..len).map(|_| random_complex(rng)).collect();
    let ntails = rng.random_range(0..=shape.max_tails);
    let tails = (0..ntails)
        .map(|_| GeomTail::new(random_complex(rng), random_in_disc(rng, shape.max_ratio)))
        .collect();
    GeomTailSeq::new(prefix, tails).expect("probe shape stays under the tail cap")
}

/// A random finitely supported vector of length `1..=max_len`.
pub fn random_finite<R: Rng>(rng: &mut R, max_len: usize) -> GeomTailSeq {
    let len = rng.random_range(1..=max_len.max(1));
    GeomTailSeq::from_prefix((0..len).map(|_| random_complex(rng)).collect())
        .expect("finite values")
}

/// A random nonzero vector scaled to unit norm.
pub fn random_unit_seq<R: Rng>(rng: &mut R, shape: ProbeShape) -> GeomTailSeq {
    loop {
        let v = random_seq(rng, shape);
        let n = v.norm().expect("probe ratios lie inside the disc");
        if n > 1e-3 {
            return v.scale(Complex::new(1.0 / n, 0.0));
        }
    }
}

//! Seeded random states for the verification suites. ChaCha keeps runs
//! reproducible across platforms for a fixed seed.

use crate::linalg::{hermitize, outer, CMatrix, CVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed unit vector.
pub fn unit_vector<R: Rng>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| complex_gaussian(rng));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / Complex64::new(norm, 0.0);
        }
    }
}

/// |psi><psi| for a Haar-random psi.
pub fn pure_density<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let v = unit_vector(n, rng);
    outer(&v, &v)
}

/// Full-rank random density matrix (normalized Wishart).
pub fn density_matrix<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let w = hermitize(&(&g * g.adjoint()));
    let trace = w.trace().re;
    w / Complex64::new(trace, 0.0)
}

/// Unconstrained random Hilbert-Schmidt operator.
pub fn hs_operator<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng))
}

//! Seed derivation and random operators for property runs.
//!
//! All randomness flows through [`ChaCha8Rng`] seeded from a 64-bit value.
//! Per-task seeds are derived with the SplitMix64 finalizer so that results
//! do not depend on the order in which tasks are executed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::KrausChannel;
use crate::linalg::{ComplexMatrix, ComplexVector, C64};

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `base ⊕ hash(parts)`, where the hash chains SplitMix64 over `parts`.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let h = parts
        .iter()
        .fold(0x6A09_E667_F3BC_C908_u64, |acc, &p| splitmix64(acc ^ p));
    base ^ h
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let data = (0..d * d).map(|_| gaussian_c64(rng)).collect();
    ComplexMatrix::new(d, d, data).expect("positive dimension")
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexVector {
    let data = (0..d).map(|_| gaussian_c64(rng)).collect();
    ComplexVector::new(data)
        .and_then(|v| v.normalized())
        .expect("gaussian vector is nonzero")
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix, with
/// the phases of R's diagonal absorbed into Q.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = random_matrix(rng, d).to_nalgebra();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    ComplexMatrix::from_nalgebra(&q)
}

/// Random full-rank density matrix `G G† / Tr(G G†)`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = random_matrix(rng, d);
    let m = g.matmul(&g.adjoint()).expect("square");
    let tr = m.trace();
    m.scale(C64::new(1.0, 0.0) / tr)
        .hermitian_part()
        .expect("square")
}

/// Random CPTP map with `k` Kraus operators, cut from the first `d` columns
/// of a Haar unitary on `C^{dk}`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> KrausChannel {
    let u = haar_unitary(rng, d * k);
    let ops = (0..k)
        .map(|j| {
            let data = (0..d)
                .flat_map(|a| (0..d).map(move |b| (a, b)))
                .map(|(a, b)| u[(j * d + a, b)])
                .collect();
            ComplexMatrix::new(d, d, data).expect("positive dimension")
        })
        .collect();
    KrausChannel::new(ops).expect("isometry blocks are complete")
}

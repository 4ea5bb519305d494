//! Seeded random matrix sampling.
//!
//! All sampling is deterministic given a 64-bit seed; sample `i` of a batch
//! uses the substream seed `seed ^ i` so batches can be evaluated in
//! parallel without affecting results.

use crate::numerics::{CMat, C64};
use faer::Mat;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Substream rng for sample `index` of a batch.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index)
}

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Matrix with independent standard complex Gaussian entries.
pub fn gaussian_matrix(d: usize, rng: &mut impl Rng) -> CMat {
    let entries: Vec<C64> = (0..d * d)
        .map(|_| C64::new(normal(rng), normal(rng)))
        .collect();
    Mat::from_fn(d, d, |i, j| entries[i * d + j])
}

/// GUE-style Hermitian matrix `(G + G†)/2`.
pub fn gaussian_hermitian(d: usize, rng: &mut impl Rng) -> CMat {
    let g = gaussian_matrix(d, rng);
    crate::numerics::herm_part(&g)
}

/// Haar-ish random unit vector (normalized complex Gaussian).
pub fn random_unit_vector(d: usize, rng: &mut impl Rng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| C64::new(normal(rng), normal(rng))).collect();
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.iter().map(|z| z / n).collect();
        }
    }
}

/// Rank-one projector |ψ⟩⟨ψ| for a random unit vector ψ.
pub fn random_projector(d: usize, rng: &mut impl Rng) -> CMat {
    let psi = random_unit_vector(d, rng);
    Mat::from_fn(d, d, |i, j| psi[i] * psi[j].conj())
}

/// Random full-rank density matrix `(G G† + eps)/tr`.
pub fn random_full_rank_state(d: usize, rng: &mut impl Rng) -> CMat {
    let g = gaussian_matrix(d, rng);
    let mut r = &g * g.adjoint();
    for i in 0..d {
        r[(i, i)] += C64::new(0.1, 0.0);
    }
    let t = crate::numerics::trace(&r).re;
    crate::numerics::scale(&r, C64::new(1.0 / t, 0.0))
}

//! Multi-start maximization of convex functionals over pure states.
//!
//! The weighted 1→2 norms and the exact trace-norm mixing curve both reduce
//! to maximizing a convex function F(|ψ⟩⟨ψ|) over the unit sphere. For such
//! F the linearization maximizer is the top eigenvector of the (sub)gradient
//! matrix, so a Frank-Wolfe style iteration
//! `ψ ← top eigenvector of ∇F(ψψ*)` increases F monotonically. Restarts use
//! deterministic per-restart seeds, so results are independent of the worker
//! count.

use crate::numerics::{eig_hermitian, CMat, C64};
use faer::Mat;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct AscentOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iters: 200,
            tol: 1e-12,
            seed: 0x5348_4552, // "SHER"
        }
    }
}

#[derive(Debug, Clone)]
pub struct PureStateMax {
    pub value: f64,
    pub psi: Vec<C64>,
}

fn projector(psi: &[C64]) -> CMat {
    let d = psi.len();
    Mat::from_fn(d, d, |i, j| psi[i] * psi[j].conj())
}

fn top_eigenvector(r: &CMat) -> Option<Vec<C64>> {
    let eig = eig_hermitian(r, 1e-6).ok()?;
    let d = r.nrows();
    Some((0..d).map(|i| eig.eigenvectors[(i, d - 1)]).collect())
}

/// Maximize `F(|ψ⟩⟨ψ|)` over unit vectors ψ. The oracle returns the value
/// and a Hermitian gradient matrix R with `dF = tr(R dP)` at P = ψψ*.
pub fn maximize_over_pure_states<F>(dim: usize, opts: &AscentOptions, oracle: F) -> PureStateMax
where
    F: Fn(&CMat) -> (f64, CMat) + Sync,
{
    let run_restart = |r: usize| -> PureStateMax {
        let mut psi: Vec<C64> = if r < dim {
            (0..dim)
                .map(|i| C64::new(if i == r { 1.0 } else { 0.0 }, 0.0))
                .collect()
        } else {
            let mut rng = crate::sample::substream(opts.seed, r as u64);
            crate::sample::random_unit_vector(dim, &mut rng)
        };
        let (mut value, mut grad) = oracle(&projector(&psi));
        for _ in 0..opts.max_iters {
            let Some(candidate) = top_eigenvector(&grad) else {
                break;
            };
            let (v_new, g_new) = oracle(&projector(&candidate));
            if v_new <= value + opts.tol * value.abs().max(1e-300) {
                if v_new > value {
                    value = v_new;
                    psi = candidate;
                }
                break;
            }
            value = v_new;
            grad = g_new;
            psi = candidate;
        }
        PureStateMax { value, psi }
    };

    let results: Vec<PureStateMax> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(run_restart)
        .collect();
    // deterministic reduction: best value, earliest restart wins ties
    results
        .into_iter()
        .reduce(|best, cur| if cur.value > best.value { cur } else { best })
        .expect("at least one restart")
}

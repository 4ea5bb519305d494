//! Time evolution S_t = e^{tL} and its weighted operator norms.
//!
//! For reversible generators everything routes through the spectral
//! decomposition of the symmetrized superoperator L̃ = Γ_ρ^{1/2} L Γ_ρ^{−1/2},
//! which is Hermitian and negative semidefinite with a single null mode.

use crate::lindblad::{
    self, gamma_superop, LindbladError, LindbladGenerator, Picture,
};
use crate::lp::{FullRankState, LpError, Observable};
use crate::numerics::{
    self, devec, eig_hermitian, herm_part, identity, max_abs, op_norm, sign_hermitian,
    trace_norm, vec_op, CMat, C64, HermitianEigensystem,
};
use crate::optimize::{maximize_over_pure_states, AscentOptions};
use faer::Mat;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SemigroupError {
    #[error("generator is not reversible with respect to the given state (residual {residual:.3e})")]
    NotReversible { residual: f64 },
    #[error("negative evolution time {0}")]
    NegativeTime(f64),
    #[error("lindblad: {0}")]
    Lindblad(#[from] LindbladError),
    #[error("numerics: {0}")]
    Numerics(#[from] numerics::NumericsError),
    #[error("lp: {0}")]
    Lp(#[from] LpError),
}

const DB_TOL: f64 = 1e-8;

/// Spectrum of −L̃ in ascending order (λ₀ = 0 ≤ λ₁ ≤ …) with step-function
/// counting data.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub gap: f64,
}

impl SpectralReport {
    /// N(s) = #{ i : λ_i ≤ s }, with a small forgiveness band for the
    /// numerically degenerate levels.
    pub fn counting(&self, s: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l <= s + 1e-9).count()
    }

    /// ζ(t) = Σ_i e^{−t λ_i}.
    pub fn zeta(&self, t: f64) -> f64 {
        self.eigenvalues.iter().map(|l| (-t * l).exp()).sum()
    }
}

/// A reversible primitive semigroup with cached spectral data.
pub struct Semigroup {
    generator: LindbladGenerator,
    rho: FullRankState,
    g_half: CMat,
    g_neg_half: CMat,
    sym_eig: HermitianEigensystem,
    unital: bool,
}

/// vec(𝟙) vec(ρ)†, the superoperator of f ↦ tr(ρf)·𝟙.
fn mean_superop(rho: &FullRankState) -> CMat {
    let d = rho.dim();
    let one = vec_op(&identity(d));
    let r = vec_op(rho.matrix());
    &one * r.adjoint()
}

impl Semigroup {
    pub fn new(generator: LindbladGenerator, rho: FullRankState) -> Result<Self, SemigroupError> {
        let db = lindblad::check_detailed_balance(&generator, &rho, DB_TOL);
        if !db.reversible {
            return Err(SemigroupError::NotReversible {
                residual: db.residual,
            });
        }
        let d = generator.dim();
        let heis = generator.to_superoperator(Picture::Heisenberg).matrix;
        let unital = max_abs(&(rho.matrix() - &numerics::scale(&identity(d), C64::new(1.0 / d as f64, 0.0)))) < 1e-12;
        let sym = if unital {
            heis
        } else {
            &gamma_superop(&rho, 0.5) * &heis * &gamma_superop(&rho, -0.5)
        };
        let sym_eig = eig_hermitian(&herm_part(&sym), 1e-6)?;
        Ok(Self {
            generator,
            rho: rho.clone(),
            g_half: gamma_superop(&rho, 0.5),
            g_neg_half: gamma_superop(&rho, -0.5),
            sym_eig,
            unital,
        })
    }

    /// Builds the semigroup at the stationary state of the generator.
    pub fn from_generator(generator: LindbladGenerator) -> Result<Self, SemigroupError> {
        let rho = generator.stationary_state()?;
        Self::new(generator, rho)
    }

    pub fn generator(&self) -> &LindbladGenerator {
        &self.generator
    }

    pub fn rho(&self) -> &FullRankState {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    /// Matrix of e^{tL} in the Heisenberg picture,
    /// `Γ^{−1/2} V e^{tΛ} V† Γ^{1/2}` from the cached spectral data.
    pub fn heis_exp(&self, t: f64) -> Result<CMat, SemigroupError> {
        if t < 0.0 {
            return Err(SemigroupError::NegativeTime(t));
        }
        let core = self.sym_eig.apply_fn(|l| (t * l).exp());
        if self.unital {
            Ok(core)
        } else {
            Ok(&self.g_neg_half * &core * &self.g_half)
        }
    }

    pub fn evolve(&self, f: &Observable, t: f64) -> Result<Observable, SemigroupError> {
        let m = self.heis_exp(t)?;
        let d = self.dim();
        Ok(Observable::from_herm_part(&devec(
            &(&m * &vec_op(f.matrix())),
            d,
        )))
    }

    /// Schrödinger-picture evolution of a density-matrix-like input, via the
    /// Hilbert-Schmidt adjoint of the Heisenberg matrix.
    pub fn evolve_state(&self, sigma: &CMat, t: f64) -> Result<CMat, SemigroupError> {
        let m = self.heis_exp(t)?;
        let d = self.dim();
        Ok(devec(&(m.adjoint() * &vec_op(sigma)), d))
    }

    pub fn spectral_report(&self) -> SpectralReport {
        let mut evs: Vec<f64> = self
            .sym_eig
            .eigenvalues
            .iter()
            .rev()
            .map(|l| {
                let v = -l;
                if v.abs() <= 1e-9 {
                    0.0
                } else {
                    v
                }
            })
            .collect();
        evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let gap = evs[1];
        SpectralReport {
            eigenvalues: evs,
            gap,
        }
    }

    /// Spectral gap λ = second-smallest eigenvalue of −L̃.
    pub fn spectral_gap(&self) -> f64 {
        self.spectral_report().gap
    }

    /// Variational gap min_f ℰ(f)/Var_ρ(f) by projected gradient descent on
    /// the symmetrized Rayleigh quotient from random starts; cross-checks the
    /// spectral value.
    pub fn variational_gap(&self, n_starts: usize, seed: u64) -> f64 {
        let n = self.dim() * self.dim();
        let a = numerics::scale(&self.sym_eig.reconstruct(), C64::new(-1.0, 0.0));
        // π = Γ^{1/2} vec(𝟙) spans the null mode; Var = ||g||² − |π†g|²
        let pi = &self.g_half * &vec_op(&identity(self.dim()));
        let quotient = |g: &CMat| -> (f64, CMat) {
            let ag = &a * g;
            let num = numerics::hs_inner(g, &ag).re;
            let overlap = (pi.adjoint() * g)[(0, 0)];
            let den = numerics::hs_inner(g, g).re - overlap.norm_sqr();
            let r = num / den;
            // ∇R = 2(Ag − R·Bg)/den with Bg = g − π(π†g)
            let bg = g - &numerics::scale(&pi, overlap);
            let grad = numerics::scale(&(&ag - &numerics::scale(&bg, C64::new(r, 0.0))), C64::new(2.0 / den, 0.0));
            (r, grad)
        };
        let mut best = f64::INFINITY;
        for s in 0..n_starts {
            let mut rng = crate::sample::substream(seed, s as u64);
            let samples: Vec<C64> = (0..n)
                .map(|_| {
                    let re: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
                    let im: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
                    C64::new(re, im)
                })
                .collect();
            let mut g = Mat::from_fn(n, 1, |i, _| samples[i]);
            // project out the null mode so Var stays bounded away from zero
            let overlap = (pi.adjoint() * &g)[(0, 0)];
            g = &g - &numerics::scale(&pi, overlap);
            let mut step = 0.5;
            let (mut r, mut grad) = quotient(&g);
            for _ in 0..500 {
                let cand = &g - &numerics::scale(&grad, C64::new(step, 0.0));
                let (rc, gc) = quotient(&cand);
                if rc < r {
                    g = cand;
                    r = rc;
                    grad = gc;
                    step *= 1.2;
                } else {
                    step *= 0.5;
                    if step < 1e-14 {
                        break;
                    }
                }
            }
            best = best.min(r);
        }
        best
    }

    /// `||S_t − ρ||_{2→2,ρ}` as the largest singular value of the
    /// symmetrized deviation; equals e^{−tλ} for reversible generators.
    pub fn norm_2to2_deviation(&self, t: f64) -> Result<f64, SemigroupError> {
        let m = self.heis_exp(t)?;
        let dev = &m - &mean_superop(&self.rho);
        Ok(op_norm(&(&self.g_half * &dev * &self.g_neg_half)))
    }

    /// `sup_{||f||_{1,ρ}=1} ||(S_t − deviation·ρ)(f)||_{2,ρ}`.
    ///
    /// The Hermitian extreme points of the weighted trace-norm ball are
    /// ±Γ_ρ^{−1}(|ψ⟩⟨ψ|), so the squared norm is the maximum of the convex
    /// quadratic `vec(P)† B†B vec(P)` over pure-state projectors P, with
    /// `B = Γ^{1/2} (M_t − deviation·vec(𝟙)vec(ρ)†) Γ^{−1}`.
    pub fn norm_1to2(&self, t: f64, deviation: bool) -> Result<f64, SemigroupError> {
        let opts = AscentOptions::default();
        Ok(self.norm_1to2_with(t, deviation, &opts)?)
    }

    pub fn norm_1to2_with(
        &self,
        t: f64,
        deviation: bool,
        opts: &AscentOptions,
    ) -> Result<f64, SemigroupError> {
        let d = self.dim();
        let mut m = self.heis_exp(t)?;
        if deviation {
            m = &m - &mean_superop(&self.rho);
        }
        let b = &self.g_half * &m * &gamma_superop(&self.rho, -1.0);
        let q = b.adjoint() * &b;
        let oracle = |p: &CMat| {
            let v = &q * &vec_op(p);
            let value = numerics::hs_inner(&vec_op(p), &v).re;
            (value, herm_part(&devec(&v, d)))
        };
        let res = maximize_over_pure_states(d, opts, oracle);
        Ok(res.value.max(0.0).sqrt())
    }

    /// Equals `norm_1to2(t, deviation=true)` by duality and reversibility.
    pub fn norm_2toinf_deviation(&self, t: f64) -> Result<f64, SemigroupError> {
        self.norm_1to2(t, true)
    }

    /// Independent estimate of the 2→∞ deviation norm: sup over rank-one
    /// observables of `||S_t(f) − tr(ρf)𝟙||_op / ||f||_{2,ρ}`. Validation
    /// aid for `norm_2toinf_deviation`; a lower bound of the true value.
    pub fn norm_2toinf_rank_one_probe(
        &self,
        t: f64,
        n_samples: usize,
        seed: u64,
    ) -> Result<f64, SemigroupError> {
        let d = self.dim();
        let m = self.heis_exp(t)?;
        let dev = &m - &mean_superop(&self.rho);
        let mut best = 0.0f64;
        let mut rng = crate::sample::rng(seed);
        for _ in 0..n_samples {
            let f = crate::sample::random_projector(d, &mut rng);
            let obs = Observable::from_herm_part(&f);
            let num = op_norm(&devec(&(&dev * &vec_op(obs.matrix())), d));
            let den = crate::lp::weighted_norm(&obs, &self.rho, 2.0)?;
            if den > 1e-14 {
                best = best.max(num / den);
            }
        }
        Ok(best)
    }

    /// Exact mixing curve ξ(t) = sup over pure inputs ψ of
    /// `||S*_t(|ψ⟩⟨ψ|) − ρ||_1`, by Frank-Wolfe over pure states with
    /// subgradient `S_t(sign(S*_t(P) − ρ))`.
    pub fn xi_exact(&self, t: f64) -> Result<f64, SemigroupError> {
        let d = self.dim();
        let m = self.heis_exp(t)?;
        let m_adj = m.adjoint().to_owned();
        let oracle = |p: &CMat| {
            let out = &devec(&(&m_adj * &vec_op(p)), d) - self.rho.matrix();
            let value = trace_norm(&out);
            let sgn = sign_hermitian(&herm_part(&out)).unwrap_or_else(|_| identity(d));
            let grad = devec(&(&m * &vec_op(&sgn)), d);
            (value, herm_part(&grad))
        };
        let res = maximize_over_pure_states(d, &AscentOptions::default(), oracle);
        Ok(res.value)
    }
}

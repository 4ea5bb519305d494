//! Non-commutative L_p(ρ) spaces.
//!
//! Norms are the symmetric (KMS) weighted norms
//! `||f||_{p,ρ} = ( tr|ρ^{1/2p} f ρ^{1/2p}|^p )^{1/p}` with the inner product
//! `⟨f,g⟩_ρ = tr{ρ^{1/2} f ρ^{1/2} g}`. The p → ∞ limit is the operator
//! norm.

use crate::numerics::{
    self, eig_hermitian, herm_residual, scale, trace, CMat,
    HermitianEigensystem, C64, EPS_RANK, HERM_TOL,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("invalid exponent p = {0}; need p >= 1")]
    InvalidExponent(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("observable is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("state error: {0}")]
    State(#[from] numerics::NumericsError),
    #[error("state trace {0} is not 1")]
    TraceNotOne(f64),
}

/// Positive-definite, trace-one reference state with cached
/// eigendecomposition and the fractional powers used throughout.
#[derive(Debug, Clone)]
pub struct FullRankState {
    rho: CMat,
    eig: HermitianEigensystem,
    sqrt: CMat,
    inv_sqrt: CMat,
    quarter: CMat,
    inv_quarter: CMat,
}

impl FullRankState {
    pub fn new(rho: CMat) -> Result<Self, LpError> {
        let res = herm_residual(&rho);
        if res > HERM_TOL {
            return Err(LpError::NotHermitian(res));
        }
        let t = trace(&rho).re;
        if (t - 1.0).abs() > 1e-10 {
            return Err(LpError::TraceNotOne(t));
        }
        let eig = eig_hermitian(&rho, HERM_TOL)?;
        if eig.min_eigenvalue() <= EPS_RANK {
            return Err(LpError::State(
                numerics::NumericsError::NotPositiveDefinite {
                    min_eig: eig.min_eigenvalue(),
                },
            ));
        }
        let sqrt = eig.apply_fn(|x| x.sqrt());
        let inv_sqrt = eig.apply_fn(|x| 1.0 / x.sqrt());
        let quarter = eig.apply_fn(|x| x.powf(0.25));
        let inv_quarter = eig.apply_fn(|x| x.powf(-0.25));
        Ok(Self {
            rho,
            eig,
            sqrt,
            inv_sqrt,
            quarter,
            inv_quarter,
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let rho = scale(&numerics::identity(d), C64::new(1.0 / d as f64, 0.0));
        Self::new(rho).expect("maximally mixed state is always valid")
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self, LpError> {
        Self::new(numerics::from_real_diag(p))
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.rho
    }

    pub fn eigensystem(&self) -> &HermitianEigensystem {
        &self.eig
    }

    /// ρ^s for arbitrary real s.
    pub fn power(&self, s: f64) -> CMat {
        match s {
            s if s == 0.5 => self.sqrt.clone(),
            s if s == -0.5 => self.inv_sqrt.clone(),
            s if s == 0.25 => self.quarter.clone(),
            s if s == -0.25 => self.inv_quarter.clone(),
            _ => self.eig.apply_fn(|x| x.powf(s)),
        }
    }

    /// ||ρ^{-1}||_op = 1/min eigenvalue.
    pub fn inv_op_norm(&self) -> f64 {
        1.0 / self.eig.min_eigenvalue()
    }
}

/// Hermitian observable.
#[derive(Debug, Clone)]
pub struct Observable {
    mat: CMat,
}

impl Observable {
    pub fn new(mat: CMat) -> Result<Self, LpError> {
        let res = herm_residual(&mat);
        if res > HERM_TOL {
            return Err(LpError::NotHermitian(res));
        }
        Ok(Self {
            mat: numerics::herm_part(&mat),
        })
    }

    /// Hermitize unconditionally; used for matrices that are Hermitian up to
    /// roundoff by construction.
    pub fn from_herm_part(mat: &CMat) -> Self {
        Self {
            mat: numerics::herm_part(mat),
        }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            mat: numerics::identity(d),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }
}

fn check_dims(a: usize, b: usize) -> Result<(), LpError> {
    if a != b {
        Err(LpError::DimensionMismatch(a, b))
    } else {
        Ok(())
    }
}

/// `( tr|ρ^{1/2p} f ρ^{1/2p}|^p )^{1/p}`; p = ∞ gives the operator norm.
pub fn weighted_norm(f: &Observable, rho: &FullRankState, p: f64) -> Result<f64, LpError> {
    check_dims(f.dim(), rho.dim())?;
    if p.is_infinite() && p > 0.0 {
        return Ok(numerics::op_norm(f.matrix()));
    }
    if !(p >= 1.0) {
        return Err(LpError::InvalidExponent(p));
    }
    let w = rho.power(1.0 / (2.0 * p));
    let m = &w * f.matrix() * &w;
    let eig = eig_hermitian(&m, 1e-8)?;
    Ok(eig
        .eigenvalues
        .iter()
        .map(|x| x.abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p))
}

/// `⟨f,g⟩_ρ = tr{ρ^{1/2} f ρ^{1/2} g}` (real for Hermitian arguments).
pub fn weighted_inner(f: &Observable, g: &Observable, rho: &FullRankState) -> Result<f64, LpError> {
    check_dims(f.dim(), g.dim())?;
    check_dims(f.dim(), rho.dim())?;
    let s = rho.power(0.5);
    let m = &s * f.matrix() * &s * g.matrix();
    Ok(trace(&m).re)
}

/// `ρ(f) = tr(ρ f)·1`.
pub fn mean_projection(f: &Observable, rho: &FullRankState) -> Observable {
    let mean = trace(&(rho.matrix() * f.matrix())).re;
    Observable {
        mat: scale(&numerics::identity(f.dim()), C64::new(mean, 0.0)),
    }
}

/// `tr(ρ f)`.
pub fn mean_value(f: &Observable, rho: &FullRankState) -> f64 {
    trace(&(rho.matrix() * f.matrix())).re
}

/// `Var_ρ(f) = ⟨f − ρ(f), f − ρ(f)⟩_ρ`.
pub fn variance(f: &Observable, rho: &FullRankState) -> Result<f64, LpError> {
    let mean = mean_value(f, rho);
    let dev = Observable {
        mat: f.matrix() - scale(&numerics::identity(f.dim()), C64::new(mean, 0.0)),
    };
    Ok(weighted_inner(&dev, &dev, rho)?.max(0.0))
}

/// `Γ_ρ^s(f) = ρ^{s/2} f ρ^{s/2}`.
pub fn gamma_map(f: &Observable, rho: &FullRankState, s: f64) -> CMat {
    let w = rho.power(s / 2.0);
    &w * f.matrix() * &w
}

/// ±Γ_ρ^{-1}(|ψ⟩⟨ψ|) are the Hermitian extreme points of the ||·||_{1,ρ}
/// unit ball; this builds the observable for a given ψ.
pub fn rank_one_extreme(psi: &[C64], rho: &FullRankState) -> Observable {
    let d = psi.len();
    let proj = faer::Mat::from_fn(d, d, |i, j| psi[i] * psi[j].conj());
    let inv_sqrt = rho.power(-0.5);
    Observable::from_herm_part(&(&inv_sqrt * &proj * &inv_sqrt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{identity, pauli};

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    fn half() -> FullRankState {
        FullRankState::maximally_mixed(2)
    }

    fn skew() -> FullRankState {
        FullRankState::from_diagonal(&[0.75, 0.25]).unwrap()
    }

    #[test]
    fn norm_of_identity_is_one() {
        let rho = skew();
        let one = Observable::identity(2);
        for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            close(weighted_norm(&one, &rho, p).unwrap(), 1.0, 1e-12);
        }
    }

    #[test]
    fn norm_examples() {
        let sz = Observable::new(pauli(3)).unwrap();
        close(weighted_norm(&sz, &half(), 2.0).unwrap(), 1.0, 1e-12);
        // tr|diag(3/4, -1/4)| = 1
        close(weighted_norm(&sz, &skew(), 1.0).unwrap(), 1.0, 1e-12);
        assert!(matches!(
            weighted_norm(&sz, &half(), 0.5),
            Err(LpError::InvalidExponent(_))
        ));
    }

    #[test]
    fn inner_examples() {
        let one = Observable::identity(2);
        close(weighted_inner(&one, &one, &skew()).unwrap(), 1.0, 1e-12);
        let sx = Observable::new(pauli(1)).unwrap();
        let sz = Observable::new(pauli(3)).unwrap();
        close(weighted_inner(&sx, &sz, &half()).unwrap(), 0.0, 1e-12);
        close(weighted_inner(&sz, &sz, &skew()).unwrap(), 1.0, 1e-12);
        // consistency with the 2-norm
        let n2 = weighted_norm(&sz, &skew(), 2.0).unwrap();
        close(weighted_inner(&sz, &sz, &skew()).unwrap(), n2 * n2, 1e-12);
    }

    #[test]
    fn mean_projection_examples() {
        let rho = skew();
        let one = Observable::identity(2);
        assert!(max_abs(&(mean_projection(&one, &rho).matrix() - &identity(2))) < 1e-12);
        let sz = Observable::new(pauli(3)).unwrap();
        close(mean_value(&sz, &half()), 0.0, 1e-12);
        let proj = mean_projection(&sz, &rho);
        close(proj.matrix()[(0, 0)].re, 0.5, 1e-12);
        // idempotent
        let again = mean_projection(&proj, &rho);
        assert!(max_abs(&(again.matrix() - proj.matrix())) < 1e-12);
    }

    #[test]
    fn variance_examples() {
        let one = Observable::identity(2);
        close(variance(&one, &skew()).unwrap(), 0.0, 1e-12);
        let sz = Observable::new(pauli(3)).unwrap();
        close(variance(&sz, &half()).unwrap(), 1.0, 1e-12);
        close(variance(&sz, &skew()).unwrap(), 0.75, 1e-12);
    }

    #[test]
    fn variance_norm_consistency() {
        let mut rng = crate::sample::rng(21);
        for _ in 0..50 {
            let d = 3;
            let rho = FullRankState::new(crate::sample::random_full_rank_state(d, &mut rng)).unwrap();
            let f = Observable::from_herm_part(&crate::sample::gaussian_hermitian(d, &mut rng));
            let var = variance(&f, &rho).unwrap();
            let n2 = weighted_norm(&f, &rho, 2.0).unwrap();
            let mean = mean_value(&f, &rho);
            close(var, n2 * n2 - mean * mean, 1e-10);
        }
    }

    #[test]
    fn gamma_map_examples() {
        let sx = Observable::new(pauli(1)).unwrap();
        let rho = skew();
        assert!(max_abs(&(&gamma_map(&sx, &rho, 0.0) - sx.matrix())) < 1e-12);
        let g = gamma_map(&sx, &half(), 1.0);
        assert!(max_abs(&(&g - &scale(&pauli(1), C64::new(0.5, 0.0)))) < 1e-12);
        // 2x2 hand oracle: off-diagonals sqrt(3)/4
        let g2 = gamma_map(&sx, &rho, 1.0);
        close(g2[(0, 1)].re, 3.0f64.sqrt() / 4.0, 1e-12);
        close(g2[(1, 0)].re, 3.0f64.sqrt() / 4.0, 1e-12);
        // Γ^s ∘ Γ^{-s} = id
        let f = Observable::from_herm_part(&gamma_map(&sx, &rho, 0.7));
        let back = gamma_map(&f, &rho, -0.7);
        assert!(max_abs(&(&back - sx.matrix())) < 1e-9);
    }

    #[test]
    fn p_monotonicity_random() {
        let mut rng = crate::sample::rng(33);
        for _ in 0..100 {
            let d = 2 + (rng.next_u32() % 3) as usize;
            let rho = FullRankState::new(crate::sample::random_full_rank_state(d, &mut rng)).unwrap();
            let f = Observable::from_herm_part(&crate::sample::gaussian_hermitian(d, &mut rng));
            let ps = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
            let ns: Vec<f64> = ps
                .iter()
                .map(|&p| weighted_norm(&f, &rho, p).unwrap())
                .collect();
            for w in ns.windows(2) {
                assert!(w[0] <= w[1] + 1e-9, "{:?}", ns);
            }
        }
    }

    #[test]
    fn holder_chain_random() {
        let mut rng = crate::sample::rng(34);
        let nu = 3.0;
        let q = 2.0 * nu / (nu - 2.0);
        for _ in 0..200 {
            let d = 2 + (rng.next_u32() % 3) as usize;
            let rho = FullRankState::new(crate::sample::random_full_rank_state(d, &mut rng)).unwrap();
            let f = Observable::from_herm_part(&crate::sample::gaussian_hermitian(d, &mut rng));
            let lhs = weighted_norm(&f, &rho, 2.0)
                .unwrap()
                .powf(2.0 * (1.0 + 2.0 / nu));
            let rhs = weighted_norm(&f, &rho, q).unwrap().powi(2)
                * weighted_norm(&f, &rho, 1.0).unwrap().powf(4.0 / nu);
            assert!(lhs <= rhs + 1e-9, "{lhs} vs {rhs}");
        }
    }

    use crate::numerics::max_abs;
    use rand::RngCore;
}

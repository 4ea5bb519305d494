//! Nash inequality certificates: sampling-based verification, empirical
//! constant fitting, and the bound converters (ultracontractivity, converse,
//! Log-Sobolev, spectral counting, eigenvalue and mixing-time bounds).
//!
//! Sampling cannot prove an inequality for all observables, only falsify it;
//! reports therefore mean "passed (sampled)".

use crate::lindblad::{self, dirichlet_form, LindbladError, LindbladGenerator};
use crate::lp::{self, FullRankState, LpError, Observable};
use crate::numerics::{devec, eig_hermitian, herm_part, identity, scale, C64};
use crate::semigroup::{Semigroup, SemigroupError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NashError {
    #[error("observable is degenerate: both sides of the inequality vanish")]
    DegenerateObservable,
    #[error("time {0} is not admissible here")]
    InvalidTime(f64),
    #[error("epsilon {0} must lie in (0,1)")]
    InvalidEpsilon(f64),
    #[error("t = {t} exceeds the certificate cutoff T = {t_cutoff}")]
    BeyondCutoff { t: f64, t_cutoff: f64 },
    #[error("s = {s} is below the admissible threshold 1/T = {threshold}")]
    BelowCutoff { s: f64, threshold: f64 },
    #[error("certificate violates the cutoff window: νC/4 = {nu_c_over_4} > T = {t_cutoff}")]
    CutoffViolation { nu_c_over_4: f64, t_cutoff: f64 },
    #[error("type II certificate is missing its cutoff T")]
    MissingCutoff,
    #[error("exponent ν = {0} is invalid for this inequality")]
    InvalidExponent(f64),
    #[error("generator is not unital")]
    NotUnital,
    #[error("lindblad: {0}")]
    Lindblad(#[from] LindbladError),
    #[error("lp: {0}")]
    Lp(#[from] LpError),
    #[error("semigroup: {0}")]
    Semigroup(#[from] SemigroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NashKind {
    I,
    II,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NashCertificate {
    pub kind: NashKind,
    pub nu: f64,
    pub c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_cutoff: Option<f64>,
}

impl NashCertificate {
    pub fn validate(&self) -> Result<(), NashError> {
        if !(self.nu > 0.0) || !(self.c > 0.0) {
            return Err(NashError::InvalidExponent(self.nu));
        }
        match (self.kind, self.t_cutoff) {
            (NashKind::II, None) => Err(NashError::MissingCutoff),
            (NashKind::II, Some(t)) if !(t > 0.0) => Err(NashError::InvalidTime(t)),
            _ => Ok(()),
        }
    }
}

/// Both-sides-vanish guard; samples below it are treated as ratio 0 (the
/// inequality holds there by continuity).
const RATIO_GUARD: f64 = 1e-14;

/// `Var_ρ(f)^{1+2/ν} / (C · ℰ(f) · ||f||_{1,ρ}^{4/ν})`; ≤ 1 iff the type I
/// inequality holds at f.
pub fn nash_ratio_i(
    gen: &LindbladGenerator,
    rho: &FullRankState,
    f: &Observable,
    nu: f64,
    c: f64,
) -> Result<f64, NashError> {
    let var = lp::variance(f, rho)?;
    let energy = dirichlet_form(gen, f, rho)?;
    if var <= RATIO_GUARD || energy <= RATIO_GUARD {
        return Ok(0.0);
    }
    let n1 = lp::weighted_norm(f, rho, 1.0)?;
    Ok(var.powf(1.0 + 2.0 / nu) / (c * energy * n1.powf(4.0 / nu)))
}

/// `||f||_{2,ρ}^{2+4/ν} / (C · (ℰ(f) + ||f||²_{2,ρ}/T) · ||f||_{1,ρ}^{4/ν})`.
pub fn nash_ratio_ii(
    gen: &LindbladGenerator,
    rho: &FullRankState,
    f: &Observable,
    nu: f64,
    c: f64,
    t_cutoff: f64,
) -> Result<f64, NashError> {
    let n2_sq = lp::weighted_norm(f, rho, 2.0)?.powi(2);
    if n2_sq <= RATIO_GUARD {
        return Ok(0.0);
    }
    let energy = dirichlet_form(gen, f, rho)?.max(0.0);
    let n1 = lp::weighted_norm(f, rho, 1.0)?;
    Ok(n2_sq.powf(1.0 + 2.0 / nu) / (c * (energy + n2_sq / t_cutoff) * n1.powf(4.0 / nu)))
}

pub fn nash_ratio(
    gen: &LindbladGenerator,
    rho: &FullRankState,
    f: &Observable,
    cert: &NashCertificate,
) -> Result<f64, NashError> {
    cert.validate()?;
    match cert.kind {
        NashKind::I => nash_ratio_i(gen, rho, f, cert.nu, cert.c),
        NashKind::II => nash_ratio_ii(gen, rho, f, cert.nu, cert.c, cert.t_cutoff.unwrap()),
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub n_samples: usize,
    pub worst_ratio: f64,
    pub witness: Observable,
    pub passed: bool,
}

const PASS_SLACK: f64 = 1e-9;

/// Eigen-observables of the symmetrized generator: `Γ_ρ^{−1/2}` applied to
/// the (devectorized) eigenvectors of L̃. The binding family for the ring.
fn eigen_observables(gen: &LindbladGenerator, rho: &FullRankState) -> Vec<Observable> {
    let d = gen.dim();
    let sym = lindblad::symmetrize(gen, rho).matrix;
    let Ok(eig) = eig_hermitian(&herm_part(&sym), 1e-6) else {
        return Vec::new();
    };
    let w = rho.power(-0.25);
    (0..d * d)
        .map(|j| {
            let v = faer::Mat::from_fn(d * d, 1, |k, _| eig.eigenvectors[(k, j)]);
            let k = devec(&v, d);
            Observable::from_herm_part(&(&w * &k * &w))
        })
        .collect()
}

fn draw_sample(
    d: usize,
    index: u64,
    seed: u64,
    eigen_family: &[Observable],
    rho: &FullRankState,
) -> Observable {
    let mut rng = crate::sample::substream(seed, index);
    // 70% Gaussian, 15% rank-one extreme points, 15% spectral modes of L̃
    match index % 20 {
        0..=13 => Observable::from_herm_part(&crate::sample::gaussian_hermitian(d, &mut rng)),
        14..=16 => {
            let psi = crate::sample::random_unit_vector(d, &mut rng);
            lp::rank_one_extreme(&psi, rho)
        }
        _ => {
            if eigen_family.is_empty() {
                Observable::from_herm_part(&crate::sample::gaussian_hermitian(d, &mut rng))
            } else {
                use rand::Rng;
                let j = rng.gen_range(0..eigen_family.len());
                eigen_family[j].clone()
            }
        }
    }
}

fn worst_sample<R>(
    gen: &LindbladGenerator,
    rho: &FullRankState,
    ratio: &R,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, Observable), NashError>
where
    R: Fn(&Observable) -> Result<f64, NashError> + Sync,
{
    let d = gen.dim();
    let eigen_family = eigen_observables(gen, rho);
    let sampled: Result<Vec<(f64, Observable)>, NashError> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let f = draw_sample(d, i, seed, &eigen_family, rho);
            Ok((ratio(&f)?, f))
        })
        .collect();
    let (mut worst, mut witness) = sampled?
        .into_iter()
        .reduce(|best, cur| if cur.0 > best.0 { cur } else { best })
        .ok_or(NashError::DegenerateObservable)?;

    // local ascent refinement of the worst sample: random Hermitian
    // perturbations with an adaptive step, 200 proposals
    let mut rng = crate::sample::substream(seed, n_samples as u64 + 0x5245_4649);
    let mut step = 0.1;
    let scale_ref = crate::numerics::max_abs(witness.matrix()).max(1e-6);
    for _ in 0..200 {
        let dir = crate::sample::gaussian_hermitian(d, &mut rng);
        let cand = Observable::from_herm_part(
            &(witness.matrix() + &scale(&dir, C64::new(step * scale_ref, 0.0))),
        );
        let r = ratio(&cand)?;
        if r > worst {
            worst = r;
            witness = cand;
            step *= 1.2;
        } else {
            step = (step * 0.7).max(1e-9);
        }
    }
    Ok((worst, witness))
}

/// Samples observables (Gaussian, rank-one, spectral modes), evaluates the
/// kind-appropriate ratio, and refines the worst sample by local ascent.
/// Deterministic given the seed and independent of the thread count.
pub fn verify_nash(
    gen: &LindbladGenerator,
    rho: &FullRankState,
    cert: &NashCertificate,
    n_samples: usize,
    seed: u64,
) -> Result<VerificationReport, NashError> {
    cert.validate()?;
    let ratio = |f: &Observable| nash_ratio(gen, rho, f, cert);
    let (worst_ratio, witness) = worst_sample(gen, rho, &ratio, n_samples, seed)?;
    Ok(VerificationReport {
        n_samples,
        worst_ratio,
        witness,
        passed: worst_ratio <= 1.0 + PASS_SLACK,
    })
}

/// Empirical smallest C making the inequality hold on the sample set — a
/// lower bound on the optimal constant (the analytic certificates are upper
/// bounds).
pub fn fit_c(
    gen: &LindbladGenerator,
    rho: &FullRankState,
    kind: NashKind,
    nu: f64,
    t_cutoff: Option<f64>,
    n_samples: usize,
    seed: u64,
) -> Result<f64, NashError> {
    let unit = NashCertificate {
        kind,
        nu,
        c: 1.0,
        t_cutoff,
    };
    unit.validate()?;
    let ratio = |f: &Observable| nash_ratio(gen, rho, f, &unit);
    let (worst, _) = worst_sample(gen, rho, &ratio, n_samples, seed)?;
    Ok(worst)
}

/// `(νC/4t)^{ν/4}` for type I; `e^{t/T} (νC/4t)^{ν/4}` for type II
/// (admissible only up to the cutoff).
pub fn ultracontractive_bound(cert: &NashCertificate, t: f64) -> Result<f64, NashError> {
    cert.validate()?;
    if !(t > 0.0) {
        return Err(NashError::InvalidTime(t));
    }
    let base = (cert.nu * cert.c / (4.0 * t)).powf(cert.nu / 4.0);
    match cert.kind {
        NashKind::I => Ok(base),
        NashKind::II => {
            let t_cutoff = cert.t_cutoff.unwrap();
            if t > t_cutoff {
                return Err(NashError::BeyondCutoff { t, t_cutoff });
            }
            Ok((t / t_cutoff).exp() * base)
        }
    }
}

/// Certificate obtained from a measured ultracontractive decay
/// `||S_t − ρ||_{1→2} ≤ (c_ultra/t)^{ν/4}`: same ν and cutoff,
/// C' = 2^{2+4/ν}·c_ultra.
pub fn converse_nash(
    nu: f64,
    c_ultra: f64,
    kind: NashKind,
    t_cutoff: Option<f64>,
) -> NashCertificate {
    NashCertificate {
        kind,
        nu,
        c: 2.0f64.powf(2.0 + 4.0 / nu) * c_ultra,
        t_cutoff,
    }
}

/// Lower bound on the Log-Sobolev constant α₂. Type I: 2/(νC). Type II:
/// `λ / (2(1 + λt₀ + (ν/4)·ln(νC/4t₀)))`, maximized over a t₀ grid in
/// (0, νC/4] when t₀ is omitted; requires νC/4 ≤ T.
pub fn ls_lower_bound(
    cert: &NashCertificate,
    gap: f64,
    t0: Option<f64>,
) -> Result<f64, NashError> {
    cert.validate()?;
    match cert.kind {
        NashKind::I => Ok(2.0 / (cert.nu * cert.c)),
        NashKind::II => {
            let t_cutoff = cert.t_cutoff.unwrap();
            let nu_c_over_4 = cert.nu * cert.c / 4.0;
            if nu_c_over_4 > t_cutoff {
                return Err(NashError::CutoffViolation {
                    nu_c_over_4,
                    t_cutoff,
                });
            }
            let eval = |t0: f64| {
                gap / (2.0
                    * (1.0 + gap * t0 + cert.nu / 4.0 * (nu_c_over_4 / t0).ln()))
            };
            match t0 {
                Some(t0) => {
                    if !(t0 > 0.0) || t0 > t_cutoff {
                        return Err(NashError::InvalidTime(t0));
                    }
                    Ok(eval(t0))
                }
                None => {
                    // on (0, νC/4] the log term is nonnegative, so the
                    // denominator stays positive and the bound is safe
                    let hi = nu_c_over_4.min(t_cutoff);
                    let lo = hi * 1e-6;
                    let best = (0..=200)
                        .map(|i| eval(lo * (hi / lo).powf(i as f64 / 200.0)))
                        .fold(f64::NEG_INFINITY, f64::max);
                    Ok(best)
                }
            }
        }
    }
}

/// Counting-function bound: type I `1 + e(νCs/2)^{ν/2}` for s ≥ 0,
/// type II `e³(νCs/2)^{ν/2}` for s ≥ 1/T.
pub fn counting_bound(cert: &NashCertificate, s: f64) -> Result<f64, NashError> {
    cert.validate()?;
    if s < 0.0 {
        return Err(NashError::InvalidTime(s));
    }
    let core = (cert.nu * cert.c * s / 2.0).powf(cert.nu / 2.0);
    match cert.kind {
        NashKind::I => Ok(1.0 + std::f64::consts::E * core),
        NashKind::II => {
            let threshold = 1.0 / cert.t_cutoff.unwrap();
            if s < threshold {
                return Err(NashError::BelowCutoff { s, threshold });
            }
            Ok(std::f64::consts::E.powi(3) * core)
        }
    }
}

/// Lower bounds on the eigenvalues λ_j of −L for j = 0..j_max. Type I:
/// `2j^{2/ν}/(e^{2/ν}νC)` for every j; type II: `2(j+1)^{2/ν}/(e^{6/ν}νC)`
/// only for j beyond the threshold `e³(νC/2T)^{ν/2} − 1` (None below it).
pub fn eigenvalue_lower_bounds(
    cert: &NashCertificate,
    j_max: usize,
) -> Result<Vec<Option<f64>>, NashError> {
    cert.validate()?;
    let nu_c = cert.nu * cert.c;
    match cert.kind {
        NashKind::I => Ok((0..=j_max)
            .map(|j| Some(2.0 * (j as f64).powf(2.0 / cert.nu) / ((2.0 / cert.nu).exp() * nu_c)))
            .collect()),
        NashKind::II => {
            let t_cutoff = cert.t_cutoff.unwrap();
            let threshold =
                std::f64::consts::E.powi(3) * (nu_c / (2.0 * t_cutoff)).powf(cert.nu / 2.0) - 1.0;
            Ok((0..=j_max)
                .map(|j| {
                    if (j as f64) > threshold {
                        Some(
                            2.0 * ((j + 1) as f64).powf(2.0 / cert.nu)
                                / ((6.0 / cert.nu).exp() * nu_c),
                        )
                    } else {
                        None
                    }
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MixingCurvePoint {
    pub t: f64,
    pub generic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nash: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingBoundReport {
    pub epsilon: f64,
    pub gap: f64,
    /// `ln(√||ρ^{-1}||/ε)/λ` from the generic trace-norm bound.
    pub t_generic: f64,
    /// `νC/4 + ln(2/ε)/λ` when a certificate is supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_nash: Option<f64>,
    /// Type II window νC/4 ≤ T (None for type I certificates).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff_ok: Option<bool>,
    /// Gap-chaining condition T ≥ ν/(4λ) (None for type I).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_window_ok: Option<bool>,
    pub curves: Vec<MixingCurvePoint>,
}

/// Mixing-time estimates at accuracy ε: the generic spectral bound and, when
/// a certificate is given, the Nash route `2e^{−λ(t−νC/4)}`. For type II
/// certificates the window flags are reported rather than enforced, so the
/// short-time constant is always visible alongside its admissibility.
pub fn mixing_time(
    gen: &LindbladGenerator,
    rho: &FullRankState,
    epsilon: f64,
    cert: Option<&NashCertificate>,
) -> Result<MixingBoundReport, NashError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(NashError::InvalidEpsilon(epsilon));
    }
    if let Some(c) = cert {
        c.validate()?;
    }
    let sg = Semigroup::new(gen.clone(), rho.clone())?;
    let gap = sg.spectral_gap();
    let prefactor = rho.inv_op_norm().sqrt();
    let t_generic = ((prefactor / epsilon).ln() / gap).max(0.0);
    let t_nash = cert.map(|c| c.nu * c.c / 4.0 + (2.0 / epsilon).ln() / gap);
    let (cutoff_ok, gap_window_ok) = match cert {
        Some(c) if c.kind == NashKind::II => {
            let t_cutoff = c.t_cutoff.unwrap();
            (
                Some(c.nu * c.c / 4.0 <= t_cutoff),
                Some(t_cutoff >= c.nu / (4.0 * gap)),
            )
        }
        _ => (None, None),
    };
    let t_lo = 1e-3 / gap;
    let t_hi = 20.0 / gap;
    let curves = (0..25)
        .map(|i| {
            let t = t_lo * (t_hi / t_lo).powf(i as f64 / 24.0);
            MixingCurvePoint {
                t,
                generic: prefactor * (-gap * t).exp(),
                nash: cert.map(|c| 2.0 * (-gap * (t - c.nu * c.c / 4.0)).exp()),
            }
        })
        .collect();
    Ok(MixingBoundReport {
        epsilon,
        gap,
        t_generic,
        t_nash,
        cutoff_ok,
        gap_window_ok,
        curves,
    })
}

/// Pointwise check that the Sobolev inequality with the same (ν, C, T)
/// implies the Nash inequality: on each sample where the Sobolev ratio is
/// ≤ 1, the Nash ratio must be too. The reported worst ratio is the largest
/// Nash ratio among Sobolev-satisfying samples.
pub fn sobolev_implies_nash_check(
    gen: &LindbladGenerator,
    rho: &FullRankState,
    cert: &NashCertificate,
    n_samples: usize,
    seed: u64,
) -> Result<VerificationReport, NashError> {
    cert.validate()?;
    match cert.kind {
        NashKind::I if cert.nu <= 1.0 => return Err(NashError::InvalidExponent(cert.nu)),
        NashKind::II if cert.nu <= 2.0 => return Err(NashError::InvalidExponent(cert.nu)),
        _ => {}
    }
    let d = gen.dim();
    let eigen_family = eigen_observables(gen, rho);
    let sobolev_ratio = |f: &Observable| -> Result<f64, NashError> {
        match cert.kind {
            NashKind::I => {
                let p = 2.0 * cert.nu / (cert.nu - 1.0);
                let mean = lp::mean_value(f, rho);
                let dev = Observable::from_herm_part(
                    &(f.matrix() - &scale(&identity(d), C64::new(mean, 0.0))),
                );
                let lhs = lp::weighted_norm(&dev, rho, p)?.powi(2);
                let energy = dirichlet_form(gen, f, rho)?;
                if lhs <= RATIO_GUARD || energy <= RATIO_GUARD {
                    return Ok(0.0);
                }
                Ok(lhs / (cert.c * energy))
            }
            NashKind::II => {
                let p = 2.0 * cert.nu / (cert.nu - 2.0);
                let lhs = lp::weighted_norm(f, rho, p)?.powi(2);
                if lhs <= RATIO_GUARD {
                    return Ok(0.0);
                }
                let energy = dirichlet_form(gen, f, rho)?.max(0.0);
                let n2_sq = lp::weighted_norm(f, rho, 2.0)?.powi(2);
                Ok(lhs / (cert.c * (energy + n2_sq / cert.t_cutoff.unwrap())))
            }
        }
    };
    let results: Result<Vec<(f64, Observable)>, NashError> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let f = draw_sample(d, i, seed, &eigen_family, rho);
            let s = sobolev_ratio(&f)?;
            if s <= 1.0 {
                Ok((nash_ratio(gen, rho, &f, cert)?, f))
            } else {
                Ok((0.0, f))
            }
        })
        .collect();
    let (worst_ratio, witness) = results?
        .into_iter()
        .reduce(|best, cur| if cur.0 > best.0 { cur } else { best })
        .ok_or(NashError::DegenerateObservable)?;
    Ok(VerificationReport {
        n_samples,
        worst_ratio,
        witness,
        passed: worst_ratio <= 1.0 + PASS_SLACK,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TensorCheckPoint {
    pub t: f64,
    pub single_squared: f64,
    pub pair: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TensorCheckReport {
    pub points: Vec<TensorCheckPoint>,
    pub max_deviation: f64,
    pub caveat: String,
}

/// Multiplicativity of the weighted 1→2 norm under tensor powers for a
/// unital qubit semigroup: `||S_t^{⊗2}||_{1→2,𝟙/4} = ||S_t||²_{1→2,𝟙/2}`.
pub fn tensor_multiplicativity_check(
    gen: &LindbladGenerator,
    t_grid: &[f64],
) -> Result<TensorCheckReport, NashError> {
    if gen.dim() != 2 {
        return Err(NashError::NotUnital);
    }
    let unital_residual =
        crate::numerics::max_abs(&gen.apply_schrodinger(&identity(2)));
    if unital_residual > 1e-10 {
        return Err(NashError::NotUnital);
    }
    let single = Semigroup::new(gen.clone(), FullRankState::maximally_mixed(2))?;
    let id = identity(2);
    let mut pair_ops = Vec::new();
    for l in gen.lindblad_ops() {
        pair_ops.push(crate::numerics::kron(l, &id));
        pair_ops.push(crate::numerics::kron(&id, l));
    }
    let h = gen.hamiltonian();
    let h_pair = &crate::numerics::kron(h, &id) + &crate::numerics::kron(&id, h);
    let pair_gen = LindbladGenerator::new(h_pair, pair_ops)?;
    let pair = Semigroup::new(pair_gen, FullRankState::maximally_mixed(4))?;
    let mut points = Vec::with_capacity(t_grid.len());
    let mut max_deviation = 0.0f64;
    for &t in t_grid {
        let s = single.norm_1to2(t, false)?;
        let p = pair.norm_1to2(t, false)?;
        max_deviation = max_deviation.max((s * s - p).abs());
        points.push(TensorCheckPoint {
            t,
            single_squared: s * s,
            pair: p,
        });
    }
    Ok(TensorCheckReport {
        points,
        max_deviation,
        caveat: "multiplicativity checked for two factors only; for higher tensor powers the \
                 induced certificate violates the T ≥ ν/(4λ) window needed to chain with the \
                 spectral gap"
            .to_string(),
    })
}

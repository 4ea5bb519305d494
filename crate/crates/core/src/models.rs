//! Built-in generator families with their analytic Nash certificates.
//!
//! Three families: the depolarizing semigroup toward an arbitrary full-rank
//! target, reversible unital qubit semigroups parametrized by their Pauli
//! transfer decay rates, and dissipative nearest-neighbour hopping on a ring
//! with optional coherent transport.

use crate::lindblad::{LindbladError, LindbladGenerator};
use crate::lp::FullRankState;
use crate::nash::{NashCertificate, NashKind};
use crate::numerics::{identity, pauli, scale, zeros, CMat, C64};
use faer::Mat;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("rates ({0}, {1}, {2}) are not completely positive: jump rate {3:.3e} < 0")]
    NotCompletelyPositive(f64, f64, f64, f64),
    #[error("ring needs at least 2 sites, got {0}")]
    TooFewSites(usize),
    #[error("rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error(transparent)]
    Lindblad(#[from] LindbladError),
}

/// Depolarizing semigroup `L(f) = γ(tr(ρf)·1 − f)` with fixed point ρ.
#[derive(Debug, Clone)]
pub struct DepolarizingSpec {
    pub gamma: f64,
    pub target: FullRankState,
}

/// Lindblad realization with jump operators `√(γ p_i) U|i⟩⟨j|U†` in the
/// eigenbasis of the target state; reversible with respect to the target.
pub fn build_depolarizing(spec: &DepolarizingSpec) -> LindbladGenerator {
    let d = spec.target.dim();
    let eig = spec.target.eigensystem();
    let u = &eig.eigenvectors;
    let mut ops = Vec::with_capacity(d * d);
    for i in 0..d {
        let w = (spec.gamma * eig.eigenvalues[i]).sqrt();
        for j in 0..d {
            let ket_i = Mat::from_fn(d, 1, |r, _| u[(r, i)]);
            let bra_j = Mat::from_fn(1, d, |_, c| u[(c, j)].conj());
            ops.push(scale(&(&ket_i * &bra_j), C64::new(w, 0.0)));
        }
    }
    LindbladGenerator::new(zeros(d, d), ops).expect("depolarizing realization is always valid")
}

/// Equality-case type I certificate: `(Cγ)^{ν/2} = ||ρ^{-1}||_op`.
pub fn depolarizing_nash_certificate(spec: &DepolarizingSpec, nu: f64) -> NashCertificate {
    let r = spec.target.inv_op_norm();
    NashCertificate {
        kind: NashKind::I,
        nu,
        c: r.powf(2.0 / nu) / spec.gamma,
        t_cutoff: None,
    }
}

/// ν minimizing νC/4 = ν ||ρ^{-1}||^{2/ν} / (4γ), namely ν* = 2·log||ρ^{-1}||.
pub fn depolarizing_optimal_nu(spec: &DepolarizingSpec) -> f64 {
    2.0 * spec.target.inv_op_norm().ln()
}

/// Short-time mixing term νC/4 at the optimal ν: `(e/2)·log||ρ^{-1}||/γ`.
///
/// Reported for comparison only; its sometimes-quoted 1/γ² variant has the
/// wrong rate dimension, so the mixing pipeline always uses the νC/4 route.
pub fn depolarizing_tau_short(spec: &DepolarizingSpec) -> f64 {
    let nu = depolarizing_optimal_nu(spec);
    nu * depolarizing_nash_certificate(spec, nu).c / 4.0
}

/// Reversible unital qubit semigroup with Pauli transfer matrix
/// `Δ_t = diag(e^{−t l₁}, e^{−t l₂}, e^{−t l₃})`.
#[derive(Debug, Clone, Copy)]
pub struct QubitUnitalSpec {
    pub rates: [f64; 3],
}

impl QubitUnitalSpec {
    pub fn new(l1: f64, l2: f64, l3: f64) -> Self {
        Self { rates: [l1, l2, l3] }
    }

    pub fn l_min(&self) -> f64 {
        self.rates.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Pauli jump rates γ_k = (l_i + l_j − l_k)/4.
    pub fn jump_rates(&self) -> [f64; 3] {
        let [l1, l2, l3] = self.rates;
        [
            (l2 + l3 - l1) / 4.0,
            (l3 + l1 - l2) / 4.0,
            (l1 + l2 - l3) / 4.0,
        ]
    }
}

/// `L(f) = Σ_k γ_k (σ_k f σ_k − f)`; fails when some γ_k < 0 (the semigroup
/// would not be completely positive).
pub fn build_qubit_unital(spec: &QubitUnitalSpec) -> Result<LindbladGenerator, ModelError> {
    let [l1, l2, l3] = spec.rates;
    if spec.l_min() <= 0.0 {
        return Err(ModelError::NonPositiveRate(spec.l_min()));
    }
    let mut ops = Vec::new();
    for (k, &g) in spec.jump_rates().iter().enumerate() {
        if g < -1e-12 {
            return Err(ModelError::NotCompletelyPositive(l1, l2, l3, g));
        }
        if g > 0.0 {
            ops.push(scale(&pauli(k + 1), C64::new(g.sqrt(), 0.0)));
        }
    }
    Ok(LindbladGenerator::new(zeros(2, 2), ops)?)
}

/// Type II certificate (ν=1, C = 2⁶/l_min, T = 1/(2 l_min)).
pub fn qubit_nash_certificate(spec: &QubitUnitalSpec) -> NashCertificate {
    let l_min = spec.l_min();
    NashCertificate {
        kind: NashKind::II,
        nu: 1.0,
        c: 64.0 / l_min,
        t_cutoff: Some(1.0 / (2.0 * l_min)),
    }
}

/// Two independent copies of a unital qubit generator on C² ⊗ C².
pub fn tensor_square_qubit(spec: &QubitUnitalSpec) -> Result<LindbladGenerator, ModelError> {
    let single = build_qubit_unital(spec)?;
    let id = identity(2);
    let mut ops = Vec::new();
    for l in single.lindblad_ops() {
        ops.push(crate::numerics::kron(l, &id));
        ops.push(crate::numerics::kron(&id, l));
    }
    Ok(LindbladGenerator::new(zeros(4, 4), ops)?)
}

/// Dissipative hopping on a ring of `n_sites` sites with optional coherent
/// Hamiltonian.
#[derive(Debug, Clone)]
pub struct RingSpec {
    pub n_sites: usize,
    pub hamiltonian: Option<CMat>,
}

impl RingSpec {
    pub fn new(n_sites: usize) -> Self {
        Self {
            n_sites,
            hamiltonian: None,
        }
    }

    /// Default coherent part `H = Σ_m L_m + L_m†` (the ring adjacency).
    pub fn with_default_hamiltonian(mut self) -> Self {
        let n = self.n_sites;
        self.hamiltonian = Some(Mat::from_fn(n, n, |i, j| {
            if (i + 1) % n == j || (j + 1) % n == i {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }));
        self
    }

    pub fn with_hamiltonian(mut self, h: CMat) -> Self {
        self.hamiltonian = Some(h);
        self
    }
}

/// Hop operators `L_m = |m⟩⟨m ⊕ 1|`; the dissipator uses both `L_m` and
/// `L_m†`, which makes the dissipative part reversible with respect to the
/// maximally mixed state.
pub fn build_ring(spec: &RingSpec) -> Result<LindbladGenerator, ModelError> {
    let n = spec.n_sites;
    if n < 2 {
        return Err(ModelError::TooFewSites(n));
    }
    let mut ops = Vec::with_capacity(2 * n);
    for m in 0..n {
        let hop = Mat::from_fn(n, n, |i, j| {
            if i == m && j == (m + 1) % n {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        ops.push(crate::numerics::dagger(&hop));
        ops.push(hop);
    }
    let h = spec.hamiltonian.clone().unwrap_or_else(|| zeros(n, n));
    Ok(LindbladGenerator::new(h, ops)?)
}

/// Full spectrum of −L for the dissipative ring: the diagonal (population)
/// sector contributes `2(1 − cos(2πm/n))` for m = 0..n−1, every coherence
/// `|m⟩⟨m ⊕ l|`, l ≠ 0 decays at rate 2.
pub fn ring_analytic_spectrum(n: usize) -> Vec<f64> {
    let mut evs: Vec<f64> = (0..n)
        .map(|m| 2.0 * (1.0 - (2.0 * std::f64::consts::PI * m as f64 / n as f64).cos()))
        .collect();
    evs.extend(std::iter::repeat(2.0).take(n * (n - 1)));
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    evs
}

pub fn ring_spectral_gap(n: usize) -> f64 {
    2.0 * (1.0 - (2.0 * std::f64::consts::PI / n as f64).cos())
}

/// Bounds on `||S_t||²_{1→2, 1/n}` for the dissipative ring.
#[derive(Debug, Clone, Copy)]
pub struct RingNormBound {
    /// `1 + Σ_{m=1}^{N} e^{−2t(1−cos(2πm/n))} + n² e^{−4t}`.
    pub exact_sum: f64,
    /// Gaussian-integral simplification `√(8n²/t)`, valid for t ≤ n²/16.
    pub simplified: f64,
}

pub fn ring_norm_bound(spec: &RingSpec, t: f64) -> RingNormBound {
    let n = spec.n_sites as f64;
    let mut sum = 1.0;
    for m in 1..spec.n_sites {
        let lam = 2.0 * (1.0 - (2.0 * std::f64::consts::PI * m as f64 / n).cos());
        sum += (-t * lam).exp();
    }
    sum += n * n * (-4.0 * t).exp();
    RingNormBound {
        exact_sum: sum,
        simplified: (8.0 * n * n / t).sqrt(),
    }
}

/// Ring type II certificates: the constant obtained through the converse
/// theorem from the ultracontractive bound (C' = 2⁹ n²) and the larger
/// printed constant (2¹⁰ n²). The smaller implies the larger.
#[derive(Debug, Clone)]
pub struct RingCertificates {
    /// Ultracontractive constant in `||S_t||²_{1→2} ≤ √(C_ultra/t)`.
    pub c_ultra: f64,
    /// C' = 2^{2+4/ν}·C_ultra/… via the converse theorem (2⁹ n²).
    pub via_converse: NashCertificate,
    /// The published constant 2¹⁰ n².
    pub as_printed: NashCertificate,
}

pub fn ring_nash_certificate(spec: &RingSpec) -> RingCertificates {
    let n = spec.n_sites as f64;
    let t_cutoff = n * n / 16.0;
    let c_ultra = 8.0 * n * n;
    let via_converse = crate::nash::converse_nash(1.0, c_ultra, NashKind::II, Some(t_cutoff));
    let as_printed = NashCertificate {
        kind: NashKind::II,
        nu: 1.0,
        c: 1024.0 * n * n,
        t_cutoff: Some(t_cutoff),
    };
    RingCertificates {
        c_ultra,
        via_converse,
        as_printed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Observable;
    use crate::numerics::max_abs;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn depolarizing_action_matches_formula() {
        let mut rng = crate::sample::rng(41);
        let target =
            FullRankState::new(crate::sample::random_full_rank_state(3, &mut rng)).unwrap();
        let gamma = 0.6;
        let gen = build_depolarizing(&DepolarizingSpec {
            gamma,
            target: target.clone(),
        });
        for _ in 0..20 {
            let f = crate::sample::gaussian_hermitian(3, &mut rng);
            let lf = gen.apply_to_matrix(&f);
            let mean = crate::numerics::trace(&(target.matrix() * &f)).re;
            let expect = scale(
                &(&scale(&identity(3), C64::new(mean, 0.0)) - &f),
                C64::new(gamma, 0.0),
            );
            assert!(max_abs(&(&lf - &expect)) <= 1e-10 * max_abs(&expect).max(1.0));
        }
    }

    #[test]
    fn depolarizing_certificate_constants() {
        let target = FullRankState::maximally_mixed(2);
        let spec = DepolarizingSpec { gamma: 1.0, target };
        let cert = depolarizing_nash_certificate(&spec, 2.0);
        close(cert.c, 2.0, 1e-12); // (Cγ)^{ν/2} = 2 = ||ρ^{-1}||
        let cert1 = depolarizing_nash_certificate(&spec, 1.0);
        close(cert1.c, 4.0, 1e-12);
        // uniform target in dimension d: C = d^{2/ν}/γ
        let spec3 = DepolarizingSpec {
            gamma: 2.0,
            target: FullRankState::maximally_mixed(3),
        };
        close(depolarizing_nash_certificate(&spec3, 2.0).c, 1.5, 1e-12);
    }

    #[test]
    fn depolarizing_optimal_nu_matches_grid_search() {
        let spec = DepolarizingSpec {
            gamma: 1.0,
            target: FullRankState::from_diagonal(&[0.7, 0.2, 0.1]).unwrap(),
        };
        let objective = |nu: f64| nu * depolarizing_nash_certificate(&spec, nu).c / 4.0;
        let star = depolarizing_optimal_nu(&spec);
        let mut best = f64::INFINITY;
        let mut best_nu = 0.0;
        for i in 1..4000 {
            let nu = i as f64 * 0.005;
            if objective(nu) < best {
                best = objective(nu);
                best_nu = nu;
            }
        }
        close(star, best_nu, 0.01);
    }

    #[test]
    fn qubit_jump_rates_and_cp() {
        let spec = QubitUnitalSpec::new(2.0, 2.0, 2.0);
        for g in spec.jump_rates() {
            close(g, 0.5, 1e-12);
        }
        let spec = QubitUnitalSpec::new(1.0, 1.0, 2.0);
        let g = spec.jump_rates();
        close(g[0], 0.5, 1e-12);
        close(g[1], 0.5, 1e-12);
        close(g[2], 0.0, 1e-12);
        assert!(build_qubit_unital(&spec).is_ok());
        // l3 > l1 + l2 violates complete positivity
        assert!(matches!(
            build_qubit_unital(&QubitUnitalSpec::new(0.5, 0.5, 2.0)),
            Err(ModelError::NotCompletelyPositive(..))
        ));
    }

    #[test]
    fn qubit_pauli_decay_rates() {
        let spec = QubitUnitalSpec::new(1.0, 1.5, 2.0);
        let gen = build_qubit_unital(&spec).unwrap();
        for k in 0..3 {
            let f = Observable::new(pauli(k + 1)).unwrap();
            let lf = gen.apply_heisenberg(&f).unwrap();
            // L(σ_k) = −l_k σ_k
            let expect = scale(&pauli(k + 1), C64::new(-spec.rates[k], 0.0));
            assert!(max_abs(&(lf.matrix() - &expect)) < 1e-10);
        }
    }

    #[test]
    fn qubit_certificate_constants() {
        let cert = qubit_nash_certificate(&QubitUnitalSpec::new(1.0, 3.0, 2.0));
        close(cert.c, 64.0, 1e-12);
        close(cert.t_cutoff.unwrap(), 0.5, 1e-12);
    }

    #[test]
    fn ring_two_sites_gap() {
        close(ring_spectral_gap(2), 4.0, 1e-12);
        let gen = build_ring(&RingSpec::new(2)).unwrap();
        let m = gen.to_superoperator(crate::lindblad::Picture::Heisenberg).matrix;
        let eig = crate::numerics::eig_hermitian(&scale(&m, C64::new(-1.0, 0.0)), 1e-9).unwrap();
        let expect = ring_analytic_spectrum(2);
        for (a, b) in eig.eigenvalues.iter().zip(expect.iter()) {
            close(*a, *b, 1e-9);
        }
    }

    #[test]
    fn ring_spectrum_small() {
        for n in [3usize, 5] {
            let gen = build_ring(&RingSpec::new(n)).unwrap();
            let m = gen.to_superoperator(crate::lindblad::Picture::Heisenberg).matrix;
            let eig =
                crate::numerics::eig_hermitian(&scale(&m, C64::new(-1.0, 0.0)), 1e-9).unwrap();
            let expect = ring_analytic_spectrum(n);
            for (a, b) in eig.eigenvalues.iter().zip(expect.iter()) {
                close(*a, *b, 1e-9);
            }
        }
    }

    #[test]
    fn ring_degenerate_pairs() {
        let n = 7;
        let diag: Vec<f64> = (1..n)
            .map(|m| 2.0 * (1.0 - (2.0 * std::f64::consts::PI * m as f64 / n as f64).cos()))
            .collect();
        for m in 1..n / 2 + 1 {
            close(diag[m - 1], diag[n - m - 1], 1e-12);
        }
    }

    #[test]
    fn ring_norm_bound_values() {
        let spec = RingSpec::new(8);
        let b = ring_norm_bound(&spec, 4.0);
        close(b.simplified, 128.0f64.sqrt(), 1e-12);
        // exact sum is below the simplified form on (0, T]
        for i in 1..=25 {
            let t = 4.0 * i as f64 / 25.0;
            let b = ring_norm_bound(&spec, t);
            assert!(b.exact_sum <= b.simplified + 1e-9, "t={t}");
        }
    }

    #[test]
    fn ring_certificate_constants() {
        let certs = ring_nash_certificate(&RingSpec::new(8));
        close(certs.c_ultra, 512.0, 1e-12);
        close(certs.via_converse.c, 512.0 * 64.0, 1e-9); // 2⁹·64
        close(certs.as_printed.c, 1024.0 * 64.0, 1e-9);
        close(certs.as_printed.t_cutoff.unwrap(), 4.0, 1e-12);
    }
}

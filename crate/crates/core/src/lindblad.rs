//! Lindblad generators and their superoperator form.
//!
//! Heisenberg action: `L(f) = i[H,f] + Σ_i L_i† f L_i − ½{L_i†L_i, f}`.
//! The Schrödinger superoperator is the Hilbert-Schmidt adjoint (conjugate
//! transpose) of the Heisenberg one.

use crate::lp::{FullRankState, Observable};
use crate::numerics::{
    self, anticommutator, commutator, dagger, devec, herm_residual, identity, kron,
    scale, trace, transpose, vec_op, zeros, CMat, C64, EPS_RANK, HERM_TOL,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LindbladError {
    #[error("hamiltonian is not Hermitian (residual {0:.3e})")]
    HamiltonianNotHermitian(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("generator is not primitive: stationary subspace has dimension {nullspace_dim}")]
    NotPrimitive { nullspace_dim: usize },
    #[error("stationary state is not full rank (min eigenvalue {min_eig:.3e})")]
    NotFullRank { min_eig: f64 },
    #[error("numerics: {0}")]
    Numerics(#[from] numerics::NumericsError),
    #[error("lp: {0}")]
    Lp(#[from] crate::lp::LpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    Heisenberg,
    Schrodinger,
}

/// d²×d² matrix form of a generator (or channel) in the `vec` convention.
#[derive(Debug, Clone)]
pub struct Superoperator {
    pub matrix: CMat,
    pub picture: Picture,
}

impl Superoperator {
    pub fn dim(&self) -> usize {
        (self.matrix.nrows() as f64).sqrt().round() as usize
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        let d = x.nrows();
        devec(&(&self.matrix * &vec_op(x)), d)
    }
}

#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    hamiltonian: CMat,
    lindblad_ops: Vec<CMat>,
    dim: usize,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: CMat, lindblad_ops: Vec<CMat>) -> Result<Self, LindbladError> {
        let d = hamiltonian.nrows();
        let res = herm_residual(&hamiltonian);
        if res > HERM_TOL {
            return Err(LindbladError::HamiltonianNotHermitian(res));
        }
        for l in &lindblad_ops {
            if l.nrows() != d || l.ncols() != d {
                return Err(LindbladError::DimensionMismatch(d, l.nrows()));
            }
        }
        Ok(Self {
            hamiltonian,
            lindblad_ops,
            dim: d,
        })
    }

    pub fn dissipative_only(lindblad_ops: Vec<CMat>) -> Result<Self, LindbladError> {
        let d = lindblad_ops
            .first()
            .map(|l| l.nrows())
            .unwrap_or(0);
        Self::new(zeros(d, d), lindblad_ops)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.hamiltonian
    }

    pub fn lindblad_ops(&self) -> &[CMat] {
        &self.lindblad_ops
    }

    /// Heisenberg action on an arbitrary (not necessarily Hermitian) matrix.
    pub fn apply_to_matrix(&self, f: &CMat) -> CMat {
        let i = C64::new(0.0, 1.0);
        let mut out = scale(&commutator(&self.hamiltonian, f), i);
        for l in &self.lindblad_ops {
            let ld = dagger(l);
            let ldl = &ld * l;
            out += &ld * f * l - scale(&anticommutator(&ldl, f), C64::new(0.5, 0.0));
        }
        out
    }

    /// Heisenberg action on an observable; Hermiticity is preserved.
    pub fn apply_heisenberg(&self, f: &Observable) -> Result<Observable, LindbladError> {
        if f.dim() != self.dim {
            return Err(LindbladError::DimensionMismatch(self.dim, f.dim()));
        }
        Ok(Observable::from_herm_part(&self.apply_to_matrix(f.matrix())))
    }

    /// Schrödinger action on a matrix (dual with respect to tr(A†B)).
    pub fn apply_schrodinger(&self, sigma: &CMat) -> CMat {
        let i = C64::new(0.0, 1.0);
        let mut out = scale(&commutator(&self.hamiltonian, sigma), -i);
        for l in &self.lindblad_ops {
            let ld = dagger(l);
            let ldl = &ld * l;
            out += l * sigma * &ld - scale(&anticommutator(&ldl, sigma), C64::new(0.5, 0.0));
        }
        out
    }

    pub fn to_superoperator(&self, picture: Picture) -> Superoperator {
        let d = self.dim;
        let id = identity(d);
        let i = C64::new(0.0, 1.0);
        // m += w · (A ⊗ Bᵀ), in place; sparse factors (typical for jump
        // operators) cost only their nonzero entries.
        fn accumulate_sandwich(m: &mut CMat, a: &CMat, b: &CMat, w: C64) {
            let d = a.nrows();
            for i in 0..d {
                for j in 0..d {
                    let aij = a[(i, j)] * w;
                    if aij.norm_sqr() == 0.0 {
                        continue;
                    }
                    for k in 0..d {
                        for l in 0..d {
                            m[(i * d + k, j * d + l)] += aij * b[(l, k)];
                        }
                    }
                }
            }
        }
        let mut m = numerics::zeros(d * d, d * d);
        accumulate_sandwich(&mut m, &self.hamiltonian, &id, i);
        accumulate_sandwich(&mut m, &id, &self.hamiltonian, -i);
        let half = C64::new(-0.5, 0.0);
        for l in &self.lindblad_ops {
            let ld = dagger(l);
            let ldl = &ld * l;
            accumulate_sandwich(&mut m, &ld, l, C64::new(1.0, 0.0));
            accumulate_sandwich(&mut m, &ldl, &id, half);
            accumulate_sandwich(&mut m, &id, &ldl, half);
        }
        match picture {
            Picture::Heisenberg => Superoperator {
                matrix: m,
                picture,
            },
            Picture::Schrodinger => Superoperator {
                matrix: dagger(&m),
                picture,
            },
        }
    }

    /// Unique full-rank stationary state of the Schrödinger semigroup.
    ///
    /// Primitivity is decided by the nullspace dimension of the Schrödinger
    /// superoperator (singular values ≤ 1e−9·σ_max count as zero).
    pub fn stationary_state(&self) -> Result<FullRankState, LindbladError> {
        let m = self.to_superoperator(Picture::Schrodinger).matrix;
        let svd = m
            .svd()
            .map_err(|_| numerics::NumericsError::DecompositionFailed)?;
        let n = m.nrows();
        let smax = svd.S().column_vector()[0].re.max(1.0);
        let null_idx: Vec<usize> = (0..n)
            .filter(|&i| svd.S().column_vector()[i].re <= 1e-9 * smax)
            .collect();
        if null_idx.len() != 1 {
            return Err(LindbladError::NotPrimitive {
                nullspace_dim: null_idx.len(),
            });
        }
        let v = svd.V().to_owned();
        let col = faer::Mat::from_fn(n, 1, |i, _| v[(i, null_idx[0])]);
        let d = self.dim;
        let raw = devec(&col, d);
        let herm = numerics::herm_part(&raw);
        let t = trace(&herm).re;
        if t.abs() < 1e-12 {
            return Err(LindbladError::NotPrimitive { nullspace_dim: 1 });
        }
        let rho = scale(&herm, C64::new(1.0 / t, 0.0));
        let eig = numerics::eig_hermitian(&rho, 1e-8)?;
        if eig.min_eigenvalue() <= EPS_RANK {
            return Err(LindbladError::NotFullRank {
                min_eig: eig.min_eigenvalue(),
            });
        }
        FullRankState::new(rho).map_err(LindbladError::Lp)
    }
}

/// Γ_ρ^s as a d²×d² superoperator matrix.
pub fn gamma_superop(rho: &FullRankState, s: f64) -> CMat {
    let w = rho.power(s / 2.0);
    kron(&w, &transpose(&w))
}

/// The Gram matrix of the ρ-weighted inner product on vectorized operators:
/// `⟨f,g⟩_ρ = vec(f)† G vec(g)` with `G = ρ^{1/2} ⊗ (ρ^{1/2})ᵀ`.
pub fn weighting_gram(rho: &FullRankState) -> CMat {
    gamma_superop(rho, 1.0)
}

#[derive(Debug, Clone, Copy)]
pub struct DetailedBalanceReport {
    pub reversible: bool,
    pub residual: f64,
}

/// Hermitian matrix-unit basis of the d×d Hermitian matrices (d² elements).
pub fn hermitian_basis(d: usize) -> Vec<CMat> {
    let mut basis = Vec::with_capacity(d * d);
    let z = C64::new(0.0, 0.0);
    for i in 0..d {
        basis.push(faer::Mat::from_fn(d, d, |r, c| {
            if r == i && c == i {
                C64::new(1.0, 0.0)
            } else {
                z
            }
        }));
    }
    let inv_sqrt2 = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for i in 0..d {
        for j in (i + 1)..d {
            basis.push(faer::Mat::from_fn(d, d, |r, c| {
                if (r, c) == (i, j) || (r, c) == (j, i) {
                    inv_sqrt2
                } else {
                    z
                }
            }));
            basis.push(faer::Mat::from_fn(d, d, |r, c| {
                if (r, c) == (i, j) {
                    C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2)
                } else if (r, c) == (j, i) {
                    C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2)
                } else {
                    z
                }
            }));
        }
    }
    basis
}

/// Detailed-balance residual `max |⟨f_a, L(f_b)⟩_ρ − ⟨L(f_a), f_b⟩_ρ|`.
///
/// Exact sweep over the Hermitian matrix-unit basis for d ≤ 8, randomized
/// sweep (1000 Gaussian pairs, fixed seed) above.
pub fn check_detailed_balance(
    gen: &LindbladGenerator,
    rho: &FullRankState,
    tol: f64,
) -> DetailedBalanceReport {
    let d = gen.dim();
    let m = gen.to_superoperator(Picture::Heisenberg).matrix;
    let g1 = weighting_gram(rho);
    let gm = &g1 * &m;
    let residual = if d <= 8 {
        let basis = hermitian_basis(d);
        let n = basis.len();
        let f = faer::Mat::from_fn(d * d, n, |k, a| vec_op(&basis[a])[(k, 0)]);
        let k = f.adjoint() * &gm * &f;
        let mut r = 0.0f64;
        for a in 0..n {
            for b in (a + 1)..n {
                r = r.max((k[(a, b)] - k[(b, a)]).norm());
            }
        }
        r
    } else {
        let mut rng = crate::sample::rng(0x6462);
        let mut r = 0.0f64;
        for _ in 0..1000 {
            let fa = vec_op(&crate::sample::gaussian_hermitian(d, &mut rng));
            let fb = vec_op(&crate::sample::gaussian_hermitian(d, &mut rng));
            let lhs = (fa.adjoint() * &gm * &fb)[(0, 0)];
            let rhs = (fb.adjoint() * &gm * &fa)[(0, 0)];
            let na = (fa.adjoint() * &g1 * &fa)[(0, 0)].re.sqrt();
            let nb = (fb.adjoint() * &g1 * &fb)[(0, 0)].re.sqrt();
            r = r.max((lhs - rhs).norm() / (na * nb).max(1e-300));
        }
        r
    };
    DetailedBalanceReport {
        reversible: residual <= tol,
        residual,
    }
}

/// Symmetrized generator `L̃ = Γ_ρ^{1/2} ∘ L ∘ Γ_ρ^{−1/2}` as a
/// superoperator; Hermitian exactly when `gen` satisfies detailed balance
/// with respect to ρ.
pub fn symmetrize(gen: &LindbladGenerator, rho: &FullRankState) -> Superoperator {
    let m = gen.to_superoperator(Picture::Heisenberg).matrix;
    let g_half = gamma_superop(rho, 0.5);
    let g_neg_half = gamma_superop(rho, -0.5);
    Superoperator {
        matrix: &g_half * &m * &g_neg_half,
        picture: Picture::Heisenberg,
    }
}

/// Dirichlet form `ℰ(f) = −⟨f, L(f)⟩_ρ`.
pub fn dirichlet_form(
    gen: &LindbladGenerator,
    f: &Observable,
    rho: &FullRankState,
) -> Result<f64, LindbladError> {
    let lf = gen.apply_heisenberg(f)?;
    Ok(-crate::lp::weighted_inner(f, &lf, rho)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::numerics::{max_abs, pauli};

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn heisenberg_annihilates_identity() {
        let gen = models::build_ring(&models::RingSpec::new(3)).unwrap();
        let one = Observable::identity(3);
        let lf = gen.apply_heisenberg(&one).unwrap();
        assert!(max_abs(lf.matrix()) < 1e-12);
    }

    #[test]
    fn depolarizing_heisenberg_action() {
        let rho = FullRankState::maximally_mixed(2);
        let gen = models::build_depolarizing(&models::DepolarizingSpec {
            gamma: 0.7,
            target: rho.clone(),
        });
        let sz = Observable::new(pauli(3)).unwrap();
        let lf = gen.apply_heisenberg(&sz).unwrap();
        // γ(tr(ρf)1 − f) = −γ σ_z
        assert!(max_abs(&(lf.matrix() + &scale(&pauli(3), C64::new(0.7, 0.0)))) < 1e-12);
    }

    #[test]
    fn superoperator_matches_direct_action() {
        let gen = models::build_ring(&models::RingSpec::new(3)).unwrap();
        let sup = gen.to_superoperator(Picture::Heisenberg);
        let mut rng = crate::sample::rng(4);
        for _ in 0..20 {
            let f = crate::sample::gaussian_matrix(3, &mut rng);
            let direct = gen.apply_to_matrix(&f);
            let via = sup.apply(&f);
            assert!(max_abs(&(&direct - &via)) <= 1e-10 * max_abs(&direct).max(1.0));
        }
        // Schrödinger matrix is the HS adjoint
        let sch = gen.to_superoperator(Picture::Schrodinger);
        assert!(max_abs(&(&sch.matrix - &dagger(&sup.matrix))) < 1e-12);
        for _ in 0..10 {
            let s = crate::sample::gaussian_matrix(3, &mut rng);
            let direct = gen.apply_schrodinger(&s);
            let via = sch.apply(&s);
            assert!(max_abs(&(&direct - &via)) <= 1e-10 * max_abs(&direct).max(1.0));
        }
    }

    #[test]
    fn zero_generator_superoperator() {
        let gen = LindbladGenerator::new(zeros(2, 2), vec![]).unwrap();
        let sup = gen.to_superoperator(Picture::Heisenberg);
        assert!(max_abs(&sup.matrix) < 1e-15);
    }

    #[test]
    fn pure_hamiltonian_commutator() {
        let h = scale(&pauli(3), C64::new(0.5, 0.0));
        let gen = LindbladGenerator::new(h.clone(), vec![]).unwrap();
        let sx = Observable::new(pauli(1)).unwrap();
        let lf = gen.apply_heisenberg(&sx).unwrap();
        // i[σ_z/2, σ_x] = -σ_y
        assert!(max_abs(&(lf.matrix() + &pauli(2))) < 1e-12);
    }

    #[test]
    fn depolarizing_superop_spectrum() {
        let rho = FullRankState::maximally_mixed(2);
        let gen = models::build_depolarizing(&models::DepolarizingSpec {
            gamma: 1.0,
            target: rho,
        });
        let m = gen.to_superoperator(Picture::Heisenberg).matrix;
        let mut evs: Vec<f64> = m.eigenvalues().unwrap().iter().map(|z| z.re).collect();
        evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (ev, expect) in evs.iter().zip([-1.0, -1.0, -1.0, 0.0]) {
            close(*ev, expect, 1e-9);
        }
    }

    #[test]
    fn stationary_states() {
        let target = FullRankState::from_diagonal(&[0.75, 0.25]).unwrap();
        let gen = models::build_depolarizing(&models::DepolarizingSpec {
            gamma: 1.3,
            target: target.clone(),
        });
        let rho = gen.stationary_state().unwrap();
        assert!(max_abs(&(rho.matrix() - target.matrix())) < 1e-9);

        let ring = models::build_ring(&models::RingSpec::new(4)).unwrap();
        let rho = ring.stationary_state().unwrap();
        assert!(max_abs(&(rho.matrix() - FullRankState::maximally_mixed(4).matrix())) < 1e-9);

        let qubit = models::build_qubit_unital(&models::QubitUnitalSpec::new(1.0, 1.0, 2.0))
            .unwrap();
        let rho = qubit.stationary_state().unwrap();
        assert!(max_abs(&(rho.matrix() - FullRankState::maximally_mixed(2).matrix())) < 1e-9);
    }

    #[test]
    fn non_primitive_rejected() {
        // pure σ_z Hamiltonian: every diagonal state is stationary
        let gen = LindbladGenerator::new(pauli(3), vec![]).unwrap();
        assert!(matches!(
            gen.stationary_state(),
            Err(LindbladError::NotPrimitive { .. })
        ));
    }

    #[test]
    fn detailed_balance_cases() {
        let rho = FullRankState::maximally_mixed(2);
        let gen = models::build_depolarizing(&models::DepolarizingSpec {
            gamma: 0.9,
            target: rho.clone(),
        });
        let rep = check_detailed_balance(&gen, &rho, 1e-9);
        assert!(rep.reversible, "residual {}", rep.residual);

        // dissipative ring is reversible, full ring with H is not
        let n = 4;
        let rho = FullRankState::maximally_mixed(n);
        let diss = models::build_ring(&models::RingSpec::new(n)).unwrap();
        let rep = check_detailed_balance(&diss, &rho, 1e-9);
        assert!(rep.reversible, "residual {}", rep.residual);
        let coherent = models::build_ring(&models::RingSpec::new(n).with_default_hamiltonian())
            .unwrap();
        let rep = check_detailed_balance(&coherent, &rho, 1e-9);
        assert!(!rep.reversible);
    }

    #[test]
    fn symmetrize_cases() {
        // uniform state: Γ is scalar, so the symmetrization is L itself
        let n = 3;
        let rho = FullRankState::maximally_mixed(n);
        let gen = models::build_ring(&models::RingSpec::new(n)).unwrap();
        let m = gen.to_superoperator(Picture::Heisenberg).matrix;
        let sym = symmetrize(&gen, &rho);
        assert!(max_abs(&(&sym.matrix - &m)) < 1e-9);

        // skewed depolarizing: Hermitian symmetrization, spectrum {0, -γ×3}
        let target = FullRankState::from_diagonal(&[0.75, 0.25]).unwrap();
        let gamma = 1.7;
        let gen = models::build_depolarizing(&models::DepolarizingSpec {
            gamma,
            target: target.clone(),
        });
        let sym = symmetrize(&gen, &target);
        assert!(herm_residual(&sym.matrix) < 1e-9);
        let eig = numerics::eig_hermitian(&sym.matrix, 1e-8).unwrap();
        close(eig.eigenvalues[3], 0.0, 1e-9);
        for i in 0..3 {
            close(eig.eigenvalues[i], -gamma, 1e-9);
        }
        // same spectrum as L
        let mut evs: Vec<f64> = gen
            .to_superoperator(Picture::Heisenberg)
            .matrix
            .eigenvalues()
            .unwrap()
            .iter()
            .map(|z| z.re)
            .collect();
        evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in evs.iter().zip(eig.eigenvalues.iter()) {
            close(*a, *b, 1e-8);
        }

        // adjoint route: L̃ = Γ^{-1/2} ∘ L* ∘ Γ^{1/2}
        let msch = gen.to_superoperator(Picture::Schrodinger).matrix;
        let alt = &gamma_superop(&target, -0.5) * &msch * &gamma_superop(&target, 0.5);
        assert!(max_abs(&(&alt - &sym.matrix)) < 1e-9);

        // non-reversible generator gives a non-Hermitian symmetrization
        let coh = models::build_ring(&models::RingSpec::new(3).with_default_hamiltonian())
            .unwrap();
        let rho = FullRankState::maximally_mixed(3);
        let sym = symmetrize(&coh, &rho);
        assert!(herm_residual(&sym.matrix) > 1e-6);
    }

    #[test]
    fn dirichlet_form_cases() {
        let rho = FullRankState::from_diagonal(&[0.6, 0.4]).unwrap();
        let gamma = 0.8;
        let gen = models::build_depolarizing(&models::DepolarizingSpec {
            gamma,
            target: rho.clone(),
        });
        let one = Observable::identity(2);
        close(dirichlet_form(&gen, &one, &rho).unwrap(), 0.0, 1e-12);
        let mut rng = crate::sample::rng(8);
        for _ in 0..100 {
            let f = Observable::from_herm_part(&crate::sample::gaussian_hermitian(2, &mut rng));
            let e = dirichlet_form(&gen, &f, &rho).unwrap();
            let var = crate::lp::variance(&f, &rho).unwrap();
            close(e, gamma * var, 1e-9 * var.max(1.0));
        }
    }

    #[test]
    fn ring_coherent_part_contributes_zero_dirichlet() {
        let n = 4;
        let rho = FullRankState::maximally_mixed(n);
        let diss = models::build_ring(&models::RingSpec::new(n)).unwrap();
        let coh = models::build_ring(&models::RingSpec::new(n).with_default_hamiltonian())
            .unwrap();
        let mut rng = crate::sample::rng(12);
        for _ in 0..50 {
            let f = Observable::from_herm_part(&crate::sample::gaussian_hermitian(n, &mut rng));
            let e1 = dirichlet_form(&diss, &f, &rho).unwrap();
            let e2 = dirichlet_form(&coh, &f, &rho).unwrap();
            close(e1, e2, 1e-10 * e1.abs().max(1.0));
        }
    }

    #[test]
    fn trace_preservation_random_states() {
        let gen = models::build_ring(&models::RingSpec::new(3).with_default_hamiltonian())
            .unwrap();
        let mut rng = crate::sample::rng(14);
        for _ in 0..100 {
            let s = crate::sample::gaussian_matrix(3, &mut rng);
            let ls = gen.apply_schrodinger(&s);
            assert!(trace(&ls).norm() <= 1e-10 * max_abs(&ls).max(1.0));
        }
    }

    #[test]
    fn detailed_balance_implies_real_spectrum_and_stationarity() {
        let target = FullRankState::from_diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let gen = models::build_depolarizing(&models::DepolarizingSpec {
            gamma: 1.1,
            target: target.clone(),
        });
        let rep = check_detailed_balance(&gen, &target, 1e-9);
        assert!(rep.reversible);
        for z in gen
            .to_superoperator(Picture::Heisenberg)
            .matrix
            .eigenvalues()
            .unwrap()
        {
            assert!(z.im.abs() <= 1e-8);
        }
        let lrho = gen.apply_schrodinger(target.matrix());
        assert!(max_abs(&lrho) <= 1e-9);
    }
}

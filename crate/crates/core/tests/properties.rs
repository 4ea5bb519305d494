//! Randomized invariants driven by proptest. These complement the fixed
//! oracle tests with shrinkable counterexample search.

use nash_mixer::lindblad::{dirichlet_form, LindbladGenerator};
use nash_mixer::lp::{weighted_inner, weighted_norm, FullRankState, Observable};
use nash_mixer::models;
use nash_mixer::numerics::{
    devec, kron, max_abs, trace, vec_op, CMat, C64,
};
use proptest::prelude::*;

const D: usize = 3;

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
}

fn mat_from_entries(entries: &[(f64, f64)], d: usize) -> CMat {
    CMat::from_fn(d, d, |i, j| {
        let (re, im) = entries[i * d + j];
        C64::new(re, im)
    })
}

fn herm_from_entries(entries: &[(f64, f64)], d: usize) -> CMat {
    let a = mat_from_entries(entries, d);
    CMat::from_fn(d, d, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

fn state_from_weights(w: &[f64]) -> FullRankState {
    let total: f64 = w.iter().sum();
    let p: Vec<f64> = w.iter().map(|x| x / total).collect();
    FullRankState::from_diagonal(&p).unwrap()
}

proptest! {
    #[test]
    fn norm_is_absolutely_homogeneous(
        entries in complex_entries(D * D),
        weights in prop::collection::vec(0.05f64..1.0, D),
        alpha in -3.0f64..3.0,
        p in prop::sample::select(vec![1.0, 1.5, 2.0, 4.0, f64::INFINITY]),
    ) {
        let rho = state_from_weights(&weights);
        let f = Observable::from_herm_part(&herm_from_entries(&entries, D));
        let scaled = Observable::from_herm_part(
            &nash_mixer::numerics::scale(f.matrix(), C64::new(alpha, 0.0)),
        );
        let lhs = weighted_norm(&scaled, &rho, p).unwrap();
        let rhs = alpha.abs() * weighted_norm(&f, &rho, p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
    }

    #[test]
    fn norm_satisfies_triangle_inequality(
        e1 in complex_entries(D * D),
        e2 in complex_entries(D * D),
        weights in prop::collection::vec(0.05f64..1.0, D),
        p in prop::sample::select(vec![1.0, 2.0, 3.0, f64::INFINITY]),
    ) {
        let rho = state_from_weights(&weights);
        let f = Observable::from_herm_part(&herm_from_entries(&e1, D));
        let g = Observable::from_herm_part(&herm_from_entries(&e2, D));
        let sum = Observable::from_herm_part(&(f.matrix() + g.matrix()));
        let lhs = weighted_norm(&sum, &rho, p).unwrap();
        let rhs = weighted_norm(&f, &rho, p).unwrap() + weighted_norm(&g, &rho, p).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn inner_product_obeys_cauchy_schwarz(
        e1 in complex_entries(D * D),
        e2 in complex_entries(D * D),
        weights in prop::collection::vec(0.05f64..1.0, D),
    ) {
        let rho = state_from_weights(&weights);
        let f = Observable::from_herm_part(&herm_from_entries(&e1, D));
        let g = Observable::from_herm_part(&herm_from_entries(&e2, D));
        let lhs = weighted_inner(&f, &g, &rho).unwrap().abs();
        let rhs = weighted_norm(&f, &rho, 2.0).unwrap() * weighted_norm(&g, &rho, 2.0).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn vec_devec_round_trip(entries in complex_entries(D * D)) {
        let a = mat_from_entries(&entries, D);
        let back = devec(&vec_op(&a), D);
        prop_assert!(max_abs(&(&a - &back)) == 0.0);
    }

    #[test]
    fn kron_trace_is_multiplicative(
        e1 in complex_entries(4),
        e2 in complex_entries(9),
    ) {
        let a = mat_from_entries(&e1, 2);
        let b = mat_from_entries(&e2, 3);
        let lhs = trace(&kron(&a, &b));
        let rhs = trace(&a) * trace(&b);
        prop_assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn state_powers_compose(
        weights in prop::collection::vec(0.05f64..1.0, D),
        a in -1.0f64..1.0,
        b in -1.0f64..1.0,
    ) {
        let rho = state_from_weights(&weights);
        let lhs = &rho.power(a) * &rho.power(b);
        let rhs = rho.power(a + b);
        prop_assert!(max_abs(&(&lhs - &rhs)) <= 1e-10 * (1.0 + max_abs(&rhs)));
    }

    #[test]
    fn generators_annihilate_trace(
        ham in complex_entries(D * D),
        jump in complex_entries(D * D),
        sigma in complex_entries(D * D),
    ) {
        let h = herm_from_entries(&ham, D);
        let l = mat_from_entries(&jump, D);
        let gen = LindbladGenerator::new(h, vec![l]).unwrap();
        let s = herm_from_entries(&sigma, D);
        let out = gen.apply_schrodinger(&s);
        prop_assert!(trace(&out).norm() <= 1e-10);
        // and the Heisenberg picture fixes the identity
        let one = gen.apply_to_matrix(&nash_mixer::numerics::identity(D));
        prop_assert!(max_abs(&one) <= 1e-10);
    }

    #[test]
    fn dirichlet_form_is_nonnegative(
        entries in complex_entries(D * D),
        weights in prop::collection::vec(0.05f64..1.0, D),
        gamma in 0.1f64..2.0,
    ) {
        let rho = state_from_weights(&weights);
        let gen = models::build_depolarizing(&models::DepolarizingSpec {
            gamma,
            target: rho.clone(),
        });
        let f = Observable::from_herm_part(&herm_from_entries(&entries, D));
        let e = dirichlet_form(&gen, &f, &rho).unwrap();
        prop_assert!(e >= -1e-10);
    }

    #[test]
    fn schema_round_trip_preserves_generator(
        ham in complex_entries(4),
        jump in complex_entries(4),
    ) {
        let h = herm_from_entries(&ham, 2);
        let l = mat_from_entries(&jump, 2);
        let gen = LindbladGenerator::new(h.clone(), vec![l.clone()]).unwrap();
        let text = serde_json::to_string(&nash_mixer::io::GeneratorSchema::from_generator(&gen))
            .unwrap();
        let back = nash_mixer::io::parse_generator(&text).unwrap();
        prop_assert!(max_abs(&(back.hamiltonian() - &h)) == 0.0);
        prop_assert!(max_abs(&(&back.lindblad_ops()[0] - &l)) == 0.0);
    }
}

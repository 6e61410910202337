use finobs_core::dynamics::{complementary_pair, evolve, propagator, variance, StateVector};
use finobs_core::fhlogic::{
    alpha_value, fh_apply, modularity_check, orthogonal, subspace_join, subspace_meet, window, FHOperator,
    SymbolicSubspace,
};
use finobs_core::finitary::{diagonalize, EigenSystem, HermitianMatrix};
use finobs_core::io::{load, save};
use finobs_core::measurement::{Frame, LabelSet, ObjectSet, PartitionPlus};
use finobs_core::socks::{flip, inner_t, tau, FlipAction, PairVector, TruncatedFockVector};
use finobs_core::verify::gen;
use finobs_core::{CMatrix, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn hermitian(seed: u64, d: usize) -> HermitianMatrix {
    HermitianMatrix::new(gen::hermitian(&mut rng(seed), d, 2.0)).unwrap()
}

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diagonalization_reconstructs(seed: u64, d in 1usize..7) {
        let h = hermitian(seed, d);
        let es = diagonalize(&h).unwrap();
        prop_assert!(es.is_full());
        prop_assert!((es.to_matrix() - h.matrix()).norm() <= 1e-9 * (1.0 + h.norm()));
    }

    #[test]
    fn eigen_data_survives_a_json_round_trip(seed: u64, d in 1usize..6) {
        let es = diagonalize(&hermitian(seed, d)).unwrap();
        let text = save(&es).unwrap();
        let back: EigenSystem = load(&text).unwrap();
        prop_assert!(back.approx_eq(&es, 1e-12));
        prop_assert_eq!(back.values(), es.values());
        prop_assert_eq!(save(&back).unwrap(), text);
    }

    #[test]
    fn evolution_is_unitary_and_additive(seed: u64, d in 1usize..6, t in -3.0..3.0f64, s in -3.0..3.0f64) {
        let es = diagonalize(&hermitian(seed, d)).unwrap();
        let psi = StateVector::new(gen::unit_vector(&mut rng(seed ^ 1), d)).unwrap();
        let once = evolve(&es, &psi, t + s).unwrap();
        let twice = evolve(&es, &evolve(&es, &psi, t).unwrap(), s).unwrap();
        prop_assert!((once.vector().norm() - 1.0).abs() < 1e-10);
        prop_assert!((once.vector() - twice.vector()).norm() < 1e-10);
        let u = propagator(&es, t).unwrap();
        let id = CMatrix::identity(d, d);
        prop_assert!((u.matrix().adjoint() * u.matrix() - id).norm() < 1e-10);
    }

    #[test]
    fn complementary_pair_variances_agree(
        d in 5usize..9,
        a0 in -3.0..3.0f64,
        a1 in -3.0..3.0f64,
        seed: u64,
    ) {
        prop_assume!((a0 - a1).abs() > 1e-3);
        let pair = complementary_pair(d, &[a0, a1], seed).unwrap();
        prop_assert_eq!(pair.intersection.len(), 1);
        let w = StateVector::normalized(pair.intersection[0].clone()).unwrap();
        let vs = variance(&pair.s, &w).unwrap();
        let vt = variance(&pair.t, &w).unwrap();
        let expected = (a0 - a1).powi(2) / 4.0;
        prop_assert!((vs - expected).abs() < 1e-9 * (1.0 + expected));
        prop_assert!((vt - expected).abs() < 1e-9 * (1.0 + expected));
    }

    #[test]
    fn tensors_are_antisymmetric_and_inner_products_factor(
        xs in prop::collection::vec(complex(), 1..7),
        ys in prop::collection::vec(complex(), 1..7),
    ) {
        let n = xs.len().min(ys.len());
        let px: Vec<PairVector> = (0..n).map(|k| PairVector::new(k, xs[k])).collect();
        let py: Vec<PairVector> = (0..n).map(|k| PairVector::new(k, ys[k])).collect();
        let tx = tau(&px).unwrap();
        prop_assert!(tx.is_antisymmetric_exhaustive(1e-9));
        let lhs = inner_t(&tx, &tau(&py).unwrap()).unwrap();
        let rhs: C64 = px.iter().zip(&py).map(|(x, y)| x.inner(y)).product();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn flips_are_involutions_and_isometries(
        coeffs in prop::collection::vec(complex(), 1..9),
        pairs in prop::collection::btree_set(0usize..8, 0..4),
    ) {
        let v = TruncatedFockVector::new(coeffs).unwrap();
        let f = FlipAction::new(pairs);
        let once = flip(&f, &v);
        prop_assert!(flip(&f, &once).approx_eq(&v, 0.0));
        let a = v.inner(&v).unwrap();
        let b = once.inner(&once).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn canonical_form_is_idempotent_and_preserves_action(seed: u64, k in 0usize..5) {
        let mut r = rng(seed);
        let w = window(8);
        let support = gen::atoms(&mut r, &w, k);
        let t = gen::fh_operator(&mut r, support).unwrap();
        let c = t.canonicalize(1e-12);
        prop_assert!(c.is_canonical(1e-12));
        prop_assert_eq!(c.canonicalize(1e-12), c.clone());
        let vs = gen::atoms(&mut r, &w, 3);
        let v = gen::sparse_vector(&mut r, &vs);
        prop_assert!(fh_apply(&t, &v).approx_eq(&fh_apply(&c, &v), 1e-12));
        let back: FHOperator = load(&save(&c).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn lattice_laws(seed: u64) {
        let mut r = rng(seed);
        let w = window(6);
        let x = gen::subspace(&mut r, &w).unwrap();
        let y = gen::subspace(&mut r, &w).unwrap();
        let z = gen::subspace(&mut r, &w).unwrap();
        prop_assert!(subspace_join(&x, &y).same_as(&subspace_join(&y, &x)));
        prop_assert!(subspace_meet(&x, &y).same_as(&subspace_meet(&y, &x)));
        prop_assert!(subspace_join(&x, &x).same_as(&x));
        prop_assert!(subspace_meet(&x, &subspace_join(&x, &y)).same_as(&x));
        prop_assert!(subspace_join(&x, &subspace_meet(&x, &y)).same_as(&x));
        prop_assert!(modularity_check(&x, &y, &z));
        if orthogonal(&x, &y) {
            prop_assert!(alpha_value(&x) + alpha_value(&y) <= 1);
            prop_assert_eq!(alpha_value(&subspace_join(&x, &y)), alpha_value(&x) + alpha_value(&y));
        }
        let back: SymbolicSubspace = load(&save(&x).unwrap()).unwrap();
        prop_assert!(back.same_as(&x));
    }

    #[test]
    fn every_partition_is_recovered_from_its_ideal(n in 1usize..4, extra in 0usize..2, pick: prop::sample::Index) {
        let objects = ObjectSet::numbered(n);
        let frame = Frame::new(objects.clone(), LabelSet::numbered(n + extra));
        let all = PartitionPlus::enumerate(&objects);
        let p = &all[pick.index(all.len())];
        let members = frame.ideal_members(p).unwrap();
        prop_assert_eq!(&frame.pi_of_family(&members).unwrap(), p);
        for f in &members {
            prop_assert!(frame.le(f, f).unwrap());
        }
    }
}

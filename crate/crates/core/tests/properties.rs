//! Invariants checked on random algebras. Each case draws a seed and builds
//! its algebra from a seeded generator, so failures shrink to a single seed.

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resfmb::abelian::{decompose, monomial_fmb, shape_criterion, ShapeDecision};
use resfmb::corpus::{random_change_of_basis, random_triangular};
use resfmb::env::{EnvAlgebra, EnvElement};
use resfmb::field::{Field, PrimeField, RationalFunctionField};
use resfmb::filtration::{dimension_subalgebras, predicates, restricted_closure, Analysis};
use resfmb::fmb::is_fm_basis;
use resfmb::format::{parse_algebra_over, render_algebra};
use resfmb::liealg::{LieElement, RestrictedLieAlgebra};
use resfmb::linalg::{solve, Subspace};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_element<F: Field>(env: &EnvAlgebra<F>, rng: &mut ChaCha8Rng) -> EnvElement<F> {
    let f = env.field();
    env.from_coords((0..env.dim()).map(|_| f.random(rng)).collect())
        .unwrap()
}

fn random_lie<F: Field>(alg: &RestrictedLieAlgebra<F>, rng: &mut ChaCha8Rng) -> LieElement<F> {
    LieElement::new((0..alg.dim()).map(|_| alg.field().random(rng)).collect())
}

fn small_algebra(seed: u64) -> RestrictedLieAlgebra<PrimeField> {
    let mut r = rng(seed);
    let p = [2, 3][r.gen_range(0..2)];
    let dim = r.gen_range(1..=if p == 2 { 4 } else { 3 });
    let abelian = r.gen_bool(0.3);
    let alg = random_triangular(&mut r, p, dim, abelian);
    random_change_of_basis(&mut r, &alg)
}

fn random_subspace(f: &PrimeField, n: usize, rng: &mut ChaCha8Rng) -> Subspace<PrimeField> {
    let k = rng.gen_range(0..=n);
    let rows = (0..k).map(|_| (0..n).map(|_| f.random(rng)).collect()).collect();
    Subspace::span(*f, n, rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplication_is_associative_and_unital(seed in any::<u64>()) {
        let alg = small_algebra(seed);
        let env = EnvAlgebra::new(Arc::new(alg));
        let mut r = rng(seed ^ 1);
        for _ in 0..5 {
            let (a, b, c) = (random_element(&env, &mut r), random_element(&env, &mut r), random_element(&env, &mut r));
            prop_assert_eq!(env.mul(&env.mul(&a, &b), &c), env.mul(&a, &env.mul(&b, &c)));
            prop_assert_eq!(env.mul(&a, &env.add(&b, &c)), env.add(&env.mul(&a, &b), &env.mul(&a, &c)));
            prop_assert_eq!(env.mul(&env.one(), &a), a.clone());
            prop_assert_eq!(env.mul(&a, &env.one()), a);
        }
    }

    #[test]
    fn commutators_of_generators_follow_the_bracket(seed in any::<u64>()) {
        let alg = small_algebra(seed);
        let mut r = rng(seed ^ 2);
        let (u, v) = (random_lie(&alg, &mut r), random_lie(&alg, &mut r));
        let env = EnvAlgebra::new(Arc::new(alg.clone()));
        let lhs = env.commutator(&env.embed(&u), &env.embed(&v));
        prop_assert_eq!(lhs, env.embed(&alg.bracket(&u, &v).unwrap()));
    }

    #[test]
    fn modular_law_and_membership(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = PrimeField::new([2, 3, 5, 7][r.gen_range(0..4)]).unwrap();
        let n = r.gen_range(1..=6);
        let (u, v) = (random_subspace(&f, n, &mut r), random_subspace(&f, n, &mut r));
        let sum = u.sum(&v).unwrap();
        let meet = u.intersect(&v).unwrap();
        prop_assert_eq!(sum.dim() + meet.dim(), u.dim() + v.dim());
        prop_assert!(meet.is_subspace_of(&u).unwrap() && meet.is_subspace_of(&v).unwrap());
        let w: Vec<u32> = (0..n).map(|_| f.random(&mut r)).collect();
        // w ∈ U iff the rows of U, as columns, solve for w
        let columns: Vec<Vec<u32>> = (0..n).map(|k| u.rows().iter().map(|row| row[k]).collect()).collect();
        let solvable = if u.is_zero() {
            w.iter().all(|c| *c == 0)
        } else {
            solve(&f, &columns, &w).unwrap().is_some()
        };
        prop_assert_eq!(u.contains(&w).unwrap(), solvable);
    }

    #[test]
    fn files_round_trip(seed in any::<u64>()) {
        let alg = small_algebra(seed);
        let again = parse_algebra_over(*alg.field(), &render_algebra(&alg)).unwrap();
        prop_assert_eq!(again, alg);
    }

    #[test]
    fn minimal_generators_generate(seed in any::<u64>()) {
        let alg = small_algebra(seed);
        let data = dimension_subalgebras(&alg).unwrap();
        let s = predicates(&alg, &data);
        prop_assert!(s.is_p_nilpotent);
        prop_assert_eq!(s.minimal_generators.len(), alg.dim() - data.dim_subalgebra(2).dim());
        prop_assert_eq!(restricted_closure(&alg, &s.minimal_generators).unwrap().dim(), alg.dim());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exponent_partition_ignores_the_basis(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = [2, 3][r.gen_range(0..2)];
        let dim = r.gen_range(1..=4);
        let alg = random_triangular(&mut r, p, dim, true);
        let other = random_change_of_basis(&mut r, &alg);
        let mut e1 = decompose(&alg).unwrap().exponents;
        let mut e2 = decompose(&other).unwrap().exponents;
        e1.sort();
        e2.sort();
        prop_assert_eq!(e1.iter().sum::<usize>(), alg.dim());
        prop_assert_eq!(e1, e2);
    }

    #[test]
    fn cyclic_monomials_are_fm_bases(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = [2, 3][r.gen_range(0..2)];
        let dim = r.gen_range(1..=3);
        let base = random_triangular(&mut r, p, dim, true);
        let alg = random_change_of_basis(&mut r, &base);
        let dec = decompose(&alg).unwrap();
        prop_assert!(dec.verify(&alg).unwrap());
        prop_assert_eq!(restricted_closure(&alg, &dec.generators).unwrap().dim(), alg.dim());
        let analysis = Analysis::new(Arc::new(alg)).unwrap();
        let adapted = decompose(&analysis.adapted).unwrap();
        let basis = monomial_fmb(&analysis.env, &adapted);
        let report = is_fm_basis(&analysis, &basis).unwrap();
        prop_assert!(report.is_valid());
        // the derived layer and congruence properties hold as well
        prop_assert!(report.filtration_failures.is_empty());
        prop_assert!(report.congruence_collisions.is_empty());
    }

    #[test]
    fn fast_omega_chain_matches_brute_force(seed in any::<u64>()) {
        let alg = small_algebra(seed);
        let analysis = Analysis::new(Arc::new(alg)).unwrap();
        let oracle = analysis.env.omega_powers_oracle().unwrap();
        prop_assert_eq!(&analysis.omega, &oracle);
        // D_m is the Lie part of ω^m
        let n = analysis.adapted.dim();
        let lie_rows: Vec<usize> = (0..n).map(|i| analysis.env.indexer().generator(i)).collect();
        let l = Subspace::coordinate(*analysis.env.field(), analysis.env.dim(), lie_rows);
        for (m, w) in oracle.iter().enumerate() {
            let heights_ok = analysis.heights.iter().filter(|&&h| h > m).count();
            prop_assert_eq!(l.intersect(w).unwrap().dim(), heights_ok);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pmap_is_semilinear_over_ratfunc(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = RationalFunctionField::new(2).unwrap();
        let text = "field = F2(t)\ndim = 3\nnames = x y z\npmap x = (t)*z\npmap y = z\n";
        let alg = parse_algebra_over(f, text).unwrap();
        let u = random_lie(&alg, &mut r);
        let v = random_lie(&alg, &mut r);
        let lambda = f.random(&mut r);
        let scaled = LieElement::new(u.coords.iter().map(|c| f.mul(&lambda, c)).collect());
        let expected: Vec<_> = alg.pmap(&u).unwrap().coords.iter().map(|c| f.mul(&f.frobenius(&lambda), c)).collect();
        prop_assert_eq!(alg.pmap(&scaled).unwrap().coords, expected);
        // abelian: the p-map is additive
        let sum = LieElement::new(u.coords.iter().zip(&v.coords).map(|(a, b)| f.add(a, b)).collect());
        let parts: Vec<_> = alg.pmap(&u).unwrap().coords.iter().zip(&alg.pmap(&v).unwrap().coords).map(|(a, b)| f.add(a, b)).collect();
        prop_assert_eq!(alg.pmap(&sum).unwrap().coords, parts);
    }

    #[test]
    fn shape_criterion_tracks_pth_roots(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = [2, 3][r.gen_range(0..2)];
        let f = RationalFunctionField::new(p).unwrap();
        let mut alpha = f.random(&mut r);
        if f.is_zero(&alpha) {
            alpha = f.one();
        }
        if r.gen_bool(0.5) {
            alpha = f.frobenius(&alpha);
        }
        let text = format!("field = F{p}(t)\ndim = 3\nnames = x y z\npmap x = {}*z\npmap y = z\n", f.format(&alpha));
        let alg = parse_algebra_over(f, &text).unwrap();
        let decision = shape_criterion(&alg).unwrap();
        prop_assert_eq!(matches!(decision, ShapeDecision::HasDecomposition(_)), f.pth_root(&alpha).is_some());
        if let ShapeDecision::HasDecomposition(dec) = decision {
            prop_assert!(dec.verify(&alg).unwrap());
        }
    }
}

//! Randomized property suites over seeded random algebras. The checks
//! themselves live in `cdga::testutil` so the acceptance suite can rerun
//! them; here each runs under proptest with 1000 cases.

use proptest::prelude::*;

use cdga::testutil;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 1000,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn koszul_sign_law(seed in any::<u64>()) {
        testutil::check_koszul_sign(seed);
    }

    #[test]
    fn graded_leibniz_rule(seed in any::<u64>()) {
        testutil::check_leibniz(seed);
    }

    #[test]
    fn d_square_is_zero(seed in any::<u64>()) {
        testutil::check_d_square(seed);
    }

    #[test]
    fn rank_nullity(seed in any::<u64>()) {
        testutil::check_rank_nullity(seed);
    }

    #[test]
    fn betti_ordering_invariance(seed in any::<u64>()) {
        testutil::check_betti_ordering_invariance(seed);
    }

    #[test]
    fn parse_print_round_trip(seed in any::<u64>()) {
        testutil::check_parse_print_round_trip(seed);
    }
}

#[test]
fn betti_agrees_with_dense_oracle_on_random_algebras() {
    for seed in 0..40u64 {
        let mut rng = testutil::TestRng::new(seed);
        let dga = testutil::random_dga(&mut rng, 3, 4);
        let max = 7;
        assert_eq!(
            cdga::cohomology::betti(&dga, max).unwrap(),
            testutil::oracle_betti(&dga, max),
            "seed {seed}"
        );
    }
}

#[test]
fn tensor_with_fresh_odd_generator_shifts_betti() {
    // b_n(B (x) Lambda(x_m)) = b_n(B) + b_{n-m}(B) for a d = 0 odd
    // generator x of degree m.
    for seed in 0..20u64 {
        let mut rng = testutil::TestRng::new(seed);
        let dga = testutil::random_dga(&mut rng, 2, 4);
        let m = [1usize, 3, 5][rng.below(3)];
        let (extended, _) = dga.with_generator("fresh_odd", m).unwrap();
        let base = cdga::cohomology::betti(&dga, 8).unwrap();
        let total = cdga::cohomology::betti(&extended, 8).unwrap();
        for n in 0..=8 {
            let shifted = if n >= m { base[n - m] } else { 0 };
            assert_eq!(total[n], base[n] + shifted, "seed {seed}, degree {n}");
        }
    }
}

#[test]
fn representatives_not_exact_coboundaries_exact() {
    for seed in 0..20u64 {
        let mut rng = testutil::TestRng::new(seed);
        let dga = testutil::random_dga(&mut rng, 2, 4);
        for n in 1..=5usize {
            let h = cdga::cohomology::cohomology_basis(&dga, n).unwrap();
            for rep in &h.representatives {
                assert_eq!(cdga::cohomology::is_exact(&dga, rep).unwrap(), None);
            }
            let w = testutil::random_homogeneous(&mut rng, &dga, n);
            let dw = dga.apply_d(&w).unwrap();
            if !dw.is_zero() {
                let theta = cdga::cohomology::is_exact(&dga, &dw)
                    .unwrap()
                    .expect("coboundaries are exact");
                assert_eq!(dga.apply_d(&theta).unwrap(), dw);
            }
        }
    }
}

#[test]
fn morphism_application_is_multiplicative() {
    use cdga::algebra::Element;
    for seed in 0..30u64 {
        let mut rng = testutil::TestRng::new(seed);
        let dga = testutil::random_dga(&mut rng, 2, 4);
        // The augmentation and the identity both commute with products.
        let eps = dga.augmentation();
        let id = dga.identity();
        let d1 = 1 + rng.below(4);
        let d2 = 1 + rng.below(4);
        let e1 = testutil::random_homogeneous(&mut rng, &dga, d1);
        let e2 = testutil::random_homogeneous(&mut rng, &dga, d2);
        let prod = dga.multiply(&e1, &e2).unwrap();
        for f in [&eps, &id] {
            let lhs = f.apply(&prod).unwrap();
            let rhs = f
                .target()
                .multiply(&f.apply(&e1).unwrap(), &f.apply(&e2).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs, "seed {seed}");
        }
        let _ = Element::one();
    }
}

#[test]
fn gysin_holds_on_random_attachments() {
    use cdga::cohomology::{cohomology_basis, CohomologyClass};
    use cdga::fibration::{attach_odd_sphere, gysin_verify};
    let mut done = 0;
    let mut seed = 0u64;
    while done < 10 {
        seed += 1;
        let mut rng = testutil::TestRng::new(seed);
        let base = testutil::random_dga(&mut rng, 2, 4);
        // Find a positive even degree with cohomology; fall back to a zero
        // class of degree 4 when everything even vanishes.
        let mut class = None;
        for twok in [2usize, 4, 6] {
            let h = cohomology_basis(&base, twok).unwrap();
            if h.dimension() > 0 {
                let idx = rng.below(h.dimension());
                class = Some(
                    CohomologyClass::new(&base, h.representatives[idx].clone()).unwrap(),
                );
                break;
            }
        }
        let beta = class.unwrap_or_else(|| CohomologyClass::zero(4));
        let (fib, _) = attach_odd_sphere(&base, &beta).unwrap();
        let report = gysin_verify(&fib, 8).unwrap();
        assert!(report.passed(), "seed {seed}: {:?}", report.first_failure());
        done += 1;
    }
}

#[test]
fn pushforward_along_quasi_iso_preserves_fiber_betti() {
    use cdga::algebra::{DGAlgebra, Element, Morphism};
    use cdga::fibration::{algebraic_fiber, pushforward, FiberGenerator, Fibration};

    // psi: Lambda(x_3) -> Lambda(x_3, a_2, u_1; du = a) is a
    // quasi-isomorphism (the extra pair is acyclic).
    let small = DGAlgebra::free([("x", 3)]).unwrap();
    let big = DGAlgebra::free([("x", 3), ("a", 2), ("u", 1)]).unwrap();
    let a = big.by_name("a").unwrap();
    let u = big.by_name("u").unwrap();
    let big = big.with_differential(u, Element::generator(a)).unwrap();
    let psi = Morphism::new(
        small.clone(),
        big,
        vec![Element::generator(small.by_name("x").unwrap())],
    )
    .unwrap();

    // Fibration over the small base: dv = x, dw = v^3 + ... keep it rich
    // enough to carry a nonzero fiber differential: dv = 0, dw = v^2.
    let (total, v) = small.with_generator("v", 2).unwrap();
    let (total, w) = total.with_generator("w", 3).unwrap();
    let v2 = total.power(&Element::generator(v), 2).unwrap();
    let total = total.with_differential(w, v2).unwrap();
    let fib = Fibration::from_parts(
        small,
        total,
        vec![
            FiberGenerator { id: v, stage: 0 },
            FiberGenerator { id: w, stage: 1 },
        ],
    )
    .unwrap();

    let pushed = pushforward(&fib, &psi).unwrap();
    let before = cdga::cohomology::betti(&algebraic_fiber(&fib).unwrap(), 10).unwrap();
    let after = cdga::cohomology::betti(&algebraic_fiber(&pushed).unwrap(), 10).unwrap();
    assert_eq!(before, after);
}

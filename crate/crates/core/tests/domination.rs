mod common;

use mfloor_core::cone::{ConeMode, MarketCone, TruncationSpec};
use mfloor_core::domination::{
    divergence_witness_eps, duality_check, find_dominating_density, min_dominating_mass,
    sup_over_truncation, truncation_sweep, FloorSolution, SupValue, SweepQuantity,
};
use mfloor_core::markets::{
    build_example1, build_example2, build_example3, dyadic_eps, example2_g, DensityRule,
    FamilyKind,
};
use mfloor_core::orlicz::EpsSequence;
use mfloor_core::prob::{int, pow2, rat, FiniteProbSpace, RandomVariable, Rational};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn eps_trunc(eps: Vec<Rational>) -> TruncationSpec {
    TruncationSpec::EpsSequence(EpsSequence::new(eps).unwrap())
}

#[test]
fn example2_min_mass_matches_vertex_enumeration() {
    let m = build_example2(4).unwrap();
    let f = m.density(&DensityRule::Ones, int(0));
    let objective = m.space.probs().to_vec();
    let (oracle, g_star) = common::vertex_min(&objective, &common::floor_rows(&m.cone, &f)).unwrap();
    assert_eq!(oracle, rat(79, 32));
    let report = find_dominating_density(&m.cone, &f).unwrap();
    assert_eq!(report.min_l1_norm, Some(oracle));
    assert_eq!(report.dominating_g.unwrap().values(), &g_star[..]);
}

#[test]
fn example2_explicit_density_is_feasible() {
    let m = build_example2(4).unwrap();
    let f = m.density(&DensityRule::Ones, int(0));
    let g = example2_g(&m, &f).unwrap();
    for n in 1..=4 {
        assert_eq!(g.value(m.atom(2 * n - 1)), &int(1));
        assert_eq!(g.value(m.atom(2 * n)), &pow2(n as i64));
    }
    assert!(g.dominates(&f).unwrap());
    for x in m.cone.generators() {
        assert!(x.pairing(&g).unwrap().is_zero());
    }
}

#[test]
fn martingale_floor() {
    let s = FiniteProbSpace::uniform(2).unwrap();
    let x = RandomVariable::from_ints(&s, &[1, -1]).unwrap();
    let cone = MarketCone::new(&s, vec![x], ConeMode::Subspace).unwrap();
    let f = RandomVariable::from_ints(&s, &[1, 1]).unwrap();
    let r = find_dominating_density(&cone, &f).unwrap();
    assert_eq!(r.dominating_g, Some(f));
    assert_eq!(r.min_l1_norm, Some(int(1)));
}

#[test]
fn trivial_cone() {
    let s = FiniteProbSpace::uniform(3).unwrap();
    let f = RandomVariable::from_ints(&s, &[2, -1, 0]).unwrap();
    for mode in common::MODES {
        let cone = MarketCone::new(&s, vec![], mode).unwrap();
        assert!(duality_check(&cone, &f).unwrap());
        let r = find_dominating_density(&cone, &f).unwrap();
        assert!(r.dominating_g.is_some());
        if mode != ConeMode::ConeMinusPositives {
            assert_eq!(r.sup_c1, SupValue::Finite(int(0)));
        }
        let plain = min_dominating_mass(&cone, &f).unwrap();
        let FloorSolution::Feasible(g, _) = plain else { panic!("feasible") };
        if mode == ConeMode::ConeMinusPositives {
            assert_eq!(g, f.positive_part());
        } else {
            assert_eq!(g, f);
        }
    }
}

#[test]
fn example3_sup_bound_small_levels() {
    for n in 1..=5 {
        let m = build_example3(n).unwrap();
        let sup = sup_over_truncation(&m.cone, &m.f, &TruncationSpec::UnitBall, &[]).unwrap();
        assert!(sup.value.finite().unwrap() <= &rat(4, 3), "level {n}");
    }
}

#[test]
fn example1_point_mass_cone_bounds_the_unit_ball() {
    let seq = build_example1(dyadic_eps(5)).unwrap();
    let cone = seq.point_mass_cone().unwrap();
    let one = RandomVariable::constant(&seq.space, int(1));
    let ball = sup_over_truncation(&cone, &one, &TruncationSpec::UnitBall, &[]).unwrap();
    assert!(ball.value.finite().unwrap() <= &int(1));
    let eps = eps_trunc(dyadic_eps(5));
    let witnessed = sup_over_truncation(&cone, &one, &eps, &seq.xs).unwrap();
    // n(1 - 2 eps_n) at n = 5
    assert_eq!(witnessed.value, SupValue::Finite(rat(75, 16)));
}

#[test]
fn divergence_witness_examples() {
    let m = build_example3(10).unwrap();
    let eps = EpsSequence::new(dyadic_eps(10)).unwrap();
    let x = divergence_witness_eps(&m.cone, &m.f, &eps, &int(3)).unwrap().unwrap();
    // x_6 + ... + x_10
    assert_eq!(x.pairing(&m.f).unwrap(), int(5) - rat(31, 1024));
    let trunc = TruncationSpec::EpsSequence(eps);
    assert!(m.cone.membership_in_truncation(&trunc, &x).unwrap());

    let ones = EpsSequence::new(vec![int(1); 4]).unwrap();
    let m4 = build_example3(4).unwrap();
    let x = divergence_witness_eps(&m4.cone, &m4.f, &ones, &int(0)).unwrap().unwrap();
    assert_eq!(x.pairing(&m4.f).unwrap(), int(2) - rat(3, 4));

    let m1 = build_example3(1).unwrap();
    let eps1 = EpsSequence::new(dyadic_eps(1)).unwrap();
    assert!(divergence_witness_eps(&m1.cone, &m1.f, &eps1, &int(3)).unwrap().is_none());
}

#[test]
fn example3_generator_sums_pair_exactly() {
    let m = build_example3(6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let picks: Vec<usize> = (1..=6).filter(|_| rng.gen_bool(0.5)).collect();
        let mut x = RandomVariable::zero(&m.space);
        for &n in &picks {
            x = x.add(&m.cone.generators()[n - 1]).unwrap();
        }
        let expected: Rational = picks.iter().map(|&n| int(1) - pow2(-(n as i64))).sum();
        assert_eq!(x.pairing(&m.f).unwrap(), expected);
    }
}

#[test]
fn sup_equals_min_mass_minus_expectation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..120 {
        let mode = common::MODES[rng.gen_range(0..3)];
        let (cone, f) = common::random_market(&mut rng, 5, 3, mode);
        let sup = sup_over_truncation(&cone, &f, &TruncationSpec::UnitBall, &[]).unwrap();
        let oracle = common::vertex_min(cone.space().probs(), &common::floor_rows(&cone, &f));
        match (sup.value, min_dominating_mass(&cone, &f).unwrap()) {
            (SupValue::Finite(s), FloorSolution::Feasible(g, mass)) => {
                assert_eq!(s, &mass - f.expectation());
                assert_eq!(oracle.map(|o| o.0), Some(mass));
                assert!(g.dominates(&f).unwrap());
            }
            (SupValue::Unbounded, FloorSolution::Infeasible(x)) => {
                assert!(oracle.is_none());
                assert!(x.is_nonnegative());
                assert!(cone.contains(&x).unwrap());
                assert_eq!(x.pairing(&f).unwrap(), int(1));
                let ray = sup.ray.unwrap();
                assert!(ray.is_nonnegative() && ray.pairing(&f).unwrap() > Rational::zero());
            }
            (s, g) => panic!("disagreement: {s:?} {g:?}"),
        }
    }
}

#[test]
fn dominating_density_satisfies_polar_constraints() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..120 {
        let mode = common::MODES[rng.gen_range(0..3)];
        let (cone, f) = common::random_market(&mut rng, 6, 3, mode);
        let r = find_dominating_density(&cone, &f).unwrap();
        assert_eq!(r.sup_c1.is_finite(), r.dominating_g.is_some());
        if cone.no_arbitrage_check().unwrap().holds {
            assert!(r.dominating_g.is_some());
        }
        if let Some(g) = &r.dominating_g {
            assert!(g.dominates(&f).unwrap());
            for x in cone.generators() {
                let p = x.pairing(g).unwrap();
                if mode == ConeMode::Subspace {
                    assert!(p.is_zero());
                } else {
                    assert!(p <= Rational::zero());
                }
            }
            if mode == ConeMode::ConeMinusPositives {
                assert!(g.is_nonnegative());
            }
            assert_eq!(r.min_l1_norm.as_ref(), Some(&g.l1_norm()));
            // no feasible vertex has a smaller l1 norm when f >= 0
            if f.is_nonnegative() {
                assert_eq!(r.min_l1_norm, Some(g.expectation()));
            }
        }
        if let Some(x) = &r.certificate {
            assert!(cone.contains(x).unwrap());
            assert!(x.is_nonnegative());
        }
    }
}

#[test]
fn scaling_the_floor() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..60 {
        let mode = common::MODES[rng.gen_range(0..3)];
        let (cone, f) = common::random_market(&mut rng, 5, 3, mode);
        let a = rat(rng.gen_range(1..=7), 1 << rng.gen_range(0..=2));
        let fa = f.scale(&a);
        let s1 = sup_over_truncation(&cone, &f, &TruncationSpec::UnitBall, &[]).unwrap().value;
        let sa = sup_over_truncation(&cone, &fa, &TruncationSpec::UnitBall, &[]).unwrap().value;
        match (s1, sa) {
            (SupValue::Finite(x), SupValue::Finite(y)) => assert_eq!(&x * &a, y),
            (SupValue::Unbounded, SupValue::Unbounded) => {}
            other => panic!("{other:?}"),
        }
        let g1 = find_dominating_density(&cone, &f).unwrap().dominating_g.is_some();
        let ga = find_dominating_density(&cone, &fa).unwrap().dominating_g.is_some();
        assert_eq!(g1, ga);
    }
}

#[test]
fn larger_eps_never_lowers_the_sup() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..60 {
        let mode = common::MODES[rng.gen_range(0..3)];
        let (cone, f) = common::random_market(&mut rng, 5, 3, mode);
        let k = rng.gen_range(1..=3);
        let small: Vec<Rational> = (0..k).map(|_| rat(rng.gen_range(1..=4), 8)).collect();
        let large: Vec<Rational> = small.iter().map(|e| e * int(2)).collect();
        let a = sup_over_truncation(&cone, &f, &eps_trunc(small), &[]).unwrap().value;
        let b = sup_over_truncation(&cone, &f, &eps_trunc(large.clone()), &[]).unwrap().value;
        match (&a, &b) {
            (SupValue::Finite(x), SupValue::Finite(y)) => assert!(x <= y),
            (_, SupValue::Unbounded) => {}
            other => panic!("{other:?}"),
        }
        // the unit ball sits inside the eps set once every eps_k >= 1
        let ball = sup_over_truncation(&cone, &f, &TruncationSpec::UnitBall, &[]).unwrap().value;
        let wide = sup_over_truncation(&cone, &f, &eps_trunc(vec![int(1); k]), &[]).unwrap().value;
        match (&ball, &wide) {
            (SupValue::Finite(x), SupValue::Finite(y)) => assert!(x <= y),
            (_, SupValue::Unbounded) => {}
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn example2_minimal_density_is_bounded_by_the_explicit_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..30 {
        let n = rng.gen_range(1..=5);
        let m = build_example2(n).unwrap();
        let table = (0..2 * n).map(|_| rat(rng.gen_range(0..=4), 1 << rng.gen_range(0..=3))).collect();
        let f = m.density(&DensityRule::Table(table), int(0));
        let r = find_dominating_density(&m.cone, &f).unwrap();
        let explicit = example2_g(&m, &f).unwrap();
        assert!(r.min_l1_norm.unwrap() <= explicit.l1_norm());
        assert!(duality_check(&m.cone, &f).unwrap());
    }
}

#[test]
fn sweeps() {
    let levels: Vec<usize> = (1..=10).collect();
    let ones = truncation_sweep(
        FamilyKind::Example2,
        &DensityRule::OnesOdd,
        &TruncationSpec::UnitBall,
        &levels,
        SweepQuantity::MinL1,
        &int(5),
    )
    .unwrap();
    assert!(ones.diverging);
    for (row, n) in ones.rows.iter().zip(1..) {
        // sum over pairs of 1/2 + 2^-k-1
        let expected: Rational = (1..=n).map(|k| rat(1, 2) + pow2(-k - 1)).sum();
        assert_eq!(row.min_l1_norm, Some(expected));
    }

    let geo = truncation_sweep(
        FamilyKind::Example2,
        &DensityRule::GeometricOdd,
        &TruncationSpec::UnitBall,
        &levels,
        SweepQuantity::MinL1,
        &int(1),
    )
    .unwrap();
    assert!(!geo.diverging);
    for row in &geo.rows {
        assert!(row.min_l1_norm.as_ref().unwrap() < &rat(2, 3));
    }

    let three = truncation_sweep(
        FamilyKind::Example3,
        &DensityRule::Ones,
        &TruncationSpec::UnitBall,
        &[1, 2, 3, 4],
        SweepQuantity::Sup,
        &rat(4, 3),
    )
    .unwrap();
    assert!(!three.diverging);
    for row in &three.rows {
        assert!(row.sup.finite().unwrap() <= &rat(4, 3));
    }

    let one = truncation_sweep(
        FamilyKind::Example1,
        &DensityRule::Ones,
        &eps_trunc(dyadic_eps(6)),
        &[2, 4, 6],
        SweepQuantity::Sup,
        &int(5),
    )
    .unwrap();
    assert!(one.diverging);
    assert_eq!(one.rows[2].sup, SupValue::Finite(rat(93, 16)));
}

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use super::*;

fn q() -> FieldTower {
    FieldTower::rationals()
}

fn lts(t1: u32, t2: u32, terms: &[(u32, i64, i64)]) -> LaurentTailSeries {
    let k = q();
    LaurentTailSeries::from_terms(&k, t1, t2, terms.iter().map(|&(i, j, a)| (i, j, k.int(a))))
        .unwrap()
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * k)
}

/// `[exp(u2) - 1] + [exp(u1/u2) - 1]` through `u2^n2` and `u1^n1`.
fn exp_image(n1: u32, n2: u32) -> LaurentTailSeries {
    let k = q();
    let inv = |m: u32| k.rational(BigRational::new(1.into(), factorial(m)));
    let mut terms: Vec<(u32, i64, FieldElem)> =
        (1..=n2).map(|m| (0, i64::from(m), inv(m))).collect();
    terms.extend((1..=n1).map(|m| (m, -i64::from(m), inv(m))));
    LaurentTailSeries::from_terms(&k, n1, n2, terms).unwrap()
}

#[test]
fn vhat_examples() {
    let w = lts(4, 6, &[(2, -3, 1), (2, -1, 1), (3, 0, 1)]);
    assert_eq!(vhat(&w), Rank2Order::Finite(Rank2Value(2, -3)));
    let e = lts(3, 6, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]);
    assert_eq!(vhat(&e), Rank2Order::Finite(Rank2Value(0, 1)));
    assert_eq!(vhat(&exp_image(4, 8)), Rank2Order::Finite(Rank2Value(0, 1)));
    assert_eq!(vhat(&lts(3, 3, &[])), Rank2Order::Inconclusive);
}

#[test]
fn valuation_ring_membership() {
    assert!(!in_valuation_ring(&lts(3, 6, &[(0, -1, 1)])));
    assert!(in_valuation_ring(&lts(3, 6, &[(1, -5, 1)])));
    assert!(in_valuation_ring(&lts(3, 6, &[])));
    for j in 1..5 {
        assert!(!in_valuation_ring(&lts(3, 6, &[(0, -j, 1)])));
    }
}

#[test]
fn window_is_enforced() {
    let k = q();
    assert!(matches!(
        LaurentTailSeries::from_terms(&k, 2, 3, [(0, -4, k.one())]),
        Err(Error::OutsideWindow(_))
    ));
    let a = lts(2, 3, &[(0, -3, 1)]);
    assert!(matches!(a.mul(&a), Err(Error::OutsideWindow(_))));
}

#[test]
fn division_by_a_unit() {
    // 1 / (1 - u2) = 1 + u2 + u2^2 + ...
    let one = lts(2, 6, &[(0, 0, 1)]);
    let d = lts(2, 6, &[(0, 0, 1), (0, 1, -1)]);
    let r = one.div(&d).unwrap();
    assert_eq!(
        r.mul(&d)
            .unwrap()
            .terms()
            .map(|(i, j, _)| (i, j))
            .collect::<Vec<_>>(),
        vec![(0, 0)]
    );
    assert_eq!(r.t2(), 6);
    assert!(matches!(
        lts(2, 6, &[(0, 1, 1)]).div(&lts(2, 6, &[(1, 0, 1)])),
        Err(Error::NotASeries(_))
    ));
}

#[test]
fn blowup_subtracts_values() {
    let x1 = lts(4, 10, &[(0, 1, 1), (1, -1, 1)]);
    let x2 = lts(4, 10, &[(0, 3, 2), (1, 0, 1)]);
    let q = x2.div(&x1).unwrap();
    assert_eq!(
        vhat(&q).finite().unwrap(),
        Rank2Value(0, 3).sub(Rank2Value(0, 1))
    );
}

#[test]
fn independent_values_are_monomial() {
    let c = rank2_classify(&[lts(3, 8, &[(0, 1, 1)]), lts(3, 8, &[(1, 0, 1)])], 10).unwrap();
    assert!(c.steps.is_empty());
    assert_eq!(
        c.outcome,
        Rank2Outcome::Monomial {
            values: [Rank2Value(0, 1), Rank2Value(1, 0)],
            det: -1
        }
    );
}

#[test]
fn one_change_then_monomial() {
    let c = rank2_classify(
        &[lts(3, 8, &[(0, 1, 1)]), lts(3, 8, &[(0, 1, 1), (1, 0, 1)])],
        10,
    )
    .unwrap();
    assert_eq!(c.steps.len(), 1);
    assert!(c.steps[0].is_change());
    match c.outcome {
        Rank2Outcome::Monomial { values, det } => {
            assert_eq!(values, [Rank2Value(0, 1), Rank2Value(1, 0)]);
            assert_eq!(det.abs(), 1);
        }
        o => panic!("{o:?}"),
    }
    assert_eq!(replay(&c.input, &c.steps).unwrap(), c.coords);
}

#[test]
fn exponential_image_never_settles() {
    let x1 = lts(3, 40, &[(0, 1, 1)]);
    let x2 = exp_image(3, 40);
    for budget in [5, 10, 20] {
        let c = rank2_classify(&[x1.clone(), x2.clone()], budget).unwrap();
        assert!(matches!(c.outcome, Rank2Outcome::BudgetExhausted { .. }));
        let subtracted: Vec<FieldElem> = c
            .steps
            .iter()
            .filter_map(|s| match &s.kind {
                StepKind::CoordinateChange { coeff, .. } => Some(coeff.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(c.steps.len(), budget);
        assert_eq!(subtracted.len(), budget.div_ceil(2));
        for (m, a) in subtracted.iter().enumerate() {
            assert_eq!(
                *a,
                q().rational(BigRational::new(1.into(), factorial(m as u32 + 1)))
            );
        }
        assert_eq!(replay(&c.input, &c.steps).unwrap(), c.coords);
    }
}

fn small() -> impl Strategy<Value = LaurentTailSeries> {
    prop::collection::vec((0u32..3, -2i64..3, -3i64..4), 1..5).prop_map(|t| lts(6, 12, &t))
}

proptest! {
    #[test]
    fn vhat_is_a_valuation(a in small(), b in small()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let (va, vb) = (vhat(&a).finite().unwrap(), vhat(&b).finite().unwrap());
        let prod = vhat(&a.mul(&b).unwrap());
        prop_assume!(prod != Rank2Order::Inconclusive);
        prop_assert_eq!(prod, Rank2Order::Finite(va.add(vb)));
        if let Rank2Order::Finite(s) = vhat(&a.add(&b).unwrap()) {
            prop_assert!(s >= va.min(vb));
        }
    }

    #[test]
    fn unit_value_residues_are_constants(a in small()) {
        if let Some(r) = residue(&a) {
            prop_assert!(r.is_constant());
        }
    }
}

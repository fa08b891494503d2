use proptest::prelude::*;

use super::*;
use crate::field::FieldTower;

fn q() -> FieldTower {
    FieldTower::rationals()
}

fn poly(n: usize, trunc: Option<u32>, terms: &[(&[i64], i64)]) -> TruncSeries {
    let t = q();
    TruncSeries::from_terms(
        &t,
        n,
        trunc,
        terms
            .iter()
            .map(|(e, c)| (ExpVector(e.to_vec()), t.int(*c))),
    )
    .unwrap()
}

fn val(rows: &[&[i64]]) -> MonomialValuation {
    MonomialValuation::new(IntMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap())
        .unwrap()
}

fn fin(v: &[i64]) -> Value {
    Value::Finite(ValueVector(v.to_vec()))
}

#[test]
fn l_degree_examples() {
    assert_eq!(
        val(&[&[1, 1]]).l_degree(&ExpVector(vec![2, 3])).unwrap(),
        ValueVector(vec![5])
    );
    assert_eq!(
        val(&[&[1, 0], &[0, 1]])
            .l_degree(&ExpVector(vec![4, 7]))
            .unwrap(),
        ValueVector(vec![4, 7])
    );
    assert_eq!(
        val(&[&[2, 3]]).l_degree(&ExpVector(vec![3, 0])).unwrap(),
        ValueVector(vec![6])
    );
    assert!(matches!(
        val(&[&[2, 3]]).l_degree(&ExpVector(vec![-1, 0])),
        Err(Error::NegativeExponent(_))
    ));
}

#[test]
fn invalid_weights() {
    let bad = |r: Vec<Vec<i64>>| MonomialValuation::new(IntMatrix::from_rows(r).unwrap());
    assert!(matches!(
        bad(vec![vec![2, 4]]),
        Err(Error::InvalidWeights(_))
    ));
    assert!(matches!(
        bad(vec![vec![1, -1]]),
        Err(Error::InvalidWeights(_))
    ));
    assert!(matches!(
        bad(vec![vec![1, 0]]),
        Err(Error::InvalidWeights(_))
    ));
}

#[test]
fn value_examples() {
    let v = val(&[&[1, 1]])
        .value(&poly(2, Some(4), &[(&[1, 0], 1), (&[0, 2], 1)]))
        .unwrap();
    assert_eq!(
        v,
        CertifiedValue {
            value: fin(&[1]),
            certified: true
        }
    );
    let v = val(&[&[2, 3]])
        .value(&poly(2, Some(6), &[(&[3, 0], 1), (&[0, 2], 1)]))
        .unwrap();
    assert_eq!(
        v,
        CertifiedValue {
            value: fin(&[6]),
            certified: true
        }
    );
    let v = val(&[&[1, 0], &[0, 1]])
        .value(&poly(2, Some(1), &[(&[0, 1], 1)]))
        .unwrap();
    assert_eq!(
        v,
        CertifiedValue {
            value: fin(&[0, 1]),
            certified: true
        }
    );
    // X1^5 at D = 5 with B = [[1, 1]]: bound 6 > 5
    let v = val(&[&[2, 1]])
        .value(&poly(2, Some(2), &[(&[2, 0], 1)]))
        .unwrap();
    assert!(!v.certified);
    let zero = val(&[&[1, 1]])
        .value(&TruncSeries::zero(&q(), 2, None))
        .unwrap();
    assert_eq!(
        zero,
        CertifiedValue {
            value: Value::Infinity,
            certified: true
        }
    );
}

#[test]
fn initial_form_examples() {
    let f = poly(2, None, &[(&[1, 0], 2), (&[0, 1], 3), (&[1, 1], 1)]);
    assert_eq!(
        val(&[&[1, 1]]).initial_form(&f).unwrap(),
        poly(2, None, &[(&[1, 0], 2), (&[0, 1], 3)])
    );
    let f = poly(2, None, &[(&[3, 0], 1), (&[0, 2], 1), (&[4, 0], 1)]);
    assert_eq!(
        val(&[&[2, 3]]).initial_form(&f).unwrap(),
        poly(2, None, &[(&[3, 0], 1), (&[0, 2], 1)])
    );
    let f = poly(2, None, &[(&[0, 1], 1), (&[1, 1], 1)]);
    assert_eq!(
        val(&[&[1, 0], &[0, 1]]).initial_form(&f).unwrap(),
        poly(2, None, &[(&[0, 1], 1)])
    );
    let g = poly(2, Some(2), &[(&[2, 0], 1)]);
    assert_eq!(val(&[&[2, 1]]).initial_form(&g), Err(Error::Uncertified));
}

#[test]
fn residue_generator_examples() {
    assert_eq!(
        val(&[&[1, 1]]).residue_generators(),
        vec![ExpVector(vec![1, -1])]
    );
    assert_eq!(
        val(&[&[2, 3]]).residue_generators(),
        vec![ExpVector(vec![3, -2])]
    );
    assert!(val(&[&[1, 0], &[0, 1]]).residue_generators().is_empty());
    let v = val(&[&[1, 2, 1]]);
    for g in v.residue_generators() {
        assert!(v.laurent_degree(&g).unwrap().is_zero());
    }
}

#[test]
fn residue_examples() {
    let v = val(&[&[1, 1]]);
    let x1 = poly(2, None, &[(&[1, 0], 1)]);
    let x2 = poly(2, None, &[(&[0, 1], 1)]);
    assert_eq!(v.residue_of(&x2, &x1).unwrap().to_string(), "(1)/(w1)");
    assert_eq!(v.residue_of(&x1, &x1).unwrap().to_string(), "1");
    let f = poly(2, None, &[(&[2, 0], 1), (&[1, 1], 1)]);
    let g = poly(2, None, &[(&[2, 0], 1)]);
    assert_eq!(v.residue_of(&f, &g).unwrap().to_string(), "(w1 + 1)/(w1)");
    let x1sq = poly(2, None, &[(&[2, 0], 1)]);
    assert!(matches!(
        v.residue_of(&x1sq, &x1),
        Err(Error::UnequalValues(_))
    ));
    // B = [[2, 3]]: X1^3 / X2^2 is the generator itself
    let v = val(&[&[2, 3]]);
    let f = poly(2, None, &[(&[3, 0], 1)]);
    let g = poly(2, None, &[(&[0, 2], 2)]);
    assert_eq!(v.residue_of(&f, &g).unwrap().to_string(), "1/2*w1");
}

fn random_poly(n: usize) -> impl Strategy<Value = TruncSeries> {
    proptest::collection::vec((proptest::collection::vec(0i64..4, n), -3i64..=3), 1..5).prop_map(
        move |terms| {
            let t = q();
            TruncSeries::from_terms(
                &t,
                n,
                None,
                terms.into_iter().map(|(e, c)| (ExpVector(e), t.int(c))),
            )
            .unwrap()
        },
    )
}

proptest! {
    #[test]
    fn value_is_additive_and_ultrametric(f in random_poly(3), g in random_poly(3), w in proptest::collection::vec(1i64..4, 3)) {
        let mut cols = vec![vec![1, 0], vec![w[0], 1], vec![w[1], w[2]]];
        cols.rotate_left((w[0] % 3) as usize);
        let v = MonomialValuation::from_columns(&cols).unwrap();
        let (vf, vg) = (v.value(&f).unwrap().value, v.value(&g).unwrap().value);
        let vfg = v.value(&f.mul(&g).unwrap()).unwrap().value;
        match (&vf, &vg) {
            (Value::Finite(a), Value::Finite(b)) => prop_assert_eq!(vfg, Value::Finite(a.add(b))),
            _ => prop_assert_eq!(vfg, Value::Infinity),
        }
        let vsum = v.value(&f.add(&g).unwrap()).unwrap().value;
        prop_assert!(vsum >= vf.clone().min(vg.clone()));
        if vf != vg {
            prop_assert_eq!(vsum, vf.min(vg));
        }
    }

    #[test]
    fn residue_of_product_ratio_is_one(f in random_poly(2), a in 1i64..4, b in 1i64..4) {
        prop_assume!(!f.is_zero());
        let v = MonomialValuation::from_columns(&[vec![a], vec![b]]);
        prop_assume!(v.is_ok());
        let v = v.unwrap();
        let r = v.residue_of(&f, &f).unwrap();
        prop_assert_eq!(r.to_string(), "1");
    }
}

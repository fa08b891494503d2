use num_rational::BigRational;
use proptest::prelude::*;

use super::*;

fn tower() -> FieldTower {
    FieldTower::transcendental(["u"]).unwrap()
}

fn poly(t: &FieldTower, n: usize, trunc: Option<u32>, terms: &[(&[i64], i64)]) -> TruncSeries {
    TruncSeries::from_terms(
        t,
        n,
        trunc,
        terms
            .iter()
            .map(|(e, c)| (ExpVector(e.to_vec()), t.int(*c))),
    )
    .unwrap()
}

fn pseries(t: &FieldTower, trunc: u32, c: &[FieldElem]) -> ParamSeries {
    ParamSeries::from_coeffs(t, trunc, c.to_vec()).unwrap()
}

#[test]
fn arithmetic_examples() {
    let t = tower();
    let x1 = TruncSeries::variable(&t, 2, 0, None);
    let x2 = TruncSeries::variable(&t, 2, 1, None);
    assert_eq!(
        series_arith(&x1, &x2, SeriesOp::Mul).unwrap(),
        poly(&t, 2, None, &[(&[1, 1], 1)])
    );
    let a = poly(&t, 1, Some(3), &[(&[0], 1), (&[1], 1)]);
    let b = poly(&t, 1, Some(3), &[(&[0], 1), (&[1], -1)]);
    assert_eq!(
        a.mul(&b).unwrap(),
        poly(&t, 1, Some(3), &[(&[0], 1), (&[2], -1)])
    );
    let s = x1.add(&x2).unwrap().truncate(2);
    assert_eq!(
        s.pow(2),
        poly(&t, 2, Some(2), &[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)])
    );
    assert_eq!(s.pow(2).to_string(), "X1^2 + 2*X1*X2 + X2^2 + O(3)");
    let y = TruncSeries::variable(&t, 3, 0, None);
    assert!(matches!(x1.add(&y), Err(Error::ArityMismatch { .. })));
}

#[test]
fn truncation_is_the_minimum() {
    let t = tower();
    let a = poly(&t, 1, Some(5), &[(&[1], 1)]);
    let b = poly(&t, 1, None, &[(&[4], 1)]);
    assert_eq!(a.add(&b).unwrap().truncation(), Some(5));
    assert_eq!(
        a.truncate(3).mul(&b).unwrap(),
        TruncSeries::zero(&t, 1, Some(3))
    );
}

#[test]
fn substitution_examples() {
    let t = tower();
    let u = t.generator("u").unwrap();
    let tt = pseries(&t, 8, &[t.zero(), t.one()]);
    let ut = pseries(&t, 8, &[t.zero(), u.clone()]);
    let got = substitute(&poly(&t, 2, None, &[(&[1, 1], 1)]), &[tt.clone(), ut]).unwrap();
    assert_eq!(got, ParamSeries::monomial(u.clone(), 2, 8));
    let t_ut2 = pseries(&t, 8, &[t.zero(), t.one(), u.clone()]);
    let got = substitute(
        &poly(&t, 2, None, &[(&[0, 1], 1), (&[1, 0], -1)]),
        &[tt, t_ut2],
    )
    .unwrap();
    assert_eq!(got, ParamSeries::monomial(u, 2, 8));
    let t2 = ParamSeries::monomial(t.one(), 2, 8);
    let t3 = ParamSeries::monomial(t.one(), 3, 8);
    let got = substitute(
        &poly(&t, 2, None, &[(&[3, 0], 1), (&[0, 2], -1)]),
        &[t2, t3],
    )
    .unwrap();
    assert_eq!(t_order(&got), TOrder::Inconclusive);
}

#[test]
fn substitution_respects_input_truncation() {
    let t = tower();
    let f = poly(&t, 1, Some(2), &[(&[1], 1)]);
    let got = substitute(&f, &[ParamSeries::monomial(t.one(), 2, 20)]).unwrap();
    assert_eq!(got.truncation(), 5);
    let c = ParamSeries::monomial(t.one(), 0, 5);
    assert!(matches!(substitute(&f, &[c]), Err(Error::NotASeries(_))));
}

#[test]
fn order_examples() {
    let t = tower();
    let u = t.generator("u").unwrap();
    assert_eq!(
        t_order(&pseries(&t, 4, &[t.zero(), t.one(), t.one()])),
        TOrder::Finite(1)
    );
    assert_eq!(t_order(&ParamSeries::monomial(u, 3, 6)), TOrder::Finite(3));
    assert_eq!(t_order(&ParamSeries::zero(&t, 8)), TOrder::Inconclusive);
}

#[test]
fn division_by_a_series_of_positive_order() {
    let t = tower();
    let u = t.generator("u").unwrap();
    // (t + u t^2) / t = 1 + u t, known through T - 1
    let a = pseries(&t, 6, &[t.zero(), t.one(), u.clone()]);
    let q = a.div(&ParamSeries::monomial(t.one(), 1, 6)).unwrap();
    assert_eq!(q, pseries(&t, 5, &[t.one(), u.clone()]));
    // (t^2) / (t + t^2) = t - t^2 + t^3 - ...
    let b = pseries(&t, 6, &[t.zero(), t.one(), t.one()]);
    let q = ParamSeries::monomial(t.one(), 2, 6).div(&b).unwrap();
    assert_eq!(q.mul(&b).unwrap(), ParamSeries::monomial(t.one(), 2, 5));
    assert!(b.div(&ParamSeries::monomial(t.one(), 2, 6)).is_err());
}

#[test]
fn monomial_transform_examples() {
    let t = tower();
    let f = poly(&t, 2, None, &[(&[1, 1], 1)]);
    let id = vec![vec![1, 0], vec![0, 1]];
    assert_eq!(apply_monomial_transform(&id, &f).unwrap(), f);
    let m = vec![vec![1, 0], vec![-1, 1]];
    assert_eq!(
        apply_monomial_transform(&m, &f).unwrap(),
        poly(&t, 2, None, &[(&[0, 1], 1)])
    );
    let x2 = poly(&t, 2, None, &[(&[0, 1], 1)]);
    assert!(matches!(
        apply_monomial_transform(&m, &x2),
        Err(Error::NotASeries(_))
    ));
    let singular = vec![vec![1, 1], vec![1, 1]];
    assert_eq!(
        apply_monomial_transform(&singular, &f),
        Err(Error::NotUnimodular(0))
    );
}

#[test]
fn printing() {
    let t = tower();
    let u = t.generator("u").unwrap();
    let s = pseries(
        &t,
        8,
        &[t.zero(), t.one(), u.clone(), -&t.one(), &u + &t.one()],
    );
    assert_eq!(s.to_string(), "t + u*t^2 - t^3 + (u + 1)*t^4 + O(9)");
    let f = TruncSeries::from_terms(
        &t,
        2,
        None,
        [
            (
                ExpVector(vec![1, 0]),
                t.rational(BigRational::new(3.into(), 2.into())),
            ),
            (ExpVector(vec![0, 2]), -&u),
        ],
    )
    .unwrap();
    assert_eq!(f.to_string(), "3/2*X1 - u*X2^2");
    assert_eq!(TruncSeries::zero(&t, 2, None).to_string(), "0");
}

fn small_poly(n: usize) -> impl Strategy<Value = TruncSeries> {
    proptest::collection::vec((proptest::collection::vec(0i64..3, n), -3i64..=3), 0..5).prop_map(
        move |terms| {
            let t = tower();
            let u = t.generator("u").unwrap();
            TruncSeries::from_terms(
                &t,
                n,
                None,
                terms
                    .into_iter()
                    .map(|(e, c)| (ExpVector(e), &t.int(c) + &u)),
            )
            .unwrap()
        },
    )
}

fn small_image() -> impl Strategy<Value = ParamSeries> {
    (proptest::collection::vec(-2i64..=2, 4), 1usize..3).prop_map(|(c, start)| {
        let t = tower();
        let u = t.generator("u").unwrap();
        let mut coeffs = vec![t.zero(); start];
        coeffs.push(&t.int(c[0].abs() + 1) * &u);
        coeffs.extend(c[1..].iter().map(|&x| t.int(x)));
        ParamSeries::from_coeffs(&t, 9, coeffs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn substitution_is_a_ring_homomorphism(f in small_poly(2), g in small_poly(2), a in small_image(), b in small_image()) {
        let imgs = [a, b];
        let sf = substitute(&f, &imgs).unwrap();
        let sg = substitute(&g, &imgs).unwrap();
        prop_assert_eq!(substitute(&f.mul(&g).unwrap(), &imgs).unwrap(), sf.mul(&sg).unwrap());
        prop_assert_eq!(substitute(&f.add(&g).unwrap(), &imgs).unwrap(), sf.add(&sg).unwrap());
    }

    #[test]
    fn orders_add(a in small_image(), b in small_image()) {
        let p = a.mul(&b).unwrap();
        if let (TOrder::Finite(x), TOrder::Finite(y)) = (a.order(), b.order()) {
            if x + y <= p.truncation() {
                prop_assert_eq!(p.order(), TOrder::Finite(x + y));
            }
        }
    }

    #[test]
    fn transforms_compose(f in small_poly(2), q1 in 0i64..3, q2 in 0i64..3) {
        // upper-triangular nonnegative transforms keep every support in the orthant
        let m1 = vec![vec![1, q1], vec![0, 1]];
        let m2 = vec![vec![1, 0], vec![q2, 1]];
        let prod = crate::lattice::IntMatrix::from_rows(m1.clone()).unwrap()
            .mul(&crate::lattice::IntMatrix::from_rows(m2.clone()).unwrap()).unwrap();
        let lhs = apply_monomial_transform(prod.rows(), &f).unwrap();
        let rhs = apply_monomial_transform(&m2, &apply_monomial_transform(&m1, &f).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

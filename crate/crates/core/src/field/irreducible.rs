//! Irreducibility certificates for minimal polynomials of degree 2..=4.
//!
//! A monic polynomial over Q(u_1..u_r) that stays irreducible over Q after
//! specializing the generators at a point where no coefficient denominator
//! vanishes is irreducible over Q(u_1..u_r) (Gauss's lemma over the
//! localized polynomial ring).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::arith::{Elem, TowerData};
use super::flat::{flat_eval, flatten};

const MAX_TRIAL: i128 = 1_000_000_000_000;
const POINTS: [i64; 12] = [2, 3, 5, 7, -2, 11, 13, -3, 17, 19, 23, -5];

pub(crate) fn certify(td: &TowerData, level: usize, minpoly: &[Elem]) -> Result<(), String> {
    let deg = minpoly.len() - 1;
    if !(2..=4).contains(&deg) {
        return Err(format!("minimal polynomial degree {deg} outside 2..=4"));
    }
    let flats: Vec<_> = minpoly.iter().map(|c| flatten(td, level, c)).collect();
    let r = td.trans.len();
    let width = td.width();
    for (n, d) in &flats {
        let involves_alg = n
            .keys()
            .chain(d.keys())
            .any(|e| e[r..width].iter().any(|&x| x > 0));
        if involves_alg {
            return Err("irreducibility over an algebraic tower is not supported".into());
        }
    }
    for attempt in 0..POINTS.len() {
        let point: Vec<BigRational> = (0..r)
            .map(|i| BigRational::from_integer(POINTS[(attempt + 5 * i) % POINTS.len()].into()))
            .collect();
        let mut coeffs = Vec::with_capacity(flats.len());
        let mut ok = true;
        for (n, d) in &flats {
            let dv = flat_eval(d, &point).unwrap();
            if dv.is_zero() {
                ok = false;
                break;
            }
            coeffs.push(flat_eval(n, &point).unwrap() / dv);
        }
        if ok && irreducible_over_q(&coeffs) {
            return Ok(());
        }
        if r == 0 {
            break;
        }
    }
    Err("could not certify irreducibility".into())
}

/// Monic polynomial over Q, lowest degree first, degree 2..=4.
pub(crate) fn irreducible_over_q(p: &[BigRational]) -> bool {
    let deg = p.len() - 1;
    let Some(ints) = integral_monic(p) else {
        return false;
    };
    match has_integer_root(&ints) {
        Some(true) | None => return false,
        Some(false) => {}
    }
    if deg <= 3 {
        return true;
    }
    matches!(has_quadratic_factor(&ints), Some(false))
}

/// Substitute y = z / L so the polynomial becomes monic with integer
/// coefficients; rational roots then are integer roots.
fn integral_monic(p: &[BigRational]) -> Option<Vec<i128>> {
    let deg = p.len() - 1;
    let l = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut out = Vec::with_capacity(p.len());
    for (i, c) in p.iter().enumerate() {
        let scaled = c * BigRational::from_integer(l.pow((deg - i) as u32));
        debug_assert!(scaled.is_integer());
        out.push(scaled.to_integer().to_i128()?);
    }
    Some(out)
}

fn eval_i(p: &[i128], x: i128) -> Option<i128> {
    let mut acc: i128 = 0;
    for c in p.iter().rev() {
        acc = acc.checked_mul(x)?.checked_add(*c)?;
    }
    Some(acc)
}

fn divisors(n: i128) -> Option<Vec<i128>> {
    let n = n.abs();
    if n > MAX_TRIAL {
        return None;
    }
    let mut out = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            out.push(i);
            if i != n / i {
                out.push(n / i);
            }
        }
        i += 1;
    }
    Some(out)
}

fn has_integer_root(p: &[i128]) -> Option<bool> {
    if p[0] == 0 {
        return Some(true);
    }
    for d in divisors(p[0])? {
        for x in [d, -d] {
            if eval_i(p, x) == Some(0) {
                return Some(true);
            }
        }
    }
    Some(false)
}

fn is_square(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt() as i128;
    (r.saturating_sub(2)..=r + 2).find(|x| *x >= 0 && x * x == n)
}

/// z^4 + a z^3 + b z^2 + c z + d = (z^2 + p z + q)(z^2 + r z + s) over Z.
fn has_quadratic_factor(poly: &[i128]) -> Option<bool> {
    let (d, c, b, a) = (poly[0], poly[1], poly[2], poly[3]);
    for q0 in divisors(d)? {
        for q in [q0, -q0] {
            let s = d / q;
            if s != q {
                let num = c - q * a;
                let den = s - q;
                if num % den != 0 {
                    continue;
                }
                let p = num / den;
                let r = a - p;
                if p * r + q + s == b {
                    return Some(true);
                }
            } else if c == q * a {
                let disc = a * a - 4 * (b - 2 * q);
                if let Some(root) = is_square(disc) {
                    if (a + root) % 2 == 0 {
                        return Some(true);
                    }
                }
            }
        }
    }
    Some(false)
}

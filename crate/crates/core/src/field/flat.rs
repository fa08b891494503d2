//! Flat view of tower elements as `N / D` with `N`, `D` polynomials over Q in
//! all generator names. Used for printing, specialization and Q-linear
//! algebra on coordinates.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::arith::{Elem, TowerData};

/// Exponent vector over every generator of the tower (transcendental first).
pub(crate) type FlatPoly = BTreeMap<Vec<u32>, BigRational>;

pub(crate) fn flat_const(width: usize, q: BigRational) -> FlatPoly {
    let mut p = FlatPoly::new();
    if !q.is_zero() {
        p.insert(vec![0; width], q);
    }
    p
}

pub(crate) fn flat_add(a: &FlatPoly, b: &FlatPoly) -> FlatPoly {
    let mut out = a.clone();
    for (e, c) in b {
        let entry = out.entry(e.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            out.remove(e);
        }
    }
    out
}

pub(crate) fn flat_mul(a: &FlatPoly, b: &FlatPoly) -> FlatPoly {
    let mut out = FlatPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let entry = out.entry(e.clone()).or_insert_with(BigRational::zero);
            *entry += ca * cb;
            if entry.is_zero() {
                out.remove(&e);
            }
        }
    }
    out
}

fn flat_shift(a: &FlatPoly, var: usize, by: u32) -> FlatPoly {
    a.iter()
        .map(|(e, c)| {
            let mut e = e.clone();
            e[var] += by;
            (e, c.clone())
        })
        .collect()
}

fn product_except(dens: &[FlatPoly], skip: usize, width: usize) -> FlatPoly {
    dens.iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .fold(flat_const(width, BigRational::one()), |acc, (_, d)| {
            flat_mul(&acc, d)
        })
}

/// Combine `Σ (N_i / D_i) · g^i` over a common denominator.
fn combine(
    parts: &[(FlatPoly, FlatPoly)],
    var: usize,
    width: usize,
) -> (FlatPoly, FlatPoly, Vec<FlatPoly>, Vec<usize>) {
    let mut dens: Vec<FlatPoly> = Vec::new();
    let mut idx = Vec::with_capacity(parts.len());
    for (_, d) in parts {
        match dens.iter().position(|x| x == d) {
            Some(i) => idx.push(i),
            None => {
                dens.push(d.clone());
                idx.push(dens.len() - 1);
            }
        }
    }
    let mut num = FlatPoly::new();
    for (i, (n, _)) in parts.iter().enumerate() {
        if n.is_empty() {
            continue;
        }
        let scaled = flat_mul(n, &product_except(&dens, idx[i], width));
        num = flat_add(&num, &flat_shift(&scaled, var, i as u32));
    }
    let all = product_except(&dens, usize::MAX, width);
    (num, all, dens, idx)
}

pub(crate) fn flatten(td: &TowerData, l: usize, a: &Elem) -> (FlatPoly, FlatPoly) {
    let width = td.width();
    match a {
        Elem::Base(n, d) => (pad(n.terms(), width), pad(d.terms(), width)),
        Elem::Alg(c) => {
            let k = l - 1;
            let parts: Vec<(FlatPoly, FlatPoly)> = c.iter().map(|x| flatten(td, k, x)).collect();
            let (num, den, _, _) = combine(&parts, td.nvars() + l - 1, width);
            (num, den)
        }
    }
}

fn pad(terms: &BTreeMap<Vec<u32>, BigRational>, width: usize) -> FlatPoly {
    terms
        .iter()
        .map(|(e, c)| {
            let mut e = e.clone();
            e.resize(width, 0);
            (e, c.clone())
        })
        .collect()
}

/// Numerators of the given flat fractions over their common denominator.
pub(crate) fn common_numerators(parts: &[(FlatPoly, FlatPoly)], width: usize) -> Vec<FlatPoly> {
    let mut dens: Vec<FlatPoly> = Vec::new();
    for (_, d) in parts {
        if !dens.contains(d) {
            dens.push(d.clone());
        }
    }
    parts
        .iter()
        .map(|(n, d)| {
            let i = dens.iter().position(|x| x == d).unwrap();
            flat_mul(n, &product_except(&dens, i, width))
        })
        .collect()
}

/// Evaluate at a rational point of the transcendental generators; `None` if
/// the polynomial involves an algebraic generator.
pub(crate) fn flat_eval(p: &FlatPoly, point: &[BigRational]) -> Option<BigRational> {
    let mut acc = BigRational::zero();
    for (e, c) in p {
        if e[point.len()..].iter().any(|&x| x > 0) {
            return None;
        }
        let mut term = c.clone();
        for (x, &k) in point.iter().zip(e) {
            for _ in 0..k {
                term *= x;
            }
        }
        acc += term;
    }
    Some(acc)
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_monomial(e: &[u32], names: &[String]) -> String {
    let parts: Vec<String> = e
        .iter()
        .zip(names)
        .filter(|(&k, _)| k > 0)
        .map(|(&k, n)| {
            if k == 1 {
                n.clone()
            } else {
                format!("{n}^{k}")
            }
        })
        .collect();
    parts.join("*")
}

pub(crate) fn fmt_flat(p: &FlatPoly, names: &[String]) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut terms: Vec<(&Vec<u32>, &BigRational)> = p.iter().collect();
    terms.sort_by(|a, b| {
        let da: u32 = a.0.iter().sum();
        let db: u32 = b.0.iter().sum();
        db.cmp(&da).then_with(|| b.0.cmp(a.0))
    });
    let mut out = String::new();
    for (i, (e, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let abs = c.abs();
        let mono = fmt_monomial(e, names);
        if mono.is_empty() {
            out.push_str(&fmt_rational(&abs));
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&fmt_rational(&abs));
            out.push('*');
            out.push_str(&mono);
        }
    }
    out
}

pub(crate) fn flat_neg(p: &FlatPoly) -> FlatPoly {
    p.iter().map(|(e, c)| (e.clone(), -c)).collect()
}

/// Sign of the leading term in printing order (graded, then lex descending).
pub(crate) fn leading_is_negative(p: &FlatPoly) -> bool {
    p.iter()
        .max_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            da.cmp(&db).then_with(|| a.0.cmp(b.0))
        })
        .is_some_and(|(_, c)| c.is_negative())
}

pub(crate) fn is_one(p: &FlatPoly) -> bool {
    p.len() == 1
        && p.iter()
            .all(|(e, c)| e.iter().all(|&x| x == 0) && c.is_one())
}

pub(crate) fn constant_of(p: &FlatPoly) -> Option<BigRational> {
    if p.len() == 1 {
        let (e, c) = p.iter().next().unwrap();
        if e.iter().all(|&x| x == 0) {
            return Some(c.clone());
        }
    }
    None
}

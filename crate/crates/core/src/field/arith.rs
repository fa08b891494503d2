//! Arithmetic on the levels of a field tower.
//!
//! Level 0 is Q(u_1, ..., u_r); its elements are reduced fractions of
//! multivariate polynomials with denominator normalized to graded-lex
//! leading coefficient 1. Levels `1..=s` are simple algebraic extensions,
//! elements being polynomials of degree below the minimal polynomial's
//! degree with coefficients in the level below.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::mpoly::{gcd, MPoly};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Elem {
    Base(MPoly, MPoly),
    Alg(Vec<Elem>),
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) struct AlgExt {
    pub name: String,
    /// Monic, coefficients in the level below, lowest degree first.
    pub minpoly: Vec<Elem>,
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) struct TowerData {
    pub trans: Vec<String>,
    pub alg: Vec<AlgExt>,
}

impl TowerData {
    pub fn top(&self) -> usize {
        self.alg.len()
    }

    pub fn nvars(&self) -> usize {
        self.trans.len()
    }

    /// Number of generators, transcendental and algebraic.
    pub fn width(&self) -> usize {
        self.trans.len() + self.alg.len()
    }

    fn ext(&self, l: usize) -> &AlgExt {
        &self.alg[l - 1]
    }

    pub fn zero(&self, l: usize) -> Elem {
        if l == 0 {
            Elem::Base(MPoly::zero(self.nvars()), MPoly::one(self.nvars()))
        } else {
            Elem::Alg(Vec::new())
        }
    }

    pub fn one(&self, l: usize) -> Elem {
        self.rational(l, BigRational::one())
    }

    pub fn rational(&self, l: usize, q: BigRational) -> Elem {
        if q.is_zero() {
            return self.zero(l);
        }
        if l == 0 {
            Elem::Base(MPoly::constant(self.nvars(), q), MPoly::one(self.nvars()))
        } else {
            Elem::Alg(vec![self.rational(l - 1, q)])
        }
    }

    pub fn trans_generator(&self, i: usize) -> Elem {
        Elem::Base(MPoly::var(self.nvars(), i), MPoly::one(self.nvars()))
    }

    /// The algebraic generator adjoined at level `l >= 1`.
    pub fn alg_generator(&self, l: usize) -> Elem {
        Elem::Alg(vec![self.zero(l - 1), self.one(l - 1)])
    }

    /// Lift an element of level `from` to level `to >= from`.
    pub fn lift(&self, from: usize, to: usize, a: Elem) -> Elem {
        let mut cur = a;
        for l in from + 1..=to {
            cur = if self.is_zero(&cur) {
                self.zero(l)
            } else {
                Elem::Alg(vec![cur])
            };
        }
        cur
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Base(n, _) => n.is_zero(),
            Elem::Alg(c) => c.is_empty(),
        }
    }

    pub fn to_rational(&self, a: &Elem) -> Option<BigRational> {
        match a {
            Elem::Base(n, d) => {
                let dc = d.as_constant()?;
                Some(n.as_constant()? / dc)
            }
            Elem::Alg(c) => match c.len() {
                0 => Some(BigRational::zero()),
                1 => self.to_rational(&c[0]),
                _ => None,
            },
        }
    }

    fn normalize(&self, n: MPoly, d: MPoly) -> Elem {
        assert!(!d.is_zero(), "zero denominator");
        if n.is_zero() {
            return self.zero(0);
        }
        let (mut n, mut d) = (n, d);
        if d.as_constant().is_none() {
            let g = gcd(&n, &d);
            if !g.is_one() {
                n = n.exact_div(&g).unwrap();
                d = d.exact_div(&g).unwrap();
            }
        }
        let lc = d.graded_lead_coeff().unwrap().clone();
        if !lc.is_one() {
            let inv = lc.recip();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        Elem::Base(n, d)
    }

    /// Fraction already free of common factors; fix the denominator scale.
    fn scaled(&self, n: MPoly, d: MPoly) -> Elem {
        let lc = d.graded_lead_coeff().unwrap().clone();
        if lc.is_one() {
            return Elem::Base(n, d);
        }
        let inv = lc.recip();
        Elem::Base(n.scale(&inv), d.scale(&inv))
    }

    pub fn add(&self, l: usize, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Base(n1, d1), Elem::Base(n2, d2)) => {
                if d1 == d2 {
                    let n = n1.add(n2);
                    if d1.is_one() {
                        return Elem::Base(n, d1.clone());
                    }
                    return self.normalize(n, d1.clone());
                }
                // Henrici: only the common part of the denominators can cancel.
                let g = gcd(d1, d2);
                let (e1, e2) = (d1.exact_div(&g).unwrap(), d2.exact_div(&g).unwrap());
                let n = n1.mul(&e2).add(&n2.mul(&e1));
                if n.is_zero() {
                    return self.zero(0);
                }
                let h = if g.is_one() { g.clone() } else { gcd(&n, &g) };
                let (n, g) = if h.is_one() {
                    (n, g)
                } else {
                    (n.exact_div(&h).unwrap(), g.exact_div(&h).unwrap())
                };
                self.scaled(n, e1.mul(&e2).mul(&g))
            }
            (Elem::Alg(x), Elem::Alg(y)) => Elem::Alg(self.p_add(l - 1, x, y)),
            _ => panic!("level mismatch in field addition"),
        }
    }

    pub fn neg(&self, l: usize, a: &Elem) -> Elem {
        match a {
            Elem::Base(n, d) => Elem::Base(n.neg(), d.clone()),
            Elem::Alg(c) => Elem::Alg(self.p_neg(l - 1, c)),
        }
    }

    pub fn sub(&self, l: usize, a: &Elem, b: &Elem) -> Elem {
        self.add(l, a, &self.neg(l, b))
    }

    pub fn mul(&self, l: usize, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Base(n1, d1), Elem::Base(n2, d2)) => {
                if n1.is_zero() || n2.is_zero() {
                    return self.zero(0);
                }
                if d1.is_one() && d2.is_one() {
                    return Elem::Base(n1.mul(n2), d1.clone());
                }
                let (n1, d2) = cancel(n1, d2);
                let (n2, d1) = cancel(n2, d1);
                self.scaled(n1.mul(&n2), d1.mul(&d2))
            }
            (Elem::Alg(x), Elem::Alg(y)) => {
                let prod = self.p_mul(l - 1, x, y);
                Elem::Alg(self.p_rem(l - 1, &prod, &self.ext(l).minpoly))
            }
            _ => panic!("level mismatch in field multiplication"),
        }
    }

    pub fn inv(&self, l: usize, a: &Elem) -> Option<Elem> {
        if self.is_zero(a) {
            return None;
        }
        match a {
            Elem::Base(n, d) => Some(self.normalize(d.clone(), n.clone())),
            Elem::Alg(c) => {
                let k = l - 1;
                let (g, s) = self.p_ext_gcd(k, c, &self.ext(l).minpoly);
                if g.len() != 1 {
                    return None;
                }
                let ginv = self.inv(k, &g[0])?;
                Some(Elem::Alg(self.p_scale(k, &s, &ginv)))
            }
        }
    }

    pub fn is_constant(&self, a: &Elem) -> bool {
        self.to_rational(a).is_some()
    }

    /// Derivative with respect to the transcendental generator `g`, extended
    /// to algebraic levels through the minimal polynomials.
    pub fn deriv(&self, l: usize, a: &Elem, g: usize) -> Elem {
        match a {
            Elem::Base(n, d) => {
                let num = n.derivative(g).mul(d).sub(&n.mul(&d.derivative(g)));
                if num.is_zero() {
                    return self.zero(0);
                }
                self.normalize(num, d.mul(d))
            }
            Elem::Alg(c) => {
                let k = l - 1;
                let ext = self.ext(l);
                let a1 = Elem::Alg(self.p_coeff_deriv(k, c, g));
                if c.len() <= 1 {
                    return a1;
                }
                let dm =
                    Elem::Alg(self.p_rem(k, &self.p_coeff_deriv(k, &ext.minpoly, g), &ext.minpoly));
                let mprime = Elem::Alg(self.p_deriv(k, &ext.minpoly));
                let minv = self
                    .inv(l, &mprime)
                    .expect("separable minimal polynomial in characteristic zero");
                let dy = self.neg(l, &self.mul(l, &dm, &minv));
                let a2 = Elem::Alg(self.p_deriv(k, c));
                self.add(l, &a1, &self.mul(l, &a2, &dy))
            }
        }
    }

    // ---- univariate polynomials over level k -------------------------------

    fn trim(&self, mut p: Vec<Elem>) -> Vec<Elem> {
        while p.last().is_some_and(|c| self.is_zero(c)) {
            p.pop();
        }
        p
    }

    pub fn p_add(&self, k: usize, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) => self.add(k, x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        self.trim(out)
    }

    pub fn p_neg(&self, k: usize, a: &[Elem]) -> Vec<Elem> {
        a.iter().map(|c| self.neg(k, c)).collect()
    }

    pub fn p_sub(&self, k: usize, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        self.p_add(k, a, &self.p_neg(k, b))
    }

    pub fn p_mul(&self, k: usize, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero(k); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if self.is_zero(y) {
                    continue;
                }
                out[i + j] = self.add(k, &out[i + j], &self.mul(k, x, y));
            }
        }
        self.trim(out)
    }

    pub fn p_scale(&self, k: usize, a: &[Elem], c: &Elem) -> Vec<Elem> {
        self.trim(a.iter().map(|x| self.mul(k, x, c)).collect())
    }

    /// Division with remainder; `b` must be nonzero.
    pub fn p_divrem(&self, k: usize, a: &[Elem], b: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
        assert!(!b.is_empty(), "polynomial division by zero");
        let lead_inv = self.inv(k, b.last().unwrap()).unwrap();
        let mut r = a.to_vec();
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![self.zero(k); r.len() - b.len() + 1];
        while r.len() >= b.len() && !r.is_empty() {
            let shift = r.len() - b.len();
            let c = self.mul(k, r.last().unwrap(), &lead_inv);
            for (i, bc) in b.iter().enumerate() {
                r[shift + i] = self.sub(k, &r[shift + i], &self.mul(k, &c, bc));
            }
            q[shift] = c;
            // the leading coefficient cancels exactly
            r.pop();
            r = self.trim(r);
        }
        (self.trim(q), r)
    }

    pub fn p_rem(&self, k: usize, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        if a.len() < b.len() {
            return a.to_vec();
        }
        self.p_divrem(k, a, b).1
    }

    /// Returns `(g, s)` with `s·a ≡ g (mod m)`, `g` the last nonzero remainder.
    fn p_ext_gcd(&self, k: usize, a: &[Elem], m: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
        let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
        let (mut s0, mut s1) = (Vec::new(), vec![self.one(k)]);
        while !r1.is_empty() {
            let (q, r) = self.p_divrem(k, &r0, &r1);
            let s = self.p_sub(k, &s0, &self.p_mul(k, &q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        (r0, s0)
    }

    pub fn p_deriv(&self, k: usize, p: &[Elem]) -> Vec<Elem> {
        let out = p
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| self.mul(k, c, &self.rational(k, BigRational::from_integer(i.into()))))
            .collect();
        self.trim(out)
    }

    fn p_coeff_deriv(&self, k: usize, p: &[Elem], g: usize) -> Vec<Elem> {
        self.trim(p.iter().map(|c| self.deriv(k, c, g)).collect())
    }
}

fn cancel(n: &MPoly, d: &MPoly) -> (MPoly, MPoly) {
    if d.as_constant().is_some() || n.as_constant().is_some() {
        return (n.clone(), d.clone());
    }
    let g = gcd(n, d);
    if g.is_one() {
        (n.clone(), d.clone())
    } else {
        (n.exact_div(&g).unwrap(), d.exact_div(&g).unwrap())
    }
}

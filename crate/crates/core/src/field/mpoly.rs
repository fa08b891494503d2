//! Sparse multivariate polynomials over Q with a recursive primitive-PRS gcd.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(e, BigRational::one());
        p
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn insert_add(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(e.clone())
            .or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_add(e.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert_add(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    /// Leading coefficient under graded lex order.
    pub fn graded_lead_coeff(&self) -> Option<&BigRational> {
        self.terms
            .iter()
            .max_by(|a, b| {
                let da: u32 = a.0.iter().sum();
                let db: u32 = b.0.iter().sum();
                da.cmp(&db).then_with(|| a.0.cmp(b.0))
            })
            .map(|(_, c)| c)
    }

    pub fn derivative(&self, var: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.insert_add(e2, c * BigRational::from_integer(e[var].into()));
        }
        out
    }

    /// Exact quotient, `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &MPoly) -> Option<MPoly> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let (de, dc) = d.terms.iter().next_back().unwrap();
        let mut r = self.clone();
        let mut q = MPoly::zero(self.nvars);
        while let Some((re, rc)) = r.terms.iter().next_back() {
            if re.iter().zip(de).any(|(a, b)| a < b) {
                return None;
            }
            let e: Vec<u32> = re.iter().zip(de).map(|(a, b)| a - b).collect();
            let c = rc / dc;
            let mut t = MPoly::zero(self.nvars);
            t.terms.insert(e.clone(), c.clone());
            r = r.sub(&t.mul(d));
            q.insert_add(e, c);
        }
        Some(q)
    }

    fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    fn main_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&v| self.degree_in(v) > 0)
    }

    /// Coefficients with respect to `var`, lowest degree first.
    fn coeffs_in(&self, var: usize) -> Vec<MPoly> {
        let mut out = vec![MPoly::zero(self.nvars); self.degree_in(var) as usize + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[var] = 0;
            out[e[var] as usize].insert_add(e2, c.clone());
        }
        out
    }

    fn shift(&self, var: usize, by: u32) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e[var] += by;
                    (e, c.clone())
                })
                .collect(),
        }
    }

    fn monic(&self) -> MPoly {
        match self.terms.iter().next_back() {
            Some((_, c)) if !c.is_one() => self.scale(&c.recip()),
            _ => self.clone(),
        }
    }

    fn content_in(&self, var: usize) -> MPoly {
        self.coeffs_in(var)
            .iter()
            .fold(MPoly::zero(self.nvars), |g, c| gcd(&g, c))
    }

    fn primitive_in(&self, var: usize) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.exact_div(&self.content_in(var)).unwrap().monic()
    }

    /// Pseudo-remainder of `self` by `b` as polynomials in `var`.
    fn prem(&self, b: &MPoly, var: usize) -> MPoly {
        let db = b.degree_in(var);
        let lb = b.coeffs_in(var).pop().unwrap();
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(var) >= db {
            let dr = r.degree_in(var);
            let lr = r.coeffs_in(var).pop().unwrap();
            r = r.mul(&lb).sub(&b.mul(&lr).shift(var, dr - db));
        }
        r
    }
}

/// Greatest common divisor, normalized to lex-leading coefficient 1.
pub(crate) fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let n = a.nvars;
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return MPoly::one(n);
    }
    let x = a.main_var().max(b.main_var()).unwrap();
    if a.degree_in(x) == 0 {
        return gcd(a, &b.content_in(x));
    }
    if b.degree_in(x) == 0 {
        return gcd(&a.content_in(x), b);
    }
    let c = gcd(&a.content_in(x), &b.content_in(x));
    let (mut p, mut q) = (a.primitive_in(x), b.primitive_in(x));
    if p.degree_in(x) < q.degree_in(x) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        let r = p.prem(&q, x);
        p = q;
        q = r.primitive_in(x);
    }
    c.mul(&p.primitive_in(x)).monic()
}

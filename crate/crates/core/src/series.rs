//! Truncated multivariate power series, series in one parameter `t`, and
//! Laurent polynomials, all with [`FieldElem`] coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldTower};

/// Integer exponent tuple; negative entries only occur in Laurent monomials.
#[derive(
    Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
#[serde(transparent)]
pub struct ExpVector(pub Vec<i64>);

impl ExpVector {
    pub fn zero(n: usize) -> Self {
        ExpVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        ExpVector(v)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    pub fn add(&self, other: &ExpVector) -> ExpVector {
        ExpVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &ExpVector) -> ExpVector {
        ExpVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Row vector times matrix: `(A·M)_j = Σ_i a_i M[i][j]`.
    pub fn times(&self, m: &[Vec<i64>]) -> Result<ExpVector> {
        let n = m.first().map_or(0, Vec::len);
        let mut out = vec![0i64; n];
        for (a, row) in self.0.iter().zip(m) {
            for (o, x) in out.iter_mut().zip(row) {
                *o = a
                    .checked_mul(*x)
                    .and_then(|p| o.checked_add(p))
                    .ok_or(Error::Overflow)?;
            }
        }
        Ok(ExpVector(out))
    }
}

impl fmt::Display for ExpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Write `X1^2*X3`-style monomials; `names[i]` names variable `i`.
pub(crate) fn fmt_monomial(e: &ExpVector, names: &[String]) -> String {
    let parts: Vec<String> =
        e.0.iter()
            .zip(names)
            .filter(|(a, _)| **a != 0)
            .map(|(a, n)| {
                if *a == 1 {
                    n.clone()
                } else {
                    format!("{n}^{a}")
                }
            })
            .collect();
    parts.join("*")
}

/// Join `(coefficient, monomial)` terms into `a*m1 - b*m2` text.
pub(crate) fn fmt_terms<'a>(terms: impl Iterator<Item = (&'a FieldElem, String)>) -> String {
    let mut out = String::new();
    for (c, mono) in terms {
        let text = c.to_string();
        let (neg, body) = match text.strip_prefix('-') {
            Some(rest) if !text.contains(' ') => (true, rest.to_string()),
            _ if text.contains(' ') => (false, format!("({text})")),
            _ => (false, text),
        };
        let term = match (body.as_str(), mono.is_empty()) {
            (b, true) => b.to_string(),
            ("1", false) => mono,
            (b, false) => format!("{b}*{mono}"),
        };
        if out.is_empty() {
            out = if neg { format!("-{term}") } else { term };
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&term);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
}

/// Power series in `X1..Xn` known exactly through total degree `trunc`
/// (`None` for polynomials known exactly).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    tower: FieldTower,
    arity: usize,
    trunc: Option<u32>,
    terms: BTreeMap<ExpVector, FieldElem>,
}

fn min_trunc(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn within(trunc: Option<u32>, e: &ExpVector) -> bool {
    trunc.is_none_or(|d| e.total_degree() <= i64::from(d))
}

impl TruncSeries {
    pub fn zero(tower: &FieldTower, arity: usize, trunc: Option<u32>) -> Self {
        TruncSeries {
            tower: tower.clone(),
            arity,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    /// Build from terms; repeated exponents are summed, terms beyond the
    /// truncation dropped.
    pub fn from_terms(
        tower: &FieldTower,
        arity: usize,
        trunc: Option<u32>,
        terms: impl IntoIterator<Item = (ExpVector, FieldElem)>,
    ) -> Result<Self> {
        let mut s = Self::zero(tower, arity, trunc);
        for (e, c) in terms {
            if e.arity() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    got: e.arity(),
                });
            }
            if !e.is_nonnegative() {
                return Err(Error::NegativeExponent(e.to_string()));
            }
            if c.tower() != tower {
                return Err(Error::TowerMismatch);
            }
            if within(trunc, &e) {
                s.add_term(e, c);
            }
        }
        Ok(s)
    }

    pub fn constant(c: FieldElem, arity: usize, trunc: Option<u32>) -> Self {
        let tower = c.tower().clone();
        let mut s = Self::zero(&tower, arity, trunc);
        s.add_term(ExpVector::zero(arity), c);
        s
    }

    pub fn variable(tower: &FieldTower, arity: usize, i: usize, trunc: Option<u32>) -> Self {
        let mut s = Self::zero(tower, arity, trunc);
        let e = ExpVector::unit(arity, i);
        if within(trunc, &e) {
            s.add_term(e, tower.one());
        }
        s
    }

    fn add_term(&mut self, e: ExpVector, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(x) => {
                *x = &*x + &c;
                if x.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn truncation(&self) -> Option<u32> {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVector, &FieldElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &ExpVector) -> Option<&FieldElem> {
        self.terms.get(e)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Same series known only through total degree `d` (never increases the
    /// truncation).
    pub fn truncate(&self, d: u32) -> Self {
        let trunc = min_trunc(self.trunc, Some(d));
        TruncSeries {
            tower: self.tower.clone(),
            arity: self.arity,
            trunc,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| within(trunc, e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    fn check(&self, other: &TruncSeries) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        if self.tower != other.tower {
            return Err(Error::TowerMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncSeries) -> Result<Self> {
        self.check(other)?;
        let mut out = match other.trunc {
            Some(d) => self.truncate(d),
            None => self.clone(),
        };
        for (e, c) in &other.terms {
            if within(out.trunc, e) {
                out.add_term(e.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        TruncSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &TruncSeries) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TruncSeries) -> Result<Self> {
        self.check(other)?;
        let trunc = min_trunc(self.trunc, other.trunc);
        let mut out = Self::zero(&self.tower, self.arity, trunc);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.add(eb);
                if within(trunc, &e) {
                    out.add_term(e, ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// Lowest total degree in the support.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.total_degree() as u32).min()
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        let mut out = Self::zero(&self.tower, self.arity, self.trunc);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.tower.one(), self.arity, self.trunc);
        for _ in 0..k {
            acc = acc.mul(self).expect("same arity and tower");
        }
        acc
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        let mut keys: Vec<&ExpVector> = self.terms.keys().collect();
        keys.sort_by(|a, b| a.total_degree().cmp(&b.total_degree()).then(b.cmp(a)));
        let mut s = fmt_terms(
            keys.iter()
                .map(|e| (&self.terms[*e], fmt_monomial(e, names))),
        );
        if let Some(d) = self.trunc {
            if self.terms.is_empty() {
                s = format!("O({})", d + 1);
            } else {
                s.push_str(&format!(" + O({})", d + 1));
            }
        }
        s
    }
}

pub(crate) fn x_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&x_names(self.arity)))
    }
}

/// Checked sum or product.
pub fn series_arith(a: &TruncSeries, b: &TruncSeries, op: SeriesOp) -> Result<TruncSeries> {
    match op {
        SeriesOp::Add => a.add(b),
        SeriesOp::Mul => a.mul(b),
    }
}

/// Order in `t`, or inconclusive when every coefficient through the
/// truncation vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TOrder {
    Finite(u32),
    Inconclusive,
}

impl TOrder {
    pub fn finite(self) -> Option<u32> {
        match self {
            TOrder::Finite(k) => Some(k),
            TOrder::Inconclusive => None,
        }
    }
}

impl fmt::Display for TOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TOrder::Finite(k) => write!(f, "{k}"),
            TOrder::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Series `Σ c_k t^k` known exactly through `t^trunc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSeries {
    tower: FieldTower,
    trunc: u32,
    coeffs: Vec<FieldElem>,
}

impl ParamSeries {
    pub fn zero(tower: &FieldTower, trunc: u32) -> Self {
        ParamSeries {
            tower: tower.clone(),
            trunc,
            coeffs: vec![tower.zero(); trunc as usize + 1],
        }
    }

    /// `coeffs[k]` is the coefficient of `t^k`; missing entries are zero and
    /// entries beyond the truncation are dropped.
    pub fn from_coeffs(tower: &FieldTower, trunc: u32, coeffs: Vec<FieldElem>) -> Result<Self> {
        if coeffs.iter().any(|c| c.tower() != tower) {
            return Err(Error::TowerMismatch);
        }
        let mut s = Self::zero(tower, trunc);
        for (k, c) in coeffs.into_iter().enumerate().take(trunc as usize + 1) {
            s.coeffs[k] = c;
        }
        Ok(s)
    }

    /// `c · t^k`.
    pub fn monomial(c: FieldElem, k: u32, trunc: u32) -> Self {
        let mut s = Self::zero(&c.tower().clone(), trunc);
        if k <= trunc {
            s.coeffs[k as usize] = c;
        }
        s
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn truncation(&self) -> u32 {
        self.trunc
    }

    pub fn coeff(&self, k: u32) -> FieldElem {
        self.coeffs
            .get(k as usize)
            .cloned()
            .unwrap_or_else(|| self.tower.zero())
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn order(&self) -> TOrder {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(k) => TOrder::Finite(k as u32),
            None => TOrder::Inconclusive,
        }
    }

    /// Coefficient of the lowest visible power of `t`.
    pub fn leading_coeff(&self) -> Option<&FieldElem> {
        self.coeffs.iter().find(|c| !c.is_zero())
    }

    pub fn truncate(&self, trunc: u32) -> Self {
        let trunc = trunc.min(self.trunc);
        ParamSeries {
            tower: self.tower.clone(),
            trunc,
            coeffs: self.coeffs[..=trunc as usize].to_vec(),
        }
    }

    fn check(&self, other: &ParamSeries) -> Result<()> {
        if self.tower != other.tower {
            return Err(Error::TowerMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &ParamSeries) -> Result<Self> {
        self.check(other)?;
        let trunc = self.trunc.min(other.trunc);
        let coeffs = (0..=trunc as usize)
            .map(|k| &self.coeffs[k] + &other.coeffs[k])
            .collect();
        Ok(ParamSeries {
            tower: self.tower.clone(),
            trunc,
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        ParamSeries {
            tower: self.tower.clone(),
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &ParamSeries) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ParamSeries) -> Result<Self> {
        self.check(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut coeffs = vec![self.tower.zero(); trunc as usize + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > trunc as usize {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        Ok(ParamSeries {
            tower: self.tower.clone(),
            trunc,
            coeffs,
        })
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        ParamSeries {
            tower: self.tower.clone(),
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::monomial(self.tower.one(), 0, self.trunc);
        for _ in 0..k {
            acc = acc.mul(self).expect("same tower");
        }
        acc
    }

    /// Quotient `self / other` where `other` has conclusive order `a` and
    /// `self` vanishes below `t^a`; known through `min(T_self, T_other) − a`.
    pub fn div(&self, other: &ParamSeries) -> Result<Self> {
        self.check(other)?;
        let a = other
            .order()
            .finite()
            .ok_or_else(|| Error::Inconclusive("divisor has no visible term".into()))?;
        if self.coeffs.iter().take(a as usize).any(|c| !c.is_zero()) {
            return Err(Error::NotASeries(
                "dividend has lower order than divisor".into(),
            ));
        }
        let trunc = self.trunc.min(other.trunc) - a;
        let lead_inv = other.coeffs[a as usize].inv()?;
        let den: Vec<&FieldElem> = other.coeffs[a as usize..].iter().collect();
        let mut rem: Vec<FieldElem> = self.coeffs[a as usize..].to_vec();
        let mut q = Vec::with_capacity(trunc as usize + 1);
        for k in 0..=trunc as usize {
            let c = &rem[k] * &lead_inv;
            if !c.is_zero() {
                for (j, d) in den.iter().enumerate().skip(1) {
                    if k + j > trunc as usize {
                        break;
                    }
                    rem[k + j] = &rem[k + j] - &(&c * d);
                }
            }
            q.push(c);
        }
        Ok(ParamSeries {
            tower: self.tower.clone(),
            trunc,
            coeffs: q,
        })
    }

    pub fn fmt_with(&self, var: &str) -> String {
        let names = [var.to_string()];
        let terms: Vec<(&FieldElem, String)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (c, fmt_monomial(&ExpVector(vec![k as i64]), &names)))
            .collect();
        let body = fmt_terms(terms.into_iter());
        if body == "0" {
            format!("O({})", self.trunc + 1)
        } else {
            format!("{body} + O({})", self.trunc + 1)
        }
    }
}

impl fmt::Display for ParamSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with("t"))
    }
}

/// The `t`-order function.
pub fn t_order(s: &ParamSeries) -> TOrder {
    s.order()
}

/// `f(images)`: substitute `X_i ↦ images[i]`. Images need positive order
/// (or be zero through their truncation). The result is exact through the
/// smallest image truncation; when `f` is itself truncated at `D`, also only
/// through `(D+1)·m − 1` where `m` is the least image order.
pub fn substitute(f: &TruncSeries, images: &[ParamSeries]) -> Result<ParamSeries> {
    if images.len() != f.arity {
        return Err(Error::ArityMismatch {
            expected: f.arity,
            got: images.len(),
        });
    }
    let tower = f.tower();
    if images.iter().any(|s| s.tower() != tower) {
        return Err(Error::TowerMismatch);
    }
    let mut trunc = images.iter().map(|s| s.trunc).min().unwrap_or(u32::MAX);
    let mut min_order = u32::MAX;
    for s in images {
        match s.order() {
            TOrder::Finite(0) => {
                return Err(Error::NotASeries(format!("image {s} has a constant term")))
            }
            TOrder::Finite(m) => min_order = min_order.min(m),
            TOrder::Inconclusive => min_order = min_order.min(s.trunc + 1),
        }
    }
    if let Some(d) = f.trunc {
        if min_order != u32::MAX {
            trunc = trunc.min(((d + 1) * min_order).saturating_sub(1));
        }
    }
    if trunc == u32::MAX {
        return Err(Error::InvalidInput(
            "substitution needs at least one image".into(),
        ));
    }
    let images: Vec<ParamSeries> = images.iter().map(|s| s.truncate(trunc)).collect();
    let mut powers: Vec<Vec<ParamSeries>> = images
        .iter()
        .map(|s| vec![ParamSeries::monomial(tower.one(), 0, trunc), s.clone()])
        .collect();
    let mut out = ParamSeries::zero(tower, trunc);
    for (e, c) in &f.terms {
        let mut term = ParamSeries::monomial(c.clone(), 0, trunc);
        for (i, &a) in e.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            while powers[i].len() <= a as usize {
                let next = powers[i].last().unwrap().mul(&images[i])?.truncate(trunc);
                powers[i].push(next);
            }
            term = term.mul(&powers[i][a as usize])?.truncate(trunc);
        }
        out = out.add(&term)?;
    }
    Ok(out.truncate(trunc))
}

/// Map each monomial `X^A` to `X^(A·M)`. For truncated input the matrix must
/// be nonnegative so omitted terms stay out of sight; the result is then
/// known through total degree `(D+1)·s − 1` with `s` the least row sum.
pub fn apply_monomial_transform(m: &[Vec<i64>], f: &TruncSeries) -> Result<TruncSeries> {
    let n = f.arity;
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("transform must be {n}x{n}")));
    }
    let det = crate::lattice::IntMatrix::from_rows(m.to_vec())?.det()?;
    if det.abs() != 1 {
        return Err(Error::NotUnimodular(det));
    }
    let trunc = match f.trunc {
        None => None,
        Some(d) => {
            if m.iter().flatten().any(|&x| x < 0) {
                return Err(Error::Unsupported(
                    "transform with negative entries of a truncated series".into(),
                ));
            }
            let s = m.iter().map(|r| r.iter().sum::<i64>()).min().unwrap_or(1) as u32;
            Some((d + 1) * s - 1)
        }
    };
    let mut out = TruncSeries::zero(&f.tower, n, trunc);
    for (e, c) in &f.terms {
        let image = e.times(m)?;
        if !image.is_nonnegative() {
            return Err(Error::NotASeries(format!(
                "monomial {} maps to {}",
                fmt_monomial(e, &x_names(n)),
                image
            )));
        }
        if within(trunc, &image) {
            out.add_term(image, c.clone());
        }
    }
    Ok(out)
}

/// Finite sum of Laurent monomials with field coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    tower: FieldTower,
    arity: usize,
    terms: BTreeMap<ExpVector, FieldElem>,
}

impl LaurentPoly {
    pub fn zero(tower: &FieldTower, arity: usize) -> Self {
        LaurentPoly {
            tower: tower.clone(),
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(c: FieldElem, e: ExpVector) -> Self {
        let mut p = Self::zero(&c.tower().clone(), e.arity());
        p.add_term(e, c);
        p
    }

    pub fn add_term(&mut self, e: ExpVector, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(x) => {
                *x = &*x + &c;
                if x.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVector, &FieldElem)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = Self::zero(&self.tower, self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &FieldElem) -> LaurentPoly {
        let mut out = Self::zero(&self.tower, self.arity);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    /// Componentwise minimum exponent over the support.
    pub fn min_exponents(&self) -> ExpVector {
        let mut m = vec![0i64; self.arity];
        for (k, e) in self.terms.keys().enumerate() {
            for (x, a) in m.iter_mut().zip(&e.0) {
                *x = if k == 0 { *a } else { (*x).min(*a) };
            }
        }
        ExpVector(m)
    }

    /// Multiply by the monomial `X^e`.
    pub fn shift(&self, e: &ExpVector) -> LaurentPoly {
        LaurentPoly {
            tower: self.tower.clone(),
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.add(e), c.clone()))
                .collect(),
        }
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        let terms: Vec<(&FieldElem, String)> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| (c, fmt_monomial(e, names)))
            .collect();
        fmt_terms(terms.into_iter())
    }
}

#[cfg(test)]
mod tests;

//! The rank-two valuation on `k((u2))[[u1]]`: lex-least exponent `(i, j)`
//! of `Σ a_ij u1^i u2^j`, and reduction of two-variable images to
//! independent values.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldTower};
use crate::lattice::IntMatrix;
use crate::rank1::{StepKind, TransformStep};

/// `(ord_u1, ord_u2 of the leading stratum)`, compared lexicographically.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub struct Rank2Value(pub i64, pub i64);

impl Rank2Value {
    pub fn add(self, other: Rank2Value) -> Rank2Value {
        Rank2Value(self.0 + other.0, self.1 + other.1)
    }

    pub fn sub(self, other: Rank2Value) -> Rank2Value {
        Rank2Value(self.0 - other.0, self.1 - other.1)
    }

    pub fn is_positive(self) -> bool {
        self > Rank2Value(0, 0)
    }
}

impl fmt::Display for Rank2Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// Value of an element, or inconclusive when nothing is visible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rank2Order {
    Finite(Rank2Value),
    Inconclusive,
}

impl Rank2Order {
    pub fn finite(self) -> Option<Rank2Value> {
        match self {
            Rank2Order::Finite(v) => Some(v),
            Rank2Order::Inconclusive => None,
        }
    }
}

impl fmt::Display for Rank2Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank2Order::Finite(v) => write!(f, "{v}"),
            Rank2Order::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Element of `k((u2))[[u1]]` known modulo `u1^(t1+1)`; stratum `i` (the
/// coefficient of `u1^i`) is known modulo `u2^(prec[i]+1)`. The window
/// `[-t2, t2]` bounds the `u2` exponents; anything below `-t2` is rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentTailSeries {
    tower: FieldTower,
    t1: u32,
    t2: i64,
    prec: Vec<i64>,
    terms: BTreeMap<(u32, i64), FieldElem>,
}

impl LaurentTailSeries {
    pub fn zero(tower: &FieldTower, t1: u32, t2: u32) -> Self {
        LaurentTailSeries {
            tower: tower.clone(),
            t1,
            t2: i64::from(t2),
            prec: vec![i64::from(t2); t1 as usize + 1],
            terms: BTreeMap::new(),
        }
    }

    /// Terms `(i, j, a)` for `a·u1^i·u2^j`; repeated exponents are summed,
    /// terms beyond the truncation dropped.
    pub fn from_terms(
        tower: &FieldTower,
        t1: u32,
        t2: u32,
        terms: impl IntoIterator<Item = (u32, i64, FieldElem)>,
    ) -> Result<Self> {
        let mut s = Self::zero(tower, t1, t2);
        for (i, j, a) in terms {
            if a.tower() != tower {
                return Err(Error::TowerMismatch);
            }
            s.add_term(i, j, a)?;
        }
        Ok(s)
    }

    pub fn monomial(c: FieldElem, i: u32, j: i64, t1: u32, t2: u32) -> Result<Self> {
        let tower = c.tower().clone();
        Self::from_terms(&tower, t1, t2, [(i, j, c)])
    }

    fn add_term(&mut self, i: u32, j: i64, a: FieldElem) -> Result<()> {
        if i > self.t1 || j > self.prec[i as usize] || a.is_zero() {
            return Ok(());
        }
        if j < -self.t2 {
            return Err(Error::OutsideWindow(format!(
                "u1^{i}*u2^{j} lies below u2^-{}",
                self.t2
            )));
        }
        let slot = self.terms.entry((i, j)).or_insert_with(|| a.tower().zero());
        *slot = &*slot + &a;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
        Ok(())
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn t1(&self) -> u32 {
        self.t1
    }

    /// `u2` window half-width.
    pub fn t2(&self) -> u32 {
        self.t2 as u32
    }

    /// Stratum `i` is known modulo `u2^(precision(i)+1)`.
    pub fn precision(&self, i: u32) -> Option<i64> {
        self.prec.get(i as usize).copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, i64, &FieldElem)> {
        self.terms.iter().map(|(&(i, j), a)| (i, j, a))
    }

    pub fn coeff(&self, i: u32, j: i64) -> Option<&FieldElem> {
        self.terms.get(&(i, j))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.tower != other.tower {
            return Err(Error::TowerMismatch);
        }
        Ok(())
    }

    fn rebuild(
        &self,
        t2: i64,
        prec: Vec<i64>,
        terms: impl IntoIterator<Item = (u32, i64, FieldElem)>,
    ) -> Result<Self> {
        let mut s = LaurentTailSeries {
            tower: self.tower.clone(),
            t1: prec.len() as u32 - 1,
            t2,
            prec: prec.into_iter().map(|p| p.min(t2)).collect(),
            terms: BTreeMap::new(),
        };
        for (i, j, a) in terms {
            s.add_term(i, j, a)?;
        }
        Ok(s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let prec = self
            .prec
            .iter()
            .zip(&other.prec)
            .map(|(a, b)| *a.min(b))
            .collect();
        let terms: Vec<_> = self
            .terms()
            .chain(other.terms())
            .map(|(i, j, a)| (i, j, a.clone()))
            .collect();
        self.rebuild(self.t2.min(other.t2), prec, terms)
    }

    pub fn neg(&self) -> Self {
        LaurentTailSeries {
            terms: self.terms.iter().map(|(k, a)| (*k, -a)).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        if c.is_zero() {
            return LaurentTailSeries {
                terms: BTreeMap::new(),
                ..self.clone()
            };
        }
        LaurentTailSeries {
            terms: self.terms.iter().map(|(k, a)| (*k, a * c)).collect(),
            ..self.clone()
        }
    }

    /// Least `u2` exponent that stratum `i` may carry: its lowest visible
    /// term, or one past its precision.
    fn low(&self, i: usize) -> i64 {
        self.terms
            .range((i as u32, i64::MIN)..=(i as u32, i64::MAX))
            .next()
            .map_or(self.prec[i] + 1, |(k, _)| k.1)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let t1 = self.t1.min(other.t1) as usize;
        let prec: Vec<i64> = (0..=t1)
            .map(|k| {
                (0..=k)
                    .map(|i| (self.prec[i] + other.low(k - i)).min(other.prec[k - i] + self.low(i)))
                    .min()
                    .unwrap()
            })
            .collect();
        let mut terms = Vec::new();
        for (i1, j1, a) in self.terms() {
            for (i2, j2, b) in other.terms() {
                let k = (i1 + i2) as usize;
                if k <= t1 && j1 + j2 <= prec[k] {
                    terms.push((i1 + i2, j1 + j2, a * b));
                }
            }
        }
        self.rebuild(self.t2.min(other.t2), prec, terms)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::monomial(self.tower.one(), 0, 0, self.t1, self.t2())?;
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Lex-least visible exponent with its coefficient.
    pub fn leading_term(&self) -> Option<(Rank2Value, &FieldElem)> {
        self.terms
            .iter()
            .next()
            .map(|(&(i, j), a)| (Rank2Value(i64::from(i), j), a))
    }

    /// `self / other`. Divides by the leading monomial of `other` and
    /// inverts the remaining unit `1 + h` by its geometric series; the
    /// result must again lie in the series ring.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let Some((lead, c)) = other.leading_term() else {
            return Err(Error::Inconclusive("divisor has no visible term".into()));
        };
        let (a, b) = (lead.0 as u32, lead.1);
        let c_inv = c.inv()?;
        let shift = |s: &Self| -> Result<Self> {
            if s.terms().any(|(i, _, _)| i < a) || s.t1 < a {
                return Err(Error::NotASeries(
                    "quotient has a negative power of u1".into(),
                ));
            }
            let prec = s.prec[a as usize..].iter().map(|p| p - b).collect();
            let terms: Vec<_> = s
                .terms()
                .map(|(i, j, x)| (i - a, j - b, x * &c_inv))
                .collect();
            s.rebuild(s.t2, prec, terms)
        };
        let unit = shift(other)?;
        let quotient = shift(self)?;
        let one = Self::monomial(self.tower.one(), 0, 0, unit.t1, unit.t2())?;
        let h = unit.sub(&one)?;
        let neg_h = h.neg();
        let mut inverse = one.clone();
        let mut power = one;
        let cap = 4 * (u64::from(unit.t1) + unit.t2 as u64) + 8;
        for _ in 0..cap {
            power = power.mul(&neg_h)?;
            if power.is_zero() {
                // the dropped tail is no more precise than the last power
                let prec = inverse
                    .prec
                    .iter()
                    .zip(&power.prec)
                    .map(|(a, b)| *a.min(b))
                    .collect();
                return quotient.mul(
                    &inverse.rebuild(
                        inverse.t2,
                        prec,
                        inverse
                            .terms()
                            .map(|(i, j, x)| (i, j, x.clone()))
                            .collect::<Vec<_>>(),
                    )?,
                );
            }
            inverse = inverse.add(&power)?;
        }
        Err(Error::Inconclusive(
            "inverse series does not settle within the window".into(),
        ))
    }

    /// An empty stratum below the leading term counts as zero only while
    /// it keeps the full window precision.
    fn lower_strata_known(&self, below: u32) -> bool {
        (0..below as usize).all(|i| self.prec[i] >= self.t2)
    }

    pub fn fmt_with(&self, v1: &str, v2: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let monomial = |i: u32, j: i64| {
            let mut parts = Vec::new();
            match i {
                0 => {}
                1 => parts.push(v1.to_string()),
                _ => parts.push(format!("{v1}^{i}")),
            }
            match j {
                0 => {}
                1 => parts.push(v2.to_string()),
                _ => parts.push(format!("{v2}^{j}")),
            }
            parts.join("*")
        };
        let mut out = String::new();
        for (n, (&(i, j), a)) in self.terms.iter().enumerate() {
            let m = monomial(i, j);
            let s = a.to_string();
            let (neg, body) = match s.strip_prefix('-') {
                Some(rest) if !rest.contains(' ') => (true, rest.to_string()),
                _ if s.contains(' ') => (false, format!("({s})")),
                _ => (false, s),
            };
            let term = match (m.is_empty(), body.as_str()) {
                (true, _) => body,
                (false, "1") => m,
                (false, _) => format!("{body}*{m}"),
            };
            if n == 0 {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        out
    }
}

impl fmt::Display for LaurentTailSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with("u1", "u2"))
    }
}

/// Lex-least exponent of the visible support. An empty stratum inside the
/// window counts as zero, so the value is certified as soon as anything is
/// visible.
pub fn vhat(w: &LaurentTailSeries) -> Rank2Order {
    match w.leading_term() {
        Some((v, _)) if w.lower_strata_known(v.0 as u32) => Rank2Order::Finite(v),
        _ => Rank2Order::Inconclusive,
    }
}

/// Membership in the ring of elements of value at least `(0,1)`: no negative
/// power of `u1`, and a `u1^0` coefficient of positive order. Zero belongs.
pub fn in_valuation_ring(w: &LaurentTailSeries) -> bool {
    match vhat(w) {
        Rank2Order::Finite(v) => v >= Rank2Value(0, 1),
        Rank2Order::Inconclusive => true,
    }
}

/// Residue of an element of value `(0,0)`: its constant coefficient.
pub fn residue(w: &LaurentTailSeries) -> Option<FieldElem> {
    match w.leading_term() {
        Some((Rank2Value(0, 0), a)) => Some(a.clone()),
        _ => None,
    }
}

/// Apply a recorded step to a pair of rank-two images.
pub fn apply_step(
    coords: &[LaurentTailSeries],
    step: &TransformStep,
) -> Result<Vec<LaurentTailSeries>> {
    match (&step.kind, &step.matrix) {
        (
            StepKind::CoordinateChange {
                index,
                base,
                coeff,
                exponent,
            },
            _,
        ) => {
            let (i, b) = (*index, *base);
            if i >= coords.len() || b >= coords.len() || i == b {
                return Err(Error::MalformedCertificate(format!(
                    "bad change indices {i}, {b}"
                )));
            }
            let mut out = coords.to_vec();
            out[i] = coords[i].sub(&coords[b].pow(*exponent)?.scale(coeff))?;
            Ok(out)
        }
        (_, Some(m)) => {
            let n = coords.len();
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::MalformedCertificate(format!(
                    "step matrix {m} has wrong size"
                )));
            }
            let mut out = Vec::with_capacity(n);
            for row in m.rows() {
                let mut num: Option<LaurentTailSeries> = None;
                let mut den: Option<LaurentTailSeries> = None;
                for (i, &e) in row.iter().enumerate() {
                    let slot = if e > 0 { &mut num } else { &mut den };
                    for _ in 0..e.unsigned_abs() {
                        *slot = Some(match slot.take() {
                            None => coords[i].clone(),
                            Some(acc) => acc.mul(&coords[i])?,
                        });
                    }
                }
                let num = match num {
                    Some(x) => x,
                    None => LaurentTailSeries::monomial(
                        coords[0].tower().one(),
                        0,
                        0,
                        coords[0].t1,
                        coords[0].t2(),
                    )?,
                };
                out.push(match den {
                    None => num,
                    Some(d) => num.div(&d)?,
                });
            }
            Ok(out)
        }
        (_, None) => Err(Error::MalformedCertificate(format!(
            "monomial step without matrix: {step}"
        ))),
    }
}

pub fn replay(
    input: &[LaurentTailSeries],
    steps: &[TransformStep],
) -> Result<Vec<LaurentTailSeries>> {
    let mut coords = input.to_vec();
    for s in steps {
        coords = apply_step(&coords, s)?;
    }
    Ok(coords)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rank2Outcome {
    /// Independent values; `det` is the determinant of the value matrix.
    Monomial { values: [Rank2Value; 2], det: i64 },
    /// The step budget ran out while the values stayed dependent.
    BudgetExhausted {
        reason: String,
        values: Vec<Rank2Order>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank2Certificate {
    pub input: Vec<LaurentTailSeries>,
    pub steps: Vec<TransformStep>,
    pub coords: Vec<LaurentTailSeries>,
    pub outcome: Rank2Outcome,
}

impl Rank2Certificate {
    pub fn value_matrix(&self) -> Option<IntMatrix> {
        match &self.outcome {
            Rank2Outcome::Monomial { values, .. } => {
                IntMatrix::from_columns(&values.map(|v| vec![v.0, v.1])).ok()
            }
            Rank2Outcome::BudgetExhausted { .. } => None,
        }
    }
}

fn det(a: Rank2Value, b: Rank2Value) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

/// Reduce the images of `X1, X2` until their values are Z-independent:
/// blow up the larger value by the smaller, and on equal values subtract
/// the residue multiple. Runs past `budget` steps are reported as a
/// candidate infinite process.
pub fn rank2_classify(images: &[LaurentTailSeries], budget: usize) -> Result<Rank2Certificate> {
    if images.len() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: images.len(),
        });
    }
    for (k, w) in images.iter().enumerate() {
        match vhat(w) {
            Rank2Order::Finite(v) if v.is_positive() => {}
            Rank2Order::Finite(v) => {
                return Err(Error::InvalidInput(format!(
                    "image of X{} has value {v}, not positive",
                    k + 1
                )))
            }
            Rank2Order::Inconclusive => {
                return Err(Error::Inconclusive(format!(
                    "image of X{} has no visible term",
                    k + 1
                )))
            }
        }
    }
    let mut coords = images.to_vec();
    let mut steps: Vec<TransformStep> = Vec::new();
    let exhausted = |reason: String, coords: &[LaurentTailSeries]| Rank2Outcome::BudgetExhausted {
        reason,
        values: coords.iter().map(vhat).collect(),
    };
    let outcome = loop {
        let (Some(a), Some(b)) = (vhat(&coords[0]).finite(), vhat(&coords[1]).finite()) else {
            break exhausted(
                "a value became inconclusive at this truncation".into(),
                &coords,
            );
        };
        let d = det(a, b);
        if d != 0 {
            break Rank2Outcome::Monomial {
                values: [a, b],
                det: d,
            };
        }
        if steps.len() >= budget {
            break exhausted(
                format!("infinite process candidate: values stay dependent after {budget} steps"),
                &coords,
            );
        }
        let step = if a == b {
            let ca = coords[0].leading_term().unwrap().1;
            let cb = coords[1].leading_term().unwrap().1;
            TransformStep::change(1, 0, (cb / ca).clone(), 1)
        } else if a < b {
            TransformStep::blowup(2, 0, 1)
        } else {
            TransformStep::blowup(2, 1, 0)
        };
        coords = match apply_step(&coords, &step) {
            Ok(c) => c,
            Err(Error::OutsideWindow(why)) | Err(Error::Inconclusive(why)) => {
                break exhausted(why, &coords);
            }
            Err(e) => return Err(e),
        };
        steps.push(step);
    };
    Ok(Rank2Certificate {
        input: images.to_vec(),
        steps,
        coords,
        outcome,
    })
}

#[cfg(test)]
mod tests;

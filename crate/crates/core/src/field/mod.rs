//! Exact characteristic-zero coefficient fields.
//!
//! A [`FieldTower`] is Q(u_1, ..., u_r) followed by simple algebraic
//! extensions. Every [`FieldElem`] is kept in canonical form, so equality is
//! structural.

mod arith;
mod flat;
mod irreducible;
mod mpoly;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg;
use arith::{AlgExt, Elem, TowerData};

pub(crate) use flat::FlatPoly;

/// Q(u_1, ..., u_r)[y_1]/(m_1)...[y_s]/(m_s).
#[derive(Clone)]
pub struct FieldTower(Arc<TowerData>);

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldTower({})", self.describe())
    }
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for FieldTower {}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl FieldTower {
    pub fn rationals() -> Self {
        FieldTower(Arc::new(TowerData {
            trans: Vec::new(),
            alg: Vec::new(),
        }))
    }

    pub fn transcendental<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let trans: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for n in &trans {
            if !valid_name(n) {
                return Err(Error::InvalidTower(format!("bad generator name `{n}`")));
            }
            if !seen.insert(n.clone()) {
                return Err(Error::InvalidTower(format!("duplicate generator `{n}`")));
            }
        }
        Ok(FieldTower(Arc::new(TowerData {
            trans,
            alg: Vec::new(),
        })))
    }

    /// Adjoin a root `name` of the monic polynomial with the given
    /// coefficients (lowest degree first, elements of this tower).
    pub fn adjoin(&self, name: &str, minpoly: &[FieldElem]) -> Result<Self> {
        if !valid_name(name) || self.names().iter().any(|n| n == name) {
            return Err(Error::InvalidTower(format!(
                "bad or duplicate generator `{name}`"
            )));
        }
        if minpoly.iter().any(|c| c.tower != *self) {
            return Err(Error::TowerMismatch);
        }
        if minpoly.len() < 3 {
            return Err(Error::InvalidTower(
                "minimal polynomial must have degree >= 2".into(),
            ));
        }
        if !minpoly.last().unwrap().is_one() {
            return Err(Error::InvalidTower(
                "minimal polynomial must be monic".into(),
            ));
        }
        let level = self.0.top();
        irreducible::certify(
            &self.0,
            level,
            &minpoly.iter().map(|c| c.e.clone()).collect::<Vec<_>>(),
        )
        .map_err(|why| Error::InvalidTower(format!("{name}: {why}")))?;
        let alg = self
            .0
            .alg
            .iter()
            .map(|a| AlgExt {
                name: a.name.clone(),
                minpoly: a.minpoly.clone(),
            })
            .chain(std::iter::once(AlgExt {
                name: name.to_string(),
                minpoly: minpoly.iter().map(|c| c.e.clone()).collect(),
            }))
            .collect();
        Ok(FieldTower(Arc::new(TowerData {
            trans: self.0.trans.clone(),
            alg,
        })))
    }

    fn top(&self) -> usize {
        self.0.top()
    }

    /// All generator names, transcendental ones first.
    pub fn names(&self) -> Vec<String> {
        self.0
            .trans
            .iter()
            .cloned()
            .chain(self.0.alg.iter().map(|a| a.name.clone()))
            .collect()
    }

    pub fn transcendental_names(&self) -> &[String] {
        &self.0.trans
    }

    pub fn is_purely_transcendental(&self) -> bool {
        self.0.alg.is_empty()
    }

    pub fn generator(&self, name: &str) -> Option<FieldElem> {
        let pos = self.names().iter().position(|n| n == name)?;
        let r = self.0.nvars();
        let e = if pos < r {
            self.0.lift(0, self.top(), self.0.trans_generator(pos))
        } else {
            let l = pos - r + 1;
            self.0.lift(l, self.top(), self.0.alg_generator(l))
        };
        Some(self.wrap(e))
    }

    fn wrap(&self, e: Elem) -> FieldElem {
        FieldElem {
            tower: self.clone(),
            e,
        }
    }

    pub fn zero(&self) -> FieldElem {
        self.wrap(self.0.zero(self.top()))
    }

    pub fn one(&self) -> FieldElem {
        self.wrap(self.0.one(self.top()))
    }

    pub fn int(&self, n: i64) -> FieldElem {
        self.rational(BigRational::from_integer(n.into()))
    }

    pub fn rational(&self, q: BigRational) -> FieldElem {
        self.wrap(self.0.rational(self.top(), q))
    }

    /// Minimal polynomials of the algebraic generators as printable text.
    pub fn algebraic_extensions(&self) -> Vec<(String, String)> {
        let names = self.names();
        let r = self.0.trans.len();
        self.0
            .alg
            .iter()
            .enumerate()
            .map(|(i, ext)| {
                let parts: Vec<_> = ext
                    .minpoly
                    .iter()
                    .map(|c| flat::flatten(&self.0, i, c))
                    .collect();
                let nums = flat::common_numerators(&parts, self.0.width());
                let level = r + i;
                // Σ num_i · y^i over the common denominator, which is dropped.
                let mut poly = FlatPoly::new();
                for (k, n) in nums.iter().enumerate() {
                    for (e, c) in n {
                        let mut e = e.clone();
                        e[level] += k as u32;
                        poly.insert(e, c.clone());
                    }
                }
                (ext.name.clone(), flat::fmt_flat(&poly, &names))
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        let mut s = if self.0.trans.is_empty() {
            "Q".to_string()
        } else {
            format!("Q({})", self.0.trans.join(", "))
        };
        for (name, poly) in self.algebraic_extensions() {
            s.push_str(&format!("[{name} : {poly} = 0]"));
        }
        s
    }
}

/// An element of a [`FieldTower`], always in canonical form.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElem {
    tower: FieldTower,
    e: Elem,
}

impl std::hash::Hash for FieldElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.e.hash(state);
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.tower.names();
        let (mut num, mut den) = flat::flatten(&self.tower.0, self.tower.top(), &self.e);
        if flat::leading_is_negative(&den) {
            num = flat::flat_neg(&num);
            den = flat::flat_neg(&den);
        }
        if flat::is_one(&den) {
            return write!(f, "{}", flat::fmt_flat(&num, &names));
        }
        if let Some(c) = flat::constant_of(&den) {
            let scaled: FlatPoly = num.iter().map(|(e, x)| (e.clone(), x / &c)).collect();
            return write!(f, "{}", flat::fmt_flat(&scaled, &names));
        }
        let n = flat::fmt_flat(&num, &names);
        let d = flat::fmt_flat(&den, &names);
        write!(f, "({n})/({d})")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked arithmetic: fails on tower mismatch or division by zero.
pub fn field_arith(a: &FieldElem, b: &FieldElem, op: ArithOp) -> Result<FieldElem> {
    if a.tower != b.tower {
        return Err(Error::TowerMismatch);
    }
    let td = &a.tower.0;
    let l = td.top();
    let e = match op {
        ArithOp::Add => td.add(l, &a.e, &b.e),
        ArithOp::Sub => td.sub(l, &a.e, &b.e),
        ArithOp::Mul => td.mul(l, &a.e, &b.e),
        ArithOp::Div => {
            let inv = td.inv(l, &b.e).ok_or(Error::DivisionByZero)?;
            td.mul(l, &a.e, &inv)
        }
    };
    Ok(a.tower.wrap(e))
}

impl FieldElem {
    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn is_zero(&self) -> bool {
        self.tower.0.is_zero(&self.e)
    }

    pub fn is_one(&self) -> bool {
        self.e == self.tower.0.one(self.tower.top())
    }

    /// True iff the element lies in Q.
    pub fn is_constant(&self) -> bool {
        self.tower.0.is_constant(&self.e)
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.tower.0.to_rational(&self.e)
    }

    pub fn inv(&self) -> Result<FieldElem> {
        let l = self.tower.top();
        self.tower
            .0
            .inv(l, &self.e)
            .map(|e| self.tower.wrap(e))
            .ok_or(Error::DivisionByZero)
    }

    pub fn pow(&self, k: i64) -> Result<FieldElem> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.tower.one();
        let mut sq = base;
        let mut n = k.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &sq;
            }
            n >>= 1;
            if n > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Partial derivative with respect to the transcendental generator with
    /// the given index.
    pub fn derivative(&self, generator: usize) -> FieldElem {
        let l = self.tower.top();
        self.tower.wrap(self.tower.0.deriv(l, &self.e, generator))
    }

    /// Algebraic over Q, i.e. every partial derivative vanishes.
    pub fn is_algebraic_over_base(&self) -> bool {
        (0..self.tower.0.trans.len()).all(|g| self.derivative(g).is_zero())
    }

    fn flat(&self) -> (FlatPoly, FlatPoly) {
        flat::flatten(&self.tower.0, self.tower.top(), &self.e)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:expr) => {
        impl<'a> $tr<&'a FieldElem> for &'a FieldElem {
            type Output = FieldElem;
            /// Panics on tower mismatch (and on division by zero for `/`).
            fn $m(self, rhs: &'a FieldElem) -> FieldElem {
                field_arith(self, rhs, $op).expect(concat!("field ", stringify!($m)))
            }
        }
        impl $tr for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, ArithOp::Add);
binop!(Sub, sub, ArithOp::Sub);
binop!(Mul, mul, ArithOp::Mul);
binop!(Div, div, ArithOp::Div);

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        let l = self.tower.top();
        self.tower.wrap(self.tower.0.neg(l, &self.e))
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dependence {
    Dependent,
    Independent,
}

fn field_rank(mut rows: Vec<Vec<FieldElem>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][c].inv().unwrap();
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] * &inv;
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x = &*x - &(&f * y);
            }
        }
        rank += 1;
    }
    rank
}

fn jacobian_row(a: &FieldElem) -> Vec<FieldElem> {
    (0..a.tower.0.trans.len())
        .map(|g| a.derivative(g))
        .collect()
}

/// Decide whether `f` is transcendental over Q(gens) with the Jacobian rank
/// criterion (characteristic zero). Derivations extend uniquely through the
/// algebraic levels, so algebraic towers are handled too.
pub fn transcendence_test(f: &FieldElem, gens: &[FieldElem]) -> Result<Dependence> {
    if gens.iter().any(|g| g.tower != f.tower) {
        return Err(Error::TowerMismatch);
    }
    let mut rows: Vec<Vec<FieldElem>> = gens.iter().map(jacobian_row).collect();
    let base = field_rank(rows.clone());
    rows.push(jacobian_row(f));
    Ok(if field_rank(rows) > base {
        Dependence::Independent
    } else {
        Dependence::Dependent
    })
}

/// Rational vectors `c` with `Σ_A c_A · columns[A] = 0` componentwise.
pub(crate) fn q_kernel(columns: &[Vec<FieldElem>]) -> Vec<Vec<BigRational>> {
    let rows = q_rows(columns, None);
    linalg::nullspace(rows.into_iter().map(|(r, _)| r).collect(), columns.len())
}

/// Rational `c` with `Σ_A c_A · columns[A] = target`, if one exists.
pub(crate) fn q_solve(
    columns: &[Vec<FieldElem>],
    target: &[FieldElem],
) -> Option<Vec<BigRational>> {
    let rows = q_rows(columns, Some(target));
    let (a, b): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    linalg::solve(&a, &b, columns.len())
}

fn q_rows(
    columns: &[Vec<FieldElem>],
    target: Option<&[FieldElem]>,
) -> Vec<(Vec<BigRational>, BigRational)> {
    let dim = columns
        .first()
        .map(Vec::len)
        .or_else(|| target.map(<[FieldElem]>::len))
        .unwrap_or(0);
    let mut rows = Vec::new();
    for j in 0..dim {
        let mut parts: Vec<(FlatPoly, FlatPoly)> = columns.iter().map(|c| c[j].flat()).collect();
        if let Some(t) = target {
            parts.push(t[j].flat());
        }
        let width = parts
            .iter()
            .flat_map(|(n, d)| n.keys().chain(d.keys()))
            .map(Vec::len)
            .next()
            .unwrap_or(0);
        let nums = flat::common_numerators(&parts, width);
        let keys: BTreeSet<&Vec<u32>> = nums.iter().flat_map(|n| n.keys()).collect();
        for key in keys {
            let row: Vec<BigRational> = nums[..columns.len()]
                .iter()
                .map(|n| n.get(key).cloned().unwrap_or_else(BigRational::zero))
                .collect();
            let rhs = if target.is_some() {
                nums[columns.len()]
                    .get(key)
                    .cloned()
                    .unwrap_or_else(BigRational::zero)
            } else {
                BigRational::zero()
            };
            rows.push((row, rhs));
        }
    }
    rows
}

/// Coefficients `h_0..h_deg` in Q with `value = Σ h_b · base^b`, if any.
pub(crate) fn q_polynomial_in(
    value: &FieldElem,
    base: &FieldElem,
    deg: usize,
) -> Option<Vec<BigRational>> {
    let mut powers = Vec::with_capacity(deg + 1);
    let mut p = base.tower.one();
    for _ in 0..=deg {
        powers.push(vec![p.clone()]);
        p = &p * base;
    }
    q_solve(&powers, std::slice::from_ref(value))
}

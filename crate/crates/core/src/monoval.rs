//! Monomial valuations: each variable `X_i` gets a value vector `B_i`, and a
//! series takes the lex-least L-degree `Σ a_i B_i` over its support.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{generates_full_lattice, kernel_basis, IntMatrix};
use crate::series::{ExpVector, LaurentPoly, TruncSeries};

/// Element of Z^m, ordered lexicographically.
#[derive(
    Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
#[serde(transparent)]
pub struct ValueVector(pub Vec<i64>);

impl ValueVector {
    pub fn zero(m: usize) -> Self {
        ValueVector(vec![0; m])
    }

    pub fn add(&self, other: &ValueVector) -> ValueVector {
        ValueVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: i64) -> ValueVector {
        ValueVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }
}

impl fmt::Display for ValueVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [a] = self.0.as_slice() {
            return write!(f, "{a}");
        }
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A value or the infinity assigned to zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Finite(ValueVector),
    Infinity,
}

impl Value {
    pub fn finite(&self) -> Option<&ValueVector> {
        match self {
            Value::Finite(v) => Some(v),
            Value::Infinity => None,
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => a.cmp(b),
            (Value::Finite(_), Value::Infinity) => Ordering::Less,
            (Value::Infinity, Value::Finite(_)) => Ordering::Greater,
            (Value::Infinity, Value::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(v) => write!(f, "{v}"),
            Value::Infinity => write!(f, "infinity"),
        }
    }
}

/// `value` is exact for every completion of the truncated input when
/// `certified` holds.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CertifiedValue {
    pub value: Value,
    pub certified: bool,
}

/// Residue of a quotient of equal-value series, `numerator / denominator`,
/// as polynomials in the residue generators `w_1..w_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueFraction {
    pub numerator: LaurentPoly,
    pub denominator: LaurentPoly,
}

impl ResidueFraction {
    pub fn generator_names(&self) -> Vec<String> {
        (1..=self.numerator.arity())
            .map(|j| format!("w{j}"))
            .collect()
    }
}

impl fmt::Display for ResidueFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.generator_names();
        let n = self.numerator.fmt_with(&names);
        let d = self.denominator.fmt_with(&names);
        if d == "1" {
            write!(f, "{n}")
        } else {
            write!(f, "({n})/({d})")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialValuation {
    weights: IntMatrix,
    min_column: ValueVector,
    kernel: Vec<Vec<i64>>,
}

impl MonomialValuation {
    /// `weights` is m×n with column `i` the value of `X_i`.
    pub fn new(weights: IntMatrix) -> Result<Self> {
        let (m, n) = (weights.nrows(), weights.ncols());
        if m == 0 || n == 0 {
            return Err(Error::InvalidWeights("empty weight matrix".into()));
        }
        let columns: Vec<ValueVector> = (0..n).map(|i| ValueVector(weights.column(i))).collect();
        for (i, c) in columns.iter().enumerate() {
            if c.0.iter().any(|&x| x < 0) || c.is_zero() {
                return Err(Error::InvalidWeights(format!(
                    "value of X{} must be nonzero and nonnegative, got {c}",
                    i + 1
                )));
            }
        }
        if !generates_full_lattice(&weights)? {
            return Err(Error::InvalidWeights(format!(
                "columns of {weights} do not generate Z^{m}"
            )));
        }
        let min_column = columns.iter().min().unwrap().clone();
        let kernel = kernel_basis(&weights)?;
        Ok(MonomialValuation {
            weights,
            min_column,
            kernel,
        })
    }

    pub fn from_columns(columns: &[Vec<i64>]) -> Result<Self> {
        Self::new(IntMatrix::from_columns(columns)?)
    }

    pub fn weights(&self) -> &IntMatrix {
        &self.weights
    }

    pub fn rank(&self) -> usize {
        self.weights.nrows()
    }

    pub fn arity(&self) -> usize {
        self.weights.ncols()
    }

    pub fn min_column(&self) -> &ValueVector {
        &self.min_column
    }

    /// `Σ a_i B_i`.
    pub fn l_degree(&self, a: &ExpVector) -> Result<ValueVector> {
        if a.arity() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                got: a.arity(),
            });
        }
        if !a.is_nonnegative() {
            return Err(Error::NegativeExponent(a.to_string()));
        }
        self.laurent_degree(a)
    }

    /// L-degree of a Laurent monomial.
    fn laurent_degree(&self, a: &ExpVector) -> Result<ValueVector> {
        Ok(ValueVector(self.weights.apply(&a.0)?))
    }

    fn check(&self, f: &TruncSeries) -> Result<()> {
        if f.arity() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                got: f.arity(),
            });
        }
        Ok(())
    }

    /// Lex-least L-degree over the visible support, certified when no
    /// monomial beyond the truncation `D` could undercut it:
    /// `(D+1)·B_min >lex value`.
    pub fn value(&self, f: &TruncSeries) -> Result<CertifiedValue> {
        self.check(f)?;
        let mut best: Option<ValueVector> = None;
        for (e, _) in f.terms() {
            let d = self.laurent_degree(e)?;
            if best.as_ref().is_none_or(|b| d < *b) {
                best = Some(d);
            }
        }
        let bound = f
            .truncation()
            .map(|d| self.min_column.scale(i64::from(d) + 1));
        Ok(match best {
            None => CertifiedValue {
                value: Value::Infinity,
                certified: bound.is_none(),
            },
            Some(v) => CertifiedValue {
                certified: bound.is_none_or(|b| b > v),
                value: Value::Finite(v),
            },
        })
    }

    /// Terms of `f` of least L-degree.
    pub fn initial_form(&self, f: &TruncSeries) -> Result<TruncSeries> {
        let cv = self.value(f)?;
        if !cv.certified {
            return Err(Error::Uncertified);
        }
        let Value::Finite(v) = cv.value else {
            return Ok(f.clone());
        };
        let mut terms = Vec::new();
        for (e, c) in f.terms() {
            if self.laurent_degree(e)? == v {
                terms.push((e.clone(), c.clone()));
            }
        }
        TruncSeries::from_terms(f.tower(), f.arity(), None, terms)
    }

    /// Exponents `A_j` of the Laurent monomials generating the residue field
    /// over the coefficient field.
    pub fn residue_generators(&self) -> Vec<ExpVector> {
        self.kernel.iter().cloned().map(ExpVector).collect()
    }

    /// Integer coordinates of a kernel vector in the generator basis.
    pub fn kernel_coordinates(&self, d: &ExpVector) -> Result<Vec<i64>> {
        let mut rest = d.0.clone();
        let mut coords = Vec::with_capacity(self.kernel.len());
        // the basis is in echelon form with increasing pivot columns
        for a in &self.kernel {
            let p = a.iter().position(|&x| x != 0).unwrap();
            if rest[p] % a[p] != 0 {
                return Err(Error::ResidueNotRepresentable(format!(
                    "{d} is not in the kernel lattice"
                )));
            }
            let c = rest[p] / a[p];
            for (r, x) in rest.iter_mut().zip(a) {
                *r -= c * x;
            }
            coords.push(c);
        }
        if rest.iter().any(|&x| x != 0) {
            return Err(Error::ResidueNotRepresentable(format!(
                "{d} is not in the kernel lattice"
            )));
        }
        Ok(coords)
    }

    /// Residue of `f/g` for `f, g` of the same certified value.
    pub fn residue_of(&self, f: &TruncSeries, g: &TruncSeries) -> Result<ResidueFraction> {
        let (vf, vg) = (self.value(f)?, self.value(g)?);
        if !vf.certified || !vg.certified {
            return Err(Error::Uncertified);
        }
        if vf.value != vg.value || vf.value == Value::Infinity {
            return Err(Error::UnequalValues(format!(
                "{} vs {}",
                vf.value, vg.value
            )));
        }
        let (fi, gi) = (self.initial_form(f)?, self.initial_form(g)?);
        let reference = gi.terms().map(|(e, _)| e.clone()).min().unwrap();
        let k = self.kernel.len();
        let express = |s: &TruncSeries| -> Result<LaurentPoly> {
            let mut p = LaurentPoly::zero(s.tower(), k);
            for (e, c) in s.terms() {
                let coords = self.kernel_coordinates(&e.sub(&reference))?;
                p.add_term(ExpVector(coords), c.clone());
            }
            Ok(p)
        };
        let (mut num, mut den) = (express(&fi)?, express(&gi)?);
        if let [(e, c)] = den.terms().collect::<Vec<_>>().as_slice() {
            let inv = LaurentPoly::monomial(c.inv()?, ExpVector(e.0.iter().map(|x| -x).collect()));
            num = num.mul(&inv);
            den = LaurentPoly::monomial(f.tower().one(), ExpVector::zero(k));
        }
        if num == den {
            let one = LaurentPoly::monomial(f.tower().one(), ExpVector::zero(k));
            return Ok(ResidueFraction {
                numerator: one.clone(),
                denominator: one,
            });
        }
        let lead = den.terms().last().unwrap().1.inv()?;
        let (num, den) = (num.scale(&lead), den.scale(&lead));
        let low = num.min_exponents();
        let low = ExpVector(
            low.0
                .iter()
                .zip(&den.min_exponents().0)
                .map(|(a, b)| -(*a.min(b)))
                .collect(),
        );
        Ok(ResidueFraction {
            numerator: num.shift(&low),
            denominator: den.shift(&low),
        })
    }
}

#[cfg(test)]
mod tests;

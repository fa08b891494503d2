//! Evaluation of parsed expressions into field elements, series and
//! rank-two images.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::parse::{identifiers, parse, Expr, Symbols};
use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldTower};
use crate::rank2::LaurentTailSeries;
use crate::series::{ExpVector, LaurentPoly, ParamSeries, TruncSeries};

/// Text form of a field tower: transcendental generators, then algebraic
/// generators with their minimal polynomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FieldSpec {
    pub transcendentals: Vec<String>,
    pub extensions: Vec<Extension>,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Extension {
    pub name: String,
    pub minpoly: String,
}

impl FieldSpec {
    pub fn of(tower: &FieldTower) -> Self {
        FieldSpec {
            transcendentals: tower.transcendental_names().to_vec(),
            extensions: tower
                .algebraic_extensions()
                .into_iter()
                .map(|(name, minpoly)| Extension { name, minpoly })
                .collect(),
        }
    }

    /// `y: y^2 - u` style declarations.
    pub fn parse_extension(decl: &str) -> Result<Extension> {
        let (name, poly) = decl.split_once(':').ok_or_else(|| {
            Error::InvalidInput(format!("expected `name: polynomial`, got `{decl}`"))
        })?;
        Ok(Extension {
            name: name.trim().to_string(),
            minpoly: poly.trim().to_string(),
        })
    }

    /// Use `transcendentals` when given, otherwise every identifier of
    /// `texts` and the extension polynomials that is neither reserved, nor a
    /// series variable `X<k>`, nor an algebraic generator.
    pub fn infer(
        transcendentals: Option<Vec<String>>,
        extensions: Vec<Extension>,
        texts: &[String],
        reserved: &[String],
    ) -> Result<Self> {
        let transcendentals = match transcendentals {
            Some(t) => t,
            None => {
                let mut names: Vec<String> = Vec::new();
                let sources = extensions.iter().map(|e| &e.minpoly).chain(texts);
                for text in sources {
                    for id in identifiers(text)? {
                        let taken = reserved.contains(&id)
                            || is_series_var(&id)
                            || extensions.iter().any(|e| e.name == id)
                            || names.contains(&id);
                        if !taken {
                            names.push(id);
                        }
                    }
                }
                names
            }
        };
        Ok(FieldSpec {
            transcendentals,
            extensions,
        })
    }

    pub fn build(&self) -> Result<FieldTower> {
        let mut tower = FieldTower::transcendental(self.transcendentals.iter().cloned())?;
        for ext in &self.extensions {
            let vars = [ext.name.clone()];
            let p = eval_series(&ext.minpoly, &tower, &vars)?;
            if p.truncation().is_some() {
                return Err(Error::InvalidTower(format!(
                    "minimal polynomial of {} is truncated",
                    ext.name
                )));
            }
            let degree = p.terms().map(|(e, _)| e.0[0]).max().unwrap_or(0) as usize;
            let mut coeffs = vec![tower.zero(); degree + 1];
            for (e, c) in p.terms() {
                coeffs[e.0[0] as usize] = c.clone();
            }
            let lead = coeffs[degree].inv()?;
            let monic: Vec<FieldElem> = coeffs.iter().map(|c| c * &lead).collect();
            tower = tower.adjoin(&ext.name, &monic)?;
        }
        Ok(tower)
    }
}

fn is_series_var(name: &str) -> bool {
    name.strip_prefix('X')
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

fn symbols(tower: &FieldTower, vars: &[String]) -> Symbols {
    Symbols::new(tower.names().into_iter().chain(vars.iter().cloned()))
}

fn inverse_factorial(tower: &FieldTower, k: u32) -> FieldElem {
    let f = (1..=k).fold(BigInt::one(), |acc, j| acc * j);
    tower.rational(BigRational::new(BigInt::one(), f))
}

enum Val {
    F(FieldElem),
    S(TruncSeries),
}

struct SeriesEval<'a> {
    tower: &'a FieldTower,
    vars: &'a [String],
}

impl SeriesEval<'_> {
    fn series(&self, v: Val) -> TruncSeries {
        match v {
            Val::S(s) => s,
            Val::F(c) => TruncSeries::constant(c, self.vars.len(), None),
        }
    }

    fn binary(
        &self,
        a: Val,
        b: Val,
        op: fn(&TruncSeries, &TruncSeries) -> Result<TruncSeries>,
        fop: fn(&FieldElem, &FieldElem) -> FieldElem,
    ) -> Result<Val> {
        Ok(match (a, b) {
            (Val::F(x), Val::F(y)) => Val::F(fop(&x, &y)),
            (a, b) => Val::S(op(&self.series(a), &self.series(b))?),
        })
    }

    fn eval(&self, e: &Expr) -> Result<Val> {
        Ok(match e {
            Expr::Int(n) => Val::F(self.tower.rational(BigRational::from_integer(n.clone()))),
            Expr::Symbol(s) => match self.vars.iter().position(|v| v == s) {
                Some(i) => Val::S(TruncSeries::variable(self.tower, self.vars.len(), i, None)),
                None => Val::F(
                    self.tower
                        .generator(s)
                        .ok_or_else(|| Error::InvalidInput(format!("unknown generator `{s}`")))?,
                ),
            },
            Expr::Neg(a) => match self.eval(a)? {
                Val::F(x) => Val::F(-x),
                Val::S(s) => Val::S(s.neg()),
            },
            Expr::Add(a, b) => {
                self.binary(self.eval(a)?, self.eval(b)?, TruncSeries::add, |x, y| x + y)?
            }
            Expr::Sub(a, b) => {
                self.binary(self.eval(a)?, self.eval(b)?, TruncSeries::sub, |x, y| x - y)?
            }
            Expr::Mul(a, b) => {
                self.binary(self.eval(a)?, self.eval(b)?, TruncSeries::mul, |x, y| x * y)?
            }
            Expr::Div(a, b) => {
                let d = match self.eval(b)? {
                    Val::F(d) => d,
                    Val::S(s) => constant_of(&s).ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "division by the series `{b}` is not supported"
                        ))
                    })?,
                };
                let inv = d.inv()?;
                match self.eval(a)? {
                    Val::F(x) => Val::F(&x * &inv),
                    Val::S(s) => Val::S(s.scale(&inv)),
                }
            }
            Expr::Pow(a, k) => match self.eval(a)? {
                Val::F(x) => Val::F(x.pow(*k)?),
                Val::S(s) => {
                    let k = u32::try_from(*k).map_err(|_| {
                        Error::InvalidInput(format!("negative power of the series `{a}`"))
                    })?;
                    Val::S(s.pow(k))
                }
            },
            Expr::BigO(d) => Val::S(TruncSeries::zero(self.tower, self.vars.len(), Some(d - 1))),
            Expr::Exp(a, n) => {
                let x = self.series(self.eval(a)?);
                if x.coeff(&ExpVector::zero(self.vars.len())).is_some() {
                    return Err(Error::InvalidInput(format!(
                        "exp argument `{a}` has a constant term"
                    )));
                }
                let mut sum = TruncSeries::constant(self.tower.one(), self.vars.len(), None);
                let mut power = sum.clone();
                for k in 1..=*n {
                    power = power.mul(&x)?;
                    sum = sum.add(&power.scale(&inverse_factorial(self.tower, k)))?;
                }
                Val::S(sum)
            }
        })
    }
}

fn constant_of(s: &TruncSeries) -> Option<FieldElem> {
    if s.truncation().is_some() {
        return None;
    }
    match s.terms().collect::<Vec<_>>().as_slice() {
        [] => Some(s.tower().zero()),
        [(e, c)] if e.total_degree() == 0 => Some((*c).clone()),
        _ => None,
    }
}

/// A field element over `tower`.
pub fn eval_field(text: &str, tower: &FieldTower) -> Result<FieldElem> {
    let e = parse(text, &symbols(tower, &[]))?;
    match (SeriesEval { tower, vars: &[] }).eval(&e)? {
        Val::F(x) => Ok(x),
        Val::S(s) => constant_of(&s)
            .ok_or_else(|| Error::InvalidInput(format!("`{text}` is not a field element"))),
    }
}

/// A series in the variables `vars` with coefficients in `tower`.
pub fn eval_series(text: &str, tower: &FieldTower, vars: &[String]) -> Result<TruncSeries> {
    let e = parse(text, &symbols(tower, vars))?;
    let ev = SeriesEval { tower, vars };
    let v = ev.eval(&e)?;
    Ok(ev.series(v))
}

pub fn x_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

/// A series in `t`, truncated at its `O(d)` marker or at `trunc`, whichever
/// is smaller.
pub fn eval_param(text: &str, tower: &FieldTower, trunc: Option<u32>) -> Result<ParamSeries> {
    let s = eval_series(text, tower, &["t".to_string()])?;
    let t = match (s.truncation(), trunc) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => {
            return Err(Error::InvalidInput(format!(
                "`{text}` needs a truncation: add O(d) or pass --trunc"
            )))
        }
    };
    let mut coeffs = vec![tower.zero(); t as usize + 1];
    for (e, c) in s.terms() {
        if let Some(slot) = coeffs.get_mut(e.0[0] as usize) {
            *slot = c.clone();
        }
    }
    ParamSeries::from_coeffs(tower, t, coeffs)
}

enum LVal {
    F(FieldElem),
    L(LaurentPoly),
}

struct LaurentEval<'a> {
    tower: &'a FieldTower,
}

const LAURENT_VARS: [&str; 2] = ["u1", "u2"];

impl LaurentEval<'_> {
    fn poly(&self, v: LVal) -> LaurentPoly {
        match v {
            LVal::L(p) => p,
            LVal::F(c) => LaurentPoly::monomial(c, ExpVector::zero(2)),
        }
    }

    fn single(&self, p: &LaurentPoly) -> Option<(ExpVector, FieldElem)> {
        match p.terms().collect::<Vec<_>>().as_slice() {
            [(e, c)] => Some(((*e).clone(), (*c).clone())),
            _ => None,
        }
    }

    fn inverse(&self, p: &LaurentPoly, what: &Expr) -> Result<LaurentPoly> {
        let (e, c) = self.single(p).ok_or_else(|| {
            Error::InvalidInput(format!(
                "only Laurent monomials can be inverted, not `{what}`"
            ))
        })?;
        Ok(LaurentPoly::monomial(
            c.inv()?,
            ExpVector(e.0.iter().map(|x| -x).collect()),
        ))
    }

    fn eval(&self, e: &Expr) -> Result<LVal> {
        let minus_one = || self.tower.int(-1);
        Ok(match e {
            Expr::Int(n) => LVal::F(self.tower.rational(BigRational::from_integer(n.clone()))),
            Expr::Symbol(s) => match LAURENT_VARS.iter().position(|v| v == s) {
                Some(i) => LVal::L(LaurentPoly::monomial(
                    self.tower.one(),
                    ExpVector::unit(2, i),
                )),
                None => LVal::F(
                    self.tower
                        .generator(s)
                        .ok_or_else(|| Error::InvalidInput(format!("unknown generator `{s}`")))?,
                ),
            },
            Expr::Neg(a) => match self.eval(a)? {
                LVal::F(x) => LVal::F(-x),
                LVal::L(p) => LVal::L(p.scale(&minus_one())),
            },
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                match (x, y, e) {
                    (LVal::F(x), LVal::F(y), Expr::Add(..)) => LVal::F(&x + &y),
                    (LVal::F(x), LVal::F(y), Expr::Sub(..)) => LVal::F(&x - &y),
                    (LVal::F(x), LVal::F(y), _) => LVal::F(&x * &y),
                    (x, y, Expr::Add(..)) => LVal::L(self.poly(x).add(&self.poly(y))),
                    (x, y, Expr::Sub(..)) => {
                        LVal::L(self.poly(x).add(&self.poly(y).scale(&minus_one())))
                    }
                    (x, y, _) => LVal::L(self.poly(x).mul(&self.poly(y))),
                }
            }
            Expr::Div(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (LVal::F(x), LVal::F(y)) => LVal::F(&x * &y.inv()?),
                (x, y) => LVal::L(self.poly(x).mul(&self.inverse(&self.poly(y), b)?)),
            },
            Expr::Pow(a, k) => match self.eval(a)? {
                LVal::F(x) => LVal::F(x.pow(*k)?),
                LVal::L(p) => {
                    let base = if *k < 0 { self.inverse(&p, a)? } else { p };
                    let mut acc = LaurentPoly::monomial(self.tower.one(), ExpVector::zero(2));
                    for _ in 0..k.unsigned_abs() {
                        acc = acc.mul(&base);
                    }
                    LVal::L(acc)
                }
            },
            Expr::BigO(_) => {
                return Err(Error::InvalidInput(
                    "rank-two images take their truncation from --trunc-u1/--trunc-u2".into(),
                ))
            }
            Expr::Exp(a, n) => {
                let x = self.poly(self.eval(a)?);
                if x.terms().any(|(e, _)| e.0 == [0, 0]) {
                    return Err(Error::InvalidInput(format!(
                        "exp argument `{a}` has a constant term"
                    )));
                }
                let mut sum = LaurentPoly::monomial(self.tower.one(), ExpVector::zero(2));
                let mut power = sum.clone();
                for k in 1..=*n {
                    power = power.mul(&x);
                    sum = sum.add(&power.scale(&inverse_factorial(self.tower, k)));
                }
                LVal::L(sum)
            }
        })
    }
}

/// A rank-two image in `u1, u2` inside the window `(t1, t2)`.
pub fn eval_laurent(text: &str, tower: &FieldTower, t1: u32, t2: u32) -> Result<LaurentTailSeries> {
    let vars: Vec<String> = LAURENT_VARS.iter().map(|s| s.to_string()).collect();
    let e = parse(text, &symbols(tower, &vars))?;
    let ev = LaurentEval { tower };
    let p = ev.eval(&e)?;
    let p = ev.poly(p);
    let mut terms = Vec::new();
    for (e, c) in p.terms() {
        let i = u32::try_from(e.0[0])
            .map_err(|_| Error::NotASeries(format!("`{text}` has a negative power of u1")))?;
        terms.push((i, e.0[1], c.clone()));
    }
    LaurentTailSeries::from_terms(tower, t1, t2, terms)
}

pub fn laurent_vars() -> Vec<String> {
    LAURENT_VARS.iter().map(|s| s.to_string()).collect()
}

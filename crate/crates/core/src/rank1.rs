//! Rank-one valuations given by substitution `X_i ↦ φ_i(t)` followed by the
//! `t`-order, and the engines that reduce them to monomial form by
//! blow-ups and coordinate changes.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{
    q_kernel, q_polynomial_in, transcendence_test, Dependence, FieldElem, FieldTower,
};
use crate::lattice::{blowup_matrix, permutation_matrix, IntMatrix};
use crate::series::{substitute, ExpVector, LaurentPoly, ParamSeries, TOrder, TruncSeries};

/// Valuation `f ↦ ord_t f(images)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamValuation {
    images: Vec<ParamSeries>,
}

impl ParamValuation {
    pub fn new(images: Vec<ParamSeries>) -> Result<Self> {
        let Some(first) = images.first() else {
            return Err(Error::InvalidInput(
                "a valuation needs at least one image".into(),
            ));
        };
        let tower = first.tower().clone();
        for (i, s) in images.iter().enumerate() {
            if *s.tower() != tower {
                return Err(Error::TowerMismatch);
            }
            match s.order() {
                TOrder::Finite(0) => {
                    return Err(Error::InvalidInput(format!(
                        "image of X{} has a constant term",
                        i + 1
                    )))
                }
                TOrder::Inconclusive => {
                    return Err(Error::InvalidInput(format!(
                        "image of X{} is zero through its truncation",
                        i + 1
                    )))
                }
                TOrder::Finite(_) => {}
            }
        }
        Ok(ParamValuation { images })
    }

    pub fn images(&self) -> &[ParamSeries] {
        &self.images
    }

    pub fn arity(&self) -> usize {
        self.images.len()
    }

    pub fn tower(&self) -> &FieldTower {
        self.images[0].tower()
    }

    pub fn truncation(&self) -> u32 {
        self.images
            .iter()
            .map(ParamSeries::truncation)
            .min()
            .unwrap()
    }

    fn orders(&self) -> Vec<u32> {
        self.images
            .iter()
            .map(|s| s.order().finite().unwrap())
            .collect()
    }
}

/// `ord_t f(images)`, inconclusive when the substituted series vanishes
/// through the truncation.
pub fn value_of(p: &ParamValuation, f: &TruncSeries) -> Result<TOrder> {
    Ok(substitute(f, &p.images)?.order())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// `z_dividend := z_dividend / z_divisor`.
    Blowup { divisor: usize, dividend: usize },
    /// `z_index := z_index − coeff · z_base^exponent`.
    CoordinateChange {
        index: usize,
        base: usize,
        coeff: FieldElem,
        exponent: u32,
    },
    /// New `z_j` is old `z_{perm[j]}`.
    Reorder { perm: Vec<usize> },
}

/// One recorded transform. Monomial steps carry their exponent matrix: row
/// `j` lists the exponents of the new `z_j` in the old coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformStep {
    pub kind: StepKind,
    pub matrix: Option<IntMatrix>,
    pub trace: String,
}

impl TransformStep {
    pub fn blowup(n: usize, divisor: usize, dividend: usize) -> Self {
        TransformStep {
            kind: StepKind::Blowup { divisor, dividend },
            matrix: Some(blowup_matrix(n, divisor, dividend)),
            trace: format!("blow-up: z{0} := z{0} / z{1}", dividend + 1, divisor + 1),
        }
    }

    pub fn change(index: usize, base: usize, coeff: FieldElem, exponent: u32) -> Self {
        let power = if exponent == 1 {
            format!("z{}", base + 1)
        } else {
            format!("z{}^{exponent}", base + 1)
        };
        TransformStep {
            trace: format!("change: z{0} := z{0} - ({coeff})*{power}", index + 1),
            kind: StepKind::CoordinateChange {
                index,
                base,
                coeff,
                exponent,
            },
            matrix: None,
        }
    }

    pub fn reorder(perm: Vec<usize>) -> Self {
        let names: Vec<String> = perm.iter().map(|p| format!("z{}", p + 1)).collect();
        TransformStep {
            trace: format!("reorder: new coordinates ({})", names.join(", ")),
            matrix: Some(permutation_matrix(&perm)),
            kind: StepKind::Reorder { perm },
        }
    }

    pub fn is_blowup(&self) -> bool {
        matches!(self.kind, StepKind::Blowup { .. })
    }

    pub fn is_change(&self) -> bool {
        matches!(self.kind, StepKind::CoordinateChange { .. })
    }
}

impl fmt::Display for TransformStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.trace)
    }
}

fn one_series(coords: &[ParamSeries]) -> ParamSeries {
    let t = coords
        .iter()
        .map(ParamSeries::truncation)
        .min()
        .unwrap_or(0);
    ParamSeries::monomial(coords[0].tower().one(), 0, t)
}

fn product(factors: &[(usize, u32)], coords: &[ParamSeries]) -> Result<ParamSeries> {
    let mut acc: Option<ParamSeries> = None;
    for &(i, k) in factors {
        for _ in 0..k {
            acc = Some(match acc {
                None => coords[i].clone(),
                Some(a) => a.mul(&coords[i])?,
            });
        }
    }
    Ok(acc.unwrap_or_else(|| one_series(coords)))
}

/// Apply one step to coordinate images. Monomial steps are driven by their
/// matrix, so a corrupted matrix shows up here.
pub fn apply_step(coords: &[ParamSeries], step: &TransformStep) -> Result<Vec<ParamSeries>> {
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
            let term = product(&[(b, *exponent)], coords)?.scale(coeff);
            out[i] = coords[i].sub(&term)?;
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
                let num: Vec<(usize, u32)> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e as u32))
                    .collect();
                let den: Vec<(usize, u32)> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e < 0)
                    .map(|(i, &e)| (i, e.unsigned_abs() as u32))
                    .collect();
                let top = product(&num, coords)?;
                out.push(if den.is_empty() {
                    top
                } else {
                    top.div(&product(&den, coords)?)?
                });
            }
            Ok(out)
        }
        (_, None) => Err(Error::MalformedCertificate(format!(
            "monomial step without matrix: {step}"
        ))),
    }
}

/// Re-execute `steps` on `input`.
pub fn replay(input: &[ParamSeries], steps: &[TransformStep]) -> Result<Vec<ParamSeries>> {
    let mut coords = input.to_vec();
    for s in steps {
        coords = apply_step(&coords, s)?;
    }
    Ok(coords)
}

/// Original variables expressed in the final coordinates `Z_1..Z_n`,
/// obtained by inverting every step symbolically.
pub fn pullback(tower: &FieldTower, n: usize, steps: &[TransformStep]) -> Result<Vec<LaurentPoly>> {
    let mut phi: Vec<LaurentPoly> = (0..n)
        .map(|i| LaurentPoly::monomial(tower.one(), ExpVector::unit(n, i)))
        .collect();
    for step in steps {
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
                // old z_index = Z_index + coeff · Z_base^exponent
                let mut e = ExpVector::zero(n);
                e.0[*base] = i64::from(*exponent);
                let repl = LaurentPoly::monomial(tower.one(), ExpVector::unit(n, *index))
                    .add(&LaurentPoly::monomial(coeff.clone(), e));
                phi = phi
                    .iter()
                    .map(|p| substitute_variable(p, *index, &repl))
                    .collect::<Result<_>>()?;
            }
            (_, Some(m)) => {
                let inv = m.inverse()?;
                phi = phi
                    .iter()
                    .map(|p| {
                        let mut out = LaurentPoly::zero(tower, n);
                        for (e, c) in p.terms() {
                            out.add_term(e.times(inv.rows())?, c.clone());
                        }
                        Ok(out)
                    })
                    .collect::<Result<_>>()?;
            }
            (_, None) => {
                return Err(Error::MalformedCertificate(format!(
                    "monomial step without matrix: {step}"
                )))
            }
        }
    }
    Ok(phi)
}

fn substitute_variable(p: &LaurentPoly, var: usize, repl: &LaurentPoly) -> Result<LaurentPoly> {
    let n = p.arity();
    let mut out = LaurentPoly::zero(repl_tower(repl), n);
    for (e, c) in p.terms() {
        let k = e.0[var];
        if k < 0 {
            return Err(Error::NotASeries(format!(
                "negative power of Z{} under a coordinate change",
                var + 1
            )));
        }
        let mut rest = e.clone();
        rest.0[var] = 0;
        let mut term = LaurentPoly::monomial(c.clone(), rest);
        for _ in 0..k {
            term = term.mul(repl);
        }
        out = out.add(&term);
    }
    Ok(out)
}

fn repl_tower(p: &LaurentPoly) -> &FieldTower {
    p.terms()
        .next()
        .map(|(_, c)| c.tower())
        .expect("nonzero replacement")
}

/// `f(polys)` for a series `f` in as many variables as `polys`.
pub fn compose(f: &TruncSeries, polys: &[LaurentPoly]) -> Result<LaurentPoly> {
    let n = polys.first().map_or(0, LaurentPoly::arity);
    let mut out = LaurentPoly::zero(f.tower(), n);
    let mut powers: Vec<Vec<LaurentPoly>> = polys
        .iter()
        .map(|p| {
            vec![
                LaurentPoly::monomial(f.tower().one(), ExpVector::zero(n)),
                p.clone(),
            ]
        })
        .collect();
    for (e, c) in f.terms() {
        let mut term = LaurentPoly::monomial(c.clone(), ExpVector::zero(n));
        for (i, &a) in e.0.iter().enumerate() {
            while powers[i].len() <= a as usize {
                let next = powers[i].last().unwrap().mul(&polys[i]);
                powers[i].push(next);
            }
            term = term.mul(&powers[i][a as usize]);
        }
        out = out.add(&term);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Two coordinates of common order `order` whose residue ratio is
    /// transcendental over Q; the valuation is monomial with weights
    /// `(order, order)` on them.
    Monomial2 {
        order: u32,
        residue: FieldElem,
    },
    /// The first two final coordinates already contain every original
    /// variable; `witnesses[i]` writes `X_{i+1}` as a series in them.
    OutcomeA {
        order: u32,
        residue: FieldElem,
        witnesses: Vec<TruncSeries>,
        relation: Option<TruncSeries>,
    },
    /// `z_2 = Σ expansion2[j-1] z_1^j`, `z_3 = Σ expansion3[j-1] z_1^j`;
    /// `normalized3` expands `z_3` in `z_1' = z_2 / u`.
    OutcomeB {
        order: u32,
        u: FieldElem,
        expansion2: Vec<FieldElem>,
        expansion3: Vec<FieldElem>,
        normalized3: Vec<FieldElem>,
        first_transcendental: Option<usize>,
        residue_generators: Vec<FieldElem>,
        relation: Option<TruncSeries>,
    },
    BudgetExhausted {
        reason: String,
    },
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Monomial2 { .. } => "monomial2",
            Outcome::OutcomeA { .. } => "outcome_a",
            Outcome::OutcomeB { .. } => "outcome_b",
            Outcome::BudgetExhausted { .. } => "budget_exhausted",
        }
    }
}

/// Replayable record of an engine run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub input: ParamValuation,
    pub steps: Vec<TransformStep>,
    pub coords: Vec<ParamSeries>,
    pub outcome: Outcome,
    /// Number of times the common order dropped.
    pub drops: u32,
}

impl Certificate {
    pub fn count_blowups(&self) -> usize {
        self.steps.iter().filter(|s| s.is_blowup()).count()
    }

    pub fn count_changes(&self) -> usize {
        self.steps.iter().filter(|s| s.is_change()).count()
    }

    /// Value of `f` computed from the certificate alone: pull `f` back to
    /// the final coordinates and read off the value there. Inconclusive
    /// when it exceeds the input truncation, like [`value_of`].
    pub fn value(&self, f: &TruncSeries) -> Result<TOrder> {
        let t = self.input.truncation();
        let within = |v: i64| -> Result<TOrder> {
            if v < 0 {
                return Err(Error::MalformedCertificate(format!("negative value {v}")));
            }
            Ok(if v > i64::from(t) {
                TOrder::Inconclusive
            } else {
                TOrder::Finite(v as u32)
            })
        };
        let n = self.input.arity();
        match &self.outcome {
            Outcome::Monomial2 { order, .. } => {
                let phi = pullback(self.input.tower(), n, &self.steps)?;
                match lowest_degree(&compose(f, &phi)?) {
                    Some(r) => within(r * i64::from(*order)),
                    None => Ok(TOrder::Inconclusive),
                }
            }
            Outcome::OutcomeA {
                order, witnesses, ..
            } => {
                let polys: Vec<LaurentPoly> = witnesses.iter().map(to_laurent).collect();
                match lowest_degree(&compose(f, &polys)?) {
                    Some(r) => within(r * i64::from(*order)),
                    None => Ok(TOrder::Inconclusive),
                }
            }
            Outcome::OutcomeB {
                order,
                expansion2,
                expansion3,
                ..
            } => {
                let phi = pullback(self.input.tower(), n, &self.steps)?;
                let g = to_series(&compose(f, &phi)?)?;
                let tower = self.input.tower();
                let j = expansion2.len().min(expansion3.len()) as u32;
                let s = ParamSeries::monomial(tower.one(), 1, j);
                let e = |c: &[FieldElem]| {
                    let mut v = vec![tower.zero()];
                    v.extend(c.iter().cloned());
                    ParamSeries::from_coeffs(tower, j, v)
                };
                let images = [s, e(expansion2)?, e(expansion3)?];
                match substitute(&g, &images)?.order() {
                    TOrder::Finite(rho) => within(i64::from(rho) * i64::from(*order)),
                    TOrder::Inconclusive => Ok(TOrder::Inconclusive),
                }
            }
            Outcome::BudgetExhausted { reason } => Err(Error::Inconclusive(format!(
                "no certified valuation: {reason}"
            ))),
        }
    }
}

fn lowest_degree(p: &LaurentPoly) -> Option<i64> {
    p.terms().map(|(e, _)| e.total_degree()).min()
}

fn to_laurent(s: &TruncSeries) -> LaurentPoly {
    let mut p = LaurentPoly::zero(s.tower(), s.arity());
    for (e, c) in s.terms() {
        p.add_term(e.clone(), c.clone());
    }
    p
}

fn to_series(p: &LaurentPoly) -> Result<TruncSeries> {
    let tower = p
        .terms()
        .next()
        .map(|(_, c)| c.tower().clone())
        .unwrap_or_else(FieldTower::rationals);
    TruncSeries::from_terms(
        &tower,
        p.arity(),
        None,
        p.terms().map(|(e, c)| (e.clone(), c.clone())),
    )
}

/// Outcome of a bounded search for polynomial relations among the images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndependenceCheck {
    NoRelationFound,
    RelationFound(TruncSeries),
}

fn monomials(n: usize, degree: u32) -> Vec<ExpVector> {
    if n == 0 {
        return if degree == 0 {
            vec![ExpVector(vec![])]
        } else {
            vec![]
        };
    }
    let mut out = Vec::new();
    for a in (0..=degree).rev() {
        for mut rest in monomials(n - 1, degree - a) {
            rest.0.insert(0, i64::from(a));
            out.push(rest);
        }
    }
    out
}

/// Search for a nonzero polynomial over Q of total degree at most
/// `degree_bound` vanishing on the images through their truncation.
/// Monomials whose image is invisible at this truncation are left out.
pub fn check_formal_independence(
    p: &ParamValuation,
    degree_bound: u32,
) -> Result<IndependenceCheck> {
    let n = p.arity();
    let tower = p.tower();
    let t = p.truncation();
    let mut exps: Vec<ExpVector> = Vec::new();
    let mut columns: Vec<Vec<FieldElem>> = Vec::new();
    for deg in 1..=degree_bound {
        for e in monomials(n, deg) {
            let f = TruncSeries::from_terms(tower, n, None, [(e.clone(), tower.one())])?;
            let img = substitute(&f, p.images())?;
            if img.order() == TOrder::Inconclusive {
                continue;
            }
            columns.push((0..=t).map(|k| img.coeff(k)).collect());
            exps.push(e);
        }
        let kernel = q_kernel(&columns);
        if let Some(v) = kernel.first() {
            return Ok(IndependenceCheck::RelationFound(relation_polynomial(
                tower, n, &exps, v,
            )?));
        }
    }
    Ok(IndependenceCheck::NoRelationFound)
}

fn relation_polynomial(
    tower: &FieldTower,
    n: usize,
    exps: &[ExpVector],
    v: &[BigRational],
) -> Result<TruncSeries> {
    let lcm = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    // the highest monomial (degree, then lex) gets a positive coefficient
    let lead = exps
        .iter()
        .zip(&ints)
        .filter(|(_, c)| !c.is_zero())
        .max_by(|(a, _), (b, _)| a.total_degree().cmp(&b.total_degree()).then(a.cmp(b)))
        .map(|(_, c)| c.clone())
        .unwrap();
    let g = if lead.is_negative() { -g } else { g };
    TruncSeries::from_terms(
        tower,
        n,
        None,
        exps.iter().zip(&ints).map(|(e, c)| {
            (
                e.clone(),
                tower.rational(BigRational::new(c.clone(), g.clone())),
            )
        }),
    )
}

/// Default degree bound for the independence pre-check: every monomial of
/// that degree is still visible at the truncation, capped to keep the
/// linear algebra small.
pub fn default_independence_bound(p: &ParamValuation) -> u32 {
    let max_order = p.orders().into_iter().max().unwrap_or(1);
    (p.truncation() / max_order).clamp(1, 4)
}

/// Budgets of an engine run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Maximum number of recorded steps.
    pub steps: usize,
    /// Maximum subtraction rounds per containment test.
    pub containment: usize,
    /// Degree bound of the formal-independence pre-check (`None`: derived
    /// from the truncation).
    pub independence_degree: Option<u32>,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            steps: 200,
            containment: 64,
            independence_degree: None,
        }
    }
}

enum Stop {
    Budget,
    Collapsed(String),
    Fail(Error),
}

impl From<Error> for Stop {
    fn from(e: Error) -> Self {
        Stop::Fail(e)
    }
}

type Flow<T> = std::result::Result<T, Stop>;

struct Session {
    coords: Vec<ParamSeries>,
    steps: Vec<TransformStep>,
    budget: usize,
    drops: u32,
}

impl Session {
    fn new(coords: Vec<ParamSeries>, budget: usize) -> Self {
        Session {
            coords,
            steps: Vec::new(),
            budget,
            drops: 0,
        }
    }

    fn n(&self) -> usize {
        self.coords.len()
    }

    fn push(&mut self, step: TransformStep) -> Flow<()> {
        if self.steps.len() >= self.budget {
            return Err(Stop::Budget);
        }
        self.coords = apply_step(&self.coords, &step)?;
        self.steps.push(step);
        Ok(())
    }

    fn order(&self, i: usize) -> Flow<u32> {
        self.coords[i].order().finite().ok_or_else(|| {
            Stop::Collapsed(format!(
                "z{} vanishes through truncation {}",
                i + 1,
                self.coords[i].truncation()
            ))
        })
    }

    fn blowups(&mut self, divisor: usize, dividend: usize, count: u32) -> Flow<()> {
        for _ in 0..count {
            self.push(TransformStep::blowup(self.n(), divisor, dividend))?;
        }
        Ok(())
    }

    /// Euclid on the orders until every coordinate has the least common
    /// order; returns it.
    fn reduce(&mut self) -> Flow<u32> {
        loop {
            let orders: Vec<u32> = (0..self.n()).map(|i| self.order(i)).collect::<Flow<_>>()?;
            let min = *orders.iter().min().unwrap();
            let m = orders.iter().position(|&o| o == min).unwrap();
            let Some(j) = orders.iter().position(|&o| o != min) else {
                return Ok(min);
            };
            let (q, r) = (orders[j] / min, orders[j] % min);
            self.blowups(m, j, if r == 0 { q - 1 } else { q })?;
        }
    }

    fn residue(&self, i: usize) -> Flow<FieldElem> {
        let a = self.coords[i]
            .leading_coeff()
            .ok_or_else(|| Stop::Collapsed(format!("z{} vanishes", i + 1)))?;
        let b = self.coords[0]
            .leading_coeff()
            .ok_or_else(|| Stop::Collapsed("z1 vanishes".into()))?;
        Ok((a / b).clone())
    }

    /// After `z_i` got a higher order `o`, blow up dividing by `z1` to equate
    /// values (`true`) or, when `o` is no multiple of `d`, to drop below `d`
    /// (`false`).
    fn equate(&mut self, i: usize, d: u32) -> Flow<bool> {
        let o = self.order(i)?;
        if o % d == 0 {
            self.blowups(0, i, o / d - 1)?;
            Ok(true)
        } else {
            self.blowups(0, i, o / d)?;
            self.drops += 1;
            Ok(false)
        }
    }
}

/// Residue in the ground field Q: algebraic over Q.
fn in_ground_field(a: &FieldElem) -> Result<bool> {
    Ok(transcendence_test(a, &[])? == Dependence::Dependent)
}

/// Reduce the coordinates to their minimum value by blow-ups following
/// Euclid's algorithm on the orders.
pub fn reduce_min_value(
    coords: &[ParamSeries],
    budget: usize,
) -> Result<(Vec<ParamSeries>, Vec<TransformStep>)> {
    let mut s = Session::new(coords.to_vec(), budget);
    match s.reduce() {
        Ok(_) => Ok((s.coords, s.steps)),
        Err(Stop::Budget) => Err(Error::BudgetExhausted),
        Err(Stop::Collapsed(why)) => Err(Error::Inconclusive(why)),
        Err(Stop::Fail(e)) => Err(e),
    }
}

fn finish(input: &ParamValuation, s: Session, outcome: Flow<Outcome>) -> Result<Certificate> {
    let outcome = match outcome {
        Ok(o) => o,
        Err(Stop::Budget) => Outcome::BudgetExhausted {
            reason: format!("step budget of {} exhausted", s.budget),
        },
        Err(Stop::Collapsed(why)) => Outcome::BudgetExhausted { reason: why },
        Err(Stop::Fail(e)) => return Err(e),
    };
    Ok(Certificate {
        input: input.clone(),
        steps: s.steps,
        coords: s.coords,
        outcome,
        drops: s.drops,
    })
}

/// Two-variable monomialization: reduce to the minimum value, subtract
/// ground-field multiples of `z1` from `z2` while the residue of `z2/z1`
/// lies in Q, and stop at a transcendental residue.
pub fn monomialize2(p: &ParamValuation, budgets: Budgets) -> Result<Certificate> {
    if p.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: p.arity(),
        });
    }
    let bound = budgets
        .independence_degree
        .unwrap_or_else(|| default_independence_bound(p));
    if let IndependenceCheck::RelationFound(rel) = check_formal_independence(p, bound)? {
        return Err(Error::FormallyDependent(rel.to_string()));
    }
    let mut s = Session::new(p.images.clone(), budgets.steps);
    let outcome = monomialize2_loop(&mut s);
    finish(p, s, outcome)
}

fn monomialize2_loop(s: &mut Session) -> Flow<Outcome> {
    'restart: loop {
        let d = s.reduce()?;
        loop {
            let alpha = s.residue(1)?;
            if !in_ground_field(&alpha)? {
                return Ok(Outcome::Monomial2 {
                    order: d,
                    residue: alpha,
                });
            }
            s.push(TransformStep::change(1, 0, alpha, 1))?;
            if !s.equate(1, d)? {
                continue 'restart;
            }
        }
    }
}

/// Three-variable classification into a monomial pair containing every
/// variable (outcome A) or expansions `z_2 = u z_1`, `z_3 = Σ u_{3,j} z_1^j`
/// (outcome B).
pub fn classify3(p: &ParamValuation, budgets: Budgets) -> Result<Certificate> {
    if p.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            got: p.arity(),
        });
    }
    let bound = budgets
        .independence_degree
        .unwrap_or_else(|| default_independence_bound(p));
    let relation = match check_formal_independence(p, bound)? {
        IndependenceCheck::RelationFound(rel) => Some(rel),
        IndependenceCheck::NoRelationFound => None,
    };
    let mut s = Session::new(p.images.clone(), budgets.steps);
    let outcome = classify3_loop(&mut s, p, budgets, relation);
    finish(p, s, outcome)
}

fn classify3_loop(
    s: &mut Session,
    p: &ParamValuation,
    budgets: Budgets,
    relation: Option<TruncSeries>,
) -> Flow<Outcome> {
    'restart: loop {
        let d = s.reduce()?;
        // while both residues lie in Q, subtract and blow up
        loop {
            let a2 = s.residue(1)?;
            let a3 = s.residue(2)?;
            if !(in_ground_field(&a2)? && in_ground_field(&a3)?) {
                break;
            }
            s.push(TransformStep::change(1, 0, a2, 1))?;
            s.push(TransformStep::change(2, 0, a3, 1))?;
            let (o2, o3) = (s.order(1)?, s.order(2)?);
            if o2 % d != 0 || o3 % d != 0 {
                s.drops += 1;
                continue 'restart;
            }
            s.blowups(0, 1, o2 / d - 1)?;
            s.blowups(0, 2, o3 / d - 1)?;
        }
        if in_ground_field(&s.residue(1)?)? {
            s.push(TransformStep::reorder(vec![0, 2, 1]))?;
        }
        // expand z3 over Q until its residue leaves Q or it lands in Q[[z1]]
        loop {
            let a3 = s.residue(2)?;
            if !in_ground_field(&a3)? {
                break;
            }
            s.push(TransformStep::change(2, 0, a3, 1))?;
            if s.coords[2].order() == TOrder::Inconclusive {
                break;
            }
            if !s.equate(2, d)? {
                continue 'restart;
            }
        }
        let u = s.residue(1)?;
        if let Some(witnesses) = containment(
            p.images(),
            &s.coords[0],
            &s.coords[1],
            &u,
            d,
            budgets.containment,
        )? {
            return Ok(Outcome::OutcomeA {
                order: d,
                residue: u,
                witnesses,
                relation,
            });
        }
        let mut expansions = Vec::new();
        for i in [1, 2] {
            match expand(&s.coords[i], &s.coords[0], d)? {
                Expansion::Complete(c) => expansions.push(c),
                Expansion::Drop { coeffs, order } => {
                    for (j, c) in coeffs.into_iter().enumerate() {
                        if !c.is_zero() {
                            s.push(TransformStep::change(i, 0, c, j as u32 + 1))?;
                        }
                    }
                    s.blowups(0, i, order / d)?;
                    s.drops += 1;
                    continue 'restart;
                }
            }
        }
        let expansion3 = expansions.pop().unwrap();
        let expansion2 = expansions.pop().unwrap();
        let u = expansion2[0].clone();
        let z1n = s.coords[1].scale(&u.inv()?);
        let normalized3 = match expand(&s.coords[2], &z1n, d)? {
            Expansion::Complete(c) => c,
            Expansion::Drop { .. } => {
                return Err(Stop::Fail(Error::ResidueNotRepresentable(
                    "z3 has no expansion in z2/u".into(),
                )))
            }
        };
        let mut first_transcendental = None;
        for (j, c) in normalized3.iter().enumerate() {
            if transcendence_test(c, std::slice::from_ref(&u))? == Dependence::Independent {
                first_transcendental = Some(j + 1);
                break;
            }
        }
        let mut residue_generators = vec![u.clone()];
        for c in &normalized3 {
            if !c.is_constant() && !residue_generators.contains(c) {
                residue_generators.push(c.clone());
            }
        }
        return Ok(Outcome::OutcomeB {
            order: d,
            u,
            expansion2,
            expansion3,
            normalized3,
            first_transcendental,
            residue_generators,
            relation,
        });
    }
}

enum Expansion {
    /// Coefficients of `z1^1, z1^2, ...` through the truncation.
    Complete(Vec<FieldElem>),
    /// The remainder after these coefficients has an order that is no
    /// multiple of `ord z1`.
    Drop { coeffs: Vec<FieldElem>, order: u32 },
}

/// Expand `z = Σ_j c_j base^j` coefficient by coefficient while the orders
/// stay multiples of `d = ord base`.
fn expand(z: &ParamSeries, base: &ParamSeries, d: u32) -> Result<Expansion> {
    let lead = base.leading_coeff().ok_or(Error::DivisionByZero)?.clone();
    let t = z.truncation().min(base.truncation());
    let top = t / d;
    let tower = z.tower().clone();
    let mut coeffs: Vec<FieldElem> = Vec::new();
    let mut rem = z.truncate(t);
    let mut power = base.clone();
    let mut power_exp = 1u32;
    loop {
        let o = match rem.order() {
            TOrder::Finite(o) => o,
            TOrder::Inconclusive => break,
        };
        if o % d != 0 {
            return Ok(Expansion::Drop { coeffs, order: o });
        }
        let j = o / d;
        if j > top {
            break;
        }
        while coeffs.len() + 1 < j as usize {
            coeffs.push(tower.zero());
        }
        while power_exp < j {
            power = power.mul(base)?;
            power_exp += 1;
        }
        let c = (rem.leading_coeff().unwrap() / &lead.pow(i64::from(j))?).clone();
        rem = rem.sub(&power.scale(&c))?;
        coeffs.push(c);
    }
    while coeffs.len() < top as usize {
        coeffs.push(tower.zero());
    }
    Ok(Expansion::Complete(coeffs))
}

/// Write each target as a power series over Q in `z1, z2` (same order `d`,
/// residue `u = z2/z1` transcendental) through the truncation, subtracting
/// the leading form at each round. `None` when some target is not
/// contained.
fn containment(
    targets: &[ParamSeries],
    z1: &ParamSeries,
    z2: &ParamSeries,
    u: &FieldElem,
    d: u32,
    rounds: usize,
) -> Result<Option<Vec<TruncSeries>>> {
    let tower = z1.tower().clone();
    let lead = z1.leading_coeff().ok_or(Error::DivisionByZero)?.clone();
    let mut witnesses = Vec::new();
    for g in targets {
        let mut rem = g.clone();
        let mut terms: Vec<(ExpVector, FieldElem)> = Vec::new();
        let mut done = false;
        for _ in 0..rounds {
            let o = match rem.order() {
                TOrder::Finite(o) => o,
                TOrder::Inconclusive => {
                    done = true;
                    break;
                }
            };
            if o % d != 0 {
                return Ok(None);
            }
            let r = o / d;
            let target = (rem.leading_coeff().unwrap() / &lead.pow(i64::from(r))?).clone();
            let Some(h) = q_polynomial_in(&target, u, r as usize) else {
                return Ok(None);
            };
            for (b, c) in h.into_iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let b = b as u32;
                let c = tower.rational(c);
                let mono = z1.pow(r - b).mul(&z2.pow(b))?;
                rem = rem.sub(&mono.scale(&c))?;
                terms.push((ExpVector(vec![i64::from(r - b), i64::from(b)]), c));
            }
        }
        if !done {
            return Ok(None);
        }
        witnesses.push(TruncSeries::from_terms(&tower, 2, None, terms)?);
    }
    Ok(Some(witnesses))
}

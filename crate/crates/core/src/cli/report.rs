//! Machine-readable reports. Every report carries the schema version, the
//! seed, the field tower and the inputs in text form, so a certificate can be
//! re-read and replayed without the command line that produced it.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::eval::{eval_field, FieldSpec};
use crate::error::{Error, Result};
use crate::field::FieldTower;
use crate::lattice::IntMatrix;
use crate::rank1::{StepKind, TransformStep};

pub const SCHEMA_VERSION: u32 = 1;

/// The schema shipped with the crate.
pub const SCHEMA: &str = include_str!("../../schema/report.schema.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub args: Vec<String>,
    pub seed: u64,
    pub field: FieldSpec,
    pub inputs: Vec<String>,
    pub budgets: BudgetReport,
    pub outcome: OutcomeReport,
    pub certificate: Option<CertificateReport>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetReport {
    pub steps: Option<usize>,
    pub containment: Option<usize>,
    pub truncation: Option<u32>,
    pub independence_degree: Option<u32>,
    pub trunc_u1: Option<u32>,
    pub trunc_u2: Option<u32>,
    pub corpus: Option<usize>,
    pub steps_used: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OutcomeReport {
    Value {
        value: String,
        vector: Option<Vec<i64>>,
        certified: bool,
    },
    ResidueGenerators {
        exponents: Vec<Vec<i64>>,
        monomials: Vec<String>,
    },
    Residue {
        residue: String,
    },
    Monomial2 {
        order: u32,
        residue: String,
        value_group: String,
    },
    OutcomeA {
        order: u32,
        residue: String,
        witnesses: Vec<String>,
        relation: Option<String>,
    },
    OutcomeB {
        order: u32,
        u: String,
        expansion2: Vec<String>,
        expansion3: Vec<String>,
        normalized3: Vec<String>,
        first_transcendental: Option<usize>,
        residue_generators: Vec<String>,
        relation: Option<String>,
    },
    BudgetExhausted {
        reason: String,
        snapshot: Vec<String>,
    },
    Rank2Value {
        value: Option<[i64; 2]>,
        in_valuation_ring: bool,
    },
    Rank2Monomial {
        values: [[i64; 2]; 2],
        det: i64,
    },
    Verify {
        passed: bool,
        replay_matches: bool,
        corpus: usize,
        agreements: usize,
        witness: Option<String>,
        detail: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateReport {
    pub steps: Vec<StepReport>,
    pub coords: Vec<String>,
    pub drops: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepReport {
    pub kind: String,
    pub divisor: Option<usize>,
    pub dividend: Option<usize>,
    pub index: Option<usize>,
    pub base: Option<usize>,
    pub coeff: Option<String>,
    pub exponent: Option<u32>,
    pub perm: Option<Vec<usize>>,
    pub matrix: Option<Vec<Vec<i64>>>,
    pub trace: String,
}

impl StepReport {
    pub fn of(step: &TransformStep) -> Self {
        let mut r = StepReport {
            kind: String::new(),
            divisor: None,
            dividend: None,
            index: None,
            base: None,
            coeff: None,
            exponent: None,
            perm: None,
            matrix: step.matrix.as_ref().map(|m| m.rows().to_vec()),
            trace: step.trace.clone(),
        };
        match &step.kind {
            StepKind::Blowup { divisor, dividend } => {
                r.kind = "blowup".into();
                r.divisor = Some(*divisor);
                r.dividend = Some(*dividend);
            }
            StepKind::CoordinateChange {
                index,
                base,
                coeff,
                exponent,
            } => {
                r.kind = "coordinate_change".into();
                r.index = Some(*index);
                r.base = Some(*base);
                r.coeff = Some(coeff.to_string());
                r.exponent = Some(*exponent);
            }
            StepKind::Reorder { perm } => {
                r.kind = "reorder".into();
                r.perm = Some(perm.clone());
            }
        }
        r
    }

    /// Rebuild the step; the recorded matrix is kept as is, so a tampered
    /// matrix survives into the replay.
    pub fn to_step(&self, tower: &FieldTower) -> Result<TransformStep> {
        let missing =
            |what: &str| Error::MalformedCertificate(format!("{} step lacks `{what}`", self.kind));
        let kind = match self.kind.as_str() {
            "blowup" => StepKind::Blowup {
                divisor: self.divisor.ok_or_else(|| missing("divisor"))?,
                dividend: self.dividend.ok_or_else(|| missing("dividend"))?,
            },
            "coordinate_change" => StepKind::CoordinateChange {
                index: self.index.ok_or_else(|| missing("index"))?,
                base: self.base.ok_or_else(|| missing("base"))?,
                coeff: eval_field(
                    self.coeff.as_deref().ok_or_else(|| missing("coeff"))?,
                    tower,
                )?,
                exponent: self.exponent.ok_or_else(|| missing("exponent"))?,
            },
            "reorder" => StepKind::Reorder {
                perm: self.perm.clone().ok_or_else(|| missing("perm"))?,
            },
            k => {
                return Err(Error::MalformedCertificate(format!(
                    "unknown step kind `{k}`"
                )))
            }
        };
        let matrix = match (&kind, &self.matrix) {
            (StepKind::CoordinateChange { .. }, _) => None,
            (_, Some(rows)) => Some(IntMatrix::from_rows(rows.clone())?),
            (_, None) => return Err(missing("matrix")),
        };
        Ok(TransformStep {
            kind,
            matrix,
            trace: self.trace.clone(),
        })
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Report =
            serde_json::from_str(text).map_err(|e| Error::MalformedCertificate(e.to_string()))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::MalformedCertificate(format!(
                "schema version {} is not {SCHEMA_VERSION}",
                r.schema_version
            )));
        }
        Ok(r)
    }

    /// 0 on success, 2 when a budget ran out, 1 when verification failed.
    pub fn exit_code(&self) -> i32 {
        match &self.outcome {
            OutcomeReport::BudgetExhausted { .. } => 2,
            OutcomeReport::Verify { passed: false, .. } => 1,
            _ => 0,
        }
    }

    /// Human-readable rendering with the step trace.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} over {}", self.command, describe(&self.field));
        for (i, input) in self.inputs.iter().enumerate() {
            let _ = writeln!(s, "  input {}: {input}", i + 1);
        }
        if let Some(c) = &self.certificate {
            if !c.steps.is_empty() {
                let _ = writeln!(s, "steps:");
                for (i, st) in c.steps.iter().enumerate() {
                    let _ = writeln!(s, "  {:>3}. {}", i + 1, st.trace);
                }
            }
            let _ = writeln!(s, "final coordinates:");
            for (i, z) in c.coords.iter().enumerate() {
                let _ = writeln!(s, "  z{} = {z}", i + 1);
            }
            if c.drops > 0 {
                let _ = writeln!(s, "order drops: {}", c.drops);
            }
        }
        let list = |v: &[String]| v.join(", ");
        let _ = match &self.outcome {
            OutcomeReport::Value { value, certified, .. } => {
                writeln!(s, "value: {value} ({})", if *certified { "certified" } else { "not certified" })
            }
            OutcomeReport::ResidueGenerators { monomials, .. } => {
                writeln!(s, "residue field generators: {}", list(monomials))
            }
            OutcomeReport::Residue { residue } => writeln!(s, "residue: {residue}"),
            OutcomeReport::Monomial2 { order, residue, value_group } => writeln!(
                s,
                "monomial: z1, z2 of common order {order}, residue z2/z1 = {residue}, value group {value_group}"
            ),
            OutcomeReport::OutcomeA { order, residue, witnesses, relation } => {
                let _ = writeln!(s, "outcome A: order {order}, residue {residue}");
                for (i, w) in witnesses.iter().enumerate() {
                    let _ = writeln!(s, "  X{} = {}  (in Z1, Z2)", i + 1, w.replace('X', "Z"));
                }
                match relation {
                    Some(r) => writeln!(s, "  formal relation found among the images: {r}"),
                    None => Ok(()),
                }
            }
            OutcomeReport::OutcomeB {
                order,
                u,
                expansion3,
                normalized3,
                first_transcendental,
                residue_generators,
                relation,
                ..
            } => {
                let _ = writeln!(s, "outcome B: order {order}, z2 = ({u})*z1 + ...");
                let _ = writeln!(s, "  z3 coefficients in z1: {}", list(expansion3));
                let _ = writeln!(s, "  z3 coefficients in z2/u: {}", list(normalized3));
                let _ = match first_transcendental {
                    Some(j) => writeln!(s, "  first coefficient transcendental over Q(u): index {j}"),
                    None => writeln!(s, "  no coefficient transcendental over Q(u) within truncation"),
                };
                let _ = writeln!(s, "  residue field generators: {}", list(residue_generators));
                match relation {
                    Some(r) => writeln!(s, "  formal relation found among the images: {r}"),
                    None => Ok(()),
                }
            }
            OutcomeReport::BudgetExhausted { reason, snapshot } => {
                let _ = writeln!(s, "budget exhausted: {reason}");
                match snapshot.is_empty() {
                    true => Ok(()),
                    false => writeln!(s, "  values at stop: {}", list(snapshot)),
                }
            }
            OutcomeReport::Rank2Value { value, in_valuation_ring } => match value {
                Some([a, b]) => writeln!(s, "value: ({a},{b}); in valuation ring: {in_valuation_ring}"),
                None => writeln!(s, "value: inconclusive"),
            },
            OutcomeReport::Rank2Monomial { values, det } => writeln!(
                s,
                "monomial: values ({},{}), ({},{}); det {det}",
                values[0][0], values[0][1], values[1][0], values[1][1]
            ),
            OutcomeReport::Verify { passed, replay_matches, corpus, agreements, witness, detail } => {
                let _ = writeln!(s, "{}: {detail}", if *passed { "PASS" } else { "FAIL" });
                let _ = writeln!(s, "  replay reproduces final coordinates: {replay_matches}");
                let _ = writeln!(s, "  value agreement: {agreements}/{corpus}");
                match witness {
                    Some(w) => writeln!(s, "  witness: {w}"),
                    None => Ok(()),
                }
            }
        };
        let _ = writeln!(s, "seed: {}", self.seed);
        s
    }
}

fn describe(f: &FieldSpec) -> String {
    let mut s = if f.transcendentals.is_empty() {
        "Q".to_string()
    } else {
        format!("Q({})", f.transcendentals.join(", "))
    };
    for e in &f.extensions {
        let _ = write!(s, "[{} : {} = 0]", e.name, e.minpoly);
    }
    s
}

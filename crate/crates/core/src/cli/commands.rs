//! Command runners. Each builds a [`Report`]; printing and exit codes are
//! left to the binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::{
    eval_field, eval_laurent, eval_param, eval_series, laurent_vars, x_vars, FieldSpec,
};
use super::report::{
    BudgetReport, CertificateReport, OutcomeReport, Report, StepReport, SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::field::FieldTower;
use crate::lattice::IntMatrix;
use crate::monoval::MonomialValuation;
use crate::rank1::{
    self, classify3, monomialize2, value_of, Budgets, Certificate, Outcome, ParamValuation,
};
use crate::rank2::{self, in_valuation_ring, rank2_classify, vhat, Rank2Order, Rank2Outcome};
use crate::series::{ExpVector, TOrder, TruncSeries};

#[derive(Debug, Parser)]
#[command(
    name = "psval",
    version,
    about = "Exact discrete valuations on formal power series fields"
)]
pub struct Cli {
    /// Print the report as JSON instead of a readable trace.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for every random choice; echoed in the report.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    /// Transcendental generators of the coefficient field, comma separated.
    /// Inferred from the inputs when absent.
    #[arg(long, value_delimiter = ',')]
    pub field: Option<Vec<String>>,
    /// Algebraic generator with its minimal polynomial, as `y: y^2 - u`.
    #[arg(long)]
    pub adjoin: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    /// Truncation of the images when they carry no `O(d)` marker.
    #[arg(long)]
    pub trunc: Option<u32>,
    #[arg(long, default_value_t = 200)]
    pub budget_steps: usize,
    #[arg(long, default_value_t = 64)]
    pub budget_containment: usize,
    /// Degree bound of the formal independence search.
    #[arg(long)]
    pub independence_degree: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct WindowArgs {
    #[arg(long, default_value_t = 4)]
    pub trunc_u1: u32,
    #[arg(long, default_value_t = 40)]
    pub trunc_u2: u32,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Value of a series under a monomial valuation.
    Val {
        /// Weight matrix, entries by `,` and rows by `;`; column i is the value of Xi.
        #[arg(long)]
        weights: String,
        expr: String,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Monomial generators of the residue field.
    ResidueGens {
        #[arg(long)]
        weights: String,
    },
    /// Residue of numerator/denominator, both of the same value.
    Residue {
        #[arg(long)]
        weights: String,
        numerator: String,
        denominator: String,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Monomialize a pair of parametrized images.
    Monomialize2 {
        #[arg(long, num_args = 2, required = true)]
        images: Vec<String>,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Classify a triple of parametrized images.
    Classify3 {
        #[arg(long, num_args = 3, required = true)]
        images: Vec<String>,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Lex value of a Laurent tail series in u1, u2.
    Rank2Val {
        expr: String,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Reduce a pair of rank-two images to independent values.
    Rank2Classify {
        #[arg(long, num_args = 2, required = true)]
        images: Vec<String>,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 200)]
        budget_steps: usize,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Replay a JSON certificate and check its values on a random corpus.
    Verify {
        certificate: PathBuf,
        #[arg(long, default_value_t = 100)]
        corpus: usize,
    },
}

/// Parse `2,3` or `1,0;0,1`.
pub fn parse_weights(text: &str) -> Result<IntMatrix> {
    let rows = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|e| {
                    e.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::InvalidInput(format!("bad weight `{}`", e.trim())))
                })
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    IntMatrix::from_rows(rows)
}

fn field_spec(args: &FieldArgs, texts: &[String], reserved: &[String]) -> Result<FieldSpec> {
    let ext = args
        .adjoin
        .iter()
        .map(|d| FieldSpec::parse_extension(d))
        .collect::<Result<Vec<_>>>()?;
    FieldSpec::infer(args.field.clone(), ext, texts, reserved)
}

fn report(
    command: &str,
    args: Vec<String>,
    seed: u64,
    field: FieldSpec,
    inputs: Vec<String>,
) -> Report {
    Report {
        schema_version: SCHEMA_VERSION,
        command: command.into(),
        args,
        seed,
        field,
        inputs,
        budgets: BudgetReport::default(),
        outcome: OutcomeReport::Residue {
            residue: String::new(),
        },
        certificate: None,
    }
}

fn monomial_names(e: &ExpVector) -> String {
    let parts: Vec<String> =
        e.0.iter()
            .enumerate()
            .filter(|(_, &k)| k != 0)
            .map(|(i, &k)| match k {
                1 => format!("X{}", i + 1),
                _ => format!("X{}^{k}", i + 1),
            })
            .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Run one command. `args` is the raw argument list echoed in the report.
pub fn run(cli: &Cli, args: Vec<String>) -> Result<Report> {
    let seed = cli.seed;
    match &cli.command {
        Command::Val {
            weights,
            expr,
            field,
        } => {
            let v = MonomialValuation::new(parse_weights(weights)?)?;
            let vars = x_vars(v.arity());
            let spec = field_spec(field, std::slice::from_ref(expr), &vars)?;
            let tower = spec.build()?;
            let f = eval_series(expr, &tower, &vars)?;
            let cv = v.value(&f)?;
            let mut r = report("val", args, seed, spec, vec![f.to_string()]);
            r.budgets.truncation = f.truncation();
            r.outcome = OutcomeReport::Value {
                value: cv.value.to_string(),
                vector: cv.value.finite().map(|x| x.0.clone()),
                certified: cv.certified,
            };
            Ok(r)
        }
        Command::ResidueGens { weights } => {
            let v = MonomialValuation::new(parse_weights(weights)?)?;
            let gens = v.residue_generators();
            let mut r = report(
                "residue-gens",
                args,
                seed,
                FieldSpec::default(),
                vec![weights.clone()],
            );
            r.outcome = OutcomeReport::ResidueGenerators {
                exponents: gens.iter().map(|e| e.0.clone()).collect(),
                monomials: gens.iter().map(monomial_names).collect(),
            };
            Ok(r)
        }
        Command::Residue {
            weights,
            numerator,
            denominator,
            field,
        } => {
            let v = MonomialValuation::new(parse_weights(weights)?)?;
            let vars = x_vars(v.arity());
            let texts = [numerator.clone(), denominator.clone()];
            let spec = field_spec(field, &texts, &vars)?;
            let tower = spec.build()?;
            let f = eval_series(numerator, &tower, &vars)?;
            let g = eval_series(denominator, &tower, &vars)?;
            let res = v.residue_of(&f, &g)?;
            let mut r = report(
                "residue",
                args,
                seed,
                spec,
                vec![f.to_string(), g.to_string()],
            );
            r.outcome = OutcomeReport::Residue {
                residue: res.to_string(),
            };
            Ok(r)
        }
        Command::Monomialize2 {
            images,
            engine,
            field,
        }
        | Command::Classify3 {
            images,
            engine,
            field,
        } => {
            let name = match cli.command {
                Command::Monomialize2 { .. } => "monomialize2",
                _ => "classify3",
            };
            let spec = field_spec(field, images, &["t".to_string()])?;
            let tower = spec.build()?;
            let series = images
                .iter()
                .map(|s| eval_param(s, &tower, engine.trunc))
                .collect::<Result<Vec<_>>>()?;
            let p = ParamValuation::new(series)?;
            let budgets = Budgets {
                steps: engine.budget_steps,
                containment: engine.budget_containment,
                independence_degree: engine.independence_degree,
            };
            let cert = if name == "monomialize2" {
                monomialize2(&p, budgets)?
            } else {
                classify3(&p, budgets)?
            };
            let inputs = p.images().iter().map(|s| s.to_string()).collect();
            let mut r = report(name, args, seed, spec, inputs);
            r.budgets.steps = Some(engine.budget_steps);
            r.budgets.containment = Some(engine.budget_containment);
            r.budgets.truncation = Some(p.truncation());
            r.budgets.independence_degree = engine.independence_degree;
            r.budgets.steps_used = Some(cert.steps.len());
            r.outcome = rank1_outcome(&cert);
            r.certificate = Some(CertificateReport {
                steps: cert.steps.iter().map(StepReport::of).collect(),
                coords: cert.coords.iter().map(|c| c.to_string()).collect(),
                drops: cert.drops,
            });
            Ok(r)
        }
        Command::Rank2Val {
            expr,
            window,
            field,
        } => {
            let spec = field_spec(field, std::slice::from_ref(expr), &laurent_vars())?;
            let tower = spec.build()?;
            let w = eval_laurent(expr, &tower, window.trunc_u1, window.trunc_u2)?;
            let mut r = report("rank2-val", args, seed, spec, vec![w.to_string()]);
            r.budgets.trunc_u1 = Some(window.trunc_u1);
            r.budgets.trunc_u2 = Some(window.trunc_u2);
            r.outcome = OutcomeReport::Rank2Value {
                value: vhat(&w).finite().map(|v| [v.0, v.1]),
                in_valuation_ring: in_valuation_ring(&w),
            };
            Ok(r)
        }
        Command::Rank2Classify {
            images,
            window,
            budget_steps,
            field,
        } => {
            let spec = field_spec(field, images, &laurent_vars())?;
            let tower = spec.build()?;
            let ws = images
                .iter()
                .map(|s| eval_laurent(s, &tower, window.trunc_u1, window.trunc_u2))
                .collect::<Result<Vec<_>>>()?;
            let cert = rank2_classify(&ws, *budget_steps)?;
            let mut r = report(
                "rank2-classify",
                args,
                seed,
                spec,
                ws.iter().map(|w| w.to_string()).collect(),
            );
            r.budgets.steps = Some(*budget_steps);
            r.budgets.trunc_u1 = Some(window.trunc_u1);
            r.budgets.trunc_u2 = Some(window.trunc_u2);
            r.budgets.steps_used = Some(cert.steps.len());
            r.outcome = match &cert.outcome {
                Rank2Outcome::Monomial { values, det } => OutcomeReport::Rank2Monomial {
                    values: values.map(|v| [v.0, v.1]),
                    det: *det,
                },
                Rank2Outcome::BudgetExhausted { reason, values } => {
                    OutcomeReport::BudgetExhausted {
                        reason: reason.clone(),
                        snapshot: values.iter().map(order_text).collect(),
                    }
                }
            };
            r.certificate = Some(CertificateReport {
                steps: cert.steps.iter().map(StepReport::of).collect(),
                coords: cert.coords.iter().map(|c| c.to_string()).collect(),
                drops: 0,
            });
            Ok(r)
        }
        Command::Verify {
            certificate,
            corpus,
        } => {
            let text = std::fs::read_to_string(certificate)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", certificate.display())))?;
            let cert = Report::from_json(&text)?;
            let outcome = verify(&cert, *corpus, seed)?;
            let mut r = report(
                "verify",
                args,
                seed,
                cert.field.clone(),
                vec![certificate.display().to_string()],
            );
            r.budgets.corpus = Some(*corpus);
            r.outcome = outcome;
            Ok(r)
        }
    }
}

fn order_text(o: &Rank2Order) -> String {
    match o {
        Rank2Order::Finite(v) => v.to_string(),
        Rank2Order::Inconclusive => "inconclusive".into(),
    }
}

fn opt_text(s: &Option<TruncSeries>) -> Option<String> {
    s.as_ref().map(|s| s.to_string())
}

fn texts<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn rank1_outcome(c: &Certificate) -> OutcomeReport {
    match &c.outcome {
        Outcome::Monomial2 { order, residue } => OutcomeReport::Monomial2 {
            order: *order,
            residue: residue.to_string(),
            value_group: format!("{order}Z"),
        },
        Outcome::OutcomeA {
            order,
            residue,
            witnesses,
            relation,
        } => OutcomeReport::OutcomeA {
            order: *order,
            residue: residue.to_string(),
            witnesses: texts(witnesses),
            relation: opt_text(relation),
        },
        Outcome::OutcomeB {
            order,
            u,
            expansion2,
            expansion3,
            normalized3,
            first_transcendental,
            residue_generators,
            relation,
        } => OutcomeReport::OutcomeB {
            order: *order,
            u: u.to_string(),
            expansion2: texts(expansion2),
            expansion3: texts(expansion3),
            normalized3: texts(normalized3),
            first_transcendental: *first_transcendental,
            residue_generators: texts(residue_generators),
            relation: opt_text(relation),
        },
        Outcome::BudgetExhausted { reason } => OutcomeReport::BudgetExhausted {
            reason: reason.clone(),
            snapshot: c
                .coords
                .iter()
                .enumerate()
                .map(|(i, z)| match z.order() {
                    TOrder::Finite(k) => format!("ord z{} = {k}", i + 1),
                    TOrder::Inconclusive => format!("ord z{} inconclusive", i + 1),
                })
                .collect(),
        },
    }
}

/// Rebuild the engine outcome from its text form.
fn rank1_outcome_back(o: &OutcomeReport, tower: &FieldTower, n: usize) -> Result<Outcome> {
    let fe = |s: &String| eval_field(s, tower);
    let fes = |v: &[String]| v.iter().map(fe).collect::<Result<Vec<_>>>();
    let rel = |s: &Option<String>| {
        s.as_ref()
            .map(|s| eval_series(s, tower, &x_vars(n)))
            .transpose()
    };
    Ok(match o {
        OutcomeReport::Monomial2 { order, residue, .. } => Outcome::Monomial2 {
            order: *order,
            residue: fe(residue)?,
        },
        OutcomeReport::OutcomeA {
            order,
            residue,
            witnesses,
            relation,
        } => Outcome::OutcomeA {
            order: *order,
            residue: fe(residue)?,
            witnesses: witnesses
                .iter()
                .map(|w| eval_series(w, tower, &x_vars(2)))
                .collect::<Result<Vec<_>>>()?,
            relation: rel(relation)?,
        },
        OutcomeReport::OutcomeB {
            order,
            u,
            expansion2,
            expansion3,
            normalized3,
            first_transcendental,
            residue_generators,
            relation,
        } => Outcome::OutcomeB {
            order: *order,
            u: fe(u)?,
            expansion2: fes(expansion2)?,
            expansion3: fes(expansion3)?,
            normalized3: fes(normalized3)?,
            first_transcendental: *first_transcendental,
            residue_generators: fes(residue_generators)?,
            relation: rel(relation)?,
        },
        OutcomeReport::BudgetExhausted { reason, .. } => Outcome::BudgetExhausted {
            reason: reason.clone(),
        },
        other => {
            return Err(Error::MalformedCertificate(format!(
                "outcome {other:?} does not belong to a rank-one certificate"
            )))
        }
    })
}

/// A random polynomial in `n` variables with 1 to 4 terms of total degree
/// 1..=max_degree and small nonzero integer coefficients.
pub fn random_polynomial(
    rng: &mut impl Rng,
    tower: &FieldTower,
    n: usize,
    max_degree: u32,
) -> TruncSeries {
    let count = rng.gen_range(1..=4);
    let terms = (0..count).map(|_| {
        let d = rng.gen_range(1..=max_degree);
        let mut e = vec![0i64; n];
        for _ in 0..d {
            e[rng.gen_range(0..n)] += 1;
        }
        let mut c = rng.gen_range(1..=5i64);
        if rng.gen_bool(0.5) {
            c = -c;
        }
        (ExpVector(e), tower.int(c))
    });
    TruncSeries::from_terms(tower, n, None, terms).expect("nonnegative exponents")
}

/// Replay the certificate and compare its value route with direct
/// substitution on `corpus` seeded random polynomials.
pub fn verify(cert: &Report, corpus: usize, seed: u64) -> Result<OutcomeReport> {
    let tower = cert.field.build()?;
    let body = cert
        .certificate
        .as_ref()
        .ok_or_else(|| Error::MalformedCertificate("report carries no certificate".into()))?;
    let steps = body
        .steps
        .iter()
        .map(|s| s.to_step(&tower))
        .collect::<Result<Vec<_>>>()?;
    match cert.command.as_str() {
        "monomialize2" | "classify3" => {
            let images = cert
                .inputs
                .iter()
                .map(|s| eval_param(s, &tower, None))
                .collect::<Result<Vec<_>>>()?;
            let coords = body
                .coords
                .iter()
                .map(|s| eval_param(s, &tower, None))
                .collect::<Result<Vec<_>>>()?;
            let input = ParamValuation::new(images)?;
            let n = input.arity();
            let replayed = rank1::replay(input.images(), &steps);
            let replay_matches = matches!(&replayed, Ok(r) if *r == coords);
            let outcome = rank1_outcome_back(&cert.outcome, &tower, n)?;
            if let Outcome::BudgetExhausted { .. } = outcome {
                return Ok(OutcomeReport::Verify {
                    passed: replay_matches,
                    replay_matches,
                    corpus: 0,
                    agreements: 0,
                    witness: None,
                    detail: "budget-exhausted certificate: replay only".into(),
                });
            }
            let c = Certificate {
                input,
                steps,
                coords,
                outcome,
                drops: body.drops,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut agreements = 0;
            let mut witness = None;
            for _ in 0..corpus {
                let f = random_polynomial(&mut rng, &tower, n, 8);
                let direct = value_of(&c.input, &f)?;
                match c.value(&f) {
                    Ok(v) if v == direct => agreements += 1,
                    got => {
                        if witness.is_none() {
                            let got = match got {
                                Ok(v) => format!("{v:?}"),
                                Err(e) => e.to_string(),
                            };
                            witness = Some(format!(
                                "{f}: certificate gives {got}, substitution gives {direct:?}"
                            ));
                        }
                    }
                }
            }
            let passed = replay_matches && agreements == corpus;
            let detail = match (replay_matches, agreements == corpus) {
                (true, true) => "replay and values agree".to_string(),
                (false, true) => "replay does not reproduce the final coordinates".to_string(),
                (_, false) => format!("{} value mismatches", corpus - agreements),
            };
            Ok(OutcomeReport::Verify {
                passed,
                replay_matches,
                corpus,
                agreements,
                witness,
                detail,
            })
        }
        "rank2-classify" => {
            let (t1, t2) = match (cert.budgets.trunc_u1, cert.budgets.trunc_u2) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::MalformedCertificate(
                        "rank-two certificate lacks its window".into(),
                    ))
                }
            };
            let images = cert
                .inputs
                .iter()
                .map(|s| eval_laurent(s, &tower, t1, t2))
                .collect::<Result<Vec<_>>>()?;
            let replayed = rank2::replay(&images, &steps);
            let replay_matches = matches!(&replayed, Ok(r) if texts(r) == body.coords);
            let values_match = match (&replayed, &cert.outcome) {
                (Ok(r), OutcomeReport::Rank2Monomial { values, .. }) => r
                    .iter()
                    .zip(values)
                    .all(|(w, v)| vhat(w).finite().map(|x| [x.0, x.1]) == Some(*v)),
                (Ok(_), OutcomeReport::BudgetExhausted { .. }) => true,
                _ => false,
            };
            let passed = replay_matches && values_match;
            Ok(OutcomeReport::Verify {
                passed,
                replay_matches,
                corpus: 0,
                agreements: 0,
                witness: None,
                detail: if passed {
                    "replay reproduces coordinates and values".into()
                } else if replay_matches {
                    "recorded values differ from the replayed coordinates".into()
                } else {
                    "replay does not reproduce the final coordinates".into()
                },
            })
        }
        other => Err(Error::MalformedCertificate(format!(
            "`{other}` reports carry no replayable certificate"
        ))),
    }
}

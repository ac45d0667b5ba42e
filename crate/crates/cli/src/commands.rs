use std::collections::BTreeMap;

use gentile_core::audit::{
    audit_crosscheck, entry_seed, random_unit_disk_matrix, run_audit, specialization_name, strategy_name, AuditConfig,
    AuditError, AuditReport, Catalog, DEFAULT_AUDIT_TOL, SPOT_CHECK_DIM,
};
use gentile_core::coherent::{
    build_coherent, compare_delta, move_relation_check, CoherentError, CoherentJson,
    DeltaComparison, LambdaChoice, MoveRelationReport,
};
use gentile_core::json::{fmt17, C17, F17};
use gentile_core::oscillator::{
    closed_form_spectrum, numeric_spectrum, spectrum_crosscheck, OscillatorSpec, SpecJson, SpectrumCrosscheck,
    SpectrumReport,
};
use gentile_core::rep::{build_rep, number_from_arcsin, ArcsinAudit};
use gentile_core::su2::{solve_extended, solve_representation, DiagonalChoice, Su2Error, Su2Json};
use gentile_core::symbolic::{expand_free, ket_eval, matrix_eval, normal_order, parse, Expr, MatrixEnv};
use gentile_core::{max_abs_diff, CMatrix};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::args::{AuditArgs, CoherentArgs, EvalArgs, Format, Global, NRange, SpectrumArgs, Su2Args, DEFAULT_N};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
}

/// A contract the run was expected to satisfy and did not.
#[derive(Debug, Serialize)]
pub struct Violation {
    pub contract: &'static str,
    pub detail: serde_json::Value,
}

pub struct Run {
    pub body: String,
    pub violation: Option<Violation>,
}

fn config(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn n_range(g: &Global) -> NRange {
    g.n.unwrap_or(DEFAULT_N)
}

fn to_json<T: Serialize>(items: &[T], single: bool) -> String {
    let s = if single {
        serde_json::to_string_pretty(&items[0])
    } else {
        serde_json::to_string_pretty(items)
    };
    s.expect("serializable output") + "\n"
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(&r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

fn with_n(range: NRange, n: usize, mut row: Vec<String>) -> Vec<String> {
    if !range.is_single() {
        row.insert(0, n.to_string());
    }
    row
}

fn header<'a>(range: NRange, cols: &[&'a str]) -> Vec<&'a str> {
    let mut h = cols.to_vec();
    if !range.is_single() {
        h.insert(0, "n");
    }
    h
}

pub fn audit(g: &Global, a: &AuditArgs) -> Result<Run, CliError> {
    let catalog = match &a.catalog {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
            Catalog::parse(&text).map_err(|e| config(format!("{}: {e}", path.display())))?
        }
        None => Catalog::standard(),
    };
    if a.dump_catalog {
        return Ok(Run {
            body: catalog.to_text(),
            violation: None,
        });
    }
    let cfg = AuditConfig {
        n_values: n_range(g).values(),
        trials: a.trials,
        tol: g.tol.unwrap_or(DEFAULT_AUDIT_TOL),
        seed: g.seed,
    };
    let entries = catalog
        .entries
        .par_iter()
        .map(|e| {
            let single = Catalog { entries: vec![e.clone()] };
            run_audit(&single, &cfg).map(|r| r.entries.into_iter().next().expect("one entry"))
        })
        .collect::<Result<Vec<_>, AuditError>>()
        .map_err(config)?;
    let report = AuditReport {
        seed: cfg.seed,
        tol: F17(cfg.tol),
        trials: cfg.trials,
        n_values: cfg.n_values.clone(),
        entries,
    };
    let violation = match audit_crosscheck(&report) {
        Ok(_) => None,
        Err(AuditError::InconsistentVerdict(id)) => Some(Violation {
            contract: "audit_crosscheck",
            detail: json!({ "identity_id": id }),
        }),
        Err(e) => return Err(config(e)),
    };
    let body = match g.format {
        Format::Json => report.to_json() + "\n",
        Format::Table => report.to_table(),
        Format::Csv => csv_text(
            &["identity_id", "strategy", "specialization", "verdict", "residual", "n_tested"],
            report
                .entries
                .iter()
                .map(|e| {
                    vec![
                        e.identity_id.clone(),
                        strategy_name(e.strategy).into(),
                        specialization_name(e.specialization).into(),
                        e.verdict.as_str().into(),
                        fmt17(e.residual.0),
                        e.n_tested.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
                    ]
                })
                .collect(),
        ),
    };
    Ok(Run { body, violation })
}

#[derive(Serialize)]
struct SpectrumOut {
    #[serde(flatten)]
    report: SpectrumReport,
    crosscheck: SpectrumCrosscheck,
}

#[derive(Serialize)]
struct CustomSpectrumOut {
    #[serde(flatten)]
    spec: SpecJson,
    eigenvalues: Vec<F17>,
}

pub fn spectrum(g: &Global, s: &SpectrumArgs) -> Result<Run, CliError> {
    let range = n_range(g);
    if s.alpha.is_some() || s.beta.is_some() {
        return custom_spectrum(g, s, range);
    }
    let tol = g.tol.unwrap_or(1e-10);
    let outs = range
        .values()
        .into_par_iter()
        .map(|n| {
            Ok(SpectrumOut {
                report: closed_form_spectrum(n).map_err(config)?,
                crosscheck: spectrum_crosscheck(n, tol).map_err(config)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let violation = outs.iter().find(|o| !o.crosscheck.pass).map(|o| Violation {
        contract: "spectrum_crosscheck",
        detail: json!({ "n": o.report.n, "max_deviation": o.crosscheck.max_deviation, "tol": F17(tol) }),
    });
    let body = match g.format {
        Format::Json => to_json(&outs, range.is_single()),
        Format::Csv => csv_text(
            &header(range, &["nu", "energy", "level_index", "multiplicity"]),
            outs.iter()
                .flat_map(|o| {
                    o.report.csv_rows().into_iter().map(move |(v, e, idx, m)| {
                        let idx = idx.map(|i| i.to_string()).unwrap_or_default();
                        with_n(range, o.report.n, vec![v.to_string(), fmt17(e), idx, m.to_string()])
                    })
                })
                .collect(),
        ),
        Format::Table => {
            let mut t = String::new();
            for o in &outs {
                let r = &o.report;
                t += &format!(
                    "n = {}  ({}, t = {})  levels {} (stated {})  crosscheck {} (max deviation {:.3e})\n",
                    r.n,
                    r.case_class.label(),
                    r.t,
                    r.level_count,
                    r.stated_level_count,
                    if o.crosscheck.pass { "PASS" } else { "FAIL" },
                    o.crosscheck.max_deviation.0
                );
                for (k, l) in r.levels.iter().enumerate() {
                    t += &format!("  level {k:>3}  E = {:>20.15}  multiplicity {}\n", l.energy.0, l.multiplicity);
                }
                for d in &r.discrepancies {
                    t += &format!("  note: {d}\n");
                }
            }
            t
        }
    };
    Ok(Run { body, violation })
}

fn custom_spectrum(g: &Global, s: &SpectrumArgs, range: NRange) -> Result<Run, CliError> {
    let tol = g.tol.unwrap_or(1e-10);
    let outs = range
        .values()
        .into_par_iter()
        .map(|n| {
            let d = OscillatorSpec::new(n);
            let alpha = s.alpha.map(|(r, i)| Complex64::new(r, i)).unwrap_or(d.alpha);
            let beta = s.beta.map(|(r, i)| Complex64::new(r, i)).unwrap_or(d.beta);
            let spec = OscillatorSpec::with_coefficients(n, alpha, beta);
            let eig = numeric_spectrum(&spec, tol.max(1e-12)).map_err(config)?;
            Ok(CustomSpectrumOut {
                spec: SpecJson::from(&spec),
                eigenvalues: eig.into_iter().map(F17).collect(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let body = match g.format {
        Format::Json => to_json(&outs, range.is_single()),
        Format::Csv => csv_text(
            &header(range, &["index", "eigenvalue"]),
            outs.iter()
                .flat_map(|o| {
                    o.eigenvalues
                        .iter()
                        .enumerate()
                        .map(move |(i, e)| with_n(range, o.spec.n, vec![i.to_string(), fmt17(e.0)]))
                })
                .collect(),
        ),
        Format::Table => outs
            .iter()
            .map(|o| {
                let es: Vec<String> = o.eigenvalues.iter().map(|e| format!("{:.12}", e.0)).collect();
                format!("n = {}  eigenvalues {}\n", o.spec.n, es.join(" "))
            })
            .collect(),
    };
    Ok(Run { body, violation: None })
}

#[derive(Serialize)]
struct CoherentOut {
    #[serde(flatten)]
    state: CoherentJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_comparison: Option<Vec<DeltaComparison>>,
    move_relations: Vec<MoveRelationReport>,
}

fn lambda_choice(c: &CoherentArgs) -> Result<LambdaChoice, CliError> {
    if c.lambda.eq_ignore_ascii_case("custom") || c.lambda_values.is_some() {
        let text = c
            .lambda_values
            .as_deref()
            .ok_or_else(|| config("--lambda custom needs --lambda-values"))?;
        let vals = text
            .split(';')
            .map(|t| crate::args::parse_complex(t).map(|(r, i)| Complex64::new(r, i)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(config)?;
        return Ok(LambdaChoice::Custom(vals));
    }
    LambdaChoice::from_name(&c.lambda).ok_or_else(|| config(format!("unknown λ choice `{}`", c.lambda)))
}

pub fn coherent(g: &Global, c: &CoherentArgs) -> Result<Run, CliError> {
    let range = n_range(g);
    let choice = lambda_choice(c)?;
    let tol = g.tol.unwrap_or(gentile_core::coherent::COHERENT_TOL);
    let outs = range
        .values()
        .into_par_iter()
        .map(|n| {
            let cfg = |e: CoherentError| config(format!("n = {n}: {e}"));
            let state = build_coherent(n, choice.clone()).map_err(cfg)?;
            let delta_comparison = match choice {
                LambdaChoice::Custom(_) => None,
                _ => Some(compare_delta(&state).map_err(cfg)?),
            };
            let move_relations = (0..=n)
                .map(|p| move_relation_check(n, choice.clone(), p).map_err(cfg))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(CoherentOut {
                state: state.to_json_value(),
                delta_comparison,
                move_relations,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let violation = outs.iter().find(|o| !(o.state.eigenstate_residual.0 <= tol)).map(|o| Violation {
        contract: "eigenstate_residual",
        detail: json!({ "n": o.state.n, "residual": o.state.eigenstate_residual, "tol": F17(tol) }),
    });
    let body = match g.format {
        Format::Json => to_json(&outs, range.is_single()),
        Format::Csv => csv_text(
            &header(range, &["nu", "lambda_re", "lambda_im", "delta_re", "delta_im", "normalization_coeff"]),
            outs.iter()
                .flat_map(|o| {
                    (0..=o.state.n).map(move |v| {
                        let (l, d) = (o.state.lambda[v].0, o.state.delta[v].0);
                        with_n(
                            range,
                            o.state.n,
                            vec![
                                v.to_string(),
                                fmt17(l.re),
                                fmt17(l.im),
                                fmt17(d.re),
                                fmt17(d.im),
                                fmt17(o.state.normalization_poly[v].0),
                            ],
                        )
                    })
                })
                .collect(),
        ),
        Format::Table => {
            let mut t = String::new();
            for o in &outs {
                t += &format!(
                    "n = {}  λ {}  eigenstate residual {:.3e}\n",
                    o.state.n, o.state.lambda_variant, o.state.eigenstate_residual.0
                );
                for (v, d) in o.state.delta.iter().enumerate() {
                    t += &format!("  δ({v}) = {:+.15} {:+.15}i  |δ|² = {:.15}\n", d.0.re, d.0.im, o.state.normalization_poly[v].0);
                }
            }
            t
        }
    };
    Ok(Run { body, violation })
}

#[derive(Serialize)]
#[serde(untagged)]
enum Su2Out {
    Solved(Su2Json),
    Degenerate {
        n: usize,
        choice: DiagonalChoice,
        error: &'static str,
        nu: usize,
        nu_prime: usize,
        separation: F17,
    },
}

pub fn su2(g: &Global, s: &Su2Args) -> Result<Run, CliError> {
    let range = n_range(g);
    let parse_choice = |t: &str| DiagonalChoice::parse(t).ok_or_else(|| config(format!("unknown diagonal operator `{t}`")));
    let a = parse_choice(&s.a)?;
    let b = s.b.as_deref().map(parse_choice).transpose()?;
    if s.weight.is_some() && b.is_none() {
        return Err(config("--weight needs --B"));
    }
    let tol = g.tol.unwrap_or(1e-9);
    let outs = range
        .values()
        .into_par_iter()
        .map(|n| {
            let solved = match b {
                Some(b) => solve_extended(n, a, b, s.weight.unwrap_or(0.5)),
                None => solve_representation(n, a),
            };
            match solved {
                Ok(rep) => Ok(Su2Out::Solved(rep.to_json_value(tol))),
                Err(Su2Error::DegenerateNodes { nu, nu_prime, separation }) => Ok(Su2Out::Degenerate {
                    n,
                    choice: a,
                    error: "DegenerateNodes",
                    nu,
                    nu_prime,
                    separation: F17(separation),
                }),
                Err(e) => Err(config(e)),
            }
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let violation = outs.iter().find_map(|o| match o {
        Su2Out::Solved(j) if !j.residuals.pass => Some(Violation {
            contract: "verify_representation",
            detail: json!({ "n": j.n, "residuals": j.residuals, "tol": F17(tol) }),
        }),
        _ => None,
    });
    let body = match g.format {
        Format::Json => to_json(&outs, range.is_single()),
        Format::Csv | Format::Table => {
            let rows = outs
                .iter()
                .map(|o| match o {
                    Su2Out::Solved(j) => {
                        let r = &j.residuals;
                        with_n(
                            range,
                            j.n,
                            vec![
                                j.choice_name().into(),
                                if r.pass { "PASS" } else { "FAIL" }.into(),
                                fmt17(r.raise_lower.0),
                                fmt17(r.z_plus.0),
                                fmt17(r.z_minus.0),
                                fmt17(r.casimir.0),
                                r.double_sum.map(|x| fmt17(x.0)).unwrap_or_default(),
                            ],
                        )
                    }
                    Su2Out::Degenerate { n, choice, nu, nu_prime, .. } => with_n(
                        range,
                        *n,
                        vec![
                            choice.name().into(),
                            format!("DegenerateNodes({nu},{nu_prime})"),
                            String::new(),
                            String::new(),
                            String::new(),
                            String::new(),
                            String::new(),
                        ],
                    ),
                })
                .collect::<Vec<_>>();
            let h = header(range, &["choice", "status", "raise_lower", "z_plus", "z_minus", "casimir", "double_sum"]);
            if g.format == Format::Csv {
                csv_text(&h, rows)
            } else {
                let mut t = h.join("\t") + "\n";
                for r in rows {
                    t += &(r.join("\t") + "\n");
                }
                t
            }
        }
    };
    Ok(Run { body, violation })
}

trait ChoiceName {
    fn choice_name(&self) -> &'static str;
}

impl ChoiceName for Su2Json {
    fn choice_name(&self) -> &'static str {
        self.choice.name()
    }
}

#[derive(Serialize)]
struct EvalRow {
    n: usize,
    max_abs: F17,
    identity_distance: F17,
    /// Distance between the dense evaluation and the second pipeline.
    pipeline_gap: F17,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<C17>>>,
}

#[derive(Serialize)]
struct EvalOut {
    expression: String,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    normal_form: Option<String>,
    per_n: Vec<EvalRow>,
}

fn rows_of(m: &CMatrix) -> Vec<Vec<C17>> {
    (0..m.dim()).map(|i| m.row(i).iter().map(|z| C17(*z)).collect()).collect()
}

pub fn eval(g: &Global, e: &EvalArgs) -> Result<Run, CliError> {
    let range = n_range(g);
    let tol = g.tol.unwrap_or(1e-9);
    let text = e.expression.as_str();
    let expr = match text.split_once("==") {
        Some((l, r)) => {
            let lhs = parse(l.trim()).map_err(|err| config(format!("lhs: {err}")))?;
            let rhs = parse(r.trim()).map_err(|err| config(format!("rhs: {err}")))?;
            Expr::sub(lhs, rhs)
        }
        None => parse(text).map_err(config)?,
    };
    let gens = expr.generators();
    let free = gens.iter().all(|g| g.is_free()) && !expr.has_functions();
    let quotient = !gens.is_empty() && gens.iter().all(|g| g.is_quotient()) && !expr.has_functions();
    if !free && gens.iter().any(|g| g.is_free()) {
        return Err(config("free generators cannot be mixed with ladder operators"));
    }
    let (kind, normal_form) = if quotient {
        ("QUOTIENT", Some(normal_order(&expr).map_err(config)?))
    } else if free {
        ("FREE", None)
    } else {
        ("MATRIX", None)
    };
    let free_poly = if free { Some(expand_free(&expr).map_err(config)?) } else { None };
    let rows = range
        .values()
        .into_par_iter()
        .map(|n| {
            let rep = build_rep(n).map_err(config)?;
            let (m, other, show) = if let Some(p) = &free_poly {
                let mut rng = ChaCha8Rng::seed_from_u64(entry_seed(g.seed, text, n));
                let mats: BTreeMap<_, _> = gens
                    .iter()
                    .map(|gg| (*gg, random_unit_disk_matrix(SPOT_CHECK_DIM, &mut rng)))
                    .collect();
                let env = MatrixEnv::new(SPOT_CHECK_DIM, rep.q, mats.clone());
                let m = matrix_eval(&expr, &env).map_err(config)?;
                let other = p.eval(SPOT_CHECK_DIM, rep.q, &|gg| mats[&gg].clone());
                (m, other, false)
            } else {
                let env = MatrixEnv::from_rep(&rep);
                let m = matrix_eval(&expr, &env).map_err(config)?;
                let other = match &normal_form {
                    Some(p) => p.eval(&rep),
                    None => ket_eval(&expr, n).map_err(config)?,
                };
                (m, other, true)
            };
            let id = CMatrix::identity(m.dim());
            Ok(EvalRow {
                n,
                max_abs: F17(m.max_abs()),
                identity_distance: F17(max_abs_diff(&m, &id).expect("same dimension")),
                pipeline_gap: F17(max_abs_diff(&m, &other).expect("same dimension")),
                matrix: show.then(|| rows_of(&m)),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let violation = rows.iter().find(|r| !(r.pipeline_gap.0 <= tol)).map(|r| Violation {
        contract: "eval_pipeline_agreement",
        detail: json!({ "n": r.n, "gap": r.pipeline_gap, "tol": F17(tol) }),
    });
    let out = EvalOut {
        expression: expr.to_string(),
        kind,
        normal_form: normal_form.map(|p| p.to_string()).or_else(|| free_poly.map(|p| p.to_string())),
        per_n: rows,
    };
    let body = match g.format {
        Format::Json => serde_json::to_string_pretty(&out).expect("serializable") + "\n",
        Format::Csv => csv_text(
            &["n", "max_abs", "identity_distance", "pipeline_gap"],
            out.per_n
                .iter()
                .map(|r| vec![r.n.to_string(), fmt17(r.max_abs.0), fmt17(r.identity_distance.0), fmt17(r.pipeline_gap.0)])
                .collect(),
        ),
        Format::Table => {
            let mut t = format!("expression   {}\n", out.expression);
            if let Some(nf) = &out.normal_form {
                t += &format!("normal form  {nf}\n");
            }
            t += "n\tmax_abs\tidentity_distance\tpipeline_gap\n";
            for r in &out.per_n {
                t += &format!("{}\t{:.3e}\t{:.3e}\t{:.3e}\n", r.n, r.max_abs.0, r.identity_distance.0, r.pipeline_gap.0);
            }
            t
        }
    };
    Ok(Run { body, violation })
}

pub fn arcsin_audit(g: &Global) -> Result<Run, CliError> {
    let range = n_range(g);
    let audits = range
        .values()
        .into_par_iter()
        .map(|n| {
            let rep = build_rep(n).map_err(config)?;
            number_from_arcsin(&rep).map_err(config)
        })
        .collect::<Result<Vec<ArcsinAudit>, CliError>>()?;
    let violation = audits.iter().find(|a| !a.all_match_prediction).map(|a| Violation {
        contract: "arcsin_prediction",
        detail: json!({ "n": a.n }),
    });
    let body = match g.format {
        Format::Json => to_json(&audits, range.is_single()),
        Format::Csv => csv_text(
            &header(range, &["nu", "argument", "reconstructed", "predicted", "agrees", "matches_prediction", "collision"]),
            audits
                .iter()
                .flat_map(|a| {
                    a.rows.iter().map(move |r| {
                        with_n(
                            range,
                            a.n,
                            vec![
                                r.nu.to_string(),
                                fmt17(r.argument.0),
                                fmt17(r.reconstructed.0),
                                fmt17(r.predicted.0),
                                r.agrees.to_string(),
                                r.matches_prediction.to_string(),
                                r.collision.to_string(),
                            ],
                        )
                    })
                })
                .collect(),
        ),
        Format::Table => {
            let mut t = String::new();
            for a in &audits {
                t += &format!("n = {}  collisions {:?}\n", a.n, a.collisions);
                for r in &a.rows {
                    t += &format!(
                        "  ν = {:>2}  sin = {:+.12}  reconstructed = {:+.12}  {}{}\n",
                        r.nu,
                        r.argument.0,
                        r.reconstructed.0,
                        if r.agrees { "agrees" } else { "differs" },
                        if r.collision { "  (collision)" } else { "" }
                    );
                }
            }
            t
        }
    };
    Ok(Run { body, violation })
}

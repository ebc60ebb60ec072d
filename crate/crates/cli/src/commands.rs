use std::fmt::Write as _;

use orthwalk::asymptotics::{gamma_set, predict, predict_with_second_order, residue_integral_estimate, QuadratureSpec};
use orthwalk::corpus::{corpus, entry, CorpusEntry};
use orthwalk::diagonal::{build_rep, verify_rep_against};
use orthwalk::enumerate::{count_walks_with_limits, ArithmeticMode, CountSequence, EnumerationLimits};
use orthwalk::fitting::{compare, VerificationReport};
use orthwalk::model::{classify, WalkModel};
use serde_json::{json, Value};

use crate::config::Config;
use crate::error::CliError;
use crate::{Cli, Command, Format, ModelSource, Output};

struct Loaded {
    model: WalkModel,
    entry: Option<CorpusEntry>,
}

fn load(source: &ModelSource) -> Result<Loaded, CliError> {
    if let Some(name) = &source.example {
        let entry = entry(name).ok_or_else(|| {
            let names: Vec<_> = corpus().iter().map(|e| e.name).collect();
            CliError::Usage(format!("unknown example {name:?}; available: {}", names.join(", ")))
        })?;
        return Ok(Loaded { model: entry.model(), entry: Some(entry) });
    }
    let path = source.model.as_ref().expect("clap requires a model source");
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(Loaded { model: WalkModel::from_json(&text)?, entry: None })
}

fn json_output(value: &Value) -> Output {
    Output { text: serde_json::to_string_pretty(value).expect("json serializes"), pass: true }
}

fn limits(config: &Config) -> EnumerationLimits {
    EnumerationLimits { max_cells: config.limits.max_cells }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let config = Config::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Classify { source } => Ok(json_output(&classify(&load(source)?.model).to_json())),
        Command::Enumerate { source, max_n, float, format } => {
            let m = load(source)?.model;
            let mode = if *float { ArithmeticMode::Float64 } else { ArithmeticMode::Exact };
            let seq = count_walks_with_limits(&m, *max_n, mode, limits(&config))?;
            Ok(match format {
                Format::Table => Output { text: seq.export(), pass: true },
                Format::Json => json_output(&sequence_json(&seq)),
            })
        }
        Command::Predict { source, second_order } => {
            let m = load(source)?.model;
            let p = if *second_order { predict_with_second_order(&m)? } else { predict(&m)? };
            Ok(json_output(&p.to_json()))
        }
        Command::Gamma { source } => Ok(json_output(&gamma_set(&load(source)?.model)?.to_json())),
        Command::DiagonalCheck { source, max_n } => {
            let (doc, agree) = diagonal_check(&load(source)?.model, *max_n)?;
            Ok(Output { pass: agree, ..json_output(&doc) })
        }
        Command::Verify { source, max_n, tolerance, format } => {
            let loaded = load(source)?;
            let report = verification(&loaded, &config, *max_n, tolerance.as_deref())?;
            let pass = report.pass;
            Ok(match format {
                Format::Json => Output { pass, ..json_output(&report.to_json()) },
                Format::Table => Output { text: report.to_table(), pass },
            })
        }
        Command::Report { source, max_n, tolerance, residue_n, json } => {
            let loaded = load(source)?;
            full_report(&loaded, &config, *max_n, tolerance.as_deref(), *residue_n, *json)
        }
        Command::Examples { format } => {
            let entries = corpus();
            Ok(match format {
                Format::Json => json_output(&Value::Array(entries.iter().map(CorpusEntry::to_json).collect())),
                Format::Table => {
                    let mut text = String::new();
                    for e in &entries {
                        let _ = writeln!(text, "{:<24} d={}  {}", e.name, e.dimension, e.summary);
                    }
                    Output { text, pass: true }
                }
            })
        }
    }
}

fn sequence_json(seq: &CountSequence) -> Value {
    let values: Vec<Value> = seq
        .export()
        .lines()
        .filter_map(|line| line.split_once('\t'))
        .map(|(n, v)| json!({ "n": n.parse::<usize>().unwrap_or_default(), "value": v }))
        .collect();
    json!({
        "mode": match seq.mode() { ArithmeticMode::Exact => "exact", ArithmeticMode::Float64 => "float64" },
        "maxN": seq.max_length(),
        "values": values,
    })
}

fn diagonal_check(m: &WalkModel, max_n: usize) -> Result<(Value, bool), CliError> {
    let rep = build_rep(m)?;
    let v = verify_rep_against(&rep, m, max_n)?;
    let doc = json!({
        "representation": rep.to_json(),
        "text": rep.to_text(),
        "depth": v.depth,
        "agree": v.agree,
        "firstMismatch": v.first_mismatch,
    });
    Ok((doc, v.agree))
}

fn verification(
    loaded: &Loaded,
    config: &Config,
    max_n: Option<usize>,
    tolerance: Option<&str>,
) -> Result<VerificationReport, CliError> {
    let m = &loaded.model;
    let n = max_n.unwrap_or_else(|| config.default_max_n(m.dimension()));
    let profile = tolerance.or(loaded.entry.as_ref().map(|e| e.profile)).unwrap_or("default");
    let tol = config.profile(profile)?;
    let pred = predict_with_second_order(m)?;
    let seq = count_walks_with_limits(m, n, ArithmeticMode::Float64, limits(config))?;
    Ok(compare(&pred, &seq, &tol)?)
}

fn full_report(
    loaded: &Loaded,
    config: &Config,
    max_n: Option<usize>,
    tolerance: Option<&str>,
    residue_n: Option<usize>,
    as_json: bool,
) -> Result<Output, CliError> {
    let m = &loaded.model;
    let class = classify(m);
    let pred = predict_with_second_order(m)?;
    let gamma = gamma_set(m)?;
    let (diagonal, agree) = diagonal_check(m, orthwalk::diagonal::DEFAULT_VERIFY_DEPTH)?;
    let report = verification(loaded, config, max_n, tolerance)?;
    let residue = match residue_n {
        Some(n) => {
            let oracle = count_walks_with_limits(m, n, ArithmeticMode::Float64, limits(config))?;
            Some(residue_integral_estimate(m, n, &QuadratureSpec::default(), Some(&oracle))?)
        }
        None => None,
    };
    let pass = agree && report.pass;
    if as_json {
        let doc = json!({
            "model": m.to_spec(),
            "example": loaded.entry.as_ref().map(|e| e.name),
            "classification": class.to_json(),
            "prediction": pred.to_json(),
            "gamma": gamma.to_json(),
            "diagonalCheck": diagonal,
            "verification": report.to_json(),
            "residue": residue.as_ref().map(|r| r.to_json()),
            "pass": pass,
        });
        return Ok(Output { pass, ..json_output(&doc) });
    }
    let mut text = String::new();
    let _ = writeln!(text, "model       {}", m.canonical_string());
    let _ = writeln!(text, "class       {}", class.class.tag());
    let _ = writeln!(text, "theorem     {:?}, period {}", pred.theorem, pred.period);
    for c in &pred.classes {
        let _ = writeln!(
            text,
            "class {}     {} * ({})^n * n^(-{})",
            c.residue,
            c.constant_exact,
            c.base_exact,
            orthwalk::exact::rational_string(&c.order)
        );
    }
    if let Some(s) = &pred.second_order {
        let _ = writeln!(text, "kappa       {} (main term only: {})", s.kappa_exact, s.main_term_only);
    }
    let _ = writeln!(text, "critical    {} points, period {}", gamma.points.len(), gamma.period);
    let _ = writeln!(text, "diagonal    {} to n = {}", if agree { "agrees" } else { "DISAGREES" }, diagonal["depth"]);
    if let Some(r) = &residue {
        let err = r.relative_error_vs_oracle.map(|e| format!("{e:.3e}")).unwrap_or_else(|| "n/a".into());
        let _ = writeln!(text, "residue     n = {}, estimate {:.6e}, relative error {err}", r.n, r.estimate);
    }
    text.push('\n');
    text.push_str(&report.to_table());
    Ok(Output { text, pass })
}

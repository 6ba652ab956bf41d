use crate::CliError;
use irvweak::analytic::iac::closed_form_estimate;
use irvweak::analytic::{
    iac_enumerate, iac_simplex_sample, ic_gaussian_cone, ic_probabilities, write_report_csv, AnalyticError,
    AnalyticMeasure, Estimate, Method,
};
use irvweak::election::{analyze, borda_scores, BordaVariant, ElectionOutcome, Rule, WeakMeasure};
use irvweak::empirical::{
    audit_dataset, complete_proportionally, parse_ballots, reduce_to_three, write_ballots, AuditMode,
    EmpiricalError, ReductionLog,
};
use irvweak::montecarlo::{
    sigma_grid, sweep_sigma, write_sweep_csv, run_experiment, ExperimentConfig, MonteCarloError, DEFAULT_TRIALS,
    DEFAULT_VOTERS,
};
use irvweak::spatial::SpatialModel;
use irvweak::{Candidate, Pick, Profile3};
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};

pub const DEFAULT_TOL: f64 = 1e-10;

/// The main output plus files written beside it.
pub struct Output {
    pub primary: String,
    pub extra: Vec<(PathBuf, String)>,
}

impl Output {
    fn text(primary: String) -> Self {
        Output { primary, extra: Vec::new() }
    }
}

fn empirical(e: EmpiricalError) -> CliError {
    CliError::Usage(e.to_string())
}

fn montecarlo(e: MonteCarloError) -> CliError {
    match e {
        MonteCarloError::Spatial(_) | MonteCarloError::NoTrials | MonteCarloError::NoRules | MonteCarloError::NoSigmaAxis(_) => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Compute(other.to_string()),
    }
}

fn analytic(e: AnalyticError) -> CliError {
    match e {
        AnalyticError::EnumerationTooLarge { .. } | AnalyticError::NoSamples | AnalyticError::BadParameter(_) => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Compute(other.to_string()),
    }
}

fn csv(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| CliError::Compute(e.to_string()))?;
    String::from_utf8(buf).map_err(|e| CliError::Compute(e.to_string()))
}

/// A three-candidate profile with names, reducing larger elections.
fn load_three(path: &Path, seed: u64) -> Result<([String; 3], Profile3, Option<ReductionLog>), CliError> {
    let raw = parse_ballots(path).map_err(empirical)?;
    if raw.candidates.len() == 3 {
        let names = [raw.candidates[0].clone(), raw.candidates[1].clone(), raw.candidates[2].clone()];
        Ok((names, raw.to_profile3().map_err(empirical)?, None))
    } else {
        let r = reduce_to_three(&raw, seed).map_err(empirical)?;
        Ok((r.names, r.profile, Some(r.log)))
    }
}

fn pick_name(p: Option<Pick>, names: &[String; 3]) -> serde_json::Value {
    match p {
        None => serde_json::Value::Null,
        Some(Pick::Unique(c)) => json!(names[c.index()]),
        Some(Pick::Tie(set)) => json!({ "tie": set.iter().map(|c| names[c.index()].clone()).collect::<Vec<_>>() }),
    }
}

fn by_name<T: Serialize + Copy>(values: [T; 3], names: &[String; 3]) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> =
        Candidate::ALL.iter().map(|c| (names[c.index()].clone(), json!(values[c.index()]))).collect();
    serde_json::Value::Object(map)
}

fn tabulation_json(names: &[String; 3], p: &Profile3, out: &ElectionOutcome, log: Option<&ReductionLog>) -> serde_json::Value {
    let cname = |c: Candidate| names[c.index()].clone();
    let scores = |v: BordaVariant| -> serde_json::Value {
        match borda_scores(p, v) {
            Ok(s) => by_name(s.map(|r| *r.numer() as f64 / *r.denom() as f64), names),
            Err(_) => serde_json::Value::Null,
        }
    };
    let rounds: Vec<serde_json::Value> = out
        .irv
        .rounds
        .iter()
        .map(|r| {
            let tallies: serde_json::Map<String, serde_json::Value> = Candidate::ALL
                .iter()
                .filter_map(|&c| r.tallies[c.index()].map(|t| (cname(c), json!(t))))
                .collect();
            json!({ "tallies": tallies, "active": r.active, "eliminated": r.eliminated.map(cname) })
        })
        .collect();
    let measures = if p.is_complete() { WeakMeasure::for_ballots(true) } else { WeakMeasure::for_ballots(false) };
    let weakest: serde_json::Map<String, serde_json::Value> = [
        WeakMeasure::Borda,
        WeakMeasure::BordaAvg,
        WeakMeasure::BordaOm,
        WeakMeasure::BordaPm,
        WeakMeasure::Bucklin,
        WeakMeasure::MostLastPlace,
    ]
    .iter()
    .map(|&m| (m.name().to_string(), pick_name(out.weakest(m), names)))
    .collect();
    let irv_elects: serde_json::Map<String, serde_json::Value> =
        measures.iter().map(|&m| (m.name().to_string(), json!(out.elects_weakest(Rule::Irv, m)))).collect();
    json!({
        "candidates": names,
        "voters": p.voters(),
        "full": p.full,
        "bullets": p.bullets,
        "irv": { "winner": cname(out.irv_winner), "rounds": rounds },
        "plurality_winner": cname(out.plurality_winner),
        "minimax_winner": cname(out.minimax_winner),
        "condorcet_winner": out.condorcet_winner.map(cname),
        "condorcet_loser": out.condorcet_loser.map(cname),
        "borda_scores": {
            "complete": scores(BordaVariant::Complete),
            "avg": scores(BordaVariant::Avg),
            "om": scores(BordaVariant::Om),
            "pm": scores(BordaVariant::Pm),
        },
        "bucklin": {
            "round": out.bucklin.declared_round,
            "sums": by_name(out.bucklin.sums, names),
            "winner": pick_name(Some(out.bucklin.winner), names),
        },
        "weakest": weakest,
        "irv_elects_weakest": irv_elects,
        "ties": out.tie_events,
        "reduction": log,
    })
}

pub fn tabulate(path: &Path, seed: u64) -> Result<Output, CliError> {
    let (names, p, log) = load_three(path, seed)?;
    let out = analyze(&p, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let v = tabulation_json(&names, &p, &out, log.as_ref());
    Ok(Output::text(serde_json::to_string_pretty(&v).expect("json") + "\n"))
}

pub fn complete(path: &Path, seed: u64) -> Result<Output, CliError> {
    let (names, p, _) = load_three(path, seed)?;
    Ok(Output::text(write_ballots(&names, &complete_proportionally(&p))))
}

pub fn reduce(path: &Path, seed: u64, log_path: Option<&Path>) -> Result<Output, CliError> {
    let raw = parse_ballots(path).map_err(empirical)?;
    let r = reduce_to_three(&raw, seed).map_err(empirical)?;
    let mut out = Output::text(write_ballots(&r.names, &r.profile));
    if let Some(l) = log_path {
        out.extra.push((l.to_path_buf(), serde_json::to_string_pretty(&r.log).expect("json") + "\n"));
    }
    Ok(out)
}

pub fn audit(dir: &Path, mode: AuditMode, seed: u64, trail: Option<&Path>) -> Result<Output, CliError> {
    let report = audit_dataset(dir, mode, seed).map_err(empirical)?;
    for s in &report.skipped {
        eprintln!("skipped {}: {}", s.file, s.error);
    }
    if !report.skipped.is_empty() {
        eprintln!("{} file(s) skipped", report.skipped.len());
    }
    let mut out = Output::text(report.to_csv());
    if let Some(t) = trail {
        out.extra.push((t.to_path_buf(), report.to_jsonl()));
    }
    Ok(out)
}

pub struct SimOptions<'a> {
    pub model: &'a str,
    pub sigma: Option<f64>,
    pub trials: Option<u64>,
    pub voters: Option<usize>,
    pub bullet_prob: f64,
    pub rules: &'a [Rule],
    pub seed: u64,
}

fn experiment(o: &SimOptions) -> Result<ExperimentConfig, CliError> {
    let model = SpatialModel::parse_with_sigma(o.model, o.sigma).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut cfg = ExperimentConfig::new(model, o.seed);
    cfg.trials = o.trials.unwrap_or(DEFAULT_TRIALS);
    cfg.v_count = o.voters.unwrap_or(DEFAULT_VOTERS);
    cfg.bullet_prob = o.bullet_prob;
    if !o.rules.is_empty() {
        cfg.rules = o.rules.to_vec();
    }
    Ok(cfg)
}

pub fn simulate(o: &SimOptions) -> Result<Output, CliError> {
    let cfg = experiment(o)?;
    let report = run_experiment(&cfg).map_err(montecarlo)?;
    Ok(Output::text(csv(|b| report.write_csv(b))?))
}

pub fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("invalid sigma range `{s}` (expected start:end:step)"));
    let parts: Vec<f64> = s.split(':').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    match parts.as_slice() {
        [a, b, step] => sigma_grid(*a, *b, *step).ok_or_else(bad),
        _ => Err(bad()),
    }
}

pub fn sweep(o: &SimOptions, range: &str) -> Result<Output, CliError> {
    let sigmas = parse_range(range)?;
    let first = sigmas[0];
    let cfg = experiment(&SimOptions { sigma: o.sigma.or(Some(first)), ..*o })?;
    let rows = sweep_sigma(&cfg, &sigmas).map_err(montecarlo)?;
    Ok(Output::text(csv(|b| write_sweep_csv(&rows, b))?))
}

pub fn iac(enumerate: Option<u64>, samples: Option<u64>, seed: u64) -> Result<Output, CliError> {
    let mut rows: Vec<Estimate> = AnalyticMeasure::ALL.iter().map(|&m| closed_form_estimate(m)).collect();
    for m in AnalyticMeasure::ALL {
        if let Some(v) = enumerate {
            rows.push(iac_enumerate(&m.event(), v).map_err(analytic)?.estimate(m.name()));
        }
        if let Some(n) = samples {
            rows.push(iac_simplex_sample(&m.event(), n, seed).map_err(analytic)?);
        }
    }
    Ok(Output::text(csv(|b| write_report_csv(&rows, b))?))
}

pub fn ic(gaussian: Option<u64>, schlafli: bool, tol: f64, seed: u64) -> Result<Output, CliError> {
    let mut rows = Vec::new();
    if schlafli || gaussian.is_none() {
        let r = ic_probabilities(tol).map_err(analytic)?;
        rows.extend(r.estimates());
        rows.extend(r.steps.iter().map(|s| Estimate {
            measure: s.name.clone(),
            method: Method::Schlafli,
            value: s.value,
            error: s.error,
            exact: None,
            hits: None,
        }));
    }
    if let Some(n) = gaussian {
        for m in AnalyticMeasure::ALL {
            rows.push(ic_gaussian_cone(&m.event(), n, seed).map_err(analytic)?);
        }
    }
    Ok(Output::text(csv(|b| write_report_csv(&rows, b))?))
}

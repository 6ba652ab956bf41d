//! Seeded Monte Carlo experiments over spatial models.
//!
//! Trial `i` draws everything from `stream_rng(master_seed, i)`, so any trial
//! can be replayed alone. Per-trial records are integer counts merged by
//! addition, which makes reports identical for every thread count.

use crate::election::{analyze_with_rng, ElectionError, Pick, Rule, WeakMeasure};
use crate::seeds::stream_rng;
use crate::spatial::{
    derive_profile_with_rng, min_utility_candidate, sample_election_with_rng, social_utilities,
    SpatialError, SpatialModel,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{self, Write};
use thiserror::Error;

pub const DEFAULT_VOTERS: usize = 4001;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const PARTIAL_BULLET_PROB: f64 = 0.35;

#[derive(Debug, Error)]
pub enum MonteCarloError {
    #[error(transparent)]
    Spatial(#[from] SpatialError),
    #[error(transparent)]
    Election(#[from] ElectionError),
    #[error("an experiment needs at least one trial")]
    NoTrials,
    #[error("an experiment needs at least one rule")]
    NoRules,
    #[error("sigma list is empty")]
    EmptySigmas,
    #[error("model `{0}` has no sigma-parameterized axis")]
    NoSigmaAxis(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: SpatialModel,
    pub v_count: usize,
    pub trials: u64,
    pub bullet_prob: f64,
    pub master_seed: u64,
    pub rules: Vec<Rule>,
}

impl ExperimentConfig {
    /// IRV only, 4001 voters, 100k trials, complete ballots.
    pub fn new(model: SpatialModel, master_seed: u64) -> Self {
        ExperimentConfig {
            model,
            v_count: DEFAULT_VOTERS,
            trials: DEFAULT_TRIALS,
            bullet_prob: 0.0,
            master_seed,
            rules: vec![Rule::Irv],
        }
    }

    pub fn complete_ballots(&self) -> bool {
        self.bullet_prob == 0.0
    }

    /// Weakness criteria reported for this configuration, in column order.
    pub fn criteria(&self) -> Vec<Criterion> {
        std::iter::once(Criterion::MinUtility)
            .chain(WeakMeasure::for_ballots(self.complete_ballots()).iter().map(|m| Criterion::Weak(*m)))
            .collect()
    }

    /// The Borda variant used for the joint and conditional statistics.
    pub fn borda_measure(&self) -> WeakMeasure {
        if self.complete_ballots() {
            WeakMeasure::Borda
        } else {
            WeakMeasure::BordaAvg
        }
    }

    fn validate(&self) -> Result<(), MonteCarloError> {
        if self.trials == 0 {
            return Err(MonteCarloError::NoTrials);
        }
        if self.rules.is_empty() {
            return Err(MonteCarloError::NoRules);
        }
        if self.v_count == 0 {
            return Err(SpatialError::NoVoters.into());
        }
        if !(0.0..=1.0).contains(&self.bullet_prob) {
            return Err(SpatialError::BadBulletProb(self.bullet_prob).into());
        }
        Ok(())
    }
}

/// A notion of weakest candidate tracked by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    /// Candidate of minimal social utility.
    MinUtility,
    Weak(WeakMeasure),
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::MinUtility => "min_utility",
            Criterion::Weak(m) => m.name(),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureStat {
    pub rule: Rule,
    pub criterion: Criterion,
    pub count: u64,
    pub frequency: f64,
    pub stderr: f64,
}

/// Joint statistics linking the Borda loser with the min-utility candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BordaUtilityStat {
    pub rule: Rule,
    /// Trials where the rule elects a candidate that is both.
    pub joint_count: u64,
    /// P(rule elects the Borda loser | Borda loser = min-utility candidate).
    pub conditional_frequency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub stats: Vec<MeasureStat>,
    pub borda_measure: WeakMeasure,
    /// Trials where the unique Borda loser is also the unique min-utility candidate.
    pub borda_is_min_utility: u64,
    pub borda_utility: Vec<BordaUtilityStat>,
    /// Trials in which at least one random tie-break was needed.
    pub tie_trials: u64,
    /// Trials with two candidates closer than the coincidence threshold.
    pub degenerate_trials: Vec<u64>,
    /// Complete-ballot trials without a first-round majority where the IRV
    /// Bucklin-loser flag and the most-last-place flag differ.
    pub bucklin_last_place_disagreements: u64,
}

/// Binomial standard error of a frequency estimate.
pub fn binomial_stderr(count: u64, trials: u64) -> f64 {
    let p = count as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

impl ExperimentReport {
    pub fn stat(&self, rule: Rule, criterion: Criterion) -> Option<&MeasureStat> {
        self.stats.iter().find(|s| s.rule == rule && s.criterion == criterion)
    }

    pub fn frequency(&self, rule: Rule, criterion: Criterion) -> Option<f64> {
        self.stat(rule, criterion).map(|s| s.frequency)
    }

    /// Single header line plus one data row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut header = vec![
            "model".to_string(),
            "v_count".into(),
            "bullet_prob".into(),
            "trials".into(),
            "master_seed".into(),
            "tie_trials".into(),
            "degenerate_trials".into(),
        ];
        let c = &self.config;
        let mut row = vec![
            c.model.to_string(),
            c.v_count.to_string(),
            c.bullet_prob.to_string(),
            c.trials.to_string(),
            c.master_seed.to_string(),
            self.tie_trials.to_string(),
            self.degenerate_trials.len().to_string(),
        ];
        for s in &self.stats {
            let key = format!("{}:{}", s.rule, s.criterion);
            header.push(format!("{key}:count"));
            header.push(format!("{key}:frequency"));
            header.push(format!("{key}:stderr"));
            row.push(s.count.to_string());
            row.push(s.frequency.to_string());
            row.push(s.stderr.to_string());
        }
        for j in &self.borda_utility {
            let key = format!("{}:{}&min_utility", j.rule, self.borda_measure);
            header.push(format!("{key}:count"));
            header.push(format!("{key}:conditional"));
            row.push(j.joint_count.to_string());
            row.push(j.conditional_frequency.map(|f| f.to_string()).unwrap_or_default());
        }
        writeln!(out, "{}", header.join(","))?;
        writeln!(out, "{}", row.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Tally {
    /// rule-major, criterion-minor
    hits: Vec<u64>,
    joint: Vec<u64>,
    borda_is_min_utility: u64,
    ties: u64,
    degenerate: Vec<u64>,
    disagreements: u64,
}

impl Tally {
    fn zero(rules: usize, criteria: usize) -> Self {
        Tally {
            hits: vec![0; rules * criteria],
            joint: vec![0; rules],
            borda_is_min_utility: 0,
            ties: 0,
            degenerate: Vec::new(),
            disagreements: 0,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.hits.iter_mut().zip(&other.hits) {
            *a += b;
        }
        for (a, b) in self.joint.iter_mut().zip(&other.joint) {
            *a += b;
        }
        self.borda_is_min_utility += other.borda_is_min_utility;
        self.ties += other.ties;
        self.degenerate.extend(other.degenerate);
        self.disagreements += other.disagreements;
        self
    }
}

fn run_trial(cfg: &ExperimentConfig, criteria: &[Criterion], index: u64) -> Result<Tally, MonteCarloError> {
    let mut rng = stream_rng(cfg.master_seed, index);
    let election = sample_election_with_rng(&cfg.model, cfg.v_count, &mut rng)?;
    let profile = derive_profile_with_rng(&election, cfg.bullet_prob, &mut rng)?;
    let outcome = analyze_with_rng(&profile, &mut rng)?;
    let min_util = min_utility_candidate(&social_utilities(&election));

    let mut t = Tally::zero(cfg.rules.len(), criteria.len());
    let borda = outcome.weakest(cfg.borda_measure());
    let both = match (borda, min_util) {
        (Some(Pick::Unique(b)), Pick::Unique(u)) if b == u => Some(b),
        _ => None,
    };
    if both.is_some() {
        t.borda_is_min_utility = 1;
    }
    for (r, &rule) in cfg.rules.iter().enumerate() {
        let winner = outcome.winner(rule);
        for (k, &crit) in criteria.iter().enumerate() {
            let hit = match crit {
                Criterion::MinUtility => min_util.is(winner),
                Criterion::Weak(m) => outcome.elects_weakest(rule, m),
            };
            t.hits[r * criteria.len() + k] = hit as u64;
        }
        t.joint[r] = (both == Some(winner)) as u64;
    }
    if !outcome.tie_events.is_empty() {
        t.ties = 1;
    }
    if election.has_coincident_candidates() {
        t.degenerate.push(index);
    }
    if profile.is_complete() {
        let majority = profile.voters() / 2 + 1;
        let round1_majority = crate::Candidate::ALL.iter().any(|&c| profile.first_place(c) >= majority);
        if !round1_majority
            && outcome.elects_weakest(Rule::Irv, WeakMeasure::Bucklin)
                != outcome.elects_weakest(Rule::Irv, WeakMeasure::MostLastPlace)
        {
            t.disagreements = 1;
        }
    }
    Ok(t)
}

/// Runs the experiment on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, MonteCarloError> {
    cfg.validate()?;
    let criteria = cfg.criteria();
    let zero = || Tally::zero(cfg.rules.len(), criteria.len());
    let tally = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, &criteria, i))
        .try_reduce(zero, |a, b| Ok(a.merge(b)))?;
    Ok(build_report(cfg, &criteria, tally))
}

/// Runs the experiment on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(
    cfg: &ExperimentConfig,
    threads: usize,
) -> Result<ExperimentReport, MonteCarloError> {
    with_pool(threads, || run_experiment(cfg))
}

fn with_pool<T: Send>(
    threads: usize,
    f: impl FnOnce() -> Result<T, MonteCarloError> + Send,
) -> Result<T, MonteCarloError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| MonteCarloError::ThreadPool(e.to_string()))?;
    pool.install(f)
}

fn build_report(cfg: &ExperimentConfig, criteria: &[Criterion], mut tally: Tally) -> ExperimentReport {
    let n = cfg.trials;
    let mut stats = Vec::new();
    for (r, &rule) in cfg.rules.iter().enumerate() {
        for (k, &criterion) in criteria.iter().enumerate() {
            let count = tally.hits[r * criteria.len() + k];
            stats.push(MeasureStat {
                rule,
                criterion,
                count,
                frequency: count as f64 / n as f64,
                stderr: binomial_stderr(count, n),
            });
        }
    }
    let base = tally.borda_is_min_utility;
    let borda_utility = cfg
        .rules
        .iter()
        .zip(&tally.joint)
        .map(|(&rule, &joint)| BordaUtilityStat {
            rule,
            joint_count: joint,
            conditional_frequency: (base > 0).then(|| joint as f64 / base as f64),
        })
        .collect();
    tally.degenerate.sort_unstable();
    ExperimentReport {
        config: cfg.clone(),
        stats,
        borda_measure: cfg.borda_measure(),
        borda_is_min_utility: base,
        borda_utility,
        tie_trials: tally.ties,
        degenerate_trials: tally.degenerate,
        bucklin_last_place_disagreements: tally.disagreements,
    }
}

/// One report per sigma. Every sigma reuses the template's master seed.
pub fn sweep_sigma(
    template: &ExperimentConfig,
    sigmas: &[f64],
) -> Result<Vec<(f64, ExperimentReport)>, MonteCarloError> {
    if sigmas.is_empty() {
        return Err(MonteCarloError::EmptySigmas);
    }
    if !template.model.has_sigma() {
        return Err(MonteCarloError::NoSigmaAxis(template.model.to_string()));
    }
    sigmas
        .iter()
        .map(|&s| {
            let cfg = ExperimentConfig { model: template.model.with_sigma(s)?, ..template.clone() };
            Ok((s, run_experiment(&cfg)?))
        })
        .collect()
}

pub fn sweep_sigma_with_threads(
    template: &ExperimentConfig,
    sigmas: &[f64],
    threads: usize,
) -> Result<Vec<(f64, ExperimentReport)>, MonteCarloError> {
    with_pool(threads, || sweep_sigma(template, sigmas))
}

/// Tidy CSV: `sigma,model,measure,frequency,stderr,trials`, where `measure`
/// is `rule:criterion`.
pub fn write_sweep_csv<W: Write>(rows: &[(f64, ExperimentReport)], mut out: W) -> io::Result<()> {
    writeln!(out, "sigma,model,measure,frequency,stderr,trials")?;
    for (sigma, report) in rows {
        for s in &report.stats {
            writeln!(
                out,
                "{sigma},{},{}:{},{},{},{}",
                report.config.model, s.rule, s.criterion, s.frequency, s.stderr, report.config.trials
            )?;
        }
    }
    Ok(())
}

/// Evenly spaced grid from `start` to `end` inclusive, rounded to 1e-9 so
/// that `0.25:0.70:0.01` yields clean values.
pub fn sigma_grid(start: f64, end: f64, step: f64) -> Option<Vec<f64>> {
    if !(start.is_finite() && end.is_finite() && step.is_finite()) || step <= 0.0 || end < start {
        return None;
    }
    let n = ((end - start) / step + 1e-9).floor() as u64;
    Some((0..=n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect())
}

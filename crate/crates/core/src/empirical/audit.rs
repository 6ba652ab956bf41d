use super::{complete_proportionally, parse_ballots, reduce_to_three_with_rng, EmpiricalError};
use crate::election::{analyze_with_rng, Rule, TieEvent, WeakMeasure};
use crate::seeds::named_seed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::{self, Write as _};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AuditMode {
    /// Ballots as cast, bullets included.
    Actual,
    /// Bullets completed in proportion before analysis.
    Completed,
}

impl AuditMode {
    pub fn name(self) -> &'static str {
        match self {
            AuditMode::Actual => "actual",
            AuditMode::Completed => "completed",
        }
    }

    pub fn measures(self) -> &'static [WeakMeasure] {
        WeakMeasure::for_ballots(self == AuditMode::Completed)
    }
}

impl fmt::Display for AuditMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AuditMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "actual" => Ok(AuditMode::Actual),
            "completed" => Ok(AuditMode::Completed),
            _ => Err(format!("unknown mode `{s}` (expected actual or completed)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub measure: WeakMeasure,
    pub irv_elects: bool,
}

/// One line of the audit trail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditRecord {
    pub file: String,
    pub candidates: usize,
    pub eliminated: Vec<String>,
    pub elimination_ties: usize,
    pub exhausted: u64,
    /// Final three, as A, B, C.
    pub names: [String; 3],
    pub full: [u64; 6],
    pub bullets: [u64; 3],
    pub winner: String,
    pub flags: Vec<Flag>,
    pub ties: Vec<TieEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedFile {
    pub file: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureCount {
    pub measure: WeakMeasure,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub dataset: String,
    pub mode: AuditMode,
    pub elections: u64,
    pub counts: Vec<MeasureCount>,
    pub records: Vec<AuditRecord>,
    pub skipped: Vec<SkippedFile>,
}

impl AuditReport {
    pub fn count(&self, measure: WeakMeasure) -> Option<u64> {
        self.counts.iter().find(|c| c.measure == measure).map(|c| c.count)
    }

    pub fn percent(&self, count: u64) -> f64 {
        if self.elections == 0 {
            0.0
        } else {
            100.0 * count as f64 / self.elections as f64
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("dataset,mode,measure,count,total,percent\n");
        for c in &self.counts {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.2}",
                self.dataset,
                self.mode,
                c.measure,
                c.count,
                self.elections,
                self.percent(c.count)
            );
        }
        out
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}

fn audit_file(path: &Path, file: &str, mode: AuditMode, rng_seed: u64) -> Result<AuditRecord, EmpiricalError> {
    let raw = parse_ballots(path)?;
    let mut rng = ChaCha8Rng::seed_from_u64(named_seed(rng_seed, file));
    let reduced = reduce_to_three_with_rng(&raw, &mut rng)?;
    let profile = match mode {
        AuditMode::Actual => reduced.profile,
        AuditMode::Completed => complete_proportionally(&reduced.profile),
    };
    let outcome = analyze_with_rng(&profile, &mut rng).map_err(|_| EmpiricalError::EmptyElection)?;
    Ok(AuditRecord {
        file: file.to_string(),
        candidates: raw.candidates.len(),
        eliminated: reduced.log.rounds.iter().map(|r| r.eliminated.clone()).collect(),
        elimination_ties: reduced.log.ties(),
        exhausted: reduced.log.exhausted,
        winner: reduced.names[outcome.irv_winner.index()].clone(),
        names: reduced.names,
        full: profile.full,
        bullets: profile.bullets,
        flags: mode
            .measures()
            .iter()
            .map(|&m| Flag { measure: m, irv_elects: outcome.elects_weakest(Rule::Irv, m) })
            .collect(),
        ties: outcome.tie_events,
    })
}

/// Audits every regular file in `dir` (hidden files excluded), in name
/// order. Unreadable or malformed files are skipped and listed.
pub fn audit_dataset(dir: &Path, mode: AuditMode, rng_seed: u64) -> Result<AuditReport, EmpiricalError> {
    let io = |e: std::io::Error| EmpiricalError::Io { path: dir.display().to_string(), message: e.to_string() };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let entry = entry.map_err(io)?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if entry.file_type().map_err(io)?.is_file() && !name.starts_with('.') {
            files.push((name, entry.path()));
        }
    }
    files.sort();

    let results: Vec<Result<AuditRecord, SkippedFile>> = files
        .par_iter()
        .map(|(name, path)| {
            audit_file(path, name, mode, rng_seed).map_err(|e| SkippedFile { file: name.clone(), error: e.to_string() })
        })
        .collect();
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(s) => skipped.push(s),
        }
    }
    let counts = mode
        .measures()
        .iter()
        .map(|&m| MeasureCount {
            measure: m,
            count: records.iter().filter(|r| r.flags.iter().any(|f| f.measure == m && f.irv_elects)).count() as u64,
        })
        .collect();
    let dataset = dir
        .canonicalize()
        .ok()
        .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| dir.display().to_string());
    Ok(AuditReport { dataset, mode, elections: records.len() as u64, counts, records, skipped })
}

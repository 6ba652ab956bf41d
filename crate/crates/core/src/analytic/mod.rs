//! Limiting probabilities that IRV elects a weak candidate under the
//! impartial anonymous culture (IAC) and impartial culture (IC) models.
//!
//! Each quantity is reachable by independent routes: exact rationals,
//! lattice enumeration and simplex sampling for IAC; spherical-simplex
//! volumes via Schläfli's differential and Gaussian-cone sampling for IC.

pub mod gauss;
pub mod iac;
pub mod ic;
pub mod sphere;
pub mod systems;

pub use gauss::ic_gaussian_cone;
pub use iac::{iac_closed_form, iac_enumerate, iac_simplex_sample};
pub use ic::{ic_probabilities, IcResult, IcStep};
pub use sphere::{ic_schlafli_volume, ic_spherical_triangle, DeformedCone, SchlafliResult, SphericalCone};
pub use systems::{Constraint, ConstraintKind, Event, InequalitySystem, SystemLabel};

use serde::Serialize;
use std::fmt;
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("invalid inequality system: {0}")]
    InvalidSystem(String),
    #[error("enumeration at V={v} needs {work} iterations, above the limit of {limit}; use simplex sampling")]
    EnumerationTooLarge { v: u64, work: u128, limit: u128 },
    #[error("need at least one sample")]
    NoSamples,
    #[error("normals must be non-zero and orthogonal to the all-ones vector")]
    NotOrthogonal,
    #[error("cones may have at most {max} normals, got {got}")]
    TooManyNormals { got: usize, max: usize },
    #[error("normals are linearly dependent")]
    Degenerate,
    #[error("quadrature reached error {achieved:e}, target {target:e}")]
    Quadrature { achieved: f64, target: f64 },
    #[error("deformation parameter must lie in [0, 1], got {0}")]
    BadParameter(f64),
}

/// The weak-candidate notions with closed-form limiting probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AnalyticMeasure {
    BordaLoser,
    BucklinLoser,
    MostLastPlace,
}

impl AnalyticMeasure {
    pub const ALL: [AnalyticMeasure; 3] =
        [AnalyticMeasure::BordaLoser, AnalyticMeasure::BucklinLoser, AnalyticMeasure::MostLastPlace];

    pub fn name(self) -> &'static str {
        match self {
            AnalyticMeasure::BordaLoser => "borda_loser",
            AnalyticMeasure::BucklinLoser => "bucklin_loser",
            AnalyticMeasure::MostLastPlace => "most_last_place",
        }
    }

    pub fn event(self) -> Event {
        match self {
            AnalyticMeasure::BordaLoser => Event::borda_loser(),
            AnalyticMeasure::BucklinLoser => Event::bucklin_loser(),
            AnalyticMeasure::MostLastPlace => Event::most_last_place(),
        }
    }
}

impl fmt::Display for AnalyticMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ClosedForm,
    Enumeration(u64),
    SimplexSampling(u64),
    Schlafli,
    GaussianCone(u64),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::ClosedForm => write!(f, "closed_form"),
            Method::Enumeration(v) => write!(f, "enumeration(V={v})"),
            Method::SimplexSampling(n) => write!(f, "simplex_sampling(n={n})"),
            Method::Schlafli => write!(f, "schlafli"),
            Method::GaussianCone(n) => write!(f, "gaussian_cone(n={n})"),
        }
    }
}

/// A probability with the route that produced it. `error` is a standard
/// error for sampling, a quadrature bound for Schläfli, and zero for exact
/// values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub measure: String,
    pub method: Method,
    pub value: f64,
    pub error: f64,
    /// Exact rational, when known.
    pub exact: Option<String>,
    /// Raw hit count for sampling routes.
    pub hits: Option<u64>,
}

impl Estimate {
    pub fn sampled(measure: &str, method: Method, hits: u64, n: u64) -> Self {
        let value = hits as f64 / n as f64;
        // hits may exceed n for non-symmetrized unions; clamp p for the variance
        let p = value.clamp(0.0, 1.0);
        Estimate {
            measure: measure.to_string(),
            method,
            value,
            error: (p * (1.0 - p) / n as f64).sqrt(),
            exact: None,
            hits: Some(hits),
        }
    }
}

/// Writes `measure,method,value,error,exact` rows.
pub fn write_report_csv<W: Write>(rows: &[Estimate], mut out: W) -> io::Result<()> {
    writeln!(out, "measure,method,value,error,exact")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.12},{:.3e},{}",
            r.measure,
            r.method,
            r.value,
            r.error,
            r.exact.as_deref().unwrap_or("")
        )?;
    }
    Ok(())
}

//! Euclidean spatial models: voters and candidates drawn from products of
//! one-dimensional unimodal / bimodal / weighted-bimodal distributions, ranked
//! by distance, optionally truncated to bullet votes.

use crate::election::{Ballot, Candidate, Profile3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use thiserror::Error;

/// Share of the weighted-bimodal population drawn from the left component.
pub const WBI_LEFT_WEIGHT: f64 = 0.6;

/// Candidates closer than this are flagged as (numerically) coincident.
pub const COINCIDENCE_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpatialError {
    #[error("sigma must be positive and finite, got {0}")]
    BadSigma(f64),
    #[error("spatial models have 1 or 2 axes, got {0}")]
    BadDimension(usize),
    #[error("bullet probability must lie in [0, 1], got {0}")]
    BadBulletProb(f64),
    #[error("cannot parse model `{0}`: {1}")]
    Parse(String, String),
    #[error("need at least one voter")]
    NoVoters,
}

/// Distribution of one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AxisDist {
    /// Standard normal.
    Uni,
    /// Equal mixture of N(-1, sigma^2) and N(1, sigma^2).
    Bim(f64),
    /// 60/40 mixture of N(-1, sigma^2) and N(1, sigma^2).
    Wbi(f64),
}

impl AxisDist {
    pub fn sigma(self) -> Option<f64> {
        match self {
            AxisDist::Uni => None,
            AxisDist::Bim(s) | AxisDist::Wbi(s) => Some(s),
        }
    }

    fn with_sigma(self, sigma: f64) -> AxisDist {
        match self {
            AxisDist::Uni => AxisDist::Uni,
            AxisDist::Bim(_) => AxisDist::Bim(sigma),
            AxisDist::Wbi(_) => AxisDist::Wbi(sigma),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        match self {
            AxisDist::Uni => z,
            AxisDist::Bim(s) => {
                let centre = if rng.random::<bool>() { 1.0 } else { -1.0 };
                centre + s * z
            }
            AxisDist::Wbi(s) => {
                let centre = if rng.random::<f64>() < WBI_LEFT_WEIGHT { -1.0 } else { 1.0 };
                centre + s * z
            }
        }
    }
}

impl fmt::Display for AxisDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisDist::Uni => write!(f, "UNI"),
            AxisDist::Bim(s) => write!(f, "BIM({s})"),
            AxisDist::Wbi(s) => write!(f, "WBI({s})"),
        }
    }
}

/// Product distribution over one or two axes, shared by voters and candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialModel {
    axes: Vec<AxisDist>,
}

impl SpatialModel {
    pub fn new(axes: Vec<AxisDist>) -> Result<Self, SpatialError> {
        if !(1..=2).contains(&axes.len()) {
            return Err(SpatialError::BadDimension(axes.len()));
        }
        for a in &axes {
            if let Some(s) = a.sigma() {
                if !(s.is_finite() && s > 0.0) {
                    return Err(SpatialError::BadSigma(s));
                }
            }
        }
        Ok(SpatialModel { axes })
    }

    pub fn axes(&self) -> &[AxisDist] {
        &self.axes
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn has_sigma(&self) -> bool {
        self.axes.iter().any(|a| a.sigma().is_some())
    }

    /// Same model with every sigma-parameterized axis set to `sigma`.
    pub fn with_sigma(&self, sigma: f64) -> Result<Self, SpatialError> {
        SpatialModel::new(self.axes.iter().map(|a| a.with_sigma(sigma)).collect())
    }

    /// Parses `UNI`, `BIM(0.5)`, `WBI(0.5)xUNI`, ... . Axes written without a
    /// sigma (`BIMxWBI`) take `default_sigma`.
    pub fn parse_with_sigma(s: &str, default_sigma: Option<f64>) -> Result<Self, SpatialError> {
        let err = |msg: &str| SpatialError::Parse(s.to_string(), msg.to_string());
        let normalized = s.trim().replace('×', "x");
        let mut axes = Vec::new();
        for token in split_axes(&normalized) {
            let token = token.trim();
            let upper = token.to_ascii_uppercase();
            let (name, sigma) = match upper.find('(') {
                Some(open) => {
                    let close = upper.rfind(')').ok_or_else(|| err("missing `)`"))?;
                    let inner = &upper[open + 1..close];
                    let value: f64 = inner.trim().parse().map_err(|_| err("bad sigma"))?;
                    (&upper[..open], Some(value))
                }
                None => (upper.as_str(), None),
            };
            let axis = match name.trim() {
                "UNI" => AxisDist::Uni,
                "BIM" | "WBI" => {
                    let sigma = sigma.or(default_sigma).ok_or_else(|| err("axis needs a sigma"))?;
                    if name.trim() == "BIM" {
                        AxisDist::Bim(sigma)
                    } else {
                        AxisDist::Wbi(sigma)
                    }
                }
                other => return Err(err(&format!("unknown axis `{other}`"))),
            };
            axes.push(axis);
        }
        SpatialModel::new(axes)
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let x = self.axes[0].sample(rng);
        let y = match self.axes.get(1) {
            Some(a) => a.sample(rng),
            None => 0.0,
        };
        [x, y]
    }
}

fn split_axes(s: &str) -> Vec<&str> {
    // split on `x` that is not inside parentheses
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            'x' | 'X' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl fmt::Display for SpatialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.axes.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

impl FromStr for SpatialModel {
    type Err = SpatialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SpatialModel::parse_with_sigma(s, None)
    }
}

/// Voter and candidate positions. One-dimensional elections keep the second
/// coordinate at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialElection {
    pub dimension: usize,
    pub voters: Vec<[f64; 2]>,
    pub candidates: [[f64; 2]; 3],
}

#[inline]
fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

impl SpatialElection {
    /// Smallest distance between two candidates.
    pub fn min_candidate_separation(&self) -> f64 {
        let c = &self.candidates;
        dist2(c[0], c[1]).min(dist2(c[0], c[2])).min(dist2(c[1], c[2])).sqrt()
    }

    pub fn has_coincident_candidates(&self) -> bool {
        self.min_candidate_separation() < COINCIDENCE_EPS
    }

    /// Writes `role,x[,y]` rows for every voter and candidate.
    pub fn write_positions_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let two_d = self.dimension == 2;
        writeln!(out, "{}", if two_d { "role,x,y" } else { "role,x" })?;
        let rows = self
            .voters
            .iter()
            .map(|p| ("voter", p))
            .chain(self.candidates.iter().map(|p| ("candidate", p)));
        for (role, p) in rows {
            if two_d {
                writeln!(out, "{role},{},{}", p[0], p[1])?;
            } else {
                writeln!(out, "{role},{}", p[0])?;
            }
        }
        Ok(())
    }
}

pub fn sample_election(
    model: &SpatialModel,
    v_count: usize,
    rng_seed: u64,
) -> Result<SpatialElection, SpatialError> {
    sample_election_with_rng(model, v_count, &mut ChaCha8Rng::seed_from_u64(rng_seed))
}

/// Draws three candidates, then `v_count` voters, i.i.d. from `model`.
pub fn sample_election_with_rng<R: Rng + ?Sized>(
    model: &SpatialModel,
    v_count: usize,
    rng: &mut R,
) -> Result<SpatialElection, SpatialError> {
    if v_count == 0 {
        return Err(SpatialError::NoVoters);
    }
    let candidates = [model.sample_point(rng), model.sample_point(rng), model.sample_point(rng)];
    let voters = (0..v_count).map(|_| model.sample_point(rng)).collect();
    Ok(SpatialElection { dimension: model.dimension(), voters, candidates })
}

/// Ranks candidates by distance from one voter; equal distances are ordered
/// uniformly at random.
#[inline]
pub fn rank_by_distance<R: Rng + ?Sized>(
    voter: [f64; 2],
    candidates: &[[f64; 2]; 3],
    rng: &mut R,
) -> [Candidate; 3] {
    let d = [dist2(voter, candidates[0]), dist2(voter, candidates[1]), dist2(voter, candidates[2])];
    let mut idx = [0usize, 1, 2];
    if d[0] != d[1] && d[0] != d[2] && d[1] != d[2] {
        idx.sort_unstable_by(|&i, &j| d[i].total_cmp(&d[j]));
    } else {
        let keys: [u32; 3] = [rng.random(), rng.random(), rng.random()];
        idx.sort_unstable_by(|&i, &j| d[i].total_cmp(&d[j]).then(keys[i].cmp(&keys[j])));
    }
    idx.map(|i| Candidate::new(i).unwrap())
}

pub fn derive_profile(
    e: &SpatialElection,
    bullet_prob: f64,
    rng_seed: u64,
) -> Result<Profile3, SpatialError> {
    derive_profile_with_rng(e, bullet_prob, &mut ChaCha8Rng::seed_from_u64(rng_seed))
}

/// Distance rankings for every voter; each voter independently keeps only
/// their first choice with probability `bullet_prob`.
pub fn derive_profile_with_rng<R: Rng + ?Sized>(
    e: &SpatialElection,
    bullet_prob: f64,
    rng: &mut R,
) -> Result<Profile3, SpatialError> {
    if !(0.0..=1.0).contains(&bullet_prob) {
        return Err(SpatialError::BadBulletProb(bullet_prob));
    }
    let mut p = Profile3::default();
    for &v in &e.voters {
        let order = rank_by_distance(v, &e.candidates, rng);
        let bullet = if bullet_prob <= 0.0 {
            false
        } else if bullet_prob >= 1.0 {
            true
        } else {
            rng.random::<f64>() < bullet_prob
        };
        p.add(if bullet { Ballot::Bullet(order[0]) } else { Ballot::Full(order) }, 1);
    }
    Ok(p)
}

/// u(c) = -sum over voters of ||v - c||.
pub fn social_utilities(e: &SpatialElection) -> [f64; 3] {
    let mut u = [0.0f64; 3];
    for &v in &e.voters {
        for (k, &c) in e.candidates.iter().enumerate() {
            u[k] -= dist2(v, c).sqrt();
        }
    }
    u
}

/// The candidate of minimal social utility.
pub fn min_utility_candidate(utilities: &[f64; 3]) -> crate::election::Pick {
    crate::election::Pick::argmin(|c| utilities[c.index()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::FULL_ORDERS;

    fn election_1d(voters: &[f64], cands: [f64; 3]) -> SpatialElection {
        SpatialElection {
            dimension: 1,
            voters: voters.iter().map(|&x| [x, 0.0]).collect(),
            candidates: cands.map(|x| [x, 0.0]),
        }
    }

    #[test]
    fn parse_and_display() {
        let m: SpatialModel = "BIM(0.5)xUNI".parse().unwrap();
        assert_eq!(m.axes(), &[AxisDist::Bim(0.5), AxisDist::Uni]);
        assert_eq!(m.to_string(), "BIM(0.5)xUNI");
        let t = SpatialModel::parse_with_sigma("wbi×bim", Some(0.3)).unwrap();
        assert_eq!(t.axes(), &[AxisDist::Wbi(0.3), AxisDist::Bim(0.3)]);
        assert!("BIM".parse::<SpatialModel>().is_err());
        assert!("UNIxUNIxUNI".parse::<SpatialModel>().is_err());
        assert!(matches!("FOO".parse::<SpatialModel>(), Err(SpatialError::Parse(..))));
    }

    #[test]
    fn rejects_non_positive_sigma() {
        assert_eq!(SpatialModel::new(vec![AxisDist::Bim(0.0)]), Err(SpatialError::BadSigma(0.0)));
        assert!(SpatialModel::new(vec![AxisDist::Wbi(-1.0)]).is_err());
    }

    #[test]
    fn uni_mean_near_zero() {
        let m: SpatialModel = "UNI".parse().unwrap();
        let e = sample_election(&m, 4001, 17).unwrap();
        let mean = e.voters.iter().map(|p| p[0]).sum::<f64>() / 4001.0;
        assert!(mean.abs() < 5.0 / 4001f64.sqrt(), "mean {mean}");
    }

    #[test]
    fn bim_is_bimodal() {
        let m: SpatialModel = "BIM(0.25)".parse().unwrap();
        let e = sample_election(&m, 100_000, 3).unwrap();
        // 20 bins over [-2, 2]
        let mut hist = [0usize; 20];
        for p in &e.voters {
            let b = ((p[0] + 2.0) / 0.2).floor();
            if (0.0..20.0).contains(&b) {
                hist[b as usize] += 1;
            }
        }
        let centre = hist[9] + hist[10];
        let left = hist[4] + hist[5]; // [-1.2, -0.8)
        let right = hist[14] + hist[15]; // [0.8, 1.2)
        assert!(left > 20 * centre.max(1) && right > 20 * centre.max(1), "{hist:?}");
    }

    #[test]
    fn wbi_left_share_matches_mixture_cdf() {
        // P(X < 0) = 0.6 Phi(1/sigma) + 0.4 Phi(-1/sigma); Phi(2) = 0.9772498680518208
        let phi2 = 0.977_249_868_051_820_8;
        let expected = 0.6 * phi2 + 0.4 * (1.0 - phi2);
        let m: SpatialModel = "WBI(0.5)".parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let left = (0..n).filter(|_| m.sample_point(&mut rng)[0] < 0.0).count();
        let frac = left as f64 / n as f64;
        assert!((frac - expected).abs() < 0.002, "{frac} vs {expected}");
    }

    #[test]
    fn single_peaked_example() {
        let e = election_1d(&[-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0]);
        let p = derive_profile(&e, 0.0, 0).unwrap();
        // voter at -1: A B C; at 0: B then A/C tie; at 1: C B A
        assert_eq!(p.count(FULL_ORDERS[0]), 1);
        assert_eq!(p.count(FULL_ORDERS[5]), 1);
        assert_eq!(p.count(FULL_ORDERS[2]) + p.count(FULL_ORDERS[3]), 1);
        assert_eq!(p.voters(), 3);
    }

    #[test]
    fn bullet_prob_one_truncates_everyone() {
        let m: SpatialModel = "UNIxUNI".parse().unwrap();
        let e = sample_election(&m, 501, 5).unwrap();
        let p = derive_profile(&e, 1.0, 5).unwrap();
        assert_eq!(p.full, [0; 6]);
        assert_eq!(p.bullet_total(), 501);
    }

    #[test]
    fn bullet_rate_is_binomial() {
        let m: SpatialModel = "BIM(0.5)".parse().unwrap();
        let e = sample_election(&m, 4001, 8).unwrap();
        let p = derive_profile(&e, 0.35, 9).unwrap();
        let mean = 4001.0 * 0.35;
        let sd = (4001.0 * 0.35 * 0.65f64).sqrt();
        assert!((p.bullet_total() as f64 - mean).abs() < 5.0 * sd);
        assert_eq!(p.voters(), 4001);
    }

    #[test]
    fn rejects_bad_bullet_prob() {
        let e = election_1d(&[0.0], [0.0, 1.0, 2.0]);
        assert!(derive_profile(&e, 1.5, 0).is_err());
    }

    #[test]
    fn utility_examples() {
        let e = election_1d(&[0.5], [0.5, 1.0, -2.0]);
        let u = social_utilities(&e);
        assert_eq!(u[0], 0.0);
        assert!(u[1] < 0.0 && u[2] < 0.0);

        let e = election_1d(&[-1.0, 1.0], [0.0, 3.0, -3.0]);
        assert_eq!(social_utilities(&e)[0], -2.0);
    }

    #[test]
    fn utilities_match_double_loop() {
        let m: SpatialModel = "WBI(0.4)xBIM(0.6)".parse().unwrap();
        let e = sample_election(&m, 2001, 21).unwrap();
        let u = social_utilities(&e);
        for k in 0..3 {
            let mut brute = 0.0;
            for v in &e.voters {
                brute -= ((v[0] - e.candidates[k][0]).powi(2) + (v[1] - e.candidates[k][1]).powi(2)).sqrt();
            }
            assert!(((u[k] - brute) / brute).abs() < 1e-9);
        }
    }

    #[test]
    fn coincident_candidates_are_flagged() {
        let e = election_1d(&[0.0, 1.0], [0.3, 0.3, 1.0]);
        assert!(e.has_coincident_candidates());
        // every voter is equidistant from A and B: tie broken at random
        let firsts: std::collections::HashSet<_> = (0..40)
            .map(|s| derive_profile(&e, 0.0, s).unwrap().first_place(Candidate::A))
            .collect();
        assert!(firsts.len() > 1);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let m: SpatialModel = "BIM(0.5)xWBI(0.5)".parse().unwrap();
        assert_eq!(sample_election(&m, 50, 1).unwrap(), sample_election(&m, 50, 1).unwrap());
        assert_ne!(sample_election(&m, 50, 1).unwrap(), sample_election(&m, 50, 2).unwrap());
    }

    #[test]
    fn positions_csv_shape() {
        let e = election_1d(&[0.0, 1.0], [0.3, 0.4, 1.0]);
        let mut buf = Vec::new();
        e.write_positions_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("role,x\nvoter,0\n"));
    }
}

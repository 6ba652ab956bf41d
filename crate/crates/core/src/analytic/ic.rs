//! Impartial culture limits for the Borda and Bucklin losers, assembled
//! from spherical-simplex volumes.
//!
//! With the plurality order A, B, C fixed, each event splits by IRV winner.
//! Every branch is a cone with five normals: the two plurality constraints,
//! the runoff constraint, and two weakness constraints. The canonical-order
//! probability is multiplied by six for the relabelings.

use super::sphere::{
    cone_probability, ic_schlafli_volume, ic_spherical_triangle, normal, DeformedCone, Normal,
    SchlafliResult, SphericalCone,
};
use super::systems::{a_over_b_first, b_beats_a_after_c, b_over_c_first, borda_difference};
use super::{AnalyticError, AnalyticMeasure, Estimate, Method};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IcStep {
    pub name: String,
    /// Normalized volume (probability in the canonical order).
    pub value: f64,
    pub error: f64,
    /// Facet-pair integrals of the Schläfli step, in base-facet order.
    pub integrals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IcResult {
    pub borda: f64,
    pub borda_error: f64,
    pub bucklin: f64,
    pub bucklin_error: f64,
    pub steps: Vec<IcStep>,
}

impl IcResult {
    pub fn step(&self, name: &str) -> Option<&IcStep> {
        self.steps.iter().find(|s| s.name == name)
    }

    pub fn estimates(&self) -> Vec<Estimate> {
        [
            (AnalyticMeasure::BordaLoser, self.borda, self.borda_error),
            (AnalyticMeasure::BucklinLoser, self.bucklin, self.bucklin_error),
            // the majority part vanishes in the limit
            (AnalyticMeasure::MostLastPlace, self.bucklin, self.bucklin_error),
        ]
        .into_iter()
        .map(|(m, value, error)| Estimate {
            measure: m.name().to_string(),
            method: Method::Schlafli,
            value,
            error,
            exact: None,
            hits: None,
        })
        .collect()
    }
}

fn neg(n: Normal) -> Normal {
    n.map(|x| -x)
}

pub fn v1() -> Normal {
    normal(a_over_b_first().coeffs)
}

pub fn v2() -> Normal {
    normal(b_over_c_first().coeffs)
}

/// B beats A once C is eliminated.
pub fn v3() -> Normal {
    normal(b_beats_a_after_c().coeffs)
}

/// Borda score of `x` above `y`.
pub fn borda_over(x: usize, y: usize) -> Normal {
    normal(borda_difference(x, y).coeffs)
}

/// Normals of the B-wins branch for the Borda loser, in assembly order.
pub fn borda_b_normals() -> [Normal; 5] {
    [v1(), v2(), v3(), borda_over(0, 1), borda_over(2, 1)]
}

pub fn borda_a_normals() -> [Normal; 5] {
    [v1(), v2(), neg(v3()), borda_over(1, 0), borda_over(2, 0)]
}

/// B wins and has the fewest first-plus-second votes.
pub fn bucklin_b_normals() -> [Normal; 5] {
    [v1(), v2(), v3(), normal([-1, 1, -1, 0, 1, 0]), normal([0, 1, 0, -1, 1, -1])]
}

/// A wins in the second round and has the fewest first-plus-second votes.
pub fn bucklin_a_normals() -> [Normal; 5] {
    [v1(), v2(), neg(v3()), normal([0, -1, 0, 1, -1, 1]), normal([-1, 0, -1, 1, 0, 1])]
}

struct Builder {
    steps: Vec<IcStep>,
    tol: f64,
}

impl Builder {
    fn push(&mut self, name: &str, value: f64, error: f64, integrals: Vec<f64>) -> (f64, f64) {
        self.steps.push(IcStep { name: name.to_string(), value, error, integrals });
        (value, error)
    }

    fn schlafli(&mut self, name: &str, base: &[Normal], target: Normal, base_volume: f64) -> Result<SchlafliResult, AnalyticError> {
        let cone = DeformedCone::new(SphericalCone::new(base.to_vec())?, target)?.with_base_volume(base_volume);
        let r = ic_schlafli_volume(&cone, self.tol)?;
        self.push(name, r.volume, r.error, r.integrals.iter().map(|p| p.value).collect());
        Ok(r)
    }

    /// Triangle, then two Schläfli steps adding normals 4 and 5.
    fn chain(&mut self, prefix: &str, n: &[Normal; 5]) -> Result<(f64, f64, f64, f64), AnalyticError> {
        let tri = ic_spherical_triangle(&[n[0], n[1], n[2]])?;
        self.push(&format!("{prefix}/step1"), tri, 0.0, Vec::new());
        let s2 = self.schlafli(&format!("{prefix}/step2"), &n[..3], n[3], tri)?;
        let s3 = self.schlafli(&format!("{prefix}/step3"), &n[..4], n[4], s2.volume)?;
        Ok((s2.volume, s2.error, s3.volume, s3.error))
    }
}

/// Borda-loser and Bucklin-loser limits with per-step constants.
///
/// The Borda B-branch follows the complement route: the cone with A above
/// B in Borda score minus the part where B is also above C. The other three
/// branches add their two weakness normals directly.
pub fn ic_probabilities(tol: f64) -> Result<IcResult, AnalyticError> {
    let mut b = Builder { steps: Vec::new(), tol };

    let b_route = [v1(), v2(), v3(), borda_over(0, 1), borda_over(1, 2)];
    let (s2, e2, s3, e3) = b.chain("borda_b", &b_route)?;
    let (borda_b, borda_b_err) = b.push("borda_b", s2 - s3, e2 + e3, Vec::new());

    let (_, _, borda_a, borda_a_err) = b.chain("borda_a", &borda_a_normals())?;
    b.push("borda_a", borda_a, borda_a_err, Vec::new());

    let (_, _, buck_b, buck_b_err) = b.chain("bucklin_b", &bucklin_b_normals())?;
    b.push("bucklin_b", buck_b, buck_b_err, Vec::new());
    let (_, _, buck_a, buck_a_err) = b.chain("bucklin_a", &bucklin_a_normals())?;
    b.push("bucklin_a", buck_a, buck_a_err, Vec::new());

    Ok(IcResult {
        borda: 6.0 * (borda_a + borda_b),
        borda_error: 6.0 * (borda_a_err + borda_b_err),
        bucklin: 6.0 * (buck_a + buck_b),
        bucklin_error: 6.0 * (buck_a_err + buck_b_err),
        steps: b.steps,
    })
}

/// Direct volume of a five-normal branch, for cross-checks.
pub fn branch_volume(normals: &[Normal; 5], tol: f64) -> Result<f64, AnalyticError> {
    Ok(cone_probability(normals, tol)?.value)
}

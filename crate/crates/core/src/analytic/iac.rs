//! Impartial anonymous culture: exact limits, uniform simplex sampling and
//! exact lattice counts at finite V.

use super::systems::{relabel_maps, Event, InequalitySystem};
use super::{AnalyticError, AnalyticMeasure, Estimate, Method};
use crate::seeds::stream_rng;
use num_integer::Integer;
use num_rational::Ratio;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

/// Samples per independently seeded block.
pub const SAMPLE_BLOCK: u64 = 1 << 16;

/// Cap on inner-loop iterations for [`iac_enumerate`].
pub const ENUMERATION_LIMIT: u128 = 100_000_000;

/// Limiting IAC probability that IRV elects the weak candidate.
pub fn closed_form(measure: AnalyticMeasure) -> Ratio<i64> {
    match measure {
        AnalyticMeasure::BordaLoser => Ratio::new(4301, 241_920),
        AnalyticMeasure::BucklinLoser => Ratio::new(115, 2304),
        AnalyticMeasure::MostLastPlace => Ratio::new(49, 768),
    }
}

pub fn iac_closed_form() -> [(AnalyticMeasure, Ratio<i64>); 3] {
    AnalyticMeasure::ALL.map(|m| (m, closed_form(m)))
}

pub fn closed_form_estimate(measure: AnalyticMeasure) -> Estimate {
    let q = closed_form(measure);
    Estimate {
        measure: measure.name().to_string(),
        method: Method::ClosedForm,
        value: *q.numer() as f64 / *q.denom() as f64,
        error: 0.0,
        exact: Some(q.to_string()),
        hits: None,
    }
}

/// Uniform points on the 5-simplex from normalized unit exponentials; the
/// estimate counts every relabeling under which a point lies in the event.
pub fn iac_simplex_sample(event: &Event, n_samples: u64, rng_seed: u64) -> Result<Estimate, AnalyticError> {
    if n_samples == 0 {
        return Err(AnalyticError::NoSamples);
    }
    let maps = relabel_maps();
    let blocks = n_samples.div_ceil(SAMPLE_BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(rng_seed, b);
            let len = SAMPLE_BLOCK.min(n_samples - b * SAMPLE_BLOCK);
            let mut hits = 0u64;
            for _ in 0..len {
                let mut x = [0.0f64; 6];
                for v in x.iter_mut() {
                    *v = Exp1.sample(&mut rng);
                }
                let total: f64 = x.iter().sum();
                for v in x.iter_mut() {
                    *v /= total;
                }
                hits += u64::from(event.hits(&x, &maps));
            }
            hits
        })
        .sum();
    Ok(Estimate::sampled(&event.name, Method::SimplexSampling(n_samples), hits, n_samples))
}

/// C(n, k) in u128.
pub fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub v: u64,
    /// Hits summed over relabelings when the event is symmetrized.
    pub count: u128,
    /// Number of 6-compositions of V.
    pub total: u128,
}

impl Enumeration {
    pub fn value(&self) -> Ratio<i128> {
        Ratio::new(self.count as i128, self.total as i128)
    }

    pub fn to_f64(&self) -> f64 {
        self.count as f64 / self.total as f64
    }

    pub fn estimate(&self, measure: &str) -> Estimate {
        Estimate {
            measure: measure.to_string(),
            method: Method::Enumeration(self.v),
            value: self.to_f64(),
            error: 0.0,
            exact: Some(self.value().to_string()),
            hits: None,
        }
    }
}

/// Interval of admissible c1 for one system, given the other coordinates.
#[inline]
fn c1_interval(sys: &[([i64; 4], i64, i64)], head: [i64; 4], r: i64) -> Option<(i64, i64)> {
    let (mut lo, mut hi) = (0i64, r);
    for &(h, c5, k) in sys {
        let base = h[0] * head[0] + h[1] * head[1] + h[2] * head[2] + h[3] * head[3] + c5 * r;
        // base + k * c1 >= 1
        if k == 0 {
            if base < 1 {
                return None;
            }
        } else if k > 0 {
            lo = lo.max(-Integer::div_floor(&(base - 1), &k));
        } else {
            hi = hi.min(Integer::div_floor(&(base - 1), &-k));
        }
        if lo > hi {
            return None;
        }
    }
    Some((lo, hi))
}

/// Exact count of integer 6-compositions of `v` lying in the event, split
/// by strict inequalities only. The outer loop runs over (a1, a2, b1, b2);
/// every constraint is linear in c1 once c2 = r - c1, so each system admits
/// an interval of c1 values and the union of those intervals is counted
/// directly.
pub fn iac_enumerate(event: &Event, v: u64) -> Result<Enumeration, AnalyticError> {
    let work = binomial(v + 4, 4);
    if work > ENUMERATION_LIMIT {
        return Err(AnalyticError::EnumerationTooLarge { v, work, limit: ENUMERATION_LIMIT });
    }
    let systems: Vec<Vec<([i64; 4], i64, i64)>> = event.systems.iter().map(prepare).collect();
    let vi = v as i64;
    let mut count: u128 = 0;
    let mut intervals: Vec<(i64, i64)> = Vec::with_capacity(systems.len());
    for a1 in 0..=vi {
        for a2 in 0..=vi - a1 {
            for b1 in 0..=vi - a1 - a2 {
                for b2 in 0..=vi - a1 - a2 - b1 {
                    let r = vi - a1 - a2 - b1 - b2;
                    intervals.clear();
                    intervals.extend(systems.iter().filter_map(|s| c1_interval(s, [a1, a2, b1, b2], r)));
                    count += union_length(&mut intervals) as u128;
                }
            }
        }
    }
    Ok(Enumeration { v, count: count * u128::from(event.multiplicity()), total: binomial(v + 5, 5) })
}

fn prepare(s: &InequalitySystem) -> Vec<([i64; 4], i64, i64)> {
    s.constraints
        .iter()
        .map(|c| {
            let k = c.coeffs[4] - c.coeffs[5];
            ([c.coeffs[0], c.coeffs[1], c.coeffs[2], c.coeffs[3]], c.coeffs[5], k)
        })
        .collect()
}

fn union_length(iv: &mut [(i64, i64)]) -> i64 {
    match iv.len() {
        0 => 0,
        1 => iv[0].1 - iv[0].0 + 1,
        _ => {
            iv.sort_unstable();
            let mut total = 0;
            let (mut lo, mut hi) = iv[0];
            for &(a, b) in &iv[1..] {
                if a > hi + 1 {
                    total += hi - lo + 1;
                    lo = a;
                    hi = b;
                } else {
                    hi = hi.max(b);
                }
            }
            total + hi - lo + 1
        }
    }
}

//! Impartial culture probabilities by Gaussian-cone sampling.
//!
//! Under IC the counts `x` of V voters are Multinomial(V, 1/6, ..., 1/6).
//! The centred, rescaled vector `z = (x - V/6 * 1) / sqrt(V)` converges to
//! N(0, S) with `S = (I - J/6) / 6`, J the all-ones matrix. For a constraint
//! `c` with `c . 1 = 0` we have `S c = c / 6`, so for a matrix C whose rows
//! are such constraints `cov(C z) = C S C^T = C C^T / 6`. That is the
//! covariance of `C g` for a standard normal `g` up to the factor 1/6. The
//! events are open cones, invariant under positive scaling, hence
//! `P(C z > 0) = P(C g > 0)` and standard normal vectors can be sampled
//! directly. A majority constraint has `c . x = V (c . 1) / 6 + sqrt(V) c . z`,
//! so its sign converges to the sign of `c . 1`.

use super::iac::SAMPLE_BLOCK;
use super::systems::{relabel_maps, Event};
use super::{AnalyticError, Estimate, Method};
use crate::seeds::stream_rng;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Fraction of standard 6-D normal vectors in the event, summed over
/// relabelings when the event is symmetrized.
pub fn ic_gaussian_cone(event: &Event, n_samples: u64, rng_seed: u64) -> Result<Estimate, AnalyticError> {
    sample_cone(event, n_samples, rng_seed, |rng, z| {
        for v in z.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
    })
}

pub(crate) fn sample_cone(
    event: &Event,
    n_samples: u64,
    rng_seed: u64,
    draw: impl Fn(&mut rand_chacha::ChaCha8Rng, &mut [f64; 6]) + Sync,
) -> Result<Estimate, AnalyticError> {
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
            let mut z = [0.0f64; 6];
            let mut hits = 0u64;
            for _ in 0..len {
                draw(&mut rng, &mut z);
                hits += u64::from(event.hits_ic(&z, &maps));
            }
            hits
        })
        .sum();
    Ok(Estimate::sampled(&event.name, Method::GaussianCone(n_samples), hits, n_samples))
}

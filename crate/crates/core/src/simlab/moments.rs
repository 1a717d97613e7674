//! Monte-Carlo estimates of `E[f(x,z)·x]` and `E[f(x,z)²]`.

use rayon::prelude::*;

use crate::gmi::{ChannelConfig, DistortionModel};
use crate::simlab::rng::Stream;
use crate::{Error, Result};

/// Draws per stream. Chunk `c` uses stream id `c`.
pub const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub corr_mean: f64,
    pub corr_stderr: f64,
    pub power_mean: f64,
    pub power_stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Default, Clone, Copy)]
struct Sums {
    a: f64,
    aa: f64,
    b: f64,
    bb: f64,
}

/// Sample means of `f(x,z)·x` and `f(x,z)²` over i.i.d. `x ~ N(0, E_s)`,
/// `z ~ N(0, σ²)`. Each draw takes `x` then `z` from the chunk's stream.
pub fn estimate_moments(
    model: &DistortionModel,
    config: &ChannelConfig,
    samples: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    if samples < 1000 {
        return Err(Error::InvalidConfig(format!(
            "at least 1000 samples required, got {samples}"
        )));
    }
    let sx = config.es.sqrt();
    let sz = config.sigma2.sqrt();
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<Result<Sums>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = Stream::new(seed, c as u64);
            let len = CHUNK.min(samples - c * CHUNK);
            let mut s = Sums::default();
            for _ in 0..len {
                let x = sx * rng.normal();
                let z = sz * rng.normal();
                let w = model.eval(x, z);
                if !w.is_finite() {
                    return Err(Error::Evaluation(format!(
                        "{} returned {w} at x = {x}, z = {z}",
                        model.name()
                    )));
                }
                let a = w * x;
                let b = w * w;
                s.a += a;
                s.aa += a * a;
                s.b += b;
                s.bb += b * b;
            }
            Ok(s)
        })
        .collect();
    let mut tot = Sums::default();
    for p in partial {
        let p = p?;
        tot.a += p.a;
        tot.aa += p.aa;
        tot.b += p.b;
        tot.bb += p.bb;
    }
    let n = samples as f64;
    let stderr = |s: f64, ss: f64| {
        let m = s / n;
        ((ss / n - m * m).max(0.0) / (n - 1.0)).sqrt()
    };
    Ok(MomentEstimate {
        corr_mean: tot.a / n,
        corr_stderr: stderr(tot.a, tot.aa),
        power_mean: tot.b / n,
        power_stderr: stderr(tot.b, tot.bb),
        samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmi::{clipper_moments, moments_by_panels};
    use std::f64::consts::PI;

    #[test]
    fn identity_recovers_signal_energy() {
        let cfg = ChannelConfig::new(2.0, 0.5).unwrap();
        let e = estimate_moments(&DistortionModel::identity(), &cfg, 200_000, 1).unwrap();
        assert!((e.corr_mean - 2.0).abs() < 3.0 * e.corr_stderr, "{e:?}");
        assert!((e.power_mean - 2.5).abs() < 3.0 * e.power_stderr, "{e:?}");
    }

    #[test]
    fn hard_limiter_correlation() {
        // E[x sgn(x + z)] = E_s √(2/(π(E_s + σ²)))
        let cfg = ChannelConfig::new(1.0, 1.0).unwrap();
        let e = estimate_moments(&DistortionModel::hard_limiter(), &cfg, 200_000, 2).unwrap();
        let want = (2.0 / (PI * 2.0)).sqrt();
        assert!((e.corr_mean - want).abs() < 3.0 * e.corr_stderr, "{e:?}");
        assert_eq!(e.power_mean, 1.0);
        assert_eq!(e.power_stderr, 0.0);
    }

    #[test]
    fn clipper_matches_closed_form() {
        let cfg = ChannelConfig::new(1.0, 0.25).unwrap();
        let m = clipper_moments(0.8, &cfg).unwrap();
        let p = moments_by_panels(&DistortionModel::clipper(0.8), &cfg).unwrap();
        assert!((m.corr - p.corr).abs() < 1e-12);
        let e = estimate_moments(&DistortionModel::clipper(0.8), &cfg, 200_000, 3).unwrap();
        assert!((e.corr_mean - m.corr).abs() < 3.0 * e.corr_stderr);
        assert!((e.power_mean - m.power).abs() < 3.0 * e.power_stderr);
    }

    #[test]
    fn reproducible_and_seed_sensitive() {
        let cfg = ChannelConfig::new(1.0, 1.0).unwrap();
        let m = DistortionModel::cubic();
        let a = estimate_moments(&m, &cfg, 10_000, 7).unwrap();
        let b = estimate_moments(&m, &cfg, 10_000, 7).unwrap();
        let c = estimate_moments(&m, &cfg, 10_000, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.corr_mean, c.corr_mean);
    }

    #[test]
    fn stderr_scales_with_sample_count() {
        let cfg = ChannelConfig::new(1.0, 1.0).unwrap();
        let m = DistortionModel::clipper(1.0);
        let small = estimate_moments(&m, &cfg, 10_000, 4).unwrap();
        let large = estimate_moments(&m, &cfg, 1_000_000, 4).unwrap();
        let ratio = small.corr_stderr / large.corr_stderr;
        assert!(ratio > 5.0 && ratio < 20.0, "{ratio}");
    }

    #[test]
    fn rejects_small_budgets() {
        let cfg = ChannelConfig::new(1.0, 1.0).unwrap();
        assert!(estimate_moments(&DistortionModel::identity(), &cfg, 999, 0).is_err());
    }
}

//! Gaussian-codebook transmission with nearest-neighbor decoding.
//!
//! Each trial sends message 1 of a fresh i.i.d. `N(0, E_s)` codebook and
//! decodes by minimizing `Σ_k (v_k − a·x_k(m))²`, where `v_k` is the
//! observation (memoryless channels) or the combined window `βᵀw_k` with
//! `a = 1` (super-Nyquist). Ties go to the lowest message index, i.e. to the
//! transmitted one.
//!
//! Two decoders produce the same error law:
//!
//! * `Explicit` draws all competing codewords and compares metrics.
//! * `Conditional` uses that, given the observations and the sent codeword,
//!   competitors beat message 1 independently with probability
//!   `p = Pr[‖v − aX‖² < ‖v − a x₁‖²]`, `X ~ N(0, E_s I)`. Since
//!   `‖v − aX‖²/(a²E_s)` is noncentral chi-squared with `n` degrees of
//!   freedom and noncentrality `‖v‖²/(a²E_s)`, `p` is a chi-squared CDF and
//!   the block error is one Bernoulli draw with probability
//!   `1 − (1 − p)^{M−1}`. This makes codebooks far beyond memory reach
//!   simulable.

use rayon::prelude::*;

use crate::gmi::{gmi_from_moments, moments_by_panels, ChannelConfig, DecoderScaling, DistortionModel, GmiResult};
use crate::numerics::linalg::dot;
use crate::numerics::special::ln_noncentral_chi2_cdf;
use crate::simlab::channel::SupernyqChannel;
use crate::simlab::rng::Stream;
use crate::supernyq::{general_correlations, supernyq_gmi, PulseSpec, DEFAULT_ISI_WINDOW};
use crate::{Error, Result};

/// Largest codebook the explicit decoder will materialize.
pub const MAX_EXPLICIT_MESSAGES: f64 = (1u64 << 20) as f64;
/// Auto mode switches to the conditional decoder above this many messages.
pub const AUTO_EXPLICIT_MESSAGES: f64 = 1024.0;
pub const MAX_BLOCK_LENGTH: usize = 1 << 16;
pub const MAX_TRIALS: usize = 1_000_000;

#[derive(Debug, Clone)]
pub enum SimChannel {
    /// `w = f(x, z)` per channel use.
    Memoryless {
        model: DistortionModel,
        config: ChannelConfig,
    },
    /// One-bit super-Nyquist sampling; `snr = E_s/(σ²/2)`.
    Supernyq {
        pulse: PulseSpec,
        es: f64,
        snr: f64,
        isi_window: usize,
    },
}

impl SimChannel {
    pub fn supernyq(pulse: PulseSpec, es: f64, snr: f64) -> Self {
        Self::Supernyq {
            pulse,
            es,
            snr,
            isi_window: DEFAULT_ISI_WINDOW,
        }
    }

    pub fn es(&self) -> f64 {
        match self {
            Self::Memoryless { config, .. } => config.es,
            Self::Supernyq { es, .. } => *es,
        }
    }

    /// GMI of the channel; `a_opt` carries the decoder scaling or weights.
    pub fn gmi(&self) -> Result<GmiResult> {
        match self {
            Self::Memoryless { model, config } => {
                gmi_from_moments(&moments_by_panels(model, config)?, config)
            }
            Self::Supernyq { pulse, es, snr, .. } => {
                Ok(supernyq_gmi(&general_correlations(pulse, *snr, *es)?)?.0)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    Auto,
    Explicit,
    Conditional,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub n: usize,
    pub rate_nats: f64,
    pub trials: usize,
    pub seed: u64,
    pub channel: SimChannel,
    /// `None` uses the GMI-optimal scaling.
    pub scaling: Option<DecoderScaling>,
    pub mode: DecodeMode,
}

impl SimConfig {
    /// `⌊e^{nR}⌋`, as a float since it may exceed any integer type. A value
    /// within rounding of an integer counts as that integer, so a rate of
    /// `ln(M)/n` gives exactly `M` messages.
    pub fn num_messages(&self) -> f64 {
        let v = (self.n as f64 * self.rate_nats).exp();
        let r = v.round();
        if (v - r).abs() <= 1e-9 * r {
            r
        } else {
            v.floor()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub block_errors: usize,
    pub trials: usize,
    pub error_rate: f64,
    pub wilson_ci95: (f64, f64),
    pub num_messages: f64,
    pub mode: DecodeMode,
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

const Z95: f64 = 1.959963984540054;

enum Front {
    Memoryless {
        model: DistortionModel,
        sx: f64,
        sz: f64,
        a: f64,
    },
    Supernyq {
        channel: SupernyqChannel,
        sx: f64,
        beta: Vec<f64>,
    },
}

impl Front {
    /// Draws the sent codeword and the channel, returns `(x₁, v, a)`.
    fn observe(&self, n: usize, rng: &mut Stream) -> (Vec<f64>, Vec<f64>, f64) {
        match self {
            Front::Memoryless { model, sx, sz, a } => {
                let x: Vec<f64> = (0..n).map(|_| sx * rng.normal()).collect();
                let v = x.iter().map(|xi| model.eval(*xi, sz * rng.normal())).collect();
                (x, v, *a)
            }
            Front::Supernyq { channel, sx, beta } => {
                let x: Vec<f64> = (0..n).map(|_| sx * rng.normal()).collect();
                let w = channel.transmit(&x, rng);
                let v = w.iter().map(|wk| dot(beta, wk)).collect();
                (x, v, 1.0)
            }
        }
    }
}

fn validate(sim: &SimConfig) -> Result<DecodeMode> {
    if sim.n == 0 || sim.trials == 0 {
        return Err(Error::InvalidConfig("n and trials must be positive".into()));
    }
    if !(sim.rate_nats >= 0.0 && sim.rate_nats.is_finite()) {
        return Err(Error::InvalidConfig(format!("bad rate {}", sim.rate_nats)));
    }
    if sim.n > MAX_BLOCK_LENGTH {
        return Err(Error::ResourceCap(format!(
            "block length {} exceeds {MAX_BLOCK_LENGTH}",
            sim.n
        )));
    }
    if sim.trials > MAX_TRIALS {
        return Err(Error::ResourceCap(format!(
            "{} trials exceed {MAX_TRIALS}",
            sim.trials
        )));
    }
    let m = sim.num_messages();
    if m < 2.0 {
        return Err(Error::InvalidConfig(format!(
            "⌊e^(nR)⌋ = {m} leaves fewer than two messages; raise n or the rate"
        )));
    }
    if !m.is_finite() {
        return Err(Error::ResourceCap(format!(
            "n·R = {} nats overflows the message count",
            sim.n as f64 * sim.rate_nats
        )));
    }
    let mode = match sim.mode {
        DecodeMode::Auto if m <= AUTO_EXPLICIT_MESSAGES => DecodeMode::Explicit,
        DecodeMode::Auto => DecodeMode::Conditional,
        other => other,
    };
    if mode == DecodeMode::Explicit && m > MAX_EXPLICIT_MESSAGES {
        return Err(Error::ResourceCap(format!(
            "explicit codebook of {m:.3e} messages exceeds 2^20; keep n·R ≤ {:.2} nats \
             or use the conditional decoder",
            MAX_EXPLICIT_MESSAGES.ln()
        )));
    }
    Ok(mode)
}

fn build_front(sim: &SimConfig) -> Result<Front> {
    let scaling = match &sim.scaling {
        Some(s) => s.clone(),
        None => sim.channel.gmi()?.a_opt,
    };
    match (&sim.channel, scaling) {
        (SimChannel::Memoryless { model, config }, DecoderScaling::Real(a)) => {
            if !(a.is_finite() && a != 0.0) {
                return Err(Error::InvalidConfig(format!("decoder scaling {a} unusable")));
            }
            Ok(Front::Memoryless {
                model: model.clone(),
                sx: config.es.sqrt(),
                sz: config.sigma2.sqrt(),
                a,
            })
        }
        (
            SimChannel::Supernyq {
                pulse,
                es,
                snr,
                isi_window,
            },
            DecoderScaling::Weights(beta),
        ) => {
            if beta.len() != 2 * pulse.l() - 1 {
                return Err(Error::Dimension {
                    expected: 2 * pulse.l() - 1,
                    got: beta.len(),
                });
            }
            if beta.iter().all(|b| *b == 0.0) {
                return Err(Error::InvalidConfig("all combining weights are zero".into()));
            }
            Ok(Front::Supernyq {
                channel: SupernyqChannel::new(pulse, *es, *snr, *isi_window)?,
                sx: es.sqrt(),
                beta,
            })
        }
        _ => Err(Error::InvalidConfig(
            "decoder scaling does not match the channel".into(),
        )),
    }
}

/// Probability that one of `others` independent competitors beats the sent
/// codeword, given `ln p` for a single competitor.
fn block_error_probability(ln_p: f64, others: f64) -> f64 {
    if ln_p == f64::NEG_INFINITY {
        return 0.0;
    }
    let ln_q = if ln_p < -0.7 {
        (-ln_p.exp()).ln_1p()
    } else {
        (-ln_p.exp_m1()).ln()
    };
    if ln_p < -700.0 {
        // ln(1 − p) ≈ −p where p itself underflows
        return -(-(others.ln() + ln_p).exp()).exp_m1();
    }
    -(others * ln_q).exp_m1()
}

/// Runs the trials; trial `t` draws everything from stream `t`.
pub fn run_nn_decoding(sim: &SimConfig) -> Result<SimResult> {
    let mode = validate(sim)?;
    let front = build_front(sim)?;
    let m = sim.num_messages();
    let n = sim.n;
    let es = sim.channel.es();
    let sx = es.sqrt();
    let errors: Vec<bool> = (0..sim.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = Stream::new(sim.seed, t as u64);
            let (x1, v, a) = front.observe(n, &mut rng);
            let d1: f64 = v.iter().zip(&x1).map(|(vi, xi)| (vi - a * xi).powi(2)).sum();
            match mode {
                DecodeMode::Conditional => {
                    let s = a * a * es;
                    let lambda = dot(&v, &v) / s;
                    let ln_p = ln_noncentral_chi2_cdf(d1 / s, n as f64, lambda);
                    rng.uniform() < block_error_probability(ln_p, m - 1.0)
                }
                _ => {
                    let count = m as u64;
                    for _ in 1..count {
                        let mut d = 0.0;
                        for vi in &v {
                            d += (vi - a * sx * rng.normal()).powi(2);
                        }
                        if d < d1 {
                            return true;
                        }
                    }
                    false
                }
            }
        })
        .collect();
    let block_errors = errors.iter().filter(|e| **e).count();
    Ok(SimResult {
        block_errors,
        trials: sim.trials,
        error_rate: block_errors as f64 / sim.trials as f64,
        wilson_ci95: wilson_interval(block_errors, sim.trials, Z95),
        num_messages: m,
        mode,
    })
}

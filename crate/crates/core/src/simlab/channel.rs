//! Sampled super-Nyquist channel with one-bit outputs.
//!
//! Samples sit on the grid `j/L` (symbol intervals); sample `l` of symbol
//! `k` is grid point `j = kL + l`. Signal and noise are both sinc
//! superpositions truncated to `isi_window` symbols on each side of the
//! sample: the signal is `Σ_k x_k p(j/L − k)` and the noise is
//! `Σ_m ζ_m sinc(j/L − m)` with i.i.d. `ζ_m ~ N(0, σ²/2)`, which has the
//! band-limited autocorrelation `(σ²/2) sinc(τ)` up to the truncation.
//! Symbols outside the block within the window are i.i.d. `N(0, E_s)`
//! padding.

use rayon::prelude::*;

use crate::numerics::linalg::SymMatrix;
use crate::numerics::special::sinc;
use crate::simlab::rng::Stream;
use crate::supernyq::PulseSpec;
use crate::{Error, Result};

/// Hard-limited windows and the symbols that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SupernyqObservations {
    pub l: usize,
    pub x: Vec<f64>,
    /// `w[k][i]` is sample `i − (L − 1)` of symbol `k`, in `{−1, +1}`.
    pub w: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct SupernyqChannel {
    l: usize,
    es: f64,
    noise_sd: f64,
    window: usize,
    /// `pulse[ph][m + W + 1] = p(m + ph/L)`, `m ∈ [−W−1, W]`.
    pulse: Vec<Vec<f64>>,
    interp: Vec<Vec<f64>>,
}

impl SupernyqChannel {
    /// `snr = E_s/(σ²/2)`; infinite SNR means no noise.
    pub fn new(pulse: &PulseSpec, es: f64, snr: f64, isi_window: usize) -> Result<Self> {
        if !(es > 0.0 && es.is_finite()) {
            return Err(Error::InvalidConfig(format!("es must be positive, got {es}")));
        }
        if !(snr > 0.0) {
            return Err(Error::InvalidConfig(format!("snr must be positive, got {snr}")));
        }
        if isi_window == 0 {
            return Err(Error::InvalidConfig("ISI window must be at least 1".into()));
        }
        let l = pulse.l();
        let w = isi_window as i64;
        let table = |f: &dyn Fn(f64) -> f64| -> Vec<Vec<f64>> {
            (0..l)
                .map(|ph| {
                    (-w - 1..=w)
                        .map(|m| f(m as f64 + ph as f64 / l as f64))
                        .collect()
                })
                .collect()
        };
        Ok(Self {
            l,
            es,
            noise_sd: if snr.is_infinite() { 0.0 } else { (es / snr).sqrt() },
            window: isi_window,
            pulse: table(&|t| pulse.eval(t)),
            interp: table(&sinc),
        })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Sends the block `x` and returns the hard-limited windows.
    ///
    /// Draw order from `rng`: left padding, right padding, then the noise
    /// coefficients `ζ` from left to right.
    pub fn transmit(&self, x: &[f64], rng: &mut Stream) -> Vec<Vec<f64>> {
        let n = x.len();
        let l = self.l as i64;
        let pad = self.window + 1;
        let sx = self.es.sqrt();
        let mut symbols = Vec::with_capacity(n + 2 * pad);
        let left: Vec<f64> = (0..pad).map(|_| sx * rng.normal()).collect();
        let right: Vec<f64> = (0..pad).map(|_| sx * rng.normal()).collect();
        symbols.extend_from_slice(&left);
        symbols.extend_from_slice(x);
        symbols.extend_from_slice(&right);
        let zeta: Vec<f64> = (0..symbols.len())
            .map(|_| self.noise_sd * rng.normal())
            .collect();

        let w = self.window as i64;
        let first = -(l - 1);
        let count = (n as i64 + 1) * l - 1;
        let samples: Vec<f64> = (0..count)
            .into_par_iter()
            .map(|idx| {
                let j = first + idx;
                let q = j.div_euclid(l);
                let ph = j.rem_euclid(l) as usize;
                let (kp, kn) = (&self.pulse[ph], &self.interp[ph]);
                let mut y = 0.0;
                // term m pairs with symbol k = q − m
                for m in -w - 1..=w {
                    let k = (q - m + pad as i64) as usize;
                    let t = (m + w + 1) as usize;
                    y += symbols[k] * kp[t] + zeta[k] * kn[t];
                }
                if y >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();

        let width = 2 * self.l - 1;
        (0..n)
            .map(|k| samples[k * self.l..k * self.l + width].to_vec())
            .collect()
    }
}

/// Draws `n` Gaussian symbols and sends them through the channel.
pub fn simulate_supernyq_channel(
    pulse: &PulseSpec,
    es: f64,
    snr: f64,
    n: usize,
    seed: u64,
    isi_window: usize,
) -> Result<SupernyqObservations> {
    let ch = SupernyqChannel::new(pulse, es, snr, isi_window)?;
    let mut rng = Stream::new(seed, 0);
    let sx = es.sqrt();
    let x: Vec<f64> = (0..n).map(|_| sx * rng.normal()).collect();
    let w = ch.transmit(&x, &mut rng);
    Ok(SupernyqObservations { l: ch.l, x, w })
}

/// Per-symbol window statistics with batch-means standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowStats {
    /// Mean of `w_{k,u} w_{k,l}` over symbols.
    pub corr: SymMatrix,
    pub corr_stderr: SymMatrix,
    /// Mean of `x_k w_{k,l}`.
    pub b: Vec<f64>,
    pub b_stderr: Vec<f64>,
    pub batches: usize,
}

/// Splits the symbols into consecutive batches of `batch` (the tail is
/// dropped) so that the dependence between neighbouring symbols is
/// absorbed into the batch means.
pub fn window_statistics(obs: &SupernyqObservations, batch: usize) -> Result<WindowStats> {
    let nb = obs.x.len() / batch.max(1);
    if batch == 0 || nb < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least two batches of {batch} symbols, have {} symbols",
            obs.x.len()
        )));
    }
    let d = 2 * obs.l - 1;
    let np = d * (d + 1) / 2;
    // per batch: packed pair means then b means
    let means: Vec<Vec<f64>> = (0..nb)
        .map(|bi| {
            let mut acc = vec![0.0; np + d];
            for k in bi * batch..(bi + 1) * batch {
                let w = &obs.w[k];
                let mut p = 0;
                for i in 0..d {
                    for j in 0..=i {
                        acc[p] += w[i] * w[j];
                        p += 1;
                    }
                    acc[np + i] += obs.x[k] * w[i];
                }
            }
            acc.iter().map(|v| v / batch as f64).collect()
        })
        .collect();
    let nbf = nb as f64;
    let mut mean = vec![0.0; np + d];
    for m in &means {
        for (a, v) in mean.iter_mut().zip(m) {
            *a += v / nbf;
        }
    }
    let mut se = vec![0.0; np + d];
    for m in &means {
        for ((s, v), mu) in se.iter_mut().zip(m).zip(&mean) {
            *s += (v - mu) * (v - mu);
        }
    }
    for s in se.iter_mut() {
        *s = (*s / (nbf - 1.0) / nbf).sqrt();
    }
    let unpack = |v: &[f64]| {
        let mut m = SymMatrix::zeros(d);
        let mut p = 0;
        for i in 0..d {
            for j in 0..=i {
                m.set(i, j, v[p]);
                p += 1;
            }
        }
        m
    };
    Ok(WindowStats {
        corr: unpack(&mean[..np]),
        corr_stderr: unpack(&se[..np]),
        b: mean[np..].to_vec(),
        b_stderr: se[np..].to_vec(),
        batches: nb,
    })
}

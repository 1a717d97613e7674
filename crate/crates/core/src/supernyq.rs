//! Super-Nyquist sampling with one-bit quantization.
//!
//! The band-limited output `y(t) = x(t) + z(t)` is sampled `L` times per
//! symbol interval and each sample is hard-limited. Per symbol the decoder
//! combines the `2L − 1` samples `w_{k,l}`, `l = −L+1 … L−1`, centred on the
//! symbol, with weights `β`. Time is measured in symbol intervals
//! (`2W = 1`), so sample `l` of symbol `k` sits at `k + l/L`.
//!
//! SNR here is `E_s/(σ²/2)`: the noise process has two-sided in-band PSD
//! `σ²/2`, so every sample has noise variance `σ²/2`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::gmi::{ChannelConfig, DecoderScaling, GmiResult};
use crate::numerics::linalg::{dot, solve_spd, spectral_map, sym_eig, SymMatrix};
use crate::numerics::special::sinc;
use crate::simlab::rng::Stream;
use crate::{Error, Result};

/// Largest supported oversampling factor.
pub const MAX_FACTOR: usize = 32;

/// Default number of interfering symbols on each side.
pub const DEFAULT_ISI_WINDOW: usize = 64;

fn check_factor(l: usize) -> Result<()> {
    if l == 0 || l > MAX_FACTOR {
        return Err(Error::Domain(format!(
            "oversampling factor must be in 1..={MAX_FACTOR}, got {l}"
        )));
    }
    Ok(())
}

/// Offset of array index `i` within `−L+1 … L−1`.
#[inline]
pub fn sample_offset(i: usize, l: usize) -> i64 {
    i as i64 - (l as i64 - 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    l: usize,
}

impl SamplerConfig {
    pub fn new(l: usize) -> Result<Self> {
        check_factor(l)?;
        Ok(Self { l })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Number of samples per symbol window, `2L − 1`.
    pub fn window(&self) -> usize {
        2 * self.l - 1
    }

    /// Sampling offset `τ_L = (L−1)/L` in symbol intervals.
    pub fn offset(&self) -> f64 {
        (self.l as f64 - 1.0) / self.l as f64
    }

    /// Sample offsets `−L+1 … L−1`.
    pub fn offsets(&self) -> impl Iterator<Item = i64> {
        let l = self.l as i64;
        (-l + 1)..l
    }

    /// Instant of sample `l` of symbol `k`, offset removed.
    pub fn instant(&self, k: i64, l: i64) -> f64 {
        k as f64 + l as f64 / self.l as f64
    }
}

/// Transmit pulse `Σ_v γ_v sinc(t − v/L)`, `v = −L+1 … L−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSpec {
    l: usize,
    gammas: Vec<f64>,
}

impl PulseSpec {
    /// Checks the dimension and unit energy `γᵀΘγ = 1` (within 1e-10).
    pub fn new(l: usize, gammas: Vec<f64>) -> Result<Self> {
        check_factor(l)?;
        if gammas.len() != 2 * l - 1 {
            return Err(Error::Dimension {
                expected: 2 * l - 1,
                got: gammas.len(),
            });
        }
        if gammas.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidSpec("non-finite pulse coefficient".into()));
        }
        let energy = theta_matrix(l)?.quad_form(&gammas);
        if (energy - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidSpec(format!(
                "pulse energy γᵀΘγ = {energy} is not 1"
            )));
        }
        Ok(Self { l, gammas })
    }

    /// The plain sinc pulse: `γ₀ = 1`, all others zero.
    pub fn sinc(l: usize) -> Result<Self> {
        check_factor(l)?;
        let mut gammas = vec![0.0; 2 * l - 1];
        gammas[l - 1] = 1.0;
        Ok(Self { l, gammas })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// Pulse value at `t` (symbol intervals).
    pub fn eval(&self, t: f64) -> f64 {
        let lf = self.l as f64;
        self.gammas
            .iter()
            .enumerate()
            .map(|(i, g)| g * sinc(t - sample_offset(i, self.l) as f64 / lf))
            .sum()
    }
}

/// `Θ = [sinc((l − u)/L)]`, dimension `2L − 1`.
pub fn theta_matrix(l: usize) -> Result<SymMatrix> {
    check_factor(l)?;
    let lf = l as f64;
    Ok(SymMatrix::from_fn(2 * l - 1, |i, j| {
        sinc((i as f64 - j as f64) / lf)
    }))
}

/// `Ω₀ = [arcsin sinc((l − u)/L)]`, without the `2/π` factor.
pub fn omega0_matrix(l: usize) -> Result<SymMatrix> {
    Ok(theta_matrix(l)?.map(|r| r.clamp(-1.0, 1.0).asin()))
}

/// `b₀ = [sinc(l/L)]`.
pub fn b0_vector(l: usize) -> Result<Vec<f64>> {
    check_factor(l)?;
    let lf = l as f64;
    Ok((0..2 * l - 1)
        .map(|i| sinc(sample_offset(i, l) as f64 / lf))
        .collect())
}

/// Correlations entering the super-Nyquist GMI.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSet {
    pub l: usize,
    pub snr: f64,
    pub es: f64,
    /// `E[x₀ w_{0,l}]`.
    pub b: Vec<f64>,
    /// `E[w_{0,u} w_{0,l}] = (2/π) arcsin r_{u,l}`.
    pub omega: SymMatrix,
    /// Sample correlation coefficients `r_{u,l}` of `y`.
    pub r: SymMatrix,
    /// `Θγ`, the pulse sampled at the window offsets.
    pub b0: Vec<f64>,
    pub omega0: SymMatrix,
    pub theta: SymMatrix,
}

fn snr_fraction(snr: f64) -> f64 {
    if snr.is_infinite() {
        1.0
    } else {
        snr / (snr + 1.0)
    }
}

fn check_snr(snr: f64) -> Result<()> {
    if !(snr >= 0.0) {
        return Err(Error::Domain(format!("snr must be nonnegative, got {snr}")));
    }
    Ok(())
}

/// `b` and `Ω` for a general pulse.
///
/// The pulse correlations reduce to sinc values because the shifted sinc
/// functions satisfy `∫ sinc(t − a/L) sinc(t − b/L) dt = sinc((a − b)/L)`.
pub fn general_correlations(pulse: &PulseSpec, snr: f64, es: f64) -> Result<CorrelationSet> {
    check_snr(snr)?;
    if !(es > 0.0 && es.is_finite()) {
        return Err(Error::InvalidConfig(format!("es must be positive, got {es}")));
    }
    let l = pulse.l;
    let n = 2 * l - 1;
    let lf = l as f64;
    let theta = theta_matrix(l)?;
    let g = &pulse.gammas;
    let c = theta.mul_vec(g);

    // S(d) = Σ_{a,b} γ_a γ_b sinc((d − a + b)/L), d = l − u ∈ [−2L+2, 2L−2]
    let span = 2 * n - 1;
    let s: Vec<f64> = (0..span)
        .map(|k| {
            let d = k as f64 - (n as f64 - 1.0);
            let mut acc = 0.0;
            for (a, ga) in g.iter().enumerate() {
                if *ga == 0.0 {
                    continue;
                }
                for (b, gb) in g.iter().enumerate() {
                    acc += ga * gb * sinc((d - a as f64 + b as f64) / lf);
                }
            }
            acc
        })
        .collect();

    let frac = snr_fraction(snr);
    let mut worst: f64 = 0.0;
    let r = SymMatrix::from_fn(n, |i, j| {
        if i == j {
            return 1.0;
        }
        let d = i as f64 - j as f64;
        let k = (d + n as f64 - 1.0) as usize;
        let noise = sinc(d / lf);
        let v = if snr.is_infinite() {
            s[k]
        } else {
            (snr * s[k] + noise) / (snr + 1.0)
        };
        worst = worst.max(v.abs());
        v
    });
    if worst > 1.0 + 1e-12 {
        return Err(Error::NumericConsistency(format!(
            "sample correlation {worst} exceeds 1"
        )));
    }
    let omega = r.map(|v| 2.0 / PI * v.clamp(-1.0, 1.0).asin());
    let scale = (2.0 * es / PI).sqrt() * frac.sqrt();
    let b = c.iter().map(|ci| scale * ci).collect();
    Ok(CorrelationSet {
        l,
        snr,
        es,
        b,
        omega,
        r,
        b0: c,
        omega0: omega0_matrix(l)?,
        theta,
    })
}

/// GMI and the weights `β = (E_s / bᵀΩ⁻¹b) Ω⁻¹b` from a correlation set.
pub fn supernyq_gmi(cs: &CorrelationSet) -> Result<(GmiResult, Vec<f64>)> {
    let n = cs.b.len();
    if cs.b.iter().all(|b| *b == 0.0) {
        let beta = vec![0.0; n];
        return Ok((
            GmiResult::from_delta(0.0, DecoderScaling::Weights(beta.clone()), 1)?,
            beta,
        ));
    }
    let x = solve_spd(&cs.omega, &cs.b)?;
    let q = dot(&cs.b, &x);
    let beta: Vec<f64> = x.iter().map(|v| cs.es / q * v).collect();
    let res = GmiResult::from_delta(q / cs.es, DecoderScaling::Weights(beta.clone()), 1)?;
    Ok((res, beta))
}

/// `b₀ᵀΩ₀⁻¹b₀` and `Ω₀⁻¹b₀` for the sinc pulse.
fn sinc_quadratic(l: usize) -> Result<(f64, Vec<f64>)> {
    let b0 = b0_vector(l)?;
    let x = solve_spd(&omega0_matrix(l)?, &b0)?;
    Ok((dot(&b0, &x), x))
}

/// GMI of the sinc pulse at `snr = E_s/(σ²/2)`; `Δ = SNR/(SNR+1) · b₀ᵀΩ₀⁻¹b₀`.
///
/// Weights are for unit symbol energy; they scale as `√E_s`.
pub fn sinc_pulse_gmi(l: usize, snr: f64) -> Result<GmiResult> {
    check_snr(snr)?;
    let (qf, x) = sinc_quadratic(l)?;
    let frac = snr_fraction(snr);
    let beta = if frac > 0.0 {
        let s = (PI / 2.0).sqrt() / (frac.sqrt() * qf);
        x.iter().map(|v| s * v).collect()
    } else {
        vec![0.0; x.len()]
    };
    GmiResult::from_delta(frac * qf, DecoderScaling::Weights(beta), 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SincAsymptotics {
    pub quadratic_form: f64,
    /// `½ log₂(1/(1 − qf))`.
    pub high_snr_bits: f64,
    /// `lim GMI/SNR = qf/2` nats.
    pub low_snr_slope: f64,
}

pub fn sinc_asymptotics(l: usize) -> Result<SincAsymptotics> {
    let (qf, _) = sinc_quadratic(l)?;
    Ok(SincAsymptotics {
        quadratic_form: qf,
        high_snr_bits: -0.5 * (-qf).ln_1p() / std::f64::consts::LN_2,
        low_snr_slope: qf / 2.0,
    })
}

/// Unit-energy pulse maximizing the low-SNR slope, and that slope.
///
/// The slope of a pulse is `γᵀΘΩ₀⁻¹Θγ / 2` under `γᵀΘγ = 1`, maximized by the
/// top eigenvector of `Θ^{1/2}Ω₀⁻¹Θ^{1/2}`. `Θ` is close to singular for
/// large `L`, so its square roots discard eigenvalues below `1e-12·λ_max`.
pub fn optimize_pulse_low_snr(l: usize) -> Result<(PulseSpec, f64)> {
    check_factor(l)?;
    if l < 2 {
        return Err(Error::Domain("pulse optimization needs L ≥ 2".into()));
    }
    let n = 2 * l - 1;
    let theta = theta_matrix(l)?;
    let omega0 = omega0_matrix(l)?;
    let te = sym_eig(&theta)?;
    let floor = 1e-12 * te.values[0];
    let half = spectral_map(&te, |v| if v > floor { v.sqrt() } else { 0.0 });
    let inv_half = spectral_map(&te, |v| if v > floor { 1.0 / v.sqrt() } else { 0.0 });

    // Ω₀⁻¹ Θ^{1/2}, column by column
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let col: Vec<f64> = (0..n).map(|i| half.get(i, j)).collect();
            solve_spd(&omega0, &col)
        })
        .collect::<Result<_>>()?;
    let m = SymMatrix::from_fn(n, |i, j| {
        let hi: Vec<f64> = (0..n).map(|k| half.get(i, k)).collect();
        let hj: Vec<f64> = (0..n).map(|k| half.get(j, k)).collect();
        0.5 * (dot(&hi, &cols[j]) + dot(&hj, &cols[i]))
    });
    let me = sym_eig(&m)?;
    let lambda = me.values[0];
    let mut gamma = inv_half.mul_vec(&me.vectors[0]);
    let energy = theta.quad_form(&gamma);
    let norm = energy.sqrt();
    // orient so the centre coefficient is nonnegative
    let sign = if gamma[l - 1] < 0.0 { -1.0 } else { 1.0 };
    for g in gamma.iter_mut() {
        *g *= sign / norm;
    }
    let pulse = PulseSpec::new(l, gamma)?;
    Ok((pulse, lambda / 2.0))
}

/// Convention in which a user-facing SNR value is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrConvention {
    /// `E_s/σ²` with `σ²/2` the noise PSD (and per-sample noise variance).
    Nyquist,
    /// `E_s/(σ²/2)`, the native parameter of this module.
    Supernyq,
}

impl SnrConvention {
    /// Converts a linear SNR in this convention to `E_s/(σ²/2)`.
    pub fn to_supernyq(self, snr: f64) -> f64 {
        match self {
            SnrConvention::Nyquist => 2.0 * snr,
            SnrConvention::Supernyq => snr,
        }
    }
}

/// Monte-Carlo budget for [`antipodal_l2_binary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McParams {
    pub isi_window: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for McParams {
    fn default() -> Self {
        Self {
            isi_window: DEFAULT_ISI_WINDOW,
            samples: 1_000_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntipodalL2 {
    pub beta: f64,
    /// `Pr[w₋ = w₊ = 1]`.
    pub eta: f64,
    pub eta_stderr: f64,
    /// `Pr[w = 1 | x₀ = +√E_s]`.
    pub kappa: f64,
    pub kappa_stderr: f64,
    /// `tanh(2√E_s β) − (2κ−1)/(2η)`.
    pub residual: f64,
    /// `E[x₀ β(w₋+w₊)] − E ln cosh(√E_s β(w₋+w₊))` at the estimates.
    pub gmi_nats: f64,
}

const MC_CHUNK: usize = 4096;

/// Antipodal input, sinc pulse, `L = 2`, one-bit samples.
///
/// The two samples are the outer pair of the three-sample window, at
/// `±1/2` symbol from the symbol centre; their noise is independent since
/// `sinc(1) = 0`, and by symmetry they share one weight `β`. `config.sigma2`
/// is the per-sample noise variance. Neighbouring symbols within
/// `isi_window` on each side interfere.
pub fn antipodal_l2_binary(config: &ChannelConfig, mc: &McParams) -> Result<AntipodalL2> {
    if mc.samples < 2 {
        return Err(Error::InvalidConfig("need at least two samples".into()));
    }
    let w = mc.isi_window as i64;
    let amp = config.es.sqrt();
    let sd = config.sigma2.sqrt();
    // gains of symbol k on the samples at −1/2 and +1/2
    let h_minus: Vec<f64> = (-w..=w).map(|k| amp * sinc(-0.5 - k as f64)).collect();
    let h_plus: Vec<f64> = (-w..=w).map(|k| amp * sinc(0.5 - k as f64)).collect();
    let centre = mc.isi_window;

    let chunks = mc.samples.div_ceil(MC_CHUNK);
    // per chunk: (agree count, κ half-units, Σ κ_i² in quarter-units)
    let counts: Vec<(u64, u64, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = Stream::new(mc.seed, c as u64);
            let len = MC_CHUNK.min(mc.samples - c * MC_CHUNK);
            let mut signs = vec![0.0; h_minus.len()];
            let (mut agree, mut khalf, mut ksq) = (0u64, 0u64, 0u64);
            for _ in 0..len {
                for s in signs.iter_mut() {
                    *s = rng.sign();
                }
                let ym: f64 = dot(&signs, &h_minus) + sd * rng.normal();
                let yp: f64 = dot(&signs, &h_plus) + sd * rng.normal();
                // sgn(0) = +1
                let wm = ym >= 0.0;
                let wp = yp >= 0.0;
                if wm == wp {
                    agree += 1;
                }
                let x0 = signs[centre] > 0.0;
                let hits = (wm == x0) as u64 + (wp == x0) as u64;
                khalf += hits;
                ksq += hits * hits;
            }
            (agree, khalf, ksq)
        })
        .collect();
    let (agree, khalf, ksq) = counts
        .iter()
        .fold((0u64, 0u64, 0u64), |a, c| (a.0 + c.0, a.1 + c.1, a.2 + c.2));
    let nf = mc.samples as f64;
    // Pr[(1,1)] = Pr[(−1,−1)] by symmetry
    let p_agree = agree as f64 / nf;
    let eta = 0.5 * p_agree;
    let eta_stderr = 0.5 * (p_agree * (1.0 - p_agree) / (nf - 1.0)).sqrt();
    let kappa = 0.5 * khalf as f64 / nf;
    let k2 = 0.25 * ksq as f64 / nf;
    let kappa_stderr = ((k2 - kappa * kappa).max(0.0) * nf / (nf - 1.0) / nf).sqrt();

    let rhs = (2.0 * kappa - 1.0) / (2.0 * eta);
    if config.es == 0.0 {
        return Ok(AntipodalL2 {
            beta: 0.0,
            eta,
            eta_stderr,
            kappa,
            kappa_stderr,
            residual: -rhs,
            gmi_nats: 0.0,
        });
    }
    let num = 2.0 * (eta + kappa) - 1.0;
    let den = 2.0 * (eta - kappa) + 1.0;
    if !(num > 0.0 && den > 0.0) {
        return Err(Error::Domain(format!(
            "log argument not positive: 2(η+κ)−1 = {num:e}, 2(η−κ)+1 = {den:e} \
             (η = {eta}, κ = {kappa}, samples = {})",
            mc.samples
        )));
    }
    let beta = (num / den).ln() / (4.0 * amp);
    let u = 2.0 * amp * beta;
    let residual = u.tanh() - rhs;
    let gmi_nats = u * (2.0 * kappa - 1.0) - 2.0 * eta * crate::numerics::special::ln_cosh(u);
    Ok(AntipodalL2 {
        beta,
        eta,
        eta_stderr,
        kappa,
        kappa_stderr,
        residual,
        gmi_nats,
    })
}

//! GMI of a Gaussian codebook under nearest-neighbor decoding, for
//! memoryless distortions on either side of the noise.
//!
//! Everything reduces to two moments of the observation `w = f(x, z)`:
//! `E[w x]` and `E[w²]`. With `Δ = E[w x]² / (E_s E[w²])` the GMI is
//! `½ ln(1 + Δ/(1 − Δ))` nats per real channel use.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::numerics::quadrature::{normal_expectation_piecewise, QuadratureRule};
use crate::numerics::special::{norm_pdf, q_function};
use crate::quantizer::QuantizerSpec;
use crate::{Error, Result};

/// Symbol energy and noise variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub es: f64,
    pub sigma2: f64,
}

impl ChannelConfig {
    pub fn new(es: f64, sigma2: f64) -> Result<Self> {
        if !(es > 0.0 && es.is_finite()) {
            return Err(Error::InvalidConfig(format!("es must be positive, got {es}")));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sigma2 must be positive, got {sigma2}"
            )));
        }
        Ok(Self { es, sigma2 })
    }

    /// Unit noise variance at the given linear SNR.
    pub fn from_snr(snr: f64) -> Result<Self> {
        Self::new(snr, 1.0)
    }

    pub fn snr(&self) -> f64 {
        self.es / self.sigma2
    }

    /// `E_s + σ²`, the variance of `x + z`.
    pub fn total_energy(&self) -> f64 {
        self.es + self.sigma2
    }
}

pub type ScalarMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A pointwise map with the points where it jumps or kinks.
#[derive(Clone)]
pub struct Memoryless {
    pub name: String,
    pub map: ScalarMap,
    pub breakpoints: Vec<f64>,
}

impl Memoryless {
    pub fn new(
        name: impl Into<String>,
        breakpoints: Vec<f64>,
        map: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            map: Arc::new(map),
            breakpoints,
        }
    }

    #[inline]
    pub fn apply(&self, v: f64) -> f64 {
        (self.map)(v)
    }
}

impl fmt::Debug for Memoryless {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Memoryless")
            .field("name", &self.name)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

/// Where the nonlinearity sits relative to the additive noise.
#[derive(Debug, Clone)]
pub enum DistortionModel {
    /// `w = f_o(x + z)`
    OutputSide(Memoryless),
    /// `w = f_i(x) + z`
    InputSide(Memoryless),
    /// `w = f_o(f_i(x) + z)`
    Composed { input: Memoryless, output: Memoryless },
}

fn sgn(y: f64) -> f64 {
    if y >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

impl DistortionModel {
    pub fn identity() -> Self {
        Self::OutputSide(Memoryless::new("identity", vec![], |y| y))
    }

    /// One-bit quantizer `sgn(x + z)`.
    pub fn hard_limiter() -> Self {
        Self::OutputSide(Memoryless::new("sgn", vec![0.0], sgn))
    }

    /// Symmetric clipping of `x + z` to `[−level, level]`.
    pub fn clipper(level: f64) -> Self {
        Self::OutputSide(Memoryless::new(
            format!("clip({level})"),
            vec![-level, level],
            move |y| y.clamp(-level, level),
        ))
    }

    /// `(x + z)³`
    pub fn cubic() -> Self {
        Self::OutputSide(Memoryless::new("cube", vec![], |y| y * y * y))
    }

    /// Symmetric multi-level quantizer applied to `x + z`.
    pub fn quantizer(spec: &QuantizerSpec) -> Self {
        let alphas: Vec<f64> = spec.finite_thresholds().to_vec();
        let rs = spec.rs().to_vec();
        let mut bps: Vec<f64> = alphas.iter().flat_map(|a| [-a, *a]).collect();
        bps.push(0.0);
        let name = format!("quantizer(M={})", spec.m());
        Self::OutputSide(Memoryless::new(name, bps, move |y| {
            let mag = y.abs();
            let cell = alphas.partition_point(|a| *a <= mag);
            sgn(y) * rs[cell]
        }))
    }

    /// Transmit-side nonlinearity followed by additive noise.
    pub fn input_side(
        name: impl Into<String>,
        breakpoints: Vec<f64>,
        map: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::InputSide(Memoryless::new(name, breakpoints, map))
    }

    pub fn composed(input: Memoryless, output: Memoryless) -> Self {
        Self::Composed { input, output }
    }

    /// `f(x, z)`.
    #[inline]
    pub fn eval(&self, x: f64, z: f64) -> f64 {
        match self {
            Self::OutputSide(o) => o.apply(x + z),
            Self::InputSide(i) => i.apply(x) + z,
            Self::Composed { input, output } => output.apply(input.apply(x) + z),
        }
    }

    /// The signal level entering the noise adder for input `x`.
    #[inline]
    fn pre_noise(&self, x: f64) -> f64 {
        match self {
            Self::OutputSide(_) => x,
            Self::InputSide(i) => i.apply(x),
            Self::Composed { input, .. } => input.apply(x),
        }
    }

    #[inline]
    fn post_noise(&self, y: f64) -> f64 {
        match self {
            Self::OutputSide(o) => o.apply(y),
            Self::InputSide(_) => y,
            Self::Composed { output, .. } => output.apply(y),
        }
    }

    fn post_breakpoints(&self) -> &[f64] {
        match self {
            Self::OutputSide(o) => &o.breakpoints,
            Self::InputSide(_) => &[],
            Self::Composed { output, .. } => &output.breakpoints,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::OutputSide(o) => o.name.clone(),
            Self::InputSide(i) => format!("{}+noise", i.name),
            Self::Composed { input, output } => format!("{}({}+noise)", output.name, input.name),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// `E[f(x,z)·x]` and `E[f(x,z)²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionMoments {
    pub corr: f64,
    pub power: f64,
    pub provenance: Provenance,
}

impl DistortionMoments {
    /// Checks `power ≥ 0` and the Cauchy-Schwarz bound `corr² ≤ E_s·power`
    /// (with relative slack 1e-9 for rounding).
    pub fn new(corr: f64, power: f64, provenance: Provenance, es: f64) -> Result<Self> {
        if !corr.is_finite() || !power.is_finite() {
            return Err(Error::Evaluation(format!(
                "non-finite moments corr={corr} power={power}"
            )));
        }
        if power < 0.0 {
            return Err(Error::Domain(format!("negative output power {power}")));
        }
        if corr * corr > es * power * (1.0 + 1e-9) {
            return Err(Error::NumericConsistency(format!(
                "corr² = {} exceeds es·power = {}",
                corr * corr,
                es * power
            )));
        }
        Ok(Self {
            corr,
            power,
            provenance,
        })
    }
}

/// How the decoder scales codewords.
#[derive(Debug, Clone, PartialEq)]
pub enum DecoderScaling {
    Real(f64),
    Complex { magnitude: f64, phase: f64 },
    /// Linear combining weights over several observations per symbol.
    Weights(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmiResult {
    pub delta: f64,
    pub snr_e: f64,
    pub gmi_nats: f64,
    pub gmi_bits: f64,
    pub a_opt: DecoderScaling,
    /// Set when `Δ = 1`: noiseless and undistorted, so the rate is unbounded.
    pub infinite: bool,
}

impl GmiResult {
    /// Builds the result from `Δ`. `dims` is 1 for real channels and 2 for
    /// complex ones (the GMI is `dims/2 · ln(1 + snr_e)`).
    pub fn from_delta(delta: f64, a_opt: DecoderScaling, dims: u32) -> Result<Self> {
        if !(delta >= 0.0) || delta > 1.0 + 1e-9 {
            return Err(Error::NumericConsistency(format!("Δ = {delta} outside [0, 1]")));
        }
        let delta = delta.min(1.0);
        let half = 0.5 * dims as f64;
        if delta >= 1.0 {
            return Ok(Self {
                delta,
                snr_e: f64::INFINITY,
                gmi_nats: f64::INFINITY,
                gmi_bits: f64::INFINITY,
                a_opt,
                infinite: true,
            });
        }
        let snr_e = delta / (1.0 - delta);
        // ln(1 + Δ/(1−Δ)) = −ln(1−Δ)
        let gmi_nats = -half * (-delta).ln_1p();
        Ok(Self {
            delta,
            snr_e,
            gmi_nats,
            gmi_bits: gmi_nats / std::f64::consts::LN_2,
            a_opt,
            infinite: false,
        })
    }

    pub fn a_real(&self) -> Option<f64> {
        match self.a_opt {
            DecoderScaling::Real(a) => Some(a),
            _ => None,
        }
    }
}

pub fn gmi_from_moments(m: &DistortionMoments, config: &ChannelConfig) -> Result<GmiResult> {
    if m.power == 0.0 {
        return Err(Error::DegenerateDistortion);
    }
    let delta = m.corr * m.corr / (config.es * m.power);
    GmiResult::from_delta(delta, DecoderScaling::Real(m.corr / config.es), 1)
}

/// GMI when the distortion acts before the noise: `w = f_i(x) + z`.
///
/// The returned scaling `E[x f_i(x)]/E_s` is the Bussgang gain, so
/// `f_i(x) − a_opt·x` is uncorrelated with `x`.
pub fn transmit_side_gmi(fi_corr: f64, fi_power: f64, config: &ChannelConfig) -> Result<GmiResult> {
    let m = DistortionMoments::new(fi_corr, fi_power, Provenance::ClosedForm, config.es)?;
    let delta = m.corr * m.corr / (config.es * (m.power + config.sigma2));
    GmiResult::from_delta(delta, DecoderScaling::Real(fi_corr / config.es), 1)
}

/// Complex channel with circularly symmetric input and noise. `corr` is
/// `E[conj(f)·x]`, `es` and `sigma2` are the complex variances.
pub fn complex_gmi_from_moments(
    corr: Complex64,
    power: f64,
    config: &ChannelConfig,
) -> Result<GmiResult> {
    if power == 0.0 {
        return Err(Error::DegenerateDistortion);
    }
    let c2 = corr.norm_sqr();
    if c2 > config.es * power * (1.0 + 1e-9) {
        return Err(Error::NumericConsistency(format!(
            "|corr|² = {c2} exceeds es·power = {}",
            config.es * power
        )));
    }
    let delta = c2 / (config.es * power);
    let scaling = DecoderScaling::Complex {
        magnitude: corr.norm() / config.es,
        phase: if c2 == 0.0 { 0.0 } else { -corr.arg() },
    };
    GmiResult::from_delta(delta, scaling, 2)
}

fn finite_or(v: f64, what: &str, at: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation(format!("{what} returned {v} at {at}")))
    }
}

/// Moments by Gauss-Hermite quadrature with the given (Hermite) rule.
///
/// Output-side maps need only a 1-D rule over `y ~ N(0, E_s+σ²)`, using
/// `E[x | y] = y·E_s/(E_s+σ²)` for the correlation. Input-side maps reduce
/// exactly to 1-D over `x` since the noise is additive and independent.
/// Composed maps use the tensor rule over `(x, z)`.
///
/// The rule assumes a smooth integrand. For maps with jumps the error
/// decays only like a power of the order; [`moments_by_panels`] handles
/// those exactly up to rounding.
pub fn moments_by_quadrature(
    model: &DistortionModel,
    config: &ChannelConfig,
    rule: &QuadratureRule,
) -> Result<DistortionMoments> {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let (corr, power) = match model {
        DistortionModel::OutputSide(o) => {
            let e = config.total_energy();
            let s = (2.0 * e).sqrt();
            let (mut c, mut p) = (0.0, 0.0);
            for (u, w) in rule.iter() {
                let y = s * u;
                let f = finite_or(o.apply(y), &o.name, y)?;
                c += w * y * f;
                p += w * f * f;
            }
            (c / sqrt_pi * config.es / e, p / sqrt_pi)
        }
        DistortionModel::InputSide(i) => {
            let s = (2.0 * config.es).sqrt();
            let (mut c, mut p) = (0.0, 0.0);
            for (u, w) in rule.iter() {
                let x = s * u;
                let f = finite_or(i.apply(x), &i.name, x)?;
                c += w * x * f;
                p += w * f * f;
            }
            (c / sqrt_pi, p / sqrt_pi + config.sigma2)
        }
        DistortionModel::Composed { .. } => {
            let sx = (2.0 * config.es).sqrt();
            let sz = (2.0 * config.sigma2).sqrt();
            let (mut c, mut p) = (0.0, 0.0);
            for (u, wu) in rule.iter() {
                let x = sx * u;
                for (v, wv) in rule.iter() {
                    let f = finite_or(model.eval(x, sz * v), "composed map", x)?;
                    c += wu * wv * x * f;
                    p += wu * wv * f * f;
                }
            }
            (c / std::f64::consts::PI, p / std::f64::consts::PI)
        }
    };
    DistortionMoments::new(corr, power, Provenance::Quadrature, config.es)
}

/// Moments by breakpoint-aware panel quadrature (Gauss-Legendre panels
/// split at the map's declared jumps).
pub fn moments_by_panels(model: &DistortionModel, config: &ChannelConfig) -> Result<DistortionMoments> {
    let (corr, power) = match model {
        DistortionModel::OutputSide(o) => {
            let e = config.total_energy();
            let sd = e.sqrt();
            let c = normal_expectation_piecewise(0.0, sd, &o.breakpoints, |y| y * o.apply(y));
            let p = normal_expectation_piecewise(0.0, sd, &o.breakpoints, |y| o.apply(y).powi(2));
            (c * config.es / e, p)
        }
        DistortionModel::InputSide(i) => {
            let sd = config.es.sqrt();
            let c = normal_expectation_piecewise(0.0, sd, &i.breakpoints, |x| x * i.apply(x));
            let p = normal_expectation_piecewise(0.0, sd, &i.breakpoints, |x| i.apply(x).powi(2));
            (c, p + config.sigma2)
        }
        DistortionModel::Composed { input, output } => {
            let sx = config.es.sqrt();
            let sz = config.sigma2.sqrt();
            let inner = |x: f64, g: &dyn Fn(f64) -> f64| {
                let m = input.apply(x);
                normal_expectation_piecewise(m, sz, &output.breakpoints, |y| g(output.apply(y)))
            };
            let c = normal_expectation_piecewise(0.0, sx, &input.breakpoints, |x| {
                x * inner(x, &|f| f)
            });
            let p = normal_expectation_piecewise(0.0, sx, &input.breakpoints, |x| {
                inner(x, &|f| f * f)
            });
            (c, p)
        }
    };
    if !corr.is_finite() || !power.is_finite() {
        return Err(Error::Evaluation(format!("{} produced non-finite moments", model.name())));
    }
    DistortionMoments::new(corr, power, Provenance::Quadrature, config.es)
}

/// Closed-form moments of symmetric clipping at `level` applied to `x + z`.
pub fn clipper_moments(level: f64, config: &ChannelConfig) -> Result<DistortionMoments> {
    if !(level > 0.0) {
        return Err(Error::Domain(format!("clip level must be positive, got {level}")));
    }
    let e = config.total_energy();
    let c = level / e.sqrt();
    let q = q_function(c);
    // E[y·clip(y)] = E·(1 − 2Q(c)); the boundary terms cancel
    let corr = config.es * (1.0 - 2.0 * q);
    let power = e * (1.0 - 2.0 * q - 2.0 * c * norm_pdf(c)) + 2.0 * level * level * q;
    DistortionMoments::new(corr, power, Provenance::ClosedForm, config.es)
}

/// Conditional expectation of `g(w)` given `x`, with `z ~ N(0, σ²)`.
fn cond_expect(model: &DistortionModel, x: f64, sd: f64, g: impl Fn(f64) -> f64) -> f64 {
    let m = model.pre_noise(x);
    normal_expectation_piecewise(m, sd, model.post_breakpoints(), |y| g(model.post_noise(y)))
}

/// GMI with equiprobable antipodal inputs `±√E_s`, the supremum over `t`
/// of `t·E[x w] − E ln cosh(t √E_s w)`. Returns `(gmi_nats, t_opt)`.
///
/// The stationarity condition `E[√E_s w tanh(t √E_s w)] = E[x w]` has a
/// left side increasing in `t`, so it is bracketed by doubling from
/// `1/√(E_s E[w²])` and then bisected.
pub fn antipodal_gmi(model: &DistortionModel, config: &ChannelConfig) -> Result<(f64, f64)> {
    let rs = config.es.sqrt();
    let sd = config.sigma2.sqrt();
    let both = |g: &dyn Fn(f64) -> f64| 0.5 * (cond_expect(model, rs, sd, g) + cond_expect(model, -rs, sd, g));

    let a = 0.5 * rs * (cond_expect(model, rs, sd, |w| w) - cond_expect(model, -rs, sd, |w| w));
    let power = both(&|w| w * w);
    if !a.is_finite() || !power.is_finite() {
        return Err(Error::Evaluation(format!("{} produced non-finite moments", model.name())));
    }
    if power == 0.0 || a == 0.0 {
        return Ok((0.0, 0.0));
    }
    let dir = a.signum();
    let target = a.abs();
    let lhs = |t: f64| both(&|w| rs * w * dir * (t * rs * w * dir).tanh());
    let t0 = 1.0 / (config.es * power).sqrt();
    let t_cap = 1e3 * t0;

    let mut hi = t0;
    let mut lo = 0.0;
    while lhs(hi) < target {
        lo = hi;
        hi *= 2.0;
        if hi > t_cap {
            return Err(Error::Convergence {
                what: "antipodal t bracket".into(),
                best_point: vec![dir * lo],
                best_value: dir * lo * a - both(&|w| crate::numerics::special::ln_cosh(lo * rs * w)),
            });
        }
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = dir * 0.5 * (lo + hi);
    let gmi = t * a - both(&|w| crate::numerics::special::ln_cosh(t * rs * w));
    Ok((gmi, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::gauss_hermite;
    use crate::numerics::special::{binary_entropy_bits, ln_cosh};
    use proptest::prelude::*;
    use std::f64::consts::{LN_2, PI};

    fn cfg(es: f64, s2: f64) -> ChannelConfig {
        ChannelConfig::new(es, s2).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(ChannelConfig::new(0.0, 1.0).is_err());
        assert!(ChannelConfig::new(1.0, -1.0).is_err());
        let c = cfg(3.0, 0.5);
        assert_eq!(c.snr(), 6.0);
    }

    #[test]
    fn undistorted_half_bit() {
        let c = cfg(1.0, 1.0);
        let m = DistortionMoments::new(1.0, 2.0, Provenance::ClosedForm, 1.0).unwrap();
        let r = gmi_from_moments(&m, &c).unwrap();
        assert!((r.delta - 0.5).abs() < 1e-15);
        assert!((r.snr_e - 1.0).abs() < 1e-15);
        assert!((r.gmi_bits - 0.5).abs() < 1e-15);
        assert_eq!(r.a_real(), Some(1.0));
    }

    #[test]
    fn binary_high_snr_limit() {
        let c = cfg(1e12, 1.0);
        let corr = c.es * (2.0 / (PI * c.total_energy())).sqrt();
        let m = DistortionMoments::new(corr, 1.0, Provenance::ClosedForm, c.es).unwrap();
        let r = gmi_from_moments(&m, &c).unwrap();
        assert!((r.delta - 2.0 / PI).abs() < 1e-9);
        assert!((r.gmi_bits - 0.7302).abs() < 5e-5);
    }

    #[test]
    fn degenerate_and_infinite() {
        let c = cfg(1.0, 1.0);
        let m = DistortionMoments::new(0.0, 0.0, Provenance::ClosedForm, 1.0).unwrap();
        assert_eq!(gmi_from_moments(&m, &c), Err(Error::DegenerateDistortion));
        let m = DistortionMoments::new(1.0, 1.0, Provenance::ClosedForm, 1.0).unwrap();
        let r = gmi_from_moments(&m, &c).unwrap();
        assert!(r.infinite && r.snr_e.is_infinite());
        assert!(DistortionMoments::new(2.0, 1.0, Provenance::ClosedForm, 1.0).is_err());
    }

    #[test]
    fn transmit_side_cases() {
        let c = cfg(2.0, 1.0);
        let r = transmit_side_gmi(2.0, 2.0, &c).unwrap();
        assert!((r.gmi_nats - 0.5 * 3f64.ln()).abs() < 1e-15);

        // hard limiter at the transmitter: f_i(x) = √E_s sgn(x)
        let corr = (2.0 * c.es / PI).sqrt() * c.es.sqrt();
        let r = transmit_side_gmi(corr, c.es, &c).unwrap();
        let delta = (2.0 / PI) * c.es / (c.es + c.sigma2);
        assert!((r.delta - delta).abs() < 1e-15);

        // scaled identity
        let k = 1.7;
        let r = transmit_side_gmi(k * c.es, k * k * c.es, &c).unwrap();
        assert!((r.a_real().unwrap() - k).abs() < 1e-15);
        let snr = k * k * c.es / c.sigma2;
        assert!((r.gmi_nats - 0.5 * (1.0 + snr).ln()).abs() < 1e-14);
    }

    #[test]
    fn transmit_side_bussgang_residual() {
        let c = cfg(1.3, 0.4);
        let rule = gauss_hermite(64).unwrap();
        let model = DistortionModel::input_side("tanh", vec![], |x: f64| x.tanh());
        let m = moments_by_quadrature(&model, &c, &rule).unwrap();
        let r = transmit_side_gmi(m.corr, m.power - c.sigma2, &c).unwrap();
        let a = r.a_real().unwrap();
        let s = (2.0 * c.es).sqrt();
        let resid: f64 = rule
            .iter()
            .map(|(u, w)| w * s * u * ((s * u).tanh() - a * s * u))
            .sum::<f64>()
            / PI.sqrt();
        assert!(resid.abs() < 1e-12);
    }

    #[test]
    fn complex_cases() {
        let c = cfg(1.0, 1.0);
        let r = complex_gmi_from_moments(Complex64::new(1.0, 0.0), 2.0, &c).unwrap();
        assert!((r.gmi_bits - 1.0).abs() < 1e-15);

        let phi = 0.9;
        let corr = Complex64::from_polar(1.0, -phi);
        let r2 = complex_gmi_from_moments(corr, 2.0, &c).unwrap();
        assert!((r2.gmi_bits - 1.0).abs() < 1e-15);
        match r2.a_opt {
            DecoderScaling::Complex { magnitude, phase } => {
                assert!((magnitude - 1.0).abs() < 1e-15);
                assert!((phase - phi).abs() < 1e-15);
            }
            _ => panic!("expected complex scaling"),
        }

        // real model embedded as complex: twice the real GMI at the
        // per-dimension SNR
        let c_re = cfg(0.7, 0.3);
        let rule = gauss_hermite(64).unwrap();
        let m = moments_by_quadrature(&DistortionModel::clipper(0.8), &c_re, &rule).unwrap();
        let real = gmi_from_moments(&m, &c_re).unwrap();
        let c_cx = cfg(2.0 * c_re.es, 2.0 * c_re.sigma2);
        let cx = complex_gmi_from_moments(Complex64::new(2.0 * m.corr, 0.0), 2.0 * m.power, &c_cx).unwrap();
        assert!((cx.gmi_nats - 2.0 * real.gmi_nats).abs() < 1e-14);
    }

    #[test]
    fn quadrature_identity_and_sgn() {
        let c = cfg(1.5, 0.5);
        let rule = gauss_hermite(64).unwrap();
        let m = moments_by_quadrature(&DistortionModel::identity(), &c, &rule).unwrap();
        assert!((m.corr - 1.5).abs() < 1e-12 && (m.power - 2.0).abs() < 1e-12);

        let exact = c.es * (2.0 / (PI * c.total_energy())).sqrt();
        let m = moments_by_quadrature(&DistortionModel::hard_limiter(), &c, &rule).unwrap();
        // Hermite rules see E|y| as a kink at the origin: the relative error
        // is about 0.41/order, so it halves as the order doubles
        let err64 = (m.corr - exact).abs() / exact;
        assert!(err64 < 1e-2, "{} vs {exact}", m.corr);
        assert!((m.power - 1.0).abs() < 1e-12);
        let m = moments_by_quadrature(&DistortionModel::hard_limiter(), &c, &gauss_hermite(128).unwrap()).unwrap();
        let err128 = (m.corr - exact).abs() / exact;
        assert!(err128 < 0.6 * err64);
        let m = moments_by_panels(&DistortionModel::hard_limiter(), &c).unwrap();
        assert!((m.corr - exact).abs() < 1e-13);
    }

    #[test]
    fn quadrature_cubic_vs_isserlis() {
        // E_s = σ² = 1, y = x + z ~ N(0, 2): E[x y³] = 3·Var(y)·E[xy] = 6,
        // E[y⁶] = 15·Var(y)³ = 120
        let c = cfg(1.0, 1.0);
        let rule = gauss_hermite(64).unwrap();
        let m = moments_by_quadrature(&DistortionModel::cubic(), &c, &rule).unwrap();
        assert!((m.corr - 6.0).abs() < 1e-10);
        assert!((m.power - 120.0).abs() < 1e-9);
    }

    #[test]
    fn composed_tensor_rule_matches_output_side() {
        let c = cfg(0.8, 0.6);
        let rule = gauss_hermite(40).unwrap();
        let id = Memoryless::new("id", vec![], |x| x);
        let cube = Memoryless::new("cube", vec![], |y: f64| y * y * y);
        let a = moments_by_quadrature(&DistortionModel::composed(id, cube), &c, &rule).unwrap();
        let b = moments_by_quadrature(&DistortionModel::cubic(), &c, &rule).unwrap();
        assert!((a.corr - b.corr).abs() < 1e-10 && (a.power - b.power).abs() < 1e-10);
    }

    #[test]
    fn clipper_closed_form_vs_panels() {
        for (es, s2, lvl) in [(1.0, 1.0, 0.5), (3.0, 0.2, 1.7), (0.1, 2.0, 4.0)] {
            let c = cfg(es, s2);
            let a = clipper_moments(lvl, &c).unwrap();
            let b = moments_by_panels(&DistortionModel::clipper(lvl), &c).unwrap();
            assert!((a.corr - b.corr).abs() < 1e-12 * es.max(1.0));
            assert!((a.power - b.power).abs() < 1e-12 * (es + s2));
        }
    }

    #[test]
    fn output_scaling_invariance() {
        let c = cfg(1.2, 0.9);
        let rule = gauss_hermite(64).unwrap();
        let base = gmi_from_moments(
            &moments_by_quadrature(&DistortionModel::clipper(1.0), &c, &rule).unwrap(),
            &c,
        )
        .unwrap();
        for k in [0.01, 0.5, 3.0, 1e3] {
            let model = DistortionModel::OutputSide(Memoryless::new("scaled", vec![], move |y: f64| {
                k * y.clamp(-1.0, 1.0)
            }));
            let r = gmi_from_moments(&moments_by_quadrature(&model, &c, &rule).unwrap(), &c).unwrap();
            assert!((r.gmi_nats - base.gmi_nats).abs() < 1e-9);
        }
    }

    #[test]
    fn antipodal_identity_vs_t_grid() {
        let c = cfg(1.0, 1.0);
        let model = DistortionModel::identity();
        let (gmi, t) = antipodal_gmi(&model, &c).unwrap();
        let objective = |t: f64| {
            let f = |x: f64| {
                normal_expectation_piecewise(x, 1.0, &[], |w| ln_cosh(t * w))
            };
            t * 1.0 - 0.5 * (f(1.0) + f(-1.0))
        };
        let best = (1..20000)
            .map(|i| objective(i as f64 * 1e-4))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((gmi - best).abs() < 1e-8, "{gmi} vs {best}");
        assert!((objective(t) - gmi).abs() < 1e-12);
        assert!(gmi < LN_2 && gmi < 0.5 * 2f64.ln());
    }

    #[test]
    fn antipodal_degenerate_and_sgn() {
        let c = cfg(1.0, 1.0);
        let zero = DistortionModel::OutputSide(Memoryless::new("zero", vec![], |_| 0.0));
        assert_eq!(antipodal_gmi(&zero, &c).unwrap(), (0.0, 0.0));

        for snr in [0.1, 1.0, 4.0] {
            let c = cfg(snr, 1.0);
            let (g, _) = antipodal_gmi(&DistortionModel::hard_limiter(), &c).unwrap();
            let bsc = LN_2 * (1.0 - binary_entropy_bits(q_function(snr.sqrt())));
            assert!((g - bsc).abs() < 1e-11, "snr {snr}: {g} vs {bsc}");
        }
    }

    proptest! {
        #[test]
        fn delta_in_unit_interval_and_monotone(
            es in 0.01f64..100.0, s2 in 0.01f64..100.0, lvl in 0.05f64..5.0
        ) {
            let c = cfg(es, s2);
            let m = clipper_moments(lvl, &c).unwrap();
            let r = gmi_from_moments(&m, &c).unwrap();
            prop_assert!(r.delta >= 0.0 && r.delta <= 1.0);
            prop_assert!((r.snr_e - r.delta / (1.0 - r.delta)).abs() <= 1e-12 * r.snr_e.max(1.0));
            prop_assert!((r.gmi_bits - r.gmi_nats / LN_2).abs() < 1e-15);
            let bigger = GmiResult::from_delta((r.delta + 1e-3).min(0.999_999), DecoderScaling::Real(1.0), 1).unwrap();
            prop_assert!(bigger.gmi_nats > r.gmi_nats);
        }

        #[test]
        fn complex_phase_invariance(mag in 0.0f64..0.99, phi in -3.1f64..3.1) {
            let c = cfg(1.0, 1.0);
            let a = complex_gmi_from_moments(Complex64::new(mag, 0.0), 1.0, &c).unwrap();
            let b = complex_gmi_from_moments(Complex64::from_polar(mag, phi), 1.0, &c).unwrap();
            // from_polar rounds each component once
            prop_assert!((a.delta - b.delta).abs() < 1e-15);
            prop_assert!((a.gmi_nats - b.gmi_nats).abs() < 1e-13);
        }
    }
}

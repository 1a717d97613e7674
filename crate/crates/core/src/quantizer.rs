//! Symmetric output quantization: closed-form moments, the K-factor design
//! theory, quantizer optimization, SNR asymptotics, capacity per unit cost,
//! and antipodal-input mutual information.
//!
//! A 2M-level symmetric quantizer maps `y` to `r_i·sgn(y)` when
//! `|y| ∈ [α_{i−1}, α_i)`, with `α₀ = 0` and `α_M = ∞`. In the t-domain,
//! `t_i = exp(−α_i² / (2E))` with `E = E_s + σ²`, and
//! `Δ = E_s K / (π E)`.

use std::f64::consts::{LN_2, PI};

use crate::gmi::{ChannelConfig, DecoderScaling, DistortionMoments, GmiResult, Provenance};
use crate::numerics::optimize::{maximize_scalar, maximize_vector, VectorOptions};
use crate::numerics::special::{binary_entropy_bits, q_diff, q_function, t_to_normalized_threshold};
use crate::{Error, Result};

/// A threshold on the α scale. The outermost one is always infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Finite(f64),
    Infinite,
}

/// 2M-level symmetric quantizer in signal units.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerSpec {
    /// α₁ … α_{M−1}; α₀ = 0 and α_M = ∞ are implicit.
    alphas: Vec<f64>,
    rs: Vec<f64>,
}

impl QuantizerSpec {
    /// `interior_alphas` are α₁ … α_{M−1}, `rs` are r₁ … r_M.
    pub fn new(interior_alphas: Vec<f64>, rs: Vec<f64>) -> Result<Self> {
        if rs.len() != interior_alphas.len() + 1 {
            return Err(Error::InvalidSpec(format!(
                "{} levels need {} interior thresholds, got {}",
                rs.len(),
                rs.len().saturating_sub(1),
                interior_alphas.len()
            )));
        }
        let mut prev = 0.0;
        for (i, a) in interior_alphas.iter().enumerate() {
            if !a.is_finite() || *a <= prev {
                return Err(Error::InvalidSpec(format!(
                    "threshold α_{} = {a} must be finite and exceed {prev}",
                    i + 1
                )));
            }
            prev = *a;
        }
        if rs.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidSpec("levels must be finite and nonnegative".into()));
        }
        Ok(Self {
            alphas: interior_alphas,
            rs,
        })
    }

    /// The one-bit quantizer `sgn(y)`.
    pub fn binary() -> Self {
        Self {
            alphas: vec![],
            rs: vec![1.0],
        }
    }

    /// Builds a quantizer from a t-domain design and levels.
    pub fn from_t(ts: &TDomainSpec, rs: Vec<f64>) -> Result<Self> {
        Self::new(alpha_from_t(ts), rs)
    }

    pub fn m(&self) -> usize {
        self.rs.len()
    }

    pub fn finite_thresholds(&self) -> &[f64] {
        &self.alphas
    }

    pub fn rs(&self) -> &[f64] {
        &self.rs
    }

    /// α_i for `0 ≤ i ≤ M`.
    pub fn alpha(&self, i: usize) -> Threshold {
        match i {
            0 => Threshold::Finite(0.0),
            i if i == self.m() => Threshold::Infinite,
            i => Threshold::Finite(self.alphas[i - 1]),
        }
    }

    /// Lower and upper edge of cell `i` (1-based) scaled by `1/scale`;
    /// the upper edge of the last cell is `+∞`.
    fn cell_edges(&self, i: usize, scale: f64) -> (f64, f64) {
        let lo = if i == 1 { 0.0 } else { self.alphas[i - 2] / scale };
        let hi = if i == self.m() {
            f64::INFINITY
        } else {
            self.alphas[i - 1] / scale
        };
        (lo, hi)
    }
}

/// Thresholds in the t-domain: `1 = t₀ > t₁ > … > t_M = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TDomainSpec {
    ts: Vec<f64>,
    pub reference_energy: f64,
}

impl TDomainSpec {
    /// `interior` holds t₁ … t_{M−1}.
    pub fn new(interior: Vec<f64>, reference_energy: f64) -> Result<Self> {
        if !(reference_energy > 0.0 && reference_energy.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "reference energy must be positive, got {reference_energy}"
            )));
        }
        let mut prev = 1.0;
        for (i, t) in interior.iter().enumerate() {
            if !(*t < prev && *t > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "t_{} = {t} breaks 1 > t₁ > … > 0",
                    i + 1
                )));
            }
            prev = *t;
        }
        Ok(Self {
            ts: interior,
            reference_energy,
        })
    }

    /// Builds without the strict-order check; cells may be empty.
    fn new_unchecked(interior: Vec<f64>, reference_energy: f64) -> Self {
        Self {
            ts: interior,
            reference_energy,
        }
    }

    /// `t_i = (M − i)/M`.
    pub fn uniform(m: usize, reference_energy: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidSpec("M must be at least 1".into()));
        }
        Self::new(
            (1..m).map(|i| (m - i) as f64 / m as f64).collect(),
            reference_energy,
        )
    }

    pub fn m(&self) -> usize {
        self.ts.len() + 1
    }

    pub fn interior(&self) -> &[f64] {
        &self.ts
    }

    /// t_i for `0 ≤ i ≤ M`.
    pub fn t(&self, i: usize) -> f64 {
        match i {
            0 => 1.0,
            i if i == self.m() => 0.0,
            i => self.ts[i - 1],
        }
    }
}

/// Per-cell `(t_{i−1} − t_i, Q̃(t_{i−1}) − Q̃(t_i))`.
fn cells(ts: &TDomainSpec) -> Result<Vec<(f64, f64)>> {
    (1..=ts.m())
        .map(|i| {
            let (hi, lo) = (ts.t(i - 1), ts.t(i));
            let d = hi - lo;
            let q = q_diff(t_to_normalized_threshold(hi), t_to_normalized_threshold(lo));
            if !(d > 0.0) || !(q > 0.0) {
                Err(Error::DegenerateCell(i))
            } else {
                Ok((d, q))
            }
        })
        .collect()
}

/// The SNR-free design constant of a symmetric quantizer.
#[derive(Debug, Clone, PartialEq)]
pub struct KFactor {
    pub value: f64,
    pub design: Option<TDomainSpec>,
    /// Reconstruction levels; `None` means the optimal ones for `design`.
    pub rs: Option<Vec<f64>>,
}

impl KFactor {
    /// A bare K value in `(0, π]`.
    pub fn from_value(value: f64) -> Result<Self> {
        if !(value > 0.0 && value <= PI * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!("K = {value} outside (0, π]")));
        }
        Ok(Self {
            value: value.min(PI),
            design: None,
            rs: None,
        })
    }
}

pub fn t_from_alpha(spec: &QuantizerSpec, reference_energy: f64) -> Result<TDomainSpec> {
    if !(reference_energy > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "reference energy must be positive, got {reference_energy}"
        )));
    }
    let ts = spec
        .alphas
        .iter()
        .map(|a| (-a * a / (2.0 * reference_energy)).exp())
        .collect();
    Ok(TDomainSpec::new_unchecked(ts, reference_energy))
}

/// Interior thresholds `α_i = √(−2E ln t_i)`.
pub fn alpha_from_t(ts: &TDomainSpec) -> Vec<f64> {
    let s = ts.reference_energy.sqrt();
    ts.ts.iter().map(|t| s * t_to_normalized_threshold(*t)).collect()
}

/// Closed-form `E[w x]` and `E[w²]` for the quantizer applied to `x + z`.
pub fn quantizer_moments(spec: &QuantizerSpec, config: &ChannelConfig) -> Result<DistortionMoments> {
    let e = config.total_energy();
    let s = e.sqrt();
    let mut power = 0.0;
    let mut corr_sum = 0.0;
    for i in 1..=spec.m() {
        let (lo, hi) = spec.cell_edges(i, s);
        let r = spec.rs[i - 1];
        power += r * r * q_diff(lo, hi);
        let t_hi = (-0.5 * lo * lo).exp();
        let t_lo = if hi.is_infinite() { 0.0 } else { (-0.5 * hi * hi).exp() };
        corr_sum += r * (t_hi - t_lo);
    }
    let corr = config.es * (2.0 / (PI * e)).sqrt() * corr_sum;
    DistortionMoments::new(corr, 2.0 * power, Provenance::ClosedForm, config.es)
}

/// `K_{r,t} = [Σ r_i d_i]² / Σ r_i² q_i` with `d_i = t_{i−1} − t_i` and
/// `q_i = Q̃(t_{i−1}) − Q̃(t_i)`.
pub fn k_factor(rs: &[f64], ts: &TDomainSpec) -> Result<KFactor> {
    if rs.len() != ts.m() {
        return Err(Error::Dimension {
            expected: ts.m(),
            got: rs.len(),
        });
    }
    if rs.iter().all(|r| *r == 0.0) {
        return Err(Error::InvalidSpec("all reconstruction levels are zero".into()));
    }
    let cs = cells(ts)?;
    let num: f64 = rs.iter().zip(&cs).map(|(r, (d, _))| r * d).sum();
    let den: f64 = rs.iter().zip(&cs).map(|(r, (_, q))| r * r * q).sum();
    Ok(KFactor {
        value: num * num / den,
        design: Some(ts.clone()),
        rs: Some(rs.to_vec()),
    })
}

/// Levels maximizing `K_{r,t}` for fixed thresholds: `r_i = d_i / q_i`.
///
/// Any positive multiple gives the same K. With this normalization the
/// common factor `Σ r_j² q_j / Σ r_j d_j` equals one, so the levels are a
/// fixed point of the stationarity condition as written.
pub fn optimal_reconstructions(ts: &TDomainSpec) -> Result<Vec<f64>> {
    Ok(cells(ts)?.into_iter().map(|(d, q)| d / q).collect())
}

/// `K_t = Σ d_i² / q_i`, the K-factor at optimal levels.
pub fn k_of_t(ts: &TDomainSpec) -> Result<KFactor> {
    let value = cells(ts)?.into_iter().map(|(d, q)| d * d / q).sum();
    Ok(KFactor {
        value,
        design: Some(ts.clone()),
        rs: None,
    })
}

/// GMI of a quantizer with factor K at the given channel.
///
/// The decoder scaling is `√(2/(πE)) Σ r_i d_i`; when the levels are not
/// given the optimal ones `r = d/q` are assumed, for which `Σ r_i d_i = K`.
pub fn gmi_at_snr(k: &KFactor, config: &ChannelConfig) -> Result<GmiResult> {
    if !(k.value > 0.0 && k.value <= PI * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("K = {} outside (0, π]", k.value)));
    }
    let e = config.total_energy();
    let delta = config.es * k.value.min(PI) / (PI * e);
    let rd = match (&k.rs, &k.design) {
        (Some(rs), Some(ts)) => cells(ts)?.iter().zip(rs).map(|((d, _), r)| r * d).sum(),
        _ => k.value,
    };
    let a = (2.0 / (PI * e)).sqrt() * rd;
    GmiResult::from_delta(delta, DecoderScaling::Real(a), 1)
}

/// High- and low-SNR expansions of the quantized GMI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptotics {
    /// `½ log₂(π/(π−K))`
    pub high_snr_limit_bits: f64,
    /// Coefficient of `1/SNR` at high SNR, nats: `−K/(2(π−K))`
    pub high_snr_first_order_nats: f64,
    /// `lim GMI/SNR = K/(2π)` nats
    pub low_snr_slope_nats: f64,
    /// Coefficient of `SNR²` at low SNR, nats: `−K(π−K/2)/(2π²)`
    pub low_snr_second_order_nats: f64,
    /// Set for `K = π`, where the high-SNR limit diverges.
    pub infinite_limit: bool,
}

pub fn asymptotics(k: &KFactor) -> Asymptotics {
    let kv = k.value;
    let infinite = kv >= PI;
    let (hi, hi1) = if infinite {
        (f64::INFINITY, f64::NEG_INFINITY)
    } else {
        (
            0.5 * (PI / (PI - kv)).log2(),
            -kv / (2.0 * (PI - kv)),
        )
    };
    Asymptotics {
        high_snr_limit_bits: hi,
        high_snr_first_order_nats: hi1,
        low_snr_slope_nats: kv / (2.0 * PI),
        low_snr_second_order_nats: -kv * (PI - kv / 2.0) / (2.0 * PI * PI),
        infinite_limit: infinite,
    }
}

fn uniform_design(m: usize, alpha: f64) -> TDomainSpec {
    let ts = (1..m).map(|i| (-((i * i) as f64) * alpha).exp()).collect();
    TDomainSpec::new_unchecked(ts, 1.0)
}

/// `K_t` for uniform thresholds `α_i = i √(2Eα)`, i.e. `t_i = e^{−i²α}`.
pub fn uniform_k(m: usize, alpha: f64) -> Result<KFactor> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("α must be positive, got {alpha}")));
    }
    // the i-th cell on the normalized scale is [(i−1)√(2α), i√(2α))
    let step = (2.0 * alpha).sqrt();
    let mut value = 0.0;
    for i in 1..=m {
        let lo = (i - 1) as f64 * step;
        let t_hi = (-(((i - 1) * (i - 1)) as f64) * alpha).exp();
        let (t_lo, q) = if i == m {
            (0.0, q_function(lo))
        } else {
            ((-((i * i) as f64) * alpha).exp(), q_diff(lo, i as f64 * step))
        };
        if !(q > 0.0) {
            return Err(Error::DegenerateCell(i));
        }
        value += (t_hi - t_lo).powi(2) / q;
    }
    Ok(KFactor {
        value,
        design: Some(uniform_design(m, alpha)),
        rs: None,
    })
}

/// Maximizes the uniform-quantizer K over α. Returns `(α, K)`.
pub fn optimize_uniform(m: usize, tol: f64) -> Result<(f64, KFactor)> {
    if m < 2 {
        return Err(Error::InvalidSpec(format!("uniform design needs M ≥ 2, got {m}")));
    }
    let f = |la: f64| uniform_k(m, la.exp()).map(|k| k.value).unwrap_or(f64::NEG_INFINITY);
    // coarse scan over ln α, then Brent inside the best bracket
    let (lo, hi, n) = (-12.0f64, 2.0f64, 400usize);
    let h = (hi - lo) / n as f64;
    let best = (0..=n)
        .map(|i| lo + i as f64 * h)
        .max_by(|a, b| f(*a).partial_cmp(&f(*b)).expect("finite scan"))
        .expect("nonempty scan");
    let (la, _) = maximize_scalar(f, (best - h, best + h), tol * 1e-2)?;
    let alpha = la.exp();
    Ok((alpha, uniform_k(m, alpha)?))
}

/// `K_t` for `t_i = (M − i)/M`.
pub fn t_uniform_k(m: usize) -> Result<KFactor> {
    k_of_t(&TDomainSpec::uniform(m, 1.0)?)
}

fn logistic(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// `t_i = t_{i−1}·σ(u_i)`: any real `u` gives a strictly ordered design.
fn t_from_unconstrained(u: &[f64]) -> Vec<f64> {
    let mut t = 1.0;
    u.iter()
        .map(|ui| {
            t *= logistic(*ui);
            t
        })
        .collect()
}

fn unconstrained_from_t(ts: &[f64]) -> Vec<f64> {
    let mut prev = 1.0;
    ts.iter()
        .map(|t| {
            let ratio = t / prev;
            prev = *t;
            (ratio / (1.0 - ratio)).ln()
        })
        .collect()
}

/// Larger designs are optimized by cyclic coordinate ascent instead of the
/// simplex search, which stalls in high dimension.
const SIMPLEX_MAX_M: usize = 12;

/// `d²/q` of the cell `[t_lo, t_hi)`, or −∞ when it is empty.
fn cell_term(t_hi: f64, t_lo: f64) -> f64 {
    let d = t_hi - t_lo;
    let q = q_diff(t_to_normalized_threshold(t_hi), t_to_normalized_threshold(t_lo));
    if d > 0.0 && q > 0.0 {
        d * d / q
    } else {
        f64::NEG_INFINITY
    }
}

/// Each `t_i` enters only its two neighbouring cells, so one coordinate
/// step is a 1-D maximization over `(t_{i+1}, t_{i−1})`.
fn coordinate_ascent(mut ts: Vec<f64>, tol: f64) -> Result<Vec<f64>> {
    let n = ts.len();
    for _ in 0..50_000 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let hi = if i == 0 { 1.0 } else { ts[i - 1] };
            let lo = if i + 1 < n { ts[i + 1] } else { 0.0 };
            let f = |t: f64| cell_term(hi, t) + cell_term(t, lo);
            let pad = 1e-12 * (hi - lo);
            let (t, v) = maximize_scalar(f, (lo + pad, hi - pad), tol * 1e-2)?;
            if v > f(ts[i]) {
                moved = moved.max((t - ts[i]).abs());
                ts[i] = t;
            }
        }
        if moved < tol {
            return Ok(ts);
        }
    }
    let value = k_of_t(&TDomainSpec::new_unchecked(ts.clone(), 1.0)).map_or(f64::NAN, |k| k.value);
    Err(Error::Convergence {
        what: "coordinate ascent over t".into(),
        best_point: ts,
        best_value: value,
    })
}

/// Maximizes `K_t` over ordered designs, starting from the t-uniform
/// design with seeded multi-start. Returns the design and its K.
pub fn optimize_t(m: usize, tol: f64) -> Result<(TDomainSpec, KFactor)> {
    optimize_t_seeded(m, tol, VectorOptions::default().seed)
}

pub fn optimize_t_seeded(m: usize, tol: f64, seed: u64) -> Result<(TDomainSpec, KFactor)> {
    if m < 2 {
        return Err(Error::InvalidSpec(format!("optimal design needs M ≥ 2, got {m}")));
    }
    if m > SIMPLEX_MAX_M {
        let ts = coordinate_ascent(TDomainSpec::uniform(m, 1.0)?.interior().to_vec(), tol)?;
        let ts = TDomainSpec::new(ts, 1.0)?;
        let k = k_of_t(&ts)?;
        return Ok((ts, k));
    }
    let objective = |u: &[f64]| {
        let ts = TDomainSpec::new_unchecked(t_from_unconstrained(u), 1.0);
        k_of_t(&ts).map(|k| k.value).unwrap_or(f64::NEG_INFINITY)
    };
    let start = unconstrained_from_t(TDomainSpec::uniform(m, 1.0)?.interior());
    let opts = VectorOptions {
        arg_tol: tol,
        seed,
        ..VectorOptions::default()
    };
    let (u, _) = maximize_vector(objective, &start, &opts)?;
    let ts = TDomainSpec::new(t_from_unconstrained(&u), 1.0)?;
    let k = k_of_t(&ts)?;
    Ok((ts, k))
}

/// GMI of the one-bit quantizer: `Δ = 2E_s / (π(E_s + σ²))`.
pub fn binary_gmi(config: &ChannelConfig) -> GmiResult {
    let e = config.total_energy();
    let delta = 2.0 * config.es / (PI * e);
    GmiResult::from_delta(delta, DecoderScaling::Real((2.0 / (PI * e)).sqrt()), 1)
        .expect("Δ < 2/π is always valid")
}

/// Capacity of the one-bit output channel, `1 − H₂(Q(√SNR))` bits.
pub fn binary_capacity(config: &ChannelConfig) -> f64 {
    1.0 - binary_entropy_bits(q_function(config.snr().sqrt()))
}

/// `(1+u) ln(1+u) − u`, accurate for small `|u|`.
fn kl_kernel(u: f64) -> f64 {
    if u <= -1.0 {
        // the cell carries no mass under P_x
        return 1.0;
    }
    if u.abs() < 1e-2 {
        // Σ_{k≥2} (−1)^k u^k / (k(k−1))
        let mut s = 0.0;
        let mut p = u * u;
        for k in 2..14 {
            let kf = k as f64;
            s += p / (kf * (kf - 1.0));
            p *= -u;
        }
        s
    } else {
        (1.0 + u) * u.ln_1p() - u
    }
}

/// Divergence per unit energy for input `x` at unit noise variance:
/// `D(P_x ‖ P_0) / x²` over the 2M output cells.
pub fn cpuc_objective(spec: &QuantizerSpec, x: f64) -> f64 {
    let mut total = 0.0;
    for i in 1..=spec.m() {
        let (lo, hi) = spec.cell_edges(i, 1.0);
        let p0 = q_diff(lo, hi);
        if p0 <= 0.0 {
            continue;
        }
        // P − P0 for the cells on the side of x and the opposite side
        let shift = |s: f64| {
            let lo_part = q_diff(lo - s, lo);
            let hi_part = if hi.is_infinite() { 0.0 } else { q_diff(hi - s, hi) };
            lo_part - hi_part
        };
        for s in [x, -x] {
            total += p0 * kl_kernel(shift(s) / p0);
        }
    }
    total / (x * x)
}

/// Result of the capacity-per-unit-cost evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpucResult {
    /// Largest value found over `x ∈ [1e-4, 10]` and the `x → 0` limit
    /// (a lower bound on the supremum).
    pub sup_value: f64,
    /// Maximizer; zero when the limit point wins.
    pub x_star: f64,
    /// Extrapolated `x → 0` limit.
    pub zero_limit: f64,
}

/// `x → 0` limit of [`cpuc_objective`] by polynomial extrapolation in `x²`
/// through `x ∈ {1e-2, 1e-3, 1e-4}`.
pub fn cpuc_zero_limit(spec: &QuantizerSpec) -> f64 {
    let xs = [1e-2f64, 1e-3, 1e-4];
    let h: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let f: Vec<f64> = xs.iter().map(|x| cpuc_objective(spec, *x)).collect();
    // Lagrange interpolation at h = 0
    (0..3)
        .map(|i| {
            let w: f64 = (0..3)
                .filter(|j| *j != i)
                .map(|j| h[j] / (h[j] - h[i]))
                .product();
            w * f[i]
        })
        .sum()
}

/// Capacity per unit cost of the quantized channel at unit noise variance.
pub fn capacity_per_unit_cost(spec: &QuantizerSpec) -> Result<CpucResult> {
    let n = 200;
    let (lx0, lx1) = (1e-4f64.ln(), 10f64.ln());
    let h = (lx1 - lx0) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| lx0 + i as f64 * h).collect();
    let vals: Vec<f64> = grid.iter().map(|l| cpuc_objective(spec, l.exp())).collect();
    let (ib, _) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite objective"))
        .expect("nonempty grid");
    let lo = grid[ib.saturating_sub(1)];
    let hi = grid[(ib + 1).min(n - 1)];
    let (mut x_star, mut sup) = (grid[ib].exp(), vals[ib]);
    if hi > lo {
        let (l, v) = maximize_scalar(|l| cpuc_objective(spec, l.exp()), (lo, hi), 1e-9)?;
        if v > sup {
            sup = v;
            x_star = l.exp();
        }
    }
    let zero_limit = cpuc_zero_limit(spec);
    if zero_limit > sup {
        sup = zero_limit;
        x_star = 0.0;
    }
    Ok(CpucResult {
        sup_value: sup,
        x_star,
        zero_limit,
    })
}

/// Antipodal-input GMI of a quantizer together with the levels achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct AntipodalQuantizerGmi {
    pub gmi_nats: f64,
    /// `r_i = ln(p_i⁺ / p_i⁻)`
    pub optimal_rs: Vec<f64>,
    /// Set when a cell probability underflowed and was clamped to 1e-300
    /// in the level computation.
    pub clamped: bool,
}

/// Cell probabilities `(p_i⁺, p_i⁻)` given `x = +√E_s`.
pub fn antipodal_cell_probs(spec: &QuantizerSpec, config: &ChannelConfig) -> Vec<(f64, f64)> {
    let s = config.sigma2.sqrt();
    let rs = config.es.sqrt();
    (1..=spec.m())
        .map(|i| {
            let (lo, hi) = spec.cell_edges(i, 1.0);
            let p = |shift: f64| {
                let a = (lo - shift) / s;
                let b = if hi.is_infinite() { f64::INFINITY } else { (hi - shift) / s };
                q_diff(a, b)
            };
            (p(rs), p(-rs))
        })
        .collect()
}

/// With antipodal inputs and log-likelihood-ratio levels, nearest-neighbor
/// decoding is maximum likelihood and the GMI equals `I(x; w)`.
pub fn antipodal_quantizer_gmi(spec: &QuantizerSpec, config: &ChannelConfig) -> AntipodalQuantizerGmi {
    let xlogx = |p: f64| if p > 0.0 { p * p.ln() } else { 0.0 };
    let probs = antipodal_cell_probs(spec, config);
    let mut sum = 0.0;
    let mut clamped = false;
    let mut levels = Vec::with_capacity(probs.len());
    for (pp, pm) in probs {
        sum += xlogx(pp + pm) - xlogx(pp) - xlogx(pm);
        let (a, b) = (pp.max(1e-300), pm.max(1e-300));
        clamped |= pp < 1e-300 || pm < 1e-300;
        levels.push((a / b).ln());
    }
    AntipodalQuantizerGmi {
        gmi_nats: LN_2 - sum,
        optimal_rs: levels,
        clamped,
    }
}

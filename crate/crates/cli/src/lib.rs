//! Command-line front end: argument definitions and the five commands.
//!
//! Every command returns an [`OutputRecord`]; `main` renders it as CSV or
//! JSON. Exit codes: 0 success, 2 usage, 3 numeric failure, 4 resource cap.

pub mod grid;
pub mod record;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gmi_core::gmi::{ChannelConfig, DistortionModel};
use gmi_core::numerics::special::t_to_normalized_threshold;
use gmi_core::quantizer::{
    asymptotics, binary_capacity, binary_gmi, gmi_at_snr, optimal_reconstructions, optimize_t,
    optimize_uniform, t_uniform_k, KFactor, QuantizerSpec, TDomainSpec,
};
use gmi_core::simlab::{run_nn_decoding, DecodeMode, SimChannel, SimConfig};
use gmi_core::supernyq::{
    general_correlations, optimize_pulse_low_snr, sinc_asymptotics, sinc_pulse_gmi, supernyq_gmi,
    PulseSpec, SnrConvention, DEFAULT_ISI_WINDOW, MAX_FACTOR,
};

use crate::grid::{db_to_linear, parse_grid};
use crate::record::{Cell, OutputRecord};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(gmi_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use gmi_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::ResourceCap(_)) => 4,
            CliError::Core(E::InvalidConfig(_) | E::InvalidSpec(_) | E::Dimension { .. }) => 2,
            CliError::Core(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<gmi_core::Error> for CliError {
    fn from(e: gmi_core::Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "gmi", version, about = "GMI of Gaussian channels under transceiver distortion")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for simulations.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Argument tolerance for optimizers.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One-bit symmetric quantization: GMI and capacity over an SNR grid.
    Binary(BinaryArgs),
    /// Multi-bit symmetric quantizer design, asymptotics and GMI sweep.
    Quantizer(QuantizerArgs),
    /// Super-Nyquist sampling with one-bit outputs.
    Supernyq(SupernyqArgs),
    /// Random-codebook nearest-neighbor decoding at a fraction of the GMI.
    Simulate(SimulateArgs),
    /// Regenerate one of the design tables (1-5).
    Table(TableArgs),
}

/// SNR in dB or linear, each as `lo:hi:step`, a comma list or one value.
#[derive(Debug, Clone, Args)]
pub struct SnrArgs {
    /// SNR in dB: `lo:hi:step` (inclusive), `a,b,c` or a single value
    #[arg(long, allow_hyphen_values = true, conflicts_with = "snr")]
    pub snr_db: Option<String>,
    /// Linear SNR, same grid syntax
    #[arg(long, allow_hyphen_values = true)]
    pub snr: Option<String>,
}

impl SnrArgs {
    /// `(dB, linear)` pairs, or `None` when no SNR was given.
    fn points(&self) -> Result<Option<Vec<(f64, f64)>>> {
        if let Some(s) = &self.snr_db {
            return Ok(Some(
                parse_grid(s)?
                    .into_iter()
                    .map(|d| (d, db_to_linear(d)))
                    .collect(),
            ));
        }
        if let Some(s) = &self.snr {
            let pts = parse_grid(s)?;
            if pts.iter().any(|v| *v < 0.0) {
                return Err(CliError::Usage("linear SNR must be nonnegative".into()));
            }
            return Ok(Some(
                pts.into_iter().map(|v| (grid::linear_to_db(v), v)).collect(),
            ));
        }
        Ok(None)
    }

    fn describe(&self) -> String {
        match (&self.snr_db, &self.snr) {
            (Some(d), _) => format!("{d} dB"),
            (_, Some(l)) => format!("{l} linear"),
            _ => "none".into(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BinaryArgs {
    #[command(flatten)]
    pub snr: SnrArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantizerMode {
    Uniform,
    TUniform,
    Optimal,
}

#[derive(Debug, Clone, Args)]
pub struct QuantizerArgs {
    #[arg(long, value_enum)]
    pub mode: QuantizerMode,
    /// Number of positive cells (2M levels in total).
    #[arg(long)]
    pub m: usize,
    #[command(flatten)]
    pub snr: SnrArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PulseKind {
    Sinc,
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    /// `E_s/σ²`, with `σ²/2` the noise PSD.
    Nyquist,
    /// `E_s/(σ²/2)`, per-sample SNR.
    Supernyq,
}

impl From<Convention> for SnrConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Nyquist => SnrConvention::Nyquist,
            Convention::Supernyq => SnrConvention::Supernyq,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SupernyqArgs {
    #[arg(long, value_enum, default_value_t = PulseKind::Sinc)]
    pub pulse: PulseKind,
    /// Oversampling factor L.
    #[arg(long)]
    pub l: usize,
    #[command(flatten)]
    pub snr: SnrArgs,
    #[arg(long, value_enum, default_value_t = Convention::Supernyq)]
    pub snr_convention: Convention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Binary,
    Quantizer,
    Clipper,
    Supernyq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecoderKind {
    Auto,
    Explicit,
    Conditional,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Cells of the optimal quantizer (quantizer model).
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    /// Clipping level relative to `√E_s` (clipper model).
    #[arg(long, default_value_t = 1.0)]
    pub clip_level: f64,
    /// Oversampling factor (supernyq model).
    #[arg(long, default_value_t = 2)]
    pub l: usize,
    #[arg(long, value_enum, default_value_t = PulseKind::Sinc)]
    pub pulse: PulseKind,
    /// One SNR value. Memoryless models use `E_s/σ²` per channel use; the
    /// supernyq model reads it in `--snr-convention`.
    #[command(flatten)]
    pub snr: SnrArgs,
    #[arg(long, value_enum, default_value_t = Convention::Supernyq)]
    pub snr_convention: Convention,
    /// Block lengths, comma separated.
    #[arg(long, default_value = "512")]
    pub n: String,
    #[arg(long, default_value_t = 0.8)]
    pub rate_fraction: f64,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = DecoderKind::Auto)]
    pub decoder: DecoderKind,
    #[arg(long, default_value_t = DEFAULT_ISI_WINDOW)]
    pub isi_window: usize,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    /// 1 uniform, 2 t-uniform, 3 optimal quantizers; 4 sinc, 5 optimal pulse
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub id: u8,
}

/// Runs the parsed command.
pub fn run(cli: &Cli) -> Result<OutputRecord> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", cli.tol)));
    }
    match &cli.command {
        Command::Binary(a) => cmd_binary(a),
        Command::Quantizer(a) => cmd_quantizer(a, cli.tol),
        Command::Supernyq(a) => cmd_supernyq(a),
        Command::Simulate(a) => cmd_simulate(a, cli.seed, cli.tol),
        Command::Table(a) => cmd_table(a.id, cli.tol),
    }
}

/// Renders `record` in the requested format; `args` is echoed as metadata.
pub fn render(cli: &Cli, record: &OutputRecord, args: &[String]) -> String {
    match cli.format {
        Format::Csv => record.to_csv(args),
        Format::Json => record.to_json(args),
    }
}

fn channel(snr: f64) -> Result<ChannelConfig> {
    Ok(ChannelConfig::from_snr(snr)?)
}

pub fn cmd_binary(a: &BinaryArgs) -> Result<OutputRecord> {
    let pts = match a.snr.points()? {
        Some(p) => p,
        None => parse_grid("-20:20:0.5")?
            .into_iter()
            .map(|d| (d, db_to_linear(d)))
            .collect(),
    };
    let mut rec = OutputRecord::new(
        "binary",
        &["snr_db", "snr", "gmi_nats", "gmi_bits", "capacity_bits"],
    );
    rec.param(
        "snr",
        if a.snr.snr_db.is_none() && a.snr.snr.is_none() {
            "-20:20:0.5 dB".into()
        } else {
            a.snr.describe()
        },
    );
    for (db, s) in pts {
        let cfg = channel(s)?;
        let g = binary_gmi(&cfg);
        rec.push(vec![
            db.into(),
            s.into(),
            g.gmi_nats.into(),
            g.gmi_bits.into(),
            binary_capacity(&cfg).into(),
        ]);
    }
    Ok(rec)
}

fn quantizer_design(mode: QuantizerMode, m: usize, tol: f64) -> Result<(TDomainSpec, KFactor, Option<f64>)> {
    Ok(match mode {
        QuantizerMode::Uniform => {
            let (alpha, k) = optimize_uniform(m, tol)?;
            let ts = k.design.clone().expect("uniform design carries thresholds");
            (ts, k, Some(alpha))
        }
        QuantizerMode::TUniform => (TDomainSpec::uniform(m, 1.0)?, t_uniform_k(m)?, None),
        QuantizerMode::Optimal => {
            let (ts, k) = optimize_t(m, tol)?;
            (ts, k, None)
        }
    })
}

fn mode_name(mode: QuantizerMode) -> &'static str {
    match mode {
        QuantizerMode::Uniform => "uniform",
        QuantizerMode::TUniform => "t-uniform",
        QuantizerMode::Optimal => "optimal",
    }
}

pub fn cmd_quantizer(a: &QuantizerArgs, tol: f64) -> Result<OutputRecord> {
    if !(2..=64).contains(&a.m) {
        return Err(CliError::Usage(format!("--m must be in 2..=64, got {}", a.m)));
    }
    let (ts, k, alpha) = quantizer_design(a.mode, a.m, tol)?;
    let asym = asymptotics(&k);
    let sweep = a.snr.points()?;
    let mut rec = match sweep {
        Some(pts) => {
            let mut rec = OutputRecord::new(
                "quantizer",
                &["snr_db", "snr", "gmi_nats", "gmi_bits", "k_factor"],
            );
            for (db, s) in pts {
                let g = gmi_at_snr(&k, &channel(s)?)?;
                rec.push(vec![db.into(), s.into(), g.gmi_nats.into(), g.gmi_bits.into(), k.value.into()]);
            }
            rec
        }
        None => {
            let mut cols = vec![
                "cell",
                "t_upper",
                "t_lower",
                "threshold_lower",
                "threshold_upper",
                "level",
                "k_factor",
                "high_snr_limit_bits",
                "low_snr_slope_nats",
            ];
            if alpha.is_some() {
                cols.push("alpha");
            }
            let mut rec = OutputRecord::new("quantizer", &cols);
            let levels = optimal_reconstructions(&ts)?;
            for i in 1..=ts.m() {
                let (hi, lo) = (ts.t(i - 1), ts.t(i));
                let mut row: Vec<Cell> = vec![
                    i.into(),
                    hi.into(),
                    lo.into(),
                    t_to_normalized_threshold(hi).into(),
                    t_to_normalized_threshold(lo).into(),
                    levels[i - 1].into(),
                    k.value.into(),
                    asym.high_snr_limit_bits.into(),
                    asym.low_snr_slope_nats.into(),
                ];
                if let Some(al) = alpha {
                    row.push(al.into());
                }
                rec.push(row);
            }
            rec
        }
    };
    rec.param("mode", mode_name(a.mode))
        .param("m", a.m)
        .param("snr", a.snr.describe())
        .param("tol", tol);
    Ok(rec)
}

fn check_factor(l: usize) -> Result<()> {
    if !(1..=MAX_FACTOR).contains(&l) {
        return Err(CliError::Usage(format!("--l must be in 1..={MAX_FACTOR}, got {l}")));
    }
    Ok(())
}

fn pulse_for(kind: PulseKind, l: usize) -> Result<(PulseSpec, Option<f64>)> {
    match kind {
        PulseKind::Sinc => Ok((PulseSpec::sinc(l)?, None)),
        PulseKind::Optimal => {
            if l < 2 {
                return Err(CliError::Usage("the optimal pulse needs --l ≥ 2".into()));
            }
            let (p, slope) = optimize_pulse_low_snr(l)?;
            Ok((p, Some(slope)))
        }
    }
}

fn pulse_name(kind: PulseKind) -> &'static str {
    match kind {
        PulseKind::Sinc => "sinc",
        PulseKind::Optimal => "optimal",
    }
}

fn convention_name(c: Convention) -> &'static str {
    match c {
        Convention::Nyquist => "nyquist",
        Convention::Supernyq => "supernyq",
    }
}

pub fn cmd_supernyq(a: &SupernyqArgs) -> Result<OutputRecord> {
    check_factor(a.l)?;
    let sweep = a.snr.points()?;
    if sweep.is_none() && ![1, 2, 4, 8, 16, 32].contains(&a.l) {
        return Err(CliError::Usage(format!(
            "without an SNR sweep --l must be one of 1, 2, 4, 8, 16, 32; got {}",
            a.l
        )));
    }
    let conv = SnrConvention::from(a.snr_convention);
    let mut rec = match (sweep, a.pulse) {
        (Some(pts), kind) => {
            let (pulse, _) = pulse_for(kind, a.l)?;
            let mut rec = OutputRecord::new(
                "supernyq",
                &["snr_db", "snr_supernyq", "gmi_nats", "gmi_bits", "delta"],
            );
            for (db, s) in pts {
                let s = conv.to_supernyq(s);
                let g = match kind {
                    PulseKind::Sinc => sinc_pulse_gmi(a.l, s)?,
                    PulseKind::Optimal => supernyq_gmi(&general_correlations(&pulse, s, 1.0)?)?.0,
                };
                rec.push(vec![db.into(), s.into(), g.gmi_nats.into(), g.gmi_bits.into(), g.delta.into()]);
            }
            rec
        }
        (None, PulseKind::Sinc) => {
            let s = sinc_asymptotics(a.l)?;
            let mut rec = OutputRecord::new(
                "supernyq",
                &["l", "quadratic_form", "high_snr_bits", "low_snr_slope_nats"],
            );
            rec.push(vec![
                a.l.into(),
                s.quadratic_form.into(),
                s.high_snr_bits.into(),
                s.low_snr_slope.into(),
            ]);
            rec
        }
        (None, PulseKind::Optimal) => {
            let (pulse, slope) = pulse_for(PulseKind::Optimal, a.l)?;
            let slope = slope.expect("optimal pulse has a slope");
            let sinc_slope = sinc_asymptotics(a.l)?.low_snr_slope;
            let mut rec = OutputRecord::new(
                "supernyq",
                &["l", "offset", "gamma", "low_snr_slope_nats", "sinc_low_snr_slope_nats"],
            );
            for (i, g) in pulse.gammas().iter().enumerate() {
                let offset = i as f64 - (a.l as f64 - 1.0);
                rec.push(vec![a.l.into(), offset.into(), (*g).into(), slope.into(), sinc_slope.into()]);
            }
            rec
        }
    };
    rec.param("pulse", pulse_name(a.pulse))
        .param("l", a.l)
        .param("snr", a.snr.describe())
        .param("snr_convention", convention_name(a.snr_convention));
    Ok(rec)
}

fn parse_lengths(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| CliError::Usage(format!("bad block length '{t}'")))
        })
        .collect()
}

fn model_name(m: ModelKind) -> &'static str {
    match m {
        ModelKind::Binary => "binary",
        ModelKind::Quantizer => "quantizer",
        ModelKind::Clipper => "clipper",
        ModelKind::Supernyq => "supernyq",
    }
}

fn build_channel(a: &SimulateArgs, snr: f64, tol: f64) -> Result<SimChannel> {
    let memoryless = |model: DistortionModel| -> Result<SimChannel> {
        Ok(SimChannel::Memoryless {
            model,
            config: channel(snr)?,
        })
    };
    match a.model {
        ModelKind::Binary => memoryless(DistortionModel::hard_limiter()),
        ModelKind::Quantizer => {
            if !(2..=64).contains(&a.m) {
                return Err(CliError::Usage(format!("--m must be in 2..=64, got {}", a.m)));
            }
            let cfg = channel(snr)?;
            let (ts, _) = optimize_t(a.m, tol)?;
            let scaled = TDomainSpec::new(ts.interior().to_vec(), cfg.total_energy())?;
            let spec = QuantizerSpec::from_t(&scaled, optimal_reconstructions(&ts)?)?;
            memoryless(DistortionModel::quantizer(&spec))
        }
        ModelKind::Clipper => {
            if !(a.clip_level > 0.0 && a.clip_level.is_finite()) {
                return Err(CliError::Usage("--clip-level must be positive".into()));
            }
            let cfg = channel(snr)?;
            memoryless(DistortionModel::clipper(a.clip_level * cfg.es.sqrt()))
        }
        ModelKind::Supernyq => {
            check_factor(a.l)?;
            let (pulse, _) = pulse_for(a.pulse, a.l)?;
            Ok(SimChannel::Supernyq {
                pulse,
                es: 1.0,
                snr: SnrConvention::from(a.snr_convention).to_supernyq(snr),
                isi_window: a.isi_window,
            })
        }
    }
}

pub fn cmd_simulate(a: &SimulateArgs, seed: u64, tol: f64) -> Result<OutputRecord> {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    if !(a.rate_fraction > 0.0 && a.rate_fraction.is_finite()) {
        return Err(CliError::Usage("--rate-fraction must be positive".into()));
    }
    let pts = a
        .snr
        .points()?
        .ok_or_else(|| CliError::Usage("--snr-db or --snr is required".into()))?;
    if pts.len() != 1 {
        return Err(CliError::Usage("simulate takes a single SNR value".into()));
    }
    let (db, snr) = pts[0];
    let lengths = parse_lengths(&a.n)?;
    let ch = build_channel(a, snr, tol)?;
    let g = ch.gmi()?;
    let rate = a.rate_fraction * g.gmi_nats;
    let mode = match a.decoder {
        DecoderKind::Auto => DecodeMode::Auto,
        DecoderKind::Explicit => DecodeMode::Explicit,
        DecoderKind::Conditional => DecodeMode::Conditional,
    };
    let mut rec = OutputRecord::new(
        "simulate",
        &[
            "n",
            "snr_db",
            "gmi_nats",
            "gmi_bits",
            "rate_fraction",
            "rate_nats",
            "num_messages",
            "trials",
            "block_errors",
            "error_rate",
            "ci95_lo",
            "ci95_hi",
            "decoder",
        ],
    );
    for n in lengths {
        let sim = SimConfig {
            n,
            rate_nats: rate,
            trials: a.trials,
            seed,
            channel: ch.clone(),
            scaling: None,
            mode,
        };
        let r = run_nn_decoding(&sim)?;
        let decoder = match r.mode {
            DecodeMode::Explicit => "explicit",
            _ => "conditional",
        };
        rec.push(vec![
            n.into(),
            db.into(),
            g.gmi_nats.into(),
            g.gmi_bits.into(),
            a.rate_fraction.into(),
            rate.into(),
            r.num_messages.into(),
            r.trials.into(),
            r.block_errors.into(),
            r.error_rate.into(),
            r.wilson_ci95.0.into(),
            r.wilson_ci95.1.into(),
            decoder.into(),
        ]);
    }
    rec.param("model", model_name(a.model))
        .param("snr", a.snr.describe())
        .param("seed", seed)
        .param("trials", a.trials)
        .param("rate_fraction", a.rate_fraction);
    match a.model {
        ModelKind::Quantizer => {
            rec.param("m", a.m);
        }
        ModelKind::Clipper => {
            rec.param("clip_level", a.clip_level);
        }
        ModelKind::Supernyq => {
            rec.param("l", a.l)
                .param("pulse", pulse_name(a.pulse))
                .param("snr_convention", convention_name(a.snr_convention))
                .param("isi_window", a.isi_window);
        }
        ModelKind::Binary => {}
    }
    Ok(rec)
}

const TABLE_FACTORS: [usize; 6] = [1, 2, 4, 8, 16, 32];
const NOTE_LIMIT: &str = "L=inf entry not computed";

pub fn cmd_table(id: u8, tol: f64) -> Result<OutputRecord> {
    let mut rec = match id {
        1 => {
            let mut rec = OutputRecord::new("table", &["m", "k_factor", "alpha"]);
            for m in 2..=8 {
                let (alpha, k) = optimize_uniform(m, tol)?;
                rec.push(vec![m.into(), k.value.into(), alpha.into()]);
            }
            rec
        }
        2 => {
            let mut rec = OutputRecord::new("table", &["m", "k_factor"]);
            for m in 2..=8 {
                rec.push(vec![m.into(), t_uniform_k(m)?.value.into()]);
            }
            rec
        }
        3 => {
            let mut rec = OutputRecord::new("table", &["m", "k_factor", "t_1", "notes"]);
            for m in 2..=8 {
                let (ts, k) = optimize_t(m, tol)?;
                let note = if m == 2 {
                    "erratum: 2.7775 is a misprint of this optimum"
                } else {
                    ""
                };
                rec.push(vec![m.into(), k.value.into(), ts.t(1).into(), note.into()]);
            }
            rec
        }
        4 => {
            let mut rec = OutputRecord::new(
                "table",
                &["l", "quadratic_form", "high_snr_bits", "low_snr_slope_nats", "notes"],
            );
            for (i, l) in TABLE_FACTORS.iter().enumerate() {
                let s = sinc_asymptotics(*l)?;
                let note = if i + 1 == TABLE_FACTORS.len() { NOTE_LIMIT } else { "" };
                rec.push(vec![
                    (*l).into(),
                    s.quadratic_form.into(),
                    s.high_snr_bits.into(),
                    s.low_snr_slope.into(),
                    note.into(),
                ]);
            }
            rec
        }
        5 => {
            let mut rec = OutputRecord::new(
                "table",
                &["l", "low_snr_slope_nats", "sinc_low_snr_slope_nats", "notes"],
            );
            let factors = &TABLE_FACTORS[1..];
            for (i, l) in factors.iter().enumerate() {
                let (_, slope) = optimize_pulse_low_snr(*l)?;
                let note = if i + 1 == factors.len() { NOTE_LIMIT } else { "" };
                rec.push(vec![
                    (*l).into(),
                    slope.into(),
                    sinc_asymptotics(*l)?.low_snr_slope.into(),
                    note.into(),
                ]);
            }
            rec
        }
        other => return Err(CliError::Usage(format!("unknown table {other}"))),
    };
    rec.param("id", id).param("tol", tol);
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("gmi").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn binary_default_grid() {
        let rec = run(&parse(&["binary"])).unwrap();
        assert_eq!(rec.rows.len(), 81);
        let gmi = rec.numbers("gmi_bits");
        let cap = rec.numbers("capacity_bits");
        assert!(gmi.iter().zip(&cap).all(|(g, c)| c >= g));
    }

    #[test]
    fn negative_ranges_parse() {
        let rec = run(&parse(&["binary", "--snr-db", "-20:-10:5"])).unwrap();
        assert_eq!(rec.numbers("snr_db"), vec![-20.0, -15.0, -10.0]);
    }

    #[test]
    fn exit_codes() {
        let e = run(&parse(&["binary", "--snr-db", "3:1:1"])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = run(&parse(&["quantizer", "--mode", "optimal", "--m", "1"])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = run(&parse(&["supernyq", "--l", "3"])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = run(&parse(&[
            "simulate", "--model", "binary", "--snr-db", "10", "--trials", "0",
        ]))
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = run(&parse(&[
            "simulate", "--model", "binary", "--snr-db", "10", "--decoder", "explicit",
        ]))
        .unwrap_err();
        assert_eq!(e.exit_code(), 4);
        assert_eq!(
            CliError::Core(gmi_core::Error::Singular { pivot: 0, value: 0.0 }).exit_code(),
            3
        );
    }

    #[test]
    fn clap_rejects_unknown_table() {
        let e = Cli::try_parse_from(["gmi", "table", "--id", "6"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn quantizer_design_rows() {
        let rec = run(&parse(&["quantizer", "--mode", "uniform", "--m", "5"])).unwrap();
        assert_eq!(rec.rows.len(), 5);
        assert!((rec.numbers("k_factor")[0] - 3.0651).abs() < 1e-3);
        assert!((rec.numbers("alpha")[0] - 0.111).abs() < 2e-3);
        let rec = run(&parse(&["quantizer", "--mode", "t-uniform", "--m", "3"])).unwrap();
        assert!((rec.numbers("k_factor")[0] - 2.9267).abs() < 1e-3);
        let up = rec.numbers("threshold_upper");
        assert!(up[2].is_infinite());
    }

    #[test]
    fn supernyq_sinc_l1_sweep_equals_binary() {
        let b = run(&parse(&["binary", "--snr-db", "-10:20:2.5"])).unwrap();
        let s = run(&parse(&["supernyq", "--l", "1", "--snr-db", "-10:20:2.5"])).unwrap();
        for (x, y) in b.numbers("gmi_nats").iter().zip(s.numbers("gmi_nats")) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bspline;
use crate::error::{Error, Result};
use crate::frame::{self, DIRECT_SUM_TOL};
use crate::io::{self, Entry, FrameJson};
use crate::refinement::{self, RefinementSummary, Side};
use crate::shift_invariant::{self as si, Generator, PeriodicSymbol, SiOptions, TruncatedSymbol};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

pub const THREADS_ENV: &str = "OBLIQUE_FRAMES_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SideArg {
    G,
    F,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::G => Side::G,
            SideArg::F => Side::F,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "oblique-frames", version, about = "Approximate oblique dual frames")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Flat JSON object with default values for the options below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// log2 of the number of grid points on [0, 1), in [8, 22].
    #[arg(long, global = true)]
    grid_log2: Option<u32>,
    /// Direct-sum tolerance on the smallest cross-Gram singular value.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Relative zero-set threshold for self-brackets.
    #[arg(long, global = true)]
    tol_phi: Option<f64>,
    /// Singular-symbol threshold.
    #[arg(long, global = true)]
    tol_c: Option<f64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Duality defect of a frame pair.
    CheckDual { input: PathBuf },
    /// Neumann refinement of order N.
    Refine {
        input: PathBuf,
        #[arg(short = 'N')]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "g")]
        side: SideArg,
    },
    /// Exact oblique dual as the limit of the refinement.
    LimitDual {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "g")]
        side: SideArg,
    },
    /// Bracket product of two generators on the grid.
    SiBracket {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
    },
    /// Duality defect of two integer-translate systems.
    SiDefect {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
        /// Generator of V, for the direct-sum diagnostics.
        #[arg(long)]
        phi1: Option<String>,
    },
    /// Sufficient and necessary error of `ψ̂ = H φ̂₁`.
    SiEps {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        phi1: String,
        /// `dual`, `trunc:K` or `coeffs:<json file>`.
        #[arg(long)]
        symbol: String,
    },
    /// Samples of the Fourier transform of the oblique projection of f.
    SiProject {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        phi1: String,
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 2)]
        periods: usize,
    },
    /// Supports and errors of the truncated B-spline duals.
    BsplineTable {
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Samples of the truncated B-spline dual ψ_K.
    BsplinePsi {
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long, default_value_t = 1001)]
        samples: usize,
    },
}

/// Values accepted in a `--config` file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct ConfigFile {
    pub grid_log2: Option<u32>,
    pub tol: Option<f64>,
    pub tol_phi: Option<f64>,
    pub tol_c: Option<f64>,
    pub kmax: Option<usize>,
    pub N: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Resolved settings for one command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid_log2: u32,
    pub tol: f64,
    pub tol_phi: f64,
    pub tol_c: f64,
    pub kmax: usize,
    pub n: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    fn resolve(common: &CommonArgs, kmax: Option<usize>, n: Option<usize>) -> Result<Self> {
        let file = match &common.config {
            Some(p) => io::read_json::<ConfigFile>(p)?,
            None => ConfigFile::default(),
        };
        let d = SiOptions::default();
        let cfg = Self {
            grid_log2: common.grid_log2.or(file.grid_log2).unwrap_or(d.grid_log2),
            tol: common.tol.or(file.tol).unwrap_or(DIRECT_SUM_TOL),
            tol_phi: common.tol_phi.or(file.tol_phi).unwrap_or(d.zero_rel_tol),
            tol_c: common.tol_c.or(file.tol_c).unwrap_or(d.singular_tol),
            kmax: kmax.or(file.kmax).unwrap_or(4),
            n: n.or(file.N).unwrap_or(1),
            out: common.out.clone().or(file.out),
            format: common.format.or(file.format).unwrap_or(Format::Csv),
        };
        if !(8..=22).contains(&cfg.grid_log2) {
            return Err(Error::InvalidInput(format!("grid-log2 must lie in [8, 22], got {}", cfg.grid_log2)));
        }
        for (name, t) in [("tol", cfg.tol), ("tol-phi", cfg.tol_phi), ("tol-c", cfg.tol_c)] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {t}")));
            }
        }
        Ok(cfg)
    }

    pub fn si_options(&self) -> SiOptions {
        SiOptions {
            grid_log2: self.grid_log2,
            zero_rel_tol: self.tol_phi,
            singular_tol: self.tol_c,
            ..SiOptions::default()
        }
    }
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct PairOutput<T: Serialize> {
    F: FrameJson,
    G: FrameJson,
    #[serde(flatten)]
    info: T,
}

#[derive(Serialize)]
struct LimitInfo {
    side: Side,
    defect: f64,
}

#[derive(Serialize)]
struct SiDefectOutput {
    defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    direct_sum: Option<si::SiDirectSum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cos_lower_bound: Option<f64>,
}

#[derive(Serialize)]
struct EpsOutput {
    sufficient_eps: f64,
    necessary_eps: f64,
}

fn round_value(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if !n.is_i64() && !n.is_u64() => serde_json::json!(io::round_sig(x)),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

fn emit_json<T: Serialize>(cfg: &RunConfig, value: &T) -> Result<()> {
    let v = round_value(serde_json::to_value(value)?);
    io::write_json(io::output(cfg.out.as_deref())?, &v)
}

fn parse_symbol(spec: &str, phi: &Generator, phi1: &Generator, opts: &SiOptions) -> Result<Box<dyn PeriodicSymbol>> {
    if spec == "dual" {
        return Ok(Box::new(si::exact_dual_symbol(phi, phi1, opts)?));
    }
    if let Some(k) = spec.strip_prefix("trunc:") {
        let k: usize = k
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad truncation order in {spec:?}")))?;
        let h = si::dual_symbol(phi, phi1, opts)?;
        return Ok(Box::new(si::fourier_coefficients(&h, k)?));
    }
    if let Some(path) = spec.strip_prefix("coeffs:") {
        let entries: Vec<Entry> = io::read_json(Path::new(path))?;
        let coeffs = entries.into_iter().map(Complex64::from).collect();
        return Ok(Box::new(TruncatedSymbol::new(coeffs)?));
    }
    Err(Error::InvalidInput(format!("unknown symbol {spec:?}")))
}

fn require_direct_sum(w: &crate::frame::Subspace, v: &crate::frame::Subspace, tol: f64) -> Result<()> {
    let ds = frame::direct_sum_check(w, v, tol)?;
    if !ds.direct_sum_ok {
        return Err(Error::DirectSumFailure { sigma_min: ds.cross_gram_sigma_min });
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    let (kmax, n) = match &cli.command {
        Command::Refine { n, .. } => (None, *n),
        Command::BsplineTable { kmax } | Command::BsplinePsi { kmax, .. } => (*kmax, None),
        _ => (None, None),
    };
    let cfg = RunConfig::resolve(&cli.common, kmax, n)?;
    let opts = cfg.si_options();
    match cli.command {
        Command::CheckDual { input } => {
            let p = io::read_pair(&input)?;
            let report = frame::duality_report(&p.f, &p.g, &p.w, &p.v, cfg.tol)?;
            emit_json(&cfg, &report)
        }
        Command::Refine { input, side, .. } => {
            let p = io::read_pair(&input)?;
            require_direct_sum(&p.w, &p.v, cfg.tol)?;
            let r = refinement::refine(&p.f, &p.g, &p.w, &p.v, cfg.n, side.into(), false)?;
            let (f, g) = match Side::from(side) {
                Side::G => (p.f, r.refined_frame.clone()),
                Side::F => (r.refined_frame.clone(), p.g),
            };
            let out: PairOutput<RefinementSummary> = PairOutput {
                F: FrameJson::from_frame(&f, Some(&p.w)),
                G: FrameJson::from_frame(&g, Some(&p.v)),
                info: r.summary(),
            };
            emit_json(&cfg, &out)
        }
        Command::LimitDual { input, side } => {
            let p = io::read_pair(&input)?;
            require_direct_sum(&p.w, &p.v, cfg.tol)?;
            let (f, g) = match Side::from(side) {
                Side::G => {
                    let g = refinement::limit_dual(&p.f, &p.g, &p.w, &p.v)?;
                    (p.f, g)
                }
                Side::F => (refinement::limit_dual_other_side(&p.f, &p.g, &p.w, &p.v)?, p.g),
            };
            let defect = frame::duality_defect(&f, &g, &p.w, &p.v)?;
            let out = PairOutput {
                F: FrameJson::from_frame(&f, Some(&p.w)),
                G: FrameJson::from_frame(&g, Some(&p.v)),
                info: LimitInfo { side: side.into(), defect },
            };
            emit_json(&cfg, &out)
        }
        Command::SiBracket { phi, psi } => {
            let b = si::bracket(&Generator::parse(&phi)?, &Generator::parse(&psi)?, &opts)?;
            match cfg.format {
                Format::Csv => b.write_csv(io::output(cfg.out.as_deref())?),
                Format::Json => emit_json(&cfg, &b),
            }
        }
        Command::SiDefect { phi, psi, phi1 } => {
            let phi = Generator::parse(&phi)?;
            let defect = si::si_duality_defect(&phi, &Generator::parse(&psi)?, &opts)?;
            let (direct_sum, cos_lower_bound) = match phi1 {
                Some(s) => {
                    let phi1 = Generator::parse(&s)?;
                    let ds = si::si_direct_sum_check(&phi, &phi1, &opts)?;
                    let cos = si::si_cos_lower_bound(&phi, &phi1, &opts)?;
                    (Some(ds), Some(cos))
                }
                None => (None, None),
            };
            emit_json(&cfg, &SiDefectOutput { defect, direct_sum, cos_lower_bound })
        }
        Command::SiEps { phi, phi1, symbol } => {
            let phi = Generator::parse(&phi)?;
            let phi1 = Generator::parse(&phi1)?;
            let h = parse_symbol(&symbol, &phi, &phi1, &opts)?;
            let out = EpsOutput {
                sufficient_eps: si::sufficient_eps(&phi, &phi1, h.as_ref(), &opts)?,
                necessary_eps: si::necessary_eps(&phi, &phi1, h.as_ref(), &opts)?,
            };
            emit_json(&cfg, &out)
        }
        Command::SiProject { phi, phi1, f, periods } => {
            let s = si::project_fourier(
                &Generator::parse(&phi)?,
                &Generator::parse(&phi1)?,
                &Generator::parse(&f)?,
                periods,
                &opts,
            )?;
            match cfg.format {
                Format::Csv => io::write_csv(
                    io::output(cfg.out.as_deref())?,
                    &["xi", "re", "im"],
                    s.xi.iter().zip(&s.values).map(|(&x, z)| vec![x, z.re, z.im]),
                ),
                Format::Json => emit_json(&cfg, &s),
            }
        }
        Command::BsplineTable { .. } => {
            let rows = bspline::example_table(cfg.kmax, &opts)?;
            match cfg.format {
                Format::Csv => io::write_csv(
                    io::output(cfg.out.as_deref())?,
                    &["K", "support_lo", "support_hi", "eps"],
                    rows.iter().map(|r| vec![r.K as f64, r.support_lo, r.support_hi, r.eps]),
                ),
                Format::Json => emit_json(&cfg, &rows),
            }
        }
        Command::BsplinePsi { samples, .. } => {
            let pts = bspline::emit_psi_samples(cfg.kmax, samples, &opts)?;
            match cfg.format {
                Format::Csv => io::write_csv(
                    io::output(cfg.out.as_deref())?,
                    &["x", "psi"],
                    pts.iter().map(|&(x, y)| vec![x, y]),
                ),
                Format::Json => emit_json(&cfg, &pts),
            }
        }
    }
}

fn thread_pool() -> std::result::Result<Option<rayon::ThreadPool>, String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| e.to_string())
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INPUT;
        }
    };
    let result = match pool {
        Some(p) => p.install(|| execute(cli)),
        None => execute(cli),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input() {
                EXIT_INPUT
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}

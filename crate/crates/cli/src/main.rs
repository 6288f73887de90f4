use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use avgapprox::avg_error::{self, avg_error_exact, error_report, LinearAlgorithm};
use avgapprox::experiment::{self, AvgMethod, Config, ErrorCurve};
use avgapprox::fieldsim::mc_avg_error;
use avgapprox::kernel;
use avgapprox::spectrum::{tail_exponent_fit, Spectrum};
use avgapprox::{Design, Error, Provenance, QuadratureRule};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "avgapprox", version, about = "Average-case approximation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Covariance kernel values
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Sample-point designs
    #[command(subcommand)]
    Design(DesignCmd),
    /// Average errors of the spline algorithm
    #[command(subcommand)]
    Error(ErrorCmd),
    /// Covariance operator eigenvalues
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    /// Tractability exponent from the eigenvalue tail
    #[command(subcommand)]
    Tract(TractCmd),
    /// Error curves over levels or sizes
    #[command(subcommand)]
    Curve(CurveCmd),
    /// Convergence-rate fits
    #[command(subcommand)]
    Rate(RateCmd),
    /// Compare design families on one problem
    Compare(Common),
}

#[derive(Subcommand)]
enum KernelCmd {
    Eval {
        #[command(flatten)]
        common: Common,
        /// First point, comma separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t: Vec<f64>,
        /// Second point, comma separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
    },
}

#[derive(Subcommand)]
enum DesignCmd {
    Gen {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        size: SizeArgs,
    },
}

#[derive(Subcommand)]
enum ErrorCmd {
    /// Exact average error and sup-grid bound of the spline algorithm
    Exact {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        size: SizeArgs,
    },
    /// Monte Carlo estimate of the average error over sampled fields
    Mc {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        size: SizeArgs,
    },
}

#[derive(Subcommand)]
enum SpectrumCmd {
    Compute {
        #[command(flatten)]
        common: Common,
        /// Number of (tensor) eigenvalues to keep
        #[arg(long)]
        count: Option<usize>,
    },
}

#[derive(Subcommand)]
enum TractCmd {
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        count: Option<usize>,
        /// Fitting window `lo,hi`
        #[arg(long, value_delimiter = ',', num_args = 2)]
        window: Option<Vec<usize>>,
    },
}

#[derive(Subcommand)]
enum CurveCmd {
    Run(Common),
}

#[derive(Subcommand)]
enum RateCmd {
    Fit {
        #[command(flatten)]
        common: Common,
        /// Curve CSV produced by `curve run`
        #[arg(long)]
        curve: PathBuf,
        /// Fit the log log n term as well
        #[arg(long)]
        with_log: bool,
    },
}

#[derive(Args, Clone, Default)]
struct SizeArgs {
    /// Design file written by `design gen`
    #[arg(long)]
    design_file: Option<PathBuf>,
    /// Level for grid or hyperbolic designs
    #[arg(long)]
    level: Option<u32>,
    /// Size for grid or random designs
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    /// Smoothness per coordinate, comma separated
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<u32>>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    design: Option<String>,
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long)]
    quad_nodes: Option<usize>,
    #[arg(long)]
    sup_grid: Option<usize>,
    #[arg(long)]
    eig_m: Option<usize>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    mc_resolution: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<String>,
    /// `exact` or `quadrature`
    #[arg(long)]
    avg_method: Option<String>,
    #[arg(long, value_delimiter = ',')]
    designs: Option<Vec<String>>,
    #[arg(long)]
    ratio_flag: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
}

/// Failure with its exit code: 2 for bad input, 3 for numerical trouble.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { code: if e.is_config() { 2 } else { 3 }, message: e.to_string() }
    }
}

fn config_failure(message: String) -> Failure {
    Failure { code: 2, message }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn parse_family(s: &str) -> CliResult<Provenance> {
    s.parse::<Provenance>().map_err(|e| config_failure(e.to_string()))
}

impl Common {
    fn load(&self) -> CliResult<Config> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| config_failure(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<Config>(&text).map_err(|e| config_failure(format!("invalid configuration: {e}")))?
            }
            None => {
                let r = self
                    .r
                    .clone()
                    .ok_or_else(|| config_failure("either --config or --r is required".into()))?;
                Config::new(r, Provenance::MappedHyperbolicCross)
            }
        };
        if let Some(r) = &self.r {
            cfg.r = r.clone();
            cfg.d = r.len();
        }
        if let Some(d) = self.d {
            cfg.d = d;
        }
        if let Some(c) = self.c {
            cfg.c = c;
        }
        if let Some(s) = &self.design {
            cfg.design = parse_family(s)?;
        }
        if let Some(l) = &self.levels {
            cfg.levels = Some(l.clone());
        }
        if let Some(l) = &self.n_list {
            cfg.n_list = Some(l.clone());
        }
        if self.quad_nodes.is_some() {
            cfg.quad_nodes = self.quad_nodes;
        }
        if self.sup_grid.is_some() {
            cfg.sup_grid = self.sup_grid;
        }
        if let Some(m) = self.eig_m {
            cfg.eig_m = m;
        }
        if let Some(m) = self.mc_samples {
            cfg.mc_samples = m;
        }
        if self.mc_resolution.is_some() {
            cfg.mc_resolution = self.mc_resolution;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if let Some(m) = &self.avg_method {
            cfg.avg_method = match m.as_str() {
                "exact" => AvgMethod::Exact,
                "quadrature" => AvgMethod::Quadrature,
                other => return Err(config_failure(format!("unknown avg_method {other:?}"))),
            };
        }
        if let Some(list) = &self.designs {
            cfg.designs = Some(list.iter().map(|s| parse_family(s)).collect::<CliResult<_>>()?);
        }
        if let Some(f) = self.ratio_flag {
            cfg.ratio_flag = f;
        }
        if self.epsilon.is_some() {
            cfg.epsilon = self.epsilon;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(cfg: &Config, text: &str) -> CliResult<()> {
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| config_failure(format!("cannot write {path}: {e}"))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure { code: 3, message: format!("cannot write output: {e}") })
        }
    }
}

fn resolve_design(cfg: &Config, size: &SizeArgs) -> CliResult<Design> {
    let spec = cfg.spec()?;
    if let Some(path) = &size.design_file {
        let text = fs::read_to_string(path)
            .map_err(|e| config_failure(format!("cannot read {}: {e}", path.display())))?;
        let design = Design::from_text(&text)?;
        if design.dim() != spec.d() {
            return Err(Error::DimensionMismatch { expected: spec.d(), got: design.dim() }.into());
        }
        return Ok(design);
    }
    let level = size.level.or_else(|| if size.n.is_some() { None } else { cfg.levels.as_ref().and_then(|l| l.first().copied()) });
    let n = size.n.or_else(|| cfg.n_list.as_ref().and_then(|l| l.first().copied()));
    Ok(experiment::family_design(cfg.design, &spec, cfg.seed, level, n)?)
}

fn default_mc_resolution(d: usize) -> usize {
    match d {
        1 => 1024,
        2 => 256,
        3 => 32,
        _ => 8,
    }
}

fn spectrum_for(cfg: &Config, count: Option<usize>) -> CliResult<Spectrum> {
    let spec = cfg.spec()?;
    let count = count.unwrap_or(if cfg.d == 1 { cfg.eig_m } else { 4 * cfg.eig_m });
    Ok(Spectrum::for_problem(&spec, cfg.eig_m, count)?)
}

fn to_json(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Kernel(KernelCmd::Eval { common, t, x }) => {
            let cfg = common.load()?;
            let v = kernel::cov(&t, &x, &cfg.spec()?)?;
            emit(&cfg, &format!("{v}\n"))
        }
        Command::Design(DesignCmd::Gen { common, size }) => {
            let cfg = common.load()?;
            let design = resolve_design(&cfg, &size)?;
            emit(&cfg, &design.to_text())
        }
        Command::Error(ErrorCmd::Exact { common, size }) => {
            let cfg = common.load()?;
            let design = resolve_design(&cfg, &size)?;
            let alg = LinearAlgorithm::spline(&design, &cfg.spec()?)?;
            let report = match cfg.avg_method {
                AvgMethod::Exact => {
                    let mut r = avg_error_exact(&alg)?;
                    r.e_wor_bound = Some(avg_error::worst_error_bound(&alg, cfg.sup_grid())?);
                    r
                }
                AvgMethod::Quadrature => {
                    let quad = QuadratureRule::gauss_legendre(cfg.d, cfg.quad_nodes())?;
                    error_report(&alg, &quad, cfg.sup_grid())?
                }
            };
            emit(&cfg, &format!("{}\n{}\n", avg_error::ErrorReport::CSV_HEADER, report.csv_row()))
        }
        Command::Error(ErrorCmd::Mc { common, size }) => {
            let cfg = common.load()?;
            let spec = cfg.spec()?;
            let design = resolve_design(&cfg, &size)?;
            let alg = LinearAlgorithm::spline(&design, &spec)?;
            let res = cfg.mc_resolution.unwrap_or_else(|| default_mc_resolution(cfg.d));
            let (est, se) = mc_avg_error(&alg, &spec, cfg.mc_samples, res, cfg.seed)?;
            let exact = avg_error_exact(&alg)?.e_avg;
            emit(&cfg, &format!("n,estimate,stderr,exact\n{},{est},{se},{exact}\n", design.len()))
        }
        Command::Spectrum(SpectrumCmd::Compute { common, count }) => {
            let cfg = common.load()?;
            emit(&cfg, &spectrum_for(&cfg, count)?.to_csv())
        }
        Command::Tract(TractCmd::Check { common, count, window }) => {
            let cfg = common.load()?;
            let s = spectrum_for(&cfg, count)?;
            let window = window.map(|w| (w[0], w[1])).unwrap_or_else(|| s.default_window());
            emit(&cfg, &to_json(serde_json::json!(tail_exponent_fit(&s, window)?)))
        }
        Command::Curve(CurveCmd::Run(common)) => {
            let cfg = common.load()?;
            let (curve, log) = experiment::run_curve(&cfg)?;
            eprint!("{}", log.to_text());
            if let Some(eps) = cfg.epsilon {
                match experiment::complexity_estimate(&curve, eps, &cfg.spec()?) {
                    Ok((n, cost)) => eprintln!("epsilon {eps}: n = {n}, cost = {cost}"),
                    Err(e) => eprintln!("epsilon {eps}: {e}"),
                }
            }
            emit(&cfg, &curve.to_csv())
        }
        Command::Rate(RateCmd::Fit { common, curve, with_log }) => {
            let cfg = if common.config.is_some() || common.r.is_some() {
                common.load()?
            } else {
                let mut cfg = Config::new(vec![0], Provenance::Grid);
                cfg.c = common.c.unwrap_or(cfg.c);
                cfg.out = common.out.clone();
                cfg.epsilon = common.epsilon;
                cfg.validate()?;
                cfg
            };
            let text = fs::read_to_string(&curve)
                .map_err(|e| config_failure(format!("cannot read {}: {e}", curve.display())))?;
            let curve = ErrorCurve::from_csv(&text)?;
            let fit = experiment::fit_rate(&curve, with_log)?;
            let mut json = serde_json::to_value(fit).expect("fit serializes");
            if let Some(eps) = cfg.epsilon {
                let (n, cost) = experiment::complexity_estimate(&curve, eps, &cfg.spec()?)?;
                json["n_eps"] = n.into();
                json["cost"] = cost.into();
            }
            emit(&cfg, &to_json(json))
        }
        Command::Compare(common) => {
            let cfg = common.load()?;
            emit(&cfg, &to_json(serde_json::json!(experiment::compare_designs(&cfg)?)))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

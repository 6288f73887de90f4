//! Sweeps over designs and levels, rate fits, cost estimates and design
//! comparisons.

use std::fmt::Write as _;

use faer::linalg::solvers::SolveLstsq;
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::avg_error::{all_info_error, avg_error, avg_error_exact, default_sup_grid, worst_error_bound, LinearAlgorithm};
use crate::designs::{self, Design, Provenance};
use crate::errors::{Error, Result};
use crate::problem::ProblemSpec;
use crate::quadrature::QuadratureRule;
use crate::spectrum::Spectrum;

/// Tolerance on `e_all ≤ e_avg` and `e_avg ≤ e_wor_bound` for emitted rows.
pub const INVARIANT_TOLERANCE: f64 = 1e-8;

/// How a curve computes `e_avg`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AvgMethod {
    /// Aligned composite rule or moment identity, free of quadrature error.
    #[default]
    Exact,
    /// Tensor Gauss–Legendre with `quad_nodes` per axis and a p vs 2p check.
    Quadrature,
}

fn default_c() -> f64 {
    100.0
}

fn default_eig_m() -> usize {
    2048
}

fn default_mc_samples() -> usize {
    1000
}

fn default_ratio_flag() -> f64 {
    2.0
}

/// Experiment configuration, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub d: usize,
    pub r: Vec<u32>,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "Config::default_design")]
    pub design: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_grid: Option<usize>,
    #[serde(default = "default_eig_m")]
    pub eig_m: usize,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default)]
    pub avg_method: AvgMethod,
    /// Per-axis white-noise cells for Monte Carlo runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_resolution: Option<usize>,
    /// Families for `compare`; the first is the reference.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designs: Option<Vec<Provenance>>,
    #[serde(default = "default_ratio_flag")]
    pub ratio_flag: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl Config {
    fn default_design() -> Provenance {
        Provenance::MappedHyperbolicCross
    }

    /// Minimal configuration; every optional field takes its default.
    pub fn new(r: Vec<u32>, design: Provenance) -> Self {
        Self {
            d: r.len(),
            r,
            c: default_c(),
            design,
            levels: None,
            n_list: None,
            quad_nodes: None,
            sup_grid: None,
            eig_m: default_eig_m(),
            mc_samples: default_mc_samples(),
            seed: 0,
            out: None,
            avg_method: AvgMethod::Exact,
            mc_resolution: None,
            designs: None,
            ratio_flag: default_ratio_flag(),
            epsilon: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn spec(&self) -> Result<ProblemSpec> {
        if self.r.len() != self.d {
            return Err(Error::Config(format!("r has {} entries but d = {}", self.r.len(), self.d)));
        }
        ProblemSpec::new(self.r.clone(), self.c).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn sup_grid(&self) -> usize {
        self.sup_grid.unwrap_or_else(|| default_sup_grid(self.d))
    }

    pub fn quad_nodes(&self) -> usize {
        self.quad_nodes.unwrap_or(match self.d {
            1 => 64,
            2 => 32,
            3 => 16,
            _ => 8,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.spec()?;
        if self.levels.as_ref().is_some_and(|l| l.is_empty()) {
            return Err(Error::Config("levels is empty".into()));
        }
        if self.n_list.as_ref().is_some_and(|l| l.is_empty() || l.contains(&0)) {
            return Err(Error::Config("n_list must hold positive sizes".into()));
        }
        if self.quad_nodes == Some(0) {
            return Err(Error::Config("quad_nodes must be positive".into()));
        }
        if self.sup_grid.is_some_and(|g| g < 2) {
            return Err(Error::Config("sup_grid must be at least 2".into()));
        }
        if self.eig_m < 8 {
            return Err(Error::Config("eig_m must be at least 8".into()));
        }
        if self.mc_samples < 2 {
            return Err(Error::Config("mc_samples must be at least 2".into()));
        }
        if !(self.ratio_flag > 0.0) {
            return Err(Error::Config("ratio_flag must be positive".into()));
        }
        if self.epsilon.is_some_and(|e| !(e > 0.0)) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        Ok(())
    }

    /// Sizes or levels for `family`, as `(level, n)` requests.
    fn requests(&self, family: Provenance) -> Result<Vec<SizeRequest>> {
        match family {
            Provenance::HyperbolicCross | Provenance::MappedHyperbolicCross => self
                .levels
                .as_ref()
                .map(|l| l.iter().map(|&v| SizeRequest::Level(v)).collect())
                .ok_or_else(|| Error::Config(format!("design {family} needs levels"))),
            Provenance::Random => self
                .n_list
                .as_ref()
                .map(|l| l.iter().map(|&v| SizeRequest::Size(v)).collect())
                .ok_or_else(|| Error::Config("design random needs n_list".into())),
            Provenance::Grid => match (&self.n_list, &self.levels) {
                (Some(l), _) => Ok(l.iter().map(|&v| SizeRequest::Size(v)).collect()),
                (None, Some(l)) => Ok(l.iter().map(|&v| SizeRequest::Level(v)).collect()),
                (None, None) => Err(Error::Config("design grid needs n_list or levels".into())),
            },
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum SizeRequest {
    Level(u32),
    Size(usize),
}

/// Builds one design of `family`. Grids take `m = round(n^{1/d})` points per
/// axis for a size request and `2^L` per axis for a level.
pub fn family_design(family: Provenance, spec: &ProblemSpec, seed: u64, level: Option<u32>, n: Option<usize>) -> Result<Design> {
    let req = match (level, n) {
        (Some(l), _) => SizeRequest::Level(l),
        (None, Some(n)) => SizeRequest::Size(n),
        (None, None) => return Err(Error::Config("need a level or a size".into())),
    };
    make_design(family, spec, seed, req)
}

fn make_design(family: Provenance, spec: &ProblemSpec, seed: u64, req: SizeRequest) -> Result<Design> {
    let d = spec.d();
    match (family, req) {
        (Provenance::Grid, SizeRequest::Size(n)) => {
            let m = (n as f64).powf(1.0 / d as f64).round().max(1.0) as usize;
            designs::grid(&vec![m; d])
        }
        (Provenance::Grid, SizeRequest::Level(l)) => {
            let m = 1usize.checked_shl(l).filter(|_| l < 32).ok_or(Error::Overflow {
                size: 1u128 << l.min(127),
                cap: designs::DEFAULT_SIZE_CAP,
            })?;
            Ok(designs::grid(&vec![m; d])?.with_level(Some(l)))
        }
        (Provenance::HyperbolicCross, SizeRequest::Level(l)) => designs::hyperbolic_cross(l, spec),
        (Provenance::MappedHyperbolicCross, SizeRequest::Level(l)) => {
            designs::map_design(&designs::hyperbolic_cross(l, spec)?)
        }
        (Provenance::Random, SizeRequest::Size(n)) => designs::random_design(n, spec, seed),
        (f, _) => Err(Error::Config(format!("design {f} does not accept this size request"))),
    }
}

/// One curve row.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub n: usize,
    pub e_avg: f64,
    pub e_all: Option<f64>,
    pub e_wor_bound: Option<f64>,
    pub provenance: Provenance,
    pub level: Option<u32>,
}

/// Error curve sorted by `n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorCurve {
    pub rows: Vec<CurveRow>,
}

fn opt_field<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn parse_opt<T: std::str::FromStr>(s: &str, what: &str, line: usize) -> Result<Option<T>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::Parse(format!("line {line}: bad {what} {s:?}")))
}

impl ErrorCurve {
    pub const CSV_HEADER: &'static str = "n,e_avg,e_all,e_wor_bound,provenance,level";

    pub fn new(mut rows: Vec<CurveRow>) -> Self {
        rows.sort_by_key(|r| r.n);
        Self { rows }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.n,
                r.e_avg,
                opt_field(&r.e_all),
                opt_field(&r.e_wor_bound),
                r.provenance,
                opt_field(&r.level)
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == Self::CSV_HEADER => {}
            _ => return Err(Error::Parse(format!("curve CSV must start with {:?}", Self::CSV_HEADER))),
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let line_no = i + 1;
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 6 {
                return Err(Error::Parse(format!("line {line_no}: expected 6 fields")));
            }
            rows.push(CurveRow {
                n: parse_opt(f[0], "n", line_no)?.ok_or_else(|| Error::Parse(format!("line {line_no}: missing n")))?,
                e_avg: parse_opt(f[1], "e_avg", line_no)?
                    .ok_or_else(|| Error::Parse(format!("line {line_no}: missing e_avg")))?,
                e_all: parse_opt(f[2], "e_all", line_no)?,
                e_wor_bound: parse_opt(f[3], "e_wor_bound", line_no)?,
                provenance: f[4].parse()?,
                level: parse_opt(f[5], "level", line_no)?,
            });
        }
        Ok(Self::new(rows))
    }

    pub fn ns(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.n).collect()
    }
}

/// Append-only per-row record of a curve run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLog {
    pub entries: Vec<String>,
}

impl RunLog {
    fn push(&mut self, entry: String) {
        self.entries.push(entry);
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|e| format!("{e}\n")).collect()
    }
}

fn compute_e_avg(alg: &LinearAlgorithm, cfg: &Config) -> Result<f64> {
    match cfg.avg_method {
        AvgMethod::Exact => Ok(avg_error_exact(alg)?.e_avg),
        AvgMethod::Quadrature => {
            let quad = QuadratureRule::gauss_legendre(cfg.d, cfg.quad_nodes())?;
            Ok(avg_error(alg, &quad)?.e_avg)
        }
    }
}

/// Runs the configured design family over its levels or sizes.
pub fn run_curve(cfg: &Config) -> Result<(ErrorCurve, RunLog)> {
    run_family(cfg, cfg.design)
}

fn run_family(cfg: &Config, family: Provenance) -> Result<(ErrorCurve, RunLog)> {
    cfg.validate()?;
    let spec = cfg.spec()?;
    let requests = cfg.requests(family)?;
    let mut log = RunLog::default();
    let mut designs = Vec::with_capacity(requests.len());
    for req in requests {
        match make_design(family, &spec, cfg.seed, req) {
            Ok(d) => designs.push(d),
            Err(e) => log.push(format!("{family} {req:?}: design failed: {e}")),
        }
    }
    let n_max = designs.iter().map(Design::len).max().unwrap_or(0);
    let count = (4 * n_max).max(1024);
    let spectrum = match Spectrum::for_problem(&spec, cfg.eig_m, count) {
        Ok(s) => Some(s),
        Err(e) => {
            log.push(format!("spectrum unavailable, e_all left empty: {e}"));
            None
        }
    };
    let sup_grid = cfg.sup_grid();
    let mut rows = Vec::with_capacity(designs.len());
    for design in designs {
        let n = design.len();
        let tag = format!("{family} n={n} level={}", opt_field(&design.level()));
        let row = (|| -> Result<CurveRow> {
            let alg = LinearAlgorithm::spline(&design, &spec)?;
            let e_avg = compute_e_avg(&alg, cfg)?;
            let e_wor_bound = worst_error_bound(&alg, sup_grid)?;
            let e_all = match &spectrum {
                Some(s) => match all_info_error(s, n) {
                    Ok(v) => Some(v),
                    Err(e) => {
                        log.push(format!("{tag}: e_all left empty: {e}"));
                        None
                    }
                },
                None => None,
            };
            Ok(CurveRow { n, e_avg, e_all, e_wor_bound: Some(e_wor_bound), provenance: family, level: design.level() })
        })();
        match row {
            Ok(row) => {
                if let Some(a) = row.e_all.filter(|a| *a > row.e_avg + INVARIANT_TOLERANCE) {
                    log.push(format!("{tag}: dropped, e_all {a} exceeds e_avg {}", row.e_avg));
                } else if row.e_wor_bound.is_some_and(|w| row.e_avg > w + INVARIANT_TOLERANCE) {
                    log.push(format!("{tag}: dropped, e_avg {} exceeds sup-grid bound", row.e_avg));
                } else {
                    log.push(format!("{tag}: ok e_avg={}", row.e_avg));
                    rows.push(row);
                }
            }
            Err(e) => log.push(format!("{tag}: failed: {e}")),
        }
    }
    Ok((ErrorCurve::new(rows), log))
}

/// Fit of `log e = intercept − slope·log n + log_power·log log n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub log_power: f64,
    pub intercept: f64,
    pub residual: f64,
}

impl RateFit {
    /// Model prediction at `n`.
    pub fn predict(&self, n: f64) -> f64 {
        (self.intercept - self.slope * n.ln() + self.log_power * n.ln().ln()).exp()
    }
}

/// Minimum number of distinct sizes for [`fit_rate`].
pub const MIN_FIT_ROWS: usize = 6;
/// Minimum span of `n` in decades for [`fit_rate`].
pub const MIN_FIT_DECADES: f64 = 1.5;

/// Least-squares rate fit on the rows of `curve`, deduplicated by `n`;
/// `log_power` is held at 0 unless `with_log_term`.
pub fn fit_rate(curve: &ErrorCurve, with_log_term: bool) -> Result<RateFit> {
    let mut pts: Vec<(usize, f64)> = Vec::with_capacity(curve.rows.len());
    let mut sorted = curve.rows.clone();
    sorted.sort_by_key(|r| r.n);
    for r in &sorted {
        if pts.last().is_some_and(|(n, _)| *n == r.n) {
            continue;
        }
        pts.push((r.n, r.e_avg));
    }
    fit_points(&pts, with_log_term)
}

fn fit_points(pts: &[(usize, f64)], with_log_term: bool) -> Result<RateFit> {
    if pts.len() < MIN_FIT_ROWS {
        return Err(Error::InsufficientSpan(format!("{} distinct sizes, need {MIN_FIT_ROWS}", pts.len())));
    }
    let (lo, hi) = (pts[0].0 as f64, pts[pts.len() - 1].0 as f64);
    if (hi / lo).log10() < MIN_FIT_DECADES {
        return Err(Error::InsufficientSpan(format!("n spans {lo}..{hi}, need {MIN_FIT_DECADES} decades")));
    }
    if pts.iter().any(|&(_, e)| !(e > 0.0 && e.is_finite())) {
        return Err(Error::Domain("errors must be positive to fit a rate".into()));
    }
    if with_log_term && pts[0].0 < 2 {
        return Err(Error::Domain("log log n needs n >= 2".into()));
    }
    let cols = if with_log_term { 3 } else { 2 };
    let rows = pts.len();
    let a = Mat::from_fn(rows, cols, |i, j| {
        let ln = (pts[i].0 as f64).ln();
        match j {
            0 => 1.0,
            1 => -ln,
            _ => ln.ln(),
        }
    });
    let b = Mat::from_fn(rows, 1, |i, _| pts[i].1.ln());
    let x = a.qr().solve_lstsq(&b);
    let fit = RateFit {
        intercept: x[(0, 0)],
        slope: x[(1, 0)],
        log_power: if with_log_term { x[(2, 0)] } else { 0.0 },
        residual: 0.0,
    };
    let ss: f64 = pts
        .iter()
        .map(|&(n, e)| (e.ln() - fit.predict(n as f64).ln()).powi(2))
        .sum();
    Ok(RateFit { residual: (ss / rows as f64).sqrt(), ..fit })
}

/// `e(n)` on a curve sorted by `n`: the tabulated value on a row hit,
/// log-log interpolation between bracketing rows, `None` outside.
fn interpolate_loglog(rows: &[(usize, f64)], n: usize) -> Option<f64> {
    if let Some(&(_, e)) = rows.iter().find(|r| r.0 == n) {
        return Some(e);
    }
    rows.windows(2).find_map(|w| {
        let ((n0, e0), (n1, e1)) = (w[0], w[1]);
        (n0 < n && n < n1).then(|| {
            let t = ((n as f64).ln() - (n0 as f64).ln()) / ((n1 as f64).ln() - (n0 as f64).ln());
            (e0.ln() + t * (e1.ln() - e0.ln())).exp()
        })
    })
}

/// Smallest `n` reaching `e_avg ≤ epsilon`, interpolating in log-log
/// between rows, and its cost `(c + 2)·n`.
pub fn complexity_estimate(curve: &ErrorCurve, epsilon: f64, spec: &ProblemSpec) -> Result<(usize, f64)> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let rows = &curve.rows;
    let best = rows.iter().map(|r| r.e_avg).fold(f64::INFINITY, f64::min);
    let Some(k) = rows.iter().position(|r| r.e_avg <= epsilon) else {
        return Err(Error::EpsilonUnreachable { epsilon, best });
    };
    let n_eps = if k == 0 || rows[k].e_avg == epsilon {
        rows[k].n
    } else {
        let (a, b) = (&rows[k - 1], &rows[k]);
        let (x0, x1) = ((a.n as f64).ln(), (b.n as f64).ln());
        let (y0, y1) = (a.e_avg.ln(), b.e_avg.ln());
        let x = x0 + (epsilon.ln() - y0) * (x1 - x0) / (y1 - y0);
        // guard the rounding of exp(ln n) at the bracket ends
        (x.exp() - 1e-9).ceil().clamp(a.n as f64 + 1.0, b.n as f64) as usize
    };
    Ok((n_eps, (spec.cost() + 2.0) * n_eps as f64))
}

/// Curve and fits for one family in a comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    pub family: Provenance,
    pub ns: Vec<usize>,
    pub e_avg: Vec<f64>,
    pub fit: Option<RateFit>,
    pub fit_with_log: Option<RateFit>,
    pub log: Vec<String>,
}

/// `e_ref(n) / e_family(n)` at the family's sizes inside the reference range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTable {
    pub family: Provenance,
    pub n: Vec<usize>,
    pub ratio: Vec<f64>,
    /// Ratios increase along `n` and end above the configured factor.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub reference: Provenance,
    pub families: Vec<FamilyReport>,
    pub ratios: Vec<RatioTable>,
}

/// Runs every family in `cfg.designs` on the shared spec and tabulates
/// error ratios against the first.
pub fn compare_designs(cfg: &Config) -> Result<CompareReport> {
    let families = cfg
        .designs
        .clone()
        .filter(|f| f.len() >= 2)
        .ok_or_else(|| Error::Config("compare needs at least two entries in designs".into()))?;
    let mut reports = Vec::with_capacity(families.len());
    let mut curves = Vec::with_capacity(families.len());
    for &family in &families {
        let (curve, log) = run_family(cfg, family)?;
        reports.push(FamilyReport {
            family,
            ns: curve.ns(),
            e_avg: curve.rows.iter().map(|r| r.e_avg).collect(),
            fit: fit_rate(&curve, false).ok(),
            fit_with_log: fit_rate(&curve, true).ok(),
            log: log.entries,
        });
        curves.push(curve);
    }
    let reference: Vec<(usize, f64)> = curves[0].rows.iter().map(|r| (r.n, r.e_avg)).collect();
    let mut ratios = Vec::new();
    for (curve, &family) in curves.iter().zip(&families).skip(1) {
        let mut n = Vec::new();
        let mut ratio = Vec::new();
        for row in &curve.rows {
            if let Some(e) = interpolate_loglog(&reference, row.n) {
                n.push(row.n);
                ratio.push(e / row.e_avg);
            }
        }
        let growing = ratio.len() >= 2 && ratio.windows(2).all(|w| w[1] > w[0]);
        let flagged = growing && ratio.last().is_some_and(|&r| r > cfg.ratio_flag);
        ratios.push(RatioTable { family, n, ratio, flagged });
    }
    Ok(CompareReport { reference: families[0], families: reports, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(ns: &[usize], f: impl Fn(f64) -> f64) -> ErrorCurve {
        ErrorCurve::new(
            ns.iter()
                .map(|&n| CurveRow {
                    n,
                    e_avg: f(n as f64),
                    e_all: None,
                    e_wor_bound: None,
                    provenance: Provenance::Grid,
                    level: None,
                })
                .collect(),
        )
    }

    #[test]
    fn fit_recovers_pure_power() {
        let c = synthetic(&[16, 32, 64, 128, 256, 512, 1024], |n| 3.0 * n.powf(-0.5));
        let f = fit_rate(&c, false).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12);
        assert_eq!(f.log_power, 0.0);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn fit_recovers_log_term() {
        let ns: Vec<usize> = (5..=12).map(|k| 1usize << k).collect();
        let c = synthetic(&ns, |n| n.powf(-0.5) * n.ln());
        let f = fit_rate(&c, true).unwrap();
        assert!((f.slope - 0.5).abs() < 0.02, "{f:?}");
        assert!((f.log_power - 1.0).abs() < 0.1, "{f:?}");
    }

    #[test]
    fn fit_dedups_and_checks_span() {
        let ns = [16, 32, 64, 128, 256, 512, 1024];
        let c = synthetic(&ns, |n| 2.0 * n.powf(-0.7));
        let mut doubled = c.clone();
        doubled.rows.extend(c.rows.clone());
        assert_eq!(fit_rate(&c, true).unwrap(), fit_rate(&doubled, true).unwrap());
        let short = synthetic(&[16, 32, 64, 128, 256], |n| 1.0 / n);
        assert!(matches!(fit_rate(&short, false), Err(Error::InsufficientSpan(_))));
        let narrow = synthetic(&[100, 120, 140, 160, 180, 200, 220], |n| 1.0 / n);
        assert!(matches!(fit_rate(&narrow, false), Err(Error::InsufficientSpan(_))));
    }

    #[test]
    fn complexity_examples() {
        let spec = ProblemSpec::new(vec![0], 100.0).unwrap();
        let c = synthetic(&[10, 100, 1000], |n| 1.0 / n);
        assert_eq!(complexity_estimate(&c, 0.01, &spec).unwrap(), (100, 10200.0));
        assert_eq!(complexity_estimate(&c, 0.5, &spec).unwrap().0, 10);
        let (n, _) = complexity_estimate(&c, 0.005, &spec).unwrap();
        assert_eq!(n, 200);
        assert!(matches!(
            complexity_estimate(&c, 1e-4, &spec),
            Err(Error::EpsilonUnreachable { .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let mut c = synthetic(&[4, 2, 8], |n| 1.0 / n);
        c.rows[1].e_all = Some(0.1);
        c.rows[2].level = Some(3);
        let text = c.to_csv();
        assert!(text.starts_with("n,e_avg,e_all,e_wor_bound,provenance,level\n2,0.5,"));
        assert_eq!(ErrorCurve::from_csv(&text).unwrap(), c);
        assert!(ErrorCurve::from_csv("n,e\n1,2\n").is_err());
    }

    #[test]
    fn config_defaults_and_validation() {
        let cfg = Config::from_json(r#"{"d":2,"r":[0,0],"design":"grid","n_list":[4,16]}"#).unwrap();
        assert_eq!(cfg.c, 100.0);
        assert_eq!(cfg.eig_m, 2048);
        assert_eq!(cfg.sup_grid(), 129);
        assert!(Config::from_json(r#"{"d":2,"r":[0]}"#).is_err());
        assert!(Config::from_json(r#"{"d":1,"r":[0],"bogus":1}"#).is_err());
        let back = Config::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn one_dimensional_grid_curve() {
        let mut cfg = Config::new(vec![0], Provenance::Grid);
        cfg.n_list = Some(vec![16, 32, 64, 128]);
        cfg.eig_m = 512;
        let (curve, log) = run_curve(&cfg).unwrap();
        assert_eq!(curve.ns(), vec![16, 32, 64, 128]);
        for w in curve.rows.windows(2) {
            assert!(w[1].e_avg < w[0].e_avg);
        }
        for r in &curve.rows {
            let e_all = r.e_all.unwrap();
            assert!(e_all <= r.e_avg && r.e_avg <= r.e_wor_bound.unwrap());
            assert!((r.e_avg.powi(2) * 6.0 * r.n as f64 - 1.0).abs() < 1e-10);
        }
        assert_eq!(log.entries.len(), 4);
    }

    #[test]
    fn hyperbolic_levels_need_levels() {
        let cfg = Config::new(vec![0, 0], Provenance::MappedHyperbolicCross);
        assert!(matches!(run_curve(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn self_comparison_ratio_is_one() {
        let mut cfg = Config::new(vec![0], Provenance::Grid);
        cfg.n_list = Some(vec![4, 8, 16]);
        cfg.eig_m = 64;
        cfg.designs = Some(vec![Provenance::Grid, Provenance::Grid]);
        let rep = compare_designs(&cfg).unwrap();
        assert_eq!(rep.ratios[0].ratio, vec![1.0, 1.0, 1.0]);
        assert!(!rep.ratios[0].flagged);
    }
}

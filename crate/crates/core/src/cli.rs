//! Command-line front end: `dzeros <command> --config <path> [--out <dir>] [--seed <u64>]`.
//!
//! Each command reads a JSON config, writes JSON reports and CSV tables into
//! the output directory, and maps failures to exit codes: 2 for bad input,
//! 3 for numeric failures or failed checks.

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::blaschke::{
    blaschke_sum, carleson_check_on_grid, exceptional_cover_bound, frostman_on_grid,
    level_set_from_grid, shapiro_shields, CarlesonCheck, Zero, ZeroSequence,
};
use crate::capacity::{capacity_curve, curve_to_csv, Capacity, SolverParams};
use crate::circle_sets::{
    cantor_criteria, cantor_level, perfect_symmetric, t_gamma_threshold, Arc, CantorFamily,
    CantorSpec, CircleSet, CANTOR_SERIES_TERMS,
};
use crate::dirichlet::PowerSeries;
use crate::error::Error;
use crate::series::PartialSumSeries;
use crate::zerosets::{
    assign_arguments, blas_condition, corollary1_sum, corollary2_sum, corollary3_sum,
    example2_sequence, hausdorff_diagnostic, lemma_sum, log_square_sum, prop2_report,
    remark_report, remark_sequence, t_gamma_integral, theorem1_sum, ConditionReport,
    ModulusOmega,
};

#[derive(Debug, Clone, Parser)]
#[command(name = "dzeros", version, about = "Zero sets of the Dirichlet space")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Seed for randomized suites.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Cantor construction and its measure, capacity and Carleson criteria.
    Cantor,
    /// Capacity curve `t ↦ cap(E_t)` with its upper bound.
    Capacity,
    /// Both sides of Carleson's formula for `D(Bf)`.
    CarlesonCheck,
    /// A zero sequence and its condition suite.
    Zeros,
    /// Exceptional level sets of the Frostman sum and the capacity cover bound.
    Exceptional,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) | CliError::CheckFailed(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::Range { .. } => CliError::Input(e.to_string()),
            Error::Resolution { .. } | Error::Numeric { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Caps the global thread pool at `DZEROS_THREADS` when set.
pub fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("DZEROS_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Input(format!("DZEROS_THREADS = {v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    Ok(())
}

/// Runs one command and returns the files written.
pub fn run(args: &Args) -> CliResult<Vec<PathBuf>> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.config.display())))?;
    std::fs::create_dir_all(&args.out)?;
    let mut out = Output::new(&args.out);
    match args.command {
        Command::Cantor => cmd_cantor(&serde_json::from_str(&text)?, &mut out)?,
        Command::Capacity => cmd_capacity(&serde_json::from_str(&text)?, &mut out)?,
        Command::CarlesonCheck => cmd_carleson_check(&serde_json::from_str(&text)?, args.seed, &mut out)?,
        Command::Zeros => cmd_zeros(&serde_json::from_str(&text)?, &mut out)?,
        Command::Exceptional => cmd_exceptional(&serde_json::from_str(&text)?, &mut out)?,
    }
    Ok(out.files)
}

/// Files written by a command.
struct Output {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Output {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn text(&mut self, name: &str, body: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, body)?;
        self.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let body = to_json_string(value)?;
        self.text(name, &body)
    }
}

/// Pretty JSON with every float printed to 17 significant digits. JSON has
/// no infinity, so non-finite floats come out as `null`; types that need to
/// say "infinite" (such as [`Capacity`]) serialize a string themselves.
pub fn to_json_string<T: Serialize>(value: &T) -> CliResult<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17::default());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| CliError::Input(e.to_string()))
}

#[derive(Default)]
struct Sig17 {
    pretty: serde_json::ser::PrettyFormatter<'static>,
}

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        w.write_all(crate::fmt_f64(v).as_bytes())
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_object_value(w)
    }
}

/// An ordered JSON object of heterogeneous fields, serialized straight
/// through [`Sig17`] without an intermediate `serde_json::Value`.
#[derive(Default)]
pub struct Doc<'a> {
    fields: Vec<(String, Box<dyn erased_serde::Serialize + 'a>)>,
}

impl<'a> Doc<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(mut self, key: &str, value: impl Serialize + 'a) -> Self {
        self.insert(key, value);
        self
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize + 'a) {
        self.fields.push((key.to_string(), Box::new(value)));
    }
}

impl Serialize for Doc<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.fields.len()))?;
        for (k, v) in &self.fields {
            map.serialize_entry(k, v.as_ref())?;
        }
        map.end()
    }
}

// ---------------------------------------------------------------- sets

/// A subset of the circle in a config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetConfig {
    /// `[start, length]` pairs.
    Arcs { arcs: Vec<[f64; 2]> },
    Points { points: Vec<f64> },
    /// Level `level` of a Cantor construction (default: its depth).
    Cantor { spec: CantorSpec, level: Option<usize> },
    Full,
}

impl SetConfig {
    pub fn build(&self) -> CliResult<CircleSet> {
        Ok(match self {
            SetConfig::Arcs { arcs } => {
                let arcs = arcs
                    .iter()
                    .map(|[s, l]| Arc::new(*s, *l))
                    .collect::<crate::Result<Vec<_>>>()?;
                CircleSet::from_arcs(arcs)
            }
            SetConfig::Points { points } => {
                if points.iter().any(|p| !p.is_finite()) {
                    return Err(CliError::Input("point angles must be finite".into()));
                }
                CircleSet::points(points)
            }
            SetConfig::Cantor { spec, level } => cantor_level(spec, level.unwrap_or(spec.depth))?,
            SetConfig::Full => CircleSet::full(),
        })
    }
}

// ---------------------------------------------------------------- cantor

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorConfig {
    pub spec: CantorSpec,
    #[serde(default = "default_cantor_terms")]
    pub terms: usize,
    /// Arcs of the set are written only up to this depth.
    #[serde(default = "default_set_depth")]
    pub write_set_depth: usize,
}

fn default_cantor_terms() -> usize {
    CANTOR_SERIES_TERMS
}

fn default_set_depth() -> usize {
    14
}

fn cmd_cantor(cfg: &CantorConfig, out: &mut Output) -> CliResult<()> {
    let spec = &cfg.spec;
    let crit = cantor_criteria(spec, cfg.terms)?;
    let arcs = if crit.valid && spec.depth <= cfg.write_set_depth {
        Some(cantor_level(spec, spec.depth)?.to_pairs())
    } else {
        None
    };
    out.json(
        "cantor_set.json",
        &json!({ "spec": spec, "level": spec.depth, "arcs": arcs }),
    )?;
    let threshold = match spec.family {
        CantorFamily::Ratio(r) => Some(t_gamma_threshold(r)),
        _ => None,
    };
    out.json(
        "cantor_criteria.json",
        &Doc::new().field("criteria", &crit).field("t_gamma_threshold", threshold),
    )?;
    if let Some(m) = &crit.measure {
        out.text("cantor_measure.csv", &m.to_csv())?;
    }
    out.text("cantor_capacity.csv", &crit.capacity.to_csv())?;
    if let Some(c) = &crit.carleson {
        out.text("cantor_carleson.csv", &c.to_csv())?;
    }
    Ok(())
}

// ---------------------------------------------------------------- capacity

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGrid {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityConfig {
    pub set: SetConfig,
    #[serde(default)]
    pub t: Option<Vec<f64>>,
    #[serde(default)]
    pub t_grid: Option<LogGrid>,
    #[serde(default)]
    pub solver: SolverParams,
}

#[derive(Serialize)]
struct CapacityPoint {
    t: f64,
    cap: Capacity,
    upper_bound: Capacity,
    kkt_residual: f64,
    converged: bool,
    violates_bound: bool,
}

fn log_grid(g: &LogGrid) -> CliResult<Vec<f64>> {
    if !(g.from > 0.0 && g.to > g.from && g.count >= 2) {
        return Err(CliError::Input("t_grid needs 0 < from < to and count >= 2".into()));
    }
    let (a, b) = (g.from.ln(), g.to.ln());
    Ok((0..g.count)
        .map(|i| (a + (b - a) * i as f64 / (g.count - 1) as f64).exp())
        .collect())
}

fn cmd_capacity(cfg: &CapacityConfig, out: &mut Output) -> CliResult<()> {
    let e = cfg.set.build()?;
    if e.is_empty() {
        return Err(CliError::Input("the set is empty".into()));
    }
    let ts = match (&cfg.t, &cfg.t_grid) {
        (Some(t), None) => t.clone(),
        (None, Some(g)) => log_grid(g)?,
        _ => return Err(CliError::Input("exactly one of `t`, `t_grid` is required".into())),
    };
    if ts.iter().any(|t| *t > 2.0) {
        return Err(CliError::Input("t values must lie in (0, 2]".into()));
    }
    let curve = capacity_curve(&e, &ts, &cfg.solver)?;
    out.text("capacity.csv", &curve_to_csv(&curve))?;
    let points: Vec<CapacityPoint> = curve
        .iter()
        .map(|p| CapacityPoint {
            t: p.t,
            cap: p.capacity,
            upper_bound: p.upper_bound,
            kkt_residual: p.kkt_residual,
            converged: p.kkt_residual <= cfg.solver.tol,
            violates_bound: match (p.capacity, p.upper_bound) {
                (Capacity::Finite(c), Capacity::Finite(b)) => c > b * (1.0 + 1e-9),
                (Capacity::Infinite, Capacity::Finite(_)) => true,
                _ => false,
            },
        })
        .collect();
    let violations = points.iter().filter(|p| p.violates_bound).count();
    let unconverged = points.iter().filter(|p| !p.converged).count();
    out.json(
        "capacity.json",
        &Doc::new()
            .field("formula", "cap(E_t) <= (∫_t^2 ds/|E_s|)^{-1}")
            .field("solver", cfg.solver)
            .field("points", &points)
            .field("violations", violations)
            .field("unconverged", unconverged),
    )?;
    if unconverged > 0 {
        return Err(CliError::Numeric(format!(
            "equilibrium solver did not reach the KKT tolerance at {unconverged} grid points; best iterates written"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------- carleson

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomCarleson {
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_max_zeros")]
    pub max_zeros: usize,
    #[serde(default = "default_max_r")]
    pub max_r: f64,
    #[serde(default = "default_max_degree")]
    pub max_degree: usize,
}

fn default_instances() -> usize {
    200
}
fn default_max_zeros() -> usize {
    8
}
fn default_max_r() -> f64 {
    0.9
}
fn default_max_degree() -> usize {
    16
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarlesonConfig {
    #[serde(default)]
    pub zeros: Option<Vec<[f64; 2]>>,
    /// Coefficients of `f` as `[re, im]` pairs.
    #[serde(default)]
    pub f: Option<PowerSeries>,
    #[serde(default)]
    pub random: Option<RandomCarleson>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Boundary grid size; chosen automatically when absent.
    #[serde(default)]
    pub grid: Option<usize>,
}

fn default_tolerance() -> f64 {
    1e-6
}

/// A random finite Blaschke product with `1..=max_zeros` zeros of modulus at
/// most `max_r`, and a polynomial of degree `0..=max_degree` with
/// coefficients uniform in the unit square.
pub fn random_carleson_instance(
    rng: &mut ChaCha8Rng,
    max_zeros: usize,
    max_r: f64,
    max_degree: usize,
) -> crate::Result<(ZeroSequence, PowerSeries)> {
    let count = rng.gen_range(1..=max_zeros.max(1));
    let zeros = (0..count)
        .map(|_| Zero::from_polar(rng.gen_range(0.0..=max_r), rng.gen_range(0.0..TAU)))
        .collect::<crate::Result<Vec<_>>>()?;
    let degree = rng.gen_range(0..=max_degree);
    let coeffs: Vec<Complex64> = (0..=degree)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Ok((ZeroSequence::finite(zeros, "random"), PowerSeries::new(coeffs)))
}

fn cmd_carleson_check(cfg: &CarlesonConfig, seed: u64, out: &mut Output) -> CliResult<()> {
    if !(cfg.tolerance > 0.0) {
        return Err(CliError::Input("tolerance must be > 0".into()));
    }
    let mut cases: Vec<(ZeroSequence, PowerSeries)> = Vec::new();
    match (&cfg.zeros, &cfg.f, &cfg.random) {
        (Some(z), Some(f), None) => cases.push((ZeroSequence::from_pairs(z)?, f.clone())),
        (None, None, Some(r)) => {
            if !(r.max_r >= 0.0 && r.max_r < 1.0) {
                return Err(CliError::Input("max_r must lie in [0, 1)".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..r.instances {
                cases.push(random_carleson_instance(&mut rng, r.max_zeros, r.max_r, r.max_degree)?);
            }
        }
        _ => {
            return Err(CliError::Input(
                "give either `zeros` and `f`, or `random`".into(),
            ))
        }
    }
    let checks: Vec<CarlesonCheck> = cases
        .iter()
        .map(|(z, f)| carleson_check_on_grid(z, f, cfg.grid))
        .collect::<crate::Result<_>>()?;
    let max_rel = checks.iter().map(|c| c.rel_error).fold(0.0, f64::max);
    let pass = max_rel <= cfg.tolerance;
    let formula = "D(Bf) = D(f) + (1/2π) ∫ Σ P_{z_n} |f|²";
    let body = if checks.len() == 1 {
        let c = &checks[0];
        Doc::new()
            .field("formula", formula)
            .field("lhs", c.lhs)
            .field("rhs", c.rhs)
            .field("rel_error", c.rel_error)
            .field("detail", c)
            .field("tolerance", cfg.tolerance)
            .field("pass", pass)
    } else {
        Doc::new()
            .field("formula", formula)
            .field("seed", seed)
            .field("instances", &checks)
            .field("max_rel_error", max_rel)
            .field("tolerance", cfg.tolerance)
            .field("pass", pass)
    };
    out.json("carleson.json", &body)?;
    if !pass {
        return Err(CliError::CheckFailed(format!(
            "relative error {max_rel:e} exceeds tolerance {:e}",
            cfg.tolerance
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------- zeros

/// Zero-sequence generators.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ZeroSpec {
    /// `[r, θ]` pairs.
    Explicit { zeros: Vec<[f64; 2]> },
    /// `1 - r_n = n^{-p}` for `n ≥ 2`.
    Power { p: f64 },
    /// `ln(1 - r_n) = -n^{exponent}`; `exponent = 2` gives `r_n = 1 - e^{-n²}`.
    Shapiro {
        #[serde(default = "two")]
        exponent: f64,
    },
    /// The two-parameter family accumulating at a countable set.
    Example2 { gamma: f64 },
    /// Slowly approaching radii over a capacity-zero Cantor level.
    Remark {
        #[serde(default = "one")]
        s: f64,
        #[serde(default = "four")]
        depth: usize,
    },
    /// Interval centers of a positive-capacity Cantor set.
    Prop2 {
        #[serde(default = "third_spec")]
        spec: CantorSpec,
        #[serde(default = "default_levels")]
        levels: usize,
        #[serde(default = "default_probes")]
        probes: usize,
    },
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn four() -> usize {
    4
}
fn third_spec() -> CantorSpec {
    perfect_symmetric(1.0 / 3.0, 40).expect("ratio 1/3 is valid")
}
fn default_levels() -> usize {
    24
}
fn default_probes() -> usize {
    20
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZerosConfig {
    pub generator: ZeroSpec,
    #[serde(default = "default_terms")]
    pub terms: usize,
    /// The set `E`; radial generators are placed on rays through its endpoints.
    #[serde(default)]
    pub set: Option<SetConfig>,
    #[serde(default)]
    pub omega: Option<ModulusOmega>,
    /// Exponent of the argument-distance condition.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Exponent of the `exp(-2/d^γ)` condition.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Exponent of the inverse-measure condition, in `(0, 1/2)`.
    #[serde(default = "default_alpha3")]
    pub alpha3: f64,
    /// Number of zeros written to `sequence.json`.
    #[serde(default = "default_write")]
    pub write_zeros: usize,
}

fn default_terms() -> usize {
    1 << 16
}
fn default_alpha() -> f64 {
    0.75
}
fn default_gamma() -> f64 {
    0.5
}
fn default_alpha3() -> f64 {
    0.25
}
fn default_write() -> usize {
    1024
}

fn radial(prov: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ZeroSequence {
    ZeroSequence::generated(prov, None, move |i| Zero::from_log_depth(f((i + 1) as f64), 0.0))
}

/// A radial generator and the set its arguments are assigned to.
pub fn radial_sequence(spec: &ZeroSpec, set: Option<&SetConfig>) -> CliResult<Option<(ZeroSequence, CircleSet)>> {
    let radii = match spec {
        ZeroSpec::Power { p } => {
            if !(*p > 0.0) {
                return Err(CliError::Input("p must be > 0".into()));
            }
            let p = *p;
            radial(&format!("1-r_n = n^-{p}, n >= 2"), move |n| -p * (n + 1.0).ln())
        }
        ZeroSpec::Shapiro { exponent } => {
            if !(*exponent > 0.0) {
                return Err(CliError::Input("exponent must be > 0".into()));
            }
            let x = *exponent;
            radial(&format!("ln(1-r_n) = -n^{x}"), move |n| -n.powf(x))
        }
        _ => return Ok(None),
    };
    let e = match set {
        Some(s) => s.build()?,
        None => CircleSet::point(0.0),
    };
    Ok(Some((assign_arguments(&radii, &e)?, e)))
}

fn report(name: &str, formula: &str, s: PartialSumSeries, params: serde_json::Value) -> ConditionReport {
    ConditionReport::new(name, formula, s, params)
}

fn cmd_zeros(cfg: &ZerosConfig, out: &mut Output) -> CliResult<()> {
    let n = cfg.terms;
    if n == 0 {
        return Err(CliError::Input("terms must be >= 1".into()));
    }
    let omega = cfg.omega.clone().map(ModulusOmega::validated).transpose()?;
    let mut conditions: Vec<ConditionReport> = Vec::new();
    let mut extra = Doc::new();
    let zs: ZeroSequence = match &cfg.generator {
        ZeroSpec::Example2 { gamma } => {
            let ex = example2_sequence(*gamma, n)?;
            let g = *gamma;
            conditions.push(report("blaschke", "Σ (1 - |z_n|)", blaschke_sum(&ex.sequence, n)?, json!({})));
            conditions.push(report(
                "distance_exponential",
                "Σ exp(-2/d(z_n,E)^γ)",
                corollary2_sum(&ex.sequence, &ex.set, g, n)?,
                json!({ "gamma": g }),
            ));
            conditions.push(report(
                "argument_distance",
                "Σ d(e^{iθ_n},E)^{2α}",
                corollary1_sum(&ex.sequence, &ex.set, cfg.alpha, n)?,
                json!({ "alpha": cfg.alpha }),
            ));
            extra.insert("t_gamma", t_gamma_integral(&ex.set, g)?);
            extra.insert("n_max", ex.n_max);
            ex.sequence
        }
        ZeroSpec::Remark { s, depth } => {
            let (seq, e) = remark_sequence(*s, *depth)?;
            let r = remark_report(&seq, &e, n)?;
            conditions.push(report("blas", "Σ (1-r_n) ∫_{2(1-r_n)}^2 ω(t)/t² dt, ω = (log 1/t)^{-2}", r.blas.clone(), json!({})));
            conditions.push(report("shapiro_shields", "Σ 1/|log(1 - r_n)|", r.shapiro_shields.clone(), json!({})));
            conditions.push(report("log_square", "Σ 1/log²(1 - r_n)", r.log_square.clone(), json!({})));
            extra.insert("omega_bound", r.omega_bound.clone());
            extra.insert("hausdorff", r.hausdorff.clone());
            seq
        }
        ZeroSpec::Prop2 { spec, levels, probes } => {
            let r = prop2_report(spec, *levels, n, *probes)?;
            let (seq, _) = crate::zerosets::prop2_sequence(spec, *levels)?;
            conditions.push(report("capacity_series", "Σ 2^{-k} log 1/ℓ_k", r.capacity_series.clone(), json!({})));
            conditions.push(report("log_series", "Σ 1/log(1/ℓ_k)", r.log_series.clone(), json!({})));
            conditions.push(report("blaschke", "Σ (1 - |z_n|)", r.blaschke.clone(), json!({})));
            conditions.push(report("blaschke_majorant", "Σ 2^k ℓ_k²", r.blaschke_majorant.clone(), json!({})));
            conditions.push(report("shapiro_shields", "Σ 1/|log(1 - r_n)|", r.shapiro_shields.clone(), json!({})));
            conditions.push(report("theorem1", "Σ ω(2d(z_n,E)), ω = t²", r.theorem1.clone(), json!({})));
            conditions.push(report("frostman", "Σ (1-|z_n|²)/|ζ-z_n|²", r.frostman.clone(), json!({ "theta": r.probes.first().map(|p| p.theta) })));
            extra.insert("sup_ratio", r.sup_ratio);
            extra.insert("ratio_holds", r.ratio_holds);
            extra.insert("blaschke_dominated", r.blaschke_dominated);
            extra.insert("lambda0", r.lambda0);
            extra.insert("probes", r.probes.clone());
            seq
        }
        other => {
            let (seq, e) = match other {
                ZeroSpec::Explicit { zeros } => {
                    let seq = ZeroSequence::from_pairs(zeros)?;
                    let e = match &cfg.set {
                        Some(s) => s.build()?,
                        None => CircleSet::point(0.0),
                    };
                    (seq, e)
                }
                _ => radial_sequence(other, cfg.set.as_ref())?.expect("radial generator"),
            };
            conditions.push(report("blaschke", "Σ (1 - |z_n|)", blaschke_sum(&seq, n)?, json!({})));
            match shapiro_shields(&seq, n) {
                Ok(s) => conditions.push(report("shapiro_shields", "Σ 1/|log(1 - r_n)|", s, json!({}))),
                Err(e) => {
                    extra.insert("shapiro_shields_error", e.to_string());
                }
            }
            conditions.push(report("log_square", "Σ 1/log²(1 - r_n)", log_square_sum(&seq, n)?, json!({})));
            conditions.push(report(
                "argument_distance",
                "Σ d(e^{iθ_n},E)^{2α}",
                corollary1_sum(&seq, &e, cfg.alpha, n)?,
                json!({ "alpha": cfg.alpha }),
            ));
            conditions.push(report(
                "distance_exponential",
                "Σ exp(-2/d(z_n,E)^γ)",
                corollary2_sum(&seq, &e, cfg.gamma, n)?,
                json!({ "gamma": cfg.gamma }),
            ));
            conditions.push(report(
                "inverse_measure",
                "Σ exp(-(∫_{2d(z_n,E)}^2 ds/|E_s|)^α)",
                corollary3_sum(&seq, &e, cfg.alpha3, n)?,
                json!({ "alpha": cfg.alpha3 }),
            ));
            if let Some(w) = &omega {
                let p = serde_json::to_value(w)?;
                conditions.push(report("theorem1", "Σ ω(2d(z_n,E))", theorem1_sum(&seq, &e, w, n)?, p.clone()));
                conditions.push(report(
                    "lemma",
                    "Σ ω(2d(z_n,E)) + (1-|z_n|) ∫_{2d(z_n,E)}^2 ω(t)/t² dt",
                    lemma_sum(&seq, &e, w, n)?,
                    p.clone(),
                ));
                conditions.push(report("blas", "Σ (1-r_n) ∫_{2(1-r_n)}^2 ω(t)/t² dt", blas_condition(&seq, w, n)?, p));
            }
            let prefixes: Vec<usize> = [16usize, 256, 4096].into_iter().filter(|p| *p <= n).collect();
            extra.insert("hausdorff", hausdorff_diagnostic(&seq, &e, &prefixes));
            seq
        }
    };
    out.json("sequence.json", &zs.to_json(cfg.write_zeros.min(n)))?;
    for c in &conditions {
        out.text(&format!("partial_sums_{}.csv", c.condition), &c.series.to_csv())?;
    }
    out.json(
        "zeros_report.json",
        &Doc::new()
            .field("provenance", zs.provenance())
            .field("terms", zs.count(n))
            .field("conditions", &conditions)
            .field("diagnostics", extra),
    )?;
    Ok(())
}

// ---------------------------------------------------------------- exceptional

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExceptionalConfig {
    pub generator: ZeroSpec,
    #[serde(default)]
    pub set: Option<SetConfig>,
    #[serde(default = "default_exc_terms")]
    pub terms: usize,
    pub lambda: Vec<f64>,
    #[serde(default = "default_exc_grid")]
    pub grid: usize,
    /// Starting indices of the cover-bound tails.
    #[serde(default)]
    pub starts: Option<Vec<usize>>,
}

fn default_exc_terms() -> usize {
    4096
}
fn default_exc_grid() -> usize {
    4096
}

fn exceptional_sequence(cfg: &ExceptionalConfig) -> CliResult<ZeroSequence> {
    Ok(match &cfg.generator {
        ZeroSpec::Explicit { zeros } => ZeroSequence::from_pairs(zeros)?,
        ZeroSpec::Example2 { gamma } => example2_sequence(*gamma, cfg.terms)?.sequence,
        ZeroSpec::Remark { s, depth } => remark_sequence(*s, *depth)?.0,
        ZeroSpec::Prop2 { spec, levels, .. } => crate::zerosets::prop2_sequence(spec, *levels)?.0,
        other => radial_sequence(other, cfg.set.as_ref())?.expect("radial generator").0,
    })
}

fn cmd_exceptional(cfg: &ExceptionalConfig, out: &mut Output) -> CliResult<()> {
    if cfg.grid < 4 || cfg.lambda.is_empty() || cfg.lambda.iter().any(|l| !(*l > 0.0)) {
        return Err(CliError::Input("need grid >= 4 and positive λ values".into()));
    }
    let zs = exceptional_sequence(cfg)?;
    let n = zs.count(cfg.terms);
    let sums = frostman_on_grid(&zs, cfg.grid, n);
    let levels: Vec<_> = cfg.lambda.iter().map(|l| level_set_from_grid(&sums, *l)).collect();
    let mut csv = String::from("lambda,measure\n");
    for l in &levels {
        csv.push_str(&format!("{},{}\n", crate::fmt_f64(l.lambda), crate::fmt_f64(l.measure)));
    }
    out.text("exceptional_levels.csv", &csv)?;
    let starts = cfg.starts.clone().unwrap_or_else(|| {
        (0..).map(|k| 1usize << k).take_while(|s| *s <= n.max(1)).collect()
    });
    let (cover, cover_error) = match exceptional_cover_bound(&zs, &starts, n) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    if let Some(c) = &cover {
        let mut csv = String::from("n_start,n_end,value,vacuous\n");
        for b in c {
            csv.push_str(&format!("{},{},{},{}\n", b.n_start, b.n_end, crate::fmt_f64(b.value), b.vacuous));
        }
        out.text("cover_bound.csv", &csv)?;
    }
    // ∫_𝕋 log Σ P_{z_n} |dζ| by the trapezoid rule
    let logs: Vec<f64> = sums.iter().map(|s| s.ln()).collect();
    let log_integral = TAU * crate::summation::pairwise(&logs) / cfg.grid as f64;
    out.json(
        "exceptional.json",
        &Doc::new()
            .field("formula", "E_λ(Z) = {ζ : Σ (1-|z_n|²)/|ζ-z_n|² ≥ λ}")
            .field("provenance", zs.provenance())
            .field("terms", n)
            .field("grid", cfg.grid)
            .field("levels", &levels)
            .field("cover_bound", &cover)
            .field("cover_bound_error", &cover_error)
            .field("log_integral", log_integral)
            .field("full_measure", 2.0 * PI),
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_prints_seventeen_digits() {
        let s = to_json_string(&Doc::new().field("x", 0.1).field("y", f64::INFINITY)).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"y\": null"), "{s}");
        let pos = |k: &str| s.find(k).unwrap();
        assert!(pos("\"x\"") < pos("\"y\""));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn error_exit_codes() {
        assert_eq!(CliError::from(crate::error::Error::Domain { op: "x", msg: String::new() }).exit_code(), 2);
        let r = crate::error::Error::Resolution { op: "x", required: 4, actual: 2 };
        assert_eq!(CliError::from(r).exit_code(), 3);
    }

    #[test]
    fn zero_spec_parses() {
        let z: ZeroSpec = serde_json::from_str(r#"{"name":"shapiro"}"#).unwrap();
        assert!(matches!(z, ZeroSpec::Shapiro { exponent } if exponent == 2.0));
        assert!(serde_json::from_str::<ZeroSpec>(r#"{"name":"nope"}"#).is_err());
        let p: ZeroSpec = serde_json::from_str(r#"{"name":"prop2","levels":10}"#).unwrap();
        assert!(matches!(p, ZeroSpec::Prop2 { levels: 10, .. }));
    }
}

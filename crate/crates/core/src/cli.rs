//! Command-line front end.
//!
//! Exit codes: 0 every verdict passes, 1 a bound is violated, 2 no usable
//! witness `q*`, 3 configuration or I/O error. The last line on stdout is
//! always `VERDICT pass|fail reason=<code>`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::domain::{cube_grid, dk_grid, KVec};
use crate::error::{Error, Result};
use crate::feim::{self, CertifyOptions, Fcn, QStar, NUMERICAL_SLACK};
use crate::harness::{self, MinimaxFit, NoiseKind, NoiseSpec, SuiteConfig, SuiteReport};
use crate::measures::{self, JFamily, MeasureFamily};
use crate::multiplicative::{MultiplicativeSpec, DEFAULT_TAU};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_NO_WITNESS: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// Caps the worker count of the parallel scans.
pub const THREADS_ENV: &str = "FEISTAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "feistab",
    version,
    about = "Stability certificates for the fundamental equation of information"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search the interior lattice for a non-additivity witness q*.
    Witness(CommonArgs),
    /// Supremum of the equation residual over the D_k grid.
    Residual(CommonArgs),
    /// Stability certificate for a (perturbed) exact solution.
    Certify(CommonArgs),
    /// Stability certificate for a (perturbed) J_n measure family.
    CertifySystem(CommonArgs),
    /// Constructive (a, b) against the minimax fit.
    Fit(CommonArgs),
    /// Run a batch of cases; without --config, the built-in matrix.
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NoiseKindArg {
    Uniform,
    Checkerboard,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON config file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Power atom t^alpha on every coordinate.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    /// Lattice resolution m.
    #[arg(long)]
    grid: Option<u32>,
    /// Noise amplitude added to the exact function.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    noise_kind: Option<NoiseKindArg>,
    /// `auto` or comma-separated coordinates.
    #[arg(long)]
    qstar: Option<String>,
    /// Highest level N for certify-system.
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    /// Exact solution parameters `a,b`.
    #[arg(long, allow_hyphen_values = true)]
    exact: Option<String>,
    /// J_n parameters `c,d`.
    #[arg(long, allow_hyphen_values = true)]
    cd: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// JSON suite config (`{"cases": [...]}`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the randomized cases of the built-in matrix.
    #[arg(long, default_value_t = 2009)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// `q*` selection as written in the config: `"auto"` or a coordinate list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QStarSetting {
    Auto(String),
    Explicit(Vec<f64>),
}

impl Default for QStarSetting {
    fn default() -> Self {
        QStarSetting::Auto("auto".into())
    }
}

/// Run configuration, as read from `--config` and echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    #[serde(rename = "M")]
    pub m: Option<MultiplicativeSpec>,
    pub k: Option<usize>,
    pub grid: u32,
    pub noise: Option<NoiseSpec>,
    pub qstar: QStarSetting,
    pub levels: usize,
    pub tau: f64,
    pub exact: [f64; 2],
    pub cd: [f64; 2],
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            m: None,
            k: None,
            grid: 16,
            noise: None,
            qstar: QStarSetting::default(),
            levels: 5,
            tau: DEFAULT_TAU,
            exact: [1.0, 0.0],
            cd: [1.0, 0.0],
            out: None,
            format: Format::Json,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let m = self.m.as_ref().ok_or_else(|| {
            Error::Config("no multiplicative spec: pass --alpha or set \"M\"".into())
        })?;
        if let Some(k) = self.k {
            if k != m.dim() {
                return Err(Error::Config(format!(
                    "k = {k} but M has {} atoms",
                    m.dim()
                )));
            }
        }
        if self.grid < 2 {
            return Err(Error::Config(format!(
                "grid must be >= 2, got {}",
                self.grid
            )));
        }
        if self.levels < 2 {
            return Err(Error::Config(format!(
                "levels must be >= 2, got {}",
                self.levels
            )));
        }
        if self.tau.is_nan() || self.tau <= 0.0 {
            return Err(Error::Config(format!("tau must be > 0, got {}", self.tau)));
        }
        if let Some(n) = &self.noise {
            n.validate()?;
        }
        if let QStarSetting::Auto(s) = &self.qstar {
            if s != "auto" {
                return Err(Error::Config(format!(
                    "qstar must be \"auto\" or a coordinate list, got {s:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &MultiplicativeSpec {
        self.m.as_ref().expect("validated")
    }

    pub fn qstar(&self) -> Result<QStar> {
        match &self.qstar {
            QStarSetting::Auto(_) => Ok(QStar::Auto {
                resolution: self.grid,
            }),
            QStarSetting::Explicit(c) => Ok(QStar::Explicit(KVec::new(c.iter().copied())?)),
        }
    }

    fn opts(&self) -> CertifyOptions {
        CertifyOptions {
            tau: self.tau,
            ..CertifyOptions::default()
        }
    }
}

fn parse_pair(s: &str, what: &str) -> Result<[f64; 2]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Config(format!("{what}: {e}")))?;
    match v.as_slice() {
        [a, b] => Ok([*a, *b]),
        _ => Err(Error::Config(format!(
            "{what} expects two comma-separated numbers, got {s:?}"
        ))),
    }
}

fn resolve_config(args: &CommonArgs) -> Result<Config> {
    let mut cfg = match &args.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => Config::default(),
    };
    if let Some(k) = args.k {
        cfg.k = Some(k);
    }
    if let Some(alpha) = args.alpha {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be > 0, got {alpha}")));
        }
        let k = cfg.k.unwrap_or(1);
        cfg.k = Some(k);
        cfg.m = Some(MultiplicativeSpec::power(alpha, k));
    }
    if let Some(g) = args.grid {
        cfg.grid = g;
    }
    if args.noise.is_some() || args.seed.is_some() || args.noise_kind.is_some() {
        let prev = cfg.noise.unwrap_or(NoiseSpec::uniform(0.0, 0));
        let amplitude = args.noise.unwrap_or(prev.amplitude);
        let seed = args.seed.unwrap_or(prev.seed);
        let kind = match args.noise_kind {
            Some(NoiseKindArg::Uniform) => NoiseKind::Uniform,
            Some(NoiseKindArg::Checkerboard) => NoiseKind::Checkerboard {
                resolution: cfg.grid,
            },
            None => prev.kind,
        };
        cfg.noise = Some(NoiseSpec {
            amplitude,
            seed,
            kind,
        });
    }
    if let Some(q) = &args.qstar {
        cfg.qstar = if q.trim() == "auto" {
            QStarSetting::default()
        } else {
            let coords = q
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("qstar: {e}")))?;
            QStarSetting::Explicit(coords)
        };
    }
    if let Some(n) = args.levels {
        cfg.levels = n;
    }
    if let Some(t) = args.tau {
        cfg.tau = t;
    }
    if let Some(s) = &args.exact {
        cfg.exact = parse_pair(s, "--exact")?;
    }
    if let Some(s) = &args.cd {
        cfg.cd = parse_pair(s, "--cd")?;
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// JSON report of a single command. Every key is always present; fields a
/// command does not produce are `null`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Config,
    pub qstar: Option<KVec>,
    pub defect: Option<f64>,
    pub eps_measured: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub sup_deviation: Option<f64>,
    pub max_violation: Option<f64>,
    pub points_checked: Option<usize>,
    pub eps_seq: Option<Vec<f64>>,
    pub minimax: Option<MinimaxFit>,
    pub verdict: String,
    pub reason: String,
    pub runtime_ms: f64,
    #[serde(skip)]
    levels: Vec<measures::LevelCheck>,
}

impl Report {
    fn new(command: &str, config: Config) -> Self {
        Report {
            command: command.into(),
            config,
            qstar: None,
            defect: None,
            eps_measured: None,
            a: None,
            b: None,
            c: None,
            d: None,
            sup_deviation: None,
            max_violation: None,
            points_checked: None,
            eps_seq: None,
            minimax: None,
            verdict: "fail".into(),
            reason: String::new(),
            runtime_ms: 0.0,
            levels: Vec::new(),
        }
    }
}

#[derive(Debug, Serialize)]
struct CsvRow {
    command: String,
    row: String,
    qstar: String,
    defect: Option<f64>,
    eps_measured: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    d: Option<f64>,
    sup_deviation: Option<f64>,
    max_violation: Option<f64>,
    points_checked: Option<usize>,
    verdict: String,
}

fn join_coords(q: Option<&KVec>) -> String {
    q.map(|q| {
        q.coords()
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(";")
    })
    .unwrap_or_default()
}

fn report_rows(r: &Report) -> Vec<CsvRow> {
    let base = |row: String| CsvRow {
        command: r.command.clone(),
        row,
        qstar: join_coords(r.qstar.as_ref()),
        defect: r.defect,
        eps_measured: r.eps_measured,
        a: r.a,
        b: r.b,
        c: r.c,
        d: r.d,
        sup_deviation: r.sup_deviation,
        max_violation: r.max_violation,
        points_checked: r.points_checked,
        verdict: r.verdict.clone(),
    };
    if r.levels.is_empty() {
        return vec![base("all".into())];
    }
    r.levels
        .iter()
        .map(|l| CsvRow {
            sup_deviation: Some(l.max_deviation),
            max_violation: Some(l.max_violation),
            points_checked: Some(l.points_checked),
            verdict: if l.max_violation <= NUMERICAL_SLACK {
                "pass"
            } else {
                "fail"
            }
            .into(),
            ..base(format!("n={}", l.n))
        })
        .collect()
}

fn suite_rows(r: &SuiteReport) -> Vec<CsvRow> {
    r.results
        .iter()
        .map(|c| {
            let cert = c.certificate.as_ref();
            let sys = c.system.as_ref();
            CsvRow {
                command: "suite".into(),
                row: c.id.clone(),
                qstar: join_coords(cert.map(|x| &x.qstar).or(sys.map(|s| &s.qstar))),
                defect: cert.map(|x| x.defect).or(sys.map(|s| s.defect)),
                eps_measured: c.residual,
                a: cert.map(|x| x.a),
                b: cert.map(|x| x.b),
                c: sys.map(|s| s.c),
                d: sys.map(|s| s.d),
                sup_deviation: cert.map(|x| x.sup_deviation),
                max_violation: cert
                    .map(|x| x.max_violation)
                    .or(sys.map(|s| s.max_violation())),
                points_checked: cert
                    .map(|x| x.points_checked)
                    .or(sys.map(|s| s.points_checked())),
                verdict: if c.verdict.is_pass() { "pass" } else { "fail" }.into(),
            }
        })
        .collect()
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn emit(
    path: Option<&Path>,
    format: Format,
    json: impl FnOnce() -> Result<Vec<u8>>,
    csv: impl FnOnce() -> Result<Vec<u8>>,
) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let bytes = match format {
        Format::Json => json()?,
        Format::Csv => csv()?,
    };
    write_atomic(path, &bytes)
}

fn exit_for(e: &Error) -> (i32, &'static str) {
    match e {
        Error::NoWitness { .. } | Error::DegenerateWitness { .. } => {
            (EXIT_NO_WITNESS, "no_witness")
        }
        Error::Config(_) | Error::Io(_) => (EXIT_CONFIG, "config"),
        _ => (EXIT_CONFIG, "error"),
    }
}

fn base_fcn(cfg: &Config) -> Fcn {
    let f = Fcn::exact(cfg.exact[0], cfg.exact[1], cfg.spec().clone());
    match cfg.noise {
        Some(n) => harness::perturb(f, n),
        None => f,
    }
}

fn run_command(name: &str, cfg: &Config, report: &mut Report) -> Result<bool> {
    let m = cfg.spec();
    let k = m.dim();
    match name {
        "witness" => {
            let w = m.find_witness(cfg.grid, cfg.tau)?;
            println!("q* = {:?}, defect = {:e}", w.qstar, w.defect);
            report.qstar = Some(w.qstar);
            report.defect = Some(w.defect);
            Ok(true)
        }
        "residual" => {
            let grid: Vec<_> = dk_grid(k, cfg.grid).collect();
            let sup = feim::sup_residual(&base_fcn(cfg), m, &grid)?;
            println!("sup_residual = {:e} over {} pairs", sup.value, grid.len());
            report.eps_measured = Some(sup.value);
            report.points_checked = Some(grid.len());
            Ok(true)
        }
        "certify" => {
            let dgrid: Vec<_> = dk_grid(k, cfg.grid).collect();
            let cube: Vec<_> = cube_grid(k, cfg.grid).collect();
            let cert = feim::certify(&base_fcn(cfg), m, &dgrid, &cube, &cfg.qstar()?, &cfg.opts())?;
            println!(
                "eps = {:e}, (a, b) = ({}, {}), sup_deviation = {:e}, max_violation = {:e}",
                cert.eps_measured, cert.a, cert.b, cert.sup_deviation, cert.max_violation
            );
            report.qstar = Some(cert.qstar.clone());
            report.defect = Some(cert.defect);
            report.eps_measured = Some(cert.eps_measured);
            report.a = Some(cert.a);
            report.b = Some(cert.b);
            report.sup_deviation = Some(cert.sup_deviation);
            report.max_violation = Some(cert.max_violation);
            report.points_checked = Some(cert.points_checked);
            Ok(cert.verdict.is_pass())
        }
        "certify-system" => {
            let mut fam = MeasureFamily::ExactJ(JFamily::new(cfg.cd[0], cfg.cd[1], m.clone()));
            if let Some(n) = cfg.noise {
                fam = MeasureFamily::perturbed_levels(fam, n, cfg.levels);
            }
            let cert =
                measures::certify_system(&fam, cfg.levels, cfg.grid, &cfg.qstar()?, &cfg.opts())?;
            println!(
                "eps_seq = {:?}, (c, d) = ({}, {}), max_violation = {:e}",
                cert.eps_seq,
                cert.c,
                cert.d,
                cert.max_violation()
            );
            report.qstar = Some(cert.qstar.clone());
            report.defect = Some(cert.defect);
            report.eps_measured = Some(cert.feim_eps);
            report.c = Some(cert.c);
            report.d = Some(cert.d);
            report.max_violation = Some(cert.max_violation());
            report.sup_deviation = Some(
                cert.levels
                    .iter()
                    .map(|l| l.max_deviation)
                    .fold(0.0, f64::max),
            );
            report.points_checked = Some(cert.points_checked());
            report.eps_seq = Some(cert.eps_seq.clone());
            report.levels = cert.levels.clone();
            Ok(cert.verdict.is_pass())
        }
        "fit" => {
            let f = base_fcn(cfg);
            let (qstar, defect) = cfg.qstar()?.resolve(m, cfg.tau)?;
            let (a, b) = feim::construct_ab(&f, m, &qstar, cfg.tau)?;
            let cube: Vec<_> = cube_grid(k, cfg.grid).collect();
            let fitted = Fcn::exact(a, b, m.clone());
            let mut constructive = 0.0f64;
            for x in &cube {
                constructive = constructive.max((f.eval(x)? - fitted.eval(x)?).abs());
            }
            let mm = harness::minimax_fit_from(&f, m, &cube, (a, b))?;
            println!(
                "constructive deviation = {constructive:e}, minimax deviation = {:e}",
                mm.deviation
            );
            report.qstar = Some(qstar);
            report.defect = Some(defect);
            report.a = Some(a);
            report.b = Some(b);
            report.sup_deviation = Some(constructive);
            report.max_violation = Some(mm.deviation - constructive);
            report.points_checked = Some(cube.len());
            report.minimax = Some(mm);
            Ok(mm.deviation <= constructive + NUMERICAL_SLACK)
        }
        other => unreachable!("unknown command {other}"),
    }
}

fn verdict_line(pass: bool, reason: &str) {
    println!(
        "VERDICT {} reason={reason}",
        if pass { "pass" } else { "fail" }
    );
}

fn run_single(name: &str, args: &CommonArgs) -> i32 {
    let cfg = match resolve_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            verdict_line(false, "config");
            return EXIT_CONFIG;
        }
    };
    let start = Instant::now();
    let mut report = Report::new(name, cfg.clone());
    let (code, reason) = match run_command(name, &cfg, &mut report) {
        Ok(true) => (EXIT_PASS, "ok"),
        Ok(false) => (EXIT_VIOLATION, "violation"),
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    };
    report.verdict = if code == EXIT_PASS { "pass" } else { "fail" }.into();
    report.reason = reason.into();
    report.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let written = emit(
        cfg.out.as_deref(),
        cfg.format,
        || serde_json::to_vec_pretty(&report).map_err(|e| Error::Io(e.to_string())),
        || csv_bytes(&report_rows(&report)),
    );
    if let Err(e) = written {
        eprintln!("error: {e}");
        verdict_line(false, "config");
        return EXIT_CONFIG;
    }
    verdict_line(code == EXIT_PASS, reason);
    code
}

fn run_suite_cmd(args: &SuiteArgs) -> i32 {
    let config: Result<SuiteConfig> = match &args.config {
        Some(p) => std::fs::read_to_string(p)
            .map_err(Error::from)
            .and_then(|s| Ok(serde_json::from_str(&s)?)),
        None => Ok(harness::default_suite(args.seed)),
    };
    let report = match config.and_then(|c| harness::run_suite(&c)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            verdict_line(false, "config");
            return EXIT_CONFIG;
        }
    };
    println!(
        "{} cases: {} passed, {} failed",
        report.results.len(),
        report.passed,
        report.failed
    );
    for r in report.results.iter().filter(|r| !r.verdict.is_pass()) {
        println!("FAILED {} outcome={}", r.id, r.outcome);
    }
    let written = emit(
        args.out.as_deref(),
        args.format,
        || serde_json::to_vec_pretty(&report).map_err(|e| Error::Io(e.to_string())),
        || csv_bytes(&suite_rows(&report)),
    );
    if let Err(e) = written {
        eprintln!("error: {e}");
        verdict_line(false, "config");
        return EXIT_CONFIG;
    }
    let pass = report.failed == 0;
    verdict_line(pass, if pass { "ok" } else { "violation" });
    if pass {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    }
}

fn init_threads() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            if code != EXIT_PASS {
                verdict_line(false, "config");
            }
            return code;
        }
    };
    init_threads();
    match &cli.command {
        Command::Witness(a) => run_single("witness", a),
        Command::Residual(a) => run_single("residual", a),
        Command::Certify(a) => run_single("certify", a),
        Command::CertifySystem(a) => run_single("certify-system", a),
        Command::Fit(a) => run_single("fit", a),
        Command::Suite(a) => run_suite_cmd(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> i32 {
        run(std::iter::once("feistab").chain(args.iter().copied()))
    }

    #[test]
    fn parse_pair_accepts_negatives() {
        assert_eq!(parse_pair("-1.5, 2", "x").unwrap(), [-1.5, 2.0]);
        assert!(parse_pair("1", "x").is_err());
        assert!(parse_pair("a,b", "x").is_err());
    }

    #[test]
    fn config_requires_a_spec() {
        assert_eq!(run_args(&["residual", "--grid", "8"]), EXIT_CONFIG);
    }

    #[test]
    fn config_k_must_match_atoms() {
        let cfg = Config {
            m: Some(MultiplicativeSpec::power(2.0, 1)),
            k: Some(2),
            ..Config::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn config_json_round_trip() {
        let text = r#"{"M":[{"kind":"power","alpha":2.0},{"kind":"one"}],"k":2,"grid":8,
            "noise":{"amplitude":0.001,"seed":3,"kind":"uniform"},"qstar":[0.5,0.5],"levels":4}"#;
        let cfg: Config = serde_json::from_str(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(
            cfg.qstar().unwrap(),
            QStar::Explicit(KVec::new([0.5, 0.5]).unwrap())
        );
        let back: Config = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(serde_json::from_str::<Config>(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run_args(&["residual", "--alpha", "2", "--k", "1", "--grid", "16", "--exact", "1,0"]),
            EXIT_PASS
        );
        assert_eq!(
            run_args(&["witness", "--alpha", "1", "--k", "1", "--grid", "100"]),
            EXIT_NO_WITNESS
        );
        assert_eq!(
            run_args(&["witness", "--alpha", "2", "--grid", "10"]),
            EXIT_PASS
        );
        assert_eq!(
            run_args(&["certify", "--alpha", "2", "--grid", "1"]),
            EXIT_CONFIG
        );
        assert_eq!(
            run_args(&["certify", "--alpha", "2", "--qstar", "0.5,0.5"]),
            EXIT_CONFIG
        );
        assert_eq!(run_args(&["nonsense"]), EXIT_CONFIG);
    }
}

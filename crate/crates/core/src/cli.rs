//! The `inclusion-lab` command line.
//!
//! `parse` turns argv into a fully validated [`Invocation`] (config files are
//! read and checked here, before any computation); `run` dispatches and
//! returns the process exit code: `0` success, `1` a verification tolerance
//! failed, `2` invalid input, I/O failure or an inconclusive experiment.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::discretize::{assemble, Grid};
use crate::equilibria::{Equilibrium, Side, Sign};
use crate::error::{Error, Result};
use crate::inclusion::{simulate, SolverConfig, DEFAULT_SELECTION_TOLERANCE};
use crate::io;
use crate::lab::{self, ExperimentReport, Status};
use crate::spectral::{
    closed_form_spectrum, fem_spectrum, find_eigenvalues, perturbation_direction, zero_not_eigenvalue,
    CharacteristicEvaluator,
};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "INCLUSION_LAB_OUT";

pub const DEFAULT_FEM_PER_SUBINTERVAL: usize = 1024;

#[derive(Parser, Debug)]
#[command(name = "inclusion-lab", version, about = "Equilibria, spectra and saddle experiments for u_t - u_xx in H0(u)")]
struct Args {
    /// Worker threads for parameter sweeps.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    /// Output directory (default: $INCLUSION_LAB_OUT, else stdout or `.`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Samples of v_n± and its one-sided derivative.
    Equilibria {
        #[arg(long, value_parser = clap::value_parser!(u64).range(0..))]
        n: u64,
        #[arg(long, default_value = "+", value_parser = parse_sign, allow_hyphen_values = true)]
        sign: Sign,
        #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u64).range(2..))]
        samples: u64,
    },
    /// Eigenvalues of the linearization at v_n±.
    Spectrum {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, value_enum, default_value_t = SpectrumMethod::Shooting)]
        method: SpectrumMethod,
        #[arg(long, allow_hyphen_values = true)]
        lambda_max: Option<f64>,
        /// Cells per subinterval for the finite-element method.
        #[arg(long = "M", value_parser = clap::value_parser!(u64).range(2..))]
        m: Option<u64>,
    },
    /// Triangularized zero-mode system and its determinant.
    ZeroMode {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
    },
    /// Time integration from a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Also write every stored state.
        #[arg(long)]
        snapshots: bool,
    },
    /// One experiment with optional JSON parameters.
    Verify {
        #[arg(long, value_enum)]
        experiment: Experiment,
        #[arg(long)]
        params: Option<PathBuf>,
    },
}

fn parse_sign(s: &str) -> std::result::Result<Sign, String> {
    Sign::parse(s).ok_or_else(|| format!("sign must be + or -, got {s:?}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    Shooting,
    ClosedForm,
    Fem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Growth,
    Decay,
    Residual,
    TangencyU,
    TangencyS,
    Connect,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Growth => "growth",
            Experiment::Decay => "decay",
            Experiment::Residual => "residual",
            Experiment::TangencyU => "tangency-u",
            Experiment::TangencyS => "tangency-s",
            Experiment::Connect => "connect",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationKind {
    Eigen,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub kind: PerturbationKind,
    #[serde(default = "one")]
    pub index: usize,
    pub amplitude: f64,
    /// Interior nodal values for `custom`, scaled by `amplitude`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Cells per subinterval of length `1/max(n, 1)`.
    #[serde(rename = "M")]
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub n: usize,
    #[serde(default = "plus")]
    pub sign: Sign,
    pub perturbation: Perturbation,
    pub grid: GridSpec,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub record_stride: usize,
    #[serde(default = "default_selection_tolerance")]
    pub selection_tolerance: f64,
}

fn plus() -> Sign {
    Sign::Plus
}

fn default_selection_tolerance() -> f64 {
    DEFAULT_SELECTION_TOLERANCE
}

impl SimulateConfig {
    pub fn solver(&self) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            dt: self.dt,
            t_end: self.t_end,
            selection_tolerance: self.selection_tolerance,
            record_stride: self.record_stride,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<Grid> {
        if self.grid.m < 2 {
            return Err(Error::InvalidConfig(format!("grid.M must be >= 2, got {}", self.grid.m)));
        }
        Grid::new(self.n.max(1), self.grid.m)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver()?;
        let grid = self.grid()?;
        let p = &self.perturbation;
        if !p.amplitude.is_finite() {
            return Err(Error::InvalidConfig("perturbation.amplitude must be finite".into()));
        }
        match p.kind {
            PerturbationKind::Eigen if p.index == 0 => {
                Err(Error::InvalidConfig("perturbation.index is 1-based".into()))
            }
            PerturbationKind::Custom => match &p.values {
                Some(v) if v.len() == grid.interior_len() => Ok(()),
                Some(v) => Err(Error::InvalidConfig(format!(
                    "perturbation.values has {} entries, the grid has {} interior nodes",
                    v.len(),
                    grid.interior_len()
                ))),
                None => Err(Error::InvalidConfig("custom perturbation needs values".into())),
            },
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Equilibria { n: usize, sign: Sign, samples: usize },
    Spectrum { n: usize, count: usize, method: SpectrumMethod, lambda_max: Option<f64>, m: Option<usize> },
    ZeroMode { n: usize },
    Simulate { config: SimulateConfig, snapshots: bool },
    Verify { experiment: Experiment, params: serde_json::Value },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub command: Command,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

/// A rejected command line. `code` is `0` for `--help` and `--version`.
#[derive(Debug)]
pub struct UsageError {
    pub message: String,
    pub code: i32,
}

impl UsageError {
    fn invalid(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: 2 }
    }
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn read_json(path: &Path) -> std::result::Result<serde_json::Value, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError::invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| UsageError::invalid(format!("{}: {e}", path.display())))
}

/// Parses `argv` (without the program name).
pub fn parse<I, S>(argv: I) -> std::result::Result<Invocation, UsageError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let full = std::iter::once(std::ffi::OsString::from("inclusion-lab")).chain(argv.into_iter().map(Into::into));
    let args = Args::try_parse_from(full).map_err(|e| {
        use clap::error::ErrorKind;
        let code = match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
            _ => 2,
        };
        UsageError { message: e.render().to_string(), code }
    })?;
    let command = match args.command {
        Sub::Equilibria { n, sign, samples } => {
            Command::Equilibria { n: n as usize, sign, samples: samples as usize }
        }
        Sub::Spectrum { n, count, method, lambda_max, m } => {
            if method == SpectrumMethod::ClosedForm && !(2..=3).contains(&n) {
                return Err(UsageError::invalid("closed-form spectra exist for n = 2 and n = 3 only"));
            }
            if method == SpectrumMethod::Shooting && n < 2 {
                return Err(UsageError::invalid("shooting needs n >= 2; for n = 1 use --method fem"));
            }
            if let Some(l) = lambda_max {
                if !l.is_finite() {
                    return Err(UsageError::invalid("--lambda-max must be finite"));
                }
            }
            Command::Spectrum {
                n: n as usize,
                count: count as usize,
                method,
                lambda_max,
                m: m.map(|v| v as usize),
            }
        }
        Sub::ZeroMode { n } => Command::ZeroMode { n: n as usize },
        Sub::Simulate { config, snapshots } => {
            let value = read_json(&config)?;
            let config: SimulateConfig = serde_json::from_value(value)
                .map_err(|e| UsageError::invalid(format!("{}: {e}", config.display())))?;
            config.validate().map_err(|e| UsageError::invalid(e.to_string()))?;
            Command::Simulate { config, snapshots }
        }
        Sub::Verify { experiment, params } => {
            let params = match params {
                Some(p) => read_json(&p)?,
                None => serde_json::json!({}),
            };
            // decode once now so bad parameters are rejected before running
            decode_params(experiment, &params).map_err(|e| UsageError::invalid(e.to_string()))?;
            Command::Verify { experiment, params }
        }
    };
    Ok(Invocation { command, threads: args.threads.map(|t| t as usize), out: args.out })
}

enum Params {
    Growth(lab::GrowthParams),
    Decay(lab::DecayParams),
    Residual(lab::ResidualParams),
    TangencyU(lab::TangencyUnstableParams),
    TangencyS(lab::TangencyStableParams),
    Connect(lab::ConnectParams),
}

fn decode_params(experiment: Experiment, value: &serde_json::Value) -> Result<Params> {
    let v = value.clone();
    let p = match experiment {
        Experiment::Growth => {
            let p: lab::GrowthParams = serde_json::from_value(v)?;
            if !(p.eps > 0.0) || !(p.dt > 0.0) || p.n < 2 {
                return Err(Error::InvalidConfig("growth needs eps > 0, dt > 0, n >= 2".into()));
            }
            Params::Growth(p)
        }
        Experiment::Decay => {
            let p: lab::DecayParams = serde_json::from_value(v)?;
            if !(p.eps >= 0.0) || !(p.dt > 0.0) || p.cells < 2 {
                return Err(Error::InvalidConfig("decay needs eps >= 0, dt > 0, cells >= 2".into()));
            }
            Params::Decay(p)
        }
        Experiment::Residual => {
            let p: lab::ResidualParams = serde_json::from_value(v)?;
            if p.n < 1 || p.eps_list.iter().any(|e| !(*e >= 0.0)) {
                return Err(Error::InvalidConfig("residual needs n >= 1 and eps >= 0".into()));
            }
            Params::Residual(p)
        }
        Experiment::TangencyU => {
            let p: lab::TangencyUnstableParams = serde_json::from_value(v)?;
            if !(p.eps > 0.0) || !(p.dt > 0.0) || p.n < 2 || p.record_stride == 0 {
                return Err(Error::InvalidConfig(
                    "tangency-u needs eps > 0, dt > 0, n >= 2, record_stride >= 1".into(),
                ));
            }
            Params::TangencyU(p)
        }
        Experiment::TangencyS => {
            let p: lab::TangencyStableParams = serde_json::from_value(v)?;
            if p.eps_list.iter().any(|e| !(*e > 0.0)) || !(p.dt > 0.0) || p.n < 2 {
                return Err(Error::InvalidConfig("tangency-s needs eps > 0, dt > 0, n >= 2".into()));
            }
            Params::TangencyS(p)
        }
        Experiment::Connect => {
            let p: lab::ConnectParams = serde_json::from_value(v)?;
            if !(p.eps > 0.0) || !(p.dt > 0.0) || p.plateau_steps == 0 {
                return Err(Error::InvalidConfig("connect needs eps > 0, dt > 0, plateau_steps >= 1".into()));
            }
            Params::Connect(p)
        }
    };
    Ok(p)
}

#[derive(Serialize)]
struct SpectrumOutput {
    n: usize,
    method: SpectrumMethod,
    eigenvalues: Vec<f64>,
    negative_count: usize,
    residuals: Vec<f64>,
}

#[derive(Serialize)]
struct SimulateMeta<'a> {
    command: &'static str,
    version: &'static str,
    config: &'a SimulateConfig,
    reference: String,
    rows: usize,
    files: Vec<String>,
}

#[derive(Serialize)]
struct VerifyMeta<'a> {
    command: &'static str,
    version: &'static str,
    experiment: &'static str,
    status: Status,
    files: &'a [String],
}

fn spectrum_output(
    n: usize,
    count: usize,
    method: SpectrumMethod,
    lambda_max: Option<f64>,
    m: Option<usize>,
) -> Result<SpectrumOutput> {
    let (eigenvalues, residuals) = match method {
        SpectrumMethod::Shooting => {
            let s = find_eigenvalues(n, count, lambda_max)?;
            (s.eigenvalues, s.residuals)
        }
        SpectrumMethod::ClosedForm => {
            let mut top = lambda_max.unwrap_or(100.0);
            let mut values = closed_form_spectrum(n, top)?;
            while lambda_max.is_none() && values.len() < count {
                top *= 2.0;
                values = closed_form_spectrum(n, top)?;
            }
            values.truncate(count);
            // residual of each value in the shooter's characteristic function
            let ev = CharacteristicEvaluator::new(n)?;
            let residuals = values
                .iter()
                .map(|&l| {
                    let s = ev.shoot(l);
                    s.terminal().abs() / s.scale()
                })
                .collect();
            (values, residuals)
        }
        SpectrumMethod::Fem => {
            let ops = assemble(&Grid::new(n, m.unwrap_or(DEFAULT_FEM_PER_SUBINTERVAL))?);
            let mut dec = fem_spectrum(&ops, count)?;
            if let Some(l) = lambda_max {
                let keep = dec.eigenvalues.iter().filter(|v| **v <= l).count();
                dec.eigenvalues.truncate(keep);
                dec.eigenfunctions.truncate(keep);
            }
            let a = ops.linearized();
            let residuals = dec
                .eigenvalues
                .iter()
                .zip(&dec.eigenfunctions)
                .map(|(&l, v)| {
                    let av = a.mul_vec(v);
                    let mv = ops.mass.mul_vec(v);
                    av.iter().zip(&mv).map(|(x, y)| (x - l * y).abs()).fold(0.0, f64::max)
                })
                .collect();
            (dec.eigenvalues, residuals)
        }
    };
    let negative_count = eigenvalues.iter().filter(|l| **l < 0.0).count();
    Ok(SpectrumOutput { n, method, eigenvalues, negative_count, residuals })
}

fn equilibria_csv(n: usize, sign: Sign, samples: usize) -> Result<String> {
    let eq = Equilibrium::new(n, sign);
    let rows = (0..samples)
        .map(|i| {
            let x = i as f64 / (samples - 1) as f64;
            let side = if i == samples - 1 { Side::Left } else { Side::Right };
            Ok(vec![x, eq.eval(x)?, eq.eval_derivative(x, side)?])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(io::csv_string(&["x", "value", "derivative"], rows))
}

fn zero_mode_csv(n: usize) -> Result<String> {
    let v = zero_not_eigenvalue(n)?;
    let mut out = String::from("quantity,value\n");
    for (i, p) in v.diagonal.iter().enumerate() {
        out.push_str(&format!("pivot_{},{}\n", i + 1, io::fmt_f64(*p)));
    }
    out.push_str(&format!("determinant,{}\n", io::fmt_f64(v.determinant)));
    Ok(out)
}

fn emit(out: Option<&Path>, name: &str, text: &str) -> Result<()> {
    match out {
        Some(dir) => {
            let path = dir.join(name);
            io::write_text(&path, text)?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn run_simulate(config: &SimulateConfig, snapshots: bool, dir: &Path) -> Result<()> {
    let grid = config.grid()?;
    let ops = assemble(&grid);
    let reference = Equilibrium::new(config.n, config.sign);
    let v = reference.sample(&grid);
    let p = &config.perturbation;
    let w = match p.kind {
        PerturbationKind::Eigen => perturbation_direction(config.n, p.index, &ops)?,
        PerturbationKind::Custom => p.values.clone().unwrap_or_default(),
    };
    let u0: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + p.amplitude * b).collect();
    let traj = simulate(&u0, &config.solver()?, &ops, reference)?;
    let mut files = vec!["trajectory.csv".to_string()];
    files.extend(io::write_trajectory(dir, &traj, &grid.interior_coordinates(), snapshots)?);
    let meta = SimulateMeta {
        command: "simulate",
        version: env!("CARGO_PKG_VERSION"),
        config,
        reference: reference.label(),
        rows: traj.len(),
        files,
    };
    io::write_json(&dir.join("trajectory.meta.json"), &meta)?;
    eprintln!("wrote {} rows to {}", traj.len(), dir.join("trajectory.csv").display());
    Ok(())
}

/// Runs one experiment from decoded JSON parameters.
pub fn run_experiment(experiment: Experiment, params: &serde_json::Value) -> Result<ExperimentReport> {
    match decode_params(experiment, params)? {
        Params::Growth(p) => lab::growth_rate(&p),
        Params::Decay(p) => lab::decay_rate(&p),
        Params::Residual(p) => lab::residual_scaling(&p),
        Params::TangencyU(p) => lab::tangency_unstable(&p),
        Params::TangencyS(p) => lab::tangency_stable(&p),
        Params::Connect(p) => lab::connection_probe(&p).map(|(r, _)| r),
    }
}

fn run_verify(experiment: Experiment, params: &serde_json::Value, dir: &Path) -> Result<Status> {
    let report = run_experiment(experiment, params)?;
    let name = experiment.name();
    let mut files = vec![format!("report_{name}.json")];
    io::write_json(&dir.join(&files[0]), &report)?;
    for s in &report.series {
        let file = format!("{name}_{}.csv", s.name);
        io::write_text(&dir.join(&file), &io::series_csv(s))?;
        files.push(file);
    }
    let meta = VerifyMeta {
        command: "verify",
        version: env!("CARGO_PKG_VERSION"),
        experiment: name,
        status: report.status,
        files: &files,
    };
    io::write_json(&dir.join(format!("report_{name}.meta.json")), &meta)?;
    for c in &report.checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    eprintln!("{name}: {:?}", report.status);
    Ok(report.status)
}

fn dispatch(inv: &Invocation) -> Result<i32> {
    let out = inv.out.clone().or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from));
    let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
    match &inv.command {
        Command::Equilibria { n, sign, samples } => {
            let label = Equilibrium::new(*n, *sign).label();
            emit(out.as_deref(), &format!("equilibrium_{label}.csv"), &equilibria_csv(*n, *sign, *samples)?)?;
        }
        Command::Spectrum { n, count, method, lambda_max, m } => {
            let spec = spectrum_output(*n, *count, *method, *lambda_max, *m)?;
            emit(out.as_deref(), &format!("spectrum_n{n}.json"), &io::json_string(&spec)?)?;
        }
        Command::ZeroMode { n } => emit(out.as_deref(), &format!("zero_mode_n{n}.csv"), &zero_mode_csv(*n)?)?,
        Command::Simulate { config, snapshots } => run_simulate(config, *snapshots, &dir)?,
        Command::Verify { experiment, params } => return Ok(run_verify(*experiment, params, &dir)?.exit_code()),
    }
    Ok(0)
}

/// Executes a parsed invocation and returns the exit code.
pub fn run(inv: &Invocation) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(inv.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(inv)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// `parse` then `run`; usage errors print to stderr.
pub fn main_with_args<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match parse(argv) {
        Ok(inv) => run(&inv),
        Err(e) => {
            if e.code == 0 {
                print!("{}", e.message);
            } else {
                eprint!("{}", e.message);
                if !e.message.ends_with('\n') {
                    eprintln!();
                }
            }
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_flags() {
        let inv = parse(["spectrum", "--n", "2", "--count", "8", "--method", "shooting"]).unwrap();
        assert_eq!(
            inv.command,
            Command::Spectrum { n: 2, count: 8, method: SpectrumMethod::Shooting, lambda_max: None, m: None }
        );
    }

    #[test]
    fn range_checks() {
        assert_eq!(parse(["zero-mode", "--n", "0"]).unwrap_err().code, 2);
        assert_eq!(parse(["zero-mode", "--n", "1"]).unwrap_err().code, 2);
        assert_eq!(parse(["spectrum", "--n", "0"]).unwrap_err().code, 2);
        assert_eq!(parse(["spectrum", "--n", "2", "--method", "fem", "--M", "1"]).unwrap_err().code, 2);
        assert_eq!(parse(["frobnicate"]).unwrap_err().code, 2);
        assert_eq!(parse(["spectrum", "--n", "2", "--bogus", "1"]).unwrap_err().code, 2);
    }

    #[test]
    fn missing_config() {
        let e = parse(["simulate", "--config", "definitely/missing.json"]).unwrap_err();
        assert_eq!(e.code, 2);
        assert!(e.message.contains("missing.json"));
    }

    #[test]
    fn bad_verify_params_rejected_at_parse() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.json");
        std::fs::write(&p, r#"{"eps": -1.0}"#).unwrap();
        let e = parse(["verify", "--experiment", "growth", "--params", p.to_str().unwrap()]).unwrap_err();
        assert_eq!(e.code, 2);
        std::fs::write(&p, r#"{"unknown_field": 1}"#).unwrap();
        assert!(parse(["verify", "--experiment", "decay", "--params", p.to_str().unwrap()]).is_err());
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(parse(["--help"]).unwrap_err().code, 0);
    }

    #[test]
    fn sign_values() {
        let inv = parse(["equilibria", "--n", "2", "--sign", "-"]).unwrap();
        assert_eq!(inv.command, Command::Equilibria { n: 2, sign: Sign::Minus, samples: 101 });
    }

    #[test]
    fn zero_mode_output() {
        let text = zero_mode_csv(2).unwrap();
        assert!(text.ends_with("determinant,-1.0000000000000000e0\n"), "{text}");
    }
}

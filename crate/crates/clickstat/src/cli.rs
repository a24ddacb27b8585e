//! The `clickstat` command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 numerical failure
//! (including an oracle check that exceeds its bound).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clickstat_core::calibrate::{
    log_grid, predict_curve, saturation_scan, FitMode, FitOptions, ModelParameters, ArmResponse,
};
use clickstat_core::certify::{certify, DEFAULT_THRESHOLD};
use clickstat_core::clickmodel::{
    joint_click_distribution, total_variation, total_variation_bound, DetectorResponse, Mode,
};
use clickstat_core::photoelectric::compare_models_with;
use clickstat_core::states::{
    coherent_distribution, fock_distribution, thermal_distribution, tmsv_distribution, xi_from_power,
    PhotonDistribution, PhotonNumbers, PumpSetting,
};

use crate::io::{
    render_curve, CertificateFile, ComparisonFile, CurveRow, FitFile, HistogramFile, HistogramMeta, IoError,
    JsonFile, OracleFile, SweepEntry, SweepFile, FORMAT_VERSION,
};
use crate::{parallel, synthetic};

/// Environment variable holding the default random seed.
pub const SEED_ENV: &str = "CLICKSTAT_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<clickstat_core::Error> for CliError {
    fn from(e: clickstat_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Io { .. } | IoError::Csv { .. } => CliError::Io(e.to_string()),
            IoError::Parse { .. } | IoError::Invalid { .. } => CliError::Validation(e.to_string()),
            IoError::Core(inner) => inner.into(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;
type SingleModeState = fn(f64, f64) -> clickstat_core::Result<PhotonNumbers>;

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "clickstat", version, about = "Click-counting statistics of two-mode time-multiplexed detectors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint click histogram of a two-mode state (analytic unless --shots is given).
    Simulate(SimulateArgs),
    /// Minimal-eigenvalue certificate of a click histogram.
    Certify(CertifyArgs),
    /// Eigenvalues and significances across a pump-power sweep, as CSV.
    Sweep(SweepArgs),
    /// Least-squares calibration of efficiency, dark parameter and ξ0 against a sweep.
    Fit(FitArgs),
    /// Click-model versus photoelectric-model single-mode analysis.
    Compare(CompareArgs),
    /// Total-variation check of the analytic statistics against Monte Carlo.
    Oracle(OracleArgs),
    /// Synthetic sweep from the pumped-source model with multinomial noise.
    MakeSweep(MakeSweepArgs),
    /// Theory curve of the minimal eigenvalues versus pulse energy, as CSV.
    Predict(PredictArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Vacuum,
    Tmsv,
    Thermal,
    Coherent,
    Fock,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Two-mode state: tmsv (correlated), or a product of single-mode states.
    #[arg(long, value_enum, default_value = "tmsv")]
    pub state: StateKind,
    /// Squeezing parameter ξ of the TMSV (dimensionless).
    #[arg(long)]
    pub xi: Option<f64>,
    /// Pump power in μW; sets ξ = ξ0·√P for the TMSV together with --xi0.
    #[arg(long = "power-uw")]
    pub power_uw: Option<f64>,
    /// Squeezing per root pump power, in μW^(-1/2).
    #[arg(long)]
    pub xi0: Option<f64>,
    /// Mean photon number of mode A (thermal, coherent).
    #[arg(long = "mean-a")]
    pub mean_a: Option<f64>,
    /// Mean photon number of mode B (thermal, coherent); defaults to --mean-a.
    #[arg(long = "mean-b")]
    pub mean_b: Option<f64>,
    /// Photon number of mode A (fock).
    #[arg(long = "n-a")]
    pub n_a: Option<usize>,
    /// Photon number of mode B (fock); defaults to 0.
    #[arg(long = "n-b")]
    pub n_b: Option<usize>,
    /// Probability mass allowed beyond the photon-number truncation.
    #[arg(long, default_value_t = 1e-12)]
    pub tail: f64,
}

#[derive(Debug, Args)]
pub struct ResponseArgs {
    /// Detection efficiency η of arm A, and of arm B unless --eta-b, in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Dark parameter ν of arm A, and of arm B unless --nu-b (dimensionless, per measurement window).
    #[arg(long, default_value_t = 0.0)]
    pub nu: f64,
    /// Detection efficiency of arm B.
    #[arg(long = "eta-b")]
    pub eta_b: Option<f64>,
    /// Dark parameter of arm B.
    #[arg(long = "nu-b")]
    pub nu_b: Option<f64>,
    /// Time bins N per detector (outcomes 0..=N).
    #[arg(long, default_value_t = 8)]
    pub bins: u32,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Detection efficiency η of both arms, in [0, 1].
    #[arg(long, default_value_t = 0.096)]
    pub eta: f64,
    /// Dark parameter ν of both arms (dimensionless, per measurement window).
    #[arg(long, default_value_t = 0.51)]
    pub nu: f64,
    /// Squeezing per root pump power, in μW^(-1/2).
    #[arg(long, default_value_t = 0.087)]
    pub xi0: f64,
    /// Pulse repetition rate in Hz; pulse energy = power / rate.
    #[arg(long = "rep-rate-hz", default_value_t = 70e3)]
    pub rep_rate_hz: f64,
    /// Time bins N per detector.
    #[arg(long, default_value_t = 8)]
    pub bins: u32,
}

impl ModelArgs {
    fn params(&self) -> CliResult<ModelParameters> {
        let mut p = ModelParameters::symmetric(self.eta, self.nu, self.xi0, self.rep_rate_hz)?;
        p.bins = self.bins;
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub response: ResponseArgs,
    /// Monte Carlo shots; omit for the exact analytic distribution.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Random seed for Monte Carlo.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Pulse repetition rate in Hz, recorded in the file metadata.
    #[arg(long = "rep-rate-hz")]
    pub rep_rate_hz: Option<f64>,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Histogram JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Even order K, or K_A,K_B.
    #[arg(long, default_value = "2")]
    pub order: String,
    /// Significance threshold σ: negativity counts when Σ < -σ.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Use this many multinomial bootstrap resamples (>= 100) for the uncertainties.
    #[arg(long)]
    pub bootstrap: Option<usize>,
    /// Random seed for the bootstrap.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep JSON file.
    #[arg(long)]
    pub sweep: PathBuf,
    /// Even order K, or K_A,K_B.
    #[arg(long, default_value = "2")]
    pub order: String,
    /// Significance threshold σ.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Output CSV path with columns energy_nJ, eA, eB, eAB, dEA, ... (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitModeArg {
    Moments,
    Eigenvalues,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Sweep JSON file.
    #[arg(long)]
    pub sweep: PathBuf,
    /// Starting point η,ν,ξ0 with ξ0 in μW^(-1/2).
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 0.1])]
    pub init: Vec<f64>,
    /// Quantities compared between model and data.
    #[arg(long, value_enum, default_value = "moments")]
    pub mode: FitModeArg,
    /// Fit separate η and ν for each arm.
    #[arg(long)]
    pub asymmetric: bool,
    /// Eigenvalue order K for --mode eigenvalues.
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Histogram JSON file.
    #[arg(long = "in", conflicts_with = "sweep", required_unless_present = "sweep")]
    pub input: Option<PathBuf>,
    /// Sweep JSON file; writes per-model CSV curves instead of a JSON report.
    #[arg(long, requires = "curve_prefix")]
    pub sweep: Option<PathBuf>,
    /// Path prefix of the curves: PREFIX-click.csv and PREFIX-photoelectric.csv,
    /// each with columns energy_nJ, eA, eB.
    #[arg(long = "curve-prefix")]
    pub curve_prefix: Option<PathBuf>,
    /// Even order K of the single-mode matrices.
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    /// Significance threshold σ.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub response: ResponseArgs,
    /// Monte Carlo shots.
    #[arg(long, default_value_t = 1_000_000)]
    pub shots: u64,
    /// Random seed.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MakeSweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Pump powers in μW.
    #[arg(long = "powers-uw", value_delimiter = ',', default_values_t = [50.0, 100.0, 150.0, 200.0, 250.0, 300.0, 350.0, 403.0])]
    pub powers_uw: Vec<f64>,
    /// Multinomial trials per point; 0 writes exact probabilities.
    #[arg(long, default_value_t = 10_000_000)]
    pub trials: u64,
    /// Random seed.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Pulse energies in nJ.
    #[arg(long = "energies-nj", value_delimiter = ',', conflicts_with = "scan_to_nj")]
    pub energies_nj: Vec<f64>,
    /// Lowest energy of a log grid, in nJ.
    #[arg(long = "e-min-nj", default_value_t = 0.7)]
    pub e_min_nj: f64,
    /// Highest energy of a log grid, in nJ.
    #[arg(long = "e-max-nj", default_value_t = 5.8)]
    pub e_max_nj: f64,
    /// Points on the log grid.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Continue into saturation up to this energy in nJ and report the minimum of eAB on stderr.
    #[arg(long = "scan-to-nj")]
    pub scan_to_nj: Option<f64>,
    /// Even order K.
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => Ok(crate::io::write_text(path, text)?),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("<stdout>: {e}"))),
    }
}

/// `"K"` or `"K_A,K_B"`.
pub fn parse_order(s: &str) -> CliResult<(u32, u32)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse = |p: &str| {
        p.parse::<u32>()
            .map_err(|_| validation(format!("--order: \"{s}\" is not K or K_A,K_B")))
    };
    match parts.as_slice() {
        [k] => {
            let k = parse(k)?;
            Ok((k, k))
        }
        [a, b] => Ok((parse(a)?, parse(b)?)),
        _ => Err(validation(format!("--order: \"{s}\" is not K or K_A,K_B"))),
    }
}

fn check_threshold(t: f64) -> CliResult<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(validation(format!("--threshold must be >= 0, got {t}")))
    }
}

impl ResponseArgs {
    fn responses(&self) -> CliResult<(DetectorResponse, DetectorResponse)> {
        Ok((
            DetectorResponse::new(self.eta, self.nu, self.bins)?,
            DetectorResponse::new(self.eta_b.unwrap_or(self.eta), self.nu_b.unwrap_or(self.nu), self.bins)?,
        ))
    }
}

impl StateArgs {
    fn xi(&self) -> CliResult<f64> {
        match (self.xi, self.power_uw, self.xi0) {
            (Some(xi), None, None) => Ok(xi),
            (None, Some(p), Some(xi0)) => Ok(xi_from_power(xi0, p)?),
            (None, None, None) => Err(validation("tmsv needs --xi, or --power-uw with --xi0")),
            _ => Err(validation("give either --xi or both --power-uw and --xi0")),
        }
    }

    /// The state and a short label for reports.
    fn build(&self) -> CliResult<(PhotonDistribution, String)> {
        let tol = self.tail;
        Ok(match self.state {
            StateKind::Vacuum => (PhotonDistribution::vacuum(), "vacuum".into()),
            StateKind::Tmsv => {
                let xi = self.xi()?;
                (tmsv_distribution(xi, tol)?, format!("tmsv(xi={xi})"))
            }
            StateKind::Thermal | StateKind::Coherent => {
                let a = self
                    .mean_a
                    .ok_or_else(|| validation("thermal and coherent states need --mean-a"))?;
                let b = self.mean_b.unwrap_or(a);
                let (kind, single): (&str, SingleModeState) =
                    if self.state == StateKind::Thermal {
                        ("thermal", thermal_distribution)
                    } else {
                        ("coherent", coherent_distribution)
                    };
                (
                    PhotonDistribution::product(single(a, tol)?, single(b, tol)?),
                    format!("{kind}({a})x{kind}({b})"),
                )
            }
            StateKind::Fock => {
                let a = self.n_a.ok_or_else(|| validation("fock states need --n-a"))?;
                let b = self.n_b.unwrap_or(0);
                (
                    PhotonDistribution::product(fock_distribution(a), fock_distribution(b)),
                    format!("fock({a})xfock({b})"),
                )
            }
        })
    }
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let (da, db) = args.response.responses()?;
    let (state, _) = args.state.build()?;
    if args.shots == Some(0) {
        return Err(validation("--shots must be positive"));
    }
    if let Some(r) = args.rep_rate_hz {
        PumpSetting::new(0.0, r)?;
    }
    let stats = match args.shots {
        Some(shots) => parallel::monte_carlo_clicks(&state, &da, &db, shots, args.seed)?,
        None => joint_click_distribution(&state, &da, &db)?,
    };
    let meta = (args.state.power_uw.is_some() || args.rep_rate_hz.is_some()).then(|| HistogramMeta {
        pump_power_uw: args.state.power_uw,
        repetition_rate_hz: args.rep_rate_hz,
        ..HistogramMeta::default()
    });
    emit(args.out.as_deref(), &HistogramFile::from_stats(&stats, meta)?.render()?)
}

fn cmd_certify(args: &CertifyArgs) -> CliResult<()> {
    let (ka, kb) = parse_order(&args.order)?;
    check_threshold(args.threshold)?;
    let stats = HistogramFile::read(&args.input)?.to_stats()?;
    let file = match args.bootstrap {
        Some(n) => CertificateFile::from_bootstrap(
            &parallel::bootstrap_certificate(&stats, ka, kb, n, args.seed, args.threshold)?,
            args.seed,
        )?,
        None => CertificateFile::from_certificate(&certify(&stats, ka, kb, args.threshold)?)?,
    };
    emit(args.out.as_deref(), &file.render()?)
}

fn cmd_sweep(args: &SweepArgs) -> CliResult<()> {
    let (ka, kb) = parse_order(&args.order)?;
    check_threshold(args.threshold)?;
    let points = SweepFile::read(&args.sweep)?.to_sweep_points()?;
    let rows = parallel::par_map(&points, |p| -> CliResult<CurveRow> {
        let c = certify(&p.stats, ka, kb, args.threshold)?;
        let e = [&c.a, &c.b, &c.ab];
        let delta = match (e[0].uncertainty, e[1].uncertainty, e[2].uncertainty) {
            (Some(a), Some(b), Some(ab)) => Some([a, b, ab]),
            _ => None,
        };
        Ok(CurveRow {
            energy_nj: p.pump.energy_nj(),
            e: [c.a.value, c.b.value, c.ab.value],
            delta,
            sigma: delta.map(|_| [e[0].significance, e[1].significance, e[2].significance]),
        })
    })
    .into_iter()
    .collect::<CliResult<Vec<_>>>()?;
    emit(args.out.as_deref(), &render_curve(&rows)?)
}

fn cmd_fit(args: &FitArgs) -> CliResult<()> {
    let [eta, nu, xi0] = args.init[..] else {
        return Err(validation("--init takes exactly three values: eta,nu,xi0"));
    };
    let sweep = SweepFile::read(&args.sweep)?;
    let mut init = ModelParameters::symmetric(eta, nu, xi0, sweep.repetition_rate_hz)?;
    if args.asymmetric {
        init.arm_b = Some(ArmResponse { eta, nu });
    }
    let options = FitOptions {
        mode: match args.mode {
            FitModeArg::Moments => FitMode::Moments,
            FitModeArg::Eigenvalues => FitMode::Eigenvalues,
        },
        asymmetric: args.asymmetric,
        order: args.order,
        ..FitOptions::default()
    };
    let report = clickstat_core::calibrate::fit_parameters(&sweep.to_sweep_points()?, &init, &options)?;
    emit(args.out.as_deref(), &FitFile::from_report(&report, &options)?.render()?)
}

fn cmd_compare(args: &CompareArgs) -> CliResult<()> {
    check_threshold(args.threshold)?;
    if let Some(path) = &args.input {
        let stats = HistogramFile::read(path)?.to_stats()?;
        let report = compare_models_with(&stats, args.order, args.threshold)?;
        return emit(args.out.as_deref(), &ComparisonFile::from_comparison(&report)?.render()?);
    }
    let (Some(sweep), Some(prefix)) = (&args.sweep, &args.curve_prefix) else {
        return Err(validation("compare needs --in, or --sweep with --curve-prefix"));
    };
    let points = SweepFile::read(sweep)?.to_sweep_points()?;
    let reports = parallel::par_map(&points, |p| compare_models_with(&p.stats, args.order, args.threshold))
        .into_iter()
        .collect::<clickstat_core::Result<Vec<_>>>()?;
    for (suffix, pick) in [("click", true), ("photoelectric", false)] {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut rows = vec![vec!["energy_nJ".to_string(), "eA".into(), "eB".into()]];
        for (p, r) in points.iter().zip(&reports) {
            let value = |mode: Mode| {
                let m = r.modes.iter().find(|m| m.mode == mode).expect("both modes are reported");
                if pick { m.click.value } else { m.photoelectric.value }
            };
            rows.push(vec![
                crate::io::format_float(p.pump.energy_nj()),
                crate::io::format_float(value(Mode::A)),
                crate::io::format_float(value(Mode::B)),
            ]);
        }
        for row in rows {
            w.write_record(&row).map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        let mut path = prefix.clone().into_os_string();
        path.push(format!("-{suffix}.csv"));
        crate::io::write_text(Path::new(&path), &String::from_utf8_lossy(&bytes))?;
    }
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> CliResult<()> {
    let (da, db) = args.response.responses()?;
    let (state, label) = args.state.build()?;
    if args.shots == 0 {
        return Err(validation("--shots must be positive"));
    }
    let exact = joint_click_distribution(&state, &da, &db)?;
    let sampled = parallel::monte_carlo_clicks(&state, &da, &db, args.shots, args.seed)?;
    let tv = total_variation(&exact, &sampled)?;
    let bound = total_variation_bound(exact.probs().len(), args.shots);
    let file = OracleFile {
        format_version: FORMAT_VERSION.into(),
        state: label,
        shots: args.shots,
        seed: args.seed,
        total_variation: tv,
        bound,
        pass: tv <= bound,
    };
    emit(args.out.as_deref(), &file.render()?)?;
    if file.pass {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "total variation {tv:e} exceeds the bound {bound:e}"
        )))
    }
}

fn cmd_make_sweep(args: &MakeSweepArgs) -> CliResult<()> {
    let params = args.model.params()?;
    if args.powers_uw.is_empty() {
        return Err(validation("--powers-uw needs at least one power"));
    }
    for p in &args.powers_uw {
        PumpSetting::new(*p, params.repetition_rate_hz)?;
    }
    let trials = (args.trials > 0).then_some(args.trials);
    let points = synthetic::model_sweep(&params, &args.powers_uw, trials, args.seed)?;
    let entries = points
        .iter()
        .map(|p| {
            Ok(SweepEntry {
                pump_power_uw: p.pump.power_uw,
                histogram: HistogramFile::from_stats(&p.stats, None)?,
            })
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    emit(
        args.out.as_deref(),
        &SweepFile::new(params.repetition_rate_hz, entries)?.render()?,
    )
}

fn cmd_predict(args: &PredictArgs) -> CliResult<()> {
    let params = args.model.params()?;
    let curve = if let Some(top) = args.scan_to_nj {
        let scan = saturation_scan(&params, top * 1e-9, args.order)?;
        eprintln!(
            "minimum eAB = {:e} at {:.4} nJ; interior: {}; monotone after minimum: {}; negative throughout: {}",
            scan.curve[scan.minimum_index].e_ab,
            scan.minimum_energy_j * 1e9,
            scan.interior_minimum,
            scan.monotone_after_minimum,
            scan.negative_throughout
        );
        scan.curve
    } else {
        let energies: Vec<f64> = if args.energies_nj.is_empty() {
            log_grid(args.e_min_nj * 1e-9, args.e_max_nj * 1e-9, args.points)?
        } else {
            args.energies_nj.iter().map(|e| e * 1e-9).collect()
        };
        predict_curve(&params, &energies, args.order)?
    };
    let rows: Vec<CurveRow> = curve
        .iter()
        .map(|p| CurveRow {
            energy_nj: p.energy_j * 1e9,
            e: [p.e_a, p.e_b, p.e_ab],
            delta: None,
            sigma: None,
        })
        .collect();
    emit(args.out.as_deref(), &render_curve(&rows)?)
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::MakeSweep(a) => cmd_make_sweep(a),
        Command::Predict(a) => cmd_predict(a),
    }
}

/// Parses the process arguments, runs the command and maps the outcome to an exit code.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("clickstat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

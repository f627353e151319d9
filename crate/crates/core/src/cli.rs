//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on input or validation errors, 2 when a fit
//! does not converge (its result is still printed). Results go to stdout,
//! diagnostics to stderr.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{builtin_fixture, read_points_path, write_points, write_points_path};
use crate::model::{eval_data_law, invert_data_law};
use crate::regions::{classify_points, region_boundaries, RegionTolerances};
use crate::report::{curve_samples, render_svg, samples_csv, ReportOptions};
use crate::solver::{fit_data_law, FitOptions};
use crate::synth::gen_curve;
use crate::types::{DataLawParams, EnvelopeParams, FitResult, ObservationSet, StopReason};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "scaling-laws",
    version,
    about = "Fit and extrapolate error power-laws of learning curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit error(n) = a * n^-alpha + c_inf to an observation set.
    Fit(FitCmd),
    /// Evaluate a law at one or more dataset sizes.
    Predict(PredictCmd),
    /// Dataset size needed to reach a target error.
    Invert(InvertCmd),
    /// Generate a synthetic learning curve as CSV.
    Simulate(SimulateCmd),
    /// Render the fitted curve and observations as SVG (and CSV samples).
    Report(ReportCmd),
    /// Label each observation as small-data, power-law or irreducible-error.
    Regions(RegionsCmd),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Observation CSV file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Built-in observation set (e.g. table1).
    #[arg(long)]
    fixture: Option<String>,
}

impl Source {
    fn load(&self) -> Result<ObservationSet> {
        match (&self.input, &self.fixture) {
            (Some(path), _) => read_points_path(path),
            (None, Some(name)) => builtin_fixture(name),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Debug, Args)]
struct FitFlags {
    /// Hold c_inf at exactly zero and fit only a and alpha.
    #[arg(long)]
    fix_cinf_zero: bool,
    /// Initial point as a,alpha,cinf.
    #[arg(long, value_parser = parse_triple, default_value = "0.5,0.001,0.01")]
    init: DataLawParams,
    /// Extra seeded starting points.
    #[arg(long, default_value_t = 0)]
    multi_start: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop once the mean squared residual is at or below this value.
    #[arg(long, default_value_t = 1e-6)]
    mse_stop: f64,
    /// Stop once the relative parameter step is at or below this value.
    #[arg(long, default_value_t = 1e-12)]
    step_stop: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iterations: usize,
}

impl FitFlags {
    fn options(&self) -> FitOptions {
        FitOptions {
            init: self.init,
            fix_c_inf_to_zero: self.fix_cinf_zero,
            mse_stop: self.mse_stop,
            step_stop: self.step_stop,
            max_iterations: self.max_iterations,
            multi_start: self.multi_start,
            seed: self.seed,
            ..FitOptions::default()
        }
    }
}

#[derive(Debug, Args)]
struct FitCmd {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    fit: FitFlags,
    /// Print a JSON object instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct LawSource {
    /// Law parameters as a,alpha,cinf.
    #[arg(long, value_parser = parse_triple)]
    params: Option<DataLawParams>,
    /// JSON file written by `fit --json`.
    #[arg(long)]
    from_fit: Option<PathBuf>,
}

impl LawSource {
    fn load(&self) -> Result<DataLawParams> {
        match (&self.params, &self.from_fit) {
            (Some(p), _) => Ok(*p),
            (None, Some(path)) => load_fit_json(path)?.params(),
            (None, None) => unreachable!("clap enforces one law source"),
        }
    }
}

#[derive(Debug, Args)]
struct PredictCmd {
    #[command(flatten)]
    law: LawSource,
    /// Dataset sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    at: Vec<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct InvertCmd {
    #[command(flatten)]
    law: LawSource,
    /// Target error probability.
    #[arg(long)]
    target: f64,
}

#[derive(Debug, Args)]
struct SimulateCmd {
    /// Generator parameters as a,alpha,cinf.
    #[arg(long, value_parser = parse_triple)]
    params: DataLawParams,
    /// Dataset sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<f64>,
    /// Standard deviation of the additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    replicates: u32,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportCmd {
    #[command(flatten)]
    source: Source,
    /// Use the parameters of a `fit --json` file instead of fitting.
    #[arg(long)]
    fit: Option<PathBuf>,
    #[command(flatten)]
    fit_flags: FitFlags,
    #[arg(long)]
    out_svg: PathBuf,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Largest dataset size the curve is drawn to.
    #[arg(long, default_value_t = 2e7)]
    n_max: f64,
}

#[derive(Debug, Args)]
struct RegionsCmd {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    fit: FitFlags,
    /// Random-guess error.
    #[arg(long, default_value_t = 0.5)]
    eps0: f64,
    /// Envelope transition scale.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 0.02)]
    tol_guess: f64,
    #[arg(long, default_value_t = 0.005)]
    tol_floor: f64,
}

fn parse_triple(text: &str) -> std::result::Result<DataLawParams, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected a,alpha,cinf but got `{text}`"));
    }
    let mut v = [0.0; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part.parse().map_err(|_| format!("`{part}` is not a number"))?;
    }
    DataLawParams::new(v[0], v[1], v[2]).map_err(|e| e.to_string())
}

/// Machine-readable fit summary written by `fit --json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub a: f64,
    pub alpha: f64,
    pub c_inf: f64,
    pub sse: f64,
    pub mse: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitReport {
    pub fn from_fit(fit: &FitResult<DataLawParams>) -> Self {
        FitReport {
            a: fit.params.a(),
            alpha: fit.params.alpha(),
            c_inf: fit.params.c_inf(),
            sse: fit.sse,
            mse: fit.mse,
            iterations: fit.iterations,
            converged: fit.converged,
        }
    }

    pub fn params(&self) -> Result<DataLawParams> {
        DataLawParams::new(self.a, self.alpha, self.c_inf)
    }
}

fn load_fit_json(path: &PathBuf) -> Result<FitReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        row: e.line(),
        message: format!("{}: {e}", path.display()),
    })
}

fn pct(x: f64) -> String {
    format!("{:.1}%", x * 100.0)
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

macro_rules! out {
    ($io:expr, $($arg:tt)*) => {
        writeln!($io.out, $($arg)*).map_err(|e| Error::io("<stdout>", e))?
    };
}

fn convergence_code(converged: bool) -> i32 {
    if converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}

fn stop_text(stop: StopReason) -> &'static str {
    match stop {
        StopReason::MseBelowThreshold => "mse below threshold",
        StopReason::StepBelowThreshold => "relative step below threshold",
        StopReason::MaxIterations => "iteration limit reached",
        StopReason::Stalled => "no decreasing step found",
    }
}

fn cmd_fit(cmd: &FitCmd, io: &mut Io) -> Result<i32> {
    let points = cmd.source.load()?;
    let fit = fit_data_law(&points, &cmd.fit.options())?;
    if cmd.json {
        let json = serde_json::to_string_pretty(&FitReport::from_fit(&fit)).expect("plain struct serializes");
        out!(io, "{json}");
    } else {
        let p = &fit.params;
        out!(io, "error(n) = a * n^-alpha + c_inf  ({} points)", points.len());
        out!(io, "a          = {}", p.a());
        out!(io, "alpha      = {}", p.alpha());
        out!(io, "c_inf      = {}", p.c_inf());
        out!(io, "sse        = {:e}", fit.sse);
        out!(io, "mse        = {:e}", fit.mse);
        out!(io, "iterations = {}", fit.iterations);
        out!(io, "converged  = {} ({})", fit.converged, stop_text(fit.stop));
    }
    if !fit.converged {
        let _ = writeln!(io.err, "warning: fit did not converge ({})", stop_text(fit.stop));
    }
    Ok(convergence_code(fit.converged))
}

#[derive(Serialize)]
struct Prediction {
    n: f64,
    error: f64,
}

fn cmd_predict(cmd: &PredictCmd, io: &mut Io) -> Result<i32> {
    let law = cmd.law.load()?;
    let predictions = cmd
        .at
        .iter()
        .map(|&n| {
            Ok(Prediction {
                n,
                error: eval_data_law(&law, n)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if cmd.json {
        out!(
            io,
            "{}",
            serde_json::to_string_pretty(&predictions).expect("serializes")
        );
    } else {
        for p in &predictions {
            out!(io, "n = {}  error = {}  ({})", p.n, p.error, pct(p.error));
        }
    }
    Ok(EXIT_OK)
}

fn cmd_invert(cmd: &InvertCmd, io: &mut Io) -> Result<i32> {
    let law = cmd.law.load()?;
    let n = invert_data_law(&law, cmd.target)?;
    out!(
        io,
        "n = {}  (target error {} = {})",
        n,
        cmd.target,
        pct(cmd.target)
    );
    Ok(EXIT_OK)
}

fn cmd_simulate(cmd: &SimulateCmd, io: &mut Io) -> Result<i32> {
    let points = gen_curve(&cmd.params, &cmd.sizes, cmd.noise, cmd.seed, cmd.replicates)?;
    match &cmd.out {
        Some(path) => {
            write_points_path(&points, path)?;
            let _ = writeln!(io.err, "wrote {} points to {}", points.len(), path.display());
        }
        None => write_points(&points, &mut *io.out)?,
    }
    Ok(EXIT_OK)
}

fn cmd_report(cmd: &ReportCmd, io: &mut Io) -> Result<i32> {
    let points = cmd.source.load()?;
    let (params, code) = match &cmd.fit {
        Some(path) => {
            let report = load_fit_json(path)?;
            (report.params()?, convergence_code(report.converged))
        }
        None => {
            let fit = fit_data_law(&points, &cmd.fit_flags.options())?;
            (fit.params, convergence_code(fit.converged))
        }
    };
    let opts = ReportOptions {
        n_max: cmd.n_max,
        ..ReportOptions::default()
    };
    let svg = render_svg(&points, &params, &opts)?;
    std::fs::write(&cmd.out_svg, svg).map_err(|e| Error::io(&cmd.out_svg, e))?;
    out!(io, "svg: {}", cmd.out_svg.display());
    if let Some(path) = &cmd.out_csv {
        let samples = curve_samples(&params, &points, &opts)?;
        std::fs::write(path, samples_csv(&points, &samples)).map_err(|e| Error::io(path, e))?;
        out!(io, "csv: {}", path.display());
    }
    out!(
        io,
        "fit: a = {}, alpha = {}, c_inf = {}",
        params.a(),
        params.alpha(),
        params.c_inf()
    );
    Ok(code)
}

fn cmd_regions(cmd: &RegionsCmd, io: &mut Io) -> Result<i32> {
    let points = cmd.source.load()?;
    let fit = fit_data_law(&points, &cmd.fit.options())?;
    let envelope = EnvelopeParams::new(cmd.eps0, cmd.eta)?;
    let tol = RegionTolerances {
        tol_guess: cmd.tol_guess,
        tol_floor: cmd.tol_floor,
    };
    let labels = classify_points(&points, &fit, &envelope, tol)?;
    for (p, label) in &labels {
        out!(io, "n = {}  error = {}  region = {}", p.n, p.error, label);
    }
    let b = region_boundaries(&fit.params, &envelope, tol)?;
    out!(io, "power-law region starts at n = {}", b.enter_power_law);
    out!(
        io,
        "irreducible-error region starts at n = {}",
        b.enter_irreducible
    );
    Ok(EXIT_OK)
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::UnconvergedFit => EXIT_NOT_CONVERGED,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_INPUT
                }
            };
        }
    };
    let mut io = Io { out, err };
    let result = match &cli.command {
        Command::Fit(c) => cmd_fit(c, &mut io),
        Command::Predict(c) => cmd_predict(c, &mut io),
        Command::Invert(c) => cmd_invert(c, &mut io),
        Command::Simulate(c) => cmd_simulate(c, &mut io),
        Command::Report(c) => cmd_report(c, &mut io),
        Command::Regions(c) => cmd_regions(c, &mut io),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("scaling-laws").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn triple_parser() {
        assert_eq!(parse_triple("0.5, 0.5, 0").unwrap().to_array(), [0.5, 0.5, 0.0]);
        assert!(parse_triple("0.5,0.5").is_err());
        assert!(parse_triple("0.5,x,0").is_err());
        assert!(parse_triple("-0.5,0.5,0").is_err());
    }

    #[test]
    fn bad_flags_exit_one() {
        let (code, _, err) = run_str(&["simulate", "--params", "1,2", "--sizes", "10"]);
        assert_eq!(code, EXIT_INPUT, "{err}");
        let (code, _, _) = run_str(&["fit"]);
        assert_eq!(code, EXIT_INPUT);
        let (code, _, _) = run_str(&["fit", "--fixture", "table1", "--input", "x.csv"]);
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("predict"));
    }

    #[test]
    fn predict_at_one_is_amplitude_plus_floor() {
        let (code, out, _) = run_str(&["predict", "--params", "0.3,0.2,0.1", "--at", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains(&format!("error = {}", 0.3 + 0.1)), "{out}");
        let (code, _, err) = run_str(&["predict", "--params", "0.3,0.2,0.1", "--at", "0.5"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("domain error"));
    }

    #[test]
    fn unconverged_fit_exits_two() {
        let (code, out, err) = run_str(&[
            "fit",
            "--fixture",
            "table1",
            "--max-iterations",
            "1",
            "--mse-stop",
            "1e-12",
        ]);
        assert_eq!(code, EXIT_NOT_CONVERGED, "{out}{err}");
        assert!(out.contains("converged  = false"));
    }

    #[test]
    fn unconverged_regions_exit_two() {
        let (code, _, err) = run_str(&[
            "regions",
            "--fixture",
            "table1",
            "--max-iterations",
            "1",
            "--mse-stop",
            "1e-12",
        ]);
        assert_eq!(code, EXIT_NOT_CONVERGED);
        assert!(err.contains("cannot classify without fit"));
    }
}

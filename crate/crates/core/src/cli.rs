//! The `radlab` command line.
//!
//! Every JSON document carries a top-level `schema_version`. Errors go to
//! stderr as `{"schema_version", "error": {"code", "message"}}`. Exit
//! status: 0 success, 2 input error, 3 inconclusive classification, 4
//! numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::asymptotics::{verify_asymptotics, AsymptoticsConfig, AsymptoticsReport};
use crate::criteria::{self, classify_ball_with, classify_entire, RegimeTag};
use crate::dynsys::{self, DynParams};
use crate::error::{LabError, Result};
use crate::model::{validate_problem, Domain, InitialData, ProblemFile, ProblemSpec};
use crate::ode;
use crate::radial::{integrate_radial, write_csv, SolverConfig};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "radlab", version, about = "Radial solutions of Δu = g(|x|, v), Δv = f(|x|, |∇u|)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the radial system from the origin.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Regime on a ball, or existence on the whole space.
    Classify {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Convergence engine for the integral conditions.
        #[arg(long)]
        engine: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Equilibria of the autonomous flow and their stability.
    Equilibria {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Trajectory of the autonomous flow, or of a transformed radial solution.
    Flow {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Initial state; defaults to ξ₁ + (1e-3, 0, 0).
        #[arg(long, num_args = 3, value_names = ["Y", "Z", "W"])]
        xi0: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = 50.0)]
        t1: f64,
        /// Output spacing in t.
        #[arg(long)]
        dt: Option<f64>,
        /// Transform a whole-space radial solution instead of integrating the flow.
        #[arg(long)]
        radial: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit whole-space growth rates and compare with the predicted limits.
    Verify {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Fit window in r; defaults to [rmax/100, rmax].
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        window: Option<Vec<f64>>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Growth-rate verification over a (p, s) grid, written as CSV.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Comma-separated p values.
        #[arg(long, value_delimiter = ',')]
        p_values: Vec<f64>,
        /// Comma-separated s values.
        #[arg(long, value_delimiter = ',')]
        s_values: Vec<f64>,
        /// Additionally draw this many random (p, s) with p < 1, ps < 1.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args, Default, Clone)]
pub struct ProblemArgs {
    /// Problem document with the fields N, a, b, p, s, domain, u0, v0;
    /// explicit flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "N")]
    pub n: Option<u32>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Ball radius.
    #[arg(long, conflicts_with = "entire")]
    pub ball: Option<f64>,
    #[arg(long)]
    pub entire: bool,
    #[arg(long)]
    pub u0: Option<f64>,
    #[arg(long)]
    pub v0: Option<f64>,
    /// Seed for randomized runs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Default, Clone)]
pub struct SolverArgs {
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Embedded Runge–Kutta pair.
    #[arg(long)]
    pub method: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args, Default, Clone)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl ProblemArgs {
    fn file(&self) -> Result<Option<ProblemFile>> {
        match &self.config {
            None => Ok(None),
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
                ProblemFile::from_json(&text).map(Some)
            }
        }
    }

    /// Merges the config file (if any) with the flags. `default_domain` is
    /// used when neither fixes one.
    pub fn resolve(&self, default_domain: Option<Domain>) -> Result<ProblemFile> {
        let base = self.file()?;
        let missing = |what: &str| LabError::InvalidArgument(format!("missing --{what} (or a --config providing it)"));
        let n = self.n.or(base.as_ref().map(|f| f.n)).ok_or_else(|| missing("N"))?;
        let p = self.p.or(base.as_ref().map(|f| f.p)).ok_or_else(|| missing("p"))?;
        let s = self.s.or(base.as_ref().map(|f| f.s)).ok_or_else(|| missing("s"))?;
        let domain = if let Some(r) = self.ball {
            Domain::Ball(r)
        } else if self.entire {
            Domain::EntireSpace
        } else {
            base.as_ref()
                .map(|f| f.domain)
                .or(default_domain)
                .ok_or_else(|| missing("ball R | --entire"))?
        };
        Ok(ProblemFile {
            n,
            a: self.a.or(base.as_ref().map(|f| f.a)).unwrap_or(0.0),
            b: self.b.or(base.as_ref().map(|f| f.b)).unwrap_or(0.0),
            p,
            s,
            domain,
            u0: self.u0.or(base.as_ref().map(|f| f.u0)).unwrap_or(1.0),
            v0: self.v0.or(base.as_ref().map(|f| f.v0)).unwrap_or(1.0),
        })
    }
}

impl SolverArgs {
    fn config(&self, default_r_max: f64) -> SolverConfig {
        let d = SolverConfig::default();
        SolverConfig {
            rtol: self.rtol.unwrap_or(d.rtol),
            atol: self.atol.unwrap_or(d.atol),
            r_max: self.rmax.unwrap_or(default_r_max),
            threshold: self.threshold.unwrap_or(d.threshold),
            method: self.method.clone().unwrap_or(d.method),
            ..d
        }
    }
}

fn validated(file: &ProblemFile) -> Result<(ProblemSpec, InitialData)> {
    let spec = file.spec();
    let report = validate_problem(&spec);
    if !report.ok {
        return Err(LabError::InvalidProblem(report.violations.join("; ")));
    }
    let init = file.init();
    init.ensure_valid()?;
    Ok((spec, init))
}

fn envelope(command: &str, body: Value) -> Value {
    let mut out = json!({ "schema_version": SCHEMA_VERSION, "command": command });
    if let (Value::Object(map), Value::Object(extra)) = (&mut out, body) {
        map.extend(extra);
    }
    out
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// Where and how a command writes its main result.
struct Sink<'a> {
    out: Option<&'a Path>,
    stdout: &'a mut dyn Write,
}

impl Sink<'_> {
    fn write(&mut self, bytes: &[u8]) -> Result<()> {
        match self.out {
            Some(path) => fs::write(path, bytes).map_err(|e| LabError::Io(format!("{}: {e}", path.display()))),
            None => self.stdout.write_all(bytes).map_err(|e| LabError::Io(e.to_string())),
        }
    }

    fn json(&mut self, v: &Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(v).expect("serializable");
        text.push('\n');
        self.write(text.as_bytes())
    }
}

fn problem_json(file: &ProblemFile) -> Value {
    to_value(file)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.blowup.json"))
}

fn cmd_solve(problem: &ProblemArgs, solver: &SolverArgs, output: &OutputArgs, sink: &mut Sink) -> Result<i32> {
    let file = problem.resolve(None)?;
    let (spec, init) = validated(&file)?;
    let cfg = solver.config(SolverConfig::default().r_max);
    let sol = integrate_radial(&spec, &init, &cfg)?;
    let blowup = sol.blowup.as_ref().map(to_value).unwrap_or(Value::Null);
    match output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&sol, &mut buf).map_err(|e| LabError::Io(e.to_string()))?;
            sink.write(&buf)?;
            if let (Some(out), Some(b)) = (sink.out, &sol.blowup) {
                let side = json!({
                    "schema_version": SCHEMA_VERSION,
                    "R_est": b.r_est,
                    "u_blows": b.u_blows,
                    "v_blows": b.v_blows,
                    "du_exponent": b.du_exponent,
                    "dv_exponent": b.dv_exponent,
                });
                let path = sidecar_path(out);
                let mut text = serde_json::to_string_pretty(&side).expect("serializable");
                text.push('\n');
                fs::write(&path, text).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
            }
        }
        Format::Json => {
            let doc = envelope(
                "solve",
                json!({
                    "problem": problem_json(&file),
                    "method": cfg.method,
                    "blowup": blowup,
                    "residual_norm": sol.residual_norm,
                    "grid": to_value(&sol.grid),
                }),
            );
            sink.json(&doc)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_classify(problem: &ProblemArgs, engine: Option<&str>, sink: &mut Sink) -> Result<i32> {
    let file = problem.resolve(None)?;
    let (spec, _) = validated(&file)?;
    let regime = match spec.domain {
        Domain::Ball(_) => {
            let name = engine.unwrap_or_else(|| criteria::default_engine(&spec));
            classify_ball_with(&spec, name)?
        }
        Domain::EntireSpace => {
            if let Some(name) = engine {
                criteria::engine(name)?;
            }
            classify_entire(&spec)?
        }
    };
    let mut body = to_value(&regime);
    if let Value::Object(map) = &mut body {
        map.insert("problem".into(), problem_json(&file));
    }
    sink.json(&envelope("classify", body))?;
    Ok(if regime.tag == RegimeTag::Inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    })
}

fn dyn_params(problem: &ProblemArgs) -> Result<(ProblemFile, DynParams)> {
    let file = problem.resolve(Some(Domain::EntireSpace))?;
    let (spec, _) = validated(&file)?;
    Ok((file, DynParams::from_spec(&spec)?))
}

fn cmd_equilibria(problem: &ProblemArgs, sink: &mut Sink) -> Result<i32> {
    let (_, params) = dyn_params(problem)?;
    let (e1, e2) = dynsys::equilibria(&params)?;
    let stability = dynsys::is_asymptotically_stable(&params)?;
    let hirsch = dynsys::check_hirsch_conditions(&params)?;
    let doc = envelope(
        "equilibria",
        json!({
            "params": to_value(&params),
            "xi1": to_value(&e1),
            "xi2": to_value(&e2),
            "stable": stability.stable,
            "stability": to_value(&stability),
            "hirsch": to_value(&hirsch),
        }),
    );
    sink.json(&doc)?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_flow(
    problem: &ProblemArgs,
    xi0: Option<&[f64]>,
    span: (f64, f64),
    dt: Option<f64>,
    radial: bool,
    solver: &SolverArgs,
    output: &OutputArgs,
    sink: &mut Sink,
) -> Result<i32> {
    let (file, params) = dyn_params(problem)?;
    let traj = if radial {
        let spec = file.spec().with_domain(Domain::EntireSpace);
        let sol = integrate_radial(&spec, &file.init(), &solver.config(SolverConfig::default().r_max))?;
        dynsys::to_dynamical(&sol, &spec)?
    } else {
        let start = match xi0 {
            Some(v) => [v[0], v[1], v[2]],
            None => {
                let mut x = dynsys::xi1(&params);
                x[0] += 1e-3;
                x
            }
        };
        let d = dynsys::FlowConfig::default();
        let cfg = dynsys::FlowConfig {
            rtol: solver.rtol.unwrap_or(d.rtol),
            atol: solver.atol.unwrap_or(d.atol),
            method: solver.method.clone().unwrap_or(d.method),
            sample_dt: dt,
        };
        dynsys::flow_with(&params, &start, span, &cfg)?
    };
    match output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf).map_err(|e| LabError::Io(e.to_string()))?;
            sink.write(&buf)?;
        }
        Format::Json => {
            let omega = dynsys::omega_limit(&traj, &params).ok();
            let doc = envelope(
                "flow",
                json!({
                    "params": to_value(&params),
                    "omega_limit": omega.map(|o| to_value(&o)).unwrap_or(Value::Null),
                    "trajectory": to_value(&traj.states),
                }),
            );
            sink.json(&doc)?;
        }
    }
    Ok(EXIT_OK)
}

fn asymptotics_config(solver: &SolverArgs, window: Option<&[f64]>) -> AsymptoticsConfig {
    let d = AsymptoticsConfig::default();
    AsymptoticsConfig {
        solver: solver.config(d.solver.r_max),
        window: window.map(|w| (w[0], w[1])),
    }
}

fn cmd_verify(problem: &ProblemArgs, solver: &SolverArgs, window: Option<&[f64]>, sink: &mut Sink) -> Result<i32> {
    let file = problem.resolve(Some(Domain::EntireSpace))?;
    let (spec, init) = validated(&file)?;
    let report = verify_asymptotics(&spec, &init, &asymptotics_config(solver, window))?;
    let mut body = to_value(&report);
    if let Value::Object(map) = &mut body {
        map.insert("problem".into(), problem_json(&file));
    }
    sink.json(&envelope("verify", body))?;
    Ok(EXIT_OK)
}

const SWEEP_HEADER: &str = "N,a,b,p,s,status,predicted_v_exponent,fitted_v_exponent,rel_err_v_exponent,\
predicted_u_exponent,fitted_u_exponent,rel_err_u_exponent,predicted_v_prefactor,fitted_v_prefactor,\
rel_err_v_prefactor,fitted_u_prefactor,rel_err_u_prefactor_paper,rel_err_u_prefactor_consistent,u_prefactor_winner";

fn sweep_row(file: &ProblemFile, result: &Result<AsymptoticsReport>) -> String {
    let head = format!("{},{},{},{},{}", file.n, file.a, file.b, file.p, file.s);
    match result {
        Ok(r) => {
            let e = &r.relative_errors;
            let winner = match r.u_prefactor_winner {
                crate::asymptotics::PrefactorChoice::Paper => "paper",
                crate::asymptotics::PrefactorChoice::Consistent => "consistent",
            };
            format!(
                "{head},ok,{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{winner}",
                r.prediction.v_exponent,
                r.fitted_v_exponent,
                e.v_exponent,
                r.prediction.u_exponent,
                r.fitted_u_exponent,
                e.u_exponent,
                r.prediction.v_prefactor,
                r.fitted_v_prefactor,
                e.v_prefactor,
                r.fitted_u_prefactor,
                e.u_prefactor_paper,
                e.u_prefactor_consistent,
            )
        }
        Err(err) => format!("{head},{}{}", err.code(), ",".repeat(13)),
    }
}

fn cmd_sweep(
    problem: &ProblemArgs,
    solver: &SolverArgs,
    p_values: &[f64],
    s_values: &[f64],
    random: usize,
    sink: &mut Sink,
) -> Result<i32> {
    let n = problem.n.ok_or_else(|| LabError::InvalidArgument("missing --N".into()))?;
    let mut points: Vec<(f64, f64)> = p_values
        .iter()
        .flat_map(|&p| s_values.iter().map(move |&s| (p, s)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    for _ in 0..random {
        let p: f64 = rng.gen_range(0.05..0.95);
        let s = rng.gen_range(1.0..(1.0 / p).min(10.0));
        points.push((p, s));
    }
    if points.is_empty() {
        return Err(LabError::InvalidArgument("empty sweep: give --p-values and --s-values or --random".into()));
    }
    let cfg = asymptotics_config(solver, None);
    let files: Vec<ProblemFile> = points
        .iter()
        .map(|&(p, s)| ProblemFile {
            n,
            a: problem.a.unwrap_or(0.0),
            b: problem.b.unwrap_or(0.0),
            p,
            s,
            domain: Domain::EntireSpace,
            u0: problem.u0.unwrap_or(1.0),
            v0: problem.v0.unwrap_or(1.0),
        })
        .collect();
    let rows: Vec<String> = files
        .par_iter()
        .map(|f| {
            let res = validated(f).and_then(|(spec, init)| verify_asymptotics(&spec, &init, &cfg));
            sweep_row(f, &res)
        })
        .collect();
    let mut text = String::from(SWEEP_HEADER);
    text.push('\n');
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    sink.write(text.as_bytes())?;
    Ok(EXIT_OK)
}

fn error_json(err: &LabError) -> String {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "code": err.code(), "message": err.to_string() },
    });
    serde_json::to_string(&v).expect("serializable")
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let out_of = |o: &OutputArgs| o.out.clone();
    match &cli.command {
        Command::Solve { problem, solver, output } => {
            let out = out_of(output);
            let mut sink = Sink { out: out.as_deref(), stdout };
            cmd_solve(problem, solver, output, &mut sink)
        }
        Command::Classify { problem, engine, output } => {
            let out = out_of(output);
            let mut sink = Sink { out: out.as_deref(), stdout };
            reject_csv(output)?;
            cmd_classify(problem, engine.as_deref(), &mut sink)
        }
        Command::Equilibria { problem, output } => {
            let out = out_of(output);
            let mut sink = Sink { out: out.as_deref(), stdout };
            reject_csv(output)?;
            cmd_equilibria(problem, &mut sink)
        }
        Command::Flow {
            problem,
            xi0,
            t0,
            t1,
            dt,
            radial,
            solver,
            output,
        } => {
            let out = out_of(output);
            let mut sink = Sink { out: out.as_deref(), stdout };
            cmd_flow(problem, xi0.as_deref(), (*t0, *t1), *dt, *radial, solver, output, &mut sink)
        }
        Command::Verify {
            problem,
            solver,
            window,
            output,
        } => {
            let out = out_of(output);
            let mut sink = Sink { out: out.as_deref(), stdout };
            reject_csv(output)?;
            cmd_verify(problem, solver, window.as_deref(), &mut sink)
        }
        Command::Sweep {
            problem,
            solver,
            p_values,
            s_values,
            random,
            output,
        } => {
            let out = out_of(output);
            let mut sink = Sink { out: out.as_deref(), stdout };
            if output.format == Some(Format::Json) {
                return Err(LabError::InvalidArgument("sweep writes CSV only".into()));
            }
            cmd_sweep(problem, solver, p_values, s_values, *random, &mut sink)
        }
    }
}

fn reject_csv(output: &OutputArgs) -> Result<()> {
    if output.format == Some(Format::Csv) {
        Err(LabError::InvalidArgument("this command writes JSON only".into()))
    } else {
        Ok(())
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let err = LabError::InvalidArgument(e.to_string().trim().to_string());
            let _ = writeln!(stderr, "{}", error_json(&err));
            return EXIT_INPUT;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(code) => code,
        Err(err) => {
            let _ = writeln!(stderr, "{}", error_json(&err));
            err.exit_code()
        }
    }
}

/// Names accepted by `--method` and `--engine`.
pub fn strategy_names() -> (Vec<&'static str>, Vec<&'static str>) {
    (ode::pair_names(), criteria::engine_names())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("radlab").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn classify_example() {
        let (code, out, _) = call(&["classify", "--N", "3", "--a", "0", "--b", "0", "--p", "1", "--s", "5", "--ball", "1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["regime"], "UBoundedVBlows");
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
    }

    #[test]
    fn entire_space_example() {
        let (code, out, _) = call(&["classify", "--N", "3", "--p", "1", "--s", "2", "--entire"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["regime"], "NoPositiveSolution");
    }

    #[test]
    fn missing_flag_is_input_error() {
        let (code, _, err) = call(&["classify", "--N", "3", "--s", "2", "--entire"]);
        assert_eq!(code, 2);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"]["code"], "invalid_argument");
    }

    #[test]
    fn unknown_flag_is_input_error() {
        let (code, _, err) = call(&["solve", "--bogus"]);
        assert_eq!(code, 2);
        assert!(serde_json::from_str::<Value>(err.trim()).is_ok());
    }

    #[test]
    fn unknown_method_is_input_error() {
        let (code, _, err) = call(&["solve", "--N", "3", "--p", "1", "--s", "1", "--ball", "1", "--method", "euler"]);
        assert_eq!(code, 2);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"]["code"], "unknown_strategy");
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("classify"));
    }
}

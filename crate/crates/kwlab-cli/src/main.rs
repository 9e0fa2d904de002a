//! Command-line surface for the pendulum toolkit: config ingestion, one
//! subcommand per analysis, CSV/JSON emission for external plotting.
//!
//! Exit codes are a stable contract: 0 ok, 2 config error, 3 integration
//! failure, 4 Newton failure, 5 precondition violation.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use kwlab::design::{required_force, verify_design, SineMotion};
use kwlab::integrate::IntegratorConfig;
use kwlab::model::{
    apriori_bound, check_theorem1, check_theorem2, critical_points, from_phase, phi_mean_square,
    ConstantForce, State, Theorem2Report,
};
use kwlab::orbits::{self, find_periodic, SystemKind};
use kwlab::sections::{generate_section, SectionJob};
use kwlab::{Error, ForceModel, Params};

const SCHEMA_VERSION: u32 = 1;
const THEOREM_GRID: usize = 4096;

const EXIT_CONFIG: u8 = 2;
const EXIT_INTEGRATION: u8 = 3;
const EXIT_NEWTON: u8 = 4;
const EXIT_PRECONDITION: u8 = 5;

// ---------------------------------------------------------------------------
// Config file

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    mu: f64,
    k: u32,
    omega: f64,
    #[serde(default = "one")]
    a: f64,
    force: ForceConfig,
    #[serde(default)]
    integrator: IntegratorSection,
    /// Accept a non-integer omega (exact periodicity may fail).
    #[serde(default)]
    allow_real_omega: bool,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum ForceConfig {
    Zero,
    Harmonic {
        c: f64,
        #[serde(rename = "A")]
        amplitude: f64,
    },
    Constant {
        h: f64,
    },
    Tabulated {
        samples: Vec<(f64, f64)>,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegratorSection {
    rtol: Option<f64>,
    atol: Option<f64>,
    max_step: Option<f64>,
    max_steps: Option<usize>,
}

struct Setup {
    params: Params<f64>,
    force: ForceModel<f64>,
    cfg: IntegratorConfig<f64>,
}

#[derive(Debug)]
struct CliFailure {
    code: u8,
    message: String,
}

impl CliFailure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn exit_code_for(err: &Error<f64>) -> u8 {
    match err {
        Error::InvalidParams(_) | Error::NonPositivePhi(_) => EXIT_CONFIG,
        Error::MaxStepsExceeded { .. } | Error::NonFiniteField { .. } => EXIT_INTEGRATION,
        Error::NewtonStagnation { .. } | Error::DegenerateJacobian { .. } => EXIT_NEWTON,
        Error::UnboundedForce
        | Error::MotionGrazesHorizontal { .. }
        | Error::AmplitudeOutOfRange(_) => EXIT_PRECONDITION,
    }
}

fn lift(err: Error<f64>) -> CliFailure {
    CliFailure::new(exit_code_for(&err), err.to_string())
}

fn load_setup(path: &Path, overrides: &Tolerances) -> Result<Setup, CliFailure> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliFailure::new(EXIT_CONFIG, format!("cannot read {}: {e}", path.display()))
    })?;
    let raw: RunConfig = serde_json::from_str(&text).map_err(|e| {
        CliFailure::new(EXIT_CONFIG, format!("{} is not valid config: {e}", path.display()))
    })?;

    let params = if raw.omega.fract() == 0.0 && raw.omega >= 1.0 && raw.omega <= u32::MAX as f64 {
        Params::new(raw.mu, raw.k, raw.omega as u32, raw.a)
    } else if raw.allow_real_omega {
        Params::with_real_omega(raw.mu, raw.k, raw.omega, raw.a)
    } else {
        return Err(CliFailure::new(
            EXIT_CONFIG,
            format!(
                "omega = {} is not a positive integer; set allow_real_omega to accept it",
                raw.omega
            ),
        ));
    }
    .map_err(lift)?;

    let force = match raw.force {
        ForceConfig::Zero => ForceModel::Zero,
        ForceConfig::Harmonic { c, amplitude } => ForceModel::Harmonic { c, amplitude },
        ForceConfig::Constant { h } => ForceModel::general(ConstantForce(h)),
        ForceConfig::Tabulated { samples } => {
            ForceModel::tabulated(&samples, params.period).map_err(lift)?
        }
    };

    let mut cfg = IntegratorConfig::for_params(&params);
    if let Some(rtol) = raw.integrator.rtol {
        cfg.rtol = rtol;
    }
    if let Some(atol) = raw.integrator.atol {
        cfg.atol = atol;
    }
    if let Some(max_step) = raw.integrator.max_step {
        cfg.max_step = max_step;
    }
    if let Some(max_steps) = raw.integrator.max_steps {
        cfg.max_steps = max_steps;
    }
    if let Some(rtol) = overrides.rtol {
        cfg.rtol = rtol;
    }
    if let Some(atol) = overrides.atol {
        cfg.atol = atol;
    }
    if !(cfg.rtol > 0.0 && cfg.atol > 0.0 && cfg.max_step > 0.0) {
        return Err(CliFailure::new(
            EXIT_CONFIG,
            "rtol, atol and max_step must be positive",
        ));
    }
    Ok(Setup { params, force, cfg })
}

// ---------------------------------------------------------------------------
// CLI definition

#[derive(Parser)]
#[command(
    name = "kwlab",
    about = "Simulation and analysis of the horizontally vibrated pendulum",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file (model, force, integrator settings).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Override the relative integration tolerance.
    #[arg(long)]
    rtol: Option<f64>,
    /// Override the absolute integration tolerance.
    #[arg(long)]
    atol: Option<f64>,
}

struct Tolerances {
    rtol: Option<f64>,
    atol: Option<f64>,
}

impl Common {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rtol: self.rtol,
            atol: self.atol,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the full system and write a t,q,p,x,xdot trajectory CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Initial point "q,p".
        #[arg(long, value_name = "Q,P", default_value = "3.141592653589793,0.0")]
        guess: String,
        /// Final time.
        #[arg(long, value_name = "T", default_value_t = std::f64::consts::TAU)]
        t_end: f64,
        /// Output sampling interval.
        #[arg(long, value_name = "DT", default_value_t = 0.01)]
        sample_dt: f64,
    },
    /// Locate a periodic orbit by Newton shooting and report its Floquet data.
    FindOrbit {
        #[command(flatten)]
        common: Common,
        /// Initial guess "q,p".
        #[arg(long, value_name = "Q,P", default_value = "3.141592653589793,0.0")]
        guess: String,
        /// Which vector field to shoot on.
        #[arg(long, value_parser = parse_system, default_value = "full")]
        system: SystemKind,
        /// First locate the averaged orbit from (pi, 0), then use it as the
        /// full-system guess.
        #[arg(long)]
        seed_from_averaged: bool,
    },
    /// Stroboscopic (period-map) section over a grid of seeds.
    Section {
        #[command(flatten)]
        common: Common,
        /// Seed grid "NQxNP".
        #[arg(long, value_name = "NQxNP", default_value = "101x101")]
        grid: String,
        /// Period-map iterations per seed.
        #[arg(long, value_name = "N", default_value_t = 500)]
        iters: usize,
        /// Seed window in q, "lo,hi".
        #[arg(long, value_name = "LO,HI", default_value = "1.5707963267948966,4.71238898038469")]
        q_range: String,
        /// Seed window in p, "lo,hi".
        #[arg(long, value_name = "LO,HI", default_value = "-2.0,2.0")]
        p_range: String,
    },
    /// Report Phi, critical points, theorem verdicts and the a-priori bound.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Solve the inverse problem for q(t) = pi + A sin t and verify it.
    Design {
        #[command(flatten)]
        common: Common,
        /// Amplitude A of the prescribed motion.
        #[arg(long, value_name = "A")]
        amplitude: f64,
        /// Number of force samples over one period.
        #[arg(long, value_name = "N", default_value_t = 1024)]
        n_samples: usize,
        /// Where to write the verification JSON; stdout when omitted.
        #[arg(long, value_name = "PATH")]
        verify_out: Option<PathBuf>,
    },
    /// Distance between full and averaged orbits across fast multipliers.
    SweepK {
        #[command(flatten)]
        common: Common,
        /// Comma-separated k values.
        #[arg(long, value_name = "K,K,...", default_value = "10,20,40,80")]
        k_values: String,
    },
}

fn parse_system(s: &str) -> Result<SystemKind, String> {
    match s {
        "full" => Ok(SystemKind::Full),
        "averaged" => Ok(SystemKind::Averaged),
        other => Err(format!("unknown system {other:?} (expected full|averaged)")),
    }
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), CliFailure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() == 2 {
        if let (Ok(a), Ok(b)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
            return Ok((a, b));
        }
    }
    Err(CliFailure::new(
        EXIT_CONFIG,
        format!("cannot parse {what} {s:?}: expected two comma-separated numbers"),
    ))
}

fn parse_grid(s: &str) -> Result<(usize, usize), CliFailure> {
    let parts: Vec<&str> = s.split('x').collect();
    if parts.len() == 2 {
        if let (Ok(a), Ok(b)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
            return Ok((a, b));
        }
    }
    Err(CliFailure::new(
        EXIT_CONFIG,
        format!("cannot parse grid {s:?}: expected NQxNP"),
    ))
}

// ---------------------------------------------------------------------------
// Output helpers

/// 17 significant digits: round-trips f64 exactly. Negative zero is
/// normalized so "all zeros" columns read as such.
fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliFailure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| {
            CliFailure::new(EXIT_CONFIG, format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<(), CliFailure> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    emit(out, &text)
}

/// Companion gnuplot script next to a CSV output.
fn write_gnuplot(csv: &Path, script_body: &str) {
    let path = csv.with_extension("gp");
    let _ = fs::write(path, script_body);
}

#[derive(Serialize)]
struct OrbitJson {
    schema_version: u32,
    system: &'static str,
    fixed_point: [f64; 2],
    residual: f64,
    monodromy: [f64; 4],
    multipliers: [ComplexJson; 2],
    stability: &'static str,
    q_range: [f64; 2],
    no_fall: bool,
}

#[derive(Serialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

fn orbit_json(orbit: &orbits::OrbitResult<f64>) -> OrbitJson {
    OrbitJson {
        schema_version: SCHEMA_VERSION,
        system: match orbit.system {
            SystemKind::Full => "full",
            SystemKind::Averaged => "averaged",
        },
        fixed_point: [orbit.fixed_point.0, orbit.fixed_point.1],
        residual: orbit.residual,
        monodromy: [
            orbit.monodromy[0][0],
            orbit.monodromy[0][1],
            orbit.monodromy[1][0],
            orbit.monodromy[1][1],
        ],
        multipliers: [
            ComplexJson {
                re: orbit.multipliers[0].re,
                im: orbit.multipliers[0].im,
            },
            ComplexJson {
                re: orbit.multipliers[1].re,
                im: orbit.multipliers[1].im,
            },
        ],
        stability: orbit.stability.as_str(),
        q_range: [orbit.q_range.0, orbit.q_range.1],
        no_fall: orbit.no_fall,
    }
}

fn theorem_summaries(setup: &Setup) -> (serde_json::Value, serde_json::Value) {
    let t1 = check_theorem1(&setup.force, &setup.params, THEOREM_GRID);
    let t1_json = serde_json::json!({
        "satisfied": t1.satisfied,
        "margin": t1.margin,
    });
    let t2_json = match check_theorem2(&setup.force, &setup.params, THEOREM_GRID) {
        Theorem2Report::NotApplicable { phi } => serde_json::json!({
            "applicable": false,
            "phi": phi,
        }),
        Theorem2Report::Checked { satisfied, margins } => serde_json::json!({
            "applicable": true,
            "satisfied": satisfied,
            "margins": margins,
        }),
    };
    (t1_json, t2_json)
}

// ---------------------------------------------------------------------------
// Subcommands

fn cmd_simulate(
    common: &Common,
    guess: &str,
    t_end: f64,
    sample_dt: f64,
) -> Result<(), CliFailure> {
    let setup = load_setup(&common.config, &common.tolerances())?;
    let (q0, p0) = parse_pair(guess, "--guess")?;
    if !(t_end > 0.0) || !(sample_dt > 0.0) {
        return Err(CliFailure::new(
            EXIT_CONFIG,
            "--t-end and --sample-dt must be positive",
        ));
    }

    let field = orbits::phase_field(SystemKind::Full, &setup.params, &setup.force);
    let mut csv = String::new();
    let _ = writeln!(csv, "# schema_version {SCHEMA_VERSION}");
    let _ = writeln!(csv, "t,q,p,x,xdot");

    // Integrate chunk by chunk (one slow period at a time) so long runs do
    // not hold the full dense trajectory in memory.
    let chunk = setup.params.period;
    let mut t0 = 0.0f64;
    let mut y = [q0, p0];
    let mut next_sample = 0.0f64;
    let mut sample_idx = 0usize;
    let mut failure: Option<(f64, String)> = None;

    'outer: while t0 < t_end {
        let t1 = (t0 + chunk).min(t_end);
        let res = kwlab::integrate::integrate(&field, t0, y, t1, &setup.cfg, &[]);
        let (traj, fail_t) = match &res {
            Ok(out) => (&out.trajectory, None),
            Err(f) => (&f.partial.trajectory, Some(f.t)),
        };
        let reach = traj.t_end();
        while next_sample <= reach + 1e-12 {
            let t = next_sample.min(reach);
            let s = traj.eval(t);
            let (x, xdot) = from_phase(&State::new(s[0], s[1], t), &setup.params);
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                num(t),
                num(s[0]),
                num(s[1]),
                num(x),
                num(xdot)
            );
            sample_idx += 1;
            next_sample = sample_dt * sample_idx as f64;
        }
        match (res, fail_t) {
            (Ok(out), _) => {
                y = out.trajectory.end_state();
                t0 = t1;
            }
            (Err(f), Some(t)) => {
                failure = Some((t, format!("{:?}", f.kind)));
                break 'outer;
            }
            _ => unreachable!(),
        }
    }

    if let Some((t, kind)) = failure {
        let _ = writeln!(csv, "# integration failed ({kind}) at t = {}", num(t));
        emit(&common.out, &csv)?;
        return Err(CliFailure::new(
            EXIT_INTEGRATION,
            format!("integration failed ({kind}) at t = {t}; partial output flushed"),
        ));
    }

    emit(&common.out, &csv)?;
    if let Some(path) = &common.out {
        write_gnuplot(
            path,
            &format!(
                "set datafile separator ','\n\
                 set xlabel 't'\n\
                 set ylabel 'q'\n\
                 plot '{}' using 1:2 with lines title 'q(t)'\n",
                path.display()
            ),
        );
    }
    Ok(())
}

fn cmd_find_orbit(
    common: &Common,
    guess: &str,
    system: SystemKind,
    seed_from_averaged: bool,
) -> Result<(), CliFailure> {
    let setup = load_setup(&common.config, &common.tolerances())?;
    let mut guess = parse_pair(guess, "--guess")?;

    if seed_from_averaged {
        let averaged = find_periodic(
            guess,
            SystemKind::Averaged,
            &setup.params,
            &setup.force,
            &setup.cfg,
        )
        .map_err(lift)?;
        guess = averaged.fixed_point;
    }

    match find_periodic(guess, system, &setup.params, &setup.force, &setup.cfg) {
        Ok(orbit) => {
            let (t1, t2) = theorem_summaries(&setup);
            let mut doc = serde_json::to_value(orbit_json(&orbit)).expect("serializable");
            doc["theorem1"] = t1;
            doc["theorem2"] = t2;
            emit_json(&common.out, &doc)
        }
        Err(Error::NewtonStagnation {
            iterations,
            q,
            p,
            residual,
        }) => {
            let doc = serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "error": "newton_stagnation",
                "iterations": iterations,
                "best_iterate": [q, p],
                "residual": residual,
            });
            emit_json(&common.out, &doc)?;
            Err(CliFailure::new(
                EXIT_NEWTON,
                format!("Newton stagnated after {iterations} iterations (residual {residual})"),
            ))
        }
        Err(e) => Err(lift(e)),
    }
}

fn cmd_section(
    common: &Common,
    grid: &str,
    iters: usize,
    q_range: &str,
    p_range: &str,
) -> Result<(), CliFailure> {
    let setup = load_setup(&common.config, &common.tolerances())?;
    let job = SectionJob {
        q_range: parse_pair(q_range, "--q-range")?,
        p_range: parse_pair(p_range, "--p-range")?,
        grid: parse_grid(grid)?,
        iterations: iters,
        params: setup.params,
        force: setup.force.clone(),
    };
    job.validate().map_err(lift)?;

    let cloud = generate_section(&job, &setup.cfg).map_err(lift)?;
    let mut csv = String::new();
    let _ = writeln!(csv, "# schema_version {SCHEMA_VERSION}");
    let _ = writeln!(csv, "seed_id,iter,q,p");
    for pt in &cloud.points {
        let _ = writeln!(csv, "{},{},{},{}", pt.seed_id, pt.iteration, num(pt.q), num(pt.p));
    }
    emit(&common.out, &csv)?;
    if let Some(path) = &common.out {
        write_gnuplot(
            path,
            &format!(
                "set datafile separator ','\n\
                 set xlabel 'q'\n\
                 set ylabel 'p'\n\
                 plot '{}' using 3:4 with dots notitle\n",
                path.display()
            ),
        );
    }
    Ok(())
}

fn cmd_check(common: &Common) -> Result<(), CliFailure> {
    let setup = load_setup(&common.config, &common.tolerances())?;
    let phi = phi_mean_square(&setup.params);
    let cp_json = match critical_points(phi) {
        Ok(cp) => {
            let inner = cp.inner.map(|i| {
                serde_json::json!({
                    "qmax2": i.qmax2,
                    "qmin2": i.qmin2,
                    "degenerate": (i.qmax2 - i.qmin2).abs() < 1e-12,
                })
            });
            serde_json::json!({
                "lambda1": cp.lambda1,
                "lambda2": cp.lambda2,
                "qmin1": cp.qmin1,
                "qmax1": cp.qmax1,
                "inner": inner,
            })
        }
        Err(_) => serde_json::Value::Null,
    };
    let (t1, t2) = theorem_summaries(&setup);
    let bound = match apriori_bound(&setup.params, &setup.force) {
        Ok(c) => serde_json::json!(c),
        Err(_) => serde_json::Value::Null,
    };
    let doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "phi": phi,
        "critical_points": cp_json,
        "theorem1": t1,
        "theorem2": t2,
        "apriori_bound": bound,
    });
    emit_json(&common.out, &doc)
}

fn cmd_design(
    common: &Common,
    amplitude: f64,
    n_samples: usize,
    verify_out: &Option<PathBuf>,
) -> Result<(), CliFailure> {
    let setup = load_setup(&common.config, &common.tolerances())?;
    let motion = SineMotion::new(amplitude).map_err(lift)?;
    let force = required_force(&motion, &setup.params, n_samples).map_err(lift)?;

    let mut csv = String::new();
    let _ = writeln!(csv, "# schema_version {SCHEMA_VERSION}");
    let _ = writeln!(csv, "# prescribed motion q(t) = pi + A sin t, A = {}", num(amplitude));
    let _ = writeln!(csv, "t,h");
    for (t, h) in &force.samples {
        let _ = writeln!(csv, "{},{}", num(*t), num(*h));
    }
    emit(&common.out, &csv)?;
    if let Some(path) = &common.out {
        write_gnuplot(
            path,
            &format!(
                "set datafile separator ','\n\
                 set xlabel 't'\n\
                 set ylabel 'h'\n\
                 plot '{}' using 1:2 with lines title 'h(t)'\n",
                path.display()
            ),
        );
    }

    let report = verify_design(&motion, &force, &setup.params, &setup.cfg).map_err(lift)?;
    let mut doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "amplitude": amplitude,
        "sup_error": report.sup_error,
    });
    doc["orbit"] = serde_json::to_value(orbit_json(&report.orbit)).expect("serializable");
    emit_json(verify_out, &doc)
}

fn cmd_sweep_k(common: &Common, k_values: &str) -> Result<(), CliFailure> {
    let setup = load_setup(&common.config, &common.tolerances())?;
    let ks: Result<Vec<u32>, _> = k_values
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect();
    let ks = ks.map_err(|_| {
        CliFailure::new(
            EXIT_CONFIG,
            format!("cannot parse --k-values {k_values:?}: expected comma-separated integers"),
        )
    })?;
    if ks.is_empty() {
        return Err(CliFailure::new(EXIT_CONFIG, "--k-values must be nonempty"));
    }

    let points = orbits::averaging_sweep(&ks, &setup.params, &setup.force, |p| {
        let mut cfg = IntegratorConfig::for_params(p);
        cfg.rtol = setup.cfg.rtol;
        cfg.atol = setup.cfg.atol;
        cfg
    })
    .map_err(lift)?;

    let rows: Vec<serde_json::Value> = points
        .iter()
        .map(|pt| match &pt.distance {
            Ok(d) => serde_json::json!({"k": pt.k, "distance": d}),
            Err(e) => serde_json::json!({"k": pt.k, "error": e.to_string()}),
        })
        .collect();
    let doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "points": rows,
    });
    emit_json(&common.out, &doc)
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    env_logger::init();

    if let Ok(threads) = std::env::var("KWLAB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }

    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate {
            common,
            guess,
            t_end,
            sample_dt,
        } => cmd_simulate(common, guess, *t_end, *sample_dt),
        Command::FindOrbit {
            common,
            guess,
            system,
            seed_from_averaged,
        } => cmd_find_orbit(common, guess, *system, *seed_from_averaged),
        Command::Section {
            common,
            grid,
            iters,
            q_range,
            p_range,
        } => cmd_section(common, grid, *iters, q_range, p_range),
        Command::Check { common } => cmd_check(common),
        Command::Design {
            common,
            amplitude,
            n_samples,
            verify_out,
        } => cmd_design(common, *amplitude, *n_samples, verify_out),
        Command::SweepK { common, k_values } => cmd_sweep_k(common, k_values),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

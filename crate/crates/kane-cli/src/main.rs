//! Command-line interface over the Kane-model library: calibration tables,
//! level scans, fidelity reports, thermal reports, and schedule simulation.
//!
//! Exit codes: 0 success, 2 validation error, 3 solver failure (both error
//! paths emit a machine-readable JSON object on stderr).

mod expr;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use kane::analysis::{self, XInitialState};
use kane::design::{self, CzSolveOptions};
use kane::model::{Basis, ModelParams, StateVector};
use kane::profiles::{PulseSchedule, ScheduleSpec};
use kane::propagate::{self, StepSize};
use kane::spectra;
use kane::units;
use kane::{C64, KaneError};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kane", version, about = "Kane-model pulse simulator and gate calibrator")]
struct Cli {
    /// Model parameter JSON (falls back to $KANE_PARAMS, then built-ins)
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format where a command supports both
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exchange-scan of the computational block energies (CSV)
    Levels(LevelsArgs),
    /// Calibrate a Z rotation (JSON)
    #[command(name = "design-z")]
    DesignZ(DesignZArgs),
    /// Calibrate a controlled-Z gate (JSON)
    #[command(name = "design-cz")]
    DesignCz(DesignCzArgs),
    /// Exact-vs-approximate X-rotation fidelity (JSON)
    #[command(name = "xrot-fidelity")]
    XrotFidelity(XrotArgs),
    /// Z-rotation calibration table (CSV)
    Table1,
    /// X-rotation fidelity table (CSV)
    Table2,
    /// Controlled-Z calibration table (CSV)
    Table3,
    /// Propagate a schedule (final state JSON, optional trajectory CSV)
    Simulate(SimulateArgs),
    /// Thermal-state report (JSON)
    Thermal(ThermalArgs),
    /// Pulse profile utilities
    Profile {
        #[command(subcommand)]
        action: ProfileAction,
    },
}

#[derive(Subcommand)]
enum ProfileAction {
    /// Emit (t, A1, A2, J, drive_on) samples of a schedule (CSV)
    Dump(ProfileDumpArgs),
}

#[derive(Args)]
struct LevelsArgs {
    /// Upper scan bound in units of ε
    #[arg(long, default_value_t = 0.6)]
    j_max_over_eps: f64,
    #[arg(long, default_value_t = 600)]
    points: usize,
    /// Hyperfine in units of A0
    #[arg(long, default_value_t = 1.0)]
    a_over_a0: f64,
}

#[derive(Args)]
struct DesignZArgs {
    /// Target angle, e.g. `pi/4`
    #[arg(long)]
    theta: String,
    /// Target-qubit winding
    #[arg(long, default_value_t = -5, allow_hyphen_values = true)]
    m: i32,
    /// Spectator winding (sets the duration)
    #[arg(long, default_value_t = -6, allow_hyphen_values = true)]
    n: i32,
}

#[derive(Args)]
struct DesignCzArgs {
    #[arg(long)]
    theta: String,
    #[arg(long)]
    seed_jc_over_eps: f64,
    #[arg(long, default_value_t = 0.25)]
    seed_tau_prime: f64,
    #[arg(long, default_value_t = 0)]
    m_plus: i32,
    #[arg(long, default_value_t = 0)]
    m_minus: i32,
    #[arg(long, default_value_t = 1)]
    m4: i32,
}

#[derive(Args)]
struct XrotArgs {
    /// Plateau hyperfine in units of A0
    #[arg(long)]
    ratio: f64,
    #[arg(long, value_parser = ["0", "plus"])]
    state: String,
    #[arg(long, default_value = "pi/4")]
    theta: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// Schedule JSON (compact tagged form or full schedule serialization)
    #[arg(long)]
    schedule: PathBuf,
    /// `basis:<index>` or a JSON file with 16 [re, im] pairs
    #[arg(long, default_value = "basis:0")]
    init: String,
    /// `auto` or a fixed step in ps
    #[arg(long, default_value = "auto")]
    dt: String,
    /// Also write a sampled trajectory CSV to this path
    #[arg(long)]
    emit_trajectory: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Args)]
struct ThermalArgs {
    #[arg(long)]
    temp_mk: f64,
    #[arg(long, default_value_t = 1.0)]
    a_over_a0: f64,
}

#[derive(Args)]
struct ProfileDumpArgs {
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long, default_value_t = 1000)]
    points: usize,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Solver(String),
}

impl From<KaneError> for CliError {
    fn from(e: KaneError) -> Self {
        match e {
            KaneError::InvalidParameter { .. }
            | KaneError::OutOfHorizon { .. }
            | KaneError::LeftDomain { .. } => CliError::Validation(e.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}

fn fmt_float(x: f64) -> String {
    // 17 significant digits, scientific: lossless f64 round-trip
    format!("{x:.16e}")
}

fn params_hash(p: &ModelParams) -> String {
    let json = serde_json::to_string(p).expect("params serialize");
    let mut h = Sha256::new();
    h.update(json.as_bytes());
    hex_string(&h.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn load_params(path: &Option<PathBuf>) -> Result<ModelParams, CliError> {
    let chosen = path
        .clone()
        .or_else(|| std::env::var_os("KANE_PARAMS").map(PathBuf::from));
    let p = match chosen {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(|e| CliError::Validation(e.to_string()))?;
            serde_json::from_str::<ModelParams>(&text)
                .map_err(|e| CliError::Validation(format!("parsing params: {e}")))?
        }
        None => ModelParams::default(),
    };
    p.validate().map_err(CliError::from)?;
    Ok(p)
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Validation(format!("writing {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Validation(e.to_string()))
        }
    }
}

#[derive(Serialize)]
struct ZDesignRecord {
    theta_z_rad: f64,
    m: i32,
    n: i32,
    a: f64,
    #[serde(rename = "tZ_us")]
    t_z_us: f64,
    residual: f64,
    params_hash: String,
}

#[derive(Serialize)]
struct CzDesignRecord {
    theta_cz_rad: f64,
    m_plus: i32,
    m_minus: i32,
    m4: i32,
    #[serde(rename = "Jc_meV")]
    j_c_mev: f64,
    #[serde(rename = "Jc_over_eps")]
    j_c_over_eps: f64,
    tau_prime: f64,
    ta_ns: f64,
    th_us: f64,
    residuals: [f64; 2],
    iterations: usize,
    residual_norm: f64,
    jacobian_condition: f64,
    at_residual_floor: bool,
    crossing_flagged: bool,
    params_hash: String,
}

#[derive(Serialize)]
struct FidelityRecord {
    #[serde(rename = "A_over_A0")]
    a_over_a0: f64,
    theta_x_rad: f64,
    initial_state: String,
    fidelity: f64,
    exact_state: Vec<[f64; 2]>,
    approx_state: Vec<[f64; 2]>,
    params_hash: String,
}

#[derive(Serialize)]
struct ThermalRecord {
    temperature_k: f64,
    #[serde(rename = "A_over_A0")]
    a_over_a0: f64,
    populations: [f64; 4],
    ratio_up_down: f64,
    params_hash: String,
}

#[derive(Serialize)]
struct FinalStateRecord {
    t_ps: f64,
    amplitudes: Vec<[f64; 2]>,
    step_count: usize,
    max_unitarity_defect: f64,
    halving_difference: f64,
    params_hash: String,
}

fn amplitudes_json(v: &StateVector) -> Vec<[f64; 2]> {
    v.amplitudes.iter().map(|z| [z.re, z.im]).collect()
}

/// Row-oriented output: CSV by default, a JSON array of objects on
/// `--format json`. Cells keep their emission-time numeric values.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<serde_json::Value>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<serde_json::Value>) {
        assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render(&self, format: Option<&str>) -> Result<String, CliError> {
        match format {
            None | Some("csv") => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|v| match v {
                            serde_json::Value::Number(n) if n.is_f64() => {
                                fmt_float(n.as_f64().expect("numeric cell"))
                            }
                            serde_json::Value::Number(n) => n.to_string(),
                            serde_json::Value::Bool(b) => b.to_string(),
                            serde_json::Value::String(s) => s.clone(),
                            other => other.to_string(),
                        })
                        .collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                Ok(out)
            }
            Some("json") => {
                let objects: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = serde_json::Map::new();
                        for (k, v) in self.columns.iter().zip(row) {
                            obj.insert((*k).to_string(), v.clone());
                        }
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                Ok(to_json(&objects))
            }
            Some(other) => Err(CliError::Validation(format!("unknown format '{other}'"))),
        }
    }
}

fn require_json_format(format: &Option<String>) -> Result<(), CliError> {
    match format.as_deref() {
        None | Some("json") => Ok(()),
        Some(other) => Err(CliError::Validation(format!(
            "this command only emits json, not '{other}'"
        ))),
    }
}

fn num(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let p = load_params(&cli.params)?;
    match &cli.command {
        Command::Levels(args) => {
            if args.points == 0 || !(args.j_max_over_eps > 0.0) {
                return Err(CliError::Validation("empty scan grid".into()));
            }
            let grid: Vec<f64> = (0..args.points)
                .map(|k| {
                    args.j_max_over_eps * p.eps() * k as f64 / (args.points - 1).max(1) as f64
                })
                .collect();
            let rows = spectra::energy_level_scan(&p, args.a_over_a0 * p.a0, &grid);
            let mut table = Table::new(vec![
                "J_meV", "E01_1", "E01_2", "E-1-1_1", "E-1-1_2", "E-11_1", "E-21_1", "crossing",
            ]);
            for r in rows {
                let e = r.energies;
                table.push(vec![
                    num(r.j),
                    num(e[0]),
                    num(e[1]),
                    num(e[2]),
                    num(e[3]),
                    num(e[4]),
                    num(e[5]),
                    serde_json::Value::Bool(r.crossing),
                ]);
            }
            table.render(cli.format.as_deref())
        }
        Command::DesignZ(args) => {
            require_json_format(&cli.format)?;
            let theta = expr::parse_angle(&args.theta).map_err(CliError::Validation)?;
            let d = design::solve_z_rotation(&p, theta, args.m, args.n)?;
            let record = ZDesignRecord {
                theta_z_rad: d.theta_z,
                m: d.m,
                n: d.n,
                a: d.pulse.a,
                t_z_us: units::ps_to_us(d.pulse.t_z),
                residual: d.residual,
                params_hash: params_hash(&p),
            };
            Ok(to_json(&record))
        }
        Command::DesignCz(args) => {
            require_json_format(&cli.format)?;
            let theta = expr::parse_angle(&args.theta).map_err(CliError::Validation)?;
            let d = design::solve_cz(
                &p,
                theta,
                args.seed_jc_over_eps * p.eps(),
                args.seed_tau_prime,
                args.m_plus,
                args.m_minus,
                args.m4,
                CzSolveOptions::default(),
            )?;
            let record = CzDesignRecord {
                theta_cz_rad: d.theta_cz,
                m_plus: d.m_plus,
                m_minus: d.m_minus,
                m4: d.m4,
                j_c_mev: d.pulse.j_c,
                j_c_over_eps: d.pulse.j_c / p.eps(),
                tau_prime: d.pulse.tau_prime,
                ta_ns: units::ps_to_ns(d.pulse.t_a),
                th_us: units::ps_to_us(d.pulse.t_h),
                residuals: d.residuals,
                iterations: d.diagnostics.iterations,
                residual_norm: d.diagnostics.residual_norm,
                jacobian_condition: d.diagnostics.jacobian_condition,
                at_residual_floor: d.diagnostics.at_residual_floor,
                crossing_flagged: d.crossing_flagged,
                params_hash: params_hash(&p),
            };
            Ok(to_json(&record))
        }
        Command::XrotFidelity(args) => {
            require_json_format(&cli.format)?;
            let theta = expr::parse_angle(&args.theta).map_err(CliError::Validation)?;
            let state = if args.state == "0" {
                XInitialState::ZeroL
            } else {
                XInitialState::PlusL
            };
            let rep = analysis::x_rotation_fidelity(&p, args.ratio, theta, state)?;
            let record = FidelityRecord {
                a_over_a0: rep.a_over_a0,
                theta_x_rad: rep.theta_x,
                initial_state: rep.initial_state,
                fidelity: rep.fidelity,
                exact_state: amplitudes_json(&rep.exact_state),
                approx_state: amplitudes_json(&rep.approx_state),
                params_hash: params_hash(&p),
            };
            Ok(to_json(&record))
        }
        Command::Table1 => {
            let mut table = Table::new(vec!["theta_Z", "a", "tZ_us"]);
            for (label, theta) in [("pi/4", PI / 4.0), ("pi/2", PI / 2.0)] {
                let d = design::solve_z_rotation(&p, theta, -5, -6)?;
                table.push(vec![
                    serde_json::Value::String(label.into()),
                    num(d.pulse.a),
                    num(units::ps_to_us(d.pulse.t_z)),
                ]);
            }
            table.render(cli.format.as_deref())
        }
        Command::Table2 => {
            let mut table = Table::new(vec!["A_over_A0", "F_state0", "F_statePlus"]);
            for ratio in [0.75, 0.5, 0.25] {
                let f0 = analysis::x_rotation_fidelity(&p, ratio, PI / 4.0, XInitialState::ZeroL)?;
                let fp = analysis::x_rotation_fidelity(&p, ratio, PI / 4.0, XInitialState::PlusL)?;
                table.push(vec![num(ratio), num(f0.fidelity), num(fp.fidelity)]);
            }
            table.render(cli.format.as_deref())
        }
        Command::Table3 => {
            let mut table = Table::new(vec![
                "seed_Jc_over_eps",
                "Jc_over_eps",
                "tau_prime",
                "ta_ns",
                "th_us",
            ]);
            for (jf, tp) in [(0.1003, 0.1085), (0.1988, 0.0916), (0.01, 0.2203)] {
                let d = design::solve_cz(
                    &p,
                    PI,
                    jf * p.eps(),
                    tp,
                    0,
                    0,
                    1,
                    CzSolveOptions::default(),
                )?;
                table.push(vec![
                    num(jf),
                    num(d.pulse.j_c / p.eps()),
                    num(d.pulse.tau_prime),
                    num(units::ps_to_ns(d.pulse.t_a)),
                    num(units::ps_to_us(d.pulse.t_h)),
                ]);
            }
            table.render(cli.format.as_deref())
        }
        Command::Simulate(args) => {
            require_json_format(&cli.format)?;
            let schedule = load_schedule(&p, &args.schedule)?;
            let psi0 = parse_init(&args.init)?;
            let dt = if args.dt == "auto" {
                StepSize::Auto
            } else {
                let v: f64 = args
                    .dt
                    .parse()
                    .map_err(|_| CliError::Validation(format!("bad dt '{}'", args.dt)))?;
                if !(v > 0.0) {
                    return Err(CliError::Validation("dt must be positive".into()));
                }
                StepSize::Fixed(v)
            };
            let horizon = schedule.horizon();
            if let Some(traj_path) = &args.emit_trajectory {
                let mut csv = String::from("t_ps");
                for k in 0..16 {
                    csv.push_str(&format!(",re_{k},im_{k}"));
                }
                csv.push('\n');
                let push_row = |csv: &mut String, t: f64, v: &StateVector| {
                    csv.push_str(&fmt_float(t));
                    for z in v.amplitudes.iter() {
                        csv.push_str(&format!(",{},{}", fmt_float(z.re), fmt_float(z.im)));
                    }
                    csv.push('\n');
                };
                let mut psi = psi0.clone();
                push_row(&mut csv, 0.0, &psi);
                let n = args.samples.max(1);
                for k in 0..n {
                    let t0 = horizon * k as f64 / n as f64;
                    let t1 = horizon * (k + 1) as f64 / n as f64;
                    let res = propagate::evolve(&p, &schedule, &psi, t0, t1, dt)?;
                    psi = res.final_state;
                    push_row(&mut csv, t1, &psi);
                }
                std::fs::write(traj_path, &csv).map_err(|e| {
                    CliError::Validation(format!("writing {}: {e}", traj_path.display()))
                })?;
            }
            let res = propagate::evolve(&p, &schedule, &psi0, 0.0, horizon, dt)?;
            let record = FinalStateRecord {
                t_ps: horizon,
                amplitudes: amplitudes_json(&res.final_state),
                step_count: res.step_count,
                max_unitarity_defect: res.max_unitarity_defect,
                halving_difference: res.halving_difference,
                params_hash: params_hash(&p),
            };
            Ok(to_json(&record))
        }
        Command::Thermal(args) => {
            require_json_format(&cli.format)?;
            if !(args.temp_mk > 0.0) {
                return Err(CliError::Validation("temperature must be positive".into()));
            }
            let rep =
                analysis::thermal_state(&p, args.a_over_a0 * p.a0, units::mk_to_k(args.temp_mk));
            let record = ThermalRecord {
                temperature_k: rep.temperature,
                a_over_a0: args.a_over_a0,
                populations: rep.populations,
                ratio_up_down: rep.ratio_up_down,
                params_hash: params_hash(&p),
            };
            Ok(to_json(&record))
        }
        Command::Profile { action } => match action {
            ProfileAction::Dump(args) => {
                let schedule = load_schedule(&p, &args.schedule)?;
                if args.points < 2 {
                    return Err(CliError::Validation("need at least 2 points".into()));
                }
                let mut table = Table::new(vec!["t_ps", "A1_meV", "A2_meV", "J_meV", "drive_on"]);
                let horizon = schedule.horizon();
                for k in 0..args.points {
                    let t = horizon * k as f64 / (args.points - 1) as f64;
                    table.push(vec![
                        num(t),
                        num(schedule.a1(&p, t)),
                        num(schedule.a2(&p, t)),
                        num(schedule.j(t)),
                        serde_json::Value::from(u8::from(schedule.drive_at(t).is_some())),
                    ]);
                }
                table.render(cli.format.as_deref())
            }
        },
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialize record");
    s.push('\n');
    s
}

fn load_schedule(p: &ModelParams, path: &PathBuf) -> Result<PulseSchedule, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("reading {}: {e}", path.display())))?;
    if let Ok(spec) = serde_json::from_str::<ScheduleSpec>(&text) {
        return spec.into_schedule(p).map_err(CliError::from);
    }
    serde_json::from_str::<PulseSchedule>(&text)
        .map_err(|e| CliError::Validation(format!("parsing schedule: {e}")))
}

fn parse_init(init: &str) -> Result<StateVector, CliError> {
    if let Some(idx) = init.strip_prefix("basis:") {
        let k: usize = idx
            .parse()
            .map_err(|_| CliError::Validation(format!("bad basis index '{idx}'")))?;
        if k >= 16 {
            return Err(CliError::Validation("basis index must be < 16".into()));
        }
        return Ok(StateVector::basis_state(k, Basis::TwoSite));
    }
    let text = std::fs::read_to_string(init)
        .map_err(|e| CliError::Validation(format!("reading {init}: {e}")))?;
    let pairs: Vec<[f64; 2]> = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("parsing initial state: {e}")))?;
    if pairs.len() != 16 {
        return Err(CliError::Validation(
            "initial state needs 16 amplitudes".into(),
        ));
    }
    let amps: Vec<C64> = pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect();
    let mut psi = StateVector::from_amplitudes(amps, Basis::TwoSite);
    let n = psi.norm();
    if n == 0.0 {
        return Err(CliError::Validation("initial state has zero norm".into()));
    }
    if (n - 1.0).abs() > 1e-10 {
        psi.normalize();
    }
    Ok(psi)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(content) => match write_output(&cli.out, &content) {
            Ok(()) => ExitCode::SUCCESS,
            Err(CliError::Validation(msg)) | Err(CliError::Solver(msg)) => {
                eprintln!(
                    "{}",
                    serde_json::json!({"error": {"kind": "io", "message": msg}})
                );
                ExitCode::from(2)
            }
        },
        Err(CliError::Validation(msg)) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": {"kind": "validation", "message": msg}})
            );
            ExitCode::from(2)
        }
        Err(CliError::Solver(msg)) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": {"kind": "solver", "message": msg}})
            );
            ExitCode::from(3)
        }
    }
}

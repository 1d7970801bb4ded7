//! Command-line front end. Exit codes: 0 success, 2 configuration or
//! input error, 3 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use posmet_core::estimation::{bootstrap_fi, extract_fi, fit_fringe};
use posmet_core::hardware::{magic_frequency, ShotPlan, MAGIC_WINDOW_CALIBRATED, MAGIC_WINDOW_EQUAL};
use posmet_core::metrology::{concurrence_bound, max_qfi_over_axes, two_tls_qfi, EvolutionSign};
use posmet_core::protocols::{comparison_table, run_ideal, sequential_positronium_qfi, ProtocolKind, ProtocolSpec, TableRow};
use posmet_core::qfim::sphere_average_effective_qfi;
use posmet_core::states::{concurrence, random_state};
use posmet_core::{Axis, TwoTlsState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::Config;
use crate::error::AppError;
use crate::experiment::{self, alpha_grid, ExperimentProtocol, NamedAxis, Settings};
use crate::io::{read_fringe_csv, Table};
use crate::sim::{derive_seed, simulate_parallel};

#[derive(Debug, Parser)]
#[command(name = "posmet", version, about = "Qubit/antiqubit phase-estimation simulator")]
pub struct Cli {
    /// JSON config; the shipped default is used when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Shots per α point.
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    /// x, y, z or "theta,phi" in radians.
    #[arg(long, global = true, value_parser = parse_axis)]
    pub axis: Option<NamedAxis>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Omit wall-clock fields so reruns are byte-identical.
    #[arg(long, global = true)]
    pub reproducible: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fisher information of a protocol, the nuisance-limited sphere
    /// average, or the concurrence bound on sampled states.
    Qfi(QfiArgs),
    /// Outcome probabilities against α.
    Sweep(SweepArgs),
    /// Drive frequency giving equal and opposite Stark shifts.
    MagicFreq(MagicArgs),
    /// Simulated shots, fringe fits and FI per axis.
    Experiment(ExperimentArgs),
    /// FI per two units of space-time volume for every strategy.
    ProtocolsTable(TableArgs),
    /// Fit a fringe from CSV (alpha_rad, outcome_frequency, shot_count).
    Fit(FitArgs),
    /// Raw shot record at one α.
    Shots(ShotsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    Positronium,
    Agnostic,
    Separable,
    Sequential,
    SingleQubitThreeAxis,
}

impl ProtocolArg {
    fn kind(self, n_reps: u32) -> ProtocolKind {
        match self {
            ProtocolArg::Positronium => ProtocolKind::Positronium,
            ProtocolArg::Agnostic => ProtocolKind::Agnostic,
            ProtocolArg::Separable => ProtocolKind::SeparableAntimatter,
            ProtocolArg::Sequential => ProtocolKind::PositroniumSequential { n_reps },
            ProtocolArg::SingleQubitThreeAxis => ProtocolKind::SingleQubitThreeAxis,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StateArg {
    Random,
    Singlet,
    PhiPlus,
}

#[derive(Debug, Args)]
pub struct QfiArgs {
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolArg>,
    #[arg(long, default_value_t = 0.7, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub n_reps: u32,
    /// Sphere-averaged effective QFI of the separable state with the
    /// field direction unknown.
    #[arg(long)]
    pub effective_separable: bool,
    #[arg(long, value_enum)]
    pub state: Option<StateArg>,
    /// Compare the axis-maximized QFI with 2(1 + C).
    #[arg(long)]
    pub check_bound: bool,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = ProtocolArg::Positronium)]
    pub protocol: ProtocolArg,
    #[arg(long)]
    pub alpha_points: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub n_reps: u32,
    /// Apply the configured noise model.
    #[arg(long)]
    pub noisy: bool,
}

#[derive(Debug, Args)]
pub struct MagicArgs {
    #[arg(long)]
    pub amp_ratio: Option<f64>,
    /// "lo,hi" in GHz.
    #[arg(long)]
    pub window: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum, default_value_t = ExperimentProtocol::Positronium)]
    pub protocol: ExperimentProtocol,
    #[arg(long)]
    pub alpha_points: Option<usize>,
    #[arg(long)]
    pub noiseless: bool,
    #[arg(long)]
    pub no_readout_correction: bool,
    /// Add bootstrap spreads with the configured resample count.
    #[arg(long)]
    pub bootstrap: bool,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 0.7, allow_negative_numbers = true)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long)]
    pub bootstrap: bool,
}

#[derive(Debug, Args)]
pub struct ShotsArgs {
    #[arg(long, value_enum, default_value_t = ProtocolArg::Positronium)]
    pub protocol: ProtocolArg,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub n_reps: u32,
    #[arg(long)]
    pub noisy: bool,
}

pub fn parse_axis(s: &str) -> Result<NamedAxis, String> {
    let axis = match s.trim().to_ascii_lowercase().as_str() {
        "x" => Axis::X,
        "y" => Axis::Y,
        "z" => Axis::Z,
        other => {
            let parts: Vec<&str> = other.split(',').collect();
            let [t, p] = parts.as_slice() else {
                return Err(format!("axis must be x, y, z or theta,phi; got {s:?}"));
            };
            let t: f64 = t.trim().parse().map_err(|e| format!("theta: {e}"))?;
            let p: f64 = p.trim().parse().map_err(|e| format!("phi: {e}"))?;
            if !(t.is_finite() && p.is_finite()) {
                return Err("axis angles must be finite".into());
            }
            Axis::from_angles(t, p)
        }
    };
    Ok(NamedAxis { name: s.trim().to_string(), axis })
}

/// A command's result as JSON and, where it has one, a flat table.
pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
}

fn f(v: f64) -> String {
    format!("{v}")
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T, E>(args: I, env: E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    E: IntoIterator<Item = (String, String)>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli, env) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute<E: IntoIterator<Item = (String, String)>>(cli: &Cli, env: E) -> Result<(), AppError> {
    let cfg = Config::load(cli.config.as_deref(), env)?;
    let start = Instant::now();
    let report = dispatch(cli, &cfg)?;
    let mut json = report.json;
    if !cli.reproducible {
        if let Value::Object(m) = &mut json {
            let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            m.insert("generated_unix_s".into(), json!(now));
            m.insert("runtime_s".into(), json!(start.elapsed().as_secs_f64()));
        }
    }
    let mut sink: Box<dyn Write> = match &cli.output {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| AppError::Io(format!("{}: {e}", p.display())))?),
        None => Box::new(std::io::stdout().lock()),
    };
    match cli.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &json).map_err(|e| AppError::Io(e.to_string()))?;
            writeln!(sink)?;
        }
        Format::Csv => match &report.table {
            Some(t) => t.write_csv(&mut sink)?,
            None => return Err(AppError::Config("this command has no CSV form".into())),
        },
    }
    sink.flush()?;
    Ok(())
}

pub fn dispatch(cli: &Cli, cfg: &Config) -> Result<Report, AppError> {
    let seed = cli.seed.unwrap_or(cfg.experiment.seed);
    match &cli.command {
        Command::Qfi(a) => cmd_qfi(a, cli.axis.as_ref(), seed),
        Command::Sweep(a) => cmd_sweep(a, cli, cfg, seed),
        Command::MagicFreq(a) => cmd_magic_freq(a, cfg),
        Command::Experiment(a) => cmd_experiment(a, cli, cfg, seed),
        Command::ProtocolsTable(a) => cmd_protocols_table(a, cli.axis.as_ref()),
        Command::Fit(a) => cmd_fit(a, cfg, seed),
        Command::Shots(a) => cmd_shots(a, cli, cfg, seed),
    }
}

fn default_axis(axis: Option<&NamedAxis>) -> NamedAxis {
    axis.cloned().unwrap_or(NamedAxis { name: "x".into(), axis: Axis::X })
}

fn key_value_table(pairs: &[(&str, f64)]) -> Table {
    let mut t = Table::new(&["quantity", "value"]);
    for (k, v) in pairs {
        t.push(vec![k.to_string(), f(*v)]);
    }
    t
}

fn cmd_qfi(a: &QfiArgs, axis: Option<&NamedAxis>, seed: u64) -> Result<Report, AppError> {
    if a.effective_separable {
        let s = sphere_average_effective_qfi().map_err(AppError::numerical("sphere average"))?;
        let table = key_value_table(&[
            ("mean_inverse_closed", s.mean_inverse_closed),
            ("mean_inverse_numeric", s.mean_inverse_numeric),
            ("effective_qfi_closed", s.effective_qfi_closed),
            ("effective_qfi_numeric", s.effective_qfi_numeric),
        ]);
        return Ok(Report { json: json!({ "effective_separable": s }), table: Some(table) });
    }
    if let Some(state) = a.state {
        return qfi_states(a, state, axis, seed);
    }
    let protocol = a.protocol.unwrap_or(ProtocolArg::Positronium);
    let na = default_axis(axis);
    let spec = ProtocolSpec { kind: protocol.kind(a.n_reps), axis: na.axis, alpha: a.alpha };
    let r = run_ideal(&spec).map_err(AppError::numerical("protocol evaluation"))?;
    let mut json = json!({ "protocol": spec.kind, "axis": na.name, "alpha": a.alpha, "result": r });
    let mut pairs = vec![("fi", r.fi), ("v_st", r.v_st as f64), ("fi_per_two_vst", r.fi_per_two_vst)];
    if let ProtocolKind::PositroniumSequential { n_reps } = spec.kind {
        let (q, _) = sequential_positronium_qfi(n_reps).map_err(AppError::numerical("sequential QFI"))?;
        json["qfi"] = json!(q);
        pairs.push(("qfi", q));
    }
    Ok(Report { json, table: Some(key_value_table(&pairs)) })
}

fn qfi_states(a: &QfiArgs, state: StateArg, axis: Option<&NamedAxis>, seed: u64) -> Result<Report, AppError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<TwoTlsState> = match state {
        StateArg::Random => (0..a.samples.max(1)).map(|_| random_state(&mut rng)).collect(),
        StateArg::Singlet => vec![TwoTlsState::singlet()],
        StateArg::PhiPlus => vec![TwoTlsState::phi_plus()],
    };
    let mut table = Table::new(&["sample", "sign", "concurrence", "max_qfi", "bound", "satisfied", "qfi_along_axis"]);
    let mut rows = Vec::new();
    let (mut all_ok, mut worst) = (true, f64::NEG_INFINITY);
    let na = default_axis(axis);
    for (i, psi) in states.iter().enumerate() {
        for s in [EvolutionSign::Plus, EvolutionSign::Minus] {
            let c = concurrence(psi);
            let (q, n) = max_qfi_over_axes(psi, s);
            let bound = concurrence_bound(c).map_err(AppError::numerical("concurrence bound"))?;
            let along = two_tls_qfi(psi, s, &na.axis);
            let ok = q <= bound + 1e-5;
            all_ok &= ok;
            worst = worst.max(q - bound);
            let sign = s.value();
            table.push(vec![i.to_string(), f(sign), f(c), f(q), f(bound), ok.to_string(), f(along)]);
            rows.push(json!({ "sample": i, "sign": sign, "concurrence": c, "max_qfi": q, "best_axis": n, "bound": bound, "satisfied": ok, "qfi_along_axis": along }));
        }
    }
    let mut json = json!({ "state": format!("{state:?}").to_ascii_lowercase(), "seed": seed, "axis": na.name, "rows": rows });
    if a.check_bound {
        json["bound_satisfied"] = json!(all_ok);
        json["max_excess"] = json!(worst);
    }
    Ok(Report { json, table: Some(table) })
}

fn measured(kind: ProtocolKind, p: &[f64; 4]) -> Vec<(&'static str, f64)> {
    let v = match kind {
        ProtocolKind::SeparableAntimatter => vec![("qubit_x", p[0] + p[1]), ("antiqubit_z", p[0] + p[2])],
        _ => vec![("singlet", p[1])],
    };
    // sums of rounded probabilities can land a few ulps outside [0, 1]
    v.into_iter().map(|(n, x)| (n, x.clamp(0.0, 1.0))).collect()
}

fn sweep_axes(cli: &Cli) -> Vec<NamedAxis> {
    cli.axis.clone().map(|a| vec![a]).unwrap_or_else(NamedAxis::xyz)
}

fn cmd_sweep(a: &SweepArgs, cli: &Cli, cfg: &Config, seed: u64) -> Result<Report, AppError> {
    let points = a.alpha_points.unwrap_or(cfg.experiment.alpha_points);
    if points < 2 {
        return Err(AppError::Config("alpha_points must be at least 2".into()));
    }
    let noise = if a.noisy { cfg.noise_model() } else { posmet_core::hardware::NoiseModel::noiseless() };
    let kind = a.protocol.kind(a.n_reps);
    let mut header = vec!["axis", "measurement", "alpha", "probability"];
    if cli.shots.is_some() {
        header.push("shot_frequency");
    }
    let mut table = Table::new(&header);
    let mut rows = Vec::new();
    for (ai, na) in sweep_axes(cli).iter().enumerate() {
        for (i, alpha) in alpha_grid(points).into_iter().enumerate() {
            let spec = ProtocolSpec { kind, axis: na.axis, alpha };
            let plan = ShotPlan::new(&spec, &noise).map_err(AppError::numerical("sweep"))?;
            let expected = measured(kind, &plan.expected_frequencies());
            let shots = cli.shots.map(|n| simulate_parallel(&plan, n, derive_seed(seed, ((ai as u64) << 32) | i as u64), cfg.threads()).frequencies());
            let shot_vals = shots.map(|p| measured(kind, &p));
            for (j, (name, prob)) in expected.iter().enumerate() {
                let mut row = vec![na.name.clone(), name.to_string(), f(alpha), f(*prob)];
                let mut obj = json!({ "axis": na.name, "measurement": name, "alpha": alpha, "probability": prob });
                if let Some(sv) = &shot_vals {
                    row.push(f(sv[j].1));
                    obj["shot_frequency"] = json!(sv[j].1);
                }
                table.push(row);
                rows.push(obj);
            }
        }
    }
    let json = json!({ "protocol": kind, "noisy": a.noisy, "seed": seed, "shots": cli.shots, "rows": rows });
    Ok(Report { json, table: Some(table) })
}

fn parse_window(s: &str) -> Result<(f64, f64), AppError> {
    let parts: Vec<&str> = s.split(',').collect();
    let [lo, hi] = parts.as_slice() else {
        return Err(AppError::Config(format!("window must be lo,hi; got {s:?}")));
    };
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| AppError::Config(format!("window: {e}")));
    Ok((p(lo)?, p(hi)?))
}

fn cmd_magic_freq(a: &MagicArgs, cfg: &Config) -> Result<Report, AppError> {
    let d = &cfg.device;
    let variants: Vec<(f64, (f64, f64))> = if a.amp_ratio.is_none() && a.window.is_none() {
        vec![(1.0, MAGIC_WINDOW_EQUAL), (d.antiqubit_amp_ratio, MAGIC_WINDOW_CALIBRATED)]
    } else {
        let r = a.amp_ratio.unwrap_or(d.antiqubit_amp_ratio);
        let w = match &a.window {
            Some(s) => parse_window(s)?,
            None if r == 1.0 => MAGIC_WINDOW_EQUAL,
            None => MAGIC_WINDOW_CALIBRATED,
        };
        vec![(r, w)]
    };
    let poles = json!({
        "qubit": d.qubit.poles(),
        "antiqubit": d.antiqubit.poles(),
    });
    let mut table = Table::new(&["amp_ratio", "window_lo_ghz", "window_hi_ghz", "magic_ghz", "qubit_shift_ghz", "antiqubit_shift_ghz"]);
    let mut out = Vec::new();
    for (r, w) in variants {
        let root = magic_frequency(d, r, w).map_err(AppError::numerical("magic frequency"))?;
        let sq = d.qubit.stark_shift(root, 1.0).map_err(AppError::numerical("Stark shift"))?;
        let sa = d.antiqubit.stark_shift(root, r).map_err(AppError::numerical("Stark shift"))?;
        table.push(vec![f(r), f(w.0), f(w.1), f(root), f(sq), f(sa)]);
        out.push(json!({ "amp_ratio": r, "window_ghz": [w.0, w.1], "magic_ghz": root, "qubit_shift_per_unit_amp2_ghz": sq, "antiqubit_shift_per_unit_amp2_ghz": sa }));
    }
    Ok(Report { json: json!({ "variants": out, "poles_ghz": poles }), table: Some(table) })
}

fn cmd_experiment(a: &ExperimentArgs, cli: &Cli, cfg: &Config, seed: u64) -> Result<Report, AppError> {
    let settings = Settings {
        protocol: a.protocol,
        alpha_points: a.alpha_points.unwrap_or(cfg.experiment.alpha_points),
        shots: cli.shots.unwrap_or(cfg.experiment.shots_per_point),
        seed,
        noise: if a.noiseless { posmet_core::hardware::NoiseModel::noiseless() } else { cfg.noise_model() },
        readout_correction: cfg.experiment.readout_correction && !a.no_readout_correction,
        threads: a.threads.unwrap_or_else(|| cfg.threads()),
        bootstrap: if a.bootstrap { cfg.experiment.bootstrap_resamples } else { 0 },
        axes: sweep_axes(cli),
        max_alpha: Some(cfg.max_alpha()),
    };
    let r = experiment::run(&settings)?;
    let mut table = Table::new(&["axis", "fi", "delta", "rms_residual", "clipped_points", "bootstrap_std"]);
    for ax in &r.axes {
        table.push(vec![ax.axis.clone(), f(ax.fi), f(ax.delta), f(ax.rms_residual), ax.clipped_points.to_string(), ax.bootstrap_std.map(f).unwrap_or_default()]);
    }
    table.push(vec!["mean".into(), f(r.mean_fi), f(r.delta), String::new(), String::new(), String::new()]);
    let json = serde_json::to_value(&r).map_err(|e| AppError::Io(e.to_string()))?;
    Ok(Report { json, table: Some(table) })
}

fn table_rows(alpha: f64, axis: &Axis) -> Result<Vec<TableRow>, AppError> {
    let mut rows = comparison_table(alpha, axis).map_err(AppError::numerical("comparison table"))?;
    for k in 1..=4 {
        let (q, v) = sequential_positronium_qfi(k).map_err(AppError::numerical("sequential QFI"))?;
        rows.push(TableRow { protocol: format!("positronium_sequential_n{k}"), fi: q, v_st: v, fi_per_two_vst: 2.0 * q / v as f64 });
    }
    Ok(rows)
}

fn cmd_protocols_table(a: &TableArgs, axis: Option<&NamedAxis>) -> Result<Report, AppError> {
    let na = default_axis(axis);
    let rows = table_rows(a.alpha, &na.axis)?;
    let mut table = Table::new(&["protocol", "fi", "v_st", "fi_per_two_vst"]);
    for r in &rows {
        table.push(vec![r.protocol.clone(), f(r.fi), r.v_st.to_string(), f(r.fi_per_two_vst)]);
    }
    Ok(Report { json: json!({ "alpha": a.alpha, "axis": na.name, "rows": rows }), table: Some(table) })
}

fn cmd_fit(a: &FitArgs, cfg: &Config, seed: u64) -> Result<Report, AppError> {
    let file = std::fs::File::open(&a.input).map_err(|e| AppError::Io(format!("{}: {e}", a.input.display())))?;
    let data = read_fringe_csv(file)?;
    let fit = fit_fringe(&data, a.k).map_err(AppError::numerical("fit"))?;
    let est = extract_fi(&fit).map_err(AppError::numerical("extraction"))?;
    let mut json = json!({
        "A": fit.amplitude, "phi0": fit.phase, "B": fit.offset, "k": fit.k,
        "covariance": fit.covariance, "fi": est.fi, "alpha_star": est.alpha_star, "delta": est.delta,
        "chi2_reduced": fit.chi2_reduced, "rms_residual": fit.rms_residual, "degenerate_phase": fit.degenerate_phase,
    });
    let mut pairs = vec![("A", fit.amplitude), ("phi0", fit.phase), ("B", fit.offset), ("fi", est.fi), ("alpha_star", est.alpha_star), ("delta", est.delta)];
    if a.bootstrap {
        let b = bootstrap_fi(&data, a.k, cfg.experiment.bootstrap_resamples, seed).map_err(AppError::numerical("bootstrap"))?;
        json["bootstrap"] = json!(b);
        pairs.push(("bootstrap_std", b.std));
    }
    Ok(Report { json, table: Some(key_value_table(&pairs)) })
}

fn cmd_shots(a: &ShotsArgs, cli: &Cli, cfg: &Config, seed: u64) -> Result<Report, AppError> {
    let na = default_axis(cli.axis.as_ref());
    let noise = if a.noisy { cfg.noise_model() } else { posmet_core::hardware::NoiseModel::noiseless() };
    let spec = ProtocolSpec { kind: a.protocol.kind(a.n_reps), axis: na.axis, alpha: a.alpha };
    let plan = ShotPlan::new(&spec, &noise).map_err(AppError::numerical("shot simulation"))?;
    let n = cli.shots.unwrap_or(cfg.experiment.shots_per_point);
    if n == 0 {
        return Err(AppError::Config("shots must be at least 1".into()));
    }
    let rec = simulate_parallel(&plan, n, seed, cfg.threads());
    let mut table = Table::new(&["shot_index", "qubit_bit", "antiqubit_bit"]);
    for (i, b) in rec.outcomes.iter().enumerate() {
        table.push(vec![i.to_string(), b[0].to_string(), b[1].to_string()]);
    }
    let json = json!({
        "protocol": spec.kind, "axis": na.name, "alpha": a.alpha, "seed": rec.seed, "n_shots": rec.n_shots,
        "counts": rec.counts(), "frequencies": rec.frequencies(), "expected_frequencies": plan.expected_frequencies(),
    });
    Ok(Report { json, table: Some(table) })
}

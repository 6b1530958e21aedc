//! Command-line front end: parameter sweeps, the iteration study, the
//! line-of-sight demo and the relaxation bound check.
//!
//! A summary table goes to stderr. CSV goes to `--out` when given and to
//! stdout otherwise; with `--json` stdout carries a JSON summary instead.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use irsbf::channel::{sample_los, sample_rayleigh_vector};
use irsbf::los::{asymptotic_snr, los_channel_set, solve_los};
use irsbf::model::units::linear_to_db;
use irsbf::sim::io::{format_float, write_iteration_csv, SweepCsvWriter};
use irsbf::sim::scheme::solve_irs;
use irsbf::sim::sweep::{stream_rng, CHANNEL_STREAM, INIT_STREAM};
use irsbf::sim::{
    realization_seed, run_iteration_study, run_sweep, upper_bound, ConfigOverrides, DesignSettings, Scheme, SimResult,
    SweepSpec, SweepVariable,
};
use irsbf::{
    draw_channels, run_mm, CompositeChannel, Geometry, LiftedPhaseVector, MmSettings, PhaseConstraint, RayleighSpec,
    SdrSettings, SystemConfig,
};

#[derive(Debug, Parser)]
#[command(
    name = "irsbf",
    version,
    about = "Robust transmit and IRS reflect beamforming experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the number of reflecting elements.
    SweepN(CommonArgs),
    /// Sweep the horizontal source-destination offset (m).
    SweepDistance(CommonArgs),
    /// Sweep the transmit power (dBW).
    SweepPower(CommonArgs),
    /// Sweep the common impairment level kappa.
    SweepKappa(CommonArgs),
    /// Average iterations of plain and accelerated MM per element count.
    IterationStudy(CommonArgs),
    /// Closed-form design on rank-one channels without a direct link.
    LosDemo(CommonArgs),
    /// Compare MM against the relaxation bound per realization.
    BoundCheck(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Channel realizations per point (default depends on the command).
    #[arg(long)]
    pub channels: Option<usize>,
    /// QPSK symbols per realization.
    #[arg(long, default_value_t = 2000)]
    pub symbols: usize,
    /// Phase resolution in bits; continuous phases when omitted.
    #[arg(long)]
    pub bits: Option<u32>,
    /// CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of `key = value` lines overriding the default system parameters.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print a JSON summary on stdout.
    #[arg(long)]
    pub json: bool,
    /// Comma-separated sweep values (element counts for the study and demo).
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Use SQUAREM-accelerated MM in sweeps and the bound check.
    #[arg(long)]
    pub accelerate: bool,
}

/// Parses `args` (program name first) and runs the command on the process
/// stdout and stderr.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    execute(&cli, &mut io::stdout(), &mut io::stderr())
}

/// Runs a parsed command with explicit output streams.
pub fn execute(cli: &Cli, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> Result<()> {
    let common = match &cli.command {
        Command::SweepN(a)
        | Command::SweepDistance(a)
        | Command::SweepPower(a)
        | Command::SweepKappa(a)
        | Command::IterationStudy(a)
        | Command::LosDemo(a)
        | Command::BoundCheck(a) => a,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("building worker pool")?;
    pool.install(|| dispatch(&cli.command, common, stdout, stderr))
}

fn dispatch(command: &Command, a: &CommonArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let (cfg, geo) = base_config(a)?;
    match command {
        Command::SweepN(_) => sweep(SweepVariable::NI, a, &cfg, &geo, stdout, stderr),
        Command::SweepDistance(_) => sweep(SweepVariable::DistanceSdH, a, &cfg, &geo, stdout, stderr),
        Command::SweepPower(_) => sweep(SweepVariable::PowerDbw, a, &cfg, &geo, stdout, stderr),
        Command::SweepKappa(_) => sweep(SweepVariable::Kappa, a, &cfg, &geo, stdout, stderr),
        Command::IterationStudy(_) => iteration_study(a, &cfg, &geo, stdout, stderr),
        Command::LosDemo(_) => los_demo(a, &cfg, &geo, stdout, stderr),
        Command::BoundCheck(_) => bound_check(a, &cfg, &geo, stdout, stderr),
    }
}

fn base_config(a: &CommonArgs) -> Result<(SystemConfig, Geometry)> {
    let overrides = match &a.config {
        Some(path) => ConfigOverrides::load(path)?,
        None => ConfigOverrides::default(),
    };
    Ok(overrides.apply(&SystemConfig::default(), &Geometry::default())?)
}

fn phase_mode(a: &CommonArgs) -> Result<PhaseConstraint> {
    Ok(match a.bits {
        Some(b) => PhaseConstraint::discrete(b)?,
        None => PhaseConstraint::Continuous,
    })
}

fn mm_settings(a: &CommonArgs) -> MmSettings {
    MmSettings::default().accelerated(a.accelerate)
}

pub fn default_values(variable: SweepVariable) -> Vec<f64> {
    match variable {
        SweepVariable::NI => vec![4.0, 18.0, 32.0, 46.0, 60.0],
        SweepVariable::DistanceSdH => vec![20.0, 30.0, 40.0, 45.0, 50.0, 55.0, 60.0, 70.0, 80.0],
        SweepVariable::PowerDbw => vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0],
        SweepVariable::Kappa => vec![0.02, 0.05, 0.08, 0.11, 0.15],
    }
}

fn element_counts(a: &CommonArgs, default: &[usize]) -> Result<Vec<usize>> {
    match &a.values {
        None => Ok(default.to_vec()),
        Some(v) => v
            .iter()
            .map(|&x| {
                if x >= 0.0 && x.fract() == 0.0 {
                    Ok(x as usize)
                } else {
                    bail!("element counts must be non-negative integers, got {x}")
                }
            })
            .collect(),
    }
}

/// CSV sink: the `--out` file, or stdout unless stdout carries JSON.
fn csv_sink<'a>(a: &CommonArgs, stdout: &'a mut dyn Write) -> Result<Option<Box<dyn Write + 'a>>> {
    Ok(match (&a.out, a.json) {
        (Some(path), _) => Some(Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        ))),
        (None, false) => Some(Box::new(stdout)),
        (None, true) => None,
    })
}

fn sweep(
    variable: SweepVariable,
    a: &CommonArgs,
    cfg: &SystemConfig,
    geo: &Geometry,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let spec = SweepSpec {
        n_channels: a.channels.unwrap_or(500),
        n_symbols: a.symbols,
        seed: a.seed,
        phase_mode: phase_mode(a)?,
        design: DesignSettings {
            mm: mm_settings(a),
            ..Default::default()
        },
        ..SweepSpec::new(variable, a.values.clone().unwrap_or_else(|| default_values(variable)))
    };
    spec.validate()?;

    let mut results = Vec::new();
    {
        let mut writer = csv_sink(a, stdout)?.map(SweepCsvWriter::new).transpose()?;
        // one point at a time so completed points reach the CSV before a failure
        for &value in &spec.values {
            let point = SweepSpec {
                values: vec![value],
                ..spec.clone()
            };
            let r = run_sweep(&point, cfg, geo)?.remove(0);
            if let Some(w) = writer.as_mut() {
                w.write(&r)?;
            }
            results.push(r);
        }
    }
    write_sweep_table(&results, stderr)?;
    if a.json {
        writeln!(
            stdout,
            "{}",
            serde_json::to_string_pretty(&sweep_json(variable, &spec, &results))?
        )?;
    }
    Ok(())
}

fn sweep_json(variable: SweepVariable, spec: &SweepSpec, results: &[SimResult]) -> serde_json::Value {
    json!({
        "sweep_variable": variable.name(),
        "seed": spec.seed,
        "channels": spec.n_channels,
        "symbols": spec.n_symbols,
        "results": results.iter().map(|r| json!({
            "value": r.sweep_value,
            "schemes": r.schemes.iter().map(|s| json!({
                "scheme": s.scheme.name(),
                "mean_snr_db": s.mean_snr_db,
                "ser": s.ser,
                "mean_iterations": s.mean_iterations,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn write_sweep_table(results: &[SimResult], out: &mut dyn Write) -> io::Result<()> {
    let Some(first) = results.first() else {
        return Ok(());
    };
    for (title, pick) in [
        (
            "mean SNR (dB)",
            (|s: &irsbf::sim::SchemeStats| Some(s.mean_snr_db)) as fn(&_) -> Option<f64>,
        ),
        ("SER", |s| s.ser),
    ] {
        writeln!(out, "{title}")?;
        write!(out, "{:>10}", first.sweep_variable.name())?;
        for s in Scheme::ALL {
            write!(out, " {:>17}", s.name())?;
        }
        writeln!(out)?;
        for r in results {
            write!(out, "{:>10}", r.sweep_value)?;
            for s in &r.schemes {
                match pick(s) {
                    Some(x) => write!(out, " {x:>17.4}")?,
                    None => write!(out, " {:>17}", "-")?,
                }
            }
            writeln!(out)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn iteration_study(
    a: &CommonArgs,
    cfg: &SystemConfig,
    geo: &Geometry,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let n_i = element_counts(a, &[4, 18, 32, 46, 60])?;
    let channels = a.channels.unwrap_or(100);
    let rows = run_iteration_study(&n_i, cfg, geo, a.seed, channels, &MmSettings::default())?;
    if let Some(w) = csv_sink(a, stdout)? {
        write_iteration_csv(&rows, w)?;
    }
    writeln!(
        stderr,
        "{:>6} {:>14} {:>14} {:>14} {:>14}",
        "n_i", "robust", "robust+sqm", "nonrobust", "nonrobust+sqm"
    )?;
    for r in &rows {
        writeln!(
            stderr,
            "{:>6} {:>14.2} {:>14.2} {:>14.2} {:>14.2}",
            r.n_i, r.robust_plain, r.robust_accelerated, r.nonrobust_plain, r.nonrobust_accelerated
        )?;
    }
    if a.json {
        let v = json!({
            "channels": channels,
            "seed": a.seed,
            "rows": rows.iter().map(|r| json!({
                "n_i": r.n_i,
                "robust_plain": r.robust_plain,
                "robust_accelerated": r.robust_accelerated,
                "nonrobust_plain": r.nonrobust_plain,
                "nonrobust_accelerated": r.nonrobust_accelerated,
            })).collect::<Vec<_>>(),
        });
        writeln!(stdout, "{}", serde_json::to_string_pretty(&v)?)?;
    }
    Ok(())
}

struct LosRow {
    n_i: usize,
    closed_form_db: f64,
    asymptotic_db: f64,
    mm_db: f64,
    max_mm_gap: f64,
}

fn los_demo(
    a: &CommonArgs,
    cfg: &SystemConfig,
    geo: &Geometry,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let n_i_list = element_counts(a, &[50, 100, 200, 400])?;
    let draws = a.channels.unwrap_or(200);
    let gains = geo.link_gains()?;
    let spec = RayleighSpec::new(gains.id)?;
    let mm = MmSettings {
        epsilon: 1e-9,
        ..MmSettings::default().accelerated(true)
    };

    let mut rows = Vec::new();
    for n_i in n_i_list {
        let cfg = cfg.with_n_i(n_i).validate()?;
        let per_draw: Vec<(f64, f64)> = (0..draws as u64)
            .into_par_iter()
            .map(|i| -> Result<(f64, f64)> {
                let seed = realization_seed(a.seed, i);
                let mut rng = stream_rng(seed, CHANNEL_STREAM);
                let ch = sample_los(&mut rng, cfg.n_s, n_i, gains.si);
                let h_id = sample_rayleigh_vector(&mut rng, n_i, gains.id);
                let sol = solve_los(&ch, &h_id, &cfg, Some(&spec))?;
                let psi = CompositeChannel::build(&los_channel_set(&ch, &h_id)?)?;
                let init = LiftedPhaseVector::random(psi.lifted_len(), &mut stream_rng(seed, INIT_STREAM));
                Ok((sol.snr, run_mm(init, &psi, &cfg, &mm)?.eval.snr))
            })
            .collect::<Result<_>>()?;
        let n = draws as f64;
        let closed = per_draw.iter().map(|p| p.0).sum::<f64>() / n;
        let by_mm = per_draw.iter().map(|p| p.1).sum::<f64>() / n;
        rows.push(LosRow {
            n_i,
            closed_form_db: linear_to_db(closed),
            asymptotic_db: linear_to_db(asymptotic_snr(&cfg, n_i, gains.id, gains.si)),
            mm_db: linear_to_db(by_mm),
            max_mm_gap: per_draw.iter().map(|(c, m)| (c - m) / c).fold(0.0, f64::max),
        });
    }

    if let Some(w) = csv_sink(a, stdout)? {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["n_i", "closed_form_snr_db", "asymptotic_snr_db", "mm_snr_db"])?;
        for r in &rows {
            w.write_record([
                r.n_i.to_string(),
                format_float(r.closed_form_db),
                format_float(r.asymptotic_db),
                format_float(r.mm_db),
            ])?;
        }
        w.flush()?;
    }
    writeln!(
        stderr,
        "{:>6} {:>12} {:>12} {:>12} {:>14}",
        "n_i", "closed (dB)", "asymp (dB)", "MM (dB)", "max MM gap"
    )?;
    for r in &rows {
        writeln!(
            stderr,
            "{:>6} {:>12.4} {:>12.4} {:>12.4} {:>14.3e}",
            r.n_i, r.closed_form_db, r.asymptotic_db, r.mm_db, r.max_mm_gap
        )?;
    }
    if a.json {
        let v = json!({
            "draws": draws,
            "seed": a.seed,
            "rows": rows.iter().map(|r| json!({
                "n_i": r.n_i,
                "closed_form_snr_db": r.closed_form_db,
                "asymptotic_snr_db": r.asymptotic_db,
                "mm_snr_db": r.mm_db,
                "max_mm_relative_gap": r.max_mm_gap,
            })).collect::<Vec<_>>(),
        });
        writeln!(stdout, "{}", serde_json::to_string_pretty(&v)?)?;
    }
    Ok(())
}

struct BoundRow {
    mm_psi_tilde: f64,
    mm_snr: f64,
    bound_psi_tilde: f64,
    bound_snr: f64,
    gap: f64,
    rank: usize,
    converged: bool,
}

fn bound_check(
    a: &CommonArgs,
    cfg: &SystemConfig,
    geo: &Geometry,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let channels = a.channels.unwrap_or(50);
    let mm = mm_settings(a);
    let rows: Vec<BoundRow> = (0..channels as u64)
        .into_par_iter()
        .map(|i| -> Result<BoundRow> {
            let seed = realization_seed(a.seed, i);
            let ch = draw_channels(&mut stream_rng(seed, CHANNEL_STREAM), cfg, geo)?;
            let irs = solve_irs(&ch, cfg, &mm, &mut stream_rng(seed, INIT_STREAM))?;
            let ub = upper_bound(&ch, cfg, &SdrSettings::default(), Some(&irs.robust.theta_tilde))?;
            Ok(BoundRow {
                mm_psi_tilde: irs.robust.eval.psi_tilde_val,
                mm_snr: irs.robust.eval.snr,
                bound_psi_tilde: ub.bound_psi_tilde,
                bound_snr: ub.bound_snr,
                gap: ub.relative_gap(),
                rank: ub.numerical_rank(1e-6),
                converged: ub.converged,
            })
        })
        .collect::<Result<_>>()?;

    if let Some(w) = csv_sink(a, stdout)? {
        let mut w = csv::Writer::from_writer(w);
        w.write_record([
            "instance",
            "mm_psi_tilde",
            "bound_psi_tilde",
            "mm_snr_db",
            "bound_snr_db",
            "relative_gap",
            "numerical_rank",
            "converged",
        ])?;
        for (i, r) in rows.iter().enumerate() {
            w.write_record([
                i.to_string(),
                format_float(r.mm_psi_tilde),
                format_float(r.bound_psi_tilde),
                format_float(linear_to_db(r.mm_snr)),
                format_float(linear_to_db(r.bound_snr)),
                format_float(r.gap),
                r.rank.to_string(),
                r.converged.to_string(),
            ])?;
        }
        w.flush()?;
    }

    let n = rows.len() as f64;
    let mean_mm = linear_to_db(rows.iter().map(|r| r.mm_snr).sum::<f64>() / n);
    let mean_bound = linear_to_db(rows.iter().map(|r| r.bound_snr).sum::<f64>() / n);
    let violations = rows
        .iter()
        .filter(|r| r.bound_psi_tilde < r.mm_psi_tilde - 1e-6 * r.mm_psi_tilde.max(1.0))
        .count();
    let unconverged = rows.iter().filter(|r| !r.converged).count();
    let rank_one = rows.iter().filter(|r| r.rank == 1).count();
    writeln!(stderr, "instances            {channels}")?;
    writeln!(stderr, "mean MM SNR (dB)     {mean_mm:.4}")?;
    writeln!(stderr, "mean bound SNR (dB)  {mean_bound:.4}")?;
    writeln!(stderr, "bound - MM (dB)      {:.4}", mean_bound - mean_mm)?;
    writeln!(stderr, "bound violations     {violations}")?;
    writeln!(stderr, "unconverged bounds   {unconverged}")?;
    writeln!(stderr, "rank-one bounds      {rank_one}")?;
    if a.json {
        let v = json!({
            "instances": channels,
            "seed": a.seed,
            "mean_mm_snr_db": mean_mm,
            "mean_bound_snr_db": mean_bound,
            "violations": violations,
            "unconverged": unconverged,
            "rank_one": rank_one,
        });
        writeln!(stdout, "{}", serde_json::to_string_pretty(&v)?)?;
    }
    Ok(())
}

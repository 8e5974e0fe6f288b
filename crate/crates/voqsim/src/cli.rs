//! Command-line front end. Subcommands run analytic sweeps, Monte Carlo
//! counting runs and fringe fits, emitting CSV, JSON and SVG artifacts.
//!
//! Exit codes: 0 success, 1 configuration error (bad flags, config file or
//! input data), 2 runtime error (simulation or output emission failed).
//! All output is deterministic for a fixed config and seed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::fit::{fit_visibility, FitResult};
use crate::mc::{simulate_counts, RunReport};
use crate::protocol::{
    bell_statistics, fringe_scan, phase_to_mirror, visibility_sweep, ExperimentConfig,
    MirrorSweep, Normalization, PairId, PhaseSweep,
};
use crate::report::{
    fringe_csv_string, fringe_svg, parse_fringe_csv, visibility_csv_string, visibility_svg,
};

/// Fallback output directory when `--out-dir` is absent.
pub const OUT_DIR_ENV: &str = "VOQSIM_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "voqsim",
    version,
    about = "Few-photon simulator of a vacuum/one-photon qubit teleporter"
)]
struct Cli {
    /// JSON config file; command-line flags override its fields
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory for relative output paths (default: $VOQSIM_OUT_DIR or .)
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Print a machine-readable JSON report to stdout
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct PhysicsArgs {
    /// Vacuum weight α² of the input qubit, in [0,1]
    #[arg(long, value_name = "W")]
    alpha_sq: Option<f64>,

    /// Verification-splitter reflectivity r_B² (default: matched to α²)
    #[arg(long, value_name = "R2")]
    bsb_r_sq: Option<f64>,

    /// Detector efficiency, in [0,1]
    #[arg(long, value_name = "ETA")]
    eta: Option<f64>,

    /// Protocol variant: passive | active
    #[arg(long, value_name = "NAME")]
    variant: Option<String>,

    /// Probability normalization: conditional | joint
    #[arg(long, value_name = "NAME")]
    normalization: Option<String>,

    /// Seed of the deterministic RNG
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
}

#[derive(Args, Clone, Default)]
struct SweepArgs {
    /// Number of sweep points
    #[arg(long, value_name = "N")]
    steps: Option<usize>,

    /// Phase sweep start (rad)
    #[arg(long, value_name = "RAD")]
    phase_start: Option<f64>,

    /// Phase sweep stop (rad)
    #[arg(long, value_name = "RAD")]
    phase_stop: Option<f64>,

    /// Mirror sweep start (µm)
    #[arg(long, value_name = "UM")]
    mirror_start_um: Option<f64>,

    /// Mirror sweep stop (µm)
    #[arg(long, value_name = "UM")]
    mirror_stop_um: Option<f64>,

    /// Wavelength (µm) for the mirror-to-phase conversion
    #[arg(long, value_name = "UM")]
    lambda_um: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic coincidence fringes over a phase or mirror sweep
    Fringe {
        #[command(flatten)]
        physics: PhysicsArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Output CSV path
        #[arg(long, value_name = "FILE", default_value = "fringe.csv")]
        out: PathBuf,
        /// Optional SVG plot path
        #[arg(long, value_name = "FILE")]
        plot: Option<PathBuf>,
    },
    /// Fringe visibility of one detector pair against the input weight
    VisibilitySweep {
        #[command(flatten)]
        physics: PhysicsArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Number of α² grid points
        #[arg(long, value_name = "N", default_value_t = 41)]
        grid: usize,
        /// Smallest α² on the grid
        #[arg(long, value_name = "W", default_value_t = 0.02)]
        alpha_min: f64,
        /// Largest α² on the grid
        #[arg(long, value_name = "W", default_value_t = 0.98)]
        alpha_max: f64,
        /// Detector pair: D1-D1* | D1-D2* | D2-D1* | D2-D2*
        #[arg(long, value_name = "PAIR", default_value = "D1-D1*")]
        pair: String,
        /// Output CSV path
        #[arg(long, value_name = "FILE", default_value = "visibility.csv")]
        out: PathBuf,
        /// Optional SVG plot path
        #[arg(long, value_name = "FILE")]
        plot: Option<PathBuf>,
    },
    /// Bell-outcome probabilities of Alice's measurement (JSON to stdout)
    BellStats {
        #[command(flatten)]
        physics: PhysicsArgs,
    },
    /// Monte Carlo coincidence counting over the configured sweep
    SimulateCounts {
        #[command(flatten)]
        physics: PhysicsArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Source emissions sampled per sweep point
        #[arg(long, value_name = "N")]
        shots: Option<u64>,
        /// Output CSV path (fringe schema with sampled counts)
        #[arg(long, value_name = "FILE", default_value = "counts.csv")]
        out: PathBuf,
        /// Run-report JSON path
        #[arg(long, value_name = "FILE", default_value = "report.json")]
        report: PathBuf,
        /// Optional SVG plot path
        #[arg(long, value_name = "FILE")]
        plot: Option<PathBuf>,
    },
    /// Least-squares fringe fit A(1 + V·cos(φ+φ₀)) on a CSV column
    Fit {
        /// Input CSV in the fringe schema
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Detector pair to fit
        #[arg(long, value_name = "PAIR", default_value = "D1-D1*")]
        pair: String,
        /// Column to fit: conditional | joint | counts
        #[arg(long, value_name = "COL", default_value = "conditional")]
        column: String,
    },
}

struct Staged {
    code: i32,
    err: Error,
}

type CliResult<T> = std::result::Result<T, Staged>;

trait Stage<T> {
    /// Failure means the user's configuration or input is invalid (exit 1).
    fn config(self) -> CliResult<T>;
    /// Failure happened while executing a valid request (exit 2).
    fn runtime(self) -> CliResult<T>;
}

impl<T> Stage<T> for Result<T> {
    fn config(self) -> CliResult<T> {
        self.map_err(|err| Staged { code: 1, err })
    }

    fn runtime(self) -> CliResult<T> {
        self.map_err(|err| Staged { code: 2, err })
    }
}

/// Parses `argv` and runs the requested subcommand, returning the process
/// exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(staged) => {
            eprintln!("error: {}", staged.err);
            staged.code
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

fn apply_physics(config: &mut ExperimentConfig, args: &PhysicsArgs) -> Result<()> {
    if let Some(v) = args.alpha_sq {
        config.alpha_sq = v;
    }
    if let Some(v) = args.bsb_r_sq {
        config.bsb_r_sq = Some(v);
    }
    if let Some(v) = args.eta {
        config.eta = v;
    }
    if let Some(s) = &args.variant {
        config.variant = s.parse()?;
    }
    if let Some(s) = &args.normalization {
        config.normalization = s.parse()?;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    Ok(())
}

/// Folds sweep flags into the config. Phase and mirror flags are mutually
/// exclusive; `--steps` applies to whichever sweep ends up active.
fn apply_sweep(config: &mut ExperimentConfig, args: &SweepArgs) -> Result<()> {
    let phase_flags = args.phase_start.is_some() || args.phase_stop.is_some();
    let mirror_flags = args.mirror_start_um.is_some() || args.mirror_stop_um.is_some();
    if phase_flags && mirror_flags {
        return Err(Error::InvalidConfig(
            "--phase-* and --mirror-* flags are mutually exclusive".into(),
        ));
    }
    if let Some(lambda) = args.lambda_um {
        config.lambda_um = lambda;
        if let Some(m) = &mut config.mirror {
            m.lambda_um = None;
        }
    }
    if mirror_flags || (config.mirror.is_some() && !phase_flags) {
        let mut sweep = match config.mirror.take() {
            Some(m) => m,
            None => MirrorSweep {
                start_um: 0.0,
                stop_um: phase_to_mirror(std::f64::consts::TAU, config.lambda_um)?,
                steps: 65,
                lambda_um: None,
            },
        };
        if let Some(v) = args.mirror_start_um {
            sweep.start_um = v;
        }
        if let Some(v) = args.mirror_stop_um {
            sweep.stop_um = v;
        }
        if let Some(v) = args.steps {
            sweep.steps = v;
        }
        config.mirror = Some(sweep);
        config.phase = None;
    } else if phase_flags || args.steps.is_some() || config.phase.is_some() {
        let mut sweep = config.phase.take().unwrap_or(PhaseSweep {
            start: 0.0,
            stop: std::f64::consts::TAU,
            steps: 65,
        });
        if let Some(v) = args.phase_start {
            sweep.start = v;
        }
        if let Some(v) = args.phase_stop {
            sweep.stop = v;
        }
        if let Some(v) = args.steps {
            sweep.steps = v;
        }
        config.phase = Some(sweep);
        config.mirror = None;
    }
    Ok(())
}

fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from("."),
    }
}

fn resolve_out(out_dir: &Path, file: &Path) -> PathBuf {
    if file.is_absolute() {
        file.to_path_buf()
    } else {
        out_dir.join(file)
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn parse_column(name: &str) -> Result<fn(&crate::protocol::PairProbability) -> f64> {
    match name {
        "conditional" => Ok(|p| p.conditional),
        "joint" => Ok(|p| p.joint),
        "counts" => Ok(|p| p.counts as f64),
        other => Err(Error::InvalidConfig(format!(
            "column must be `conditional`, `joint` or `counts`, got `{other}`"
        ))),
    }
}

fn alpha_grid(grid: usize, alpha_min: f64, alpha_max: f64) -> Result<Vec<f64>> {
    if grid == 0 {
        return Err(Error::InvalidConfig("--grid needs at least one point".into()));
    }
    if !(0.0..=1.0).contains(&alpha_min) || !(0.0..=1.0).contains(&alpha_max) {
        return Err(Error::InvalidConfig(
            "--alpha-min/--alpha-max must lie in [0,1]".into(),
        ));
    }
    if alpha_min > alpha_max {
        return Err(Error::InvalidConfig("--alpha-min exceeds --alpha-max".into()));
    }
    if grid == 1 {
        return Ok(vec![alpha_min]);
    }
    Ok((0..grid)
        .map(|i| alpha_min + (alpha_max - alpha_min) * i as f64 / (grid - 1) as f64)
        .collect())
}

#[derive(serde::Serialize)]
struct FitReport<'a> {
    pair: PairId,
    column: &'a str,
    points: usize,
    fit: FitResult,
}

fn execute(cli: Cli) -> CliResult<()> {
    let out_dir = resolve_out_dir(cli.out_dir.as_deref());
    let base = load_config(cli.config.as_deref()).config()?;

    match cli.command {
        Command::Fringe { physics, sweep, out, plot } => {
            let mut config = base;
            apply_physics(&mut config, &physics).config()?;
            apply_sweep(&mut config, &sweep).config()?;
            config.validate().config()?;

            let records = fringe_scan(&config).runtime()?;
            let csv_path = resolve_out(&out_dir, &out);
            write_text(&csv_path, &fringe_csv_string(&records)).runtime()?;
            let plot_path = match plot {
                Some(p) => {
                    let path = resolve_out(&out_dir, &p);
                    let joint = config.normalization == Normalization::Joint;
                    write_text(&path, &fringe_svg(&records, joint)).runtime()?;
                    Some(path)
                }
                None => None,
            };

            if cli.json {
                print_json(&serde_json::json!({
                    "command": "fringe",
                    "config": config,
                    "records": records,
                    "csv": csv_path,
                    "plot": plot_path,
                }))
                .runtime()?;
            } else {
                println!(
                    "wrote {} sweep points ({} rows) to {}",
                    records.len(),
                    4 * records.len(),
                    csv_path.display()
                );
                if let Some(p) = plot_path {
                    println!("wrote plot to {}", p.display());
                }
            }
            Ok(())
        }

        Command::VisibilitySweep {
            physics,
            sweep,
            grid,
            alpha_min,
            alpha_max,
            pair,
            out,
            plot,
        } => {
            let mut config = base;
            apply_physics(&mut config, &physics).config()?;
            apply_sweep(&mut config, &sweep).config()?;
            config.validate().config()?;
            let pair = PairId::parse(&pair).config()?;
            let alphas = alpha_grid(grid, alpha_min, alpha_max).config()?;

            let points = visibility_sweep(&config, &alphas, pair).runtime()?;
            let csv_path = resolve_out(&out_dir, &out);
            write_text(&csv_path, &visibility_csv_string(&points, pair)).runtime()?;
            let plot_path = match plot {
                Some(p) => {
                    let path = resolve_out(&out_dir, &p);
                    write_text(&path, &visibility_svg(&points, pair)).runtime()?;
                    Some(path)
                }
                None => None,
            };

            if cli.json {
                print_json(&serde_json::json!({
                    "command": "visibility-sweep",
                    "config": config,
                    "pair": pair,
                    "points": points,
                    "csv": csv_path,
                    "plot": plot_path,
                }))
                .runtime()?;
            } else {
                let best = points
                    .iter()
                    .filter(|p| !p.degenerate)
                    .max_by(|a, b| a.visibility.total_cmp(&b.visibility));
                println!(
                    "wrote {} visibility points for {} to {}",
                    points.len(),
                    pair,
                    csv_path.display()
                );
                if let Some(p) = best {
                    println!("peak V = {:.6} at alpha_sq = {:.6}", p.visibility, p.alpha_sq);
                }
                if let Some(p) = plot_path {
                    println!("wrote plot to {}", p.display());
                }
            }
            Ok(())
        }

        Command::BellStats { physics } => {
            let mut config = base;
            apply_physics(&mut config, &physics).config()?;
            config.validate().config()?;
            let stats = bell_statistics(&config.input().config()?).runtime()?;
            print_json(&stats).runtime()?;
            Ok(())
        }

        Command::SimulateCounts { physics, sweep, shots, out, report, plot } => {
            let mut config = base;
            apply_physics(&mut config, &physics).config()?;
            apply_sweep(&mut config, &sweep).config()?;
            if let Some(n) = shots {
                config.shots = n;
            }
            config.validate().config()?;
            if config.shots == 0 {
                return Err(Error::InvalidConfig(
                    "simulate-counts needs --shots >= 1 (or `shots` in the config file)".into(),
                ))
                .config();
            }

            let run: RunReport = simulate_counts(&config).runtime()?;
            let records: Vec<_> = run.points.iter().map(|p| p.record.clone()).collect();
            let csv_path = resolve_out(&out_dir, &out);
            write_text(&csv_path, &fringe_csv_string(&records)).runtime()?;
            let report_path = resolve_out(&out_dir, &report);
            let report_json = serde_json::to_string_pretty(&run).map_err(Error::from).runtime()?;
            write_text(&report_path, &report_json).runtime()?;
            let plot_path = match plot {
                Some(p) => {
                    let path = resolve_out(&out_dir, &p);
                    let joint = config.normalization == Normalization::Joint;
                    write_text(&path, &fringe_svg(&records, joint)).runtime()?;
                    Some(path)
                }
                None => None,
            };

            if cli.json {
                print_json(&run).runtime()?;
            } else {
                println!(
                    "sampled {} shots at each of {} points (seed {}, rng {})",
                    run.shots_per_point,
                    run.points.len(),
                    run.seed,
                    run.rng
                );
                println!("wrote counts to {}", csv_path.display());
                println!("wrote report to {}", report_path.display());
                for pf in &run.fits {
                    println!(
                        "{}: V = {:.4} +/- {:.4}, phi0 = {:.4} rad",
                        pf.pair, pf.fit.v, pf.fit.v_stderr, pf.fit.phi0
                    );
                }
                if let Some(p) = plot_path {
                    println!("wrote plot to {}", p.display());
                }
            }
            Ok(())
        }

        Command::Fit { input, pair, column } => {
            let text = std::fs::read_to_string(&input).map_err(Error::from).config()?;
            let records = parse_fringe_csv(&text).config()?;
            let pair = PairId::parse(&pair).config()?;
            let select = parse_column(&column).config()?;
            let series: Vec<(f64, f64)> = records
                .iter()
                .map(|r| (r.phi, select(r.pair(pair))))
                .collect();
            let fit = fit_visibility(&series).runtime()?;

            if cli.json {
                print_json(&FitReport { pair, column: &column, points: series.len(), fit })
                    .runtime()?;
            } else {
                println!("fitted {} points for {} ({} column)", series.len(), pair, column);
                println!("V    = {:.6} +/- {:.6}", fit.v, fit.v_stderr);
                println!("phi0 = {:.6} +/- {:.6} rad", fit.phi0, fit.phi0_stderr);
                println!("A    = {:.6} +/- {:.6}", fit.a, fit.a_stderr);
                println!("residual norm = {:.3e}", fit.residual_norm);
            }
            Ok(())
        }
    }
}

//! Command-line front end. Each subcommand loads a scenario file (or the
//! baseline when none is given), runs one workflow and writes its result
//! tables plus a `<out>.meta.json` run record.
//!
//! Exit codes: 0 on success, 1 for usage or validation failures, 2 for
//! runtime errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::json;

use crate::game::GameError;
use crate::montecarlo::McConfig;
use crate::plot::{Heatmap, LinePlot, Series};
use crate::scenario_io::{load_scenario, load_scenario_str, ConfigError, GammaRange, Mode, ResolvedConfig};
use crate::workflows::{self, WorkflowError, TIER_BANDS};

#[derive(Debug, Parser)]
#[command(
    name = "coexist",
    version,
    about = "Cellular/WiFi coexistence in a shared unlicensed band"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for simulations and best-response searches.
    #[arg(long, global = true, env = "COEXIST_THREADS")]
    pub threads: Option<usize>,

    /// Log more (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file (TOML). The baseline parameters are used when omitted.
    #[arg(short, long)]
    pub config: Option<PathBuf>,

    /// Output file. A `.json` extension selects JSON with the config embedded.
    #[arg(short, long)]
    pub out: Option<PathBuf>,

    /// Override a scenario key, e.g. `--set physical.gamma_db=5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    /// Seed for this workflow's random streams.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Also write an SVG chart here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic and Monte Carlo coverage for all tier/band combinations.
    Coverage {
        #[command(flatten)]
        common: Common,
        /// Threshold sweep in dB as start:stop:step.
        #[arg(long = "gamma-db", allow_hyphen_values = true)]
        gamma_db: Option<GammaRange>,
        /// Monte Carlo realizations per curve.
        #[arg(long)]
        realizations: Option<usize>,
        /// Analytic curves only.
        #[arg(long)]
        no_mc: bool,
    },
    /// Network-wide datarates over the (delta_c, delta_w) grid.
    RateSurface {
        #[command(flatten)]
        common: Common,
        /// Grid step.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Play the best-response game and write its trace and summary.
    Game {
        #[command(flatten)]
        common: Common,
    },
    /// Compare the game against uniformly random utilization.
    CompareRandom {
        #[command(flatten)]
        common: Common,
        /// Number of paired runs.
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Run the closed-form self-checks (and load the config, if given).
    Validate {
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Play the game on a geodata deployment.
    Casestudy {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl From<WorkflowError> for CliError {
    fn from(e: WorkflowError) -> Self {
        match e {
            WorkflowError::Config(_)
            | WorkflowError::Game(GameError::InvalidConfig(_))
            | WorkflowError::Game(GameError::InvalidEntities(_))
            | WorkflowError::Game(GameError::MonteCarlo(crate::montecarlo::McError::MissingElements { .. })) => {
                CliError::Validation(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Write(_) | ConfigError::Io { .. } => CliError::Runtime(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();

    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(CliError::Runtime(e.to_string())),
        },
        None => dispatch(&cli.command),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn load(config: Option<&Path>, overrides: &[String]) -> Result<ResolvedConfig, CliError> {
    Ok(match config {
        Some(p) => load_scenario(p, overrides)?,
        None => load_scenario_str("", overrides, Path::new("."))?,
    })
}

fn with_seed(common: &Common, key: &str) -> Vec<String> {
    let mut o = common.overrides.clone();
    if let Some(s) = common.seed {
        o.push(format!("{key}={s}"));
    }
    o
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}{suffix}"))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))? + "\n";
    std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn write_meta(out: &Path, command: &str, cfg: &ResolvedConfig, seed: u64, started: Instant) -> Result<(), CliError> {
    let meta = json!({
        "command": command,
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
        "threads": rayon::current_num_threads(),
        "wall_time_s": started.elapsed().as_secs_f64(),
        "config": cfg,
    });
    write_json(&sibling(out, ".meta.json"), &meta)
}

fn dispatch(command: &Command) -> Result<i32, CliError> {
    let started = Instant::now();
    match command {
        Command::Coverage {
            common,
            gamma_db,
            realizations,
            no_mc,
        } => {
            let mut overrides = with_seed(common, "montecarlo.seed");
            if let Some(n) = realizations {
                overrides.push(format!("montecarlo.realizations={n}"));
            }
            let cfg = load(common.config.as_deref(), &overrides)?;
            let range = gamma_db.unwrap_or(cfg.montecarlo.gamma_db);
            let gammas = range.values();
            let mc = McConfig {
                realizations: cfg.montecarlo.realizations,
                window: crate::geometry::Window::new(cfg.montecarlo.window_radius).map_err(WorkflowError::from)?,
                seed: cfg.montecarlo.seed,
                gamma_db: gammas.clone(),
                wifi_association: cfg.montecarlo.wifi_association,
            };
            info!("coverage on {range} dB, {} realizations", mc.realizations);
            let points = workflows::coverage_curves(
                &cfg.scenario,
                cfg.montecarlo.utilization,
                &gammas,
                (!no_mc).then_some(&mc),
            )?;
            let out = common.out.clone().unwrap_or_else(|| "coverage.csv".into());
            workflows::coverage_table(&points).write(&out, &cfg)?;
            if let Some(plot) = &common.plot {
                let mut series = Vec::new();
                for (tier, band) in TIER_BANDS {
                    let sel: Vec<_> = points.iter().filter(|p| p.tier == tier && p.band == band).collect();
                    let name = format!("{} {}", tier.label(), band.label());
                    series.push(Series::new(
                        format!("{name} analytic"),
                        sel.iter().map(|p| (p.gamma_db, p.analytic)).collect(),
                    ));
                    if sel.iter().all(|p| p.simulated.is_some()) {
                        series.push(
                            Series::new(
                                format!("{name} simulated"),
                                sel.iter()
                                    .map(|p| (p.gamma_db, p.simulated.map_or(0.0, |e| e.p_hat)))
                                    .collect(),
                            )
                            .dashed(),
                        );
                    }
                }
                let chart = LinePlot {
                    title: "Coverage probability".into(),
                    x_label: "SINR threshold (dB)".into(),
                    y_label: "P(SINR > threshold)".into(),
                    series,
                };
                write_text(plot, &chart.to_svg())?;
            }
            write_meta(&out, "coverage", &cfg, cfg.montecarlo.seed, started)?;
            Ok(0)
        }
        Command::RateSurface { common, step } => {
            let mut overrides = common.overrides.clone();
            if let Some(s) = step {
                overrides.push(format!("rate_surface.step={s}"));
            }
            let cfg = load(common.config.as_deref(), &overrides)?;
            let surface = workflows::rate_surface(&cfg.scenario, cfg.rate_surface_step)?;
            let out = common.out.clone().unwrap_or_else(|| "rate_surface.csv".into());
            surface.table().write(&out, &cfg)?;
            if let Some(plot) = &common.plot {
                let transpose = |m: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
                    (0..surface.deltas.len())
                        .map(|w| m.iter().map(|row| row[w] * 1e-6).collect())
                        .collect()
                };
                let cell = Heatmap {
                    title: "Cellular datarate (Mbps)".into(),
                    x_label: "delta_c".into(),
                    y_label: "delta_w".into(),
                    x: surface.deltas.clone(),
                    y: surface.deltas.clone(),
                    values: transpose(&surface.cellular),
                };
                let wifi = Heatmap {
                    title: "WiFi datarate (Mbps)".into(),
                    values: transpose(&surface.wifi),
                    ..cell.clone()
                };
                write_text(plot, &cell.to_svg())?;
                write_text(&sibling(plot, ".wifi.svg"), &wifi.to_svg())?;
            }
            write_meta(&out, "rate-surface", &cfg, 0, started)?;
            Ok(0)
        }
        Command::Game { common } => {
            let cfg = load(common.config.as_deref(), &with_seed(common, "game.seed"))?;
            let report = workflows::play(&cfg)?;
            let out = common.out.clone().unwrap_or_else(|| "game_trace.csv".into());
            write_game(&out, common.plot.as_deref(), &cfg, &report)?;
            write_meta(&out, "game", &cfg, cfg.game.seed, started)?;
            Ok(0)
        }
        Command::Casestudy { common } => {
            let mut overrides = with_seed(common, "game.seed");
            overrides.push("mode=casestudy".into());
            let cfg = load(common.config.as_deref(), &overrides)?;
            debug_assert_eq!(cfg.mode, Mode::Casestudy);
            let report = workflows::play(&cfg)?;
            let out = common.out.clone().unwrap_or_else(|| "casestudy_trace.csv".into());
            write_game(&out, common.plot.as_deref(), &cfg, &report)?;
            write_meta(&out, "casestudy", &cfg, cfg.game.seed, started)?;
            Ok(0)
        }
        Command::CompareRandom { common, runs } => {
            let mut overrides = with_seed(common, "compare_random.seed");
            if let Some(n) = runs {
                overrides.push(format!("compare_random.runs={n}"));
            }
            let cfg = load(common.config.as_deref(), &overrides)?;
            let cmp = workflows::compare_random(&cfg.scenario, &cfg.compare_random, &cfg.game)?;
            let out = common.out.clone().unwrap_or_else(|| "compare_random.csv".into());
            cmp.table().write(&out, &cfg)?;
            let (d, r, gain) = (cmp.dbra_mean(), cmp.random_mean(), cmp.improvement());
            write_json(
                &sibling(&out, ".summary.json"),
                &json!({
                    "runs": cmp.runs.len(),
                    "converged_runs": cmp.runs.iter().filter(|r| r.converged).count(),
                    "dbra_mean": {"rate_c": d.cellular, "rate_w": d.wifi},
                    "random_mean": {"rate_c": r.cellular, "rate_w": r.wifi},
                    "improvement": {"cellular": gain.cellular, "wifi": gain.wifi},
                }),
            )?;
            if let Some(plot) = &common.plot {
                let cdf = |xs: Vec<f64>| -> Vec<(f64, f64)> {
                    let mut xs = xs;
                    xs.sort_by(f64::total_cmp);
                    let n = xs.len() as f64;
                    xs.into_iter()
                        .enumerate()
                        .map(|(i, x)| (x * 1e-6, (i + 1) as f64 / n))
                        .collect()
                };
                let chart = LinePlot {
                    title: "Empirical CDF of entity-averaged datarates".into(),
                    x_label: "datarate (Mbps)".into(),
                    y_label: "CDF".into(),
                    series: vec![
                        Series::new(
                            "cellular, game",
                            cdf(cmp.runs.iter().map(|r| r.dbra_mean().cellular).collect()),
                        ),
                        Series::new(
                            "cellular, random",
                            cdf(cmp.runs.iter().map(|r| r.random_mean().cellular).collect()),
                        )
                        .dashed(),
                        Series::new("wifi, game", cdf(cmp.runs.iter().map(|r| r.dbra_mean().wifi).collect())),
                        Series::new(
                            "wifi, random",
                            cdf(cmp.runs.iter().map(|r| r.random_mean().wifi).collect()),
                        )
                        .dashed(),
                    ],
                };
                write_text(plot, &chart.to_svg())?;
            }
            println!(
                "game vs random: cellular {:+.2}%, wifi {:+.2}% over {} runs",
                100.0 * gain.cellular,
                100.0 * gain.wifi,
                cmp.runs.len()
            );
            write_meta(&out, "compare-random", &cfg, cfg.compare_random.seed, started)?;
            Ok(0)
        }
        Command::Validate { config, overrides } => {
            let cfg = load(config.as_deref(), overrides)?;
            let checks = workflows::self_checks(&cfg.scenario)?;
            let mut failed = 0;
            for c in &checks {
                let status = if c.passed() { "pass" } else { "FAIL" };
                if !c.passed() {
                    failed += 1;
                }
                println!(
                    "{status}  {}: {:.9} (expected {:.9} ± {:.1e})",
                    c.name, c.value, c.expected, c.tolerance
                );
            }
            for w in &cfg.warnings {
                println!("warn  {w}");
            }
            println!("{} checks, {failed} failed", checks.len());
            Ok(if failed == 0 { 0 } else { 1 })
        }
    }
}

fn write_game(
    out: &Path,
    plot: Option<&Path>,
    cfg: &ResolvedConfig,
    report: &workflows::GameReport,
) -> Result<(), CliError> {
    workflows::trace_table(&report.run.trace).write(out, cfg)?;
    workflows::rates_table(report).write(&sibling(out, ".rates.csv"), cfg)?;
    workflows::mixed_strategy_table(&report.entities, &report.mixed).write(&sibling(out, ".mixed.csv"), cfg)?;
    write_json(&sibling(out, ".summary.json"), &workflows::game_summary(report))?;
    if let Some(plot) = plot {
        let n = report.entities.len();
        let mut series = Vec::new();
        for i in 0..n {
            let name = &report.entities[i].name;
            let pts = |f: fn(&crate::game::Action) -> f64| -> Vec<(f64, f64)> {
                report
                    .run
                    .trace
                    .records
                    .iter()
                    .map(|r| (r.activation as f64, f(&r.profile[i])))
                    .collect()
            };
            series.push(Series::new(format!("{name} delta_c"), pts(|a| a.cellular)));
            series.push(Series::new(format!("{name} delta_w"), pts(|a| a.wifi)).dashed());
        }
        let chart = LinePlot {
            title: "Unlicensed fractions per activation".into(),
            x_label: "activation".into(),
            y_label: "fraction".into(),
            series,
        };
        write_text(plot, &chart.to_svg())?;
    }
    let status = if report.converged() {
        "converged"
    } else {
        "did not converge"
    };
    println!(
        "{status} after {} activations; thresholds met: {}",
        report.run.trace.len(),
        report.thresholds_met.iter().filter(|&&m| m).count()
    );
    Ok(())
}

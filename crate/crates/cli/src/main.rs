//! `disempower`: run scenarios, sweeps, thresholds, bands and calibrations
//! from the command line.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage or
//! configuration error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use disempower_core::analysis::{
    estimate_reversibility_threshold, monte_carlo_band, run_scenario, scenario_c_bar, sweep,
    GridAxis, ParamIntervals, THRESHOLD_BRACKET, THRESHOLD_TOL,
};
use disempower_core::calibration::{
    budget_fixture, calibrate_to_bands, fit_decay_rate, fit_params, implied_change,
    read_series_csv, shipped_targets, CapacitySeries, FitModel, FitParam, FreeParam, Knob,
    KnobRange,
};
use disempower_core::report::summary::{
    CompareReport, CompareRow, Crossing, FitReport, RunReport, SweepSummary, ThresholdSummary,
};
use disempower_core::report::{
    capacity_chart, divergence_chart, render_svg_chart, render_svg_heatmap, sig9, sweep_heatmap,
    write_summary_json, write_trajectory_csv, Report,
};
use disempower_core::scenarios::{builtin, frozen_calibration, resolve, BUILTIN_IDS};
use disempower_core::{Error, ScenarioConfig};

#[derive(Parser)]
#[command(name = "disempower", version, about = "Coupled institutional-disempowerment simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutDir {
    /// Output directory (created if missing).
    #[arg(long, env = "DISEMPOWER_OUT", default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write its trajectory, summary and charts.
    Run {
        /// Built-in id or path to a scenario JSON file.
        scenario: String,
        /// Override the integration step in years.
        #[arg(long)]
        dt: Option<f64>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Overlay the capacity trajectories of several scenarios.
    Compare {
        #[arg(required = true, num_args = 2..)]
        scenarios: Vec<String>,
        #[arg(long)]
        dt: Option<f64>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Crossing years over a delta x alpha grid.
    Sweep {
        #[arg(default_value = "baseline")]
        scenario: String,
        /// Delta axis as lo:hi:n.
        #[arg(long, default_value = "0.03:0.15:7")]
        delta: String,
        /// Alpha axis as lo:hi:n.
        #[arg(long, default_value = "0.02:0.15:7")]
        alpha: String,
        #[command(flatten)]
        out: OutDir,
    },
    /// Locate the reversibility threshold by bisection on initial capacity.
    Threshold {
        #[arg(default_value = "baseline")]
        scenario: String,
        #[arg(long, default_value_t = THRESHOLD_BRACKET.0)]
        lo: f64,
        #[arg(long, default_value_t = THRESHOLD_BRACKET.1)]
        hi: f64,
        #[arg(long, default_value_t = THRESHOLD_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutDir,
    },
    /// Seeded Monte Carlo spread of the crossing year.
    Band {
        #[arg(default_value = "baseline")]
        scenario: String,
        /// Number of draws.
        #[arg(short = 'n', long = "draws", default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Delta sampling interval as lo:hi.
        #[arg(long, default_value = "0.06:0.10")]
        delta_range: String,
        /// Alpha sampling interval as lo:hi.
        #[arg(long, default_value = "0.07:0.11")]
        alpha_range: String,
        #[command(flatten)]
        out: OutDir,
    },
    /// Fit decay rates and model parameters to a series, or tune the
    /// calibration to the timeline bands.
    Calibrate {
        /// CSV with year,value[,label,unit]; defaults to the bundled budget series.
        #[arg(long)]
        series: Option<PathBuf>,
        /// Series label to fit when the CSV holds several.
        #[arg(long)]
        label: Option<String>,
        /// Model parameters to fit, as name=lo:hi (delta, alpha, gamma, s_level).
        #[arg(long = "fit", value_name = "PARAM=LO:HI")]
        fit: Vec<String>,
        #[arg(long, default_value_t = 9)]
        grid: usize,
        #[arg(long, default_value_t = 300)]
        iters: usize,
        /// Search calibration knobs so the shipped bands are met.
        #[arg(long)]
        bands: bool,
        /// Knob search range as name=lo:hi; repeatable.
        #[arg(long = "knob", value_name = "KNOB=LO:HI")]
        knobs: Vec<String>,
        /// Maximum band evaluations.
        #[arg(long, default_value_t = 200)]
        budget: usize,
        #[command(flatten)]
        out: OutDir,
    },
    /// List the built-in scenarios.
    Scenarios,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn execute(cmd: Command) -> CmdResult {
    match cmd {
        Command::Run { scenario, dt, out } => cmd_run(&scenario, dt, &out.out),
        Command::Compare { scenarios, dt, out } => cmd_compare(&scenarios, dt, &out.out),
        Command::Sweep {
            scenario,
            delta,
            alpha,
            out,
        } => cmd_sweep(&scenario, &delta, &alpha, &out.out),
        Command::Threshold {
            scenario,
            lo,
            hi,
            tol,
            out,
        } => cmd_threshold(&scenario, lo, hi, tol, &out.out),
        Command::Band {
            scenario,
            n,
            seed,
            delta_range,
            alpha_range,
            out,
        } => {
            let intervals = ParamIntervals {
                delta: parse_interval("delta-range", &delta_range)?,
                alpha: parse_interval("alpha-range", &alpha_range)?,
            };
            cmd_band(&scenario, intervals, n, seed, &out.out)
        }
        Command::Calibrate {
            series,
            label,
            fit,
            grid,
            iters,
            bands,
            knobs,
            budget,
            out,
        } => {
            let series = load_series(series.as_deref(), label.as_deref())?;
            let mut reports = vec![decay_report(&series)?];
            if !fit.is_empty() {
                let free = fit
                    .iter()
                    .map(|s| {
                        let (name, lo, hi) = parse_named_range(s)?;
                        Ok(FreeParam::new(FitParam::parse(name)?, lo, hi))
                    })
                    .collect::<Result<Vec<_>, Failure>>()?;
                let r = fit_params(&series, &FitModel::baseline(), &free, grid, iters)?;
                println!("fit {}: rss {} converged {}", series.label, sig9(r.rss), r.converged);
                reports.push(Report::Fit(FitReport {
                    target: format!("trajectory:{}", series.label),
                    params: r.params,
                    rss: r.rss,
                    iterations: r.iterations,
                    converged: r.converged,
                }));
            }
            if bands {
                reports.push(band_calibration(&knobs, budget, &out.out)?);
            }
            write_out(&out.out, "summary.json", &write_summary_json(&reports))
        }
        Command::Scenarios => {
            for id in BUILTIN_IDS {
                let cfg = builtin(id)?;
                println!("{id}\t{}", cfg.description);
            }
            Ok(())
        }
    }
}

fn load(id: &str, dt: Option<f64>) -> Result<ScenarioConfig, Failure> {
    let cfg = resolve(id)?;
    Ok(match dt {
        Some(dt) => cfg.with_dt(dt)?,
        None => cfg,
    })
}

fn write_out(dir: &Path, name: &str, contents: &str) -> CmdResult {
    fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn year_text(y: Option<f64>, horizon: f64) -> String {
    match y {
        Some(y) => format!("year {}", sig9(y)),
        None => format!("none within {horizon} years"),
    }
}

fn cmd_run(id: &str, dt: Option<f64>, out: &Path) -> CmdResult {
    let cfg = load(id, dt)?;
    let c_bar = scenario_c_bar(&cfg)?;
    let traj = run_scenario(&cfg)?;
    let report = RunReport::from_trajectory(&cfg.id, c_bar, cfg.horizon_years, &traj);
    let runs = [(cfg.id.as_str(), &traj)];
    let cap = render_svg_chart(&capacity_chart(&format!("Capacity: {}", cfg.id), &runs, 0, c_bar))?;
    let div = render_svg_chart(&divergence_chart(&format!("Welfare divergence: {}", cfg.id), &runs, 0))?;
    println!("{}: crossing {}", cfg.id, year_text(report.crossing_year(), cfg.horizon_years));
    write_out(out, "trajectory.csv", &write_trajectory_csv(&traj))?;
    write_out(out, "summary.json", &write_summary_json(&[Report::Run(report)]))?;
    write_out(out, "capacity.svg", &cap)?;
    write_out(out, "divergence.svg", &div)
}

fn cmd_compare(ids: &[String], dt: Option<f64>, out: &Path) -> CmdResult {
    let mut runs = Vec::with_capacity(ids.len());
    let mut rows = Vec::with_capacity(ids.len());
    for id in ids {
        let cfg = load(id, dt)?;
        let c_bar = scenario_c_bar(&cfg)?;
        let traj = run_scenario(&cfg)?;
        let year = traj.crossing_year[0];
        println!("{}: crossing {}", cfg.id, year_text(year, cfg.horizon_years));
        rows.push(CompareRow {
            scenario: cfg.id.clone(),
            c_bar,
            crossing: Crossing::new("economic", year, cfg.horizon_years),
        });
        runs.push((cfg.id, c_bar, traj));
    }
    let labelled: Vec<(&str, &_)> = runs.iter().map(|(id, _, t)| (id.as_str(), t)).collect();
    // the reference line uses the first scenario's threshold
    let chart = capacity_chart("Capacity by scenario", &labelled, 0, runs[0].1);
    write_out(out, "compare.svg", &render_svg_chart(&chart)?)?;
    write_out(out, "compare.json", &write_summary_json(&[Report::Compare(CompareReport { rows })]))
}

fn cmd_sweep(id: &str, delta: &str, alpha: &str, out: &Path) -> CmdResult {
    let cfg = load(id, None)?;
    let result = sweep(&cfg, GridAxis::parse(delta)?, GridAxis::parse(alpha)?)?;
    let mut csv = String::from("delta,alpha,crossing_year\n");
    for c in &result.cells {
        let year = c.crossing_year.map(sig9).unwrap_or_default();
        writeln!(csv, "{},{},{}", sig9(c.delta), sig9(c.alpha), year).expect("string write");
    }
    let svg = render_svg_heatmap(&sweep_heatmap(&result))?;
    let crossed = result.cells.iter().filter(|c| c.crossing_year.is_some()).count();
    println!("{}: {} cells, {crossed} cross within the horizon", cfg.id, result.cells.len());
    write_out(out, "sweep.csv", &csv)?;
    write_out(out, "sweep.svg", &svg)?;
    write_out(out, "summary.json", &write_summary_json(&[Report::Sweep(SweepSummary::from(&result))]))
}

fn cmd_threshold(id: &str, lo: f64, hi: f64, tol: f64, out: &Path) -> CmdResult {
    let cfg = load(id, None)?;
    let outcome = estimate_reversibility_threshold(&cfg.params, lo, hi, tol)?;
    let summary = ThresholdSummary::new(&cfg.id, tol, &outcome);
    match outcome.report() {
        Some(r) => println!("{}: c_bar {} (bracket {} .. {})", cfg.id, sig9(r.c_bar), sig9(r.basin_low), sig9(r.basin_high)),
        None => println!("{}: no threshold in [{lo}, {hi}]", cfg.id),
    }
    write_out(out, "summary.json", &write_summary_json(&[Report::Threshold(summary)]))
}

fn cmd_band(id: &str, intervals: ParamIntervals, n: usize, seed: u64, out: &Path) -> CmdResult {
    let cfg = load(id, None)?;
    let band = monte_carlo_band(&cfg, &intervals, n, seed)?;
    println!(
        "{}: mean {} sd {} over {} draws, {} censored",
        cfg.id,
        sig9(band.mean),
        sig9(band.sd),
        band.n,
        band.censored
    );
    write_out(out, "summary.json", &write_summary_json(&[Report::Band(band)]))
}

fn parse_interval(key: &str, text: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Usage(format!("`{key}` expects lo:hi, got `{text}`"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn parse_named_range(text: &str) -> Result<(&str, f64, f64), Failure> {
    let (name, range) = text
        .split_once('=')
        .ok_or_else(|| Failure::Usage(format!("expected NAME=LO:HI, got `{text}`")))?;
    let (lo, hi) = parse_interval(name, range)?;
    Ok((name, lo, hi))
}

fn load_series(path: Option<&Path>, label: Option<&str>) -> Result<CapacitySeries, Failure> {
    let Some(path) = path else {
        return Ok(budget_fixture());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let all = read_series_csv(&text)?;
    match label {
        Some(l) => all
            .into_iter()
            .find(|s| s.label == l)
            .ok_or_else(|| Failure::Usage(format!("no series labelled `{l}` in {}", path.display()))),
        None => all
            .into_iter()
            .next()
            .ok_or_else(|| Failure::Usage(format!("{} holds no series", path.display()))),
    }
}

fn decay_report(series: &CapacitySeries) -> Result<Report, Failure> {
    let rate = fit_decay_rate(series)?;
    let years = series.observations.last().map(|o| o.year).unwrap_or_default() - series.observations[0].year;
    let change = implied_change(rate, years);
    println!(
        "{}: rate {} per year, {} over {years} years",
        series.label,
        sig9(rate),
        sig9(change)
    );
    Ok(Report::Fit(FitReport {
        target: format!("decay_rate:{}", series.label),
        params: [("rate".to_string(), rate), ("implied_change".to_string(), change)].into(),
        rss: 0.0,
        iterations: 1,
        converged: true,
    }))
}

fn default_knobs() -> Vec<KnobRange> {
    vec![
        KnobRange::new(Knob::RhoR, 0.0, 0.15),
        KnobRange::new(Knob::SalienceSlope, 0.0, 0.3),
        KnobRange::new(Knob::SigmaW, 5.0, 40.0),
    ]
}

fn band_calibration(knob_args: &[String], budget: usize, out: &Path) -> Result<Report, Failure> {
    let knobs = if knob_args.is_empty() {
        default_knobs()
    } else {
        knob_args
            .iter()
            .map(|s| {
                let (name, lo, hi) = parse_named_range(s)?;
                Ok(KnobRange::new(Knob::parse(name)?, lo, hi))
            })
            .collect::<Result<Vec<_>, Failure>>()?
    };
    let fit = calibrate_to_bands(&frozen_calibration(), &shipped_targets(), &knobs, budget)?;
    for v in &fit.values {
        let mark = if v.violation == 0.0 { "ok" } else { "MISS" };
        println!("{mark} {}: {} in [{}, {}]", v.target, sig9(v.value), v.lo, v.hi);
    }
    write_out(out, "calibration.json", &fit.calibration.to_json())?;
    Ok(Report::Fit(FitReport {
        target: "bands".into(),
        params: fit.result.params,
        rss: fit.result.rss,
        iterations: fit.result.iterations,
        converged: fit.result.converged,
    }))
}

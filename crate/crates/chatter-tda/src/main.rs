use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chatter_tda::classifier::{evaluate, LogisticModel};
use chatter_tda::error::{Error, Result};
use chatter_tda::features::Normalizer;
use chatter_tda::io;
use chatter_tda::pipeline::{
    analytic_labels, run_all, run_sweep, run_train_eval, run_transfer, train_test_split_of,
    ExperimentConfig, PointFailure, SweepOutputs,
};
use chatter_tda::render::render_map;
use chatter_tda::turning::{
    simulate_deterministic, simulate_stochastic, StochasticParams, TurningParams,
};

#[derive(Parser)]
#[command(
    name = "chatter-tda",
    version,
    about = "Turning-process chatter detection via persistent homology",
    propagate_version = true
)]
struct Cli {
    /// Experiment configuration JSON; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for grid sweeps; 0 = one per core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Grid resolution as WxH, e.g. 40x40 (overrides the config file).
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Noise intensities for transfer, comma separated (overrides the config).
    #[arg(long, global = true, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one parameter point and write time_series.csv.
    Simulate {
        /// Speed ratio Ω/ωₙ.
        #[arg(long)]
        speed: f64,
        /// Depth of cut b.
        #[arg(long)]
        depth: f64,
        /// Noise intensity; 0 runs the deterministic solver.
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
    },
    /// Write the analytic boundary and ground-truth label grid.
    Label,
    /// Simulate the full deterministic grid and write the feature matrix.
    Sweep,
    /// Train on an existing feature matrix; writes model and evaluation.
    Train,
    /// Re-evaluate an existing model on the held-out split.
    Evaluate,
    /// Classify stochastic simulations with the frozen model.
    Transfer,
    /// Render labels.csv (+ boundary.csv) to rendered.svg.
    Render,
    /// Sweep, train, evaluate, and transfer in one run.
    All,
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad grid dimension {v:?}: {e}"))
    };
    Ok((parse(w)?, parse(h)?))
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config: ExperimentConfig = match &cli.config {
        Some(path) => io::read_json(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some((w, h)) = cli.grid {
        config.grid_width = w;
        config.grid_height = h;
    }
    if let Some(deltas) = &cli.deltas {
        config.deltas = deltas.clone();
    }
    config.validate()?;
    Ok(config)
}

/// Reassemble sweep outputs from the files a previous `sweep` wrote.
fn load_sweep(config: &ExperimentConfig) -> Result<SweepOutputs> {
    let out = &config.out_dir;
    let rows = io::read_feature_rows(&out.join("features.csv"))?;
    let grid = io::read_label_grid(&out.join("labels.csv"))?;
    let boundary = io::read_boundary(&out.join("boundary.csv"))?;
    let failures = read_failures(&out.join("failures.jsonl"))?;
    let indices = rows
        .iter()
        .map(|r| {
            Ok((
                axis_index(&grid.speed_axis, r.speed_ratio, "speed")?,
                axis_index(&grid.depth_axis, r.b, "depth")?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepOutputs { rows, indices, grid, boundary, failures })
}

fn axis_index(axis: &[f64], value: f64, name: &str) -> Result<usize> {
    let (idx, nearest) = axis
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - value)
                .abs()
                .partial_cmp(&(b.1 - value).abs())
                .expect("axis values are finite")
        })
        .expect("axes are never empty");
    if (nearest - value).abs() > 1e-9 * (1.0 + value.abs()) {
        return Err(Error::Parse(format!(
            "feature row {name} {value} does not lie on the label grid axis"
        )));
    }
    Ok(idx)
}

fn read_failures(path: &std::path::Path) -> Result<Vec<PointFailure>> {
    use std::io::BufRead;
    if !path.exists() {
        return Ok(Vec::new());
    }
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("report serialization cannot fail"));
}

fn run(cli: &Cli) -> Result<()> {
    let config = load_config(cli)?;
    match &cli.command {
        Command::Simulate { speed, depth, delta } => {
            let params = TurningParams {
                zeta: config.zeta,
                b: *depth,
                rho: config.rho,
                alpha: config.alpha,
                speed_ratio: *speed,
            };
            let sim = chatter_tda::turning::SimConfig { seed: config.seed, ..config.sim };
            let ts = if *delta > 0.0 {
                simulate_stochastic(&StochasticParams { base: params, delta: *delta }, &sim)?
            } else {
                simulate_deterministic(&params, &sim)?
            };
            std::fs::create_dir_all(&config.out_dir)?;
            let path = config.out_dir.join("time_series.csv");
            io::write_time_series(&path, &ts)?;
            print_json(&serde_json::json!({
                "path": path,
                "samples": ts.len(),
                "dt": ts.dt,
            }));
        }
        Command::Label => {
            let (boundary, grid) = analytic_labels(&config)?;
            std::fs::create_dir_all(&config.out_dir)?;
            io::write_label_grid(&config.out_dir.join("labels.csv"), &grid)?;
            io::write_boundary(&config.out_dir.join("boundary.csv"), &boundary)?;
            print_json(&serde_json::json!({
                "chatter_fraction": grid.chatter_fraction(),
                "min_b_lim": boundary.min_b(),
            }));
        }
        Command::Sweep => {
            let sweep = run_sweep(&config, cli.workers)?;
            print_json(&serde_json::json!({
                "rows": sweep.rows.len(),
                "failures": sweep.failures.len(),
                "chatter_fraction": sweep.grid.chatter_fraction(),
            }));
        }
        Command::Train => {
            let sweep = load_sweep(&config)?;
            let trained = run_train_eval(&config, &sweep)?;
            print_json(&trained.report);
        }
        Command::Evaluate => {
            let sweep = load_sweep(&config)?;
            let model: LogisticModel = io::read_json(&config.out_dir.join("model.json"))?;
            let normalizer: Normalizer = io::read_json(&config.out_dir.join("normalizer.json"))?;
            model.validate()?;
            normalizer.validate()?;
            let (_, test_idx) = train_test_split_of(&config, sweep.rows.len())?;
            let xs: Vec<_> =
                test_idx.iter().map(|&k| normalizer.apply(&sweep.rows[k].features)).collect();
            let ys: Vec<bool> = test_idx.iter().map(|&k| sweep.rows[k].label).collect();
            let confusion = evaluate(&model, &xs, &ys)?;
            let summary = serde_json::json!({
                "confusion": confusion,
                "accuracy": confusion.accuracy(),
                "test_size": ys.len(),
            });
            io::write_json(&config.out_dir.join("evaluation.json"), &summary)?;
            print_json(&summary);
        }
        Command::Transfer => {
            let model: LogisticModel = io::read_json(&config.out_dir.join("model.json"))?;
            let normalizer: Normalizer = io::read_json(&config.out_dir.join("normalizer.json"))?;
            let boundary = io::read_boundary(&config.out_dir.join("boundary.csv"))?;
            let summaries = run_transfer(&config, &model, &normalizer, &boundary, cli.workers)?;
            print_json(&summaries);
        }
        Command::Render => {
            let grid = io::read_label_grid(&config.out_dir.join("labels.csv"))?;
            let boundary_path = config.out_dir.join("boundary.csv");
            let boundary = if boundary_path.exists() {
                Some(io::read_boundary(&boundary_path)?)
            } else {
                None
            };
            let svg = render_map(&grid, boundary.as_ref(), &[]);
            let path = config.out_dir.join("rendered.svg");
            std::fs::write(&path, svg)?;
            print_json(&serde_json::json!({ "path": path }));
        }
        Command::All => {
            let report = run_all(&config, cli.workers)?;
            print_json(&report);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", io::error_json(&err));
            ExitCode::FAILURE
        }
    }
}

//! Experiment orchestration: grid sweep, training/evaluation, stochastic
//! transfer, and the manifest tying the outputs together.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{
    evaluate, train_logistic, train_test_split, ConfusionMatrix, LogisticModel, TrainOptions,
};
use crate::embedding::{
    autocorrelation, default_max_lag, first_zero_lag, takens_embed, truncate_and_subsample,
    EmbeddingConfig,
};
use crate::error::{Error, Result};
use crate::features::{feature_vector, fit_normalizer, Normalizer, FEATURE_DIM};
use crate::io::{self, FeatureRow};
use crate::persistence::rips_diagrams;
use crate::render::render_map;
use crate::stability::{depth_axis, label_grid, min_boundary_at, speed_axis, LabelGrid, LobeBoundary};
use crate::turning::{
    simulate_deterministic, simulate_stochastic, SimConfig, StochasticParams, TimeSeries,
    TurningParams,
};

/// Speed-grid resolution used when sampling the boundary envelope, on top of
/// the exact values at the experiment's own speed axis.
const BOUNDARY_RESOLUTION: usize = 1024;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Inclusive Ω/ωₙ range, sampled uniformly.
    pub speed_range: [f64; 2],
    /// Depths are depth_max·(j+1)/grid_height (zero depth cuts nothing).
    pub depth_max: f64,
    pub grid_width: usize,
    pub grid_height: usize,
    pub zeta: f64,
    pub rho: f64,
    pub alpha: f64,
    pub sim: SimConfig,
    pub embedding: EmbeddingConfig,
    pub deltas: Vec<f64>,
    /// Stochastic realizations simulated per grid point; the transfer stage
    /// featurizes their pointwise ensemble mean. All realizations share the
    /// pre-cut history, so the coherent response (entry transient, chatter
    /// growth) survives the mean while noise-driven motion cancels as 1/√k.
    pub transfer_realizations: usize,
    pub seed: u64,
    pub l2_strength: f64,
    pub test_fraction: f64,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            speed_range: [0.2, 2.0],
            depth_max: 0.16,
            grid_width: 100,
            grid_height: 100,
            zeta: 0.03,
            rho: 0.01,
            alpha: 0.75,
            sim: SimConfig::default(),
            embedding: EmbeddingConfig::default(),
            deltas: vec![0.01, 0.03, 0.05],
            transfer_realizations: 8,
            seed: 42,
            l2_strength: 0.01,
            test_fraction: 0.2,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_width < 2 || self.grid_height < 2 {
            return Err(Error::Config(format!(
                "grid must be at least 2×2, got {}×{}",
                self.grid_width, self.grid_height
            )));
        }
        let [lo, hi] = self.speed_range;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Config(format!("bad speed range [{lo}, {hi}]")));
        }
        if !(self.depth_max > 0.0 && self.depth_max.is_finite()) {
            return Err(Error::Config(format!("bad depth_max {}", self.depth_max)));
        }
        if self.deltas.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::Config(format!("deltas must be ≥ 0, got {:?}", self.deltas)));
        }
        if self.transfer_realizations == 0 {
            return Err(Error::Config("transfer_realizations must be ≥ 1".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!("test_fraction {} outside (0, 1)", self.test_fraction)));
        }
        if !(self.l2_strength > 0.0) {
            return Err(Error::Config(format!("l2_strength {} must be positive", self.l2_strength)));
        }
        // Physics constraints, probed at a representative grid point.
        self.turning_params(self.speed_range[1], self.depth_max).validate()?;
        self.sim.validate()?;
        self.embedding.validate()?;
        Ok(())
    }

    pub fn speeds(&self) -> Vec<f64> {
        speed_axis(self.speed_range[0], self.speed_range[1], self.grid_width)
    }

    pub fn depths(&self) -> Vec<f64> {
        depth_axis(self.depth_max, self.grid_height)
    }

    fn turning_params(&self, speed_ratio: f64, b: f64) -> TurningParams {
        TurningParams {
            zeta: self.zeta,
            b,
            rho: self.rho,
            alpha: self.alpha,
            speed_ratio,
        }
    }

    fn sim_config(&self, seed: u64) -> SimConfig {
        SimConfig { seed, ..self.sim }
    }
}

/// One stream per grid point per run kind, all derived from the master seed.
fn derive_seed(master: u64, i: u64, j: u64, delta_bits: u64) -> u64 {
    let mut state = master;
    for salt in [i, j, delta_bits] {
        state = splitmix64(state ^ splitmix64(salt));
    }
    state
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub const FAILURE_DIVERGED: &str = "simulation_diverged";
pub const FAILURE_ZERO_VARIANCE: &str = "zero_variance";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointFailure {
    pub i: usize,
    pub j: usize,
    pub speed_ratio: f64,
    pub b: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<f64>,
    pub kind: String,
    pub message: String,
}

#[derive(Debug)]
pub struct SweepOutputs {
    pub rows: Vec<FeatureRow>,
    /// Grid indices aligned with `rows`.
    pub indices: Vec<(usize, usize)>,
    pub grid: LabelGrid,
    pub boundary: LobeBoundary,
    pub failures: Vec<PointFailure>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub majority_baseline: f64,
    pub predicted_chatter_fraction: f64,
    pub train_size: usize,
    pub test_size: usize,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug)]
pub struct TrainEvalOutputs {
    pub model: LogisticModel,
    pub normalizer: Normalizer,
    pub report: EvaluationReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferSummary {
    pub delta: f64,
    pub chatter_fraction: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentManifest {
    pub version: String,
    pub config: ExperimentConfig,
    pub files: BTreeMap<String, String>,
    pub timings_seconds: BTreeMap<String, f64>,
    pub failure_count: usize,
}

impl ExperimentManifest {
    fn new(config: &ExperimentConfig) -> Self {
        ExperimentManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            files: BTreeMap::new(),
            timings_seconds: BTreeMap::new(),
            failure_count: 0,
        }
    }

    fn add_file(&mut self, out_dir: &Path, name: &str) -> Result<()> {
        self.files.insert(name.to_string(), io::sha256_hex(&out_dir.join(name))?);
        Ok(())
    }
}

/// Simulate → embed → persist → featurize for one already-simulated series.
pub fn features_for_series(ts: &TimeSeries, cfg: &EmbeddingConfig) -> Result<[f64; FEATURE_DIM]> {
    let sub = truncate_and_subsample(ts, cfg)?;
    let acf = autocorrelation(&sub, default_max_lag(sub.len()))?;
    let eta = first_zero_lag(&acf);
    let cloud = takens_embed(&sub, eta, cfg.embed_dim)?;
    let (pd0, pd1) = rips_diagrams(&cloud)?;
    feature_vector(&pd0, &pd1)
}

enum PointOutcome {
    Features([f64; FEATURE_DIM]),
    /// Settled to an exactly constant tail: stable by definition.
    ZeroVariance(String),
    /// Left the basin entirely: chatter by definition, no features.
    Diverged(String),
}

fn deterministic_point(config: &ExperimentConfig, i: usize, j: usize) -> Result<PointOutcome> {
    let (speeds, depths) = (config.speeds(), config.depths());
    let params = config.turning_params(speeds[i], depths[j]);
    let sim = config.sim_config(derive_seed(config.seed, i as u64, j as u64, 0));
    point_outcome(simulate_deterministic(&params, &sim), config)
}

/// Ensemble mean over `transfer_realizations` independent noise paths, all
/// started from the same pre-cut history. A single realization of the
/// near-boundary response is dominated by noise-driven oscillation at the
/// natural frequency (variance ∝ 1/ζ_eff), which the classifier cannot tell
/// from small chatter; the phase-coherent mean keeps the deterministic
/// structure and shrinks that component by 1/√k.
fn stochastic_point(
    config: &ExperimentConfig,
    i: usize,
    j: usize,
    delta: f64,
) -> Result<PointOutcome> {
    let (speeds, depths) = (config.speeds(), config.depths());
    let params = StochasticParams {
        base: config.turning_params(speeds[i], depths[j]),
        delta,
    };
    let point_seed = derive_seed(config.seed, i as u64, j as u64, delta.to_bits());
    let k = config.transfer_realizations;
    let mut mean: Option<TimeSeries> = None;
    for r in 0..k {
        let sim = config.sim_config(derive_seed(point_seed, r as u64, 0, 0));
        let ts = match simulate_stochastic(&params, &sim) {
            Ok(ts) => ts,
            // One unbounded path is enough to call the cell chatter.
            diverged @ Err(Error::SimulationDiverged { .. }) => {
                return point_outcome(diverged, config)
            }
            Err(e) => return Err(e),
        };
        match &mut mean {
            None => {
                let mut first = ts;
                for v in &mut first.values {
                    *v /= k as f64;
                }
                mean = Some(first);
            }
            Some(acc) => {
                for (a, v) in acc.values.iter_mut().zip(&ts.values) {
                    *a += v / k as f64;
                }
            }
        }
    }
    point_outcome(Ok(mean.expect("k >= 1 checked by validate")), config)
}

fn point_outcome(
    sim_result: Result<TimeSeries>,
    config: &ExperimentConfig,
) -> Result<PointOutcome> {
    let ts = match sim_result {
        Ok(ts) => ts,
        Err(Error::SimulationDiverged { t, bound }) => {
            return Ok(PointOutcome::Diverged(format!("|y| exceeded {bound} at t = {t}")))
        }
        Err(e) => return Err(e),
    };
    match features_for_series(&ts, &config.embedding) {
        Ok(f) => Ok(PointOutcome::Features(f)),
        Err(Error::ZeroVariance) => {
            Ok(PointOutcome::ZeroVariance("constant tail after transient removal".into()))
        }
        Err(e) => Err(e),
    }
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot build {workers}-worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Analytic boundary and label grid for the configured axes; the envelope is
/// evaluated exactly at every axis speed so labels never rest on interpolation.
pub fn analytic_labels(config: &ExperimentConfig) -> Result<(LobeBoundary, LabelGrid)> {
    let speeds = config.speeds();
    let boundary = min_boundary_at(
        config.zeta,
        config.rho,
        config.alpha,
        (config.speed_range[0], config.speed_range[1]),
        BOUNDARY_RESOLUTION,
        &speeds,
    )?;
    let grid = label_grid(&boundary, &speeds, &config.depths());
    Ok((boundary, grid))
}

/// Full deterministic sweep: features.csv, labels.csv, boundary.csv, and a
/// failure log, all under the configured output directory.
pub fn run_sweep(config: &ExperimentConfig, workers: usize) -> Result<SweepOutputs> {
    config.validate()?;
    let out = &config.out_dir;
    std::fs::create_dir_all(out)?;
    let start = Instant::now();

    let (boundary, grid) = analytic_labels(config)?;
    let tasks: Vec<(usize, usize)> = (0..config.grid_width)
        .flat_map(|i| (0..config.grid_height).map(move |j| (i, j)))
        .collect();
    let outcomes: Vec<Result<PointOutcome>> = with_pool(workers, || {
        tasks
            .par_iter()
            .map(|&(i, j)| deterministic_point(config, i, j))
            .collect()
    })?;

    let speeds = config.speeds();
    let depths = config.depths();
    let mut rows = Vec::with_capacity(tasks.len());
    let mut indices = Vec::with_capacity(tasks.len());
    let mut failures = Vec::new();
    for (&(i, j), outcome) in tasks.iter().zip(outcomes) {
        let (speed_ratio, b) = (speeds[i], depths[j]);
        match outcome? {
            PointOutcome::Features(features) => {
                rows.push(FeatureRow { features, speed_ratio, b, label: grid.labels[i][j] });
                indices.push((i, j));
            }
            PointOutcome::ZeroVariance(message) => {
                rows.push(FeatureRow {
                    features: [0.0; FEATURE_DIM],
                    speed_ratio,
                    b,
                    label: false,
                });
                indices.push((i, j));
                failures.push(PointFailure {
                    i,
                    j,
                    speed_ratio,
                    b,
                    delta: None,
                    kind: FAILURE_ZERO_VARIANCE.into(),
                    message,
                });
            }
            PointOutcome::Diverged(message) => {
                failures.push(PointFailure {
                    i,
                    j,
                    speed_ratio,
                    b,
                    delta: None,
                    kind: FAILURE_DIVERGED.into(),
                    message,
                });
            }
        }
    }

    io::write_feature_rows(&out.join("features.csv"), &rows)?;
    io::write_label_grid(&out.join("labels.csv"), &grid)?;
    io::write_boundary(&out.join("boundary.csv"), &boundary)?;
    write_failures(&out.join("failures.jsonl"), &failures)?;

    let mut manifest = ExperimentManifest::new(config);
    manifest.failure_count = failures.len();
    manifest.timings_seconds.insert("sweep".into(), start.elapsed().as_secs_f64());
    for name in ["features.csv", "labels.csv", "boundary.csv", "failures.jsonl"] {
        manifest.add_file(out, name)?;
    }
    io::write_json(&out.join("manifest.json"), &manifest)?;

    Ok(SweepOutputs { rows, indices, grid, boundary, failures })
}

fn write_failures(path: &Path, failures: &[PointFailure]) -> Result<()> {
    use std::io::Write;
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for f in failures {
        writeln!(w, "{}", serde_json::to_string(f)?)?;
    }
    Ok(())
}

/// The train/test split a training run under this config would use.
pub fn train_test_split_of(
    config: &ExperimentConfig,
    n: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    train_test_split(n, config.test_fraction, config.seed)
}

/// Fits the normalizer on the training split only, trains the classifier,
/// evaluates on the held-out split, and writes model/normalizer/evaluation
/// artifacts plus the misclassified-point table and predicted map.
pub fn run_train_eval(config: &ExperimentConfig, sweep: &SweepOutputs) -> Result<TrainEvalOutputs> {
    config.validate()?;
    let out = &config.out_dir;
    std::fs::create_dir_all(out)?;
    let start = Instant::now();
    let rows = &sweep.rows;
    let (train_idx, test_idx) = train_test_split(rows.len(), config.test_fraction, config.seed)?;

    let train_raw: Vec<[f64; FEATURE_DIM]> = train_idx.iter().map(|&k| rows[k].features).collect();
    let train_labels: Vec<bool> = train_idx.iter().map(|&k| rows[k].label).collect();
    let normalizer = fit_normalizer(&train_raw)?;
    let train_x: Vec<[f64; FEATURE_DIM]> = train_raw.iter().map(|r| normalizer.apply(r)).collect();

    let opts = TrainOptions {
        l2_strength: config.l2_strength,
        seed: config.seed,
        ..TrainOptions::default()
    };
    let trained = train_logistic(&train_x, &train_labels, &opts)?;

    let test_x: Vec<[f64; FEATURE_DIM]> =
        test_idx.iter().map(|&k| normalizer.apply(&rows[k].features)).collect();
    let test_labels: Vec<bool> = test_idx.iter().map(|&k| rows[k].label).collect();
    let confusion = evaluate(&trained.model, &test_x, &test_labels)?;

    let chatter_count = rows.iter().filter(|r| r.label).count();
    let majority = (chatter_count.max(rows.len() - chatter_count)) as f64 / rows.len() as f64;

    // Model predictions over the whole grid, for the map and the transfer
    // comparison baseline.
    let mut predicted = sweep.grid.clone();
    for row in &mut predicted.labels {
        row.fill(false);
    }
    let mut predicted_chatter = 0usize;
    for (row, &(i, j)) in rows.iter().zip(&sweep.indices) {
        let p = trained.model.predict(&normalizer.apply(&row.features));
        predicted.labels[i][j] = p;
        predicted_chatter += usize::from(p);
    }
    // Diverged points never produced features; they are chatter by definition.
    for f in &sweep.failures {
        if f.kind == FAILURE_DIVERGED {
            predicted.labels[f.i][f.j] = true;
            predicted_chatter += 1;
        }
    }
    let n_cells = sweep.grid.speed_axis.len() * sweep.grid.depth_axis.len();
    let predicted_chatter_fraction = predicted_chatter as f64 / n_cells as f64;

    let report = EvaluationReport {
        confusion,
        accuracy: confusion.accuracy(),
        majority_baseline: majority,
        predicted_chatter_fraction,
        train_size: train_idx.len(),
        test_size: test_idx.len(),
        converged: trained.converged,
        iterations: trained.iterations,
    };

    io::write_json(&out.join("model.json"), &trained.model)?;
    io::write_json(&out.join("normalizer.json"), &normalizer)?;
    io::write_json(&out.join("evaluation.json"), &report)?;
    write_misclassified(config, sweep, &trained.model, &normalizer, &test_idx)?;

    let misclassified_cells: Vec<(usize, usize)> = test_idx
        .iter()
        .filter(|&&k| {
            trained.model.predict(&normalizer.apply(&rows[k].features)) != rows[k].label
        })
        .map(|&k| sweep.indices[k])
        .collect();
    let svg = render_map(&predicted, Some(&sweep.boundary), &misclassified_cells);
    std::fs::write(out.join("map.svg"), &svg)?;

    let mut manifest: ExperimentManifest = ExperimentManifest::new(config);
    manifest.timings_seconds.insert("train_eval".into(), start.elapsed().as_secs_f64());
    for name in ["model.json", "normalizer.json", "evaluation.json", "misclassified.csv", "map.svg"]
    {
        manifest.add_file(out, name)?;
    }
    io::write_json(&out.join("manifest_train.json"), &manifest)?;

    Ok(TrainEvalOutputs { model: trained.model, normalizer, report })
}

/// Misclassified test points with their distance to the analytic boundary,
/// expressed in grid cells of depth.
fn write_misclassified(
    config: &ExperimentConfig,
    sweep: &SweepOutputs,
    model: &LogisticModel,
    normalizer: &Normalizer,
    test_idx: &[usize],
) -> Result<()> {
    use std::io::Write;
    let depth_axis = &sweep.grid.depth_axis;
    let cell_depth = if depth_axis.len() > 1 {
        depth_axis[1] - depth_axis[0]
    } else {
        depth_axis[0]
    };
    let path = config.out_dir.join("misclassified.csv");
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "speed_ratio,b,label,predicted,cells_from_boundary")?;
    for &k in test_idx {
        let row = &sweep.rows[k];
        let pred = model.predict(&normalizer.apply(&row.features));
        if pred == row.label {
            continue;
        }
        let dist = (row.b - sweep.boundary.b_lim_at(row.speed_ratio)).abs() / cell_depth;
        writeln!(
            w,
            "{},{},{},{},{}",
            io::format_float(row.speed_ratio),
            io::format_float(row.b),
            u8::from(row.label),
            u8::from(pred),
            io::format_float(dist)
        )?;
    }
    Ok(())
}

/// Classifies stochastic simulations with the frozen model and normalizer:
/// one predicted LabelGrid CSV and rendered map per δ. Each grid point is
/// the ensemble mean of `transfer_realizations` paths (see
/// [`stochastic_point`] — single paths bury the decision scale in
/// noise-driven ringing near the boundary).
pub fn run_transfer(
    config: &ExperimentConfig,
    model: &LogisticModel,
    normalizer: &Normalizer,
    boundary: &LobeBoundary,
    workers: usize,
) -> Result<Vec<TransferSummary>> {
    config.validate()?;
    model.validate()?;
    normalizer.validate()?;
    let out = &config.out_dir;
    std::fs::create_dir_all(out)?;
    let start = Instant::now();
    let speeds = config.speeds();
    let depths = config.depths();

    let mut summaries = Vec::new();
    let mut manifest = ExperimentManifest::new(config);
    for &delta in &config.deltas {
        let tasks: Vec<(usize, usize)> = (0..config.grid_width)
            .flat_map(|i| (0..config.grid_height).map(move |j| (i, j)))
            .collect();
        let outcomes: Vec<Result<PointOutcome>> = with_pool(workers, || {
            tasks
                .par_iter()
                .map(|&(i, j)| stochastic_point(config, i, j, delta))
                .collect()
        })?;

        let mut labels = vec![vec![false; config.grid_height]; config.grid_width];
        let mut failures = Vec::new();
        for (&(i, j), outcome) in tasks.iter().zip(outcomes) {
            match outcome? {
                PointOutcome::Features(f) => {
                    labels[i][j] = model.predict(&normalizer.apply(&f));
                }
                PointOutcome::ZeroVariance(message) => {
                    labels[i][j] = false;
                    failures.push(PointFailure {
                        i,
                        j,
                        speed_ratio: speeds[i],
                        b: depths[j],
                        delta: Some(delta),
                        kind: FAILURE_ZERO_VARIANCE.into(),
                        message,
                    });
                }
                PointOutcome::Diverged(message) => {
                    labels[i][j] = true;
                    failures.push(PointFailure {
                        i,
                        j,
                        speed_ratio: speeds[i],
                        b: depths[j],
                        delta: Some(delta),
                        kind: FAILURE_DIVERGED.into(),
                        message,
                    });
                }
            }
        }

        let grid = LabelGrid {
            speed_axis: speeds.clone(),
            depth_axis: depths.clone(),
            labels,
        };
        let labels_name = format!("labels_delta_{delta}.csv");
        let map_name = format!("map_delta_{delta}.svg");
        io::write_label_grid(&out.join(&labels_name), &grid)?;
        std::fs::write(out.join(&map_name), render_map(&grid, Some(boundary), &[]))?;
        write_failures(&out.join(format!("failures_delta_{delta}.jsonl")), &failures)?;
        manifest.add_file(out, &labels_name)?;
        manifest.add_file(out, &map_name)?;
        manifest.failure_count += failures.len();

        summaries.push(TransferSummary {
            delta,
            chatter_fraction: grid.chatter_fraction(),
            failures: failures.len(),
        });
    }

    io::write_json(&out.join("transfer.json"), &summaries)?;
    manifest.timings_seconds.insert("transfer".into(), start.elapsed().as_secs_f64());
    manifest.add_file(out, "transfer.json")?;
    io::write_json(&out.join("manifest_transfer.json"), &manifest)?;
    Ok(summaries)
}

/// Sweep, train/evaluate, transfer, and a combined manifest.
pub fn run_all(config: &ExperimentConfig, workers: usize) -> Result<EvaluationReport> {
    let start = Instant::now();
    let sweep = run_sweep(config, workers)?;
    let trained = run_train_eval(config, &sweep)?;
    run_transfer(config, &trained.model, &trained.normalizer, &sweep.boundary, workers)?;

    // Re-hash everything the stages wrote into one manifest.
    let out = &config.out_dir;
    let mut manifest = ExperimentManifest::new(config);
    manifest.failure_count = sweep.failures.len();
    manifest.timings_seconds.insert("all".into(), start.elapsed().as_secs_f64());
    let mut names: Vec<String> = vec![
        "features.csv".into(),
        "labels.csv".into(),
        "boundary.csv".into(),
        "failures.jsonl".into(),
        "model.json".into(),
        "normalizer.json".into(),
        "evaluation.json".into(),
        "misclassified.csv".into(),
        "map.svg".into(),
        "transfer.json".into(),
    ];
    for delta in &config.deltas {
        names.push(format!("labels_delta_{delta}.csv"));
        names.push(format!("map_delta_{delta}.svg"));
    }
    for name in &names {
        manifest.add_file(out, name)?;
    }
    io::write_json(&out.join("manifest.json"), &manifest)?;
    Ok(trained.report)
}

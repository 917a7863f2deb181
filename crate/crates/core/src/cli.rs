//! Batch command-line interface.
//!
//! Settings are resolved in three layers: built-in defaults, then the JSON
//! file given by `--config`, then individual flags. The master seed (flag
//! or `seed` in the file) seeds the forest and every simulation scenario.
//!
//! Human-readable messages go to standard error. Payload files are written
//! under `--out`; `--stdout` also prints the main payload to standard
//! output. Exit codes: 0 success, 1 runtime failure, 2 usage or validation
//! error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::data::{load_csv, load_feature_rows, recode_like, ColumnSchema, Dataset, FeatureSchema};
use crate::error::{Error, Result};
use crate::experiments::{
    run_augmented_bagging, run_cardinality, run_correlated_pair, run_migration_demo, run_snr_sweep, write_rows_csv,
    AugmentedBaggingConfig, CardinalityConfig, CorrelatedPairConfig, Manifest, MigrationConfig, SnrSweepConfig,
};
use crate::forest::{fit_forest, fit_grouped_forest, oob_error, Forest, ForestParams, Scheme};
use crate::importance::{
    impurity_importance, oob_permutation_importance, rebuild_importance_report, write_reports_csv, ImportanceMethod,
    ImportanceReport,
};
use crate::inference::{
    chi2_test, confidence_interval, estimate_moments, fit_paired, fit_paired_forests, grouped_moments, test_effect,
    test_interaction, tree_swap_test, EffectGrid, GroupDesign, InteractionGrid, Moments, Regularization, TestResult,
    Transform,
};
use crate::rng::{derive_seed, rng_from_seed, TAG_EVAL, TAG_IMPORTANCE, TAG_TRANSFORM};

/// Scenario names accepted by `simulate`.
pub const SCENARIOS: [&str; 5] = ["snr_sweep", "augmented_bagging", "correlated_pair", "cardinality", "migration_demo"];

#[derive(Debug, Parser)]
#[command(name = "rfinfer", version, about = "Subsampled random forests with inference and importance tools")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed; overrides `seed` in the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for tree and replicate fits. Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// JSON run configuration; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Also print the main payload to standard output.
    #[arg(long, global = true)]
    pub stdout: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ForestArgs {
    /// Number of trees.
    #[arg(long)]
    pub b: Option<usize>,
    /// Subsample size.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub mtry: Option<usize>,
    #[arg(long)]
    pub min_leaf: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Probability that a node takes a random admissible split.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Split structure and leaf values on disjoint halves.
    #[arg(long)]
    pub honest: bool,
    /// bootstrap, subsample or subsample_with_replacement.
    #[arg(long)]
    pub scheme: Option<Scheme>,
    /// Anchored groups for variance estimation.
    #[arg(long)]
    pub n_z: Option<usize>,
    /// Trees per anchored group.
    #[arg(long)]
    pub n_mc: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Training CSV with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// JSON object mapping column name to numeric, categorical or response.
    #[arg(long)]
    pub schema: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum TestMethod {
    /// Paired-forest chi-squared test of the listed features.
    Chi2,
    /// Grid test that one feature has no effect.
    Effect,
    /// Grid test that two features enter additively.
    Interaction,
    /// Tree-swap permutation test on held-out data.
    TreeSwap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformKind {
    Permute,
    Drop,
    Conditional,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a forest and write model.json.
    Train {
        #[command(flatten)]
        data: DataArgs,
        /// Fit n_z x n_mc trees in anchored groups so that `ci --model`
        /// can use the saved model.
        #[arg(long)]
        grouped: bool,
        #[command(flatten)]
        forest: ForestArgs,
    },
    /// Predict rows of a CSV with a saved model; writes predictions.csv.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        points: PathBuf,
    },
    /// Confidence intervals at query points; writes intervals.csv.
    Ci {
        /// Saved model fitted in anchored groups. Without it the forest is
        /// refitted from --data and --schema.
        #[arg(long, conflicts_with_all = ["data", "schema"])]
        model: Option<PathBuf>,
        #[arg(long, requires = "schema")]
        data: Option<PathBuf>,
        #[arg(long, requires = "data")]
        schema: Option<PathBuf>,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        level: Option<f64>,
        #[command(flatten)]
        forest: ForestArgs,
    },
    /// Hypothesis tests; writes report.json. The exit code does not depend
    /// on the p-value.
    Test {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        method: TestMethod,
        /// Tested feature names (chi2 and tree_swap accept several).
        #[arg(long, value_delimiter = ',', required = true)]
        feature: Vec<String>,
        /// Second feature of an interaction.
        #[arg(long)]
        feature2: Option<String>,
        #[arg(long, value_enum, default_value = "permute")]
        transform: TransformKind,
        /// Query points for chi2; defaults to training rows sampled with the seed.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Held-out CSV for tree_swap.
        #[arg(long)]
        eval: Option<PathBuf>,
        #[arg(long)]
        n_perm: Option<usize>,
        #[command(flatten)]
        forest: ForestArgs,
    },
    /// Variable importance; writes importance.csv.
    Importance {
        #[command(flatten)]
        data: DataArgs,
        /// Held-out CSV, required by the rebuild methods.
        #[arg(long)]
        eval: Option<PathBuf>,
        /// Comma-separated method names; defaults to all.
        #[arg(long, value_delimiter = ',')]
        methods: Vec<String>,
        #[command(flatten)]
        forest: ForestArgs,
    },
    /// Run a simulation scenario; writes results.csv and manifest.json.
    Simulate {
        /// One of snr_sweep, augmented_bagging, correlated_pair,
        /// cardinality, migration_demo.
        scenario: String,
    },
}

/// Settings that can come from the `--config` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub forest: ForestParams,
    pub design: GroupDesign,
    pub level: f64,
    pub n_perm: usize,
    /// Training rows sampled as chi2 query points when none are given.
    pub query_points: usize,
    pub grid_levels: usize,
    pub grid_complements: usize,
    pub snr_sweep: SnrSweepConfig,
    pub augmented_bagging: AugmentedBaggingConfig,
    pub correlated_pair: CorrelatedPairConfig,
    pub cardinality: CardinalityConfig,
    pub migration_demo: MigrationConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            forest: ForestParams::default(),
            design: GroupDesign::default(),
            level: 0.95,
            n_perm: 199,
            query_points: 25,
            grid_levels: 3,
            grid_complements: 5,
            snr_sweep: SnrSweepConfig::default(),
            augmented_bagging: AugmentedBaggingConfig::default(),
            correlated_pair: CorrelatedPairConfig::default(),
            cardinality: CardinalityConfig::default(),
            migration_demo: MigrationConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParam(format!("config: {e}")))
    }

    fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::from_json_str(&fs::read_to_string(p)?),
            None => Ok(Self::default()),
        }
    }

    /// Apply the master seed and forest flags.
    fn apply(&mut self, seed: Option<u64>, f: &ForestArgs) {
        if let Some(s) = seed {
            self.seed = s;
        }
        let seed = self.seed;
        self.forest.seed = seed;
        self.snr_sweep.seed = seed;
        self.augmented_bagging.seed = seed;
        self.correlated_pair.seed = seed;
        self.cardinality.seed = seed;
        self.migration_demo.seed = seed;

        let p = &mut self.forest;
        if let Some(b) = f.b {
            p.b = b;
        }
        if f.k.is_some() {
            p.k = f.k;
        }
        if let Some(s) = f.scheme {
            p.scheme = s;
        }
        if f.mtry.is_some() {
            p.tree.mtry = f.mtry;
        }
        if let Some(m) = f.min_leaf {
            p.tree.min_leaf = m;
        }
        if f.max_depth.is_some() {
            p.tree.max_depth = f.max_depth;
        }
        if let Some(a) = f.alpha {
            p.tree.random_split_prob = a;
        }
        if f.honest {
            p.tree.honest = true;
        }
        if let Some(z) = f.n_z {
            self.design.n_z = z;
        }
        if let Some(m) = f.n_mc {
            self.design.n_mc = m;
        }
    }
}

/// Entry point of the `rfinfer` binary.
pub fn run() -> ExitCode {
    ExitCode::from(run_with_args(std::env::args_os()))
}

/// Parse `args` (program name first), execute, and return the exit code.
pub fn run_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code.clamp(0, 2) as u8;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() { 2 } else { 1 }
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(w) = cli.global.workers {
            if w == 0 {
                return Err(Error::InvalidParam("--workers must be >= 1".into()));
            }
            b = b.num_threads(w);
        }
        b.build().map_err(|e| Error::InvalidParam(format!("thread pool: {e}")))?
    };
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    let mut cfg = RunConfig::load(g.config.as_deref())?;
    let no_forest = ForestArgs::default();
    let forest_args = match &cli.command {
        Command::Train { forest, .. }
        | Command::Ci { forest, .. }
        | Command::Test { forest, .. }
        | Command::Importance { forest, .. } => forest,
        Command::Predict { .. } | Command::Simulate { .. } => &no_forest,
    };
    cfg.apply(g.seed, forest_args);
    let out = Output::new(&g.out, g.stdout)?;
    match &cli.command {
        Command::Train { data, grouped, .. } => cmd_train(&cfg, data, *grouped, &out),
        Command::Predict { model, points } => cmd_predict(model, points, &out),
        Command::Ci { model, data, schema, points, level, .. } => {
            if let Some(l) = level {
                cfg.level = *l;
            }
            cmd_ci(&cfg, model.as_deref(), data.as_deref().zip(schema.as_deref()), points, &out)
        }
        Command::Test { data, method, feature, feature2, transform, points, eval, n_perm, .. } => {
            if let Some(n) = n_perm {
                cfg.n_perm = *n;
            }
            let req = TestRequest {
                method: *method,
                features: feature,
                feature2: feature2.as_deref(),
                transform: *transform,
                points: points.as_deref(),
                eval: eval.as_deref(),
            };
            cmd_test(&cfg, data, &req, &out)
        }
        Command::Importance { data, eval, methods, .. } => cmd_importance(&cfg, data, eval.as_deref(), methods, &out),
        Command::Simulate { scenario } => cmd_simulate(&cfg, scenario, &out),
    }
}

struct Output {
    dir: PathBuf,
    stdout: bool,
}

impl Output {
    fn new(dir: &Path, stdout: bool) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), stdout })
    }

    fn write(&self, name: &str, bytes: &[u8], primary: bool) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        eprintln!("wrote {}", path.display());
        if primary && self.stdout {
            let mut h = std::io::stdout().lock();
            h.write_all(bytes)?;
            h.flush()?;
        }
        Ok(())
    }
}

fn load_data(args: &DataArgs) -> Result<Dataset> {
    let schema = ColumnSchema::from_json_file(&args.schema)?;
    load_csv(&args.data, &schema)
}

fn load_points(path: &Path, schema: &FeatureSchema) -> Result<Vec<Vec<f64>>> {
    load_feature_rows(fs::File::open(path)?, schema)
}

/// Held-out data is parsed with the training schema file and recoded to
/// the training categorical levels.
fn load_eval(path: &Path, data: &DataArgs, train: &Dataset) -> Result<Dataset> {
    let eval = load_csv(path, &ColumnSchema::from_json_file(&data.schema)?)?;
    recode_like(&eval, &train.schema())
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn cmd_train(cfg: &RunConfig, data: &DataArgs, grouped: bool, out: &Output) -> Result<()> {
    let ds = load_data(data)?;
    let forest = if grouped {
        cfg.design.check(&cfg.forest)?;
        fit_grouped_forest(&ds, &cfg.forest, cfg.design.n_z, cfg.design.n_mc)?
    } else {
        fit_forest(&ds, &cfg.forest)?
    };
    eprintln!("fitted {} trees on {} rows, {} features", forest.trees.len(), ds.n(), ds.p());
    match oob_error(&forest, &ds) {
        Ok(m) => eprintln!("OOB MSE {m:.6}"),
        Err(Error::NoOobCoverage(i)) => eprintln!("OOB MSE unavailable: row {i} is in every tree"),
        Err(e) => return Err(e),
    }
    let mut json = forest.to_json()?;
    json.push('\n');
    out.write("model.json", json.as_bytes(), true)
}

fn cmd_predict(model: &Path, points: &Path, out: &Output) -> Result<()> {
    let forest = Forest::load(model)?;
    let xs = load_points(points, &forest.schema)?;
    let preds = forest.predict_many(&xs)?;
    let bytes = csv_bytes(&["row", "prediction"], preds.iter().enumerate().map(|(i, p)| vec![i.to_string(), p.to_string()]))?;
    out.write("predictions.csv", &bytes, true)
}

fn cmd_ci(
    cfg: &RunConfig,
    model: Option<&Path>,
    data: Option<(&Path, &Path)>,
    points: &Path,
    out: &Output,
) -> Result<()> {
    let mom: Moments = match (model, data) {
        (Some(m), _) => {
            let forest = Forest::load(m)?;
            let xs = load_points(points, &forest.schema)?;
            grouped_moments(&forest, &xs, cfg.design.zeta1)?
        }
        (None, Some((d, s))) => {
            let ds = load_data(&DataArgs { data: d.to_path_buf(), schema: s.to_path_buf() })?;
            let xs = load_points(points, &ds.schema())?;
            estimate_moments(&ds, &cfg.forest, &xs, cfg.design)?.1
        }
        (None, None) => return Err(Error::InvalidParam("ci needs --model or --data with --schema".into())),
    };
    let rows = (0..mom.dim())
        .map(|i| {
            let (lo, hi) = confidence_interval(&mom, i, cfg.level)?;
            Ok(vec![
                i.to_string(),
                mom.mean[i].to_string(),
                ((hi - lo) / 2.0).to_string(),
                lo.to_string(),
                hi.to_string(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    eprintln!("{} intervals at level {}", rows.len(), cfg.level);
    let bytes = csv_bytes(&["row", "prediction", "half_width", "lo", "hi"], rows)?;
    out.write("intervals.csv", &bytes, true)
}

struct TestRequest<'a> {
    method: TestMethod,
    features: &'a [String],
    feature2: Option<&'a str>,
    transform: TransformKind,
    points: Option<&'a Path>,
    eval: Option<&'a Path>,
}

fn build_transform(kind: TransformKind, features: &[usize]) -> Result<Transform> {
    match kind {
        TransformKind::Permute => Ok(Transform::Permute(features.to_vec())),
        TransformKind::Drop => Ok(Transform::Drop(features.to_vec())),
        TransformKind::Conditional => match features {
            [j] => Ok(Transform::ConditionalPermute(*j)),
            _ => Err(Error::InvalidParam("conditional transform takes exactly one feature".into())),
        },
    }
}

fn sampled_rows(ds: &Dataset, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    let mut idx = sample(&mut rng, ds.n(), count.min(ds.n())).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| ds.row(i)).collect()
}

fn cmd_test(cfg: &RunConfig, data: &DataArgs, req: &TestRequest, out: &Output) -> Result<()> {
    let ds = load_data(data)?;
    let schema = ds.schema();
    let features = req.features.iter().map(|f| schema.index_of(f)).collect::<Result<Vec<_>>>()?;
    let seed = cfg.seed;
    let result: TestResult = match req.method {
        TestMethod::Chi2 => {
            let transform = build_transform(req.transform, &features)?;
            let points = match req.points {
                Some(p) => load_points(p, &schema)?,
                None => sampled_rows(&ds, cfg.query_points, derive_seed(seed, TAG_EVAL, 0)),
            };
            let (_, mom) = fit_paired(&ds, &cfg.forest, &transform, derive_seed(seed, TAG_TRANSFORM, 0), &points, cfg.design)?;
            let mut t = chi2_test(&mom.mean, &mom.cov, Regularization::default())?;
            t.points = Some(mom.points);
            t.diff = Some(mom.mean);
            t
        }
        TestMethod::Effect => {
            let [j] = features[..] else {
                return Err(Error::InvalidParam("effect test takes exactly one feature".into()));
            };
            let grid = EffectGrid::from_data(&ds, j, cfg.grid_levels, cfg.grid_complements, derive_seed(seed, TAG_EVAL, 1))?;
            test_effect(&ds, &cfg.forest, j, &grid, cfg.design)?
        }
        TestMethod::Interaction => {
            let (j1, j2) = match (&features[..], req.feature2) {
                ([a], Some(b)) => (*a, schema.index_of(b)?),
                ([a, b], None) => (*a, *b),
                _ => return Err(Error::InvalidParam("interaction needs two features".into())),
            };
            let grid =
                InteractionGrid::from_data(&ds, j1, j2, cfg.grid_levels, cfg.grid_complements, derive_seed(seed, TAG_EVAL, 2))?;
            test_interaction(&ds, &cfg.forest, j1, j2, &grid, cfg.design)?
        }
        TestMethod::TreeSwap => {
            let path = req.eval.ok_or_else(|| Error::InvalidParam("tree_swap needs --eval".into()))?;
            let eval = load_eval(path, data, &ds)?;
            let transform = build_transform(req.transform, &features)?;
            let paired = fit_paired_forests(&ds, &cfg.forest, &transform, derive_seed(seed, TAG_TRANSFORM, 0))?;
            tree_swap_test(&paired, &eval, cfg.n_perm, derive_seed(seed, TAG_TRANSFORM, 1))?
        }
    };
    eprintln!("{}: statistic {:.6}, p-value {:.6}", result.method, result.statistic, result.p_value);
    out.write("report.json", &json_bytes(&result)?, true)
}

fn cmd_importance(
    cfg: &RunConfig,
    data: &DataArgs,
    eval: Option<&Path>,
    methods: &[String],
    out: &Output,
) -> Result<()> {
    let methods: Vec<ImportanceMethod> = if methods.is_empty() {
        ImportanceMethod::ALL.to_vec()
    } else {
        methods.iter().map(|m| m.parse()).collect::<Result<_>>()?
    };
    let ds = load_data(data)?;
    let eval = eval.map(|p| load_eval(p, data, &ds)).transpose()?;
    let seed = cfg.seed;
    let needs_forest = methods.iter().any(|m| m.rebuild_mode().is_none());
    let forest = if needs_forest { Some(fit_forest(&ds, &cfg.forest)?) } else { None };
    let mut reports: Vec<ImportanceReport> = Vec::new();
    for m in methods {
        let report = match (m, m.rebuild_mode()) {
            (ImportanceMethod::OobPermute, _) => {
                oob_permutation_importance(forest.as_ref().expect("fitted above"), &ds, derive_seed(seed, TAG_IMPORTANCE, 0))?
            }
            (ImportanceMethod::Impurity, _) => impurity_importance(forest.as_ref().expect("fitted above")),
            (_, Some(mode)) => {
                let eval = eval
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParam(format!("{m} needs --eval")))?;
                rebuild_importance_report(&ds, &cfg.forest, mode, eval, derive_seed(seed, TAG_IMPORTANCE, 1))?
            }
            (_, None) => unreachable!("every non-rebuild method is matched above"),
        };
        if let Some(c) = &report.caveat {
            eprintln!("{m}: {c}");
        }
        reports.push(report);
    }
    let mut bytes = Vec::new();
    write_reports_csv(&reports, &mut bytes)?;
    out.write("importance.csv", &bytes, true)
}

fn write_simulation<C: Serialize, R: Serialize, S: Serialize>(
    out: &Output,
    scenario: &str,
    config: &C,
    rows: &[R],
    summary: &S,
) -> Result<()> {
    let mut csv = Vec::new();
    write_rows_csv(rows, &mut csv)?;
    let manifest = Manifest::new(scenario, config, &csv, summary);
    out.write("results.csv", &csv, true)?;
    out.write("manifest.json", &json_bytes(&manifest)?, false)?;
    eprintln!("digest {}", manifest.digest);
    Ok(())
}

/// One region's test, flattened for the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MigrationRow {
    pub region: usize,
    pub effect: f64,
    pub statistic: f64,
    pub dof: Option<usize>,
    pub p_value: f64,
}

fn cmd_simulate(cfg: &RunConfig, scenario: &str, out: &Output) -> Result<()> {
    match scenario {
        "snr_sweep" => {
            let c = &cfg.snr_sweep;
            let r = run_snr_sweep(c)?;
            for i in &r.improvements {
                eprintln!("snr {}: improvement {:.4} (se {:.4})", i.snr, i.improvement, i.se);
            }
            write_simulation(out, scenario, c, &r.rows, &r.improvements)
        }
        "augmented_bagging" => {
            let c = &cfg.augmented_bagging;
            let r = run_augmented_bagging(c)?;
            eprintln!("gain {:.4} (se {:.4}); tree-swap p {:.4}", r.mean_gain, r.gain_se, r.test.p_value);
            let summary = serde_json::json!({ "mean_gain": r.mean_gain, "gain_se": r.gain_se, "test": r.test });
            write_simulation(out, scenario, c, &r.rows, &summary)
        }
        "correlated_pair" => {
            let c = &cfg.correlated_pair;
            let r = run_correlated_pair(c)?;
            eprintln!(
                "x2 over x3 in {:.2} of runs; drop-rebuild x2 {:.4} (se {:.4})",
                r.summary.oob_x2_over_x3, r.summary.drop_x2_mean, r.summary.drop_x2_se
            );
            write_simulation(out, scenario, c, &r.rows, &r.summary)
        }
        "cardinality" => {
            let c = &cfg.cardinality;
            let r = run_cardinality(c)?;
            eprintln!(
                "high-cardinality feature wins in {:.2} of runs; tree-swap rejection {:?}",
                r.summary.high_over_low, r.summary.swap_rejection
            );
            write_simulation(out, scenario, c, &r.rows, &r.summary)
        }
        "migration_demo" => {
            let c = &cfg.migration_demo;
            let tests = run_migration_demo(c)?;
            let rows: Vec<MigrationRow> = tests
                .iter()
                .map(|t| MigrationRow {
                    region: t.region,
                    effect: t.effect,
                    statistic: t.result.statistic,
                    dof: t.result.dof,
                    p_value: t.result.p_value,
                })
                .collect();
            for r in &rows {
                eprintln!("region {}: p-value {:.4}", r.region, r.p_value);
            }
            write_simulation(out, scenario, c, &rows, &tests)
        }
        other => Err(Error::UnknownScenario(other.to_owned())),
    }
}

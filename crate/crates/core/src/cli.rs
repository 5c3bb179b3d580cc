//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on unreadable or invalid
//! data. Every output file is written to a temporary name and renamed.

use std::ffi::OsString;
use std::io::Write;
use std::ops::Range;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::divergence::{divergence, error_floor};
use crate::error::Error;
use crate::evaluation::{misclassified_partial, run_experiment, to_csv, Experiment, ExperimentModel};
use crate::graph::Partition;
use crate::io::{self, ModelSource};
use crate::model::ModelParams;
use crate::oracle::{divergence_grid_oracle, divergence_pg_oracle, map_oracle, naive_likelihood};
use crate::pipeline::ClusterConfig;
use crate::refinement::{estimate_params, refine, EstimatedParams};
use crate::rng::SampleSeed;
use crate::sampler::sample;
use crate::spectral::spectral_partition;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lsbm", version, about = "Labeled stochastic block models: sampling, divergence and clustering")]
pub struct Cli {
    /// Worker threads (0 uses every core). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a graph and its true partition from a model.
    Generate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Writes PREFIX.graph.tsv and PREFIX.truth.tsv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute D(alpha, p) and the error floor n exp(-nD).
    Divergence {
        #[arg(long)]
        model: PathBuf,
        /// Item count for the error floor (defaults to the model's n).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cluster a graph.
    Cluster(ClusterArgs),
    /// Count misclassified items of a partition against the truth.
    Evaluate {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep of models and seeds.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Seed range A..B (end exclusive); overrides the config.
        #[arg(long, value_parser = parse_seeds)]
        seeds: Option<Range<u64>>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall-clock time per run (makes output nondeterministic).
        #[arg(long)]
        timing: bool,
    },
    /// Brute-force references.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Model used only for diagnostics (divergence and error floor).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// True partition; adds error counts to the diagnostics.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Starting partition for `--stage refine`.
    #[arg(long)]
    pub init: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Stage::Full)]
    pub stage: Stage,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Algorithm settings as JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Partition file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Exhaustive MAP partition (tiny graphs only).
    Map {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-pair divergence by mirror descent and by a lambda grid.
    Divergence {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
    /// Naive per-item likelihood scores under parameters estimated from a
    /// partition (or the model's when given).
    Likelihood {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    Spectral,
    Refine,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn parse_seeds(s: &str) -> Result<Range<u64>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got '{s}'"))?;
    let a: u64 = a.trim().parse().map_err(|_| format!("bad range start '{a}'"))?;
    let b: u64 = b.trim().parse().map_err(|_| format!("bad range end '{b}'"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok(a..b)
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type CliResult<T> = Result<T, Failure>;

/// Experiment sweep file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentFile {
    models: Vec<ModelEntry>,
    #[serde(default)]
    seeds: Option<(u64, u64)>,
    #[serde(default)]
    cluster: ClusterConfig,
}

#[derive(Debug, Deserialize)]
struct ModelEntry {
    id: String,
    #[serde(flatten)]
    body: ModelBody,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModelBody {
    Model(ModelSource),
    /// Relative paths resolve against the config file's directory.
    Path(PathBuf),
}

/// Parses `args` (including the program name), runs the command, writes
/// results to `stdout` and messages to `stderr`, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start {} worker threads: {e}", cli.jobs);
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(text) => {
            if stdout.write_all(text.as_bytes()).is_err() {
                return EXIT_DATA;
            }
            EXIT_OK
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_DATA
        }
    }
}

fn to_json(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("json values serialize") + "\n"
}

/// Writes to `out` if given, otherwise returns the text for stdout.
fn emit(text: String, out: Option<&Path>) -> CliResult<String> {
    match out {
        Some(path) => {
            io::write_atomic(path, text.as_bytes())?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn dispatch(command: Command) -> CliResult<String> {
    match command {
        Command::Generate { model, seed, out } => generate(&model, seed, &out),
        Command::Divergence { model, n, out } => {
            let params = io::read_model(&model)?;
            emit(to_json(&divergence_json(&params, n.unwrap_or(params.n()))?), out.as_deref())
        }
        Command::Cluster(args) => cluster_cmd(&args),
        Command::Evaluate { truth, partition, format, out } => evaluate(&truth, &partition, format, out.as_deref()),
        Command::Experiment { config, seeds, format, out, timing } => {
            experiment(&config, seeds, format, out.as_deref(), timing)
        }
        Command::Oracle(cmd) => oracle(cmd),
    }
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn generate(model: &Path, seed: u64, out: &Path) -> CliResult<String> {
    let params = io::read_model(model)?;
    let (truth, graph) = sample(&params, SampleSeed(seed))?;
    let graph_path = suffixed(out, ".graph.tsv");
    let truth_path = suffixed(out, ".truth.tsv");
    io::write_atomic(&graph_path, io::format_graph(&graph).as_bytes())?;
    io::write_atomic(&truth_path, io::format_partition(&truth).as_bytes())?;
    Ok(to_json(&json!({
        "graph": graph_path,
        "truth": truth_path,
        "n": graph.n(),
        "L": graph.labels(),
        "edges": graph.edge_count(),
        "sizes": truth.sizes(),
    })))
}

fn divergence_json(params: &ModelParams, n: usize) -> CliResult<Value> {
    let report = divergence(params)?;
    Ok(json!({
        "d_value": report.d_value,
        "pair": [report.argmin_pair.0, report.argmin_pair.1],
        "lambda_star": report.lambda_star,
        "q": report.q_matrix,
        "per_pair": report.per_pair,
        "non_monotone": report.non_monotone,
        "n": n,
        "error_floor": error_floor(n, report.d_value),
    }))
}

fn read_config(path: Option<&Path>) -> CliResult<ClusterConfig> {
    let Some(path) = path else { return Ok(ClusterConfig::default()) };
    let text = std::fs::read_to_string(path).map_err(Error::from)?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Data(Error::Parse { path: path.to_path_buf(), line: e.line(), msg: e.to_string() }))
}

fn check_size(what: &Path, got: usize, n: usize) -> CliResult<()> {
    if got != n {
        return Err(Failure::Data(Error::Parse {
            path: what.to_path_buf(),
            line: 0,
            msg: format!("covers {got} items but the graph has {n}"),
        }));
    }
    Ok(())
}

fn cluster_cmd(args: &ClusterArgs) -> CliResult<String> {
    if args.stage == Stage::Refine && args.init.is_none() {
        return Err(Failure::Usage("--stage refine needs --init <partition file>".into()));
    }
    if args.stage != Stage::Refine && args.init.is_some() {
        return Err(Failure::Usage("--init is only used with --stage refine".into()));
    }
    let cfg = read_config(args.config.as_deref())?;
    let graph = io::read_graph(&args.graph)?;
    let n = graph.n();
    let truth = match &args.truth {
        Some(path) => {
            let t = io::read_partition(path)?;
            check_size(path, t.n(), n)?;
            Some(t)
        }
        None => None,
    };
    let seed = SampleSeed(args.seed);
    let mut diag = serde_json::Map::new();
    diag.insert("stage".into(), json!(format!("{:?}", args.stage).to_lowercase()));
    diag.insert("seed".into(), json!(args.seed));
    diag.insert("n".into(), json!(n));
    if let Some(path) = &args.model {
        let params = io::read_model(path)?;
        diag.insert("model".into(), divergence_json(&params, n)?);
    }

    let errors_of = |p: &Partition| -> CliResult<Option<usize>> {
        match &truth {
            Some(t) => Ok(Some(crate::evaluation::misclassified(p, t)?.errors)),
            None => Ok(None),
        }
    };

    let (initial, file_text) = if args.stage == Stage::Refine {
        let path = args.init.as_ref().expect("checked above");
        let init = io::read_partition(path)?;
        check_size(path, init.n(), n)?;
        (init, None)
    } else {
        let sp = spectral_partition(&graph, &cfg.spectral, seed)?;
        diag.insert(
            "spectral".into(),
            json!({
                "p_tilde": sp.p_tilde,
                "weights": sp.weights,
                "gamma_size": sp.gamma.len(),
                "trimmed": sp.trimmed,
                "k_tilde": sp.k_tilde,
                "sigmas": sp.sigmas,
                "threshold": sp.threshold,
                "rank_cap_reached": sp.rank_cap_reached,
                "k_hat": sp.k_hat,
                "references": sp.references,
                "errors": errors_of(&sp.initial)?,
            }),
        );
        let text = (args.stage == Stage::Spectral).then(|| io::format_labels(&sp.clusters));
        (sp.initial, text)
    };

    let file_text = match file_text {
        Some(text) => text,
        None => {
            let est: EstimatedParams = estimate_params(&graph, &initial)?;
            let r = refine(&graph, &initial, &est, &cfg.refine, seed, truth.as_ref())?;
            diag.insert(
                "refinement".into(),
                json!({
                    "k_hat": est.k_hat(),
                    "sweeps": r.sweeps,
                    "p_hat": est.to_nested(),
                    "trace": r.trace,
                    "errors": errors_of(&r.partition)?,
                }),
            );
            io::format_partition(&r.partition)
        }
    };
    io::write_atomic(&args.out, file_text.as_bytes())?;
    diag.insert("partition".into(), json!(args.out));
    Ok(to_json(&Value::Object(diag)))
}

fn evaluate(truth: &Path, partition: &Path, format: Format, out: Option<&Path>) -> CliResult<String> {
    let t = io::read_partition(truth)?;
    let est = io::read_labels(partition)?;
    check_size(partition, est.len(), t.n())?;
    let k_est = est.iter().flatten().max().map_or(0, |&k| k + 1);
    let m = misclassified_partial(&est, k_est, &t)?;
    let unassigned = est.iter().filter(|c| c.is_none()).count();
    let text = match format {
        Format::Json => to_json(&json!({
            "n": t.n(),
            "K": t.k_hat(),
            "k_hat": k_est,
            "unassigned": unassigned,
            "errors": m.errors,
            "mapping": m.mapping,
        })),
        Format::Csv => format!("n,K,k_hat,unassigned,errors\n{},{},{},{},{}\n", t.n(), t.k_hat(), k_est, unassigned, m.errors),
    };
    emit(text, out)
}

fn experiment(config: &Path, seeds: Option<Range<u64>>, format: Format, out: Option<&Path>, timing: bool) -> CliResult<String> {
    let text = std::fs::read_to_string(config).map_err(Error::from)?;
    let file: ExperimentFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Data(Error::Parse { path: config.to_path_buf(), line: e.line(), msg: e.to_string() }))?;
    let seeds = match (seeds, file.seeds) {
        (Some(r), _) => r,
        (None, Some((a, b))) if a <= b => a..b,
        (None, Some((a, b))) => {
            return Err(Failure::Data(Error::Parse {
                path: config.to_path_buf(),
                line: 0,
                msg: format!("empty seed range {a}..{b}"),
            }))
        }
        (None, None) => return Err(Failure::Usage("no seed range: pass --seeds A..B or set \"seeds\" in the config".into())),
    };
    let base = config.parent().unwrap_or(Path::new("."));
    let mut models = Vec::with_capacity(file.models.len());
    for entry in file.models {
        let params = match entry.body {
            ModelBody::Model(source) => source.build().map_err(|e| Error::Parse {
                path: config.to_path_buf(),
                line: 0,
                msg: format!("model '{}': {e}", entry.id),
            })?,
            ModelBody::Path(p) => io::read_model(&base.join(p))?,
        };
        models.push(ExperimentModel { id: entry.id, params });
    }
    let exp = Experiment { models, seeds, cluster: file.cluster, timing };
    let records = run_experiment(&exp);
    let text = match format {
        Format::Csv => to_csv(&records),
        Format::Json => serde_json::to_string_pretty(&records).map_err(Error::from)? + "\n",
    };
    emit(text, out)
}

fn oracle(cmd: OracleCommand) -> CliResult<String> {
    match cmd {
        OracleCommand::Map { graph, model, out } => {
            let g = io::read_graph(&graph)?;
            let params = io::read_model(&model)?;
            if params.n() != g.n() {
                return Err(Failure::Data(Error::Config(format!(
                    "model has n={} but the graph has {} items",
                    params.n(),
                    g.n()
                ))));
            }
            let r = map_oracle(&g, &params)?;
            let partition_file = match &out {
                Some(path) => {
                    io::write_atomic(path, io::format_partition(&r.partition).as_bytes())?;
                    Some(path.clone())
                }
                None => None,
            };
            Ok(to_json(&json!({
                "assignment": r.partition.assignment(),
                "log_posterior": r.log_posterior,
                "ties": r.ties,
                "partition": partition_file,
            })))
        }
        OracleCommand::Divergence { model, grid } => {
            let params = io::read_model(&model)?;
            let k = params.k();
            let mut pairs = Vec::new();
            for i in 0..k {
                for j in i + 1..k {
                    let (pi, pj) = (params.matrix(i), params.matrix(j));
                    pairs.push(json!({
                        "pair": [params.user_index(i), params.user_index(j)],
                        "mirror_descent": divergence_pg_oracle(params.alpha(), &pi, &pj),
                        "grid": divergence_grid_oracle(params.alpha(), &pi, &pj, grid),
                    }));
                }
            }
            Ok(to_json(&json!({ "pairs": pairs })))
        }
        OracleCommand::Likelihood { graph, partition, model } => {
            let g = io::read_graph(&graph)?;
            let p = io::read_partition(&partition)?;
            check_size(&partition, p.n(), g.n())?;
            let est = match model {
                Some(path) => EstimatedParams::from_model(&io::read_model(&path)?),
                None => estimate_params(&g, &p)?,
            };
            if p.k_hat() > est.k_hat() {
                return Err(Failure::Data(Error::InvalidPartition(format!(
                    "partition uses {} clusters but the parameters have {}",
                    p.k_hat(),
                    est.k_hat()
                ))));
            }
            let p = Partition::new(p.assignment().to_vec(), est.k_hat())?;
            Ok(to_json(&json!({ "scores": naive_likelihood(&g, &p, &est) })))
        }
    }
}

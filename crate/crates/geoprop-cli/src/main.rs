//! `geoprop` — batch pipeline driver over flat files.
//!
//! Subcommands mirror the pipeline stages: `graph-build` condenses mention
//! records into the reciprocated graph, `labels-build` assembles ground
//! truth from GPS observations and gazetteer-matched profiles, `locate`
//! runs the propagation solver, `geotag` assigns locations to shared URLs,
//! `toponyms` builds the unambiguous-toponym set, and `eval` hosts the
//! accuracy/coverage harness.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration
//! error (including malformed input under `--strict`). Every output file
//! gets a sibling `<name>.manifest.json` recording the exact parameters,
//! inputs, and outputs of the run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{DateTime, SecondsFormat, Utc};
use clap::{Parser, Subcommand};
use serde::Serialize;

use geoprop::eval;
use geoprop::geotag;
use geoprop::graph;
use geoprop::io;
use geoprop::propagation::{self, SolverConfig};
use geoprop::Error as LibError;

#[derive(Parser)]
#[command(
    name = "geoprop",
    version,
    about = "Social-graph location inference and document geotagging",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the reciprocated mention graph from directed mention records.
    ///
    /// Input: TSV `src<TAB>dst<TAB>count` (directed, pre-aggregated or
    /// not; duplicate pairs are summed). Output: TSV
    /// `user_a<TAB>user_b<TAB>weight`, one line per undirected edge with
    /// weight min(count a→b, count b→a).
    GraphBuild {
        /// Mention file (TSV: src, dst, count)
        #[arg(long)]
        mentions: PathBuf,
        /// Output graph file (TSV: user_a, user_b, weight)
        #[arg(long)]
        out: PathBuf,
        /// Fail on the first malformed line instead of skipping it
        #[arg(long)]
        strict: bool,
    },
    /// Build ground-truth labels from GPS observations and/or profile
    /// self-reports matched against a gazetteer.
    ///
    /// GPS input: TSV `user<TAB>lat<TAB>lon` (one row per observation; a
    /// user's label is the l1-median of their points). Profile input: TSV
    /// `user<TAB>text[<TAB>last_seen_iso8601]` with tabs in text escaped
    /// as \t. Output: TSV `user<TAB>lat<TAB>lon<TAB>source[<TAB>last_seen]`
    /// with GPS_MEDIAN preferred over SELF_REPORT on conflict.
    LabelsBuild {
        /// GPS observation file
        #[arg(long)]
        gps: Option<PathBuf>,
        /// Profile file with self-reported location text
        #[arg(long)]
        profiles: Option<PathBuf>,
        /// Gazetteer file (TSV: name, lat, lon[, population]); required
        /// with --profiles
        #[arg(long)]
        gazetteer: Option<PathBuf>,
        /// Drop self-reports whose last_seen timestamp is older than this
        /// ISO-8601 instant (rows without the column are kept)
        #[arg(long, value_name = "ISO8601")]
        last_seen_cutoff: Option<String>,
        /// Output label file
        #[arg(long)]
        out: PathBuf,
        /// Fail on the first malformed line instead of skipping it
        #[arg(long)]
        strict: bool,
    },
    /// Infer locations for unlabeled users by dispersion-gated median
    /// propagation over the graph.
    ///
    /// Output estimates: TSV `user<TAB>lat<TAB>lon<TAB>provenance<TAB>
    /// dispersion_km<TAB>iteration`. Report: CSV with one row per
    /// iteration (iteration, located_count, moved_count, objective_km).
    Locate {
        /// Graph file from graph-build
        #[arg(long)]
        graph: PathBuf,
        /// Label file from labels-build
        #[arg(long)]
        labels: PathBuf,
        /// Dispersion gate in km: skip updates whose neighbor MAD exceeds this
        #[arg(long, default_value_t = 100.0)]
        gamma_km: f64,
        /// Maximum solver iterations
        #[arg(long, default_value_t = 5)]
        iterations: u32,
        /// Movement threshold in km for the early-stop test
        #[arg(long, default_value_t = 1.0)]
        movement_epsilon_km: f64,
        /// Stop when the moved fraction of estimates falls below this (0 disables)
        #[arg(long, default_value_t = 0.001)]
        min_moved_fraction: f64,
        /// Refine each median with tangent-plane Weiszfeld iterations
        #[arg(long)]
        refine: bool,
        /// Worker threads (default: GEOPROP_THREADS env var, then all cores)
        #[arg(long)]
        threads: Option<usize>,
        /// Output estimate file
        #[arg(long)]
        out: PathBuf,
        /// Output per-iteration report CSV
        #[arg(long)]
        report: PathBuf,
        /// Fail on the first malformed line instead of skipping it
        #[arg(long)]
        strict: bool,
    },
    /// Geotag shared URLs from the locations of their distinct sharers.
    ///
    /// Shares input: TSV `url<TAB>user[<TAB>timestamp]`. Locations input:
    /// an estimate file from locate, or a label file. Output: TSV
    /// `url<TAB>status<TAB>lat<TAB>lon<TAB>dispersion_km<TAB>n_users`
    /// (location cells empty for REJECTED_TOO_FEW_USERS).
    Geotag {
        /// Share log file
        #[arg(long)]
        shares: PathBuf,
        /// Estimate or label file mapping users to locations
        #[arg(long)]
        locations: PathBuf,
        /// Minimum distinct located sharers to geotag a URL
        #[arg(long, default_value_t = 3)]
        min_users: usize,
        /// Reject documents whose sharer dispersion exceeds this (km)
        #[arg(long)]
        max_dispersion_km: Option<f64>,
        /// Keep only share events whose canonical URL matches this regex
        #[arg(long)]
        url_pattern: Option<String>,
        /// Output result file
        #[arg(long)]
        out: PathBuf,
        /// Fail on the first malformed line instead of skipping it
        #[arg(long)]
        strict: bool,
    },
    /// Build the unambiguous-toponym set from profile/GPS observations.
    ///
    /// Observations input: TSV `user<TAB>profile_text<TAB>lat<TAB>lon`
    /// (text escaped). Output: TSV `name<TAB>lat<TAB>lon<TAB>n_users<TAB>
    /// median_km` for every name passing the user-count, discrepancy, and
    /// length filters.
    Toponyms {
        /// Observation file (user, profile text, GPS lat, GPS lon)
        #[arg(long)]
        observations: PathBuf,
        /// Gazetteer file (TSV: name, lat, lon[, population])
        #[arg(long)]
        gazetteer: PathBuf,
        /// Minimum distinct users listing the name
        #[arg(long, default_value_t = 5)]
        min_users: usize,
        /// Maximum median GPS-to-gazetteer discrepancy in km
        #[arg(long, default_value_t = 50.0)]
        max_median_km: f64,
        /// Minimum name length in characters
        #[arg(long, default_value_t = 5)]
        min_chars: usize,
        /// Output toponym set file
        #[arg(long)]
        out: PathBuf,
        /// Fail on the first malformed line instead of skipping it
        #[arg(long)]
        strict: bool,
    },
    /// Accuracy and coverage evaluation; all outputs are CSV with a header.
    Eval {
        #[command(subcommand)]
        command: EvalCommand,
    },
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Leave-many-out cross-validation of the solver. Output CSV columns:
    /// median_km, mean_km, stddev_km, located_fraction, n_holdout,
    /// n_located.
    Cv {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Fraction of labeled users to hide, in (0, 1)
        #[arg(long, default_value_t = 0.10)]
        holdout_fraction: f64,
        /// RNG seed for the holdout sample
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100.0)]
        gamma_km: f64,
        #[arg(long, default_value_t = 5)]
        iterations: u32,
        #[arg(long)]
        refine: bool,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Empirical CDF of discrepancies. Records input: TSV `id<TAB>
    /// pred_lat<TAB>pred_lon<TAB>ref_lat<TAB>ref_lon<TAB>dispersion_km`.
    /// Output CSV columns: threshold_km, fraction.
    Cdf {
        #[arg(long)]
        records: PathBuf,
        /// Comma-separated km thresholds (default: 50 log-spaced, 1 to 20000)
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Coverage and accuracy vs dispersion threshold. Output CSV columns:
    /// threshold_km, coverage_fraction, median_km, mean_km, n.
    Coverage {
        #[arg(long)]
        records: PathBuf,
        /// Comma-separated km thresholds (default: 50 log-spaced, 1 to 20000)
        #[arg(long)]
        thresholds: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Mean-error characteristic curve over all distinct dispersions.
    /// Output CSV columns: mean_km, coverage_fraction.
    Characteristic {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        strict: bool,
    },
}

/// Failures mapped to exit codes: usage/config/malformed-input errors exit
/// 2, runtime failures exit 1.
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Errors while reading an input file: bad path or bad content are both
/// the caller's to fix.
fn input_err(e: LibError) -> CliError {
    CliError::Usage(e.to_string())
}

/// Errors while producing an output.
fn output_err(e: LibError) -> CliError {
    CliError::Runtime(e.to_string())
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Serialize)]
struct RunManifest {
    subcommand: String,
    version: String,
    parameters: BTreeMap<String, serde_json::Value>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    seed: Option<u64>,
    started_at: String,
    finished_at: String,
}

struct ManifestBuilder {
    subcommand: String,
    parameters: BTreeMap<String, serde_json::Value>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    seed: Option<u64>,
    started_at: DateTime<Utc>,
}

impl ManifestBuilder {
    fn new(subcommand: &str) -> Self {
        ManifestBuilder {
            subcommand: subcommand.to_string(),
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
            started_at: Utc::now(),
        }
    }

    fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameters serialize"),
        );
        self
    }

    fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.display().to_string());
        self
    }

    fn output(mut self, path: &Path) -> Self {
        self.outputs.push(path.display().to_string());
        self
    }

    fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Writes `<output>.manifest.json` next to every declared output.
    fn write(self) -> CliResult<()> {
        let manifest = RunManifest {
            subcommand: self.subcommand,
            version: env!("CARGO_PKG_VERSION").to_string(),
            parameters: self.parameters,
            inputs: self.inputs,
            outputs: self.outputs.clone(),
            seed: self.seed,
            started_at: self.started_at.to_rfc3339_opts(SecondsFormat::Millis, true),
            finished_at: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        for output in &self.outputs {
            let path = format!("{output}.manifest.json");
            io::atomic_write(&path, &json).map_err(output_err)?;
        }
        Ok(())
    }
}

fn print_skips(path: &Path, report: &geoprop::io::ParseReport) {
    if !report.skipped.is_empty() {
        eprintln!(
            "{}: skipped {} malformed line(s), first at line {}",
            path.display(),
            report.skipped.len(),
            report.skipped[0].line
        );
    }
    if report.self_mentions_dropped > 0 {
        eprintln!(
            "{}: dropped {} self-mention(s)",
            path.display(),
            report.self_mentions_dropped
        );
    }
}

fn install_thread_pool(threads: Option<usize>) -> CliResult<()> {
    let threads = match threads {
        Some(n) => Some(n),
        None => match std::env::var("GEOPROP_THREADS") {
            Ok(value) => Some(value.parse::<usize>().map_err(|_| {
                config_err(format!("GEOPROP_THREADS must be an integer, got {value:?}"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(config_err("thread count must be ≥ 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn parse_cutoff(cutoff: &str) -> CliResult<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(cutoff)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| config_err(format!("--last-seen-cutoff {cutoff:?}: {e}")))
}

fn parse_threshold_list(raw: &str, flag: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let trimmed = part.trim();
        let value: f64 = trimmed
            .parse()
            .map_err(|_| config_err(format!("{flag}: bad threshold {trimmed:?}")))?;
        if !value.is_finite() || value < 0.0 {
            return Err(config_err(format!(
                "{flag}: thresholds must be non-negative, got {trimmed}"
            )));
        }
        out.push(value);
    }
    if out.is_empty() {
        return Err(config_err(format!("{flag}: empty threshold list")));
    }
    Ok(out)
}

fn run_graph_build(mentions: &Path, out: &Path, strict: bool) -> CliResult<()> {
    let (records, report) = io::read_mentions(mentions, strict).map_err(input_err)?;
    print_skips(mentions, &report);
    let graph = graph::build_graph(records);
    io::write_graph(out, &graph).map_err(output_err)?;
    println!(
        "vertices\t{}\nedges\t{}",
        graph.vertex_count(),
        graph.edge_count()
    );
    ManifestBuilder::new("graph-build")
        .param("strict", strict)
        .input(mentions)
        .output(out)
        .write()
}

#[allow(clippy::too_many_arguments)]
fn run_labels_build(
    gps: Option<&Path>,
    profiles: Option<&Path>,
    gazetteer: Option<&Path>,
    last_seen_cutoff: Option<&str>,
    out: &Path,
    strict: bool,
) -> CliResult<()> {
    if gps.is_none() && profiles.is_none() {
        return Err(config_err(
            "at least one of --gps or --profiles is required",
        ));
    }
    if profiles.is_some() && gazetteer.is_none() {
        return Err(config_err("--gazetteer is required with --profiles"));
    }
    let cutoff = last_seen_cutoff.map(parse_cutoff).transpose()?;

    let gps_labels = match gps {
        Some(path) => {
            let (observations, report) =
                io::read_gps_observations(path, strict).map_err(input_err)?;
            print_skips(path, &report);
            graph::gps_ground_truth(observations)
        }
        None => graph::GroundTruthLabels::new(),
    };

    let self_labels = match profiles {
        Some(path) => {
            let gazetteer_path = gazetteer.expect("checked above");
            let (gaz, gaz_report) =
                io::read_gazetteer(gazetteer_path, strict).map_err(input_err)?;
            print_skips(gazetteer_path, &gaz_report);
            let (rows, report) = io::read_profiles(path, strict).map_err(input_err)?;
            print_skips(path, &report);
            let rows: Vec<graph::ProfileRow> = match cutoff {
                None => rows,
                Some(cutoff) => rows
                    .into_iter()
                    .filter(|row| match &row.last_seen {
                        None => true,
                        Some(stamp) => match DateTime::parse_from_rfc3339(stamp) {
                            Ok(t) => t.with_timezone(&Utc) >= cutoff,
                            Err(_) => false, // unparsable timestamps are stale
                        },
                    })
                    .collect(),
            };
            let (labels, stats) = graph::self_report_ground_truth(&rows, &gaz);
            println!(
                "self_reports_matched\t{}\nself_reports_ambiguous\t{}",
                stats.matched, stats.ambiguous_skipped
            );
            labels
        }
        None => graph::GroundTruthLabels::new(),
    };

    let merged = graph::merge_labels(gps_labels, self_labels);
    io::write_labels(out, &merged).map_err(output_err)?;
    println!("labels\t{}", merged.len());

    let mut manifest = ManifestBuilder::new("labels-build")
        .param("last_seen_cutoff", last_seen_cutoff)
        .param("strict", strict)
        .output(out);
    for path in [gps, profiles, gazetteer].into_iter().flatten() {
        manifest = manifest.input(path);
    }
    manifest.write()
}

#[allow(clippy::too_many_arguments)]
fn run_locate(
    graph_path: &Path,
    labels_path: &Path,
    config: &SolverConfig,
    threads: Option<usize>,
    out: &Path,
    report_path: &Path,
    strict: bool,
) -> CliResult<()> {
    install_thread_pool(threads)?;
    let (graph, graph_report) = io::read_graph(graph_path, strict).map_err(input_err)?;
    print_skips(graph_path, &graph_report);
    let (labels, labels_report) = io::read_labels(labels_path, strict).map_err(input_err)?;
    print_skips(labels_path, &labels_report);

    let (labeled, unlabeled) = graph::partition(&graph, &labels);
    let (estimates, report) = propagation::solve(&graph, &labels, config).map_err(|e| match e {
        LibError::InvalidConfig(_) | LibError::EmptyGraph => config_err(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    })?;
    io::write_estimates(out, &estimates).map_err(output_err)?;
    io::write_report_csv(report_path, &report).map_err(output_err)?;

    let inferred = estimates
        .values()
        .filter(|e| e.provenance == propagation::Provenance::Inferred)
        .count();
    println!(
        "vertices\t{}\nedges\t{}\nlabeled\t{}\nunlabeled\t{}\niterations\t{}\nlocated\t{}\ninferred\t{}",
        graph.vertex_count(),
        graph.edge_count(),
        labeled.len(),
        unlabeled.len(),
        report.iterations_run(),
        estimates.len(),
        inferred
    );

    ManifestBuilder::new("locate")
        .param("gamma_km", config.gamma_km)
        .param("iterations", config.max_iterations)
        .param("movement_epsilon_km", config.movement_epsilon_km)
        .param("min_moved_fraction", config.min_moved_fraction)
        .param("refine", config.refine_median)
        .param("threads", threads)
        .param("strict", strict)
        .input(graph_path)
        .input(labels_path)
        .output(out)
        .output(report_path)
        .write()
}

#[allow(clippy::too_many_arguments)]
fn run_geotag(
    shares: &Path,
    locations: &Path,
    min_users: usize,
    max_dispersion_km: Option<f64>,
    url_pattern: Option<&str>,
    out: &Path,
    strict: bool,
) -> CliResult<()> {
    let pattern = url_pattern
        .map(|raw| regex::Regex::new(raw).map_err(|e| config_err(format!("--url-pattern: {e}"))))
        .transpose()?;
    let (events, share_report) = io::read_shares(shares, strict).map_err(input_err)?;
    print_skips(shares, &share_report);
    let (location_map, loc_report) =
        io::read_locations_any(locations, strict).map_err(input_err)?;
    print_skips(locations, &loc_report);

    let events = match &pattern {
        Some(p) => geotag::filter_by_pattern(events, p),
        None => events,
    };
    let results = geotag::geotag_documents(&events, &location_map, min_users, max_dispersion_km)
        .map_err(|e| config_err(e.to_string()))?;
    io::write_geotag_results(out, &results).map_err(output_err)?;

    let tagged = results
        .iter()
        .filter(|r| r.status == geotag::GeotagStatus::Geotagged)
        .count();
    println!("documents\t{}\ngeotagged\t{}", results.len(), tagged);

    ManifestBuilder::new("geotag")
        .param("min_users", min_users)
        .param("max_dispersion_km", max_dispersion_km)
        .param("url_pattern", url_pattern)
        .param("strict", strict)
        .input(shares)
        .input(locations)
        .output(out)
        .write()
}

#[allow(clippy::too_many_arguments)]
fn run_toponyms(
    observations: &Path,
    gazetteer: &Path,
    min_users: usize,
    max_median_km: f64,
    min_chars: usize,
    out: &Path,
    strict: bool,
) -> CliResult<()> {
    if !(max_median_km.is_finite() && max_median_km >= 0.0) {
        return Err(config_err("--max-median-km must be non-negative"));
    }
    let (gaz, gaz_report) = io::read_gazetteer(gazetteer, strict).map_err(input_err)?;
    print_skips(gazetteer, &gaz_report);
    let (obs, obs_report) =
        io::read_toponym_observations(observations, strict).map_err(input_err)?;
    print_skips(observations, &obs_report);

    let set = geoprop::toponym::build_unambiguous(obs, &gaz, min_users, max_median_km, min_chars);
    io::write_toponyms(out, &set).map_err(output_err)?;
    println!("toponyms\t{}", set.len());

    ManifestBuilder::new("toponyms")
        .param("min_users", min_users)
        .param("max_median_km", max_median_km)
        .param("min_chars", min_chars)
        .param("strict", strict)
        .input(observations)
        .input(gazetteer)
        .output(out)
        .write()
}

fn read_records(path: &Path, strict: bool) -> CliResult<Vec<eval::DiscrepancyRecord>> {
    let (records, report) = io::read_discrepancy_records(path, strict).map_err(input_err)?;
    print_skips(path, &report);
    Ok(records)
}

fn eval_err(e: LibError) -> CliError {
    match e {
        LibError::EmptyInput | LibError::InsufficientLabels | LibError::InvalidConfig(_) => {
            config_err(e.to_string())
        }
        other => CliError::Runtime(other.to_string()),
    }
}

fn run_eval(command: &EvalCommand) -> CliResult<()> {
    match command {
        EvalCommand::Cv {
            graph: graph_path,
            labels: labels_path,
            holdout_fraction,
            seed,
            gamma_km,
            iterations,
            refine,
            threads,
            out,
            strict,
        } => {
            install_thread_pool(*threads)?;
            let (graph, graph_report) = io::read_graph(graph_path, *strict).map_err(input_err)?;
            print_skips(graph_path, &graph_report);
            let (labels, labels_report) =
                io::read_labels(labels_path, *strict).map_err(input_err)?;
            print_skips(labels_path, &labels_report);
            let config = SolverConfig {
                gamma_km: *gamma_km,
                max_iterations: *iterations,
                refine_median: *refine,
                ..SolverConfig::default()
            };
            let summary = eval::cross_validate(&graph, &labels, &config, *holdout_fraction, *seed)
                .map_err(eval_err)?;
            io::write_cv_csv(out, &summary).map_err(output_err)?;
            println!(
                "holdout\t{}\nlocated\t{}\nlocated_fraction\t{:.4}",
                summary.holdout_size, summary.located_count, summary.located_fraction
            );
            if let (Some(median), Some(mean)) = (summary.median_km, summary.mean_km) {
                println!("median_km\t{median:.3}\nmean_km\t{mean:.3}");
            }
            ManifestBuilder::new("eval cv")
                .param("holdout_fraction", holdout_fraction)
                .param("gamma_km", gamma_km)
                .param("iterations", iterations)
                .param("refine", refine)
                .param("threads", threads)
                .param("strict", strict)
                .seed(*seed)
                .input(graph_path)
                .input(labels_path)
                .output(out)
                .write()
        }
        EvalCommand::Cdf {
            records,
            grid,
            out,
            strict,
        } => {
            let parsed = read_records(records, *strict)?;
            let thresholds = match grid {
                Some(raw) => parse_threshold_list(raw, "--grid")?,
                None => eval::default_threshold_grid(),
            };
            let cdf = eval::discrepancy_cdf(&parsed, &thresholds).map_err(eval_err)?;
            io::write_cdf_csv(out, &cdf).map_err(output_err)?;
            ManifestBuilder::new("eval cdf")
                .param("grid", grid)
                .param("strict", strict)
                .input(records)
                .output(out)
                .write()
        }
        EvalCommand::Coverage {
            records,
            thresholds,
            out,
            strict,
        } => {
            let parsed = read_records(records, *strict)?;
            let grid = match thresholds {
                Some(raw) => parse_threshold_list(raw, "--thresholds")?,
                None => eval::default_threshold_grid(),
            };
            let curve = eval::coverage_curve(&parsed, &grid).map_err(eval_err)?;
            io::write_coverage_csv(out, &curve).map_err(output_err)?;
            ManifestBuilder::new("eval coverage")
                .param("thresholds", thresholds)
                .param("strict", strict)
                .input(records)
                .output(out)
                .write()
        }
        EvalCommand::Characteristic {
            records,
            out,
            strict,
        } => {
            let parsed = read_records(records, *strict)?;
            let curve = eval::error_characteristic(&parsed).map_err(eval_err)?;
            io::write_characteristic_csv(out, &curve).map_err(output_err)?;
            ManifestBuilder::new("eval characteristic")
                .param("strict", strict)
                .input(records)
                .output(out)
                .write()
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::GraphBuild {
            mentions,
            out,
            strict,
        } => run_graph_build(mentions, out, *strict),
        Command::LabelsBuild {
            gps,
            profiles,
            gazetteer,
            last_seen_cutoff,
            out,
            strict,
        } => run_labels_build(
            gps.as_deref(),
            profiles.as_deref(),
            gazetteer.as_deref(),
            last_seen_cutoff.as_deref(),
            out,
            *strict,
        ),
        Command::Locate {
            graph,
            labels,
            gamma_km,
            iterations,
            movement_epsilon_km,
            min_moved_fraction,
            refine,
            threads,
            out,
            report,
            strict,
        } => {
            let config = SolverConfig {
                gamma_km: *gamma_km,
                max_iterations: *iterations,
                movement_epsilon_km: *movement_epsilon_km,
                min_moved_fraction: *min_moved_fraction,
                refine_median: *refine,
            };
            config.validate().map_err(|e| config_err(e.to_string()))?;
            run_locate(graph, labels, &config, *threads, out, report, *strict)
        }
        Command::Geotag {
            shares,
            locations,
            min_users,
            max_dispersion_km,
            url_pattern,
            out,
            strict,
        } => run_geotag(
            shares,
            locations,
            *min_users,
            *max_dispersion_km,
            url_pattern.as_deref(),
            out,
            *strict,
        ),
        Command::Toponyms {
            observations,
            gazetteer,
            min_users,
            max_median_km,
            min_chars,
            out,
            strict,
        } => run_toponyms(
            observations,
            gazetteer,
            *min_users,
            *max_median_km,
            *min_chars,
            out,
            *strict,
        ),
        Command::Eval { command } => run_eval(command),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

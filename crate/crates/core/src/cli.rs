//! Command-line front end: `embed`, `eval`, `diagnose`, `bench` and `sbm`.
//!
//! Settings come from defaults, then an optional `--config` file, then
//! flags. Exit codes: 0 success, 1 usage or configuration, 2 data error,
//! 3 numerical failure. Failures print one JSON object on stderr.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{run_retrain_baseline, stream_embedding, evaluate_run, ExperimentConfig};
use crate::graph::{stream_from_edgelist, ArrivalEvent};
use crate::io::{
    generate_sbm, load_edgelist, load_labels, write_edgelist, write_embedding_csv, write_labels,
    write_timings_csv, IdMap, RunConfig, SbmSpec,
};
use crate::objective::{deviation_diagnostic, DiagnosticConfig};
use crate::spectral::{spectral_embed, SolverConfig};
use crate::graph::DynGraph;

#[derive(Parser, Debug)]
#[command(name = "stream-embed", version, about = "Online spectral embedding of growing graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags mirroring the config-file keys.
#[derive(Args, Debug, Default, Clone)]
struct Common {
    /// `key = value` config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Embedding dimension.
    #[arg(long)]
    k: Option<usize>,
    /// Cascade depth.
    #[arg(long)]
    depth: Option<usize>,
    /// Fraction of vertices embedded offline (and used for training).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest graph handed to the dense eigensolver.
    #[arg(long)]
    eigen_threshold: Option<usize>,
    /// Re-orthonormalize every this many arrivals (0 = never).
    #[arg(long)]
    reorth_interval: Option<usize>,
    /// L2 weight of the logistic-regression classifier.
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Embed a graph stream; writes the final and arrival-time embeddings.
    Embed(Common),
    /// Streaming evaluation; writes a JSON report and per-arrival timings.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Also evaluate a spectral retrain on the final graph.
        #[arg(long)]
        baseline: bool,
    },
    /// Compare the online embedding with retrained optima after every arrival.
    Diagnose {
        #[command(flatten)]
        common: Common,
        /// Number of cascade seeds per step.
        #[arg(long, default_value_t = 50)]
        seeds: usize,
    },
    /// Time arrivals and full retrains on block-model graphs of growing size.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "2000,4000,8000,16000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10.0)]
        avg_degree: f64,
        /// Share of each vertex's expected degree that stays inside its block.
        #[arg(long, default_value_t = 0.8)]
        intra_share: f64,
    },
    /// Write a block-model edge list and labels.
    Sbm {
        #[arg(long, value_delimiter = ',', required = true)]
        blocks: Vec<usize>,
        #[arg(long)]
        p_in: f64,
        #[arg(long)]
        p_out: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep blocks as contiguous id ranges.
        #[arg(long)]
        contiguous: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if let Some(v) = self.depth {
            cfg.depth = v;
        }
        if let Some(v) = self.p {
            cfg.p = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.eigen_threshold {
            cfg.eigen_threshold = v;
        }
        if let Some(v) = self.reorth_interval {
            cfg.reorth_interval = v;
        }
        if let Some(v) = self.l2 {
            cfg.l2 = v;
        }
        if let Some(v) = &self.edges {
            cfg.edges = Some(v.clone());
        }
        if let Some(v) = &self.labels {
            cfg.labels = Some(v.clone());
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn solver(cfg: &RunConfig) -> SolverConfig {
    SolverConfig {
        dense_threshold: cfg.eigen_threshold,
        ..SolverConfig::default()
    }
}

fn experiment(cfg: &RunConfig) -> ExperimentConfig {
    ExperimentConfig {
        k: cfg.k,
        train_fraction: cfg.p,
        depth: cfg.depth,
        seed: cfg.seed,
        l2: cfg.l2,
        reorth_interval: cfg.reorth_interval,
        incremental: false,
        solver: solver(cfg),
    }
}

fn required<'a>(path: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::Config(format!("missing `{key}` (flag --{key} or config key)")))
}

fn load_stream(cfg: &RunConfig) -> Result<(Vec<ArrivalEvent>, IdMap)> {
    let loaded = load_edgelist(required(&cfg.edges, "edges")?)?;
    if loaded.duplicates > 0 {
        log::warn!("dropped {} duplicate edges", loaded.duplicates);
    }
    let stream = stream_from_edgelist(&loaded.edges, loaded.vertex_count)?;
    Ok((stream.events, loaded.ids))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut out = create(dir, name)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    std::io::Write::write_all(&mut out, b"\n")?;
    Ok(())
}

fn cmd_embed(common: &Common) -> Result<()> {
    let cfg = common.resolve()?;
    let (events, ids) = load_stream(&cfg)?;
    let run = stream_embedding(&events, &experiment(&cfg))?;
    write_embedding_csv(create(&cfg.out, "embedding.csv")?, &run.final_embedding, |i| {
        ids.original(i.into()).to_string()
    })?;
    write_embedding_csv(create(&cfg.out, "arrival_rows.csv")?, &run.arrival_rows, |i| {
        ids.original((run.prefix + i).into()).to_string()
    })?;
    println!(
        "embedded {} vertices ({} offline, {} streamed) into {}",
        events.len(),
        run.prefix,
        run.arrival_rows.rows(),
        cfg.out.display()
    );
    Ok(())
}

fn cmd_eval(common: &Common, baseline: bool) -> Result<()> {
    let cfg = common.resolve()?;
    let (events, ids) = load_stream(&cfg)?;
    let data = load_labels(required(&cfg.labels, "labels")?, &ids)?;
    let exp = experiment(&cfg);
    let run = stream_embedding(&events, &exp)?;
    let report = evaluate_run(&run, &data, &exp)?;
    write_json(&cfg.out, "report.json", &report)?;
    write_timings_csv(create(&cfg.out, "timings.csv")?, &report.per_arrival_times)?;
    println!("{}", serde_json::to_string(&summary(&report))?);
    if baseline {
        let base = run_retrain_baseline(&events, &data, &exp)?;
        write_json(&cfg.out, "baseline.json", &base)?;
        println!("{}", serde_json::to_string(&summary(&base))?);
    }
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    method: &'a str,
    micro_f1: Option<f64>,
    macro_f1: Option<f64>,
    nmi: f64,
    completeness: f64,
}

fn summary(r: &crate::eval::EvalReport) -> Summary<'_> {
    Summary {
        method: &r.method,
        micro_f1: r.micro_f1,
        macro_f1: r.macro_f1,
        nmi: r.nmi,
        completeness: r.completeness,
    }
}

#[derive(Serialize)]
struct DiagnosticSummary {
    steps: usize,
    seeds: usize,
    records: usize,
    fraction_within_bound: f64,
    fraction_precondition_ok: f64,
    smoothness_violations: usize,
}

fn cmd_diagnose(common: &Common, seeds: usize) -> Result<()> {
    let cfg = common.resolve()?;
    let (events, _) = load_stream(&cfg)?;
    let exp = experiment(&cfg);
    let prefix = crate::eval::SplitProtocol::new(cfg.p)?.prefix_len(events.len());
    let seed_list: Vec<u64> = (0..seeds as u64).map(|i| cfg.seed.wrapping_add(i)).collect();
    let report = deviation_diagnostic(
        &events,
        &DiagnosticConfig {
            prefix,
            k: cfg.k,
            depth: cfg.depth,
            solver: exp.solver,
        },
        &seed_list,
    )?;
    report.write_csv(create(&cfg.out, "deviation.csv")?)?;
    let summary = DiagnosticSummary {
        steps: events.len() - prefix,
        seeds,
        records: report.records.len(),
        fraction_within_bound: report.fraction_within_bound(),
        fraction_precondition_ok: report.fraction_precondition_ok(),
        smoothness_violations: report.smoothness_violations(),
    };
    write_json(&cfg.out, "deviation_summary.json", &summary)?;
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

/// One line of the scaling table.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub vertices: usize,
    pub edges: usize,
    pub arrivals: usize,
    pub median_arrival_ns: u64,
    pub median_influence_ns: u64,
    pub median_update_ns: u64,
    pub retrain_ns: u64,
}

fn median(mut xs: Vec<u64>) -> u64 {
    if xs.is_empty() {
        return 0;
    }
    xs.sort_unstable();
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / 2
    }
}

/// Streams a block-model graph with `n` vertices and times every arrival
/// and one full spectral retrain of the final graph.
pub fn bench_size(
    n: usize,
    avg_degree: f64,
    intra_share: f64,
    exp: &ExperimentConfig,
) -> Result<BenchRow> {
    let spec = SbmSpec::with_average_degree(n, avg_degree, intra_share, exp.seed);
    let (edges, _) = generate_sbm(&spec)?;
    let stream = stream_from_edgelist(&edges, n)?;
    let run = stream_embedding(&stream.events, exp)?;
    let graph: DynGraph = run.final_graph;
    let start = Instant::now();
    let f = spectral_embed(&graph, exp.k, &exp.solver)?;
    let retrain_ns = start.elapsed().as_nanos() as u64;
    debug_assert_eq!(f.rows(), n);
    let t = &run.timings;
    Ok(BenchRow {
        vertices: n,
        edges: graph.edge_count(),
        arrivals: t.len(),
        median_arrival_ns: median(t.iter().map(|r| r.influence_ns + r.update_ns).collect()),
        median_influence_ns: median(t.iter().map(|r| r.influence_ns).collect()),
        median_update_ns: median(t.iter().map(|r| r.update_ns).collect()),
        retrain_ns,
    })
}

fn cmd_bench(common: &Common, sizes: &[usize], avg_degree: f64, intra_share: f64) -> Result<()> {
    let cfg = common.resolve()?;
    if !(avg_degree > 0.0) || !(0.0..=1.0).contains(&intra_share) {
        return Err(Error::Config("avg-degree must be positive and intra-share in [0, 1]".into()));
    }
    let exp = experiment(&cfg);
    let mut out = create(&cfg.out, "bench.csv")?;
    let header =
        "vertices,edges,arrivals,median_arrival_ns,median_influence_ns,median_update_ns,retrain_ns";
    std::io::Write::write_all(&mut out, format!("{header}\n").as_bytes())?;
    println!("{header}");
    for &n in sizes {
        let r = bench_size(n, avg_degree, intra_share, &exp)?;
        let line = format!(
            "{},{},{},{},{},{},{}",
            r.vertices,
            r.edges,
            r.arrivals,
            r.median_arrival_ns,
            r.median_influence_ns,
            r.median_update_ns,
            r.retrain_ns
        );
        std::io::Write::write_all(&mut out, format!("{line}\n").as_bytes())?;
        println!("{line}");
    }
    Ok(())
}

fn cmd_sbm(spec: &SbmSpec, out: &Path) -> Result<()> {
    if spec.block_sizes.len() < 2 {
        return Err(Error::Config("need at least two blocks".into()));
    }
    let (edges, labels) = generate_sbm(spec)?;
    write_edgelist(create(out, "edges.tsv")?, &edges)?;
    write_labels(create(out, "labels.tsv")?, &labels)?;
    println!(
        "{} vertices, {} edges written to {}",
        labels.len(),
        edges.len(),
        out.display()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Embed(common) => cmd_embed(&common),
        Command::Eval { common, baseline } => cmd_eval(&common, baseline),
        Command::Diagnose { common, seeds } => cmd_diagnose(&common, seeds),
        Command::Bench {
            common,
            sizes,
            avg_degree,
            intra_share,
        } => cmd_bench(&common, &sizes, avg_degree, intra_share),
        Command::Sbm {
            blocks,
            p_in,
            p_out,
            seed,
            contiguous,
            out,
        } => cmd_sbm(
            &SbmSpec {
                block_sizes: blocks,
                p_in,
                p_out,
                seed,
                shuffle_ids: !contiguous,
            },
            &out,
        ),
    }
}

/// Error payload printed on stderr.
#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            if code != 0 {
                let report = ErrorReport {
                    error: "usage",
                    message: e.kind().to_string(),
                    exit_code: code,
                };
                eprintln!("{}", serde_json::to_string(&report).unwrap_or_default());
            }
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            let report = ErrorReport {
                error: e.kind(),
                message: e.to_string(),
                exit_code: e.exit_code(),
            };
            eprintln!("{}", serde_json::to_string(&report).unwrap_or_default());
            e.exit_code()
        }
    }
}

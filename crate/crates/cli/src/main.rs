//! `seqclust`: generation, streaming runs, structural checks, adversarial
//! constructions and experiments from the command line.
//!
//! Exit codes: 0 success or verdict true, 1 verdict false, 2 usage or input
//! error, 3 infeasible generation or exhausted search budget.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use seqclust::adversary::{
    adversarial_line_ordering, build_euclidean_m_configuration, build_lower_bound_instance,
    build_matrix_m_configuration, find_kmeans_badcase, verify_m_configuration, AdversaryError, LowerBoundMode,
};
use seqclust::harness::experiment::{check_hypotheses, run_on_instance, ExperimentReport};
use seqclust::harness::report::{to_csv, to_json};
use seqclust::harness::{
    generate, render_summary, run_criterion, ExperimentAlgorithm, ExperimentConfig, GeneratorClass, GeneratorSpec,
    HarnessError, OrderingMode,
};
use seqclust::incremental::{run_stream, AlgorithmKind, Ordering};
use seqclust::metricspace::{format_space, validate_space, SpaceFormat};
use seqclust::rng::{derive_seed, substream, Stream};
use seqclust::structures::{
    compute_cores, enumerate_nice_clusterings, induce_clustering, is_convex_nice_sufficient, is_nice, is_perfect,
    nice_violation, perfect_violation, refinement_violation,
};

use crate::io::{emit, load_clustering, load_ordering, load_space, require_covers, write_atomic};

#[derive(Parser)]
#[command(name = "seqclust", version, about = "Incremental clustering experiments and checkers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance with its planted clustering.
    Generate(GenerateArgs),
    /// Stream a space through one algorithm and record the run.
    Run(RunArgs),
    /// Check a structural property; exit 0 if it holds, 1 if not.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Build adversarial instances and witnesses.
    Adversary {
        #[command(subcommand)]
        kind: AdversaryCommand,
    },
    /// Estimate a refinement probability and compare it with its bound.
    Experiment(ExperimentArgs),
    /// Run the acceptance suite; exit 0 iff every criterion passes.
    VerifyAll(VerifyArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    class: GeneratorClass,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0.5)]
    separation: f64,
    /// Core fraction (core class) or smallest-cluster fraction.
    #[arg(long)]
    beta: Option<f64>,
    /// Require the planted clustering to be the only nice one.
    #[arg(long)]
    unique: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// File stem of the outputs.
    #[arg(long, default_value = "instance")]
    name: String,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    alg: AlgorithmKind,
    /// Number of centers (`--l` is an alias).
    #[arg(long, short = 'k', visible_alias = "l")]
    k: usize,
    #[arg(long)]
    space: PathBuf,
    /// Treat a matrix space as a metric.
    #[arg(long)]
    metric: bool,
    /// `random`, `identity`, `cluster-sorted` (needs `--clustering`) or `file:<path>`.
    #[arg(long, default_value = "random")]
    order: String,
    /// Planted clustering to compare the result against.
    #[arg(long)]
    clustering: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Keep a snapshot every this many steps (0 keeps none).
    #[arg(long, default_value_t = 0)]
    snapshots: usize,
    /// Run record destination; printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CheckCommand {
    Nice(SpaceAndClustering),
    Perfect(SpaceAndClustering),
    /// Print the cores; with `--beta`, require the core fraction to reach it.
    Core {
        #[command(flatten)]
        files: SpaceAndClustering,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Whether the first clustering refines the second.
    Refinement { fine: PathBuf, coarse: PathBuf },
    ConvexNice(SpaceAndClustering),
    /// Validate a space file; `--metric` adds the triangle inequality.
    Space {
        space: PathBuf,
        #[arg(long)]
        metric: bool,
    },
}

#[derive(Args)]
struct SpaceAndClustering {
    space: PathBuf,
    clustering: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Matrix,
    Euclidean,
}

#[derive(Subcommand)]
enum AdversaryCommand {
    Mconfig {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "matrix")]
        mode: Mode,
        #[arg(long, default_value_t = 40)]
        dim: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        max_attempts: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value = "mconfig")]
        name: String,
    },
    LowerBound {
        #[arg(long, default_value_t = 5)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        b: usize,
        #[arg(long, value_enum, default_value = "matrix")]
        mode: Mode,
        #[arg(long, default_value_t = 40)]
        dim: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        max_attempts: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value = "lower-bound")]
        name: String,
    },
    KmeansBadcase {
        /// Candidate configurations to try; scientific notation accepted.
        #[arg(long, default_value = "1e5", value_parser = parse_budget)]
        budget: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Witness destination; printed when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    LineOrdering {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        clustering: PathBuf,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value = "1e4", value_parser = parse_budget)]
        budget: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Ordering destination (one item per line).
        #[arg(long)]
        out: PathBuf,
        /// Certificate destination (JSON).
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    alg: ExperimentAlgorithm,
    /// Defaults to convex-nice for seq-l-means and core for subsample.
    #[arg(long)]
    class: Option<GeneratorClass>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long)]
    beta: Option<f64>,
    /// One or more comma-separated values.
    #[arg(long, value_delimiter = ',', required = true)]
    l: Vec<usize>,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    /// `random`, `cluster-sorted`, `adversarial` (cluster-sorted) or `file:<path>`.
    #[arg(long, default_value = "random")]
    order: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Subset of criteria to run, comma-separated.
    #[arg(long, value_delimiter = ',')]
    criteria: Option<Vec<u8>>,
    /// Also write the summary here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_budget(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(v as u64),
        _ => Err(format!("`{s}` is not a positive whole number")),
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0)
    });
    eprintln!("seed: {seed}");
    seed
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<ExitCode> {
    let seed = resolve_seed(a.seed);
    let spec = GeneratorSpec {
        class: a.class,
        k: a.k,
        n: a.n,
        dim: a.dim,
        separation: a.separation,
        beta: a.beta,
        unique: a.unique,
        seed,
    };
    let inst = generate(&spec)?;
    let space_path = a.out_dir.join(format!("{}.space", a.name));
    let clustering_path = a.out_dir.join(format!("{}.clustering", a.name));
    write_atomic(&space_path, &format_space(&inst.space, SpaceFormat::Coordinates)?)?;
    write_atomic(&clustering_path, &inst.planted.to_text())?;
    println!("wrote {}", space_path.display());
    println!("wrote {}", clustering_path.display());
    if a.class == GeneratorClass::Core {
        let cores_path = a.out_dir.join(format!("{}.cores", a.name));
        write_atomic(&cores_path, &inst.cores.to_text())?;
        println!("wrote {}", cores_path.display());
    }
    println!("n: {}, k: {}, generator retries: {}", inst.space.len(), inst.planted.k(), inst.retries);
    println!("measured beta: {}", inst.measured_beta);
    match a.class {
        GeneratorClass::Perfect => {
            println!("perfect: {}", is_perfect(&inst.space, &inst.planted));
            println!("nice: {}", is_nice(&inst.space, &inst.planted));
        }
        GeneratorClass::Nice => {
            println!("nice: {}", is_nice(&inst.space, &inst.planted));
            if a.unique {
                let found = enumerate_nice_clusterings(&inst.space, a.k, 2)?;
                println!("unique: {}", found.len() == 1);
            }
        }
        GeneratorClass::ConvexNice => {
            println!("convex-nice: {}", is_convex_nice_sufficient(&inst.space, &inst.planted)?);
        }
        GeneratorClass::Core => {
            println!("core sizes: {:?}", inst.cores.cores.iter().map(Vec::len).collect::<Vec<_>>());
            println!("nice: {}", is_nice(&inst.space, &inst.planted));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn ordering_from(spec: &str, n: usize, seed: u64, planted: Option<&seqclust::structures::Clustering>) -> Result<Ordering> {
    if let Some(path) = spec.strip_prefix("file:") {
        return load_ordering(Path::new(path));
    }
    Ok(match spec {
        "random" => Ordering::random(n, derive_seed(seed, Stream::Ordering, 0)),
        "identity" => Ordering::identity(n),
        "cluster-sorted" => match planted {
            Some(c) => Ordering::cluster_sorted(c),
            None => bail!("--order cluster-sorted needs --clustering"),
        },
        other => bail!("unknown ordering `{other}` (random, identity, cluster-sorted, file:<path>)"),
    })
}

fn cmd_run(a: RunArgs) -> Result<ExitCode> {
    let seed = resolve_seed(a.seed);
    let space = load_space(&a.space, a.metric)?;
    let planted = a.clustering.as_deref().map(load_clustering).transpose()?;
    if let Some(c) = &planted {
        require_covers(&space, c, "clustering")?;
    }
    let ordering = ordering_from(&a.order, space.len(), seed, planted.as_ref())?;
    let mut alg = a.alg.build(a.k, derive_seed(seed, Stream::Algorithm, 0))?;
    let record = run_stream(alg.as_mut(), &space, &ordering, a.snapshots)?;
    let max_snapshot = record.snapshots.iter().map(|s| s.centers.len()).max();
    let json = to_json(&record)?;
    let mut lines = vec![format!("algorithm: {}", record.algorithm), format!("final centers: {}", record.final_centers.len())];
    if let Some(m) = max_snapshot {
        lines.push(format!("snapshots: {}, most centers held: {m}, bound: {}", record.snapshots.len(), alg.bound()));
    }
    if let Some(c) = &planted {
        let induced = induce_clustering(&space, &record.final_centers)?.clustering;
        lines.push(format!("final clustering equals planted: {}", induced.same_partition(c)));
        lines.push(format!("final clustering refines planted: {}", refinement_violation(&induced, c)?.is_none()));
    }
    match &a.out {
        Some(p) => {
            write_atomic(p, &json)?;
            println!("wrote {}", p.display());
            lines.iter().for_each(|l| println!("{l}"));
        }
        None => {
            print!("{json}");
            lines.iter().for_each(|l| eprintln!("{l}"));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(what: CheckCommand) -> Result<ExitCode> {
    Ok(match what {
        CheckCommand::Nice(f) => {
            let (space, c) = (load_space(&f.space, false)?, load_clustering(&f.clustering)?);
            require_covers(&space, &c, "clustering")?;
            let w = nice_violation(&space, &c);
            match w {
                None => println!("nice: true"),
                Some(w) => println!(
                    "nice: false (d({x},{y}) = {} >= d({x},{z}) = {})",
                    space.d(w.x, w.y),
                    space.d(w.x, w.z),
                    x = w.x,
                    y = w.y,
                    z = w.z
                ),
            }
            verdict(w.is_none())
        }
        CheckCommand::Perfect(f) => {
            let (space, c) = (load_space(&f.space, false)?, load_clustering(&f.clustering)?);
            require_covers(&space, &c, "clustering")?;
            let w = perfect_violation(&space, &c);
            match w {
                None => println!("perfect: true"),
                Some(w) => println!(
                    "perfect: false (intra {:?} at {} >= inter {:?} at {})",
                    w.intra, w.intra_distance, w.inter, w.inter_distance
                ),
            }
            verdict(w.is_none())
        }
        CheckCommand::Core { files, beta } => {
            let (space, c) = (load_space(&files.space, false)?, load_clustering(&files.clustering)?);
            require_covers(&space, &c, "clustering")?;
            let cores = compute_cores(&space, &c);
            print!("{}", cores.to_text());
            println!("core beta: {}", cores.beta);
            let ok = match beta {
                Some(b) => cores.beta >= b,
                None => cores.min_core > 0,
            };
            println!("core: {ok}");
            verdict(ok)
        }
        CheckCommand::Refinement { fine, coarse } => {
            let (fine, coarse) = (load_clustering(&fine)?, load_clustering(&coarse)?);
            match refinement_violation(&fine, &coarse)? {
                None => {
                    println!("refinement: true");
                    ExitCode::SUCCESS
                }
                Some((a, b)) => {
                    println!("refinement: false (items {a} and {b} share a fine cluster but not a coarse one)");
                    ExitCode::from(1)
                }
            }
        }
        CheckCommand::ConvexNice(f) => {
            let (space, c) = (load_space(&f.space, false)?, load_clustering(&f.clustering)?);
            require_covers(&space, &c, "clustering")?;
            let ok = is_convex_nice_sufficient(&space, &c)?;
            println!("convex-nice: {}", if ok { "true" } else { "not certified" });
            verdict(ok)
        }
        CheckCommand::Space { space, metric } => {
            let space = load_space(&space, metric)?;
            let report = validate_space(&space);
            for v in &report.violations {
                println!("violation: {v}");
            }
            println!("items: {}, valid: {}", space.len(), report.is_valid());
            verdict(report.is_valid())
        }
    })
}

fn lower_bound_mode(mode: Mode, dim: usize, seed: u64, max_attempts: u64) -> LowerBoundMode {
    match mode {
        Mode::Matrix => LowerBoundMode::Matrix,
        Mode::Euclidean => LowerBoundMode::Euclidean { dim, seed, max_attempts },
    }
}

fn cmd_adversary(kind: AdversaryCommand) -> Result<ExitCode> {
    match kind {
        AdversaryCommand::Mconfig {
            m,
            mode,
            dim,
            seed,
            max_attempts,
            out_dir,
            name,
        } => {
            let config = match mode {
                Mode::Matrix => build_matrix_m_configuration(m)?,
                Mode::Euclidean => {
                    let seed = resolve_seed(seed);
                    build_euclidean_m_configuration(m, dim, &mut substream(seed, Stream::Search, 0), max_attempts)?
                }
            };
            let format = match mode {
                Mode::Matrix => SpaceFormat::Matrix,
                Mode::Euclidean => SpaceFormat::Coordinates,
            };
            let space_path = out_dir.join(format!("{name}.space"));
            let index_path = out_dir.join(format!("{name}.index.json"));
            write_atomic(&space_path, &format_space(&config.space, format)?)?;
            write_atomic(&index_path, &to_json(&config.index)?)?;
            println!("wrote {}", space_path.display());
            println!("wrote {}", index_path.display());
            let report = verify_m_configuration(&config.space, &config.index);
            println!("attempts: {}", config.attempts);
            println!("m-configuration valid: {}", report.is_valid());
            Ok(verdict(report.is_valid()))
        }
        AdversaryCommand::LowerBound {
            m,
            b,
            mode,
            dim,
            seed,
            max_attempts,
            out_dir,
            name,
        } => {
            let seed = match mode {
                Mode::Matrix => 0,
                Mode::Euclidean => resolve_seed(seed),
            };
            let inst = build_lower_bound_instance(m, b, lower_bound_mode(mode, dim, seed, max_attempts))?;
            let format = match mode {
                Mode::Matrix => SpaceFormat::Matrix,
                Mode::Euclidean => SpaceFormat::Coordinates,
            };
            let space_path = out_dir.join(format!("{name}.space"));
            write_atomic(&space_path, &format_space(&inst.space, format)?)?;
            println!("wrote {}", space_path.display());
            let index = serde_json::json!({ "x": inst.x, "z": inst.z, "s": inst.s, "t": inst.t, "j1": inst.j1, "j2": inst.j2 });
            let index_path = out_dir.join(format!("{name}.index.json"));
            write_atomic(&index_path, &to_json(&index)?)?;
            println!("wrote {}", index_path.display());
            let protocol_path = out_dir.join(format!("{name}.protocol.json"));
            write_atomic(&protocol_path, &to_json(&inst.sequences)?)?;
            println!("wrote {}", protocol_path.display());
            let mut ok = true;
            for (which, seq) in inst.sequences.iter().enumerate() {
                let path = out_dir.join(format!("{name}.{}.clustering", seq.name));
                write_atomic(&path, &seq.planted.to_text())?;
                println!("wrote {}", path.display());
                let found = enumerate_nice_clusterings(&inst.sequence_space(which), 3, 2).unwrap_or_default();
                let unique = found.len() == 1 && found[0].same_partition(&seq.planted);
                ok &= unique;
                println!(
                    "sequence {}: {} items, unique nice 3-clustering: {unique}, x's together: {}",
                    seq.name,
                    seq.items.len(),
                    seq.x_together
                );
            }
            println!("min cross distance: {}", inst.min_cross_distance);
            Ok(verdict(ok && inst.sequences[0].x_together != inst.sequences[1].x_together))
        }
        AdversaryCommand::KmeansBadcase { budget, seed, out } => {
            let seed = resolve_seed(seed);
            let w = find_kmeans_badcase(seed, budget)?;
            emit(out.as_deref(), &to_json(&w)?)?;
            if let Some(p) = &out {
                println!("wrote {}", p.display());
            }
            println!("family: {}, candidates tried: {}", w.family, w.attempts);
            println!("perfect: {}", is_perfect(&w.space(), &w.perfect));
            println!("strict optimum over 7 bipartitions: {}", w.perfect_is_strict_optimum());
            println!("ordering failures: {}/{}", w.failures(), w.traces.len());
            Ok(ExitCode::SUCCESS)
        }
        AdversaryCommand::LineOrdering {
            space,
            clustering,
            l,
            budget,
            seed,
            out,
            certificate,
        } => {
            let seed = resolve_seed(seed);
            let space = load_space(&space, false)?;
            let planted = load_clustering(&clustering)?;
            require_covers(&space, &planted, "clustering")?;
            let cert = adversarial_line_ordering(&space, &planted, l, seed, budget)?;
            write_atomic(&out, &cert.ordering.to_text())?;
            println!("wrote {}", out.display());
            if let Some(p) = &certificate {
                write_atomic(p, &to_json(&cert)?)?;
                println!("wrote {}", p.display());
            }
            println!("strategy: {}, orderings tried: {}", cert.strategy, cert.attempts);
            println!("final centers: {:?}", cert.final_centers);
            println!(
                "refines planted: false (items {} and {} merged)",
                cert.violation.0, cert.violation.1
            );
            println!("replays: {}", cert.replays(&space, &planted)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_experiment(a: ExperimentArgs) -> Result<ExitCode> {
    let seed = resolve_seed(a.seed);
    let class = a.class.unwrap_or(match a.alg {
        ExperimentAlgorithm::SeqLMeans => GeneratorClass::ConvexNice,
        ExperimentAlgorithm::Subsample => GeneratorClass::Core,
    });
    let n = a.n.unwrap_or(match class {
        GeneratorClass::Core => 150,
        _ => 90,
    });
    let mut spec = GeneratorSpec::new(class, a.k, n, a.dim, derive_seed(seed, Stream::Generation, 0));
    spec.beta = a.beta.or((class == GeneratorClass::Core).then_some(0.2));
    let ordering = match a.order.as_str() {
        "random" => OrderingMode::Random,
        "cluster-sorted" | "adversarial" => OrderingMode::ClusterSorted,
        other => match other.strip_prefix("file:") {
            Some(path) => OrderingMode::Fixed(load_ordering(Path::new(path))?),
            None => bail!("unknown ordering `{other}` (random, cluster-sorted, adversarial, file:<path>)"),
        },
    };
    let base = ExperimentConfig {
        algorithm: a.alg,
        spec,
        l: a.l[0],
        trials: a.trials,
        ordering,
        seed: derive_seed(seed, Stream::Algorithm, 0),
    };
    // Reject hypothesis violations before spending time on generation.
    check_hypotheses(&base)?;
    let instance = generate(&base.spec)?;
    let reports: Vec<ExperimentReport> = a
        .l
        .iter()
        .map(|&l| run_on_instance(&ExperimentConfig { l, ..base.clone() }, &instance))
        .collect::<Result<_, _>>()?;
    let body = match a.format {
        ReportFormat::Csv => to_csv(&reports)?,
        ReportFormat::Json if reports.len() == 1 => to_json(&reports[0])?,
        ReportFormat::Json => to_json(&reports)?,
    };
    emit(a.out.as_deref(), &body)?;
    if let Some(p) = &a.out {
        println!("wrote {}", p.display());
    }
    for r in &reports {
        eprintln!(
            "l={}: rate {:.4} ({}/{}), bound {:.5}, threshold {:.5}, beta {:.4}{} -> {}",
            r.l,
            r.rate,
            r.successes,
            r.trials,
            r.bound,
            r.threshold,
            r.beta,
            if r.l_below_k { " (l < k)" } else { "" },
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    Ok(verdict(reports.iter().all(|r| r.passed)))
}

fn cmd_verify_all(a: VerifyArgs) -> Result<ExitCode> {
    let ids = a.criteria.unwrap_or_else(|| (1..=11).collect());
    if let Some(bad) = ids.iter().find(|&&i| !(1..=11).contains(&i)) {
        bail!("no criterion {bad} (1 to 11)");
    }
    let results: Vec<_> = ids.iter().map(|&id| run_criterion(id, a.seed)).collect();
    let summary = render_summary(a.seed, &results);
    print!("{summary}");
    if let Some(p) = &a.out {
        write_atomic(p, &summary).context("writing summary")?;
    }
    Ok(verdict(results.iter().all(|r| r.passed)))
}

/// 3 for infeasible generation or an exhausted budget, 2 otherwise.
fn error_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(h) = cause.downcast_ref::<HarnessError>() {
            if matches!(
                h,
                HarnessError::Infeasible { .. } | HarnessError::Adversary(AdversaryError::BudgetExhausted { .. })
            ) {
                return 3;
            }
        }
        if let Some(AdversaryError::BudgetExhausted { .. }) = cause.downcast_ref::<AdversaryError>() {
            return 3;
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Run(a) => cmd_run(a),
        Command::Check { what } => cmd_check(what),
        Command::Adversary { kind } => cmd_adversary(kind),
        Command::Experiment(a) => cmd_experiment(a),
        Command::VerifyAll(a) => cmd_verify_all(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}

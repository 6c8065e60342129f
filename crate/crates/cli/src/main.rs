use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use n1l::archive::StageArchive;
use n1l::search::{run_bounded_search, run_search_with, BoundedParams, SearchLimits, StageReport};
use n1l::{gf2, validity, Canonicalizer, Configuration, Error, SubgroupTable};

#[derive(Parser)]
#[command(name = "n1l", version, about = "Enumerate and verify N1L' configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Staged isomorph-free search; writes the counts grid as TSV.
    Search {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=64))]
        max_rows: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..=64))]
        max_cols: u64,
        /// Store every N1' configuration, not only N1L' ones.
        #[arg(long)]
        no_n1l_filter: bool,
        /// Worker threads (default: available parallelism).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        threads: Option<u64>,
        /// Counts TSV path (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory receiving one archive per stage (`stage-<r>.n1la`).
        #[arg(long)]
        archive_dir: Option<PathBuf>,
        /// Run manifest path (default: `<out>.manifest.json` or `n1l-manifest.json`).
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Use the weight-grouped signature canonicalization.
        #[arg(long)]
        grouped_signatures: bool,
        /// Abort a stage that would hold more classes than this.
        #[arg(long)]
        capacity: Option<usize>,
    },
    /// Bounded extension search from a stage archive; writes `r, cMinUpperBound`.
    BoundedSearch {
        /// Seed stage archive.
        #[arg(long)]
        archive: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=64))]
        max_rows: u64,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(3..=64))]
        max_cols: u64,
        /// Fresh columns allowed per added row.
        #[arg(long, default_value_t = 2)]
        max_new_cols: usize,
        /// Number of smallest column counts kept as parents; 0 keeps all.
        #[arg(long, default_value_t = 2)]
        keep: usize,
        #[arg(long)]
        capacity: Option<usize>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        threads: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Check a configuration file and report its code parameters.
    Verify { file: PathBuf },
    /// Print the canonical form of a configuration and its key digest.
    Canon {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write `m` diagonal copies of a configuration.
    Replicate {
        file: PathBuf,
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the S4 subgroup and coset census.
    Stats,
}

#[derive(Serialize)]
struct StageEntry {
    rows: usize,
    parents: usize,
    extensions: u64,
    classes: usize,
    counts_by_cols: Vec<(usize, u64)>,
    seconds: f64,
}

impl From<&StageReport> for StageEntry {
    fn from(r: &StageReport) -> Self {
        StageEntry {
            rows: r.rows,
            parents: r.parents,
            extensions: r.extensions,
            classes: r.classes,
            counts_by_cols: r.counts_by_cols.iter().map(|(&c, &n)| (c, n)).collect(),
            seconds: r.duration.as_secs_f64(),
        }
    }
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    max_rows: usize,
    max_cols: usize,
    mode: String,
    n1l_filter: bool,
    threads: usize,
    outputs: Vec<String>,
    started_unix: u64,
    finished_unix: u64,
    stages: Vec<StageEntry>,
    status: String,
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn pool(threads: Option<u64>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n as usize);
    }
    Ok(b.build()?)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn manifest_path(manifest: Option<PathBuf>, out: Option<&Path>) -> PathBuf {
    manifest.unwrap_or_else(|| match out {
        Some(p) => {
            let mut s = p.as_os_str().to_owned();
            s.push(".manifest.json");
            PathBuf::from(s)
        }
        None => PathBuf::from("n1l-manifest.json"),
    })
}

fn read_config(path: &Path) -> Result<Configuration> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    n1l::parse_text(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Search {
            max_rows,
            max_cols,
            no_n1l_filter,
            threads,
            out,
            archive_dir,
            manifest,
            grouped_signatures,
            capacity,
        } => {
            let limits = SearchLimits {
                n1l_filter: !no_n1l_filter,
                grouped_signatures,
                stage_capacity: capacity,
                ..SearchLimits::new(max_rows as usize, max_cols as usize)
            };
            let pool = pool(threads)?;
            if let Some(dir) = &archive_dir {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            let started = unix_now();
            let clock = Instant::now();
            let mut outputs: Vec<String> = out.iter().map(|p| p.display().to_string()).collect();
            let result = pool.install(|| {
                run_search_with(&limits, |archive, _| {
                    if let Some(dir) = &archive_dir {
                        let path = dir.join(format!("stage-{}.n1la", archive.rows()));
                        archive.save(&path)?;
                        outputs.push(path.display().to_string());
                    }
                    Ok(())
                })
            });
            let (table, stages, status) = match result {
                Ok(outcome) => (outcome.table, outcome.stages, "complete".to_string()),
                Err(Error::StageOverflow { rows, capacity, completed }) => {
                    log::error!("stage r={rows} exceeded its capacity of {capacity} classes");
                    (*completed, Vec::new(), format!("overflow at r={rows}"))
                }
                Err(e) => return Err(e.into()),
            };
            write_output(out.as_deref(), &table.to_tsv())?;
            let record = RunManifest {
                command: "search".into(),
                max_rows: limits.max_rows,
                max_cols: limits.max_cols,
                mode: "full".into(),
                n1l_filter: limits.n1l_filter,
                threads: pool.current_num_threads(),
                outputs,
                started_unix: started,
                finished_unix: unix_now(),
                stages: stages.iter().map(StageEntry::from).collect(),
                status: status.clone(),
            };
            let mpath = manifest_path(manifest, out.as_deref());
            std::fs::write(&mpath, serde_json::to_string_pretty(&record)?)
                .with_context(|| format!("writing {}", mpath.display()))?;
            log::info!("search finished in {:.2?}", clock.elapsed());
            if status != "complete" {
                anyhow::bail!(RuntimeFailure(status));
            }
            Ok(())
        }
        Command::BoundedSearch {
            archive,
            max_rows,
            max_cols,
            max_new_cols,
            keep,
            capacity,
            threads,
            out,
            manifest,
        } => {
            let seed = StageArchive::load(&archive).with_context(|| format!("loading {}", archive.display()))?;
            let params = BoundedParams {
                max_new_cols_per_step: max_new_cols,
                keep_c_min_count: (keep > 0).then_some(keep),
            };
            let limits = SearchLimits {
                stage_capacity: capacity,
                ..SearchLimits::bounded(max_rows as usize, max_cols as usize, params)
            };
            let pool = pool(threads)?;
            let started = unix_now();
            let outcome = pool.install(|| run_bounded_search(&limits, &seed))?;
            write_output(out.as_deref(), &outcome.to_tsv())?;
            let status = match &outcome.aborted {
                Some(msg) => format!("aborted: {msg}"),
                None => "complete".into(),
            };
            let record = RunManifest {
                command: "bounded-search".into(),
                max_rows: limits.max_rows,
                max_cols: limits.max_cols,
                mode: format!("bounded(new_cols={max_new_cols}, keep={keep})"),
                n1l_filter: true,
                threads: pool.current_num_threads(),
                outputs: out.iter().map(|p| p.display().to_string()).collect(),
                started_unix: started,
                finished_unix: unix_now(),
                stages: outcome.stages.iter().map(StageEntry::from).collect(),
                status,
            };
            let mpath = manifest_path(manifest, out.as_deref());
            std::fs::write(&mpath, serde_json::to_string_pretty(&record)?)?;
            if let Some(msg) = outcome.aborted {
                eprintln!("memory exhaustion: {msg}");
            }
            Ok(())
        }
        Command::Verify { file } => {
            let cfg = read_config(&file)?;
            verify(&cfg);
            Ok(())
        }
        Command::Canon { file, out } => {
            let cfg = read_config(&file)?;
            let mut canon = Canonicalizer::default();
            let form = canon.canonical_form(&cfg)?;
            let key = form.key();
            let mut text = n1l::serialize_text(&form);
            text.push_str(&format!("# key {}\n# digest {:016x}\n", key.hex(), key.digest()));
            write_output(out.as_deref(), &text)
        }
        Command::Replicate { file, m, out } => {
            let cfg = read_config(&file)?;
            let rep = cfg.replicate(m as usize)?;
            write_output(out.as_deref(), &n1l::serialize_text(&rep))
        }
        Command::Stats => {
            let table = SubgroupTable::get();
            println!("subgroups: {}, cosets: {}", table.subgroup_count(), table.coset_count());
            for (order, n) in table.census() {
                println!("order {order}: {n}");
            }
            Ok(())
        }
    }
}

fn verify(cfg: &Configuration) {
    let yes = |b: bool| if b { "pass" } else { "FAIL" };
    let weights_ok = cfg.rows().iter().all(|r| r.count_ones() == 3);
    let used = cfg.rows().iter().fold(0u64, |a, &r| a | r);
    let no_zero = used == n1l::config::col_mask(cfg.cols());
    println!("rows: {}  cols: {}  parts: {:?}", cfg.row_count(), cfg.cols(), cfg.partition().sizes());
    println!("row weight 3: {}", yes(weights_ok));
    println!("no zero column: {}", yes(no_zero));
    println!("classes disjoint: {}", yes(validity::check_part_disjointness(cfg)));
    println!("partial linear space: {}", yes(validity::check_partial_linear_space(cfg)));
    let valid = validity::is_valid_n1_prime(cfg);
    println!("N1': {valid}");
    if !valid {
        if let Some(v) = validity::first_violation(cfg) {
            println!("first violation: {v}");
        }
        return;
    }
    let emb = gf2::embed(cfg).expect("validated");
    match gf2::span_min_weight(&emb.generators()) {
        Ok(report) => {
            println!("N1L: {}", report.min_weight == 5);
            println!("min weight: {}", report.min_weight);
            println!("rank: {}", report.rank);
            println!("witness: {}", gf2::describe_word(cfg.cols(), &report.witness));
            let goodness = gf2::goodness_measure(cfg.cols() + 5, report.rank).expect("rank <= length");
            println!("goodness: {goodness}");
        }
        Err(e) => println!("span: {e}"),
    }
}

#[derive(Debug)]
struct RuntimeFailure(String);

impl std::fmt::Display for RuntimeFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for RuntimeFailure {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp_secs()
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

//! Command-line driver: query answering, split-variant benchmarking,
//! synthetic ontology generation, and consistency checking.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use metaql::bench::{admissible_runs, bench, BenchOptions, BenchReport};
use metaql::generate::{generate, GenConfig};
use metaql::hybrid::{consistency_check, run_pipeline, PipelineOptions, QueryFn, RunStats};
use metaql::model::AnswerTable;
use metaql::partition::Variant;
use metaql::{parse_ontology, parse_query, Error};

#[derive(Parser)]
#[command(name = "metaql", version, about = "Meta-querying over OWL 2 QL ontologies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Answer a SPARQL query and write the result table as CSV.
    Query(QueryArgs),
    /// Run every admissible variant over one fixture and compare answers.
    Bench(BenchArgs),
    /// Emit a seeded synthetic ontology.
    Generate(GenerateArgs),
    /// Parse an ontology and check its consistency.
    Check(CheckArgs),
}

#[derive(Args)]
struct QueryArgs {
    /// Ontology file.
    #[arg(long)]
    ontology: PathBuf,
    /// Query file (SPARQL SELECT).
    #[arg(long)]
    query: PathBuf,
    /// Split variant: e-at, a-t, nat-cat, or nat-cact.
    #[arg(long, default_value = "e-at")]
    variant: Variant,
    /// Import interface: all or mod.
    #[arg(long, default_value = "all")]
    query_fn: QueryFn,
    /// Magic-sets rewriting: on or off.
    #[arg(long, default_value = "off")]
    magic: Switch,
    /// Derive class subsumptions reflexively: on or off.
    #[arg(long, default_value = "off")]
    subsumption_reflexivity: Switch,
    /// Write the answer CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write run statistics as JSON to this file.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Abort evaluation after this many seconds.
    #[arg(long)]
    timeout_secs: Option<u64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Ontology file.
    #[arg(long)]
    ontology: PathBuf,
    /// Query file (SPARQL SELECT).
    #[arg(long)]
    query: PathBuf,
    /// Magic-sets rewriting for every run: on or off.
    #[arg(long, default_value = "off")]
    magic: Switch,
    /// Derive class subsumptions reflexively: on or off.
    #[arg(long, default_value = "off")]
    subsumption_reflexivity: Switch,
    /// Per-run evaluation budget in seconds.
    #[arg(long)]
    timeout_secs: Option<u64>,
    /// Evaluate the runs on separate threads.
    #[arg(long)]
    parallel: bool,
    /// Write the report CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 10)]
    num_classes: usize,
    #[arg(long, default_value_t = 4)]
    num_properties: usize,
    #[arg(long, default_value_t = 20)]
    num_individuals: usize,
    #[arg(long, default_value_t = 15)]
    num_tbox: usize,
    #[arg(long, default_value_t = 30)]
    num_abox: usize,
    /// Probability that an assertion reuses a class name as an individual.
    #[arg(long, default_value_t = 0.0)]
    meta_probability: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the ontology here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Ontology file.
    #[arg(long)]
    ontology: PathBuf,
}

/// An on/off flag value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Switch {
    On,
    Off,
}

impl std::str::FromStr for Switch {
    type Err = String;

    fn from_str(s: &str) -> Result<Switch, String> {
        match s.to_ascii_lowercase().as_str() {
            "on" => Ok(Switch::On),
            "off" => Ok(Switch::Off),
            other => Err(format!("expected on or off, got {other:?}")),
        }
    }
}

impl From<Switch> for bool {
    fn from(s: Switch) -> bool {
        s == Switch::On
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Query(args) => cmd_query(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Check(args) => cmd_check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            match err {
                Error::Inconsistent => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn cmd_query(args: QueryArgs) -> Result<(), Error> {
    let started = Instant::now();
    let ontology = parse_ontology(&read(&args.ontology)?)?;
    let query = parse_query(&read(&args.query)?)?;
    let parse_millis = started.elapsed().as_millis() as u64;

    let opts = PipelineOptions {
        variant: args.variant,
        query_fn: args.query_fn,
        magic: args.magic.into(),
        subsumption_reflexivity: args.subsumption_reflexivity.into(),
        deadline: args
            .timeout_secs
            .map(|secs| Instant::now() + Duration::from_secs(secs)),
    };
    let (table, mut stats) = run_pipeline(&ontology, &query, &opts)?;
    if stats.timed_out {
        return Err(Error::Config(format!(
            "evaluation exceeded the {}-second budget",
            args.timeout_secs.unwrap_or(0)
        )));
    }
    stats.parse_millis = parse_millis;

    let csv = answers_csv(&table)?;
    match &args.out {
        Some(path) => write_out(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.stats {
        write_out(path, &stats_json(&stats)?)?;
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Error> {
    let ontology = parse_ontology(&read(&args.ontology)?)?;
    let query = parse_query(&read(&args.query)?)?;
    if !consistency_check(&ontology) {
        return Err(Error::Inconsistent);
    }
    let opts = BenchOptions {
        timeout: args.timeout_secs.map(Duration::from_secs),
        subsumption_reflexivity: args.subsumption_reflexivity.into(),
        parallel: args.parallel,
        fault: None,
    };
    let report = bench(&ontology, &query, &admissible_runs(args.magic.into()), &opts)?;
    let csv = bench_csv(&report)?;
    match &args.out {
        Some(path) => write_out(path, &csv)?,
        None => print!("{csv}"),
    }
    let completed = report.rows.iter().filter(|r| !r.stats.timed_out).count();
    eprintln!(
        "{} runs, {} completed, {} answer-set mismatches",
        report.rows.len(),
        completed,
        report.mismatches().len()
    );
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Error> {
    let cfg = GenConfig {
        num_classes: args.num_classes,
        num_properties: args.num_properties,
        num_individuals: args.num_individuals,
        num_tbox: args.num_tbox,
        num_abox: args.num_abox,
        meta_probability: args.meta_probability,
        seed: args.seed,
    };
    let text = generate(&cfg)?;
    match &args.out {
        Some(path) => write_out(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_check(args: CheckArgs) -> Result<(), Error> {
    let ontology = parse_ontology(&read(&args.ontology)?)?;
    if consistency_check(&ontology) {
        println!("consistent");
        Ok(())
    } else {
        Err(Error::Inconsistent)
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn write_out(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn answers_csv(table: &AnswerTable) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(table.header()).map_err(csv_err)?;
    for row in table.rows() {
        w.write_record(row.iter().map(|iri| iri.as_str()))
            .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn bench_csv(report: &BenchReport) -> Result<String, Error> {
    let mismatches = report.mismatches();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "variant",
        "queryFn",
        "magic",
        "timedOut",
        "splitMillis",
        "lmeMillis",
        "tauMillis",
        "importMillis",
        "evalMillis",
        "factsIn",
        "factsDerived",
        "answerCount",
        "mismatch",
    ])
    .map_err(csv_err)?;
    for (idx, row) in report.rows.iter().enumerate() {
        let s = &row.stats;
        w.write_record([
            row.run.variant.as_str(),
            row.run.query_fn.as_str(),
            &row.run.magic.to_string(),
            &s.timed_out.to_string(),
            &s.split_millis.to_string(),
            &s.lme_millis.to_string(),
            &s.tau_millis.to_string(),
            &s.import_millis.to_string(),
            &s.eval_millis.to_string(),
            &s.facts_in.to_string(),
            &s.facts_derived.to_string(),
            &s.answer_count.to_string(),
            &mismatches.contains(&idx).to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Config(format!("csv serialization: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, Error> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Config(format!("csv buffering: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StatsJson<'a> {
    variant: &'a str,
    query_fn: &'a str,
    magic: bool,
    parse_millis: u64,
    split_millis: u64,
    lme_millis: u64,
    tau_millis: u64,
    import_millis: u64,
    eval_millis: u64,
    facts_in: usize,
    facts_derived: usize,
    answer_count: usize,
}

fn stats_json(stats: &RunStats) -> Result<String, Error> {
    let json = StatsJson {
        variant: stats.variant.as_str(),
        query_fn: stats.query_fn.as_str(),
        magic: stats.magic,
        parse_millis: stats.parse_millis,
        split_millis: stats.split_millis,
        lme_millis: stats.lme_millis,
        tau_millis: stats.tau_millis,
        import_millis: stats.import_millis,
        eval_millis: stats.eval_millis,
        facts_in: stats.facts_in,
        facts_derived: stats.facts_derived,
        answer_count: stats.answer_count,
    };
    serde_json::to_string_pretty(&json)
        .map(|s| s + "\n")
        .map_err(|e| Error::Config(format!("stats serialization: {e}")))
}

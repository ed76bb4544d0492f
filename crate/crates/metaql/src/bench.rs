//! Variant benchmarking: run one ontology and query through many
//! (variant, query function, magic) settings, time each phase, and
//! cross-check that every completed run produced the same answers.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crate::datalog::Rule;
use crate::hybrid::{assemble, run, QueryFn, RunStats};
use crate::model::{AnswerTable, Ontology, Query};
use crate::partition::Variant;
use crate::Error;

/// One benchmark setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchRun {
    pub variant: Variant,
    pub query_fn: QueryFn,
    pub magic: bool,
}

/// The seven admissible (variant, query function) combinations at a fixed
/// magic setting, in a stable order.
pub fn admissible_runs(magic: bool) -> Vec<BenchRun> {
    let mut runs = Vec::new();
    for variant in Variant::ALL {
        for query_fn in QueryFn::ALL {
            if crate::hybrid::admissible(variant, query_fn) {
                runs.push(BenchRun { variant, query_fn, magic });
            }
        }
    }
    runs
}

/// Knobs shared by every run of one benchmark.
#[derive(Clone, Copy, Default)]
pub struct BenchOptions<'a> {
    /// Per-run wall-clock budget; runs that exceed it are flagged, not
    /// failed.
    pub timeout: Option<Duration>,
    pub subsumption_reflexivity: bool,
    /// Evaluate runs on one thread each instead of sequentially.
    pub parallel: bool,
    /// Fault-injection hook for mutation testing: rules of run `i` for
    /// which `fault(i, rule)` returns false are dropped before evaluation.
    pub fault: Option<&'a (dyn Fn(usize, &Rule) -> bool + Sync)>,
}

/// What one run produced: its timings plus the answers, kept so the report
/// can cross-check them.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub run: BenchRun,
    pub stats: RunStats,
    pub answers: AnswerTable,
}

/// All rows of one benchmark, in input order.
#[derive(Clone, Debug)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// Indices of completed rows whose answer set differs from the first
    /// completed row's. Timed-out rows are not comparable and never listed.
    pub fn mismatches(&self) -> BTreeSet<usize> {
        let mut completed = self.rows.iter().enumerate().filter(|(_, r)| !r.stats.timed_out);
        let Some((_, baseline)) = completed.next() else {
            return BTreeSet::new();
        };
        completed
            .filter(|(_, r)| !r.answers.same_rows(&baseline.answers))
            .map(|(i, _)| i)
            .collect()
    }
}

fn run_one(
    o: &Ontology,
    q: &Query,
    idx: usize,
    bench_run: BenchRun,
    opts: &BenchOptions,
) -> Result<BenchRow, Error> {
    let mut k = assemble(o, q, bench_run.variant, bench_run.query_fn, opts.subsumption_reflexivity)?;
    if let Some(fault) = opts.fault {
        k.rules.rules.retain(|r| fault(idx, r));
    }
    let deadline = opts.timeout.map(|t| Instant::now() + t);
    let outcome = run(&k, bench_run.magic, deadline);
    let stats = RunStats {
        variant: bench_run.variant,
        query_fn: bench_run.query_fn,
        magic: bench_run.magic,
        parse_millis: 0,
        split_millis: k.timings.split_millis,
        lme_millis: k.timings.lme_millis,
        tau_millis: k.timings.tau_millis,
        import_millis: outcome.import_millis,
        eval_millis: outcome.eval_millis,
        facts_in: outcome.facts_in,
        facts_derived: outcome.facts_derived,
        answer_count: outcome.table.len(),
        timed_out: outcome.timed_out,
    };
    Ok(BenchRow { run: bench_run, stats, answers: outcome.table })
}

/// Runs every setting over the same ontology and query. Assumes the caller
/// already gated on consistency. Fails only on configuration errors
/// (inadmissible combinations); timeouts are recorded per row.
pub fn bench(
    o: &Ontology,
    q: &Query,
    runs: &[BenchRun],
    opts: &BenchOptions,
) -> Result<BenchReport, Error> {
    let rows = if opts.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = runs
                .iter()
                .enumerate()
                .map(|(i, &r)| s.spawn(move || run_one(o, q, i, r, opts)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("bench worker panicked"))
                .collect::<Result<Vec<_>, _>>()
        })?
    } else {
        runs.iter()
            .enumerate()
            .map(|(i, &r)| run_one(o, q, i, r, opts))
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(BenchReport { rows })
}

//! Assembly and evaluation of hybrid knowledge bases.
//!
//! A split ontology becomes a Datalog program plus an oracle: the Datalog
//! side is encoded into facts, the ontology side stays behind an import
//! interface that exposes its entailed facts for the imported class and
//! property symbols. Evaluating the program over the encoded facts together
//! with the imports answers the query.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::datalog::{
    answers, evaluate, evaluate_with_deadline, magic_transform, Atom, EvalStats, FactStore,
    GroundAtom, Program, Term,
};
use crate::encode::{
    encode_axiom, encode_ontology, encode_query, inference_rules, interface_spec,
    vocabulary_facts, ImportSpec, INCONSIST, INSTC, INSTR, INTERFACE_PREDICATES, QUERY,
};
use crate::locality::extract_module;
use crate::model::{
    signature_of_ontology, signature_of_query, AnswerTable, Axiom, Iri, Ontology, Query,
};
use crate::partition::{split, Variant};
use crate::Error;

/// How much the hybrid side imports from the ontology side: everything its
/// signature offers, or only what a locality-based module of it keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryFn {
    All,
    Mod,
}

impl QueryFn {
    pub const ALL: [QueryFn; 2] = [QueryFn::All, QueryFn::Mod];

    pub fn as_str(self) -> &'static str {
        match self {
            QueryFn::All => "all",
            QueryFn::Mod => "mod",
        }
    }
}

impl fmt::Display for QueryFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QueryFn {
    type Err = String;

    fn from_str(s: &str) -> Result<QueryFn, String> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(QueryFn::All),
            "mod" => Ok(QueryFn::Mod),
            other => Err(format!("unknown query function {other:?}: expected all or mod")),
        }
    }
}

/// Every variant admits `all`; `mod` extracts a module from the ontology
/// side, which `e-at` does not have.
pub fn admissible(variant: Variant, query_fn: QueryFn) -> bool {
    !(variant == Variant::EAt && query_fn == QueryFn::Mod)
}

/// The ontology side wrapped behind its entailments: the encoded axioms
/// saturated under the inference rules. Extensions read what the ontology
/// entails, not merely what it asserts.
struct SaturationOracle {
    store: FactStore,
}

impl SaturationOracle {
    fn build(o: &Ontology, deadline: Option<Instant>) -> (SaturationOracle, bool) {
        let mut base = FactStore::new();
        for fact in encode_ontology(o) {
            base.insert_fact(&fact);
        }
        let (store, _, timed_out) =
            evaluate_with_deadline(&Program::new(inference_rules(false)), base, deadline);
        (SaturationOracle { store }, timed_out)
    }

    fn class_extension(&self, c: &Iri) -> BTreeSet<Iri> {
        self.store
            .rows(INSTC)
            .filter(|row| row[0] == c.as_str())
            .map(|row| Iri::new(row[1]))
            .collect()
    }

    fn role_extension(&self, r: &Iri) -> BTreeSet<(Iri, Iri)> {
        self.store
            .rows(INSTR)
            .filter(|row| row[0] == r.as_str())
            .map(|row| (Iri::new(row[1]), Iri::new(row[2])))
            .collect()
    }

    /// Every saturation fact over the interface vocabulary that the import
    /// filter admits. Inequality facts never cross the interface.
    fn interface_facts(&self, spec: &ImportSpec) -> Vec<GroundAtom> {
        let mut out = Vec::new();
        for shape in INTERFACE_PREDICATES {
            for row in self.store.rows(shape.name) {
                if spec.admits(shape, &row) {
                    out.push(GroundAtom::new(
                        shape.name,
                        row.iter().map(|s| s.to_string()).collect(),
                    ));
                }
            }
        }
        out
    }
}

/// The individuals `o` entails to be members of the class `c`.
pub fn oracle_class_extension(o: &Ontology, c: &Iri) -> BTreeSet<Iri> {
    SaturationOracle::build(o, None).0.class_extension(c)
}

/// The facts the ontology side contributes: its entailed interface facts,
/// filtered by the import signature.
pub fn import_facts(k: &HybridKB) -> Vec<GroundAtom> {
    import_facts_with_deadline(k, None).0
}

fn import_facts_with_deadline(k: &HybridKB, deadline: Option<Instant>) -> (Vec<GroundAtom>, bool) {
    if k.onto_side.is_empty() {
        return (Vec::new(), false);
    }
    let (oracle, timed_out) = SaturationOracle::build(&k.onto_side, deadline);
    (oracle.interface_facts(&k.imports), timed_out)
}

/// The pairs `o` entails to be linked by the property `r`.
pub fn oracle_role_extension(o: &Ontology, r: &Iri) -> BTreeSet<(Iri, Iri)> {
    SaturationOracle::build(o, None).0.role_extension(r)
}

/// Whether the ontology has a model. An explicit self-inequality or a
/// derivable clash (disjointness or irreflexivity violation) makes every
/// tuple a certain answer, so callers gate on this before answering.
pub fn consistency_check(o: &Ontology) -> bool {
    if o.abox().iter().any(|a| matches!(a, Axiom::Diff(x, y) if x == y)) {
        return false;
    }
    let mut base = FactStore::new();
    for fact in encode_ontology(o) {
        base.insert_fact(&fact);
    }
    let (store, _) = evaluate(&Program::new(inference_rules(false)), base);
    !store.contains(INCONSIST, &[])
}

/// Wall time spent in each assembly phase, in milliseconds.
#[derive(Clone, Copy, Debug, Default)]
pub struct PhaseTimings {
    pub split_millis: u64,
    pub lme_millis: u64,
    pub tau_millis: u64,
}

/// A split ontology ready for evaluation. The Datalog side is encoded into
/// `base_facts`; the ontology side stays behind the import interface given
/// by `imports`.
#[derive(Clone, Debug)]
pub struct HybridKB {
    pub variant: Variant,
    pub query_fn: QueryFn,
    pub onto_side: Ontology,
    /// The inference rules plus exactly one rule whose head is the query
    /// predicate.
    pub rules: Program,
    /// Encoded Datalog-side axioms plus the vocabulary facts of the whole
    /// input ontology.
    pub base_facts: Vec<GroundAtom>,
    /// Class and property symbols whose ontology-side facts cross over.
    /// Always a subset of the ontology side's signature.
    pub imports: ImportSpec,
    pub query_header: Vec<String>,
    pub timings: PhaseTimings,
}

/// Splits the ontology, encodes the Datalog side, wires in the query rule,
/// and fixes the import signature: the whole ontology-side signature under
/// `all`, the signature of a locality-based module seeded with the query's
/// symbols under `mod`. `e-at` keeps every axiom on the Datalog side and
/// imports nothing.
pub fn assemble(
    o: &Ontology,
    query: &Query,
    variant: Variant,
    query_fn: QueryFn,
    subsumption_reflexivity: bool,
) -> Result<HybridKB, Error> {
    if !admissible(variant, query_fn) {
        return Err(Error::Config(format!(
            "query function `{query_fn}` needs an ontology side, \
             but variant `{variant}` keeps every axiom on the datalog side"
        )));
    }

    let t = Instant::now();
    let partition = split(o, variant);
    let split_millis = t.elapsed().as_millis() as u64;

    let t = Instant::now();
    let imports = match (variant, query_fn) {
        (Variant::EAt, _) => ImportSpec::default(),
        (_, QueryFn::All) => {
            interface_spec(&signature_of_ontology(&partition.onto_side), &partition.onto_side)
        }
        (_, QueryFn::Mod) => {
            let seed = signature_of_query(query, o);
            let module = extract_module(&seed, &partition.onto_side);
            interface_spec(&module.final_signature, &partition.onto_side)
        }
    };
    let lme_millis = t.elapsed().as_millis() as u64;

    let t = Instant::now();
    let mut base_facts: Vec<GroundAtom> =
        partition.datalog_side.axioms().map(encode_axiom).collect();
    base_facts.extend(vocabulary_facts(o.vocab()));
    let mut rules = inference_rules(subsumption_reflexivity);
    rules.push(encode_query(query));
    let mut program = Program::new(rules);
    program.query_pred = Some(QUERY.to_string());
    let tau_millis = t.elapsed().as_millis() as u64;

    Ok(HybridKB {
        variant,
        query_fn,
        onto_side: partition.onto_side,
        rules: program,
        base_facts,
        imports,
        query_header: query.select_vars().to_vec(),
        timings: PhaseTimings { split_millis, lme_millis, tau_millis },
    })
}

/// What one evaluation produced, with the counts callers report.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub table: AnswerTable,
    /// Set when the deadline cut either the import saturation or the main
    /// evaluation short; the table is then unreliable.
    pub timed_out: bool,
    pub import_millis: u64,
    pub eval_millis: u64,
    /// Facts in the store before evaluation: encoded axioms, vocabulary,
    /// imports.
    pub facts_in: usize,
    /// Facts the fixpoint added, not counting the bookkeeping predicates of
    /// the magic transformation.
    pub facts_derived: usize,
    pub eval_stats: EvalStats,
}

/// Evaluates the hybrid knowledge base and projects the query predicate,
/// optionally routing the program through the magic transformation first.
/// Assumes the input ontology passed [`consistency_check`].
pub fn run(k: &HybridKB, magic: bool, deadline: Option<Instant>) -> RunOutcome {
    let t = Instant::now();
    let mut store = FactStore::new();
    for fact in &k.base_facts {
        store.insert_fact(fact);
    }
    let (imports, mut timed_out) = import_facts_with_deadline(k, deadline);
    for fact in &imports {
        store.insert_fact(fact);
    }
    let import_millis = t.elapsed().as_millis() as u64;
    let facts_in = store.count();

    let program = if magic {
        let goal = Atom::new(
            QUERY,
            (0..k.query_header.len()).map(|i| Term::Var(format!("G{i}"))).collect(),
        );
        magic_transform(&k.rules, &goal).expect("the query rule defines the goal")
    } else {
        k.rules.clone()
    };

    let t = Instant::now();
    let (store, eval_stats, eval_timed_out) = evaluate_with_deadline(&program, store, deadline);
    timed_out |= eval_timed_out;
    let eval_millis = t.elapsed().as_millis() as u64;

    let facts_derived = store.count_matching(|p| !p.starts_with("magic_")) - facts_in;
    let table = answers(&store, QUERY, &k.query_header);

    RunOutcome { table, timed_out, import_millis, eval_millis, facts_in, facts_derived, eval_stats }
}

/// One-call evaluation with no deadline.
pub fn answer(k: &HybridKB, magic: bool) -> AnswerTable {
    run(k, magic, None).table
}

/// Settings for one end-to-end run over a parsed ontology and query.
#[derive(Clone, Copy, Debug)]
pub struct PipelineOptions {
    pub variant: Variant,
    pub query_fn: QueryFn,
    pub magic: bool,
    pub subsumption_reflexivity: bool,
    pub deadline: Option<Instant>,
}

/// Per-phase wall times and fact counts of one run. `parse_millis` stays
/// zero here; the caller that did the parsing fills it in.
#[derive(Clone, Copy, Debug)]
pub struct RunStats {
    pub variant: Variant,
    pub query_fn: QueryFn,
    pub magic: bool,
    pub parse_millis: u64,
    pub split_millis: u64,
    pub lme_millis: u64,
    pub tau_millis: u64,
    pub import_millis: u64,
    pub eval_millis: u64,
    pub facts_in: usize,
    pub facts_derived: usize,
    pub answer_count: usize,
    pub timed_out: bool,
}

/// Checks consistency, assembles, and evaluates in one go. Fails with
/// [`Error::Inconsistent`] instead of answering over an inconsistent
/// ontology, where every tuple would be a certain answer.
pub fn run_pipeline(
    o: &Ontology,
    query: &Query,
    opts: &PipelineOptions,
) -> Result<(AnswerTable, RunStats), Error> {
    if !consistency_check(o) {
        return Err(Error::Inconsistent);
    }
    let k = assemble(o, query, opts.variant, opts.query_fn, opts.subsumption_reflexivity)?;
    let outcome = run(&k, opts.magic, opts.deadline);
    let stats = RunStats {
        variant: opts.variant,
        query_fn: opts.query_fn,
        magic: opts.magic,
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
    Ok((outcome.table, stats))
}

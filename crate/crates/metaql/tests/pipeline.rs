//! End-to-end checks of the query pipeline against the independent chase
//! oracle: saturation parity, import soundness, and cross-variant agreement
//! on randomly generated punned corpora.

use std::collections::BTreeSet;

use chase_oracle::ChaseOracle;
use metaql::bench::{admissible_runs, bench, BenchOptions};
use metaql::datalog::{evaluate, FactStore, Program};
use metaql::encode::{encode_ontology, inference_rules};
use metaql::generate::{generate_ontology, random_query, GenConfig};
use metaql::hybrid::{
    answer, assemble, consistency_check, import_facts, QueryFn,
};
use metaql::model::{Axiom, BasicConcept, Iri, Ontology};
use metaql::partition::Variant;
use metaql::{parse_ontology, parse_query, Query};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ZOO: &str = "\
Eagle isa Bird .
GoldenEagle isa Eagle .
EndangeredSpecies isa Species .
GoldenEagle(Harry) .
EndangeredSpecies(GoldenEagle) .
";

const TYPES_AND_SUBCLASSES: &str =
    "SELECT ?x ?c ?d WHERE { ?x rdf:type ?c . ?c rdfs:subClassOf ?d }";

fn small_config(seed: u64) -> GenConfig {
    GenConfig {
        num_classes: 3,
        num_properties: 2,
        num_individuals: 3,
        num_tbox: 5,
        num_abox: 3,
        meta_probability: 0.3,
        seed,
    }
}

fn saturate(o: &Ontology, subsumption_reflexivity: bool) -> FactStore {
    let mut base = FactStore::new();
    for fact in encode_ontology(o) {
        base.insert_fact(&fact);
    }
    evaluate(&Program::new(inference_rules(subsumption_reflexivity)), base).0
}

fn pairs(store: &FactStore, pred: &str) -> BTreeSet<(Iri, Iri)> {
    store.rows(pred).map(|r| (Iri::new(r[0]), Iri::new(r[1]))).collect()
}

fn triples(store: &FactStore, pred: &str) -> BTreeSet<(Iri, Iri, Iri)> {
    store.rows(pred).map(|r| (Iri::new(r[0]), Iri::new(r[1]), Iri::new(r[2]))).collect()
}

#[test]
fn golden_example_matches_the_oracle_join() {
    let o = parse_ontology(ZOO).unwrap();
    let q = parse_query(TYPES_AND_SUBCLASSES).unwrap();

    // The expected tuples, rebuilt from the oracle: memberships joined with
    // named subsumptions on the class column.
    let oracle = ChaseOracle::new(&o, false);
    let memberships = oracle.class_memberships();
    let subsumptions = oracle.named_subsumptions();
    let mut expected = BTreeSet::new();
    for (c, x) in &memberships {
        for (c2, d) in &subsumptions {
            if c == c2 {
                expected.insert(vec![x.clone(), c.clone(), d.clone()]);
            }
        }
    }
    assert_eq!(expected.len(), 4, "oracle join should give the four known tuples");

    for variant in Variant::ALL {
        for query_fn in QueryFn::ALL {
            if !metaql::hybrid::admissible(variant, query_fn) {
                continue;
            }
            let k = assemble(&o, &q, variant, query_fn, false).unwrap();
            for magic in [false, true] {
                let got: BTreeSet<Vec<Iri>> =
                    answer(&k, magic).rows().iter().cloned().collect();
                assert_eq!(got, expected, "{variant}/{query_fn} magic={magic}");
            }
        }
    }
}

#[test]
fn saturation_matches_the_oracle_on_random_corpora() {
    for seed in 0..120 {
        let o = generate_ontology(&small_config(seed)).unwrap();
        for flag in [false, true] {
            let store = saturate(&o, flag);
            let oracle = ChaseOracle::new(&o, flag);
            assert_eq!(
                pairs(&store, "instc"),
                oracle.class_memberships(),
                "instc disagrees on seed {seed}, flag {flag}"
            );
            assert_eq!(
                triples(&store, "instr"),
                oracle.role_links(),
                "instr disagrees on seed {seed}, flag {flag}"
            );
            assert_eq!(
                pairs(&store, "isacCC"),
                oracle.named_subsumptions(),
                "isacCC disagrees on seed {seed}, flag {flag}"
            );
        }
    }
}

#[test]
fn imports_are_sound_per_the_oracle() {
    for seed in 0..40 {
        let o = generate_ontology(&small_config(seed)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let q = random_query(&o, &mut rng, 3);
        for variant in [Variant::At, Variant::NatCat, Variant::NatCact] {
            for query_fn in QueryFn::ALL {
                let k = assemble(&o, &q, variant, query_fn, false).unwrap();
                let oracle = ChaseOracle::new(&k.onto_side, false);
                for fact in import_facts(&k) {
                    let a: Vec<Iri> = fact.args.iter().map(Iri::new).collect();
                    let ok = match fact.pred.as_str() {
                        "instc" => oracle.holds_instc(&a[0], &a[1]),
                        "instr" => oracle.holds_instr(&a[0], &a[1], &a[2]),
                        "isacCC" => oracle.holds_isacc(&a[0], &a[1]),
                        // The oracle only exposes checkers for these three
                        // shapes; other interface facts are covered by the
                        // saturation parity test above.
                        _ => continue,
                    };
                    assert!(ok, "seed {seed} {variant}/{query_fn}: unsound import {fact}");
                }
            }
        }
    }
}

#[test]
fn mod_imports_are_a_subset_of_all_imports() {
    for seed in 0..40 {
        let o = generate_ontology(&small_config(seed)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31));
        let q = random_query(&o, &mut rng, 3);
        for variant in [Variant::At, Variant::NatCat, Variant::NatCact] {
            let all = assemble(&o, &q, variant, QueryFn::All, false).unwrap();
            let module = assemble(&o, &q, variant, QueryFn::Mod, false).unwrap();
            let all_facts: BTreeSet<String> =
                import_facts(&all).iter().map(|f| f.to_string()).collect();
            for fact in import_facts(&module) {
                assert!(
                    all_facts.contains(&fact.to_string()),
                    "seed {seed} {variant}: mod imported {fact} beyond all"
                );
            }
        }
    }
}

/// Every combination except NAT-CACT/Mod must agree exactly with the
/// baseline on random punned corpora. NAT-CACT under Mod has a genuine
/// soundness gap (clashing assertions whose TBox chains stay on the
/// ontology side, outside the query module), so its divergences are counted
/// and reported instead of asserted away.
#[test]
fn variants_agree_on_random_corpora_with_the_gap_recorded() {
    let mut gap_runs = 0usize;
    let mut gap_witness: Option<String> = None;
    let mut total = 0usize;
    for seed in 0..30 {
        let cfg = GenConfig { num_tbox: 8, num_abox: 7, ..small_config(seed) };
        let o = generate_ontology(&cfg).unwrap();
        assert!(consistency_check(&o), "generated corpora are positive, hence consistent");
        for qseed in 0..2u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed * 100 + qseed);
            let q = random_query(&o, &mut rng, 3);
            let report =
                bench(&o, &q, &admissible_runs(qseed == 1), &BenchOptions::default()).unwrap();
            let baseline = &report.rows[0];
            assert_eq!(baseline.run.variant, Variant::EAt);
            total += 1;
            for row in &report.rows[1..] {
                let agrees = row.answers.same_rows(&baseline.answers);
                if row.run.variant == Variant::NatCact && row.run.query_fn == QueryFn::Mod {
                    if !agrees {
                        gap_runs += 1;
                        gap_witness.get_or_insert_with(|| {
                            format!(
                                "seed {seed}, query {qseed}: nat-cact/mod found {} rows, baseline {}",
                                row.answers.len(),
                                baseline.answers.len()
                            )
                        });
                    }
                } else {
                    assert!(
                        agrees,
                        "seed {seed} query {qseed}: {}/{} disagrees with the baseline",
                        row.run.variant, row.run.query_fn
                    );
                }
            }
        }
    }
    println!(
        "nat-cact/mod diverged on {gap_runs} of {total} (ontology, query) pairs{}",
        gap_witness.map(|w| format!("; first witness: {w}")).unwrap_or_default()
    );
}

#[test]
fn iri_free_queries_close_the_module_gap() {
    // With no IRIs in the query, the module seed falls back to the whole
    // signature, the module keeps every relevant chain, and even
    // NAT-CACT/Mod agrees.
    let o = parse_ontology("C isa D .\nC(m) .\nm(y) .\n").unwrap();
    let q = parse_query("SELECT ?x ?c WHERE { ?x rdf:type ?c }").unwrap();
    let report = bench(&o, &q, &admissible_runs(false), &BenchOptions::default()).unwrap();
    assert!(report.mismatches().is_empty());
    // The membership D(m) is entailed, so the baseline must carry it.
    let has = report.rows[0]
        .answers
        .rows()
        .iter()
        .any(|r| r == &vec![Iri::new("m"), Iri::new("D")]);
    assert!(has, "baseline is missing the derived membership");
}

#[test]
fn consistency_parity_with_the_oracle() {
    let fixtures = [
        "Professor disjoint Student .\nProfessor(sam) .\nStudent(sam) .\n",
        "irrefl(knows) .\nknows(a,a) .\n",
        "r disjointrole s .\nr(a,b) .\ns(a,b) .\n",
        "a != a .\n",
        "a != b .\n",
        "A isa B .\nA(x) .\n",
    ];
    for text in fixtures {
        let o = parse_ontology(text).unwrap();
        let oracle = ChaseOracle::new(&o, false);
        assert_eq!(consistency_check(&o), oracle.is_consistent(), "fixture:\n{text}");
    }

    // Random positive corpora with one injected disjointness.
    for seed in 0..40 {
        let o = generate_ontology(&small_config(seed)).unwrap();
        let mut axioms: Vec<Axiom> = o.axioms().cloned().collect();
        axioms.push(Axiom::Disj(
            BasicConcept::NamedClass(Iri::new("C0")),
            BasicConcept::NamedClass(Iri::new("C1")),
        ));
        let o = Ontology::from_axioms(axioms);
        let oracle = ChaseOracle::new(&o, false);
        assert_eq!(consistency_check(&o), oracle.is_consistent(), "seed {seed}");
    }
}

#[test]
fn answers_project_the_oracle_extension_for_single_class_queries() {
    for seed in 0..25 {
        let o = generate_ontology(&small_config(seed)).unwrap();
        let class = Iri::new("C0");
        let q: Query =
            parse_query("SELECT ?x WHERE { ?x rdf:type C0 }").unwrap();
        let oracle = ChaseOracle::new(&o, false);
        let expected: BTreeSet<Vec<Iri>> =
            oracle.class_extension(&class).into_iter().map(|x| vec![x]).collect();
        for variant in Variant::ALL {
            let k = assemble(&o, &q, variant, QueryFn::All, false).unwrap();
            let got: BTreeSet<Vec<Iri>> = answer(&k, true).rows().iter().cloned().collect();
            assert_eq!(got, expected, "seed {seed} {variant}");
        }
    }
}

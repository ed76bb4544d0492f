//! Seeded synthetic ontologies and queries, used by benchmarks and the test
//! corpora. Everything is driven by a caller-supplied seed; the same inputs
//! always produce the same output, down to the byte.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{
    Axiom, BasicConcept, Iri, Ontology, Query, QueryPred, QueryTerm, RhsConcept, RoleExpr,
    TriplePattern,
};
use crate::print_ontology;
use crate::Error;

/// Shape of a synthetic ontology: how many symbols to draw from and how many
/// axioms to aim for. `meta_probability` is the chance that an individual
/// position of an assertion reuses a class IRI, which turns that IRI into a
/// meta-element.
#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub num_classes: usize,
    pub num_properties: usize,
    pub num_individuals: usize,
    pub num_tbox: usize,
    pub num_abox: usize,
    pub meta_probability: f64,
    pub seed: u64,
}

impl GenConfig {
    fn validate(&self) -> Result<(), Error> {
        if !(0.0..=1.0).contains(&self.meta_probability) {
            return Err(Error::Config(format!(
                "meta probability {} is outside [0, 1]",
                self.meta_probability
            )));
        }
        Ok(())
    }
}

/// Classes already emitted in a class position. Punned individual positions
/// draw from this set, so every reused IRI really occurs both ways and
/// becomes a meta-element.
struct UsedClasses {
    order: Vec<usize>,
    seen: Vec<bool>,
}

impl UsedClasses {
    fn new(n: usize) -> UsedClasses {
        UsedClasses { order: Vec::new(), seen: vec![false; n] }
    }

    fn touch(&mut self, i: usize) {
        if !self.seen[i] {
            self.seen[i] = true;
            self.order.push(i);
        }
    }

    fn pick(&self, rng: &mut impl Rng) -> Option<usize> {
        if self.order.is_empty() {
            None
        } else {
            Some(self.order[rng.gen_range(0..self.order.len())])
        }
    }
}

struct Generator<'a> {
    cfg: &'a GenConfig,
    rng: ChaCha8Rng,
    classes: Vec<Iri>,
    properties: Vec<Iri>,
    individuals: Vec<Iri>,
    used: UsedClasses,
}

impl Generator<'_> {
    fn new(cfg: &GenConfig) -> Generator<'_> {
        Generator {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            classes: (0..cfg.num_classes).map(|i| Iri::new(format!("C{i}"))).collect(),
            properties: (0..cfg.num_properties).map(|i| Iri::new(format!("P{i}"))).collect(),
            individuals: (0..cfg.num_individuals).map(|i| Iri::new(format!("I{i}"))).collect(),
            used: UsedClasses::new(cfg.num_classes),
        }
    }

    fn class(&mut self) -> Iri {
        let i = self.rng.gen_range(0..self.classes.len());
        self.used.touch(i);
        self.classes[i].clone()
    }

    fn role(&mut self) -> RoleExpr {
        let name = self.properties[self.rng.gen_range(0..self.properties.len())].clone();
        if self.rng.gen_bool(0.15) {
            RoleExpr { name, inverse: true }
        } else {
            RoleExpr { name, inverse: false }
        }
    }

    fn property(&mut self) -> Iri {
        self.properties[self.rng.gen_range(0..self.properties.len())].clone()
    }

    /// An individual position: with the configured probability a class IRI
    /// already used as a class, otherwise a plain individual. `None` when
    /// neither pool has anything to offer.
    fn individual_position(&mut self) -> Option<Iri> {
        if self.cfg.meta_probability > 0.0 && self.rng.gen_bool(self.cfg.meta_probability) {
            if let Some(i) = self.used.pick(&mut self.rng) {
                return Some(self.classes[i].clone());
            }
        }
        if self.individuals.is_empty() {
            let i = self.used.pick(&mut self.rng)?;
            return Some(self.classes[i].clone());
        }
        Some(self.individuals[self.rng.gen_range(0..self.individuals.len())].clone())
    }

    fn tbox_axiom(&mut self) -> Option<Axiom> {
        let has_c = !self.classes.is_empty();
        let has_p = !self.properties.is_empty();
        let kind = match (has_c, has_p) {
            (false, false) => return None,
            (true, false) => 0,
            (false, true) => 3,
            (true, true) => {
                let x: f64 = self.rng.gen();
                if x < 0.4 {
                    0
                } else if x < 0.6 {
                    1
                } else if x < 0.8 {
                    2
                } else {
                    3
                }
            }
        };
        Some(match kind {
            // Plain subclass axiom.
            0 => {
                let sub = self.class();
                let sup = self.class();
                Axiom::Incl(BasicConcept::NamedClass(sub), RhsConcept::NamedClass(sup))
            }
            // Existential on the right, qualified half the time.
            1 => {
                let sub = self.class();
                let role = self.role();
                let rhs = if self.rng.gen_bool(0.5) {
                    let filler = self.class();
                    RhsConcept::QualifiedExists(role, filler)
                } else {
                    RhsConcept::unqualified_exists(role)
                };
                Axiom::Incl(BasicConcept::NamedClass(sub), rhs)
            }
            // Existential on the left.
            2 => {
                let role = self.role();
                let sup = self.class();
                Axiom::Incl(BasicConcept::ExistsRole(role), RhsConcept::NamedClass(sup))
            }
            // Role hierarchy.
            _ => {
                let sub = self.property();
                let sup = self.role();
                Axiom::RoleIncl(sub, sup)
            }
        })
    }

    fn abox_axiom(&mut self, force_membership: bool) -> Option<Axiom> {
        let has_c = !self.classes.is_empty();
        let has_p = !self.properties.is_empty();
        let membership = match (has_c, has_p) {
            (false, false) => return None,
            (true, false) => true,
            (false, true) => false,
            (true, true) => force_membership || self.rng.gen_bool(0.65),
        };
        if membership {
            let c = self.class();
            let x = self.individual_position()?;
            Some(Axiom::ClassAssert(c, x))
        } else {
            let r = self.property();
            let x = self.individual_position()?;
            let y = self.individual_position()?;
            Some(Axiom::RoleAssert(r, x, y))
        }
    }
}

/// A seeded random ontology: subclass, role-hierarchy, and existential TBox
/// axioms plus membership and link assertions, all positive, so the result
/// is always consistent. Degenerate configs (no symbols to draw from) yield
/// fewer axioms than asked for.
pub fn generate_ontology(cfg: &GenConfig) -> Result<Ontology, Error> {
    cfg.validate()?;
    let mut g = Generator::new(cfg);
    let mut axioms = Vec::new();
    for _ in 0..cfg.num_tbox {
        if let Some(a) = g.tbox_axiom() {
            axioms.push(a);
        }
    }
    for k in 0..cfg.num_abox {
        // The first assertion is a membership when classes exist, so full
        // punning always yields at least one meta-element.
        if let Some(a) = g.abox_axiom(k == 0) {
            axioms.push(a);
        }
    }
    Ok(Ontology::from_axioms(axioms))
}

/// [`generate_ontology`] serialized to text; the same config always yields
/// the same bytes.
pub fn generate(cfg: &GenConfig) -> Result<String, Error> {
    Ok(print_ontology(&generate_ontology(cfg)?))
}

/// A random conjunctive query over the ontology's vocabulary: up to
/// `max_atoms` triple patterns joined through a small shared variable pool,
/// with variables allowed in the predicate position. The first subject is
/// always a variable, so there is always something to select.
pub fn random_query(o: &Ontology, rng: &mut impl Rng, max_atoms: usize) -> Query {
    let vocab = o.vocab();
    let classes: Vec<&Iri> = vocab.classes.iter().collect();
    let properties: Vec<&Iri> = vocab.object_properties.iter().collect();
    let individuals: Vec<&Iri> = vocab.individuals.iter().collect();
    let var_pool = ["v0", "v1", "v2", "v3"];

    let var = |rng: &mut dyn rand::RngCore| -> QueryTerm {
        QueryTerm::Var(var_pool[rng.gen_range(0..var_pool.len())].to_string())
    };
    // A variable most of the time, an IRI from the pool otherwise.
    let term = |rng: &mut dyn rand::RngCore, pool: &[&Iri]| -> QueryTerm {
        if pool.is_empty() || rng.gen_bool(0.6) {
            QueryTerm::Var(var_pool[rng.gen_range(0..var_pool.len())].to_string())
        } else {
            QueryTerm::Iri(pool[rng.gen_range(0..pool.len())].clone())
        }
    };

    let n_atoms = rng.gen_range(1..=max_atoms.max(1));
    let mut patterns = Vec::new();
    for i in 0..n_atoms {
        let kind = rng.gen_range(0..10);
        let subj = if i == 0 { var(rng) } else { term(rng, &individuals) };
        let pattern = match kind {
            // Membership patterns dominate.
            0..=3 => TriplePattern { subj, pred: QueryPred::Type, obj: term(rng, &classes) },
            4 | 5 => TriplePattern {
                subj: if i == 0 { subj } else { term(rng, &classes) },
                pred: QueryPred::SubClassOf,
                obj: term(rng, &classes),
            },
            6 => TriplePattern {
                subj: if i == 0 { subj } else { term(rng, &properties) },
                pred: QueryPred::SubPropertyOf,
                obj: term(rng, &properties),
            },
            7 | 8 if !properties.is_empty() => TriplePattern {
                subj,
                pred: QueryPred::Iri(
                    properties[rng.gen_range(0..properties.len())].clone(),
                ),
                obj: term(rng, &individuals),
            },
            _ => TriplePattern {
                subj,
                pred: QueryPred::Var(format!("p{}", rng.gen_range(0..2))),
                obj: term(rng, &individuals),
            },
        };
        patterns.push(pattern);
    }

    let mut body_vars: Vec<String> = Vec::new();
    for p in &patterns {
        for v in [&p.subj, &p.obj] {
            if let QueryTerm::Var(v) = v {
                if !body_vars.contains(v) {
                    body_vars.push(v.clone());
                }
            }
        }
        if let QueryPred::Var(v) = &p.pred {
            if !body_vars.contains(v) {
                body_vars.push(v.clone());
            }
        }
    }
    let mut select: Vec<String> =
        body_vars.iter().filter(|_| rng.gen_bool(0.7)).cloned().collect();
    if select.is_empty() {
        select.push(body_vars[0].clone());
    }
    Query::new(select, patterns).expect("generated queries are well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_ontology;
    use crate::partition::meta_elements;

    fn cfg(seed: u64, meta_probability: f64) -> GenConfig {
        GenConfig {
            num_classes: 4,
            num_properties: 2,
            num_individuals: 3,
            num_tbox: 6,
            num_abox: 6,
            meta_probability,
            seed,
        }
    }

    #[test]
    fn same_config_is_byte_identical() {
        let a = generate(&cfg(1, 0.3)).unwrap();
        let b = generate(&cfg(1, 0.3)).unwrap();
        assert_eq!(a, b);
        let c = generate(&cfg(2, 0.3)).unwrap();
        assert_ne!(a, c, "different seeds should differ");
    }

    #[test]
    fn output_parses_back_cleanly() {
        for seed in 0..20 {
            let text = generate(&cfg(seed, 0.3)).unwrap();
            let o = parse_ontology(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
            assert!(o.axiom_count() > 0, "seed {seed} generated nothing");
            assert_eq!(print_ontology(&o), text, "seed {seed} does not round-trip");
        }
    }

    #[test]
    fn zero_probability_never_puns() {
        for seed in 0..20 {
            let o = generate_ontology(&cfg(seed, 0.0)).unwrap();
            assert!(meta_elements(&o).is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn full_probability_always_puns() {
        for seed in 0..20 {
            let o = generate_ontology(&cfg(seed, 1.0)).unwrap();
            assert!(!meta_elements(&o).is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn generated_corpus_is_consistent() {
        for seed in 0..20 {
            let o = generate_ontology(&cfg(seed, 0.5)).unwrap();
            assert!(crate::hybrid::consistency_check(&o), "seed {seed}");
        }
    }

    #[test]
    fn probability_out_of_range_is_rejected() {
        assert!(generate(&cfg(1, 1.5)).is_err());
        assert!(generate(&cfg(1, -0.1)).is_err());
        assert!(generate(&cfg(1, f64::NAN)).is_err());
    }

    #[test]
    fn degenerate_configs_still_work() {
        let empty = GenConfig {
            num_classes: 0,
            num_properties: 0,
            num_individuals: 0,
            num_tbox: 5,
            num_abox: 5,
            meta_probability: 0.5,
            seed: 7,
        };
        let o = generate_ontology(&empty).unwrap();
        assert_eq!(o.axiom_count(), 0);

        let classless = GenConfig { num_classes: 0, num_properties: 2, ..cfg(7, 0.0) };
        let o = generate_ontology(&classless).unwrap();
        assert!(o.axioms().all(|a| !matches!(a, Axiom::ClassAssert(..))));
        let text = print_ontology(&o);
        parse_ontology(&text).unwrap();
    }

    #[test]
    fn random_queries_are_well_formed_and_deterministic() {
        let o = generate_ontology(&cfg(3, 0.3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q1 = random_query(&o, &mut rng, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q2 = random_query(&o, &mut rng, 3);
        assert_eq!(q1, q2);
        assert!(!q1.select_vars().is_empty());
        assert!(q1.patterns().len() <= 3);
    }

    #[test]
    fn random_queries_cover_predicate_variables_and_constants() {
        let o = generate_ontology(&cfg(3, 0.3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut saw_pred_var = false;
        let mut saw_iri = false;
        for _ in 0..60 {
            let q = random_query(&o, &mut rng, 3);
            saw_pred_var |= q.patterns().iter().any(|p| matches!(p.pred, QueryPred::Var(_)));
            saw_iri |= q.patterns().iter().any(|p| {
                matches!(p.subj, QueryTerm::Iri(_))
                    || matches!(p.obj, QueryTerm::Iri(_))
                    || matches!(p.pred, QueryPred::Iri(_))
            });
        }
        assert!(saw_pred_var, "no predicate-position variable in 60 draws");
        assert!(saw_iri, "no IRI constant in 60 draws");
    }
}

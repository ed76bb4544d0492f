//! A deliberately naive forward-chaining reasoner over the ontology model,
//! used as an independent reference when testing the query pipeline. It
//! shares no code with the Datalog engine: it closes plain hash sets of
//! inclusions, memberships, and role links by repeated full passes.
//!
//! Scope mirrors the pipeline's named-individual semantics: existential
//! witnesses are never materialized, so consequences that only hold through
//! anonymous individuals are out of scope on both sides by design.

use std::collections::{BTreeSet, HashSet};

use metaql::model::Vocabulary;
use metaql::{Axiom, BasicConcept, Iri, Ontology, RhsConcept, RoleExpr};

pub struct ChaseOracle {
    /// Derived concept inclusions, seeded from the TBox.
    incl: HashSet<(BasicConcept, RhsConcept)>,
    /// Derived role inclusions `(sub, sup, inverted)`.
    role_incl: HashSet<(Iri, Iri, bool)>,
    /// Derived memberships `(individual, concept)`.
    memb: HashSet<(Iri, BasicConcept)>,
    /// Derived role links `(role, x, y)`.
    pairs: HashSet<(Iri, Iri, Iri)>,
    asserted_disj: Vec<(BasicConcept, BasicConcept)>,
    asserted_role_disj: Vec<(Iri, RoleExpr)>,
    irrefl: Vec<Iri>,
    diffs: Vec<(Iri, Iri)>,
    vocab: Vocabulary,
}

impl ChaseOracle {
    /// Closes the ontology's consequences up front. When
    /// `subsumption_reflexivity` is set, every named class subsumes itself
    /// and every role includes itself, matching the pipeline flag of the
    /// same name.
    pub fn new(ontology: &Ontology, subsumption_reflexivity: bool) -> ChaseOracle {
        let mut o = ChaseOracle {
            incl: HashSet::new(),
            role_incl: HashSet::new(),
            memb: HashSet::new(),
            pairs: HashSet::new(),
            asserted_disj: Vec::new(),
            asserted_role_disj: Vec::new(),
            irrefl: Vec::new(),
            diffs: Vec::new(),
            vocab: ontology.vocab().clone(),
        };
        for a in ontology.axioms() {
            match a {
                Axiom::Incl(lhs, rhs) => {
                    o.incl.insert((lhs.clone(), rhs.clone()));
                }
                Axiom::RoleIncl(r1, r2) => {
                    o.role_incl.insert((r1.clone(), r2.name.clone(), r2.inverse));
                }
                Axiom::Disj(b1, b2) => o.asserted_disj.push((b1.clone(), b2.clone())),
                Axiom::RoleDisj(r1, r2) => o.asserted_role_disj.push((r1.clone(), r2.clone())),
                Axiom::Irrefl(r) => o.irrefl.push(r.clone()),
                Axiom::Refl(r) => {
                    for x in &o.vocab.individuals {
                        o.pairs.insert((r.clone(), x.clone(), x.clone()));
                    }
                }
                Axiom::ClassAssert(c, x) => {
                    o.memb.insert((x.clone(), BasicConcept::NamedClass(c.clone())));
                }
                Axiom::RoleAssert(r, x, y) => {
                    o.pairs.insert((r.clone(), x.clone(), y.clone()));
                }
                Axiom::Diff(a, b) => o.diffs.push((a.clone(), b.clone())),
            }
        }
        if subsumption_reflexivity {
            for c in &o.vocab.classes {
                o.incl.insert((
                    BasicConcept::NamedClass(c.clone()),
                    RhsConcept::NamedClass(c.clone()),
                ));
            }
            for r in &o.vocab.object_properties {
                o.role_incl.insert((r.clone(), r.clone(), false));
            }
        }
        o.close(3 * ontology.tbox().len() + 3);
        o
    }

    /// Full passes over every rule until nothing changes. The pass bound is
    /// generous (saturation doubles chain lengths per pass); exceeding it
    /// means the rules themselves are broken, so panic rather than return
    /// an unclosed state.
    fn close(&mut self, max_passes: usize) {
        for _ in 0..max_passes {
            let mut new_incl: Vec<(BasicConcept, RhsConcept)> = Vec::new();
            let mut new_role: Vec<(Iri, Iri, bool)> = Vec::new();
            let mut new_memb: Vec<(Iri, BasicConcept)> = Vec::new();
            let mut new_pairs: Vec<(Iri, Iri, Iri)> = Vec::new();

            for (r1, r2, i1) in &self.role_incl {
                for (s1, s2, i2) in &self.role_incl {
                    if r2 == s1 {
                        new_role.push((r1.clone(), s2.clone(), i1 ^ i2));
                    }
                }
            }

            for (b, rhs) in &self.incl {
                // Chain through the unqualified form of the right-hand side:
                // b ⊑ ∃r.c entails b ⊑ ∃r, so anything above ∃r is above b.
                let mid = rhs.basic();
                for (b2, rhs2) in &self.incl {
                    if *b2 == mid {
                        new_incl.push((b.clone(), rhs2.clone()));
                    }
                }
                if let RhsConcept::QualifiedExists(re, filler) = rhs {
                    // Weaken the filler along named class inclusions.
                    for (b2, rhs2) in &self.incl {
                        if let (BasicConcept::NamedClass(f1), RhsConcept::NamedClass(f2)) =
                            (b2, rhs2)
                        {
                            if f1 == filler {
                                new_incl.push((
                                    b.clone(),
                                    RhsConcept::QualifiedExists(re.clone(), f2.clone()),
                                ));
                            }
                        }
                    }
                    // Lift the role along role inclusions; an inverted
                    // inclusion flips the direction marker.
                    for (r1, r2, inv) in &self.role_incl {
                        if *r1 == re.name {
                            let lifted = RoleExpr { name: r2.clone(), inverse: re.inverse ^ inv };
                            new_incl.push((
                                b.clone(),
                                RhsConcept::QualifiedExists(lifted, filler.clone()),
                            ));
                        }
                    }
                }
            }

            for (r, x, y) in &self.pairs {
                new_memb.push((x.clone(), BasicConcept::ExistsRole(RoleExpr::direct(r.as_str()))));
                new_memb.push((y.clone(), BasicConcept::ExistsRole(RoleExpr::inverse(r.as_str()))));
                for (r1, r2, inv) in &self.role_incl {
                    if r1 == r {
                        if *inv {
                            new_pairs.push((r2.clone(), y.clone(), x.clone()));
                        } else {
                            new_pairs.push((r2.clone(), x.clone(), y.clone()));
                        }
                    }
                }
            }

            for (x, b) in &self.memb {
                for (b2, rhs) in &self.incl {
                    if b2 == b {
                        new_memb.push((x.clone(), rhs.basic()));
                    }
                }
            }

            let mut changed = false;
            for f in new_incl {
                changed |= self.incl.insert(f);
            }
            for f in new_role {
                changed |= self.role_incl.insert(f);
            }
            for f in new_memb {
                changed |= self.memb.insert(f);
            }
            for f in new_pairs {
                changed |= self.pairs.insert(f);
            }
            if !changed {
                return;
            }
        }
        panic!("oracle closure did not converge within the pass bound");
    }

    /// Does the closure entail `sub ⊑ sup`? Qualified right-hand sides count
    /// toward their unqualified role concept.
    fn subsumes(&self, sub: &BasicConcept, sup: &BasicConcept) -> bool {
        if sub == sup {
            return true;
        }
        match sup {
            BasicConcept::NamedClass(c) => self
                .incl
                .contains(&(sub.clone(), RhsConcept::NamedClass(c.clone()))),
            BasicConcept::ExistsRole(re) => self.incl.iter().any(|(b, rhs)| {
                b == sub && matches!(rhs, RhsConcept::QualifiedExists(re2, _) if re2 == re)
            }),
        }
    }

    fn clashing_membership(&self, p: &BasicConcept, q: &BasicConcept) -> bool {
        self.memb
            .iter()
            .any(|(x, b)| b == p && self.memb.contains(&(x.clone(), q.clone())))
    }

    pub fn is_consistent(&self) -> bool {
        if self.diffs.iter().any(|(a, b)| a == b) {
            return false;
        }
        for (p, q) in &self.asserted_disj {
            if self.clashing_membership(p, q) {
                return false;
            }
        }
        for (r1, re2) in &self.asserted_role_disj {
            for (r, x, y) in &self.pairs {
                if r != r1 {
                    continue;
                }
                let hit = if re2.inverse {
                    self.pairs.contains(&(re2.name.clone(), y.clone(), x.clone()))
                } else {
                    self.pairs.contains(&(re2.name.clone(), x.clone(), y.clone()))
                };
                if hit {
                    return false;
                }
            }
        }
        for r in &self.irrefl {
            if self.pairs.iter().any(|(rr, x, y)| rr == r && x == y) {
                return false;
            }
        }
        true
    }

    pub fn holds_instc(&self, class: &Iri, x: &Iri) -> bool {
        self.memb
            .contains(&(x.clone(), BasicConcept::NamedClass(class.clone())))
    }

    pub fn holds_instr(&self, role: &Iri, x: &Iri, y: &Iri) -> bool {
        self.pairs.contains(&(role.clone(), x.clone(), y.clone()))
    }

    pub fn holds_isacc(&self, c1: &Iri, c2: &Iri) -> bool {
        self.incl.contains(&(
            BasicConcept::NamedClass(c1.clone()),
            RhsConcept::NamedClass(c2.clone()),
        ))
    }

    pub fn class_extension(&self, class: &Iri) -> BTreeSet<Iri> {
        self.memb
            .iter()
            .filter(|(_, b)| *b == BasicConcept::NamedClass(class.clone()))
            .map(|(x, _)| x.clone())
            .collect()
    }

    pub fn role_extension(&self, role: &Iri) -> BTreeSet<(Iri, Iri)> {
        self.pairs
            .iter()
            .filter(|(r, _, _)| r == role)
            .map(|(_, x, y)| (x.clone(), y.clone()))
            .collect()
    }

    /// All `(class, individual)` memberships over named classes.
    pub fn class_memberships(&self) -> BTreeSet<(Iri, Iri)> {
        self.memb
            .iter()
            .filter_map(|(x, b)| match b {
                BasicConcept::NamedClass(c) => Some((c.clone(), x.clone())),
                BasicConcept::ExistsRole(_) => None,
            })
            .collect()
    }

    /// All `(role, x, y)` links.
    pub fn role_links(&self) -> BTreeSet<(Iri, Iri, Iri)> {
        self.pairs.iter().cloned().collect()
    }

    /// All entailed `sub ⊑ sup` pairs over named classes.
    pub fn named_subsumptions(&self) -> BTreeSet<(Iri, Iri)> {
        self.incl
            .iter()
            .filter_map(|(b, rhs)| match (b, rhs) {
                (BasicConcept::NamedClass(c1), RhsConcept::NamedClass(c2)) => {
                    Some((c1.clone(), c2.clone()))
                }
                _ => None,
            })
            .collect()
    }

    /// All entailed `r1 ⊑ r2` pairs with matching direction.
    pub fn role_subsumptions(&self) -> BTreeSet<(Iri, Iri)> {
        self.role_incl
            .iter()
            .filter(|(_, _, inv)| !inv)
            .map(|(r1, r2, _)| (r1.clone(), r2.clone()))
            .collect()
    }

    /// All entailed disjointness pairs over named classes: `c1` and `c2` are
    /// disjoint when some asserted disjointness covers a superconcept of
    /// each, in either order.
    pub fn named_disjoints(&self) -> BTreeSet<(Iri, Iri)> {
        let mut out = BTreeSet::new();
        for c1 in &self.vocab.classes {
            for c2 in &self.vocab.classes {
                let b1 = BasicConcept::NamedClass(c1.clone());
                let b2 = BasicConcept::NamedClass(c2.clone());
                let covered = self.asserted_disj.iter().any(|(p, q)| {
                    (self.subsumes(&b1, p) && self.subsumes(&b2, q))
                        || (self.subsumes(&b1, q) && self.subsumes(&b2, p))
                });
                if covered {
                    out.insert((c1.clone(), c2.clone()));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use metaql::parse_ontology;

    fn iri(s: &str) -> Iri {
        Iri::new(s)
    }

    fn oracle(text: &str, reflexive: bool) -> ChaseOracle {
        ChaseOracle::new(&parse_ontology(text).unwrap(), reflexive)
    }

    const ZOO: &str = "\
GoldenEagle isa Eagle .
Eagle isa Bird .
EndangeredSpecies isa Species .
GoldenEagle(Harry) .
EndangeredSpecies(GoldenEagle) .
";

    #[test]
    fn zoo_subsumptions() {
        let o = oracle(ZOO, false);
        let expected: BTreeSet<(Iri, Iri)> = [
            ("GoldenEagle", "Eagle"),
            ("Eagle", "Bird"),
            ("GoldenEagle", "Bird"),
            ("EndangeredSpecies", "Species"),
        ]
        .iter()
        .map(|(a, b)| (iri(a), iri(b)))
        .collect();
        assert_eq!(o.named_subsumptions(), expected);
    }

    #[test]
    fn zoo_memberships() {
        let o = oracle(ZOO, false);
        let expected: BTreeSet<(Iri, Iri)> = [
            ("GoldenEagle", "Harry"),
            ("Eagle", "Harry"),
            ("Bird", "Harry"),
            ("EndangeredSpecies", "GoldenEagle"),
            ("Species", "GoldenEagle"),
        ]
        .iter()
        .map(|(c, x)| (iri(c), iri(x)))
        .collect();
        assert_eq!(o.class_memberships(), expected);
        assert!(o.is_consistent());
    }

    #[test]
    fn zoo_reflexive_subsumptions() {
        let o = oracle(ZOO, true);
        let subs = o.named_subsumptions();
        assert_eq!(subs.len(), 4 + 5, "four proper inclusions plus one per class");
        for c in ["GoldenEagle", "Eagle", "Bird", "EndangeredSpecies", "Species"] {
            assert!(subs.contains(&(iri(c), iri(c))), "{c} should subsume itself");
        }
    }

    #[test]
    fn existentials_and_role_hierarchy() {
        let text = "\
Professor isa exists teaches . Course .
exists teaches- isa Course .
teaches isarole involvedWith .
Professor(mary) .
teaches(mary,cs101) .
";
        let o = oracle(text, false);
        assert_eq!(
            o.role_extension(&iri("involvedWith")),
            [(iri("mary"), iri("cs101"))].into_iter().collect()
        );
        assert!(o.holds_instc(&iri("Course"), &iri("cs101")));
        // mary's teaching obligation is witnessed anonymously, so Course
        // gains no named member from it.
        assert_eq!(o.class_extension(&iri("Course")), [iri("cs101")].into_iter().collect());
        assert_eq!(
            o.role_subsumptions(),
            [(iri("teaches"), iri("involvedWith"))].into_iter().collect()
        );
    }

    #[test]
    fn inverse_role_inclusions_compose() {
        let text = "\
r isarole s- .
s isarole t- .
r(a,b) .
";
        let o = oracle(text, false);
        assert_eq!(o.role_extension(&iri("s")), [(iri("b"), iri("a"))].into_iter().collect());
        assert_eq!(o.role_extension(&iri("t")), [(iri("a"), iri("b"))].into_iter().collect());
    }

    #[test]
    fn reflexive_roles_ground_over_individuals() {
        let o = oracle("refl(knows) .\nPerson(alice) .\nPerson(bob) .\n", false);
        assert_eq!(
            o.role_extension(&iri("knows")),
            [(iri("alice"), iri("alice")), (iri("bob"), iri("bob"))].into_iter().collect()
        );
    }

    #[test]
    fn clashes() {
        assert!(!oracle("A disjoint B .\nA(x) .\nB(x) .\n", false).is_consistent());
        // The clash only appears after closing memberships upward.
        assert!(!oracle("A disjoint B .\nC isa A .\nC(x) .\nB(x) .\n", false).is_consistent());
        assert!(!oracle("A disjoint exists r .\nr(x,y) .\nA(x) .\n", false).is_consistent());
        assert!(!oracle("A disjoint exists r- .\nr(y,x) .\nA(x) .\n", false).is_consistent());
        assert!(!oracle("r disjointrole s .\nr(a,b) .\ns(a,b) .\n", false).is_consistent());
        assert!(!oracle("r disjointrole s- .\nr(a,b) .\ns(b,a) .\n", false).is_consistent());
        assert!(!oracle("irrefl(r) .\nr(a,a) .\n", false).is_consistent());
        assert!(!oracle("irrefl(r) .\nrefl(r) .\nA(a) .\n", false).is_consistent());
        assert!(!oracle("a != a .\n", false).is_consistent());

        assert!(oracle("A disjoint B .\nA(x) .\nB(y) .\n", false).is_consistent());
        assert!(oracle("r disjointrole s .\nr(a,b) .\ns(b,a) .\n", false).is_consistent());
        assert!(oracle("a != b .\n", false).is_consistent());
    }

    #[test]
    fn derived_disjointness() {
        let text = "\
A disjoint B .
C isa A .
D isa B .
";
        let o = oracle(text, false);
        let disj = o.named_disjoints();
        assert!(disj.contains(&(iri("C"), iri("D"))));
        assert!(disj.contains(&(iri("D"), iri("C"))));
        assert!(disj.contains(&(iri("A"), iri("B"))));
        assert!(!disj.contains(&(iri("A"), iri("A"))));
        assert!(!disj.contains(&(iri("C"), iri("A"))));
    }

    #[test]
    fn qualified_fillers_weaken_and_lift() {
        let text = "\
A isa exists r . B .
B isa C .
r isarole s .
exists s isa D .
A(a) .
";
        let o = oracle(text, false);
        // A ⊑ ∃r.B ⊑ ∃s, and ∃s ⊑ D, so A ⊑ D.
        assert!(o.holds_isacc(&iri("A"), &iri("D")));
        assert!(o.holds_instc(&iri("D"), &iri("a")));
        // The filler weakens along B ⊑ C without affecting membership.
        assert!(!o.holds_instc(&iri("B"), &iri("a")));
        assert!(!o.holds_instc(&iri("C"), &iri("a")));
    }

    #[test]
    fn metamodeling_keeps_levels_separate() {
        // GoldenEagle the class has members; GoldenEagle the individual has
        // types. Neither leaks into the other.
        let o = oracle(ZOO, false);
        assert!(o.holds_instc(&iri("EndangeredSpecies"), &iri("GoldenEagle")));
        assert!(!o.holds_instc(&iri("EndangeredSpecies"), &iri("Harry")));
        assert!(!o.holds_isacc(&iri("Harry"), &iri("Eagle")));
    }
}

//! Syntactic locality-based module extraction.
//!
//! An axiom is locally trivial ("bottom-local") w.r.t. a signature when
//! replacing every class and property outside the signature by the empty
//! concept or role turns it into a tautology. A module is the least set of
//! axioms closed under pulling in every non-local axiom and widening the
//! signature by the pulled axiom's symbols. Assertions and inequality are
//! never local, so instance data relevant to the seed is always preserved.

use std::collections::BTreeSet;

use crate::model::{signature_of_axiom, Axiom, BasicConcept, Iri, Ontology, RoleExpr};

#[derive(Clone, Debug)]
pub struct Module {
    /// The retained axioms, in source order.
    pub axioms: Vec<Axiom>,
    /// Seed signature plus every symbol of the retained axioms.
    pub final_signature: BTreeSet<Iri>,
}

fn empty_role(re: &RoleExpr, sig: &BTreeSet<Iri>) -> bool {
    !sig.contains(re.name.as_str())
}

/// A basic concept that denotes the empty set once out-of-signature symbols
/// are emptied.
fn bottom_equivalent(b: &BasicConcept, sig: &BTreeSet<Iri>) -> bool {
    match b {
        BasicConcept::NamedClass(c) => !sig.contains(c.as_str()),
        BasicConcept::ExistsRole(re) => empty_role(re, sig),
    }
}

/// Whether the axiom is a tautology under the signature. Inclusions are
/// local when their left side empties (`⊥ ⊑ R` holds for any right side),
/// disjointness when either side empties, role axioms when a participating
/// role empties. Reflexivity of the empty role fails, and assertions state
/// facts about individuals, so neither is ever local.
pub fn bottom_local(a: &Axiom, sig: &BTreeSet<Iri>) -> bool {
    match a {
        Axiom::Incl(lhs, _) => bottom_equivalent(lhs, sig),
        Axiom::Disj(lhs, rhs) => bottom_equivalent(lhs, sig) || bottom_equivalent(rhs, sig),
        Axiom::RoleIncl(r1, _) => !sig.contains(r1.as_str()),
        Axiom::RoleDisj(r1, r2) => !sig.contains(r1.as_str()) || empty_role(r2, sig),
        Axiom::Irrefl(r) => !sig.contains(r.as_str()),
        Axiom::Refl(_) => false,
        Axiom::ClassAssert(..) | Axiom::RoleAssert(..) | Axiom::Diff(..) => false,
    }
}

/// Least fixpoint: pull in every non-local axiom, widen the signature by its
/// symbols, repeat until stable. Runs at most one pass per axiom.
pub fn extract_module(seed: &BTreeSet<Iri>, o: &Ontology) -> Module {
    let mut sig = seed.clone();
    let mut retained: Vec<bool> = vec![false; o.axiom_count()];
    let axioms: Vec<&Axiom> = o.axioms().collect();
    loop {
        let mut grew = false;
        for (i, a) in axioms.iter().enumerate() {
            if !retained[i] && !bottom_local(a, &sig) {
                retained[i] = true;
                sig.extend(signature_of_axiom(a));
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let axioms = axioms
        .into_iter()
        .zip(&retained)
        .filter(|(_, keep)| **keep)
        .map(|(a, _)| a.clone())
        .collect();
    Module { axioms, final_signature: sig }
}

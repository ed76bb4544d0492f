//! Splitting an ontology into the side kept as an ontology (answered by the
//! saturation oracle) and the side translated to Datalog.
//!
//! Meta-elements are the IRIs used both as an individual and as a class or
//! property; axioms mentioning one are "clashing". The split variants differ
//! in how much of the ontology crosses to the Datalog side: everything
//! (e-at), the whole TBox (a-t), the clashing ABox plus the whole TBox
//! (nat-cat), or only the clashing axioms themselves (nat-cact).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::model::{signature_of_axiom, Axiom, Iri, Ontology};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variant {
    EAt,
    At,
    NatCat,
    NatCact,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::EAt, Variant::At, Variant::NatCat, Variant::NatCact];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::EAt => "e-at",
            Variant::At => "a-t",
            Variant::NatCat => "nat-cat",
            Variant::NatCact => "nat-cact",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Variant, String> {
        match s.to_ascii_lowercase().as_str() {
            "e-at" => Ok(Variant::EAt),
            "a-t" => Ok(Variant::At),
            "nat-cat" => Ok(Variant::NatCat),
            "nat-cact" => Ok(Variant::NatCact),
            other => Err(format!(
                "unknown variant {other:?}: expected e-at, a-t, nat-cat, or nat-cact"
            )),
        }
    }
}

/// Result of [`split`]: the two sides plus the classification that produced
/// them. The sides cover the source ontology's axioms exactly (they may
/// overlap, e.g. the TBox under nat-cat).
#[derive(Clone, Debug)]
pub struct Partition {
    pub variant: Variant,
    pub onto_side: Ontology,
    pub datalog_side: Ontology,
    pub meta_elements: BTreeSet<Iri>,
    pub clashing: BTreeSet<Axiom>,
}

/// IRIs occurring both as an individual and as a class or property.
pub fn meta_elements(o: &Ontology) -> BTreeSet<Iri> {
    let vocab = o.vocab();
    vocab
        .classes
        .union(&vocab.object_properties)
        .filter(|iri| vocab.individuals.contains(*iri))
        .cloned()
        .collect()
}

/// Axioms whose signature mentions a meta-element. Computed against the
/// whole ontology: membership of an IRI in the meta-elements depends on all
/// axioms, not on the axiom at hand.
pub fn clashing_axioms(o: &Ontology) -> BTreeSet<Axiom> {
    let meta = meta_elements(o);
    o.axioms()
        .filter(|a| !meta.is_disjoint(&signature_of_axiom(a)))
        .cloned()
        .collect()
}

pub fn split(o: &Ontology, variant: Variant) -> Partition {
    let meta = meta_elements(o);
    let clashing: BTreeSet<Axiom> = o
        .axioms()
        .filter(|a| !meta.is_disjoint(&signature_of_axiom(a)))
        .cloned()
        .collect();
    let (onto_side, datalog_side) = match variant {
        Variant::EAt => (Ontology::default(), o.clone()),
        Variant::At => (
            Ontology::from_axioms(o.abox().iter().cloned()),
            Ontology::from_axioms(o.tbox().iter().cloned()),
        ),
        Variant::NatCat | Variant::NatCact => {
            let normal_abox = o.abox().iter().filter(|a| !clashing.contains(a)).cloned();
            let onto = Ontology::from_axioms(o.tbox().iter().cloned().chain(normal_abox));
            let clashing_abox = o.abox().iter().filter(|a| clashing.contains(a)).cloned();
            let datalog = if variant == Variant::NatCat {
                Ontology::from_axioms(o.tbox().iter().cloned().chain(clashing_abox))
            } else {
                let clashing_tbox = o.tbox().iter().filter(|a| clashing.contains(a)).cloned();
                Ontology::from_axioms(clashing_tbox.chain(clashing_abox))
            };
            (onto, datalog)
        }
    };
    Partition { variant, onto_side, datalog_side, meta_elements: meta, clashing }
}

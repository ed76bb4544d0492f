//! Abstract syntax for OWL 2 QL ontologies, the SPARQL SELECT subset, and
//! answer tables. Every other module works over these types.
//!
//! IRIs are stored fully expanded; prefixed names exist only inside the
//! parsers. The three vocabulary sets (classes, object properties,
//! individuals) are computed from axiom occurrences and may overlap: an IRI
//! occurring both as an individual and as a class or property is exactly what
//! metamodeling is about.

use std::collections::BTreeSet;
use std::fmt;

/// The reserved filler for unqualified existentials on right-hand sides
/// (`c ⊑ ∃r` is stored as `c ⊑ ∃r.owl:Thing`). Never part of any vocabulary
/// set or signature.
pub const OWL_THING: &str = "owl:Thing";

/// Expanded form of the same IRI, recognized so that inputs using a declared
/// `owl:` prefix behave identically.
pub const OWL_THING_FULL: &str = "http://www.w3.org/2002/07/owl#Thing";

pub fn is_thing(iri: &str) -> bool {
    iri == OWL_THING || iri == OWL_THING_FULL
}

/// A fully expanded IRI (or plain name used as one). Equality is exact string
/// equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(String);

impl Iri {
    /// Panics on empty strings or embedded whitespace; parsers validate
    /// before constructing, so reaching the panic is a programming error.
    pub fn new(value: impl Into<String>) -> Iri {
        let value = value.into();
        assert!(
            !value.is_empty() && !value.chars().any(char::is_whitespace),
            "invalid IRI: {value:?}"
        );
        Iri(value)
    }

    pub fn thing() -> Iri {
        Iri(OWL_THING.to_string())
    }

    pub fn is_thing(&self) -> bool {
        is_thing(&self.0)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Iri({})", self.0)
    }
}

impl From<&str> for Iri {
    fn from(s: &str) -> Iri {
        Iri::new(s)
    }
}

/// Sound because `Iri` derives its ordering, equality, and hash from the
/// wrapped string alone; lets string keys probe `BTreeSet<Iri>` directly.
impl std::borrow::Borrow<str> for Iri {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// A role or its inverse (`r` / `r⁻`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RoleExpr {
    pub name: Iri,
    pub inverse: bool,
}

impl RoleExpr {
    pub fn direct(name: impl Into<String>) -> RoleExpr {
        RoleExpr { name: Iri::new(name), inverse: false }
    }

    pub fn inverse(name: impl Into<String>) -> RoleExpr {
        RoleExpr { name: Iri::new(name), inverse: true }
    }
}

/// Left-hand sides of inclusions and both sides of disjointness: a named
/// class or an existential over a (possibly inverse) role.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum BasicConcept {
    NamedClass(Iri),
    ExistsRole(RoleExpr),
}

/// Right-hand sides of positive inclusions. Unqualified existentials carry
/// the reserved `owl:Thing` filler so there is a single shape.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum RhsConcept {
    NamedClass(Iri),
    QualifiedExists(RoleExpr, Iri),
}

impl RhsConcept {
    pub fn unqualified_exists(role: RoleExpr) -> RhsConcept {
        RhsConcept::QualifiedExists(role, Iri::thing())
    }

    /// The basic concept obtained by dropping the filler (`∃r.c ⊆ ∃r`).
    pub fn basic(&self) -> BasicConcept {
        match self {
            RhsConcept::NamedClass(c) => BasicConcept::NamedClass(c.clone()),
            RhsConcept::QualifiedExists(re, _) => BasicConcept::ExistsRole(re.clone()),
        }
    }
}

/// One OWL 2 QL axiom. Role inclusions and disjointness keep a plain IRI on
/// the left, making inverse-on-the-left unrepresentable (`r⁻ ⊑ s` is the same
/// axiom as `r ⊑ s⁻`, which is representable).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Axiom {
    Incl(BasicConcept, RhsConcept),
    Disj(BasicConcept, BasicConcept),
    RoleIncl(Iri, RoleExpr),
    RoleDisj(Iri, RoleExpr),
    Refl(Iri),
    Irrefl(Iri),
    ClassAssert(Iri, Iri),
    RoleAssert(Iri, Iri, Iri),
    Diff(Iri, Iri),
}

impl Axiom {
    pub fn is_tbox(&self) -> bool {
        matches!(
            self,
            Axiom::Incl(..)
                | Axiom::Disj(..)
                | Axiom::RoleIncl(..)
                | Axiom::RoleDisj(..)
                | Axiom::Refl(..)
                | Axiom::Irrefl(..)
        )
    }

    pub fn is_abox(&self) -> bool {
        !self.is_tbox()
    }

    /// Canonical form. Disjointness is symmetric, and the fact vocabulary has
    /// no row for (named class, forward existential), so that orientation is
    /// swapped to the (forward existential, named class) row.
    pub fn normalized(self) -> Axiom {
        match self {
            Axiom::Disj(BasicConcept::NamedClass(c), BasicConcept::ExistsRole(re))
                if !re.inverse =>
            {
                Axiom::Disj(BasicConcept::ExistsRole(re), BasicConcept::NamedClass(c))
            }
            other => other,
        }
    }

    fn visit_occurrences(&self, f: &mut impl FnMut(Occurrence<'_>)) {
        use Occurrence::*;
        let basic = |b: &BasicConcept, f: &mut dyn FnMut(Occurrence<'_>)| match b {
            BasicConcept::NamedClass(c) => f(Class(c)),
            BasicConcept::ExistsRole(re) => f(Property(&re.name)),
        };
        match self {
            Axiom::Incl(lhs, rhs) => {
                basic(lhs, f);
                match rhs {
                    RhsConcept::NamedClass(c) => f(Class(c)),
                    RhsConcept::QualifiedExists(re, filler) => {
                        f(Property(&re.name));
                        if !filler.is_thing() {
                            f(Class(filler));
                        }
                    }
                }
            }
            Axiom::Disj(lhs, rhs) => {
                basic(lhs, f);
                basic(rhs, f);
            }
            Axiom::RoleIncl(r1, r2) | Axiom::RoleDisj(r1, r2) => {
                f(Property(r1));
                f(Property(&r2.name));
            }
            Axiom::Refl(r) | Axiom::Irrefl(r) => f(Property(r)),
            Axiom::ClassAssert(c, x) => {
                f(Class(c));
                f(Individual(x));
            }
            Axiom::RoleAssert(r, x, y) => {
                f(Property(r));
                f(Individual(x));
                f(Individual(y));
            }
            Axiom::Diff(a, b) => {
                f(Individual(a));
                f(Individual(b));
            }
        }
    }
}

enum Occurrence<'a> {
    Class(&'a Iri),
    Property(&'a Iri),
    Individual(&'a Iri),
}

/// Every class, property, and individual IRI occurring in the axiom
/// (`owl:Thing` excluded).
pub fn signature_of_axiom(a: &Axiom) -> BTreeSet<Iri> {
    let mut sig = BTreeSet::new();
    a.visit_occurrences(&mut |occ| {
        let iri = match occ {
            Occurrence::Class(i) | Occurrence::Property(i) | Occurrence::Individual(i) => i,
        };
        sig.insert(iri.clone());
    });
    sig
}

/// The occurrence-derived vocabulary of an ontology. Sets may overlap.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Vocabulary {
    pub classes: BTreeSet<Iri>,
    pub object_properties: BTreeSet<Iri>,
    pub individuals: BTreeSet<Iri>,
}

impl Vocabulary {
    pub fn of_axioms<'a>(axioms: impl IntoIterator<Item = &'a Axiom>) -> Vocabulary {
        let mut vocab = Vocabulary::default();
        for a in axioms {
            a.visit_occurrences(&mut |occ| match occ {
                Occurrence::Class(c) => {
                    vocab.classes.insert(c.clone());
                }
                Occurrence::Property(p) => {
                    vocab.object_properties.insert(p.clone());
                }
                Occurrence::Individual(i) => {
                    vocab.individuals.insert(i.clone());
                }
            });
        }
        vocab
    }
}

/// An ontology `⟨T, A⟩` with its derived vocabulary. Axioms are normalized on
/// construction and routed to the TBox or ABox by kind.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Ontology {
    tbox: Vec<Axiom>,
    abox: Vec<Axiom>,
    vocab: Vocabulary,
}

impl Ontology {
    pub fn from_axioms(axioms: impl IntoIterator<Item = Axiom>) -> Ontology {
        let mut tbox = Vec::new();
        let mut abox = Vec::new();
        for a in axioms {
            let a = a.normalized();
            if a.is_tbox() {
                tbox.push(a);
            } else {
                abox.push(a);
            }
        }
        let vocab = Vocabulary::of_axioms(tbox.iter().chain(abox.iter()));
        Ontology { tbox, abox, vocab }
    }

    pub fn tbox(&self) -> &[Axiom] {
        &self.tbox
    }

    pub fn abox(&self) -> &[Axiom] {
        &self.abox
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn axioms(&self) -> impl Iterator<Item = &Axiom> {
        self.tbox.iter().chain(self.abox.iter())
    }

    pub fn axiom_count(&self) -> usize {
        self.tbox.len() + self.abox.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tbox.is_empty() && self.abox.is_empty()
    }
}

pub fn signature_of_ontology(o: &Ontology) -> BTreeSet<Iri> {
    let mut sig = BTreeSet::new();
    for a in o.axioms() {
        sig.extend(signature_of_axiom(a));
    }
    sig
}

/// Subject/object position of a triple pattern.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum QueryTerm {
    Iri(Iri),
    Var(String),
}

/// Predicate position: one of the four meta keywords, an IRI, or a variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum QueryPred {
    Type,
    SubClassOf,
    SubPropertyOf,
    DisjointWith,
    Iri(Iri),
    Var(String),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TriplePattern {
    pub subj: QueryTerm,
    pub pred: QueryPred,
    pub obj: QueryTerm,
}

/// A conjunctive SELECT query: projection variables plus triple patterns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Query {
    select_vars: Vec<String>,
    patterns: Vec<TriplePattern>,
}

impl Query {
    /// Rejects empty pattern lists and projection variables that never occur
    /// in the body.
    pub fn new(select_vars: Vec<String>, patterns: Vec<TriplePattern>) -> Result<Query, String> {
        if patterns.is_empty() {
            return Err("query has no triple patterns".to_string());
        }
        if select_vars.is_empty() {
            return Err("query selects no variables".to_string());
        }
        let body_vars = pattern_vars(&patterns);
        for v in &select_vars {
            if !body_vars.contains(v.as_str()) {
                return Err(format!("selected variable ?{v} does not occur in the body"));
            }
        }
        Ok(Query { select_vars, patterns })
    }

    pub fn select_vars(&self) -> &[String] {
        &self.select_vars
    }

    pub fn patterns(&self) -> &[TriplePattern] {
        &self.patterns
    }
}

fn pattern_vars(patterns: &[TriplePattern]) -> BTreeSet<&str> {
    let mut vars = BTreeSet::new();
    for p in patterns {
        if let QueryTerm::Var(v) = &p.subj {
            vars.insert(v.as_str());
        }
        if let QueryPred::Var(v) = &p.pred {
            vars.insert(v.as_str());
        }
        if let QueryTerm::Var(v) = &p.obj {
            vars.insert(v.as_str());
        }
    }
    vars
}

/// The IRIs occurring in the query's patterns (keyword predicates are not
/// IRIs). Falls back to the full ontology signature when the query mentions
/// none, so that a purely variable query is relevant to everything.
pub fn signature_of_query(q: &Query, o: &Ontology) -> BTreeSet<Iri> {
    let mut sig = BTreeSet::new();
    for p in q.patterns() {
        for term in [&p.subj, &p.obj] {
            if let QueryTerm::Iri(iri) = term {
                sig.insert(iri.clone());
            }
        }
        if let QueryPred::Iri(iri) = &p.pred {
            sig.insert(iri.clone());
        }
    }
    if sig.is_empty() {
        signature_of_ontology(o)
    } else {
        sig
    }
}

/// A set of answer tuples under a variable header. Rows are deduplicated and
/// kept lexicographically sorted, which makes equality checks and serialized
/// output deterministic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AnswerTable {
    header: Vec<String>,
    rows: Vec<Vec<Iri>>,
}

impl AnswerTable {
    pub fn new(header: Vec<String>, rows: impl IntoIterator<Item = Vec<Iri>>) -> AnswerTable {
        let mut unique: BTreeSet<Vec<Iri>> = BTreeSet::new();
        for row in rows {
            assert_eq!(row.len(), header.len(), "row arity differs from header arity");
            unique.insert(row);
        }
        AnswerTable { header, rows: unique.into_iter().collect() }
    }

    pub fn empty(header: Vec<String>) -> AnswerTable {
        AnswerTable { header, rows: Vec::new() }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Iri>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// True when both tables contain the same tuple set, ignoring header
    /// names (used to compare runs of the same query).
    pub fn same_rows(&self, other: &AnswerTable) -> bool {
        self.rows == other.rows
    }
}

//! Encoding of axioms and queries into the Datalog fact vocabulary, the
//! inference rule base that saturates it, and the interface describing which
//! facts cross from the ontology side into the Datalog side.
//!
//! Predicate names spell out the kinds of their basic-concept positions:
//! `C` a named class, `R` a forward existential, `I` an inverse existential.
//! `isacXY` holds concept inclusions (arity 2 when the right side is named,
//! arity 3 with the filler last otherwise), `isarR?` role inclusions,
//! `disjc??`/`disjr??` disjointness, `instc`/`instr`/`diff` assertions.
//! There is no `disjcCR`: that orientation is normalized to `disjcRC` with
//! swapped arguments, both at axiom construction and here.

use std::collections::BTreeSet;

use crate::datalog::{Atom, GroundAtom, Rule, Term};
use crate::model::{
    is_thing, Axiom, BasicConcept, Iri, Ontology, Query, QueryPred, QueryTerm, RhsConcept,
    TriplePattern, Vocabulary,
};

pub const INSTC: &str = "instc";
pub const INSTR: &str = "instr";
pub const DIFF: &str = "diff";
pub const INDIVIDUAL: &str = "individual";
pub const CLASSNAME: &str = "classname";
pub const ROLENAME: &str = "rolename";
pub const INCONSIST: &str = "inconsist";
/// Head predicate of the encoded query rule.
pub const QUERY: &str = "q";

/// Kind letter of a basic-concept position: named class, forward
/// existential, inverse existential.
#[derive(Clone, Copy, PartialEq, Eq)]
enum K {
    C,
    R,
    I,
}

const KS: [K; 3] = [K::C, K::R, K::I];

impl K {
    fn ch(self) -> char {
        match self {
            K::C => 'C',
            K::R => 'R',
            K::I => 'I',
        }
    }

    fn flip(self) -> K {
        match self {
            K::R => K::I,
            K::I => K::R,
            K::C => K::C,
        }
    }
}

fn v(name: &str) -> Term {
    Term::Var(name.to_string())
}

/// `isac` atom for a `sub ⊑ sup` pair of kinds: `s` is the subject symbol,
/// `n` the named class or role of the right side, `f` the filler (ignored
/// when the right side is named).
fn incl_atom(sub: K, sup: K, s: &str, n: &str, f: &str) -> Atom {
    let mut args = vec![v(s), v(n)];
    if sup != K::C {
        args.push(v(f));
    }
    Atom::new(format!("isac{}{}", sub.ch(), sup.ch()), args)
}

/// Disjointness atom for a pair of kinds, canonicalizing the missing
/// (named, forward existential) shape to `disjcRC` with swapped arguments.
fn disj_atom(l: K, r: K, a: &str, b: &str) -> Atom {
    if l == K::C && r == K::R {
        Atom::new("disjcRC", vec![v(b), v(a)])
    } else {
        Atom::new(format!("disjc{}{}", l.ch(), r.ch()), vec![v(a), v(b)])
    }
}

fn isar_atom(inverse: bool, a: &str, b: &str) -> Atom {
    Atom::new(if inverse { "isarRI" } else { "isarRR" }, vec![v(a), v(b)])
}

fn basic_parts(b: &BasicConcept) -> (K, String) {
    match b {
        BasicConcept::NamedClass(c) => (K::C, c.to_string()),
        BasicConcept::ExistsRole(re) => {
            (if re.inverse { K::I } else { K::R }, re.name.to_string())
        }
    }
}

/// The fact a single axiom contributes, independent of any other axiom.
pub fn encode_axiom(a: &Axiom) -> GroundAtom {
    match a {
        Axiom::Incl(lhs, rhs) => {
            let (lk, ls) = basic_parts(lhs);
            match rhs {
                RhsConcept::NamedClass(c) => {
                    GroundAtom::new(format!("isac{}C", lk.ch()), vec![ls, c.to_string()])
                }
                RhsConcept::QualifiedExists(re, filler) => {
                    let rk = if re.inverse { K::I } else { K::R };
                    GroundAtom::new(
                        format!("isac{}{}", lk.ch(), rk.ch()),
                        vec![ls, re.name.to_string(), filler.to_string()],
                    )
                }
            }
        }
        Axiom::Disj(lhs, rhs) => {
            let (lk, ls) = basic_parts(lhs);
            let (rk, rs) = basic_parts(rhs);
            if lk == K::C && rk == K::R {
                GroundAtom::new("disjcRC", vec![rs, ls])
            } else {
                GroundAtom::new(format!("disjc{}{}", lk.ch(), rk.ch()), vec![ls, rs])
            }
        }
        Axiom::RoleIncl(r1, r2) => GroundAtom::new(
            if r2.inverse { "isarRI" } else { "isarRR" },
            vec![r1.to_string(), r2.name.to_string()],
        ),
        Axiom::RoleDisj(r1, r2) => GroundAtom::new(
            if r2.inverse { "disjrRI" } else { "disjrRR" },
            vec![r1.to_string(), r2.name.to_string()],
        ),
        Axiom::Refl(r) => GroundAtom::new("refl", vec![r.to_string()]),
        Axiom::Irrefl(r) => GroundAtom::new("irrefl", vec![r.to_string()]),
        Axiom::ClassAssert(c, x) => GroundAtom::new(INSTC, vec![c.to_string(), x.to_string()]),
        Axiom::RoleAssert(r, x, y) => {
            GroundAtom::new(INSTR, vec![r.to_string(), x.to_string(), y.to_string()])
        }
        Axiom::Diff(x, y) => GroundAtom::new(DIFF, vec![x.to_string(), y.to_string()]),
    }
}

/// `individual`/`classname`/`rolename` facts enumerating a vocabulary.
/// These drive reflexive role expansion and, when subsumption reflexivity
/// is on, the trivial `isacCC(c,c)`/`isarRR(r,r)` facts.
pub fn vocabulary_facts(vocab: &Vocabulary) -> Vec<GroundAtom> {
    let mut out =
        Vec::with_capacity(vocab.individuals.len() + vocab.classes.len() + vocab.object_properties.len());
    for x in &vocab.individuals {
        out.push(GroundAtom::new(INDIVIDUAL, vec![x.to_string()]));
    }
    for c in &vocab.classes {
        out.push(GroundAtom::new(CLASSNAME, vec![c.to_string()]));
    }
    for r in &vocab.object_properties {
        out.push(GroundAtom::new(ROLENAME, vec![r.to_string()]));
    }
    out
}

/// Per-axiom facts followed by the ontology's own vocabulary facts.
pub fn encode_ontology(o: &Ontology) -> Vec<GroundAtom> {
    let mut out: Vec<GroundAtom> = o.axioms().map(encode_axiom).collect();
    out.extend(vocabulary_facts(o.vocab()));
    out
}

fn query_var(name: &str) -> String {
    format!("V{name}")
}

fn query_term(t: &QueryTerm) -> Term {
    match t {
        QueryTerm::Iri(iri) => Term::Const(iri.to_string()),
        QueryTerm::Var(name) => Term::Var(query_var(name)),
    }
}

fn pattern_atom(p: &TriplePattern) -> Atom {
    let s = query_term(&p.subj);
    let o = query_term(&p.obj);
    match &p.pred {
        QueryPred::Type => Atom::new(INSTC, vec![o, s]),
        QueryPred::SubClassOf => Atom::new("isacCC", vec![s, o]),
        QueryPred::SubPropertyOf => Atom::new("isarRR", vec![s, o]),
        QueryPred::DisjointWith => Atom::new("disjcCC", vec![s, o]),
        QueryPred::Iri(iri) => Atom::new(INSTR, vec![Term::Const(iri.to_string()), s, o]),
        QueryPred::Var(name) => Atom::new(INSTR, vec![Term::Var(query_var(name)), s, o]),
    }
}

/// The query rule: one head atom `q(...)` over the projection variables in
/// SELECT order, one body atom per triple pattern. `rdf:type` reads the
/// membership relation with the class first, the meta keywords read the
/// corresponding TBox-level relations, and everything else reads roles.
pub fn encode_query(q: &Query) -> Rule {
    let head = Atom::new(
        QUERY,
        q.select_vars().iter().map(|name| Term::Var(query_var(name))).collect(),
    );
    Rule::new(head, q.patterns().iter().map(pattern_atom).collect())
}

/// The saturation rule base. With `subsumption_reflexivity` every class is
/// additionally its own subclass and every role its own subrole, which makes
/// `subClassOf`/`subPropertyOf` queries reflexive but leaves memberships
/// untouched.
pub fn inference_rules(subsumption_reflexivity: bool) -> Vec<Rule> {
    let mut rules: Vec<Rule> = Vec::with_capacity(104);
    let r = |head: Atom, body: Vec<Atom>| Rule::new(head, body);

    // Inclusion chains through a named middle class.
    for x in KS {
        for y in KS {
            rules.push(r(
                incl_atom(x, y, "S", "N", "F"),
                vec![incl_atom(x, K::C, "S", "M", "F"), incl_atom(K::C, y, "M", "N", "F")],
            ));
        }
    }

    // Inclusion chains through an existential middle: the filler of the left
    // premise is dropped (X ⊑ ∃m.F implies X ⊑ ∃m).
    for x in KS {
        for m in [K::R, K::I] {
            for y in KS {
                rules.push(r(
                    incl_atom(x, y, "S", "N", "F"),
                    vec![incl_atom(x, m, "S", "M", "F0"), incl_atom(m, y, "M", "N", "F")],
                ));
            }
        }
    }

    // Filler weakening: ∃r.F ⊑ ∃r.G when F ⊑ G.
    for x in KS {
        for s in [K::R, K::I] {
            rules.push(r(
                incl_atom(x, s, "S", "R", "G"),
                vec![
                    incl_atom(x, s, "S", "R", "F"),
                    Atom::new("isacCC", vec![v("F"), v("G")]),
                ],
            ));
        }
    }

    // Role lifting inside a qualified existential; an inverse inclusion
    // flips the existential's direction.
    for x in KS {
        for s in [K::R, K::I] {
            for inverse in [false, true] {
                let lifted = if inverse { s.flip() } else { s };
                rules.push(r(
                    incl_atom(x, lifted, "S", "R2", "F"),
                    vec![incl_atom(x, s, "S", "R1", "F"), isar_atom(inverse, "R1", "R2")],
                ));
            }
        }
    }

    // Role inclusion chains; two inversions cancel.
    for a in [false, true] {
        for b in [false, true] {
            rules.push(r(
                isar_atom(a ^ b, "A", "C"),
                vec![isar_atom(a, "A", "B"), isar_atom(b, "B", "C")],
            ));
        }
    }

    // Membership saturation.
    rules.push(r(
        Atom::new(INSTC, vec![v("C2"), v("X")]),
        vec![
            Atom::new(INSTC, vec![v("C1"), v("X")]),
            Atom::new("isacCC", vec![v("C1"), v("C2")]),
        ],
    ));
    rules.push(r(
        Atom::new(INSTC, vec![v("C"), v("X")]),
        vec![
            Atom::new(INSTR, vec![v("R"), v("X"), v("Y")]),
            Atom::new("isacRC", vec![v("R"), v("C")]),
        ],
    ));
    rules.push(r(
        Atom::new(INSTC, vec![v("C"), v("Y")]),
        vec![
            Atom::new(INSTR, vec![v("R"), v("X"), v("Y")]),
            Atom::new("isacIC", vec![v("R"), v("C")]),
        ],
    ));
    rules.push(r(
        Atom::new(INSTR, vec![v("S"), v("X"), v("Y")]),
        vec![
            Atom::new(INSTR, vec![v("R"), v("X"), v("Y")]),
            Atom::new("isarRR", vec![v("R"), v("S")]),
        ],
    ));
    rules.push(r(
        Atom::new(INSTR, vec![v("S"), v("Y"), v("X")]),
        vec![
            Atom::new(INSTR, vec![v("R"), v("X"), v("Y")]),
            Atom::new("isarRI", vec![v("R"), v("S")]),
        ],
    ));
    rules.push(r(
        Atom::new(INSTR, vec![v("R"), v("X"), v("X")]),
        vec![Atom::new("refl", vec![v("R")]), Atom::new(INDIVIDUAL, vec![v("X")])],
    ));

    // Disjointness symmetry. disjcRC has no mirrored predicate; its other
    // orientation is already normalized away.
    for pred in ["disjcCC", "disjcRR", "disjcII", "disjrRR"] {
        rules.push(r(
            Atom::new(pred, vec![v("B"), v("A")]),
            vec![Atom::new(pred, vec![v("A"), v("B")])],
        ));
    }
    for (from, to) in [("disjcCI", "disjcIC"), ("disjcIC", "disjcCI")] {
        rules.push(r(
            Atom::new(to, vec![v("B"), v("A")]),
            vec![Atom::new(from, vec![v("A"), v("B")])],
        ));
    }
    for (from, to) in [("disjcRI", "disjcIR"), ("disjcIR", "disjcRI")] {
        rules.push(r(
            Atom::new(to, vec![v("B"), v("A")]),
            vec![Atom::new(from, vec![v("A"), v("B")])],
        ));
    }
    rules.push(r(
        Atom::new("disjrRI", vec![v("B"), v("A")]),
        vec![Atom::new("disjrRI", vec![v("A"), v("B")])],
    ));

    // Disjointness strengthening: anything included in one side of a
    // disjointness is itself disjoint from the other side. Qualified
    // existentials on the right of the inclusion are read unqualified.
    for x in KS {
        for b in KS {
            for bp in KS {
                rules.push(r(
                    disj_atom(x, bp, "S", "P"),
                    vec![incl_atom(x, b, "S", "N", "F"), disj_atom(b, bp, "N", "P")],
                ));
            }
        }
    }

    // Violations: an individual (or pair) witnessing both sides of a
    // disjointness, or an irreflexive role looping.
    let inconsist = || Atom::new(INCONSIST, vec![]);
    let instc = |c: &str, x: &str| Atom::new(INSTC, vec![v(c), v(x)]);
    let instr = |p: &str, x: &str, y: &str| Atom::new(INSTR, vec![v(p), v(x), v(y)]);
    let bin = |p: &str, a: &str, b: &str| Atom::new(p, vec![v(a), v(b)]);
    rules.push(r(inconsist(), vec![bin("disjcCC", "C1", "C2"), instc("C1", "X"), instc("C2", "X")]));
    rules.push(r(inconsist(), vec![bin("disjcCI", "C", "R"), instc("C", "X"), instr("R", "Y", "X")]));
    rules.push(r(inconsist(), vec![bin("disjcRC", "R", "C"), instr("R", "X", "Y"), instc("C", "X")]));
    rules.push(r(inconsist(), vec![bin("disjcRR", "R1", "R2"), instr("R1", "X", "Y1"), instr("R2", "X", "Y2")]));
    rules.push(r(inconsist(), vec![bin("disjcRI", "R1", "R2"), instr("R1", "X", "Y1"), instr("R2", "Y2", "X")]));
    rules.push(r(inconsist(), vec![bin("disjcIC", "R", "C"), instr("R", "X", "Y"), instc("C", "Y")]));
    rules.push(r(inconsist(), vec![bin("disjcIR", "R1", "R2"), instr("R1", "X1", "Y"), instr("R2", "Y", "X2")]));
    rules.push(r(inconsist(), vec![bin("disjcII", "R1", "R2"), instr("R1", "X1", "Y"), instr("R2", "X2", "Y")]));
    rules.push(r(inconsist(), vec![bin("disjrRR", "R1", "R2"), instr("R1", "X", "Y"), instr("R2", "X", "Y")]));
    rules.push(r(inconsist(), vec![bin("disjrRI", "R1", "R2"), instr("R1", "X", "Y"), instr("R2", "Y", "X")]));
    rules.push(r(inconsist(), vec![Atom::new("irrefl", vec![v("R")]), instr("R", "X", "X")]));

    if subsumption_reflexivity {
        rules.push(r(
            Atom::new("isacCC", vec![v("C"), v("C")]),
            vec![Atom::new(CLASSNAME, vec![v("C")])],
        ));
        rules.push(r(
            Atom::new("isarRR", vec![v("R"), v("R")]),
            vec![Atom::new(ROLENAME, vec![v("R")])],
        ));
    }

    rules
}

/// Which argument positions of an interface predicate hold class and role
/// symbols. Positions not listed hold individuals and are never filtered.
pub struct PredicateShape {
    pub name: &'static str,
    pub class_positions: &'static [usize],
    pub role_positions: &'static [usize],
}

/// Every predicate whose facts may cross the interface, with its filter
/// positions. `diff` stays out: inequality is not imported.
pub const INTERFACE_PREDICATES: &[PredicateShape] = &[
    PredicateShape { name: "isacCC", class_positions: &[0, 1], role_positions: &[] },
    PredicateShape { name: "isacCR", class_positions: &[0, 2], role_positions: &[1] },
    PredicateShape { name: "isacCI", class_positions: &[0, 2], role_positions: &[1] },
    PredicateShape { name: "isacRC", class_positions: &[1], role_positions: &[0] },
    PredicateShape { name: "isacRR", class_positions: &[2], role_positions: &[0, 1] },
    PredicateShape { name: "isacRI", class_positions: &[2], role_positions: &[0, 1] },
    PredicateShape { name: "isacIC", class_positions: &[1], role_positions: &[0] },
    PredicateShape { name: "isacIR", class_positions: &[2], role_positions: &[0, 1] },
    PredicateShape { name: "isacII", class_positions: &[2], role_positions: &[0, 1] },
    PredicateShape { name: "isarRR", class_positions: &[], role_positions: &[0, 1] },
    PredicateShape { name: "isarRI", class_positions: &[], role_positions: &[0, 1] },
    PredicateShape { name: "refl", class_positions: &[], role_positions: &[0] },
    PredicateShape { name: "irrefl", class_positions: &[], role_positions: &[0] },
    PredicateShape { name: "disjcCC", class_positions: &[0, 1], role_positions: &[] },
    PredicateShape { name: "disjcCI", class_positions: &[0], role_positions: &[1] },
    PredicateShape { name: "disjcRC", class_positions: &[1], role_positions: &[0] },
    PredicateShape { name: "disjcRR", class_positions: &[], role_positions: &[0, 1] },
    PredicateShape { name: "disjcRI", class_positions: &[], role_positions: &[0, 1] },
    PredicateShape { name: "disjcIC", class_positions: &[1], role_positions: &[0] },
    PredicateShape { name: "disjcIR", class_positions: &[], role_positions: &[0, 1] },
    PredicateShape { name: "disjcII", class_positions: &[], role_positions: &[0, 1] },
    PredicateShape { name: "disjrRR", class_positions: &[], role_positions: &[0, 1] },
    PredicateShape { name: "disjrRI", class_positions: &[], role_positions: &[0, 1] },
    PredicateShape { name: INSTC, class_positions: &[0], role_positions: &[] },
    PredicateShape { name: INSTR, class_positions: &[], role_positions: &[0] },
];

/// The class and role symbols whose facts a hybrid knowledge base imports
/// from the ontology side.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ImportSpec {
    pub class_imports: BTreeSet<Iri>,
    pub role_imports: BTreeSet<Iri>,
}

impl ImportSpec {
    /// Whether a fact of the given shape passes the filter: every class
    /// position must hold an imported class (the reserved top filler always
    /// passes) and every role position an imported role. Individual
    /// positions are unconstrained.
    pub fn admits(&self, shape: &PredicateShape, args: &[&str]) -> bool {
        shape
            .class_positions
            .iter()
            .all(|&i| is_thing(args[i]) || self.class_imports.contains(args[i]))
            && shape.role_positions.iter().all(|&i| self.role_imports.contains(args[i]))
    }
}

/// Splits a signature into class and role imports using the ontology the
/// facts will come from; symbols the ontology never uses in a class or role
/// position cannot occur in its saturation and are dropped.
pub fn interface_spec(signature: &BTreeSet<Iri>, source: &Ontology) -> ImportSpec {
    let vocab = source.vocab();
    ImportSpec {
        class_imports: signature.intersection(&vocab.classes).cloned().collect(),
        role_imports: signature.intersection(&vocab.object_properties).cloned().collect(),
    }
}

//! Semi-naive bottom-up evaluation.
//!
//! Rules are compiled once: variables become frame slots, constants are
//! interned, and each body atom gets a static probe position (a constant or
//! an already-bound variable) for index lookups. Per iteration, each rule is
//! swept once per body position with that position restricted to the delta,
//! earlier positions to pre-delta rows, and later positions unrestricted;
//! new facts are staged and become the next delta, so every derivation uses
//! at least one delta fact after the first iteration.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use super::store::{FactStore, Relation};
use super::{Program, Rule, Term};
use crate::model::{AnswerTable, Iri};

#[derive(Clone, Debug, Default)]
pub struct EvalStats {
    /// Fixpoint passes, counting the final pass that derives nothing.
    pub iterations: usize,
    /// Facts added beyond the base store, empty-body rule seeds included.
    pub derived_facts: usize,
    /// Complete body matches (at most one head insert attempt each).
    pub rule_firings: usize,
    pub wall_millis: u64,
}

enum CArg {
    Const(u32),
    /// Slot plus whether this syntactic position is the slot's first
    /// occurrence in body scan order (it binds rather than checks).
    Var(usize, bool),
}

struct CAtom {
    pred: u32,
    args: Vec<CArg>,
    /// Argument position usable for an index probe: a constant, or a
    /// variable bound by an earlier body atom.
    probe: Option<usize>,
}

struct CRule {
    head: CAtom,
    body: Vec<CAtom>,
    n_slots: usize,
}

fn compile_rule(r: &Rule, store: &mut FactStore) -> CRule {
    assert!(r.is_range_restricted(), "rule is not range-restricted: {r}");
    // Slots are assigned in body scan order so head variables resolve to
    // body-bound slots.
    let mut slots: HashMap<&str, usize> = HashMap::new();
    let mut seen: HashSet<usize> = HashSet::new();
    let mut bound_before: HashSet<usize> = HashSet::new();
    let mut body = Vec::with_capacity(r.body.len());
    for a in &r.body {
        let mut probe = None;
        let mut args = Vec::with_capacity(a.args.len());
        for (pos, t) in a.args.iter().enumerate() {
            match t {
                Term::Const(c) => {
                    if probe.is_none() {
                        probe = Some(pos);
                    }
                    args.push(CArg::Const(store.intern(c)));
                }
                Term::Var(v) => {
                    let n = slots.len();
                    let slot = *slots.entry(v.as_str()).or_insert(n);
                    if probe.is_none() && bound_before.contains(&slot) {
                        probe = Some(pos);
                    }
                    args.push(CArg::Var(slot, seen.insert(slot)));
                }
            }
        }
        for t in &a.args {
            if let Term::Var(v) = t {
                bound_before.insert(slots[v.as_str()]);
            }
        }
        body.push(CAtom { pred: store.intern(&a.pred), args, probe });
    }
    let head_args = r
        .head
        .args
        .iter()
        .map(|t| match t {
            Term::Const(c) => CArg::Const(store.intern(c)),
            Term::Var(v) => CArg::Var(slots[v.as_str()], false),
        })
        .collect();
    let head = CAtom { pred: store.intern(&r.head.pred), args: head_args, probe: None };
    CRule { head, body, n_slots: slots.len() }
}

pub fn evaluate(p: &Program, base: FactStore) -> (FactStore, EvalStats) {
    let (store, stats, timed_out) = evaluate_with_deadline(p, base, None);
    debug_assert!(!timed_out);
    (store, stats)
}

/// Like [`evaluate`], stopping early (with the flag set) once `deadline`
/// passes; the returned store is then a sound but possibly incomplete
/// prefix of the fixpoint. Checked per rule per iteration.
pub fn evaluate_with_deadline(
    p: &Program,
    base: FactStore,
    deadline: Option<Instant>,
) -> (FactStore, EvalStats, bool) {
    let start = Instant::now();
    let mut store = base;
    let mut stats = EvalStats::default();
    let mut timed_out = false;
    let rules: Vec<CRule> = p.rules.iter().map(|r| compile_rule(r, &mut store)).collect();
    let expired = || deadline.is_some_and(|d| Instant::now() >= d);

    // Empty-body rules seed the initial delta once.
    for r in rules.iter().filter(|r| r.body.is_empty()) {
        stats.rule_firings += 1;
        let row = r
            .head
            .args
            .iter()
            .map(|a| match a {
                CArg::Const(s) => *s,
                CArg::Var(..) => unreachable!("range restriction"),
            })
            .collect();
        if store.insert_raw(r.head.pred, r.head.args.len(), row) {
            stats.derived_facts += 1;
        }
    }

    let mut staged: HashSet<(u32, Vec<u32>)> = HashSet::new();
    let mut frame: Vec<Option<u32>> = Vec::new();
    'fixpoint: loop {
        stats.iterations += 1;
        for r in rules.iter().filter(|r| !r.body.is_empty()) {
            if expired() {
                timed_out = true;
                break 'fixpoint;
            }
            for dpos in 0..r.body.len() {
                let Some(rel) = store.rel(r.body[dpos].pred) else { continue };
                if rel.delta_start() == rel.len() {
                    continue;
                }
                frame.clear();
                frame.resize(r.n_slots, None);
                join(&store, r, 0, dpos, &mut frame, &mut staged, &mut stats);
            }
        }
        store.advance_deltas();
        let mut fresh = 0usize;
        for (pred, row) in staged.drain() {
            let arity = row.len();
            if store.insert_raw(pred, arity, row) {
                fresh += 1;
            }
        }
        stats.derived_facts += fresh;
        if fresh == 0 {
            break;
        }
    }
    stats.wall_millis = u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX);
    debug_assert!(stats.derived_facts <= stats.rule_firings || timed_out);
    (store, stats, timed_out)
}

fn join(
    store: &FactStore,
    rule: &CRule,
    idx: usize,
    dpos: usize,
    frame: &mut Vec<Option<u32>>,
    staged: &mut HashSet<(u32, Vec<u32>)>,
    stats: &mut EvalStats,
) {
    if idx == rule.body.len() {
        stats.rule_firings += 1;
        let row = rule
            .head
            .args
            .iter()
            .map(|a| match a {
                CArg::Const(s) => *s,
                CArg::Var(slot, _) => frame[*slot].expect("head variable bound by body"),
            })
            .collect();
        staged.insert((rule.head.pred, row));
        return;
    }
    let atom = &rule.body[idx];
    let Some(rel) = store.rel(atom.pred) else { return };
    assert_eq!(rel.arity(), atom.args.len(), "body atom arity mismatch");
    let (lo, hi) = match idx.cmp(&dpos) {
        std::cmp::Ordering::Less => (0, rel.delta_start()),
        std::cmp::Ordering::Equal => (rel.delta_start(), rel.len()),
        std::cmp::Ordering::Greater => (0, rel.len()),
    };
    if lo >= hi {
        return;
    }
    match atom.probe {
        Some(pos) => {
            let sym = match &atom.args[pos] {
                CArg::Const(s) => *s,
                CArg::Var(slot, _) => frame[*slot].expect("probe variable bound"),
            };
            let Some(ids) = rel.ids_at(pos, sym) else { return };
            let a = ids.partition_point(|&id| id < lo);
            let b = ids.partition_point(|&id| id < hi);
            for &id in &ids[a..b] {
                try_row(store, rel, rule, idx, dpos, id, frame, staged, stats);
            }
        }
        None => {
            for id in lo..hi {
                try_row(store, rel, rule, idx, dpos, id, frame, staged, stats);
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn try_row(
    store: &FactStore,
    rel: &Relation,
    rule: &CRule,
    idx: usize,
    dpos: usize,
    id: u32,
    frame: &mut Vec<Option<u32>>,
    staged: &mut HashSet<(u32, Vec<u32>)>,
    stats: &mut EvalStats,
) {
    let atom = &rule.body[idx];
    let row = rel.row(id);
    let mut ok = true;
    let mut checked = 0;
    for (pos, arg) in atom.args.iter().enumerate() {
        checked = pos + 1;
        match arg {
            CArg::Const(s) => {
                if row[pos] != *s {
                    ok = false;
                    break;
                }
            }
            CArg::Var(slot, first) => {
                if *first {
                    frame[*slot] = Some(row[pos]);
                } else if frame[*slot] != Some(row[pos]) {
                    ok = false;
                    break;
                }
            }
        }
    }
    if ok {
        join(store, rule, idx + 1, dpos, frame, staged, stats);
    }
    for arg in atom.args.iter().take(checked) {
        if let CArg::Var(slot, true) = arg {
            frame[*slot] = None;
        }
    }
}

/// Projects the query predicate's tuples into a sorted, deduplicated table
/// under the given variable header.
pub fn answers(store: &FactStore, query_pred: &str, header: &[String]) -> AnswerTable {
    if let Some(arity) = store.arity_of(query_pred) {
        assert_eq!(arity, header.len(), "answer arity does not match header");
    }
    let rows = store
        .rows(query_pred)
        .map(|r| r.into_iter().map(Iri::new).collect::<Vec<_>>());
    AnswerTable::new(header.to_vec(), rows)
}

#[cfg(test)]
mod tests {
    use super::super::{Atom, GroundAtom};
    use super::*;

    fn v(s: &str) -> Term {
        Term::Var(s.to_string())
    }

    fn c(s: &str) -> Term {
        Term::Const(s.to_string())
    }

    fn store_of(facts: &[(&str, &[&str])]) -> FactStore {
        let mut s = FactStore::new();
        for (p, args) in facts {
            s.insert(p, args);
        }
        s
    }

    fn tc_program() -> Program {
        Program::new(vec![
            Rule::new(
                Atom::new("path", vec![v("X"), v("Y")]),
                vec![Atom::new("edge", vec![v("X"), v("Y")])],
            ),
            Rule::new(
                Atom::new("path", vec![v("X"), v("Z")]),
                vec![
                    Atom::new("edge", vec![v("X"), v("Y")]),
                    Atom::new("path", vec![v("Y"), v("Z")]),
                ],
            ),
        ])
    }

    #[test]
    fn transitive_closure() {
        let base = store_of(&[("edge", &["a", "b"]), ("edge", &["b", "c"])]);
        let (store, stats) = evaluate(&tc_program(), base);
        for expected in [["a", "b"], ["b", "c"], ["a", "c"]] {
            assert!(store.contains("path", &expected), "missing path{expected:?}");
        }
        assert_eq!(store.count_pred("path"), 3);
        assert_eq!(stats.derived_facts, 3);
        assert_eq!(stats.iterations, 3, "two productive passes plus the empty one");
        assert!(stats.derived_facts <= stats.rule_firings);
    }

    #[test]
    fn empty_program_is_one_iteration() {
        let base = store_of(&[("edge", &["a", "b"])]);
        let (store, stats) = evaluate(&Program::new(vec![]), base);
        assert_eq!(store.count(), 1);
        assert_eq!(stats.iterations, 1);
        assert_eq!(stats.derived_facts, 0);
    }

    #[test]
    fn empty_body_rules_seed_once() {
        let p = Program::new(vec![Rule::new(Atom::new("q", vec![c("a")]), vec![])]);
        let (store, stats) = evaluate(&p, FactStore::new());
        assert!(store.contains("q", &["a"]));
        assert_eq!(stats.derived_facts, 1);
        assert_eq!(stats.rule_firings, 1);
        assert_eq!(stats.iterations, 1);
    }

    #[test]
    fn constants_probe_indexes() {
        let p = Program::new(vec![Rule::new(
            Atom::new("from_a", vec![v("Y")]),
            vec![Atom::new("edge", vec![c("a"), v("Y")])],
        )]);
        let base = store_of(&[("edge", &["a", "b"]), ("edge", &["c", "d"])]);
        let (store, _) = evaluate(&p, base);
        assert!(store.contains("from_a", &["b"]));
        assert_eq!(store.count_pred("from_a"), 1);
    }

    #[test]
    fn repeated_variables_filter() {
        let p = Program::new(vec![Rule::new(
            Atom::new("loop", vec![v("X")]),
            vec![Atom::new("edge", vec![v("X"), v("X")])],
        )]);
        let base = store_of(&[("edge", &["a", "a"]), ("edge", &["a", "b"])]);
        let (store, _) = evaluate(&p, base);
        assert!(store.contains("loop", &["a"]));
        assert_eq!(store.count_pred("loop"), 1);
    }

    #[test]
    fn duplicate_derivations_count_once() {
        let p = Program::new(vec![
            Rule::new(Atom::new("p", vec![v("X")]), vec![Atom::new("e", vec![v("X")])]),
            Rule::new(Atom::new("p", vec![v("X")]), vec![Atom::new("f", vec![v("X")])]),
        ]);
        let base = store_of(&[("e", &["a"]), ("f", &["a"])]);
        let (store, stats) = evaluate(&p, base);
        assert_eq!(store.count_pred("p"), 1);
        assert_eq!(stats.derived_facts, 1);
        assert_eq!(stats.rule_firings, 2);
    }

    #[test]
    fn zero_arity_heads() {
        let p = Program::new(vec![Rule::new(
            Atom::new("hit", vec![]),
            vec![Atom::new("e", vec![v("X"), v("X")])],
        )]);
        let (store, _) = evaluate(&p, store_of(&[("e", &["a", "a"])]));
        assert!(store.contains("hit", &[]));
        assert_eq!(store.count_pred("hit"), 1);
    }

    #[test]
    fn rule_order_does_not_change_the_store() {
        let base1 = store_of(&[("edge", &["a", "b"]), ("edge", &["b", "c"]), ("edge", &["c", "d"])]);
        let base2 = store_of(&[("edge", &["c", "d"]), ("edge", &["a", "b"]), ("edge", &["b", "c"])]);
        let p1 = tc_program();
        let p2 = Program::new(p1.rules.iter().rev().cloned().collect());
        let (s1, _) = evaluate(&p1, base1);
        let (s2, _) = evaluate(&p2, base2);
        assert_eq!(s1.all_facts(), s2.all_facts());
    }

    #[test]
    fn expired_deadline_flags_timeout() {
        let base = store_of(&[("edge", &["a", "b"])]);
        let (_, _, timed_out) =
            evaluate_with_deadline(&tc_program(), base, Some(Instant::now()));
        assert!(timed_out);
    }

    #[test]
    #[should_panic(expected = "range-restricted")]
    fn unrestricted_rules_are_rejected() {
        let p = Program::new(vec![Rule::new(
            Atom::new("p", vec![v("Z")]),
            vec![Atom::new("e", vec![v("X")])],
        )]);
        evaluate(&p, FactStore::new());
    }

    #[test]
    fn answers_project_and_sort() {
        let mut s = FactStore::new();
        s.insert_fact(&GroundAtom::new("q", vec!["b".into(), "x".into()]));
        s.insert_fact(&GroundAtom::new("q", vec!["a".into(), "y".into()]));
        let t = answers(&s, "q", &["u".to_string(), "v".to_string()]);
        assert_eq!(t.header(), ["u", "v"]);
        assert_eq!(
            t.rows(),
            [
                vec![Iri::new("a"), Iri::new("y")],
                vec![Iri::new("b"), Iri::new("x")]
            ]
        );
        assert!(answers(&s, "absent", &["w".to_string()]).is_empty());
    }
}

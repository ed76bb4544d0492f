//! Interned, per-predicate fact storage with positional indexes and the
//! delta bookkeeping semi-naive evaluation needs.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::GroundAtom;

/// Deduplicated ground facts grouped by predicate. Rows are stored as
/// interned symbol ids; every argument position carries a hash index. Each
/// relation tracks where its current delta (facts added since the last
/// evaluation round) begins.
#[derive(Clone, Default)]
pub struct FactStore {
    syms: Interner,
    rels: HashMap<u32, Relation>,
}

#[derive(Clone, Default)]
struct Interner {
    map: HashMap<String, u32>,
    names: Vec<String>,
}

impl Interner {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.map.get(s) {
            return id;
        }
        let id = u32::try_from(self.names.len()).expect("symbol table overflow");
        self.names.push(s.to_string());
        self.map.insert(s.to_string(), id);
        id
    }

    fn get(&self, s: &str) -> Option<u32> {
        self.map.get(s).copied()
    }

    fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }
}

#[derive(Clone)]
pub(crate) struct Relation {
    arity: usize,
    /// Flat row storage, `arity` symbols per row, append-only. Counted
    /// separately because zero-arity relations store no symbols.
    rows: Vec<u32>,
    n_rows: u32,
    seen: HashSet<Vec<u32>>,
    /// Per position: symbol -> ascending row ids.
    index: Vec<HashMap<u32, Vec<u32>>>,
    /// First row id of the current delta.
    delta_start: u32,
}

impl Relation {
    fn new(arity: usize) -> Relation {
        Relation {
            arity,
            rows: Vec::new(),
            n_rows: 0,
            seen: HashSet::new(),
            index: (0..arity).map(|_| HashMap::new()).collect(),
            delta_start: 0,
        }
    }

    pub(crate) fn len(&self) -> u32 {
        self.n_rows
    }

    pub(crate) fn arity(&self) -> usize {
        self.arity
    }

    pub(crate) fn delta_start(&self) -> u32 {
        self.delta_start
    }

    pub(crate) fn row(&self, id: u32) -> &[u32] {
        let i = id as usize * self.arity;
        &self.rows[i..i + self.arity]
    }

    /// Ascending row ids whose `pos`-th argument is `sym`.
    pub(crate) fn ids_at(&self, pos: usize, sym: u32) -> Option<&[u32]> {
        self.index[pos].get(&sym).map(|v| v.as_slice())
    }

    fn insert(&mut self, row: Vec<u32>) -> bool {
        debug_assert_eq!(row.len(), self.arity);
        if !self.seen.insert(row.clone()) {
            return false;
        }
        let id = self.n_rows;
        for (pos, &sym) in row.iter().enumerate() {
            self.index[pos].entry(sym).or_default().push(id);
        }
        self.rows.extend(row);
        self.n_rows += 1;
        true
    }

    fn advance_delta(&mut self) {
        self.delta_start = self.len();
    }
}

impl FactStore {
    pub fn new() -> FactStore {
        FactStore::default()
    }

    /// Inserts one fact; false if it was already present. A predicate's
    /// arity is fixed by its first insertion.
    pub fn insert(&mut self, pred: &str, args: &[&str]) -> bool {
        let psym = self.syms.intern(pred);
        let row: Vec<u32> = args.iter().map(|a| self.syms.intern(a)).collect();
        self.insert_raw(psym, row.len(), row)
    }

    pub fn insert_fact(&mut self, fact: &GroundAtom) -> bool {
        let psym = self.syms.intern(&fact.pred);
        let row: Vec<u32> = fact.args.iter().map(|a| self.syms.intern(a)).collect();
        self.insert_raw(psym, row.len(), row)
    }

    pub fn contains(&self, pred: &str, args: &[&str]) -> bool {
        let Some(psym) = self.syms.get(pred) else { return false };
        let Some(rel) = self.rels.get(&psym) else { return false };
        if rel.arity != args.len() {
            return false;
        }
        let mut row = Vec::with_capacity(args.len());
        for a in args {
            match self.syms.get(a) {
                Some(s) => row.push(s),
                None => return false,
            }
        }
        rel.seen.contains(&row)
    }

    /// Total fact count across all predicates.
    pub fn count(&self) -> usize {
        self.rels.values().map(|r| r.len() as usize).sum()
    }

    pub fn count_pred(&self, pred: &str) -> usize {
        self.syms
            .get(pred)
            .and_then(|p| self.rels.get(&p))
            .map_or(0, |r| r.len() as usize)
    }

    /// Fact count over predicates accepted by the filter.
    pub fn count_matching(&self, mut keep: impl FnMut(&str) -> bool) -> usize {
        self.rels
            .iter()
            .filter(|(p, _)| keep(self.syms.name(**p)))
            .map(|(_, r)| r.len() as usize)
            .sum()
    }

    pub fn arity_of(&self, pred: &str) -> Option<usize> {
        self.syms.get(pred).and_then(|p| self.rels.get(&p)).map(|r| r.arity)
    }

    /// Predicate names, sorted.
    pub fn predicates(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.rels.keys().map(|&p| self.syms.name(p)).collect();
        out.sort_unstable();
        out
    }

    /// Resolved rows of one predicate, in insertion order.
    pub fn rows(&self, pred: &str) -> impl Iterator<Item = Vec<&str>> + '_ {
        let rel = self.syms.get(pred).and_then(|p| self.rels.get(&p));
        let len = rel.map_or(0, |r| r.len());
        (0..len).map(move |id| {
            rel.unwrap()
                .row(id)
                .iter()
                .map(|&s| self.syms.name(s))
                .collect()
        })
    }

    /// Every fact as resolved strings; canonical order for comparisons.
    pub fn all_facts(&self) -> BTreeSet<(String, Vec<String>)> {
        let mut out = BTreeSet::new();
        for (&p, rel) in &self.rels {
            let pred = self.syms.name(p).to_string();
            for id in 0..rel.len() {
                let row = rel.row(id).iter().map(|&s| self.syms.name(s).to_string()).collect();
                out.insert((pred.clone(), row));
            }
        }
        out
    }

    pub(crate) fn intern(&mut self, s: &str) -> u32 {
        self.syms.intern(s)
    }

    pub(crate) fn rel(&self, psym: u32) -> Option<&Relation> {
        self.rels.get(&psym)
    }

    pub(crate) fn insert_raw(&mut self, psym: u32, arity: usize, row: Vec<u32>) -> bool {
        let rel = self.rels.entry(psym).or_insert_with(|| Relation::new(arity));
        assert_eq!(
            rel.arity,
            arity,
            "predicate {} used with arities {} and {}",
            self.syms.name(psym),
            rel.arity,
            arity
        );
        rel.insert(row)
    }

    pub(crate) fn advance_deltas(&mut self) {
        for rel in self.rels.values_mut() {
            rel.advance_delta();
        }
    }
}

//! Magic-sets rewriting, predicate-level and without subgoal renaming.
//!
//! The rewrite guards each rule of a demanded predicate with a
//! `magic_<pred>_<adornment>` atom whose tuples describe which bindings a
//! caller actually asked for, and adds rules that derive those magic tuples
//! from caller contexts. Sideways information passing is left to right: after
//! a body atom is evaluated all of its variables count as bound.
//!
//! Demand analysis runs twice. The first pass collects every (predicate,
//! adornment) pair reachable from the goal; any predicate demanded with the
//! all-free adornment must be computed in full, so guarding its rules would
//! be pure overhead and the guards its callees emitted under the first-pass
//! adornments would no longer be fed. The second pass therefore re-derives
//! demands with every such predicate normalized to all-free, and emission
//! works from that normalized set alone.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use super::{Atom, Program, Rule, Term};

type Adornment = Vec<bool>;

fn adornment_of(args: &[Term], bound: &HashSet<String>) -> Adornment {
    args.iter()
        .map(|t| match t {
            Term::Const(_) => true,
            Term::Var(v) => bound.contains(v),
        })
        .collect()
}

fn magic_name(pred: &str, ad: &Adornment) -> String {
    let mut name = String::with_capacity(pred.len() + ad.len() + 7);
    name.push_str("magic_");
    name.push_str(pred);
    name.push('_');
    name.extend(ad.iter().map(|b| if *b { 'b' } else { 'f' }));
    name
}

/// Terms at the bound positions of `ad`, in order.
fn bound_terms(args: &[Term], ad: &Adornment) -> Vec<Term> {
    args.iter().zip(ad).filter(|(_, b)| **b).map(|(t, _)| t.clone()).collect()
}

fn head_bound_vars(head: &Atom, ad: &Adornment) -> HashSet<String> {
    head.args
        .iter()
        .zip(ad)
        .filter_map(|(t, b)| match t {
            Term::Var(v) if *b => Some(v.clone()),
            _ => None,
        })
        .collect()
}

fn collect_demands(
    goal: &Atom,
    rules_by_pred: &HashMap<&str, Vec<&Rule>>,
    unconditional: Option<&HashSet<String>>,
) -> BTreeSet<(String, Adornment)> {
    let normalize = |pred: &str, ad: Adornment| -> Adornment {
        match unconditional {
            Some(u) if u.contains(pred) => vec![false; ad.len()],
            _ => ad,
        }
    };
    let mut seen: BTreeSet<(String, Adornment)> = BTreeSet::new();
    let mut work: VecDeque<(String, Adornment)> = VecDeque::new();
    let goal_ad = adornment_of(&goal.args, &HashSet::new());
    let first = (goal.pred.clone(), normalize(&goal.pred, goal_ad));
    seen.insert(first.clone());
    work.push_back(first);
    while let Some((pred, ad)) = work.pop_front() {
        for rule in &rules_by_pred[pred.as_str()] {
            let mut bound = head_bound_vars(&rule.head, &ad);
            for atom in &rule.body {
                if rules_by_pred.contains_key(atom.pred.as_str()) {
                    let aad = adornment_of(&atom.args, &bound);
                    let demand = (atom.pred.clone(), normalize(&atom.pred, aad));
                    if seen.insert(demand.clone()) {
                        work.push_back(demand);
                    }
                }
                bound.extend(atom.vars().map(str::to_string));
            }
        }
    }
    seen
}

/// Rewrites `program` so that bottom-up evaluation only explores derivations
/// relevant to `goal`. The result computes the same `goal.pred` tuples for
/// the goal's constant bindings as the original program, and every non-magic
/// fact it derives is a fact of the original fixpoint. Errs when the goal
/// predicate has no defining rule, since there is then nothing to specialize.
pub fn magic_transform(program: &Program, goal: &Atom) -> Result<Program, String> {
    let mut rules_by_pred: HashMap<&str, Vec<&Rule>> = HashMap::new();
    for r in &program.rules {
        rules_by_pred.entry(r.head.pred.as_str()).or_default().push(r);
    }
    if !rules_by_pred.contains_key(goal.pred.as_str()) {
        return Err(format!("goal predicate {} has no defining rule", goal.pred));
    }

    let raw = collect_demands(goal, &rules_by_pred, None);
    let unconditional: HashSet<String> = raw
        .iter()
        .filter(|(_, ad)| ad.iter().all(|b| !b))
        .map(|(p, _)| p.clone())
        .collect();
    let demands = collect_demands(goal, &rules_by_pred, Some(&unconditional));

    let mut out: Vec<Rule> = Vec::new();
    let goal_ad = adornment_of(&goal.args, &HashSet::new());
    if !unconditional.contains(goal.pred.as_str()) {
        out.push(Rule::new(
            Atom::new(magic_name(&goal.pred, &goal_ad), bound_terms(&goal.args, &goal_ad)),
            vec![],
        ));
    }

    for (pred, ad) in &demands {
        let guarded = !unconditional.contains(pred);
        for rule in &rules_by_pred[pred.as_str()] {
            let guard = guarded.then(|| {
                Atom::new(magic_name(pred, ad), bound_terms(&rule.head.args, ad))
            });
            let mut bound = if guarded {
                head_bound_vars(&rule.head, ad)
            } else {
                HashSet::new()
            };
            let mut prefix: Vec<Atom> = Vec::new();
            for atom in &rule.body {
                if rules_by_pred.contains_key(atom.pred.as_str())
                    && !unconditional.contains(atom.pred.as_str())
                {
                    let aad = adornment_of(&atom.args, &bound);
                    let mut mbody = Vec::with_capacity(prefix.len() + 1);
                    mbody.extend(guard.iter().cloned());
                    mbody.extend(prefix.iter().cloned());
                    out.push(Rule::new(
                        Atom::new(magic_name(&atom.pred, &aad), bound_terms(&atom.args, &aad)),
                        mbody,
                    ));
                }
                bound.extend(atom.vars().map(str::to_string));
                prefix.push(atom.clone());
            }
            let mut body = Vec::with_capacity(rule.body.len() + 1);
            body.extend(guard);
            body.extend(rule.body.iter().cloned());
            out.push(Rule::new(rule.head.clone(), body));
        }
    }

    Ok(Program { rules: out, query_pred: program.query_pred.clone() })
}

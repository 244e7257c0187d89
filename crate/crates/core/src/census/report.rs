use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::run::{CensusState, Stage};
use crate::invariants::{InvariantSignature, Separator, Verdict, BF_POLYNOMIALS};

/// Machine-readable counts. Every pair of the universe lands in exactly one
/// of `distinct`, `equivalent`, `open` and `pending`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub universe: String,
    pub budget: String,
    pub stage: String,
    pub matrices: u64,
    pub pairs: u64,
    pub distinct: u64,
    /// Distinct pairs by the first invariant that separates them.
    pub distinct_by: BTreeMap<String, u64>,
    /// Pairs separated by exactly one invariant, by that invariant.
    pub sole_separator: BTreeMap<String, u64>,
    pub equivalent: u64,
    pub open: u64,
    /// Pairs not yet reached by an unfinished run.
    pub pending: u64,
    pub decided_percent: String,
    pub certificates: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub summary: Summary,
}

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Number of unordered pairs agreeing on `key`.
fn agreeing<'a, K: Eq + Hash>(sigs: &[&'a InvariantSignature], key: impl Fn(&'a InvariantSignature) -> K) -> u64 {
    let mut counts: HashMap<K, u64> = HashMap::new();
    for s in sigs {
        *counts.entry(key(s)).or_default() += 1;
    }
    counts.values().map(|&c| pairs(c)).sum()
}

pub fn report(state: &CensusState) -> Report {
    let n = state.universe.len() as u64;
    let mut s = Summary {
        universe: state.universe.stamp(),
        budget: state.budget.to_string(),
        stage: state.stage.name().to_string(),
        matrices: n,
        pairs: pairs(n),
        ..Summary::default()
    };
    let add = |map: &mut BTreeMap<String, u64>, sep: Separator, count: u64| {
        if count > 0 {
            *map.entry(sep.to_string()).or_default() += count;
        }
    };

    if state.stage >= Stage::Signatures {
        let sigs: Vec<&InvariantSignature> = state.signatures.iter().map(|x| x.as_ref().expect("signed")).collect();
        let nb = BF_POLYNOMIALS.len();

        // first differing invariant, in the order of `differences`
        let mut prev = s.pairs;
        let j = agreeing(&sigs, |x| &x.jordan);
        add(&mut s.distinct_by, Separator::Jordan, prev - j);
        prev = j;
        for k in 0..nb {
            let here = agreeing(&sigs, |x| (&x.jordan, &x.bf[..=k]));
            add(&mut s.distinct_by, Separator::BowenFranks(k), prev - here);
            prev = here;
        }
        let with_cp = agreeing(&sigs, |x| (&x.jordan, &x.bf, &x.charpoly));
        add(&mut s.distinct_by, Separator::Charpoly, prev - with_cp);
        for (sep, count) in token_splits(&sigs) {
            add(&mut s.distinct_by, sep, count);
        }

        // exactly one differing invariant
        let all = agreeing(&sigs, |x| x);
        add(
            &mut s.sole_separator,
            Separator::Jordan,
            agreeing(&sigs, |x| &x.bf) - agreeing(&sigs, |x| (&x.bf, &x.jordan)),
        );
        for k in 0..nb {
            let others = agreeing(&sigs, |x| {
                let rest: Vec<_> = x.bf.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, g)| g).collect();
                (&x.jordan, rest, &x.charpoly, &x.bmt_coset_token)
            });
            add(&mut s.sole_separator, Separator::BowenFranks(k), others - all);
        }
        add(
            &mut s.sole_separator,
            Separator::Charpoly,
            agreeing(&sigs, |x| (&x.jordan, &x.bf)) - with_cp,
        );
        for (sep, count) in token_splits(&sigs) {
            add(&mut s.sole_separator, sep, count);
        }
    }
    if state.stage >= Stage::Bmt {
        for c in state.bmt.values() {
            if c.verdict == Verdict::Distinct {
                add(&mut s.distinct_by, Separator::Bmt(c.route), 1);
                add(&mut s.sole_separator, Separator::Bmt(c.route), 1);
            }
        }
    }
    s.distinct = s.distinct_by.values().sum();

    let mut class_sizes: HashMap<usize, u64> = HashMap::new();
    for i in 0..state.universe.len() {
        *class_sizes.entry(state.class_of(i)).or_default() += 1;
    }
    s.equivalent = class_sizes.values().map(|&c| pairs(c)).sum();
    s.certificates = state.certificates.len() as u64;
    if state.stage >= Stage::Done {
        s.open = state.open.len() as u64;
    }
    s.pending = s.pairs - s.distinct - s.equivalent - s.open;
    s.decided_percent = percent(s.distinct + s.equivalent, s.pairs);
    Report { summary: s }
}

/// Pairs agreeing on everything but the class-group token, attributed to
/// the route the token stands for in their field.
fn token_splits(sigs: &[&InvariantSignature]) -> Vec<(Separator, u64)> {
    let mut groups: BTreeMap<(&_, &_, &_), Vec<&InvariantSignature>> = BTreeMap::new();
    for x in sigs {
        groups.entry((&x.jordan, &x.bf, &x.charpoly)).or_default().push(x);
    }
    let mut by_route: BTreeMap<Separator, u64> = BTreeMap::new();
    for members in groups.values() {
        let split = pairs(members.len() as u64) - agreeing(members, |x| &x.bmt_coset_token);
        if split > 0 {
            *by_route.entry(Separator::Bmt(members[0].token_route())).or_default() += split;
        }
    }
    by_route.into_iter().collect()
}

/// `100·num/den` with seven decimals, computed exactly.
fn percent(num: u64, den: u64) -> String {
    if den == 0 {
        return "0.0000000".to_string();
    }
    let scaled = (num as u128 * 1_000_000_000 + den as u128 / 2) / den as u128;
    format!("{}.{:07}", scaled / 10_000_000, scaled % 10_000_000)
}

impl Report {
    /// Plain text followed by the summary as one JSON line.
    pub fn to_text(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(out, "census report");
        let _ = writeln!(out, "universe: {}", describe_universe(&s.universe));
        let _ = writeln!(out, "budget: {}", s.budget);
        let _ = writeln!(out, "stage: {}", s.stage);
        let _ = writeln!(out, "matrices: {}", s.matrices);
        let _ = writeln!(out, "pairs: {}", s.pairs);
        let _ = writeln!(out, "distinct: {}", s.distinct);
        for (k, v) in &s.distinct_by {
            let _ = writeln!(out, "  {k}: {v}");
        }
        let _ = writeln!(out, "equivalent: {} ({} certificates)", s.equivalent, s.certificates);
        let _ = writeln!(out, "open: {}", s.open);
        if s.pending > 0 {
            let _ = writeln!(out, "pending: {}", s.pending);
        }
        let _ = writeln!(out, "decided: {}%", s.decided_percent);
        let _ = writeln!(out, "sole separator:");
        for (k, v) in &s.sole_separator {
            let _ = writeln!(out, "  {k}: {v}");
        }
        let _ = writeln!(out, "summary: {}", serde_json::to_string(s).expect("summary serializes"));
        out
    }
}

fn describe_universe(stamp: &str) -> String {
    if let Some(list) = stamp.strip_prefix("custom:") {
        let n = if list.is_empty() { 0 } else { list.split('/').count() };
        return format!("{n} listed matrices");
    }
    let (num, kind) = stamp.split_at(stamp.len().saturating_sub(1));
    match kind {
        "p" => format!(
            "2x2 nonnegative, off-diagonal entries >= 1, entry sum <= {num}, \
             period-2 matrices [[0,b],[c,0]] excluded (primitive; the irreducible count includes them)"
        ),
        "i" => format!("2x2 nonnegative, off-diagonal entries >= 1, entry sum <= {num} (irreducible)"),
        _ => stamp.to_string(),
    }
}

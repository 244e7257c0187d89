use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::store::{Record, Stamp, Store, StoreError};
use super::{CensusError, Universe};
use crate::intmat::{char_poly, IntMatrix, IntPoly};
use crate::invariants::{signature_in, BMTComparison, BmtField, InvariantSignature, Route, Separator, Verdict};
use crate::sse::graph::Key;
use crate::sse::{to_small, verify_certificate, Ball, Explorer, SSECertificate, SearchBudget};

/// How far the pipeline has got.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Started,
    Signatures,
    Bmt,
    Sse,
    Done,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Started => "started",
            Stage::Signatures => "signatures",
            Stage::Bmt => "bmt",
            Stage::Sse => "sse",
            Stage::Done => "done",
        }
    }
}

#[derive(Clone, Debug, Default)]
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Links the larger root under the smaller; false if already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        true
    }
}

/// Everything the census has established, indexed by universe position.
#[derive(Clone, Debug)]
pub struct CensusState {
    pub universe: Universe,
    pub budget: SearchBudget,
    pub stage: Stage,
    pub signatures: Vec<Option<InvariantSignature>>,
    /// Pairwise comparisons inside signature buckets, keyed by `(i, j)` with `i < j`.
    pub bmt: BTreeMap<(usize, usize), BMTComparison>,
    /// One certificate per union, from the lower index to the higher.
    pub certificates: Vec<(usize, usize, SSECertificate)>,
    classes: UnionFind,
    /// Pairs left undecided by every invariant and every search.
    pub open: Vec<(usize, usize)>,
}

impl CensusState {
    fn new(universe: Universe, budget: SearchBudget) -> Self {
        let n = universe.len();
        CensusState {
            universe,
            budget,
            stage: Stage::Started,
            signatures: vec![None; n],
            bmt: BTreeMap::new(),
            certificates: Vec::new(),
            classes: UnionFind::new(n),
            open: Vec::new(),
        }
    }

    pub fn merged(&self, i: usize, j: usize) -> bool {
        self.classes.find(i) == self.classes.find(j)
    }

    /// Representative of the proven-equivalence class of member `i`.
    pub fn class_of(&self, i: usize) -> usize {
        self.classes.find(i)
    }

    /// The invariant that separates `i` and `j`, if one does: the first
    /// signature difference, else a pairwise class comparison.
    pub fn separator(&self, i: usize, j: usize) -> Option<Separator> {
        let (a, b) = (self.signatures[i].as_ref()?, self.signatures[j].as_ref()?);
        if let Some(s) = a.differences(b).first() {
            return Some(*s);
        }
        let key = (i.min(j), i.max(j));
        match self.bmt.get(&key) {
            Some(c) if c.verdict == Verdict::Distinct => Some(Separator::Bmt(c.route)),
            _ => None,
        }
    }
}

fn stamps(universe: &Universe, budget: &SearchBudget) -> (Stamp, Stamp) {
    (Stamp::plain(), Stamp::full(&universe.stamp(), &budget.to_string()))
}

/// Runs or resumes the census. Facts already in the store under matching
/// stamps are reused; everything else is computed and appended.
pub fn run_census(universe: Universe, budget: SearchBudget, store: &mut Store) -> Result<CensusState, CensusError> {
    budget.validate()?;
    let records = store.records().to_vec();
    drive(universe, budget, &records, Some(store))
}

/// Rebuilds the state recorded in a log without computing anything. The
/// universe and budget are taken from the latest stage marker.
pub fn load_state(records: &[Record]) -> Result<CensusState, CensusError> {
    let last = records.iter().rev().find_map(|r| match r {
        Record::Stage { stamp, .. } => Some(stamp),
        _ => None,
    });
    let Some(stamp) = last else {
        return Ok(CensusState::new(Universe::from_members(Vec::new()), SearchBudget::new(1, 1)));
    };
    let bad = |what: &str| StoreError::Invalid(format!("stage marker has an unreadable {what}"));
    let universe = Universe::from_stamp(stamp.universe.as_deref().unwrap_or_default()).ok_or_else(|| bad("universe"))?;
    let budget: SearchBudget = stamp.budget.as_deref().unwrap_or_default().parse().map_err(|_| bad("budget"))?;
    drive(universe, budget, records, None)
}

fn drive(
    universe: Universe,
    budget: SearchBudget,
    records: &[Record],
    mut sink: Option<&mut Store>,
) -> Result<CensusState, CensusError> {
    let (plain, full) = stamps(&universe, &budget);
    let mut state = CensusState::new(universe, budget);
    let members = state.universe.members.clone();
    let index: HashMap<&IntMatrix, usize> = members.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let compute = sink.is_some();
    let mut emit = |recs: Vec<Record>| -> Result<(), CensusError> {
        if let Some(s) = sink.as_deref_mut() {
            s.append_all(recs)?;
        }
        Ok(())
    };
    let has_stage = |name: &str| {
        records
            .iter()
            .any(|r| matches!(r, Record::Stage { stamp, name: n } if *stamp == full && n == name))
    };
    if compute && !has_stage(Stage::Started.name()) {
        emit(vec![stage(&full, Stage::Started.name())])?;
    }

    // characteristic polynomial groups
    let mut groups: BTreeMap<IntPoly, Vec<usize>> = BTreeMap::new();
    for (i, m) in members.iter().enumerate() {
        groups.entry(char_poly(m)?).or_default().push(i);
    }
    let mut fields: HashMap<IntPoly, Option<BmtField>> = HashMap::new();
    let mut field = |p: &IntPoly| -> Result<Option<BmtField>, CensusError> {
        if let Some(f) = fields.get(p) {
            return Ok(f.clone());
        }
        let f = BmtField::for_charpoly(p)?;
        fields.insert(p.clone(), f.clone());
        Ok(f)
    };

    // signatures
    let known: HashMap<&IntMatrix, &InvariantSignature> = records
        .iter()
        .filter_map(|r| match r {
            Record::Sig {
                stamp,
                matrix,
                signature,
            } if *stamp == plain => Some((matrix, signature)),
            _ => None,
        })
        .collect();
    for (p, idx) in &groups {
        let missing: Vec<usize> = idx.iter().copied().filter(|i| !known.contains_key(&members[*i])).collect();
        for &i in idx {
            if let Some(s) = known.get(&members[i]) {
                state.signatures[i] = Some((*s).clone());
            }
        }
        if missing.is_empty() {
            continue;
        }
        if !compute {
            return Ok(state);
        }
        let f = field(p)?;
        let sigs: Vec<InvariantSignature> = missing
            .par_iter()
            .map(|&i| signature_in(&members[i], f.as_ref()))
            .collect::<Result<_, _>>()?;
        let mut recs = Vec::new();
        for (&i, s) in missing.iter().zip(sigs) {
            recs.push(Record::Sig {
                stamp: plain.clone(),
                matrix: members[i].clone(),
                signature: s.clone(),
            });
            state.signatures[i] = Some(s);
        }
        emit(recs)?;
    }
    finish_stage(&mut state, Stage::Signatures, &full, &has_stage, compute, &mut emit)?;
    log::info!("signatures: {} matrices", members.len());

    // pairwise class comparison inside signature buckets
    let buckets = buckets(&state);
    let cmp_known: HashMap<(&IntMatrix, &IntMatrix), BMTComparison> = records
        .iter()
        .filter_map(|r| match r {
            Record::Cmp {
                stamp,
                a,
                b,
                verdict,
                route,
            } if *stamp == plain => Some((
                (a, b),
                BMTComparison {
                    verdict: *verdict,
                    route: *route,
                },
            )),
            _ => None,
        })
        .collect();
    for bucket in &buckets {
        let pairs: Vec<(usize, usize)> = bucket
            .iter()
            .enumerate()
            .flat_map(|(k, &i)| bucket[k + 1..].iter().map(move |&j| (i, j)))
            .collect();
        let mut todo = Vec::new();
        for &(i, j) in &pairs {
            match cmp_known.get(&(&members[i], &members[j])) {
                Some(c) => {
                    state.bmt.insert((i, j), *c);
                }
                None => todo.push((i, j)),
            }
        }
        if todo.is_empty() {
            continue;
        }
        if !compute {
            return Ok(state);
        }
        let p = &state.signatures[bucket[0]].as_ref().expect("signed").charpoly;
        let f = field(p)?;
        let got: Vec<BMTComparison> = todo
            .par_iter()
            .map(|&(i, j)| match &f {
                Some(f) => f.compare(&members[i], &members[j]),
                None => Ok(BMTComparison {
                    verdict: Verdict::NecessaryConditionHolds,
                    route: Route::TrivialLambda,
                }),
            })
            .collect::<Result<_, _>>()?;
        let mut recs = Vec::new();
        for (&(i, j), c) in todo.iter().zip(got) {
            recs.push(Record::Cmp {
                stamp: plain.clone(),
                a: members[i].clone(),
                b: members[j].clone(),
                verdict: c.verdict,
                route: c.route,
            });
            state.bmt.insert((i, j), c);
        }
        emit(recs)?;
    }
    finish_stage(&mut state, Stage::Bmt, &full, &has_stage, compute, &mut emit)?;
    log::info!("class comparisons: {} pairs", state.bmt.len());

    // equivalence search inside characteristic polynomial groups
    let mut stored_certs: BTreeMap<usize, Vec<(usize, usize, SSECertificate)>> = BTreeMap::new();
    let mut seen_certs = std::collections::HashSet::new();
    for r in records {
        if let Record::Cert { stamp, cert } = r {
            if *stamp != full {
                continue;
            }
            if let (Some(&i), Some(&j)) = (index.get(&cert.from), index.get(&cert.to)) {
                seen_certs.insert((i, j));
                stored_certs.entry(i).or_default().push((i, j, cert.clone()));
            }
        }
    }
    for (p, idx) in &groups {
        if idx.len() < 2 {
            continue;
        }
        let name = format!("sse:{p}");
        let edges = if has_stage(&name) {
            let mut e = Vec::new();
            for i in idx {
                for (a, b, c) in stored_certs.get(i).into_iter().flatten() {
                    if !verify_certificate(c) {
                        return Err(StoreError::Invalid(format!("certificate from {} to {} does not verify", c.from, c.to)).into());
                    }
                    e.push((*a, *b, c.clone()));
                }
            }
            e
        } else {
            if !compute {
                return Ok(state);
            }
            let e = link_group(idx, &members, &state.budget)?;
            let mut recs: Vec<Record> = e
                .iter()
                .filter(|(a, b, _)| !seen_certs.contains(&(*a, *b)))
                .map(|(_, _, c)| Record::Cert {
                    stamp: full.clone(),
                    cert: c.clone(),
                })
                .collect();
            recs.push(stage(&full, &name));
            emit(recs)?;
            e
        };
        for (a, b, c) in edges {
            if state.classes.union(a, b) {
                state.certificates.push((a, b, c));
            }
        }
        check_group(&state, idx)?;
    }
    state.certificates.sort_by_key(|(a, b, _)| (*a, *b));
    finish_stage(&mut state, Stage::Sse, &full, &has_stage, compute, &mut emit)?;
    log::info!("equivalence search: {} unions", state.certificates.len());

    for bucket in &buckets {
        for (k, &i) in bucket.iter().enumerate() {
            for &j in &bucket[k + 1..] {
                let distinct = state.bmt.get(&(i, j)).is_some_and(|c| c.verdict == Verdict::Distinct);
                if !distinct && !state.merged(i, j) {
                    state.open.push((i, j));
                }
            }
        }
    }
    finish_stage(&mut state, Stage::Done, &full, &has_stage, compute, &mut emit)?;
    Ok(state)
}

fn stage(stamp: &Stamp, name: &str) -> Record {
    Record::Stage {
        stamp: stamp.clone(),
        name: name.to_string(),
    }
}

fn finish_stage(
    state: &mut CensusState,
    s: Stage,
    full: &Stamp,
    has_stage: &impl Fn(&str) -> bool,
    compute: bool,
    emit: &mut impl FnMut(Vec<Record>) -> Result<(), CensusError>,
) -> Result<(), CensusError> {
    if compute && !has_stage(s.name()) {
        emit(vec![stage(full, s.name())])?;
    }
    state.stage = s;
    Ok(())
}

/// Members grouped by identical signature, in signature order; only
/// groups with at least two members.
fn buckets(state: &CensusState) -> Vec<Vec<usize>> {
    let mut map: BTreeMap<&InvariantSignature, Vec<usize>> = BTreeMap::new();
    for (i, s) in state.signatures.iter().enumerate() {
        if let Some(s) = s {
            map.entry(s).or_default().push(i);
        }
    }
    map.into_values().filter(|v| v.len() > 1).collect()
}

/// No pair inside the group may be both merged and separated.
fn check_group(state: &CensusState, idx: &[usize]) -> Result<(), CensusError> {
    for (k, &i) in idx.iter().enumerate() {
        for &j in &idx[k + 1..] {
            if state.merged(i, j) {
                if let Some(sep) = state.separator(i, j) {
                    return Err(CensusError::Contradiction {
                        a: state.universe.members[i].to_string(),
                        b: state.universe.members[j].to_string(),
                        separator: sep.to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Union edges with certificates for one group: members sharing a
/// permutation class are joined directly, then the balls of radius
/// `⌈depth/2⌉` around the classes are intersected and pairs meeting within
/// `depth` steps are joined shortest first.
fn link_group(
    idx: &[usize],
    members: &[IntMatrix],
    budget: &SearchBudget,
) -> Result<Vec<(usize, usize, SSECertificate)>, CensusError> {
    let explorer = Explorer::new(budget.clone());
    let radius = budget.max_depth.div_ceil(2);
    let mut starts: Vec<Key> = Vec::new();
    let mut rep: Vec<usize> = Vec::new();
    let mut balls: Vec<Ball> = Vec::new();
    let mut edges = Vec::new();
    let mut uf = UnionFind::new(members.len());
    for &i in idx {
        let small = to_small(&members[i])?;
        let key = Key::of(&small.canonical().0);
        match starts.iter().position(|k| *k == key) {
            Some(s) => {
                let cert = crate::sse::graph::certificate_with(&members[rep[s]], &members[i], &[key], budget);
                assert!(verify_certificate(&cert), "permutation certificate must verify");
                uf.union(rep[s], i);
                edges.push((rep[s], i, cert));
            }
            None => {
                starts.push(key);
                rep.push(i);
                balls.push(explorer.ball(&small, radius));
            }
        }
    }
    let mut meets: HashMap<Key, Vec<(usize, u32)>> = HashMap::new();
    for (s, ball) in balls.iter().enumerate() {
        for (k, &(d, _)) in &ball.nodes {
            meets.entry(*k).or_default().push((s, d as u32));
        }
    }
    let mut best: BTreeMap<(usize, usize), (u32, Key)> = BTreeMap::new();
    for (z, list) in &meets {
        for (x, &(s, ds)) in list.iter().enumerate() {
            for &(t, dt) in &list[x + 1..] {
                if ds + dt > budget.max_depth {
                    continue;
                }
                let key = (s.min(t), s.max(t));
                let cand = (ds + dt, *z);
                best.entry(key).and_modify(|b| *b = (*b).min(cand)).or_insert(cand);
            }
        }
    }
    let mut order: Vec<(u32, usize, usize, Key)> = best.into_iter().map(|((s, t), (d, z))| (d, s, t, z)).collect();
    order.sort();
    for (_, s, t, z) in order {
        let (a, b) = (rep[s], rep[t]);
        if !uf.union(a, b) {
            continue;
        }
        let mut path = balls[s].path_to(&z).expect("meeting node lies in both balls");
        let mut back = balls[t].path_to(&z).expect("meeting node lies in both balls");
        back.pop();
        back.reverse();
        path.extend(back);
        let cert = crate::sse::graph::certificate_with(&members[a], &members[b], &path, budget);
        assert!(verify_certificate(&cert), "stitched certificate must verify");
        edges.push((a, b, cert));
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{enumerate_universe, report};

    fn m(s: &str) -> IntMatrix {
        s.parse().unwrap()
    }

    fn run(u: Universe, budget: SearchBudget) -> (tempfile::TempDir, CensusState) {
        let dir = tempfile::tempdir().unwrap();
        let mut store = Store::open(dir.path().join("log")).unwrap();
        let st = run_census(u, budget, &mut store).unwrap();
        (dir, st)
    }

    #[test]
    fn example_pair_is_separated_by_the_class_invariant() {
        let u = Universe::from_members(vec![m("2:14,2,1,0"), m("2:13,5,3,1")]);
        let (_d, st) = run(u, SearchBudget::new(2, 60));
        assert_eq!(st.stage, Stage::Done);
        assert!(!st.merged(0, 1));
        assert_eq!(st.separator(0, 1), Some(Separator::Bmt(Route::Picard)));
        let r = report(&st).summary;
        assert_eq!((r.pairs, r.distinct, r.equivalent, r.open), (1, 1, 0, 0));
        assert_eq!(r.distinct_by.get("BMT(Pic(O))"), Some(&1));
        assert_eq!(r.sole_separator.get("BMT(Pic(O))"), Some(&1));
    }

    #[test]
    fn conjugate_pair_merges_in_one_step() {
        let a = m("2:3,1,2,5");
        let b = a.permute(&[1, 0]).unwrap();
        let (_d, st) = run(Universe::from_members(vec![a, b]), SearchBudget::new(1, 30));
        assert!(st.merged(0, 1));
        assert_eq!(st.certificates.len(), 1);
        assert_eq!(st.certificates[0].2.len(), 1);
        assert!(verify_certificate(&st.certificates[0].2));
        assert_eq!(report(&st).summary.equivalent, 1);
    }

    #[test]
    fn resume_reproduces_the_state() {
        let u = enumerate_universe(6, true);
        let b = SearchBudget::new(2, 18);
        let (dir, whole) = run(u.clone(), b.clone());
        let lines: Vec<String> = std::fs::read_to_string(dir.path().join("log"))
            .unwrap()
            .lines()
            .map(str::to_string)
            .collect();
        for cut in [1, lines.len() / 3, lines.len() / 2, lines.len() - 2] {
            let d2 = tempfile::tempdir().unwrap();
            let path = d2.path().join("log");
            let mut text = lines[..cut].join("\n");
            text.push_str("\nCMP|v=");
            std::fs::write(&path, text).unwrap();
            let mut store = Store::open(&path).unwrap();
            let resumed = run_census(u.clone(), b.clone(), &mut store).unwrap();
            assert_eq!(report(&resumed), report(&whole));
            assert_eq!(resumed.open, whole.open);
            assert_eq!(resumed.certificates, whole.certificates);
            let replayed = load_state(&Store::read(&path).unwrap()).unwrap();
            assert_eq!(report(&replayed), report(&whole));
        }
    }

    #[test]
    fn partial_log_reports_pending_pairs() {
        let u = enumerate_universe(5, true);
        let (dir, whole) = run(u, SearchBudget::new(1, 15));
        let recs = Store::read(dir.path().join("log")).unwrap();
        let partial = load_state(&recs[..3]).unwrap();
        let r = report(&partial).summary;
        assert_eq!(r.pairs, report(&whole).summary.pairs);
        assert!(r.pending > 0);
        assert_eq!(r.distinct + r.equivalent + r.open + r.pending, r.pairs);
    }

    #[test]
    fn empty_log_gives_an_empty_report() {
        let st = load_state(&[]).unwrap();
        let r = report(&st).summary;
        assert_eq!((r.matrices, r.pairs, r.distinct, r.equivalent, r.open, r.pending), (0, 0, 0, 0, 0, 0));
    }

    #[test]
    fn tampered_certificate_is_refused() {
        let u = Universe::from_members(vec![m("2:3,1,2,5"), m("2:5,2,1,3")]);
        let b = SearchBudget::new(1, 30);
        let (dir, _) = run(u, b);
        let path = dir.path().join("log");
        let text = std::fs::read_to_string(&path).unwrap();
        let cert = text.lines().find(|l| l.starts_with("CERT|")).unwrap().to_string();
        let bad = cert.replacen(";R=2:0,1,1,0", ";R=2:0,1,1,1", 1);
        assert_ne!(bad, cert);
        std::fs::write(&path, text.replace(&cert, &bad)).unwrap();
        let err = load_state(&Store::read(&path).unwrap()).unwrap_err();
        assert!(matches!(err, CensusError::Store(StoreError::Invalid(_))), "{err}");
    }
}

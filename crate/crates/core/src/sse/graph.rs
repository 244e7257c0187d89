//! The search graph: nodes are matrices up to simultaneous permutation
//! (stored as their least representative), edges are elementary steps.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;

use super::factor;
use super::small::{Mat, MAX_DIM};
use super::{ElementaryStep, SSECertificate, SearchBudget, StopReason};
use crate::intmat::IntMatrix;

/// Compact node key: dimension and entries.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Key {
    n: u8,
    e: [u16; MAX_DIM * MAX_DIM],
}

impl Key {
    pub fn of(m: &Mat) -> Self {
        let n = m.rows();
        let mut e = [0u16; MAX_DIM * MAX_DIM];
        for i in 0..n {
            for j in 0..n {
                e[i * MAX_DIM + j] = u16::try_from(m.get(i, j)).expect("entry fits the node key");
            }
        }
        Key { n: n as u8, e }
    }

    pub fn mat(&self) -> Mat {
        let n = self.n as usize;
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.e[i * MAX_DIM + j] as i64);
            }
        }
        m
    }
}

/// Every `S·R` within the budget, canonicalized, deduplicated, with factors
/// adjusted so that `S·R` is the canonical representative.
pub fn neighbors(a: &Mat, budget: &SearchBudget) -> Vec<(Mat, Mat, Mat)> {
    let n = a.rows();
    let cap = i64::try_from(budget.max_entry_sum).unwrap_or(i64::MAX);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for m in budget.inner_dims(n) {
        factor::for_each_factorization(a, m, &mut |terms| {
            let (r, s) = factor::to_pair(n, terms);
            let b = s.mul(&r);
            if b.entry_sum() > cap || b.entry_sum() > u16::MAX as i64 {
                return;
            }
            let (c, p) = b.canonical();
            if seen.insert(c) {
                out.push((c, r.permute_cols(p), s.permute_rows(p)));
            }
        });
    }
    out
}

/// Neighbor lists with a shared cache.
pub struct Explorer {
    budget: SearchBudget,
    cache: RwLock<Cache>,
}

#[derive(Default)]
struct Cache {
    lists: HashMap<Key, Arc<[Key]>>,
    /// Total length of the cached lists.
    keys: usize,
}

/// Upper bound on the number of cached neighbor keys (about 20 bytes each).
const CACHE_KEYS: usize = 20_000_000;

pub enum Path {
    /// Canonical nodes from the start to the goal.
    Found(Vec<Key>),
    NotFound(StopReason, usize),
}

/// Nodes within a radius of a start, with their distances and BFS parents.
pub struct Ball {
    pub start: Key,
    pub nodes: HashMap<Key, (u8, Key)>,
}

impl Explorer {
    pub fn new(budget: SearchBudget) -> Self {
        Explorer {
            budget,
            cache: RwLock::new(Cache::default()),
        }
    }

    pub fn targets(&self, k: &Key) -> Arc<[Key]> {
        if let Some(v) = self.cache.read().expect("cache lock").lists.get(k) {
            return v.clone();
        }
        let list: Arc<[Key]> = neighbors(&k.mat(), &self.budget).iter().map(|(b, _, _)| Key::of(b)).collect();
        let mut w = self.cache.write().expect("cache lock");
        if w.keys + list.len() <= CACHE_KEYS && w.lists.insert(*k, list.clone()).is_none() {
            w.keys += list.len();
        }
        list
    }

    /// One BFS layer: new nodes (not in `seen`) with their parents, in
    /// deterministic order.
    fn expand(&self, frontier: &[Key], seen: &HashMap<Key, Key>) -> Vec<(Key, Key)> {
        let lists: Vec<Arc<[Key]>> = frontier.par_iter().map(|k| self.targets(k)).collect();
        let mut fresh = HashMap::new();
        let mut out = Vec::new();
        for (parent, list) in frontier.iter().zip(lists) {
            for t in list.iter() {
                if !seen.contains_key(t) && !fresh.contains_key(t) {
                    fresh.insert(*t, *parent);
                    out.push((*t, *parent));
                }
            }
        }
        out
    }

    pub fn search(&self, a: &Mat, b: &Mat) -> Path {
        let ka = Key::of(&a.canonical().0);
        let kb = Key::of(&b.canonical().0);
        if ka == kb {
            return Path::Found(vec![ka]);
        }
        let mut fwd: HashMap<Key, Key> = HashMap::from([(ka, ka)]);
        let mut bwd: HashMap<Key, Key> = HashMap::from([(kb, kb)]);
        let mut ff = vec![ka];
        let mut fb = vec![kb];
        let mut depth = 0;
        while depth < self.budget.max_depth {
            let forward = ff.len() <= fb.len();
            let (frontier, mine, other) = if forward {
                (&mut ff, &mut fwd, &bwd)
            } else {
                (&mut fb, &mut bwd, &fwd)
            };
            let layer = self.expand(frontier, mine);
            depth += 1;
            let meet = layer.iter().find(|(k, _)| other.contains_key(k)).map(|(k, _)| *k);
            for (k, p) in &layer {
                mine.insert(*k, *p);
            }
            if let Some(z) = meet {
                return Path::Found(stitch(&fwd, &bwd, z));
            }
            if layer.is_empty() {
                return Path::NotFound(StopReason::Closed, fwd.len() + bwd.len());
            }
            *frontier = layer.into_iter().map(|(k, _)| k).collect();
            if self.budget.node_limit.is_some_and(|l| fwd.len() + bwd.len() > l) {
                return Path::NotFound(StopReason::NodeLimit, fwd.len() + bwd.len());
            }
        }
        Path::NotFound(StopReason::DepthReached, fwd.len() + bwd.len())
    }

    /// All nodes within `radius` steps of `start` (canonicalized).
    pub fn ball(&self, start: &Mat, radius: u32) -> Ball {
        let k0 = Key::of(&start.canonical().0);
        let mut parents: HashMap<Key, Key> = HashMap::from([(k0, k0)]);
        let mut nodes = HashMap::from([(k0, (0u8, k0))]);
        let mut frontier = vec![k0];
        for d in 1..=radius {
            let layer = self.expand(&frontier, &parents);
            if layer.is_empty() {
                break;
            }
            for (k, p) in &layer {
                parents.insert(*k, *p);
                nodes.insert(*k, (d as u8, *p));
            }
            frontier = layer.into_iter().map(|(k, _)| k).collect();
        }
        Ball { start: k0, nodes }
    }
}

impl Ball {
    /// Nodes from the start to `k` along BFS parents.
    pub fn path_to(&self, k: &Key) -> Option<Vec<Key>> {
        let mut out = vec![*k];
        let mut cur = *k;
        while cur != self.start {
            cur = self.nodes.get(&cur)?.1;
            out.push(cur);
        }
        out.reverse();
        Some(out)
    }
}

fn stitch(fwd: &HashMap<Key, Key>, bwd: &HashMap<Key, Key>, z: Key) -> Vec<Key> {
    let mut left = vec![z];
    while let Some(&p) = fwd.get(left.last().unwrap()) {
        if p == *left.last().unwrap() {
            break;
        }
        left.push(p);
    }
    left.reverse();
    let mut cur = z;
    while let Some(&p) = bwd.get(&cur) {
        if p == cur {
            break;
        }
        left.push(p);
        cur = p;
    }
    left
}

/// The step from canonical `x` to canonical `y`, using an edge in either
/// direction.
fn step_between(x: &Key, y: &Key, budget: &SearchBudget) -> (IntMatrix, IntMatrix) {
    let xm = x.mat();
    if let Some((_, r, s)) = neighbors(&xm, budget).into_iter().find(|(b, _, _)| Key::of(b) == *y) {
        return (r.to_int(), s.to_int());
    }
    let (_, r, s) = neighbors(&y.mat(), budget)
        .into_iter()
        .find(|(b, _, _)| Key::of(b) == *x)
        .expect("consecutive path nodes are adjacent");
    (s.to_int(), r.to_int())
}

/// The certificate from `a` to `b` along a path of canonical nodes from
/// the class of `a` to the class of `b`.
pub fn certificate_with(a: &IntMatrix, b: &IntMatrix, path: &[Key], budget: &SearchBudget) -> SSECertificate {
    let (_, pa) = a.canonical().expect("square");
    let (_, pb) = b.canonical().expect("square");
    let p_a = IntMatrix::permutation(&pa);
    let p_b = IntMatrix::permutation(&pb);
    let mul = |x: &IntMatrix, y: &IntMatrix| x.mul(y).expect("shapes agree");

    let mut pairs: Vec<(IntMatrix, IntMatrix)> = path.windows(2).map(|w| step_between(&w[0], &w[1], budget)).collect();
    if pairs.is_empty() {
        // b = Q·a·Qᵀ with Q = P_bᵀ·P_a
        let q = mul(&p_b.transpose(), &p_a);
        if q == IntMatrix::identity(a.rows()) {
            pairs.push((a.clone(), q));
        } else {
            pairs.push((q.transpose(), mul(&q, a)));
        }
    } else {
        // a = P_aᵀ·c_a·P_a and b = P_bᵀ·c_b·P_b
        let (r, s) = pairs[0].clone();
        pairs[0] = (mul(&p_a.transpose(), &r), mul(&s, &p_a));
        let last = pairs.len() - 1;
        let (r, s) = pairs[last].clone();
        pairs[last] = (mul(&r, &p_b), mul(&p_b.transpose(), &s));
    }
    let steps = pairs
        .into_iter()
        .map(|(r, s)| ElementaryStep::new(r, s).expect("shapes agree"))
        .collect();
    SSECertificate {
        from: a.clone(),
        to: b.clone(),
        steps,
    }
}

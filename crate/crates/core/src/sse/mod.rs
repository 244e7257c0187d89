//! Strong shift equivalence: elementary steps `A = R·S`, `B = S·R`, a
//! bidirectional breadth-first search over matrices up to simultaneous
//! permutation, certificates, and a bounded search for `xy = λᵏ`
//! witnesses between eigenvector ideals.

mod factor;
pub(crate) mod graph;
pub(crate) mod small;
mod witness;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::intmat::{IntMatrix, MatrixError};
use crate::invariants::jordan_invariant;
pub(crate) use graph::{Ball, Explorer};
use small::Mat;
pub use witness::{find_sse_witness, verify_witness, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SseError {
    #[error("matrix {0} is outside the searchable range (dimension ≤ 3, small entries)")]
    OutOfRange(String),
    #[error("matrix {0} is not a nonnegative square matrix")]
    NotNonnegativeSquare(String),
    #[error("invalid budget: {0}")]
    Budget(String),
    #[error("cannot parse certificate line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// One elementary equivalence `from = R·S`, `to = S·R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementaryStep {
    pub r: IntMatrix,
    pub s: IntMatrix,
    pub from: IntMatrix,
    pub to: IntMatrix,
}

impl ElementaryStep {
    pub fn new(r: IntMatrix, s: IntMatrix) -> Result<Self, SseError> {
        let from = r.mul(&s)?;
        let to = s.mul(&r)?;
        Ok(ElementaryStep { r, s, from, to })
    }

    pub fn verify(&self) -> bool {
        self.r.is_nonnegative()
            && self.s.is_nonnegative()
            && self.r.mul(&self.s).is_ok_and(|p| p == self.from)
            && self.s.mul(&self.r).is_ok_and(|p| p == self.to)
    }
}

/// A chain of elementary equivalences from `from` to `to`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SSECertificate {
    pub from: IntMatrix,
    pub to: IntMatrix,
    pub steps: Vec<ElementaryStep>,
}

impl SSECertificate {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `from=..;to=..;budget=..` followed by one `R=..;S=..` line per step.
    pub fn to_text(&self, budget: &SearchBudget) -> String {
        let mut out = format!("from={};to={};budget={budget}\n", self.from, self.to);
        for st in &self.steps {
            out.push_str(&format!("R={};S={}\n", st.r, st.s));
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output. The products are
    /// recomputed from `R` and `S`; use [`verify_certificate`] to check
    /// the chain.
    pub fn parse_text(text: &str) -> Result<(Self, SearchBudget), SseError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, msg: String| SseError::Parse { line: line + 1, msg };
        let (ln, header) = lines.next().ok_or_else(|| perr(0, "empty certificate".into()))?;
        let fields = key_values(header, &["from", "to", "budget"]).map_err(|m| perr(ln, m))?;
        let from: IntMatrix = fields[0].parse().map_err(|e: MatrixError| perr(ln, e.to_string()))?;
        let to: IntMatrix = fields[1].parse().map_err(|e: MatrixError| perr(ln, e.to_string()))?;
        let budget: SearchBudget = fields[2].parse().map_err(|e: SseError| perr(ln, e.to_string()))?;
        let mut steps = Vec::new();
        for (ln, line) in lines {
            let f = key_values(line, &["R", "S"]).map_err(|m| perr(ln, m))?;
            let r: IntMatrix = f[0].parse().map_err(|e: MatrixError| perr(ln, e.to_string()))?;
            let s: IntMatrix = f[1].parse().map_err(|e: MatrixError| perr(ln, e.to_string()))?;
            steps.push(ElementaryStep::new(r, s).map_err(|e| perr(ln, e.to_string()))?);
        }
        Ok((SSECertificate { from, to, steps }, budget))
    }
}

fn key_values<'a>(line: &'a str, keys: &[&str]) -> Result<Vec<&'a str>, String> {
    let parts: Vec<&str> = line.trim().split(';').collect();
    if parts.len() != keys.len() {
        return Err(format!("expected {} fields", keys.len()));
    }
    parts
        .iter()
        .zip(keys)
        .map(|(p, k)| {
            p.strip_prefix(k)
                .and_then(|v| v.strip_prefix('='))
                .ok_or_else(|| format!("expected field {k}="))
        })
        .collect()
}

/// True iff every step verifies, consecutive steps chain, and the ends
/// match the endpoints. Also rechecks that each step keeps the nonzero
/// spectrum (trace included), which exact products already imply.
pub fn verify_certificate(cert: &SSECertificate) -> bool {
    let Some(first) = cert.steps.first() else {
        return false;
    };
    first.from == cert.from
        && cert.steps.last().is_some_and(|l| l.to == cert.to)
        && cert.steps.iter().all(ElementaryStep::verify)
        && cert.steps.windows(2).all(|w| w[0].to == w[1].from)
        && cert.steps.iter().all(|st| {
            st.from.trace().ok() == st.to.trace().ok()
                && jordan_invariant(&st.from).ok() == jordan_invariant(&st.to).ok()
        })
}

/// Limits of one search.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SearchBudget {
    /// Maximum number of elementary steps in a chain.
    pub max_depth: u32,
    /// Maximum entry sum of any matrix on the chain.
    pub max_entry_sum: u64,
    /// Allowed `(n, m)`: an `n×n` matrix factors through inner dimension `m`.
    pub shapes: BTreeSet<(usize, usize)>,
    /// Stop once this many matrices have been visited.
    pub node_limit: Option<usize>,
}

impl SearchBudget {
    /// Shapes `{2,3}²`, the given depth and entry-sum cap, no node limit.
    pub fn new(max_depth: u32, max_entry_sum: u64) -> Self {
        SearchBudget {
            max_depth,
            max_entry_sum,
            shapes: [(2, 2), (2, 3), (3, 2), (3, 3)].into_iter().collect(),
            node_limit: None,
        }
    }

    /// Cap of three times the larger endpoint entry sum.
    pub fn for_pair(a: &IntMatrix, b: &IntMatrix, max_depth: u32) -> Self {
        let sum = |m: &IntMatrix| u64::try_from(m.entry_sum()).unwrap_or(u64::MAX / 4);
        Self::new(max_depth, 3 * sum(a).max(sum(b)))
    }

    /// Also allow factoring through and into 1×1 matrices.
    pub fn with_1x1(mut self) -> Self {
        for s in [(1, 1), (1, 2), (1, 3), (2, 1), (3, 1)] {
            self.shapes.insert(s);
        }
        self
    }

    pub fn validate(&self) -> Result<(), SseError> {
        if self.max_depth == 0 || self.max_entry_sum == 0 || self.node_limit == Some(0) {
            return Err(SseError::Budget("depth, entry sum and node limit must be positive".into()));
        }
        if self.shapes.is_empty() || self.shapes.iter().any(|&(n, m)| !(1..=3).contains(&n) || !(1..=3).contains(&m)) {
            return Err(SseError::Budget("shapes must be a nonempty subset of {1,2,3}²".into()));
        }
        Ok(())
    }

    pub(crate) fn inner_dims(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        self.shapes.iter().filter(move |s| s.0 == n).map(|s| s.1)
    }
}

impl fmt::Display for SearchBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shapes: Vec<String> = self.shapes.iter().map(|(n, m)| format!("{n}x{m}")).collect();
        write!(f, "depth:{},sum:{},shapes:{},nodes:", self.max_depth, self.max_entry_sum, shapes.join("+"))?;
        match self.node_limit {
            Some(n) => write!(f, "{n}"),
            None => f.write_str("-"),
        }
    }
}

impl FromStr for SearchBudget {
    type Err = SseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SseError::Budget(format!("cannot parse {s:?}"));
        let parts: Vec<&str> = s.split(',').collect();
        let [d, sum, shapes, nodes] = parts[..] else {
            return Err(bad());
        };
        let field = |p: &'_ str, k: &str| p.strip_prefix(k).and_then(|v| v.strip_prefix(':')).map(str::to_string);
        let max_depth = field(d, "depth").and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let max_entry_sum = field(sum, "sum").and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let shapes = field(shapes, "shapes")
            .ok_or_else(bad)?
            .split('+')
            .map(|t| {
                let (n, m) = t.split_once('x')?;
                Some((n.parse().ok()?, m.parse().ok()?))
            })
            .collect::<Option<BTreeSet<_>>>()
            .ok_or_else(bad)?;
        let nodes = field(nodes, "nodes").ok_or_else(bad)?;
        let node_limit = if nodes == "-" { None } else { Some(nodes.parse().map_err(|_| bad())?) };
        let b = SearchBudget {
            max_depth,
            max_entry_sum,
            shapes,
            node_limit,
        };
        b.validate()?;
        Ok(b)
    }
}

/// Why a search stopped without a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StopReason {
    /// Every chain of at most `max_depth` steps was examined.
    DepthReached,
    /// The node limit tripped first.
    NodeLimit,
    /// One side ran out of new matrices under the entry-sum cap: no chain
    /// within the cap exists at any depth.
    Closed,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::DepthReached => "depth limit reached",
            StopReason::NodeLimit => "node limit reached",
            StopReason::Closed => "no further matrices under the entry-sum cap",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(SSECertificate),
    NotFound { reason: StopReason, visited: usize },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&SSECertificate> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            SearchOutcome::NotFound { .. } => None,
        }
    }
}

pub(crate) fn to_small(m: &IntMatrix) -> Result<Mat, SseError> {
    if !m.is_square() || !m.is_nonnegative() {
        return Err(SseError::NotNonnegativeSquare(m.to_string()));
    }
    let s = Mat::from_int(m).ok_or_else(|| SseError::OutOfRange(m.to_string()))?;
    if s.entry_sum() > 1 << 20 {
        return Err(SseError::OutOfRange(m.to_string()));
    }
    Ok(s)
}

/// All essential factorizations `a = R·S` with `R` of shape `n×m`, in
/// every ordering of the inner index, sorted.
pub fn factorizations(a: &IntMatrix, m: usize, budget: &SearchBudget) -> Result<Vec<(IntMatrix, IntMatrix)>, SseError> {
    let small = to_small(a)?;
    let n = small.rows();
    if !budget.shapes.contains(&(n, m)) {
        return Ok(Vec::new());
    }
    let mut out = BTreeSet::new();
    factor::for_each_factorization(&small, m, &mut |terms| {
        let (r, s) = factor::to_pair(n, terms);
        for p in small::PERMS[m] {
            out.insert((r.permute_cols(p), s.permute_rows(p)));
        }
    });
    Ok(out.into_iter().map(|(r, s)| (r.to_int(), s.to_int())).collect())
}

/// Every `S·R` within the budget, one per permutation class, each with a
/// step landing on the least representative of the class.
pub fn neighbors(a: &IntMatrix, budget: &SearchBudget) -> Result<Vec<(IntMatrix, ElementaryStep)>, SseError> {
    let small = to_small(a)?;
    Ok(graph::neighbors(&small, budget)
        .into_iter()
        .map(|(b, r, s)| {
            let step = ElementaryStep {
                r: r.to_int(),
                s: s.to_int(),
                from: a.clone(),
                to: b.to_int(),
            };
            (b.to_int(), step)
        })
        .collect())
}

/// Bidirectional breadth-first search for a chain from `a` to `b`.
/// A `NotFound` outcome proves nothing beyond the budget.
pub fn sse_search(a: &IntMatrix, b: &IntMatrix, budget: &SearchBudget) -> Result<SearchOutcome, SseError> {
    budget.validate()?;
    let (sa, sb) = (to_small(a)?, to_small(b)?);
    let explorer = Explorer::new(budget.clone());
    Ok(match explorer.search(&sa, &sb) {
        graph::Path::Found(path) => {
            let cert = graph::certificate_with(a, b, &path, budget);
            assert!(verify_certificate(&cert), "search produced an invalid certificate");
            SearchOutcome::Found(cert)
        }
        graph::Path::NotFound(reason, visited) => SearchOutcome::NotFound { reason, visited },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> IntMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn factorization_examples() {
        let b = SearchBudget::new(1, 100).with_1x1();
        let f = factorizations(&m("2:1,1,1,1"), 1, &b).unwrap();
        assert!(f.contains(&(m("2x1:1,1"), m("1x2:1,1"))));
        let f = factorizations(&m("1:2"), 1, &b).unwrap();
        assert_eq!(f, vec![(m("1:1"), m("1:2")), (m("1:2"), m("1:1"))]);
        let a = m("2:14,2,1,0");
        let f = factorizations(&a, 2, &b).unwrap();
        assert!(f.contains(&(a.clone(), IntMatrix::identity(2))));
        assert!(f.contains(&(IntMatrix::identity(2), a.clone())));
        for (r, s) in &f {
            assert_eq!(r.mul(s).unwrap(), a);
        }
        // shape outside the budget
        assert!(factorizations(&a, 1, &SearchBudget::new(1, 100)).unwrap().is_empty());
    }

    #[test]
    fn neighbor_examples() {
        let b = SearchBudget::new(1, 100).with_1x1();
        let j = m("2:1,1,1,1");
        let ns = neighbors(&j, &b).unwrap();
        assert!(ns.iter().any(|(x, _)| *x == m("1:2")));
        assert!(ns.iter().any(|(x, _)| *x == j));
        for (x, st) in &ns {
            assert!(st.verify());
            assert_eq!(&st.to, x);
            assert_eq!(st.from, j);
        }
    }

    #[test]
    fn trivial_searches() {
        let a = m("2:14,2,1,0");
        let b = SearchBudget::for_pair(&a, &a, 2);
        let SearchOutcome::Found(c) = sse_search(&a, &a, &b).unwrap() else {
            panic!("reflexive search failed")
        };
        assert_eq!(c.steps.len(), 1);
        assert_eq!((&c.steps[0].r, &c.steps[0].s), (&a, &IntMatrix::identity(2)));

        let swapped = a.permute(&[1, 0]).unwrap();
        let c = sse_search(&a, &swapped, &b).unwrap().certificate().cloned().unwrap();
        assert_eq!(c.len(), 1);
        assert!(verify_certificate(&c));

        let j = m("2:1,1,1,1");
        let c = sse_search(&j, &m("1:2"), &SearchBudget::new(1, 10).with_1x1()).unwrap();
        let c = c.certificate().unwrap();
        assert_eq!(c.len(), 1);
        assert!(verify_certificate(c));
    }

    #[test]
    fn certificate_checks() {
        let j = m("2:1,1,1,1");
        let s1 = ElementaryStep::new(m("2x1:1,1"), m("1x2:1,1")).unwrap();
        let s2 = ElementaryStep::new(m("1x2:1,1"), m("2x1:1,1")).unwrap();
        let cert = SSECertificate {
            from: j.clone(),
            to: j.clone(),
            steps: vec![s1, s2],
        };
        assert!(verify_certificate(&cert));

        let mut bad = cert.clone();
        bad.steps[0].r.set(0, 0, 2.into());
        assert!(!verify_certificate(&bad));
        let empty = SSECertificate { steps: vec![], ..cert.clone() };
        assert!(!verify_certificate(&empty));

        let budget = SearchBudget::new(2, 12).with_1x1();
        let text = cert.to_text(&budget);
        assert!(text.starts_with("from=2:1,1,1,1;to=2:1,1,1,1;budget=depth:2,sum:12,"));
        assert_eq!(SSECertificate::parse_text(&text).unwrap(), (cert, budget));
        assert!(matches!(
            SSECertificate::parse_text("from=2:1,1,1,1;to=2:1,1,1,1;budget=depth:2,sum:12,shapes:2x2,nodes:-\nR=2:1,1;S=2:1,0,0,1"),
            Err(SseError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn budget_text() {
        let b = SearchBudget::new(4, 75);
        assert_eq!(b.to_string(), "depth:4,sum:75,shapes:2x2+2x3+3x2+3x3,nodes:-");
        assert_eq!(b.to_string().parse::<SearchBudget>().unwrap(), b);
        assert!("depth:0,sum:75,shapes:2x2,nodes:-".parse::<SearchBudget>().is_err());
        assert!("depth:1,sum:75,shapes:4x2,nodes:-".parse::<SearchBudget>().is_err());
    }
}

//! Nonnegative factorizations `A = R·S` with inner dimension `m`, written
//! as sums of `m` rank-one terms `rₖ·sₖᵀ` (column `k` of `R` times row `k`
//! of `S`).
//!
//! Only essential factorizations are produced: every column of `R` and
//! every row of `S` is nonzero. Dropping a zero term changes `S·R` only by
//! a zero row and column, and without this restriction the set would be
//! infinite. Terms are listed in non-increasing order, so each unordered
//! factorization appears once; reordering the terms conjugates `S·R` by a
//! permutation.

use super::small::{Mat, MAX_DIM};

type Vec3 = [i64; MAX_DIM];

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Term {
    pub r: Vec3,
    pub s: Vec3,
}

/// Calls `emit` once per unordered essential factorization of `a` into `m`
/// rank-one terms.
pub fn for_each_factorization(a: &Mat, m: usize, emit: &mut impl FnMut(&[Term])) {
    assert_eq!(a.rows(), a.cols());
    if m == 0 || a.rank() > m {
        return;
    }
    let mut acc = Vec::with_capacity(m);
    rec(a, m, None, &mut acc, emit);
}

/// The factor pair for a list of terms.
pub fn to_pair(n: usize, terms: &[Term]) -> (Mat, Mat) {
    let m = terms.len();
    let mut r = Mat::zeros(n, m);
    let mut s = Mat::zeros(m, n);
    for (k, t) in terms.iter().enumerate() {
        for i in 0..n {
            r.set(i, k, t.r[i]);
            s.set(k, i, t.s[i]);
        }
    }
    (r, s)
}

fn rec(rem: &Mat, left: usize, max: Option<Term>, acc: &mut Vec<Term>, emit: &mut impl FnMut(&[Term])) {
    if left == 1 {
        for t in last_terms(rem) {
            if max.is_none_or(|mx| t <= mx) {
                acc.push(t);
                emit(acc);
                acc.pop();
            }
        }
        return;
    }
    let n = rem.rows();
    let rank = rem.rank();
    if rank > left || rem.entry_sum() < left as i64 {
        return;
    }
    // after this term the remainder must have rank ≤ left − 1
    let target = left - 1;
    let mode = if rank == left {
        if rank == n {
            Mode::DetLemma(rem.det(), rem.adj())
        } else {
            Mode::Subspace(null_normal(rem, true), null_normal(rem, false))
        }
    } else {
        Mode::Free
    };
    let check_rank = !matches!(mode, Mode::Free) || rank + 1 > target;
    let col_max: Vec<i64> = (0..n).map(|j| (0..n).map(|i| rem.get(i, j)).max().unwrap()).collect();
    let mut s = [0i64; MAX_DIM];
    loop {
        if !odometer(&mut s[..n], &col_max) {
            break;
        }
        if let Mode::Subspace(_, Some(nu)) = &mode {
            if dot(&s, nu, n) != 0 {
                continue;
            }
        }
        // r_i ≤ min over s_j > 0 of rem_ij / s_j
        let mut ub = [0i64; MAX_DIM];
        for (i, u) in ub.iter_mut().enumerate().take(n) {
            *u = (0..n)
                .filter(|&j| s[j] > 0)
                .map(|j| rem.get(i, j) / s[j])
                .min()
                .expect("s is nonzero");
        }
        if ub[..n].iter().all(|&u| u == 0) {
            continue;
        }
        let mut visit = |r: &Vec3| {
            let t = Term { r: *r, s };
            if max.is_some_and(|mx| t > mx) {
                return;
            }
            let mut next = *rem;
            for i in 0..n {
                for j in 0..n {
                    next.set(i, j, rem.get(i, j) - r[i] * s[j]);
                }
            }
            if check_rank && next.rank() > target {
                return;
            }
            acc.push(t);
            rec(&next, left - 1, Some(t), acc, emit);
            acc.pop();
        };
        match &mode {
            Mode::DetLemma(det, adj) => {
                // det(rem − r sᵀ) = det(rem) − sᵀ·adj(rem)·r
                let mut w = [0i64; MAX_DIM];
                for (i, wi) in w.iter_mut().enumerate().take(n) {
                    *wi = (0..n).map(|j| s[j] * adj.get(j, i)).sum();
                }
                solve_linear(&w, *det, &ub, n, &mut visit);
            }
            Mode::Subspace(Some(mu), _) => solve_linear(mu, 0, &ub, n, &mut visit),
            _ => {
                let mut r = [0i64; MAX_DIM];
                while odometer(&mut r[..n], &ub[..n]) {
                    visit(&r);
                }
            }
        }
    }
}

enum Mode {
    Free,
    /// The term must satisfy `sᵀ·adj·r = det`.
    DetLemma(i64, Mat),
    /// `r ⟂ μ` (left null vector) and `s ⟂ ν` (right null vector); `None`
    /// when the null space is not one-dimensional.
    Subspace(Option<Vec3>, Option<Vec3>),
}

/// A spanning vector of the one-dimensional null space (right null space,
/// or left when `left`), for a 3×3 matrix of rank 2; `None` otherwise.
fn null_normal(m: &Mat, left: bool) -> Option<Vec3> {
    if m.rows() != 3 || m.rank() != 2 {
        return None;
    }
    let vecs: Vec<Vec3> = (0..3).map(|k| if left { m.col(k) } else { m.row(k) }).collect();
    for a in 0..3 {
        for b in a + 1..3 {
            let c = cross(&vecs[a], &vecs[b]);
            if c.iter().any(|&x| x != 0) {
                return Some(c);
            }
        }
    }
    None
}

fn cross(u: &Vec3, v: &Vec3) -> Vec3 {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn dot(u: &Vec3, v: &Vec3, n: usize) -> i64 {
    (0..n).map(|i| u[i] * v[i]).sum()
}

/// Nonzero `r` with `0 ≤ rᵢ ≤ ubᵢ` and `w·r = rhs`, visited in odometer
/// order of all coordinates but a pivot, which is solved for.
fn solve_linear(w: &Vec3, rhs: i64, ub: &Vec3, n: usize, visit: &mut impl FnMut(&Vec3)) {
    let Some(p) = (0..n).rev().find(|&i| w[i] != 0) else {
        if rhs == 0 {
            let mut r = [0i64; MAX_DIM];
            while odometer(&mut r[..n], &ub[..n]) {
                visit(&r);
            }
        }
        return;
    };
    let free: Vec<usize> = (0..n).filter(|&i| i != p).collect();
    let mut vals = vec![0i64; free.len()];
    let bounds: Vec<i64> = free.iter().map(|&i| ub[i]).collect();
    let mut first = true;
    loop {
        if !first && !step(&mut vals, &bounds) {
            return;
        }
        first = false;
        let partial: i64 = free.iter().zip(&vals).map(|(&i, &v)| w[i] * v).sum();
        let num = rhs - partial;
        if num % w[p] != 0 {
            continue;
        }
        let x = num / w[p];
        if x < 0 || x > ub[p] {
            continue;
        }
        let mut r = [0i64; MAX_DIM];
        for (&i, &v) in free.iter().zip(&vals) {
            r[i] = v;
        }
        r[p] = x;
        if r[..n].iter().any(|&v| v != 0) {
            visit(&r);
        }
    }
}

/// Advances `v` to the next nonzero vector with `vᵢ ≤ bound[i]` (the first
/// call from all zeros yields the first nonzero one). Returns `false` when
/// exhausted.
fn odometer(v: &mut [i64], bound: &[i64]) -> bool {
    step(v, bound)
}

fn step(v: &mut [i64], bound: &[i64]) -> bool {
    for i in (0..v.len()).rev() {
        if v[i] < bound[i] {
            v[i] += 1;
            return true;
        }
        v[i] = 0;
    }
    false
}

/// All `(r, s)` with `r·sᵀ = rem`, both nonzero and nonnegative.
fn last_terms(rem: &Mat) -> Vec<Term> {
    let n = rem.rows();
    if rem.rank() != 1 || !rem.is_nonnegative() {
        return Vec::new();
    }
    // rem = g·u·vᵀ with u, v primitive
    let (i0, j0) = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| rem.get(i, j) != 0)
        .expect("rank one");
    let col = rem.col(j0);
    let row = rem.row(i0);
    let cu = content(&col[..n]);
    let cv = content(&row[..n]);
    let mut u = [0i64; MAX_DIM];
    let mut v = [0i64; MAX_DIM];
    for i in 0..n {
        u[i] = col[i] / cu;
        v[i] = row[i] / cv;
    }
    let g = rem.get(i0, j0) / (u[i0] * v[j0]);
    let mut out: Vec<Term> = divisors(g)
        .into_iter()
        .map(|d| {
            let mut r = u;
            let mut s = v;
            for i in 0..n {
                r[i] *= d;
                s[i] *= g / d;
            }
            Term { r, s }
        })
        .collect();
    out.sort();
    out
}

fn content(v: &[i64]) -> i64 {
    v.iter().fold(0, |g, &x| gcd(g, x.abs()))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn divisors(g: i64) -> Vec<i64> {
    (1..=g).filter(|d| g % d == 0).collect()
}

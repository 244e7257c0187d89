//! Fixed-size matrices of dimension at most 3 for the search inner loop.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::intmat::IntMatrix;

pub const MAX_DIM: usize = 3;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    rows: u8,
    cols: u8,
    e: [i64; MAX_DIM * MAX_DIM],
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows <= MAX_DIM && cols <= MAX_DIM);
        Mat {
            rows: rows as u8,
            cols: cols as u8,
            e: [0; MAX_DIM * MAX_DIM],
        }
    }

    #[cfg(test)]
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_int(m: &IntMatrix) -> Option<Self> {
        if m.rows() > MAX_DIM || m.cols() > MAX_DIM {
            return None;
        }
        let mut out = Self::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, j, m.get(i, j).to_i64()?);
            }
        }
        Some(out)
    }

    pub fn to_int(self) -> IntMatrix {
        let entries = (0..self.rows())
            .flat_map(|i| (0..self.cols()).map(move |j| BigInt::from(self.get(i, j))))
            .collect();
        IntMatrix::new(self.rows(), self.cols(), entries).expect("shape matches")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows as usize
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols as usize
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.e[i * MAX_DIM + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.e[i * MAX_DIM + j] = v;
    }

    pub fn entry_sum(&self) -> i64 {
        self.e.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.e.iter().all(|&v| v >= 0)
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        debug_assert_eq!(self.cols(), o.rows());
        let mut out = Mat::zeros(self.rows(), o.cols());
        for i in 0..self.rows() {
            for j in 0..o.cols() {
                let mut acc = 0;
                for k in 0..self.cols() {
                    acc += self.get(i, k) * o.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Entry `(i, j)` of the result is entry `(perm[i], perm[j])` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Mat {
        let n = self.rows();
        let mut out = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(perm[i], perm[j]));
            }
        }
        out
    }

    /// Row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.rows(), self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.set(i, j, self.get(perm[i], j));
            }
        }
        out
    }

    /// Column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_cols(&self, perm: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.rows(), self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.set(i, j, self.get(i, perm[j]));
            }
        }
        out
    }

    pub fn det(&self) -> i64 {
        debug_assert_eq!(self.rows(), self.cols());
        let g = |i, j| self.get(i, j);
        match self.rows() {
            0 => 1,
            1 => g(0, 0),
            2 => g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0),
            _ => {
                g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                    - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                    + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
            }
        }
    }

    /// Adjugate, `adj(M)·M = det(M)·I`.
    pub fn adj(&self) -> Mat {
        let n = self.rows();
        let mut out = Mat::zeros(n, n);
        match n {
            1 => out.set(0, 0, 1),
            2 => {
                out.set(0, 0, self.get(1, 1));
                out.set(0, 1, -self.get(0, 1));
                out.set(1, 0, -self.get(1, 0));
                out.set(1, 1, self.get(0, 0));
            }
            _ => {
                for i in 0..3 {
                    for j in 0..3 {
                        // cofactor C_ji
                        let (r0, r1) = others(j);
                        let (c0, c1) = others(i);
                        let minor = self.get(r0, c0) * self.get(r1, c1) - self.get(r0, c1) * self.get(r1, c0);
                        let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                        out.set(i, j, sign * minor);
                    }
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let (r, c) = (self.rows(), self.cols());
        if self.e.iter().all(|&v| v == 0) {
            return 0;
        }
        let n = r.min(c);
        if n >= 2 {
            let mut any2 = false;
            for i0 in 0..r {
                for i1 in i0 + 1..r {
                    for j0 in 0..c {
                        for j1 in j0 + 1..c {
                            if self.get(i0, j0) * self.get(i1, j1) != self.get(i0, j1) * self.get(i1, j0) {
                                any2 = true;
                            }
                        }
                    }
                }
            }
            if !any2 {
                return 1;
            }
            if n == 3 && self.det() != 0 {
                return 3;
            }
            return 2;
        }
        1
    }

    pub fn row(&self, i: usize) -> [i64; MAX_DIM] {
        let mut v = [0; MAX_DIM];
        for (j, x) in v.iter_mut().enumerate().take(self.cols()) {
            *x = self.get(i, j);
        }
        v
    }

    pub fn col(&self, j: usize) -> [i64; MAX_DIM] {
        let mut v = [0; MAX_DIM];
        for (i, x) in v.iter_mut().enumerate().take(self.rows()) {
            *x = self.get(i, j);
        }
        v
    }

    /// Least row-major encoding under simultaneous permutation, and the
    /// permutation achieving it.
    pub fn canonical(&self) -> (Mat, &'static [usize]) {
        let n = self.rows();
        let mut best = (*self, PERMS[n][0]);
        for &p in &PERMS[n][1..] {
            let c = self.permute(p);
            if c.e < best.0.e {
                best = (c, p);
            }
        }
        best
    }
}

fn others(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

pub static PERMS: [&[&[usize]]; 4] = [
    &[&[]],
    &[&[0]],
    &[&[0, 1], &[1, 0]],
    &[&[0, 1, 2], &[0, 2, 1], &[1, 0, 2], &[1, 2, 0], &[2, 0, 1], &[2, 1, 0]],
];

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_int().fmt(f)
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(s: &str) -> Mat {
        Mat::from_int(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn determinant_and_adjugate() {
        let a = mat("3:2,0,1,1,3,2,1,1,2");
        assert_eq!(a.det(), 6);
        let prod = a.adj().mul(&a);
        assert_eq!(prod, {
            let mut d = Mat::identity(3);
            for i in 0..3 {
                d.set(i, i, 6);
            }
            d
        });
        let b = mat("2:14,2,1,0");
        assert_eq!(b.adj().mul(&b).get(0, 0), b.det());
    }

    #[test]
    fn ranks() {
        assert_eq!(mat("3:1,1,0,1,1,0,0,0,0").rank(), 1);
        assert_eq!(mat("3:1,2,3,2,4,6,1,0,0").rank(), 2);
        assert_eq!(mat("3:2,0,1,1,3,2,1,1,2").rank(), 3);
        assert_eq!(mat("2:0,0,0,0").rank(), 0);
        assert_eq!(mat("2x3:1,2,3,2,4,6").rank(), 1);
    }

    #[test]
    fn canonical_matches_big_matrix_version() {
        for s in ["2:3,5,1,0", "3:0,1,2,3,4,5,6,7,8", "3:5,0,0,0,1,0,0,0,3"] {
            let big: IntMatrix = s.parse().unwrap();
            let (c, p) = mat(s).canonical();
            let (bc, bp) = big.canonical().unwrap();
            assert_eq!(c.to_int(), bc);
            assert_eq!(p, &bp[..]);
        }
    }
}

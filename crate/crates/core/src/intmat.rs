//! Exact integer linear algebra for small matrices.
//!
//! Everything here works over arbitrary-precision integers. Matrices are
//! stored row-major; most operations that only make sense for square input
//! return [`MatrixError::NotSquare`] otherwise.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("malformed matrix at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Dense integer matrix. Square matrices with nonnegative entries present
/// shifts of finite type; rectangular ones appear as factors of elementary
/// equivalences.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
        IntMatrix {
            rows,
            cols,
            entries: entries.iter().map(|&e| BigInt::from(e)).collect(),
        }
    }

    /// Square matrix from nested rows, mostly for tests.
    pub fn square(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        let flat: Vec<i64> = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), n, "ragged rows");
                r.iter().copied()
            })
            .collect();
        Self::from_i64(n, n, &flat)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> Result<usize, MatrixError> {
        self.require_square()?;
        Ok(self.rows)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    /// Entry as `i64`; panics if it does not fit.
    pub fn get_i64(&self, i: usize, j: usize) -> i64 {
        self.get(i, j).to_i64().expect("matrix entry exceeds i64")
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| !e.is_negative())
    }

    pub fn entry_sum(&self) -> BigInt {
        self.entries.iter().sum()
    }

    pub fn trace(&self) -> Result<BigInt, MatrixError> {
        let n = self.dim()?;
        Ok((0..n).map(|i| self.get(i, i)).sum())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::Shape("cannot add matrices of different shapes".into()));
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    /// Simultaneous permutation of rows and columns: entry (i, j) of the
    /// result is entry (perm[i], perm[j]) of `self`. This is `P·M·Pᵀ` for the
    /// permutation matrix with `P[i][perm[i]] = 1`.
    pub fn permute(&self, perm: &[usize]) -> Result<IntMatrix, MatrixError> {
        let n = self.dim()?;
        assert_eq!(perm.len(), n, "permutation length");
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(perm[i], perm[j]).clone());
            }
        }
        Ok(out)
    }

    /// The permutation matrix `P` with `P[i][perm[i]] = 1`.
    pub fn permutation(perm: &[usize]) -> IntMatrix {
        let n = perm.len();
        let mut p = Self::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            p.set(i, j, BigInt::one());
        }
        p
    }

    pub fn determinant(&self) -> Result<BigInt, MatrixError> {
        let n = self.dim()?;
        // Bareiss fraction-free elimination.
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                for j in 0..n {
                    a.swap(k * n + j, swap * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        Ok(sign * &a[n * n - 1])
    }

    fn require_square(&self) -> Result<(), MatrixError> {
        if self.rows != self.cols {
            Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for IntMatrix {
    /// Canonical textual form: `n:e11,...,enn` for square matrices and
    /// `rxc:e11,...` for rectangular ones.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows == self.cols {
            write!(f, "{}:", self.rows)?;
        } else {
            write!(f, "{}x{}:", self.rows, self.cols)?;
        }
        for (k, e) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix({self})")
    }
}

impl FromStr for IntMatrix {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |pos: usize, msg: &str| MatrixError::Parse {
            pos,
            msg: msg.to_string(),
        };
        let colon = s.find(':').ok_or_else(|| err(0, "missing ':' after dimension"))?;
        let head = &s[..colon];
        let parse_dim = |t: &str, at: usize| -> Result<usize, MatrixError> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err(at, "dimension must be a positive decimal integer"));
            }
            match t.parse::<usize>() {
                Ok(0) | Err(_) => Err(err(at, "dimension must be a positive decimal integer")),
                Ok(d) => Ok(d),
            }
        };
        let (rows, cols) = match head.find('x') {
            Some(x) => (parse_dim(&head[..x], 0)?, parse_dim(&head[x + 1..], x + 1)?),
            None => {
                let n = parse_dim(head, 0)?;
                (n, n)
            }
        };
        let body = &s[colon + 1..];
        let mut entries = Vec::with_capacity(rows * cols);
        let mut offset = colon + 1;
        for tok in body.split(',') {
            let digits = tok.strip_prefix('-').unwrap_or(tok);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err(offset, "expected a base-10 integer"));
            }
            entries.push(tok.parse::<BigInt>().map_err(|_| err(offset, "bad integer"))?);
            offset += tok.len() + 1;
        }
        if entries.len() != rows * cols {
            return Err(err(
                s.len(),
                &format!("expected {} entries, found {}", rows * cols, entries.len()),
            ));
        }
        IntMatrix::new(rows, cols, entries)
    }
}

/// Integer polynomial with coefficients stored lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Builds from coefficients, lowest degree first; trailing zeros trimmed.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// `p(M)` by Horner's rule.
    pub fn eval_matrix(&self, m: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        let n = m.dim()?;
        let mut acc = IntMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m)?.add(&IntMatrix::identity(n).scale(c))?;
        }
        Ok(acc)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for IntPoly {
    type Err = MatrixError;

    /// Parses the rendering produced by `Display`, e.g. `x^2-14x-2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if s == "0" {
            return Ok(IntPoly::new(Vec::new()));
        }
        let err = |pos: usize, msg: &str| MatrixError::Parse {
            pos,
            msg: msg.to_string(),
        };
        if s.is_empty() {
            return Err(err(0, "empty polynomial"));
        }
        let mut coeffs: Vec<BigInt> = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let start = i;
            let neg = match bytes[i] {
                b'-' => {
                    i += 1;
                    true
                }
                b'+' if i > 0 => {
                    i += 1;
                    false
                }
                _ if i == 0 => false,
                _ => return Err(err(i, "expected '+' or '-'")),
            };
            let digits_start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut c = if i > digits_start {
                s[digits_start..i].parse::<BigInt>().map_err(|_| err(digits_start, "bad coefficient"))?
            } else {
                BigInt::one()
            };
            let mut k = 0usize;
            if i < bytes.len() && bytes[i] == b'x' {
                i += 1;
                k = 1;
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    let es = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    k = s[es..i].parse().map_err(|_| err(es, "bad exponent"))?;
                }
            } else if i == digits_start {
                return Err(err(start, "empty term"));
            }
            if neg {
                c = -c;
            }
            if coeffs.len() <= k {
                coeffs.resize(k + 1, BigInt::zero());
            }
            coeffs[k] += c;
        }
        Ok(IntPoly::new(coeffs))
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

impl IntMatrix {
    /// Representative of the class under simultaneous row/column
    /// permutation: least row-major entry sequence, with the permutation
    /// that produces it.
    pub fn canonical(&self) -> Result<(IntMatrix, Vec<usize>), MatrixError> {
        let n = self.dim()?;
        let mut best: Option<(IntMatrix, Vec<usize>)> = None;
        for perm in permutations(n) {
            let c = self.permute(&perm)?;
            if best.as_ref().is_none_or(|(b, _)| c.entries < b.entries) {
                best = Some((c, perm));
            }
        }
        Ok(best.expect("at least one permutation"))
    }
}

/// Edge i→j whenever `m[i][j] > 0`; irreducible iff that graph is strongly
/// connected. The diagonal condition is vacuous (`S⁰ = I`), so `[[0]]` is
/// irreducible.
pub fn is_irreducible(m: &IntMatrix) -> Result<bool, MatrixError> {
    let n = m.dim()?;
    let reach_all = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let edge = if forward { m.get(i, j) } else { m.get(j, i) };
                if !seen[j] && edge.is_positive() {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    Ok(n == 0 || (reach_all(true) && reach_all(false)))
}

/// Irreducible and aperiodic: some power is entrywise positive.
pub fn is_primitive(m: &IntMatrix) -> Result<bool, MatrixError> {
    let n = m.dim()?;
    if !is_irreducible(m)? || n == 0 {
        return Ok(false);
    }
    // Wielandt: if primitive then M^((n-1)^2+1) > 0. Work on the 0/1 pattern.
    let pattern: Vec<bool> = m.entries().iter().map(|e| e.is_positive()).collect();
    let bool_mul = |a: &[bool], b: &[bool]| {
        let mut out = vec![false; n * n];
        for i in 0..n {
            for k in 0..n {
                if a[i * n + k] {
                    for j in 0..n {
                        out[i * n + j] |= b[k * n + j];
                    }
                }
            }
        }
        out
    };
    let mut power = pattern.clone();
    for _ in 0..(n - 1) * (n - 1) {
        power = bool_mul(&power, &pattern);
    }
    Ok(power.into_iter().all(|b| b))
}

/// `det(xI − M)` via Faddeev–LeVerrier; every division is exact over ℤ.
pub fn char_poly(m: &IntMatrix) -> Result<IntPoly, MatrixError> {
    let n = m.dim()?;
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut mk = IntMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1}·I, c_{n-k} = -tr(A·M_k)/k
        let shifted = IntMatrix::identity(n).scale(&coeffs[n - k + 1]);
        mk = m.mul(&mk)?.add(&shifted)?;
        let tr = m.mul(&mk)?.trace()?;
        coeffs[n - k] = -(tr / BigInt::from(k));
    }
    Ok(IntPoly::new(coeffs))
}

/// Smith normal form with the unimodular transforms that produce it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    /// `d₁ | d₂ | …`, nonnegative, zeros only at the tail. Length is
    /// `min(rows, cols)`.
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

/// Smith normal form by gcd-driven elimination. Pivot choice is the
/// smallest nonzero |entry| in the active block, ties broken by lowest row
/// then lowest column, so transforms are reproducible. Rectangular input is
/// accepted.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| (0..cols).map(|j| m.get(i, j).clone()).collect())
        .collect();
    let mut left: Vec<Vec<BigInt>> = identity_rows(rows);
    // Column operations are applied to the rows of rightᵀ.
    let mut right_t: Vec<Vec<BigInt>> = identity_rows(cols);

    let steps = rows.min(cols);
    for t in 0..steps {
        while let Some((pi, pj)) = smallest_nonzero(&a, t) {
            a.swap(t, pi);
            left.swap(t, pi);
            if pj != t {
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
                right_t.swap(t, pj);
            }
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut left, i, t, &q);
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut() {
                    let v = &row[t] * &q;
                    row[j] -= v;
                }
                row_axpy(&mut right_t, j, t, &q);
                dirty |= !a[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            // Row and column clean; enforce divisibility of the rest.
            let piv = a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    let one = BigInt::from(-1);
                    row_axpy(&mut a, t, i, &one);
                    row_axpy(&mut left, t, i, &one);
                }
                None => break,
            }
        }
        if t < rows && t < cols && a[t][t].is_negative() {
            for v in a[t].iter_mut() {
                *v = -&*v;
            }
            for v in left[t].iter_mut() {
                *v = -&*v;
            }
        }
    }

    let diagonal = (0..steps).map(|i| a[i][i].clone()).collect();
    let flatten = |rs: Vec<Vec<BigInt>>, r: usize, c: usize| {
        IntMatrix::new(r, c, rs.into_iter().flatten().collect()).expect("shape")
    };
    SnfResult {
        diagonal,
        left: flatten(left, rows, rows),
        right: flatten(right_t, cols, cols).transpose(),
    }
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect()
}

/// row[dst] -= q * row[src]
fn row_axpy(a: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    let (d, s) = if dst < src {
        let (lo, hi) = a.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        *x -= y * q;
    }
}

fn smallest_nonzero(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().skip(t) {
            if v.is_zero() {
                continue;
            }
            let mag = v.abs();
            if best.as_ref().is_none_or(|(b, _, _)| mag < *b) {
                best = Some((mag, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Element `(p + q·√d)/r` of the real quadratic field of fundamental
/// discriminant `d`. When `d = 4D` the symbol `√d` means `2√D`.
///
/// Always stored with `gcd(p, q, r) = 1` and `r > 0`, so equality is
/// structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    p: BigInt,
    q: BigInt,
    r: BigInt,
    d: i64,
}

impl FieldElem {
    pub fn new(p: BigInt, q: BigInt, r: BigInt, d: i64) -> Self {
        assert!(!r.is_zero(), "zero denominator");
        let mut e = FieldElem { p, q, r, d };
        e.normalize();
        e
    }

    pub fn from_i64(p: i64, q: i64, r: i64, d: i64) -> Self {
        Self::new(p.into(), q.into(), r.into(), d)
    }

    pub fn integer(n: impl Into<BigInt>, d: i64) -> Self {
        Self::new(n.into(), BigInt::zero(), BigInt::one(), d)
    }

    pub fn rational(x: &BigRational, d: i64) -> Self {
        Self::new(x.numer().clone(), BigInt::zero(), x.denom().clone(), d)
    }

    pub fn zero(d: i64) -> Self {
        Self::integer(0, d)
    }

    pub fn one(d: i64) -> Self {
        Self::integer(1, d)
    }

    fn normalize(&mut self) {
        let g = self.p.gcd(&self.q).gcd(&self.r);
        if !g.is_one() && !g.is_zero() {
            self.p /= &g;
            self.q /= &g;
            self.r /= &g;
        }
        if self.r.is_negative() {
            self.p = -&self.p;
            self.q = -&self.q;
            self.r = -&self.r;
        }
        if self.p.is_zero() && self.q.is_zero() {
            self.r = BigInt::one();
        }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    /// Fundamental discriminant of the ambient field.
    pub fn field_disc(&self) -> i64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn conj(&self) -> Self {
        FieldElem {
            p: self.p.clone(),
            q: -&self.q,
            r: self.r.clone(),
            d: self.d,
        }
    }

    pub fn norm(&self) -> BigRational {
        let num = &self.p * &self.p - &self.q * &self.q * BigInt::from(self.d);
        BigRational::new(num, &self.r * &self.r)
    }

    pub fn trace(&self) -> BigRational {
        BigRational::new(BigInt::from(2) * &self.p, self.r.clone())
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        let n = self.norm();
        // 1/x = x̄ / N(x)
        let c = self.conj();
        FieldElem::new(
            c.p * n.denom(),
            c.q * n.denom(),
            c.r * n.numer(),
            self.d,
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = FieldElem::one(self.d);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Sign of the real embedding where `√d > 0`.
    pub fn signum(&self) -> Ordering {
        let sp = self.p.sign();
        let sq = self.q.sign();
        use num_bigint::Sign::*;
        match (sp, sq) {
            (NoSign, NoSign) => Ordering::Equal,
            (Plus, Plus) | (Plus, NoSign) | (NoSign, Plus) => Ordering::Greater,
            (Minus, Minus) | (Minus, NoSign) | (NoSign, Minus) => Ordering::Less,
            (Plus, Minus) | (Minus, Plus) => {
                // compare p² against q²d
                let lhs = &self.p * &self.p;
                let rhs = &self.q * &self.q * BigInt::from(self.d);
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sp_ord(sp),
                    Ordering::Less => sp_ord(sq),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    /// Approximate real value, for diagnostics only.
    pub fn approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        let r = self.r.to_f64().unwrap_or(f64::NAN);
        (p + q * (self.d as f64).sqrt()) / r
    }

    fn check_field(&self, other: &Self) {
        assert_eq!(self.d, other.d, "elements from different fields");
    }
}

fn sp_ord(s: num_bigint::Sign) -> Ordering {
    match s {
        num_bigint::Sign::Plus => Ordering::Greater,
        num_bigint::Sign::Minus => Ordering::Less,
        num_bigint::Sign::NoSign => Ordering::Equal,
    }
}

impl Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, o: &FieldElem) -> FieldElem {
        self.check_field(o);
        FieldElem::new(
            &self.p * &o.r + &o.p * &self.r,
            &self.q * &o.r + &o.q * &self.r,
            &self.r * &o.r,
            self.d,
        )
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, o: &FieldElem) -> FieldElem {
        self + &(-o)
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            p: -&self.p,
            q: -&self.q,
            r: self.r.clone(),
            d: self.d,
        }
    }
}

impl Mul for &FieldElem {
    type Output = FieldElem;
    fn mul(self, o: &FieldElem) -> FieldElem {
        self.check_field(o);
        let d = BigInt::from(self.d);
        FieldElem::new(
            &self.p * &o.p + &self.q * &o.q * d,
            &self.p * &o.q + &self.q * &o.p,
            &self.r * &o.r,
            self.d,
        )
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sqrt = format!("√{}", self.d);
        let num = match (self.p.is_zero(), self.q.is_zero()) {
            (true, true) => "0".to_string(),
            (false, true) => self.p.to_string(),
            (true, false) => coeff_sqrt(&self.q, &sqrt),
            (false, false) => {
                let qs = coeff_sqrt(&self.q.abs(), &sqrt);
                let sign = if self.q.is_negative() { "-" } else { "+" };
                format!("{}{sign}{qs}", self.p)
            }
        };
        if self.r.is_one() {
            f.write_str(&num)
        } else if self.q.is_zero() {
            write!(f, "{num}/{}", self.r)
        } else {
            write!(f, "({num})/{}", self.r)
        }
    }
}

fn coeff_sqrt(q: &BigInt, sqrt: &str) -> String {
    if q.is_one() {
        sqrt.to_string()
    } else if *q == BigInt::from(-1) {
        format!("-{sqrt}")
    } else {
        format!("{q}{sqrt}")
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_in_q_sqrt51() {
        // d_K = 204, √204 = 2√51, λ = 7 + √51 = (14 + √204)/2
        let lam = FieldElem::from_i64(14, 1, 2, 204);
        assert_eq!(lam.norm(), BigRational::from_integer((-2).into()));
        assert_eq!(lam.trace(), BigRational::from_integer(14.into()));
        let prod = &lam * &lam.inv();
        assert_eq!(prod, FieldElem::one(204));
        let sq = &lam * &lam;
        // λ² = 14λ + 2
        let rhs = &(&FieldElem::integer(14, 204) * &lam) + &FieldElem::integer(2, 204);
        assert_eq!(sq, rhs);
    }

    #[test]
    fn sign_of_real_embedding() {
        // √51 − 7 > 0
        assert_eq!(FieldElem::from_i64(-14, 1, 2, 204).signum(), Ordering::Greater);
        // 7 − √51 < 0
        assert_eq!(FieldElem::from_i64(14, -1, 2, 204).signum(), Ordering::Less);
        assert_eq!(FieldElem::zero(5).signum(), Ordering::Equal);
    }

    #[test]
    fn normalization_is_canonical() {
        assert_eq!(FieldElem::from_i64(2, 4, -6, 5), FieldElem::from_i64(-1, -2, 3, 5));
        assert_eq!(FieldElem::from_i64(0, 0, 7, 5), FieldElem::zero(5));
    }
}

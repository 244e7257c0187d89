//! Ideals of a real quadratic order as rank-2 lattices in Hermite form.
//!
//! Coordinates are taken with respect to the basis `(1, ω)` of the owner
//! ring, `ω = (Δ + √Δ)/2`, where `Δ` is the owner's discriminant. Then
//! `ω² = Δ·ω − n` with `n = (Δ² − Δ)/4 = N(ω)`.
//!
//! Every ideal lattice has the shape `content·(a·ℤ + (b + ω)·ℤ)` with
//! `a > 0`, `0 ≤ b < a` and `a | N(b + ω)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{FieldElem, Owner, QuadError, QuadOrderCtx};
use crate::intmat::{smith_normal_form, IntMatrix};

pub(crate) type Coord = (BigRational, BigRational);

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrderIdeal {
    owner: Owner,
    disc: i64,
    content: BigRational,
    a: BigInt,
    b: BigInt,
}

impl OrderIdeal {
    /// Unit ideal of the ring with discriminant `disc`.
    pub fn unit(owner: Owner, disc: i64) -> Self {
        OrderIdeal {
            owner,
            disc,
            content: BigRational::one(),
            a: BigInt::one(),
            b: BigInt::zero(),
        }
    }

    /// Builds `content·(aℤ + (b+ω)ℤ)`, reducing `b` modulo `a` and checking
    /// closure under the owner ring.
    pub fn from_parts(
        owner: Owner,
        disc: i64,
        content: BigRational,
        a: BigInt,
        b: BigInt,
    ) -> Result<Self, QuadError> {
        if !a.is_positive() || !content.is_positive() {
            return Err(QuadError::NotAnIdeal("a and content must be positive".into()));
        }
        let b = b.mod_floor(&a);
        let nb = norm_b_omega(disc, &b);
        if !nb.is_multiple_of(&a) {
            return Err(QuadError::NotAnIdeal(format!(
                "a = {a} does not divide N(b + ω) = {nb}"
            )));
        }
        Ok(OrderIdeal {
            owner,
            disc,
            content,
            a,
            b,
        })
    }

    pub fn owner(&self) -> Owner {
        self.owner
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn content(&self) -> &BigRational {
        &self.content
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn is_unit(&self) -> bool {
        self.content.is_one() && self.a.is_one()
    }

    /// Contained in the owner ring.
    pub fn is_integral(&self) -> bool {
        self.content.is_integer()
    }

    pub fn primitive_part(&self) -> OrderIdeal {
        OrderIdeal {
            content: BigRational::one(),
            ..self.clone()
        }
    }

    pub fn norm(&self) -> BigRational {
        &self.content * &self.content * BigRational::from_integer(self.a.clone())
    }

    /// Hermite basis `content·a`, `content·(b + ω)` in coordinates.
    pub(crate) fn basis(&self) -> [Coord; 2] {
        let c = &self.content;
        [
            (c * BigRational::from_integer(self.a.clone()), BigRational::zero()),
            (c * BigRational::from_integer(self.b.clone()), c.clone()),
        ]
    }

    pub fn conj(&self) -> OrderIdeal {
        // ω̄ = Δ − ω, so b + ω̄ ≡ −(−b − Δ + ω)
        let b = (-&self.b - BigInt::from(self.disc)).mod_floor(&self.a);
        OrderIdeal {
            b,
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &BigRational) -> OrderIdeal {
        assert!(c.is_positive(), "ideal scaling by a non-positive rational");
        OrderIdeal {
            content: &self.content * c,
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &OrderIdeal) -> Result<OrderIdeal, QuadError> {
        self.check_compatible(other)?;
        let x = self.primitive_part().basis();
        let y = other.primitive_part().basis();
        let mut gens = Vec::with_capacity(4);
        for u in &x {
            for v in &y {
                gens.push(coord_mul(self.disc, u, v));
            }
        }
        let prod = lattice_to_ideal(self.owner, self.disc, &gens)?;
        Ok(prod.scale(&(&self.content * &other.content)))
    }

    /// `(self : other) = { ξ ∈ K : ξ·other ⊆ self }`, computed as the
    /// intersection of `β⁻¹·self` over a basis `β` of `other`.
    pub fn colon(&self, other: &OrderIdeal) -> Result<OrderIdeal, QuadError> {
        self.check_compatible(other)?;
        let mine = self.basis();
        let mut lattices: Vec<[Coord; 2]> = Vec::new();
        for beta in other.basis() {
            let inv = coord_inv(self.disc, &beta);
            lattices.push([coord_mul(self.disc, &mine[0], &inv), coord_mul(self.disc, &mine[1], &inv)]);
        }
        let meet = lattice_intersection(&lattices[0], &lattices[1]);
        lattice_to_ideal(self.owner, self.disc, &meet)
    }

    /// `I·(R:I) = R`, where `R` is the owner ring. Always true for the
    /// maximal order.
    pub fn is_invertible(&self) -> bool {
        let unit = OrderIdeal::unit(self.owner, self.disc);
        match unit.colon(self).and_then(|c| self.mul(&c)) {
            Ok(p) => p == unit,
            Err(_) => false,
        }
    }

    pub fn inv(&self) -> Result<OrderIdeal, QuadError> {
        if self.owner == Owner::Order && !self.is_invertible() {
            return Err(QuadError::NotInvertible(self.to_string()));
        }
        // I⁻¹ = Ī / N(I)
        Ok(self.conj().scale(&self.norm().recip()))
    }

    /// Whether `x` lies in the ideal; `x` must be given in coordinates.
    pub(crate) fn contains_coord(&self, x: &Coord) -> bool {
        // x = u·content·a + v·content·(b+ω)
        let v = &x.1 / &self.content;
        if !v.is_integer() {
            return false;
        }
        let rest = &x.0 - &v * &self.content * BigRational::from_integer(self.b.clone());
        let u = rest / (&self.content * BigRational::from_integer(self.a.clone()));
        u.is_integer()
    }

    pub fn contains(&self, ctx: &QuadOrderCtx, x: &FieldElem) -> bool {
        self.contains_coord(&ctx.to_coord(self.disc, x))
    }

    /// `self ⊆ other` as lattices.
    pub fn is_subset_of(&self, other: &OrderIdeal) -> bool {
        self.disc == other.disc && self.basis().iter().all(|v| other.contains_coord(v))
    }

    fn check_compatible(&self, other: &OrderIdeal) -> Result<(), QuadError> {
        if self.owner != other.owner || self.disc != other.disc {
            return Err(QuadError::MixedContexts);
        }
        Ok(())
    }
}

impl fmt::Display for OrderIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let owner = match self.owner {
            Owner::Maximal => "max",
            Owner::Order => "ord",
        };
        write!(
            f,
            "disc={};owner={};content={};a={};b={}",
            self.disc, owner, self.content, self.a, self.b
        )
    }
}

impl fmt::Debug for OrderIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrderIdeal({self})")
    }
}

impl std::str::FromStr for OrderIdeal {
    type Err = QuadError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || QuadError::Parse(s.to_string());
        let mut disc = None;
        let mut owner = None;
        let mut content = None;
        let mut a = None;
        let mut b = None;
        for part in s.split(';') {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            match k {
                "disc" => disc = Some(v.parse::<i64>().map_err(|_| bad())?),
                "owner" => {
                    owner = Some(match v {
                        "max" => Owner::Maximal,
                        "ord" => Owner::Order,
                        _ => return Err(bad()),
                    })
                }
                "content" => content = Some(v.parse::<BigRational>().map_err(|_| bad())?),
                "a" => a = Some(v.parse::<BigInt>().map_err(|_| bad())?),
                "b" => b = Some(v.parse::<BigInt>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        OrderIdeal::from_parts(
            owner.ok_or_else(bad)?,
            disc.ok_or_else(bad)?,
            content.ok_or_else(bad)?,
            a.ok_or_else(bad)?,
            b.ok_or_else(bad)?,
        )
    }
}

/// `N(ω) = (Δ² − Δ)/4`.
pub(crate) fn norm_omega(disc: i64) -> BigInt {
    let d = BigInt::from(disc);
    (&d * &d - &d) / 4
}

/// `N(b + ω) = b² + Δ·b + N(ω)`.
pub(crate) fn norm_b_omega(disc: i64, b: &BigInt) -> BigInt {
    b * b + BigInt::from(disc) * b + norm_omega(disc)
}

pub(crate) fn coord_mul(disc: i64, u: &Coord, v: &Coord) -> Coord {
    let n = BigRational::from_integer(norm_omega(disc));
    let dd = BigRational::from_integer(disc.into());
    let yy = &u.1 * &v.1;
    (
        &u.0 * &v.0 - &yy * &n,
        &u.0 * &v.1 + &v.0 * &u.1 + &yy * &dd,
    )
}

pub(crate) fn coord_norm(disc: i64, u: &Coord) -> BigRational {
    let n = BigRational::from_integer(norm_omega(disc));
    let dd = BigRational::from_integer(disc.into());
    &u.0 * &u.0 + &u.0 * &u.1 * dd + &u.1 * &u.1 * n
}

pub(crate) fn coord_inv(disc: i64, u: &Coord) -> Coord {
    // conj(x + yω) = (x + yΔ) − yω
    let n = coord_norm(disc, u);
    let dd = BigRational::from_integer(disc.into());
    ((&u.0 + &u.1 * dd) / &n, -&u.1 / &n)
}

fn common_denominator(vs: &[Coord]) -> BigInt {
    vs.iter().fold(BigInt::one(), |acc, (x, y)| {
        acc.lcm(x.denom()).lcm(y.denom())
    })
}

fn scaled_integer(v: &Coord, l: &BigInt) -> (BigInt, BigInt) {
    let lr = BigRational::from_integer(l.clone());
    ((&v.0 * &lr).to_integer(), (&v.1 * &lr).to_integer())
}

/// Hermite basis `(A, 0), (B0, C)` of the lattice spanned by integer
/// vectors, with `A, C > 0` and `0 ≤ B0 < A`.
fn integer_hnf(vs: &[(BigInt, BigInt)]) -> Option<(BigInt, BigInt, BigInt)> {
    // Combine into a single vector with y = gcd of all y's.
    let mut acc: Option<(BigInt, BigInt)> = None;
    for (x, y) in vs {
        if y.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => (x.clone(), y.clone()),
            Some((ax, ay)) => {
                let e = ay.extended_gcd(y);
                (&e.x * &ax + &e.y * x, e.gcd)
            }
        });
    }
    let (mut vx, mut vy) = acc?;
    if vy.is_negative() {
        vx = -vx;
        vy = -vy;
    }
    let mut a = BigInt::zero();
    for (x, y) in vs {
        let w = x - (y / &vy) * &vx;
        a = a.gcd(&w);
    }
    if a.is_zero() {
        return None;
    }
    let b0 = vx.mod_floor(&a);
    Some((a, b0, vy))
}

pub(crate) fn lattice_to_ideal(owner: Owner, disc: i64, gens: &[Coord]) -> Result<OrderIdeal, QuadError> {
    let l = common_denominator(gens);
    let ints: Vec<_> = gens.iter().map(|g| scaled_integer(g, &l)).collect();
    let (a_big, b0, c) = integer_hnf(&ints).ok_or(QuadError::Degenerate)?;
    if !a_big.is_multiple_of(&c) || !b0.is_multiple_of(&c) {
        return Err(QuadError::NotAnIdeal("lattice is not closed under ω".into()));
    }
    let content = BigRational::new(c.clone(), l);
    OrderIdeal::from_parts(owner, disc, content, &a_big / &c, &b0 / &c)
}

/// Generators of `L1 ∩ L2` for two full-rank lattices given by bases.
fn lattice_intersection(l1: &[Coord; 2], l2: &[Coord; 2]) -> Vec<Coord> {
    let all: Vec<Coord> = l1.iter().chain(l2.iter()).cloned().collect();
    let den = common_denominator(&all);
    let u: Vec<_> = l1.iter().map(|v| scaled_integer(v, &den)).collect();
    let w: Vec<_> = l2.iter().map(|v| scaled_integer(v, &den)).collect();
    // Kernel of [u1 u2 −w1 −w2] gives u-combinations landing in L2.
    let m = IntMatrix::new(
        2,
        4,
        vec![
            u[0].0.clone(),
            u[1].0.clone(),
            -&w[0].0,
            -&w[1].0,
            u[0].1.clone(),
            u[1].1.clone(),
            -&w[0].1,
            -&w[1].1,
        ],
    )
    .expect("2x4 shape");
    let snf = smith_normal_form(&m);
    let den_r = BigRational::from_integer(den);
    (2..4)
        .map(|col| {
            let k0 = snf.right.get(0, col);
            let k1 = snf.right.get(1, col);
            let x = k0 * &u[0].0 + k1 * &u[1].0;
            let y = k0 * &u[0].1 + k1 * &u[1].1;
            (
                BigRational::from_integer(x) / &den_r,
                BigRational::from_integer(y) / &den_r,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal(disc: i64, a: i64, b: i64) -> OrderIdeal {
        OrderIdeal::from_parts(Owner::Maximal, disc, BigRational::one(), a.into(), b.into()).unwrap()
    }

    #[test]
    fn closure_is_checked() {
        // 204 ≡ 0 mod 4, N(b+ω) = b² + 204b + (204²−204)/4; b = 1 → even
        assert!(OrderIdeal::from_parts(Owner::Maximal, 204, BigRational::one(), 2.into(), 1.into()).is_ok());
        assert!(OrderIdeal::from_parts(Owner::Maximal, 204, BigRational::one(), 2.into(), 0.into()).is_err());
    }

    #[test]
    fn unit_times_j_is_j() {
        let j = ideal(204, 5, 2);
        let u = OrderIdeal::unit(Owner::Maximal, 204);
        assert_eq!(u.mul(&j).unwrap(), j);
    }

    #[test]
    fn inverse_and_conjugate() {
        let j = ideal(204, 5, 2);
        let inv = j.inv().unwrap();
        assert_eq!(j.mul(&inv).unwrap(), OrderIdeal::unit(Owner::Maximal, 204));
        let jj = j.mul(&j.conj()).unwrap();
        assert_eq!(jj, OrderIdeal::unit(Owner::Maximal, 204).scale(&j.norm()));
    }

    #[test]
    fn colon_by_unit_is_identity() {
        let a = ideal(204, 2, 1);
        let u = OrderIdeal::unit(Owner::Maximal, 204);
        assert_eq!(a.colon(&u).unwrap(), a);
        assert!(u.is_subset_of(&a.colon(&a).unwrap()));
    }

    #[test]
    fn text_round_trip() {
        let a = ideal(204, 5, 2).scale(&BigRational::new(3.into(), 7.into()));
        let s = a.to_string();
        assert_eq!(s, "disc=204;owner=max;content=3/7;a=5;b=2");
        assert_eq!(s.parse::<OrderIdeal>().unwrap(), a);
    }

    #[test]
    fn non_invertible_order_ideal() {
        // Δ = 20 (conductor 2 over Q(√5)): the conductor ideal 2O_K = 2ℤ + (1+ω)ℤ... as
        // an O-ideal aℤ + (b+ω)ℤ with a = 2 and a | N(b+ω) but gcd(a, B, C) = 2.
        let disc = 20;
        let cands: Vec<_> = (0..2)
            .filter_map(|b| {
                OrderIdeal::from_parts(Owner::Order, disc, BigRational::one(), 2.into(), b.into()).ok()
            })
            .collect();
        assert!(!cands.is_empty());
        assert!(cands.iter().any(|i| !i.is_invertible()));
        for c in cands.iter().filter(|i| !i.is_invertible()) {
            assert!(matches!(c.inv(), Err(QuadError::NotInvertible(_))));
        }
    }
}

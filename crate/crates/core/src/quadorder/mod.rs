//! Exact arithmetic in real quadratic fields and their orders.
//!
//! The ring `O = ℤ[λ]` generated by a Perron root of a quadratic integer
//! polynomial sits inside the maximal order `O_K` of `K = ℚ(λ)`. Both rings
//! are handled by the same Hermite-form ideal type, tagged with an
//! [`Owner`]. Class computations use ordinary (not narrow) equivalence:
//! `I ~ J` iff `ξ·I = J` for some `ξ ∈ K^×` of either norm sign.

mod classes;
mod elem;
mod ideal;
mod primes;
mod reduce;

pub use classes::{class_equal_mod_subgroup, class_order, coset_label, subgroup_labels, ClassSubgroup};
pub use elem::FieldElem;
pub use ideal::OrderIdeal;
pub use primes::{primes_above, PrimeFactorization};
pub use reduce::{
    class_label, fundamental_unit, is_principal, reduce, reduce_cycle, ClassLabel, CycleEntry,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::intmat::IntPoly;
use ideal::Coord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("polynomial {0} is not a monic quadratic")]
    NotQuadratic(String),
    #[error("polynomial {0} is reducible over Q")]
    Reducible(String),
    #[error("polynomial {0} has non-real roots")]
    NonReal(String),
    #[error("polynomial {0} has no positive real root")]
    NotPerron(String),
    #[error("discriminant out of supported range")]
    DiscriminantTooLarge,
    #[error("ideals belong to different rings")]
    MixedContexts,
    #[error("not an ideal: {0}")]
    NotAnIdeal(String),
    #[error("degenerate lattice (generators do not span rank 2)")]
    Degenerate,
    #[error("ideal {0} is not invertible")]
    NotInvertible(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("element is not integral over the ring")]
    NotIntegral,
    #[error("no generators given, or all generators are zero")]
    ZeroIdeal,
    #[error("search limit exceeded: {0}")]
    Limit(String),
    #[error("cannot parse ideal: {0}")]
    Parse(String),
}

/// Which ring an ideal lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    /// The maximal order `O_K`.
    Maximal,
    /// The order `O = ℤ[λ]`.
    Order,
}

/// A real quadratic field together with the order `ℤ[λ]` of a Perron root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadOrderCtx {
    /// Squarefree `D > 1` with `K = ℚ(√D)`.
    pub radicand: i64,
    /// Fundamental discriminant `d_K`.
    pub field_disc: i64,
    /// Discriminant of `O = ℤ[λ]`, equal to `f²·d_K`.
    pub order_disc: i64,
    /// Conductor `f` of `O` in `O_K`.
    pub conductor: i64,
    /// The larger real root of the minimal polynomial.
    pub lambda: FieldElem,
    /// `λ² − trace·λ + norm = 0`.
    pub trace: i64,
    pub norm: i64,
}

impl QuadOrderCtx {
    /// Discriminant of the given owner ring.
    pub fn disc(&self, owner: Owner) -> i64 {
        match owner {
            Owner::Maximal => self.field_disc,
            Owner::Order => self.order_disc,
        }
    }

    fn sqrt_scale(&self, disc: i64) -> i64 {
        let f2 = disc / self.field_disc;
        let f = isqrt_i64(f2);
        assert!(f * f * self.field_disc == disc, "discriminant {disc} not in this field");
        f
    }

    /// `x + y·ω` for the ring of discriminant `disc`, as a field element.
    pub(crate) fn from_coord(&self, disc: i64, c: &Coord) -> FieldElem {
        // ω = (Δ + f√d_K)/2
        let f = BigRational::from_integer(self.sqrt_scale(disc).into());
        let dd = BigRational::from_integer(disc.into());
        let two = BigRational::from_integer(2.into());
        let p = &c.0 * &two + &c.1 * &dd;
        let q = &c.1 * &f;
        let den = p.denom().lcm(q.denom());
        let dr = BigRational::from_integer(den.clone());
        FieldElem::new(
            (p * &dr).to_integer(),
            (q * &dr).to_integer(),
            den * 2,
            self.field_disc,
        )
    }

    pub(crate) fn to_coord(&self, disc: i64, x: &FieldElem) -> Coord {
        let f = self.sqrt_scale(disc);
        let r = x.r();
        let y = BigRational::new(BigInt::from(2) * x.q(), r * f);
        let xx = BigRational::new(x.p().clone(), r.clone())
            - BigRational::new(x.q() * BigInt::from(disc), r * f);
        (xx, y)
    }

    /// `ω` of the owner ring as a field element.
    pub fn omega(&self, owner: Owner) -> FieldElem {
        let disc = self.disc(owner);
        self.from_coord(disc, &(BigRational::zero(), BigRational::one()))
    }

    /// Whether `x` lies in the owner ring.
    pub fn is_integral(&self, owner: Owner, x: &FieldElem) -> bool {
        let (a, b) = self.to_coord(self.disc(owner), x);
        a.is_integer() && b.is_integer()
    }

    /// Module generated by `gens` over the owner ring, in Hermite form.
    pub fn ideal_from_gens(&self, owner: Owner, gens: &[FieldElem]) -> Result<OrderIdeal, QuadError> {
        let disc = self.disc(owner);
        let omega = (BigRational::zero(), BigRational::one());
        let mut coords = Vec::new();
        for g in gens.iter().filter(|g| !g.is_zero()) {
            let c = self.to_coord(disc, g);
            coords.push(ideal::coord_mul(disc, &c, &omega));
            coords.push(c);
        }
        if coords.is_empty() {
            return Err(QuadError::ZeroIdeal);
        }
        ideal::lattice_to_ideal(owner, disc, &coords)
    }

    /// Principal ideal `x·R`.
    pub fn principal(&self, owner: Owner, x: &FieldElem) -> Result<OrderIdeal, QuadError> {
        self.ideal_from_gens(owner, std::slice::from_ref(x))
    }

    /// `O_K·I` for an ideal `I` of `O`.
    pub fn extend_to_maximal(&self, i: &OrderIdeal) -> Result<OrderIdeal, QuadError> {
        if i.owner() == Owner::Maximal {
            return Ok(i.clone());
        }
        let gens: Vec<FieldElem> = i
            .basis()
            .iter()
            .map(|c| self.from_coord(i.disc(), c))
            .collect();
        self.ideal_from_gens(Owner::Maximal, &gens)
    }
}

/// Builds the context for the Perron root of a monic quadratic.
pub fn make_ctx(charpoly: &IntPoly) -> Result<QuadOrderCtx, QuadError> {
    if charpoly.degree() != Some(2) || !charpoly.is_monic() {
        return Err(QuadError::NotQuadratic(charpoly.to_string()));
    }
    let c1 = charpoly.coeff(1).to_i64().ok_or(QuadError::DiscriminantTooLarge)?;
    let c0 = charpoly.coeff(0).to_i64().ok_or(QuadError::DiscriminantTooLarge)?;
    let disc = c1
        .checked_mul(c1)
        .and_then(|s| c0.checked_mul(4).and_then(|f| s.checked_sub(f)))
        .ok_or(QuadError::DiscriminantTooLarge)?;
    if disc < 0 {
        return Err(QuadError::NonReal(charpoly.to_string()));
    }
    let s = isqrt_i64(disc);
    if s * s == disc {
        return Err(QuadError::Reducible(charpoly.to_string()));
    }
    let trace = -c1;
    if trace <= 0 && c0 >= 0 {
        return Err(QuadError::NotPerron(charpoly.to_string()));
    }
    let (square, radicand) = square_decompose(disc);
    let (field_disc, conductor) = if radicand.rem_euclid(4) == 1 {
        (radicand, square)
    } else {
        debug_assert!(square % 2 == 0);
        (4 * radicand, square / 2)
    };
    let lambda = FieldElem::new(trace.into(), conductor.into(), 2.into(), field_disc);
    Ok(QuadOrderCtx {
        radicand,
        field_disc,
        order_disc: disc,
        conductor,
        lambda,
        trace,
        norm: c0,
    })
}

/// `n = s²·m` with `m` squarefree.
fn square_decompose(n: i64) -> (i64, i64) {
    let mut s = 1;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        while m % (p * p) == 0 {
            m /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, m)
}

pub(crate) fn isqrt_i64(n: i64) -> i64 {
    assert!(n >= 0);
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

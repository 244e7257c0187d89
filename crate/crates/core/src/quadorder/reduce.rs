//! Continued-fraction reduction of ideals in real quadratic orders.
//!
//! A primitive ideal `aℤ + ((B + √Δ)/2)ℤ` is tracked as the indefinite form
//! `(a, B, C)` with `B² − 4aC = Δ`. One reduction step sends `(a, B, C)` to
//! `(C, s, (s² − Δ)/4C)` with `s ≡ −B (mod 2|C|)` normalized, and multiplies
//! the ideal by `(B − √Δ)/2a`. Reduced forms fall into a finite cycle; the
//! ideal is principal iff a form with `|a| = 1` occurs in it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ideal, isqrt_i64, FieldElem, OrderIdeal, Owner, QuadError, QuadOrderCtx};

const MAX_REDUCTION_STEPS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Form {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

/// One member of a reduction cycle: `ideal = relating·input`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleEntry {
    pub ideal: OrderIdeal,
    pub relating: FieldElem,
}

/// Canonical label of an ordinary ideal class: the least `(|a|, B)` over the
/// reduced forms of its cycle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLabel {
    pub a: BigInt,
    pub b: BigInt,
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.a, self.b)
    }
}

struct Disc {
    value: BigInt,
    floor_sqrt: BigInt,
}

impl Disc {
    fn new(d: i64) -> Self {
        Disc {
            value: d.into(),
            floor_sqrt: isqrt_i64(d).into(),
        }
    }

    fn is_reduced(&self, f: &Form) -> bool {
        let two_a = BigInt::from(2) * f.a.abs();
        if !f.b.is_positive() || &f.b * &f.b >= self.value {
            return false;
        }
        let hi = &two_a + &f.b;
        let lo = &two_a - &f.b;
        &hi * &hi > self.value && (lo.is_negative() || &lo * &lo < self.value)
    }

    /// `s ≡ b (mod 2|c|)`, in `(−|c|, |c|]` when `|c| > √Δ` and in
    /// `(√Δ − 2|c|, √Δ)` otherwise.
    fn normalize(&self, b: &BigInt, c: &BigInt) -> BigInt {
        let ac = c.abs();
        let m = BigInt::from(2) * &ac;
        if &ac * &ac > self.value {
            let s = b.mod_floor(&m);
            if s > ac {
                s - m
            } else {
                s
            }
        } else {
            let lo: BigInt = &self.floor_sqrt - &m + 1;
            lo.clone() + (b - &lo).mod_floor(&m)
        }
    }

    fn rho(&self, f: &Form) -> Form {
        let s = self.normalize(&-&f.b, &f.c);
        let c = (&s * &s - &self.value) / (BigInt::from(4) * &f.c);
        Form {
            a: f.c.clone(),
            b: s,
            c,
        }
    }
}

fn form_of(i: &OrderIdeal) -> Form {
    let disc = BigInt::from(i.disc());
    let b = BigInt::from(2) * i.b() + &disc;
    let c = (&b * &b - &disc) / (BigInt::from(4) * i.a());
    Form {
        a: i.a().clone(),
        b,
        c,
    }
}

fn ideal_of(owner: Owner, disc: i64, f: &Form) -> OrderIdeal {
    // (B + √Δ)/2 = (B − Δ)/2 + ω
    let b = (&f.b - BigInt::from(disc)) / 2;
    OrderIdeal::from_parts(owner, disc, BigRational::one(), f.a.abs(), b)
        .expect("reduction preserves the ideal property")
}

/// `(B − √Δ)/2a`, the factor carrying one reduction step.
fn step_factor(ctx: &QuadOrderCtx, disc: i64, f: &Form) -> FieldElem {
    let scale = isqrt_i64(disc / ctx.field_disc);
    FieldElem::new(
        f.b.clone(),
        BigInt::from(-scale),
        BigInt::from(2) * &f.a,
        ctx.field_disc,
    )
}

/// Forms from the start up to and including one full period of the cycle.
/// Returns (preperiod length, forms).
fn walk(disc: &Disc, start: Form) -> Result<(usize, Vec<Form>), QuadError> {
    let mut forms = vec![start];
    let mut pre = 0;
    while !disc.is_reduced(forms.last().unwrap()) {
        if forms.len() > MAX_REDUCTION_STEPS {
            return Err(QuadError::Limit("reduction did not reach a reduced form".into()));
        }
        let next = disc.rho(forms.last().unwrap());
        forms.push(next);
        pre += 1;
    }
    let first = forms[pre].clone();
    loop {
        let next = disc.rho(forms.last().unwrap());
        if next == first {
            break;
        }
        if forms.len() > pre + MAX_REDUCTION_STEPS {
            return Err(QuadError::Limit("reduction cycle too long".into()));
        }
        forms.push(next);
    }
    Ok((pre, forms))
}

fn require_invertible(i: &OrderIdeal) -> Result<(), QuadError> {
    if i.owner() == Owner::Order && !i.is_invertible() {
        return Err(QuadError::NotInvertible(i.to_string()));
    }
    Ok(())
}

/// The cycle of reduced ideals equivalent to `i`, starting at the first
/// reduced ideal reached, each with the element relating it to `i`.
pub fn reduce_cycle(ctx: &QuadOrderCtx, i: &OrderIdeal) -> Result<Vec<CycleEntry>, QuadError> {
    require_invertible(i)?;
    let disc_v = i.disc();
    let disc = Disc::new(disc_v);
    let (pre, forms) = walk(&disc, form_of(i))?;
    // relating element for the primitive part, then divide by content
    let mut g = FieldElem::rational(&i.content().recip(), ctx.field_disc);
    let mut out = Vec::with_capacity(forms.len() - pre);
    for (k, f) in forms.iter().enumerate() {
        if k >= pre {
            out.push(CycleEntry {
                ideal: ideal_of(i.owner(), disc_v, f),
                relating: g.clone(),
            });
        }
        g = &g * &step_factor(ctx, disc_v, f);
    }
    Ok(out)
}

/// First reduced ideal equivalent to `i`, with its relating element.
pub fn reduce(ctx: &QuadOrderCtx, i: &OrderIdeal) -> Result<CycleEntry, QuadError> {
    require_invertible(i)?;
    let disc_v = i.disc();
    let disc = Disc::new(disc_v);
    let mut f = form_of(i);
    let mut g = FieldElem::rational(&i.content().recip(), ctx.field_disc);
    let mut steps = 0;
    while !disc.is_reduced(&f) {
        g = &g * &step_factor(ctx, disc_v, &f);
        f = disc.rho(&f);
        steps += 1;
        if steps > MAX_REDUCTION_STEPS {
            return Err(QuadError::Limit("reduction did not reach a reduced form".into()));
        }
    }
    Ok(CycleEntry {
        ideal: ideal_of(i.owner(), disc_v, &f),
        relating: g,
    })
}

/// Decides whether `i = ξ·R` for some `ξ ∈ K^×`, returning a generator.
pub fn is_principal(ctx: &QuadOrderCtx, i: &OrderIdeal) -> Result<Option<FieldElem>, QuadError> {
    require_invertible(i)?;
    let disc = Disc::new(i.disc());
    let (pre, forms) = walk(&disc, form_of(i))?;
    let Some(hit) = forms.iter().skip(pre).position(|f| f.a.abs().is_one()) else {
        return Ok(None);
    };
    let mut g = FieldElem::rational(&i.content().recip(), ctx.field_disc);
    for f in &forms[..pre + hit] {
        g = &g * &step_factor(ctx, i.disc(), f);
    }
    Ok(Some(g.inv()))
}

/// Canonical label of the ordinary class of `i`; equal labels iff
/// equivalent ideals.
pub fn class_label(i: &OrderIdeal) -> Result<ClassLabel, QuadError> {
    require_invertible(i)?;
    let disc = Disc::new(i.disc());
    let (pre, forms) = walk(&disc, form_of(i))?;
    Ok(forms[pre..]
        .iter()
        .map(|f| ClassLabel {
            a: f.a.abs(),
            b: f.b.clone(),
        })
        .min()
        .expect("cycle is nonempty"))
}

/// The fundamental unit `ε > 1` of the owner ring, found among the
/// continued-fraction convergents `h/k` of `−ω̄` as the first `h + kω` of
/// norm ±1.
pub fn fundamental_unit(ctx: &QuadOrderCtx, owner: Owner) -> FieldElem {
    let disc_v = ctx.disc(owner);
    let d = BigInt::from(disc_v);
    let s = BigInt::from(isqrt_i64(disc_v));
    let n = ideal::norm_omega(disc_v);
    // −ω̄ = (−Δ + √Δ)/2 = (P + √Δ)/Q
    let mut p = -d.clone();
    let mut q = BigInt::from(2);
    let (mut h1, mut h2) = (BigInt::one(), BigInt::zero());
    let (mut k1, mut k2) = (BigInt::zero(), BigInt::one());
    loop {
        let a = floor_quadratic(&p, &q, &s);
        let h = &a * &h1 + &h2;
        let k = &a * &k1 + &k2;
        let norm = &h * &h + &d * &h * &k + &n * &k * &k;
        if norm.abs().is_one() {
            let coord = (BigRational::from_integer(h), BigRational::from_integer(k));
            return ctx.from_coord(disc_v, &coord);
        }
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
        let p_next = &a * &q - &p;
        let q_next = (&d - &p_next * &p_next) / &q;
        p = p_next;
        q = q_next;
    }
}

/// `⌊(P + √Δ)/Q⌋` for non-square `Δ` with `s = ⌊√Δ⌋`.
fn floor_quadratic(p: &BigInt, q: &BigInt, s: &BigInt) -> BigInt {
    if q.is_positive() {
        (p + s).div_floor(q)
    } else {
        // (P + √Δ)/Q = −(P + √Δ)/|Q|, never an integer
        -((p + s).div_floor(&-q)) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intmat::IntPoly;
    use crate::quadorder::make_ctx;

    fn ctx204() -> QuadOrderCtx {
        make_ctx(&IntPoly::from_i64(&[-2, -14, 1])).unwrap()
    }

    fn id(ctx: &QuadOrderCtx, gens: &[FieldElem]) -> OrderIdeal {
        ctx.ideal_from_gens(Owner::Maximal, gens).unwrap()
    }

    #[test]
    fn principal_examples_in_q_sqrt51() {
        let c = ctx204();
        let two = FieldElem::integer(2, 204);
        let lam = c.lambda.clone();
        let q2 = id(&c, &[two.clone(), &lam - &FieldElem::integer(14, 204)]);
        let gen = is_principal(&c, &q2).unwrap().expect("Q2 is principal");
        assert_eq!(c.principal(Owner::Maximal, &gen).unwrap(), q2);
        assert_eq!(gen.norm().abs(), BigRational::from_integer(2.into()));

        let unit = OrderIdeal::unit(Owner::Maximal, 204);
        let g = is_principal(&c, &unit).unwrap().unwrap();
        assert!(g.norm().abs().is_one());

        let five = FieldElem::integer(5, 204);
        let b = id(&c, &[five, &lam - &FieldElem::integer(13, 204)]);
        assert_eq!(b.norm(), BigRational::from_integer(5.into()));
        assert!(is_principal(&c, &b).unwrap().is_none());
    }

    #[test]
    fn cycle_members_are_related_by_their_elements() {
        let c = ctx204();
        let lam = c.lambda.clone();
        let b = id(&c, &[FieldElem::integer(5, 204), &lam - &FieldElem::integer(13, 204)]);
        let cycle = reduce_cycle(&c, &b).unwrap();
        assert!(!cycle.is_empty());
        assert!(cycle.iter().all(|e| !e.ideal.is_unit()));
        for e in &cycle {
            let scaled = c.principal(Owner::Maximal, &e.relating).unwrap().mul(&b).unwrap();
            assert_eq!(scaled, e.ideal);
        }
        let unit = OrderIdeal::unit(Owner::Maximal, 204);
        assert!(reduce_cycle(&c, &unit).unwrap().iter().any(|e| e.ideal.is_unit()));
    }

    #[test]
    fn fundamental_units() {
        // Q(√5): (1+√5)/2; Q(√2) with Δ = 8: 1+√2; Q(√51): 50 + 7√51
        let c = make_ctx(&IntPoly::from_i64(&[1, -3, 1])).unwrap();
        assert_eq!(fundamental_unit(&c, Owner::Maximal), FieldElem::from_i64(1, 1, 2, 5));
        let c = make_ctx(&IntPoly::from_i64(&[-4, -4, 1])).unwrap();
        assert_eq!(fundamental_unit(&c, Owner::Maximal), FieldElem::from_i64(2, 1, 2, 8));
        // in the order of conductor 2 (Δ = 32): (1+√2)² = 3 + 2√2
        assert_eq!(fundamental_unit(&c, Owner::Order), FieldElem::from_i64(3, 1, 1, 8));
        let c = ctx204();
        assert_eq!(fundamental_unit(&c, Owner::Maximal), FieldElem::from_i64(100, 7, 2, 204));
    }
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::{ideal, FieldElem, OrderIdeal, Owner, QuadError, QuadOrderCtx};

/// Prime ideals with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFactorization {
    pub factors: Vec<(OrderIdeal, u32)>,
}

impl PrimeFactorization {
    pub fn primes(&self) -> Vec<OrderIdeal> {
        self.factors.iter().map(|(p, _)| p.clone()).collect()
    }

    /// Product of the primes with multiplicities, or the unit ideal.
    pub fn product(&self, owner: Owner, disc: i64) -> Result<OrderIdeal, QuadError> {
        let mut acc = OrderIdeal::unit(owner, disc);
        for (p, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(p)?;
            }
        }
        Ok(acc)
    }
}

/// Factors the principal ideal generated by `element` in the owner ring.
///
/// In the non-maximal order only ideals prime to the conductor factor
/// uniquely; if `N(element)` shares a factor with the conductor the call
/// fails with [`QuadError::NotApplicable`].
pub fn primes_above(
    ctx: &QuadOrderCtx,
    owner: Owner,
    element: &FieldElem,
) -> Result<PrimeFactorization, QuadError> {
    if element.is_zero() {
        return Err(QuadError::ZeroIdeal);
    }
    if !ctx.is_integral(owner, element) {
        return Err(QuadError::NotIntegral);
    }
    let disc = ctx.disc(owner);
    let norm = element.norm().to_integer().abs();
    if owner == Owner::Order && !norm.gcd(&BigInt::from(ctx.conductor)).is_one() {
        return Err(QuadError::NotApplicable(format!(
            "N({element}) = {norm} is not prime to the conductor {}",
            ctx.conductor
        )));
    }
    let mut remaining = ctx.principal(owner, element)?;
    let mut factors = Vec::new();
    for p in rational_prime_factors(&norm)? {
        for prime in primes_over(owner, disc, p) {
            let inv = prime.inv()?;
            let mut e = 0;
            loop {
                let next = remaining.mul(&inv)?;
                if !next.is_integral() {
                    break;
                }
                remaining = next;
                e += 1;
            }
            if e > 0 {
                factors.push((prime, e));
            }
        }
    }
    debug_assert!(remaining.is_unit());
    Ok(PrimeFactorization { factors })
}

/// The prime ideals of the owner ring lying over the rational prime `p`.
fn primes_over(owner: Owner, disc: i64, p: u64) -> Vec<OrderIdeal> {
    let pb = BigInt::from(p);
    let roots: Vec<u64> = (0..p)
        .filter(|&b| ideal::norm_b_omega(disc, &BigInt::from(b)).is_multiple_of(&pb))
        .collect();
    if roots.is_empty() {
        // inert: pR is prime
        return vec![OrderIdeal::unit(owner, disc).scale(&BigRational::from_integer(pb))];
    }
    roots
        .into_iter()
        .map(|b| {
            OrderIdeal::from_parts(owner, disc, BigRational::one(), pb.clone(), b.into())
                .expect("(p, b + ω) with p | N(b + ω)")
        })
        .collect()
}

fn rational_prime_factors(n: &BigInt) -> Result<Vec<u64>, QuadError> {
    let mut n = n
        .to_u64()
        .ok_or_else(|| QuadError::Limit(format!("norm {n} too large to factor")))?;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    if out.iter().any(|&p| p > 10_000_000) {
        return Err(QuadError::Limit("prime factor too large for root search".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intmat::IntPoly;
    use crate::quadorder::make_ctx;

    #[test]
    fn lambda_in_q_sqrt51() {
        let c = make_ctx(&IntPoly::from_i64(&[-2, -14, 1])).unwrap();
        let f = primes_above(&c, Owner::Maximal, &c.lambda).unwrap();
        assert_eq!(f.factors.len(), 1);
        let (q2, e) = &f.factors[0];
        assert_eq!(*e, 1);
        assert_eq!(q2.norm(), BigRational::from_integer(2.into()));
        assert_eq!(q2.a(), &BigInt::from(2));
        assert_eq!(f.product(Owner::Maximal, 204).unwrap(), c.principal(Owner::Maximal, &c.lambda).unwrap());

        let two = primes_above(&c, Owner::Maximal, &FieldElem::integer(2, 204)).unwrap();
        assert_eq!(two.factors, vec![(q2.clone(), 2)]);

        let one = primes_above(&c, Owner::Maximal, &FieldElem::one(204)).unwrap();
        assert!(one.factors.is_empty());
    }

    #[test]
    fn inert_and_split_primes() {
        // Δ = 5: 2 is inert, 11 splits
        let c = make_ctx(&IntPoly::from_i64(&[1, -3, 1])).unwrap();
        let f = primes_above(&c, Owner::Maximal, &FieldElem::integer(22, 5)).unwrap();
        assert_eq!(f.factors.len(), 3);
        assert_eq!(f.factors[0].0.norm(), BigRational::from_integer(4.into()));
        assert_eq!(f.product(Owner::Maximal, 5).unwrap(), c.principal(Owner::Maximal, &FieldElem::integer(22, 5)).unwrap());
    }

    #[test]
    fn conductor_gate() {
        // x² − 4x − 4: f = 2, N(λ) = −4
        let c = make_ctx(&IntPoly::from_i64(&[-4, -4, 1])).unwrap();
        assert!(matches!(
            primes_above(&c, Owner::Order, &c.lambda),
            Err(QuadError::NotApplicable(_))
        ));
        assert!(primes_above(&c, Owner::Maximal, &c.lambda).is_ok());
    }

    #[test]
    fn non_integral_rejected() {
        let c = make_ctx(&IntPoly::from_i64(&[1, -3, 1])).unwrap();
        let half = FieldElem::from_i64(1, 0, 2, 5);
        assert_eq!(primes_above(&c, Owner::Maximal, &half), Err(QuadError::NotIntegral));
    }
}

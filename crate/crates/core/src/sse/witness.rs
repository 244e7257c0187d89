//! Bounded search for `x ∈ (A:B)`, `y ∈ (B:A)` with `x·y = λᵏ`.
//!
//! Every solution is a unit multiple of one with `√M ≤ |x| < ε√M` and
//! `|x̄| ≤ √M`, where `ε > 1` is the fundamental unit and
//! `M = |N(λ)|ᵏ / N((B:A))` bounds `|N(x)|`. That region is covered by a
//! box of coefficients in a basis of `(A:B)`; boxes larger than
//! [`MAX_CANDIDATES`] are clamped, so a miss proves nothing.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::quadorder::{fundamental_unit, FieldElem, OrderIdeal, QuadError, QuadOrderCtx};

pub const MAX_CANDIDATES: i64 = 4_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub x: FieldElem,
    pub y: FieldElem,
    pub k: u32,
}

pub fn find_sse_witness(
    ctx: &QuadOrderCtx,
    a: &OrderIdeal,
    b: &OrderIdeal,
    k_max: u32,
) -> Result<Option<Witness>, QuadError> {
    if a.owner() != b.owner() || a.disc() != b.disc() {
        return Err(QuadError::MixedContexts);
    }
    let owner = a.owner();
    let ab = a.colon(b)?;
    let ba = b.colon(a)?;
    let basis: Vec<FieldElem> = ab.basis().iter().map(|c| ctx.from_coord(a.disc(), c)).collect();
    let eps = fundamental_unit(ctx, owner).approx();
    let (b1, b2) = (&basis[0], &basis[1]);
    let emb = |x: &FieldElem| (x.approx(), x.conj().approx());
    let ((p1, q1), (p2, q2)) = (emb(b1), emb(b2));
    let det = (p1 * q2 - q1 * p2).abs();
    let lambda_norm = ctx.lambda.norm().abs();
    let ba_norm = ba.norm();
    let mut lam_k = FieldElem::one(ctx.field_disc);
    for k in 0..=k_max {
        let mut bound = BigRational::from_integer(BigInt::from(1));
        for _ in 0..k {
            bound *= &lambda_norm;
        }
        bound /= &ba_norm;
        let root_m = bound.to_f64().unwrap_or(f64::MAX).sqrt();
        let (x_hi, xc_hi) = (eps * root_m, root_m);
        let u_max = ((x_hi * q2.abs() + xc_hi * p2.abs()) / det).ceil() as i64 + 1;
        let v_max = ((xc_hi * p1.abs() + x_hi * q1.abs()) / det).ceil() as i64 + 1;
        let (u_max, v_max) = clamp(u_max, v_max);
        for (u, v) in shell_order(u_max, v_max) {
            let x = &(&FieldElem::integer(u, ctx.field_disc) * b1) + &(&FieldElem::integer(v, ctx.field_disc) * b2);
            if x.is_zero() || x.norm().abs() > bound {
                continue;
            }
            let y = &lam_k * &x.inv();
            if ba.contains(ctx, &y) {
                return Ok(Some(Witness { x, y, k }));
            }
        }
        lam_k = &lam_k * &ctx.lambda;
    }
    Ok(None)
}

fn clamp(u: i64, v: i64) -> (i64, i64) {
    let (mut u, mut v) = (u.max(1), v.max(1));
    while (2 * u + 1).saturating_mul(2 * v + 1) > MAX_CANDIDATES {
        if u >= v {
            u = u * 3 / 4;
        } else {
            v = v * 3 / 4;
        }
    }
    (u, v)
}

/// Coefficient pairs in the box ordered by `|u| + |v|`, then larger `u`,
/// then larger `v`.
fn shell_order(u_max: i64, v_max: i64) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = (-u_max..=u_max)
        .flat_map(|u| (-v_max..=v_max).map(move |v| (u, v)))
        .filter(|&(u, v)| u != 0 || v != 0)
        .collect();
    pts.sort_by_key(|&(u, v)| (u.abs() + v.abs(), -u, -v));
    pts
}

/// `x·y = λᵏ`, `x·B ⊆ A` and `λᵏ·A ⊆ x·B`.
pub fn verify_witness(ctx: &QuadOrderCtx, a: &OrderIdeal, b: &OrderIdeal, w: &Witness) -> bool {
    let lam_k = ctx.lambda.pow(w.k);
    if &w.x * &w.y != lam_k || w.x.is_zero() {
        return false;
    }
    let owner = a.owner();
    let (Ok(xo), Ok(lo)) = (ctx.principal(owner, &w.x), ctx.principal(owner, &lam_k)) else {
        return false;
    };
    let (Ok(xb), Ok(la)) = (xo.mul(b), lo.mul(a)) else {
        return false;
    };
    xb.is_subset_of(a) && la.is_subset_of(&xb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intmat::IntMatrix;
    use crate::perron::{eigen_ideal, perron_data};
    use crate::quadorder::Owner;

    fn eigen(s: &str) -> (QuadOrderCtx, OrderIdeal) {
        let m: IntMatrix = s.parse().unwrap();
        let pd = perron_data(&m).unwrap();
        let e = eigen_ideal(&m, &pd).unwrap();
        (pd.ctx.unwrap(), e.ideal_o)
    }

    #[test]
    fn reflexive_witness() {
        let (ctx, a) = eigen("2:13,5,3,1");
        let w = find_sse_witness(&ctx, &a, &a, 3).unwrap().unwrap();
        assert_eq!(w, Witness { x: FieldElem::one(204), y: FieldElem::one(204), k: 0 });
        assert!(verify_witness(&ctx, &a, &a, &w));
    }

    #[test]
    fn equivalent_ideals_need_no_power() {
        let (ctx, b) = eigen("2:13,5,3,1");
        let lam = ctx.principal(Owner::Order, &ctx.lambda).unwrap();
        let a = lam.mul(&b).unwrap();
        let w = find_sse_witness(&ctx, &a, &b, 3).unwrap().unwrap();
        assert_eq!(w.k, 0);
        assert_eq!(w.x.norm().abs(), ctx.lambda.norm().abs());
        assert!(verify_witness(&ctx, &a, &b, &w));
        let at_one = Witness { x: ctx.lambda.clone(), y: FieldElem::one(204), k: 1 };
        assert!(verify_witness(&ctx, &a, &b, &at_one));
    }

    #[test]
    fn example_pair_has_no_witness() {
        let (ctx, a) = eigen("2:14,2,1,0");
        let (_, b) = eigen("2:13,5,3,1");
        assert_eq!(find_sse_witness(&ctx, &a, &b, 4).unwrap(), None);
    }

    #[test]
    fn tampered_witness_fails() {
        let (ctx, a) = eigen("2:13,5,3,1");
        let w = Witness { x: FieldElem::integer(2, 204), y: FieldElem::one(204), k: 0 };
        assert!(!verify_witness(&ctx, &a, &a, &w));
    }
}

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use sftinv::intmat::{char_poly, is_irreducible, is_primitive, smith_normal_form, IntMatrix};
use sftinv::invariants::signature;
use sftinv::quadorder::{make_ctx, FieldElem, Owner};
use sftinv::sse::{sse_search, verify_certificate, SSECertificate, SearchBudget, SearchOutcome};

fn square(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(lo..=hi, n * n).prop_map(move |e| IntMatrix::from_i64(n, n, &e))
}

/// Product of elementary row operations `row_i += c·row_j`, `i ≠ j`.
fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n, 0..n, -3i64..=3), 0..8).prop_map(move |ops| {
        let mut u = IntMatrix::identity(n);
        for (i, j, c) in ops {
            if i == j {
                continue;
            }
            let mut e = IntMatrix::identity(n);
            e.set(i, j, c.into());
            u = e.mul(&u).expect("square");
        }
        u
    })
}

fn power(m: &IntMatrix, k: u32) -> IntMatrix {
    (0..k).fold(IntMatrix::identity(m.rows()), |acc, _| acc.mul(m).expect("square"))
}

fn positive(m: &IntMatrix) -> bool {
    m.entries().iter().all(|x| x.is_positive())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_form_is_invariant_under_unimodular_change(
        (m, u, v) in (2usize..=3).prop_flat_map(|n| (square(n, -9, 9), unimodular(n), unimodular(n)))
    ) {
        let snf = smith_normal_form(&m);
        let moved = u.mul(&m).unwrap().mul(&v).unwrap();
        prop_assert_eq!(&smith_normal_form(&moved).diagonal, &snf.diagonal);

        let d = snf.left.mul(&m).unwrap().mul(&snf.right).unwrap();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let want = if i == j { snf.diagonal[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(d.get(i, j), &want);
            }
        }
        for w in snf.diagonal.windows(2) {
            prop_assert!(w[1].is_zero() || (&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn irreducibility_matches_positive_powers(m in (1usize..=3).prop_flat_map(|n| square(n, 0, 2))) {
        let n = m.rows();
        let with_loops = m.add(&IntMatrix::identity(n)).unwrap();
        prop_assert_eq!(is_irreducible(&m).unwrap(), positive(&power(&with_loops, n as u32 - 1)));
        // Wielandt: primitive iff the (n−1)²+1 power is positive
        let wielandt = positive(&power(&m, ((n - 1) * (n - 1) + 1) as u32));
        prop_assert_eq!(is_primitive(&m).unwrap(), wielandt);
    }

    #[test]
    fn cayley_hamilton(m in (1usize..=3).prop_flat_map(|n| square(n, -20, 20))) {
        let p = char_poly(&m).unwrap();
        prop_assert_eq!(p.degree(), Some(m.rows()));
        prop_assert!(p.eval_matrix(&m).unwrap().entries().iter().all(|x| x.is_zero()));
    }

    #[test]
    fn principal_ideal_norm_is_element_norm(
        (t, d) in (1i64..40, 1i64..20),
        (u, v) in (-30i64..30, -30i64..30),
        (s, w) in (-30i64..30, -30i64..30),
    ) {
        // x² − t·x − d has discriminant t² + 4d > 0
        let Ok(ctx) = make_ctx(&sftinv::intmat::IntPoly::from_i64(&[-d, -t, 1])) else {
            return Ok(());
        };
        prop_assume!(u != 0 || v != 0);
        prop_assume!(s != 0 || w != 0);
        let omega = ctx.omega(Owner::Order);
        let elem = |a: i64, b: i64| &FieldElem::integer(a, ctx.field_disc) + &(&FieldElem::integer(b, ctx.field_disc) * &omega);
        let (x, y) = (elem(u, v), elem(s, w));
        let (ix, iy) = (ctx.principal(Owner::Order, &x).unwrap(), ctx.principal(Owner::Order, &y).unwrap());
        prop_assert_eq!(ix.norm(), x.norm().abs());
        let prod = ix.mul(&iy).unwrap();
        prop_assert_eq!(prod.norm(), ix.norm() * iy.norm());
        prop_assert_eq!(&prod, &ctx.principal(Owner::Order, &(&x * &y)).unwrap());
        prop_assert!(ix.mul(&ix.inv().unwrap()).unwrap().is_unit());
        prop_assert_eq!(ix.inv().unwrap().norm(), BigRational::from_integer(1.into()) / x.norm().abs());
    }

    #[test]
    fn signature_ignores_state_order(e in prop::collection::vec(1i64..=9, 4)) {
        let m = IntMatrix::from_i64(2, 2, &e);
        let swapped = m.permute(&[1, 0]).unwrap();
        prop_assert_eq!(signature(&m).unwrap(), signature(&swapped).unwrap());
    }

    #[test]
    fn certificates_round_trip_and_reject_tampering(
        (r, s) in (prop::collection::vec(0i64..=3, 4), prop::collection::vec(0i64..=3, 4)),
        (i, j, bump) in (0usize..2, 0usize..2, 1i64..=3),
    ) {
        let (r, s) = (IntMatrix::from_i64(2, 2, &r), IntMatrix::from_i64(2, 2, &s));
        let (a, b) = (r.mul(&s).unwrap(), s.mul(&r).unwrap());
        prop_assume!(is_irreducible(&a).unwrap() && is_irreducible(&b).unwrap());
        let budget = SearchBudget::for_pair(&a, &b, 2);
        let SearchOutcome::Found(cert) = sse_search(&a, &b, &budget).unwrap() else {
            return Err(TestCaseError::fail(format!("no chain from {a} to {b}")));
        };
        prop_assert!(verify_certificate(&cert));
        let (back, budget_back) = SSECertificate::parse_text(&cert.to_text(&budget)).unwrap();
        prop_assert_eq!(&back, &cert);
        prop_assert_eq!(budget_back, budget);

        if let Some(step) = back.steps.first() {
            let mut bad = back.clone();
            let mut r2 = step.r.clone();
            let old = r2.get(i.min(r2.rows() - 1), j.min(r2.cols() - 1)).clone();
            r2.set(i.min(r2.rows() - 1), j.min(r2.cols() - 1), old + bump);
            bad.steps[0].r = r2;
            prop_assert!(!verify_certificate(&bad));
        }
    }
}

//! Exact Perron eigendata of irreducible 2×2 matrices and the eigenvector
//! ideal.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::intmat::{char_poly, is_irreducible, IntMatrix, IntPoly, MatrixError};
use crate::quadorder::{make_ctx, FieldElem, OrderIdeal, Owner, QuadError, QuadOrderCtx};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PerronError {
    #[error("only 2×2 matrices are supported, got {0}×{1}")]
    Unsupported(usize, usize),
    #[error("matrix {0} is not irreducible")]
    NotIrreducible(String),
    #[error("Perron root is an integer; the eigenvector ideal is trivial")]
    IntegerRoot,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// The Perron root, as an integer or an element of a real quadratic field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lambda {
    Integer(BigInt),
    Quadratic(FieldElem),
}

impl std::fmt::Display for Lambda {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Lambda::Integer(n) => write!(f, "{n}"),
            Lambda::Quadratic(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerronData {
    /// Characteristic polynomial of the matrix.
    pub charpoly: IntPoly,
    /// Degree of `λ` over `ℚ`.
    pub degree: u32,
    pub lambda: Lambda,
    /// Present iff `degree == 2`.
    pub ctx: Option<QuadOrderCtx>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenIdealData {
    pub ideal_ok: OrderIdeal,
    pub ideal_o: OrderIdeal,
    /// `(m₀₁, λ − m₀₀)`.
    pub coords: [FieldElem; 2],
}

fn check_shape(m: &IntMatrix) -> Result<(), PerronError> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(PerronError::Unsupported(m.rows(), m.cols()));
    }
    if !is_irreducible(m)? {
        return Err(PerronError::NotIrreducible(m.to_string()));
    }
    Ok(())
}

pub fn perron_data(m: &IntMatrix) -> Result<PerronData, PerronError> {
    check_shape(m)?;
    let charpoly = char_poly(m)?;
    let t = -charpoly.coeff(1);
    let d = charpoly.coeff(0);
    let disc: BigInt = &t * &t - BigInt::from(4) * &d;
    // irreducible nonnegative 2×2: disc = (a−d)² + 4bc > 0
    let s = disc.sqrt();
    if &s * &s == disc {
        return Ok(PerronData {
            charpoly,
            degree: 1,
            lambda: Lambda::Integer((t + s) / 2),
            ctx: None,
        });
    }
    let ctx = make_ctx(&charpoly)?;
    Ok(PerronData {
        charpoly,
        degree: 2,
        lambda: Lambda::Quadratic(ctx.lambda.clone()),
        ctx: Some(ctx),
    })
}

pub fn eigen_ideal(m: &IntMatrix, pd: &PerronData) -> Result<EigenIdealData, PerronError> {
    check_shape(m)?;
    let ctx = pd.ctx.as_ref().ok_or(PerronError::IntegerRoot)?;
    let d = ctx.field_disc;
    let coords = [
        FieldElem::integer(m.get(0, 1).clone(), d),
        &ctx.lambda - &FieldElem::integer(m.get(0, 0).clone(), d),
    ];
    debug_assert!(satisfies_eigen_equation(m, ctx, &coords));
    Ok(EigenIdealData {
        ideal_ok: ctx.ideal_from_gens(Owner::Maximal, &coords)?,
        ideal_o: ctx.ideal_from_gens(Owner::Order, &coords)?,
        coords,
    })
}

/// `(m − λI)·v = 0` in exact arithmetic.
pub fn satisfies_eigen_equation(m: &IntMatrix, ctx: &QuadOrderCtx, v: &[FieldElem; 2]) -> bool {
    let d = ctx.field_disc;
    let e = |i, j| FieldElem::integer(m.get(i, j).clone(), d);
    (0..2).all(|i| {
        let row = &(&e(i, 0) * &v[0]) + &(&e(i, 1) * &v[1]);
        (&row - &(&ctx.lambda * &v[i])).is_zero()
    })
}

/// Whether `λ` strictly dominates the other root in absolute value.
pub fn is_dominant(ctx: &QuadOrderCtx) -> bool {
    let other = ctx.lambda.conj();
    let lhs = &ctx.lambda - &other;
    let rhs = &ctx.lambda + &other;
    // λ > |μ| ⟺ λ − μ > 0 and λ + μ > 0
    lhs.signum().is_gt() && rhs.signum().is_gt()
}

impl PerronData {
    /// `λ` is a root of the characteristic polynomial.
    pub fn is_root(&self) -> bool {
        match &self.lambda {
            Lambda::Integer(n) => self.charpoly.eval(n).is_zero(),
            Lambda::Quadratic(x) => {
                let d = x.field_disc();
                let c = |k| FieldElem::integer(self.charpoly.coeff(k), d);
                let v = &(&(x * x) + &(&c(1) * x)) + &c(0);
                v.is_zero()
            }
        }
    }

    pub fn lambda_is_positive(&self) -> bool {
        match &self.lambda {
            Lambda::Integer(n) => n.is_positive(),
            Lambda::Quadratic(x) => x.signum().is_gt(),
        }
    }
}

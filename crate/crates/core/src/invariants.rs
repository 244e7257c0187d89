//! Conjugacy invariants: the Jordan token of the invertible part, nineteen
//! Bowen–Franks groups, and the eigenvector-ideal class compared modulo the
//! primes above `λ`.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::intmat::{char_poly, smith_normal_form, IntMatrix, IntPoly, MatrixError};
use crate::perron::{eigen_ideal, perron_data, EigenIdealData, PerronError};
use crate::quadorder::{
    make_ctx, primes_above, ClassSubgroup, OrderIdeal, Owner, QuadError, QuadOrderCtx,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("characteristic polynomials differ: {0} vs {1}")]
    CharpolyMismatch(String, String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("cannot parse signature: {0}")]
    Parse(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Perron(#[from] PerronError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Finitely generated abelian group `⊕ ℤ/dᵢ`, with `d₁ | d₂ | …` and `0`
/// standing for a free factor. Trivial factors are not stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbGroup {
    torsion: Vec<BigInt>,
}

impl AbGroup {
    /// From a Smith diagonal (divisibility chain, zeros last).
    pub fn from_invariant_factors(diag: &[BigInt]) -> Self {
        AbGroup {
            torsion: diag.iter().map(|d| d.abs()).filter(|d| !d.is_one()).collect(),
        }
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn rank(&self) -> usize {
        self.torsion.iter().filter(|d| d.is_zero()).count()
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.rank() > 0 {
            return None;
        }
        Some(self.torsion.iter().product())
    }
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.torsion.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.torsion.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for AbGroup {
    type Err = InvariantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || InvariantError::Parse(format!("group {s:?}"));
        if s == "1" {
            return Ok(AbGroup { torsion: Vec::new() });
        }
        let torsion = s
            .split('.')
            .map(|p| p.parse::<BigInt>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        let chain_ok = torsion.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        if torsion.iter().any(|d| d.is_one() || d.is_negative()) || !chain_ok {
            return Err(bad());
        }
        Ok(AbGroup { torsion })
    }
}

/// The elementary symmetric functions `(e₁, …, e_k)` of the nonzero
/// eigenvalues: the characteristic polynomial of the invertible part.
/// For 2×2 this is `(trace, det)`, `(trace)` or `()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JordanToken(Vec<BigInt>);

impl JordanToken {
    pub fn values(&self) -> &[BigInt] {
        &self.0
    }
}

impl fmt::Display for JordanToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for JordanToken {
    type Err = InvariantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || InvariantError::Parse(format!("jordan token {s:?}"));
        let inner = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        if inner.is_empty() {
            return Ok(JordanToken(Vec::new()));
        }
        let vals = inner
            .split(',')
            .map(|p| p.parse::<BigInt>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        if vals.last().is_some_and(|v| v.is_zero()) {
            return Err(bad());
        }
        Ok(JordanToken(vals))
    }
}

pub fn jordan_invariant(m: &IntMatrix) -> Result<JordanToken, MatrixError> {
    let p = char_poly(m)?;
    let coeffs = p.coeffs();
    // strip the factor x^k of the nilpotent part
    let low = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len());
    let reduced = &coeffs[low..];
    let k = reduced.len() - 1;
    // x^k − e₁x^{k−1} + e₂x^{k−2} − …
    let vals = (1..=k)
        .map(|i| {
            let c = reduced[k - i].clone();
            if i % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect();
    Ok(JordanToken(vals))
}

/// The nineteen polynomials `p` whose groups `ℤⁿ/p(A)ℤⁿ` are compared.
pub static BF_POLYNOMIALS: LazyLock<[IntPoly; 19]> = LazyLock::new(|| {
    [
        &[-1, 1][..],
        &[1, 1],
        &[1, 2],
        &[-1, 2],
        &[-1, -1, 1],
        &[-1, 1, 1],
        &[1, 2, 1],
        &[1, 0, 1],
        &[-1, 0, 1],
        &[1, 1, 1],
        &[1, -1, 1],
        &[1, -2, 1],
        &[-1, -1, 2],
        &[1, -3, 2],
        &[1, 3, 2],
        &[-1, 1, 2],
        &[1, 4, 4],
        &[1, -4, 4],
        &[-1, 0, 4],
    ]
    .map(IntPoly::from_i64)
});

/// `ℤⁿ / p(m)ℤⁿ`.
pub fn bowen_franks(m: &IntMatrix, p: &IntPoly) -> Result<AbGroup, MatrixError> {
    let pm = p.eval_matrix(m)?;
    Ok(AbGroup::from_invariant_factors(&smith_normal_form(&pm).diagonal))
}

pub fn bf_signature(m: &IntMatrix) -> Result<Vec<AbGroup>, MatrixError> {
    BF_POLYNOMIALS.iter().map(|p| bowen_franks(m, p)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Distinct,
    Equivalent,
    NecessaryConditionHolds,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Distinct => "DISTINCT",
            Verdict::Equivalent => "equal",
            Verdict::NecessaryConditionHolds => "not separated",
            Verdict::NotApplicable => "n/a",
        })
    }
}

/// How the eigenvector-ideal classes were compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    /// In `Pic(O)` modulo the primes of `O` above `λ`. Exact.
    Picard,
    /// In `Cl(O_K)` modulo the primes of `O_K` above `λ`. Necessary only.
    ClassGroup,
    /// `λ ∈ ℤ`: every class is trivial after inverting `λ`.
    TrivialLambda,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Picard => "Pic(O)",
            Route::ClassGroup => "Cl(O_K)",
            Route::TrivialLambda => "integer λ",
        })
    }
}

impl FromStr for Route {
    type Err = InvariantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Pic(O)" => Ok(Route::Picard),
            "Cl(O_K)" => Ok(Route::ClassGroup),
            "integer λ" => Ok(Route::TrivialLambda),
            _ => Err(InvariantError::Parse(format!("route {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BMTComparison {
    pub verdict: Verdict,
    pub route: Route,
}

/// Class-group data shared by every matrix with a given irrational Perron
/// root: the two rings and the subgroups generated by the primes above `λ`.
#[derive(Clone, Debug)]
pub struct BmtField {
    pub ctx: QuadOrderCtx,
    /// In `Cl(O_K)`.
    cl: ClassSubgroup,
    /// In `Pic(O)`; absent when `O·λ` is not prime to the conductor.
    pic: Option<ClassSubgroup>,
}

impl BmtField {
    pub fn new(ctx: QuadOrderCtx) -> Result<Self, InvariantError> {
        let q = primes_above(&ctx, Owner::Maximal, &ctx.lambda)?.primes();
        let cl = ClassSubgroup::generated(&ctx, Owner::Maximal, &q)?;
        let pic = match primes_above(&ctx, Owner::Order, &ctx.lambda) {
            Ok(f) => Some(ClassSubgroup::generated(&ctx, Owner::Order, &f.primes())?),
            Err(QuadError::NotApplicable(_)) => None,
            Err(e) => return Err(e.into()),
        };
        Ok(BmtField { ctx, cl, pic })
    }

    /// For the characteristic polynomial of an irreducible 2×2 matrix;
    /// `None` when the Perron root is an integer.
    pub fn for_charpoly(p: &IntPoly) -> Result<Option<Self>, InvariantError> {
        match make_ctx(p) {
            Ok(ctx) => Ok(Some(Self::new(ctx)?)),
            Err(QuadError::Reducible(_)) => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    pub fn class_subgroup(&self) -> &ClassSubgroup {
        &self.cl
    }

    pub fn picard_subgroup(&self) -> Option<&ClassSubgroup> {
        self.pic.as_ref()
    }

    fn eigen(&self, m: &IntMatrix) -> Result<EigenIdealData, InvariantError> {
        let pd = perron_data(m)?;
        if pd.ctx.as_ref() != Some(&self.ctx) {
            return Err(InvariantError::CharpolyMismatch(
                pd.charpoly.to_string(),
                format!("field of {}", self.ctx.lambda),
            ));
        }
        Ok(eigen_ideal(m, &pd)?)
    }

    fn prime_to_conductor(&self, i: &OrderIdeal) -> bool {
        let n = i.norm().to_integer();
        i.is_integral() && n.gcd(&BigInt::from(self.ctx.conductor)).is_one()
    }

    /// Canonical label of the coset of `[O_K·v₁ + O_K·v₂]` in `Cl(O_K)`.
    pub fn coset_token(&self, m: &IntMatrix) -> Result<String, InvariantError> {
        let e = self.eigen(m)?;
        Ok(self.cl.coset_label(&e.ideal_ok)?.to_string())
    }

    /// Exact comparison in `Pic(O)`; requires both eigenvector ideals and
    /// `O·λ` to be prime to the conductor.
    pub fn compare_pic(&self, a: &IntMatrix, b: &IntMatrix) -> Result<BMTComparison, InvariantError> {
        let pic = self.pic.as_ref().ok_or_else(|| {
            InvariantError::NotApplicable(format!("O·λ is not prime to the conductor {}", self.ctx.conductor))
        })?;
        let (ea, eb) = (self.eigen(a)?, self.eigen(b)?);
        for (m, e) in [(a, &ea), (b, &eb)] {
            if !self.prime_to_conductor(&e.ideal_o) {
                return Err(InvariantError::NotApplicable(format!(
                    "eigenvector ideal of {m} is not prime to the conductor {}",
                    self.ctx.conductor
                )));
            }
        }
        let same = pic.same_coset(&self.ctx, &ea.ideal_o, &eb.ideal_o)?;
        Ok(BMTComparison {
            verdict: if same { Verdict::Equivalent } else { Verdict::Distinct },
            route: Route::Picard,
        })
    }

    /// Necessary condition in `Cl(O_K)`; applies unconditionally.
    pub fn compare_classgroup(&self, a: &IntMatrix, b: &IntMatrix) -> Result<BMTComparison, InvariantError> {
        let (ea, eb) = (self.eigen(a)?, self.eigen(b)?);
        let same = self.cl.same_coset(&self.ctx, &ea.ideal_ok, &eb.ideal_ok)?;
        Ok(BMTComparison {
            verdict: if same {
                Verdict::NecessaryConditionHolds
            } else {
                Verdict::Distinct
            },
            route: Route::ClassGroup,
        })
    }

    /// The `Pic(O)` route when it applies, otherwise `Cl(O_K)`.
    pub fn compare(&self, a: &IntMatrix, b: &IntMatrix) -> Result<BMTComparison, InvariantError> {
        match self.compare_pic(a, b) {
            Err(InvariantError::NotApplicable(_)) => self.compare_classgroup(a, b),
            r => r,
        }
    }
}

fn shared_field(a: &IntMatrix, b: &IntMatrix) -> Result<Option<BmtField>, InvariantError> {
    let (pa, pb) = (perron_data(a)?, perron_data(b)?);
    if pa.charpoly != pb.charpoly {
        return Err(InvariantError::CharpolyMismatch(
            pa.charpoly.to_string(),
            pb.charpoly.to_string(),
        ));
    }
    pa.ctx.map(BmtField::new).transpose()
}

const TRIVIAL: BMTComparison = BMTComparison {
    verdict: Verdict::NecessaryConditionHolds,
    route: Route::TrivialLambda,
};

/// Compares the eigenvector-ideal classes of two irreducible 2×2 matrices
/// with the same characteristic polynomial.
pub fn bmt_compare(a: &IntMatrix, b: &IntMatrix) -> Result<BMTComparison, InvariantError> {
    match shared_field(a, b)? {
        None => Ok(TRIVIAL),
        Some(f) => f.compare(a, b),
    }
}

pub fn bmt_compare_pic(a: &IntMatrix, b: &IntMatrix) -> Result<BMTComparison, InvariantError> {
    match shared_field(a, b)? {
        None => Ok(TRIVIAL),
        Some(f) => f.compare_pic(a, b),
    }
}

pub fn bmt_compare_classgroup(a: &IntMatrix, b: &IntMatrix) -> Result<BMTComparison, InvariantError> {
    match shared_field(a, b)? {
        None => Ok(TRIVIAL),
        Some(f) => f.compare_classgroup(a, b),
    }
}

/// All separating invariants of one matrix. Independent of the ordering
/// of states.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantSignature {
    pub charpoly: IntPoly,
    pub jordan: JordanToken,
    pub bf: Vec<AbGroup>,
    /// `Cl(O_K)` coset label of the eigenvector ideal; absent for integer `λ`.
    pub bmt_coset_token: Option<String>,
}

/// The invariant that first tells two signatures apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Separator {
    Charpoly,
    Jordan,
    /// Index into [`BF_POLYNOMIALS`].
    BowenFranks(usize),
    Bmt(Route),
}

impl fmt::Display for Separator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Separator::Charpoly => f.write_str("charpoly"),
            Separator::Jordan => f.write_str("Jordan"),
            Separator::BowenFranks(k) => write!(f, "BF[{}]", BF_POLYNOMIALS[*k]),
            Separator::Bmt(r) => write!(f, "BMT({r})"),
        }
    }
}

impl FromStr for Separator {
    type Err = InvariantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "charpoly" {
            return Ok(Separator::Charpoly);
        }
        if s == "Jordan" {
            return Ok(Separator::Jordan);
        }
        if let Some(p) = s.strip_prefix("BF[").and_then(|t| t.strip_suffix(']')) {
            let p: IntPoly = p.parse()?;
            if let Some(k) = BF_POLYNOMIALS.iter().position(|q| *q == p) {
                return Ok(Separator::BowenFranks(k));
            }
        }
        if let Some(r) = s.strip_prefix("BMT(").and_then(|t| t.strip_suffix(')')) {
            return Ok(Separator::Bmt(r.parse()?));
        }
        Err(InvariantError::Parse(format!("separator {s:?}")))
    }
}

impl InvariantSignature {
    /// Every invariant on which the two signatures differ, in the order
    /// Jordan, the Bowen–Franks list, BMT. A differing characteristic
    /// polynomial is reported only when nothing else differs.
    pub fn differences(&self, other: &Self) -> Vec<Separator> {
        let mut out = Vec::new();
        if self.jordan != other.jordan {
            out.push(Separator::Jordan);
        }
        for (k, (x, y)) in self.bf.iter().zip(&other.bf).enumerate() {
            if x != y {
                out.push(Separator::BowenFranks(k));
            }
        }
        if self.charpoly == other.charpoly && self.bmt_coset_token != other.bmt_coset_token {
            out.push(Separator::Bmt(self.token_route()));
        }
        if out.is_empty() && self.charpoly != other.charpoly {
            out.push(Separator::Charpoly);
        }
        out
    }

    /// When `O = O_K` the class-group token is the exact invariant.
    pub fn token_route(&self) -> Route {
        match make_ctx(&self.charpoly) {
            Ok(ctx) if ctx.conductor == 1 => Route::Picard,
            _ => Route::ClassGroup,
        }
    }

    /// `matrix|charpoly|jordan|bf1,...,bf19|bmt`.
    pub fn to_line(&self, m: &IntMatrix) -> String {
        let bf: Vec<String> = self.bf.iter().map(|g| g.to_string()).collect();
        format!(
            "{m}|{}|{}|{}|{}",
            self.charpoly,
            self.jordan,
            bf.join(","),
            self.bmt_coset_token.as_deref().unwrap_or("-")
        )
    }

    pub fn parse_line(line: &str) -> Result<(IntMatrix, Self), InvariantError> {
        let parts: Vec<&str> = line.split('|').collect();
        let [m, cp, j, bf, bmt] = parts[..] else {
            return Err(InvariantError::Parse(format!("expected 5 fields in {line:?}")));
        };
        let bf = bf.split(',').map(str::parse).collect::<Result<Vec<AbGroup>, _>>()?;
        if bf.len() != BF_POLYNOMIALS.len() {
            return Err(InvariantError::Parse(format!("expected 19 groups in {line:?}")));
        }
        Ok((
            m.parse()?,
            InvariantSignature {
                charpoly: cp.parse()?,
                jordan: j.parse()?,
                bf,
                bmt_coset_token: (bmt != "-").then(|| bmt.to_string()),
            },
        ))
    }
}

/// Signature with the class-group data supplied by the caller, so it can be
/// shared across matrices with one characteristic polynomial.
pub fn signature_in(m: &IntMatrix, field: Option<&BmtField>) -> Result<InvariantSignature, InvariantError> {
    let charpoly = char_poly(m)?;
    let bmt_coset_token = match field {
        Some(f) => Some(f.coset_token(m)?),
        None => None,
    };
    Ok(InvariantSignature {
        charpoly,
        jordan: jordan_invariant(m)?,
        bf: bf_signature(m)?,
        bmt_coset_token,
    })
}

pub fn signature(m: &IntMatrix) -> Result<InvariantSignature, InvariantError> {
    let field = BmtField::for_charpoly(&char_poly(m)?)?;
    signature_in(m, field.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> IntMatrix {
        s.parse().unwrap()
    }

    fn cyclic(n: i64) -> AbGroup {
        AbGroup::from_invariant_factors(&[BigInt::one(), BigInt::from(n)])
    }

    #[test]
    fn bf_spot_values() {
        let x1 = &BF_POLYNOMIALS[0];
        assert_eq!(x1.to_string(), "x-1");
        assert_eq!(bowen_franks(&m("2:14,2,1,0"), x1).unwrap(), cyclic(15));
        assert_eq!(bowen_franks(&m("2:13,5,3,1"), x1).unwrap(), cyclic(15));
        assert_eq!(bowen_franks(&IntMatrix::identity(2), x1).unwrap().to_string(), "0.0");
        // charpoly annihilates m: cokernel of 0
        let a = m("2:14,2,1,0");
        let g = bowen_franks(&a, &char_poly(&a).unwrap()).unwrap();
        assert_eq!(g.rank(), 2);
        // x² − x − 1 = charpoly + 2(x − 1) at [[2,1],[1,1]]: 2(m − I) = [[2,2],[2,0]]
        assert_eq!(bowen_franks(&m("2:2,1,1,1"), &BF_POLYNOMIALS[4]).unwrap().to_string(), "2.2");
    }

    #[test]
    fn polynomial_list_renders_in_order() {
        let shown: Vec<String> = BF_POLYNOMIALS.iter().map(|p| p.to_string()).collect();
        assert_eq!(
            shown.join(", "),
            "x-1, x+1, 2x+1, 2x-1, x^2-x-1, x^2+x-1, x^2+2x+1, x^2+1, x^2-1, x^2+x+1, \
             x^2-x+1, x^2-2x+1, 2x^2-x-1, 2x^2-3x+1, 2x^2+3x+1, 2x^2+x-1, 4x^2+4x+1, \
             4x^2-4x+1, 4x^2-1"
        );
    }

    #[test]
    fn example_pair_bf_agree() {
        assert_eq!(bf_signature(&m("2:14,2,1,0")).unwrap(), bf_signature(&m("2:13,5,3,1")).unwrap());
    }

    #[test]
    fn jordan_tokens() {
        assert_eq!(jordan_invariant(&m("2:14,2,1,0")).unwrap().to_string(), "(14,-2)");
        assert_eq!(jordan_invariant(&m("2:13,5,3,1")).unwrap().to_string(), "(14,-2)");
        assert_eq!(jordan_invariant(&m("2:1,1,1,1")).unwrap().to_string(), "(2)");
        assert_eq!(jordan_invariant(&m("2:0,1,0,0")).unwrap().to_string(), "()");
        // [[1,1,0],[1,1,0],[0,0,0]] has nonzero spectrum {2}
        assert_eq!(jordan_invariant(&m("3:1,1,0,1,1,0,0,0,0")).unwrap().to_string(), "(2)");
        assert_eq!(jordan_invariant(&m("1:2")).unwrap().to_string(), "(2)");
    }

    #[test]
    fn token_parsing() {
        for s in ["()", "(2)", "(14,-2)"] {
            assert_eq!(s.parse::<JordanToken>().unwrap().to_string(), s);
        }
        for s in ["1", "15", "0.0", "2.6.0"] {
            assert_eq!(s.parse::<AbGroup>().unwrap().to_string(), s);
        }
        assert!("3.5".parse::<AbGroup>().is_err());
        assert!("1.3".parse::<AbGroup>().is_err());
        assert!("(3,0)".parse::<JordanToken>().is_err());
        for s in ["Jordan", "BF[x^2+1]", "BMT(Pic(O))", "BMT(Cl(O_K))", "charpoly"] {
            assert_eq!(s.parse::<Separator>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn example_bmt_is_distinct() {
        let (a, b) = (m("2:14,2,1,0"), m("2:13,5,3,1"));
        let c = bmt_compare(&a, &b).unwrap();
        assert_eq!(c, BMTComparison { verdict: Verdict::Distinct, route: Route::Picard });
        assert_eq!(bmt_compare(&b, &a).unwrap(), c);
        assert_eq!(bmt_compare_classgroup(&a, &b).unwrap().verdict, Verdict::Distinct);
        assert_eq!(bmt_compare(&a, &a).unwrap().verdict, Verdict::Equivalent);
        // state swap
        let swapped = a.permute(&[1, 0]).unwrap();
        assert_eq!(bmt_compare(&a, &swapped).unwrap().verdict, Verdict::Equivalent);
    }

    #[test]
    fn integer_lambda_is_trivial() {
        // both x² − 5x + 4, λ = 4
        let (a, b) = (m("2:2,1,2,3"), m("2:2,2,1,3"));
        let c = bmt_compare(&a, &b).unwrap();
        assert_eq!(c.route, Route::TrivialLambda);
        assert_eq!(c.verdict, Verdict::NecessaryConditionHolds);
    }

    #[test]
    fn mismatched_charpoly_is_an_error() {
        assert!(matches!(
            bmt_compare(&m("2:14,2,1,0"), &m("2:15,1,1,0")),
            Err(InvariantError::CharpolyMismatch(_, _))
        ));
    }

    #[test]
    fn conductor_blocks_picard_route() {
        // x² − 4x − 4: O·λ has norm 4, conductor 2
        let (a, b) = (m("2:2,2,4,2"), m("2:4,4,1,0"));
        assert!(matches!(bmt_compare_pic(&a, &b), Err(InvariantError::NotApplicable(_))));
        assert_eq!(bmt_compare(&a, &b).unwrap().route, Route::ClassGroup);
    }

    #[test]
    fn signatures() {
        let (a, b) = (m("2:14,2,1,0"), m("2:13,5,3,1"));
        let (sa, sb) = (signature(&a).unwrap(), signature(&b).unwrap());
        assert_eq!(sa, signature(&a.permute(&[1, 0]).unwrap()).unwrap());
        assert_ne!(sa, signature(&m("2:15,1,1,0")).unwrap());
        assert_eq!((&sa.jordan, &sa.bf), (&sb.jordan, &sb.bf));
        assert_ne!(sa.bmt_coset_token, sb.bmt_coset_token);
        assert_eq!(sa.differences(&sb), vec![Separator::Bmt(Route::Picard)]);

        let line = sa.to_line(&a);
        assert!(line.starts_with("2:14,2,1,0|x^2-14x-2|(14,-2)|15,"));
        assert_eq!(InvariantSignature::parse_line(&line).unwrap(), (a, sa));
        let j = m("2:1,1,1,1");
        let sj = signature(&j).unwrap();
        assert!(sj.to_line(&j).ends_with("|-"));
        assert_eq!(InvariantSignature::parse_line(&sj.to_line(&j)).unwrap().1, sj);
    }
}

//! Membership of ideal classes in cosets of subgroups generated by a few
//! prime classes. Class numbers here are tiny, so subgroups are enumerated
//! outright.

use super::{class_label, is_principal, reduce, ClassLabel, OrderIdeal, Owner, QuadError, QuadOrderCtx};

const MAX_CLASS_ORDER: u64 = 100_000;

/// Order of the class of `g`, by testing successive powers for principality.
pub fn class_order(ctx: &QuadOrderCtx, g: &OrderIdeal) -> Result<u64, QuadError> {
    let base = reduce(ctx, g)?.ideal;
    let mut power = base.clone();
    for k in 1..=MAX_CLASS_ORDER {
        if is_principal(ctx, &power)?.is_some() {
            return Ok(k);
        }
        power = reduce(ctx, &power.mul(&base)?)?.ideal;
    }
    Err(QuadError::Limit(format!("class order of {g} exceeds {MAX_CLASS_ORDER}")))
}

/// Reduced representatives of every class in `⟨[g] : g ∈ gens⟩`, one per
/// class, sorted by label.
pub fn subgroup_labels(
    ctx: &QuadOrderCtx,
    owner_unit: &OrderIdeal,
    gens: &[OrderIdeal],
) -> Result<Vec<(ClassLabel, OrderIdeal)>, QuadError> {
    let mut elems: Vec<(ClassLabel, OrderIdeal)> =
        vec![(class_label(owner_unit)?, owner_unit.clone())];
    for g in gens {
        let ord = class_order(ctx, g)?;
        let g = reduce(ctx, g)?.ideal;
        let mut next = elems.clone();
        for (_, t) in &elems {
            let mut cur = t.clone();
            for _ in 1..ord {
                cur = reduce(ctx, &cur.mul(&g)?)?.ideal;
                let label = class_label(&cur)?;
                if !next.iter().any(|(l, _)| *l == label) {
                    next.push((label, cur.clone()));
                }
            }
        }
        elems = next;
    }
    elems.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(elems)
}

/// A subgroup of the class group given by explicit representatives.
#[derive(Clone, Debug)]
pub struct ClassSubgroup {
    members: Vec<(ClassLabel, OrderIdeal)>,
}

impl ClassSubgroup {
    /// `⟨[g] : g ∈ gens⟩` in the ring of `owner`.
    pub fn generated(ctx: &QuadOrderCtx, owner: Owner, gens: &[OrderIdeal]) -> Result<Self, QuadError> {
        let unit = OrderIdeal::unit(owner, ctx.disc(owner));
        Ok(ClassSubgroup {
            members: subgroup_labels(ctx, &unit, gens)?,
        })
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn labels(&self) -> impl Iterator<Item = &ClassLabel> {
        self.members.iter().map(|(l, _)| l)
    }

    /// Least class label over the coset `[i]·H`.
    pub fn coset_label(&self, i: &OrderIdeal) -> Result<ClassLabel, QuadError> {
        let mut best: Option<ClassLabel> = None;
        for (_, t) in &self.members {
            let l = class_label(&i.mul(&t.inv()?)?)?;
            if best.as_ref().is_none_or(|b| l < *b) {
                best = Some(l);
            }
        }
        Ok(best.expect("subgroup contains the identity"))
    }

    /// Whether some `i·j⁻¹·t⁻¹`, `t ∈ H`, is principal.
    pub fn same_coset(&self, ctx: &QuadOrderCtx, i: &OrderIdeal, j: &OrderIdeal) -> Result<bool, QuadError> {
        let quotient = i.mul(&j.inv()?)?;
        for (_, t) in &self.members {
            let candidate = reduce(ctx, &quotient.mul(&t.inv()?)?)?.ideal;
            if is_principal(ctx, &candidate)?.is_some() {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// `[i] ≡ [j]` modulo the subgroup generated by the classes of `gens`.
pub fn class_equal_mod_subgroup(
    ctx: &QuadOrderCtx,
    i: &OrderIdeal,
    j: &OrderIdeal,
    gens: &[OrderIdeal],
) -> Result<bool, QuadError> {
    ClassSubgroup::generated(ctx, i.owner(), gens)?.same_coset(ctx, i, j)
}

/// Canonical label of the coset `[i]·H`, `H = ⟨[g] : g ∈ gens⟩`.
pub fn coset_label(ctx: &QuadOrderCtx, i: &OrderIdeal, gens: &[OrderIdeal]) -> Result<ClassLabel, QuadError> {
    ClassSubgroup::generated(ctx, i.owner(), gens)?.coset_label(i)
}

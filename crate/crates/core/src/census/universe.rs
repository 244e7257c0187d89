use crate::intmat::IntMatrix;

/// The 2×2 matrices under study, in enumeration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    pub members: Vec<IntMatrix>,
    /// `None` for a hand-picked universe.
    pub max_sum: Option<u64>,
    pub primitive_only: bool,
}

impl Universe {
    pub fn from_members(members: Vec<IntMatrix>) -> Self {
        Universe {
            members,
            max_sum: None,
            primitive_only: false,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `n(n−1)/2`.
    pub fn pair_count(&self) -> u64 {
        let n = self.members.len() as u64;
        n * n.saturating_sub(1) / 2
    }

    /// Short stamp such as `25p` (primitive) or `25i` (irreducible);
    /// `custom:<n>` for a hand-picked universe.
    pub fn stamp(&self) -> String {
        match self.max_sum {
            Some(s) => format!("{s}{}", if self.primitive_only { "p" } else { "i" }),
            None => {
                let ms: Vec<String> = self.members.iter().map(|m| m.to_string()).collect();
                format!("custom:{}", ms.join("/"))
            }
        }
    }
}

impl Universe {
    /// Inverse of [`Universe::stamp`].
    pub fn from_stamp(s: &str) -> Option<Self> {
        if let Some(list) = s.strip_prefix("custom:") {
            let members = if list.is_empty() {
                Vec::new()
            } else {
                list.split('/').map(|m| m.parse().ok()).collect::<Option<Vec<IntMatrix>>>()?
            };
            return Some(Universe::from_members(members));
        }
        let (num, kind) = s.split_at(s.len().checked_sub(1)?);
        let max_sum: u64 = num.parse().ok()?;
        match kind {
            "p" => Some(enumerate_universe(max_sum, true)),
            "i" => Some(enumerate_universe(max_sum, false)),
            _ => None,
        }
    }
}

/// Irreducible: both off-diagonal entries positive. Primitive additionally
/// excludes the period-2 matrices `[[0,b],[c,0]]`.
pub fn is_member(a: u64, b: u64, c: u64, d: u64, max_sum: u64, primitive_only: bool) -> bool {
    b >= 1 && c >= 1 && a + b + c + d <= max_sum && !(primitive_only && a == 0 && d == 0)
}

/// Every nonnegative `[[a,b],[c,d]]` with `b, c ≥ 1` and entry sum at most
/// `max_sum`, ordered by `(a, b, c, d)`.
pub fn enumerate_universe(max_sum: u64, primitive_only: bool) -> Universe {
    let mut members = Vec::new();
    for a in 0..=max_sum {
        for b in 1..=max_sum - a {
            for c in 1..=max_sum.saturating_sub(a + b) {
                for d in 0..=max_sum.saturating_sub(a + b + c) {
                    if is_member(a, b, c, d, max_sum, primitive_only) {
                        members.push(IntMatrix::from_i64(2, 2, &[a as i64, b as i64, c as i64, d as i64]));
                    }
                }
            }
        }
    }
    Universe {
        members,
        max_sum: Some(max_sum),
        primitive_only,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn counts() {
        let u = enumerate_universe(25, true);
        assert_eq!(u.len(), 17250);
        assert_eq!(u.pair_count(), 148_772_625);
        // four entries with b, c ≥ 1 and a slack variable: C(s+2, 4) irreducible
        let irr = enumerate_universe(25, false);
        assert_eq!(irr.len() as u64, binomial(27, 4));
        assert_eq!(irr.len() - u.len(), (2..=25).map(|s| s - 1).sum::<usize>());
    }

    #[test]
    fn stamps_round_trip() {
        for u in [
            enumerate_universe(5, true),
            enumerate_universe(4, false),
            Universe::from_members(vec!["2:14,2,1,0".parse().unwrap(), "2:13,5,3,1".parse().unwrap()]),
            Universe::from_members(Vec::new()),
        ] {
            assert_eq!(Universe::from_stamp(&u.stamp()), Some(u));
        }
        assert_eq!(Universe::from_stamp("25x"), None);
    }

    #[test]
    fn smallest() {
        assert_eq!(enumerate_universe(2, false).members, vec!["2:0,1,1,0".parse().unwrap()]);
        assert!(enumerate_universe(2, true).is_empty());
    }

    #[test]
    fn members_satisfy_the_predicate() {
        for m in enumerate_universe(9, true).members {
            let e: Vec<u64> = (0..4).map(|k| m.get_i64(k / 2, k % 2) as u64).collect();
            assert!(is_member(e[0], e[1], e[2], e[3], 9, true));
        }
    }
}

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::subset::Subset;

/// An ordered pair `S|T` with `S ∪ T = [N]` and `S ∩ T ≠ [N]`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bisubset {
    pub s: Subset,
    pub t: Subset,
}

impl Bisubset {
    pub fn new(n: usize, s: Subset, t: Subset) -> Result<Self> {
        let full = Subset::full(n);
        if !s.is_subset(full) || !t.is_subset(full) || s.union(t) != full || s.intersection(t) == full {
            return Err(Error::InvalidBisubset { s, t });
        }
        Ok(Bisubset { s, t })
    }

    /// Shorthand for tests and examples: `Bisubset::parse(8, "1267", "E")`,
    /// where `E` stands for the whole ground set.
    pub fn parse(n: usize, s: &str, t: &str) -> Self {
        let p = |x: &str| if x == "E" { Subset::full(n) } else { Subset::from_digits(x) };
        Bisubset::new(n, p(s), p(t)).expect("valid bisubset")
    }

    pub fn is_proper(self) -> bool {
        !self.s.is_empty() && !self.t.is_empty()
    }

    /// `S|T ≤ S'|T'` iff `S ⊆ S'` and `T ⊇ T'`.
    pub fn le(self, other: Bisubset) -> bool {
        self.s.is_subset(other.s) && other.t.is_subset(self.t)
    }

    pub fn lt(self, other: Bisubset) -> bool {
        self != other && self.le(other)
    }

    /// A key strictly increasing along chains.
    pub fn height(self) -> i32 {
        self.s.len() as i32 - self.t.len() as i32
    }

    pub fn vector(self, n: usize) -> Vec<i64> {
        let mut v = alloc::vec![0i64; 2 * n];
        for e in self.s.iter() {
            v[e - 1] = 1;
        }
        for e in self.t.iter() {
            v[n + e - 1] = 1;
        }
        v
    }
}

impl fmt::Display for Bisubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.s, self.t)
    }
}

impl fmt::Debug for Bisubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn check_chain(chain: &[Bisubset]) -> Result<()> {
    if chain.windows(2).all(|w| w[0].lt(w[1])) && chain.iter().all(|b| b.is_proper()) {
        Ok(())
    } else {
        Err(Error::NotAChain)
    }
}

/// Gap indices `j ∈ 0..=ℓ` of a chain, using the sentinels `∅|[N]` and `[N]|∅`.
pub fn gap_indices(n: usize, chain: &[Bisubset]) -> Result<Vec<usize>> {
    check_chain(chain)?;
    let full = Subset::full(n);
    let l = chain.len();
    let s = |j: usize| if j == 0 { Subset::EMPTY } else { chain[j - 1].s };
    let t = |j: usize| if j == l + 1 { Subset::EMPTY } else { chain[j - 1].t };
    Ok((0..=l).filter(|&j| s(j).union(t(j + 1)) != full).collect())
}

pub fn is_biflag(n: usize, chain: &[Bisubset]) -> bool {
    gap_indices(n, chain).is_ok_and(|g| !g.is_empty())
}

/// The same gap test phrased through closures, valid for chains of biflats:
/// `j` is a gap iff `cl(S_j^c) ⊄ F_{j+1}`.
pub fn gap_indices_via_closure(m: &Matroid, chain: &[Bisubset]) -> Result<Vec<usize>> {
    check_chain(chain)?;
    let n = m.ground_size();
    let l = chain.len();
    let s = |j: usize| if j == 0 { Subset::EMPTY } else { chain[j - 1].s };
    let t = |j: usize| if j == l + 1 { Subset::EMPTY } else { chain[j - 1].t };
    Ok((0..=l).filter(|&j| !m.closure(s(j).complement(n)).is_subset(t(j + 1))).collect())
}

/// All proper bisubsets of `[n]`, sorted by height.
pub fn proper_bisubsets(n: usize) -> Vec<Bisubset> {
    let full = Subset::full(n);
    let mut out = Vec::new();
    for s in Subset::all(n) {
        let must = s.complement(n);
        for extra in Subset::all(n).filter(|x| x.is_subset(s)) {
            let t = must.union(extra);
            if s.intersection(t) != full && !s.is_empty() && !t.is_empty() {
                out.push(Bisubset { s, t });
            }
        }
    }
    out.sort_by_key(|b| (b.height(), b.s, b.t));
    out
}

/// All proper biflats `S|F` of `m` (so `F` is a nonempty flat), sorted by height.
pub fn biflats(m: &Matroid) -> Vec<Bisubset> {
    let n = m.ground_size();
    let mut out: Vec<Bisubset> = proper_bisubsets(n).into_iter().filter(|b| m.is_flat(b.t)).collect();
    out.sort_by_key(|b| (b.height(), b.s, b.t));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str, t: &str) -> Bisubset {
        Bisubset::parse(8, s, t)
    }

    #[test]
    fn pyramid_biflag_gaps() {
        let chain = [b("126", "E"), b("126", "34578"), b("1246", "34578"), b("12456", "378"), b("124567", "378")];
        assert_eq!(gap_indices(8, &chain).unwrap(), [3, 5]);
    }

    #[test]
    fn sentinel_arithmetic() {
        let c = [Bisubset::parse(2, "1", "2")];
        assert_eq!(gap_indices(2, &c).unwrap(), [0, 1]);
        assert!(is_biflag(2, &c));
    }

    #[test]
    fn invalid_inputs() {
        assert!(Bisubset::new(2, Subset::from_digits("12"), Subset::from_digits("12")).is_err());
        assert!(Bisubset::new(2, Subset::from_digits("1"), Subset::EMPTY).is_err());
        let c = [Bisubset::parse(2, "1", "2"), Bisubset::parse(2, "1", "2")];
        assert_eq!(gap_indices(2, &c), Err(Error::NotAChain));
    }

    #[test]
    fn bisubset_count() {
        // Proper bisubsets of [n]: pairs (S, T) covering [n], neither empty, not both full.
        for n in 1..=5usize {
            let expected = 3usize.pow(n as u32) - 2 - 1;
            assert_eq!(proper_bisubsets(n).len(), expected, "n = {n}");
        }
    }
}

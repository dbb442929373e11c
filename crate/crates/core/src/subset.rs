//! Subsets of the ground set `[N] = {1, ..., N}` as 32-bit masks.
//!
//! Element `e` lives in bit `e - 1`, so the natural order on elements is the
//! order of bits. Minima taken by [`Subset::min`] follow that fixed order.

use core::fmt;

pub const MAX_GROUND: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_GROUND);
        if n == MAX_GROUND {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub const fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(e: usize) -> Self {
        assert!((1..=MAX_GROUND).contains(&e), "element {e} out of range");
        Subset(1 << (e - 1))
    }

    pub fn from_elems<I: IntoIterator<Item = usize>>(elems: I) -> Self {
        elems.into_iter().fold(Subset::EMPTY, |s, e| s.with(e))
    }

    /// Parses the compact digit notation `"1267"`; only for ground sets up to 9.
    pub fn from_digits(digits: &str) -> Self {
        Subset::from_elems(digits.chars().map(|c| c.to_digit(10).expect("digit") as usize))
    }

    pub fn contains(self, e: usize) -> bool {
        (1..=MAX_GROUND).contains(&e) && self.0 & (1 << (e - 1)) != 0
    }

    pub fn with(self, e: usize) -> Self {
        self | Subset::singleton(e)
    }

    pub fn without(self, e: usize) -> Self {
        Subset(self.0 & !Subset::singleton(e).0)
    }

    pub fn union(self, other: Self) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        Subset(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        Subset::full(n).difference(self)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    /// All subsets of `[n]` in increasing mask order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        assert!(n < MAX_GROUND);
        (0u32..(1u32 << n)).map(Subset)
    }
}

impl core::ops::BitOr for Subset {
    type Output = Subset;
    fn bitor(self, rhs: Subset) -> Subset {
        self.union(rhs)
    }
}

impl core::ops::BitAnd for Subset {
    type Output = Subset;
    fn bitand(self, rhs: Subset) -> Subset {
        self.intersection(rhs)
    }
}

pub struct Elements(u32);

impl Iterator for Elements {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize + 1;
        self.0 &= self.0 - 1;
        Some(e)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        if self.0 < (1 << 9) {
            for e in self.iter() {
                write!(f, "{e}")?;
            }
            Ok(())
        } else {
            write!(f, "{{")?;
            for (i, e) in self.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "}}")
        }
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let s = Subset::from_digits("1267");
        assert_eq!(s.len(), 4);
        assert!(s.contains(6) && !s.contains(3));
        assert_eq!(alloc::format!("{s}"), "1267");
        assert_eq!(s.min(), Some(1));
        assert_eq!(s.complement(8), Subset::from_digits("3458"));
    }

    #[test]
    fn empty_has_no_min() {
        assert_eq!(Subset::EMPTY.min(), None);
        assert_eq!(Subset::full(3).iter().collect::<alloc::vec::Vec<_>>(), [1, 2, 3]);
    }
}

//! Matroids on `[N]` given by their bases.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use once_cell::race::OnceBox;

use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_GROUND};

/// A flat together with its rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flat {
    pub elements: Subset,
    pub rank: usize,
}

pub struct Matroid {
    n: usize,
    rank: usize,
    bases: Vec<Subset>,
    flats: OnceBox<Vec<Flat>>,
}

impl Clone for Matroid {
    fn clone(&self) -> Self {
        Matroid { n: self.n, rank: self.rank, bases: self.bases.clone(), flats: OnceBox::new() }
    }
}

impl PartialEq for Matroid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.bases == other.bases
    }
}

impl Eq for Matroid {}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matroid(n={}, r={}, bases={:?})", self.n, self.rank, self.bases)
    }
}

impl Matroid {
    /// Validates the basis-exchange axiom exhaustively.
    pub fn from_bases<I: IntoIterator<Item = Subset>>(n: usize, bases: I) -> Result<Self> {
        if n > MAX_GROUND - 1 {
            return Err(Error::GroundSetTooLarge(n));
        }
        let set: BTreeSet<Subset> = bases.into_iter().collect();
        let first = *set.iter().next().ok_or(Error::EmptyBases)?;
        let full = Subset::full(n);
        let rank = first.len();
        for &b in &set {
            if !b.is_subset(full) {
                return Err(Error::ElementOutOfRange { n, subset: b });
            }
            if b.len() != rank {
                return Err(Error::UnequalCardinality { expected: rank, found: b });
            }
        }
        for &b1 in &set {
            for &b2 in &set {
                for x in b1.difference(b2).iter() {
                    let ok = b2
                        .difference(b1)
                        .iter()
                        .any(|y| set.contains(&b1.without(x).with(y)));
                    if !ok {
                        return Err(Error::ExchangeAxiomViolated { b1, b2, x });
                    }
                }
            }
        }
        Ok(Matroid { n, rank, bases: set.into_iter().collect(), flats: OnceBox::new() })
    }

    pub fn uniform(r: usize, n: usize) -> Result<Self> {
        if r > n {
            return Err(Error::RankOutOfRange { r, n });
        }
        if n > MAX_GROUND - 1 {
            return Err(Error::GroundSetTooLarge(n));
        }
        let bases = Subset::all(n).filter(|s| s.len() == r).collect();
        Ok(Matroid { n, rank: r, bases, flats: OnceBox::new() })
    }

    /// Cycle matroid of a multigraph; edge `i` (in input order) is element `i + 1`.
    /// Vertices are numbered from 1.
    pub fn from_graph(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let n = edges.len();
        if n > MAX_GROUND - 1 {
            return Err(Error::GroundSetTooLarge(n));
        }
        let forest_size = |s: Subset| -> Option<usize> {
            let mut parent: Vec<usize> = (0..=vertices).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            let mut size = 0;
            for e in s.iter() {
                let (u, v) = edges[e - 1];
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru == rv {
                    return None;
                }
                parent[ru] = rv;
                size += 1;
            }
            Some(size)
        };
        for &(u, v) in edges {
            if u == 0 || v == 0 || u > vertices || v > vertices {
                return Err(Error::ElementOutOfRange { n: vertices, subset: Subset::EMPTY });
            }
        }
        let forests: Vec<Subset> = Subset::all(n).filter(|&s| forest_size(s).is_some()).collect();
        let r = forests.iter().map(|s| s.len()).max().unwrap_or(0);
        let bases = forests.into_iter().filter(|s| s.len() == r).collect();
        Ok(Matroid { n, rank: r, bases, flats: OnceBox::new() })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bases(&self) -> &[Subset] {
        &self.bases
    }

    pub fn ground(&self) -> Subset {
        Subset::full(self.n)
    }

    pub fn rank_of(&self, s: Subset) -> usize {
        self.bases.iter().map(|b| b.intersection(s).len()).max().unwrap_or(0)
    }

    pub fn is_independent(&self, s: Subset) -> bool {
        self.bases.iter().any(|&b| s.is_subset(b))
    }

    pub fn closure(&self, s: Subset) -> Subset {
        let r = self.rank_of(s);
        self.ground()
            .difference(s)
            .iter()
            .filter(|&e| self.rank_of(s.with(e)) == r)
            .fold(s, Subset::with)
    }

    pub fn is_flat(&self, s: Subset) -> bool {
        self.closure(s) == s
    }

    pub fn loops(&self) -> Subset {
        self.closure(Subset::EMPTY)
    }

    pub fn is_loopless(&self) -> bool {
        self.loops().is_empty()
    }

    /// All flats ordered by rank, then by mask.
    pub fn flats(&self) -> &[Flat] {
        self.flats.get_or_init(|| {
            let mut seen = BTreeSet::new();
            let mut stack = alloc::vec![self.loops()];
            seen.insert(self.loops());
            while let Some(f) = stack.pop() {
                for e in self.ground().difference(f).iter() {
                    let g = self.closure(f.with(e));
                    if seen.insert(g) {
                        stack.push(g);
                    }
                }
            }
            let mut flats: Vec<Flat> =
                seen.into_iter().map(|s| Flat { elements: s, rank: self.rank_of(s) }).collect();
            flats.sort_by_key(|f| (f.rank, f.elements));
            alloc::boxed::Box::new(flats)
        })
    }

    pub fn flats_by_rank(&self) -> BTreeMap<usize, Vec<Subset>> {
        let mut out: BTreeMap<usize, Vec<Subset>> = BTreeMap::new();
        for f in self.flats() {
            out.entry(f.rank).or_default().push(f.elements);
        }
        out
    }

    /// The matroid whose bases are the independent sets of size `r - 1`.
    pub fn truncate(&self) -> Result<Self> {
        if self.rank == 0 {
            return Err(Error::RankZero);
        }
        let mut bases = BTreeSet::new();
        for &b in &self.bases {
            for e in b.iter() {
                bases.insert(b.without(e));
            }
        }
        Ok(Matroid {
            n: self.n,
            rank: self.rank - 1,
            bases: bases.into_iter().collect(),
            flats: OnceBox::new(),
        })
    }

    /// Deletes the loops and relabels the remaining elements `1..N'` in order.
    /// The map sends each surviving old element to its new label.
    pub fn delete_loops(&self) -> (Matroid, BTreeMap<usize, usize>) {
        let loops = self.loops();
        let map: BTreeMap<usize, usize> = self
            .ground()
            .difference(loops)
            .iter()
            .enumerate()
            .map(|(i, e)| (e, i + 1))
            .collect();
        let relabel = |b: Subset| Subset::from_elems(b.iter().map(|e| map[&e]));
        let m = Matroid {
            n: map.len(),
            rank: self.rank,
            bases: {
                let mut v: Vec<Subset> = self.bases.iter().map(|&b| relabel(b)).collect();
                v.sort();
                v
            },
            flats: OnceBox::new(),
        };
        (m, map)
    }

    pub fn require_loopless(&self) -> Result<()> {
        let loops = self.loops();
        if loops.is_empty() {
            Ok(())
        } else {
            Err(Error::LoopyMatroid { loops })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(d: &str) -> Subset {
        Subset::from_digits(d)
    }

    pub(crate) fn pyramid() -> Matroid {
        Matroid::from_graph(
            5,
            &[(1, 2), (2, 3), (3, 4), (4, 1), (1, 5), (2, 5), (3, 5), (4, 5)],
        )
        .unwrap()
    }

    #[test]
    fn from_bases_examples() {
        let m = Matroid::from_bases(3, [s("12"), s("13"), s("23")]).unwrap();
        assert_eq!(m, Matroid::uniform(2, 3).unwrap());
        let l = Matroid::from_bases(2, [s("1")]).unwrap();
        assert_eq!(l.loops(), s("2"));
        assert!(Matroid::from_bases(4, [s("12"), s("13"), s("14"), s("23"), s("24")]).is_ok());
        assert_eq!(Matroid::from_bases(3, []), Err(Error::EmptyBases));
        assert!(matches!(
            Matroid::from_bases(3, [s("12"), s("3")]),
            Err(Error::UnequalCardinality { .. })
        ));
        assert!(matches!(
            Matroid::from_bases(4, [s("12"), s("34")]),
            Err(Error::ExchangeAxiomViolated { .. })
        ));
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(Matroid::uniform(4, 4).unwrap().bases().len(), 1);
        assert_eq!(Matroid::uniform(2, 4).unwrap().bases().len(), 6);
        let z = Matroid::uniform(0, 2).unwrap();
        assert_eq!(z.bases(), &[Subset::EMPTY]);
        assert_eq!(z.loops(), s("12"));
        assert_eq!(Matroid::uniform(3, 2), Err(Error::RankOutOfRange { r: 3, n: 2 }));
    }

    #[test]
    fn graphs() {
        let p = pyramid();
        assert_eq!((p.ground_size(), p.rank()), (8, 4));
        assert_eq!(p.rank_of(p.ground()), 4);
        assert_eq!(p.closure(s("3578")), s("34578"));
        assert!(p.is_flat(s("378")));
        assert!(p.flats().iter().any(|f| f.elements == s("378")));
        let tri = Matroid::from_graph(3, &[(1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(tri, Matroid::uniform(2, 3).unwrap());
        let lp = Matroid::from_graph(1, &[(1, 1)]).unwrap();
        assert_eq!((lp.rank(), lp.loops()), (0, s("1")));
    }

    #[test]
    fn flats_of_small_uniforms() {
        let u23: Vec<Subset> =
            Matroid::uniform(2, 3).unwrap().flats().iter().map(|f| f.elements).collect();
        assert_eq!(u23, [Subset::EMPTY, s("1"), s("2"), s("3"), s("123")]);
        let u12: Vec<Subset> =
            Matroid::uniform(1, 2).unwrap().flats().iter().map(|f| f.elements).collect();
        assert_eq!(u12, [Subset::EMPTY, s("12")]);
    }

    #[test]
    fn truncation() {
        assert_eq!(Matroid::uniform(3, 4).unwrap().truncate().unwrap(), Matroid::uniform(2, 4).unwrap());
        assert_eq!(Matroid::uniform(1, 2).unwrap().truncate().unwrap(), Matroid::uniform(0, 2).unwrap());
        assert_eq!(Matroid::uniform(0, 2).unwrap().truncate(), Err(Error::RankZero));
        let p = pyramid();
        let t = p.truncate().unwrap();
        let forests3 = Subset::all(8).filter(|&x| x.len() == 3 && p.is_independent(x)).count();
        assert_eq!(t.bases().len(), forests3);
    }

    #[test]
    fn loop_deletion() {
        let u = Matroid::uniform(2, 3).unwrap();
        let (same, map) = u.delete_loops();
        assert_eq!(same, u);
        assert!(map.iter().all(|(a, b)| a == b));
        let l = Matroid::from_bases(2, [s("1")]).unwrap();
        let (m, map) = l.delete_loops();
        assert_eq!(m, Matroid::uniform(1, 1).unwrap());
        assert_eq!(map.into_iter().collect::<Vec<_>>(), [(1, 1)]);
        let (z, map) = Matroid::uniform(0, 2).unwrap().delete_loops();
        assert_eq!((z.ground_size(), z.rank(), map.len()), (0, 0, 0));
    }
}

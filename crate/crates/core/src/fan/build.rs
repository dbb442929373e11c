use alloc::vec;
use alloc::vec::Vec;

use super::bisubset::{biflats, is_biflag, proper_bisubsets, Bisubset};
use super::{Fan, FanKind, RayId, RayLabel};
use crate::error::Result;
use crate::matroid::Matroid;
use crate::subset::Subset;

/// All chains of `items` (sorted so that `lt` implies a larger index),
/// keeping only chains accepted by the prefix-closed predicate `accept`.
fn chains<T: Copy>(items: &[T], lt: impl Fn(T, T) -> bool, accept: impl Fn(&[T]) -> bool) -> Vec<Vec<RayId>> {
    let mut out = vec![Vec::new()];
    let mut stack: Vec<(Vec<RayId>, Vec<T>)> = vec![(Vec::new(), Vec::new())];
    while let Some((ids, chain)) = stack.pop() {
        let start = ids.last().map_or(0, |&l| l as usize + 1);
        for j in start..items.len() {
            if let Some(&last) = chain.last() {
                if !lt(last, items[j]) {
                    continue;
                }
            }
            let mut c = chain.clone();
            c.push(items[j]);
            if !accept(&c) {
                continue;
            }
            let mut i = ids.clone();
            i.push(j as RayId);
            out.push(i.clone());
            stack.push((i, c));
        }
    }
    out
}

fn subset_vector(n: usize, s: Subset) -> Vec<i64> {
    (1..=n).map(|e| i64::from(s.contains(e))).collect()
}

fn flag_fan(kind: FanKind, n: usize, mut sets: Vec<Subset>) -> Result<Fan> {
    sets.sort_by_key(|s| (s.len(), *s));
    let cones = chains(&sets, |a, b| a != b && a.is_subset(b), |_| true);
    Fan::new(
        kind,
        n,
        vec![vec![1; n]],
        sets.iter().map(|&s| subset_vector(n, s)).collect(),
        sets.iter().map(|&s| RayLabel::Subset(s)).collect(),
        cones,
    )
}

/// Rays `e_S` for proper nonempty `S ⊂ [n]`, cones the chains, lineality `e_[n]`.
pub fn permutohedral(n: usize) -> Result<Fan> {
    let full = Subset::full(n);
    let sets = Subset::all(n).filter(|s| !s.is_empty() && *s != full).collect();
    flag_fan(FanKind::Permutohedral { n }, n, sets)
}

/// Rays `e_F` for proper nonempty flats, cones the flags of flats.
pub fn bergman(m: &Matroid) -> Result<Fan> {
    m.require_loopless()?;
    let n = m.ground_size();
    let full = Subset::full(n);
    let sets =
        m.flats().iter().map(|f| f.elements).filter(|s| !s.is_empty() && *s != full).collect();
    flag_fan(FanKind::Bergman { n, rank: m.rank() }, n, sets)
}

fn biflag_fan(kind: FanKind, n: usize, items: Vec<Bisubset>) -> Result<Fan> {
    let cones = chains(&items, |a, b| a.lt(b), |c| is_biflag(n, c));
    let full = Subset::full(n);
    Fan::new(
        kind,
        2 * n,
        vec![Bisubset { s: Subset::EMPTY, t: full }.vector(n), Bisubset { s: full, t: Subset::EMPTY }.vector(n)],
        items.iter().map(|b| b.vector(n)).collect(),
        items.iter().map(|&b| RayLabel::Bisubset(b)).collect(),
        cones,
    )
}

/// Rays `e_{S|T}` for proper bisubsets, cones the biflags.
pub fn bipermutohedral(n: usize) -> Result<Fan> {
    biflag_fan(FanKind::Bipermutohedral { n }, n, proper_bisubsets(n))
}

/// The subfan of biflags all of whose members are biflats of `m`.
pub fn projective_bundle(m: &Matroid) -> Result<Fan> {
    m.require_loopless()?;
    let n = m.ground_size();
    biflag_fan(FanKind::ProjectiveBundle { n, rank: m.rank() }, n, biflats(m))
}

//! The named classes: `γ, γ̄, δ, u_j, v_j^±` on bisubset fans, `α, w_i` on the
//! permutohedral fan, and the Chern, Segre and twisted Chern classes built from them.
//!
//! Indexing convention: Chern and Segre lists start at degree zero, so
//! `c[i]` is `c_i` and `c[0]` is the unit.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::chow::{multiply, negation_relabel, product_of_divisors, unit_class, ChowElement, DivisorClass, Restriction};
use crate::error::{Error, Result};
use crate::fan::{Bisubset, Fan, FanKind, RayLabel};
use crate::matroid::Matroid;
use crate::rational::{binomial, int, Rational};
use crate::subset::Subset;

/// How the torus of the base maps to `R^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phi {
    Identity,
    Negation,
}

fn bisubset_ground(fan: &Fan) -> Result<usize> {
    match fan.kind() {
        FanKind::Bipermutohedral { n } | FanKind::ProjectiveBundle { n, .. } => Ok(n),
        _ => Err(Error::UnsupportedFan),
    }
}

fn permutohedral_ground(fan: &Fan) -> Result<usize> {
    match fan.kind() {
        FanKind::Permutohedral { n } => Ok(n),
        _ => Err(Error::UnsupportedFan),
    }
}

fn on_bisubsets(fan: &Fan, f: impl Fn(Bisubset) -> i64) -> DivisorClass {
    DivisorClass::from_labels(fan, |l| match l {
        RayLabel::Bisubset(b) => int(f(b)),
        RayLabel::Subset(_) => unreachable!("bisubset fan"),
    })
}

fn check_matroid(n: usize, m: &Matroid) -> Result<()> {
    if m.ground_size() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.ground_size() });
    }
    m.require_loopless()
}

/// `γ_j = Σ_{j ∈ S ≠ [N]} x_{S|T}`.
pub fn gamma(fan: &Fan, j: usize) -> Result<DivisorClass> {
    let full = Subset::full(bisubset_ground(fan)?);
    Ok(on_bisubsets(fan, |b| i64::from(b.s.contains(j) && b.s != full)))
}

/// `γ̄_j = Σ_{j ∈ T ≠ [N]} x_{S|T}`.
pub fn gamma_bar(fan: &Fan, j: usize) -> Result<DivisorClass> {
    let full = Subset::full(bisubset_ground(fan)?);
    Ok(on_bisubsets(fan, |b| i64::from(b.t.contains(j) && b.t != full)))
}

/// `Σ_{S, T ≠ [N]} x_{S|T}`.
fn interior_sum(fan: &Fan) -> Result<DivisorClass> {
    let full = Subset::full(bisubset_ground(fan)?);
    Ok(on_bisubsets(fan, |b| i64::from(b.s != full && b.t != full)))
}

/// `δ_j = γ_j + γ̄_j − Σ_{S,T ≠ [N]} x_{S|T}`.
pub fn delta(fan: &Fan, j: usize) -> Result<DivisorClass> {
    Ok(gamma(fan, j)?.add(&gamma_bar(fan, j)?).sub(&interior_sum(fan)?))
}

/// The divisors of the bundle identity on a bisubset fan, with `j = 1` representatives.
/// `u`, `v_plus` and `v_minus` are indexed from `j = 1`, so `u[0]` is `u_1`.
#[derive(Clone, Debug)]
pub struct StructuralDivisors {
    pub gamma: DivisorClass,
    pub gamma_bar: DivisorClass,
    pub delta: DivisorClass,
    pub u: Vec<DivisorClass>,
    pub v_plus: Vec<DivisorClass>,
    pub v_minus: Vec<DivisorClass>,
}

/// `u_j = Σ_{S≠[N], rk(S^c)<j} x_{S|T} − γ`,
/// `v_j^+ = Σ_{S≠[N], rk(S^c)<j} x_{S|[N]}`,
/// `v_j^- = Σ_{S,T≠[N], rk(S^c)≥j} x_{S|T}`.
pub fn structural_divisors(fan: &Fan, m: &Matroid) -> Result<StructuralDivisors> {
    let n = bisubset_ground(fan)?;
    check_matroid(n, m)?;
    let full = Subset::full(n);
    let g = gamma(fan, 1)?;
    let rk = |b: Bisubset| m.rank_of(b.s.complement(n));
    let mut u = Vec::new();
    let mut v_plus = Vec::new();
    let mut v_minus = Vec::new();
    for j in 1..=m.rank() {
        u.push(on_bisubsets(fan, |b| i64::from(b.s != full && rk(b) < j)).sub(&g));
        v_plus.push(on_bisubsets(fan, |b| i64::from(b.s != full && b.t == full && rk(b) < j)));
        v_minus.push(on_bisubsets(fan, |b| i64::from(b.s != full && b.t != full && rk(b) >= j)));
    }
    Ok(StructuralDivisors { gamma: g, gamma_bar: gamma_bar(fan, 1)?, delta: delta(fan, 1)?, u, v_plus, v_minus })
}

/// `v_j^-` alone, for any `j ≥ 1`.
pub fn v_minus(fan: &Fan, m: &Matroid, j: usize) -> Result<DivisorClass> {
    let n = bisubset_ground(fan)?;
    let full = Subset::full(n);
    Ok(on_bisubsets(fan, |b| i64::from(b.s != full && b.t != full && m.rank_of(b.s.complement(n)) >= j)))
}

/// `α = Σ_{1 ∈ S} x_S`, the class whose pullback along the first projection is `γ_1`.
pub fn alpha(fan: &Fan) -> Result<DivisorClass> {
    permutohedral_ground(fan)?;
    Ok(DivisorClass::from_labels(fan, |l| match l {
        RayLabel::Subset(s) => int(i64::from(s.contains(1))),
        RayLabel::Bisubset(_) => unreachable!(),
    }))
}

/// `w_i = Σ_{S≠[N], rk(S^c)<i} x_S − α` for `i = 1..=r`, relabeled by
/// `S ↦ S^c` for the negation map.
pub fn w_divisors(fan: &Fan, m: &Matroid, phi: Phi) -> Result<Vec<DivisorClass>> {
    let n = permutohedral_ground(fan)?;
    check_matroid(n, m)?;
    let a = alpha(fan)?;
    (1..=m.rank())
        .map(|i| {
            let w = DivisorClass::from_labels(fan, |l| match l {
                RayLabel::Subset(s) => int(i64::from(m.rank_of(s.complement(n)) < i)),
                RayLabel::Bisubset(_) => unreachable!(),
            })
            .sub(&a);
            match phi {
                Phi::Identity => Ok(w),
                Phi::Negation => negation_relabel(fan, &w),
            }
        })
        .collect()
}

fn subsets_of_size(r: usize, i: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, r: usize, i: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == i {
            out.push(cur.clone());
            return;
        }
        for k in start..r {
            cur.push(k);
            go(k + 1, r, i, cur, out);
            cur.pop();
        }
    }
    go(0, r, i, &mut cur, &mut out);
    out
}

/// `e_i(D_1, …, D_r)` as a sum over `i`-subsets of divisor products.
pub fn elementary_symmetric(fan: &Fan, divisors: &[DivisorClass], i: usize) -> Result<ChowElement> {
    let mut out = ChowElement::zero(fan, i);
    for subset in subsets_of_size(divisors.len(), i) {
        let factors: Vec<&DivisorClass> = subset.iter().map(|&k| &divisors[k]).collect();
        out = out.add(&product_of_divisors(fan, &factors)?)?;
    }
    Ok(out)
}

/// `[1, e_1(D), …, e_r(D)]`.
pub fn chern_from_roots(fan: &Fan, divisors: &[DivisorClass]) -> Result<Vec<ChowElement>> {
    (0..=divisors.len()).map(|i| elementary_symmetric(fan, divisors, i)).collect()
}

/// Where the Chern classes of a matroid live.
#[derive(Clone, Copy)]
pub enum ChernRoute<'a> {
    /// On the permutohedral fan itself.
    Permutohedral(Phi),
    /// Restricted from the permutohedral fan to a subfan such as a Bergman fan.
    Restricted(Phi, &'a Fan),
}

/// `[c_0, …, c_r]` of `m`, computed from the `w_i` on the permutohedral fan
/// `perm` and optionally restricted divisor by divisor to a subfan.
pub fn chern_classes(perm: &Fan, m: &Matroid, route: ChernRoute<'_>) -> Result<Vec<ChowElement>> {
    match route {
        ChernRoute::Permutohedral(phi) => chern_from_roots(perm, &w_divisors(perm, m, phi)?),
        ChernRoute::Restricted(phi, sub) => {
            let res = Restriction::new(perm, sub)?;
            let w: Vec<DivisorClass> =
                w_divisors(perm, m, phi)?.iter().map(|d| res.divisor(d)).collect::<Result<_>>()?;
            chern_from_roots(sub, &w)
        }
    }
}

/// `[s_0, …, s_n]` from `(1 + c_1 + ⋯ + c_r)(1 + s_1 + ⋯ + s_n) = 1`.
pub fn segre_classes(fan: &Fan, c: &[ChowElement], n: usize) -> Result<Vec<ChowElement>> {
    let mut s = alloc::vec![unit_class(fan)];
    for i in 1..=n {
        let mut acc = ChowElement::zero(fan, i);
        for j in 1..=i.min(c.len().saturating_sub(1)) {
            acc = acc.sub(&multiply(fan, &c[j], &s[i - j])?)?;
        }
        s.push(acc);
    }
    Ok(s)
}

/// `c_i' = Σ_{j=0}^{i} (−1)^j C(r−i+j, j) c_{i−j} (λδ)^j` for `i = 0..=r`.
pub fn twist_classes(fan: &Fan, c: &[ChowElement], d: &DivisorClass, lambda: &Rational) -> Result<Vec<ChowElement>> {
    let r = c.len() - 1;
    let ld = d.scale(lambda);
    let mut powers = alloc::vec![unit_class(fan)];
    for _ in 0..r {
        let next = crate::chow::multiply_by_divisor(fan, powers.last().unwrap(), &ld)?;
        powers.push(next);
    }
    (0..=r)
        .map(|i| {
            let mut acc = ChowElement::zero(fan, i);
            for j in 0..=i {
                let sign = if j % 2 == 0 { Rational::one() } else { -Rational::one() };
                let coef = sign * binomial(r - i + j, j);
                if coef.is_zero() {
                    continue;
                }
                acc = acc.axpy(&coef, &multiply(fan, &c[i - j], &powers[j])?)?;
            }
            Ok(acc)
        })
        .collect()
}

/// The standard convex class `h = Σ_S |S|(N−|S|) x_S` on the permutohedral fan.
pub fn permutohedral_ample(fan: &Fan) -> Result<DivisorClass> {
    let n = permutohedral_ground(fan)? as i64;
    Ok(DivisorClass::from_labels(fan, |l| match l {
        RayLabel::Subset(s) => int(s.len() as i64 * (n - s.len() as i64)),
        RayLabel::Bisubset(_) => unreachable!(),
    }))
}

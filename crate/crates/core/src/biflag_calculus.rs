//! Lexicographically decreasing biflags, canonical expansions and the
//! cancellation bookkeeping behind the projective bundle relation.
//!
//! A biflag is a strictly increasing `Vec<Bisubset>`. Element minima always
//! use the order `1 < 2 < ⋯ < N`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use num_traits::{One, Zero};

use crate::check::Check;
use crate::chow::{
    cap_product, first_nonzero_pairing, multiply_by_divisor, product_of_divisors, pullback_pi1,
    pullback_pi1_element, unit_class, ChowElement, DivisorClass, MinkowskiWeight,
};
use crate::classes::{chern_from_roots, gamma_bar, structural_divisors, v_minus, w_divisors, Phi};
use crate::error::{Error, Result};
use crate::fan::{biflats, bipermutohedral, gap_indices, is_biflag, permutohedral, projective_bundle, Bisubset, ConeId, Fan, RayLabel};
use crate::matroid::Matroid;
use crate::rational::{int, Rational};
use crate::subset::Subset;

pub type Biflag = Vec<Bisubset>;

pub fn format_chain(chain: &[Bisubset]) -> String {
    if chain.is_empty() {
        return "()".to_string();
    }
    let mut s = String::new();
    for (i, b) in chain.iter().enumerate() {
        if i > 0 {
            s.push_str(" < ");
        }
        let _ = write!(s, "{b}");
    }
    s
}

/// A biflag cut at its first gap index `s` into `S|F` (length `s`) and `T|G` (length `ℓ`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitBiflag {
    pub n: usize,
    pub first: Vec<Bisubset>,
    pub second: Vec<Bisubset>,
    /// `cl(S_s^c)`, with `S_0 = ∅`.
    pub closure: Subset,
    /// `rk(cl(S_s^c))`.
    pub a: usize,
}

impl SplitBiflag {
    pub fn ell(&self) -> usize {
        self.second.len()
    }

    pub fn chain(&self) -> Biflag {
        let mut c = self.first.clone();
        c.extend_from_slice(&self.second);
        c
    }

    /// `T_i|G_i` with `T_0|G_0 = S_s|F_s` (or `∅|[N]`) and `T_{ℓ+1}|G_{ℓ+1} = [N]|∅`.
    pub fn t_g(&self, i: usize) -> Bisubset {
        let full = Subset::full(self.n);
        if i == 0 {
            self.first.last().copied().unwrap_or(Bisubset { s: Subset::EMPTY, t: full })
        } else if i == self.ell() + 1 {
            Bisubset { s: full, t: Subset::EMPTY }
        } else {
            self.second[i - 1]
        }
    }

    pub fn g(&self, i: usize) -> Subset {
        self.t_g(i).t
    }
}

fn first_gap_split(m: &Matroid, first: Vec<Bisubset>, second: Vec<Bisubset>) -> SplitBiflag {
    let n = m.ground_size();
    let s_last = first.last().map_or(Subset::EMPTY, |b| b.s);
    let closure = m.closure(s_last.complement(n));
    SplitBiflag { n, first, second, closure, a: m.rank_of(closure) }
}

fn is_biflat(m: &Matroid, b: Bisubset) -> bool {
    b.is_proper() && m.is_flat(b.t)
}

/// Splits a biflag of `m` at its smallest gap index.
pub fn split_at_first_gap(m: &Matroid, chain: &[Bisubset]) -> Result<SplitBiflag> {
    let n = m.ground_size();
    if !chain.iter().all(|&b| is_biflat(m, b)) {
        return Err(Error::NotABiflag);
    }
    let gaps = gap_indices(n, chain)?;
    let s = *gaps.first().ok_or(Error::NotABiflag)?;
    Ok(first_gap_split(m, chain[..s].to_vec(), chain[s..].to_vec()))
}

fn lex_at(split: &SplitBiflag, i: usize) -> bool {
    split.closure.difference(split.g(i + 1)).min().is_some_and(|e| split.g(i).contains(e))
}

/// `min(cl(S_s^c) ∖ G_{i+1}) ∈ G_i`.
pub fn is_lex_decreasing_at(split: &SplitBiflag, i: usize) -> Result<bool> {
    if i > split.ell() {
        return Err(Error::IndexOutOfRange { index: i, len: split.ell() });
    }
    Ok(lex_at(split, i))
}

pub fn is_lex_decreasing(split: &SplitBiflag) -> bool {
    (0..=split.ell()).all(|i| lex_at(split, i))
}

/// `(rk(cl(S_s^c) ∩ G_i), rk(T_i^c))` for `i = 1..=ℓ`, after checking the
/// strict decrease of the first entry and `rk(T_i^c) ≤ rk(cl ∩ G_i) ≤ a − i`.
pub fn dyck_profile(m: &Matroid, split: &SplitBiflag) -> Result<Vec<(usize, usize)>> {
    if let Some(i) = (0..=split.ell()).find(|&i| !lex_at(split, i)) {
        return Err(Error::NotLexDecreasing { index: i });
    }
    let profile: Vec<(usize, usize)> = (1..=split.ell())
        .map(|i| {
            let b = split.t_g(i);
            (m.rank_of(split.closure.intersection(b.t)), m.rank_of(b.s.complement(split.n)))
        })
        .collect();
    for (k, &(inter, tc)) in profile.iter().enumerate() {
        let i = k + 1;
        let decreasing = profile.get(k + 1).is_none_or(|next| next.0 < inter);
        if !decreasing || tc > inter || inter + i > split.a {
            return Err(Error::DyckViolation { index: i });
        }
    }
    Ok(profile)
}

/// A formal `Σ c · x_biflag` with no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignedBiflagSum(BTreeMap<Biflag, Rational>);

impl SignedBiflagSum {
    pub fn new() -> Self {
        SignedBiflagSum(BTreeMap::new())
    }

    pub fn add(&mut self, b: Biflag, c: Rational) {
        let e = self.0.entry(b.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&b);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Biflag, Rational> {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The class `Σ c · x_biflag` in a bisubset fan.
    pub fn to_element(&self, fan: &Fan, degree: usize) -> Result<ChowElement> {
        let mut out = ChowElement::zero(fan, degree);
        for (b, c) in &self.0 {
            out = out.add(&chain_monomial(fan, b, c.clone())?)?;
        }
        Ok(out)
    }
}

/// `c · x_chain` in a bisubset fan; zero when the chain is not a cone.
pub fn chain_monomial(fan: &Fan, chain: &[Bisubset], c: Rational) -> Result<ChowElement> {
    let rays: Vec<u32> =
        chain.iter().map(|&b| fan.ray_of(RayLabel::Bisubset(b)).ok_or(Error::ConeNotInFan)).collect::<Result<_>>()?;
    Ok(ChowElement::monomial(fan, &rays, c))
}

/// Inserts `b` into `chain` if the result is again a chain.
fn insert_into_chain(chain: &[Bisubset], b: Bisubset) -> Option<Biflag> {
    let pos = chain.iter().position(|&c| b.lt(c)).unwrap_or(chain.len());
    if pos > 0 && !chain[pos - 1].lt(b) {
        return None;
    }
    if chain[pos..].iter().any(|&c| !b.lt(c)) {
        return None;
    }
    let mut out = chain.to_vec();
    out.insert(pos, b);
    Some(out)
}

/// One monomial of a canonical expansion: the new biflag and the biflat that was inserted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExpansionTerm {
    pub biflag: Biflag,
    pub inserted: Bisubset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalExpansion {
    /// Smallest `i ∈ 1..=ℓ+1` with `rk(T_i^c) < a − ℓ`.
    pub index: usize,
    pub e: usize,
    pub pos: Vec<ExpansionTerm>,
    pub neg: Vec<ExpansionTerm>,
}

/// Biflats of a matroid with their corank data, shared by the enumerations.
pub struct BiflagContext<'a> {
    m: &'a Matroid,
    n: usize,
    biflats: Vec<Bisubset>,
    corank: BTreeMap<Subset, usize>,
}

impl<'a> BiflagContext<'a> {
    pub fn new(m: &'a Matroid) -> Result<Self> {
        m.require_loopless()?;
        let n = m.ground_size();
        let biflats = biflats(m);
        let mut corank = BTreeMap::new();
        for b in &biflats {
            corank.entry(b.s).or_insert_with(|| m.rank_of(b.s.complement(n)));
        }
        Ok(BiflagContext { m, n, biflats, corank })
    }

    pub fn matroid(&self) -> &Matroid {
        self.m
    }

    pub fn biflats(&self) -> &[Bisubset] {
        &self.biflats
    }

    /// `rk(S^c)`.
    pub fn corank(&self, s: Subset) -> usize {
        match self.corank.get(&s) {
            Some(&r) => r,
            None => self.m.rank_of(s.complement(self.n)),
        }
    }

    /// Chains of proper biflats with no gap index below their length, including the empty chain.
    pub fn first_components(&self) -> Vec<Biflag> {
        let full = Subset::full(self.n);
        let mut out = Vec::new();
        let mut stack: Vec<Biflag> = alloc::vec![Vec::new()];
        while let Some(chain) = stack.pop() {
            let s_last = chain.last().map_or(Subset::EMPTY, |b| b.s);
            for &b in &self.biflats {
                if chain.last().is_some_and(|&l| !l.lt(b)) || s_last.union(b.t) != full {
                    continue;
                }
                let mut c = chain.clone();
                c.push(b);
                stack.push(c);
            }
            out.push(chain);
        }
        out.sort();
        out
    }

    pub fn check_first_component(&self, first: &[Bisubset]) -> Result<()> {
        if !first.iter().all(|&b| is_biflat(self.m, b)) {
            return Err(Error::InvalidFirstComponent(format!("{} contains a non-biflat", format_chain(first))));
        }
        let gaps = gap_indices(self.n, first).map_err(|_| Error::InvalidFirstComponent(format_chain(first)))?;
        if let Some(g) = gaps.iter().find(|&&g| g < first.len()) {
            return Err(Error::InvalidFirstComponent(format!("{} has gap index {g}", format_chain(first))));
        }
        Ok(())
    }

    /// All lexicographically decreasing biflags with first component `first`
    /// and second component of length `len`, by depth-first extension with
    /// the lex condition checked as soon as its two flats are known.
    pub fn lex_decreasing_biflags(&self, first: &[Bisubset], len: usize) -> Result<Vec<SplitBiflag>> {
        self.check_first_component(first)?;
        let full = Subset::full(self.n);
        let base = first_gap_split(self.m, first.to_vec(), Vec::new());
        let top = base.t_g(0);
        let cl = base.closure;
        let lex = |gi: Subset, gnext: Subset| cl.difference(gnext).min().is_some_and(|e| gi.contains(e));
        let mut out = Vec::new();
        let mut stack: Vec<Vec<Bisubset>> = alloc::vec![Vec::new()];
        while let Some(second) = stack.pop() {
            if second.len() == len {
                let g_last = second.last().map_or(top.t, |b| b.t);
                if lex(g_last, Subset::EMPTY) {
                    let mut split = base.clone();
                    split.second = second;
                    out.push(split);
                }
                continue;
            }
            let prev = second.last().copied().unwrap_or(top);
            for &b in &self.biflats {
                if !prev.lt(b) {
                    continue;
                }
                if second.is_empty() && top.s.union(b.t) == full {
                    continue;
                }
                if !lex(prev.t, b.t) {
                    continue;
                }
                let mut next = second.clone();
                next.push(b);
                stack.push(next);
            }
        }
        out.sort_by(|x, y| x.second.cmp(&y.second));
        Ok(out)
    }

    /// The canonical expansion of `x_biflag · (γ̄ − v^-_{a−ℓ})`, using the
    /// representative `γ̄_e`.
    pub fn canonical_expansion(&self, split: &SplitBiflag) -> Result<CanonicalExpansion> {
        if let Some(i) = (0..=split.ell()).find(|&i| !lex_at(split, i)) {
            return Err(Error::NotLexDecreasing { index: i });
        }
        let ell = split.ell();
        let full = Subset::full(self.n);
        if split.a <= ell {
            return Err(Error::DyckViolation { index: ell });
        }
        let bound = split.a - ell;
        let index = (1..=ell + 1)
            .find(|&i| self.corank(split.t_g(i).s) < bound)
            .expect("T_{l+1} = [N] has corank 0");
        let e = split.closure.difference(split.g(index)).min().expect("gap at s keeps the closure outside G_i");
        let chain = split.chain();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for &u in &self.biflats {
            if chain.contains(&u) {
                continue;
            }
            let small = self.corank(u.s) < bound;
            let sign = if small && u.t.contains(e) && u.t != full {
                1
            } else if !small && u.s != full && u.t != full && !u.t.contains(e) {
                -1
            } else {
                0
            };
            if sign == 0 {
                continue;
            }
            if let Some(biflag) = insert_into_chain(&chain, u) {
                if is_biflag(self.n, &biflag) {
                    let term = ExpansionTerm { biflag, inserted: u };
                    if sign > 0 {
                        pos.push(term)
                    } else {
                        neg.push(term)
                    }
                }
            }
        }
        Ok(CanonicalExpansion { index, e, pos, neg })
    }

    /// `γ̄_e − v^-_j` on a bisubset fan of this matroid.
    pub fn expansion_divisor(&self, fan: &Fan, e: usize, j: usize) -> Result<DivisorClass> {
        Ok(gamma_bar(fan, e)?.sub(&v_minus(fan, self.m, j)?))
    }
}

/// The sets attached to a first component and a length `ℓ`.
#[derive(Clone, Debug)]
pub struct FamilySets {
    pub first: Biflag,
    pub ell: usize,
    pub a: usize,
    pub a_set: Vec<SplitBiflag>,
    /// `parts[j - 1]` is `A_j` for `j = 1..=ℓ+1`, as indices into `a_set`.
    pub parts: Vec<Vec<usize>>,
    pub a_prime: Vec<SplitBiflag>,
    /// Canonical expansion of each member of `a_set`, in the same order.
    pub expansions: Vec<CanonicalExpansion>,
    pub b_set: BTreeSet<Biflag>,
}

impl FamilySets {
    fn collect<'x>(&'x self, members: impl Iterator<Item = &'x usize>, neg: bool) -> BTreeSet<Biflag> {
        members
            .flat_map(|&k| {
                let exp = &self.expansions[k];
                if neg { &exp.neg } else { &exp.pos }.iter().map(|t| t.biflag.clone())
            })
            .collect()
    }

    pub fn pos_all(&self) -> BTreeSet<Biflag> {
        self.collect((0..self.a_set.len()).collect::<Vec<_>>().iter(), false)
    }

    pub fn neg_all(&self) -> BTreeSet<Biflag> {
        self.collect((0..self.a_set.len()).collect::<Vec<_>>().iter(), true)
    }

    /// `pos(A_j)` for `j ≥ 1`.
    pub fn pos_part(&self, j: usize) -> BTreeSet<Biflag> {
        self.collect(self.parts[j - 1].iter(), false)
    }

    pub fn neg_part(&self, j: usize) -> BTreeSet<Biflag> {
        self.collect(self.parts[j - 1].iter(), true)
    }

    /// `A'_j`: members of `A'` whose first index with `rk(T_i^c) < a − ℓ` is `j`.
    pub fn a_prime_part(&self, ctx: &BiflagContext<'_>, j: usize) -> BTreeSet<Biflag> {
        let bound = self.a - self.ell;
        self.a_prime
            .iter()
            .filter(|sp| (1..=sp.ell() + 1).find(|&i| ctx.corank(sp.t_g(i).s) < bound) == Some(j))
            .map(SplitBiflag::chain)
            .collect()
    }

    pub fn a_prime_chains(&self) -> BTreeSet<Biflag> {
        self.a_prime.iter().map(SplitBiflag::chain).collect()
    }
}

/// Enumerates `A`, its partition, `A'`, the canonical expansions and `B`.
pub fn family_sets(ctx: &BiflagContext<'_>, first: &[Bisubset], ell: usize) -> Result<FamilySets> {
    let a_set = ctx.lex_decreasing_biflags(first, ell)?;
    let a_prime = ctx.lex_decreasing_biflags(first, ell + 1)?;
    let a = first_gap_split(ctx.m, first.to_vec(), Vec::new()).a;
    let mut parts = alloc::vec![Vec::new(); ell + 1];
    let mut expansions = Vec::new();
    let mut b_set = BTreeSet::new();
    if a > ell {
        for (k, sp) in a_set.iter().enumerate() {
            let exp = ctx.canonical_expansion(sp)?;
            parts[exp.index - 1].push(k);
            if exp.index == 1 {
                for t in &exp.pos {
                    if sp.closure.is_subset(t.inserted.t) {
                        b_set.insert(t.biflag.clone());
                    }
                }
            }
            expansions.push(exp);
        }
    } else if let Some(sp) = a_set.first() {
        return Err(Error::DyckViolation { index: sp.ell() });
    }
    Ok(FamilySets { first: first.to_vec(), ell, a, a_set, parts, a_prime, expansions, b_set })
}

fn first_of<T: Ord + Clone>(set: impl IntoIterator<Item = T>) -> Option<T> {
    set.into_iter().next()
}

fn witness_chain(b: Option<Biflag>) -> Option<String> {
    b.map(|c| format_chain(&c))
}

/// Every finite-set statement of the cancellation argument for one `(S|F, ℓ)`,
/// plus, when `fan` (the projective bundle fan of the matroid) is given, the
/// same identities at the level of Chow classes.
pub fn verify_cancellation(ctx: &BiflagContext<'_>, first: &[Bisubset], ell: usize, fan: Option<&Fan>) -> Result<Vec<Check>> {
    let fs = family_sets(ctx, first, ell)?;
    let mut checks = Vec::new();

    let bad_dyck = fs.a_set.iter().find(|sp| dyck_profile(ctx.m, sp).is_err()).map(SplitBiflag::chain);
    checks.push(Check::from_witness("dyck", witness_chain(bad_dyck)));

    if fs.a <= ell {
        checks.push(Check::from_witness(
            "no-long-lex-decreasing",
            fs.a_set.first().map(|sp| format_chain(&sp.chain())),
        ));
        return Ok(checks);
    }

    let mut sandwich = None;
    for (sp, exp) in fs.a_set.iter().zip(&fs.expansions) {
        let lo = sp.t_g(exp.index - 1);
        let hi = sp.t_g(exp.index);
        if let Some(t) = exp.pos.iter().chain(&exp.neg).find(|t| !(lo.lt(t.inserted) && t.inserted.lt(hi))) {
            sandwich = Some(t.biflag.clone());
            break;
        }
    }
    checks.push(Check::from_witness("canonical-sandwich", witness_chain(sandwich)));

    if let Some(fan) = fan {
        let mut bad = None;
        for (sp, exp) in fs.a_set.iter().zip(&fs.expansions) {
            let chain = sp.chain();
            let d = ctx.expansion_divisor(fan, exp.e, fs.a - ell)?;
            let x = chain_monomial(fan, &chain, Rational::one())?;
            let local_zero = chain
                .iter()
                .all(|&b| d.coeff(fan.ray_of(RayLabel::Bisubset(b)).expect("ray")).is_zero());
            let product = multiply_by_divisor(fan, &x, &d)?;
            let mut expected = SignedBiflagSum::new();
            for t in &exp.pos {
                expected.add(t.biflag.clone(), int(1));
            }
            for t in &exp.neg {
                expected.add(t.biflag.clone(), int(-1));
            }
            if !local_zero || product != expected.to_element(fan, chain.len() + 1)? {
                bad = Some(chain);
                break;
            }
        }
        checks.push(Check::from_witness("canonical-chow", witness_chain(bad)));
    }

    let disjoint = |neg: bool| -> Option<Biflag> {
        let mut seen = BTreeSet::new();
        for exp in &fs.expansions {
            for t in if neg { &exp.neg } else { &exp.pos } {
                if !seen.insert(t.biflag.clone()) {
                    return Some(t.biflag.clone());
                }
            }
        }
        None
    };
    checks.push(Check::from_witness("disjoint-pos", witness_chain(disjoint(false))));
    checks.push(Check::from_witness("disjoint-neg", witness_chain(disjoint(true))));

    checks.push(Check::from_witness("neg-last-empty", witness_chain(first_of(fs.neg_part(ell + 1)))));

    let mut containment = None;
    for j in 1..=ell {
        let neg_j = fs.neg_part(j);
        let pos_next = fs.pos_part(j + 1);
        if let Some(b) = neg_j.difference(&pos_next).next() {
            containment = Some(format!("j = {j}: {} not in pos(A_{})", format_chain(b), j + 1));
            break;
        }
        let diff: BTreeSet<Biflag> = pos_next.difference(&neg_j).cloned().collect();
        let expected = fs.a_prime_part(ctx, j + 1);
        if let Some(b) = diff.symmetric_difference(&expected).next() {
            containment = Some(format!("j = {j}: {}", format_chain(b)));
            break;
        }
    }
    checks.push(Check::from_witness("neg-containment", containment));

    let a_prime = fs.a_prime_chains();
    let pos_all = fs.pos_all();
    let neg_all = fs.neg_all();
    let first_part: BTreeSet<Biflag> = fs.pos_part(1).difference(&fs.b_set).cloned().collect();
    let mut assembled = first_part.clone();
    let mut overlap = first_part.len();
    for j in 1..=ell {
        let d: BTreeSet<Biflag> = fs.pos_part(j + 1).difference(&fs.neg_part(j)).cloned().collect();
        overlap += d.len();
        assembled.extend(d);
    }
    let global: BTreeSet<Biflag> =
        pos_all.difference(&fs.b_set).cloned().collect::<BTreeSet<_>>().difference(&neg_all).cloned().collect();
    let total = if first_part != fs.a_prime_part(ctx, 1) {
        Some("pos(A_1) \\ B differs from A'_1".to_string())
    } else if overlap != assembled.len() {
        Some("pieces of A' overlap".to_string())
    } else if let Some(b) = assembled.symmetric_difference(&a_prime).next() {
        Some(format_chain(b))
    } else {
        global.symmetric_difference(&a_prime).next().map(|b| format_chain(b))
    };
    checks.push(Check::from_witness("total-cancel", total));

    let mut lhs = SignedBiflagSum::new();
    for exp in &fs.expansions {
        for t in &exp.pos {
            lhs.add(t.biflag.clone(), int(1));
        }
        for t in &exp.neg {
            lhs.add(t.biflag.clone(), int(-1));
        }
    }
    let mut rhs = SignedBiflagSum::new();
    for b in a_prime.iter().chain(&fs.b_set) {
        rhs.add(b.clone(), int(1));
    }
    let b_ok = fs.b_set.iter().all(|b| {
        let sp_first = &b[..fs.first.len()];
        sp_first == fs.first.as_slice()
    });
    let summary = if lhs != rhs {
        let diff = lhs.terms().keys().chain(rhs.terms().keys()).find(|k| lhs.terms().get(*k) != rhs.terms().get(*k));
        Some(diff.map_or_else(String::new, |b| format_chain(b)))
    } else if !b_ok {
        Some("B member does not extend the first component".to_string())
    } else {
        None
    };
    checks.push(Check::from_witness("summary-formal", summary));

    if let Some(fan) = fan {
        let degree = first.len() + ell;
        let mut sum_a = ChowElement::zero(fan, degree);
        for sp in &fs.a_set {
            sum_a = sum_a.add(&chain_monomial(fan, &sp.chain(), Rational::one())?)?;
        }
        let d = gamma_bar(fan, 1)?.sub(&v_minus(fan, ctx.m, fs.a - ell)?);
        let lhs_class = multiply_by_divisor(fan, &sum_a, &d)?;
        let rhs_class = rhs.to_element(fan, degree + 1)?;
        let witness = first_nonzero_pairing(fan, &lhs_class.sub(&rhs_class)?)?.map(|(c, _)| cone_label(fan, c));
        checks.push(Check::from_witness("summary-chow", witness));
    }
    Ok(checks)
}

pub fn cone_label(fan: &Fan, c: ConeId) -> String {
    let mut s = String::from("[");
    for (i, &r) in fan.cone(c).iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{}", fan.ray_label(r));
    }
    s.push(']');
    s
}

/// `Σ_{A} x_biflag · Π_{i=1}^{a−ℓ} (γ̄ − v_i^-)` on the projective bundle fan, tested for zero.
/// Returns the size of `A` and a witnessing cone if the class is nonzero.
pub fn verify_min_dec(ctx: &BiflagContext<'_>, fan: &Fan, first: &[Bisubset], ell: usize) -> Result<(usize, Option<String>)> {
    let a_set = ctx.lex_decreasing_biflags(first, ell)?;
    let a = first_gap_split(ctx.m, first.to_vec(), Vec::new()).a;
    if ell > a {
        return Err(Error::IndexOutOfRange { index: ell, len: a });
    }
    let mut x = ChowElement::zero(fan, first.len() + ell);
    for sp in &a_set {
        x = x.add(&chain_monomial(fan, &sp.chain(), Rational::one())?)?;
    }
    let gb = gamma_bar(fan, 1)?;
    for i in 1..=a - ell {
        if x.is_empty() {
            break;
        }
        x = multiply_by_divisor(fan, &x, &gb.sub(&v_minus(fan, ctx.m, i)?))?;
    }
    let witness = first_nonzero_pairing(fan, &x)?.map(|(c, _)| cone_label(fan, c));
    Ok((a_set.len(), witness))
}

/// All lemma checks over every first component and every `ℓ ≤ a`.
pub fn verify_lemmas(m: &Matroid, with_chow: bool) -> Result<Vec<Check>> {
    verify_lemmas_for(m, None, with_chow)
}

/// As [`verify_lemmas`], restricted to the given first components when `firsts` is set.
pub fn verify_lemmas_for(m: &Matroid, firsts: Option<&[Biflag]>, with_chow: bool) -> Result<Vec<Check>> {
    let ctx = BiflagContext::new(m)?;
    let firsts = match firsts {
        Some(fs) => {
            for f in fs {
                ctx.check_first_component(f)?;
            }
            fs.to_vec()
        }
        None => ctx.first_components(),
    };
    let fan = if with_chow { Some(projective_bundle(m)?) } else { None };
    let mut totals: BTreeMap<String, (usize, Option<String>)> = BTreeMap::new();
    let mut record = |c: Check, instance: &str| {
        let e = totals.entry(c.name.clone()).or_insert((0, None));
        e.0 += 1;
        if !c.passed && e.1.is_none() {
            e.1 = Some(format!("{instance}: {}", c.witness.unwrap_or_default()));
        }
    };
    for first in firsts {
        let a = first_gap_split(m, first.clone(), Vec::new()).a;
        for ell in 0..=a {
            let instance = format!("first = {}, l = {ell}", format_chain(&first));
            for c in verify_cancellation(&ctx, &first, ell, fan.as_ref())? {
                record(c, &instance);
            }
            if let Some(f) = &fan {
                let (_, w) = verify_min_dec(&ctx, f, &first, ell)?;
                record(Check::from_witness("min-dec", w), &instance);
            }
        }
    }
    Ok(totals
        .into_iter()
        .map(|(name, (count, w))| Check::from_witness(format!("{name} ({count} instances)"), w))
        .collect())
}

fn witness_class(fan: &Fan, e: &ChowElement) -> Result<Option<String>> {
    Ok(first_nonzero_pairing(fan, e)?.map(|(c, v)| format!("pairs to {v} with {}", cone_label(fan, c))))
}

fn power(fan: &Fan, d: &DivisorClass, k: usize) -> Result<ChowElement> {
    let mut acc = unit_class(fan);
    for _ in 0..k {
        acc = multiply_by_divisor(fan, &acc, d)?;
    }
    Ok(acc)
}

fn product(fan: &Fan, ds: &[DivisorClass]) -> Result<ChowElement> {
    product_of_divisors(fan, &ds.iter().collect::<Vec<_>>())
}

/// The projective bundle relation and the chain of reductions leading to it,
/// on the projective bundle fan of a loopless matroid.
pub fn verify_bundle_identity(m: &Matroid) -> Result<Vec<Check>> {
    m.require_loopless()?;
    let n = m.ground_size();
    let r = m.rank();
    let perm = permutohedral(n)?;
    let fan = projective_bundle(m)?;
    let sd = structural_divisors(&fan, m)?;
    let w = w_divisors(&perm, m, Phi::Identity)?;
    let pulled: Vec<DivisorClass> = w.iter().map(|d| pullback_pi1(&perm, &fan, d)).collect::<Result<_>>()?;
    let c = chern_from_roots(&fan, &pulled)?;

    let mut x1 = power(&fan, &sd.delta, r)?;
    for i in 1..=r {
        x1 = x1.add(&crate::chow::multiply(&fan, &c[i], &power(&fan, &sd.delta, r - i)?)?)?;
    }
    let x2 = product(&fan, &sd.u.iter().map(|u| sd.delta.add(u)).collect::<Vec<_>>())?;
    let x3 = product(&fan, &sd.v_minus.iter().map(|v| sd.gamma_bar.sub(v)).collect::<Vec<_>>())?;

    let mut checks = Vec::new();
    let u_match = pulled.iter().zip(&sd.u).position(|(p, u)| p != u).map(|j| format!("u_{}", j + 1));
    checks.push(Check::from_witness("u-is-pullback-of-w", u_match));

    let c_perm = chern_from_roots(&perm, &w)?;
    let e_u = chern_from_roots(&fan, &sd.u)?;
    let mut reduction = None;
    for i in 1..=r {
        let p = pullback_pi1_element(&perm, &fan, &c_perm[i])?;
        if let Some(wit) = witness_class(&fan, &p.sub(&e_u[i])?)? {
            reduction = Some(format!("e_{i}: {wit}"));
            break;
        }
    }
    checks.push(Check::from_witness("e(u)-equals-pullback-c", reduction));

    let split = (0..r).position(|j| sd.delta.add(&sd.u[j]) != sd.gamma_bar.add(&sd.v_plus[j]).sub(&sd.v_minus[j]));
    checks.push(Check::from_witness("delta-u-split", split.map(|j| format!("j = {}", j + 1))));
    checks.push(Check::from_witness("v1-plus-zero", (!sd.v_plus[0].is_zero_vector()).then(|| "v_1^+".to_string())));

    let mut vplus = None;
    for j in 1..=r {
        let mut ds = alloc::vec![sd.v_plus[j - 1].clone()];
        ds.extend((1..j).map(|i| sd.gamma_bar.sub(&sd.v_minus[i - 1])));
        if let Some(wit) = witness_class(&fan, &product(&fan, &ds)?)? {
            vplus = Some(format!("j = {j}: {wit}"));
            break;
        }
    }
    checks.push(Check::from_witness("v-plus-products-vanish", vplus));

    checks.push(Check::from_witness("x1-minus-x2", witness_class(&fan, &x1.sub(&x2)?)?));
    checks.push(Check::from_witness("x2-minus-x3", witness_class(&fan, &x2.sub(&x3)?)?));
    checks.push(Check::from_witness("x3", witness_class(&fan, &x3)?));
    checks.push(Check::from_witness("bundle-relation", witness_class(&fan, &x1)?));
    let vr = &sd.v_minus[r - 1];
    checks.push(Check::from_witness("restricted-v-r-minus", (!vr.is_zero_vector()).then(|| "nonzero coefficient".to_string())));
    Ok(checks)
}

/// Weight on `big` with value 1 on the cones whose labels form a maximal cone of `sub`.
fn transported_fundamental(big: &Fan, sub: &Fan) -> Result<MinkowskiWeight> {
    let values = sub
        .maximal_cones()
        .map(|c| {
            let rays: Vec<u32> = sub
                .cone(c)
                .iter()
                .map(|&r| big.ray_of(sub.ray_label(r)).ok_or(Error::NotASubfan))
                .collect::<Result<_>>()?;
            let id = big.cone_id(&rays).ok_or(Error::NotASubfan)?;
            Ok((id, sub.weight(c).clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MinkowskiWeight::new(big, sub.top_dim(), values))
}

fn weight_difference(fan: &Fan, a: &MinkowskiWeight, b: &MinkowskiWeight) -> Option<String> {
    let keys: BTreeSet<ConeId> = a.values().keys().chain(b.values().keys()).copied().collect();
    keys.into_iter()
        .find(|&k| a.value(k) != b.value(k))
        .map(|k| format!("{}: {} vs {}", cone_label(fan, k), a.value(k), b.value(k)))
}

/// `γ̄ ∩ [Σ_{N,M}] = [Σ_{N,TM}]` (or `0` in rank one), and the recursion
/// `Π_{j≤r}(γ̄ − v_j^-) ∩ [Σ_{N,M}] = Π_{j<r}(γ̄ − v_j^-) ∩ [Σ_{N,TM}]`.
/// With `ambient`, the first identity is recomputed inside the bipermutohedral fan.
pub fn verify_truncation(m: &Matroid, ambient: bool) -> Result<Vec<Check>> {
    m.require_loopless()?;
    let r = m.rank();
    let fan = projective_bundle(m)?;
    let gb = gamma_bar(&fan, 1)?;
    let cap = cap_product(&fan, &fan.fundamental_weight(), &gb)?;
    let mut checks = Vec::new();
    let truncated = if r > 1 { Some(projective_bundle(&m.truncate()?)?) } else { None };
    let expected = match &truncated {
        Some(t) => transported_fundamental(&fan, t)?,
        None => MinkowskiWeight::new(&fan, fan.top_dim().saturating_sub(1), []),
    };
    checks.push(Check::from_witness("gamma-bar-cap", weight_difference(&fan, &cap, &expected)));

    if ambient {
        let big = bipermutohedral(m.ground_size())?;
        let gb_big = gamma_bar(&big, 1)?;
        let cap_big = cap_product(&big, &transported_fundamental(&big, &fan)?, &gb_big)?;
        let expected_big = match &truncated {
            Some(t) => transported_fundamental(&big, t)?,
            None => MinkowskiWeight::new(&big, fan.top_dim().saturating_sub(1), []),
        };
        checks.push(Check::from_witness("gamma-bar-cap-ambient", weight_difference(&big, &cap_big, &expected_big)));
    }

    let mut lhs = fan.fundamental_weight();
    for j in 1..=r {
        lhs = cap_product(&fan, &lhs, &gb.sub(&v_minus(&fan, m, j)?))?;
    }
    let rec = match &truncated {
        Some(t) => {
            let t_m = m.truncate()?;
            let gbt = gamma_bar(t, 1)?;
            let mut w = t.fundamental_weight();
            for j in 1..r {
                w = cap_product(t, &w, &gbt.sub(&v_minus(t, &t_m, j)?))?;
            }
            let values = w.values().iter().map(|(&c, v)| {
                let rays: Vec<u32> = t.cone(c).iter().map(|&r| fan.ray_of(t.ray_label(r)).expect("subfan")).collect();
                (fan.cone_id(&rays).expect("subfan"), v.clone())
            });
            MinkowskiWeight::new(&fan, w.dim(), values.collect::<Vec<_>>())
        }
        None => MinkowskiWeight::new(&fan, lhs.dim(), []),
    };
    checks.push(Check::from_witness("truncation-recursion", weight_difference(&fan, &lhs, &rec)));
    checks.push(Check::from_witness("top-product-vanishes", (!lhs.is_zero()).then(|| "nonzero weight".to_string())));
    Ok(checks)
}

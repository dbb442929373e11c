//! Chow classes as sparse sums of square-free cone monomials.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::fan::{ConeId, Fan, FanKind, RayId, RayLabel};
use crate::linalg::{Matrix, RowBasis, SparseVec};
use crate::rational::{int, Rational};

/// A homogeneous class `Σ c_σ x_σ` with `σ` ranging over cones of one size.
#[derive(Clone, PartialEq, Eq)]
pub struct ChowElement {
    fan: usize,
    degree: usize,
    terms: BTreeMap<ConeId, Rational>,
}

impl fmt::Debug for ChowElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChowElement(deg {}, {:?})", self.degree, self.terms)
    }
}

impl ChowElement {
    pub fn zero(fan: &Fan, degree: usize) -> Self {
        ChowElement { fan: fan.id(), degree, terms: BTreeMap::new() }
    }

    pub fn unit(fan: &Fan) -> Self {
        ChowElement::cone(fan, fan.empty_cone(), Rational::one())
    }

    pub fn cone(fan: &Fan, id: ConeId, coef: Rational) -> Self {
        let mut e = ChowElement::zero(fan, fan.cone(id).len());
        e.accumulate(id, coef);
        e
    }

    /// The monomial `c · Π x_ρ`; zero when the rays do not span a cone.
    pub fn monomial(fan: &Fan, rays: &[RayId], coef: Rational) -> Self {
        match fan.cone_id(rays) {
            Some(id) if fan.cone(id).len() == rays.len() => ChowElement::cone(fan, id, coef),
            _ => ChowElement::zero(fan, rays.len()),
        }
    }

    pub fn fan_id(&self) -> usize {
        self.fan
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<ConeId, Rational> {
        &self.terms
    }

    /// True when the sparse representative is empty (stronger than being zero in the ring).
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate(&mut self, id: ConeId, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(id) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn compatible(&self, other: &ChowElement) -> Result<()> {
        if self.fan != other.fan {
            return Err(Error::FanMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        Ok(())
    }

    pub fn add(&self, other: &ChowElement) -> Result<ChowElement> {
        self.axpy(&Rational::one(), other)
    }

    pub fn sub(&self, other: &ChowElement) -> Result<ChowElement> {
        self.axpy(&-Rational::one(), other)
    }

    /// `self + c · other`.
    pub fn axpy(&self, c: &Rational, other: &ChowElement) -> Result<ChowElement> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (&id, v) in &other.terms {
            out.accumulate(id, c * v);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> ChowElement {
        let mut out = ChowElement { fan: self.fan, degree: self.degree, terms: BTreeMap::new() };
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(&k, v)| (k, v * c)).collect();
        }
        out
    }

    pub fn neg(&self) -> ChowElement {
        self.scale(&-Rational::one())
    }
}

/// A degree-one class `Σ a_ρ x_ρ`, stored as its ray coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct DivisorClass {
    fan: usize,
    coeffs: Vec<Rational>,
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DivisorClass(")?;
        for (i, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            write!(f, " {i}:{c}")?;
        }
        write!(f, " )")
    }
}

impl DivisorClass {
    pub fn zero(fan: &Fan) -> Self {
        DivisorClass { fan: fan.id(), coeffs: alloc::vec![Rational::zero(); fan.num_rays()] }
    }

    pub fn from_coeffs(fan: &Fan, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != fan.num_rays() {
            return Err(Error::DimensionMismatch { expected: fan.num_rays(), found: coeffs.len() });
        }
        Ok(DivisorClass { fan: fan.id(), coeffs })
    }

    /// Coefficients given as a function of the ray labels.
    pub fn from_labels(fan: &Fan, f: impl Fn(RayLabel) -> Rational) -> Self {
        DivisorClass { fan: fan.id(), coeffs: fan.labels().iter().map(|&l| f(l)).collect() }
    }

    pub fn indicator(fan: &Fan, r: RayId) -> Self {
        let mut d = DivisorClass::zero(fan);
        d.coeffs[r as usize] = Rational::one();
        d
    }

    pub fn fan_id(&self) -> usize {
        self.fan
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, r: RayId) -> &Rational {
        &self.coeffs[r as usize]
    }

    pub fn is_zero_vector(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn zip_with(&self, other: &DivisorClass, f: impl Fn(&Rational, &Rational) -> Rational) -> DivisorClass {
        assert_eq!(self.fan, other.fan, "divisors on different fans");
        DivisorClass { fan: self.fan, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DivisorClass) -> DivisorClass {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> DivisorClass {
        DivisorClass { fan: self.fan, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn neg(&self) -> DivisorClass {
        self.scale(&-Rational::one())
    }

    /// The degree-one element `Σ a_ρ x_ρ`.
    pub fn to_element(&self, fan: &Fan) -> ChowElement {
        let mut e = ChowElement::zero(fan, 1);
        for (r, a) in self.coeffs.iter().enumerate() {
            if let Some(id) = fan.cone_id(&[r as RayId]) {
                e.accumulate(id, a.clone());
            }
        }
        e
    }
}

/// A rational function on the cones of one size.
#[derive(Clone, PartialEq, Eq)]
pub struct MinkowskiWeight {
    fan: usize,
    dim: usize,
    values: BTreeMap<ConeId, Rational>,
}

impl fmt::Debug for MinkowskiWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MinkowskiWeight(dim {}, {:?})", self.dim, self.values)
    }
}

impl MinkowskiWeight {
    pub fn new(fan: &Fan, dim: usize, values: impl IntoIterator<Item = (ConeId, Rational)>) -> Self {
        let values = values
            .into_iter()
            .filter(|(c, v)| {
                assert_eq!(fan.cone(*c).len(), dim, "cone of the wrong size");
                !v.is_zero()
            })
            .collect();
        MinkowskiWeight { fan: fan.id(), dim, values }
    }

    pub fn fan_id(&self) -> usize {
        self.fan
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &BTreeMap<ConeId, Rational> {
        &self.values
    }

    pub fn value(&self, c: ConeId) -> Rational {
        self.values.get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_fan(fan: &Fan, id: usize) -> Result<()> {
    if fan.id() == id {
        Ok(())
    } else {
        Err(Error::FanMismatch)
    }
}

pub fn unit_class(fan: &Fan) -> ChowElement {
    ChowElement::unit(fan)
}

/// The divisor `Σ m(u_ρ) x_ρ` of a global linear functional; zero in the ring.
pub fn linear_relation_class(fan: &Fan, m: &[Rational]) -> Result<DivisorClass> {
    if m.len() != fan.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: fan.ambient_dim(), found: m.len() });
    }
    let on_lineality = |v: &Vec<i64>| -> Rational {
        v.iter().zip(m).map(|(&a, x)| x * int(a)).sum()
    };
    if fan.lineality().iter().any(|v| !on_lineality(v).is_zero()) {
        return Err(Error::NonzeroOnLineality);
    }
    let coeffs = (0..fan.num_rays()).map(|r| fan.evaluate(m, r as RayId)).collect();
    DivisorClass::from_coeffs(fan, coeffs)
}

/// Multiplies by a divisor term by term: for `x_σ`, pick the linear function
/// `m` agreeing with `D` on the rays of `σ` and vanishing on the lineality, and
/// emit `Σ (a_ρ' − m(u_ρ')) x_{σ∪ρ'}` over the extensions `ρ'` of `σ`.
pub fn multiply_by_divisor(fan: &Fan, e: &ChowElement, d: &DivisorClass) -> Result<ChowElement> {
    check_fan(fan, e.fan)?;
    check_fan(fan, d.fan)?;
    let mut out = ChowElement::zero(fan, e.degree + 1);
    for (&sigma, c) in &e.terms {
        let rays = fan.cone(sigma);
        let local: Vec<&Rational> = rays.iter().map(|&r| d.coeff(r)).collect();
        let frame = local.iter().any(|a| !a.is_zero()).then(|| fan.frame(sigma));
        for (j, &(rho, tau)) in fan.extensions(sigma).iter().enumerate() {
            let mut coef = d.coeff(rho).clone();
            if let Some(fr) = frame {
                for (a, t) in local.iter().zip(&fr.rows[j]) {
                    if !a.is_zero() && !t.is_zero() {
                        coef -= *a * t;
                    }
                }
            }
            if !coef.is_zero() {
                out.accumulate(tau, c * coef);
            }
        }
    }
    Ok(out)
}

/// Same product, but each per-cone functional is shifted by a pseudo-random
/// element of the annihilator of that cone. Used to test that the choice of
/// representative never affects pairings.
pub fn multiply_by_divisor_shifted(fan: &Fan, e: &ChowElement, d: &DivisorClass, seed: u64) -> Result<ChowElement> {
    check_fan(fan, e.fan)?;
    check_fan(fan, d.fan)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ChowElement::zero(fan, e.degree + 1);
    for (&sigma, c) in &e.terms {
        let rays = fan.cone(sigma);
        let duals = fan.dual_functionals(sigma);
        let mut m = alloc::vec![Rational::zero(); fan.ambient_dim()];
        for (&r, dual) in rays.iter().zip(&duals) {
            for (x, y) in m.iter_mut().zip(dual) {
                *x += d.coeff(r) * y;
            }
        }
        for k in fan.annihilator(sigma) {
            let t = int((rng.next_u32() % 7) as i64 - 3);
            for (x, y) in m.iter_mut().zip(&k) {
                *x += &t * y;
            }
        }
        for &(rho, tau) in fan.extensions(sigma) {
            let coef = d.coeff(rho) - fan.evaluate(&m, rho);
            out.accumulate(tau, c * coef);
        }
    }
    Ok(out)
}

/// Multiplication by `x_ρ`.
pub fn multiply_by_ray(fan: &Fan, e: &ChowElement, r: RayId) -> ChowElement {
    let mut out = ChowElement::zero(fan, e.degree + 1);
    for (&sigma, c) in &e.terms {
        let rays = fan.cone(sigma);
        match rays.binary_search(&r) {
            Err(_) => {
                if let Some(tau) = fan.extend(sigma, r) {
                    out.accumulate(tau, c.clone());
                }
            }
            Ok(i) => {
                let fr = fan.frame(sigma);
                for (j, &(_, tau)) in fan.extensions(sigma).iter().enumerate() {
                    let t = &fr.rows[j][i];
                    if !t.is_zero() {
                        out.accumulate(tau, -(c * t));
                    }
                }
            }
        }
    }
    out
}

/// Multiplies by the monomial `Π_{ρ ∈ rays} x_ρ`.
pub fn multiply_by_rays(fan: &Fan, e: &ChowElement, rays: &[RayId]) -> ChowElement {
    let mut acc = e.clone();
    for &r in rays {
        if acc.is_empty() {
            return ChowElement::zero(fan, e.degree + rays.len());
        }
        acc = multiply_by_ray(fan, &acc, r);
    }
    acc
}

/// General product of two classes.
pub fn multiply(fan: &Fan, a: &ChowElement, b: &ChowElement) -> Result<ChowElement> {
    check_fan(fan, a.fan)?;
    check_fan(fan, b.fan)?;
    let mut out = ChowElement::zero(fan, a.degree + b.degree);
    for (&tau, c) in &b.terms {
        let p = multiply_by_rays(fan, a, fan.cone(tau));
        out = out.axpy(c, &p)?;
    }
    Ok(out)
}

/// `D_1 ⋯ D_k`, evaluated left to right from the unit.
pub fn product_of_divisors(fan: &Fan, divisors: &[&DivisorClass]) -> Result<ChowElement> {
    let mut acc = unit_class(fan);
    for d in divisors {
        acc = multiply_by_divisor(fan, &acc, d)?;
    }
    Ok(acc)
}

pub fn degree(fan: &Fan, e: &ChowElement) -> Result<Rational> {
    check_fan(fan, e.fan)?;
    if e.degree != fan.top_dim() {
        return Err(Error::DegreeMismatch { expected: fan.top_dim(), found: e.degree });
    }
    Ok(e.terms.iter().map(|(&c, v)| v * fan.degree_factor(c)).sum())
}

/// `deg(e · x_τ)`.
pub fn pair(fan: &Fan, e: &ChowElement, tau: &[RayId]) -> Result<Rational> {
    check_fan(fan, e.fan)?;
    if e.degree + tau.len() != fan.top_dim() {
        return Err(Error::DegreeMismatch { expected: fan.top_dim() - tau.len().min(fan.top_dim()), found: e.degree });
    }
    let mut sorted = tau.to_vec();
    sorted.sort_unstable();
    degree(fan, &multiply_by_rays(fan, e, &sorted))
}

/// Depth-first walk over complementary cones, multiplying by one ray at a
/// time so that cones with a common prefix share their partial products.
/// Subtrees where the partial product vanishes are skipped. `visit` returns
/// `false` to stop the walk.
fn walk_pairings(
    fan: &Fan,
    e: &ChowElement,
    prefix: ConeId,
    remaining: usize,
    visit: &mut dyn FnMut(ConeId, Rational) -> bool,
) -> bool {
    if remaining == 0 {
        let d: Rational = e.terms.iter().map(|(&c, v)| v * fan.degree_factor(c)).sum();
        return visit(prefix, d);
    }
    let last = fan.cone(prefix).last().copied();
    let ext = fan.extensions(prefix);
    let start = last.map_or(0, |l| ext.partition_point(|x| x.0 <= l));
    for &(r, next) in &ext[start..] {
        let p = multiply_by_ray(fan, e, r);
        if p.is_empty() {
            continue;
        }
        if !walk_pairings(fan, &p, next, remaining - 1, visit) {
            return false;
        }
    }
    true
}

fn complement_depth(fan: &Fan, e: &ChowElement) -> Result<Option<usize>> {
    check_fan(fan, e.fan)?;
    Ok(fan.top_dim().checked_sub(e.degree))
}

/// Nonzero values of `τ ↦ deg(e · x_τ)` over complementary cones `τ`.
pub fn pairings(fan: &Fan, e: &ChowElement) -> Result<BTreeMap<ConeId, Rational>> {
    let mut out = BTreeMap::new();
    if let Some(depth) = complement_depth(fan, e)? {
        walk_pairings(fan, e, fan.empty_cone(), depth, &mut |tau, v| {
            if !v.is_zero() {
                out.insert(tau, v);
            }
            true
        });
    }
    Ok(out)
}

/// The Minkowski weight dual to `e`.
pub fn weight_of(fan: &Fan, e: &ChowElement) -> Result<MinkowskiWeight> {
    let values = pairings(fan, e)?;
    Ok(MinkowskiWeight::new(fan, fan.top_dim().saturating_sub(e.degree), values))
}

/// A complementary cone pairing nontrivially with `e`, if any.
pub fn first_nonzero_pairing(fan: &Fan, e: &ChowElement) -> Result<Option<(ConeId, Rational)>> {
    if !fan.kind().has_duality() {
        return Err(Error::UnsupportedFan);
    }
    let mut found = None;
    if let Some(depth) = complement_depth(fan, e)? {
        walk_pairings(fan, e, fan.empty_cone(), depth, &mut |tau, v| {
            if v.is_zero() {
                true
            } else {
                found = Some((tau, v));
                false
            }
        });
    }
    Ok(found)
}

/// Zero test by Poincaré duality: `e = 0` iff it pairs to zero with every complementary cone.
pub fn is_zero_class(fan: &Fan, e: &ChowElement) -> Result<bool> {
    Ok(first_nonzero_pairing(fan, e)?.is_none())
}

pub fn classes_equal(fan: &Fan, a: &ChowElement, b: &ChowElement) -> Result<bool> {
    is_zero_class(fan, &a.sub(b)?)
}

/// Cone monomials forming a basis of `A^k`, with their pairings against all
/// complementary cones.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    pub degree: usize,
    pub cones: Vec<ConeId>,
    pub complementary: Vec<ConeId>,
    /// One sparse row per basis cone, indexed by position in `complementary`.
    pub pairing: Vec<SparseVec>,
}

impl GradedBasis {
    pub fn dim(&self) -> usize {
        self.cones.len()
    }

    pub fn pairing_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.cones.len(), self.complementary.len());
        for (i, row) in self.pairing.iter().enumerate() {
            for (j, v) in row {
                m[(i, *j)] = v.clone();
            }
        }
        m
    }
}

fn pairing_row(fan: &Fan, id: ConeId, offset: ConeId) -> SparseVec {
    let e = ChowElement::cone(fan, id, Rational::one());
    pairings(fan, &e)
        .expect("same fan")
        .into_iter()
        .map(|(tau, v)| ((tau - offset) as usize, v))
        .collect()
}

/// Picks a maximal independent set of `k`-cone monomials by exact row reduction
/// of their pairings against the complementary cones.
pub fn graded_basis(fan: &Fan, k: usize) -> GradedBasis {
    let top = fan.top_dim();
    let complementary: Vec<ConeId> = if k <= top { fan.cones_of_size(top - k).collect() } else { Vec::new() };
    let offset = complementary.first().copied().unwrap_or(0);
    let mut basis = RowBasis::new();
    let mut cones = Vec::new();
    let mut pairing = Vec::new();
    if k <= top {
        for id in fan.cones_of_size(k) {
            if basis.rank() == complementary.len() {
                break;
            }
            let row = pairing_row(fan, id, offset);
            if basis.insert(&row) {
                cones.push(id);
                pairing.push(row);
            }
        }
    }
    GradedBasis { degree: k, cones, complementary, pairing }
}

pub fn graded_dimension(fan: &Fan, k: usize) -> usize {
    graded_basis(fan, k).dim()
}

/// Cap product `D ∩ w`: `(D∩w)(τ) = Σ_{σ ⊃ τ} (a_{σ∖τ} − m_τ(u_{σ∖τ})) w(σ)`.
pub fn cap_product(fan: &Fan, w: &MinkowskiWeight, d: &DivisorClass) -> Result<MinkowskiWeight> {
    check_fan(fan, w.fan)?;
    check_fan(fan, d.fan)?;
    if let Some(&bad) = fan.check_balanced(w)?.first() {
        return Err(Error::UnbalancedInput { cone: bad as usize });
    }
    if w.dim == 0 {
        return Ok(MinkowskiWeight { fan: fan.id(), dim: 0, values: BTreeMap::new() });
    }
    let mut out: BTreeMap<ConeId, Rational> = BTreeMap::new();
    for (&sigma, val) in &w.values {
        let rays = fan.cone(sigma);
        for i in 0..rays.len() {
            let mut face = rays.to_vec();
            let rho = face.remove(i);
            let tau = fan.cone_id(&face).expect("faces are cones");
            let ext = fan.extensions(tau);
            let j = ext.binary_search_by_key(&rho, |x| x.0).expect("sigma extends tau");
            let mut coef = d.coeff(rho).clone();
            let local: Vec<&Rational> = face.iter().map(|&r| d.coeff(r)).collect();
            if local.iter().any(|a| !a.is_zero()) {
                let fr = fan.frame(tau);
                for (a, t) in local.iter().zip(&fr.rows[j]) {
                    coef -= *a * t;
                }
            }
            if !coef.is_zero() {
                *out.entry(tau).or_insert_with(Rational::zero) += coef * val;
            }
        }
    }
    let result = MinkowskiWeight::new(fan, w.dim - 1, out);
    debug_assert!(fan.check_balanced(&result).map(|v| v.is_empty()).unwrap_or(false));
    Ok(result)
}

/// Transport of classes from a fan to one of its subfans (drop monomials not in the subfan).
pub struct Restriction<'a> {
    fan: &'a Fan,
    sub: &'a Fan,
    /// Ray of the subfan for each ray of the big fan, if any.
    ray_map: Vec<Option<RayId>>,
}

impl<'a> Restriction<'a> {
    pub fn new(fan: &'a Fan, sub: &'a Fan) -> Result<Self> {
        let emb = fan.embedding_of(sub)?;
        let mut ray_map = alloc::vec![None; fan.num_rays()];
        for (s, &f) in emb.iter().enumerate() {
            ray_map[f as usize] = Some(s as RayId);
        }
        Ok(Restriction { fan, sub, ray_map })
    }

    pub fn element(&self, e: &ChowElement) -> Result<ChowElement> {
        check_fan(self.fan, e.fan)?;
        let mut out = ChowElement::zero(self.sub, e.degree);
        'terms: for (&sigma, c) in &e.terms {
            let mut image = Vec::with_capacity(e.degree);
            for &r in self.fan.cone(sigma) {
                match self.ray_map[r as usize] {
                    Some(s) => image.push(s),
                    None => continue 'terms,
                }
            }
            if let Some(id) = self.sub.cone_id(&image) {
                out.accumulate(id, c.clone());
            }
        }
        Ok(out)
    }

    pub fn divisor(&self, d: &DivisorClass) -> Result<DivisorClass> {
        check_fan(self.fan, d.fan)?;
        let mut out = DivisorClass::zero(self.sub);
        for (r, s) in self.ray_map.iter().enumerate() {
            if let Some(s) = s {
                out.coeffs[*s as usize] = d.coeffs[r].clone();
            }
        }
        Ok(out)
    }
}

pub fn restrict_to_subfan(fan: &Fan, sub: &Fan, e: &ChowElement) -> Result<ChowElement> {
    Restriction::new(fan, sub)?.element(e)
}

fn permutohedral_n(fan: &Fan) -> Result<usize> {
    match fan.kind() {
        FanKind::Permutohedral { n } => Ok(n),
        _ => Err(Error::UnsupportedFan),
    }
}

/// Pullback along the first projection `Σ_{N,N} → Σ_N`: `b_{S|T} = a_S`, with `a_[N] = 0`.
/// The target may be any fan whose rays are bisubsets of `[N]`.
pub fn pullback_pi1(base: &Fan, target: &Fan, d: &DivisorClass) -> Result<DivisorClass> {
    let n = permutohedral_n(base)?;
    check_fan(base, d.fan)?;
    let full = crate::subset::Subset::full(n);
    let mut out = DivisorClass::zero(target);
    for (i, label) in target.labels().iter().enumerate() {
        let RayLabel::Bisubset(b) = *label else {
            return Err(Error::UnsupportedFan);
        };
        if b.s != full {
            let r = base.ray_of(RayLabel::Subset(b.s)).ok_or(Error::NotASubfan)?;
            out.coeffs[i] = d.coeff(r).clone();
        }
    }
    Ok(out)
}

/// Ring pullback of a class along the first projection, via `π^*x_S = Σ_T x_{S|T}`.
pub fn pullback_pi1_element(base: &Fan, target: &Fan, e: &ChowElement) -> Result<ChowElement> {
    check_fan(base, e.fan)?;
    let pulled: Vec<DivisorClass> = (0..base.num_rays())
        .map(|r| pullback_pi1(base, target, &DivisorClass::indicator(base, r as RayId)))
        .collect::<Result<_>>()?;
    let mut out = ChowElement::zero(target, e.degree);
    for (&sigma, c) in &e.terms {
        let factors: Vec<&DivisorClass> = base.cone(sigma).iter().map(|&r| &pulled[r as usize]).collect();
        out = out.axpy(c, &product_of_divisors(target, &factors)?)?;
    }
    Ok(out)
}

/// `a_S ↦ a_{S^c}` on the permutohedral fan (the action of `x ↦ -x`).
pub fn negation_relabel(fan: &Fan, d: &DivisorClass) -> Result<DivisorClass> {
    let n = permutohedral_n(fan)?;
    check_fan(fan, d.fan)?;
    let mut out = DivisorClass::zero(fan);
    for (i, label) in fan.labels().iter().enumerate() {
        let RayLabel::Subset(s) = *label else { unreachable!() };
        let r = fan.ray_of(RayLabel::Subset(s.complement(n))).expect("complement is a ray");
        out.coeffs[i] = d.coeff(r).clone();
    }
    Ok(out)
}

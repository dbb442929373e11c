//! Finite-dimensional graded algebra models, projective bundle rings over
//! them, twisting, Bloch–Gieseker rank checks and annihilator quotients.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::check::Check;
use crate::chow::{degree, multiply_by_ray, pair, ChowElement, DivisorClass};
use crate::error::{Error, Result};
use crate::fan::{ConeId, Fan, RayId};
use crate::linalg::{axpy, is_zero_vec, unit_vec, Matrix};
use crate::rational::{binomial, Rational};

/// A graded commutative algebra `A^0 ⊕ ⋯ ⊕ A^n` generated in degree one.
///
/// The degree-one basis doubles as the generating set: `gens[g][k]` is the
/// matrix of multiplication by the `g`-th basis vector of `A^1` from `A^k` to
/// `A^{k+1}`. Each basis vector of `A^k` is recorded as a word of `k` degree-one
/// vectors whose product it equals.
#[derive(Clone, Debug)]
pub struct GradedRingModel {
    top: usize,
    labels: Vec<Vec<String>>,
    gens: Vec<Vec<Matrix>>,
    words: Vec<Vec<Vec<Vec<Rational>>>>,
    degree: Vec<Rational>,
}

impl GradedRingModel {
    pub fn new(
        labels: Vec<Vec<String>>,
        gens: Vec<Vec<Matrix>>,
        words: Vec<Vec<Vec<Vec<Rational>>>>,
        degree: Vec<Rational>,
    ) -> Result<Self> {
        let top = labels.len().checked_sub(1).ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?;
        let dims: Vec<usize> = labels.iter().map(Vec::len).collect();
        let d1 = dims.get(1).copied().unwrap_or(0);
        let mismatch = |expected: usize, found: usize| Err(Error::DimensionMismatch { expected, found });
        if dims[0] != 1 {
            return mismatch(1, dims[0]);
        }
        if gens.len() != d1 {
            return mismatch(d1, gens.len());
        }
        for g in &gens {
            if g.len() != top {
                return mismatch(top, g.len());
            }
            for (k, m) in g.iter().enumerate() {
                if m.rows() != dims[k + 1] || m.cols() != dims[k] {
                    return mismatch(dims[k + 1], m.rows());
                }
            }
        }
        if words.len() != top + 1 {
            return mismatch(top + 1, words.len());
        }
        for (k, wk) in words.iter().enumerate() {
            if wk.len() != dims[k] {
                return mismatch(dims[k], wk.len());
            }
            if let Some(w) = wk.iter().find(|w| w.len() != k || w.iter().any(|v| v.len() != d1)) {
                return mismatch(k, w.len());
            }
        }
        if degree.len() != dims[top] {
            return mismatch(dims[top], degree.len());
        }
        Ok(GradedRingModel { top, labels, gens, words, degree })
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn dim(&self, k: usize) -> usize {
        self.labels.get(k).map_or(0, Vec::len)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn labels(&self, k: usize) -> &[String] {
        &self.labels[k]
    }

    pub fn degree_functional(&self) -> &[Rational] {
        &self.degree
    }

    pub fn unit(&self) -> Vec<Rational> {
        vec![Rational::one()]
    }

    pub fn zero(&self, k: usize) -> Vec<Rational> {
        vec![Rational::zero(); self.dim(k)]
    }

    pub fn basis_vector(&self, k: usize, b: usize) -> Vec<Rational> {
        unit_vec(self.dim(k), b)
    }

    /// Matrix of multiplication by `v ∈ A^1` from `A^k` to `A^{k+1}`.
    pub fn lmul_matrix(&self, v: &[Rational], k: usize) -> Matrix {
        let mut m = Matrix::zeros(self.dim(k + 1), self.dim(k));
        if k < self.top {
            for (g, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    m.add_scaled(&self.gens[g][k], c);
                }
            }
        }
        m
    }

    /// `v · x` for `v ∈ A^1`, `x ∈ A^k`.
    pub fn mul_degree1(&self, v: &[Rational], x: &[Rational], k: usize) -> Vec<Rational> {
        let mut out = self.zero(k + 1);
        if k >= self.top || is_zero_vec(x) {
            return out;
        }
        for (g, c) in v.iter().enumerate() {
            if !c.is_zero() {
                axpy(&mut out, c, &self.gens[g][k].mul_vec(x));
            }
        }
        out
    }

    /// `x · y` for `x ∈ A^j`, `y ∈ A^k`.
    pub fn mul(&self, x: &[Rational], j: usize, y: &[Rational], k: usize) -> Vec<Rational> {
        let mut out = self.zero(j + k);
        if j + k > self.top {
            return out;
        }
        for (b, c) in y.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut acc = x.to_vec();
            for (step, v) in self.words[k][b].iter().enumerate() {
                acc = self.mul_degree1(v, &acc, j + step);
            }
            axpy(&mut out, c, &acc);
        }
        out
    }

    /// Matrix of multiplication by `y ∈ A^d` from `A^k` to `A^{k+d}`.
    pub fn mul_matrix(&self, y: &[Rational], d: usize, k: usize) -> Matrix {
        let cols: Vec<Vec<Rational>> =
            (0..self.dim(k)).map(|a| self.mul(&self.basis_vector(k, a), k, y, d)).collect();
        Matrix::from_columns(self.dim(k + d), &cols)
    }

    /// `v^m` for `v ∈ A^1`.
    pub fn power(&self, v: &[Rational], m: usize) -> Vec<Rational> {
        let mut acc = self.unit();
        for k in 0..m {
            acc = self.mul_degree1(v, &acc, k);
        }
        acc
    }

    /// Matrix of multiplication by `v^m` from `A^k` to `A^{k+m}`.
    pub fn power_matrix(&self, v: &[Rational], m: usize, k: usize) -> Matrix {
        let mut acc = Matrix::identity(self.dim(k));
        for step in 0..m {
            acc = self.lmul_matrix(v, k + step).mul(&acc);
        }
        acc
    }

    pub fn deg(&self, x: &[Rational]) -> Rational {
        x.iter().zip(&self.degree).map(|(a, b)| a * b).sum()
    }

    /// `G[a][b] = deg(e_a · e_b)` for bases of `A^i` and `A^{n−i}`.
    pub fn gram(&self, i: usize) -> Matrix {
        let j = self.top - i;
        let mut g = Matrix::zeros(self.dim(i), self.dim(j));
        for a in 0..self.dim(i) {
            let ea = self.basis_vector(i, a);
            for b in 0..self.dim(j) {
                g[(a, b)] = self.deg(&self.mul(&ea, i, &self.basis_vector(j, b), j));
            }
        }
        g
    }

    /// Degree-one factors whose product is the `b`-th basis vector of `A^k`.
    pub fn word(&self, k: usize, b: usize) -> &[Vec<Rational>] {
        &self.words[k][b]
    }
}

/// A model built from a fan, remembering which cones carry its basis.
#[derive(Clone, Debug)]
pub struct FanRingModel {
    pub model: GradedRingModel,
    fan: usize,
    basis: Vec<Vec<ConeId>>,
    /// `(G_k^T)^{-1}` for each degree.
    solve: Vec<Matrix>,
}

impl FanRingModel {
    pub fn basis_cones(&self, k: usize) -> &[ConeId] {
        &self.basis[k]
    }

    /// Coordinates of `e` by pairing with the complementary basis.
    pub fn coords(&self, fan: &Fan, e: &ChowElement) -> Result<Vec<Rational>> {
        if fan.id() != self.fan || e.fan_id() != self.fan {
            return Err(Error::FanMismatch);
        }
        let k = e.degree();
        if k > self.model.top() {
            return Ok(Vec::new());
        }
        let p: Vec<Rational> = self.basis[self.model.top() - k]
            .iter()
            .map(|&c| pair(fan, e, fan.cone(c)))
            .collect::<Result<_>>()?;
        Ok(self.solve[k].mul_vec(&p))
    }

    pub fn divisor_coords(&self, fan: &Fan, d: &DivisorClass) -> Result<Vec<Rational>> {
        self.coords(fan, &d.to_element(fan))
    }

    pub fn ray_coords(&self, fan: &Fan, r: RayId) -> Result<Vec<Rational>> {
        self.divisor_coords(fan, &DivisorClass::indicator(fan, r))
    }
}

fn cone_name(fan: &Fan, c: ConeId) -> String {
    let rays = fan.cone(c);
    if rays.is_empty() {
        return String::from("1");
    }
    let mut s = String::new();
    for (i, &r) in rays.iter().enumerate() {
        if i > 0 {
            s.push('*');
        }
        s.push_str(&format!("x{}", fan.ray_label(r)));
    }
    s
}

/// Packages the cone bases of a fan with Poincaré duality into a ring model.
pub fn ring_model_from_fan(fan: &Fan) -> Result<FanRingModel> {
    if !fan.kind().has_duality() {
        return Err(Error::UnsupportedFan);
    }
    let top = fan.top_dim();
    let bases: Vec<_> = (0..=top).map(|k| crate::chow::graded_basis(fan, k)).collect();
    let mut solve = Vec::new();
    for k in 0..=top {
        let dual = &bases[top - k];
        if bases[k].dim() != dual.dim() {
            return Err(Error::SingularGram { degree: k });
        }
        let offset = bases[k].complementary.first().copied().unwrap_or(0);
        let mut g = Matrix::zeros(bases[k].dim(), dual.dim());
        for (a, row) in bases[k].pairing.iter().enumerate() {
            for (pos, &c) in dual.cones.iter().enumerate() {
                let idx = (c - offset) as usize;
                if let Ok(hit) = row.binary_search_by_key(&idx, |x| x.0) {
                    g[(a, pos)] = row[hit].1.clone();
                }
            }
        }
        solve.push(g.transpose().inverse().ok_or(Error::SingularGram { degree: k })?);
    }
    let basis: Vec<Vec<ConeId>> = bases.iter().map(|b| b.cones.clone()).collect();
    let labels: Vec<Vec<String>> = basis.iter().map(|cs| cs.iter().map(|&c| cone_name(fan, c)).collect()).collect();

    let mut partial = FanRingModel {
        model: GradedRingModel { top, labels: labels.clone(), gens: Vec::new(), words: Vec::new(), degree: Vec::new() },
        fan: fan.id(),
        basis: basis.clone(),
        solve,
    };
    let gen_rays: Vec<RayId> = basis.get(1).map_or(Vec::new(), |b| b.iter().map(|&c| fan.cone(c)[0]).collect());
    let mut gens = Vec::new();
    for &r in &gen_rays {
        let mut per_degree = Vec::new();
        for k in 0..top {
            let cols: Vec<Vec<Rational>> = basis[k]
                .iter()
                .map(|&c| partial.coords(fan, &multiply_by_ray(fan, &ChowElement::cone(fan, c, Rational::one()), r)))
                .collect::<Result<_>>()?;
            per_degree.push(Matrix::from_columns(basis[k + 1].len(), &cols));
        }
        gens.push(per_degree);
    }
    let mut ray_cache: alloc::collections::BTreeMap<RayId, Vec<Rational>> = alloc::collections::BTreeMap::new();
    let mut words = Vec::new();
    for cones in &basis {
        let mut wk = Vec::new();
        for &c in cones {
            let mut w = Vec::new();
            for &r in fan.cone(c) {
                if let alloc::collections::btree_map::Entry::Vacant(e) = ray_cache.entry(r) {
                    e.insert(partial.ray_coords(fan, r)?);
                }
                w.push(ray_cache[&r].clone());
            }
            wk.push(w);
        }
        words.push(wk);
    }
    let deg: Vec<Rational> = basis[top]
        .iter()
        .map(|&c| degree(fan, &ChowElement::cone(fan, c, Rational::one())))
        .collect::<Result<_>>()?;
    partial.model = GradedRingModel::new(labels, gens, words, deg)?;
    Ok(partial)
}

/// `c_0, …, c_r` given as coordinate vectors in `A^0, …, A^r`.
pub type ChernData = Vec<Vec<Rational>>;

fn check_chern(base: &GradedRingModel, c: &[Vec<Rational>]) -> Result<()> {
    if c.len() < 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: c.len() });
    }
    for (i, ci) in c.iter().enumerate() {
        if ci.len() != base.dim(i) {
            return Err(Error::DegreeMismatch { expected: i, found: ci.len() });
        }
    }
    if c[0] != base.unit() {
        return Err(Error::DegreeMismatch { expected: 0, found: 0 });
    }
    Ok(())
}

/// `B = A[ζ]/(ζ^r + c_1 ζ^{r−1} + ⋯ + c_r)` with basis blocks `ζ^i ⊗ A^{k−i}`, `i < r`.
#[derive(Clone, Debug)]
pub struct BundleRing {
    base: GradedRingModel,
    c: ChernData,
    model: GradedRingModel,
}

impl BundleRing {
    pub fn new(base: GradedRingModel, c: ChernData) -> Result<Self> {
        check_chern(&base, &c)?;
        let r = c.len() - 1;
        let n = base.top();
        let top = n + r - 1;
        let mut labels = Vec::new();
        for k in 0..=top {
            let mut lk = Vec::new();
            for i in block_range(k, n, r) {
                for l in base.labels(k - i) {
                    lk.push(match i {
                        0 => l.clone(),
                        1 => format!("z*{l}"),
                        _ => format!("z^{i}*{l}"),
                    });
                }
            }
            labels.push(lk);
        }
        let mut ring = BundleRing {
            base,
            c,
            model: GradedRingModel { top, labels, gens: Vec::new(), words: Vec::new(), degree: Vec::new() },
        };
        let d1 = ring.model.dim(1);
        let a1 = ring.base.dim(1);
        let mut gens = Vec::new();
        for g in 0..d1 {
            let per: Vec<Matrix> = (0..top)
                .map(|k| {
                    let cols: Vec<Vec<Rational>> = (0..ring.model.dim(k))
                        .map(|b| {
                            let x = ring.model.basis_vector(k, b);
                            if g < a1 {
                                ring.pullback_mul(&unit_vec(a1, g), &x, k)
                            } else {
                                ring.zeta_mul(&x, k)
                            }
                        })
                        .collect();
                    Matrix::from_columns(ring.model.dim(k + 1), &cols)
                })
                .collect();
            gens.push(per);
        }
        let zeta = ring.zeta();
        let mut words = Vec::new();
        for k in 0..=top {
            let mut wk = Vec::new();
            for i in block_range(k, n, r) {
                for b in 0..ring.base.dim(k - i) {
                    let mut w = vec![zeta.clone(); i];
                    w.extend(ring.base.word(k - i, b).iter().map(|v| ring.lift_degree1(v)));
                    wk.push(w);
                }
            }
            words.push(wk);
        }
        let degree = ring.base.degree_functional().to_vec();
        ring.model = GradedRingModel::new(ring.model.labels.clone(), gens, words, degree)?;
        Ok(ring)
    }

    pub fn base(&self) -> &GradedRingModel {
        &self.base
    }

    pub fn model(&self) -> &GradedRingModel {
        &self.model
    }

    pub fn rank(&self) -> usize {
        self.c.len() - 1
    }

    pub fn chern(&self) -> &[Vec<Rational>] {
        &self.c
    }

    fn block_offset(&self, k: usize, i: usize) -> Option<usize> {
        let n = self.base.top();
        let r = self.rank();
        let range = block_range(k, n, r);
        if !range.contains(&i) {
            return None;
        }
        Some((range.start..i).map(|j| self.base.dim(k - j)).sum())
    }

    /// The `ζ^i` block of `x ∈ B^k`, an element of `A^{k−i}`.
    pub fn block(&self, x: &[Rational], k: usize, i: usize) -> Vec<Rational> {
        match self.block_offset(k, i) {
            Some(o) => x[o..o + self.base.dim(k - i)].to_vec(),
            None => Vec::new(),
        }
    }

    fn set_block(&self, out: &mut [Rational], k: usize, i: usize, c: &Rational, a: &[Rational]) {
        if let Some(o) = self.block_offset(k, i) {
            axpy(&mut out[o..o + a.len()], c, a);
        }
    }

    /// `ζ^i ⊗ a` for `a ∈ A^j`.
    pub fn monomial(&self, i: usize, a: &[Rational], j: usize) -> Vec<Rational> {
        let mut out = self.model.zero(i + j);
        if i < self.rank() {
            self.set_block(&mut out, i + j, i, &Rational::one(), a);
        } else {
            let mut x = self.pullback(a, j);
            for step in 0..i {
                x = self.zeta_mul(&x, j + step);
            }
            out = x;
        }
        out
    }

    pub fn pullback(&self, a: &[Rational], k: usize) -> Vec<Rational> {
        let mut out = self.model.zero(k);
        self.set_block(&mut out, k, 0, &Rational::one(), a);
        out
    }

    /// `π_*`: the `ζ^{r−1}` block, in `A^{k−r+1}`.
    pub fn pushforward(&self, x: &[Rational], k: usize) -> Result<Vec<Rational>> {
        let r = self.rank();
        if k + 1 < r {
            return Err(Error::DegreeTooLow { degree: k, min: r - 1 });
        }
        if k - (r - 1) > self.base.top() {
            return Ok(Vec::new());
        }
        Ok(self.block(x, k, r - 1))
    }

    /// Coordinates in `B^1` of `π^* v` for `v ∈ A^1`.
    pub fn lift_degree1(&self, v: &[Rational]) -> Vec<Rational> {
        self.pullback(v, 1)
    }

    /// Coordinates of `ζ` in `B^1`.
    pub fn zeta(&self) -> Vec<Rational> {
        self.zeta_mul(&self.model.unit(), 0)
    }

    fn pullback_mul(&self, v: &[Rational], x: &[Rational], k: usize) -> Vec<Rational> {
        let mut out = self.model.zero(k + 1);
        for i in block_range(k, self.base.top(), self.rank()) {
            let a = self.block(x, k, i);
            let prod = self.base.mul_degree1(v, &a, k - i);
            self.set_block(&mut out, k + 1, i, &Rational::one(), &prod);
        }
        out
    }

    /// `ζ · x`, reducing `ζ^r = −Σ c_j ζ^{r−j}`.
    pub fn zeta_mul(&self, x: &[Rational], k: usize) -> Vec<Rational> {
        let r = self.rank();
        let mut out = self.model.zero(k + 1);
        for i in block_range(k, self.base.top(), r) {
            let a = self.block(x, k, i);
            if is_zero_vec(&a) {
                continue;
            }
            let ad = k - i;
            if i + 1 < r {
                self.set_block(&mut out, k + 1, i + 1, &Rational::one(), &a);
            } else {
                for j in 1..=r {
                    if ad + j > self.base.top() {
                        break;
                    }
                    let prod = self.base.mul(&self.c[j], j, &a, ad);
                    self.set_block(&mut out, k + 1, r - j, &-Rational::one(), &prod);
                }
            }
        }
        out
    }
}

fn block_range(k: usize, n: usize, r: usize) -> core::ops::Range<usize> {
    k.saturating_sub(n)..r.min(k + 1)
}

/// Iterated bundle rings `A[ζ_1, …, ζ_k]`, each Chern list pulled back to the previous stage.
#[derive(Clone, Debug)]
pub struct MultiBundle {
    stages: Vec<BundleRing>,
    base: GradedRingModel,
}

impl MultiBundle {
    pub fn new(base: GradedRingModel, chern: &[ChernData]) -> Result<Self> {
        let mut stages: Vec<BundleRing> = Vec::new();
        for c in chern {
            check_chern(&base, c)?;
            let lifted: ChernData = c
                .iter()
                .enumerate()
                .map(|(i, ci)| stages.iter().fold(ci.clone(), |x, s| s.pullback(&x, i)))
                .collect();
            let current = stages.last().map_or_else(|| base.clone(), |s| s.model().clone());
            stages.push(BundleRing::new(current, lifted)?);
        }
        Ok(MultiBundle { stages, base })
    }

    pub fn model(&self) -> &GradedRingModel {
        self.stages.last().map_or(&self.base, |s| s.model())
    }

    pub fn stages(&self) -> &[BundleRing] {
        &self.stages
    }

    /// Pulls an element of stage `from` (0 = base) up to the final ring.
    pub fn pullback_from(&self, from: usize, x: &[Rational], k: usize) -> Vec<Rational> {
        self.stages[from..].iter().fold(x.to_vec(), |acc, s| s.pullback(&acc, k))
    }

    /// `ζ_j` (1-based) in the final ring.
    pub fn zeta(&self, j: usize) -> Vec<Rational> {
        self.pullback_from(j, &self.stages[j - 1].zeta(), 1)
    }
}

/// `[s_0, …, s_n]` from `(1 + c_1 + ⋯)(1 + s_1 + ⋯) = 1` in the model.
pub fn segre(base: &GradedRingModel, c: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut s = vec![base.unit()];
    for i in 1..=base.top() {
        let mut acc = base.zero(i);
        for j in 1..=i.min(c.len() - 1) {
            axpy(&mut acc, &-Rational::one(), &base.mul(&c[j], j, &s[i - j], i - j));
        }
        s.push(acc);
    }
    s
}

/// `c_i' = Σ_{j=0}^{i} (−1)^j C(r−i+j, j) c_{i−j} (λδ)^j`.
pub fn twist(base: &GradedRingModel, c: &[Vec<Rational>], delta: &[Rational], lambda: &Rational) -> ChernData {
    let r = c.len() - 1;
    let ld: Vec<Rational> = delta.iter().map(|x| x * lambda).collect();
    let powers: Vec<Vec<Rational>> = (0..=r).map(|j| base.power(&ld, j)).collect();
    (0..=r)
        .map(|i| {
            let mut acc = base.zero(i);
            for j in 0..=i {
                let sign = if j % 2 == 0 { Rational::one() } else { -Rational::one() };
                let coef = sign * binomial(r - i + j, j);
                if i <= base.top() {
                    axpy(&mut acc, &coef, &base.mul(&c[i - j], i - j, &powers[j], j));
                }
            }
            acc
        })
        .collect()
}

/// `ζ ↦ ζ + λδ` maps `B(c')` isomorphically onto `B(c)`: the defining relation
/// holds for the image of `ζ`, and all pairing tables agree.
pub fn verify_twist(base: &GradedRingModel, c: &ChernData, delta: &[Rational], lambda: &Rational) -> Result<Vec<Check>> {
    let twisted = twist(base, c, delta, lambda);
    let b = BundleRing::new(base.clone(), c.clone())?;
    let bt = BundleRing::new(base.clone(), twisted.clone())?;
    let r = b.rank();
    let m = b.model();
    let mut zt = b.zeta();
    axpy(&mut zt, lambda, &b.lift_degree1(delta));

    let mut rel = m.power(&zt, r);
    for i in 1..=r {
        if i <= base.top() {
            let ci = b.pullback(&twisted[i], i);
            axpy(&mut rel, &Rational::one(), &m.mul(&ci, i, &m.power(&zt, r - i), r - i));
        }
    }
    let mut checks = vec![Check::from_witness(
        "twist-relation",
        (!is_zero_vec(&rel)).then(|| String::from("relation does not vanish on the image of zeta")),
    )];

    let image = |k: usize| -> Matrix {
        let cols: Vec<Vec<Rational>> = (0..bt.model().dim(k))
            .map(|col| {
                let (i, a, j) = locate(&bt, k, col);
                m.mul(&m.power(&zt, i), i, &b.pullback(&a, j), j)
            })
            .collect();
        Matrix::from_columns(m.dim(k), &cols)
    };
    let top = m.top();
    let images: Vec<Matrix> = (0..=top).map(image).collect();
    let bad_iso = (0..=top).find(|&k| images[k].rank() != m.dim(k));
    checks.push(Check::from_witness("twist-isomorphism", bad_iso.map(|k| format!("degree {k}"))));
    let bad_pair = (0..=top).find(|&k| images[k].transpose().mul(&m.gram(k)).mul(&images[top - k]) != bt.model().gram(k));
    checks.push(Check::from_witness("twist-pairings", bad_pair.map(|k| format!("degree {k}"))));
    Ok(checks)
}

/// Basis position `col` of `B^k` as `(i, a, k − i)` with `a` a basis vector of `A^{k−i}`.
fn locate(b: &BundleRing, k: usize, col: usize) -> (usize, Vec<Rational>, usize) {
    let mut rest = col;
    for i in block_range(k, b.base().top(), b.rank()) {
        let d = b.base().dim(k - i);
        if rest < d {
            return (i, b.base().basis_vector(k - i, rest), k - i);
        }
        rest -= d;
    }
    unreachable!("column within B^k")
}

/// Bloch–Gieseker data for one Chern list: the hypothesis and, when it holds,
/// the rank conclusion for `c_d`, `d = min(r, n)`.
#[derive(Clone, Debug)]
pub struct BlochGiesekerStage {
    pub lambda: Rational,
    pub hypothesis: Check,
    pub conclusion: Vec<Check>,
    /// `(−1)^n deg(c_n)` when `r ≥ n`.
    pub sign: Option<Rational>,
}

impl BlochGiesekerStage {
    /// Hypothesis implies conclusion, and the sign is non-negative when present.
    pub fn consistent(&self) -> bool {
        (!self.hypothesis.passed || self.conclusion.iter().all(|c| c.passed))
            && self.sign.as_ref().is_none_or(|s| !s.is_negative())
    }
}

pub fn bloch_gieseker_stage(base: &GradedRingModel, c: &ChernData, lambda: Rational) -> Result<BlochGiesekerStage> {
    let b = BundleRing::new(base.clone(), c.clone())?;
    let m = b.model();
    let zeta = b.zeta();
    let bad = (0..m.top()).find(|&k| {
        let z = m.lmul_matrix(&zeta, k);
        z.rank() != m.dim(k).min(m.dim(k + 1))
    });
    let hypothesis = Check::from_witness("zeta-full-rank", bad.map(|k| format!("B^{k} -> B^{}", k + 1)));
    let n = base.top();
    let r = b.rank();
    let d = r.min(n);
    let mut conclusion = Vec::new();
    if hypothesis.passed {
        for i in 0..=n.saturating_sub(d) {
            let mat = base.mul_matrix(&c[d], d, i);
            let rank = mat.rank();
            let twice = 2 * i as i64;
            let gap = n as i64 - r as i64;
            if twice <= gap && rank != base.dim(i) {
                conclusion.push(Check::fail(format!("c{d}-injective-{i}"), format!("rank {rank} < {}", base.dim(i))));
            } else if twice <= gap {
                conclusion.push(Check::pass(format!("c{d}-injective-{i}")));
            }
            if twice >= gap && rank != base.dim(i + d) {
                conclusion.push(Check::fail(format!("c{d}-surjective-{i}"), format!("rank {rank} < {}", base.dim(i + d))));
            } else if twice >= gap {
                conclusion.push(Check::pass(format!("c{d}-surjective-{i}")));
            }
        }
    }
    let sign = (r >= n).then(|| {
        let v = base.deg(&c[n]);
        if n % 2 == 0 { v } else { -v }
    });
    Ok(BlochGiesekerStage { lambda, hypothesis, conclusion, sign })
}

/// The untwisted ring and its twists by `λδ` for each `λ`.
pub fn bloch_gieseker(
    base: &GradedRingModel,
    c: &ChernData,
    delta: &[Rational],
    lambdas: &[Rational],
) -> Result<Vec<BlochGiesekerStage>> {
    let mut out = vec![bloch_gieseker_stage(base, c, Rational::zero())?];
    for l in lambdas {
        out.push(bloch_gieseker_stage(base, &twist(base, c, delta, l), l.clone())?);
    }
    Ok(out)
}

/// `A/ann(s_t)` for the largest `t` with `s_t ≠ 0`.
#[derive(Clone, Debug)]
pub struct SegreQuotient {
    pub t: usize,
    pub model: GradedRingModel,
    /// Indices of the basis vectors of `A^k` that survive in the quotient.
    pub kept: Vec<Vec<usize>>,
}

pub fn quotient_by_ann_segre(base: &GradedRingModel, c: &ChernData) -> Result<SegreQuotient> {
    check_chern(base, c)?;
    let s = segre(base, c);
    let t = (0..s.len()).rev().find(|&j| !is_zero_vec(&s[j])).ok_or(Error::AllSegreZero)?;
    let st = &s[t];
    let top = base.top() - t;
    let mut kept = Vec::new();
    let mut images = Vec::new();
    for k in 0..=top {
        let mat = base.mul_matrix(st, t, k);
        let ech = mat.echelon();
        let cols: Vec<usize> = ech.pivots.clone();
        images.push(mat.select(&(0..mat.rows()).collect::<Vec<_>>(), &cols));
        kept.push(cols);
    }
    let coords = |k: usize, a: &[Rational]| -> Vec<Rational> {
        images[k].solve(&base.mul(a, k, st, t)).expect("image of s_t spans")
    };
    let dim = |k: usize| kept[k].len();
    let labels: Vec<Vec<String>> =
        (0..=top).map(|k| kept[k].iter().map(|&b| base.labels(k)[b].clone()).collect()).collect();
    let gen_count = if top >= 1 { dim(1) } else { 0 };
    let gens: Vec<Vec<Matrix>> = (0..gen_count)
        .map(|g| {
            let v = base.basis_vector(1, kept[1][g]);
            (0..top)
                .map(|k| {
                    let cols: Vec<Vec<Rational>> = kept[k]
                        .iter()
                        .map(|&b| coords(k + 1, &base.mul_degree1(&v, &base.basis_vector(k, b), k)))
                        .collect();
                    Matrix::from_columns(dim(k + 1), &cols)
                })
                .collect()
        })
        .collect();
    let words: Vec<Vec<Vec<Vec<Rational>>>> = (0..=top)
        .map(|k| kept[k].iter().map(|&b| base.word(k, b).iter().map(|v| coords(1, v)).collect()).collect())
        .collect();
    let degree: Vec<Rational> = kept[top].iter().map(|&b| base.deg(&base.mul(&base.basis_vector(top, b), top, st, t))).collect();
    let model = GradedRingModel::new(labels, gens, words, degree)?;
    Ok(SegreQuotient { t, model, kept })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{chern_classes, segre_classes, twist_classes, ChernRoute, Phi};
    use crate::fan::{bergman, permutohedral};
    use crate::matroid::Matroid;
    use crate::rational::{frac, int};

    fn chern_coords(fm: &FanRingModel, fan: &Fan, c: &[ChowElement]) -> ChernData {
        c.iter().map(|e| fm.coords(fan, e).unwrap()).collect()
    }

    fn perm_setup(n: usize, m: &Matroid, phi: Phi) -> (Fan, FanRingModel, ChernData, Vec<ChowElement>) {
        let f = permutohedral(n).unwrap();
        let fm = ring_model_from_fan(&f).unwrap();
        let c = chern_classes(&f, m, ChernRoute::Permutohedral(phi)).unwrap();
        let cc = chern_coords(&fm, &f, &c);
        (f, fm, cc, c)
    }

    #[test]
    fn fan_model_dims() {
        let m = Matroid::uniform(2, 3).unwrap();
        assert_eq!(ring_model_from_fan(&bergman(&m).unwrap()).unwrap().model.dims(), [1, 1]);
        assert_eq!(ring_model_from_fan(&permutohedral(3).unwrap()).unwrap().model.dims(), [1, 4, 1]);
        let d: usize = ring_model_from_fan(&permutohedral(4).unwrap()).unwrap().model.dims().iter().sum();
        assert_eq!(d, 24);
    }

    #[test]
    fn fan_model_reproduces_products() {
        let f = permutohedral(3).unwrap();
        let fm = ring_model_from_fan(&f).unwrap();
        let m = &fm.model;
        for a in 0..f.num_rays() as RayId {
            for b in 0..f.num_rays() as RayId {
                let x = fm.ray_coords(&f, a).unwrap();
                let y = fm.ray_coords(&f, b).unwrap();
                let prod = crate::chow::multiply_by_ray(&f, &DivisorClass::indicator(&f, a).to_element(&f), b);
                assert_eq!(m.deg(&m.mul(&x, 1, &y, 1)), degree(&f, &prod).unwrap());
            }
        }
    }

    #[test]
    fn bundle_dimensions_and_degree() {
        let m = Matroid::uniform(2, 3).unwrap();
        let (_, fm, c, _) = perm_setup(3, &m, Phi::Identity);
        let b = BundleRing::new(fm.model.clone(), c).unwrap();
        assert_eq!(b.model().dims(), [1, 5, 5, 1]);
        let pt = b.base().basis_vector(2, 0);
        let pt_deg = b.base().deg(&pt);
        let x = b.monomial(1, &pt, 2);
        assert_eq!(b.model().deg(&x), pt_deg);
    }

    #[test]
    fn rank_one_bundle_is_base() {
        let m = Matroid::uniform(1, 3).unwrap();
        let (_, fm, c, _) = perm_setup(3, &m, Phi::Identity);
        let b = BundleRing::new(fm.model.clone(), c.clone()).unwrap();
        assert_eq!(b.model().dims(), fm.model.dims());
        let neg_c1: Vec<Rational> = c[1].iter().map(|x| -x.clone()).collect();
        assert_eq!(b.zeta(), neg_c1);
    }

    #[test]
    fn trivial_chern_classes() {
        let fm = ring_model_from_fan(&permutohedral(3).unwrap()).unwrap();
        let base = fm.model.clone();
        let c = vec![base.unit(), base.zero(1), base.zero(2)];
        let b = BundleRing::new(base.clone(), c.clone()).unwrap();
        let z = b.zeta();
        assert!(is_zero_vec(&b.model().power(&z, 2)));
        let stage = bloch_gieseker_stage(&base, &c, Rational::zero()).unwrap();
        assert!(!stage.hypothesis.passed);
    }

    #[test]
    fn pushforward_of_zeta_powers_is_segre() {
        let m = Matroid::uniform(2, 4).unwrap();
        let (_, fm, c, _) = perm_setup(4, &m, Phi::Identity);
        let b = BundleRing::new(fm.model.clone(), c.clone()).unwrap();
        let s = segre(&fm.model, &c);
        let z = b.zeta();
        let r = b.rank();
        for i in r - 1..=b.model().top() {
            let p = b.pushforward(&b.model().power(&z, i), i).unwrap();
            assert_eq!(p, s[i + 1 - r]);
        }
        assert!(matches!(b.pushforward(&b.model().unit(), 0), Err(Error::DegreeTooLow { .. })));
        let a = fm.model.basis_vector(1, 2);
        assert!(is_zero_vec(&b.pushforward(&b.pullback(&a, 1), 1).unwrap()));
        let x = b.model().power(&z, 3);
        let lhs = b.pushforward(&b.model().mul(&b.pullback(&a, 1), 1, &x, 3), 4).unwrap();
        let rhs = fm.model.mul(&a, 1, &b.pushforward(&x, 3).unwrap(), 2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn segre_and_twist_agree_with_fan_classes() {
        let m = Matroid::uniform(2, 4).unwrap();
        let (f, fm, cc, c) = perm_setup(4, &m, Phi::Negation);
        let s_fan = segre_classes(&f, &c, 3).unwrap();
        assert_eq!(segre(&fm.model, &cc), chern_coords(&fm, &f, &s_fan));
        let h = crate::classes::permutohedral_ample(&f).unwrap();
        let t_fan = twist_classes(&f, &c, &h, &frac(3, 2)).unwrap();
        let hc = fm.divisor_coords(&f, &h).unwrap();
        assert_eq!(twist(&fm.model, &cc, &hc, &frac(3, 2)), chern_coords(&fm, &f, &t_fan));
    }

    #[test]
    fn twist_is_an_isomorphism() {
        let m = Matroid::uniform(2, 3).unwrap();
        let (f, fm, c, _) = perm_setup(3, &m, Phi::Identity);
        let h = fm.divisor_coords(&f, &crate::classes::permutohedral_ample(&f).unwrap()).unwrap();
        for l in [int(1), frac(-2, 3)] {
            let checks = verify_twist(&fm.model, &c, &h, &l).unwrap();
            assert!(crate::check::all_passed(&checks), "{checks:?}");
        }
    }

    #[test]
    fn ahk_quotient_dims() {
        for r in [2, 3] {
            let m = Matroid::uniform(r, 4).unwrap();
            let (_, fm, c, _) = perm_setup(4, &m, Phi::Negation);
            let q = quotient_by_ann_segre(&fm.model, &c).unwrap();
            assert_eq!(q.t, 4 - r);
            let berg = ring_model_from_fan(&bergman(&m).unwrap()).unwrap();
            assert_eq!(q.model.dims(), berg.model.dims());
        }
        let boolean = Matroid::uniform(3, 3).unwrap();
        let (_, fm, c, _) = perm_setup(3, &boolean, Phi::Negation);
        let q = quotient_by_ann_segre(&fm.model, &c).unwrap();
        assert_eq!(q.t, 0);
        assert_eq!(q.model.dims(), fm.model.dims());
    }

    #[test]
    fn multi_bundle_dims() {
        let m = Matroid::uniform(2, 3).unwrap();
        let (_, fm, c, _) = perm_setup(3, &m, Phi::Identity);
        let mb = MultiBundle::new(fm.model.clone(), &[c.clone(), c]).unwrap();
        assert_eq!(mb.model().dims(), [1, 6, 10, 6, 1]);
        let z1 = mb.zeta(1);
        let z2 = mb.zeta(2);
        assert_ne!(z1, z2);
    }
}

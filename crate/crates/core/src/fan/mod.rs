//! Simplicial fans with explicit lineality, cone tables and local dual frames.

mod bisubset;
mod build;

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::ops::Range;
use core::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use once_cell::race::OnceBox;

pub use bisubset::{
    biflats, gap_indices, gap_indices_via_closure, is_biflag, proper_bisubsets, Bisubset,
};

use crate::chow::MinkowskiWeight;
use crate::error::{Error, Result};
use crate::linalg::{lattice_index, Matrix};
use crate::rational::Rational;
use crate::subset::Subset;

pub type RayId = u32;
pub type ConeId = u32;

static NEXT_FAN_ID: AtomicUsize = AtomicUsize::new(1);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FanKind {
    Permutohedral { n: usize },
    Bergman { n: usize, rank: usize },
    Bipermutohedral { n: usize },
    ProjectiveBundle { n: usize, rank: usize },
    Custom,
}

impl FanKind {
    /// Families whose Chow rings satisfy Poincaré duality.
    pub fn has_duality(self) -> bool {
        !matches!(self, FanKind::Custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RayLabel {
    Subset(Subset),
    Bisubset(Bisubset),
}

impl core::fmt::Display for RayLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RayLabel::Subset(s) => write!(f, "{s}"),
            RayLabel::Bisubset(b) => write!(f, "{b}"),
        }
    }
}

/// Values `m_ρ(u_ρ')` of the dual functionals of a cone on its extension rays.
///
/// `rows[j][i]` pairs the `i`-th ray of the cone with the `j`-th extension.
pub struct Frame {
    pub rows: Vec<Vec<Rational>>,
}

pub struct Fan {
    id: usize,
    kind: FanKind,
    ambient_dim: usize,
    lineality: Vec<Vec<i64>>,
    rays: Vec<Vec<i64>>,
    labels: Vec<RayLabel>,
    label_index: BTreeMap<RayLabel, RayId>,
    cones: Vec<Vec<RayId>>,
    offsets: Vec<usize>,
    index: BTreeMap<Vec<RayId>, ConeId>,
    extensions: Vec<Vec<(RayId, ConeId)>>,
    weights: Vec<Rational>,
    frames: Vec<OnceBox<Frame>>,
    degree_factors: OnceBox<Vec<Rational>>,
}

impl core::fmt::Debug for Fan {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "Fan({:?}, {} rays, {} cones, top {})",
            self.kind,
            self.rays.len(),
            self.cones.len(),
            self.top_dim()
        )
    }
}

impl Fan {
    /// Builds a fan from a face-closed or maximal cone list.
    ///
    /// Cones may be given in any order; all faces are added. Every cone must
    /// be simplicial modulo the lineality space and the fan must be pure.
    pub fn new(
        kind: FanKind,
        ambient_dim: usize,
        lineality: Vec<Vec<i64>>,
        rays: Vec<Vec<i64>>,
        labels: Vec<RayLabel>,
        cones: Vec<Vec<RayId>>,
    ) -> Result<Self> {
        assert_eq!(rays.len(), labels.len());
        for v in lineality.iter().chain(&rays) {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: v.len() });
            }
        }
        let mut all: BTreeSet<Vec<RayId>> = BTreeSet::new();
        all.insert(Vec::new());
        for mut c in cones {
            c.sort_unstable();
            c.dedup();
            if c.iter().any(|&r| r as usize >= rays.len()) {
                return Err(Error::ConeNotInFan);
            }
            if all.contains(&c) {
                continue;
            }
            // Insert all faces.
            let k = c.len();
            for mask in 0u32..(1u32 << k) {
                let face: Vec<RayId> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| c[i]).collect();
                all.insert(face);
            }
        }
        let mut cones: Vec<Vec<RayId>> = all.into_iter().collect();
        cones.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let top = cones.last().map_or(0, Vec::len);
        let mut offsets = alloc::vec![0usize; top + 2];
        for c in &cones {
            offsets[c.len() + 1] += 1;
        }
        for k in 1..offsets.len() {
            offsets[k] += offsets[k - 1];
        }
        let index: BTreeMap<Vec<RayId>, ConeId> =
            cones.iter().enumerate().map(|(i, c)| (c.clone(), i as ConeId)).collect();
        let mut extensions: Vec<Vec<(RayId, ConeId)>> = alloc::vec![Vec::new(); cones.len()];
        for (id, c) in cones.iter().enumerate() {
            for i in 0..c.len() {
                let mut face = c.clone();
                let r = face.remove(i);
                extensions[index[&face] as usize].push((r, id as ConeId));
            }
        }
        for e in &mut extensions {
            e.sort_unstable();
        }
        if extensions[..offsets[top]].iter().any(Vec::is_empty) {
            return Err(Error::NotPure);
        }
        let label_index = labels.iter().enumerate().map(|(i, &l)| (l, i as RayId)).collect();
        let frames = (0..cones.len()).map(|_| OnceBox::new()).collect();
        let n_top = offsets[top + 1] - offsets[top];
        let fan = Fan {
            id: NEXT_FAN_ID.fetch_add(1, Ordering::Relaxed),
            kind,
            ambient_dim,
            lineality,
            rays,
            labels,
            label_index,
            cones,
            offsets,
            index,
            extensions,
            weights: alloc::vec![Rational::one(); n_top],
            frames,
            degree_factors: OnceBox::new(),
        };
        for id in fan.cones_of_size(top) {
            if fan.generator_matrix(id).rank() != fan.lineality.len() + top {
                return Err(Error::NotSimplicial { cone: id as usize });
            }
        }
        Ok(fan)
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn kind(&self) -> FanKind {
        self.kind
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn lineality(&self) -> &[Vec<i64>] {
        &self.lineality
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn ray(&self, r: RayId) -> &[i64] {
        &self.rays[r as usize]
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray_label(&self, r: RayId) -> RayLabel {
        self.labels[r as usize]
    }

    pub fn labels(&self) -> &[RayLabel] {
        &self.labels
    }

    pub fn ray_of(&self, label: RayLabel) -> Option<RayId> {
        self.label_index.get(&label).copied()
    }

    pub fn top_dim(&self) -> usize {
        self.offsets.len() - 2
    }

    pub fn num_cones(&self) -> usize {
        self.cones.len()
    }

    pub fn cone(&self, id: ConeId) -> &[RayId] {
        &self.cones[id as usize]
    }

    pub fn cone_id(&self, rays: &[RayId]) -> Option<ConeId> {
        if rays.windows(2).all(|w| w[0] < w[1]) {
            self.index.get(rays).copied()
        } else {
            let mut v = rays.to_vec();
            v.sort_unstable();
            self.index.get(&v).copied()
        }
    }

    pub fn empty_cone(&self) -> ConeId {
        0
    }

    pub fn cones_of_size(&self, k: usize) -> Range<ConeId> {
        if k > self.top_dim() {
            let end = self.cones.len() as ConeId;
            return end..end;
        }
        self.offsets[k] as ConeId..self.offsets[k + 1] as ConeId
    }

    pub fn count_of_size(&self, k: usize) -> usize {
        self.cones_of_size(k).len()
    }

    pub fn maximal_cones(&self) -> Range<ConeId> {
        self.cones_of_size(self.top_dim())
    }

    /// Rays extending a cone to a larger cone, with the resulting cone ids.
    pub fn extensions(&self, id: ConeId) -> &[(RayId, ConeId)] {
        &self.extensions[id as usize]
    }

    pub fn cone_extensions(&self, rays: &[RayId]) -> Result<Vec<RayId>> {
        let id = self.cone_id(rays).ok_or(Error::ConeNotInFan)?;
        Ok(self.extensions(id).iter().map(|e| e.0).collect())
    }

    /// Cone obtained by adding `ray`, if it exists.
    pub fn extend(&self, id: ConeId, ray: RayId) -> Option<ConeId> {
        let ext = self.extensions(id);
        ext.binary_search_by_key(&ray, |e| e.0).ok().map(|k| ext[k].1)
    }

    pub fn weight(&self, maximal: ConeId) -> &Rational {
        &self.weights[(maximal - self.maximal_cones().start) as usize]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Replaces the maximal-cone weights.
    pub fn with_weights(mut self, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != self.weights.len() {
            return Err(Error::DimensionMismatch { expected: self.weights.len(), found: weights.len() });
        }
        self.weights = weights;
        self.degree_factors = OnceBox::new();
        Ok(self)
    }

    /// Lineality vectors followed by the rays of the cone, as rows.
    pub fn generator_matrix(&self, id: ConeId) -> Matrix {
        let rows: Vec<Vec<i64>> =
            self.lineality.iter().cloned().chain(self.cone(id).iter().map(|&r| self.rays[r as usize].clone())).collect();
        if rows.is_empty() {
            return Matrix::zeros(0, self.ambient_dim);
        }
        Matrix::from_i64_rows(&rows)
    }

    /// Index of the lattice spanned by the rays and lineality inside its saturation.
    pub fn multiplicity(&self, id: ConeId) -> BigInt {
        let rows: Vec<Vec<i64>> =
            self.lineality.iter().cloned().chain(self.cone(id).iter().map(|&r| self.rays[r as usize].clone())).collect();
        if rows.is_empty() {
            return BigInt::one();
        }
        lattice_index(&rows).expect("cones are simplicial")
    }

    /// `weight / multiplicity` for each maximal cone.
    pub fn degree_factor(&self, maximal: ConeId) -> &Rational {
        let factors = self.degree_factors.get_or_init(|| {
            Box::new(
                self.maximal_cones()
                    .map(|id| self.weight(id) / Rational::from_integer(self.multiplicity(id)))
                    .collect(),
            )
        });
        &factors[(maximal - self.maximal_cones().start) as usize]
    }

    /// Functionals vanishing on the lineality space and dual to the rays of
    /// the cone, evaluated on its extension rays. Computed once per cone.
    pub fn frame(&self, id: ConeId) -> &Frame {
        self.frames[id as usize].get_or_init(|| Box::new(self.compute_frame(id)))
    }

    /// Dual functionals `m_i` with `m_i(L) = 0` and `m_i(u_j) = δ_ij` for the
    /// rays `u_j` of the cone, as vectors in the ambient space.
    pub fn dual_functionals(&self, id: ConeId) -> Vec<Vec<Rational>> {
        let g = self.generator_matrix(id);
        let d = self.ambient_dim;
        let l = self.lineality.len();
        let k = self.cone(id).len();
        let rows = l + k;
        let mut aug = Matrix::zeros(rows, d + rows);
        for i in 0..rows {
            for j in 0..d {
                aug[(i, j)] = g[(i, j)].clone();
            }
            aug[(i, d + i)] = Rational::one();
        }
        let e = aug.echelon();
        (0..k)
            .map(|c| {
                let mut m = alloc::vec![Rational::zero(); d];
                for (r, &p) in e.pivots.iter().enumerate() {
                    debug_assert!(p < d, "cone is not simplicial");
                    m[p] = e.reduced[(r, d + l + c)].clone();
                }
                m
            })
            .collect()
    }

    /// Basis of functionals vanishing on the lineality space and on every ray of the cone.
    pub fn annihilator(&self, id: ConeId) -> Vec<Vec<Rational>> {
        let g = self.generator_matrix(id);
        if g.rows() == 0 {
            return (0..self.ambient_dim)
                .map(|i| {
                    let mut v = alloc::vec![Rational::zero(); self.ambient_dim];
                    v[i] = Rational::one();
                    v
                })
                .collect();
        }
        g.nullspace()
    }

    pub fn evaluate(&self, m: &[Rational], r: RayId) -> Rational {
        self.rays[r as usize]
            .iter()
            .zip(m)
            .filter(|(v, _)| **v != 0)
            .map(|(&v, x)| x * Rational::from_integer(BigInt::from(v)))
            .sum()
    }

    fn compute_frame(&self, id: ConeId) -> Frame {
        let duals = self.dual_functionals(id);
        let rows = self
            .extensions(id)
            .iter()
            .map(|&(r, _)| duals.iter().map(|m| self.evaluate(m, r)).collect())
            .collect();
        Frame { rows }
    }

    /// Weight 1 on every maximal cone, i.e. the fundamental class.
    pub fn fundamental_weight(&self) -> MinkowskiWeight {
        MinkowskiWeight::new(self, self.top_dim(), self.maximal_cones().map(|c| (c, self.weight(c).clone())))
    }

    /// For each `(k-1)`-cone `τ`, checks that `Σ_{σ ⊃ τ} w(σ) u_{σ∖τ}` lies in
    /// the span of `τ` and the lineality space. Returns the violating cones.
    pub fn check_balanced(&self, w: &MinkowskiWeight) -> Result<Vec<ConeId>> {
        if w.fan_id() != self.id {
            return Err(Error::FanMismatch);
        }
        let k = w.dim();
        if k == 0 {
            return Ok(Vec::new());
        }
        let mut sums: BTreeMap<ConeId, Vec<Rational>> = BTreeMap::new();
        for (&sigma, val) in w.values() {
            let rays = self.cone(sigma);
            for i in 0..rays.len() {
                let mut face = rays.to_vec();
                let r = face.remove(i);
                let tau = self.cone_id(&face).expect("faces are cones");
                let acc = sums.entry(tau).or_insert_with(|| alloc::vec![Rational::zero(); self.ambient_dim]);
                for (a, &v) in acc.iter_mut().zip(self.ray(r)) {
                    if v != 0 {
                        *a += val * Rational::from_integer(BigInt::from(v));
                    }
                }
            }
        }
        let mut bad = Vec::new();
        for (tau, v) in sums {
            if v.iter().all(Zero::is_zero) {
                continue;
            }
            let g = self.generator_matrix(tau);
            let base = g.rank();
            let mut rows: Vec<Vec<Rational>> = (0..g.rows()).map(|i| g.row(i).to_vec()).collect();
            rows.push(v);
            if Matrix::from_rows(rows).rank() != base {
                bad.push(tau);
            }
        }
        Ok(bad)
    }

    /// Map from the rays of `sub` to the rays of `self` with equal vectors,
    /// verifying that every cone of `sub` is a cone of `self`.
    pub fn embedding_of(&self, sub: &Fan) -> Result<Vec<RayId>> {
        if sub.ambient_dim != self.ambient_dim || sub.lineality != self.lineality {
            return Err(Error::NotASubfan);
        }
        let by_vector: BTreeMap<&[i64], RayId> =
            self.rays.iter().enumerate().map(|(i, v)| (v.as_slice(), i as RayId)).collect();
        let map: Vec<RayId> = sub
            .rays
            .iter()
            .map(|v| by_vector.get(v.as_slice()).copied().ok_or(Error::NotASubfan))
            .collect::<Result<_>>()?;
        for c in &sub.cones {
            let image: Vec<RayId> = c.iter().map(|&r| map[r as usize]).collect();
            if self.cone_id(&image).is_none() {
                return Err(Error::NotASubfan);
            }
        }
        Ok(map)
    }
}

pub use build::{bergman, bipermutohedral, permutohedral, projective_bundle};

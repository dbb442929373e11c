//! Exact checks of Poincaré duality, Hard Lefschetz and the Hodge–Riemann
//! relations on graded ring models, with sampling of Lefschetz candidates.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bundle::{ring_model_from_fan, ChernData, GradedRingModel, MultiBundle};
use crate::check::Check;
use crate::chow::Restriction;
use crate::classes::{chern_classes, permutohedral_ample, ChernRoute, Phi};
use crate::error::{Error, Result};
use crate::fan::{bergman, permutohedral};
use crate::linalg::{axpy, positive_definite, Definiteness, Matrix};
use crate::matroid::Matroid;
use crate::rational::{frac, int, Rational};

/// The Gram matrix `A^i × A^{n−i}` is square and invertible for every `i ≤ n/2`.
pub fn check_pd(model: &GradedRingModel) -> Check {
    let n = model.top();
    for i in 0..=n / 2 {
        let g = model.gram(i);
        let rank = g.rank();
        if g.rows() != g.cols() || rank != g.rows() {
            return Check::fail("pd", format!("degree {i}: rank {rank} of {}x{}", g.rows(), g.cols()));
        }
    }
    Check::pass("pd")
}

/// `ℓ^{n−2i}: A^i → A^{n−i}` is invertible for every `i ≤ n/2`.
pub fn check_hl(model: &GradedRingModel, l: &[Rational]) -> Check {
    let n = model.top();
    for i in 0..=n / 2 {
        let m = model.power_matrix(l, n - 2 * i, i);
        let rank = m.rank();
        if m.rows() != m.cols() || rank != m.rows() {
            return Check::fail("hl", format!("degree {i}: rank {rank} of {}x{}", m.rows(), m.cols()));
        }
    }
    Check::pass("hl")
}

/// `(x, y) ↦ (−1)^i deg(ℓ^{n−2i} x y)` is positive definite on the kernel of
/// `ℓ^{n−2i+1}` in `A^i`, for every `i ≤ n/2`.
pub fn check_hr(model: &GradedRingModel, l: &[Rational]) -> Check {
    let n = model.top();
    for i in 0..=n / 2 {
        let lower = model.power_matrix(l, n - 2 * i, i);
        let kernel = model.lmul_matrix(l, n - i).mul(&lower).nullspace();
        if kernel.is_empty() {
            continue;
        }
        let k = Matrix::from_columns(model.dim(i), &kernel);
        let mut form = k.transpose().mul(&model.gram(i)).mul(&lower).mul(&k);
        if i % 2 == 1 {
            let mut neg = Matrix::zeros(form.rows(), form.cols());
            neg.add_scaled(&form, &-Rational::one());
            form = neg;
        }
        if let Definiteness::Fails { step, pivot } = positive_definite(&form) {
            return Check::fail("hr", format!("degree {i}: pivot {pivot} at step {step} of {}", form.rows()));
        }
    }
    Check::pass("hr")
}

/// A degree-one class `s·h + Σ t_j ζ_j` with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LefschetzCandidate {
    pub coords: Vec<Rational>,
    pub s: Rational,
    pub t: Vec<Rational>,
    pub tag: String,
}

impl LefschetzCandidate {
    pub fn new(h: &[Rational], zetas: &[Vec<Rational>], s: Rational, t: Vec<Rational>) -> Self {
        let mut coords: Vec<Rational> = h.iter().map(|x| x * &s).collect();
        for (z, tj) in zetas.iter().zip(&t) {
            axpy(&mut coords, tj, z);
        }
        let mut tag = format!("s={s}");
        for (j, tj) in t.iter().enumerate() {
            tag.push_str(&format!(" t{}={tj}", j + 1));
        }
        LefschetzCandidate { coords, s, t, tag }
    }
}

fn random_positive(rng: &mut ChaCha8Rng) -> Rational {
    let num = (rng.next_u32() % 24) as i64 + 1;
    let den = (rng.next_u32() % 9) as i64 + 1;
    frac(num, den)
}

/// `count` candidates: `(s, t) = (1, 1), (1, 1/7), (1, 13)`, then seeded
/// random positive rationals.
pub fn sample_lefschetz_candidates(
    h: &[Rational],
    zetas: &[Vec<Rational>],
    count: usize,
    seed: u64,
) -> Vec<LefschetzCandidate> {
    let k = zetas.len();
    let fixed = [int(1), frac(1, 7), int(13)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|idx| match fixed.get(idx) {
            Some(t) => LefschetzCandidate::new(h, zetas, int(1), vec![t.clone(); k]),
            None => {
                let s = random_positive(&mut rng);
                let t = (0..k).map(|_| random_positive(&mut rng)).collect();
                LefschetzCandidate::new(h, zetas, s, t)
            }
        })
        .collect()
}

/// Returns `h` or `−h`, whichever has `deg(h^n) > 0`, and whether it was negated.
pub fn orient_convex_class(model: &GradedRingModel, h: &[Rational]) -> Result<(Vec<Rational>, bool)> {
    let d = model.deg(&model.power(h, model.top()));
    if d.is_zero() {
        return Err(Error::MissingConvexClass);
    }
    if d.is_positive() {
        Ok((h.to_vec(), false))
    } else {
        Ok((h.iter().map(|x| -x.clone()).collect(), true))
    }
}

#[derive(Clone, Debug)]
pub struct CandidateReport {
    pub tag: String,
    pub hl: Check,
    pub hr: Check,
}

#[derive(Clone, Debug)]
pub struct KahlerReport {
    pub pd: Check,
    pub candidates: Vec<CandidateReport>,
}

impl KahlerReport {
    pub fn passed(&self) -> bool {
        self.pd.passed && self.candidates.iter().all(|c| c.hl.passed && c.hr.passed)
    }

    pub fn summary(&self) -> String {
        let status = if self.passed() { "pass" } else { "fail" };
        format!("{status}: verified at {} sample points", self.candidates.len())
    }
}

pub fn kahler_report(model: &GradedRingModel, candidates: &[LefschetzCandidate]) -> KahlerReport {
    KahlerReport {
        pd: check_pd(model),
        candidates: candidates
            .iter()
            .map(|c| CandidateReport { tag: c.tag.clone(), hl: check_hl(model, &c.coords), hr: check_hr(model, &c.coords) })
            .collect(),
    }
}

/// Base of a bundle instance.
#[derive(Clone, Debug)]
pub enum BaseSpec {
    /// The permutohedral fan of `[N]`.
    Permutohedral(usize),
    /// The Bergman fan of a loopless matroid, with classes restricted from the permutohedral fan.
    Bergman(Matroid),
}

/// A bundle ring with its oriented convex class and the `ζ_j`, all in the ring's coordinates.
#[derive(Clone, Debug)]
pub struct BundleContext {
    pub bundle: MultiBundle,
    pub h: Vec<Rational>,
    pub zetas: Vec<Vec<Rational>>,
    pub flipped: bool,
}

impl BundleContext {
    pub fn model(&self) -> &GradedRingModel {
        self.bundle.model()
    }

    pub fn candidates(&self, count: usize, seed: u64) -> Vec<LefschetzCandidate> {
        sample_lefschetz_candidates(&self.h, &self.zetas, count, seed)
    }
}

/// Base model, oriented base convex class, and Chern data of each bundle.
pub fn bundle_inputs(
    base: &BaseSpec,
    bundles: &[(Matroid, Phi)],
) -> Result<(GradedRingModel, Vec<Rational>, bool, Vec<ChernData>)> {
    let n = match base {
        BaseSpec::Permutohedral(n) => *n,
        BaseSpec::Bergman(m) => m.ground_size(),
    };
    let perm = permutohedral(n)?;
    let h_perm = permutohedral_ample(&perm)?;
    let sub = match base {
        BaseSpec::Permutohedral(_) => None,
        BaseSpec::Bergman(m) => Some(bergman(m)?),
    };
    let fan = sub.as_ref().unwrap_or(&perm);
    let fm = ring_model_from_fan(fan)?;
    let h = match &sub {
        None => fm.divisor_coords(&perm, &h_perm)?,
        Some(s) => fm.divisor_coords(s, &Restriction::new(&perm, s)?.divisor(&h_perm)?)?,
    };
    let (h, flipped) = orient_convex_class(&fm.model, &h)?;
    let mut chern = Vec::new();
    for (m, phi) in bundles {
        if m.ground_size() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.ground_size() });
        }
        m.require_loopless()?;
        let route = match &sub {
            None => ChernRoute::Permutohedral(*phi),
            Some(s) => ChernRoute::Restricted(*phi, s),
        };
        let c = chern_classes(&perm, m, route)?;
        chern.push(c.iter().map(|e| fm.coords(fan, e)).collect::<Result<ChernData>>()?);
    }
    Ok((fm.model, h, flipped, chern))
}

pub fn bundle_context(base: &BaseSpec, bundles: &[(Matroid, Phi)]) -> Result<BundleContext> {
    let (model, h, flipped, chern) = bundle_inputs(base, bundles)?;
    let bundle = MultiBundle::new(model, &chern)?;
    let h = bundle.pullback_from(0, &h, 1);
    let zetas = (1..=bundles.len()).map(|j| bundle.zeta(j)).collect();
    Ok(BundleContext { bundle, h, zetas, flipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point() -> GradedRingModel {
        GradedRingModel::new(vec![vec![String::from("1")]], Vec::new(), vec![vec![Vec::new()]], vec![Rational::one()])
            .unwrap()
    }

    /// `A^1` spanned by two vectors with identical products: the pairing is degenerate.
    fn corrupted() -> GradedRingModel {
        let labels = vec![vec![String::from("1")], vec![String::from("a"), String::from("a'")], vec![String::from("p")]];
        let g = |i: usize| {
            let mut to1 = Matrix::zeros(2, 1);
            to1[(i, 0)] = Rational::one();
            vec![to1, Matrix::from_rows(vec![vec![int(1), int(1)]])]
        };
        let e = |i: usize| if i == 0 { vec![int(1), int(0)] } else { vec![int(0), int(1)] };
        let words = vec![vec![Vec::new()], vec![vec![e(0)], vec![e(1)]], vec![vec![e(0), e(0)]]];
        GradedRingModel::new(labels, vec![g(0), g(1)], words, vec![int(1)]).unwrap()
    }

    #[test]
    fn point_passes_trivially() {
        let p = point();
        let r = kahler_report(&p, &[LefschetzCandidate::new(&[], &[], int(1), Vec::new())]);
        assert!(r.passed());
    }

    #[test]
    fn corrupted_fixture_fails_pd() {
        let m = corrupted();
        let pd = check_pd(&m);
        assert!(!pd.passed);
        assert!(pd.witness.unwrap().contains("degree 1"));
        let r = kahler_report(&m, &[]);
        assert!(!r.passed());
        assert!(r.candidates.is_empty());
    }

    #[test]
    fn permutohedral_bundle_passes() {
        let m = Matroid::uniform(2, 3).unwrap();
        for phi in [Phi::Identity, Phi::Negation] {
            let ctx = bundle_context(&BaseSpec::Permutohedral(3), &[(m.clone(), phi)]).unwrap();
            let report = kahler_report(ctx.model(), &ctx.candidates(4, 7));
            assert!(report.passed(), "{report:?}");
            assert_eq!(report.summary(), "pass: verified at 4 sample points");
        }
    }

    #[test]
    fn out_of_cone_candidate_is_reported_not_raised() {
        let m = Matroid::uniform(2, 3).unwrap();
        let ctx = bundle_context(&BaseSpec::Permutohedral(3), &[(m, Phi::Identity)]).unwrap();
        let bad = LefschetzCandidate::new(&ctx.h, &ctx.zetas, int(1), vec![int(-3)]);
        let report = kahler_report(ctx.model(), &[bad]);
        assert!(report.pd.passed);
    }

    #[test]
    fn bergman_base_bundle_has_duality() {
        let m = Matroid::uniform(2, 3).unwrap();
        let ctx = bundle_context(&BaseSpec::Bergman(m.clone()), &[(m, Phi::Identity)]).unwrap();
        assert!(check_pd(ctx.model()).passed);
    }

    #[test]
    fn sample_schedule_is_deterministic() {
        let h = vec![int(1), int(2)];
        let z = vec![vec![int(0), int(1)]];
        let a = sample_lefschetz_candidates(&h, &z, 6, 42);
        assert_eq!(a, sample_lefschetz_candidates(&h, &z, 6, 42));
        assert_eq!(a[1].t, vec![frac(1, 7)]);
        assert_eq!(a[2].t, vec![int(13)]);
        assert!(a.iter().all(|c| c.s.is_positive() && c.t.iter().all(Signed::is_positive)));
    }

    #[test]
    fn zero_convex_class_is_missing() {
        let m = Matroid::uniform(2, 3).unwrap();
        let ctx = bundle_context(&BaseSpec::Permutohedral(3), &[(m, Phi::Identity)]).unwrap();
        let zero = vec![Rational::zero(); ctx.bundle.stages()[0].base().dim(1)];
        assert_eq!(orient_convex_class(ctx.bundle.stages()[0].base(), &zero), Err(Error::MissingConvexClass));
    }
}

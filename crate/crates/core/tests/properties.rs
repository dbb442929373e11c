use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use tautring_core::biflag_calculus::{verify_bundle_identity, verify_min_dec, BiflagContext};
use tautring_core::bundle::{ring_model_from_fan, segre, twist, BundleRing, ChernData, GradedRingModel};
use tautring_core::check::all_passed;
use tautring_core::chow::{classes_equal, multiply_by_divisor, multiply_by_divisor_shifted, ChowElement, DivisorClass};
use tautring_core::classes::Phi;
use tautring_core::fan::{biflats, gap_indices, gap_indices_via_closure, permutohedral, projective_bundle, Bisubset};
use tautring_core::kahler::{bundle_context, bundle_inputs, check_hr, kahler_report, sample_lefschetz_candidates, BaseSpec, LefschetzCandidate};
use tautring_core::linalg::axpy;
use tautring_core::matroid::Matroid;
use tautring_core::rational::frac;
use tautring_core::{Rational, Subset};

struct Setup {
    base: GradedRingModel,
    h: Vec<Rational>,
    c: ChernData,
}

fn setup() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| {
        let (base, h, _, chern) =
            bundle_inputs(&BaseSpec::Permutohedral(4), &[(Matroid::uniform(2, 4).unwrap(), Phi::Identity)]).unwrap();
        Setup { base, h, c: chern.into_iter().next().unwrap() }
    })
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| frac(n, d))
}

fn vector(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(small_rational(), len)
}

fn graph_matroid() -> impl Strategy<Value = Matroid> {
    prop::collection::vec((1usize..=4, 1usize..=4), 1..=5)
        .prop_filter("no self loops", |es| es.iter().all(|(a, b)| a != b))
        .prop_map(|es| Matroid::from_graph(4, &es).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn closure_is_idempotent_and_rank_submodular(m in graph_matroid(), a in 0u32..32, b in 0u32..32) {
        let full = m.ground().bits();
        let (a, b) = (Subset::from_bits(a & full), Subset::from_bits(b & full));
        prop_assert_eq!(m.closure(m.closure(a)), m.closure(a));
        prop_assert_eq!(m.rank_of(m.closure(a)), m.rank_of(a));
        prop_assert!(m.rank_of(a.union(b)) + m.rank_of(a.intersection(b)) <= m.rank_of(a) + m.rank_of(b));
    }

    #[test]
    fn gap_indices_agree_on_biflat_chains(m in graph_matroid(), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..4)) {
        let m = m.delete_loops().0;
        prop_assume!(m.ground_size() >= 2);
        let bf = biflats(&m);
        let mut chain: Vec<Bisubset> = Vec::new();
        for p in picks {
            let options: Vec<Bisubset> = bf.iter().copied().filter(|&b| chain.last().is_none_or(|&l| l.lt(b))).collect();
            if options.is_empty() {
                break;
            }
            chain.push(options[p.index(options.len())]);
        }
        prop_assert_eq!(gap_indices(m.ground_size(), &chain).unwrap(), gap_indices_via_closure(&m, &chain).unwrap());
    }

    #[test]
    fn model_product_is_commutative_and_associative(x in vector(11), y in vector(11), z in vector(11)) {
        let a = &setup().base;
        let xy = a.mul(&x, 1, &y, 1);
        prop_assert_eq!(&xy, &a.mul(&y, 1, &x, 1));
        prop_assert_eq!(a.mul(&xy, 2, &z, 1), a.mul(&x, 1, &a.mul(&y, 1, &z, 1), 2));
    }

    #[test]
    fn twist_round_trip(l in small_rational()) {
        let s = setup();
        let there = twist(&s.base, &s.c, &s.h, &l);
        prop_assert_eq!(twist(&s.base, &there, &s.h, &-l), s.c.clone());
    }

    #[test]
    fn segre_inverts_total_chern(l in small_rational()) {
        let s = setup();
        let c = twist(&s.base, &s.c, &s.h, &l);
        let sg = segre(&s.base, &c);
        for k in 1..=s.base.top() {
            let mut acc = s.base.zero(k);
            for j in 0..=k.min(c.len() - 1) {
                axpy(&mut acc, &Rational::one(), &s.base.mul(&c[j], j, &sg[k - j], k - j));
            }
            prop_assert!(acc.iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn bundle_decomposition_and_projection_formula(l in small_rational(), a in vector(11), x in vector(12)) {
        let s = setup();
        let b = BundleRing::new(s.base.clone(), twist(&s.base, &s.c, &s.h, &l)).unwrap();
        let dims = s.base.dims();
        for k in 0..=b.model().top() {
            let expected: usize = (0..b.rank()).filter(|&i| i <= k && k - i < dims.len()).map(|i| dims[k - i]).sum();
            prop_assert_eq!(b.model().dim(k), expected);
        }
        let m = b.model();
        let x2 = m.mul(&x, 1, &m.power(&b.zeta(), 1), 1);
        let lhs = b.pushforward(&m.mul(&b.pullback(&a, 1), 1, &x2, 2), 3).unwrap();
        let rhs = s.base.mul(&a, 1, &b.pushforward(&x2, 2).unwrap(), 1);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hr_degree_zero_sign_on_sampled_candidates(seed in any::<u64>()) {
        let ctx = bundle_context(&BaseSpec::Permutohedral(3), &[(Matroid::uniform(2, 3).unwrap(), Phi::Negation)]).unwrap();
        for cand in sample_lefschetz_candidates(&ctx.h, &ctx.zetas, 5, seed) {
            let m = ctx.model();
            prop_assert!(m.deg(&m.power(&cand.coords, m.top())).is_positive());
            prop_assert!(check_hr(m, &cand.coords).passed);
        }
    }

    #[test]
    fn divisor_products_ignore_representative(seed in any::<u64>(), coeffs in vector(14)) {
        let f = permutohedral(4).unwrap();
        let d = DivisorClass::from_coeffs(&f, coeffs).unwrap();
        let e = DivisorClass::indicator(&f, 0).to_element(&f);
        let a = multiply_by_divisor(&f, &e, &d).unwrap();
        let b = multiply_by_divisor_shifted(&f, &e, &d, seed).unwrap();
        prop_assert!(classes_equal(&f, &a, &b).unwrap());
    }
}

#[test]
fn hl_follows_from_hr_on_the_sampled_suite() {
    let ctx = bundle_context(&BaseSpec::Permutohedral(4), &[(Matroid::uniform(2, 4).unwrap(), Phi::Negation)]).unwrap();
    let report = kahler_report(ctx.model(), &ctx.candidates(6, 99));
    for c in &report.candidates {
        if c.hr.passed {
            assert!(c.hl.passed, "{}", c.tag);
        }
    }
}

#[test]
fn min_dec_vanishes_for_every_first_component_of_u24() {
    let m = Matroid::uniform(2, 4).unwrap();
    let ctx = BiflagContext::new(&m).unwrap();
    let fan = projective_bundle(&m).unwrap();
    for first in ctx.first_components() {
        for ell in 0..=2 {
            if let Ok((_, w)) = verify_min_dec(&ctx, &fan, &first, ell) {
                assert_eq!(w, None);
            }
        }
    }
}

#[test]
fn loopy_input_is_rejected() {
    let m = Matroid::from_bases(3, [Subset::from_digits("12")]).unwrap();
    assert!(verify_bundle_identity(&m).is_err());
    let (clean, _) = m.delete_loops();
    assert!(all_passed(&verify_bundle_identity(&clean).unwrap()));
}

#[test]
fn out_of_cone_candidate_fails_without_error() {
    let ctx = bundle_context(&BaseSpec::Permutohedral(3), &[(Matroid::uniform(2, 3).unwrap(), Phi::Identity)]).unwrap();
    let bad = LefschetzCandidate::new(&ctx.h, &ctx.zetas, Rational::one(), vec![frac(-3, 1)]);
    let report = kahler_report(ctx.model(), &[bad]);
    assert!(report.pd.passed);
    assert_eq!(report.candidates.len(), 1);
}

#[test]
fn fan_model_reproduces_unit_and_points() {
    let f = permutohedral(3).unwrap();
    let fm = ring_model_from_fan(&f).unwrap();
    let unit = ChowElement::unit(&f);
    assert_eq!(fm.coords(&f, &unit).unwrap(), fm.model.unit());
    for c in f.maximal_cones() {
        let v = fm.coords(&f, &ChowElement::cone(&f, c, Rational::one())).unwrap();
        assert_eq!(fm.model.deg(&v), Rational::one());
    }
}

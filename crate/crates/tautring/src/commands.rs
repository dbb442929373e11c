//! One function per subcommand. Each turns parsed arguments into an ordered
//! list of reports; the verification itself lives in `tautring-core`.

use rayon::prelude::*;
use tautring_core::biflag_calculus::{verify_bundle_identity, verify_lemmas_for, verify_truncation, Biflag};
use tautring_core::bundle::{bloch_gieseker, quotient_by_ann_segre, verify_twist};
use tautring_core::check::Check;
use tautring_core::chow::graded_dimension;
use tautring_core::classes::Phi;
use tautring_core::fan::{bergman, bipermutohedral, permutohedral, projective_bundle, Fan};
use tautring_core::kahler::{bundle_context, bundle_inputs, check_hl, check_hr, check_pd, BaseSpec};
use tautring_core::matroid::Matroid;
use tautring_core::{Error, Rational};

use crate::error::InputError;
use crate::fan_dump::{dump, sanity, FanDump};
use crate::input::{parse_chain, MatroidSpec};
use crate::report::{from_checks, VerificationReport};

/// Largest ground set for which truncation is cross-checked inside the full bipermutohedral fan.
const AMBIENT_LIMIT: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Identity,
    Lemmas,
    Truncation,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FanKindArg {
    Permutohedral,
    Bergman,
    Bipermutohedral,
    ProjectiveBundle,
}

pub fn phi_name(phi: Phi) -> &'static str {
    match phi {
        Phi::Identity => "identity",
        Phi::Negation => "negation",
    }
}

/// Core errors caused by the inputs rather than by a failed computation.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::LoopyMatroid { .. }
            | Error::DimensionMismatch { .. }
            | Error::RankOutOfRange { .. }
            | Error::RankZero
            | Error::GroundSetTooLarge(_)
            | Error::ElementOutOfRange { .. }
            | Error::InvalidFirstComponent(_)
    )
}

fn triage(check: &str, instance: &str, e: Error) -> Result<Vec<VerificationReport>, InputError> {
    if is_input_error(&e) {
        Err(InputError::Matroid(e))
    } else {
        Ok(vec![VerificationReport::error(check, instance, e)])
    }
}

/// Builds the matroid, deleting loops when `simplify` is set and rejecting them otherwise.
pub fn load_matroid(spec: &MatroidSpec, simplify: bool) -> Result<Matroid, InputError> {
    let m = spec.build()?;
    if simplify {
        return Ok(m.delete_loops().0);
    }
    m.require_loopless().map_err(InputError::Matroid)?;
    Ok(m)
}

fn prefixed(task: &str, instance: &str, checks: &[Check]) -> Vec<VerificationReport> {
    let mut out = from_checks(instance, checks);
    for r in &mut out {
        r.check = format!("{task}/{}", r.check);
    }
    out
}

pub struct VerifyOptions<'a> {
    pub which: Which,
    /// Skip Chow-ring comparisons in the lemma suite.
    pub formal_only: bool,
    pub simplify: bool,
    /// First components for the lemma suite, as `S|T;...` chains; all of them when empty.
    pub firsts: &'a [String],
}

pub fn verify(spec: &MatroidSpec, opts: &VerifyOptions<'_>) -> Result<Vec<VerificationReport>, InputError> {
    let m = load_matroid(spec, opts.simplify)?;
    let firsts: Vec<Biflag> =
        opts.firsts.iter().map(|f| parse_chain(m.ground_size(), f)).collect::<Result<_, _>>()?;
    let firsts = (!firsts.is_empty()).then_some(firsts.as_slice());
    let (which, formal_only) = (opts.which, opts.formal_only);
    let instance = spec.to_string();
    let tasks: &[Which] = match which {
        Which::All => &[Which::Identity, Which::Lemmas, Which::Truncation],
        Which::Identity => &[Which::Identity],
        Which::Lemmas => &[Which::Lemmas],
        Which::Truncation => &[Which::Truncation],
    };
    let results: Vec<_> = tasks
        .par_iter()
        .map(|&t| {
            let (name, res) = match t {
                Which::Identity => ("identity", verify_bundle_identity(&m)),
                Which::Lemmas => ("lemmas", verify_lemmas_for(&m, firsts, !formal_only)),
                _ => ("truncation", verify_truncation(&m, m.ground_size() <= AMBIENT_LIMIT)),
            };
            match res {
                Ok(checks) => Ok(prefixed(name, &instance, &checks)),
                Err(e) => triage(name, &instance, e),
            }
        })
        .collect();
    flatten(results)
}

fn flatten(results: Vec<Result<Vec<VerificationReport>, InputError>>) -> Result<Vec<VerificationReport>, InputError> {
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Where the bundles live: `permutohedral(N)` or the Bergman fan of a matroid.
pub struct Base {
    pub spec: BaseSpec,
    pub name: String,
}

impl Base {
    pub fn new(n: usize, bergman_of: Option<&MatroidSpec>) -> Result<Self, InputError> {
        match bergman_of {
            None => Ok(Base { spec: BaseSpec::Permutohedral(n), name: format!("permutohedral({n})") }),
            Some(s) => {
                let m = load_matroid(s, false)?;
                if m.ground_size() != n {
                    return Err(InputError::Usage(format!("base matroid {s} is not on [{n}]")));
                }
                Ok(Base { spec: BaseSpec::Bergman(m), name: format!("bergman({s})") })
            }
        }
    }
}

fn bundle_name(base: &Base, bundles: &[(&MatroidSpec, Phi)]) -> String {
    let parts: Vec<String> = bundles.iter().map(|(s, p)| format!("{s}:{}", phi_name(*p))).collect();
    format!("{}/{}", base.name, parts.join("+"))
}

pub struct KahlerOutcome {
    pub reports: Vec<VerificationReport>,
    /// The base convex class had to be negated to make `deg(h^n)` positive.
    pub flipped: bool,
}

pub fn kahler(
    base: &Base,
    bundles: &[(&MatroidSpec, Phi)],
    samples: usize,
    seed: u64,
) -> Result<KahlerOutcome, InputError> {
    let mut inputs = Vec::new();
    for (s, phi) in bundles {
        inputs.push((load_matroid(s, false)?, *phi));
    }
    let instance = bundle_name(base, bundles);
    let ctx = match bundle_context(&base.spec, &inputs) {
        Ok(c) => c,
        Err(e) => return triage("kahler", &instance, e).map(|reports| KahlerOutcome { reports, flipped: false }),
    };
    let model = ctx.model();
    let candidates = ctx.candidates(samples, seed);
    let mut reports = vec![VerificationReport::from_check(&instance, &check_pd(model))];
    let per: Vec<Vec<VerificationReport>> = candidates
        .par_iter()
        .map(|c| {
            let at = format!("{instance} at {}", c.tag);
            let (hl, hr) = rayon::join(|| check_hl(model, &c.coords), || check_hr(model, &c.coords));
            from_checks(&at, &[hl, hr])
        })
        .collect();
    reports.extend(per.into_iter().flatten());
    Ok(KahlerOutcome { reports, flipped: ctx.flipped })
}

pub fn bloch_gieseker_cmd(
    base: &Base,
    spec: &MatroidSpec,
    phi: Phi,
    lambdas: &[Rational],
) -> Result<Vec<VerificationReport>, InputError> {
    if let Some(l) = lambdas.iter().find(|l| *l <= &Rational::from_integer(0.into())) {
        return Err(InputError::Usage(format!("twist parameter {l} must be positive")));
    }
    let m = load_matroid(spec, false)?;
    let instance = bundle_name(base, &[(spec, phi)]);
    let (model, h, _, chern) = match bundle_inputs(&base.spec, &[(m, phi)]) {
        Ok(x) => x,
        Err(e) => return triage("bloch-gieseker", &instance, e),
    };
    let c = &chern[0];
    let twists: Vec<_> = lambdas
        .par_iter()
        .map(|l| match verify_twist(&model, c, &h, l) {
            Ok(checks) => Ok(from_checks(&format!("{instance} lambda={l}"), &checks)),
            Err(e) => triage("twist", &instance, e),
        })
        .collect();
    let mut reports = flatten(twists)?;
    let stages = match bloch_gieseker(&model, c, &h, lambdas) {
        Ok(s) => s,
        Err(e) => {
            reports.extend(triage("bloch-gieseker", &instance, e)?);
            return Ok(reports);
        }
    };
    for st in stages {
        let at = format!("{instance} lambda={}", st.lambda);
        let consistent = Check::from_witness("consistent", (!st.consistent()).then(|| format!("{:?}", st.sign)));
        reports.push(VerificationReport::from_check(&at, &consistent));
        if st.lambda == Rational::from_integer(0.into()) {
            continue;
        }
        reports.push(VerificationReport::from_check(&at, &st.hypothesis));
        reports.extend(from_checks(&at, &st.conclusion));
        if let Some(s) = &st.sign {
            let sign = Check::from_witness("sign", (s < &Rational::from_integer(0.into())).then(|| format!("signed degree {s}")));
            reports.push(VerificationReport::from_check(&at, &sign));
        }
    }
    Ok(reports)
}

pub struct QuotientOutcome {
    pub reports: Vec<VerificationReport>,
    pub quotient_dims: Vec<usize>,
    pub bergman_dims: Vec<usize>,
}

pub fn quotient_ahk(spec: &MatroidSpec, phi: Phi) -> Result<QuotientOutcome, InputError> {
    let m = load_matroid(spec, false)?;
    let n = m.ground_size();
    let base = Base::new(n, None)?;
    let instance = bundle_name(&base, &[(spec, phi)]);
    let empty = |reports| QuotientOutcome { reports, quotient_dims: Vec::new(), bergman_dims: Vec::new() };
    let ((model, _, _, chern), fan) = match rayon::join(|| bundle_inputs(&base.spec, &[(m.clone(), phi)]), || bergman(&m)) {
        (Ok(x), Ok(f)) => (x, f),
        (Err(e), _) | (_, Err(e)) => return triage("quotient-ahk", &instance, e).map(empty),
    };
    let q = match quotient_by_ann_segre(&model, &chern[0]) {
        Ok(q) => q,
        Err(e) => return triage("quotient-ahk", &instance, e).map(empty),
    };
    let expected_t = n - m.rank();
    let direct: Vec<usize> = (0..=fan.top_dim()).map(|k| graded_dimension(&fan, k)).collect();
    let dims = q.model.dims();
    let checks = [
        Check::from_witness("segre-top-index", (q.t != expected_t).then(|| format!("t = {}, expected {expected_t}", q.t))),
        Check::from_witness("hilbert-function", (dims != direct).then(|| format!("quotient {dims:?}, bergman {direct:?}"))),
        check_pd(&q.model),
    ];
    Ok(QuotientOutcome { reports: from_checks(&instance, &checks), quotient_dims: dims, bergman_dims: direct })
}

pub struct FanOutcome {
    pub dump: FanDump,
    pub reports: Vec<VerificationReport>,
}

pub fn fan_cmd(kind: FanKindArg, spec: Option<&MatroidSpec>, n: Option<usize>, simplify: bool) -> Result<FanOutcome, InputError> {
    let need_n = || n.ok_or_else(|| InputError::Usage("this fan kind needs --N".into()));
    let need_m = || {
        let s = spec.ok_or_else(|| InputError::Usage("this fan kind needs --matroid".into()))?;
        load_matroid(s, simplify)
    };
    let fan: Result<Fan, Error> = match kind {
        FanKindArg::Permutohedral => permutohedral(need_n()?),
        FanKindArg::Bipermutohedral => bipermutohedral(need_n()?),
        FanKindArg::Bergman => bergman(&need_m()?),
        FanKindArg::ProjectiveBundle => projective_bundle(&need_m()?),
    };
    let fan = fan.map_err(InputError::Matroid)?;
    let d = dump(&fan);
    let reports = from_checks(&d.kind, &sanity(&fan));
    Ok(FanOutcome { dump: d, reports })
}

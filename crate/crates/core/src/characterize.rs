//! Parameter intervals on which the Green's function keeps a constant sign.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::green::Classification;
use crate::ode::{markov_decomposition, FundamentalSystem};
use crate::problem::{build_space, check_tilde_form, derive_indices, IndexSet, ProblemSpec, SpaceDescriptor, SpaceVariant};
use crate::spectral::{find_root, BoundaryProblem, Direction, Eigenvalue, SearchConfig};

/// How the disconjugacy hypothesis at `M̄` is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdMode {
    Assert,
    Check,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HypothesisStatus {
    UserAsserted,
    CertifiedByDecompose,
    /// The Wronskians of the canonical basis lose positivity at `t`.
    NotCertified { k: usize, t: f64 },
}

impl HypothesisStatus {
    pub fn name(&self) -> &'static str {
        match self {
            HypothesisStatus::UserAsserted => "user-asserted",
            HypothesisStatus::CertifiedByDecompose => "certified-by-decompose",
            HypothesisStatus::NotCertified { .. } => "not-certified",
        }
    }
}

pub fn hypothesis_status(spec: &ProblemSpec, mode: TdMode, steps: usize) -> Result<HypothesisStatus> {
    if mode == TdMode::Assert {
        return Ok(HypothesisStatus::UserAsserted);
    }
    let bvp = BoundaryProblem::for_space(spec, &spec.base_space(), steps)?;
    let fs: FundamentalSystem = bvp.fundamental(spec.m_bar)?;
    Ok(match markov_decomposition(&fs).failure {
        None => HypothesisStatus::CertifiedByDecompose,
        Some((k, t)) => HypothesisStatus::NotCertified { k, t },
    })
}

/// An interval endpoint `M̄ - λ`, or an infinite end.
#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub closed: bool,
    /// Label of the eigenvalue that produced the endpoint.
    pub source: Option<String>,
}

impl Bound {
    fn from(m_bar: f64, label: &str, ev: &Eigenvalue, closed: bool) -> Bound {
        Bound {
            value: m_bar - ev.lambda,
            closed,
            source: Some(label.to_string()),
        }
    }

    fn minus_infinity() -> Bound {
        Bound {
            value: f64::NEG_INFINITY,
            closed: false,
            source: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignCharacterization {
    pub classification: Classification,
    pub lower: Bound,
    pub upper: Bound,
    /// Every eigenvalue computed, with its label (`lambda_1`, `lambda_2'`, ...).
    pub eigenvalues: Vec<(String, Eigenvalue)>,
    pub hypothesis: HypothesisStatus,
    /// True for a necessary condition only.
    pub necessary_only: bool,
    pub warnings: Vec<String>,
}

impl SignCharacterization {
    pub fn contains(&self, m: f64) -> bool {
        let lo_ok = if self.lower.closed { m >= self.lower.value } else { m > self.lower.value };
        let hi_ok = if self.upper.closed { m <= self.upper.value } else { m < self.upper.value };
        lo_ok && hi_ok
    }

    pub fn eigenvalue(&self, label: &str) -> Option<&Eigenvalue> {
        self.eigenvalues.iter().find(|(l, _)| l == label).map(|(_, e)| e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trigger {
    SigmaK,
    EpsilonLast,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonexistenceFlags {
    pub no_inverse_negative: bool,
    pub no_inverse_positive: bool,
    pub trigger: Option<Trigger>,
}

/// With `σ_k = k-1` or `ε_{n-k} = n-k-1` the opposite sign never occurs.
pub fn nonexistence_check(spec: &ProblemSpec) -> NonexistenceFlags {
    let (n, k) = (spec.n, spec.k());
    let s = spec.sigma.last() == Some(k - 1);
    let e = spec.epsilon.last() == Some(n - k - 1);
    let trigger = match (s, e) {
        (true, true) => Some(Trigger::Both),
        (true, false) => Some(Trigger::SigmaK),
        (false, true) => Some(Trigger::EpsilonLast),
        (false, false) => None,
    };
    let fired = trigger.is_some();
    let even = (n - k) % 2 == 0;
    NonexistenceFlags {
        no_inverse_negative: fired && even,
        no_inverse_positive: fired && !even,
        trigger,
    }
}

struct Search<'a> {
    spec: &'a ProblemSpec,
    base: BoundaryProblem,
    cfg: &'a SearchConfig,
}

impl<'a> Search<'a> {
    fn new(spec: &'a ProblemSpec, cfg: &'a SearchConfig) -> Result<Search<'a>> {
        if !spec.na() {
            return Err(Error::NaFailed);
        }
        cfg.validate()?;
        let base = BoundaryProblem::for_space(spec, &spec.base_space(), cfg.steps)?;
        Ok(Search { spec, base, cfg })
    }

    /// Runs the requested searches concurrently, keeping the input order.
    fn run(&self, jobs: Vec<(&str, SpaceDescriptor, Direction)>) -> Result<Vec<(String, Eigenvalue)>> {
        jobs.into_par_iter()
            .map(|(label, space, dir)| {
                let mut ev = find_root(&self.base.with_space(&space), self.spec.m_bar, dir, self.cfg)?;
                ev.space = Some(space);
                Ok((label.to_string(), ev))
            })
            .collect()
    }

    fn space(&self, v: SpaceVariant) -> Result<SpaceDescriptor> {
        build_space(self.spec, &v)
    }
}

fn collect_warnings(evs: &[(String, Eigenvalue)]) -> Vec<String> {
    evs.iter()
        .flat_map(|(l, e)| e.warnings.iter().map(move |w| format!("{l}: {w}")))
        .collect()
}

fn pick<'e>(evs: &'e [(String, Eigenvalue)], labels: &[&str], take_max: bool) -> (&'e str, &'e Eigenvalue) {
    let mut best: Option<(&str, &Eigenvalue)> = None;
    for (l, e) in evs.iter().filter(|(l, _)| labels.contains(&l.as_str())) {
        best = match best {
            None => Some((l, e)),
            Some((bl, be)) => {
                let better = if take_max { e.lambda > be.lambda } else { e.lambda < be.lambda };
                Some(if better { (l, e) } else { (bl, be) })
            }
        };
    }
    best.expect("at least one candidate")
}

/// Assembles the interval from `λ₁` and the `λ₂` candidates of each branch.
fn assemble(
    spec: &ProblemSpec,
    search: &Search,
    second: Vec<(&str, SpaceDescriptor)>,
    td: TdMode,
) -> Result<SignCharacterization> {
    let (n, k) = (spec.n, spec.k());
    let even = (n - k) % 2 == 0;
    let base = spec.base_space();
    let (dir1, dir2) = if even {
        (Direction::LeastPositive, Direction::BiggestNegative)
    } else {
        (Direction::BiggestNegative, Direction::LeastPositive)
    };
    let mut jobs = vec![("lambda_1", base, dir1)];
    let labels: Vec<&str> = second.iter().map(|(l, _)| *l).collect();
    jobs.extend(second.into_iter().map(|(l, s)| (l, s, dir2)));
    let evs = search.run(jobs)?;
    let hypothesis = hypothesis_status(spec, td, search.cfg.steps)?;
    let mut warnings = collect_warnings(&evs);
    if let HypothesisStatus::NotCertified { k, t } = hypothesis {
        warnings.push(format!(
            "disconjugacy not certified: Wronskian W{k} of the canonical basis is not positive at t = {t}"
        ));
    }
    let lambda1 = &evs[0].1;
    let m_bar = spec.m_bar;
    let (classification, lower, upper) = if even {
        let (l2, e2) = pick(&evs, &labels, true);
        (
            Classification::StronglyInversePositive,
            Bound::from(m_bar, "lambda_1", lambda1, false),
            Bound::from(m_bar, l2, e2, true),
        )
    } else if labels.is_empty() {
        (
            Classification::StronglyInverseNegative,
            Bound::minus_infinity(),
            Bound::from(m_bar, "lambda_1", lambda1, false),
        )
    } else {
        let (l2, e2) = pick(&evs, &labels, false);
        (
            Classification::StronglyInverseNegative,
            Bound::from(m_bar, l2, e2, true),
            Bound::from(m_bar, "lambda_1", lambda1, false),
        )
    };
    Ok(SignCharacterization {
        classification,
        lower,
        upper,
        eigenvalues: evs,
        hypothesis,
        necessary_only: false,
        warnings,
    })
}

/// Exact interval of `M` for strong inverse positivity (`n-k` even) or
/// negativity (`n-k` odd) in the base space.
pub fn constant_sign_interval(spec: &ProblemSpec, cfg: &SearchConfig, td: TdMode) -> Result<SignCharacterization> {
    let search = Search::new(spec, cfg)?;
    let (n, k) = (spec.n, spec.k());
    let mut second = Vec::new();
    // λ₂' needs k ≥ 2, λ₂'' needs n-k ≥ 2; n = 2 has neither
    if k >= 2 {
        second.push(("lambda_2'", search.space(SpaceVariant::DropSigmaKAddBeta)?));
    }
    if n - k >= 2 {
        second.push(("lambda_2''", search.space(SpaceVariant::AddAlphaDropEpsLast)?));
    }
    debug_assert!(n == 2 || !second.is_empty());
    assemble(spec, &search, second, td)
}

/// Interval containing every `M` with the opposite sign. `None` when that
/// sign is impossible.
pub fn necessary_interval(spec: &ProblemSpec, cfg: &SearchConfig, td: TdMode) -> Result<Option<SignCharacterization>> {
    let flags = nonexistence_check(spec);
    if flags.trigger.is_some() {
        return Ok(None);
    }
    let search = Search::new(spec, cfg)?;
    let even = (spec.n - spec.k()) % 2 == 0;
    let (dir1, dir3) = if even {
        (Direction::LeastPositive, Direction::LeastPositive)
    } else {
        (Direction::BiggestNegative, Direction::BiggestNegative)
    };
    let evs = search.run(vec![
        ("lambda_1", spec.base_space(), dir1),
        ("lambda_3'", search.space(SpaceVariant::DropSigmaKAddAlpha)?, dir3),
        ("lambda_3''", search.space(SpaceVariant::DropEpsLastAddBeta)?, dir3),
    ])?;
    let hypothesis = hypothesis_status(spec, td, cfg.steps)?;
    let mut warnings = collect_warnings(&evs);
    warnings.push("necessary condition only".to_string());
    let m_bar = spec.m_bar;
    let lambda1 = &evs[0].1;
    let labels = ["lambda_3'", "lambda_3''"];
    let (classification, lower, upper) = if even {
        let (l3, e3) = pick(&evs, &labels, false);
        (
            Classification::StronglyInverseNegative,
            Bound::from(m_bar, l3, e3, true),
            Bound::from(m_bar, "lambda_1", lambda1, false),
        )
    } else {
        let (l3, e3) = pick(&evs, &labels, true);
        (
            Classification::StronglyInversePositive,
            Bound::from(m_bar, "lambda_1", lambda1, false),
            Bound::from(m_bar, l3, e3, true),
        )
    };
    Ok(Some(SignCharacterization {
        classification,
        lower,
        upper,
        eigenvalues: evs,
        hypothesis,
        necessary_only: true,
        warnings,
    }))
}

/// `mu = None` lifts the bound on the second largest member, which is
/// admissible when the nested derivatives reduce to plain ones.
fn validate_subset(subset: &IndexSet, full: &IndexSet, mu: Option<i64>, name: &str) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::Subset(format!("{name} subset is empty")));
    }
    if let Some(x) = subset.as_slice().iter().find(|&&x| !full.contains(x)) {
        return Err(Error::Subset(format!("{x} is not a member of {name} = {full}")));
    }
    if subset.last() != full.last() {
        return Err(Error::Subset(format!(
            "the largest member of the {name} subset {subset} must be {}",
            full.last().unwrap()
        )));
    }
    let s = subset.as_slice();
    match mu {
        Some(mu) if s.len() >= 2 && s[s.len() - 2] as i64 > mu => Err(Error::Subset(format!(
            "{name} subset {subset}: second largest member {} exceeds mu = {mu}",
            s[s.len() - 2]
        ))),
        _ => Ok(()),
    }
}

/// Interval for the space where the conditions indexed by the subsets are
/// relaxed to sign conditions.
///
/// `sigma_subset ⊆ σ` and `epsilon_subset ⊆ ε` both contain their set's
/// largest member. Singleton subsets reproduce [`constant_sign_interval`].
pub fn nonhomogeneous_interval(
    spec: &ProblemSpec,
    sigma_subset: &IndexSet,
    epsilon_subset: &IndexSet,
    cfg: &SearchConfig,
    td: TdMode,
) -> Result<SignCharacterization> {
    let d = derive_indices(spec);
    let mu = (!spec.is_homogeneous_operator()).then_some(d.mu);
    validate_subset(sigma_subset, &spec.sigma, mu, "sigma")?;
    validate_subset(epsilon_subset, &spec.epsilon, mu, "epsilon")?;
    if sigma_subset.len() == 1 && epsilon_subset.len() == 1 {
        return constant_sign_interval(spec, cfg, td);
    }
    check_tilde_form(spec, d.mu)?;
    let search = Search::new(spec, cfg)?;
    let (n, k) = (spec.n, spec.k());
    let s1 = sigma_subset.first().unwrap();
    let e1 = epsilon_subset.first().unwrap();
    let sigma_space = || -> Result<SpaceDescriptor> {
        Ok(SpaceDescriptor {
            sigma: spec.sigma.without(s1),
            epsilon: spec.epsilon.with(d.beta, "epsilon")?,
        })
    };
    let eps_space = || -> Result<SpaceDescriptor> {
        Ok(SpaceDescriptor {
            sigma: spec.sigma.with(d.alpha, "sigma")?,
            epsilon: spec.epsilon.without(e1),
        })
    };
    let mut second = Vec::new();
    if k >= 2 {
        second.push(("lambda_sigma^2", sigma_space()?));
    }
    if n - k >= 2 {
        second.push(("lambda_epsilon^2", eps_space()?));
    }
    assemble(spec, &search, second, td)
}

/// `(π/(b-a))⁴ + p(π/(b-a))²`, the least positive eigenvalue of
/// `u'''' - p u''` with `u = u'' = 0` at both ends.
pub fn closed_form_shifted_eigen(p: f64, a: f64, b: f64) -> f64 {
    let q = PI / (b - a);
    q.powi(4) + p * q * q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, Expr};

    fn zero_spec(n: usize, sigma: &[usize], eps: &[usize]) -> ProblemSpec {
        ProblemSpec::new(
            0.0,
            1.0,
            vec![Expr::constant(0.0); n],
            0.0,
            IndexSet::new(sigma.to_vec()),
            IndexSet::new(eps.to_vec()),
        )
        .unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    #[test]
    fn fourth_order_interval() {
        let s = zero_spec(4, &[0, 2], &[1, 2]);
        let r = constant_sign_interval(&s, &SearchConfig::for_spec(&s), TdMode::Check).unwrap();
        assert_eq!(r.classification, Classification::StronglyInversePositive);
        assert!(rel(r.lower.value, -2.36502f64.powi(4)) < 4e-4);
        assert!(!r.lower.closed && r.upper.closed);
        assert!(rel(r.upper.value, 4.0 * PI.powi(4)) < 1e-8);
        assert_eq!(r.upper.source.as_deref(), Some("lambda_2''"));
        assert_eq!(r.hypothesis, HypothesisStatus::CertifiedByDecompose);
        assert_eq!(r.upper.value, s.m_bar - r.eigenvalue("lambda_2''").unwrap().lambda);
    }

    #[test]
    fn dirichlet_interval() {
        let s = zero_spec(2, &[0], &[0]);
        let r = constant_sign_interval(&s, &SearchConfig::for_spec(&s), TdMode::Assert).unwrap();
        assert_eq!(r.classification, Classification::StronglyInverseNegative);
        assert_eq!(r.lower.value, f64::NEG_INFINITY);
        assert!(rel(r.upper.value, PI * PI) < 1e-8 && !r.upper.closed);
        assert_eq!(r.hypothesis, HypothesisStatus::UserAsserted);
    }

    #[test]
    fn refuses_without_na() {
        let s = zero_spec(2, &[1], &[1]);
        assert_eq!(
            constant_sign_interval(&s, &SearchConfig::for_spec(&s), TdMode::Assert).unwrap_err(),
            Error::NaFailed
        );
    }

    #[test]
    fn nonexistence_flags() {
        let f = nonexistence_check(&zero_spec(4, &[0, 1], &[0, 1]));
        assert!(f.no_inverse_negative && !f.no_inverse_positive);
        let f = nonexistence_check(&zero_spec(3, &[1, 2], &[0]));
        assert!(f.no_inverse_positive && !f.no_inverse_negative);
        assert_eq!(f.trigger, Some(Trigger::EpsilonLast));
        let f = nonexistence_check(&zero_spec(4, &[0, 2], &[1, 2]));
        assert_eq!(f, NonexistenceFlags { no_inverse_negative: false, no_inverse_positive: false, trigger: None });
    }

    #[test]
    fn necessary_fourth_order() {
        let s = zero_spec(4, &[0, 2], &[1, 2]);
        let r = necessary_interval(&s, &SearchConfig::for_spec(&s), TdMode::Assert).unwrap().unwrap();
        assert!(r.necessary_only);
        assert!(rel(r.lower.value, -PI.powi(4)) < 1e-8 && r.lower.closed);
        assert!(rel(r.upper.value, -2.36502f64.powi(4)) < 4e-4 && !r.upper.closed);
        let s = zero_spec(4, &[0, 1], &[0, 1]);
        assert!(necessary_interval(&s, &SearchConfig::for_spec(&s), TdMode::Assert).unwrap().is_none());
    }

    #[test]
    fn subset_validation() {
        let s = zero_spec(4, &[0, 2], &[1, 3]);
        let cfg = SearchConfig::for_spec(&s);
        let bad = |a: &[usize], b: &[usize]| {
            nonhomogeneous_interval(&s, &IndexSet::new(a.to_vec()), &IndexSet::new(b.to_vec()), &cfg, TdMode::Assert)
                .unwrap_err()
        };
        assert!(matches!(bad(&[0], &[3]), Error::Subset(_)));
        assert!(matches!(bad(&[1, 2], &[3]), Error::Subset(_)));
        assert!(matches!(bad(&[], &[3]), Error::Subset(_)));
        let p = vec![Expr::constant(0.0), Expr::constant(1.0), Expr::constant(0.0), Expr::constant(0.0)];
        let s2 = ProblemSpec::new(0.0, 1.0, p, 0.0, IndexSet::new(vec![0, 2]), IndexSet::new(vec![1, 3])).unwrap();
        let e = nonhomogeneous_interval(&s2, &IndexSet::new(vec![0, 2]), &IndexSet::new(vec![3]), &cfg, TdMode::Assert)
            .unwrap_err();
        assert!(matches!(e, Error::TildeForm(_)));

        // mu = 1 here; the bound only binds when some coefficient is nonzero
        let p = vec![parse_expr("t").unwrap(), Expr::constant(0.0), Expr::constant(0.0), Expr::constant(0.0)];
        let s3 = ProblemSpec::new(0.0, 1.0, p, 0.0, IndexSet::new(vec![0, 2, 3]), IndexSet::new(vec![1])).unwrap();
        assert_eq!(derive_indices(&s3).mu, 1);
        let (sub, one) = (IndexSet::new(vec![2, 3]), IndexSet::new(vec![1]));
        let e = nonhomogeneous_interval(&s3, &sub, &one, &cfg, TdMode::Assert).unwrap_err();
        assert!(matches!(e, Error::Subset(_)));
        let z = zero_spec(4, &[0, 2, 3], &[1]);
        assert!(!matches!(nonhomogeneous_interval(&z, &sub, &one, &cfg, TdMode::Assert), Err(Error::Subset(_))));
    }

    #[test]
    fn third_order_interval() {
        let s = zero_spec(3, &[1, 2], &[0]);
        let r = constant_sign_interval(&s, &SearchConfig::for_spec(&s), TdMode::Assert).unwrap();
        assert_eq!(r.classification, Classification::StronglyInverseNegative);
        assert!(rel(r.lower.value, -3.017f64.powi(3)) < 3e-3 && r.lower.closed);
        assert!(rel(r.upper.value, 1.85f64.powi(3)) < 3e-3 && !r.upper.closed);
    }

    #[test]
    fn sixth_order_intervals() {
        let s = zero_spec(6, &[0, 2, 4], &[0, 2, 4]);
        let cfg = SearchConfig::for_spec(&s);
        let r = constant_sign_interval(&s, &cfg, TdMode::Assert).unwrap();
        assert_eq!(r.classification, Classification::StronglyInverseNegative);
        assert!(rel(r.lower.value, -5.47916f64.powi(6)) < 6e-4);
        assert!(rel(r.upper.value, PI.powi(6)) < 1e-8);
        let sub = IndexSet::new(vec![2, 4]);
        let r = nonhomogeneous_interval(&s, &sub, &sub, &cfg, TdMode::Assert).unwrap();
        assert!(rel(r.lower.value, -4.14577f64.powi(6)) < 6e-4 && r.lower.closed);
        assert!(rel(r.upper.value, PI.powi(6)) < 1e-8);
    }

    #[test]
    fn relaxed_fourth_order() {
        let s = zero_spec(4, &[0, 2], &[1, 3]);
        let cfg = SearchConfig::for_spec(&s);
        let r = nonhomogeneous_interval(&s, &IndexSet::new(vec![0, 2]), &IndexSet::new(vec![1, 3]), &cfg, TdMode::Assert)
            .unwrap();
        assert_eq!(r.classification, Classification::StronglyInversePositive);
        assert!(rel(r.lower.value, -PI.powi(4) / 16.0) < 1e-8);
        assert!(rel(r.upper.value, PI.powi(4) / 4.0) < 1e-8);
        let single = nonhomogeneous_interval(&s, &IndexSet::new(vec![2]), &IndexSet::new(vec![3]), &cfg, TdMode::Assert)
            .unwrap();
        assert_eq!(single, constant_sign_interval(&s, &cfg, TdMode::Assert).unwrap());
    }

    #[test]
    fn shifted_closed_form() {
        assert_eq!(closed_form_shifted_eigen(0.0, 0.0, 1.0), PI.powi(4));
        assert!((closed_form_shifted_eigen(10.0, 0.0, 1.0) - 196.1052).abs() < 1e-3);
        let q = PI / 2.0;
        assert_eq!(closed_form_shifted_eigen(1.0, 0.0, 2.0), q.powi(4) + q * q);
    }
}

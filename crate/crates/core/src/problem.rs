//! Problem specification, boundary index sets and the indices derived from them.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::Expr;

/// A strictly increasing set of derivative orders.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Sorts and deduplicates.
    pub fn new(mut v: Vec<usize>) -> IndexSet {
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }

    /// Accepts only an already strictly increasing sequence.
    pub fn strict(v: Vec<usize>) -> Result<IndexSet> {
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidProblem(format!(
                "index set {v:?} is not strictly increasing"
            )));
        }
        Ok(IndexSet(v))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    /// Number of members strictly below `h`.
    pub fn count_below(&self, h: usize) -> usize {
        self.0.partition_point(|&x| x < h)
    }

    /// Smallest index not in the set.
    pub fn first_gap(&self) -> usize {
        (0..).find(|&i| !self.contains(i)).unwrap()
    }

    /// Largest index `g` not in the set with `g+1 ..= last` all members;
    /// `-1` when the set is `{0, .., len-1}`.
    pub fn last_gap(&self) -> i64 {
        let Some(mut g) = self.last().map(|l| l as i64) else {
            return -1;
        };
        while g >= 0 && self.contains(g as usize) {
            g -= 1;
        }
        g
    }

    /// The set `{n-1-c : c in 0..n, c not in self}` in ascending order.
    pub fn reflected_complement(&self, n: usize) -> IndexSet {
        IndexSet::new((0..n).filter(|&c| !self.contains(c)).map(|c| n - 1 - c).collect())
    }

    pub fn with(&self, i: usize, side: &'static str) -> Result<IndexSet> {
        if self.contains(i) {
            return Err(Error::Collision { index: i, side });
        }
        let mut v = self.0.clone();
        v.push(i);
        Ok(IndexSet::new(v))
    }

    pub fn without(&self, i: usize) -> IndexSet {
        IndexSet(self.0.iter().copied().filter(|&x| x != i).collect())
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Property (N_a): for every `h` in `1..n`, `#{σ < h} + #{ε < h} ≥ h`.
pub fn check_na(sigma: &IndexSet, epsilon: &IndexSet, n: usize) -> bool {
    (1..n).all(|h| sigma.count_below(h) + epsilon.count_below(h) >= h)
}

/// Order `n`, interval, coefficients `p₁..pₙ`, reference shift and boundary sets.
///
/// `p[j-1]` multiplies `u^(n-j)`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub p: Vec<Expr>,
    pub m_bar: f64,
    pub sigma: IndexSet,
    pub epsilon: IndexSet,
}

impl ProblemSpec {
    pub fn new(
        a: f64,
        b: f64,
        p: Vec<Expr>,
        m_bar: f64,
        sigma: IndexSet,
        epsilon: IndexSet,
    ) -> Result<ProblemSpec> {
        let n = p.len();
        if n < 2 {
            return Err(Error::InvalidProblem(format!("order {n} is below 2")));
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidProblem(format!("interval [{a}, {b}] is not valid")));
        }
        if !m_bar.is_finite() {
            return Err(Error::InvalidProblem("m_bar is not finite".into()));
        }
        let k = sigma.len();
        if k < 1 || k > n - 1 {
            return Err(Error::InvalidProblem(format!(
                "sigma has {k} conditions, expected 1..={}",
                n - 1
            )));
        }
        if epsilon.len() != n - k {
            return Err(Error::InvalidProblem(format!(
                "epsilon has {} conditions, expected {}",
                epsilon.len(),
                n - k
            )));
        }
        if sigma.as_slice().iter().chain(epsilon.as_slice()).any(|&i| i >= n) {
            return Err(Error::InvalidProblem(format!("boundary index out of 0..{n}")));
        }
        let spec = ProblemSpec {
            n,
            a,
            b,
            p,
            m_bar,
            sigma,
            epsilon,
        };
        spec.check_coefficients()?;
        Ok(spec)
    }

    /// Spot-checks `p_j` and its first `n-j` derivatives on 64 points.
    fn check_coefficients(&self) -> Result<()> {
        for (j, pj) in self.p.iter().enumerate() {
            let mut d = pj.clone();
            for order in 0..=(self.n - j - 1) {
                for i in 0..64 {
                    let t = self.a + (self.b - self.a) * i as f64 / 63.0;
                    d.eval(t).map_err(|e| {
                        Error::InvalidProblem(format!(
                            "derivative {order} of p{} at t = {t}: {e}",
                            j + 1
                        ))
                    })?;
                }
                d = d.differentiate();
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    pub fn na(&self) -> bool {
        check_na(&self.sigma, &self.epsilon, self.n)
    }

    pub fn base_space(&self) -> SpaceDescriptor {
        SpaceDescriptor {
            sigma: self.sigma.clone(),
            epsilon: self.epsilon.clone(),
        }
    }

    /// Copy of this problem with other boundary sets.
    pub fn with_space(&self, space: &SpaceDescriptor) -> ProblemSpec {
        ProblemSpec {
            sigma: space.sigma.clone(),
            epsilon: space.epsilon.clone(),
            ..self.clone()
        }
    }

    /// True when all coefficients are the literal constant 0.
    pub fn is_homogeneous_operator(&self) -> bool {
        self.p.iter().all(Expr::is_zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedIndices {
    pub alpha: usize,
    pub beta: usize,
    pub eta: usize,
    pub gamma: usize,
    pub tau: IndexSet,
    pub delta: IndexSet,
    pub alpha2: i64,
    pub beta2: i64,
    pub mu: i64,
}

pub fn derive_indices(spec: &ProblemSpec) -> DerivedIndices {
    let n = spec.n;
    let sigma_k = spec.sigma.last().expect("sigma is non-empty");
    let eps_last = spec.epsilon.last().expect("epsilon is non-empty");
    let alpha = spec.sigma.first_gap();
    let beta = spec.epsilon.first_gap();
    let tau = spec.sigma.reflected_complement(n);
    let delta = spec.epsilon.reflected_complement(n);
    debug_assert_eq!(Some(n - 1 - alpha), tau.last());
    debug_assert_eq!(Some(n - 1 - beta), delta.last());
    let alpha2 = spec.sigma.last_gap();
    let beta2 = spec.epsilon.last_gap();
    DerivedIndices {
        alpha,
        beta,
        eta: n - 1 - sigma_k,
        gamma: n - 1 - eps_last,
        tau,
        delta,
        alpha2,
        beta2,
        mu: alpha2.max(beta2),
    }
}

/// Boundary sets describing the base space or one of its modifications.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceDescriptor {
    pub sigma: IndexSet,
    pub epsilon: IndexSet,
}

impl SpaceDescriptor {
    /// Unit functionals `u^(σ)(a)` and `u^(ε)(b)`.
    pub fn functionals(&self, n: usize) -> Vec<BoundaryFunctional> {
        let at = |endpoint, i: usize| {
            let mut c = vec![0.0; n];
            c[i] = 1.0;
            BoundaryFunctional {
                endpoint,
                coefficients: c,
            }
        };
        self.sigma
            .as_slice()
            .iter()
            .map(|&i| at(Endpoint::A, i))
            .chain(self.epsilon.as_slice().iter().map(|&i| at(Endpoint::B, i)))
            .collect()
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X_{}^{}", self.sigma, self.epsilon)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceVariant {
    Base,
    /// Remove `σ_k` from σ and add β to ε.
    DropSigmaKAddBeta,
    /// Add α to σ and remove `ε_{n-k}` from ε.
    AddAlphaDropEpsLast,
    /// Replace `σ_k` by α. Unavailable when `σ_k = k-1`.
    DropSigmaKAddAlpha,
    /// Replace `ε_{n-k}` by β. Unavailable when `ε_{n-k} = n-k-1`.
    DropEpsLastAddBeta,
    Custom(IndexSet, IndexSet),
}

impl SpaceVariant {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceVariant::Base => "base",
            SpaceVariant::DropSigmaKAddBeta => "drop-sigma-add-beta",
            SpaceVariant::AddAlphaDropEpsLast => "add-alpha-drop-eps",
            SpaceVariant::DropSigmaKAddAlpha => "drop-sigma-add-alpha",
            SpaceVariant::DropEpsLastAddBeta => "drop-eps-add-beta",
            SpaceVariant::Custom(..) => "custom",
        }
    }
}

pub fn build_space(spec: &ProblemSpec, variant: &SpaceVariant) -> Result<SpaceDescriptor> {
    let n = spec.n;
    let k = spec.k();
    let d = derive_indices(spec);
    let sigma_k = spec.sigma.last().unwrap();
    let eps_last = spec.epsilon.last().unwrap();
    let (sigma, epsilon) = match variant {
        SpaceVariant::Base => (spec.sigma.clone(), spec.epsilon.clone()),
        SpaceVariant::DropSigmaKAddBeta => (
            spec.sigma.without(sigma_k),
            spec.epsilon.with(d.beta, "epsilon")?,
        ),
        SpaceVariant::AddAlphaDropEpsLast => (
            spec.sigma.with(d.alpha, "sigma")?,
            spec.epsilon.without(eps_last),
        ),
        SpaceVariant::DropSigmaKAddAlpha => {
            if sigma_k == k - 1 {
                return Err(Error::ExcludedSpace(format!(
                    "replacing sigma_k by alpha requires sigma_k != k-1 (sigma = {})",
                    spec.sigma
                )));
            }
            (
                spec.sigma.without(sigma_k).with(d.alpha, "sigma")?,
                spec.epsilon.clone(),
            )
        }
        SpaceVariant::DropEpsLastAddBeta => {
            if eps_last == n - k - 1 {
                return Err(Error::ExcludedSpace(format!(
                    "replacing the last epsilon by beta requires it to differ from n-k-1 (epsilon = {})",
                    spec.epsilon
                )));
            }
            (
                spec.sigma.clone(),
                spec.epsilon.without(eps_last).with(d.beta, "epsilon")?,
            )
        }
        SpaceVariant::Custom(s, e) => {
            if s.len() + e.len() != n {
                return Err(Error::InvalidProblem(format!(
                    "space {s}/{e} has {} conditions, expected {n}",
                    s.len() + e.len()
                )));
            }
            if s.as_slice().iter().chain(e.as_slice()).any(|&i| i >= n) {
                return Err(Error::InvalidProblem(format!("boundary index out of 0..{n}")));
            }
            (s.clone(), e.clone())
        }
    };
    Ok(SpaceDescriptor { sigma, epsilon })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Endpoint {
    A,
    B,
}

/// `Σ c_i v^(i)(endpoint) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunctional {
    pub endpoint: Endpoint,
    pub coefficients: Vec<f64>,
}

impl BoundaryFunctional {
    /// Highest order with a nonzero coefficient.
    pub fn leading_order(&self) -> usize {
        self.coefficients.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Raw adjoint functional of order `order` at `t0`, before reduction.
///
/// `v^(order) + Σ_{j=n-order}^{n-1} (-1)^{n-j} (p_{n-j} v)^(order+j-n)`,
/// expanded by Leibniz' rule.
fn raw_adjoint_functional(
    spec: &ProblemSpec,
    derivs: &[Vec<Expr>],
    order: usize,
    t0: f64,
) -> Result<Vec<f64>> {
    let n = spec.n;
    let mut c = vec![0.0; n];
    c[order] = 1.0;
    for j in (n - order)..n {
        let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
        let m = order + j - n;
        let pd = &derivs[n - j - 1];
        for l in 0..=m {
            let v = pd[m - l].eval(t0)?;
            c[l] += sign * binomial(m, l) * v;
        }
    }
    Ok(c)
}

/// Boundary functionals of the adjoint problem: one at `a` per τ, one at `b` per δ.
///
/// Functionals at the same endpoint are brought to reduced echelon form, so
/// each one has coefficient 1 at its own leading order and 0 at the leading
/// orders of the others.
pub fn adjoint_boundary_conditions(spec: &ProblemSpec) -> Result<Vec<BoundaryFunctional>> {
    let n = spec.n;
    let d = derive_indices(spec);
    // derivs[j-1][m] = m-th derivative of p_j, m < n
    let derivs: Vec<Vec<Expr>> = spec
        .p
        .iter()
        .map(|pj| {
            let mut v = vec![pj.clone()];
            for _ in 1..n {
                let next = v.last().unwrap().differentiate();
                v.push(next);
            }
            v
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for (endpoint, t0, orders) in [(Endpoint::A, spec.a, &d.tau), (Endpoint::B, spec.b, &d.delta)] {
        let mut reduced: Vec<(usize, Vec<f64>)> = Vec::new();
        for &order in orders.as_slice() {
            let mut c = raw_adjoint_functional(spec, &derivs, order, t0)?;
            for (lead, row) in reduced.iter().rev() {
                let f = c[*lead];
                if f != 0.0 {
                    for (ci, ri) in c.iter_mut().zip(row) {
                        *ci -= f * ri;
                    }
                    c[*lead] = 0.0;
                }
            }
            reduced.push((order, c));
        }
        // rows vanish above their own leading order, so one pass suffices
        out.extend(reduced.into_iter().map(|(_, coefficients)| BoundaryFunctional {
            endpoint,
            coefficients,
        }));
    }
    Ok(out)
}

/// Coefficients `q₁..qₙ` of the monic operator `(-1)ⁿ T*`, where
/// `T*v = (-1)ⁿv^(n) + Σ_{j=1}^{n-1} (-1)^j (p_{n-j} v)^(j) + pₙ v`.
///
/// `T*_n[M]` equals `(-1)ⁿ` times this operator shifted by `(-1)ⁿ M`.
pub fn adjoint_operator(spec: &ProblemSpec) -> Vec<Expr> {
    let n = spec.n;
    let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
    // c[i] multiplies v^(i)
    let mut c: Vec<Expr> = vec![Expr::constant(0.0); n];
    c[0] = spec.p[n - 1].clone();
    for j in 1..n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let mut d = spec.p[n - j - 1].clone();
        let mut derivs = vec![d.clone()];
        for _ in 0..j {
            d = d.differentiate();
            derivs.push(d.clone());
        }
        for (i, ci) in c.iter_mut().enumerate().take(j + 1) {
            let term = derivs[j - i].clone().scale(sign * binomial(j, i));
            *ci = ci.clone().add(term);
        }
    }
    (1..=n).map(|j| c[n - j].clone().scale(parity)).collect()
}

/// Coefficients `α_i^j`, `i = 0..j`, of the Green's matrix rows.
pub fn greens_matrix_coeffs(spec: &ProblemSpec, j: usize) -> Result<Vec<Expr>> {
    if j < 1 || j >= spec.n {
        return Err(Error::Range(format!("j = {j} outside 1..{}", spec.n)));
    }
    let mut cur = vec![Expr::constant(0.0)];
    for step in 0..j {
        let mut next = Vec::with_capacity(step + 1);
        next.push(spec.p[step].clone().sub(cur[0].differentiate()));
        for i in 1..=step {
            let prev_i = if i < cur.len() { cur[i].differentiate() } else { Expr::constant(0.0) };
            next.push(Expr::neg(cur[i - 1].clone().add(prev_i)));
        }
        cur = next;
    }
    Ok(cur)
}

/// Checks that `p_{n-μ}, .., p_n` are literally zero.
pub fn check_tilde_form(spec: &ProblemSpec, mu: i64) -> Result<()> {
    if mu < 0 {
        return Ok(());
    }
    let n = spec.n as i64;
    for j in (n - mu).max(1)..=n {
        if !spec.p[(j - 1) as usize].is_zero() {
            return Err(Error::TildeForm(format!(
                "p{j} = {} must be 0 when mu = {mu}",
                spec.p[(j - 1) as usize]
            )));
        }
    }
    Ok(())
}

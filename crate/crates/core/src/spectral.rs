//! Characteristic determinants and extreme eigenvalues.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ode::{CoefficientTable, FundamentalSystem, LinearOperator, DEFAULT_STEPS};
use crate::problem::{adjoint_boundary_conditions, adjoint_operator, BoundaryFunctional, Endpoint, ProblemSpec, SpaceDescriptor};

/// A monic operator, its boundary functionals and the sign relating the
/// user shift `M` to the operator shift.
#[derive(Debug, Clone)]
pub struct BoundaryProblem {
    pub table: Arc<CoefficientTable>,
    pub functionals: Vec<BoundaryFunctional>,
    pub shift_sign: f64,
}

impl BoundaryProblem {
    pub fn new(table: Arc<CoefficientTable>, functionals: Vec<BoundaryFunctional>) -> BoundaryProblem {
        BoundaryProblem {
            table,
            functionals,
            shift_sign: 1.0,
        }
    }

    pub fn for_space(spec: &ProblemSpec, space: &SpaceDescriptor, steps: usize) -> Result<BoundaryProblem> {
        let table = CoefficientTable::new(LinearOperator::from_spec(spec), steps)?;
        Ok(BoundaryProblem::new(Arc::new(table), space.functionals(spec.n)))
    }

    /// Same operator, other boundary sets.
    pub fn with_space(&self, space: &SpaceDescriptor) -> BoundaryProblem {
        BoundaryProblem::new(self.table.clone(), space.functionals(self.n()))
    }

    /// The monic form of the adjoint problem with the adjoint functionals.
    pub fn adjoint(spec: &ProblemSpec, steps: usize) -> Result<BoundaryProblem> {
        let op = LinearOperator {
            a: spec.a,
            b: spec.b,
            p: adjoint_operator(spec),
        };
        let table = CoefficientTable::new(op, steps)?;
        Ok(BoundaryProblem {
            table: Arc::new(table),
            functionals: adjoint_boundary_conditions(spec)?,
            shift_sign: if spec.n % 2 == 0 { 1.0 } else { -1.0 },
        })
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn fundamental(&self, m: f64) -> Result<FundamentalSystem> {
        FundamentalSystem::integrate(self.table.clone(), self.shift_sign * m)
    }

    /// Row `i` is functional `i` applied to every fundamental column.
    pub fn boundary_matrix(&self, fs: &FundamentalSystem) -> DMatrix<f64> {
        let n = self.n();
        let at_a = fs.snapshot_matrix(0);
        let at_b = fs.snapshot_matrix(fs.steps());
        let mut m = DMatrix::zeros(self.functionals.len(), n);
        for (i, f) in self.functionals.iter().enumerate() {
            let s = if f.endpoint == Endpoint::A { &at_a } else { &at_b };
            for j in 0..n {
                m[(i, j)] = (0..n).map(|l| f.coefficients[l] * s[(l, j)]).sum();
            }
        }
        m
    }

    /// Boundary matrix with each column divided by the max-norm of the
    /// fundamental solution's data at both endpoints.
    pub fn normalized_boundary_matrix(&self, fs: &FundamentalSystem) -> DMatrix<f64> {
        let mut m = self.boundary_matrix(fs);
        let at_b = fs.snapshot_matrix(fs.steps());
        for j in 0..self.n() {
            let scale = at_b.column(j).amax().max(1.0);
            m.column_mut(j).scale_mut(1.0 / scale);
        }
        m
    }

    /// Normalized characteristic determinant at shift `m`.
    pub fn det(&self, m: f64) -> Result<f64> {
        let fs = self.fundamental(m)?;
        Ok(self.normalized_boundary_matrix(&fs).determinant())
    }
}

/// Determinant of the boundary conditions of `space` applied to the
/// fundamental system of `T_n[M]`, columns normalized.
pub fn characteristic_det(spec: &ProblemSpec, space: &SpaceDescriptor, m: f64) -> Result<f64> {
    BoundaryProblem::for_space(spec, space, DEFAULT_STEPS)?.det(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LeastPositive,
    BiggestNegative,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::LeastPositive => "least-positive",
            Direction::BiggestNegative => "biggest-negative",
        }
    }

    fn sign(self) -> f64 {
        match self {
            Direction::LeastPositive => 1.0,
            Direction::BiggestNegative => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub lambda_max: f64,
    pub grid_points: usize,
    pub refine_tol: f64,
    pub steps: usize,
}

impl SearchConfig {
    pub fn for_problem(n: usize, a: f64, b: f64) -> SearchConfig {
        SearchConfig {
            lambda_max: (12.0 * PI / (b - a)).powi(n as i32),
            grid_points: 4000,
            refine_tol: 1e-12,
            steps: DEFAULT_STEPS,
        }
    }

    pub fn for_spec(spec: &ProblemSpec) -> SearchConfig {
        SearchConfig::for_problem(spec.n, spec.a, spec.b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_max > 0.0 && self.lambda_max.is_finite()) {
            return Err(Error::Input(format!("lambda_max = {} must be positive", self.lambda_max)));
        }
        if self.grid_points == 0 {
            return Err(Error::Input("grid_points must be positive".into()));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::Input(format!("refine_tol = {} must be positive", self.refine_tol)));
        }
        if self.steps < 64 {
            return Err(Error::Input(format!("steps = {} is below 64", self.steps)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvalue {
    pub lambda: f64,
    /// `None` for the adjoint problem.
    pub space: Option<SpaceDescriptor>,
    pub direction: Direction,
    pub bracket: (f64, f64),
    pub residual: f64,
    pub simple: bool,
    pub warnings: Vec<String>,
}

const SCAN_CHUNK: usize = 64;

/// Closest root to 0 of `λ ↦ Δ(M̄ - λ)` in `direction`.
///
/// The scan grid is uniform in `|λ|^(1/n)`, which spaces the eigenvalues of
/// the model operators roughly evenly.
pub fn find_root(
    bvp: &BoundaryProblem,
    m_bar: f64,
    direction: Direction,
    cfg: &SearchConfig,
) -> Result<Eigenvalue> {
    cfg.validate()?;
    let n = bvp.n() as f64;
    let sgn = direction.sign();
    let r_max = cfg.lambda_max.powf(1.0 / n);
    let lambda_at = |i: usize| {
        if i == cfg.grid_points {
            sgn * cfg.lambda_max
        } else {
            sgn * (r_max * i as f64 / cfg.grid_points as f64).powf(n)
        }
    };
    let delta = |lambda: f64| bvp.det(m_bar - lambda);

    let mut warnings = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    let mut history: Vec<f64> = Vec::new();
    let mut scale: f64 = 0.0;
    let mut start = 0;
    let mut bracket = None;
    'scan: while start <= cfg.grid_points {
        let end = (start + SCAN_CHUNK).min(cfg.grid_points + 1);
        let vals: Vec<Result<f64>> = (start..end).into_par_iter().map(|i| delta(lambda_at(i))).collect();
        for (i, v) in (start..end).zip(vals) {
            let lam = lambda_at(i);
            let d = v?;
            scale = scale.max(d.abs());
            if let Some((pl, pd)) = prev {
                if d == 0.0 {
                    bracket = Some((lam, lam, d));
                    break 'scan;
                }
                if pd.signum() != d.signum() && pd != 0.0 {
                    bracket = Some((pl, lam, d));
                    break 'scan;
                }
            }
            history.push(d.abs());
            let h = history.len();
            if h >= 3 {
                let (x, y, z) = (history[h - 3], history[h - 2], history[h - 1]);
                if y < x && y < z && y < 1e-8 * scale {
                    warnings.push(format!(
                        "|det| dips to {y:e} near lambda = {} without a sign change; possible even-multiplicity eigenvalue",
                        lambda_at(i - 1)
                    ));
                }
            }
            prev = Some((lam, d));
        }
        start = end;
    }
    let Some((lo0, hi0, _)) = bracket else {
        let (lo, hi) = if sgn > 0.0 { (0.0, cfg.lambda_max) } else { (-cfg.lambda_max, 0.0) };
        return Err(Error::NotFound { lo, hi });
    };
    let (mut lo, mut hi) = (lo0, hi0);
    let mut d_lo = delta(lo)?;
    while (hi - lo).abs() > cfg.refine_tol * lo.abs().max(hi.abs()).max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let d_mid = delta(mid)?;
        if d_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if d_mid.signum() == d_lo.signum() {
            lo = mid;
            d_lo = d_mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let residual = delta(lambda)?.abs();
    let bracket = if lo <= hi { (lo, hi) } else { (hi, lo) };
    Ok(Eigenvalue {
        lambda,
        space: None,
        direction,
        bracket,
        residual,
        simple: true,
        warnings,
    })
}

/// Least positive or biggest negative eigenvalue of `T_n[M̄]` in `space`.
pub fn find_eigenvalue(
    spec: &ProblemSpec,
    space: &SpaceDescriptor,
    direction: Direction,
    cfg: &SearchConfig,
) -> Result<Eigenvalue> {
    let bvp = BoundaryProblem::for_space(spec, space, cfg.steps)?;
    let mut ev = find_root(&bvp, spec.m_bar, direction, cfg)?;
    ev.space = Some(space.clone());
    Ok(ev)
}

/// Eigenvalue search on the adjoint problem of the base space.
pub fn find_adjoint_eigenvalue(spec: &ProblemSpec, direction: Direction, cfg: &SearchConfig) -> Result<Eigenvalue> {
    let bvp = BoundaryProblem::adjoint(spec, cfg.steps)?;
    find_root(&bvp, spec.m_bar, direction, cfg)
}

/// A function sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl Sampled {
    /// True when no interior sample has the opposite sign of the largest one.
    pub fn has_constant_sign_inside(&self, tol: f64) -> bool {
        let len = self.values.len();
        let inner = &self.values[1..len.saturating_sub(1)];
        inner.iter().all(|&v| v >= -tol) || inner.iter().all(|&v| v <= tol)
    }
}

pub(crate) fn uniform_grid(a: f64, b: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| {
            if i + 1 == points {
                b
            } else {
                a + (b - a) * i as f64 / (points - 1) as f64
            }
        })
        .collect()
}

/// Coefficients of a nontrivial solution of `B c = 0`.
pub(crate) fn null_vector(m: &DMatrix<f64>, max_ratio: f64) -> Result<DVector<f64>> {
    let svd = m.clone().svd(false, true);
    let s = &svd.singular_values;
    let (imin, smin) = s.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let smax = s.max();
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if ratio > max_ratio {
        return Err(Error::NotEigenvalue { ratio });
    }
    let vt = svd.v_t.expect("requested");
    Ok(vt.row(imin).transpose())
}

/// Eigenfunction at `lambda`, normalized to max-norm 1 and positive at the
/// midpoint when it does not vanish there.
pub fn eigenfunction(spec: &ProblemSpec, space: &SpaceDescriptor, lambda: f64, points: usize) -> Result<Sampled> {
    let bvp = BoundaryProblem::for_space(spec, space, DEFAULT_STEPS)?;
    eigenfunction_of(&bvp, spec.m_bar - lambda, points)
}

pub fn eigenfunction_of(bvp: &BoundaryProblem, m: f64, points: usize) -> Result<Sampled> {
    if points < 2 {
        return Err(Error::Range("at least two sample points are needed".into()));
    }
    let fs = bvp.fundamental(m)?;
    let c = null_vector(&bvp.normalized_boundary_matrix(&fs), 1e-6)?;
    let at_b = fs.snapshot_matrix(fs.steps());
    let c: Vec<f64> = (0..bvp.n()).map(|j| c[j] / at_b.column(j).amax().max(1.0)).collect();
    let t = uniform_grid(fs.a(), fs.b(), points);
    let mut values = Vec::with_capacity(points);
    for &ti in &t {
        let s = fs.state_at(ti)?;
        values.push((0..bvp.n()).map(|j| c[j] * s[(0, j)]).sum::<f64>());
    }
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mid = fs.state_at(0.5 * (fs.a() + fs.b()))?;
    let mid_val: f64 = (0..bvp.n()).map(|j| c[j] * mid[(0, j)]).sum();
    let sign = if mid_val < -1e-12 * max { -1.0 } else { 1.0 };
    let values = values.into_iter().map(|v| sign * v / max).collect();
    Ok(Sampled { t, values })
}

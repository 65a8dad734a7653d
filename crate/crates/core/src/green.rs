//! Green's functions on a grid, their boundary slices and sign classification.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ode::{FundamentalSystem, DEFAULT_STEPS};
use crate::problem::{derive_indices, BoundaryFunctional, DerivedIndices, Endpoint, IndexSet, ProblemSpec};
use crate::spectral::{uniform_grid, BoundaryProblem, Sampled};

/// Below this ratio of extreme singular values the problem counts as singular.
const SINGULAR_RATIO: f64 = 1e-10;

/// A fundamental system together with the factorized boundary matrix.
pub struct GreenSolver {
    pub bvp: BoundaryProblem,
    pub fs: FundamentalSystem,
    boundary: DMatrix<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

/// One column `t ↦ g(t, s)`: `Φ(t)·c⁻` for `t < s`, `Φ(t)·c⁺` for `t ≥ s`.
#[derive(Debug, Clone)]
pub struct GreenColumn {
    pub s: f64,
    pub c_minus: DVector<f64>,
    pub c_plus: DVector<f64>,
    pub jump_residual: f64,
    pub bc_residual: f64,
}

fn apply(f: &BoundaryFunctional, state: &DMatrix<f64>, c: &DVector<f64>) -> f64 {
    let v = state * c;
    f.coefficients.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
}

impl GreenSolver {
    pub fn new(bvp: BoundaryProblem, m: f64) -> Result<GreenSolver> {
        let fs = bvp.fundamental(m)?;
        let normalized = bvp.normalized_boundary_matrix(&fs);
        let sv = normalized.singular_values();
        let ratio = sv.min() / sv.max();
        if !(ratio > SINGULAR_RATIO) {
            return Err(Error::Singular {
                det: normalized.determinant(),
            });
        }
        let boundary = bvp.boundary_matrix(&fs);
        let lu = boundary.clone().lu();
        Ok(GreenSolver { bvp, fs, boundary, lu })
    }

    pub fn for_base(spec: &ProblemSpec, m: f64, steps: usize) -> Result<GreenSolver> {
        GreenSolver::new(BoundaryProblem::for_space(spec, &spec.base_space(), steps)?, m)
    }

    pub fn n(&self) -> usize {
        self.bvp.n()
    }

    /// Solves the patching system at `s`: boundary conditions, continuity of
    /// derivatives `0..n-2` and a unit jump in derivative `n-1`.
    pub fn column(&self, s: f64) -> Result<GreenColumn> {
        let n = self.n();
        let phi_s = self.fs.state_at(s)?;
        let mut e = DVector::zeros(n);
        e[n - 1] = 1.0;
        let d = phi_s
            .clone()
            .lu()
            .solve(&e)
            .ok_or(Error::Singular { det: 0.0 })?;
        let at_b = self.fs.snapshot_matrix(self.fs.steps());
        let rhs = DVector::from_iterator(
            n,
            self.bvp.functionals.iter().map(|f| match f.endpoint {
                Endpoint::A => 0.0,
                Endpoint::B => -apply(f, &at_b, &d),
            }),
        );
        let c_minus = self.lu.solve(&rhs).ok_or(Error::Singular { det: 0.0 })?;
        let c_plus = &c_minus + &d;

        let jump = &phi_s * (&c_plus - &c_minus);
        let mut jump_residual: f64 = (jump[n - 1] - 1.0).abs();
        for i in 0..n - 1 {
            jump_residual = jump_residual.max(jump[i].abs());
        }
        let at_a = self.fs.snapshot_matrix(0);
        let scale = c_minus.amax().max(c_plus.amax()).max(1.0);
        let bc_residual = self
            .bvp
            .functionals
            .iter()
            .map(|f| match f.endpoint {
                Endpoint::A => apply(f, &at_a, &c_minus),
                Endpoint::B => apply(f, &at_b, &c_plus),
            })
            .fold(0.0f64, |m, r| m.max(r.abs()))
            / scale;
        Ok(GreenColumn {
            s,
            c_minus,
            c_plus,
            jump_residual,
            bc_residual,
        })
    }

    /// Solution of the homogeneous equation with `functional[i] = rhs[i]`.
    pub fn solve_boundary_data(&self, rhs: &[f64]) -> Result<DVector<f64>> {
        let r = DVector::from_column_slice(rhs);
        let c = self.lu.solve(&r).ok_or(Error::Singular { det: 0.0 })?;
        debug_assert!((&self.boundary * &c - r).amax() < 1e-6 * c.amax().max(1.0));
        Ok(c)
    }

    /// `d`-th derivative of `Φ(t)·c`.
    pub fn eval(&self, c: &DVector<f64>, t: f64, d: usize) -> Result<f64> {
        let jet = self.fs.jet_at(t)?;
        Ok((0..self.n()).map(|j| jet[(d, j)] * c[j]).sum())
    }
}

impl GreenColumn {
    pub fn coefficients_at(&self, t: f64) -> &DVector<f64> {
        if t < self.s {
            &self.c_minus
        } else {
            &self.c_plus
        }
    }
}

/// Sampled Green's function with boundary slices.
#[derive(Debug, Clone)]
pub struct GreenFunction {
    pub m: f64,
    pub t_grid: Vec<f64>,
    pub s_grid: Vec<f64>,
    /// Row-major: `values[i * s_grid.len() + j]` is `g(t_i, s_j)`.
    pub values: Vec<f64>,
    /// `∂^α_t g(a, s)` over `s_grid`.
    pub d_alpha_at_a: Vec<f64>,
    /// `∂^β_t g(b, s)` over `s_grid`.
    pub d_beta_at_b: Vec<f64>,
    /// `w_M(t)` over `t_grid`.
    pub d_eta_at_sa: Vec<f64>,
    /// `y_M(t)` over `t_grid`.
    pub d_gamma_at_sb: Vec<f64>,
    /// Sign of `w_M` and `y_M` just inside `a` and `b`, read off the first
    /// non-vanishing Taylor coefficient; `0` when the jet vanishes.
    /// Order: `w` at `a`, `w` at `b`, `y` at `a`, `y` at `b`.
    pub slice_edge_signs: Vec<f64>,
    pub alpha: usize,
    pub beta: usize,
    pub max_jump_residual: f64,
    pub max_bc_residual: f64,
}

impl GreenFunction {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.s_grid.len() + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn states_on(fs: &FundamentalSystem, grid: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    grid.par_iter().map(|&t| fs.state_at(t)).collect()
}

/// Samples the Green's function of `solver` on uniform grids. The slices
/// `∂^α_t g(a,·)` and `∂^β_t g(b,·)` are filled; the s-slices are left empty.
pub fn sample_green(solver: &GreenSolver, alpha: usize, beta: usize, n_t: usize, n_s: usize) -> Result<GreenFunction> {
    if n_t < 2 || n_s < 2 {
        return Err(Error::Range("grids need at least two points".into()));
    }
    let n = solver.n();
    if alpha >= n || beta >= n {
        return Err(Error::Range(format!("derivative orders {alpha}, {beta} exceed {}", n - 1)));
    }
    let (a, b) = (solver.fs.a(), solver.fs.b());
    let t_grid = uniform_grid(a, b, n_t);
    let s_grid = uniform_grid(a, b, n_s);
    let phi_t = states_on(&solver.fs, &t_grid)?;
    let at_a = solver.fs.snapshot_matrix(0);
    let at_b = solver.fs.snapshot_matrix(solver.fs.steps());

    let columns: Vec<GreenColumn> = s_grid.par_iter().map(|&s| solver.column(s)).collect::<Result<_>>()?;
    let mut values = vec![0.0; n_t * n_s];
    for (j, col) in columns.iter().enumerate() {
        for (i, (&t, phi)) in t_grid.iter().zip(&phi_t).enumerate() {
            let c = col.coefficients_at(t);
            values[i * n_s + j] = (0..n).map(|k| phi[(0, k)] * c[k]).sum();
        }
    }
    let row = |m: &DMatrix<f64>, d: usize, c: &DVector<f64>| (0..n).map(|k| m[(d, k)] * c[k]).sum::<f64>();
    let d_alpha_at_a = columns.iter().map(|c| row(&at_a, alpha, &c.c_minus)).collect();
    let d_beta_at_b = columns.iter().map(|c| row(&at_b, beta, &c.c_plus)).collect();
    let max_jump_residual = columns.iter().fold(0.0f64, |m, c| m.max(c.jump_residual));
    let max_bc_residual = columns.iter().fold(0.0f64, |m, c| m.max(c.bc_residual));
    Ok(GreenFunction {
        m: solver.fs.m * solver.bvp.shift_sign,
        t_grid,
        s_grid,
        values,
        d_alpha_at_a,
        d_beta_at_b,
        d_eta_at_sa: Vec::new(),
        d_gamma_at_sb: Vec::new(),
        slice_edge_signs: Vec::new(),
        alpha,
        beta,
        max_jump_residual,
        max_bc_residual,
    })
}

/// Index of the functional `u^(order)` at `endpoint` in a base-space solver.
fn unit_functional(solver: &GreenSolver, endpoint: Endpoint, order: usize) -> usize {
    solver
        .bvp
        .functionals
        .iter()
        .position(|f| f.endpoint == endpoint && f.leading_order() == order)
        .expect("base functional present")
}

/// `x_M` (`u^(σ_k)(a) = 1`) and `z_M` (`u^(ε_{n-k})(b) = 1`) as coefficient vectors.
fn basis_coefficients(spec: &ProblemSpec, solver: &GreenSolver) -> Result<(DVector<f64>, DVector<f64>)> {
    let n = spec.n;
    let mut rx = vec![0.0; n];
    rx[unit_functional(solver, Endpoint::A, spec.sigma.last().unwrap())] = 1.0;
    let mut rz = vec![0.0; n];
    rz[unit_functional(solver, Endpoint::B, spec.epsilon.last().unwrap())] = 1.0;
    Ok((solver.solve_boundary_data(&rx)?, solver.solve_boundary_data(&rz)?))
}

fn sample(solver: &GreenSolver, c: &DVector<f64>, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter().map(|&t| solver.eval(c, t, 0)).collect()
}

fn sign_pow(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign of the solution `Φc` just inside an endpoint. Sign changes that
/// appear past an interval endpoint start here, well below grid resolution.
fn edge_sign(solver: &GreenSolver, c: &DVector<f64>, at_b: bool) -> Result<f64> {
    let (a, b) = (solver.fs.a(), solver.fs.b());
    let len = b - a;
    let mut coef = Vec::with_capacity(solver.n());
    let mut fact = 1.0;
    for d in 0..solver.n() {
        if d > 0 {
            fact *= d as f64;
        }
        coef.push(solver.eval(c, if at_b { b } else { a }, d)? * len.powi(d as i32) / fact);
    }
    let scale = coef.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(match coef.iter().position(|v| v.abs() > 1e-8 * scale) {
        Some(d) if at_b => coef[d].signum() * sign_pow(d),
        Some(d) => coef[d].signum(),
        None => 0.0,
    })
}

/// Green's function of `T_n[M]` in the base space of `spec`.
pub fn build_green(spec: &ProblemSpec, m: f64, n_t: usize, n_s: usize) -> Result<GreenFunction> {
    let solver = GreenSolver::for_base(spec, m, DEFAULT_STEPS)?;
    let d = derive_indices(spec);
    let mut gf = sample_green(&solver, d.alpha, d.beta, n_t, n_s)?;
    let (x, z) = basis_coefficients(spec, &solver)?;
    let n = spec.n;
    let wx = sign_pow(n - 1 - spec.sigma.last().unwrap());
    let yz = sign_pow(n - spec.epsilon.last().unwrap());
    gf.d_eta_at_sa = sample(&solver, &x, &gf.t_grid)?.into_iter().map(|v| wx * v).collect();
    gf.d_gamma_at_sb = sample(&solver, &z, &gf.t_grid)?.into_iter().map(|v| yz * v).collect();
    gf.slice_edge_signs = vec![
        wx * edge_sign(&solver, &x, false)?,
        wx * edge_sign(&solver, &x, true)?,
        yz * edge_sign(&solver, &z, false)?,
        yz * edge_sign(&solver, &z, true)?,
    ];
    Ok(gf)
}

/// Green's function column at `s` for the base problem, for probing.
pub fn green_column(spec: &ProblemSpec, m: f64, s: f64) -> Result<(GreenSolver, GreenColumn)> {
    let solver = GreenSolver::for_base(spec, m, DEFAULT_STEPS)?;
    let col = solver.column(s)?;
    Ok((solver, col))
}

/// `x_M` and `z_M` sampled on `points` uniform nodes.
pub fn nonhomog_basis(spec: &ProblemSpec, m: f64, points: usize) -> Result<(Sampled, Sampled)> {
    let solver = GreenSolver::for_base(spec, m, DEFAULT_STEPS)?;
    let (x, z) = basis_coefficients(spec, &solver)?;
    let t = uniform_grid(spec.a, spec.b, points);
    Ok((
        Sampled {
            values: sample(&solver, &x, &t)?,
            t: t.clone(),
        },
        Sampled {
            values: sample(&solver, &z, &t)?,
            t,
        },
    ))
}

/// Green's function of the adjoint operator `T*_n[M]` under the adjoint
/// boundary functionals.
pub fn adjoint_green(spec: &ProblemSpec, m: f64, n_t: usize, n_s: usize) -> Result<GreenFunction> {
    let bvp = BoundaryProblem::adjoint(spec, DEFAULT_STEPS)?;
    let solver = GreenSolver::new(bvp, m)?;
    let d = derive_indices(spec);
    let mut gf = sample_green(&solver, d.eta, d.gamma, n_t, n_s)?;
    // T* = (-1)ⁿ times the monic operator
    let sign = sign_pow(spec.n);
    for v in gf
        .values
        .iter_mut()
        .chain(gf.d_alpha_at_a.iter_mut())
        .chain(gf.d_beta_at_b.iter_mut())
    {
        *v *= sign;
    }
    gf.m = m;
    Ok(gf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    StronglyInversePositive,
    StronglyInverseNegative,
    Indeterminate,
}

impl Classification {
    pub fn short(self) -> &'static str {
        match self {
            Classification::StronglyInversePositive => "SIP",
            Classification::StronglyInverseNegative => "SIN",
            Classification::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignReport {
    pub classification: Classification,
    /// Interior of the grid, including the s-slices `w_M` and `y_M`.
    pub interior_sign_ok: bool,
    pub d_alpha_ok: bool,
    pub d_beta_ok: bool,
    /// `(t, s, value)` of the most negative orientation-adjusted sample.
    pub worst_violation: (f64, f64, f64),
}

struct Orientation {
    interior_ok: bool,
    alpha_ok: bool,
    beta_ok: bool,
    worst: (f64, f64, f64),
}

fn scale(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn check_orientation(gf: &GreenFunction, ind: &DerivedIndices, extra: &[RelaxedBasis], sign: f64) -> Orientation {
    let (nt, ns) = (gf.t_grid.len(), gf.s_grid.len());
    let tol = 1e-10 * gf.max_abs();
    let mut worst = (f64::NAN, f64::NAN, f64::INFINITY);
    let mut note = |t: f64, s: f64, v: f64| {
        if v < worst.2 {
            worst = (t, s, v);
        }
    };
    let mut interior_ok = true;
    for i in 1..nt - 1 {
        for j in 1..ns - 1 {
            let v = sign * gf.value(i, j);
            note(gf.t_grid[i], gf.s_grid[j], v);
            interior_ok &= v >= -tol;
        }
    }
    let gamma = sign_pow(ind.gamma);
    for (i, &e) in gf.slice_edge_signs.iter().enumerate() {
        let orient = if i < 2 { 1.0 } else { gamma };
        interior_ok &= sign * orient * e >= 0.0;
    }
    for (slice, orient) in [(&gf.d_eta_at_sa, 1.0), (&gf.d_gamma_at_sb, gamma)] {
        if slice.is_empty() {
            continue;
        }
        let tol = 1e-10 * scale(slice);
        for i in 1..nt - 1 {
            let v = sign * orient * slice[i];
            interior_ok &= v >= -tol;
        }
    }
    for basis in extra {
        let tol = 1e-10 * scale(&basis.values);
        interior_ok &= basis.values[1..nt - 1].iter().all(|&v| sign * v >= -tol);
        interior_ok &= basis.edge_signs.iter().all(|&e| sign * e >= 0.0);
    }
    let tol_a = 1e-10 * scale(&gf.d_alpha_at_a);
    let alpha_ok = (1..ns - 1).all(|j| sign * gf.d_alpha_at_a[j] >= -tol_a);
    let tol_b = 1e-10 * scale(&gf.d_beta_at_b);
    let pb = sign_pow(gf.beta);
    let beta_ok = (1..ns - 1).all(|j| sign * pb * gf.d_beta_at_b[j] >= -tol_b);
    Orientation {
        interior_ok,
        alpha_ok,
        beta_ok,
        worst,
    }
}

/// Strong sign classification of a sampled Green's function.
pub fn classify_sign(gf: &GreenFunction, indices: &DerivedIndices) -> SignReport {
    classify_with(gf, indices, &[])
}

/// Solution of the homogeneous equation carrying one relaxed boundary
/// condition, with the sign the relaxed space prescribes for its data.
#[derive(Debug, Clone)]
pub struct RelaxedBasis {
    pub endpoint: Endpoint,
    pub order: usize,
    /// Over the `t_grid` of the Green's function it accompanies.
    pub values: Vec<f64>,
    /// Sign just inside `a` and `b`.
    pub edge_signs: [f64; 2],
}

/// Basis functions for the relaxed conditions `σ_j`, `j` in `sigma_subset`,
/// and `ε_i`, `i` in `epsilon_subset`, on `grid`.
pub fn relaxed_basis(
    spec: &ProblemSpec,
    m: f64,
    sigma_subset: &IndexSet,
    epsilon_subset: &IndexSet,
    grid: &[f64],
) -> Result<Vec<RelaxedBasis>> {
    let solver = GreenSolver::for_base(spec, m, DEFAULT_STEPS)?;
    let (n, k) = (spec.n, spec.k());
    let mut out = Vec::new();
    let mut push = |endpoint: Endpoint, order: usize, data: f64| -> Result<()> {
        let mut rhs = vec![0.0; n];
        rhs[unit_functional(&solver, endpoint, order)] = data;
        let c = solver.solve_boundary_data(&rhs)?;
        out.push(RelaxedBasis {
            endpoint,
            order,
            values: sample(&solver, &c, grid)?,
            edge_signs: [edge_sign(&solver, &c, false)?, edge_sign(&solver, &c, true)?],
        });
        Ok(())
    };
    for (j, &sj) in spec.sigma.as_slice().iter().enumerate() {
        if sigma_subset.contains(sj) {
            // (-1)^(n - σ_j - (k - j) + 1) with 1-based j
            push(Endpoint::A, sj, sign_pow(n + 1 + k - sj - (j + 1)))?;
        }
    }
    for (i, &ei) in spec.epsilon.as_slice().iter().enumerate() {
        if epsilon_subset.contains(ei) {
            push(Endpoint::B, ei, sign_pow(n - k + i))?;
        }
    }
    Ok(out)
}

/// Sign classification in the space where the subset conditions are relaxed
/// to sign conditions on the data.
pub fn classify_relaxed(
    spec: &ProblemSpec,
    m: f64,
    sigma_subset: &IndexSet,
    epsilon_subset: &IndexSet,
    n_t: usize,
    n_s: usize,
) -> Result<SignReport> {
    let gf = build_green(spec, m, n_t, n_s)?;
    let basis = relaxed_basis(spec, m, sigma_subset, epsilon_subset, &gf.t_grid)?;
    Ok(classify_with(&gf, &derive_indices(spec), &basis))
}

fn classify_with(gf: &GreenFunction, indices: &DerivedIndices, extra: &[RelaxedBasis]) -> SignReport {
    let pos = check_orientation(gf, indices, extra, 1.0);
    let neg = check_orientation(gf, indices, extra, -1.0);
    let passes = |o: &Orientation| o.interior_ok && o.alpha_ok && o.beta_ok;
    let (classification, o) = if passes(&pos) {
        (Classification::StronglyInversePositive, pos)
    } else if passes(&neg) {
        (Classification::StronglyInverseNegative, neg)
    } else {
        let sum: f64 = gf.values.iter().sum();
        (Classification::Indeterminate, if sum >= 0.0 { pos } else { neg })
    };
    SignReport {
        classification,
        interior_sign_ok: o.interior_ok,
        d_alpha_ok: o.alpha_ok,
        d_beta_ok: o.beta_ok,
        worst_violation: o.worst,
    }
}

/// Envelope `φ(t)k₁(s) ≤ g(t,s) ≤ φ(t)k₂(s)` with `φ(t) = (t-a)^α (b-t)^β`.
///
/// Returns `(k₁, k₂)` over the s-grid.
pub fn pg_ng_bounds(gf: &GreenFunction) -> (Vec<f64>, Vec<f64>) {
    let (nt, ns) = (gf.t_grid.len(), gf.s_grid.len());
    let (a, b) = (gf.t_grid[0], gf.t_grid[nt - 1]);
    let (alpha, beta) = (gf.alpha as i32, gf.beta as i32);
    let fact = |k: i32| (1..=k).fold(1.0, |p, i| p * i as f64);
    let mut k1 = vec![0.0; ns];
    let mut k2 = vec![0.0; ns];
    for j in 0..ns {
        let l1 = gf.d_alpha_at_a[j] / (fact(alpha) * (b - a).powi(beta));
        let l2 = sign_pow(gf.beta) * gf.d_beta_at_b[j] / (fact(beta) * (b - a).powi(alpha));
        let (mut lo, mut hi) = (l1.min(l2), l1.max(l2));
        for i in 1..nt - 1 {
            let t = gf.t_grid[i];
            let phi = (t - a).powi(alpha) * (b - t).powi(beta);
            let q = gf.value(i, j) / phi;
            lo = lo.min(q);
            hi = hi.max(q);
        }
        k1[j] = lo;
        k2[j] = hi;
    }
    (k1, k2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::problem::IndexSet;
    use std::f64::consts::PI;

    fn spec(p: Vec<Expr>, sigma: &[usize], eps: &[usize]) -> ProblemSpec {
        ProblemSpec::new(0.0, 1.0, p, 0.0, IndexSet::new(sigma.to_vec()), IndexSet::new(eps.to_vec())).unwrap()
    }

    fn t4() -> ProblemSpec {
        spec(vec![Expr::constant(0.0); 4], &[0, 2], &[1, 2])
    }

    fn closed_form(t: f64, s: f64) -> f64 {
        if s <= t {
            s * (t * (t * t - 3.0 * t + 3.0) - s * s) / 6.0
        } else {
            (s - 1.0) * t * (t * t - 3.0 * s) / 6.0
        }
    }

    #[test]
    fn fourth_order_closed_form() {
        let gf = build_green(&t4(), 0.0, 101, 101).unwrap();
        let mut err: f64 = 0.0;
        for (i, &t) in gf.t_grid.iter().enumerate() {
            for (j, &s) in gf.s_grid.iter().enumerate() {
                err = err.max((gf.value(i, j) - closed_form(t, s)).abs());
            }
        }
        assert!(err < 1e-9, "{err}");
        assert!((gf.value(100, 50) - 0.0625).abs() < 1e-10);
        assert!((gf.value(25, 50) - 0.029_947_916_666_666_67).abs() < 1e-10);
        for (j, &s) in gf.s_grid.iter().enumerate() {
            assert!((gf.d_alpha_at_a[j] - (s - s * s) / 2.0).abs() < 1e-9);
        }
        assert!(gf.max_jump_residual < 1e-8);
        assert!(gf.max_bc_residual < 1e-8);
    }

    #[test]
    fn dirichlet_second_order() {
        let s = spec(vec![Expr::constant(0.0); 2], &[0], &[0]);
        let gf = build_green(&s, 0.0, 11, 11).unwrap();
        assert!((gf.value(5, 5) + 0.25).abs() < 1e-12);
        let r = classify_sign(&gf, &derive_indices(&s));
        assert_eq!(r.classification, Classification::StronglyInverseNegative);
        let (k1, k2) = pg_ng_bounds(&gf);
        for j in 1..10 {
            assert!(k1[j] < k2[j] && k2[j] < 0.0);
        }
    }

    #[test]
    fn classification_examples() {
        let s = t4();
        let ind = derive_indices(&s);
        let r = classify_sign(&build_green(&s, 0.0, 101, 101).unwrap(), &ind);
        assert_eq!(r.classification, Classification::StronglyInversePositive);
        assert!(r.interior_sign_ok && r.d_alpha_ok && r.d_beta_ok);
        let r = classify_sign(&build_green(&s, 4.0 * PI.powi(4) + 50.0, 101, 101).unwrap(), &ind);
        assert_eq!(r.classification, Classification::Indeterminate);
        assert!(r.worst_violation.2 < 0.0);
    }

    #[test]
    fn envelope_fourth_order() {
        let gf = build_green(&t4(), 0.0, 201, 101).unwrap();
        let (k1, k2) = pg_ng_bounds(&gf);
        for (j, &s) in gf.s_grid.iter().enumerate() {
            assert!((k1[j] - s * (1.0 - s * s) / 6.0).abs() < 1e-4);
            assert!((k2[j] - s * (1.0 - s) / 2.0).abs() < 1e-4);
            assert!(k1[j] <= k2[j]);
        }
    }

    #[test]
    fn basis_functions() {
        let (x, z) = nonhomog_basis(&t4(), 0.0, 101).unwrap();
        for (i, &t) in x.t.iter().enumerate() {
            assert!((x.values[i] - (-t / 2.0 + t * t / 2.0 - t * t * t / 6.0)).abs() < 1e-10);
            assert!((z.values[i] - (-t / 2.0 + t * t * t / 6.0)).abs() < 1e-10);
        }
        assert!((x.values[50] + 7.0 / 48.0).abs() < 1e-10);
        assert!((z.values[100] + 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn slices_are_s_derivatives() {
        // w_M(t) = ∂^η_s g(t,s) at s = a; here η = 1, γ = 1
        let s = spec(vec![Expr::constant(0.0), Expr::constant(2.0), Expr::constant(0.0), Expr::constant(0.0)], &[0, 2], &[1, 2]);
        let gf = build_green(&s, 3.0, 21, 21).unwrap();
        let (solver, _) = green_column(&s, 3.0, 0.5).unwrap();
        let h = 1e-4;
        let g = |t: f64, sv: f64| {
            let c = solver.column(sv).unwrap();
            solver.eval(c.coefficients_at(t), t, 0).unwrap()
        };
        for i in [5, 10, 15] {
            let t = gf.t_grid[i];
            let fd_a = (-3.0 * g(t, 0.0) + 4.0 * g(t, h) - g(t, 2.0 * h)) / (2.0 * h);
            assert!((fd_a - gf.d_eta_at_sa[i]).abs() < 1e-6, "{fd_a} vs {}", gf.d_eta_at_sa[i]);
            let fd_b = (3.0 * g(t, 1.0) - 4.0 * g(t, 1.0 - h) + g(t, 1.0 - 2.0 * h)) / (2.0 * h);
            assert!((fd_b - gf.d_gamma_at_sb[i]).abs() < 1e-6, "{fd_b} vs {}", gf.d_gamma_at_sb[i]);
        }
    }

    #[test]
    fn adjoint_is_transpose() {
        for p1 in [0.0, 1.0] {
            let s = spec(vec![Expr::constant(p1), Expr::constant(0.0), Expr::constant(0.0), Expr::constant(0.0)], &[0, 2], &[1, 2]);
            let g = build_green(&s, 0.0, 41, 41).unwrap();
            let ga = adjoint_green(&s, 0.0, 41, 41).unwrap();
            let mut err: f64 = 0.0;
            for i in 0..41 {
                for j in 0..41 {
                    err = err.max((ga.value(i, j) - g.value(j, i)).abs());
                }
            }
            assert!(err <= 1e-6 * g.max_abs(), "p1 = {p1}: {err}");
        }
    }

    #[test]
    fn singular_at_eigenvalue() {
        let s = spec(vec![Expr::constant(0.0); 2], &[0], &[0]);
        assert!(matches!(build_green(&s, PI * PI, 11, 11), Err(Error::Singular { .. })));
    }
}

//! Fundamental systems of `u^(n) + p₁u^(n-1) + … + (pₙ+M)u = 0` by fixed-step RK4.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::problem::ProblemSpec;

pub const DEFAULT_STEPS: usize = 4096;
const OVERFLOW: f64 = 1e300;

/// A monic linear differential operator on `[a, b]` without its shift.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    pub a: f64,
    pub b: f64,
    /// `p₁..pₙ`; `p[j-1]` multiplies `u^(n-j)`.
    pub p: Vec<Expr>,
}

impl LinearOperator {
    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn from_spec(spec: &ProblemSpec) -> LinearOperator {
        LinearOperator {
            a: spec.a,
            b: spec.b,
            p: spec.p.clone(),
        }
    }

    fn eval_coeffs(&self, t: f64, out: &mut [f64]) -> Result<()> {
        for (o, pj) in out.iter_mut().zip(&self.p) {
            *o = pj.eval(t)?;
        }
        Ok(())
    }
}

/// Coefficient values at the nodes and half-nodes of a uniform grid.
///
/// Independent of the shift, so one table serves a whole eigenvalue scan.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub op: LinearOperator,
    pub steps: usize,
    pub h: f64,
    // row i holds p₁..pₙ at a + i·h/2
    values: Vec<f64>,
}

impl CoefficientTable {
    pub fn new(op: LinearOperator, steps: usize) -> Result<CoefficientTable> {
        if steps < 64 {
            return Err(Error::Range(format!("steps = {steps} is below 64")));
        }
        let n = op.n();
        let h = (op.b - op.a) / steps as f64;
        let mut values = vec![0.0; (2 * steps + 1) * n];
        for (i, row) in values.chunks_mut(n).enumerate() {
            let t = if i == 2 * steps { op.b } else { op.a + i as f64 * h / 2.0 };
            op.eval_coeffs(t, row)?;
        }
        Ok(CoefficientTable { op, steps, h, values })
    }

    pub fn n(&self) -> usize {
        self.op.n()
    }

    fn row(&self, half_index: usize) -> &[f64] {
        let n = self.n();
        &self.values[half_index * n..(half_index + 1) * n]
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.steps {
            self.op.b
        } else {
            self.op.a + i as f64 * self.h
        }
    }
}

/// Derivative of a column-major n×n state: rows shift up, last row from the ODE.
fn rhs(n: usize, p: &[f64], m: f64, x: &[f64], out: &mut [f64]) {
    for col in 0..n {
        let c = &x[col * n..(col + 1) * n];
        let o = &mut out[col * n..(col + 1) * n];
        o[..n - 1].copy_from_slice(&c[1..]);
        let mut top = -(p[n - 1] + m) * c[0];
        for j in 1..n {
            top -= p[j - 1] * c[n - j];
        }
        o[n - 1] = top;
    }
}

struct Rk4Work {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Work {
    fn new(len: usize) -> Rk4Work {
        Rk4Work {
            k1: vec![0.0; len],
            k2: vec![0.0; len],
            k3: vec![0.0; len],
            k4: vec![0.0; len],
            tmp: vec![0.0; len],
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn step(&mut self, n: usize, m: f64, h: f64, p0: &[f64], ph: &[f64], p1: &[f64], x: &mut [f64]) {
        rhs(n, p0, m, x, &mut self.k1);
        for i in 0..x.len() {
            self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
        }
        rhs(n, ph, m, &self.tmp, &mut self.k2);
        for i in 0..x.len() {
            self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
        }
        rhs(n, ph, m, &self.tmp, &mut self.k3);
        for i in 0..x.len() {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        rhs(n, p1, m, &self.tmp, &mut self.k4);
        for i in 0..x.len() {
            x[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// Fundamental matrix with canonical data `u_i^(j)(a) = δ_ij`, stored at every node.
#[derive(Debug, Clone)]
pub struct FundamentalSystem {
    pub table: Arc<CoefficientTable>,
    pub m: f64,
    // column-major n×n blocks, one per node
    snapshots: Vec<f64>,
}

impl FundamentalSystem {
    pub fn integrate(table: Arc<CoefficientTable>, m: f64) -> Result<FundamentalSystem> {
        let n = table.n();
        let nn = n * n;
        let mut snapshots = vec![0.0; (table.steps + 1) * nn];
        for i in 0..n {
            snapshots[i * n + i] = 1.0;
        }
        let mut x = snapshots[..nn].to_vec();
        let mut work = Rk4Work::new(nn);
        for s in 0..table.steps {
            work.step(
                n,
                m,
                table.h,
                table.row(2 * s),
                table.row(2 * s + 1),
                table.row(2 * s + 2),
                &mut x,
            );
            if x.iter().any(|v| !(v.abs() <= OVERFLOW)) {
                return Err(Error::Overflow { t: table.node(s + 1) });
            }
            snapshots[(s + 1) * nn..(s + 2) * nn].copy_from_slice(&x);
        }
        Ok(FundamentalSystem { table, m, snapshots })
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn a(&self) -> f64 {
        self.table.op.a
    }

    pub fn b(&self) -> f64 {
        self.table.op.b
    }

    pub fn steps(&self) -> usize {
        self.table.steps
    }

    pub fn node(&self, i: usize) -> f64 {
        self.table.node(i)
    }

    /// State block at node `i`: entry `[d + n·col]` is `u_col^(d)`.
    pub fn snapshot(&self, i: usize) -> &[f64] {
        let nn = self.n() * self.n();
        &self.snapshots[i * nn..(i + 1) * nn]
    }

    pub fn snapshot_matrix(&self, i: usize) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_column_slice(n, n, self.snapshot(i))
    }

    /// Full state (derivatives 0..n-1 of every column) at any `t` in `[a, b]`.
    pub fn state_at(&self, t: f64) -> Result<DMatrix<f64>> {
        let (a, b) = (self.a(), self.b());
        if !(a..=b).contains(&t) {
            return Err(Error::Range(format!("t = {t} outside [{a}, {b}]")));
        }
        let n = self.n();
        let h = self.table.h;
        let i = (((t - a) / h).floor() as usize).min(self.steps());
        let t0 = self.node(i);
        let dt = t - t0;
        if dt == 0.0 {
            return Ok(self.snapshot_matrix(i));
        }
        let op = &self.table.op;
        let mut ph = vec![0.0; n];
        let mut p1 = vec![0.0; n];
        op.eval_coeffs(t0 + 0.5 * dt, &mut ph)?;
        op.eval_coeffs(t, &mut p1)?;
        let mut x = self.snapshot(i).to_vec();
        Rk4Work::new(n * n).step(n, self.m, dt, self.table.row(2 * i), &ph, &p1, &mut x);
        Ok(DMatrix::from_column_slice(n, n, &x))
    }

    /// Derivatives `0..=n` of every column at `t`: an (n+1)×n matrix.
    pub fn jet_at(&self, t: f64) -> Result<DMatrix<f64>> {
        let n = self.n();
        let s = self.state_at(t)?;
        let mut p = vec![0.0; n];
        self.table.op.eval_coeffs(t, &mut p)?;
        let mut out = DMatrix::zeros(n + 1, n);
        out.view_mut((0, 0), (n, n)).copy_from(&s);
        for c in 0..n {
            let mut top = -(p[n - 1] + self.m) * s[(0, c)];
            for j in 1..n {
                top -= p[j - 1] * s[(n - j, c)];
            }
            out[(n, c)] = top;
        }
        Ok(out)
    }

    /// `d`-th derivative of fundamental solution `column` at `t`, `0 ≤ d ≤ n`.
    pub fn eval_solution(&self, column: usize, t: f64, d: usize) -> Result<f64> {
        let n = self.n();
        if column >= n || d > n {
            return Err(Error::Range(format!(
                "column {column} / derivative {d} out of range for order {n}"
            )));
        }
        Ok(self.jet_at(t)?[(d, column)])
    }

    /// Leading principal minors `W₁..Wₙ` at `t`.
    pub fn wronskians(&self, t: f64) -> Result<Vec<f64>> {
        Ok(leading_minors(&self.state_at(t)?))
    }

    fn wronskians_at_node(&self, i: usize) -> Vec<f64> {
        leading_minors(&self.snapshot_matrix(i))
    }
}

fn leading_minors(s: &DMatrix<f64>) -> Vec<f64> {
    (1..=s.nrows())
        .map(|k| s.view((0, 0), (k, k)).clone_owned().determinant())
        .collect()
}

/// Integrates the fundamental system of `spec` at shift `m`.
pub fn integrate_fundamental(spec: &ProblemSpec, m: f64, steps: usize) -> Result<FundamentalSystem> {
    let table = CoefficientTable::new(LinearOperator::from_spec(spec), steps)?;
    FundamentalSystem::integrate(Arc::new(table), m)
}

/// Factors `v₁..vₙ` of the Markov decomposition, sampled on the node grid.
#[derive(Debug, Clone)]
pub struct MarkovDecomposition {
    pub t: Vec<f64>,
    /// `v[k-1][i]` is `v_k` at `t[i]`.
    pub v: Vec<Vec<f64>>,
    /// Interval from `a` on which every Wronskian stayed positive.
    pub window: (f64, f64),
    /// First node where some `W_k ≤ 0`, if any.
    pub failure: Option<(usize, f64)>,
}

impl MarkovDecomposition {
    pub fn covers_interval(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn markov_decomposition(fs: &FundamentalSystem) -> MarkovDecomposition {
    let n = fs.n();
    let mut t = Vec::new();
    let mut v: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut failure = None;
    for i in 0..=fs.steps() {
        let w = fs.wronskians_at_node(i);
        if let Some(k) = w.iter().position(|&x| !(x > 0.0)) {
            failure = Some((k + 1, fs.node(i)));
            break;
        }
        t.push(fs.node(i));
        for k in 0..n {
            let wk = w[k];
            let wk1 = if k >= 1 { w[k - 1] } else { 1.0 };
            let wk2 = if k >= 2 { w[k - 2] } else { 1.0 };
            v[k].push(wk * wk2 / (wk1 * wk1));
        }
    }
    let window = (fs.a(), *t.last().unwrap_or(&fs.a()));
    MarkovDecomposition { t, v, window, failure }
}

/// Markov decomposition that turns a shrunken window into an error.
pub fn require_markov(fs: &FundamentalSystem) -> Result<MarkovDecomposition> {
    let md = markov_decomposition(fs);
    match md.failure {
        Some((k, t)) => Err(Error::Disconjugacy { k, t }),
        None => Ok(md),
    }
}

//! Dense two-phase simplex with Bland's anti-cycling rule, sized for the
//! small equality systems that arise in classical-membership tests.

use super::KernelError;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: Option<f64>,
}

impl Bounds {
    pub const NONNEGATIVE: Bounds = Bounds {
        lower: 0.0,
        upper: None,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpConfig {
    /// Width of the band each equality is relaxed to.
    pub feas_tol: f64,
    pub max_pivots: usize,
}

impl Default for LpConfig {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            max_pivots: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Feasible {
        x: Vec<f64>,
        pivots: usize,
    },
    /// `margin` is the smallest achievable max-norm residual `‖Ax − b‖∞`
    /// over the bounded region.
    Infeasible {
        margin: f64,
        pivots: usize,
    },
    Inconclusive {
        pivots: usize,
    },
}

enum Solve {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
    Budget,
}

struct Tableau {
    m: usize,
    n: usize,
    width: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn new(a: &[Vec<f64>], b: &[f64], n: usize) -> Self {
        let m = a.len();
        let width = n + m + 1;
        let mut t = vec![0.0; m * width];
        for i in 0..m {
            let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                t[i * width + j] = sign * a[i][j];
            }
            t[i * width + n + i] = 1.0;
            t[i * width + width - 1] = sign * b[i];
        }
        Self {
            m,
            n,
            width,
            t,
            basis: (n..n + m).collect(),
            pivots: 0,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.at(row, col);
        for j in 0..w {
            self.t[row * w + j] /= p;
        }
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let f = self.at(i, col);
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                let v = self.t[row * w + j];
                if v != 0.0 {
                    self.t[i * w + j] -= f * v;
                }
            }
            self.t[i * w + col] = 0.0;
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Runs simplex iterations for `cost` over the allowed columns.
    /// Returns `Ok(true)` at optimality, `Ok(false)` if unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize, budget: usize) -> Result<bool, ()> {
        loop {
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j];
                for i in 0..self.m {
                    let cb = cost[self.basis[i]];
                    if cb != 0.0 {
                        r -= cb * self.at(i, j);
                    }
                }
                if r < -COST_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, col);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14 * br.abs().max(1.0)
                                || ((ratio - br).abs() <= 1e-14 * br.abs().max(1.0)
                                    && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Ok(false);
            };
            if self.pivots >= budget {
                return Err(());
            }
            self.pivot(row, col);
        }
    }

    fn value(&self, cost: &[f64]) -> f64 {
        (0..self.m).map(|i| cost[self.basis[i]] * self.rhs(i)).sum()
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for i in 0..self.m {
            if self.basis[i] < self.n {
                x[self.basis[i]] = self.rhs(i).max(0.0);
            }
        }
        x
    }
}

/// Minimizes `cᵀx` subject to `Ax = b`, `x ≥ 0`.
fn simplex(a: &[Vec<f64>], b: &[f64], c: &[f64], feas_tol: f64, budget: usize) -> (Solve, usize) {
    let mut tab = Tableau::new(a, b, c.len());
    let (m, n) = (tab.m, tab.n);
    let mut phase1 = vec![0.0; n + m];
    for v in phase1.iter_mut().skip(n) {
        *v = 1.0;
    }
    if tab.optimize(&phase1, n + m, budget).is_err() {
        return (Solve::Budget, tab.pivots);
    }
    let phase1_value = tab.value(&phase1);
    if phase1_value > feas_tol {
        return (Solve::Infeasible, tab.pivots);
    }
    // Drive zero-level artificials out of the basis where possible.
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tab.at(i, j).abs() > 1e-9 && !tab.basis.contains(&j))
            {
                tab.pivot(i, j);
            }
        }
    }
    let mut cost = c.to_vec();
    cost.resize(n + m, 0.0);
    match tab.optimize(&cost, n, budget) {
        Err(()) => (Solve::Budget, tab.pivots),
        Ok(false) => (Solve::Unbounded, tab.pivots),
        Ok(true) => {
            let x = tab.primal();
            let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
            (Solve::Optimal { x, value }, tab.pivots)
        }
    }
}

fn check_shapes(a: &[Vec<f64>], b: &[f64], bounds: &[Bounds]) -> Result<usize, KernelError> {
    if a.len() != b.len() {
        return Err(KernelError::LpShape(format!(
            "{} constraint rows but {} right-hand sides",
            a.len(),
            b.len()
        )));
    }
    let n = bounds.len();
    if let Some((i, row)) = a.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(KernelError::LpShape(format!(
            "row {i} has {} entries, expected {n}",
            row.len()
        )));
    }
    let finite = a.iter().flatten().chain(b).all(|v| v.is_finite())
        && bounds
            .iter()
            .all(|bd| bd.lower.is_finite() && bd.upper.is_none_or(f64::is_finite));
    if !finite {
        return Err(KernelError::LpShape("non-finite data".into()));
    }
    if let Some(j) = bounds
        .iter()
        .position(|bd| bd.upper.is_some_and(|u| u < bd.lower))
    {
        return Err(KernelError::LpShape(format!(
            "variable {j} has empty bounds"
        )));
    }
    Ok(n)
}

/// Phase-1 feasibility for `Aeq x = beq` within `bounds`. On infeasibility the
/// max-norm margin is computed by a second, always-feasible LP.
pub fn lp_phase1(
    a: &[Vec<f64>],
    b: &[f64],
    bounds: &[Bounds],
    cfg: &LpConfig,
) -> Result<LpOutcome, KernelError> {
    let n = check_shapes(a, b, bounds)?;
    let m = a.len();

    // Shift to x' = x - lower ≥ 0 and append rows for finite upper bounds.
    let shifted_b: Vec<f64> = (0..m)
        .map(|i| b[i] - (0..n).map(|j| a[i][j] * bounds[j].lower).sum::<f64>())
        .collect();
    let uppers: Vec<(usize, f64)> = bounds
        .iter()
        .enumerate()
        .filter_map(|(j, bd)| bd.upper.map(|u| (j, u - bd.lower)))
        .collect();
    let k = uppers.len();

    let mut rows = Vec::with_capacity(m + k);
    let mut rhs = Vec::with_capacity(m + k);
    for i in 0..m {
        let mut row = a[i].clone();
        row.resize(n + k, 0.0);
        rows.push(row);
        rhs.push(shifted_b[i]);
    }
    for (s, &(j, u)) in uppers.iter().enumerate() {
        let mut row = vec![0.0; n + k];
        row[j] = 1.0;
        row[n + s] = 1.0;
        rows.push(row);
        rhs.push(u);
    }

    let zero_cost = vec![0.0; n + k];
    let (solve, pivots) = simplex(&rows, &rhs, &zero_cost, cfg.feas_tol, cfg.max_pivots);
    match solve {
        Solve::Optimal { x, .. } => {
            let x = (0..n).map(|j| x[j] + bounds[j].lower).collect();
            Ok(LpOutcome::Feasible { x, pivots })
        }
        Solve::Budget => Ok(LpOutcome::Inconclusive { pivots }),
        Solve::Unbounded => unreachable!("zero objective cannot be unbounded"),
        Solve::Infeasible => {
            // min t  s.t.  A x' + t - s⁺ = b',  -A x' + t - s⁻ = -b', upper rows.
            let width = n + k + 1 + 2 * m;
            let t_col = n + k;
            let mut mrows = Vec::with_capacity(2 * m + k);
            let mut mrhs = Vec::with_capacity(2 * m + k);
            for i in 0..m {
                let mut plus = vec![0.0; width];
                let mut minus = vec![0.0; width];
                for j in 0..n {
                    plus[j] = a[i][j];
                    minus[j] = -a[i][j];
                }
                plus[t_col] = 1.0;
                minus[t_col] = 1.0;
                plus[t_col + 1 + i] = -1.0;
                minus[t_col + 1 + m + i] = -1.0;
                mrows.push(plus);
                mrhs.push(shifted_b[i]);
                mrows.push(minus);
                mrhs.push(-shifted_b[i]);
            }
            for (s, &(j, u)) in uppers.iter().enumerate() {
                let mut row = vec![0.0; width];
                row[j] = 1.0;
                row[n + s] = 1.0;
                mrows.push(row);
                mrhs.push(u);
            }
            let mut cost = vec![0.0; width];
            cost[t_col] = 1.0;
            let budget = cfg.max_pivots.saturating_sub(pivots);
            let (solve, extra) = simplex(&mrows, &mrhs, &cost, cfg.feas_tol, budget);
            let pivots = pivots + extra;
            match solve {
                Solve::Optimal { value, .. } => Ok(LpOutcome::Infeasible {
                    margin: value,
                    pivots,
                }),
                Solve::Budget => Ok(LpOutcome::Inconclusive { pivots }),
                Solve::Infeasible | Solve::Unbounded => {
                    Err(KernelError::LpShape("margin program failed".into()))
                }
            }
        }
    }
}

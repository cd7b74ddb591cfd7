use crate::model::{LpError, LpProblem, LpSolution, LpStatus, RowKind, Sense};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub pivot_tol: f64,
    pub feas_tol: f64,
    pub opt_tol: f64,
    /// Pivots between refactorizations of the basis inverse.
    pub refactor_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            pivot_tol: 1e-9,
            feas_tol: 1e-7,
            opt_tol: 1e-9,
            refactor_every: 64,
        }
    }
}

/// How an original variable maps into nonnegative standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = offset + s[col]`
    Shifted { col: usize, offset: f64 },
    /// `x = s[pos] - s[neg]`
    Split { pos: usize, neg: usize },
    /// `x = offset - s[col]` for variables bounded only from above
    Mirrored { col: usize, offset: f64 },
}

/// `min c^T s` with `A s = b`, `s >= 0`, `b >= 0`; dense column-major `A`.
struct Standard {
    m: usize,
    ncols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    cost: Vec<f64>,
    /// First artificial column; columns at or beyond it are artificial.
    art_start: usize,
    initial_basis: Vec<usize>,
    /// `-1` where the original row was negated to make the rhs nonnegative.
    row_sign: Vec<f64>,
    /// Number of rows coming from the original problem (the rest are upper bounds).
    orig_rows: usize,
    vars: Vec<VarMap>,
}

impl Standard {
    fn col(&self, j: usize) -> &[f64] {
        &self.a[j * self.m..(j + 1) * self.m]
    }

    fn build(p: &LpProblem) -> Self {
        let sign = if p.sense == Sense::Max { -1.0 } else { 1.0 };
        let mut vars = Vec::with_capacity(p.num_vars());
        let mut struct_cost = Vec::new();
        let mut extra_rows: Vec<(usize, f64)> = Vec::new();
        for j in 0..p.num_vars() {
            let (l, u, c) = (p.lower[j], p.upper[j], sign * p.cost[j]);
            if l.is_finite() {
                let col = struct_cost.len();
                struct_cost.push(c);
                vars.push(VarMap::Shifted { col, offset: l });
                if u.is_finite() {
                    extra_rows.push((col, u - l));
                }
            } else if u.is_finite() {
                let col = struct_cost.len();
                struct_cost.push(-c);
                vars.push(VarMap::Mirrored { col, offset: u });
            } else {
                let pos = struct_cost.len();
                struct_cost.push(c);
                struct_cost.push(-c);
                vars.push(VarMap::Split { pos, neg: pos + 1 });
            }
        }
        let nstruct = struct_cost.len();
        let orig_rows = p.num_rows();
        let m = orig_rows + extra_rows.len();

        // Row-major staging of the structural part.
        let mut rows: Vec<(Vec<f64>, RowKind, f64)> = Vec::with_capacity(m);
        for r in &p.rows {
            let mut coeffs = vec![0.0; nstruct];
            let mut rhs = r.rhs;
            for (j, &a) in r.coeffs.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                match vars[j] {
                    VarMap::Shifted { col, offset } => {
                        coeffs[col] += a;
                        rhs -= a * offset;
                    }
                    VarMap::Mirrored { col, offset } => {
                        coeffs[col] -= a;
                        rhs -= a * offset;
                    }
                    VarMap::Split { pos, neg } => {
                        coeffs[pos] += a;
                        coeffs[neg] -= a;
                    }
                }
            }
            rows.push((coeffs, r.kind, rhs));
        }
        for &(col, width) in &extra_rows {
            let mut coeffs = vec![0.0; nstruct];
            coeffs[col] = 1.0;
            rows.push((coeffs, RowKind::Le, width));
        }

        let mut row_sign = vec![1.0; m];
        for (i, (coeffs, kind, rhs)) in rows.iter_mut().enumerate() {
            if *rhs < 0.0 {
                row_sign[i] = -1.0;
                coeffs.iter_mut().for_each(|a| *a = -*a);
                *rhs = -*rhs;
                *kind = match kind {
                    RowKind::Le => RowKind::Ge,
                    RowKind::Ge => RowKind::Le,
                    RowKind::Eq => RowKind::Eq,
                };
            }
        }

        let nslack = rows.iter().filter(|r| r.1 != RowKind::Eq).count();
        let nart = rows.iter().filter(|r| r.1 != RowKind::Le).count();
        let art_start = nstruct + nslack;
        let ncols = art_start + nart;
        let mut a = vec![0.0; m * ncols];
        let mut b = vec![0.0; m];
        let mut initial_basis = vec![0; m];
        let (mut s, mut t) = (nstruct, art_start);
        for (i, (coeffs, kind, rhs)) in rows.iter().enumerate() {
            for (j, &v) in coeffs.iter().enumerate() {
                a[j * m + i] = v;
            }
            b[i] = *rhs;
            match kind {
                RowKind::Le => {
                    a[s * m + i] = 1.0;
                    initial_basis[i] = s;
                    s += 1;
                }
                RowKind::Ge => {
                    a[s * m + i] = -1.0;
                    s += 1;
                    a[t * m + i] = 1.0;
                    initial_basis[i] = t;
                    t += 1;
                }
                RowKind::Eq => {
                    a[t * m + i] = 1.0;
                    initial_basis[i] = t;
                    t += 1;
                }
            }
        }
        let mut cost = vec![0.0; ncols];
        cost[..nstruct].copy_from_slice(&struct_cost);
        Standard {
            m,
            ncols,
            a,
            b,
            cost,
            art_start,
            initial_basis,
            row_sign,
            orig_rows,
            vars,
        }
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Tableau<'a> {
    sf: &'a Standard,
    opts: SolverOptions,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// Dense row-major `B^{-1}`.
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
    max_iters: usize,
}

impl<'a> Tableau<'a> {
    fn new(sf: &'a Standard, opts: SolverOptions) -> Self {
        let m = sf.m;
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let mut in_basis = vec![false; sf.ncols];
        for &j in &sf.initial_basis {
            in_basis[j] = true;
        }
        Self {
            sf,
            opts,
            basis: sf.initial_basis.clone(),
            in_basis,
            binv,
            xb: sf.b.clone(),
            iterations: 0,
            since_refactor: 0,
            max_iters: 50 * (m + sf.ncols) + 1000,
        }
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.sf.m;
        let mut y = vec![0.0; m];
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = cost[bj];
            if cb != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                y.iter_mut().zip(row).for_each(|(y, r)| *y += cb * r);
            }
        }
        y
    }

    fn reduced_cost(&self, cost: &[f64], y: &[f64], j: usize) -> f64 {
        cost[j]
            - self
                .sf
                .col(j)
                .iter()
                .zip(y)
                .map(|(a, y)| a * y)
                .sum::<f64>()
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.sf.m;
        let col = self.sf.col(j);
        let nz: Vec<(usize, f64)> = col
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, v)| *v != 0.0)
            .collect();
        (0..m)
            .map(|i| {
                let row = &self.binv[i * m..(i + 1) * m];
                nz.iter().map(|&(k, v)| row[k] * v).sum()
            })
            .collect()
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64], theta: f64) {
        let m = self.sf.m;
        for (i, x) in self.xb.iter_mut().enumerate() {
            if i != r {
                *x -= theta * alpha[i];
                if *x < 0.0 && *x > -self.opts.feas_tol {
                    *x = 0.0;
                }
            }
        }
        self.xb[r] = theta;
        let ar = alpha[r];
        let pivot_row: Vec<f64> = self.binv[r * m..(r + 1) * m]
            .iter()
            .map(|v| v / ar)
            .collect();
        for i in 0..m {
            if i == r || alpha[i] == 0.0 {
                continue;
            }
            let f = alpha[i];
            let row = &mut self.binv[i * m..(i + 1) * m];
            row.iter_mut()
                .zip(&pivot_row)
                .for_each(|(v, p)| *v -= f * p);
        }
        self.binv[r * m..(r + 1) * m].copy_from_slice(&pivot_row);
        self.in_basis[self.basis[r]] = false;
        self.in_basis[q] = true;
        self.basis[r] = q;
        self.iterations += 1;
        self.since_refactor += 1;
    }

    /// Recomputes `B^{-1}` by Gauss-Jordan elimination and `x_B = B^{-1} b`.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.sf.m;
        let mut bm = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for (i, v) in self.sf.col(j).iter().enumerate() {
                bm[i * m + k] = *v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let p = (c..m)
                .max_by(|&a, &b| bm[a * m + c].abs().total_cmp(&bm[b * m + c].abs()))
                .expect("nonempty range");
            if bm[p * m + c].abs() < 1e-13 {
                return Err(LpError::SingularBasis);
            }
            if p != c {
                for k in 0..m {
                    bm.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let d = bm[c * m + c];
            for k in 0..m {
                bm[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for i in 0..m {
                if i == c {
                    continue;
                }
                let f = bm[i * m + c];
                if f == 0.0 {
                    continue;
                }
                for k in 0..m {
                    bm[i * m + k] -= f * bm[c * m + k];
                    inv[i * m + k] -= f * inv[c * m + k];
                }
            }
        }
        self.binv = inv;
        self.xb = (0..m)
            .map(|i| {
                let v: f64 = self.binv[i * m..(i + 1) * m]
                    .iter()
                    .zip(&self.sf.b)
                    .map(|(a, b)| a * b)
                    .sum();
                if v < 0.0 && v > -self.opts.feas_tol {
                    0.0
                } else {
                    v
                }
            })
            .collect();
        self.since_refactor = 0;
        Ok(())
    }

    /// Runs primal simplex on `cost`; columns with `allowed[j] == false` never enter.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<PhaseEnd, LpError> {
        let m = self.sf.m;
        let degenerate_limit = 10 * (m + self.sf.ncols);
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            if self.iterations >= self.max_iters {
                return Err(LpError::IterationLimit(self.max_iters));
            }
            if self.since_refactor >= self.opts.refactor_every {
                self.refactor()?;
            }
            let y = self.duals(cost);
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.sf.ncols {
                if self.in_basis[j] || !allowed[j] {
                    continue;
                }
                let d = self.reduced_cost(cost, &y, j);
                if d < -self.opts.opt_tol * (1.0 + cost[j].abs()) {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| d < best) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((q, _)) = entering else {
                return Ok(PhaseEnd::Optimal);
            };
            let alpha = self.ftran(q);
            let mut best: Option<(usize, f64)> = None;
            for i in 0..m {
                if alpha[i] > self.opts.pivot_tol {
                    let theta = self.xb[i].max(0.0) / alpha[i];
                    best = match best {
                        None => Some((i, theta)),
                        Some((r, t)) => {
                            let tie = (theta - t).abs() <= 1e-12 * (1.0 + t.abs());
                            if theta < t && !tie {
                                Some((i, theta))
                            } else if tie {
                                let better = if bland {
                                    self.basis[i] < self.basis[r]
                                } else {
                                    alpha[i] > alpha[r]
                                };
                                if better {
                                    Some((i, theta.min(t)))
                                } else {
                                    Some((r, theta.min(t)))
                                }
                            } else {
                                best
                            }
                        }
                    };
                }
            }
            let Some((r, theta)) = best else {
                return Ok(PhaseEnd::Unbounded);
            };
            if theta <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run > degenerate_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, q, &alpha, theta);
        }
    }

    /// Pivots basic artificials out of the basis where a structural or slack column allows it.
    fn expel_artificials(&mut self) {
        let m = self.sf.m;
        for r in 0..m {
            if self.basis[r] < self.sf.art_start {
                continue;
            }
            let row = self.binv[r * m..(r + 1) * m].to_vec();
            let candidate = (0..self.sf.art_start)
                .filter(|&j| !self.in_basis[j])
                .find(|&j| {
                    let v: f64 = self.sf.col(j).iter().zip(&row).map(|(a, b)| a * b).sum();
                    v.abs() > 1e-7
                });
            if let Some(q) = candidate {
                let alpha = self.ftran(q);
                let theta = self.xb[r] / alpha[r];
                self.pivot(r, q, &alpha, theta);
            }
        }
    }

    fn column_values(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.sf.ncols];
        for (i, &j) in self.basis.iter().enumerate() {
            s[j] = self.xb[i].max(0.0);
        }
        s
    }
}

/// Solves `p` with a two-phase revised simplex (Dantzig pricing, Bland's rule
/// after a long run of degenerate pivots). Duals are shadow prices of the final basis.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution, LpError> {
    solve_lp_with(p, SolverOptions::default())
}

pub fn solve_lp_with(p: &LpProblem, opts: SolverOptions) -> Result<LpSolution, LpError> {
    p.validate()?;
    let sf = Standard::build(p);
    let n = p.num_vars();
    let mut tab = Tableau::new(&sf, opts);

    let blank = |status| LpSolution {
        status,
        primal: vec![0.0; n],
        dual: vec![0.0; p.num_rows()],
        objective: match status {
            LpStatus::Infeasible => f64::NAN,
            _ => {
                if p.sense == Sense::Min {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
        },
        iterations: 0,
    };

    if sf.art_start < sf.ncols {
        let mut phase1 = vec![0.0; sf.ncols];
        phase1[sf.art_start..].iter_mut().for_each(|c| *c = 1.0);
        let allowed = vec![true; sf.ncols];
        tab.optimize(&phase1, &allowed)?;
        tab.refactor()?;
        let infeas: f64 = tab
            .basis
            .iter()
            .zip(&tab.xb)
            .filter(|(j, _)| **j >= sf.art_start)
            .map(|(_, x)| x)
            .sum();
        let scale = 1.0 + sf.b.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if infeas > opts.feas_tol * scale {
            let mut s = blank(LpStatus::Infeasible);
            s.iterations = tab.iterations;
            return Ok(s);
        }
        tab.expel_artificials();
    }

    let allowed: Vec<bool> = (0..sf.ncols).map(|j| j < sf.art_start).collect();
    match tab.optimize(&sf.cost, &allowed)? {
        PhaseEnd::Unbounded => {
            let mut s = blank(LpStatus::Unbounded);
            s.iterations = tab.iterations;
            return Ok(s);
        }
        PhaseEnd::Optimal => {}
    }
    tab.refactor()?;
    let cols = tab.column_values();
    let primal: Vec<f64> = sf
        .vars
        .iter()
        .map(|v| match *v {
            VarMap::Shifted { col, offset } => offset + cols[col],
            VarMap::Mirrored { col, offset } => offset - cols[col],
            VarMap::Split { pos, neg } => cols[pos] - cols[neg],
        })
        .collect();
    let y = tab.duals(&sf.cost);
    let sense = if p.sense == Sense::Max { -1.0 } else { 1.0 };
    // `+ 0.0` turns negative zeros into zeros.
    let dual = (0..sf.orig_rows)
        .map(|i| sense * sf.row_sign[i] * y[i] + 0.0)
        .collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: p.objective(&primal),
        primal,
        dual,
        iterations: tab.iterations,
    })
}

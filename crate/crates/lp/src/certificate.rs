use crate::model::{LpProblem, LpSolution, RowKind, Sense};

/// Optimality residuals of a primal-dual pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub complementarity: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|primal - dual| / max(1, |primal|)`.
    pub relative_gap: f64,
}

impl Certificate {
    /// Feasibility `<= 1e-7`, complementarity `<= 1e-6`, relative gap `<= 1e-6`.
    pub fn passes(&self) -> bool {
        self.primal_residual <= 1e-7
            && self.dual_residual <= 1e-7
            && self.complementarity <= 1e-6
            && self.relative_gap <= 1e-6
    }
}

/// Checks primal feasibility, dual feasibility, complementary slackness and the
/// duality gap of `sol` for `p`. Row duals are read as shadow prices.
pub fn certificate(p: &LpProblem, sol: &LpSolution) -> Certificate {
    let flip = if p.sense == Sense::Max { -1.0 } else { 1.0 };
    let cost: Vec<f64> = p.cost.iter().map(|c| flip * c).collect();
    let y: Vec<f64> = sol.dual.iter().map(|v| flip * v).collect();
    let x = &sol.primal;

    let mut primal_residual = 0.0f64;
    let mut dual_residual = 0.0f64;
    let mut complementarity = 0.0f64;
    let mut dual_objective = 0.0;

    for (row, &yi) in p.rows.iter().zip(&y) {
        let slack = row.rhs - row.activity(x);
        let (viol, sign_viol) = match row.kind {
            RowKind::Le => (-slack, yi),
            RowKind::Ge => (slack, -yi),
            RowKind::Eq => (slack.abs(), 0.0),
        };
        primal_residual = primal_residual.max(viol.max(0.0));
        dual_residual = dual_residual.max(sign_viol.max(0.0));
        complementarity = complementarity.max((yi * slack).abs());
        dual_objective += yi * row.rhs;
    }
    for j in 0..p.num_vars() {
        let (l, u) = (p.lower[j], p.upper[j]);
        primal_residual = primal_residual
            .max((l - x[j]).max(0.0))
            .max((x[j] - u).max(0.0));
        let d = cost[j]
            - p.rows
                .iter()
                .zip(&y)
                .map(|(r, yi)| r.coeffs[j] * yi)
                .sum::<f64>();
        if l.is_finite() {
            complementarity = complementarity.max(d.max(0.0) * (x[j] - l).abs());
            dual_objective += l * d.max(0.0);
        } else {
            dual_residual = dual_residual.max(d.max(0.0));
        }
        if u.is_finite() {
            complementarity = complementarity.max((-d).max(0.0) * (u - x[j]).abs());
            dual_objective += u * d.min(0.0);
        } else {
            dual_residual = dual_residual.max((-d).max(0.0));
        }
    }
    let primal_objective = cost.iter().zip(x).map(|(c, v)| c * v).sum::<f64>();
    Certificate {
        primal_residual,
        dual_residual,
        complementarity,
        primal_objective: flip * primal_objective,
        dual_objective: flip * dual_objective,
        relative_gap: (primal_objective - dual_objective).abs() / primal_objective.abs().max(1.0),
    }
}

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub kind: RowKind,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, kind: RowKind, rhs: f64) -> Self {
        Self { coeffs, kind, rhs }
    }

    pub fn le(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self::new(coeffs, RowKind::Le, rhs)
    }

    pub fn ge(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self::new(coeffs, RowKind::Ge, rhs)
    }

    pub fn eq(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self::new(coeffs, RowKind::Eq, rhs)
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// `opt c^T x` subject to tagged rows and `lower <= x <= upper`.
///
/// Lower bounds default to 0 and may be `-inf`; upper bounds default to `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub cost: Vec<f64>,
    pub rows: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    pub fn new(sense: Sense, cost: Vec<f64>) -> Self {
        let n = cost.len();
        Self {
            sense,
            cost,
            rows: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn minimize(cost: Vec<f64>) -> Self {
        Self::new(Sense::Min, cost)
    }

    pub fn maximize(cost: Vec<f64>) -> Self {
        Self::new(Sense::Max, cost)
    }

    pub fn with_row(mut self, row: Constraint) -> Self {
        self.rows.push(row);
        self
    }

    pub fn push(&mut self, row: Constraint) {
        self.rows.push(row);
    }

    pub fn with_bounds(mut self, j: usize, lower: f64, upper: f64) -> Self {
        self.lower[j] = lower;
        self.upper[j] = upper;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Malformed(format!(
                "{n} variables but {} / {} bounds",
                self.lower.len(),
                self.upper.len()
            )));
        }
        if self.cost.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Malformed("cost entries must be finite".into()));
        }
        for (j, (l, u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if l.is_nan() || u.is_nan() || *l == f64::INFINITY || *u == f64::NEG_INFINITY || l > u {
                return Err(LpError::Malformed(format!(
                    "variable {j}: invalid bounds [{l}, {u}]"
                )));
            }
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.coeffs.len() != n {
                return Err(LpError::Malformed(format!(
                    "row {i} has {} coefficients, expected {n}",
                    r.coeffs.len()
                )));
            }
            if !r.rhs.is_finite() || r.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(LpError::Malformed(format!("row {i} has non-finite data")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// Shadow price `d objective / d rhs` per row, in the problem's own sense.
    pub dual: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("simplex exceeded {0} iterations")]
    IterationLimit(usize),
    #[error("basis matrix became singular")]
    SingularBasis,
}

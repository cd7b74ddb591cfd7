//! Component-wise random functions `phi(x, xi)`.

use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiKind {
    /// `x ∧ xi`
    TruncMin,
    /// `x * xi`
    Product,
    /// `x xi / (x + alpha xi^kappa)`, `alpha > 0`, `kappa <= 1`
    Saturating { alpha: f64, kappa: f64 },
    /// `k x / (x + xi)`, `k >= 0`
    Share { k: f64 },
}

/// A random function family together with its declared Lipschitz constant in `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiFamily {
    kind: PhiKind,
    lipschitz: f64,
}

impl PhiFamily {
    pub fn new(kind: PhiKind, lipschitz: f64) -> Result<Self> {
        if !(lipschitz.is_finite() && lipschitz > 0.0) {
            return Err(Error::Argument(format!(
                "lipschitz constant {lipschitz} must be positive"
            )));
        }
        match kind {
            PhiKind::Saturating { alpha, kappa } if !(alpha > 0.0 && kappa <= 1.0) => {
                return Err(Error::Argument(format!(
                    "saturating family needs alpha > 0 and kappa <= 1 (got {alpha}, {kappa})"
                )))
            }
            PhiKind::Share { k } if !(k >= 0.0) => {
                return Err(Error::Argument(format!(
                    "share family needs k >= 0 (got {k})"
                )))
            }
            _ => {}
        }
        Ok(Self { kind, lipschitz })
    }

    /// `x ∧ xi`, which is 1-Lipschitz.
    pub fn trunc_min() -> Self {
        Self {
            kind: PhiKind::TruncMin,
            lipschitz: 1.0,
        }
    }

    pub fn kind(&self) -> PhiKind {
        self.kind
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn is_trunc_min(&self) -> bool {
        matches!(self.kind, PhiKind::TruncMin)
    }

    /// Scalar value for one coordinate.
    pub fn value_1d(&self, coord: usize, x: f64, xi: f64) -> Result<f64> {
        Ok(match self.kind {
            PhiKind::TruncMin => x.min(xi),
            PhiKind::Product => x * xi,
            PhiKind::Saturating { alpha, kappa } => {
                let den = x + alpha * xi.powf(kappa);
                if den == 0.0 {
                    return Err(Error::Singularity {
                        coord,
                        reason: "x + alpha * xi^kappa = 0".into(),
                    });
                }
                x * xi / den
            }
            PhiKind::Share { k } => {
                let den = x + xi;
                if den == 0.0 {
                    return Err(Error::Singularity {
                        coord,
                        reason: "x + xi = 0".into(),
                    });
                }
                k * x / den
            }
        })
    }

    /// Almost-everywhere derivative in `x` for one coordinate; 0 at the kink of `x ∧ xi`.
    pub fn derivative_1d(&self, coord: usize, x: f64, xi: f64) -> Result<f64> {
        Ok(match self.kind {
            PhiKind::TruncMin => {
                if x < xi {
                    1.0
                } else {
                    0.0
                }
            }
            PhiKind::Product => xi,
            PhiKind::Saturating { alpha, kappa } => {
                let s = alpha * xi.powf(kappa);
                let den = x + s;
                if den == 0.0 {
                    return Err(Error::Singularity {
                        coord,
                        reason: "x + alpha * xi^kappa = 0".into(),
                    });
                }
                xi * s / (den * den)
            }
            PhiKind::Share { k } => {
                let den = x + xi;
                if den == 0.0 {
                    return Err(Error::Singularity {
                        coord,
                        reason: "x + xi = 0".into(),
                    });
                }
                k * xi / (den * den)
            }
        })
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        check_len(x.len(), xi.len())?;
        x.iter()
            .zip(xi)
            .enumerate()
            .map(|(i, (&a, &b))| self.value_1d(i, a, b))
            .collect()
    }

    /// Diagonal of the Jacobian `∇_x phi(x, xi)`.
    pub fn grad(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        check_len(x.len(), xi.len())?;
        x.iter()
            .zip(xi)
            .enumerate()
            .map(|(i, (&a, &b))| self.derivative_1d(i, a, b))
            .collect()
    }
}

/// Applies `phi` component-wise.
pub fn phi_eval(phi: &PhiFamily, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
    phi.eval(x, xi)
}

/// Diagonal entries of `∇_x phi(x, xi)`.
pub fn phi_grad(phi: &PhiFamily, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
    phi.grad(x, xi)
}

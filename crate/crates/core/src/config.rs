use crate::error::{Error, Result};

/// Numerical tolerances shared by root finding and curve checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceConfig {
    /// Upper bound on the scaled residual of an accepted root.
    pub root_residual_tol: f64,
    /// Relative tolerance for `|Im f| <= tol * max(1, |f|)`.
    pub curve_im_tol: f64,
    /// Roots with `|A(z)B(z)|` below this (relative to the coefficient
    /// scale) are treated as zeros of `A B`.
    pub ab_exclusion_eps: f64,
    pub max_aberth_iters: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            root_residual_tol: 1e-8,
            curve_im_tol: 1e-6,
            ab_exclusion_eps: 1e-9,
            max_aberth_iters: 200,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("root_residual_tol", self.root_residual_tol),
            ("curve_im_tol", self.curve_im_tol),
            ("ab_exclusion_eps", self.ab_exclusion_eps),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.max_aberth_iters < 1 {
            return Err(Error::InvalidConfig("max_aberth_iters must be at least 1".into()));
        }
        Ok(())
    }
}

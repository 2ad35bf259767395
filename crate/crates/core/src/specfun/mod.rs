//! Complex special functions used by the exact propagators.

mod checks;
mod dd;
mod gamma;
mod hyp2f1;
mod lambert;
mod pcf;

pub use checks::{hyp2f1_wronskian_residual, pcf_wronskian_residual};
pub use gamma::{gamma_complex, ln_gamma, rgamma};
pub use hyp2f1::{gauss_2f1, gauss_2f1_dz};
pub use lambert::lambert_w_m1;
pub use pcf::{pcf_d, pcf_d_asymptotic, pcf_d_derivative, pcf_d_series, pcf_d_with_error};

/// Truncation and accuracy settings for series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Hard cap on the number of series terms.
    pub max_terms: usize,
    /// Terms below `rel_tol * |partial sum|` end the summation.
    pub rel_tol: f64,
    /// `|ξ|` at which the parabolic cylinder function switches from the
    /// Maclaurin representation to the large-argument expansion.
    pub regime_radius: f64,
    /// Largest acceptable estimated relative error of a returned value.
    pub max_rel_error: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_terms: 100_000,
            rel_tol: 1e-16,
            regime_radius: 6.0,
            max_rel_error: 1e-8,
        }
    }
}

impl SeriesControl {
    pub(crate) fn validate(&self) -> crate::Result<()> {
        if self.max_terms < 1 || !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(crate::Error::InvalidParameter(format!(
                "series control out of range: {self:?}"
            )));
        }
        Ok(())
    }
}

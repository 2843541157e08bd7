use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {name} = {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("quadrature did not converge after {evaluations} evaluations (estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        evaluations: usize,
        estimate: f64,
        error: f64,
    },

    #[error("integrand returned a non-finite value {value} at x = {at}")]
    NonFinite { at: f64, value: f64 },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("insufficient samples: {got} < {needed}")]
    InsufficientSamples { got: u64, needed: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    ok: bool,
    reason: &'static str,
) -> Result<()> {
    if ok && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason,
        })
    }
}

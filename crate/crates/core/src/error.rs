use thiserror::Error;

use crate::exact_scalars::Ball;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a function (e.g. `ln` of a ball touching zero).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision exhausted at {bits} bits, last radius {}", last.rad_decimal())]
    PrecisionExhausted { bits: u32, last: Box<Ball> },

    #[error("radius blow-up: {0}")]
    PrecisionOverflow(String),

    #[error("exact cancellation failed: {0}")]
    AlgebraMismatch(String),

    #[error("certificate failed: {0}")]
    CertificateFailed(String),

    #[error("singular 2x2 system at {0}")]
    SingularSystem(String),

    #[error("not integrable in closed form: {0}")]
    NonIntegrable(String),

    #[error("grid handle outside its domain: {0}")]
    HandleDomain(String),

    #[error("pole encountered near x = {0}")]
    PoleEncountered(String),

    #[error("local series fit diverged: {0}")]
    FitDiverged(String),

    #[error("fixture error: {0}")]
    Fixture(String),
}

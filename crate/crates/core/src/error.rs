use thiserror::Error;

/// Errors raised by the eigenstructure, path, drive and propagation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameters sit on an exceptional point (|J|^2 + E^2 = {discriminant:.3e})")]
    AtExceptionalPoint { discriminant: f64 },

    #[error("branch continuation is ambiguous: two candidates are equidistant from {previous}")]
    AmbiguousBranch { previous: f64 },

    #[error("mixing angle has no finite value at alpha_I = 0 unless alpha_R = 0")]
    HyperbolicSingularity,

    #[error("distance ratio {ratio} is too close to 1 for an Apollonius circle")]
    DegenerateRatio { ratio: f64 },

    #[error("path passes within {distance:.3e} rad/us of an exceptional point at t = {t} us")]
    PathTooCloseToEp { t: f64, distance: f64 },

    #[error("sampling too coarse: alpha_R jumps by {jump:.3} rad near t = {t} us")]
    SamplingTooCoarse { t: f64, jump: f64 },

    #[error("step too large: dt * |H| = {product:.3} exceeds 0.1 at t = {t} us")]
    StepTooLarge { t: f64, product: f64 },

    #[error("state became non-finite at t = {t} us")]
    NonFiniteState { t: f64 },

    #[error("eigenvalue gap {gap:.3e} rad/us is degenerate at t = {t} us")]
    DegenerateGap { t: f64, gap: f64 },

    #[error("not a density matrix: {reason}")]
    NotADensityMatrix { reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schedule table: {0}")]
    Table(String),
}

pub type Result<T> = std::result::Result<T, Error>;

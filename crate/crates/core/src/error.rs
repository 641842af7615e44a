use thiserror::Error;

/// Error type shared by the whole crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid spec rejected: {0}")]
    GridSpec(String),

    #[error("profile rejected: {0}")]
    Profile(String),

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("expected a {expected:?}-space profile, got {got:?}")]
    SpaceMismatch {
        expected: crate::profile::Space,
        got: crate::profile::Space,
    },

    #[error("profile must be decreasing; rearrange first")]
    NotMonotone,

    #[error("atom config rejected: {0}")]
    Config(String),

    #[error("no TF minimizer beyond neutrality (N = {n} > Z = {z})")]
    BeyondNeutrality { n: f64, z: f64 },

    #[error("solver failed to converge: {0}")]
    SolverNoConvergence(String),

    #[error("grid support mismatch: {0}")]
    GridSupport(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("profile csv: {0}")]
    Csv(String),
}

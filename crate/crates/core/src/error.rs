use thiserror::Error;

/// Errors raised by the rotator laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Q = {q} is outside the domain {domain} of profile `{profile}`")]
    Domain {
        profile: String,
        q: f64,
        domain: &'static str,
    },
    #[error("f'(Q) vanishes at Q = {q}; the quantity is undefined")]
    SingularDerivative { q: f64 },
    #[error("degeneracy ODE step failed at Q = {q}: f = {f} is not positive")]
    StepFailure { q: f64, f: f64 },
    #[error("the null direction does not rotate (Q = 0); momentum of the null direction undefined")]
    DegenerateRotation,
    #[error("block A is singular: 1 + 2Q f''/f' = {factor:e}")]
    SingularBlock { factor: f64 },
    #[error("velocity Hessian is degenerate: sigma_min/sigma_max = {ratio:e} (threshold {threshold:e})")]
    DegenerateHessian { ratio: f64, threshold: f64 },
    #[error("state invariant violated: {0}")]
    InvariantViolation(String),
    #[error("phase stalls at t = {t}: dphi/dt = {rate} is not positive")]
    PhaseStall { t: f64, rate: f64 },
    #[error("phase rate {rate} at t = {t} reaches the bound 2/ell = {bound}")]
    PhaseTooFast { t: f64, rate: f64, bound: f64 },
    #[error("initial jets differ by {mismatch:e}")]
    JetMismatch { mismatch: f64 },
    #[error("projector singular: |p.k| = {pk:e}")]
    ProjectorSingular { pk: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

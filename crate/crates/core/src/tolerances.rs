//! Numerical thresholds shared by the library, the CLI and the test suites.

/// `σ_min/σ_max` below which a velocity Hessian is declared degenerate.
pub const DEGENERACY_RATIO: f64 = 1e-8;

/// Initial step (units of ℓ) of the extrapolated central differences used for
/// `d/dt` in Euler–Lagrange residuals. A fixed step of 1e-5 leaves a rounding
/// floor of order 1e-8 relative in boosted frames near the rate bound; the
/// extrapolation tableau starts here and shrinks the step by 1.4 per level.
pub const RESIDUAL_STEP: f64 = 2e-2;

/// Exact solutions must satisfy both residual forms below this fraction of
/// the residual scale.
pub const EXACT_RESIDUAL_TOL: f64 = 1e-9;

/// Minimum `|p·k|` relative to `|p|·|k|` for the covariant projector.
pub const PROJECTOR_MIN: f64 = 1e-10;

/// Reporting threshold (units of ℓ) for the centre-of-momentum divergence of
/// the canonical indeterminism pair (ω = 1, ε = 0.2, ν = 1.5, T = 10). That
/// pair peaks at ℓ·sin(0.2) ≈ 0.1987ℓ (measured 0.19867ℓ); a little under half
/// of the peak is frozen here.
pub const DIVERGENCE_THRESHOLD: f64 = 0.09;

/// Initial-data match required of an indeterminism pair.
pub const JET_MATCH_TOL: f64 = 1e-12;

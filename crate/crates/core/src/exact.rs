//! Exact general solution of the fundamental rotator.
//!
//! With conserved momentum `P`, spin vector `S` and a unit vector `N ⟂ P, S`,
//! every solution is
//!
//! ```text
//! x(t) = P t/m + (ℓ/2) r(t) + x₀,    k(t) = P/m + n(t),
//! r = N sin φ + N⊥ cos φ,            n = dr/dφ,
//! ```
//!
//! where `N⊥ = ε(N, S, P)/(½m³ℓ)` and the phase `φ(t)` is arbitrary apart from
//! `0 < φ̇ < 2/ℓ`. The parameter `t` is proper time of the centre-of-momentum
//! frame, normalized by `P·ẋ = m`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chart::{
    angular_momentum, covariant_lagrangian, covariant_momenta, covariant_to_chart, hyperbolic_angle, ChartState,
    CovariantKinematics,
};
use crate::dynamics::{el_residual_chart, el_residual_covariant};
use crate::error::{Error, Result};
use crate::minkowski::{epsilon_contract, pauli_lubanski, AngularMomentum, FourVector, SolutionFrame};
use crate::output::{fmt_f64, CsvTable};
use crate::profiles::RotatorProfile;
use crate::tolerances::{JET_MATCH_TOL, RESIDUAL_STEP};

/// Phase `φ(t)` of the null direction on its great circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseProfile {
    /// `φ = ωt`
    Linear { omega: f64 },
    /// `φ = ωt + ε(1 − cos νt)`
    Modulated { omega: f64, eps: f64, nu: f64 },
}

impl PhaseProfile {
    pub fn phi(&self, t: f64) -> f64 {
        match *self {
            PhaseProfile::Linear { omega } => omega * t,
            PhaseProfile::Modulated { omega, eps, nu } => omega * t + eps * (1.0 - (nu * t).cos()),
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        match *self {
            PhaseProfile::Linear { omega } => omega,
            PhaseProfile::Modulated { omega, eps, nu } => omega + eps * nu * (nu * t).sin(),
        }
    }

    pub fn accel(&self, t: f64) -> f64 {
        match *self {
            PhaseProfile::Linear { .. } => 0.0,
            PhaseProfile::Modulated { eps, nu, .. } => eps * nu * nu * (nu * t).cos(),
        }
    }

    /// Bounds `(inf φ̇, sup φ̇)` over all `t`.
    pub fn rate_bounds(&self) -> (f64, f64) {
        match *self {
            PhaseProfile::Linear { omega } => (omega, omega),
            PhaseProfile::Modulated { omega, eps, nu } => {
                let a = (eps * nu).abs();
                (omega - a, omega + a)
            }
        }
    }

    /// Admissible for all `t` iff `0 < φ̇ < 2/ℓ` uniformly.
    pub fn validate(&self, ell: f64) -> Result<()> {
        let fields = match *self {
            PhaseProfile::Linear { omega } => vec![omega],
            PhaseProfile::Modulated { omega, eps, nu } => vec![omega, eps, nu],
        };
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite phase parameters {self:?}")));
        }
        let (lo, hi) = self.rate_bounds();
        if !(lo > 0.0) {
            return Err(Error::InvalidInput(format!("phase {self:?} stalls: inf dphi/dt = {lo} <= 0")));
        }
        if !(hi < 2.0 / ell) {
            return Err(Error::InvalidInput(format!(
                "phase {self:?} too fast: sup dphi/dt = {hi} >= 2/ell = {}",
                2.0 / ell
            )));
        }
        Ok(())
    }
}

/// Random admissible modulated phase with `φ̇ ∈ [0.1/ℓ, 1.9/ℓ]`.
pub fn random_phase<R: Rng>(rng: &mut R, ell: f64) -> PhaseProfile {
    let omega = rng.random_range(0.2..1.8);
    let room = 0.9 * (omega - 0.1_f64).min(1.9 - omega);
    let amp = rng.random_range(0.0..room);
    let nu = rng.random_range(0.3..3.0);
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    PhaseProfile::Modulated {
        omega: omega / ell,
        eps: sign * amp / nu,
        nu: nu / ell,
    }
}

/// Position and kinematics of an exact solution at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactPoint {
    pub x: FourVector,
    pub kin: CovariantKinematics,
}

impl ExactPoint {
    /// Largest component difference of `(x, ẋ, k, k̇)`.
    pub fn max_diff(&self, other: &ExactPoint) -> f64 {
        [
            (self.x - other.x).max_abs(),
            (self.kin.xdot - other.kin.xdot).max_abs(),
            (self.kin.k - other.kin.k).max_abs(),
            (self.kin.kdot - other.kin.kdot).max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSolution {
    pub frame: SolutionFrame,
    pub phase: PhaseProfile,
    pub x0: FourVector,
    n_perp: FourVector,
}

impl ExactSolution {
    pub fn new(frame: SolutionFrame, phase: PhaseProfile, x0: FourVector) -> Result<Self> {
        phase.validate(frame.ell)?;
        let scale = 0.5 * frame.m.powi(3) * frame.ell;
        let n_perp = epsilon_contract(&frame.n, &frame.spin, &frame.p) * (1.0 / scale);
        Ok(ExactSolution { frame, phase, x0, n_perp })
    }

    pub fn n_perp(&self) -> FourVector {
        self.n_perp
    }

    /// `N⊥·N⊥ + 1`, `N⊥·N`, `N⊥·P`, `N⊥·S`, each relative to the entering scales.
    pub fn basis_residuals(&self) -> [f64; 4] {
        let f = &self.frame;
        let np = &self.n_perp;
        let s = np.max_abs();
        [
            (np.square() + 1.0).abs() / (s * s),
            np.dot(&f.n).abs() / (s * f.n.max_abs()),
            np.dot(&f.p).abs() / (s * f.p.max_abs()),
            np.dot(&f.spin).abs() / (s * f.spin.max_abs()),
        ]
    }

    /// `r(φ)` and `n(φ) = dr/dφ`.
    fn circle(&self, phi: f64) -> (FourVector, FourVector) {
        let (s, c) = phi.sin_cos();
        let (n, np) = (self.frame.n, self.n_perp);
        (n * s + np * c, n * c - np * s)
    }

    pub fn eval(&self, t: f64) -> Result<ExactPoint> {
        let rate = self.phase.rate(t);
        if !(rate > 0.0) {
            return Err(Error::PhaseStall { t, rate });
        }
        let (m, ell) = (self.frame.m, self.frame.ell);
        if !(rate < 2.0 / ell) {
            return Err(Error::PhaseTooFast { t, rate, bound: 2.0 / ell });
        }
        let (r, n) = self.circle(self.phase.phi(t));
        let u = self.frame.p * (1.0 / m);
        Ok(ExactPoint {
            x: u * t + r * (0.5 * ell) + self.x0,
            kin: CovariantKinematics {
                xdot: u + n * (0.5 * ell * rate),
                k: u + n,
                kdot: r * (-rate),
            },
        })
    }

    /// Centre-of-momentum time `t` at which `x⁰(t) = ℓ t_c` (Newton).
    pub fn cm_time(&self, t_chart: f64) -> Result<f64> {
        let (m, ell) = (self.frame.m, self.frame.ell);
        let target = ell * t_chart;
        let mut t = (target - self.x0[0]) * m / self.frame.p[0];
        let tol = 4.0 * f64::EPSILON * target.abs().max(ell);
        let mut best = (f64::INFINITY, t);
        for _ in 0..60 {
            let pt = self.eval(t)?;
            let miss = pt.x[0] - target;
            if miss.abs() < best.0 {
                best = (miss.abs(), t);
            }
            if miss.abs() <= tol {
                return Ok(t);
            }
            t -= miss / pt.kin.xdot[0];
        }
        // rounding can keep the iteration cycling just above `tol`
        if best.0 <= 64.0 * tol {
            return Ok(best.1);
        }
        Err(Error::InvalidInput(format!("chart time {t_chart}: time inversion did not converge")))
    }

    /// Chart state at chart time `t_c = x⁰/ℓ`.
    pub fn chart_state(&self, t_chart: f64) -> Result<ChartState> {
        let t = self.cm_time(t_chart)?;
        covariant_to_chart(&self.eval(t)?.kin, self.frame.ell)
    }

    /// `φ̇(t)`.
    pub fn angular_speed(&self, t: f64) -> f64 {
        self.phase.rate(t)
    }

    /// `(2/ℓ) tanh Ψ` with `Ψ` recovered from the kinematic data through `Q`.
    pub fn angular_speed_from_kinematics(&self, t: f64) -> Result<f64> {
        let ell = self.frame.ell;
        let q = self.eval(t)?.kin.q(ell);
        Ok(2.0 / ell * hyperbolic_angle(q).tanh())
    }

    /// `Ψ` from `P·u = m cosh Ψ`.
    pub fn hyperbolic_angle_from_momentum(&self, t: f64) -> Result<f64> {
        let kin = self.eval(t)?.kin;
        let u = kin.xdot * (1.0 / kin.xdot.square().sqrt());
        Ok((self.frame.p.dot(&u) / self.frame.m).acosh())
    }

    /// Closed form `S(T) − S(0) = −mT − (mℓ/2)(φ(T) − φ(0))`.
    pub fn action(&self, t_end: f64) -> f64 {
        let (m, ell) = (self.frame.m, self.frame.ell);
        -m * t_end - 0.5 * m * ell * (self.phase.phi(t_end) - self.phase.phi(0.0))
    }

    /// Composite Simpson quadrature of `L = −m√(ẋẋ) f(Q)` over `[0, T]`.
    pub fn action_quadrature(&self, profile: &RotatorProfile, t_end: f64, panels: usize) -> Result<f64> {
        let n = panels.max(2) + panels % 2;
        let h = t_end / n as f64;
        let (m, ell) = (self.frame.m, self.frame.ell);
        let mut sum = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * covariant_lagrangian(profile, &self.eval(i as f64 * h)?.kin, m, ell)?;
        }
        Ok(sum * h / 3.0)
    }

    /// `d²n/dφ² + n` with `n = k − P/m` and `d²n/dφ² = −dr/dφ`, where `r` is
    /// rebuilt from `ẋ`. Vanishes on great circles.
    pub fn great_circle_residual(&self, t: f64) -> Result<FourVector> {
        let pt = self.eval(t)?;
        let u = self.frame.p * (1.0 / self.frame.m);
        let dr_dphi = (pt.kin.xdot - u) * (2.0 / (self.frame.ell * self.phase.rate(t)));
        Ok((pt.kin.k - u) - dr_dphi)
    }

    /// Noether charges `(p, M, W)` at `t` computed from the solution under `profile`.
    pub fn noether_charges(&self, profile: &RotatorProfile, t: f64) -> Result<(FourVector, AngularMomentum, FourVector)> {
        let pt = self.eval(t)?;
        let (p, pi) = covariant_momenta(profile, &pt.kin, self.frame.m, self.frame.ell)?;
        let mm = angular_momentum(&pt.x, &p, &pt.kin.k, &pi);
        Ok((p, mm, pauli_lubanski(&mm, &p)))
    }
}

/// Residuals of an exact solution at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactResidualRow {
    /// Centre-of-momentum time.
    pub t: f64,
    /// Chart residual relative to its scale, at `t_c = x⁰(t)/ℓ`.
    pub chart: f64,
    /// Covariant residual relative to its scale.
    pub covariant: f64,
}

impl ExactResidualRow {
    pub fn max(&self) -> f64 {
        self.chart.max(self.covariant)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactReport {
    pub rows: Vec<ExactResidualRow>,
}

impl ExactReport {
    pub fn max_chart(&self) -> f64 {
        self.rows.iter().map(|r| r.chart).fold(0.0, f64::max)
    }

    pub fn max_covariant(&self) -> f64 {
        self.rows.iter().map(|r| r.covariant).fold(0.0, f64::max)
    }

    pub fn max(&self) -> f64 {
        self.max_chart().max(self.max_covariant())
    }
}

/// Chart and covariant residuals at one centre-of-momentum time.
pub fn residual_at(profile: &RotatorProfile, sol: &ExactSolution, t: f64) -> Result<ExactResidualRow> {
    let (m, ell) = (sol.frame.m, sol.frame.ell);
    let t_chart = sol.eval(t)?.x[0] / ell;
    let chart = el_residual_chart(profile, |s| sol.chart_state(s), t_chart, RESIDUAL_STEP)?;
    let cov = el_residual_covariant(profile, |s| sol.eval(s).map(|p| p.kin), t, m, ell, RESIDUAL_STEP * ell)?;
    Ok(ExactResidualRow {
        t,
        chart: chart.relative(),
        covariant: cov.relative(),
    })
}

/// Run both residual forms along `sol` at every time of `grid`.
pub fn verify_exact(profile: &RotatorProfile, sol: &ExactSolution, grid: &[f64]) -> Result<ExactReport> {
    let rows = grid.iter().map(|&t| residual_at(profile, sol, t)).collect::<Result<Vec<_>>>()?;
    Ok(ExactReport { rows })
}

/// `n` evenly spaced times covering `[0, T]`.
pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
}

/// Centre-of-momentum spatial distance between two positions with common momentum `P`.
pub fn cm_separation(p: &FourVector, a: &FourVector, b: &FourVector) -> f64 {
    let d = *a - *b;
    let perp = d - *p * (p.dot(&d) / p.square());
    (-perp.square()).max(0.0).sqrt()
}

/// Two exact solutions sharing frame and initial data but not their phase.
#[derive(Debug, Clone, PartialEq)]
pub struct IndeterminismReport {
    pub profile: RotatorProfile,
    pub phase1: PhaseProfile,
    pub phase2: PhaseProfile,
    /// Max component difference of `(x, ẋ, k, k̇)` at `t = 0`.
    pub jet_mismatch: f64,
    pub times: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub residual1: Vec<f64>,
    pub residual2: Vec<f64>,
    /// Centre-of-momentum spatial separation `Δ(t)`.
    pub delta: Vec<f64>,
}

impl IndeterminismReport {
    pub fn max_residual1(&self) -> f64 {
        self.residual1.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_residual2(&self) -> f64 {
        self.residual2.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_delta(&self) -> f64 {
        self.delta.iter().copied().fold(0.0, f64::max)
    }

    pub const CSV_HEADER: [&'static str; 6] = ["t", "phi1", "phi2", "residual1", "residual2", "delta"];

    pub fn to_csv(&self) -> String {
        let mut table = CsvTable::new(&Self::CSV_HEADER);
        for i in 0..self.times.len() {
            let row = [self.times[i], self.phi1[i], self.phi2[i], self.residual1[i], self.residual2[i], self.delta[i]];
            table.push(row.iter().map(|v| fmt_f64(*v)).collect());
        }
        table.render()
    }
}

/// Evaluate two phases on a common frame. Residuals are taken under `profile`
/// (the fundamental one for the genuine demonstration).
pub fn indeterminism_pair(
    profile: &RotatorProfile,
    frame: &SolutionFrame,
    phase1: PhaseProfile,
    phase2: PhaseProfile,
    grid: &[f64],
) -> Result<IndeterminismReport> {
    let s1 = ExactSolution::new(*frame, phase1, FourVector::ZERO)?;
    let s2 = ExactSolution::new(*frame, phase2, FourVector::ZERO)?;
    let jet_mismatch = s1.eval(0.0)?.max_diff(&s2.eval(0.0)?);
    if !(jet_mismatch < JET_MATCH_TOL) {
        return Err(Error::JetMismatch { mismatch: jet_mismatch });
    }
    let mut report = IndeterminismReport {
        profile: *profile,
        phase1,
        phase2,
        jet_mismatch,
        times: Vec::with_capacity(grid.len()),
        phi1: Vec::with_capacity(grid.len()),
        phi2: Vec::with_capacity(grid.len()),
        residual1: Vec::with_capacity(grid.len()),
        residual2: Vec::with_capacity(grid.len()),
        delta: Vec::with_capacity(grid.len()),
    };
    for &t in grid {
        let (a, b) = (s1.eval(t)?, s2.eval(t)?);
        report.times.push(t);
        report.phi1.push(phase1.phi(t));
        report.phi2.push(phase2.phi(t));
        report.residual1.push(residual_at(profile, &s1, t)?.max());
        report.residual2.push(residual_at(profile, &s2, t)?.max());
        report.delta.push(cm_separation(&frame.p, &a.x, &b.x));
    }
    Ok(report)
}

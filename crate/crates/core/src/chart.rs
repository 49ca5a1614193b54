//! Coordinate chart with Cartesian position, spherical angles for the null
//! direction and chart time `t = x⁰/ℓ`:
//!
//! `x⁰ = ℓt`, `x⃗ = ℓX⃗(t)`, `k = (1, N)`, `N = (sinθ cosφ, sinθ sinφ, cosθ)`.
//!
//! In this gauge the Lagrangian is `L = −mℓ 𝓛` with the reduced Lagrangian
//! `𝓛(V, w) = √(1 − VᵀV) f(Q)`, `Q = wᵀw/(1 − NᵀV)²` and `w = (θ̇, φ̇ sinθ)`.

use serde::{Deserialize, Serialize};

use crate::dual::Real;
use crate::error::{Error, Result};
use crate::minkowski::{AngularMomentum, FourVector};
use crate::profiles::RotatorProfile;

/// States with `|sin θ|` below this are rejected (the chart is singular at the poles).
pub const POLE_EXCLUSION: f64 = 1e-6;

/// Five-degree-of-freedom chart state. Position is omitted: the Lagrangian
/// does not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartState {
    pub theta: f64,
    pub phi_sph: f64,
    #[serde(rename = "V")]
    pub v: [f64; 3],
    pub theta_dot: f64,
    pub phi_sph_dot: f64,
}

impl ChartState {
    /// Unit 3-vector of the null direction.
    pub fn n(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi_sph.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// `w = (θ̇, φ̇ sinθ)`.
    pub fn w(&self) -> [f64; 2] {
        [self.theta_dot, self.phi_sph_dot * self.theta.sin()]
    }

    pub fn speed_sq(&self) -> f64 {
        self.v.iter().map(|c| c * c).sum()
    }

    /// `1 − NᵀV`.
    pub fn denominator(&self) -> f64 {
        let n = self.n();
        1.0 - (n[0] * self.v[0] + n[1] * self.v[1] + n[2] * self.v[2])
    }

    /// `Q = wᵀw/(1 − NᵀV)²`.
    pub fn q(&self) -> f64 {
        let w = self.w();
        (w[0] * w[0] + w[1] * w[1]) / self.denominator().powi(2)
    }

    /// Generalized coordinates `(X¹, X², X³, θ, φ)` with the given position.
    pub fn coordinates(&self, position: [f64; 3]) -> [f64; 5] {
        [position[0], position[1], position[2], self.theta, self.phi_sph]
    }

    /// Generalized velocities `(V¹, V², V³, θ̇, φ̇)`.
    pub fn velocities(&self) -> [f64; 5] {
        [self.v[0], self.v[1], self.v[2], self.theta_dot, self.phi_sph_dot]
    }

    pub fn from_coordinates(q: &[f64; 5], qd: &[f64; 5]) -> Self {
        ChartState {
            theta: q[3],
            phi_sph: q[4],
            v: [qd[0], qd[1], qd[2]],
            theta_dot: qd[3],
            phi_sph_dot: qd[4],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.theta, self.phi_sph, self.theta_dot, self.phi_sph_dot]
            .iter()
            .chain(self.v.iter())
            .all(|c| c.is_finite());
        if !finite {
            return Err(Error::InvariantViolation("non-finite chart state".into()));
        }
        let v2 = self.speed_sq();
        if v2 >= 1.0 {
            return Err(Error::InvariantViolation(format!("superluminal velocity, |V|^2 = {v2}")));
        }
        if self.theta.sin().abs() < POLE_EXCLUSION {
            return Err(Error::InvariantViolation(format!(
                "null direction at a chart pole, theta = {}",
                self.theta
            )));
        }
        let d = self.denominator();
        if d <= 0.0 {
            return Err(Error::InvariantViolation(format!("1 - N.V = {d} <= 0")));
        }
        Ok(())
    }
}

/// Covariant kinematic data per unit of the curve parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariantKinematics {
    pub xdot: FourVector,
    pub k: FourVector,
    pub kdot: FourVector,
}

impl CovariantKinematics {
    /// `Q = −ℓ²(k̇k̇)/(kẋ)²`.
    pub fn q(&self, ell: f64) -> f64 {
        -ell * ell * self.kdot.square() / self.k.dot(&self.xdot).powi(2)
    }
}

/// `Q` of a chart state.
pub fn chart_q(state: &ChartState) -> f64 {
    state.q()
}

/// Reduced Lagrangian `𝓛(w, V)` at fixed null direction `n`.
pub fn reduced_lagrangian<T: Real>(profile: &RotatorProfile, n: &[f64; 3], w: &[T; 2], v: &[T; 3]) -> T {
    let ww = w[0] * w[0] + w[1] * w[1];
    let vv = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let d = -(v[0] * n[0] + v[1] * n[1] + v[2] * n[2]) + 1.0;
    let q = ww / (d * d);
    (-vv + 1.0).sqrt() * profile.value(q)
}

/// Reduced Lagrangian in generalized coordinates `q = (X, θ, φ)` and
/// velocities `q̇ = (V, θ̇, φ̇)`.
pub fn lagrangian_in_coordinates<T: Real>(profile: &RotatorProfile, q: &[T; 5], qd: &[T; 5]) -> T {
    let (st, ct) = (q[3].sin(), q[3].cos());
    let (sp, cp) = (q[4].sin(), q[4].cos());
    let n = [st * cp, st * sp, ct];
    let w1 = qd[3];
    let w2 = qd[4] * st;
    let ww = w1 * w1 + w2 * w2;
    let vv = qd[0] * qd[0] + qd[1] * qd[1] + qd[2] * qd[2];
    let d = -(qd[0] * n[0] + qd[1] * n[1] + qd[2] * n[2]) + 1.0;
    (-vv + 1.0).sqrt() * profile.value(ww / (d * d))
}

/// `𝓛 = √(1 − VᵀV) f(Q)`.
pub fn chart_lagrangian(profile: &RotatorProfile, state: &ChartState) -> Result<f64> {
    state.validate()?;
    let v = profile.eval(state.q())?;
    Ok((1.0 - state.speed_sq()).sqrt() * v.f)
}

/// Four-vectors `ẋ`, `k`, `k̇` per unit chart time.
pub fn chart_to_covariant(state: &ChartState, ell: f64) -> CovariantKinematics {
    let (st, ct) = state.theta.sin_cos();
    let (sp, cp) = state.phi_sph.sin_cos();
    let (td, pd) = (state.theta_dot, state.phi_sph_dot);
    let ndot = [
        td * ct * cp - pd * st * sp,
        td * ct * sp + pd * st * cp,
        -td * st,
    ];
    CovariantKinematics {
        xdot: FourVector::from_parts(ell, state.v.map(|c| ell * c)),
        k: FourVector::from_parts(1.0, state.n()),
        kdot: FourVector::from_parts(0.0, ndot),
    }
}

/// Chart state of covariant data given in any parametrization and any
/// scaling of the null vector (`ẋ⁰ > 0`, `k⁰ > 0` required).
pub fn covariant_to_chart(kin: &CovariantKinematics, ell: f64) -> Result<ChartState> {
    let (xd, k, kd) = (kin.xdot, kin.k, kin.kdot);
    if !(xd[0] > 0.0 && k[0] > 0.0) {
        return Err(Error::InvariantViolation(format!(
            "chart needs future-directed data, got xdot0 = {}, k0 = {}",
            xd[0], k[0]
        )));
    }
    // d/dt_chart = (ℓ/ẋ⁰) d/dτ
    let rate = ell / xd[0];
    let n = [k[1] / k[0], k[2] / k[0], k[3] / k[0]];
    let nd: [f64; 3] = std::array::from_fn(|i| rate * (kd[i + 1] * k[0] - k[i + 1] * kd[0]) / (k[0] * k[0]));
    let rho2 = n[0] * n[0] + n[1] * n[1];
    let theta = rho2.sqrt().atan2(n[2]);
    let st = theta.sin();
    if st.abs() < POLE_EXCLUSION {
        return Err(Error::InvariantViolation(format!("null direction at a chart pole, theta = {theta}")));
    }
    let state = ChartState {
        theta,
        phi_sph: n[1].atan2(n[0]),
        v: [xd[1] / xd[0], xd[2] / xd[0], xd[3] / xd[0]],
        theta_dot: -nd[2] / st,
        phi_sph_dot: (n[0] * nd[1] - n[1] * nd[0]) / rho2,
    };
    state.validate()?;
    Ok(state)
}

/// Covariant Lagrangian `L = −m√(ẋẋ) f(Q)`.
pub fn covariant_lagrangian(profile: &RotatorProfile, kin: &CovariantKinematics, m: f64, ell: f64) -> Result<f64> {
    let v = profile.eval(kin.q(ell))?;
    Ok(-m * kin.xdot.square().sqrt() * v.f)
}

/// Canonical momenta from covariant data:
///
/// `p = m f ẋ/√(ẋẋ) − 2mQf′ √(ẋẋ)/(kẋ) k`, `π = 2mQf′ √(ẋẋ)/(k̇k̇) k̇`.
pub fn covariant_momenta(
    profile: &RotatorProfile,
    kin: &CovariantKinematics,
    m: f64,
    ell: f64,
) -> Result<(FourVector, FourVector)> {
    let q = kin.q(ell);
    if q == 0.0 && !profile.contains(0.0) {
        return Err(Error::DegenerateRotation);
    }
    let v = profile.eval(q)?;
    let s = kin.xdot.square().sqrt();
    let kx = kin.k.dot(&kin.xdot);
    let p = kin.xdot * (m * v.f / s) - kin.k * (2.0 * m * q * v.df * s / kx);
    // Q/(k̇k̇) = −ℓ²/(kẋ)², finite also when k̇ = 0
    let pi = kin.kdot * (-2.0 * m * ell * ell * v.df * s / (kx * kx));
    Ok((p, pi))
}

/// Canonical momenta `(p, π)` of a chart state.
pub fn canonical_momenta(
    profile: &RotatorProfile,
    state: &ChartState,
    m: f64,
    ell: f64,
) -> Result<(FourVector, FourVector)> {
    state.validate()?;
    covariant_momenta(profile, &chart_to_covariant(state, ell), m, ell)
}

/// `M_{μν} = x_μp_ν − x_νp_μ + k_μπ_ν − k_νπ_μ`.
pub fn angular_momentum(x: &FourVector, p: &FourVector, k: &FourVector, pi: &FourVector) -> AngularMomentum {
    AngularMomentum::wedge(x, p) + AngularMomentum::wedge(k, pi)
}

/// Hyperbolic angle `Ψ = ½ ln(1 + √Q)` between momentum and world velocity.
pub fn hyperbolic_angle(q: f64) -> f64 {
    0.5 * q.sqrt().ln_1p()
}

/// World velocity `u = ẋ/√(ẋẋ)`.
pub fn world_velocity(kin: &CovariantKinematics) -> FourVector {
    kin.xdot * (1.0 / kin.xdot.square().sqrt())
}

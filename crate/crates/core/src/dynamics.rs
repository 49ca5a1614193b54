//! Euler–Lagrange residuals, acceleration solves and trajectory integration.
//!
//! In the chart the equations of motion read `H q̈ = Z` with
//! `H = ∂²𝓛/∂q̇∂q̇` and `Z = ∂𝓛/∂q − (∂²𝓛/∂q̇∂q) q̇`. When `H` is regular they
//! are integrated in canonical first-order form `ẏ = F(y)`, `y = (q, q̇)`.

use nalgebra::{Matrix5, Vector5};

use crate::chart::{
    angular_momentum, canonical_momenta, chart_to_covariant, covariant_lagrangian, covariant_momenta,
    lagrangian_in_coordinates, ChartState, CovariantKinematics,
};
use crate::dual::HyperDual;
use crate::error::{Error, Result};
use crate::hessian::singular_value_ratio;
use crate::minkowski::{pauli_lubanski, AngularMomentum, FourVector};
use crate::output::{fmt_f64, CsvTable};
use crate::profiles::RotatorProfile;
use crate::tolerances::{DEGENERACY_RATIO, PROJECTOR_MIN};

/// Position and chart state: a full phase-space point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    /// `X = x⃗/ℓ`
    pub position: [f64; 3],
    pub state: ChartState,
}

impl ChartPoint {
    pub fn at_origin(state: ChartState) -> Self {
        ChartPoint { position: [0.0; 3], state }
    }

    fn to_vec(self) -> [f64; 10] {
        let q = self.state.coordinates(self.position);
        let qd = self.state.velocities();
        std::array::from_fn(|i| if i < 5 { q[i] } else { qd[i - 5] })
    }

    fn from_vec(y: &[f64; 10]) -> Self {
        let q: [f64; 5] = std::array::from_fn(|i| y[i]);
        let qd: [f64; 5] = std::array::from_fn(|i| y[i + 5]);
        ChartPoint {
            position: [y[0], y[1], y[2]],
            state: ChartState::from_coordinates(&q, &qd),
        }
    }
}

/// First and second derivatives of `𝓛(q, q̇)` needed by the equations of motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianJet {
    pub value: f64,
    /// `∂𝓛/∂q`
    pub dq: [f64; 5],
    /// `∂𝓛/∂q̇`
    pub dqd: [f64; 5],
    /// `∂²𝓛/∂q̇ᵢ∂q̇ⱼ`
    pub h: Matrix5<f64>,
    /// `∂²𝓛/∂q̇ᵢ∂qⱼ`
    pub k: Matrix5<f64>,
}

fn lift(x: &[f64; 5], seed1: Option<usize>, seed2: Option<usize>) -> [HyperDual; 5] {
    std::array::from_fn(|i| {
        HyperDual::new(
            x[i],
            if seed1 == Some(i) { 1.0 } else { 0.0 },
            if seed2 == Some(i) { 1.0 } else { 0.0 },
            0.0,
        )
    })
}

/// Value and first derivatives `(𝓛, ∂𝓛/∂q, ∂𝓛/∂q̇)`.
pub fn lagrangian_gradient(profile: &RotatorProfile, q: &[f64; 5], qd: &[f64; 5]) -> (f64, [f64; 5], [f64; 5]) {
    let mut dq = [0.0; 5];
    let mut dqd = [0.0; 5];
    let mut value = 0.0;
    for i in 0..5 {
        let a = lagrangian_in_coordinates(profile, &lift(q, Some(i), None), &lift(qd, None, None));
        let b = lagrangian_in_coordinates(profile, &lift(q, None, None), &lift(qd, Some(i), None));
        dq[i] = a.e1;
        dqd[i] = b.e1;
        value = a.re;
    }
    (value, dq, dqd)
}

/// All derivatives entering `H q̈ = Z`. Positions `X` do not enter `𝓛`, so
/// their columns of `∂²𝓛/∂q̇∂q` vanish identically and are not evaluated.
pub fn lagrangian_jet(profile: &RotatorProfile, q: &[f64; 5], qd: &[f64; 5]) -> LagrangianJet {
    let mut h = Matrix5::zeros();
    let mut k = Matrix5::zeros();
    let mut dq = [0.0; 5];
    let mut dqd = [0.0; 5];
    let mut value = 0.0;
    for i in 0..5 {
        for j in i..5 {
            let r = lagrangian_in_coordinates(profile, &lift(q, None, None), &lift(qd, Some(i), Some(j)));
            h[(i, j)] = r.e12;
            h[(j, i)] = r.e12;
            if i == j {
                dqd[i] = r.e1;
                value = r.re;
            }
        }
        for j in 3..5 {
            let r = lagrangian_in_coordinates(profile, &lift(q, None, Some(j)), &lift(qd, Some(i), None));
            k[(i, j)] = r.e12;
            dq[j] = r.e2;
        }
    }
    LagrangianJet { value, dq, dqd, h, k }
}

/// The linear system `H q̈ = Z` at a state.
pub fn acceleration_system(profile: &RotatorProfile, state: &ChartState) -> Result<(Matrix5<f64>, Vector5<f64>)> {
    state.validate()?;
    profile.eval(state.q())?;
    let q = state.coordinates([0.0; 3]);
    let qd = state.velocities();
    let jet = lagrangian_jet(profile, &q, &qd);
    let z = Vector5::from(jet.dq) - jet.k * Vector5::from(qd);
    Ok((jet.h, z))
}

/// Generalized accelerations `q̈ = (V̇, θ̈, φ̈)`; fails with
/// [`Error::DegenerateHessian`] when `σ_min/σ_max` of `H` is below threshold.
pub fn accelerations(profile: &RotatorProfile, state: &ChartState) -> Result<[f64; 5]> {
    let (h, z) = acceleration_system(profile, state)?;
    let (ratio, _) = singular_value_ratio(&h);
    if !(ratio >= DEGENERACY_RATIO) {
        return Err(Error::DegenerateHessian {
            ratio,
            threshold: DEGENERACY_RATIO,
        });
    }
    let x = h
        .lu()
        .solve(&z)
        .ok_or(Error::DegenerateHessian { ratio, threshold: DEGENERACY_RATIO })?;
    Ok([x[0], x[1], x[2], x[3], x[4]])
}

/// Same as [`accelerations`] without the spectral check (used inside RK4
/// stages once the step has been screened).
fn accelerations_unchecked(profile: &RotatorProfile, state: &ChartState) -> Result<[f64; 5]> {
    let (h, z) = acceleration_system(profile, state)?;
    let x = h.lu().solve(&z).ok_or(Error::DegenerateHessian {
        ratio: 0.0,
        threshold: DEGENERACY_RATIO,
    })?;
    Ok([x[0], x[1], x[2], x[3], x[4]])
}

fn vector_field(profile: &RotatorProfile, y: &[f64; 10]) -> Result<[f64; 10]> {
    let p = ChartPoint::from_vec(y);
    let a = accelerations_unchecked(profile, &p.state)?;
    Ok(std::array::from_fn(|i| if i < 5 { y[i + 5] } else { a[i - 5] }))
}

fn rk4_step(profile: &RotatorProfile, y: &[f64; 10], h: f64) -> Result<[f64; 10]> {
    let add = |a: &[f64; 10], b: &[f64; 10], s: f64| -> [f64; 10] { std::array::from_fn(|i| a[i] + s * b[i]) };
    let k1 = vector_field(profile, y)?;
    let k2 = vector_field(profile, &add(y, &k1, 0.5 * h))?;
    let k3 = vector_field(profile, &add(y, &k2, 0.5 * h))?;
    let k4 = vector_field(profile, &add(y, &k3, h))?;
    Ok(std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
}

/// Advance a phase-space point by `duration` (either sign) with RK4 substeps
/// no longer than `max_step`.
pub fn propagate(profile: &RotatorProfile, point: &ChartPoint, duration: f64, max_step: f64) -> Result<ChartPoint> {
    let n = (duration.abs() / max_step).ceil().max(1.0) as usize;
    let h = duration / n as f64;
    let mut y = point.to_vec();
    for _ in 0..n {
        y = rk4_step(profile, &y, h)?;
    }
    let out = ChartPoint::from_vec(&y);
    out.state.validate()?;
    Ok(out)
}

/// Chart-form residual of the Euler–Lagrange equations at a point of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartResidual {
    /// `d/dt(∂𝓛/∂q̇) − ∂𝓛/∂q`, ordered `(X¹, X², X³, θ, φ)`.
    pub residual: [f64; 5],
    /// `max(|𝓛|, ‖∂𝓛/∂q̇‖)`.
    pub scale: f64,
}

impl ChartResidual {
    pub fn max_abs(&self) -> f64 {
        self.residual.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    pub fn relative(&self) -> f64 {
        self.max_abs() / self.scale
    }
}

/// Derivative of a vector-valued function by central differences refined
/// with Richardson extrapolation over a shrinking sequence of steps (Ridders'
/// tableau). `h0` is the largest step; each level divides it by 1.4 and the
/// entry with the smallest error estimate wins. Returns the derivative and
/// its estimated max-norm error.
pub fn extrapolated_derivative<const N: usize>(
    f: impl Fn(f64) -> Result<[f64; N]>,
    t: f64,
    h0: f64,
) -> Result<([f64; N], f64)> {
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const LEVELS: usize = 10;
    const SAFE: f64 = 2.0;
    let central = |h: f64| -> Result<[f64; N]> {
        let (p, m) = (f(t + h)?, f(t - h)?);
        Ok(std::array::from_fn(|i| (p[i] - m[i]) / (2.0 * h)))
    };
    let dist = |a: &[f64; N], b: &[f64; N]| a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let mut h = h0;
    // prev[j] holds column i-1 of the tableau, cur[j] column i
    let mut prev: Vec<[f64; N]> = vec![central(h)?];
    let mut best = prev[0];
    let mut err = f64::INFINITY;
    for i in 1..LEVELS {
        h /= CON;
        let mut cur = Vec::with_capacity(i + 1);
        cur.push(central(h)?);
        let mut fac = CON2;
        for j in 1..=i {
            let a: [f64; N] = std::array::from_fn(|k| (cur[j - 1][k] * fac - prev[j - 1][k]) / (fac - 1.0));
            fac *= CON2;
            let e = dist(&a, &cur[j - 1]).max(dist(&a, &prev[j - 1]));
            if e <= err {
                err = e;
                best = a;
            }
            cur.push(a);
        }
        let stop = dist(&cur[i], &prev[i - 1]) >= SAFE * err;
        prev = cur;
        if stop {
            break;
        }
    }
    Ok((best, err))
}

/// Fraction of the time the null direction needs to reach a chart pole.
/// Chart coordinates vary on this scale, so difference steps must stay below it.
fn pole_time_scale(st: &ChartState) -> f64 {
    let [w1, w2] = st.w();
    let speed = (w1 * w1 + w2 * w2).sqrt();
    if speed == 0.0 {
        f64::INFINITY
    } else {
        POLE_STEP_FRACTION * st.theta.sin() / speed
    }
}

const POLE_STEP_FRACTION: f64 = 0.02;

/// `d/dt(∂𝓛/∂q̇) − ∂𝓛/∂q` along `curve` (chart time → chart state) at `t`.
/// The time derivative comes from [`extrapolated_derivative`] with initial
/// step `h`; space derivatives are exact (hyper-dual).
pub fn el_residual_chart<F>(profile: &RotatorProfile, curve: F, t: f64, h: f64) -> Result<ChartResidual>
where
    F: Fn(f64) -> Result<ChartState>,
{
    let momentum = |s: f64| -> Result<[f64; 5]> {
        let st = curve(s)?;
        st.validate()?;
        profile.eval(st.q())?;
        Ok(lagrangian_gradient(profile, &st.coordinates([0.0; 3]), &st.velocities()).2)
    };
    let st = curve(t)?;
    st.validate()?;
    profile.eval(st.q())?;
    let (dp, _) = extrapolated_derivative(momentum, t, h.min(pole_time_scale(&st)))?;
    let (value, dq, dqd) = lagrangian_gradient(profile, &st.coordinates([0.0; 3]), &st.velocities());
    let pnorm = dqd.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(ChartResidual {
        residual: std::array::from_fn(|i| dp[i] - dq[i]),
        scale: value.abs().max(pnorm),
    })
}

/// Covariant residuals along a curve in an arbitrary parametrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariantResidual {
    /// `ṗ`
    pub xres: FourVector,
    /// `E − (p·E)/(p·k) k` with `E = π̇ + ∂L/∂k`.
    pub kres: FourVector,
    /// `max(|L|, max|p^μ|, max|π^μ|)`.
    pub scale: f64,
    pub p: FourVector,
    pub k: FourVector,
}

impl CovariantResidual {
    pub fn relative(&self) -> f64 {
        self.xres.max_abs().max(self.kres.max_abs()) / self.scale
    }
}

/// Covariant form of the equations of motion: `ṗ = 0` for the position and
/// the projected equation `(π̇_ν + ∂L/∂k^ν)(δ^ν_μ − p^ν k_μ/(pk)) = 0` for the
/// null direction, which eliminates the multiplier of the constraint `kk = 0`.
pub fn el_residual_covariant<F>(
    profile: &RotatorProfile,
    curve: F,
    t: f64,
    m: f64,
    ell: f64,
    h: f64,
) -> Result<CovariantResidual>
where
    F: Fn(f64) -> Result<CovariantKinematics>,
{
    let momenta = |s: f64| -> Result<[f64; 8]> {
        let (p, pi) = covariant_momenta(profile, &curve(s)?, m, ell)?;
        Ok(std::array::from_fn(|i| if i < 4 { p[i] } else { pi[i - 4] }))
    };
    let (d, _) = extrapolated_derivative(momenta, t, h)?;
    let kin = curve(t)?;
    let (p, pi) = covariant_momenta(profile, &kin, m, ell)?;
    let q = kin.q(ell);
    let v = profile.eval(q)?;
    let s = kin.xdot.square().sqrt();
    let kx = kin.k.dot(&kin.xdot);
    let dl_dk = kin.xdot * (2.0 * m * q * v.df * s / kx);
    let e = FourVector([d[4], d[5], d[6], d[7]]) + dl_dk;
    let pk = p.dot(&kin.k);
    if pk.abs() < PROJECTOR_MIN * p.max_abs() * kin.k.max_abs() {
        return Err(Error::ProjectorSingular { pk });
    }
    let kres = e - kin.k * (p.dot(&e) / pk);
    let lag = covariant_lagrangian(profile, &kin, m, ell)?;
    Ok(CovariantResidual {
        xres: FourVector([d[0], d[1], d[2], d[3]]),
        kres,
        scale: lag.abs().max(p.max_abs()).max(pi.max_abs()),
        p,
        k: kin.k,
    })
}

/// Time-sampled integration output with conservation logs.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub profile: RotatorProfile,
    pub m: f64,
    pub ell: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub points: Vec<ChartPoint>,
    pub q: Vec<f64>,
    pub momentum: Vec<FourVector>,
    pub angular_momentum: Vec<AngularMomentum>,
    pub pp: Vec<f64>,
    pub ww: Vec<f64>,
    /// Set when the run stopped before `T`: time of the last good sample and the cause.
    pub halt: Option<(f64, Error)>,
}

/// Conserved quantities at a phase-space point and chart time `t`.
pub fn conserved_quantities(
    profile: &RotatorProfile,
    point: &ChartPoint,
    t: f64,
    m: f64,
    ell: f64,
) -> Result<(FourVector, AngularMomentum)> {
    let (p, pi) = canonical_momenta(profile, &point.state, m, ell)?;
    let x = FourVector::from_parts(ell * t, point.position.map(|c| ell * c));
    let k = chart_to_covariant(&point.state, ell).k;
    Ok((p, angular_momentum(&x, &p, &k, &pi)))
}

impl Trajectory {
    fn record(&mut self, t: f64, point: ChartPoint) -> Result<()> {
        let (p, mm) = conserved_quantities(&self.profile, &point, t, self.m, self.ell)?;
        let w = pauli_lubanski(&mm, &p);
        self.times.push(t);
        self.points.push(point);
        self.q.push(point.state.q());
        self.momentum.push(p);
        self.angular_momentum.push(mm);
        self.pp.push(p.square());
        self.ww.push(w.square());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_t max_μ |p^μ(t) − p^μ(0)| / max_μ |p^μ(0)|`.
    pub fn momentum_drift(&self) -> f64 {
        let p0 = self.momentum[0];
        let scale = p0.max_abs();
        self.momentum.iter().map(|p| (*p - p0).max_abs() / scale).fold(0.0, f64::max)
    }

    /// Largest componentwise drift of `M`, relative to the largest component seen.
    pub fn angular_momentum_drift(&self) -> f64 {
        let m0 = self.angular_momentum[0];
        let scale = self.angular_momentum.iter().map(|m| m.max_abs()).fold(0.0, f64::max);
        self.angular_momentum.iter().map(|m| m.max_diff(&m0) / scale).fold(0.0, f64::max)
    }

    fn relative_spread(v: &[f64]) -> f64 {
        let v0 = v[0];
        v.iter().map(|x| (x - v0).abs() / v0.abs()).fold(0.0, f64::max)
    }

    pub fn q_drift(&self) -> f64 {
        Self::relative_spread(&self.q)
    }

    pub fn pp_drift(&self) -> f64 {
        Self::relative_spread(&self.pp)
    }

    pub fn ww_drift(&self) -> f64 {
        Self::relative_spread(&self.ww)
    }

    pub const CSV_HEADER: [&'static str; 15] = [
        "t",
        "theta",
        "phi_sph",
        "V1",
        "V2",
        "V3",
        "theta_dot",
        "phi_sph_dot",
        "Q",
        "p0",
        "p1",
        "p2",
        "p3",
        "PP",
        "WW",
    ];

    pub fn to_csv(&self) -> String {
        let mut t = CsvTable::new(&Self::CSV_HEADER);
        for i in 0..self.len() {
            let s = &self.points[i].state;
            let p = &self.momentum[i];
            let row = [
                self.times[i],
                s.theta,
                s.phi_sph,
                s.v[0],
                s.v[1],
                s.v[2],
                s.theta_dot,
                s.phi_sph_dot,
                self.q[i],
                p[0],
                p[1],
                p[2],
                p[3],
                self.pp[i],
                self.ww[i],
            ];
            t.push(row.iter().map(|v| fmt_f64(*v)).collect());
        }
        t.render()
    }
}

/// Units and sampling for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationParams {
    pub m: f64,
    pub ell: f64,
    /// Record every n-th step (the final step is always recorded).
    pub sample_every: usize,
}

impl Default for IntegrationParams {
    fn default() -> Self {
        IntegrationParams { m: 1.0, ell: 1.0, sample_every: 1 }
    }
}

/// Fixed-step RK4 over `[0, T]` from `initial` at the origin. The step is
/// `T/round(T/dt)`. Degeneracy is screened at every step via `σ_min/σ_max`;
/// a mid-run failure stops the run and is reported in [`Trajectory::halt`].
pub fn integrate(
    profile: &RotatorProfile,
    initial: &ChartState,
    t_end: f64,
    dt: f64,
    params: &IntegrationParams,
) -> Result<Trajectory> {
    if !(t_end > 0.0 && dt > 0.0 && dt <= t_end) || !t_end.is_finite() {
        return Err(Error::InvalidInput(format!("need 0 < dt <= T, got T = {t_end}, dt = {dt}")));
    }
    // fail early for degenerate or invalid initial data
    accelerations(profile, initial)?;
    let n = (t_end / dt).round().max(1.0) as usize;
    let h = t_end / n as f64;
    let every = params.sample_every.max(1);
    let mut traj = Trajectory {
        profile: *profile,
        m: params.m,
        ell: params.ell,
        dt: h,
        times: Vec::new(),
        points: Vec::new(),
        q: Vec::new(),
        momentum: Vec::new(),
        angular_momentum: Vec::new(),
        pp: Vec::new(),
        ww: Vec::new(),
        halt: None,
    };
    let start = ChartPoint::at_origin(*initial);
    traj.record(0.0, start)?;
    let mut y = start.to_vec();
    for i in 0..n {
        let t = i as f64 * h;
        let step = (|| {
            let state = ChartPoint::from_vec(&y).state;
            accelerations(profile, &state)?;
            let next = rk4_step(profile, &y, h)?;
            ChartPoint::from_vec(&next).state.validate()?;
            Ok(next)
        })();
        match step {
            Ok(next) => y = next,
            Err(e) => {
                traj.halt = Some((t, e));
                break;
            }
        }
        if (i + 1) % every == 0 || i + 1 == n {
            if let Err(e) = traj.record((i + 1) as f64 * h, ChartPoint::from_vec(&y)) {
                traj.halt = Some(((i + 1) as f64 * h, e));
                break;
            }
        }
    }
    Ok(traj)
}

/// Chart state as a function of time near `t0` obtained from the integrator's
/// own flow, for residual checks of integrated trajectories.
pub fn flow_curve<'a>(
    profile: &'a RotatorProfile,
    point: ChartPoint,
    t0: f64,
    max_step: f64,
) -> impl Fn(f64) -> Result<ChartState> + 'a {
    move |t: f64| {
        if t == t0 {
            Ok(point.state)
        } else {
            propagate(profile, &point, t - t0, max_step).map(|p| p.state)
        }
    }
}

/// Best uniform circular motion found for a profile at pointer rate `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularOrbit {
    /// `|V|`
    pub speed: f64,
    /// Angle of `V` from `N` in the rotation plane.
    pub angle: f64,
    /// Euclidean norm of `q̈ − q̈_circle`; zero for a genuine solution.
    pub defect: f64,
}

/// Defect of the uniform-rotation ansatz: the pointer turns at rate `omega`
/// in the `xy` plane and the velocity `V` (fixed length, fixed angle to `N`)
/// co-rotates with it, so `V̇ = ω ẑ × V`, `θ̈ = φ̈ = 0`.
pub fn circular_defect(profile: &RotatorProfile, omega: f64, speed: f64, angle: f64) -> Result<f64> {
    let v = [speed * angle.cos(), speed * angle.sin(), 0.0];
    let state = ChartState {
        theta: std::f64::consts::FRAC_PI_2,
        phi_sph: 0.0,
        v,
        theta_dot: 0.0,
        phi_sph_dot: omega,
    };
    let a = accelerations(profile, &state)?;
    let d = [a[0] + omega * v[1], a[1] - omega * v[0], a[2], a[3], a[4]];
    Ok(d.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Zooming grid search of [`circular_defect`] over speed `[0, 0.999]` and angle `(−π, π]`.
/// Whether such orbits exist for regular profiles is an empirical question; a
/// defect at rounding level means yes for this `omega`.
pub fn uniform_rotation_search(profile: &RotatorProfile, omega: f64) -> Result<CircularOrbit> {
    use std::f64::consts::PI;
    const GRID: usize = 60;
    let (mut v_lo, mut v_hi, mut a_lo, mut a_hi) = (0.0, 0.999, -PI, PI);
    let mut best = CircularOrbit { speed: 0.0, angle: 0.0, defect: f64::INFINITY };
    for _ in 0..14 {
        for i in 0..=GRID {
            for j in 0..=GRID {
                let v = v_lo + (v_hi - v_lo) * i as f64 / GRID as f64;
                let a = a_lo + (a_hi - a_lo) * j as f64 / GRID as f64;
                match circular_defect(profile, omega, v, a) {
                    Ok(d) if d < best.defect => best = CircularOrbit { speed: v, angle: a, defect: d },
                    Ok(_) => {}
                    Err(e @ Error::DegenerateHessian { .. }) => return Err(e),
                    Err(_) => {}
                }
            }
        }
        let (dv, da) = ((v_hi - v_lo) / 8.0, (a_hi - a_lo) / 8.0);
        v_lo = (best.speed - dv).max(0.0);
        v_hi = (best.speed + dv).min(0.999);
        a_lo = best.angle - da;
        a_hi = best.angle + da;
    }
    if best.defect.is_finite() {
        Ok(best)
    } else {
        Err(Error::InvalidInput(format!("no admissible circular state for omega = {omega}")))
    }
}

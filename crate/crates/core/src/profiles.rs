//! The profile family `f(Q)` entering the action `S = −m ∫ dτ √(ẋẋ) f(Q)`.
//!
//! Derivatives are analytic per variant. The generic [`RotatorProfile::value`]
//! evaluates `f` alone on any [`Real`] scalar, so hyper-dual differentiation of
//! the Lagrangian never touches the hand-written `f′`, `f″`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dual::Real;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RotatorProfile {
    /// `f = √(1+√Q)`, `Q > 0`.
    Fundamental,
    /// `f = √(1−√Q)`, `0 < Q < 1`.
    Partner,
    /// `f = 1 + aQ`.
    Affine { a: f64 },
    /// `f = √(1+√Q) + εQ`.
    Deformed { eps: f64 },
    /// `f = c₁√(1+c₂√Q)`.
    Custom { c1: f64, c2: f64 },
}

/// `(f, f′, f″)` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValue {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

/// `c₁√(1+c₂√Q)` and its first two derivatives.
fn root_family(c1: f64, c2: f64, q: f64) -> ProfileValue {
    let s = q.sqrt();
    let g = (1.0 + c2 * s).sqrt();
    let dg = c2 / (4.0 * s * g);
    let d2g = -c2 / (8.0 * q * s * g) - c2 * c2 / (16.0 * q * g * g * g);
    ProfileValue {
        f: c1 * g,
        df: c1 * dg,
        d2f: c1 * d2g,
    }
}

impl RotatorProfile {
    pub fn name(&self) -> String {
        self.to_string()
    }

    /// Human-readable domain description.
    pub fn domain_str(&self) -> &'static str {
        match self {
            RotatorProfile::Fundamental | RotatorProfile::Deformed { .. } => "Q > 0",
            RotatorProfile::Partner => "0 < Q < 1",
            RotatorProfile::Affine { .. } => "Q >= 0, 1 + aQ > 0",
            RotatorProfile::Custom { .. } => "Q > 0, 1 + c2 sqrt(Q) > 0",
        }
    }

    pub fn contains(&self, q: f64) -> bool {
        if !q.is_finite() {
            return false;
        }
        match *self {
            RotatorProfile::Fundamental | RotatorProfile::Deformed { .. } => q > 0.0,
            RotatorProfile::Partner => q > 0.0 && q < 1.0,
            RotatorProfile::Affine { a } => q >= 0.0 && 1.0 + a * q > 0.0,
            RotatorProfile::Custom { c2, .. } => q > 0.0 && 1.0 + c2 * q.sqrt() > 0.0,
        }
    }

    /// Whether random samplers should keep a state with this `Q`: inside the
    /// domain and away from its edges.
    pub fn sampling_admits(&self, q: f64) -> bool {
        if !self.contains(q) || q < 1e-4 {
            return false;
        }
        match *self {
            RotatorProfile::Partner => q < 0.95,
            RotatorProfile::Affine { a } => 1.0 + a * q > 0.05,
            RotatorProfile::Custom { c2, .. } => 1.0 + c2 * q.sqrt() > 0.05,
            _ => true,
        }
    }

    /// Whether `1 + 2Q(f′/f + f″/f′)` vanishes identically.
    pub fn is_degenerate_class(&self) -> bool {
        match *self {
            RotatorProfile::Fundamental | RotatorProfile::Partner => true,
            RotatorProfile::Custom { c1, c2 } => c1 != 0.0 && c2 != 0.0,
            RotatorProfile::Affine { .. } => false,
            RotatorProfile::Deformed { eps } => eps == 0.0,
        }
    }

    fn check(&self, q: f64) -> Result<()> {
        if self.contains(q) {
            Ok(())
        } else {
            Err(Error::Domain {
                profile: self.name(),
                q,
                domain: self.domain_str(),
            })
        }
    }

    /// `f(Q)` on an arbitrary scalar; no domain check.
    pub fn value<T: Real>(&self, q: T) -> T {
        match *self {
            RotatorProfile::Fundamental => (q.sqrt() + 1.0).sqrt(),
            RotatorProfile::Partner => (-q.sqrt() + 1.0).sqrt(),
            RotatorProfile::Affine { a } => q * a + 1.0,
            RotatorProfile::Deformed { eps } => (q.sqrt() + 1.0).sqrt() + q * eps,
            RotatorProfile::Custom { c1, c2 } => (q.sqrt() * c2 + 1.0).sqrt() * c1,
        }
    }

    /// `(f, f′, f″)` at `q`.
    pub fn eval(&self, q: f64) -> Result<ProfileValue> {
        self.check(q)?;
        let v = match *self {
            RotatorProfile::Fundamental => root_family(1.0, 1.0, q),
            RotatorProfile::Partner => root_family(1.0, -1.0, q),
            RotatorProfile::Affine { a } => ProfileValue {
                f: 1.0 + a * q,
                df: a,
                d2f: 0.0,
            },
            RotatorProfile::Deformed { eps } => {
                let base = root_family(1.0, 1.0, q);
                ProfileValue {
                    f: base.f + eps * q,
                    df: base.df + eps,
                    d2f: base.d2f,
                }
            }
            RotatorProfile::Custom { c1, c2 } => root_family(c1, c2, q),
        };
        Ok(v)
    }

    /// `1 + 2Q(f′/f + f″/f′)`; the closed-form Hessian determinant is
    /// proportional to it.
    pub fn degeneracy_factor(&self, q: f64) -> Result<f64> {
        let v = self.eval(q)?;
        if v.df == 0.0 {
            return Err(Error::SingularDerivative { q });
        }
        Ok(1.0 + 2.0 * q * (v.df / v.f + v.d2f / v.df))
    }

    /// `1 + 2Q f″/f′`, the factor that controls invertibility of block `A`.
    pub fn block_a_factor(&self, q: f64) -> Result<f64> {
        let v = self.eval(q)?;
        if v.df == 0.0 {
            return Err(Error::SingularDerivative { q });
        }
        Ok(1.0 + 2.0 * q * v.d2f / v.df)
    }

    /// First Casimir `PP = m²(f² − 4Qff′)`.
    pub fn casimir_mass_sq(&self, q: f64, m: f64) -> Result<f64> {
        let v = self.eval(q)?;
        Ok(m * m * (v.f * v.f - 4.0 * q * v.f * v.df))
    }

    /// Second Casimir `WW = −4m⁴ℓ²Qf²f′²`.
    pub fn casimir_spin_sq(&self, q: f64, m: f64, ell: f64) -> Result<f64> {
        let v = self.eval(q)?;
        Ok(-4.0 * m.powi(4) * ell * ell * q * (v.f * v.df).powi(2))
    }
}

impl fmt::Display for RotatorProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RotatorProfile::Fundamental => write!(f, "fundamental"),
            RotatorProfile::Partner => write!(f, "partner"),
            RotatorProfile::Affine { a } => write!(f, "affine:{a}"),
            RotatorProfile::Deformed { eps } => write!(f, "deformed:{eps}"),
            RotatorProfile::Custom { c1, c2 } => write!(f, "custom:{c1}:{c2}"),
        }
    }
}

impl FromStr for RotatorProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown profile `{s}`"));
        let num = |t: &str| t.trim().parse::<f64>().ok().filter(|v| v.is_finite());
        let parts: Vec<&str> = s.trim().split(':').collect();
        let p = match parts.as_slice() {
            ["fundamental"] => RotatorProfile::Fundamental,
            ["partner"] => RotatorProfile::Partner,
            ["affine", a] => RotatorProfile::Affine { a: num(a).ok_or_else(bad)? },
            ["deformed", e] => RotatorProfile::Deformed { eps: num(e).ok_or_else(bad)? },
            ["custom", c1, c2] => {
                let c1 = num(c1).ok_or_else(bad)?;
                if c1 <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "custom profile needs c1 > 0 so that f > 0, got {c1}"
                    )));
                }
                RotatorProfile::Custom { c1, c2: num(c2).ok_or_else(bad)? }
            }
            _ => return Err(bad()),
        };
        Ok(p)
    }
}

impl TryFrom<String> for RotatorProfile {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<RotatorProfile> for String {
    fn from(p: RotatorProfile) -> String {
        p.to_string()
    }
}

/// Member `c₁√(1+c₂√Q)` of the degenerate family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateFit {
    pub c1: f64,
    pub c2: f64,
}

impl DegenerateFit {
    /// Fit `(c₁, c₂)` to the 1-jet `(f₀, f₀′)` at `Q₀` in closed form.
    pub fn from_jet(q0: f64, f0: f64, df0: f64) -> Result<Self> {
        if !(q0 > 0.0 && f0 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "degenerate-family fit needs Q0 > 0 and f0 > 0, got Q0 = {q0}, f0 = {f0}"
            )));
        }
        if df0 == 0.0 {
            return Err(Error::SingularDerivative { q: q0 });
        }
        let s = q0.sqrt();
        let r = df0 / f0;
        let denom = 1.0 - 4.0 * s * s * r;
        if denom == 0.0 {
            return Err(Error::InvalidInput(format!(
                "initial data (Q0 = {q0}, f0'/f0 = {r}) corresponds to c2 = infinity"
            )));
        }
        let c2 = 4.0 * s * r / denom;
        let inner = 1.0 + c2 * s;
        if inner <= 0.0 {
            return Err(Error::InvalidInput(format!("fitted 1 + c2 sqrt(Q0) = {inner} <= 0")));
        }
        Ok(DegenerateFit { c1: f0 / inner.sqrt(), c2 })
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.c1 * (1.0 + self.c2 * q.sqrt()).sqrt()
    }
}

/// One sample of the tabulated degeneracy-ODE solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSample {
    pub q: f64,
    pub f: f64,
    pub df: f64,
}

/// Integrate `f″ = −f′(1/(2Q) + f′/f)` from `Q₀` to `Q_end` with `steps`
/// classic RK4 steps. The result includes both endpoints.
pub fn solve_degeneracy_ode(
    q0: f64,
    f0: f64,
    df0: f64,
    q_end: f64,
    steps: usize,
) -> Result<Vec<OdeSample>> {
    if df0 == 0.0 {
        return Err(Error::SingularDerivative { q: q0 });
    }
    if !(q0 > 0.0 && f0 > 0.0 && q_end > q0 && steps > 0) || !(q_end.is_finite() && df0.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "degeneracy ODE needs Q0 > 0, f0 > 0, Q_end > Q0, steps > 0; got Q0 = {q0}, f0 = {f0}, Q_end = {q_end}, steps = {steps}"
        )));
    }
    let rhs = |q: f64, y: [f64; 2]| -> [f64; 2] { [y[1], -y[1] * (0.5 / q + y[1] / y[0])] };
    let h = (q_end - q0) / steps as f64;
    let mut y = [f0, df0];
    let mut out = Vec::with_capacity(steps + 1);
    out.push(OdeSample { q: q0, f: f0, df: df0 });
    for i in 0..steps {
        let q = q0 + i as f64 * h;
        let k1 = rhs(q, y);
        let k2 = rhs(q + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs(q + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs(q + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for k in 0..2 {
            y[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        }
        let qn = if i + 1 == steps { q_end } else { q0 + (i + 1) as f64 * h };
        if !(y[0] > 0.0) || !y[0].is_finite() {
            return Err(Error::StepFailure { q: qn, f: y[0] });
        }
        out.push(OdeSample { q: qn, f: y[0], df: y[1] });
    }
    Ok(out)
}

/// Least-squares distance (root-mean-square relative deviation) from the
/// profile to the closest member of `c₁√(1+c₂√Q)` on the grid. Returns the
/// distance and the minimizing member.
pub fn degenerate_family_distance(
    profile: &RotatorProfile,
    grid: &[f64],
) -> Result<(f64, DegenerateFit)> {
    let f: Vec<f64> = grid.iter().map(|&q| profile.eval(q).map(|v| v.f)).collect::<Result<_>>()?;
    let q_max = grid.iter().cloned().fold(0.0_f64, f64::max);
    if grid.is_empty() || q_max <= 0.0 {
        return Err(Error::InvalidInput("grid must contain positive Q values".into()));
    }
    // for fixed c₂ the optimal c₁ is linear least squares in the ratios g/f
    let dist = |c2: f64| -> (f64, f64) {
        let r: Vec<f64> = grid
            .iter()
            .zip(&f)
            .map(|(&q, &fv)| (1.0 + c2 * q.sqrt()).sqrt() / fv)
            .collect();
        let c1 = r.iter().sum::<f64>() / r.iter().map(|x| x * x).sum::<f64>();
        let rms = (r.iter().map(|x| (c1 * x - 1.0).powi(2)).sum::<f64>() / r.len() as f64).sqrt();
        (rms, c1)
    };
    let lo = -1.0 / q_max.sqrt() * (1.0 - 1e-9);
    let hi = 1e3;
    // coarse scan in a stretched variable, then golden-section refinement
    let n = 4000;
    let map = |u: f64| lo + (hi - lo) * u.powi(4);
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=n {
        let u = i as f64 / n as f64;
        let d = dist(map(u)).0;
        if d < best.0 {
            best = (d, u);
        }
    }
    let (mut a, mut b) = ((best.1 - 1.0 / n as f64).max(0.0), (best.1 + 1.0 / n as f64).min(1.0));
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if dist(map(x1)).0 < dist(map(x2)).0 {
            b = x2;
        } else {
            a = x1;
        }
    }
    let c2 = map(0.5 * (a + b));
    let (d, c1) = dist(c2);
    Ok((d, DegenerateFit { c1, c2 }))
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

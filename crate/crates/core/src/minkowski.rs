//! Minkowski four-vectors in signature (+,−,−,−) with `ε^{0123} = +1`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{Rotation3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling;

/// Metric diagonal.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Contravariant four-vector, time component first.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector(pub [f64; 4]);

/// Causal character of a four-vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Causality {
    Timelike,
    Null,
    Spacelike,
}

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector([t, x, y, z])
    }

    pub fn from_parts(t: f64, spatial: [f64; 3]) -> Self {
        FourVector([t, spatial[0], spatial[1], spatial[2]])
    }

    pub fn t(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// Components with the index lowered.
    pub fn lower(&self) -> [f64; 4] {
        let v = self.0;
        [v[0], -v[1], -v[2], -v[3]]
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        minkowski_dot(self, other)
    }

    pub fn square(&self) -> f64 {
        minkowski_dot(self, self)
    }

    /// Largest absolute component; the scale used by relative tolerances.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Euclidean norm of the components (not a Lorentz invariant).
    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Classify with tolerance `tol` relative to the squared scale.
    pub fn causality(&self, tol: f64) -> Causality {
        let s = self.square();
        let scale = self.max_abs().powi(2).max(f64::MIN_POSITIVE);
        if s.abs() <= tol * scale {
            Causality::Null
        } else if s > 0.0 {
            Causality::Timelike
        } else {
            Causality::Spacelike
        }
    }

    pub fn is_timelike(&self, tol: f64) -> bool {
        self.causality(tol) == Causality::Timelike
    }

    pub fn is_null(&self, tol: f64) -> bool {
        self.causality(tol) == Causality::Null
    }

    pub fn is_spacelike(&self, tol: f64) -> bool {
        self.causality(tol) == Causality::Spacelike
    }

    /// Rotate the spatial part, leaving the time component alone.
    pub fn rotate(&self, rotation: &Rotation3<f64>) -> Self {
        let s = rotation * Vector3::from(self.spatial());
        FourVector::new(self.0[0], s.x, s.y, s.z)
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for FourVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl AddAssign for FourVector {
    fn add_assign(&mut self, o: FourVector) {
        for i in 0..4 {
            self.0[i] += o.0[i];
        }
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(self.0.map(|c| -c))
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector(self.0.map(|c| c * s))
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, v: FourVector) -> FourVector {
        v * self
    }
}

/// `a⁰b⁰ − a¹b¹ − a²b² − a³b³`.
pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> f64 {
    a.0[0] * b.0[0] - a.0[1] * b.0[1] - a.0[2] * b.0[2] - a.0[3] * b.0[3]
}

/// Sign of the permutation `(i, j, k, l)` of `(0, 1, 2, 3)`, or 0 on a repeat.
pub fn levi_civita(idx: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            if idx[a] == idx[b] {
                return 0.0;
            }
            if idx[a] > idx[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// The 24 non-vanishing index tuples of the Levi-Civita symbol with their signs.
fn epsilon_entries() -> impl Iterator<Item = ([usize; 4], f64)> {
    (0..256usize).filter_map(|n| {
        let idx = [n >> 6 & 3, n >> 4 & 3, n >> 2 & 3, n & 3];
        let s = levi_civita(idx);
        (s != 0.0).then_some((idx, s))
    })
}

/// `v^μ = ε^{μναβ} a_ν b_α c_β`, indices of the inputs lowered with the metric.
pub fn epsilon_contract(a: &FourVector, b: &FourVector, c: &FourVector) -> FourVector {
    let (al, bl, cl) = (a.lower(), b.lower(), c.lower());
    let mut out = FourVector::ZERO;
    for ([mu, nu, alpha, beta], s) in epsilon_entries() {
        out.0[mu] += s * al[nu] * bl[alpha] * cl[beta];
    }
    out
}

/// Antisymmetric angular-momentum tensor `M_{μν}` (both indices lower).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularMomentum([[f64; 4]; 4]);

impl AngularMomentum {
    pub const ZERO: AngularMomentum = AngularMomentum([[0.0; 4]; 4]);

    /// Build from the upper triangle of `m`; the lower triangle is ignored.
    pub fn from_upper(m: [[f64; 4]; 4]) -> Self {
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in (i + 1)..4 {
                out[i][j] = m[i][j];
                out[j][i] = -m[i][j];
            }
        }
        AngularMomentum(out)
    }

    /// `a_μ b_ν − a_ν b_μ` with lowered indices.
    pub fn wedge(a: &FourVector, b: &FourVector) -> Self {
        let (al, bl) = (a.lower(), b.lower());
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = al[i] * bl[j] - al[j] * bl[i];
            }
        }
        AngularMomentum(m)
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.0[mu][nu]
    }

    pub fn components(&self) -> &[[f64; 4]; 4] {
        &self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Largest absolute componentwise difference.
    pub fn max_diff(&self, other: &AngularMomentum) -> f64 {
        let mut d = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d
    }
}

impl Add for AngularMomentum {
    type Output = AngularMomentum;
    fn add(self, o: AngularMomentum) -> AngularMomentum {
        let mut m = self.0;
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] += o.0[i][j];
            }
        }
        AngularMomentum(m)
    }
}

/// Pauli–Lubański vector `W^μ = −½ ε^{μαβγ} M_{αβ} P_γ`.
pub fn pauli_lubanski(m: &AngularMomentum, p: &FourVector) -> FourVector {
    let pl = p.lower();
    let mut w = FourVector::ZERO;
    for ([mu, alpha, beta, gamma], s) in epsilon_entries() {
        w.0[mu] -= 0.5 * s * m.0[alpha][beta] * pl[gamma];
    }
    w
}

/// Active pure boost with rapidity vector `χ n̂`: the rest vector `(1,0,0,0)`
/// goes to `(cosh χ, sinh χ n̂)`.
pub fn lorentz_boost(v: &FourVector, rapidity: [f64; 3]) -> FourVector {
    let chi = rapidity.iter().map(|c| c * c).sum::<f64>().sqrt();
    if chi == 0.0 {
        return *v;
    }
    let n = rapidity.map(|c| c / chi);
    let (ch, sh) = (chi.cosh(), chi.sinh());
    let s = v.spatial();
    let ndotx = n[0] * s[0] + n[1] * s[1] + n[2] * s[2];
    let t = v.0[0];
    FourVector::new(
        ch * t + sh * ndotx,
        s[0] + ((ch - 1.0) * ndotx + sh * t) * n[0],
        s[1] + ((ch - 1.0) * ndotx + sh * t) * n[1],
        s[2] + ((ch - 1.0) * ndotx + sh * t) * n[2],
    )
}

/// A proper orthochronous Lorentz transformation: spatial rotation, then boost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTransform {
    pub rotation: Rotation3<f64>,
    pub rapidity: [f64; 3],
}

impl FrameTransform {
    pub fn identity() -> Self {
        FrameTransform {
            rotation: Rotation3::identity(),
            rapidity: [0.0; 3],
        }
    }

    /// Rapidity magnitude uniform in `[0, 2]`, direction and rotation uniform.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let rotation = sampling::uniform_rotation(rng);
        let dir = sampling::unit_vector(rng);
        let chi = rng.random_range(0.0..=2.0);
        FrameTransform {
            rotation,
            rapidity: dir.map(|c| c * chi),
        }
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        lorentz_boost(&v.rotate(&self.rotation), self.rapidity)
    }
}

/// Constant vectors of the exact general solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionFrame {
    /// Conserved momentum, `P·P = m²`.
    pub p: FourVector,
    /// Pauli–Lubański spin vector, `S·S = −¼m⁴ℓ²`.
    pub spin: FourVector,
    /// Unit spacelike vector orthogonal to `P` and `S`.
    pub n: FourVector,
    pub m: f64,
    pub ell: f64,
}

impl SolutionFrame {
    /// Canonical rest-frame triple.
    pub fn rest(m: f64, ell: f64) -> Result<Self> {
        check_positive(m, ell)?;
        Ok(SolutionFrame {
            p: FourVector::new(m, 0.0, 0.0, 0.0),
            spin: FourVector::new(0.0, 0.0, 0.0, 0.5 * m * m * ell),
            n: FourVector::new(0.0, 1.0, 0.0, 0.0),
            m,
            ell,
        })
    }

    pub fn transformed(&self, t: &FrameTransform) -> Self {
        SolutionFrame {
            p: t.apply(&self.p),
            spin: t.apply(&self.spin),
            n: t.apply(&self.n),
            ..*self
        }
    }

    /// Relative residuals of `PP = m²`, `SS = −¼m⁴ℓ²`, `SP = 0`, `NN = −1`,
    /// `NS = 0`, `NP = 0`, each divided by the scale of the entering vectors.
    pub fn invariant_residuals(&self) -> [f64; 6] {
        let (m, l) = (self.m, self.ell);
        let (p, s, n) = (&self.p, &self.spin, &self.n);
        let sp = p.max_abs();
        let ss = s.max_abs();
        let sn = n.max_abs();
        [
            (p.square() - m * m).abs() / (sp * sp),
            (s.square() + 0.25 * m.powi(4) * l * l).abs() / (ss * ss),
            s.dot(p).abs() / (ss * sp),
            (n.square() + 1.0).abs() / (sn * sn),
            n.dot(s).abs() / (sn * ss),
            n.dot(p).abs() / (sn * sp),
        ]
    }
}

fn check_positive(m: f64, ell: f64) -> Result<()> {
    if !(m > 0.0 && m.is_finite() && ell > 0.0 && ell.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "mass and length must be positive, got m = {m}, ell = {ell}"
        )));
    }
    Ok(())
}

/// Deterministic solution frame for `seed`. Seed 0 is the canonical rest frame;
/// any other seed applies a random rotation followed by a random boost.
pub fn build_solution_frame(m: f64, ell: f64, seed: u64) -> Result<SolutionFrame> {
    let rest = SolutionFrame::rest(m, ell)?;
    if seed == 0 {
        return Ok(rest);
    }
    let mut rng = sampling::experiment_rng(seed, sampling::Stream::Frame);
    Ok(rest.transformed(&FrameTransform::random(&mut rng)))
}

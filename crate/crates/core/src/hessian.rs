//! The 5×5 velocity Hessian of the reduced Lagrangian with respect to
//! `(w₁, w₂, V₁, V₂, V₃)`:
//!
//! ```text
//! H = | A   B |     A: 2×2 (w,w),  B: 2×3 (w,V),  C: 3×3 (V,V)
//!     | Bᵀ  C |
//! ```
//!
//! Closed-form blocks and determinant are checked against hyper-dual and
//! central-difference Hessians of `𝓛` itself.

use nalgebra::{Matrix2, Matrix3, Matrix5, Vector2, Vector3};
use rayon::prelude::*;

use crate::chart::{lagrangian_in_coordinates, reduced_lagrangian, ChartState};
use crate::dual::{self, HyperDual};
use crate::error::{Error, Result};
use crate::output::{fmt_f64, CsvTable};
use crate::profiles::{ProfileValue, RotatorProfile};
use crate::sampling::{self, StateBounds, Stream};
use crate::tolerances::DEGENERACY_RATIO;

/// Blocks `A` (w,w), `B` (w,V) and `C` (V,V) of the velocity Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianBlocks {
    pub a: Matrix2<f64>,
    pub b: nalgebra::Matrix2x3<f64>,
    pub c: Matrix3<f64>,
}

impl HessianBlocks {
    pub fn assemble(&self) -> Matrix5<f64> {
        let mut h = Matrix5::zeros();
        h.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.a);
        h.fixed_view_mut::<2, 3>(0, 2).copy_from(&self.b);
        h.fixed_view_mut::<3, 2>(2, 0).copy_from(&self.b.transpose());
        h.fixed_view_mut::<3, 3>(2, 2).copy_from(&self.c);
        h
    }

    /// `C − BᵀA⁻¹B` for a given `A⁻¹`.
    pub fn schur_complement(&self, a_inv: &Matrix2<f64>) -> Matrix3<f64> {
        self.c - self.b.transpose() * a_inv * self.b
    }
}

/// Shared scalars of the closed-form expressions at a state.
struct Pointwise {
    q: f64,
    pv: ProfileValue,
    w: Vector2<f64>,
    v: Vector3<f64>,
    n: Vector3<f64>,
    /// `√(1 − VᵀV)`
    root: f64,
    /// `1 − NᵀV`
    den: f64,
    /// `Qf″/f′`
    r: f64,
}

fn pointwise(profile: &RotatorProfile, state: &ChartState) -> Result<Pointwise> {
    state.validate()?;
    let q = state.q();
    if q == 0.0 {
        return Err(Error::DegenerateRotation);
    }
    let pv = profile.eval(q)?;
    if pv.df == 0.0 {
        return Err(Error::SingularDerivative { q });
    }
    let w = Vector2::from(state.w());
    let v = Vector3::from(state.v);
    let n = Vector3::from(state.n());
    Ok(Pointwise {
        q,
        pv,
        w,
        v,
        n,
        root: (1.0 - v.norm_squared()).sqrt(),
        den: 1.0 - n.dot(&v),
        r: q * pv.d2f / pv.df,
    })
}

/// Closed-form blocks `A`, `B`, `C`.
pub fn hessian_blocks(profile: &RotatorProfile, state: &ChartState) -> Result<HessianBlocks> {
    let Pointwise { q, pv, w, v, n, root, den, r } = pointwise(profile, state)?;
    let ww = w.norm_squared();
    let vv = v.norm_squared();
    let pre = 2.0 * q * pv.df * root / ww;
    let a = pre * (Matrix2::identity() + (2.0 * r / ww) * (w * w.transpose()));
    let b = pre * (2.0 * (1.0 + r) / den * w * n.transpose() - w * v.transpose() / (1.0 - vv));
    let c = -(pv.f / root)
        * (Matrix3::identity()
            + (v * v.transpose()) / (1.0 - vv)
            + (2.0 * q * pv.df / pv.f)
                * ((n * v.transpose() + v * n.transpose()) / den
                    - (3.0 + 2.0 * r) * (1.0 - vv) / (den * den) * (n * n.transpose())));
    Ok(HessianBlocks { a, b, c })
}

/// Differentiation point `(w₁, w₂, V₁, V₂, V₃)` of a state.
pub fn velocity_point(state: &ChartState) -> [f64; 5] {
    let w = state.w();
    [w[0], w[1], state.v[0], state.v[1], state.v[2]]
}

fn check_numeric(profile: &RotatorProfile, state: &ChartState) -> Result<()> {
    state.validate()?;
    let q = state.q();
    if q == 0.0 {
        return Err(Error::DegenerateRotation);
    }
    profile.eval(q).map(|_| ())
}

/// Hessian of `𝓛` in `(w, V)` by hyper-dual propagation (exact to rounding).
pub fn numeric_hessian(profile: &RotatorProfile, state: &ChartState) -> Result<Matrix5<f64>> {
    check_numeric(profile, state)?;
    let n = state.n();
    let h = dual::hessian(
        |z: &[HyperDual; 5]| reduced_lagrangian(profile, &n, &[z[0], z[1]], &[z[2], z[3], z[4]]),
        &velocity_point(state),
    );
    Ok(Matrix5::from_fn(|i, j| h[i][j]))
}

/// Central-difference Hessian of `𝓛` in `(w, V)`; cross-check for [`numeric_hessian`].
pub fn numeric_hessian_fd(profile: &RotatorProfile, state: &ChartState) -> Result<Matrix5<f64>> {
    check_numeric(profile, state)?;
    let n = state.n();
    let h = dual::fd_hessian(
        |z: &[f64; 5]| reduced_lagrangian(profile, &n, &[z[0], z[1]], &[z[2], z[3], z[4]]),
        &velocity_point(state),
    );
    Ok(Matrix5::from_fn(|i, j| h[i][j]))
}

/// Hessian with respect to the raw chart velocities `(V₁, V₂, V₃, θ̇, φ̇)`.
/// Its determinant equals `sin²θ · det H`.
pub fn raw_velocity_hessian(profile: &RotatorProfile, state: &ChartState) -> Result<Matrix5<f64>> {
    check_numeric(profile, state)?;
    let q0 = state.coordinates([0.0; 3]).map(HyperDual::constant);
    let h = dual::hessian(
        |qd: &[HyperDual; 5]| lagrangian_in_coordinates(profile, &q0, qd),
        &state.velocities(),
    );
    Ok(Matrix5::from_fn(|i, j| h[i][j]))
}

/// `A⁻¹` by the rank-one update formula
/// `A⁻¹ = wᵀw/(2Qf′√(1−VᵀV)) · (I − 2Qf″/(f′ + 2Qf″) · wwᵀ/wᵀw)`.
pub fn inverse_a(profile: &RotatorProfile, state: &ChartState) -> Result<Matrix2<f64>> {
    let Pointwise { q, pv, w, root, r, .. } = pointwise(profile, state)?;
    let factor = 1.0 + 2.0 * r;
    if factor.abs() < 1e-12 {
        return Err(Error::SingularBlock { factor });
    }
    let ww = w.norm_squared();
    let coeff = 2.0 * q * pv.d2f / (pv.df + 2.0 * q * pv.d2f);
    Ok(ww / (2.0 * q * pv.df * root) * (Matrix2::identity() - (coeff / ww) * w * w.transpose()))
}

/// `det A = (2Qf′√(1−VᵀV)/wᵀw)² (1 + 2Qf″/f′)`.
pub fn closed_det_a(profile: &RotatorProfile, state: &ChartState) -> Result<f64> {
    let Pointwise { q, pv, w, root, r, .. } = pointwise(profile, state)?;
    Ok((2.0 * q * pv.df * root / w.norm_squared()).powi(2) * (1.0 + 2.0 * r))
}

/// Closed form of the Schur complement:
/// `C − BᵀA⁻¹B = −f/√(1−VᵀV) [I + VVᵀ/(1−VᵀV) + κ (1−VᵀV)/(1−NᵀV)² u uᵀ]`
/// with `u = N − (1−NᵀV)/(1−VᵀV) V` and `κ = 2Qf′/(f(1 + 2Qf″/f′))`.
pub fn closed_schur_complement(profile: &RotatorProfile, state: &ChartState) -> Result<Matrix3<f64>> {
    let Pointwise { q, pv, v, n, root, den, r, .. } = pointwise(profile, state)?;
    let vv = v.norm_squared();
    let factor = 1.0 + 2.0 * r;
    if factor.abs() < 1e-12 {
        return Err(Error::SingularBlock { factor });
    }
    let kappa = 2.0 * q * pv.df / (pv.f * factor);
    let u = n - (den / (1.0 - vv)) * v;
    Ok(-(pv.f / root) * (Matrix3::identity() + (v * v.transpose()) / (1.0 - vv) + kappa * (1.0 - vv) / (den * den) * u * u.transpose()))
}

/// `−4f³f′²/((1−NᵀV)⁴(1−VᵀV)^{3/2})`, the prefactor of the closed determinant.
pub fn det_prefactor(profile: &RotatorProfile, state: &ChartState) -> Result<f64> {
    let Pointwise { pv, root, den, .. } = pointwise(profile, state)?;
    Ok(-4.0 * pv.f.powi(3) * pv.df * pv.df / (den.powi(4) * root.powi(3)))
}

/// `det H = prefactor · (1 + 2Q(f′/f + f″/f′))`.
pub fn closed_det_h(profile: &RotatorProfile, state: &ChartState) -> Result<f64> {
    let pre = det_prefactor(profile, state)?;
    Ok(pre * profile.degeneracy_factor(state.q())?)
}

/// `det(A) · det(C − BᵀA⁻¹B)` from the closed-form blocks and `A⁻¹`.
pub fn schur_det(profile: &RotatorProfile, state: &ChartState) -> Result<f64> {
    let blocks = hessian_blocks(profile, state)?;
    let a_inv = inverse_a(profile, state)?;
    Ok(blocks.a.determinant() * blocks.schur_complement(&a_inv).determinant())
}

/// Determinant by LU with partial pivoting.
pub fn lu_det(h: &Matrix5<f64>) -> f64 {
    h.lu().determinant()
}

/// `(σ_min/σ_max, σ_max)`.
pub fn singular_value_ratio(h: &Matrix5<f64>) -> (f64, f64) {
    let sv = h.singular_values();
    let max = sv.max();
    let min = sv.min();
    if max == 0.0 {
        (0.0, 0.0)
    } else {
        (min / max, max)
    }
}

pub fn is_degenerate(h: &Matrix5<f64>) -> bool {
    singular_value_ratio(h).0 < DEGENERACY_RATIO
}

/// One row of a degeneracy scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub seed: u64,
    pub state_id: u64,
    pub state: ChartState,
    pub q: f64,
    /// NaN where the closed form is undefined for the profile.
    pub det_closed: f64,
    pub det_numeric: f64,
    /// `|det H| / ‖H‖₂⁵`.
    pub rel_det: f64,
    pub sigma_min_over_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    pub profile: RotatorProfile,
    pub seed: u64,
    pub rows: Vec<ScanRow>,
    pub max_rel_det: f64,
    pub min_rel_det: f64,
    pub max_sigma_ratio: f64,
    pub min_sigma_ratio: f64,
}

impl DegeneracyReport {
    /// Every sampled state is degenerate under the σ-ratio threshold.
    pub fn all_degenerate(&self) -> bool {
        self.rows.iter().all(|r| r.sigma_min_over_max < DEGENERACY_RATIO)
    }

    /// Every sampled state is regular under the σ-ratio threshold.
    pub fn all_regular(&self) -> bool {
        self.rows.iter().all(|r| r.sigma_min_over_max >= DEGENERACY_RATIO)
    }

    pub const CSV_HEADER: [&'static str; 7] =
        ["seed", "state_id", "Q", "det_closed", "det_numeric", "rel_det", "sigma_min_over_max"];

    pub fn to_csv(&self) -> String {
        let mut t = CsvTable::new(&Self::CSV_HEADER);
        for r in &self.rows {
            t.push(vec![
                r.seed.to_string(),
                r.state_id.to_string(),
                fmt_f64(r.q),
                fmt_f64(r.det_closed),
                fmt_f64(r.det_numeric),
                fmt_f64(r.rel_det),
                fmt_f64(r.sigma_min_over_max),
            ]);
        }
        t.render()
    }
}

/// Sample `n_states` random states (per-state RNG substreams of `seed`) and
/// measure how degenerate the numeric Hessian is at each.
pub fn degeneracy_scan(profile: &RotatorProfile, n_states: usize, seed: u64) -> Result<DegeneracyReport> {
    if n_states == 0 {
        return Err(Error::InvalidInput("degeneracy scan needs at least one state".into()));
    }
    let bounds = StateBounds::default();
    let rows: Vec<ScanRow> = (0..n_states as u64)
        .into_par_iter()
        .map(|id| {
            let mut rng = sampling::substream_rng(seed, Stream::States, id);
            let state = sampling::random_state_for(&mut rng, profile, &bounds);
            let h = numeric_hessian(profile, &state)?;
            let (ratio, smax) = singular_value_ratio(&h);
            let det_numeric = lu_det(&h);
            Ok(ScanRow {
                seed,
                state_id: id,
                state,
                q: state.q(),
                det_closed: closed_det_h(profile, &state).unwrap_or(f64::NAN),
                det_numeric,
                rel_det: det_numeric.abs() / smax.powi(5),
                sigma_min_over_max: ratio,
            })
        })
        .collect::<Result<_>>()?;
    let fold = |f: fn(f64, f64) -> f64, init: f64, g: fn(&ScanRow) -> f64| rows.iter().map(g).fold(init, f);
    Ok(DegeneracyReport {
        profile: *profile,
        seed,
        max_rel_det: fold(f64::max, 0.0, |r| r.rel_det),
        min_rel_det: fold(f64::min, f64::INFINITY, |r| r.rel_det),
        max_sigma_ratio: fold(f64::max, 0.0, |r| r.sigma_min_over_max),
        min_sigma_ratio: fold(f64::min, f64::INFINITY, |r| r.sigma_min_over_max),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn example_state() -> ChartState {
        ChartState {
            theta: FRAC_PI_2,
            phi_sph: 0.0,
            v: [0.1, 0.0, 0.0],
            theta_dot: 0.2,
            phi_sph_dot: 0.3,
        }
    }

    fn general_state() -> ChartState {
        ChartState {
            theta: 1.1,
            phi_sph: 0.4,
            v: [0.3, -0.5, 0.2],
            theta_dot: 0.9,
            phi_sph_dot: -1.4,
        }
    }

    fn max_rel(a: &Matrix5<f64>, b: &Matrix5<f64>) -> f64 {
        (a - b).abs().max() / b.abs().max()
    }

    #[test]
    fn assembled_hessian_is_symmetric() {
        for p in [RotatorProfile::Fundamental, RotatorProfile::Affine { a: 1.0 }] {
            let h = hessian_blocks(&p, &general_state()).unwrap().assemble();
            assert_eq!((h - h.transpose()).abs().max(), 0.0);
        }
    }

    #[test]
    fn blocks_match_dual_oracle() {
        for p in [
            RotatorProfile::Affine { a: 1.0 },
            RotatorProfile::Fundamental,
            RotatorProfile::Partner,
            RotatorProfile::Deformed { eps: 1e-2 },
        ] {
            for s in [example_state(), general_state()] {
                if !p.contains(s.q()) {
                    continue;
                }
                let closed = hessian_blocks(&p, &s).unwrap().assemble();
                let num = numeric_hessian(&p, &s).unwrap();
                assert!(max_rel(&closed, &num) < 1e-7, "{p}");
                for i in 0..5 {
                    for j in 0..5 {
                        let scale = num[(i, j)].abs().max(1e-3 * num.abs().max());
                        assert!((closed[(i, j)] - num[(i, j)]).abs() < 1e-7 * scale, "{p} ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn dual_and_fd_hessians_agree() {
        for p in [RotatorProfile::Affine { a: 1.0 }, RotatorProfile::Fundamental] {
            let s = general_state();
            let a = numeric_hessian(&p, &s).unwrap();
            let b = numeric_hessian_fd(&p, &s).unwrap();
            // the fallback is a cross-check only; its error is O(ε^(2/3)) times the curvature scale
            assert!(max_rel(&b, &a) < 1e-5, "{p}: {:e}", max_rel(&b, &a));
        }
    }

    #[test]
    fn quadratic_hook_recovers_exact_hessian() {
        let m = Matrix5::from_fn(|i, j| ((i + 1) * (j + 1)) as f64 + if i == j { 3.0 } else { 0.0 });
        let f = |z: &[HyperDual; 5]| {
            let mut acc = HyperDual::constant(0.0);
            for i in 0..5 {
                for j in 0..5 {
                    acc = acc + z[i] * z[j] * (0.5 * m[(i, j)]);
                }
            }
            acc
        };
        let h = dual::hessian(f, &[0.1, -0.2, 0.3, 0.7, -1.1]);
        assert_eq!(Matrix5::from_fn(|i, j| h[i][j]), m);
    }

    #[test]
    fn fundamental_is_singular_at_example_state() {
        let p = RotatorProfile::Fundamental;
        let s = example_state();
        let h = hessian_blocks(&p, &s).unwrap().assemble();
        let norm = h.singular_values().max();
        assert!(lu_det(&h).abs() < 1e-10 * norm.powi(5));
        let (ratio, _) = singular_value_ratio(&numeric_hessian(&p, &s).unwrap());
        assert!(ratio < 1e-9, "{ratio:e}");
    }

    #[test]
    fn inverse_a_examples() {
        let s = general_state();
        for p in [RotatorProfile::Affine { a: 1.0 }, RotatorProfile::Fundamental] {
            let a = hessian_blocks(&p, &s).unwrap().a;
            let inv = inverse_a(&p, &s).unwrap();
            assert!((a * inv - Matrix2::identity()).abs().max() < 1e-12);
            let generic = a.try_inverse().unwrap();
            assert!((inv - generic).abs().max() < 1e-12 * generic.abs().max());
        }
        // for the fundamental profile 1 + 2Qf″/f′ = −√Q/(2(1+√Q)), never zero
        let q = s.q();
        let factor = RotatorProfile::Fundamental.block_a_factor(q).unwrap();
        assert!((factor + q.sqrt() / (2.0 * (1.0 + q.sqrt()))).abs() < 1e-14);
    }

    #[test]
    fn inverse_a_detects_singular_block() {
        // for f = √(1+√Q) + εQ, 1 + 2Qf″/f′ = (ε − 1/(8f₀³))/(f₀′ + ε) with
        // f₀ = √(1+√Q); choosing ε = 1/(8f₀³) makes A singular at that Q
        let s = general_state();
        let f0 = (1.0 + s.q().sqrt()).sqrt();
        let p = RotatorProfile::Deformed { eps: 1.0 / (8.0 * f0.powi(3)) };
        let factor = p.block_a_factor(s.q()).unwrap();
        assert!(factor.abs() < 1e-12, "{factor:e}");
        assert!(matches!(inverse_a(&p, &s), Err(Error::SingularBlock { .. })));
    }

    #[test]
    fn closed_det_matches_lu() {
        let p = RotatorProfile::Affine { a: 1.0 };
        for s in [example_state(), general_state()] {
            let lu = lu_det(&numeric_hessian(&p, &s).unwrap());
            let closed = closed_det_h(&p, &s).unwrap();
            assert!((closed - lu).abs() < 1e-6 * lu.abs(), "{closed} vs {lu}");
            let schur = schur_det(&p, &s).unwrap();
            assert!((schur - closed).abs() < 1e-8 * closed.abs());
        }
    }

    #[test]
    fn closed_det_sign_follows_factorization() {
        let p = RotatorProfile::Affine { a: 0.5 };
        let s = general_state();
        let lu = lu_det(&numeric_hessian(&p, &s).unwrap());
        let factor = p.degeneracy_factor(s.q()).unwrap();
        assert_eq!(lu.signum(), (-factor).signum());
    }

    #[test]
    fn schur_complement_closed_form() {
        for p in [RotatorProfile::Affine { a: 1.0 }, RotatorProfile::Fundamental] {
            let s = general_state();
            let blocks = hessian_blocks(&p, &s).unwrap();
            let numeric = blocks.schur_complement(&inverse_a(&p, &s).unwrap());
            let closed = closed_schur_complement(&p, &s).unwrap();
            assert!((numeric - closed).abs().max() < 1e-12 * closed.abs().max(), "{p}");
        }
    }

    #[test]
    fn sylvester_rank_one_identity() {
        let mut rng = sampling::experiment_rng(5, Stream::States);
        use rand::Rng;
        for _ in 0..50 {
            let w = Vector2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let c: f64 = rng.random_range(-3.0..3.0);
            let m: Matrix2<f64> = Matrix2::identity() + (c / w.norm_squared()) * w * w.transpose();
            assert!((m.determinant() - (1.0 + c)).abs() < 1e-12);
        }
    }

    #[test]
    fn raw_hessian_jacobian_relation() {
        for p in [RotatorProfile::Affine { a: 1.0 }, RotatorProfile::Deformed { eps: 0.1 }] {
            let s = general_state();
            let h = lu_det(&numeric_hessian(&p, &s).unwrap());
            let raw = lu_det(&raw_velocity_hessian(&p, &s).unwrap());
            let s2 = s.theta.sin().powi(2);
            assert!((raw - s2 * h).abs() < 1e-10 * raw.abs());
        }
    }

    #[test]
    fn zero_rotation_is_rejected() {
        let s = ChartState { theta_dot: 0.0, phi_sph_dot: 0.0, ..general_state() };
        assert!(matches!(
            hessian_blocks(&RotatorProfile::Affine { a: 1.0 }, &s),
            Err(Error::DegenerateRotation)
        ));
        assert!(matches!(
            hessian_blocks(&RotatorProfile::Affine { a: 0.0 }, &general_state()),
            Err(Error::SingularDerivative { .. })
        ));
    }

    #[test]
    fn scan_verdicts() {
        let fund = degeneracy_scan(&RotatorProfile::Fundamental, 40, 1).unwrap();
        assert!(fund.max_rel_det < 1e-9);
        assert!(fund.all_degenerate());
        let aff = degeneracy_scan(&RotatorProfile::Affine { a: 1.0 }, 40, 1).unwrap();
        assert!(aff.all_regular());
        assert_eq!(aff.rows.len(), 40);
        assert_eq!(aff.to_csv().lines().count(), 41);
        let again = degeneracy_scan(&RotatorProfile::Affine { a: 1.0 }, 40, 1).unwrap();
        assert_eq!(aff, again);
        assert!(degeneracy_scan(&RotatorProfile::Fundamental, 0, 1).is_err());
    }
}

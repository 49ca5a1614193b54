use serde_json::{json, Value};

use rotator_core::dynamics::{integrate, IntegrationParams};
use rotator_core::exact::{indeterminism_pair, uniform_grid, PhaseProfile};
use rotator_core::hessian::degeneracy_scan;
use rotator_core::minkowski::build_solution_frame;
use rotator_core::output::{fmt_f64, CsvTable};
use rotator_core::profiles::{log_grid, solve_degeneracy_ode, DegenerateFit};
use rotator_core::tolerances::DIVERGENCE_THRESHOLD;
use rotator_core::{ChartState, Error, RotatorProfile};

use crate::config::ExperimentConfig;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const DEGENERATE: i32 = 3;
}

/// Result of one command: the table, a one-line verdict and a summary for the sidecar.
#[derive(Debug)]
pub struct Outcome {
    pub csv: String,
    pub verdict: String,
    pub summary: Value,
    pub code: i32,
}

/// A command failure together with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    /// Output produced before the failure, written anyway.
    pub partial: Option<Outcome>,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure { code: exit::CONFIG, message: message.into(), partial: None }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateHessian { .. } => exit::DEGENERATE,
            Error::InvalidInput(_) | Error::Domain { .. } | Error::SingularDerivative { .. } => exit::CONFIG,
            _ => exit::CHECK_FAILED,
        };
        Failure { code, message: e.to_string(), partial: None }
    }
}

/// Default initial state of `integrate` (`Q ≈ 0.1605`).
pub fn default_initial_state() -> ChartState {
    ChartState {
        theta: std::f64::consts::FRAC_PI_2,
        phi_sph: 0.0,
        v: [0.1, 0.0, 0.0],
        theta_dot: 0.2,
        phi_sph_dot: 0.3,
    }
}

fn relative_spread(v: &[f64]) -> f64 {
    v.iter().map(|x| (x - v[0]).abs() / v[0].abs()).fold(0.0, f64::max)
}

/// Casimir table over a log grid of `Q`, clipped to the profile's domain.
pub fn casimir(cfg: &ExperimentConfig) -> Result<Outcome, Failure> {
    let p = cfg.profile;
    let q_max = if let RotatorProfile::Partner = p { cfg.q_max.min(0.99) } else { cfg.q_max };
    if q_max <= cfg.q_min {
        return Err(Failure::config(format!("empty Q range [{}, {q_max}] for {p}", cfg.q_min)));
    }
    let grid = log_grid(cfg.q_min, q_max, cfg.n_q);
    let (m, ell) = (cfg.m, cfg.ell);
    let (pp0, ww0) = (m * m, -0.25 * m.powi(4) * ell * ell);
    let mut table = CsvTable::new(&["Q", "PP", "WW", "PP_over_m2", "WW_over_spin2"]);
    let (mut pp, mut ww) = (Vec::new(), Vec::new());
    for &q in &grid {
        let a = p.casimir_mass_sq(q, m)?;
        let b = p.casimir_spin_sq(q, m, ell)?;
        table.push([q, a, b, a / pp0, b / ww0].iter().map(|v| fmt_f64(*v)).collect());
        pp.push(a);
        ww.push(b);
    }
    let (spread_pp, spread_ww) = (relative_spread(&pp), relative_spread(&ww));
    let constant = spread_pp < cfg.residual_tol && spread_ww < cfg.residual_tol;
    let verdict = if constant { "fundamental: PP and WW constant" } else { "not fundamental" };
    Ok(Outcome {
        csv: table.render(),
        verdict: verdict.into(),
        summary: json!({
            "q_range": [cfg.q_min, q_max],
            "pp_relative_spread": spread_pp,
            "ww_relative_spread": spread_ww,
        }),
        code: exit::OK,
    })
}

/// Hessian degeneracy scan; exit 0 iff the verdict matches the profile class.
pub fn hessian(cfg: &ExperimentConfig) -> Result<Outcome, Failure> {
    let report = degeneracy_scan(&cfg.profile, cfg.n_states, cfg.seed)?;
    let tol = cfg.degeneracy_tol;
    let degenerate = report.rows.iter().all(|r| r.sigma_min_over_max < tol);
    let regular = report.rows.iter().all(|r| r.sigma_min_over_max >= tol);
    let verdict = match (degenerate, regular) {
        (true, _) => "DEGENERATE",
        (_, true) => "REGULAR",
        _ => "MIXED",
    };
    let expected = if cfg.profile.is_degenerate_class() { "DEGENERATE" } else { "REGULAR" };
    Ok(Outcome {
        csv: report.to_csv(),
        verdict: verdict.into(),
        summary: json!({
            "expected": expected,
            "n_states": report.rows.len(),
            "min_sigma_ratio": report.min_sigma_ratio,
            "max_sigma_ratio": report.max_sigma_ratio,
            "min_rel_det": report.min_rel_det,
            "max_rel_det": report.max_rel_det,
        }),
        code: if verdict == expected { exit::OK } else { exit::CHECK_FAILED },
    })
}

/// RK4 integration with a conservation audit.
pub fn integrate_cmd(cfg: &ExperimentConfig) -> Result<Outcome, Failure> {
    let initial = cfg.initial.unwrap_or_else(default_initial_state);
    let params = IntegrationParams { m: cfg.m, ell: cfg.ell, sample_every: cfg.sample_every };
    let traj = integrate(&cfg.profile, &initial, cfg.t_end, cfg.dt, &params)?;
    let drifts = [
        ("p", traj.momentum_drift()),
        ("M", traj.angular_momentum_drift()),
        ("Q", traj.q_drift()),
        ("PP", traj.pp_drift()),
        ("WW", traj.ww_drift()),
    ];
    let worst = drifts.iter().map(|d| d.1).fold(0.0, f64::max);
    let summary = json!({
        "samples": traj.len(),
        "step": traj.dt,
        "drift": drifts.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "halt": traj.halt.as_ref().map(|(t, e)| json!({"t": t, "error": e.to_string()})),
    });
    let csv = traj.to_csv();
    if let Some((t, e)) = traj.halt.clone() {
        let code = Failure::from(e.clone()).code;
        let code = if code == exit::CONFIG { exit::CHECK_FAILED } else { code };
        return Err(Failure {
            code,
            message: format!("integration halted at t = {t}: {e}"),
            partial: Some(Outcome { csv, verdict: "HALTED".into(), summary, code }),
        });
    }
    let ok = worst < cfg.conservation_tol;
    Ok(Outcome {
        csv,
        verdict: if ok { "CONSERVED".into() } else { format!("DRIFT {worst:e} exceeds {:e}", cfg.conservation_tol) },
        summary,
        code: if ok { exit::OK } else { exit::CHECK_FAILED },
    })
}

/// Linear against modulated phase on a common frame and common initial data.
pub fn indeterminism(cfg: &ExperimentConfig) -> Result<Outcome, Failure> {
    let frame = build_solution_frame(cfg.m, cfg.ell, cfg.seed)?;
    let linear = PhaseProfile::Linear { omega: cfg.omega };
    let modulated = PhaseProfile::Modulated { omega: cfg.omega, eps: cfg.eps, nu: cfg.nu };
    let grid = uniform_grid(cfg.t_end, cfg.n_grid);
    let r = indeterminism_pair(&cfg.profile, &frame, linear, modulated, &grid)?;
    let threshold = DIVERGENCE_THRESHOLD * cfg.ell;
    let (r1, r2, delta) = (r.max_residual1(), r.max_residual2(), r.max_delta());
    let mut failed = Vec::new();
    if !(r1 < cfg.residual_tol) {
        failed.push(format!("residual of solution 1 = {r1:e}"));
    }
    if !(r2 < cfg.residual_tol) {
        failed.push(format!("residual of solution 2 = {r2:e}"));
    }
    if !(delta > threshold) {
        failed.push(format!("max divergence {delta:e} <= {threshold:e}"));
    }
    let verdict = if failed.is_empty() {
        "NON-UNIQUE CAUCHY DATA REPRODUCED".to_string()
    } else {
        format!("NOT REPRODUCED: {}", failed.join("; "))
    };
    Ok(Outcome {
        csv: r.to_csv(),
        verdict,
        summary: json!({
            "phase1": linear,
            "phase2": modulated,
            "jet_mismatch": r.jet_mismatch,
            "max_residual1": r1,
            "max_residual2": r2,
            "max_divergence": delta,
            "divergence_threshold": threshold,
        }),
        code: if failed.is_empty() { exit::OK } else { exit::CHECK_FAILED },
    })
}

/// RK4 solution of the degeneracy ODE against the closed-form family member.
pub fn ode_f(cfg: &ExperimentConfig) -> Result<Outcome, Failure> {
    let (f0, df0) = match (cfg.f0, cfg.df0) {
        (Some(f), Some(d)) => (f, d),
        (f, d) => {
            let v = cfg.profile.eval(cfg.q0)?;
            (f.unwrap_or(v.f), d.unwrap_or(v.df))
        }
    };
    let samples = solve_degeneracy_ode(cfg.q0, f0, df0, cfg.q_end, cfg.steps)?;
    let fit = DegenerateFit::from_jet(cfg.q0, f0, df0)?;
    let mut table = CsvTable::new(&["Q", "f_numeric", "f_closed", "error"]);
    let mut worst = 0.0_f64;
    for s in &samples {
        let exact = fit.eval(s.q);
        let err = ((s.f - exact) / exact).abs();
        worst = worst.max(err);
        table.push([s.q, s.f, exact, err].iter().map(|v| fmt_f64(*v)).collect());
    }
    let ok = worst < cfg.ode_tol;
    Ok(Outcome {
        csv: table.render(),
        verdict: if ok { "CLOSED FORM REPRODUCED".into() } else { format!("MAX ERROR {worst:e} exceeds {:e}", cfg.ode_tol) },
        summary: json!({
            "f0": f0,
            "df0": df0,
            "c1": fit.c1,
            "c2": fit.c2,
            "max_relative_error": worst,
        }),
        code: if ok { exit::OK } else { exit::CHECK_FAILED },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(profile: RotatorProfile) -> ExperimentConfig {
        ExperimentConfig { profile, ..Default::default() }
    }

    #[test]
    fn casimir_verdicts() {
        assert_eq!(casimir(&cfg(RotatorProfile::Fundamental)).unwrap().verdict, "fundamental: PP and WW constant");
        assert_eq!(casimir(&cfg(RotatorProfile::Partner)).unwrap().verdict, "fundamental: PP and WW constant");
        assert_eq!(casimir(&cfg(RotatorProfile::Affine { a: 1.0 })).unwrap().verdict, "not fundamental");
    }

    #[test]
    fn hessian_verdicts() {
        let c = ExperimentConfig { n_states: 20, ..cfg(RotatorProfile::Fundamental) };
        let o = hessian(&c).unwrap();
        assert_eq!((o.verdict.as_str(), o.code), ("DEGENERATE", exit::OK));
        let o = hessian(&ExperimentConfig { profile: RotatorProfile::Deformed { eps: 1e-3 }, ..c }).unwrap();
        assert_eq!((o.verdict.as_str(), o.code), ("REGULAR", exit::OK));
    }

    #[test]
    fn integrate_exit_codes() {
        let c = ExperimentConfig { t_end: 1.0, dt: 1e-2, ..cfg(RotatorProfile::Affine { a: 1.0 }) };
        assert_eq!(integrate_cmd(&c).unwrap().code, exit::OK);
        let e = integrate_cmd(&ExperimentConfig { profile: RotatorProfile::Fundamental, ..c }).unwrap_err();
        assert_eq!(e.code, exit::DEGENERATE);
    }

    #[test]
    fn identical_phases_do_not_diverge() {
        let c = ExperimentConfig { eps: 0.0, n_grid: 21, ..Default::default() };
        let o = indeterminism(&c).unwrap();
        assert_eq!(o.code, exit::CHECK_FAILED);
        assert!(o.verdict.contains("divergence"));
    }

    #[test]
    fn ode_rejects_flat_start() {
        let c = ExperimentConfig { df0: Some(0.0), ..Default::default() };
        assert_eq!(ode_f(&c).unwrap_err().code, exit::CONFIG);
        let c = ExperimentConfig { profile: RotatorProfile::Custom { c1: 2.0, c2: 3.0 }, ..Default::default() };
        assert_eq!(ode_f(&c).unwrap().code, exit::OK);
    }
}

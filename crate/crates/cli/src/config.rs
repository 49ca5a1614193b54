use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use rotator_core::{ChartState, RotatorProfile};
use serde::{Deserialize, Serialize};

/// Fully resolved experiment configuration. JSON keys are the snake_case
/// field names; every key has a kebab-case flag of the same name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub profile: RotatorProfile,
    pub m: f64,
    pub ell: f64,
    pub seed: u64,
    pub out: PathBuf,

    pub residual_tol: f64,
    pub conservation_tol: f64,
    pub degeneracy_tol: f64,
    pub ode_tol: f64,

    pub t_end: f64,
    pub dt: f64,
    pub n_states: usize,
    pub sample_every: usize,
    pub n_grid: usize,

    pub q_min: f64,
    pub q_max: f64,
    pub n_q: usize,

    pub initial: Option<ChartState>,

    pub omega: f64,
    pub eps: f64,
    pub nu: f64,

    pub q0: f64,
    pub f0: Option<f64>,
    pub df0: Option<f64>,
    pub q_end: f64,
    pub steps: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            profile: RotatorProfile::Fundamental,
            m: 1.0,
            ell: 1.0,
            seed: 0,
            out: PathBuf::from("out"),
            residual_tol: 1e-9,
            conservation_tol: 1e-7,
            degeneracy_tol: 1e-8,
            ode_tol: 1e-8,
            t_end: 10.0,
            dt: 1e-3,
            n_states: 100,
            sample_every: 10,
            n_grid: 201,
            q_min: 1e-2,
            q_max: 1e2,
            n_q: 100,
            initial: None,
            omega: 1.0,
            eps: 0.2,
            nu: 1.5,
            q0: 1.0,
            f0: None,
            df0: None,
            q_end: 10.0,
            steps: 10_000,
        }
    }
}

/// Flags shared by every command; each overrides the config-file value.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON config file; flags given on the command line take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// fundamental | partner | affine:A | deformed:EPS | custom:C1:C2
    #[arg(long, global = true)]
    pub profile: Option<RotatorProfile>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub m: Option<f64>,
    #[arg(long, global = true)]
    pub ell: Option<f64>,
    /// Output directory for the CSV table and JSON sidecar
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true)]
    pub residual_tol: Option<f64>,
    #[arg(long, global = true)]
    pub conservation_tol: Option<f64>,
    #[arg(long, global = true)]
    pub degeneracy_tol: Option<f64>,
    #[arg(long, global = true)]
    pub ode_tol: Option<f64>,

    #[arg(long, global = true)]
    pub t_end: Option<f64>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true)]
    pub n_states: Option<usize>,
    #[arg(long, global = true)]
    pub sample_every: Option<usize>,
    #[arg(long, global = true)]
    pub n_grid: Option<usize>,

    #[arg(long, global = true)]
    pub q_min: Option<f64>,
    #[arg(long, global = true)]
    pub q_max: Option<f64>,
    #[arg(long, global = true)]
    pub n_q: Option<usize>,

    /// JSON file holding the initial ChartState for `integrate`
    #[arg(long, global = true)]
    pub initial: Option<PathBuf>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true)]
    pub nu: Option<f64>,

    #[arg(long, global = true)]
    pub q0: Option<f64>,
    #[arg(long, global = true)]
    pub f0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub df0: Option<f64>,
    #[arg(long, global = true)]
    pub q_end: Option<f64>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

macro_rules! apply {
    ($cfg:ident, $o:ident; $($field:ident),*) => {
        $(if let Some(v) = $o.$field.clone() { $cfg.$field = v; })*
    };
}

impl ExperimentConfig {
    /// Defaults, then the config file, then flags.
    pub fn resolve(o: &Overrides) -> anyhow::Result<Self> {
        let mut cfg = match &o.config {
            Some(path) => read_json(path)?,
            None => ExperimentConfig::default(),
        };
        apply!(cfg, o; profile, seed, m, ell, out, residual_tol, conservation_tol, degeneracy_tol, ode_tol,
            t_end, dt, n_states, sample_every, n_grid, q_min, q_max, n_q, omega, eps, nu, q0, q_end, steps);
        if o.f0.is_some() {
            cfg.f0 = o.f0;
        }
        if o.df0.is_some() {
            cfg.df0 = o.df0;
        }
        if let Some(path) = &o.initial {
            cfg.initial = Some(read_json(path)?);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let positive = [
            ("m", self.m),
            ("ell", self.ell),
            ("residual_tol", self.residual_tol),
            ("conservation_tol", self.conservation_tol),
            ("degeneracy_tol", self.degeneracy_tol),
            ("ode_tol", self.ode_tol),
            ("t_end", self.t_end),
            ("dt", self.dt),
            ("q_min", self.q_min),
            ("q0", self.q0),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be a positive finite number, got {v}");
            }
        }
        if self.dt >= self.t_end {
            bail!("dt = {} must be smaller than t_end = {}", self.dt, self.t_end);
        }
        if self.q_max <= self.q_min {
            bail!("q_max = {} must exceed q_min = {}", self.q_max, self.q_min);
        }
        for (name, v) in [
            ("n_states", self.n_states),
            ("sample_every", self.sample_every),
            ("n_q", self.n_q),
            ("steps", self.steps),
        ] {
            if v == 0 {
                bail!("{name} must be at least 1");
            }
        }
        if self.n_grid < 2 {
            bail!("n_grid must be at least 2");
        }
        Ok(())
    }
}

//! Numerical laboratory for relativistic rotators.
//!
//! A rotator is a point particle carrying a single null direction `k`, with
//! Hamilton's action `S = -m ∫ dτ √(ẋẋ) f(Q)`, `Q = -ℓ² (k̇k̇)/(kẋ)²`. The
//! crate evaluates momenta and Casimir invariants for a family of profiles
//! `f`, builds the 5×5 velocity Hessian in closed form and numerically,
//! integrates the equations of motion for regular profiles, and constructs
//! the exact solutions of the fundamental rotator `f = √(1+√Q)` whose phase
//! is an arbitrary function of time.

pub mod chart;
pub mod dual;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod hessian;
pub mod minkowski;
pub mod output;
pub mod profiles;
pub mod sampling;
pub mod tolerances;

pub use chart::{ChartState, CovariantKinematics};
pub use dynamics::Trajectory;
pub use error::{Error, Result};
pub use exact::{ExactSolution, PhaseProfile};
pub use hessian::{DegeneracyReport, HessianBlocks};
pub use minkowski::{AngularMomentum, FourVector, SolutionFrame};
pub use profiles::RotatorProfile;

//! Momentum-space and position-space Thomas-Fermi functionals on radial
//! grids, the level-set transforms that carry one into the other, and
//! solvers for the constrained minimizers.
//!
//! Everything operates on [`RadialProfile`]s: nonnegative radial densities
//! sampled on strictly increasing grids. A profile stands for the
//! spherically symmetric function whose cube root is piecewise linear
//! between the sample points (see [`quad`] for why), which makes the
//! functionals, the transforms, and decreasing rearrangement consistent
//! with one another at machine precision on piecewise-constant test
//! densities.

pub mod config;
pub mod csvio;
pub mod energy;
pub mod error;
pub mod grid;
pub mod momentum;
pub mod position;
pub mod profile;
pub mod quad;
pub mod rearrange;
pub mod rng;
pub mod solver;
pub mod transform;
pub mod verify;

pub use config::AtomConfig;
pub use energy::{EnergyBreakdown, RepulsionPath};
pub use error::Error;
pub use grid::{make_grid, GridScheme, RadialGrid};
pub use momentum::{
    attraction_m, energy_mtf, energy_s, kinetic_m, repulsion_m_direct, repulsion_m_layercake,
    PairwiseExtremes, SubstitutedProfile,
};
pub use position::{attraction_tf, energy_tf, kinetic_tf, repulsion_tf};
pub use profile::{mass, validate_domain, DomainReport, RadialProfile, Space};
pub use quad::integrate_radial;
pub use rearrange::rearrange_decreasing;
pub use solver::{
    default_density_grid, direct_minimize_mtf, minimizer_density, minimizer_momentum,
    solve_tf_ode, MinimizeResult, TfSolution,
};
pub use transform::{fermi_radius, round_trip_residual, transform_s, transform_t, FermiRadiusCurve};
pub use verify::{
    emit_report, run_scenario, Metric, ReportFormat, ScenarioConfig, ScenarioReport, SCENARIOS,
};

/// Everything returns this result type.
pub type Result<T> = std::result::Result<T, Error>;

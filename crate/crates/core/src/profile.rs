use crate::grid::{GridScheme, RadialGrid};
use crate::quad::{cbrt_values, radial_moment};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which space the radial variable lives in: `|x|` or `|xi|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Position,
    Momentum,
}

impl Space {
    pub fn flipped(self) -> Self {
        match self {
            Space::Position => Space::Momentum,
            Space::Momentum => Space::Position,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Space::Position => "position",
            Space::Momentum => "momentum",
        }
    }
}

/// Default tail tolerance: the last node value may not exceed this times
/// the peak value, so profiles are numerically compactly supported.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Relative half-width used to represent a jump of a piecewise-constant
/// profile: the two nodes of a jump pair are separated by this factor, so
/// the connecting ramp carries negligible measure.
pub const JUMP_EPS: f64 = 1e-10;

/// A nonnegative radial density sampled on a grid.
///
/// The node values are samples `f_i = f(r_i)`. Between nodes the profile
/// stands for the cube of the linear interpolant of `f_i^(1/3)`; on
/// `(0, r_min]` it is constant at `f_1` and beyond `r_max` it is zero
/// (see [`crate::quad`]).
///
/// Construction admits negative values so that [`validate_domain`] can
/// diagnose them; every operation that evaluates a functional or a
/// transform first checks the profile is in-domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    grid: RadialGrid,
    values: Vec<f64>,
    space: Space,
}

impl RadialProfile {
    pub fn new(grid: RadialGrid, values: Vec<f64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Profile(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Profile(format!("non-finite value {v}")));
        }
        Ok(Self {
            grid,
            values,
            space,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// Cube roots of the node values: the interpolated variable.
    pub(crate) fn w_values(&self) -> Vec<f64> {
        cbrt_values(&self.values)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Pointwise evaluation under the profile semantics.
    pub fn value_at(&self, r: f64) -> f64 {
        let w = self.w_at(r);
        w * w * w
    }

    /// The interpolated cube-root variable at radius `r`, with the
    /// constant-extension and zero-tail conventions.
    pub(crate) fn w_at(&self, r: f64) -> f64 {
        let nodes = self.grid.nodes();
        if r <= nodes[0] {
            return self.values[0].cbrt();
        }
        if r > self.grid.r_max() {
            return 0.0;
        }
        let i = match nodes.binary_search_by(|n| n.partial_cmp(&r).unwrap()) {
            Ok(i) => return self.values[i].cbrt(),
            Err(i) => i, // nodes[i-1] < r < nodes[i]
        };
        let (r0, r1) = (nodes[i - 1], nodes[i]);
        let (w0, w1) = (self.values[i - 1].cbrt(), self.values[i].cbrt());
        w0 + (w1 - w0) * (r - r0) / (r1 - r0)
    }

    /// Nodewise scaling by a nonnegative factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::Profile(format!("bad scale factor {factor}")));
        }
        Self::new(
            self.grid.clone(),
            self.values.iter().map(|v| v * factor).collect(),
            self.space,
        )
    }

    pub fn is_nonincreasing(&self) -> bool {
        let tol = 1e-13 * self.max_value();
        self.values.windows(2).all(|p| p[1] <= p[0] + tol)
    }

    pub(crate) fn require_in_domain(&self) -> Result<()> {
        match validate_domain(self) {
            DomainReport {
                in_domain: true, ..
            } => Ok(()),
            DomainReport { reason, .. } => Err(Error::DomainViolation(
                reason.unwrap_or_else(|| "out of domain".into()),
            )),
        }
    }

    pub(crate) fn require_space(&self, space: Space) -> Result<()> {
        if self.space != space {
            return Err(Error::SpaceMismatch {
                expected: space,
                got: self.space,
            });
        }
        Ok(())
    }

    /// Piecewise-constant profile: `levels[j]` holds on
    /// `(breaks[j-1], breaks[j])` and the profile vanishes beyond the last
    /// breakpoint. Jumps are carried by node pairs a relative [`JUMP_EPS`]
    /// apart, so integrals of the profile are exact up to that width.
    pub fn piecewise_constant(
        space: Space,
        breaks: &[f64],
        levels: &[f64],
        n_base: usize,
        r_min: f64,
        r_max: f64,
    ) -> Result<Self> {
        if breaks.is_empty() || breaks.len() != levels.len() {
            return Err(Error::Profile(
                "need one level per breakpoint, at least one".into(),
            ));
        }
        if breaks.windows(2).any(|p| p[1] <= p[0]) || breaks[0] <= r_min {
            return Err(Error::Profile("breakpoints must increase beyond r_min".into()));
        }
        if *breaks.last().unwrap() >= r_max {
            return Err(Error::Profile("last breakpoint must lie inside r_max".into()));
        }
        if levels.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::Profile("levels must be finite and nonnegative".into()));
        }
        let base = crate::grid::make_grid(GridScheme::Log, n_base.max(16), r_min, r_max)?;
        let mut nodes: Vec<f64> = base.nodes().to_vec();
        for &b in breaks {
            nodes.push(b * (1.0 - JUMP_EPS));
            nodes.push(b);
        }
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        nodes.dedup_by(|a, b| (*a - *b).abs() <= f64::EPSILON * b.abs());
        // drop base nodes that crowd a jump pair
        let mut cleaned: Vec<f64> = Vec::with_capacity(nodes.len());
        for r in nodes {
            if let Some(&last) = cleaned.last() {
                if r - last <= 0.01 * JUMP_EPS * r {
                    continue;
                }
            }
            cleaned.push(r);
        }
        // value at r: the level of the step function, right-continuous at
        // breakpoints so an indicator is chi_{r < b}
        let value_at = |r: f64| -> f64 {
            let mut idx = 0;
            while idx < breaks.len() && r >= breaks[idx] {
                idx += 1;
            }
            if idx < levels.len() {
                levels[idx]
            } else {
                0.0
            }
        };
        let values: Vec<f64> = cleaned.iter().map(|&r| value_at(r)).collect();
        let grid = RadialGrid::from_nodes(cleaned, GridScheme::Custom)?;
        Self::new(grid, values, space)
    }

    /// Indicator of the unit ball, `chi_{r<1}`, on a grid reaching `r_max > 1`.
    pub fn unit_ball_indicator(space: Space, n_base: usize, r_max: f64) -> Result<Self> {
        Self::piecewise_constant(space, &[1.0], &[1.0], n_base, 1e-2, r_max)
    }

    /// Zero profile on the given grid.
    pub fn zero(grid: RadialGrid, space: Space) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![0.0; n], space)
    }
}

/// Diagnostics produced by [`validate_domain`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainReport {
    pub space: Space,
    /// `4 pi ∫ r^2 f dr`.
    pub mass: f64,
    /// Momentum space: the second moment `∫ xi^2 tau`; position space:
    /// `∫ rho^(5/3)`: the integrability witness of the respective domain.
    pub weighted_moment: f64,
    pub in_domain: bool,
    pub reason: Option<String>,
}

/// Checks membership in the finite-grid analogue of the functional's
/// domain and reports the relevant integrals. Never errors: violations
/// come back as `in_domain = false` with a reason.
pub fn validate_domain(p: &RadialProfile) -> DomainReport {
    validate_domain_with(p, DEFAULT_TAIL_TOL)
}

/// [`validate_domain`] with an explicit tail tolerance.
pub fn validate_domain_with(p: &RadialProfile, tail_tol: f64) -> DomainReport {
    let w = p.w_values();
    let nodes = p.grid().nodes();
    let mass = 4.0 * PI * radial_moment(nodes, &w, 0, 3);
    let weighted_moment = match p.space() {
        Space::Momentum => 4.0 * PI * radial_moment(nodes, &w, 2, 3),
        Space::Position => 4.0 * PI * radial_moment(nodes, &w, 0, 5),
    };
    let mut reason = None;
    if let Some((i, v)) = p
        .values()
        .iter()
        .enumerate()
        .find(|(_, v)| **v < 0.0)
    {
        reason = Some(format!("negative value {v} at node {i}"));
    } else {
        let peak = p.max_value();
        let tail = *p.values().last().unwrap();
        if tail > tail_tol * peak {
            reason = Some(format!(
                "tail violation: value {tail} at r_max exceeds {tail_tol} of peak {peak}"
            ));
        }
    }
    if reason.is_none() && !(mass.is_finite() && weighted_moment.is_finite()) {
        reason = Some("non-finite integral".into());
    }
    DomainReport {
        space: p.space(),
        mass,
        weighted_moment,
        in_domain: reason.is_none(),
        reason,
    }
}

/// Total mass `4 pi ∫ r^2 f dr`, the L1 norm of the density.
pub fn mass(p: &RadialProfile) -> Result<f64> {
    crate::quad::integrate_radial(p, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn zero_profile_is_in_domain_with_zero_mass() {
        let grid = make_grid(GridScheme::Log, 32, 0.1, 10.0).unwrap();
        let p = RadialProfile::zero(grid, Space::Momentum).unwrap();
        let rep = validate_domain(&p);
        assert!(rep.in_domain);
        assert_eq!(rep.mass, 0.0);
        assert_eq!(mass(&p).unwrap(), 0.0);
    }

    #[test]
    fn negative_node_is_flagged_not_fatal() {
        let grid = make_grid(GridScheme::Log, 32, 0.1, 10.0).unwrap();
        let mut values = vec![0.0; 32];
        values[7] = -0.25;
        let p = RadialProfile::new(grid, values, Space::Momentum).unwrap();
        let rep = validate_domain(&p);
        assert!(!rep.in_domain);
        assert!(rep.reason.unwrap().contains("negative value"));
    }

    #[test]
    fn tail_violation_is_flagged() {
        let grid = make_grid(GridScheme::Log, 32, 0.1, 10.0).unwrap();
        let p = RadialProfile::new(grid, vec![1.0; 32], Space::Position).unwrap();
        let rep = validate_domain(&p);
        assert!(!rep.in_domain);
        assert!(rep.reason.unwrap().contains("tail violation"));
    }

    #[test]
    fn ball_indicator_mass_and_second_moment() {
        let p = RadialProfile::unit_ball_indicator(Space::Momentum, 128, 2.0).unwrap();
        let rep = validate_domain(&p);
        assert!(rep.in_domain);
        let vol = 4.0 * PI / 3.0;
        let second = 4.0 * PI / 5.0;
        assert!((rep.mass - vol).abs() <= 1e-9 * vol);
        assert!((rep.weighted_moment - second).abs() <= 1e-9 * second);
    }

    #[test]
    fn exponential_profile_mass() {
        let grid = make_grid(GridScheme::Log, 4096, 1e-6, 60.0).unwrap();
        let values: Vec<f64> = grid.nodes().iter().map(|r| (-r).exp()).collect();
        let p = RadialProfile::new(grid, values, Space::Position).unwrap();
        let m = mass(&p).unwrap();
        let expect = 8.0 * PI;
        assert!((m - expect).abs() <= 2e-5 * expect);
    }

    #[test]
    fn value_at_follows_conventions() {
        let p = RadialProfile::unit_ball_indicator(Space::Position, 64, 2.0).unwrap();
        assert_eq!(p.value_at(0.005), 1.0); // extension
        assert!((p.value_at(0.5) - 1.0).abs() < 1e-12);
        assert_eq!(p.value_at(1.5), 0.0);
        assert_eq!(p.value_at(3.0), 0.0); // beyond r_max
    }

    #[test]
    fn piecewise_constant_rejects_bad_specs() {
        assert!(RadialProfile::piecewise_constant(
            Space::Position,
            &[2.0, 1.0],
            &[1.0, 0.5],
            64,
            0.01,
            4.0
        )
        .is_err());
        assert!(RadialProfile::piecewise_constant(
            Space::Position,
            &[1.0],
            &[-1.0],
            64,
            0.01,
            4.0
        )
        .is_err());
    }
}

//! Radial quadrature.
//!
//! A profile's node values `f_i` stand for the spherically symmetric
//! function `f(r) = w(r)^3` where `w` interpolates `f_i^(1/3)` linearly
//! between nodes, is constant on `(0, r_min]`, and vanishes beyond
//! `r_max`. Every integrand the functionals need (`f`, `f^(2/3)`,
//! `f^(5/3)`, weighted by powers of `r`) is then a polynomial on each
//! cell, so a fixed-order Gauss rule per cell integrates it exactly.
//! That keeps masses, energies, transforms, and rearrangements mutually
//! consistent: identities that hold for the interpolants hold for the
//! computed numbers down to rounding, instead of drifting apart at the
//! quadrature-error scale.
//!
//! Cells are traversed in a fixed order and accumulated with Neumaier
//! compensation, so results are reproducible to well below 1e-12.

use crate::profile::RadialProfile;
use crate::{Error, Result};
use std::f64::consts::PI;

/// 8-point Gauss-Legendre nodes on [-1, 1]; exact through degree 15.
pub(crate) const GAUSS_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];

pub(crate) const GAUSS_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// One quadrature cell: `w` is linear from `w0` at `r0` to `w1` at `r1`.
/// The extension segment `(0, r_min]` appears as a cell with `r0 = 0` and
/// equal endpoint values.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Cell {
    pub r0: f64,
    pub r1: f64,
    pub w0: f64,
    pub w1: f64,
}

impl Cell {
    #[inline]
    pub fn width(&self) -> f64 {
        self.r1 - self.r0
    }

    /// Value of the linear `w` at radius `r` inside the cell.
    #[inline]
    pub fn w_at(&self, r: f64) -> f64 {
        let t = (r - self.r0) / (self.r1 - self.r0);
        self.w0 + (self.w1 - self.w0) * t
    }

    /// `∫_cell g(r) dr` by the fixed Gauss rule.
    #[inline]
    pub fn gauss<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        let c = 0.5 * (self.r0 + self.r1);
        let h = 0.5 * (self.r1 - self.r0);
        let mut s = 0.0;
        for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS.iter()) {
            s += w * g(c + h * x);
        }
        s * h
    }

    /// `∫_cell r^p w(r)^m dr`, exact for `p + m <= 15`.
    #[inline]
    pub fn moment(&self, p: i32, m: i32) -> f64 {
        debug_assert!(p >= 0 && m >= 0 && p + m <= 15);
        self.gauss(|r| r.powi(p) * self.w_at(r).powi(m))
    }
}

/// Materializes the cell list of a profile-like pair (nodes, w-values),
/// extension cell first.
pub(crate) fn cells_of(nodes: &[f64], w: &[f64]) -> Vec<Cell> {
    debug_assert_eq!(nodes.len(), w.len());
    let mut out = Vec::with_capacity(nodes.len());
    out.push(Cell {
        r0: 0.0,
        r1: nodes[0],
        w0: w[0],
        w1: w[0],
    });
    for i in 0..nodes.len() - 1 {
        out.push(Cell {
            r0: nodes[i],
            r1: nodes[i + 1],
            w0: w[i],
            w1: w[i + 1],
        });
    }
    out
}

/// Cube roots of the node values (the interpolated variable).
pub(crate) fn cbrt_values(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| v.cbrt()).collect()
}

/// `∫_0^{r_max} r^(2+k) w(r)^m dr` without the angular factor.
pub(crate) fn radial_moment(nodes: &[f64], w: &[f64], k: i32, m: i32) -> f64 {
    let p = 2 + k;
    let mut acc = Accumulator::new();
    for cell in cells_of(nodes, w) {
        acc.add(cell.moment(p, m));
    }
    acc.total()
}

/// Lowest admissible weight exponent: `r^(2+k)` stays polynomial.
pub const MIN_WEIGHT_EXPONENT: i32 = -2;
/// Highest admissible weight exponent (Gauss degree budget).
pub const MAX_WEIGHT_EXPONENT: i32 = 8;

/// `4 pi ∫_0^{r_max} r^(2+k) f(r) dr`: the radial reduction of a 3-d
/// integral of a spherically symmetric integrand with weight `|x|^k`.
///
/// The integrand is extended by its first value on `(0, r_min]` and is
/// zero beyond `r_max`. `k = 0` gives the plain integral (see [`crate::mass`]),
/// `k = -1` the Coulomb attraction weight, `k = 2` the second moment.
pub fn integrate_radial(p: &RadialProfile, k: i32) -> Result<f64> {
    if !(MIN_WEIGHT_EXPONENT..=MAX_WEIGHT_EXPONENT).contains(&k) {
        return Err(Error::DomainViolation(format!(
            "weight exponent k = {k} outside [{MIN_WEIGHT_EXPONENT}, {MAX_WEIGHT_EXPONENT}]"
        )));
    }
    p.require_in_domain()?;
    Ok(4.0 * PI * radial_moment(p.grid().nodes(), &p.w_values(), k, 3))
}

/// Same weighted integral with the node values entering through
/// `f^(m/3)` instead of `f`: `4 pi ∫ r^(2+k) f(r)^(m/3) dr`.
///
/// The functionals use `m = 2` (`f^(2/3)`), `m = 3` (`f`) and `m = 5`
/// (`f^(5/3)`); each of those powers of the interpolated cube root is a
/// cell polynomial, so the result is exact for the profile semantics.
pub fn integrate_radial_power(p: &RadialProfile, k: i32, m: i32) -> Result<f64> {
    if !(MIN_WEIGHT_EXPONENT..=MAX_WEIGHT_EXPONENT).contains(&k) || !(0..=5).contains(&m) {
        return Err(Error::DomainViolation(format!(
            "weight exponent k = {k} / power m = {m} outside the supported range"
        )));
    }
    p.require_in_domain()?;
    Ok(4.0 * PI * radial_moment(p.grid().nodes(), &p.w_values(), k, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridScheme};
    use crate::profile::{RadialProfile, Space};
    use std::f64::consts::PI;

    fn ball(n: usize) -> RadialProfile {
        RadialProfile::unit_ball_indicator(Space::Position, n, 2.0).unwrap()
    }

    #[test]
    fn zero_profile_integrates_to_zero() {
        let grid = make_grid(GridScheme::Log, 64, 1e-3, 10.0).unwrap();
        let p = RadialProfile::new(grid, vec![0.0; 64], Space::Position).unwrap();
        for k in [-2, -1, 0, 1, 2] {
            assert_eq!(integrate_radial(&p, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn unit_ball_mass_is_ball_volume() {
        let v = integrate_radial(&ball(128), 0).unwrap();
        let expect = 4.0 * PI / 3.0;
        assert!((v - expect).abs() <= 1e-9 * expect, "got {v}");
    }

    #[test]
    fn exponential_profile_matches_gamma_integral() {
        // 4 pi ∫ r^2 e^{-r} dr = 4 pi Gamma(3) = 8 pi
        let grid = make_grid(GridScheme::Log, 4096, 1e-6, 60.0).unwrap();
        let values: Vec<f64> = grid.nodes().iter().map(|r| (-r).exp()).collect();
        let p = RadialProfile::new(grid, values, Space::Position).unwrap();
        let v = integrate_radial(&p, 0).unwrap();
        let expect = 8.0 * PI;
        // cube-root interpolation error, converging at second order
        assert!((v - expect).abs() <= 2e-5 * expect, "got {v}");
    }

    #[test]
    fn attraction_weight_on_unit_ball() {
        // 4 pi ∫_0^1 r dr = 2 pi
        let v = integrate_radial(&ball(128), -1).unwrap();
        let expect = 2.0 * PI;
        assert!((v - expect).abs() <= 1e-9 * expect);
    }

    #[test]
    fn rejects_out_of_range_weight() {
        assert!(integrate_radial(&ball(32), -3).is_err());
        assert!(integrate_radial(&ball(32), 9).is_err());
    }

    #[test]
    fn homogeneous_scaling_is_exact() {
        let p = ball(64);
        let scaled = p.scaled(3.7).unwrap();
        let a = integrate_radial(&p, 0).unwrap();
        let b = integrate_radial(&scaled, 0).unwrap();
        assert!((b - 3.7 * a).abs() <= 1e-12 * b.abs());
    }

    #[test]
    fn additive_on_aligned_staircases() {
        // Linearity holds exactly when the summands share plateaus.
        let grid = make_grid(GridScheme::Log, 200, 1e-2, 4.0).unwrap();
        let cut = |r: f64, c: f64, lvl: f64| if r <= c { lvl } else { 0.0 };
        let va: Vec<f64> = grid.nodes().iter().map(|&r| cut(r, 1.0, 0.8)).collect();
        let vb: Vec<f64> = grid.nodes().iter().map(|&r| cut(r, 1.0, 1.7)).collect();
        let vs: Vec<f64> = va.iter().zip(&vb).map(|(a, b)| a + b).collect();
        let pa = RadialProfile::new(grid.clone(), va, Space::Position).unwrap();
        let pb = RadialProfile::new(grid.clone(), vb, Space::Position).unwrap();
        let ps = RadialProfile::new(grid, vs, Space::Position).unwrap();
        let (ia, ib, is_) = (
            integrate_radial(&pa, 0).unwrap(),
            integrate_radial(&pb, 0).unwrap(),
            integrate_radial(&ps, 0).unwrap(),
        );
        assert!((ia + ib - is_).abs() <= 1e-12 * is_.abs());
    }

    #[test]
    fn accumulation_order_contract() {
        let grid = make_grid(GridScheme::Log, 2048, 1e-4, 30.0).unwrap();
        let values: Vec<f64> = grid.nodes().iter().map(|r| (-r).exp()).collect();
        let w = cbrt_values(&values);
        let cells = cells_of(grid.nodes(), &w);
        let mut fwd = Accumulator::new();
        for c in &cells {
            fwd.add(c.moment(2, 3));
        }
        let mut rev = Accumulator::new();
        for c in cells.iter().rev() {
            rev.add(c.moment(2, 3));
        }
        let (a, b) = (fwd.total(), rev.total());
        assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn gauss_rule_is_exact_for_high_degree() {
        // ∫_1^2 r^10 dr against the closed form.
        let cell = Cell {
            r0: 1.0,
            r1: 2.0,
            w0: 1.0,
            w1: 1.0,
        };
        let got = cell.moment(10, 0);
        let expect = (2f64.powi(11) - 1.0) / 11.0;
        assert!((got - expect).abs() <= 1e-13 * expect);
    }
}

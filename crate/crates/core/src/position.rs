//! Position-space Thomas-Fermi functional, term by term, on spherically
//! symmetric densities.

use crate::config::AtomConfig;
use crate::energy::EnergyBreakdown;
use crate::profile::{RadialProfile, Space};
use crate::quad::{cells_of, radial_moment, Accumulator};
use crate::Result;
use std::f64::consts::PI;

/// `(3/5) gamma ∫ rho^(5/3) dx`.
pub fn kinetic_tf(rho: &RadialProfile, cfg: &AtomConfig) -> Result<f64> {
    rho.require_space(Space::Position)?;
    rho.require_in_domain()?;
    let w = rho.w_values();
    Ok(0.6 * cfg.gamma() * 4.0 * PI * radial_moment(rho.grid().nodes(), &w, 0, 5))
}

/// `Z ∫ rho(x) / |x| dx`, reported as the positive quantity that enters
/// the total with a minus sign.
pub fn attraction_tf(rho: &RadialProfile, cfg: &AtomConfig) -> Result<f64> {
    rho.require_space(Space::Position)?;
    rho.require_in_domain()?;
    let w = rho.w_values();
    Ok(cfg.z() * 4.0 * PI * radial_moment(rho.grid().nodes(), &w, -1, 3))
}

/// Electrostatic self-energy `D[rho]`, reduced by Newton's theorem to a
/// single cumulative pass:
/// `D = (4 pi)^2 ∫ r rho(r) M(r) dr` with `M(r) = ∫_0^r s^2 rho(s) ds`.
pub fn repulsion_tf(rho: &RadialProfile) -> Result<f64> {
    rho.require_space(Space::Position)?;
    rho.require_in_domain()?;
    let w = rho.w_values();
    let cells = cells_of(rho.grid().nodes(), &w);
    let mut inner = Accumulator::new(); // M at the running cell's left edge
    let mut outer = Accumulator::new();
    for cell in &cells {
        let m0 = inner.total();
        // ∫_cell r w^3(r) [m0 + ∫_{r0}^{r} s^2 w^3(s) ds] dr, all polynomial
        let contribution = cell.gauss(|r| {
            let partial = Cellpartial { cell, upto: r }.moment23();
            r * cell.w_at(r).powi(3) * (m0 + partial)
        });
        outer.add(contribution);
        inner.add(cell.moment(2, 3));
    }
    Ok((4.0 * PI) * (4.0 * PI) * outer.total())
}

/// `∫_{r0}^{upto} s^2 w(s)^3 ds` inside one cell.
struct Cellpartial<'a> {
    cell: &'a crate::quad::Cell,
    upto: f64,
}

impl Cellpartial<'_> {
    fn moment23(&self) -> f64 {
        let sub = crate::quad::Cell {
            r0: self.cell.r0,
            r1: self.upto,
            w0: self.cell.w0,
            w1: self.cell.w_at(self.upto),
        };
        if sub.width() <= 0.0 {
            return 0.0;
        }
        sub.moment(2, 3)
    }
}

/// Assembles the position-space functional
/// `E_TF = K(rho) - A(rho) + R(rho)`.
pub fn energy_tf(rho: &RadialProfile, cfg: &AtomConfig) -> Result<EnergyBreakdown> {
    Ok(EnergyBreakdown::new(
        kinetic_tf(rho, cfg)?,
        attraction_tf(rho, cfg)?,
        repulsion_tf(rho)?,
    ))
}

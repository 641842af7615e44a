//! Momentum-space Thomas-Fermi functional with two independent routes for
//! the repulsion term.
//!
//! The repulsion integrand couples two momenta through the pointwise
//! extremes of `tau`. On each pair of grid cells the integrand is
//! polynomial in the interpolated cube roots, split along the curve where
//! the two values tie, so the double integral is evaluated exactly:
//! pairs whose value ranges are disjoint reduce to products of one-cell
//! moments, overlapping pairs are clipped along the tie line.

use crate::config::AtomConfig;
use crate::energy::{EnergyBreakdown, RepulsionPath};
use crate::grid::RadialGrid;
use crate::profile::{RadialProfile, Space};
use crate::quad::{cells_of, radial_moment, Accumulator, Cell};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Pointwise extremes of the momentum density at two arguments:
/// `tau_< = min`, `tau_> = max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseExtremes {
    pub tau_min: f64,
    pub tau_max: f64,
}

impl PairwiseExtremes {
    pub fn of(a: f64, b: f64) -> Self {
        if a <= b {
            Self {
                tau_min: a,
                tau_max: b,
            }
        } else {
            Self {
                tau_min: b,
                tau_max: a,
            }
        }
    }

    /// The repulsion integrand `tau_< tau_>^(2/3) - tau_<^(5/3) / 5`.
    pub fn repulsion_bracket(&self) -> f64 {
        let lo = self.tau_min.cbrt();
        let hi = self.tau_max.cbrt();
        bracket_w(lo, hi)
    }
}

/// Same bracket written in the cube-root variables, where it is polynomial.
#[inline]
fn bracket_w(wa: f64, wb: f64) -> f64 {
    let (lo, hi) = if wa <= wb { (wa, wb) } else { (wb, wa) };
    lo * lo * lo * hi * hi - 0.2 * lo.powi(5)
}

/// The kinetic term `∫ xi^2 tau(xi) d xi`.
pub fn kinetic_m(tau: &RadialProfile) -> Result<f64> {
    tau.require_space(Space::Momentum)?;
    tau.require_in_domain()?;
    let w = tau.w_values();
    Ok(4.0 * PI * radial_moment(tau.grid().nodes(), &w, 2, 3))
}

/// The external attraction `(3/2) gamma^(-1/2) Z ∫ tau^(2/3) d xi`.
pub fn attraction_m(tau: &RadialProfile, cfg: &AtomConfig) -> Result<f64> {
    tau.require_space(Space::Momentum)?;
    tau.require_in_domain()?;
    let w = tau.w_values();
    Ok(1.5 * cfg.gamma().powf(-0.5) * cfg.z() * 4.0 * PI
        * radial_moment(tau.grid().nodes(), &w, 0, 2))
}

/// Per-cell data for the pairwise repulsion sums.
struct CellMoments {
    cell: Cell,
    /// `∫ r^2 w^m dr` over the cell for m = 0, 2, 3, 5.
    m0: f64,
    m2: f64,
    m3: f64,
    m5: f64,
    lo: f64,
    hi: f64,
}

impl CellMoments {
    fn of(cell: Cell) -> Self {
        let (lo, hi) = if cell.w0 <= cell.w1 {
            (cell.w0, cell.w1)
        } else {
            (cell.w1, cell.w0)
        };
        Self {
            m0: cell.moment(2, 0),
            m2: cell.moment(2, 2),
            m3: cell.moment(2, 3),
            m5: cell.moment(2, 5),
            lo,
            hi,
            cell,
        }
    }

    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

/// `∫_{sub} v^2 w^m dv` for a sub-interval of a cell.
fn sub_moment(cell: &Cell, a: f64, b: f64, m: i32) -> f64 {
    if b <= a {
        return 0.0;
    }
    let sub = Cell {
        r0: a,
        r1: b,
        w0: cell.w_at(a),
        w1: cell.w_at(b),
    };
    sub.moment(2, m)
}

/// `∫_{cell_b} v^2 bracket(p, w_b(v)) dv` for a fixed first value `p`,
/// exact: the cell is split where `w_b` crosses `p`.
fn inner_against(b: &CellMoments, p: f64) -> f64 {
    let low = |m3: f64, m5: f64| m3 * p * p - 0.2 * m5; // w_b <= p side
    let high = |m2: f64, m0: f64| m2 * p.powi(3) - 0.2 * m0 * p.powi(5); // w_b > p side
    if b.hi <= p {
        return low(b.m3, b.m5);
    }
    if b.lo >= p {
        return high(b.m2, b.m0);
    }
    // w_b crosses p strictly inside the cell
    let c = &b.cell;
    let vc = c.r0 + (c.r1 - c.r0) * (p - c.w0) / (c.w1 - c.w0);
    let vc = vc.clamp(c.r0, c.r1);
    if c.w0 <= c.w1 {
        low(sub_moment(c, c.r0, vc, 3), sub_moment(c, c.r0, vc, 5))
            + high(sub_moment(c, vc, c.r1, 2), sub_moment(c, vc, c.r1, 0))
    } else {
        low(sub_moment(c, vc, c.r1, 3), sub_moment(c, vc, c.r1, 5))
            + high(sub_moment(c, c.r0, vc, 2), sub_moment(c, c.r0, vc, 0))
    }
}

/// `∬_{a x b} u^2 v^2 bracket(w_a(u), w_b(v)) du dv` for two distinct
/// cells whose value ranges overlap. The u-range is segmented where the
/// tie line leaves cell b's value range, so each Gauss pass integrates a
/// polynomial.
fn general_pair(a: &CellMoments, b: &CellMoments) -> f64 {
    let ca = &a.cell;
    let mut cuts = vec![ca.r0, ca.r1];
    if ca.w1 != ca.w0 {
        for target in [b.lo, b.hi] {
            let u = ca.r0 + (ca.r1 - ca.r0) * (target - ca.w0) / (ca.w1 - ca.w0);
            if u > ca.r0 && u < ca.r1 {
                cuts.push(u);
            }
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut total = 0.0;
    for seg in cuts.windows(2) {
        let (u0, u1) = (seg[0], seg[1]);
        if u1 <= u0 {
            continue;
        }
        let piece = Cell {
            r0: u0,
            r1: u1,
            w0: ca.w_at(u0),
            w1: ca.w_at(u1),
        };
        total += piece.gauss(|u| u * u * inner_against(b, piece.w_at(u)));
    }
    total
}

/// `∬_{cell x cell} u^2 v^2 bracket(w(u), w(v)) du dv` over one cell.
fn diagonal(a: &CellMoments) -> f64 {
    let c = &a.cell;
    if c.w0 == c.w1 {
        // constant cell: bracket = (4/5) w^5
        return 0.8 * c.w0.powi(5) * a.m0 * a.m0;
    }
    if c.w0 > c.w1 {
        // decreasing: for u < v the minimum sits at v
        let first = c.gauss(|v| {
            v * v * c.w_at(v).powi(3) * sub_moment(c, c.r0, v, 2)
        });
        let second = c.gauss(|v| {
            v * v * c.w_at(v).powi(5) * sub_moment(c, c.r0, v, 0)
        });
        2.0 * first - 0.4 * second
    } else {
        // increasing: for u < v the minimum sits at u
        let first = c.gauss(|v| {
            v * v * c.w_at(v).powi(2) * sub_moment(c, c.r0, v, 3)
        });
        let second = c.gauss(|v| v * v * sub_moment(c, c.r0, v, 5));
        2.0 * first - 0.4 * second
    }
}

fn pair_sum(cms: &[CellMoments]) -> f64 {
    let mut acc = Accumulator::new();
    for (i, a) in cms.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        acc.add(diagonal(a));
        for b in cms.iter().skip(i + 1) {
            if b.is_zero() {
                continue;
            }
            let unordered = if a.lo >= b.hi {
                // every value of a dominates b: minimum from b
                a.m2 * b.m3 - 0.2 * a.m0 * b.m5
            } else if b.lo >= a.hi {
                b.m2 * a.m3 - 0.2 * b.m0 * a.m5
            } else {
                general_pair(a, b)
            };
            acc.add(2.0 * unordered);
        }
    }
    acc.total()
}

/// Pairwise route for the momentum repulsion:
/// `(3/4) gamma^(-1/2) (4 pi)^2 ∬ u^2 v^2 [tau_< tau_>^(2/3)
///  - tau_<^(5/3)/5] du dv`.
pub fn repulsion_m_direct(tau: &RadialProfile, cfg: &AtomConfig) -> Result<f64> {
    tau.require_space(Space::Momentum)?;
    tau.require_in_domain()?;
    let w = tau.w_values();
    let cms: Vec<CellMoments> = cells_of(tau.grid().nodes(), &w)
        .into_iter()
        .map(CellMoments::of)
        .collect();
    Ok(0.75 * cfg.gamma().powf(-0.5) * (4.0 * PI) * (4.0 * PI) * pair_sum(&cms))
}

/// Layer-cake route: `(9/8) gamma^(-1/2) ∫_0^inf P(t)^2 dt` with
/// `P(t) = ∫ [tau^(2/3) - t^2]_+ d xi`.
///
/// `P` is piecewise polynomial with kinks exactly at the node values of
/// `tau^(1/3)`, so the level integral runs piece by piece over that grid
/// and is exact. The overall constant is pinned by requiring agreement
/// with the pairwise route on the uniform ball (see the tests).
pub fn repulsion_m_layercake(tau: &RadialProfile, cfg: &AtomConfig) -> Result<f64> {
    tau.require_space(Space::Momentum)?;
    tau.require_in_domain()?;
    let w = tau.w_values();
    let cells = cells_of(tau.grid().nodes(), &w);

    let mut levels: Vec<f64> = w.iter().copied().filter(|x| *x > 0.0).collect();
    levels.push(0.0);
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs());
    if levels.len() < 2 {
        return Ok(0.0);
    }

    let profile_p = |t: f64| -> f64 {
        let mut acc = Accumulator::new();
        for cell in &cells {
            let (lo, hi) = if cell.w0 <= cell.w1 {
                (cell.w0, cell.w1)
            } else {
                (cell.w1, cell.w0)
            };
            if hi <= t {
                continue;
            }
            let contribution = if lo >= t {
                cell.gauss(|r| {
                    let wv = cell.w_at(r);
                    r * r * (wv * wv - t * t)
                })
            } else {
                let rc = cell.r0
                    + (cell.r1 - cell.r0) * (t - cell.w0) / (cell.w1 - cell.w0);
                let rc = rc.clamp(cell.r0, cell.r1);
                let (a, b) = if cell.w0 <= cell.w1 {
                    (rc, cell.r1)
                } else {
                    (cell.r0, rc)
                };
                let sub = Cell {
                    r0: a,
                    r1: b,
                    w0: cell.w_at(a),
                    w1: cell.w_at(b),
                };
                if sub.width() <= 0.0 {
                    0.0
                } else {
                    sub.gauss(|r| {
                        let wv = sub.w_at(r);
                        r * r * (wv * wv - t * t)
                    })
                }
            };
            acc.add(contribution);
        }
        4.0 * PI * acc.total()
    };

    let mut level_integral = Accumulator::new();
    for piece in levels.windows(2) {
        let seg = Cell {
            r0: piece[0],
            r1: piece[1],
            w0: 0.0,
            w1: 0.0,
        };
        level_integral.add(seg.gauss(|t| {
            let p = profile_p(t);
            p * p
        }));
    }
    Ok(1.125 * cfg.gamma().powf(-0.5) * level_integral.total())
}

/// Assembles `E_mTF = K_m - A_m + R_m`, repulsion from the pairwise route.
pub fn energy_mtf(tau: &RadialProfile, cfg: &AtomConfig) -> Result<EnergyBreakdown> {
    energy_mtf_with(tau, cfg, RepulsionPath::Direct)
}

/// Same with an explicit repulsion route, for reports that compare them.
pub fn energy_mtf_with(
    tau: &RadialProfile,
    cfg: &AtomConfig,
    path: RepulsionPath,
) -> Result<EnergyBreakdown> {
    let repulsion = match path {
        RepulsionPath::Direct => repulsion_m_direct(tau, cfg)?,
        RepulsionPath::Layercake => repulsion_m_layercake(tau, cfg)?,
    };
    Ok(EnergyBreakdown::new(
        kinetic_m(tau)?,
        attraction_m(tau, cfg)?,
        repulsion,
    ))
}

/// The convexifying substitution `sigma = tau^(2/3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutedProfile {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl SubstitutedProfile {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Profile(format!(
                "{} sigma values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Profile(
                "sigma values must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    /// `sigma_i = tau_i^(2/3)`, computed as a squared cube root.
    pub fn from_tau(tau: &RadialProfile) -> Result<Self> {
        tau.require_space(Space::Momentum)?;
        tau.require_in_domain()?;
        let values = tau
            .values()
            .iter()
            .map(|t| {
                let w = t.cbrt();
                w * w
            })
            .collect();
        Self::new(tau.grid().clone(), values)
    }

    /// Back substitution `tau = sigma^(3/2)`.
    pub fn to_tau(&self) -> Result<RadialProfile> {
        let values = self
            .values
            .iter()
            .map(|s| {
                let w = s.sqrt();
                w * w * w
            })
            .collect();
        RadialProfile::new(self.grid.clone(), values, Space::Momentum)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Nodewise midpoint with another substituted profile on the same grid.
    pub fn midpoint(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Profile(
                "midpoint requires profiles on the same grid".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        Self::new(self.grid.clone(), values)
    }
}

/// `E_s(sigma) = E_mTF(sigma^(3/2))`, the strictly convex form.
pub fn energy_s(sigma: &SubstitutedProfile, cfg: &AtomConfig) -> Result<f64> {
    Ok(energy_mtf(&sigma.to_tau()?, cfg)?.total)
}

//! Decreasing rearrangement of radial profiles.
//!
//! Layer-cake re-stacking on the cumulative volume coordinate
//! `v = (4 pi / 3) r^3`: each quadrature cell carries its 3-volume and its
//! volume-averaged density; cells are sorted by density and stacked back
//! from the origin. Exact (up to jump-pair width) for piecewise-constant
//! profiles, which is what the randomized corpora use; for smooth profiles
//! it is first-order in the cell size.

use crate::profile::{RadialProfile, JUMP_EPS};
use crate::quad::{cells_of, Accumulator};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Returns the radially decreasing profile equimeasurable (w.r.t. the
/// 3-volume `4 pi r^2 dr`) with the input. Nonincreasing inputs come back
/// unchanged, making the operation idempotent.
pub fn rearrange_decreasing(p: &RadialProfile) -> Result<RadialProfile> {
    p.require_in_domain()?;
    if p.is_nonincreasing() {
        return Ok(p.clone());
    }

    let w = p.w_values();
    // (volume-averaged density, cell volume), extension cell included
    let mut items: Vec<(f64, f64)> = cells_of(p.grid().nodes(), &w)
        .iter()
        .map(|c| {
            let vol = 4.0 * PI / 3.0 * (c.r1.powi(3) - c.r0.powi(3));
            let integral = 4.0 * PI * c.moment(2, 3);
            (integral / vol, vol)
        })
        .collect();
    items.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    // merge equal levels, drop the zero tail
    let mut plateaus: Vec<(f64, f64)> = Vec::with_capacity(items.len());
    for (level, vol) in items {
        if level <= 0.0 {
            continue;
        }
        match plateaus.last_mut() {
            Some((l, v)) if *l == level => *v += vol,
            _ => plateaus.push((level, vol)),
        }
    }
    if plateaus.is_empty() {
        return Err(Error::Profile(
            "cannot rearrange a profile with no positive mass".into(),
        ));
    }

    // stack back from the origin
    let mut breaks = Vec::with_capacity(plateaus.len());
    let mut levels = Vec::with_capacity(plateaus.len());
    let mut cumulative = Accumulator::new();
    for (level, vol) in &plateaus {
        cumulative.add(*vol);
        let radius = (3.0 * cumulative.total() / (4.0 * PI)).cbrt();
        if let Some(&prev) = breaks.last() {
            if radius <= prev * (1.0 + 4.0 * JUMP_EPS) {
                // volume too small to carve its own shell: absorb
                continue;
            }
        }
        breaks.push(radius);
        levels.push(*level);
    }

    let support = *breaks.last().unwrap();
    let r_min = p.grid().r_min().min(breaks[0] * 0.5);
    let r_max = support * 1.05;
    RadialProfile::piecewise_constant(p.space(), &breaks, &levels, p.grid().len(), r_min, r_max)
}

/// 3-volume of the superlevel set `{ f > t }` under the profile semantics.
pub fn superlevel_volume(p: &RadialProfile, t: f64) -> f64 {
    let c = t.cbrt();
    let w = p.w_values();
    let mut acc = Accumulator::new();
    for cell in cells_of(p.grid().nodes(), &w) {
        let (lo, hi) = if cell.w0 <= cell.w1 {
            (cell.w0, cell.w1)
        } else {
            (cell.w1, cell.w0)
        };
        let part = if lo > c {
            // whole cell above the level
            cell.r1.powi(3) - cell.r0.powi(3)
        } else if hi <= c {
            0.0
        } else {
            // linear w crosses the level once inside the cell
            let rc = cell.r0 + (cell.r1 - cell.r0) * (c - cell.w0) / (cell.w1 - cell.w0);
            if cell.w0 > cell.w1 {
                rc.powi(3) - cell.r0.powi(3)
            } else {
                cell.r1.powi(3) - rc.powi(3)
            }
        };
        acc.add(part);
    }
    4.0 * PI / 3.0 * acc.total()
}

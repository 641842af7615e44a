//! Level-set maps between position and momentum densities.
//!
//! Both directions are the same construction: read off the level function
//! `gamma^(1/2) f^(1/3)`, invert it by the rightmost-crossing (sup)
//! convention, and cube the inverse. The output grid is the set of level
//! breakpoints, the images of the input nodes, so the image profile is
//! captured exactly in the interpolant semantics: masses and functional
//! terms then transform identically, not merely up to quadrature error.
//! Jumps of the inverse (one per plateau of the input) get a companion
//! node a relative 1e-10 above the level, mirroring how piecewise-constant
//! profiles carry their jumps.

use crate::config::AtomConfig;
use crate::grid::{GridScheme, RadialGrid, MIN_NODES};
use crate::profile::{RadialProfile, Space, JUMP_EPS};
use crate::quad::{radial_moment, Accumulator, Cell};
use crate::{Error, Result};
use std::f64::consts::PI;

/// The Fermi radius `r(s) = sup { |y| : gamma^(1/2) f(y)^(1/3) >= s }` of
/// a nonincreasing profile, prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct FermiRadiusCurve {
    radii: Vec<f64>,
    /// `gamma^(1/2) f^(1/3)` at the nodes, clamped nonincreasing.
    levels: Vec<f64>,
}

impl FermiRadiusCurve {
    pub fn new(source: &RadialProfile, cfg: &AtomConfig) -> Result<Self> {
        source.require_in_domain()?;
        if !source.is_nonincreasing() {
            return Err(Error::NotMonotone);
        }
        let sqrt_gamma = cfg.gamma().sqrt();
        let mut levels: Vec<f64> = source
            .values()
            .iter()
            .map(|v| sqrt_gamma * v.cbrt())
            .collect();
        // squash sub-tolerance float wiggles so the inverse is well defined
        for i in 1..levels.len() {
            if levels[i] > levels[i - 1] {
                levels[i] = levels[i - 1];
            }
        }
        Ok(Self {
            radii: source.grid().nodes().to_vec(),
            levels,
        })
    }

    /// Largest radius where the level function still reaches `s`; the sup
    /// of the empty set is 0. `s = 0` returns the support radius.
    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return self.support_radius();
        }
        if s > self.levels[0] {
            return 0.0;
        }
        // first index whose level drops below s; the prefix satisfies >= s
        let idx = self.levels.partition_point(|l| *l >= s);
        if idx == self.levels.len() {
            return *self.radii.last().unwrap();
        }
        let (r0, r1) = (self.radii[idx - 1], self.radii[idx]);
        let (l0, l1) = (self.levels[idx - 1], self.levels[idx]);
        r0 + (r1 - r0) * (l0 - s) / (l0 - l1)
    }

    /// `r(0+)`: the edge of the numerical support.
    pub fn support_radius(&self) -> f64 {
        match self.levels.iter().rposition(|l| *l > 0.0) {
            None => 0.0,
            Some(i) if i + 1 == self.levels.len() => *self.radii.last().unwrap(),
            // the ramp to the first zero node hits zero exactly there
            Some(i) => self.radii[i + 1],
        }
    }

    pub fn max_level(&self) -> f64 {
        self.levels[0]
    }

    pub(crate) fn levels(&self) -> &[f64] {
        &self.levels
    }
}

/// The Fermi radius of a decreasing position density at one level `s`.
pub fn fermi_radius(rho: &RadialProfile, cfg: &AtomConfig, s: f64) -> Result<f64> {
    rho.require_space(Space::Position)?;
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::DomainViolation(format!(
            "level s must be nonnegative, got {s}"
        )));
    }
    Ok(FermiRadiusCurve::new(rho, cfg)?.eval(s))
}

/// Shared engine for both directions: cube of the rightmost-crossing
/// inverse of the level function, times `q / (6 pi^2) = gamma^(-3/2)`.
fn level_set_image(p: &RadialProfile, cfg: &AtomConfig) -> Result<RadialProfile> {
    let out_space = p.space().flipped();
    let curve = FermiRadiusCurve::new(p, cfg)?;
    // q/(2 pi)^3 * (4 pi / 3) = q / (6 pi^2), which is gamma^(-3/2)
    let kappa = cfg.q() / (6.0 * PI * PI);

    let levels = curve.levels();
    if curve.max_level() <= 0.0 {
        return RadialProfile::zero(p.grid().clone(), out_space);
    }

    // distinct positive levels, ascending, with plateau multiplicities
    let mut breaks: Vec<(f64, bool)> = Vec::with_capacity(levels.len());
    for &l in levels.iter().rev() {
        if l <= 0.0 {
            continue;
        }
        match breaks.last_mut() {
            Some((prev, repeated)) if l <= *prev * (1.0 + 1e-14) => *repeated = true,
            _ => breaks.push((l, false)),
        }
    }
    let top = breaks.last().unwrap().0;

    let mut nodes: Vec<f64> = Vec::with_capacity(2 * breaks.len() + MIN_NODES);
    for (i, &(level, repeated)) in breaks.iter().enumerate() {
        nodes.push(level);
        // a jump of the inverse sits at every plateau level and at the top
        let is_top = i + 1 == breaks.len();
        if repeated || is_top {
            let companion = level * (1.0 + JUMP_EPS);
            let clear = match breaks.get(i + 1) {
                Some(&(next, _)) => companion < next * (1.0 - JUMP_EPS),
                None => true,
            };
            if clear {
                nodes.push(companion);
            }
        }
    }
    // anchor node near zero: below the lowest level the inverse is one
    // linear ramp (or constant), so a single node pins it and leaves the
    // constant extension only a negligible sliver
    let hi = top * (1.0 + JUMP_EPS);
    let anchor = breaks[0].0 * 1e-6;
    nodes.push(anchor);
    // log fill so sparse staircases still make a valid, well-covered grid
    let fill_n = p.grid().len().max(MIN_NODES);
    for i in 0..fill_n {
        let t = (i as f64 + 0.5) / fill_n as f64;
        nodes.push((anchor.ln() + (hi.ln() - anchor.ln()) * t).exp());
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup_by(|a, b| *a - *b <= 1e-14 * *b);

    let mut values: Vec<f64> = nodes
        .iter()
        .map(|&s| {
            let r = curve.eval(s);
            kappa * r * r * r
        })
        .collect();
    // the inverse is monotone; squash rounding wiggles then assert
    for i in 1..values.len() {
        if values[i] > values[i - 1] {
            values[i] = values[i - 1];
        }
    }
    let image = RadialProfile::new(
        RadialGrid::from_nodes(nodes, GridScheme::Custom)?,
        values,
        out_space,
    )?;
    assert!(
        image.is_nonincreasing() && image.values().iter().all(|v| *v >= 0.0),
        "level-set image must be nonnegative and nonincreasing"
    );
    Ok(image)
}

/// Position to momentum: `tau(xi) = gamma^(-3/2) r(|xi|)^3` with `r` the
/// Fermi radius of `rho`. Mass-preserving on decreasing densities.
pub fn transform_t(rho: &RadialProfile, cfg: &AtomConfig) -> Result<RadialProfile> {
    rho.require_space(Space::Position)?;
    level_set_image(rho, cfg)
}

/// Momentum to position: `rho(x) = q/(2 pi)^3 * Vol{ xi : |x| <
/// gamma^(1/2) tau(xi)^(1/3) }`, evaluated through the radial level set
/// (so the input must be decreasing; rearrange first otherwise).
pub fn transform_s(tau: &RadialProfile, cfg: &AtomConfig) -> Result<RadialProfile> {
    tau.require_space(Space::Momentum)?;
    level_set_image(tau, cfg)
}

/// `∫ |a - b|` over the common semantic extension of both profiles,
/// split at grid nodes and sign crossings so each piece is polynomial.
pub fn l1_distance(a: &RadialProfile, b: &RadialProfile) -> Result<f64> {
    if a.space() != b.space() {
        return Err(Error::SpaceMismatch {
            expected: a.space(),
            got: b.space(),
        });
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(a.grid().len() + b.grid().len() + 1);
    cuts.push(0.0);
    cuts.extend_from_slice(a.grid().nodes());
    cuts.extend_from_slice(b.grid().nodes());
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| *x - *y <= f64::EPSILON * *y);

    let mut acc = Accumulator::new();
    for pair in cuts.windows(2) {
        let (r0, r1) = (pair[0], pair[1]);
        if r1 <= r0 {
            continue;
        }
        let (wa0, wa1) = (a.w_at(r0.max(f64::MIN_POSITIVE)), a.w_at(r1));
        let (wb0, wb1) = (b.w_at(r0.max(f64::MIN_POSITIVE)), b.w_at(r1));
        // both cube roots are linear on this piece; split where they tie
        let (d0, d1) = (wa0 - wb0, wa1 - wb1);
        let mut stops = vec![r0, r1];
        if d0 * d1 < 0.0 {
            stops.insert(1, r0 + (r1 - r0) * d0 / (d0 - d1));
        }
        for sub in stops.windows(2) {
            let cell_a = Cell {
                r0: sub[0],
                r1: sub[1],
                w0: a.w_at(sub[0].max(f64::MIN_POSITIVE)),
                w1: a.w_at(sub[1]),
            };
            let cell_b = Cell {
                r0: sub[0],
                r1: sub[1],
                w0: b.w_at(sub[0].max(f64::MIN_POSITIVE)),
                w1: b.w_at(sub[1]),
            };
            if cell_a.width() <= 0.0 {
                continue;
            }
            let piece = cell_a.gauss(|r| {
                let va = cell_a.w_at(r).powi(3);
                let vb = cell_b.w_at(r).powi(3);
                r * r * (va - vb)
            });
            acc.add(piece.abs());
        }
    }
    Ok(4.0 * PI * acc.total())
}

/// Relative L1 distance between `p` and its round trip through both
/// transforms (`S(T(p))` for position input, `T(S(p))` for momentum).
pub fn round_trip_residual(p: &RadialProfile, cfg: &AtomConfig) -> Result<f64> {
    let image = level_set_image(p, cfg)?;
    let back = level_set_image(&image, cfg)?;
    let dist = l1_distance(p, &back)?;
    let norm = 4.0 * PI * radial_moment(p.grid().nodes(), &p.w_values(), 0, 3);
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(dist / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::momentum::{attraction_m, energy_mtf, kinetic_m, repulsion_m_direct};
    use crate::position::{attraction_tf, energy_tf, kinetic_tf, repulsion_tf};
    use crate::profile::mass;
    use crate::rng::SplitMix64;

    fn gauge() -> AtomConfig {
        AtomConfig::test_gauge(1.0, 1.0).unwrap()
    }

    fn exp_profile(space: Space, n: usize) -> RadialProfile {
        let grid = make_grid(GridScheme::Log, n, 1e-3, 40.0).unwrap();
        let values: Vec<f64> = grid.nodes().iter().map(|r| (-r).exp()).collect();
        RadialProfile::new(grid, values, space).unwrap()
    }

    fn staircase(space: Space, seed: u64) -> RadialProfile {
        let mut rng = SplitMix64::new(seed);
        let k = 3 + rng.below(4);
        let mut breaks: Vec<f64> = (0..k).map(|_| rng.uniform(0.3, 6.0)).collect();
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-2);
        let mut levels: Vec<f64> = (0..breaks.len()).map(|_| rng.uniform(0.05, 2.0)).collect();
        levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
        RadialProfile::piecewise_constant(space, &breaks, &levels, 128, 0.01, 8.0).unwrap()
    }

    #[test]
    fn fermi_radius_of_the_ball() {
        let cfg = gauge();
        let ball = RadialProfile::unit_ball_indicator(Space::Position, 128, 2.0).unwrap();
        let r = fermi_radius(&ball, &cfg, 0.5).unwrap();
        assert!((r - 1.0).abs() <= 1e-9, "got {r}");
        assert_eq!(fermi_radius(&ball, &cfg, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn fermi_radius_inverts_an_exponential() {
        let cfg = gauge();
        let rho = exp_profile(Space::Position, 2048);
        // gamma^(1/2) rho^(1/3) = e^(-r/3) = s at r = -3 ln s
        let r = fermi_radius(&rho, &cfg, (-1.0f64 / 3.0).exp()).unwrap();
        assert!((r - 1.0).abs() <= 1e-5, "got {r}");
    }

    #[test]
    fn fermi_radius_rejects_non_monotone() {
        let cfg = gauge();
        let grid = make_grid(GridScheme::Log, 32, 0.1, 10.0).unwrap();
        let mut values = vec![0.0; 32];
        values[10] = 1.0; // bump
        let p = RadialProfile::new(grid, values, Space::Position).unwrap();
        assert!(matches!(
            fermi_radius(&p, &cfg, 0.5),
            Err(Error::NotMonotone)
        ));
    }

    #[test]
    fn unit_ball_is_a_fixed_point_of_t() {
        let cfg = gauge();
        let ball = RadialProfile::unit_ball_indicator(Space::Position, 128, 2.0).unwrap();
        let tau = transform_t(&ball, &cfg).unwrap();
        assert_eq!(tau.space(), Space::Momentum);
        assert!((tau.value_at(0.5) - 1.0).abs() <= 1e-8);
        assert!((tau.value_at(0.99) - 1.0).abs() <= 1e-7);
        assert!(tau.value_at(1.1) <= 1e-12);
        let (m0, m1) = (mass(&ball).unwrap(), mass(&tau).unwrap());
        // exact up to the jump-pair width of the indicator fixture
        assert!((m0 - m1).abs() <= 1e-9 * m0);
    }

    #[test]
    fn unit_ball_is_a_fixed_point_of_s() {
        let cfg = gauge();
        let ball = RadialProfile::unit_ball_indicator(Space::Momentum, 128, 2.0).unwrap();
        let rho = transform_s(&ball, &cfg).unwrap();
        assert_eq!(rho.space(), Space::Position);
        assert!((rho.value_at(0.5) - 1.0).abs() <= 1e-8);
        assert!(rho.value_at(1.1) <= 1e-12);
    }

    #[test]
    fn prefactor_identity_holds_off_gauge() {
        // q/(2 pi)^3 * (4 pi/3) = gamma^(-3/2) for any q
        for q in [1.0, 2.0, 5.5] {
            let cfg = AtomConfig::new(1.0, 1.0, q).unwrap();
            let kappa = q / (6.0 * PI * PI);
            let gm = cfg.gamma().powf(-1.5);
            assert!((kappa - gm).abs() <= 1e-13 * gm, "q = {q}");
        }
    }

    #[test]
    fn transform_t_of_exponential_matches_closed_form() {
        let cfg = gauge();
        let rho = exp_profile(Space::Position, 2048);
        let tau = transform_t(&rho, &cfg).unwrap();
        // tau(xi) = (-3 ln xi)^3 for xi < 1
        for xi in [0.3f64, 0.5, 0.8] {
            let expect = (-3.0 * xi.ln()).powi(3);
            let got = tau.value_at(xi);
            assert!(
                (got - expect).abs() <= 2e-4 * expect,
                "xi {xi}: {got} vs {expect}"
            );
        }
        // isometry is exact for the grid semantics, 8 pi in the continuum
        let (m_rho, m_tau) = (mass(&rho).unwrap(), mass(&tau).unwrap());
        assert!((m_rho - m_tau).abs() <= 1e-12 * m_rho);
        assert!((m_tau - 8.0 * PI).abs() <= 3e-5 * 8.0 * PI);
    }

    #[test]
    fn transform_s_of_exponential_mirrors_the_closed_form() {
        let cfg = gauge();
        let tau = exp_profile(Space::Momentum, 2048);
        let rho = transform_s(&tau, &cfg).unwrap();
        // rho(x) = (-3 ln x)^3 for |x| < 1
        for x in [0.3f64, 0.5, 0.8] {
            let expect = (-3.0 * x.ln()).powi(3);
            let got = rho.value_at(x);
            assert!(
                (got - expect).abs() <= 2e-4 * expect,
                "x {x}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn transforms_reject_non_monotone_profiles() {
        let cfg = gauge();
        let grid = make_grid(GridScheme::Log, 32, 0.1, 10.0).unwrap();
        let mut values = vec![0.0; 32];
        values[10] = 1.0;
        let bumpy = RadialProfile::new(grid, values, Space::Momentum).unwrap();
        let err = transform_s(&bumpy, &cfg).unwrap_err();
        assert!(err.to_string().contains("rearrange first"));
    }

    #[test]
    fn zero_maps_to_zero() {
        let cfg = gauge();
        let grid = make_grid(GridScheme::Log, 32, 0.01, 2.0).unwrap();
        let z = RadialProfile::zero(grid, Space::Position).unwrap();
        let tau = transform_t(&z, &cfg).unwrap();
        assert!(tau.values().iter().all(|v| *v == 0.0));
        assert_eq!(round_trip_residual(&z, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn isometry_on_staircases_both_directions() {
        let cfg = gauge();
        for seed in 0..10 {
            let rho = staircase(Space::Position, seed);
            let tau = transform_t(&rho, &cfg).unwrap();
            let (m0, m1) = (mass(&rho).unwrap(), mass(&tau).unwrap());
            assert!((m0 - m1).abs() <= 2e-9 * m0, "T seed {seed}: {m0} {m1}");

            let tau_in = staircase(Space::Momentum, seed + 1000);
            let rho_out = transform_s(&tau_in, &cfg).unwrap();
            let (m2, m3) = (mass(&tau_in).unwrap(), mass(&rho_out).unwrap());
            assert!((m2 - m3).abs() <= 2e-9 * m2, "S seed {seed}: {m2} {m3}");
        }
    }

    #[test]
    fn term_by_term_duality_under_s() {
        let cfg = AtomConfig::test_gauge(1.7, 1.0).unwrap();
        for seed in 0..6 {
            let tau = staircase(Space::Momentum, 40 + seed);
            let rho = transform_s(&tau, &cfg).unwrap();
            let pairs = [
                (kinetic_m(&tau).unwrap(), kinetic_tf(&rho, &cfg).unwrap()),
                (
                    attraction_m(&tau, &cfg).unwrap(),
                    attraction_tf(&rho, &cfg).unwrap(),
                ),
                (
                    repulsion_m_direct(&tau, &cfg).unwrap(),
                    repulsion_tf(&rho).unwrap(),
                ),
            ];
            for (i, (m, p)) in pairs.iter().enumerate() {
                assert!(
                    (m - p).abs() <= 1e-9 * m.abs().max(1e-30),
                    "seed {seed} term {i}: momentum {m} vs position {p}"
                );
            }
        }
    }

    #[test]
    fn term_by_term_duality_under_t_smooth() {
        let cfg = AtomConfig::test_gauge(2.0, 1.0).unwrap();
        let rho = exp_profile(Space::Position, 1024);
        let tau = transform_t(&rho, &cfg).unwrap();
        let k = (kinetic_m(&tau).unwrap(), kinetic_tf(&rho, &cfg).unwrap());
        let a = (
            attraction_m(&tau, &cfg).unwrap(),
            attraction_tf(&rho, &cfg).unwrap(),
        );
        let r = (
            repulsion_m_direct(&tau, &cfg).unwrap(),
            repulsion_tf(&rho).unwrap(),
        );
        for (i, (m, p)) in [k, a, r].iter().enumerate() {
            assert!(
                (m - p).abs() <= 1e-9 * m.abs(),
                "term {i}: momentum {m} vs position {p}"
            );
        }
        let (em, ep) = (
            energy_mtf(&tau, &cfg).unwrap().total,
            energy_tf(&rho, &cfg).unwrap().total,
        );
        assert!((em - ep).abs() <= 1e-9 * ep.abs().max(1.0));
    }

    #[test]
    fn round_trip_on_strictly_decreasing_profiles() {
        let cfg = gauge();
        let rho = exp_profile(Space::Position, 2048);
        let res = round_trip_residual(&rho, &cfg).unwrap();
        assert!(res < 1e-3, "residual {res}"); // in practice ~1e-12
        let ball = RadialProfile::unit_ball_indicator(Space::Position, 128, 2.0).unwrap();
        let res_ball = round_trip_residual(&ball, &cfg).unwrap();
        assert!(res_ball < 1e-8, "ball residual {res_ball}");
    }

    #[test]
    fn l1_distance_of_disjoint_indicators() {
        let a = RadialProfile::unit_ball_indicator(Space::Position, 64, 4.0).unwrap();
        let b = RadialProfile::piecewise_constant(
            Space::Position,
            &[1.0, 2f64.cbrt()],
            &[0.0, 1.0],
            64,
            0.01,
            4.0,
        )
        .unwrap();
        // disjoint supports of equal volume: distance = 2 * (4 pi / 3)
        let d = l1_distance(&a, &b).unwrap();
        let expect = 2.0 * 4.0 * PI / 3.0;
        assert!((d - expect).abs() <= 1e-8 * expect, "got {d}");
    }
}

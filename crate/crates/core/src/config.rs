use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Physical parameters of the atom plus the derived Thomas-Fermi constant.
///
/// `gamma` is always `(6 pi^2 / q)^(2/3)`; it cannot be set independently.
/// `q` counts spin states and is physically an integer, but reals are
/// admitted so the test gauge `q = 6 pi^2` (which makes `gamma = 1` exactly)
/// can be used in unit tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomConfig {
    /// Nuclear charge Z (positive).
    z: f64,
    /// Electron number N (nonnegative).
    n_electrons: f64,
    /// Spin-state count q (positive).
    q: f64,
    /// Thomas-Fermi constant, derived from q.
    gamma: f64,
}

impl AtomConfig {
    pub fn new(z: f64, n_electrons: f64, q: f64) -> Result<Self> {
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::Config(format!("Z must be positive, got {z}")));
        }
        if !(n_electrons.is_finite() && n_electrons >= 0.0) {
            return Err(Error::Config(format!(
                "N must be nonnegative, got {n_electrons}"
            )));
        }
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::Config(format!("q must be positive, got {q}")));
        }
        Ok(Self {
            z,
            n_electrons,
            q,
            gamma: Self::gamma_of(q),
        })
    }

    /// `gamma = (6 pi^2 / q)^(2/3)`.
    pub fn gamma_of(q: f64) -> f64 {
        (6.0 * PI * PI / q).powf(2.0 / 3.0)
    }

    /// Gauge with `q = 6 pi^2`, i.e. `gamma = 1`. Indicator-profile energies
    /// then take exact closed forms.
    pub fn test_gauge(z: f64, n_electrons: f64) -> Result<Self> {
        Self::new(z, n_electrons, 6.0 * PI * PI)
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn n_electrons(&self) -> f64 {
        self.n_electrons
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Same nucleus and spin count, different electron number.
    pub fn with_n_electrons(&self, n_electrons: f64) -> Result<Self> {
        Self::new(self.z, n_electrons, self.q)
    }

    /// Thomas-Fermi length scale `b = gamma (4 pi)^(-2/3) Z^(-1/3)`.
    pub fn length_scale(&self) -> f64 {
        self.gamma * (4.0 * PI).powf(-2.0 / 3.0) * self.z.powf(-1.0 / 3.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_is_derived_from_q() {
        let cfg = AtomConfig::new(1.0, 1.0, 2.0).unwrap();
        let expect = (3.0 * PI * PI).powf(2.0 / 3.0);
        assert!((cfg.gamma() - expect).abs() <= 1e-15 * expect);
    }

    #[test]
    fn test_gauge_has_unit_gamma() {
        let cfg = AtomConfig::test_gauge(1.0, 1.0).unwrap();
        assert_eq!(cfg.gamma(), 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(AtomConfig::new(0.0, 1.0, 2.0).is_err());
        assert!(AtomConfig::new(1.0, -0.5, 2.0).is_err());
        assert!(AtomConfig::new(1.0, 1.0, 0.0).is_err());
        assert!(AtomConfig::new(f64::NAN, 1.0, 2.0).is_err());
    }

    #[test]
    fn electron_number_zero_is_allowed() {
        assert!(AtomConfig::new(1.0, 0.0, 2.0).is_ok());
    }
}

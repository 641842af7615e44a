use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Node placement rule of a [`RadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridScheme {
    /// Geometric progression from `r_min` to `r_max`.
    Log,
    /// Arithmetic progression from `r_min` to `r_max`.
    Linear,
    /// Anything else (transform images, merged grids, files).
    Custom,
}

impl std::str::FromStr for GridScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" | "log-spaced" => Ok(GridScheme::Log),
            "linear" => Ok(GridScheme::Linear),
            other => Err(Error::GridSpec(format!(
                "unknown scheme `{other}` (expected `log` or `linear`)"
            ))),
        }
    }
}

/// Strictly increasing positive radial nodes.
///
/// The first node is strictly positive; integrands are extended to
/// `(0, r_min]` by their first value and are zero beyond `r_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    scheme: GridScheme,
}

/// Minimum node count accepted for a grid.
pub const MIN_NODES: usize = 16;

impl RadialGrid {
    /// Builds a grid from explicit nodes, validating the invariants.
    pub fn from_nodes(nodes: Vec<f64>, scheme: GridScheme) -> Result<Self> {
        if nodes.len() < MIN_NODES {
            return Err(Error::GridSpec(format!(
                "need at least {MIN_NODES} nodes, got {}",
                nodes.len()
            )));
        }
        if !nodes[0].is_finite() || nodes[0] <= 0.0 {
            return Err(Error::GridSpec(format!(
                "first node must be positive, got {}",
                nodes[0]
            )));
        }
        for pair in nodes.windows(2) {
            if !pair[1].is_finite() || pair[1] <= pair[0] {
                return Err(Error::GridSpec(format!(
                    "nodes must be strictly increasing ({} then {})",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Self { nodes, scheme })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }
}

/// Builds an `n`-node grid between `r_min` and `r_max` under the scheme.
///
/// Log spacing means a geometric progression; both endpoints are pinned
/// exactly. Rejects `n < 16` and nonpositive or disordered endpoints.
pub fn make_grid(scheme: GridScheme, n: usize, r_min: f64, r_max: f64) -> Result<RadialGrid> {
    if n < MIN_NODES {
        return Err(Error::GridSpec(format!(
            "need at least {MIN_NODES} nodes, got {n}"
        )));
    }
    if !(r_min.is_finite() && r_min > 0.0) {
        return Err(Error::GridSpec(format!("r_min must be positive, got {r_min}")));
    }
    if !(r_max.is_finite() && r_max > r_min) {
        return Err(Error::GridSpec(format!(
            "need r_min < r_max, got {r_min} and {r_max}"
        )));
    }
    let last = n - 1;
    let nodes: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 {
                r_min
            } else if i == last {
                r_max
            } else {
                let t = i as f64 / last as f64;
                match scheme {
                    GridScheme::Linear => r_min + (r_max - r_min) * t,
                    // geometric progression, endpoints pinned above
                    GridScheme::Log | GridScheme::Custom => {
                        (r_min.ln() + (r_max.ln() - r_min.ln()) * t).exp()
                    }
                }
            }
        })
        .collect();
    RadialGrid::from_nodes(nodes, scheme)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_too_few_nodes() {
        assert!(make_grid(GridScheme::Linear, 5, 0.1, 1.0).is_err());
    }

    #[test]
    fn rejects_nonpositive_r_min() {
        assert!(make_grid(GridScheme::Linear, 16, 0.0, 1.0).is_err());
        assert!(make_grid(GridScheme::Log, 16, -1.0, 1.0).is_err());
    }

    #[test]
    fn linear_grid_is_arithmetic() {
        let g = make_grid(GridScheme::Linear, 16, 1.0, 16.0).unwrap();
        for (i, r) in g.nodes().iter().enumerate() {
            assert!((r - (i as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn log_grid_is_geometric() {
        let g = make_grid(GridScheme::Log, 17, 1.0, 65536.0).unwrap();
        for (i, r) in g.nodes().iter().enumerate() {
            let expect = (2.0f64).powi(i as i32);
            assert!((r - expect).abs() <= 1e-12 * expect, "node {i}: {r}");
        }
    }

    #[test]
    fn from_nodes_rejects_disorder() {
        let mut nodes: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        nodes[10] = nodes[9];
        assert!(RadialGrid::from_nodes(nodes, GridScheme::Custom).is_err());
    }
}

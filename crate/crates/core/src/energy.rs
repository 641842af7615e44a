use serde::{Deserialize, Serialize};

/// Term-by-term energy of either functional. The attraction is stored as
/// the positive quantity and enters the total with a minus sign:
/// `total = kinetic - attraction + repulsion` by definition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub attraction: f64,
    pub repulsion: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(kinetic: f64, attraction: f64, repulsion: f64) -> Self {
        Self {
            kinetic,
            attraction,
            repulsion,
            total: kinetic - attraction + repulsion,
        }
    }
}

impl std::fmt::Display for EnergyBreakdown {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "kinetic {:+.12e}  attraction {:+.12e}  repulsion {:+.12e}  total {:+.12e}",
            self.kinetic, self.attraction, self.repulsion, self.total
        )
    }
}

/// Which evaluation route the momentum repulsion term takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepulsionPath {
    /// Pairwise double integral over momentum shells.
    Direct,
    /// Level integral of the squared layer-cake profile.
    Layercake,
}

impl std::str::FromStr for RepulsionPath {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "direct" => Ok(RepulsionPath::Direct),
            "layercake" => Ok(RepulsionPath::Layercake),
            other => Err(crate::Error::Config(format!(
                "unknown repulsion path `{other}` (expected `direct` or `layercake`)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_is_defined_not_measured() {
        let e = EnergyBreakdown::new(2.0, 5.0, 4.0);
        assert_eq!(e.total, 1.0);
    }
}

//! Profile CSV interchange.
//!
//! Format: first line `# mtf-profile v1 space=<position|momentum>
//! gamma=<decimal>`, then `r,value` rows with strictly increasing `r`.
//! Readers reject unknown version tags.

use crate::grid::{GridScheme, RadialGrid};
use crate::profile::{RadialProfile, Space};
use crate::{Error, Result};
use std::io::{BufRead, Write};

const MAGIC: &str = "mtf-profile";
const VERSION: &str = "v1";

/// Serializes a profile together with the gamma it was produced under.
pub fn write_profile<W: Write>(out: &mut W, p: &RadialProfile, gamma: f64) -> Result<()> {
    let header = format!(
        "# {MAGIC} {VERSION} space={} gamma={gamma}\n",
        p.space().as_str()
    );
    out.write_all(header.as_bytes())
        .map_err(|e| Error::Csv(e.to_string()))?;
    for (r, v) in p.grid().nodes().iter().zip(p.values()) {
        // `{}` on f64 prints the shortest decimal that round-trips
        out.write_all(format!("{r},{v}\n").as_bytes())
            .map_err(|e| Error::Csv(e.to_string()))?;
    }
    Ok(())
}

/// Parses a profile CSV; returns the profile and the recorded gamma.
pub fn read_profile<R: BufRead>(input: R) -> Result<(RadialProfile, f64)> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Csv("empty input".into()))?
        .map_err(|e| Error::Csv(e.to_string()))?;
    let (space, gamma) = parse_header(&header)?;
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Csv(e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (r, v) = trimmed
            .split_once(',')
            .ok_or_else(|| Error::Csv(format!("line {}: expected `r,value`", lineno + 2)))?;
        let r: f64 = r
            .trim()
            .parse()
            .map_err(|_| Error::Csv(format!("line {}: bad radius `{r}`", lineno + 2)))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Csv(format!("line {}: bad value `{v}`", lineno + 2)))?;
        nodes.push(r);
        values.push(v);
    }
    let grid = RadialGrid::from_nodes(nodes, GridScheme::Custom)
        .map_err(|e| Error::Csv(format!("bad radius column: {e}")))?;
    Ok((RadialProfile::new(grid, values, space)?, gamma))
}

fn parse_header(line: &str) -> Result<(Space, f64)> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::Csv("first line must start with `#`".into()))?
        .trim();
    let mut parts = body.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(Error::Csv(format!("not a {MAGIC} file")));
    }
    match parts.next() {
        Some(VERSION) => {}
        Some(other) => {
            return Err(Error::Csv(format!(
                "unsupported version `{other}` (reader understands {VERSION})"
            )))
        }
        None => return Err(Error::Csv("missing version tag".into())),
    }
    let mut space = None;
    let mut gamma = None;
    for kv in parts {
        match kv.split_once('=') {
            Some(("space", "position")) => space = Some(Space::Position),
            Some(("space", "momentum")) => space = Some(Space::Momentum),
            Some(("space", other)) => {
                return Err(Error::Csv(format!("unknown space `{other}`")))
            }
            Some(("gamma", g)) => {
                gamma = Some(
                    g.parse::<f64>()
                        .map_err(|_| Error::Csv(format!("bad gamma `{g}`")))?,
                )
            }
            _ => return Err(Error::Csv(format!("unknown header field `{kv}`"))),
        }
    }
    match (space, gamma) {
        (Some(s), Some(g)) if g.is_finite() && g > 0.0 => Ok((s, g)),
        (Some(_), Some(g)) => Err(Error::Csv(format!("gamma must be positive, got {g}"))),
        _ => Err(Error::Csv("header must carry space= and gamma=".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Space;

    #[test]
    fn round_trip_preserves_profile_exactly() {
        let p = RadialProfile::unit_ball_indicator(Space::Momentum, 48, 2.0).unwrap();
        let mut buf = Vec::new();
        write_profile(&mut buf, &p, 1.0).unwrap();
        let (q, gamma) = read_profile(buf.as_slice()).unwrap();
        assert_eq!(gamma, 1.0);
        assert_eq!(q.space(), Space::Momentum);
        assert_eq!(p.grid().nodes(), q.grid().nodes());
        assert_eq!(p.values(), q.values());
    }

    #[test]
    fn rejects_unknown_version() {
        let text = "# mtf-profile v2 space=position gamma=1\n1.0,1.0\n";
        let err = read_profile(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("unsupported version"));
    }

    #[test]
    fn rejects_descending_radii() {
        let mut text = String::from("# mtf-profile v1 space=position gamma=1\n");
        for i in (1..=20).rev() {
            text.push_str(&format!("{}.0,0.0\n", i));
        }
        assert!(read_profile(text.as_bytes()).is_err());
    }

    #[test]
    fn rejects_missing_fields() {
        let text = "# mtf-profile v1 space=position\n1.0,1.0\n";
        assert!(read_profile(text.as_bytes()).is_err());
    }
}

//! Parsing of sweep grids given on the command line.
//!
//! Integer grids are comma-separated values or inclusive ranges
//! (`1,2,5` or `1..25`). Real grids accept values and evenly spaced
//! ranges `lo..hi@points` with both endpoints included.

use anyhow::{bail, Context, Result};

pub fn parse_usize_grid(spec: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in items(spec)? {
        if let Some((lo, hi)) = item.split_once("..") {
            let lo: usize = lo
                .trim()
                .parse()
                .with_context(|| format!("bad range start in {item:?}"))?;
            let hi: usize = hi
                .trim()
                .parse()
                .with_context(|| format!("bad range end in {item:?}"))?;
            if lo > hi {
                bail!("empty range {item:?}");
            }
            out.extend(lo..=hi);
        } else {
            out.push(
                item.parse()
                    .with_context(|| format!("bad integer {item:?}"))?,
            );
        }
    }
    Ok(out)
}

pub fn parse_real_grid(spec: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in items(spec)? {
        if let Some((range, points)) = item.split_once('@') {
            let (lo, hi) = range
                .split_once("..")
                .with_context(|| format!("expected lo..hi@points, got {item:?}"))?;
            let lo: f64 = lo
                .trim()
                .parse()
                .with_context(|| format!("bad range start in {item:?}"))?;
            let hi: f64 = hi
                .trim()
                .parse()
                .with_context(|| format!("bad range end in {item:?}"))?;
            let points: usize = points
                .trim()
                .parse()
                .with_context(|| format!("bad point count in {item:?}"))?;
            match points {
                0 => bail!("range {item:?} has no points"),
                1 => out.push(lo),
                _ => out.extend((0..points).map(|i| {
                    if i == points - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * i as f64 / (points - 1) as f64
                    }
                })),
            }
        } else {
            out.push(
                item.parse()
                    .with_context(|| format!("bad number {item:?}"))?,
            );
        }
    }
    if out.iter().any(|v| !v.is_finite()) {
        bail!("grid {spec:?} contains non-finite values");
    }
    Ok(out)
}

fn items(spec: &str) -> Result<Vec<&str>> {
    let items: Vec<&str> = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        bail!("empty grid");
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_grids() {
        assert_eq!(parse_usize_grid("1,2,5").unwrap(), vec![1, 2, 5]);
        assert_eq!(parse_usize_grid("1..4,10").unwrap(), vec![1, 2, 3, 4, 10]);
        assert!(parse_usize_grid("").is_err());
        assert!(parse_usize_grid("5..2").is_err());
        assert!(parse_usize_grid("x").is_err());
    }

    #[test]
    fn real_grids() {
        assert_eq!(parse_real_grid("0.5").unwrap(), vec![0.5]);
        assert_eq!(
            parse_real_grid("0..1@5").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!(parse_real_grid("0.1,0..1@2").unwrap(), vec![0.1, 0.0, 1.0]);
        assert!(parse_real_grid("0..1").is_err());
        assert!(parse_real_grid("0..1@0").is_err());
        assert!(parse_real_grid("inf").is_err());
    }
}

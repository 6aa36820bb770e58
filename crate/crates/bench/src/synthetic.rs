use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use otx_core::{CostMatrix, Histogram};
use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{BenchError, Result};

/// Ground metric between pixel grid positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroundMetric {
    L1,
    L2,
    #[default]
    SquaredL2,
}

impl fmt::Display for GroundMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroundMetric::L1 => "l1",
            GroundMetric::L2 => "l2",
            GroundMetric::SquaredL2 => "sql2",
        })
    }
}

impl FromStr for GroundMetric {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Self::L1),
            "l2" => Ok(Self::L2),
            "sql2" => Ok(Self::SquaredL2),
            other => Err(BenchError::InvalidParameter(format!(
                "unknown metric {other:?} (expected l1, l2 or sql2)"
            ))),
        }
    }
}

/// Cost between the pixels of a `rows × cols` image, flattened row-major
/// and scaled so the largest entry is 1.
pub fn pixel_grid_cost(rows: usize, cols: usize, metric: GroundMetric) -> Result<CostMatrix> {
    let n = rows * cols;
    if n < 2 {
        return Err(BenchError::InvalidParameter("image needs at least two pixels".into()));
    }
    let mut c = Array2::from_shape_fn((n, n), |(a, b)| {
        let dr = (a / cols) as f64 - (b / cols) as f64;
        let dc = (a % cols) as f64 - (b % cols) as f64;
        match metric {
            GroundMetric::L1 => dr.abs() + dc.abs(),
            GroundMetric::L2 => (dr * dr + dc * dc).sqrt(),
            GroundMetric::SquaredL2 => dr * dr + dc * dc,
        }
    });
    let max = c.iter().copied().fold(0.0, f64::max);
    c /= max;
    Ok(CostMatrix::new(c)?)
}

/// A random square foreground on a dim background.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticImageSpec {
    pub side: usize,
    /// Fraction of the image AREA covered by the foreground square.
    pub fg_fraction: f64,
    pub bg_range: (f64, f64),
    pub fg_range: (f64, f64),
    pub metric: GroundMetric,
    pub seed: u64,
}

impl Default for SyntheticImageSpec {
    fn default() -> Self {
        Self {
            side: 20,
            fg_fraction: 0.1,
            bg_range: (0.0, 1.0),
            fg_range: (0.0, 50.0),
            metric: GroundMetric::SquaredL2,
            seed: 0,
        }
    }
}

impl SyntheticImageSpec {
    pub fn validate(&self) -> Result<()> {
        if self.side < 2 {
            return Err(BenchError::InvalidParameter(format!("side must be >= 2, got {}", self.side)));
        }
        if !(self.fg_fraction > 0.0 && self.fg_fraction < 1.0) {
            return Err(BenchError::InvalidParameter(format!(
                "foreground fraction must lie in (0, 1), got {}",
                self.fg_fraction
            )));
        }
        for (lo, hi) in [self.bg_range, self.fg_range] {
            if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
                return Err(BenchError::InvalidParameter(format!("bad intensity range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// `round(side·√fg_fraction)`, at least one pixel.
    pub fn foreground_side(&self) -> usize {
        ((self.side as f64 * self.fg_fraction.sqrt()).round() as usize).clamp(1, self.side)
    }

    fn draw_image(&self, rng: &mut ChaCha8Rng) -> Result<Histogram> {
        let side = self.side;
        let bg = Uniform::new_inclusive(self.bg_range.0, self.bg_range.1);
        let fg = Uniform::new_inclusive(self.fg_range.0, self.fg_range.1);
        let mut pixels: Vec<f64> = (0..side * side).map(|_| bg.sample(rng)).collect();
        let fs = self.foreground_side();
        let top = rng.gen_range(0..=side - fs);
        let left = rng.gen_range(0..=side - fs);
        for row in top..top + fs {
            for col in left..left + fs {
                pixels[row * side + col] = fg.sample(rng);
            }
        }
        Ok(Histogram::new(Array1::from(pixels))?)
    }
}

/// Two independent images and their shared pixel cost.
pub fn generate_synthetic_pair(spec: &SyntheticImageSpec) -> Result<(Histogram, Histogram, CostMatrix)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let r = spec.draw_image(&mut rng)?;
    let l = spec.draw_image(&mut rng)?;
    Ok((r, l, pixel_grid_cost(spec.side, spec.side, spec.metric)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn foreground_side_uses_area_fraction() {
        let spec = SyntheticImageSpec {
            fg_fraction: 0.09,
            ..Default::default()
        };
        assert_eq!(spec.foreground_side(), 6);
    }

    #[test]
    fn pairs_are_normalized_and_reproducible() {
        let spec = SyntheticImageSpec {
            seed: 42,
            ..Default::default()
        };
        let (r, l, c) = generate_synthetic_pair(&spec).unwrap();
        for h in [&r, &l] {
            assert_eq!(h.len(), 400);
            assert!((h.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(c.max_abs(), 1.0);
        let again = generate_synthetic_pair(&spec).unwrap();
        assert_eq!(again.0, r);
        assert_eq!(again.1, l);
        assert_ne!(r, l);
    }

    #[test]
    fn grid_costs() {
        let c = pixel_grid_cost(2, 2, GroundMetric::L1).unwrap();
        // Pixels (0,0), (0,1), (1,0), (1,1); the diagonal pair is farthest.
        assert_eq!(c.entries()[[0, 3]], 1.0);
        assert_eq!(c.entries()[[0, 1]], 0.5);
        let c = pixel_grid_cost(1, 3, GroundMetric::SquaredL2).unwrap();
        assert_eq!(c.entries()[[0, 1]], 0.25);
        assert!(pixel_grid_cost(1, 1, GroundMetric::L2).is_err());
    }

    #[test]
    fn invalid_specs() {
        for spec in [
            SyntheticImageSpec { side: 1, ..Default::default() },
            SyntheticImageSpec { fg_fraction: 1.0, ..Default::default() },
            SyntheticImageSpec { fg_fraction: 0.0, ..Default::default() },
        ] {
            assert!(generate_synthetic_pair(&spec).is_err());
        }
        assert!("cosine".parse::<GroundMetric>().is_err());
        assert_eq!("SQL2".parse::<GroundMetric>().unwrap(), GroundMetric::SquaredL2);
    }
}

use crate::error::{BenchError, Result};

/// `ln(d1/d2)`; positive when the second algorithm is closer to the polytope.
pub fn competitive_ratio(d1: f64, d2: f64) -> Result<f64> {
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(BenchError::NonPositiveDistance { d1, d2 });
    }
    Ok((d1 / d2).ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub max: f64,
    pub median: f64,
    pub min: f64,
}

/// Max, median and min; the median of an even count averages the middle two.
pub fn spread(values: &[f64]) -> Option<Spread> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    let median = if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    };
    Some(Spread {
        max: v[v.len() - 1],
        median,
        min: v[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_examples() {
        assert_eq!(competitive_ratio(0.3, 0.3).unwrap(), 0.0);
        assert!((competitive_ratio(std::f64::consts::E * 0.1, 0.1).unwrap() - 1.0).abs() < 1e-15);
        assert!((competitive_ratio(0.02, 0.01).unwrap() - 0.693_147_2).abs() < 1e-7);
        assert!(matches!(
            competitive_ratio(0.0, 1.0),
            Err(BenchError::NonPositiveDistance { .. })
        ));
        assert!(competitive_ratio(1.0, -1.0).is_err());
    }

    #[test]
    fn spread_examples() {
        assert_eq!(spread(&[]), None);
        let s = spread(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!((s.max, s.median, s.min), (3.0, 2.0, 1.0));
        assert_eq!(spread(&[4.0, 1.0, 2.0, 3.0]).unwrap().median, 2.5);
    }
}

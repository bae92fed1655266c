use serde::Serialize;

use crate::error::{Error, Result};

/// Coordinate transform applied before the least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    Linear,
    LogLog,
}

/// Ordinary least squares in the transformed coordinates; `residual` is the largest absolute deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

pub fn slope_fit(points: &[(f64, f64)], transform: Transform) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let pts: Vec<(f64, f64)> = match transform {
        Transform::Linear => points.to_vec(),
        Transform::LogLog => points
            .iter()
            .map(|&(x, y)| {
                if !(x > 0.0) {
                    return Err(Error::NonPositiveCoordinate(x));
                }
                if !(y > 0.0) {
                    return Err(Error::NonPositiveCoordinate(y));
                }
                Ok((x.ln(), y.ln()))
            })
            .collect::<Result<_>>()?,
    };
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok(SlopeFit {
        slope,
        intercept,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn exact_power_laws() {
        let f = slope_fit(&[(1.0, 1.0), (2.0, 2.0), (4.0, 4.0)], Transform::LogLog).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-14 && f.residual < 1e-14);
        let f = slope_fit(&[(1.0, 1.0), (2.0, 4.0), (4.0, 16.0)], Transform::LogLog).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14);
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let pts: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let x = 1.5f64.powi(i);
                (x, x.powf(1.5) * (1.0 + rng.gen_range(-0.02..0.02)))
            })
            .collect();
        let f = slope_fit(&pts, Transform::LogLog).unwrap();
        assert!((f.slope - 1.5).abs() < 0.05);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            slope_fit(&[(1.0, 1.0), (2.0, 2.0)], Transform::Linear),
            Err(Error::TooFewPoints { .. })
        ));
        assert!(matches!(
            slope_fit(&[(1.0, 1.0), (0.0, 2.0), (3.0, 1.0)], Transform::LogLog),
            Err(Error::NonPositiveCoordinate(_))
        ));
        let f = slope_fit(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)], Transform::Linear).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
    }
}

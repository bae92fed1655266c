//! Radial quadrature, sharpness sweeps and slope fitting.

mod radial;
mod slope;
mod sweeps;

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

pub use radial::{radial_integrate, sphere_measure, RadialProfile, Radius, Tail};
pub use slope::{slope_fit, SlopeFit, Transform};
pub use sweeps::{
    angular_kernel_average, default_two_weight_radii, frac_commutator_pointwise, sweep_frac_commutator, sweep_sobolev,
    two_weight_failure, SobolevOptions, DEFAULT_DELTAS, DEFAULT_REL_TOL,
};

/// A fitted slope together with what was regressed on what.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedSlope {
    pub name: String,
    #[serde(flatten)]
    pub fit: SlopeFit,
}

/// A table of per-point measurements with fitted slopes; the first slope is the headline one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub kind: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub slopes: Vec<NamedSlope>,
    pub parameters: serde_json::Map<String, serde_json::Value>,
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn slope(&self) -> Option<&SlopeFit> {
        self.slopes.first().map(|s| &s.fit)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().flexible(true).from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| format!("{v:e}")))?;
        }
        if let Some(s) = self.slope() {
            out.write_record(["#slope".to_string(), s.slope.to_string(), s.residual.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

use serde::{Deserialize, Serialize};

use super::InputError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CopPoint {
    pub temp_c: f64,
    pub cop: f64,
}

fn default_backup_cop() -> f64 {
    1.0
}

/// Heat pump COP against outdoor temperature, floored by a resistance backup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopCurve {
    pub points: Vec<CopPoint>,
    #[serde(default = "default_backup_cop")]
    pub backup_cop: f64,
}

impl Default for CopCurve {
    /// Cold-climate curve anchored at COP 1.0 at -17 C and COP 6.1 at 15 C.
    fn default() -> Self {
        Self {
            points: vec![
                CopPoint {
                    temp_c: -17.0,
                    cop: 1.0,
                },
                CopPoint { temp_c: 15.0, cop: 6.1 },
            ],
            backup_cop: 1.0,
        }
    }
}

impl CopCurve {
    pub fn new(points: Vec<CopPoint>, backup_cop: f64) -> Result<Self, InputError> {
        let curve = Self { points, backup_cop };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<(), InputError> {
        if self.points.is_empty() {
            return Err(InputError::InvalidCop("no points".into()));
        }
        if !(self.backup_cop >= 1.0 && self.backup_cop.is_finite()) {
            return Err(InputError::InvalidCop(format!(
                "backup COP must be at least 1, got {}",
                self.backup_cop
            )));
        }
        for w in self.points.windows(2) {
            if w[1].temp_c <= w[0].temp_c {
                return Err(InputError::InvalidCop(
                    "temperatures must be strictly increasing".into(),
                ));
            }
            if w[1].cop < w[0].cop {
                return Err(InputError::InvalidCop("COP must not decrease with temperature".into()));
            }
        }
        if let Some(p) = self.points.iter().find(|p| !(p.cop > 0.0)) {
            return Err(InputError::InvalidCop(format!(
                "nonpositive COP {} at {} C",
                p.cop, p.temp_c
            )));
        }
        Ok(())
    }

    /// Interpolated heat pump COP, clamped outside the table, floored at the
    /// backup COP.
    pub fn cop_at(&self, temp_c: f64) -> f64 {
        let pts = &self.points;
        let raw = if temp_c <= pts[0].temp_c {
            pts[0].cop
        } else if temp_c >= pts[pts.len() - 1].temp_c {
            pts[pts.len() - 1].cop
        } else {
            let i = pts.partition_point(|p| p.temp_c <= temp_c);
            let (lo, hi) = (pts[i - 1], pts[i]);
            let w = (temp_c - lo.temp_c) / (hi.temp_c - lo.temp_c);
            lo.cop + w * (hi.cop - lo.cop)
        };
        raw.max(self.backup_cop)
    }

    pub fn hourly(&self, temps: &[f64]) -> Vec<f64> {
        temps.iter().map(|&t| self.cop_at(t)).collect()
    }
}

use serde::{Deserialize, Serialize};

/// Fan electricity as a fraction of the thermal load served in an hour,
/// `ratio = c0 + c1 q + c2 q^2 + ...` clamped to `[0, 1]`.
///
/// The default is the zero model (no fan load).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FanLoadModel {
    #[serde(default)]
    pub coefficients: Vec<f64>,
}

impl FanLoadModel {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }

    pub fn ratio(&self, served_load: f64) -> f64 {
        let q = served_load.max(0.0);
        let raw = self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * q + c);
        raw.clamp(0.0, 1.0)
    }

    /// Fan electricity (kWh) for an hour serving `served_load` kWh of heat.
    pub fn energy(&self, served_load: f64) -> f64 {
        self.ratio(served_load) * served_load.max(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0.0)
    }

    /// Constant models make the fan load linear in the served heat.
    pub fn is_constant(&self) -> bool {
        self.coefficients.iter().skip(1).all(|&c| c == 0.0)
    }
}

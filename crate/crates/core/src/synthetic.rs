//! Seeded synthetic cities for demonstrations, determinism checks and
//! timing. Not calibrated to any real building stock.

use std::f64::consts::PI;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::inputs::{LoadProfile, HOURS_PER_YEAR};

/// Indoor set point below which a home needs heat, C.
const BALANCE_POINT_C: f64 = 18.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCity {
    pub name: String,
    pub temps: Vec<f64>,
    pub profiles: Vec<LoadProfile>,
}

/// Outdoor temperature with a January minimum, a 15:00 daily maximum and
/// uniform noise.
fn weather(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..HOURS_PER_YEAR)
        .map(|h| {
            let day = h as f64 / 24.0;
            let hour = (h % 24) as f64;
            let seasonal = -14.0 * (2.0 * PI * (day - 15.0) / 365.0).cos();
            let diurnal = 4.0 * (2.0 * PI * (hour - 9.0) / 24.0).sin();
            9.0 + seasonal + diurnal + rng.gen_range(-2.5..2.5)
        })
        .collect()
}

/// `households` homes with degree-hour loads; identical seeds give
/// identical cities.
pub fn synthetic_city(name: &str, households: usize, seed: u64) -> SyntheticCity {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let temps = weather(&mut rng);
    let profiles = (0..households)
        .map(|i| {
            let ua = rng.gen_range(0.12..0.40);
            let loads = temps
                .iter()
                .map(|t| {
                    let need = ua * (BALANCE_POINT_C - t).max(0.0);
                    (need * rng.gen_range(0.85..1.15) * 1e4).round() / 1e4
                })
                .collect();
            LoadProfile::new(format!("h{i:04}"), loads).expect("synthetic loads are nonnegative")
        })
        .collect();
    SyntheticCity {
        name: name.to_string(),
        temps: temps.iter().map(|t| (t * 100.0).round() / 100.0).collect(),
        profiles,
    }
}

impl SyntheticCity {
    /// Writes `loads.csv`, `weather.csv` and a `config.toml` running the
    /// bundled scenario matrix; returns the config path.
    pub fn write(&self, dir: &Path, gas_price: f64) -> std::io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let mut loads = BufWriter::new(fs::File::create(dir.join("loads.csv"))?);
        writeln!(loads, "household_id,hour,load_kwh")?;
        for p in &self.profiles {
            for (h, v) in p.hourly_load().iter().enumerate() {
                writeln!(loads, "{},{h},{v}", p.household_id)?;
            }
        }
        loads.flush()?;
        let mut weather = BufWriter::new(fs::File::create(dir.join("weather.csv"))?);
        writeln!(weather, "hour,temp_c")?;
        for (h, t) in self.temps.iter().enumerate() {
            writeln!(weather, "{h},{t}")?;
        }
        weather.flush()?;
        let config = dir.join("config.toml");
        fs::write(
            &config,
            format!(
                "gas_price = {gas_price}\n\n[[cities]]\nname = \"{}\"\nloads = \"loads.csv\"\nweather = \"weather.csv\"\n",
                self.name
            ),
        )?;
        Ok(config)
    }
}

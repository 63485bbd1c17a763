//! Independent oracles for the dispatch LP: a grid dynamic program over the
//! state of charge and a rejection sampler of feasible dispatches. Power caps
//! are rebuilt here from the salt rate laws rather than taken from the
//! library.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tes_dispatch::dispatch::{HouseholdCase, PowerLimit, TesUnit};
use tes_dispatch::inputs::LoadProfile;
use tes_dispatch::salt::{builtin_salts, ragone_limit, RateModel, SaltSpec};

/// Grid points used by the dynamic program.
pub const GRID_POINTS: usize = 201;

/// Slack on oracle feasibility comparisons.
const EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub enum Cap {
    /// Chords of the instantaneous specific power through SOC 0, `breakpoint`
    /// and 1; charge mirrors discharge.
    Ragone {
        salt: SaltSpec,
    },
    Constant {
        kw_per_kg: f64,
    },
    Unlimited,
}

/// A small dispatch problem described without library types.
#[derive(Debug, Clone)]
pub struct Instance {
    pub demand: Vec<f64>,
    pub rates: Vec<f64>,
    pub cop: Vec<f64>,
    pub mass: f64,
    pub energy: f64,
    pub eta_d: f64,
    pub eta_c: f64,
    pub cap: Cap,
}

fn specific_power(salt: &SaltSpec, x: f64) -> f64 {
    let per_minute = match salt.rate_model {
        RateModel::Exponential { k } => k * x,
        RateModel::Cubic { a } => a * x.powf(2.0 / 3.0),
    };
    per_minute * 60.0 * salt.reaction_enthalpy
}

fn chord(salt: &SaltSpec, x: f64) -> f64 {
    let a = salt.ragone_breakpoint;
    let (x0, x1) = if x <= a { (0.0, a) } else { (a, 1.0) };
    let (y0, y1) = (specific_power(salt, x0), specific_power(salt, x1));
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

impl Instance {
    pub fn hours(&self) -> usize {
        self.demand.len()
    }

    pub fn hp_capacity(&self) -> f64 {
        self.demand.iter().copied().fold(0.0, f64::max)
    }

    fn fraction(&self, soc: f64) -> f64 {
        (soc / self.energy).clamp(0.0, 1.0)
    }

    pub fn discharge_cap(&self, soc: f64) -> f64 {
        match &self.cap {
            Cap::Ragone { salt } => self.mass * chord(salt, self.fraction(soc)),
            Cap::Constant { kw_per_kg } => self.mass * kw_per_kg,
            Cap::Unlimited => f64::INFINITY,
        }
    }

    pub fn charge_cap(&self, soc: f64) -> f64 {
        match &self.cap {
            Cap::Ragone { salt } => self.mass * chord(salt, 1.0 - self.fraction(soc)),
            Cap::Constant { kw_per_kg } => self.mass * kw_per_kg,
            Cap::Unlimited => f64::INFINITY,
        }
    }

    /// The `grid spacing × max rate / min COP` allowance.
    pub fn grid_bound(&self) -> f64 {
        let max_rate = self.rates.iter().copied().fold(0.0, f64::max);
        let min_cop = self.cop.iter().copied().fold(f64::INFINITY, f64::min);
        self.energy / (GRID_POINTS - 1) as f64 * max_rate / min_cop
    }

    pub fn no_storage_cost(&self) -> f64 {
        (0..self.hours())
            .map(|t| self.rates[t] * self.demand[t] / self.cop[t])
            .sum()
    }

    pub fn case(&self) -> HouseholdCase {
        let profile = LoadProfile::new("oracle", self.demand.clone()).unwrap();
        let case = HouseholdCase::new(&profile, self.cop.clone(), self.rates.clone()).unwrap();
        let power = match &self.cap {
            Cap::Ragone { salt } => PowerLimit::Ragone(ragone_limit(salt).unwrap()),
            Cap::Constant { kw_per_kg } => PowerLimit::Constant { kw_per_kg: *kw_per_kg },
            Cap::Unlimited => PowerLimit::Unlimited,
        };
        let unit = TesUnit::new(self.mass, self.energy, power, self.eta_d, self.eta_c).unwrap();
        case.with_tes(unit).unwrap()
    }

    /// Cheapest cost of moving the store from `s` to `next` in hour `t`, if
    /// possible. Charging and discharging in the same hour never pays when
    /// `η_c·η_d <= 1`, so only one direction is considered.
    fn step_cost(&self, t: usize, s: f64, next: f64) -> Option<f64> {
        let k = self.hp_capacity();
        let d = self.demand[t];
        let delta = next - s;
        let hp = if delta >= 0.0 {
            let charge = delta / self.eta_c;
            if charge > self.charge_cap(s) + EPS || d + charge > k + EPS {
                return None;
            }
            d + charge
        } else {
            let discharge = -delta;
            if discharge > self.discharge_cap(s) + EPS {
                return None;
            }
            (d - self.eta_d * discharge).max(0.0)
        };
        Some(self.rates[t] / self.cop[t] * hp)
    }
}

/// Seeded random instance of `12..=max_hours` hours.
pub fn random_instance(seed: u64, max_hours: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(12..=max_hours);
    let mut demand: Vec<f64> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.3) {
                0.0
            } else {
                rng.gen_range(0.5..6.0)
            }
        })
        .collect();
    if demand.iter().all(|&d| d == 0.0) {
        demand[n - 1] = 3.0;
    }
    let rates = (0..n).map(|_| rng.gen_range(0.05..0.40)).collect();
    let cop = (0..n).map(|_| rng.gen_range(1.0..4.5)).collect();
    let salts = builtin_salts();
    let salt = salts[rng.gen_range(0..salts.len())].clone();
    let mass = rng.gen_range(2.0..30.0);
    let energy = mass * salt.reaction_enthalpy;
    let cap = match rng.gen_range(0..4) {
        0 | 1 => Cap::Ragone { salt },
        2 => Cap::Constant {
            kw_per_kg: rng.gen_range(0.05..0.5),
        },
        _ => Cap::Unlimited,
    };
    Instance {
        demand,
        rates,
        cop,
        mass,
        energy,
        eta_d: rng.gen_range(0.5..=1.0),
        eta_c: rng.gen_range(0.85..=1.0),
        cap,
    }
}

fn interpolate(values: &[f64], h: f64, s: f64) -> f64 {
    let x = (s / h).clamp(0.0, (values.len() - 1) as f64);
    let i = (x.floor() as usize).min(values.len() - 2);
    let w = x - i as f64;
    values[i] * (1.0 - w) + values[i + 1] * w
}

/// Backward dynamic program on a uniform SOC grid. Next states range over
/// the grid plus the exact ends of the reachable interval, holding, and
/// covering the hour's demand from storage; values between grid points are
/// interpolated. The result is an upper bound on the continuous optimum.
pub fn dp_cost(inst: &Instance) -> f64 {
    let n = inst.hours();
    let h = inst.energy / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| i as f64 * h).collect();
    let mut next_value = vec![0.0; GRID_POINTS];
    let k = inst.hp_capacity();
    for t in (0..n).rev() {
        let mut value = vec![f64::INFINITY; GRID_POINTS];
        for (i, &s) in grid.iter().enumerate() {
            let lo = (s - inst.discharge_cap(s)).max(0.0);
            let room = (k - inst.demand[t]).max(0.0).min(inst.charge_cap(s));
            let hi = (s + inst.eta_c * room).min(inst.energy);
            let mut candidates = vec![lo, hi, s, s - inst.demand[t] / inst.eta_d];
            candidates.extend(grid.iter().copied().filter(|&g| g >= lo && g <= hi));
            for c in candidates {
                if c < lo || c > hi {
                    continue;
                }
                if let Some(cost) = inst.step_cost(t, s, c) {
                    value[i] = value[i].min(cost + interpolate(&next_value, h, c));
                }
            }
        }
        next_value = value;
    }
    next_value[0]
}

/// Cost of `samples` random feasible dispatches. Each hour draws flows
/// uniformly and keeps the first draw that meets demand, capacity, caps and
/// SOC bounds; after 50 misses the hour is served by the heat pump alone.
pub fn sampled_costs(inst: &Instance, samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = inst.hp_capacity();
    (0..samples)
        .map(|_| {
            let mut soc = 0.0;
            let mut cost = 0.0;
            for t in 0..inst.hours() {
                let d = inst.demand[t];
                let mut chosen = (d, 0.0, 0.0);
                for _ in 0..50 {
                    let charge_top = inst.charge_cap(soc).min(k);
                    let discharge_top = inst.discharge_cap(soc).min(soc);
                    let ght = rng.gen_range(0.0..=charge_top);
                    let gtes = rng.gen_range(0.0..=discharge_top);
                    let ghl = rng.gen_range(0.0..=k);
                    let next = soc + inst.eta_c * ght - gtes;
                    if ghl + ght <= k && ghl + inst.eta_d * gtes >= d && (0.0..=inst.energy).contains(&next) {
                        chosen = (ghl, ght, gtes);
                        break;
                    }
                }
                let (ghl, ght, gtes) = chosen;
                soc = (soc + inst.eta_c * ght - gtes).clamp(0.0, inst.energy);
                cost += inst.rates[t] / inst.cop[t] * (ghl + ght);
            }
            cost
        })
        .collect()
}

/// Three-hour pattern (demand `[4, 0, 4]`) at the start of every day of a
/// year, rate 0.10 in the second hour and 0.30 otherwise.
pub fn toy_year() -> (Vec<f64>, Vec<f64>) {
    let demand = (0..8760)
        .map(|h| match h % 24 {
            0 | 2 => 4.0,
            _ => 0.0,
        })
        .collect();
    let rates = (0..8760).map(|h| if h % 24 == 1 { 0.10 } else { 0.30 }).collect();
    (demand, rates)
}

/// Largest breach of any dispatch constraint by `sol` on `inst`, checked with
/// the oracle's own caps; 0 when feasible.
pub fn max_violation(inst: &Instance, sol: &tes_dispatch::dispatch::DispatchSolution) -> f64 {
    let k = inst.hp_capacity();
    let mut worst: f64 = 0.0;
    let mut prev = 0.0;
    for t in 0..inst.hours() {
        let (ghl, ght, gtes, soc) = (sol.hp_to_load[t], sol.hp_to_tes[t], sol.tes_discharge[t], sol.soc[t]);
        let d = sol.electricity[t];
        for breach in [
            inst.demand[t] - (ghl + inst.eta_d * gtes),
            ghl + ght - k,
            (soc - (prev + inst.eta_c * ght - gtes)).abs(),
            -soc,
            soc - inst.energy,
            gtes - inst.discharge_cap(prev),
            ght - inst.charge_cap(prev),
            (ghl + ght) / inst.cop[t] - d,
            -ghl,
            -ght,
            -gtes,
        ] {
            worst = worst.max(breach);
        }
        prev = soc;
    }
    worst
}

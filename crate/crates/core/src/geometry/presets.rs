//! Band-limited conformal factors selected by name and seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grid::{Field, TorusChart};
use super::metric::ConformalMetric;
use crate::{Error, Result};

/// One term `a·cos(k₁x₁ + k₂x₂ + θ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub amplitude: f64,
    pub k: [i32; 2],
    pub phase: f64,
}

/// A trigonometric polynomial `c + Σ modes`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub constant: f64,
    pub modes: Vec<Mode>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly { constant: 0.0, modes: Vec::new() }
    }

    /// Bound on `max|f - c|`.
    pub fn amplitude(&self) -> f64 {
        self.modes.iter().map(|m| m.amplitude.abs()).sum()
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        self.constant
            + self
                .modes
                .iter()
                .map(|m| m.amplitude * (m.k[0] as f64 * x1 + m.k[1] as f64 * x2 + m.phase).cos())
                .sum::<f64>()
    }

    pub fn sample(&self, chart: &TorusChart) -> Field {
        chart.sample(|x1, x2| self.eval(x1, x2))
    }

    /// Random trigonometric polynomial with at most `max_modes` modes,
    /// wavenumbers in `[-max_k, max_k]` and total amplitude at most
    /// `max_amplitude`.
    pub fn random<R: Rng>(rng: &mut R, max_modes: usize, max_k: i32, max_amplitude: f64) -> Self {
        let count = rng.gen_range(1..=max_modes);
        let mut modes: Vec<Mode> = (0..count)
            .map(|_| {
                let k = loop {
                    let k = [rng.gen_range(-max_k..=max_k), rng.gen_range(0..=max_k)];
                    if k != [0, 0] {
                        break k;
                    }
                };
                Mode {
                    amplitude: rng.gen_range(0.2..1.0),
                    k,
                    phase: rng.gen_range(0.0..std::f64::consts::TAU),
                }
            })
            .collect();
        let total: f64 = modes.iter().map(|m| m.amplitude).sum();
        let target = rng.gen_range(0.5..=1.0) * max_amplitude;
        for m in &mut modes {
            m.amplitude *= target / total;
        }
        TrigPoly { constant: 0.0, modes }
    }
}

pub const PRESET_NAMES: [&str; 5] = ["flat", "const", "trig1", "trig2", "random"];

/// Largest accepted amplitude of a preset.
pub const MAX_AMPLITUDE: f64 = 1.0;

fn mode(amplitude: f64, k1: i32, k2: i32, phase: f64) -> Mode {
    Mode { amplitude, k: [k1, k2], phase }
}

/// The conformal factor of a named preset. `seed` only affects `random`.
pub fn preset_phi(name: &str, seed: u64) -> Result<TrigPoly> {
    use std::f64::consts::FRAC_PI_2;
    let p = match name {
        "flat" => TrigPoly::zero(),
        "const" => TrigPoly { constant: 0.3, modes: Vec::new() },
        // 0.1·sin x₁·cos x₂ = 0.05 (sin(x₁+x₂) + sin(x₁-x₂))
        "trig1" => TrigPoly {
            constant: 0.0,
            modes: vec![mode(0.05, 1, 1, -FRAC_PI_2), mode(0.05, 1, -1, -FRAC_PI_2)],
        },
        "trig2" => TrigPoly {
            constant: 0.0,
            modes: vec![
                mode(0.08, 1, 0, 0.0),
                mode(0.06, 0, 2, -FRAC_PI_2),
                mode(0.05, 1, 1, 0.7),
            ],
        },
        "random" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7068_6921);
            TrigPoly::random(&mut rng, 4, 2, 0.2)
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown preset '{other}' (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    if p.amplitude() > MAX_AMPLITUDE {
        return Err(Error::InvalidParameter(format!("preset amplitude {} > {MAX_AMPLITUDE}", p.amplitude())));
    }
    Ok(p)
}

/// Metric `e^{2φ}δ` with `φ` from a named preset.
pub fn preset_metric(chart: &TorusChart, name: &str, seed: u64) -> Result<ConformalMetric> {
    ConformalMetric::new(chart.clone(), preset_phi(name, seed)?.sample(chart))
}

/// Band-limited random test function, e.g. for adjoint checks.
pub fn random_test_field(chart: &TorusChart, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7465_7374);
    let mut p = TrigPoly::random(&mut rng, 4, 2, 1.0);
    p.constant = rng.gen_range(-0.5..0.5);
    p.sample(chart)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig1_matches_product_form() {
        let c = TorusChart::square(4, 16).unwrap();
        let phi = preset_phi("trig1", 0).unwrap().sample(&c);
        let want = c.sample(|x, y| 0.1 * x.sin() * y.cos());
        assert!(phi.max_diff(&want) < 1e-15);
    }

    #[test]
    fn random_preset_is_seeded_and_bounded() {
        let a = preset_phi("random", 7).unwrap();
        assert_eq!(a, preset_phi("random", 7).unwrap());
        assert_ne!(a, preset_phi("random", 8).unwrap());
        for seed in 0..50 {
            let p = preset_phi("random", seed).unwrap();
            assert!(p.modes.len() <= 4 && p.amplitude() <= 0.2 + 1e-12);
            assert!(p.modes.iter().all(|m| m.k[0].abs() <= 2 && m.k[1].abs() <= 2));
        }
        assert!(preset_phi("spiky", 0).is_err());
    }
}

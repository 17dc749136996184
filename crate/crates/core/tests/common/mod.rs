#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resfluor::cli::RunConfig;
use resfluor::{FrequencyGrid, ModelConfig};

pub const SUITE_SEED: u64 = 0x5eed_1997;
pub const SUITE_SIZE: usize = 200;

/// Λ configs with Ω ∈ [0.1, 20], γ₂ ∈ [0.1, 5], Δ ∈ [−10, 10] and
/// |Δ₁ − Δ₂| ≥ 0.5, in units of γ₁.
pub fn random_lambda_suite(seed: u64, n: usize) -> Vec<ModelConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let rabi_1 = rng.random_range(0.1..=20.0);
            let rabi_2 = rng.random_range(0.1..=20.0);
            let gamma_2 = rng.random_range(0.1..=5.0);
            let detuning_1: f64 = rng.random_range(-10.0..=10.0);
            let detuning_2 = loop {
                let d: f64 = rng.random_range(-10.0..=10.0);
                if (d - detuning_1).abs() >= 0.5 {
                    break d;
                }
            };
            ModelConfig::lambda(rabi_1, rabi_2, detuning_1, detuning_2, 1.0, gamma_2)
        })
        .collect()
}

/// 1001 points over ±(max Rabi + 10γ₁).
pub fn suite_grid(cfg: &ModelConfig) -> FrequencyGrid {
    FrequencyGrid::symmetric(cfg.max_rabi() + 10.0 * cfg.gamma_1, 1001).unwrap()
}

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Every shipped config, sorted by file name.
pub fn shipped_configs() -> Vec<(String, RunConfig)> {
    let mut paths: Vec<_> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, RunConfig::load(&p).unwrap())
        })
        .collect()
}

#![allow(dead_code)]

use std::sync::OnceLock;

use asi_core::model::{train, ModelParams, TrainConfig};
use asi_core::synthetic::{bump_dataset, BumpConfig};
use asi_core::Dataset;

pub const TRAIN_SEED: u64 = 1;
pub const TEST_SEED: u64 = 2;

pub struct Desk {
    pub train: Dataset,
    pub test: Dataset,
    pub model: ModelParams,
}

pub fn bump(samples: usize, seed: u64) -> Dataset {
    bump_dataset(&BumpConfig {
        samples,
        seed,
        ..BumpConfig::default()
    })
    .unwrap()
}

pub fn train_desk() -> Desk {
    let train_set = bump(500, TRAIN_SEED);
    let test = bump(200, TEST_SEED);
    let model = train(&train_set, &TrainConfig::default()).unwrap();
    Desk {
        train: train_set,
        test,
        model,
    }
}

/// The desk model trained once per test binary.
pub fn desk() -> &'static Desk {
    static DESK: OnceLock<Desk> = OnceLock::new();
    DESK.get_or_init(train_desk)
}

/// Prints the one-line verdict for a criterion and panics on FAIL.
pub fn verdict(name: &str, pass: bool, detail: String) {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    if !pass {
        panic!("{name}");
    }
}

//! Shared fixtures for the criterion benches.

use qreg_core::{generate_synthetic, Dataset, SyntheticSpec};

/// Seeded synthetic instance with unit noise.
pub fn instance(n: usize, d: usize, seed: u64) -> Dataset {
    generate_synthetic(&SyntheticSpec::new(n, d, seed))
        .expect("valid synthetic spec")
        .dataset
}

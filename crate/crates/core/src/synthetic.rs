//! Seeded surrogate dataset with the benchmark's shape: 392 balanced rows
//! over the 15 standard factors, with signal planted in 9 of them and the
//! remaining 6 drawn independently of the label.
//!
//! The surrogate stands in for the (unshipped) field survey data in
//! end-to-end tests: a feature-reduction run that drops the 6 noise
//! columns should not lose cross-validated score, and SLOPE — given the
//! strongest planted effect — should surface at the top of any reasonable
//! importance ranking.

use rand_chacha::ChaCha8Rng;

use crate::dataset::{DataTable, FeatureSchema};
use crate::seed::{self, TAG_SYNTHETIC};

/// Features whose distribution shifts with the label.
pub const PLANTED: [&str; 9] = [
    "PROFILE",
    "CHANGE",
    "ELEVATION",
    "SLOPE",
    "TWI",
    "DRAINAGE",
    "RAINFALL",
    "ROAD",
    "GEOLOGY",
];

/// Label-independent features.
pub const NOISE: [&str; 6] = ["PLAN", "LANDUSE", "ASPECT", "SPI", "NDVI", "FAULTLINES"];

/// Rows per class.
pub const ROWS_PER_CLASS: usize = 196;

/// Continuous planted features as (name, base mean, scale, effect): values
/// are `base + scale·(z + effect·y)` with `z` standard normal, so `effect`
/// is the class separation in standard deviations.
const CONTINUOUS_EFFECTS: [(&str, f64, f64, f64); 7] = [
    ("SLOPE", 12.0, 6.0, 2.0),
    ("ELEVATION", 400.0, 120.0, 1.6),
    ("ROAD", 1500.0, 450.0, -1.4),
    ("TWI", 6.5, 2.0, 1.2),
    ("RAINFALL", 2600.0, 400.0, 1.0),
    ("DRAINAGE", 1200.0, 300.0, -0.9),
    ("PROFILE", 0.0, 0.9, 0.8),
];

/// One standard normal draw (Box-Muller; the complement keeps the log
/// argument away from zero).
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    use rand::Rng;
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Draw a 1-based category from explicit class probabilities.
fn category(rng: &mut ChaCha8Rng, probs: &[f64]) -> f64 {
    use rand::Rng;
    let u = rng.random::<f64>();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return (i + 1) as f64;
        }
    }
    probs.len() as f64
}

/// Generate the surrogate. The same seed always yields the same table.
pub fn surrogate_table(seed: u64) -> DataTable {
    use rand::Rng;
    let schema = FeatureSchema::default_factors();
    let mut rng = seed::rng(seed, &[TAG_SYNTHETIC]);
    let mut rows = Vec::with_capacity(2 * ROWS_PER_CLASS);
    let mut labels = Vec::with_capacity(2 * ROWS_PER_CLASS);
    for class in [0u8, 1u8] {
        let y = f64::from(class);
        for _ in 0..ROWS_PER_CLASS {
            let mut row = vec![0.0; schema.names().len()];
            for &(name, base, scale, effect) in &CONTINUOUS_EFFECTS {
                row[schema.index_of(name).unwrap()] =
                    base + scale * (normal(&mut rng) + effect * y);
            }
            // Class-conditional category mixes.
            row[schema.index_of("CHANGE").unwrap()] = if class == 0 {
                category(&mut rng, &[0.60, 0.30, 0.10])
            } else {
                category(&mut rng, &[0.15, 0.35, 0.50])
            };
            row[schema.index_of("GEOLOGY").unwrap()] = if class == 0 {
                category(&mut rng, &[0.30, 0.30, 0.20, 0.15, 0.05])
            } else {
                category(&mut rng, &[0.05, 0.15, 0.20, 0.30, 0.30])
            };
            // Label-independent columns.
            row[schema.index_of("PLAN").unwrap()] = 0.7 * normal(&mut rng);
            row[schema.index_of("LANDUSE").unwrap()] =
                category(&mut rng, &[0.25, 0.25, 0.25, 0.25]);
            row[schema.index_of("ASPECT").unwrap()] = 360.0 * rng.random::<f64>();
            row[schema.index_of("SPI").unwrap()] = 10.0 * normal(&mut rng).abs();
            row[schema.index_of("NDVI").unwrap()] = 2.0 * rng.random::<f64>() - 1.0;
            row[schema.index_of("FAULTLINES").unwrap()] = 800.0 * normal(&mut rng).abs();
            rows.push(row);
            labels.push(class);
        }
    }
    DataTable::new(schema, rows, labels).expect("surrogate construction is infallible")
}

//! Small named configurations used by tests, benches and the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactlat::{validate_config, validate_config_with_dual, IntMatrix, WeightConfig};

fn mat(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), rows[0].len())
}

/// `B = [1, 1, -1, -1]` with the square as `A`.
pub fn gauss() -> WeightConfig {
    validate_config_with_dual(&mat(&[&[1, 1, -1, -1]]), &mat(&[&[1, 0, 1, 0], &[0, 1, 0, 1], &[1, 0, 0, 1]]))
        .expect("valid")
}

/// `B = [2, -1, -1]`.
pub fn two_one_one() -> WeightConfig {
    validate_config_with_dual(&mat(&[&[2, -1, -1]]), &mat(&[&[1, 1, 1], &[0, 1, -1]])).expect("valid")
}

/// `B = [1, -1]`, the smallest quasi-symmetric configuration.
pub fn pair() -> WeightConfig {
    validate_config(&mat(&[&[1, -1]])).expect("valid")
}

/// Three opposite pairs in the plane.
pub fn squarecross() -> WeightConfig {
    validate_config(&mat(&[&[1, -1, 0, 0, 1, -1], &[0, 0, 1, -1, 1, -1]])).expect("valid")
}

/// A random quasi-symmetric `2 x 8` configuration: four opposite pairs
/// `±v` with small entries, redrawn until the lattice condition holds.
pub fn random_2x8(seed: u64) -> WeightConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut cols: Vec<Vec<i64>> = Vec::new();
        for _ in 0..4 {
            let v = loop {
                let v = vec![rng.random_range(-2..=2), rng.random_range(-2..=2)];
                if v != [0, 0] {
                    break v;
                }
            };
            cols.push(v.clone());
            cols.push(v.iter().map(|x| -x).collect());
        }
        let b = IntMatrix::from_cols(&cols, 2);
        if let Ok(cfg) = validate_config(&b) {
            return cfg;
        }
    }
}

/// Look up a named instance.
pub fn by_name(name: &str) -> Option<WeightConfig> {
    match name {
        "gauss" => Some(gauss()),
        "two_one_one" => Some(two_one_one()),
        "pair" => Some(pair()),
        "squarecross" => Some(squarecross()),
        _ => None,
    }
}

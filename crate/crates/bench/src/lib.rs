//! Fixtures shared by the benchmarks.

use gkz_core::arrangement::{face_complex, FaceComplex};
use gkz_core::instances::by_name;
use gkz_core::rational::rat;
use gkz_core::WeightConfig;

pub use gkz_core::analytic::{ConnectionOptions, MbParams, Quadrature};

/// A named instance together with its face complex.
pub fn fixture(name: &str) -> (WeightConfig, FaceComplex) {
    let cfg = by_name(name).unwrap_or_else(|| panic!("unknown instance {name}"));
    let fc = face_complex(&cfg, &rat(1, 1)).expect("face complex");
    (cfg, fc)
}

/// Canonical chambers of `fc` and one neighbor of the first.
pub fn first_wall(fc: &FaceComplex) -> (Vec<i64>, Vec<i64>) {
    let c = fc.faces[fc.chambers[0]].sign_vector.clone();
    let (_, other) = fc.walls_of(&c).into_iter().next().expect("a wall");
    (c, other)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_walls() {
        for name in ["gauss", "two_one_one", "squarecross"] {
            let (_, fc) = fixture(name);
            let (a, b) = first_wall(&fc);
            assert!(fc.common_wall(&a, &b).is_some());
        }
    }
}

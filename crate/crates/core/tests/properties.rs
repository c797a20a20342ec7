//! Cross-module properties on randomly generated configurations.

use gkz_core::analytic::{gamma, ln_gamma, numeric_wall_matrix, relative_gap, ConnectionOptions};
use gkz_core::arrangement::{face_complex, union_check, FaceComplex};
use gkz_core::instances::random_2x8;
use gkz_core::ksdata::CoeffRing;
use gkz_core::ktheory::{phi_matrix, psi_matrix, HilbertTable};
use gkz_core::laurent::GroupRingElement;
use gkz_core::rational::{gcd_slice, rat};
use gkz_core::resonance::{
    f_element, is_nonresonant, is_nonresonant_direct, is_totally_nonresonant, normalized_volume, re_in_negative_cone,
};
use gkz_core::schober_k0::{relation_suite, sides_agree, wall_crossing_matrix, wall_crossing_matrix_at, Side};
use gkz_core::verify::lattice_identities;
use gkz_core::{validate_config, IntMatrix, WeightConfig};
use num_complex::Complex64;
use proptest::prelude::*;

/// Completes the nonzero `entries` to a zero-sum primitive row.
fn rank_one(entries: &[i64]) -> Option<WeightConfig> {
    let mut row: Vec<i64> = entries.iter().copied().filter(|&x| x != 0).collect();
    let s: i64 = row.iter().sum();
    if s != 0 {
        row.push(-s);
    }
    if row.len() < 2 || gcd_slice(&row) != 1 {
        return None;
    }
    validate_config(&IntMatrix::from_rows(&[row.clone()], row.len())).ok()
}

fn fc_of(cfg: &WeightConfig) -> FaceComplex {
    face_complex(cfg, &rat(1, 1)).unwrap()
}

fn chambers(fc: &FaceComplex) -> Vec<Vec<i64>> {
    fc.chambers.iter().map(|&c| fc.faces[c].sign_vector.clone()).collect()
}

fn config() -> impl Strategy<Value = WeightConfig> {
    prop::collection::vec(-3i64..=3, 2..=4).prop_filter_map("not a valid rank-one row", |v| rank_one(&v))
}

/// `alpha = A gamma` from the first `d` entries of `g`.
fn alpha_from(cfg: &WeightConfig, g: &[(f64, f64)]) -> Vec<Complex64> {
    (0..cfg.m()).map(|k| (0..cfg.d()).map(|i| Complex64::new(g[i].0, g[i].1) * cfg.a_col(i)[k] as f64).sum()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn splittings_satisfy_identities(cfg in config()) {
        prop_assert_eq!(lattice_identities(&cfg), Ok(()));
    }

    #[test]
    fn chamber_rank_is_volume(cfg in config()) {
        let fc = fc_of(&cfg);
        let vol = normalized_volume(&cfg);
        for c in chambers(&fc) {
            prop_assert_eq!(fc.lattice_points(&c).len() as i64, vol);
            prop_assert_eq!(fc.neg_lattice_points(&c).len() as i64, vol);
        }
    }

    #[test]
    fn union_property_on_vertices(cfg in config()) {
        let fc = fc_of(&cfg);
        for f in fc.faces.iter().filter(|f| f.dim == 0) {
            prop_assert!(union_check(&fc, &f.sign_vector).unwrap());
        }
    }

    #[test]
    fn relations_and_sides(cfg in config()) {
        let fc = fc_of(&cfg);
        for side in [Side::Analytic, Side::KTheory] {
            let r = relation_suite(&cfg, &fc, side).unwrap();
            prop_assert!(r.passed(), "{:?}", r.failures);
        }
        for c in chambers(&fc) {
            for (_, o) in fc.walls_of(&c) {
                prop_assert!(sides_agree(&cfg, &fc, &c, &o).unwrap());
            }
        }
    }

    #[test]
    fn wall_determinants_are_units(cfg in config()) {
        let fc = fc_of(&cfg);
        for c in chambers(&fc) {
            for (_, o) in fc.walls_of(&c) {
                let w = wall_crossing_matrix(&cfg, &fc, &c, &o, Side::Analytic).unwrap();
                let det = GroupRingElement::det(&w.entries);
                prop_assert!(det.as_monomial().is_some_and(|(c, _)| c.abs() == 1), "det = {}", det);
            }
        }
    }

    #[test]
    fn psi_phi_inverse(cfg in config()) {
        let fc = fc_of(&cfg);
        let table = HilbertTable::new(&cfg, 4);
        for f in &fc.faces {
            let mut l = fc.neg_lattice_points(&f.sign_vector);
            l.sort();
            prop_assert!(psi_matrix(&table, &l).mul(&phi_matrix(&table, &l)).unwrap().is_identity());
        }
    }

    #[test]
    fn resonance_oracles_agree(cfg in config(), re in prop::collection::vec(-6i64..=6, 4), frac in prop::collection::vec(0.0f64..1.0, 4)) {
        let alpha: Vec<Complex64> = (0..cfg.m())
            .map(|k| Complex64::new(if frac[k] < 0.5 { re[k] as f64 / 2.0 } else { frac[k] * re[k] as f64 }, 0.0))
            .collect();
        prop_assert_eq!(is_nonresonant(&cfg, &alpha), is_nonresonant_direct(&cfg, &alpha));
        prop_assert_eq!(f_element(&cfg).evaluate(&vec![Complex64::new(1.0, 0.0); cfg.m()]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn gamma_recurrence(re in -6.0f64..6.0, im in -4.0f64..4.0) {
        let z = Complex64::new(re, im);
        prop_assume!(im.abs() > 1e-3 || (re - re.round()).abs() > 1e-3);
        let lhs = gamma(z + 1.0);
        let rhs = z * gamma(z);
        prop_assert!((lhs - rhs).norm() <= 1e-11 * lhs.norm().max(1e-300));
        let refl = ln_gamma(z).exp();
        prop_assert!((refl - gamma(z)).norm() <= 1e-11 * refl.norm().max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn numeric_matches_exact_walls(
        cfg in config().prop_filter("small", |c| c.d() <= 4),
        g in prop::collection::vec((-0.95f64..-0.05, -0.3f64..0.3), 5),
    ) {
        let alpha = alpha_from(&cfg, &g);
        prop_assume!(is_totally_nonresonant(&cfg, &alpha) && re_in_negative_cone(&cfg, &alpha));
        let fc = fc_of(&cfg);
        let opts = ConnectionOptions::default();
        for c in chambers(&fc) {
            for (_, o) in fc.walls_of(&c) {
                let num = numeric_wall_matrix(&cfg, &fc, &c, &o, &alpha, &opts).unwrap();
                let exact = wall_crossing_matrix_at(&cfg, &fc, &c, &o, Side::Analytic, &alpha).unwrap();
                let gap = relative_gap(&num, &exact);
                prop_assert!(gap < 1e-6, "{:?} -> {:?}: {}", c, o, gap);
            }
        }
    }
}

#[test]
fn random_rank_two_configs_are_consistent() {
    for seed in [1, 7, 99] {
        let cfg = random_2x8(seed);
        assert_eq!(lattice_identities(&cfg), Ok(()));
        let fc = fc_of(&cfg);
        let vol = normalized_volume(&cfg);
        for c in chambers(&fc) {
            assert_eq!(fc.lattice_points(&c).len() as i64, vol);
        }
        for f in fc.faces.iter().filter(|f| f.dim < fc.n) {
            assert!(union_check(&fc, &f.sign_vector).unwrap());
        }
    }
}

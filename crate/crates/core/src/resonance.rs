//! The cone `sigma` spanned by the columns of `A`, its dual, resonance tests,
//! the localizing element `F` and the normalized volume of `conv(A)`.

use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::cone::{abs_det, facets_by_subsets, normal_vector, pulling_triangulation, rank_i64, rays_from_inequalities};
use crate::exactlat::{subsets, WeightConfig};
use crate::laurent::GroupRingElement;
use crate::lp::{maximize, Constraint, LpOutcome, Rel};
use crate::rational::{approx_f64, dot_i64, primitive, rat, to_f64, Rat};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ResonanceError {
    #[error("the cone spanned by A is not full-dimensional")]
    NotFullDimensional,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeDescription {
    pub rays: Vec<Vec<i64>>,
    pub facet_normals: Vec<Vec<i64>>,
    pub dim: usize,
}

/// How to decide whether a complex number is an integer.
#[derive(Clone, Copy, Debug)]
pub struct IntegralityPolicy {
    /// Tolerance used when the input is not recognized as rational.
    pub tol: f64,
    /// Largest denominator accepted when recognizing rationals.
    pub max_den: i64,
}

impl Default for IntegralityPolicy {
    fn default() -> Self {
        IntegralityPolicy { tol: 1e-9, max_den: 1_000_000 }
    }
}

/// Exact rational reading of `x` when it is a short fraction.
fn as_rational(x: f64, policy: &IntegralityPolicy) -> Option<Rat> {
    let r = approx_f64(x, policy.max_den);
    ((to_f64(&r) - x).abs() <= 1e-14 * (1.0 + x.abs())).then_some(r)
}

/// Is `<v, alpha>` an integer?
pub fn pairing_is_integral(v: &[i64], alpha: &[Complex64], policy: &IntegralityPolicy) -> bool {
    let re: Option<Vec<Rat>> = alpha.iter().map(|a| as_rational(a.re, policy)).collect();
    let im: Option<Vec<Rat>> = alpha.iter().map(|a| as_rational(a.im, policy)).collect();
    if let (Some(re), Some(im)) = (re, im) {
        let pr = v.iter().zip(&re).fold(Rat::zero(), |s, (k, x)| s + rat(*k, 1) * x);
        let pi = v.iter().zip(&im).fold(Rat::zero(), |s, (k, x)| s + rat(*k, 1) * x);
        return pi.is_zero() && pr.is_integer();
    }
    let z: Complex64 = v.iter().zip(alpha).map(|(k, a)| a * (*k as f64)).sum();
    z.im.abs() <= policy.tol && (z.re - z.re.round()).abs() <= policy.tol
}

/// Generators of the rays of the dual cone `{y : <y, a_i> >= 0}`.
pub fn dual_cone_rays(cfg: &WeightConfig) -> Result<Vec<Vec<i64>>, ResonanceError> {
    rays_from_inequalities(cfg.a_cols(), cfg.m()).ok_or(ResonanceError::NotFullDimensional)
}

/// Rays and facets of `sigma`.
pub fn cone_of_a(cfg: &WeightConfig) -> Result<ConeDescription, ResonanceError> {
    let m = cfg.m();
    let facet_normals = dual_cone_rays(cfg)?;
    let mut rays: Vec<Vec<i64>> = Vec::new();
    for a in cfg.a_cols() {
        let tight: Vec<&[i64]> =
            facet_normals.iter().filter(|f| dot_i64(f, a) == 0).map(|f| f.as_slice()).collect();
        let extreme = if m == 1 { true } else { rank_i64(&tight) == m - 1 };
        let p = primitive(a);
        if extreme && !rays.contains(&p) {
            rays.push(p);
        }
    }
    rays.sort();
    Ok(ConeDescription { rays, facet_normals, dim: m })
}

/// All pairings `<m_j, alpha>` are non-integral.
pub fn is_nonresonant(cfg: &WeightConfig, alpha: &[Complex64]) -> bool {
    is_nonresonant_with(cfg, alpha, &IntegralityPolicy::default())
}

pub fn is_nonresonant_with(cfg: &WeightConfig, alpha: &[Complex64], policy: &IntegralityPolicy) -> bool {
    let rays = dual_cone_rays(cfg).expect("valid configurations have full-dimensional cones");
    rays.iter().all(|r| !pairing_is_integral(r, alpha, policy))
}

/// Same test through facet normals found by brute force over subsets of the `a_i`.
pub fn is_nonresonant_direct(cfg: &WeightConfig, alpha: &[Complex64]) -> bool {
    let policy = IntegralityPolicy::default();
    facets_by_subsets(cfg.a_cols(), cfg.m()).iter().all(|f| !pairing_is_integral(f, alpha, &policy))
}

/// Normals of all hyperplanes spanned by subsets of the `a_i`.
pub fn spanned_hyperplane_normals(cfg: &WeightConfig) -> Vec<Vec<i64>> {
    let m = cfg.m();
    if m == 0 {
        return Vec::new();
    }
    let cols = cfg.a_cols();
    let mut out = std::collections::BTreeSet::new();
    for s in subsets(cols.len(), m - 1) {
        let vs: Vec<&[i64]> = s.iter().map(|&i| cols[i].as_slice()).collect();
        if m > 1 && rank_i64(&vs) != m - 1 {
            continue;
        }
        if let Some(n) = normal_vector(&vs, m) {
            let first = n.iter().find(|&&x| x != 0).copied().unwrap_or(1);
            out.insert(if first < 0 { n.iter().map(|x| -x).collect() } else { n });
        }
    }
    out.into_iter().collect()
}

pub fn is_totally_nonresonant(cfg: &WeightConfig, alpha: &[Complex64]) -> bool {
    let policy = IntegralityPolicy::default();
    spanned_hyperplane_normals(cfg).iter().all(|n| !pairing_is_integral(n, alpha, &policy))
}

/// `Re alpha` is a combination of the `a_i` with strictly negative coefficients.
pub fn re_in_negative_cone(cfg: &WeightConfig, alpha: &[Complex64]) -> bool {
    let policy = IntegralityPolicy::default();
    let re: Vec<Rat> = alpha.iter().map(|a| as_rational(a.re, &policy).unwrap_or_else(|| approx_f64(a.re, policy.max_den))).collect();
    negative_cone_margin(cfg, &re).is_some_and(|t| t > Rat::zero())
}

/// Largest `t <= 1` such that `re = sum c_i a_i` with every `c_i <= -t`.
pub fn negative_cone_margin(cfg: &WeightConfig, re: &[Rat]) -> Option<Rat> {
    let d = cfg.d();
    let m = cfg.m();
    let mut cons = Vec::new();
    for k in 0..m {
        let mut row: Vec<Rat> = (0..d).map(|i| rat(cfg.a_col(i)[k], 1)).collect();
        row.push(Rat::zero());
        cons.push(Constraint::new(row, Rel::Eq, re[k].clone()));
    }
    for i in 0..d {
        let mut row = vec![Rat::zero(); d + 1];
        row[i] = Rat::one();
        row[d] = Rat::one();
        cons.push(Constraint::new(row, Rel::Le, Rat::zero()));
    }
    let mut cap = vec![Rat::zero(); d + 1];
    cap[d] = Rat::one();
    cons.push(Constraint::new(cap.clone(), Rel::Le, Rat::one()));
    match maximize(d + 1, &cons, &cap) {
        LpOutcome::Optimal { value, .. } => Some(value),
        _ => None,
    }
}

/// Normalized volume of `conv(a_1, .., a_d)` in the hyperplane `<h_cov, .> = 1`.
pub fn normalized_volume(cfg: &WeightConfig) -> i64 {
    let cone = cone_of_a(cfg).expect("full-dimensional");
    if cfg.m() == 0 {
        return 1;
    }
    let tri = pulling_triangulation(&cone.rays, &cone.facet_normals);
    tri.iter().map(|s| abs_det(&s.iter().map(|&i| cone.rays[i].clone()).collect::<Vec<_>>())).sum()
}

/// `F = prod_j (1 - u^{m_j})` over the dual-cone ray generators.
pub fn f_element(cfg: &WeightConfig) -> GroupRingElement {
    f_factors(cfg).iter().fold(GroupRingElement::one(), |acc, r| {
        &acc * &(&GroupRingElement::one() - &GroupRingElement::u(r))
    })
}

/// The exponents `m_j` of the factors of `F`.
pub fn f_factors(cfg: &WeightConfig) -> Vec<Vec<i64>> {
    dual_cone_rays(cfg).expect("full-dimensional")
}

/// `h = exp(-2 pi i alpha)` coordinatewise.
pub fn h_of_alpha(alpha: &[Complex64]) -> Vec<Complex64> {
    alpha.iter().map(|a| (Complex64::new(0.0, -2.0 * std::f64::consts::PI) * a).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlat::{validate_config, validate_config_with_dual, IntMatrix};
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), rows[0].len())
    }

    fn gauss() -> WeightConfig {
        validate_config_with_dual(&mat(&[&[1, 1, -1, -1]]), &mat(&[&[1, 0, 1, 0], &[0, 1, 0, 1], &[1, 0, 0, 1]])).unwrap()
    }

    fn two_one_one() -> WeightConfig {
        validate_config_with_dual(&mat(&[&[2, -1, -1]]), &mat(&[&[1, 1, 1], &[0, 1, -1]])).unwrap()
    }

    fn squarecross() -> WeightConfig {
        validate_config(&mat(&[&[1, -1, 0, 0, 1, -1], &[0, 0, 1, -1, 1, -1]])).unwrap()
    }

    fn c(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn gauss_dual_rays() {
        assert_eq!(dual_cone_rays(&gauss()).unwrap(), vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0], vec![1, 1, -1]]);
    }

    #[test]
    fn two_one_one_dual_rays() {
        assert_eq!(dual_cone_rays(&two_one_one()).unwrap(), vec![vec![1, -1], vec![1, 1]]);
        assert_eq!(cone_of_a(&two_one_one()).unwrap().rays, vec![vec![1, -1], vec![1, 1]]);
    }

    #[test]
    fn simplicial_rays_are_inverse_transpose_rows() {
        let rows = vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]];
        let mut rays = rays_from_inequalities(&rows, 3).unwrap();
        rays.sort();
        // columns of the inverse: (1,0,0), (-1,1,0), (1,-1,1)
        assert_eq!(rays, vec![vec![-1, 1, 0], vec![1, -1, 1], vec![1, 0, 0]]);
        assert_eq!(dual_cone_rays(&validate_config(&mat(&[&[1, -1]])).unwrap()).unwrap(), vec![vec![1]]);
    }

    #[test]
    fn gauss_resonance_examples() {
        let g = gauss();
        assert!(is_nonresonant(&g, &c(&[-0.3, -0.4, -0.2])));
        assert!(!is_nonresonant(&g, &c(&[-0.5, -0.5, -1.0])));
        assert!(!is_nonresonant(&g, &c(&[1.0, 2.0, -3.0])));
        assert!(!is_nonresonant_direct(&g, &c(&[0.0, 0.0, 0.0])));
        assert!(!is_totally_nonresonant(&g, &c(&[1.0, 0.0, 2.0])));
    }

    #[test]
    fn gauss_total_nonresonance_fixture() {
        // Spanned hyperplanes of the square's vertex cone: the 4 facets and the
        // two diagonals (normals (1,-1,0)... up to sign).
        let g = gauss();
        let normals = spanned_hyperplane_normals(&g);
        assert_eq!(normals.len(), 6);
        assert!(is_totally_nonresonant(&g, &c(&[-0.3, -0.4, -0.2])));
    }

    #[test]
    fn negative_cone() {
        let g = gauss();
        let theta = g.theta();
        let minus: Vec<Complex64> = theta.iter().map(|&x| Complex64::new(-(x as f64), 0.0)).collect();
        assert!(re_in_negative_cone(&g, &minus));
        assert!(!re_in_negative_cone(&g, &c(&[0.0, 0.0, 0.0])));
        assert!(re_in_negative_cone(&g, &c(&[-0.3, -0.4, -0.2])));
    }

    #[test]
    fn volumes() {
        assert_eq!(normalized_volume(&gauss()), 2);
        assert_eq!(normalized_volume(&two_one_one()), 2);
        assert_eq!(normalized_volume(&squarecross()), 3);
    }

    #[test]
    fn f_of_gauss() {
        let f = f_element(&gauss());
        let one = GroupRingElement::one();
        let expect = [vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]]
            .iter()
            .fold(one.clone(), |acc, r| &acc * &(&one - &GroupRingElement::u(r)));
        assert_eq!(f, expect);
        assert_eq!(f.augmentation(), 0);
        let h = h_of_alpha(&c(&[-0.3, -0.4, -0.2]));
        assert!(f.evaluate(&h).norm() > 1e-3);
    }

    fn arb_alpha(m: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-20i64..20, 1i64..6, prop::bool::weighted(0.2)), m).prop_map(|v| {
            v.into_iter()
                .map(|(a, b, complex)| Complex64::new(a as f64 / b as f64, if complex { 0.25 } else { 0.0 }))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn ray_and_facet_tests_agree(alpha in arb_alpha(3)) {
            let g = gauss();
            prop_assert_eq!(is_nonresonant(&g, &alpha), is_nonresonant_direct(&g, &alpha));
            if is_totally_nonresonant(&g, &alpha) {
                prop_assert!(is_nonresonant(&g, &alpha));
            }
        }

        #[test]
        fn f_vanishes_exactly_on_resonance(alpha in arb_alpha(3)) {
            let g = gauss();
            let h = h_of_alpha(&alpha);
            let vanishes = f_factors(&g).iter().any(|r| {
                let v = GroupRingElement::one() - GroupRingElement::u(r);
                v.evaluate(&h).norm() < 1e-9
            });
            prop_assert_eq!(vanishes, !is_nonresonant(&g, &alpha));
        }

        #[test]
        fn sign_flip_of_rays_is_harmless(alpha in arb_alpha(3)) {
            let g = gauss();
            let pol = IntegralityPolicy::default();
            let flipped = dual_cone_rays(&g).unwrap().iter().all(|r| {
                let neg: Vec<i64> = r.iter().map(|x| -x).collect();
                !pairing_is_integral(&neg, &alpha, &pol)
            });
            prop_assert_eq!(flipped, is_nonresonant(&g, &alpha));
        }
    }
}

//! JSON shapes shared by all commands.

use gkz_core::ksdata::{Label, LabeledMatrix};
use gkz_core::ktheory::{SeriesMatrix, TruncatedSeries};
use gkz_core::laurent::GroupRingElement;
use gkz_core::rational::Rat;
use gkz_core::WeightConfig;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: i64,
    pub exp: Vec<i64>,
}

pub type Poly = Vec<Monomial>;

/// `[re, im]`.
pub type Complex = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradedPart {
    pub degree: usize,
    pub terms: Poly,
}

/// Nonzero homogeneous parts of a truncated series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub order: usize,
    pub parts: Vec<GradedPart>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    pub row_labels: Vec<Label>,
    pub col_labels: Vec<Label>,
    pub entries: Vec<Vec<T>>,
}

pub fn poly(x: &GroupRingElement, m: usize) -> Poly {
    x.terms_padded(m).into_iter().map(|(exp, coeff)| Monomial { coeff, exp }).collect()
}

pub fn complex(z: Complex64) -> Complex {
    [z.re, z.im]
}

pub fn complexes(v: &[Complex64]) -> Vec<Complex> {
    v.iter().copied().map(complex).collect()
}

pub fn rational(r: &Rat) -> String {
    r.to_string()
}

pub fn rationals(v: &[Rat]) -> Vec<String> {
    v.iter().map(rational).collect()
}

pub fn series(s: &TruncatedSeries, m: usize) -> Series {
    let parts = (0..=s.order())
        .filter(|&k| !s.part(k).is_zero())
        .map(|k| GradedPart { degree: k, terms: poly(s.part(k), m) })
        .collect();
    Series { order: s.order(), parts }
}

pub fn labeled<R, T>(x: &LabeledMatrix<R>, f: impl Fn(&R) -> T) -> Matrix<T> {
    Matrix {
        row_labels: x.row_labels.clone(),
        col_labels: x.col_labels.clone(),
        entries: x.entries.iter().map(|r| r.iter().map(&f).collect()).collect(),
    }
}

pub fn symbolic(x: &LabeledMatrix<GroupRingElement>, m: usize) -> Matrix<Poly> {
    labeled(x, |e| poly(e, m))
}

pub fn numeric(x: &LabeledMatrix<Complex64>) -> Matrix<Complex> {
    labeled(x, |z| complex(*z))
}

pub fn series_matrix(x: &SeriesMatrix, m: usize) -> Matrix<Series> {
    Matrix {
        row_labels: x.row_labels.clone(),
        col_labels: x.col_labels.clone(),
        entries: x.entries.iter().map(|r| r.iter().map(|s| series(s, m)).collect()).collect(),
    }
}

/// Every convention a result depends on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    pub s_iota: Vec<Vec<i64>>,
    #[serde(rename = "K")]
    pub k: Vec<Vec<i64>>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<i64>>,
    pub orientation: String,
    pub exponent_sign: i64,
    pub q: String,
    pub labels: String,
    pub indices: String,
    pub matrices: String,
}

impl Conventions {
    pub fn of(cfg: &WeightConfig) -> Self {
        Conventions {
            a: cfg.a.to_rows_i64(),
            s_iota: cfg.s_iota().to_rows_i64(),
            k: cfg.k().to_rows_i64(),
            p: cfg.p().to_rows_i64(),
            orientation: "J = { j : L_0(b_j) > 0 }, L the affine equation of the wall positive on the target chamber".into(),
            exponent_sign: -1,
            q: "q_j = u^{K_j}; at alpha, q_j = exp(-2 pi i (K alpha)_j)".into(),
            labels: "chi in Z^d normalized to (B chi, u^{-P chi}); analytic side uses chi + b_S, K-theory side chi - b_S".into(),
            indices: "0-based".into(),
            matrices: "columns index the source basis, rows the target basis".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub instance: String,
    pub seed: u64,
    pub truncation: usize,
    pub conventions: Conventions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Output<T> {
    pub metadata: Metadata,
    pub result: T,
}

#[cfg(test)]
mod tests {
    use super::*;
    use gkz_core::instances::gauss;

    #[test]
    fn monomials_are_padded() {
        let x = GroupRingElement::from_terms(vec![(vec![1], 2), (vec![], -1)]);
        let p = poly(&x, 3);
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|t| t.exp.len() == 3));
        assert!(p.contains(&Monomial { coeff: 2, exp: vec![1, 0, 0] }));
    }

    #[test]
    fn series_skips_zero_parts() {
        let mut s = TruncatedSeries::zero(3);
        s.add_term(2, vec![0, 1, 0], 1);
        let j = series(&s, 3);
        assert_eq!(j.parts.len(), 1);
        assert_eq!(j.parts[0].degree, 2);
    }

    #[test]
    fn conventions_match_config() {
        let cfg = gauss();
        let c = Conventions::of(&cfg);
        assert_eq!(c.a, vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1], vec![1, 0, 0, 1]]);
        assert_eq!(c.exponent_sign, -1);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Conventions>(&s).unwrap(), c);
    }
}

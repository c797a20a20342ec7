//! Graded Hilbert series of morphism spaces between projective classes, the
//! inverse base change to simple classes, the duality pairing and exact
//! rational forms of the Hilbert series.
//!
//! For labels `a, b` in `Z^n` the series is
//! `H(a -> b) = sum u^{P m}` over monomials `m in N^d` with `B m = b - a`.
//! It is graded by the total degree `|m|`, which equals
//! `<theta, P m> + <s_iota^T 1, b - a>` and is additive under composition.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::cone::{all_faces, open_parallelepiped_points, pulling_triangulation, rays_from_inequalities};
use crate::exactlat::WeightConfig;
use crate::ksdata::{is_unit_after_localizing, CoeffRing, Label, LabeledMatrix};
use crate::laurent::GroupRingElement;
use crate::resonance::f_factors;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KtError {
    #[error("entry ({row:?}, {col:?}) changes between truncation orders {order} and {}", order + 1)]
    TruncationUnstable { row: Label, col: Label, order: usize },
    #[error("factor 1 - u^{factor:?} vanishes at h (|value| = {value:e})")]
    PoleAtH { factor: Vec<i64>, value: f64 },
    #[error("triangulation has {0} simplices, above the limit")]
    TriangulationTooLarge(usize),
    #[error("label sets do not match: {0}")]
    LabelMismatch(String),
}

/// Which sign the `X(H)`-exponent of a monomial `m` carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentSign {
    /// `u^{P m}`
    Standard,
    /// `u^{-P m}`, kept to exhibit failures of the duality check.
    Flipped,
}

/// A power series cut off above total degree `order`, stored by
/// homogeneous pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    parts: Vec<GroupRingElement>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries { parts: vec![GroupRingElement::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.parts[0] = GroupRingElement::one();
        s
    }

    pub fn order(&self) -> usize {
        self.parts.len() - 1
    }

    /// Homogeneous piece of degree `k`.
    pub fn part(&self, k: usize) -> &GroupRingElement {
        &self.parts[k]
    }

    pub fn add_term(&mut self, degree: usize, exp: Vec<i64>, coeff: i64) {
        if degree < self.parts.len() {
            self.parts[degree].add_term(exp, coeff);
        }
    }

    /// Sum of all pieces.
    pub fn total(&self) -> GroupRingElement {
        self.parts.iter().fold(GroupRingElement::zero(), |a, p| &a + p)
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut parts = self.parts.clone();
        parts.resize(order + 1, GroupRingElement::zero());
        TruncatedSeries { parts }
    }

    pub fn add(&self, o: &Self) -> Self {
        let k = self.order().min(o.order());
        TruncatedSeries { parts: (0..=k).map(|i| &self.parts[i] + &o.parts[i]).collect() }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { parts: self.parts.iter().map(|p| -p).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let k = self.order().min(o.order());
        let mut out = Self::zero(k);
        for (i, a) in self.parts.iter().enumerate().take(k + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.parts.iter().enumerate().take(k + 1 - i) {
                if !b.is_zero() {
                    out.parts[i + j] += &(a * b);
                }
            }
        }
        out
    }

    pub fn negate_exponents(&self) -> Self {
        TruncatedSeries { parts: self.parts.iter().map(|p| p.negate_exponents()).collect() }
    }

    /// Largest absolute coefficient.
    pub fn max_coeff(&self) -> i64 {
        self.parts.iter().flat_map(|p| p.terms().map(|(_, c)| c.abs())).max().unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.parts.iter().map(|p| p.len()).sum()
    }
}

/// A label-indexed matrix of truncated series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix {
    pub row_labels: Vec<Label>,
    pub col_labels: Vec<Label>,
    pub entries: Vec<Vec<TruncatedSeries>>,
    pub order: usize,
}

impl SeriesMatrix {
    pub fn identity(labels: &[Label], order: usize) -> Self {
        let k = labels.len();
        let entries = (0..k)
            .map(|i| (0..k).map(|j| if i == j { TruncatedSeries::one(order) } else { TruncatedSeries::zero(order) }).collect())
            .collect();
        SeriesMatrix { row_labels: labels.to_vec(), col_labels: labels.to_vec(), entries, order }
    }

    /// `self * rhs`, requiring `rhs.row_labels == self.col_labels`.
    pub fn mul(&self, rhs: &SeriesMatrix) -> Result<SeriesMatrix, KtError> {
        if self.col_labels != rhs.row_labels {
            return Err(KtError::LabelMismatch(format!("{:?} vs {:?}", self.col_labels, rhs.row_labels)));
        }
        let order = self.order.min(rhs.order);
        let entries = self
            .entries
            .iter()
            .map(|row| {
                (0..rhs.col_labels.len())
                    .map(|j| {
                        row.iter()
                            .zip(&rhs.entries)
                            .filter(|(a, b)| !a.is_zero() && !b[j].is_zero())
                            .fold(TruncatedSeries::zero(order), |acc, (a, b)| acc.add(&a.mul(&b[j])))
                    })
                    .collect()
            })
            .collect();
        Ok(SeriesMatrix { row_labels: self.row_labels.clone(), col_labels: rhs.col_labels.clone(), entries, order })
    }

    pub fn sub(&self, o: &SeriesMatrix) -> SeriesMatrix {
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()).collect();
        SeriesMatrix { entries, order: self.order.min(o.order), ..self.clone() }
    }

    pub fn transpose(&self) -> SeriesMatrix {
        let (r, c) = (self.row_labels.len(), self.col_labels.len());
        let entries = (0..c).map(|j| (0..r).map(|i| self.entries[i][j].clone()).collect()).collect();
        SeriesMatrix { row_labels: self.col_labels.clone(), col_labels: self.row_labels.clone(), entries, order: self.order }
    }

    pub fn truncate(&self, order: usize) -> SeriesMatrix {
        let entries = self.entries.iter().map(|r| r.iter().map(|x| x.truncate(order)).collect()).collect();
        SeriesMatrix { entries, order, ..self.clone() }
    }

    pub fn negate_exponents(&self) -> SeriesMatrix {
        let entries = self.entries.iter().map(|r| r.iter().map(|x| x.negate_exponents()).collect()).collect();
        SeriesMatrix { entries, ..self.clone() }
    }

    pub fn is_identity(&self) -> bool {
        self.row_labels == self.col_labels
            && self.entries.iter().enumerate().all(|(i, r)| {
                r.iter().enumerate().all(|(j, x)| if i == j { *x == TruncatedSeries::one(x.order()) } else { x.is_zero() })
            })
    }

    /// Sum of the graded pieces of every entry.
    pub fn total(&self) -> LabeledMatrix<GroupRingElement> {
        LabeledMatrix {
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
            entries: self.entries.iter().map(|r| r.iter().map(|x| x.total()).collect()).collect(),
        }
    }

    /// The top-degree pieces, as a matrix of Laurent polynomials.
    pub fn top(&self) -> LabeledMatrix<GroupRingElement> {
        LabeledMatrix {
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
            entries: self.entries.iter().map(|r| r.iter().map(|x| x.part(self.order).clone()).collect()).collect(),
        }
    }
}

/// All monomials of degree at most `order`, bucketed by their `B`-degree.
#[derive(Clone, Debug)]
pub struct HilbertTable {
    order: usize,
    sign: ExponentSign,
    buckets: HashMap<Vec<i64>, Vec<(Vec<i64>, usize)>>,
}

impl HilbertTable {
    pub fn new(cfg: &WeightConfig, order: usize) -> Self {
        Self::with_sign(cfg, order, ExponentSign::Standard)
    }

    pub fn with_sign(cfg: &WeightConfig, order: usize, sign: ExponentSign) -> Self {
        let (n, m) = (cfg.n(), cfg.m());
        let mut buckets: HashMap<Vec<i64>, Vec<(Vec<i64>, usize)>> = HashMap::new();
        let s = if sign == ExponentSign::Standard { 1 } else { -1 };
        #[allow(clippy::too_many_arguments)]
        fn rec(
            cfg: &WeightConfig,
            j: usize,
            left: usize,
            deg: usize,
            bm: &mut Vec<i64>,
            pm: &mut Vec<i64>,
            s: i64,
            out: &mut HashMap<Vec<i64>, Vec<(Vec<i64>, usize)>>,
        ) {
            if j == cfg.d() {
                out.entry(bm.clone()).or_default().push((pm.iter().map(|x| s * x).collect(), deg));
                return;
            }
            let (b, k) = (cfg.b_col(j).to_vec(), cfg.k_row(j).to_vec());
            for e in 0..=left {
                rec(cfg, j + 1, left - e, deg + e, bm, pm, s, out);
                bm.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                pm.iter_mut().zip(&k).for_each(|(x, y)| *x += y);
            }
            let t = (left + 1) as i64;
            bm.iter_mut().zip(&b).for_each(|(x, y)| *x -= t * y);
            pm.iter_mut().zip(&k).for_each(|(x, y)| *x -= t * y);
        }
        rec(cfg, 0, order, 0, &mut vec![0; n], &mut vec![0; m], s, &mut buckets);
        HilbertTable { order, sign, buckets }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sign(&self) -> ExponentSign {
        self.sign
    }

    /// `H(a -> b)` truncated at the table order.
    pub fn entry(&self, a: &[i64], b: &[i64]) -> TruncatedSeries {
        let key: Vec<i64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        let mut s = TruncatedSeries::zero(self.order);
        if let Some(list) = self.buckets.get(&key) {
            for (h, deg) in list {
                s.add_term(*deg, h.clone(), 1);
            }
        }
        s
    }

    /// Matrix with entry `H(r -> c)` in row `r`, column `c`.
    pub fn matrix(&self, rows: &[Label], cols: &[Label]) -> SeriesMatrix {
        let entries = rows.iter().map(|r| cols.iter().map(|c| self.entry(r, c)).collect()).collect();
        SeriesMatrix { row_labels: rows.to_vec(), col_labels: cols.to_vec(), entries, order: self.order }
    }
}

/// `H(chi1 -> chi2)` truncated at degree `order`.
pub fn hilbert_entry(cfg: &WeightConfig, chi1: &[i64], chi2: &[i64], order: usize) -> TruncatedSeries {
    HilbertTable::new(cfg, order).entry(chi1, chi2)
}

/// `Psi` on the labels of a face (the set `L_{-C}`).
pub fn psi_matrix(table: &HilbertTable, labels: &[Label]) -> SeriesMatrix {
    table.matrix(labels, labels)
}

/// `Phi = Psi^{-1}` by the Neumann series `sum_k (-E)^k`, `E = Psi - Id`.
pub fn phi_matrix(table: &HilbertTable, labels: &[Label]) -> SeriesMatrix {
    let n = table.order();
    let id = SeriesMatrix::identity(labels, n);
    let e = psi_matrix(table, labels).sub(&id);
    let mut phi = id.clone();
    for _ in 0..n {
        phi = id.sub(&e.mul(&phi).expect("square"));
    }
    phi
}

/// Gram matrix of the twisted pairing: rows `psi in -labels`, columns
/// `phi in labels`, entry `H(phi -> -psi)`.
pub fn pairing_gram(table: &HilbertTable, labels: &[Label]) -> SeriesMatrix {
    let rows: Vec<Label> = labels.iter().map(|l| l.iter().map(|x| -x).collect()).collect();
    let entries = rows.iter().map(|r| labels.iter().map(|c| table.entry(c, &neg(r))).collect()).collect();
    SeriesMatrix { row_labels: rows, col_labels: labels.to_vec(), entries, order: table.order() }
}

fn neg(v: &[i64]) -> Vec<i64> {
    v.iter().map(|x| -x).collect()
}

/// Pairing of the projectives (rows of the Gram matrix) against the simple
/// classes (rows of `Phi`): the entry `(psi, chi)` must be `1` when
/// `chi = -psi` and `0` otherwise.
pub fn dual_basis_matrix(gram: &SeriesMatrix, phi: &SeriesMatrix) -> Result<SeriesMatrix, KtError> {
    gram.mul(&phi.transpose())
}

pub fn dual_basis_check(cfg: &WeightConfig, labels: &[Label], order: usize) -> bool {
    dual_basis_check_with(cfg, labels, order, ExponentSign::Standard)
}

/// Duality check with the Gram matrix computed under `sign` and the simple
/// classes under the standard convention.
pub fn dual_basis_check_with(cfg: &WeightConfig, labels: &[Label], order: usize, sign: ExponentSign) -> bool {
    let std = HilbertTable::new(cfg, order);
    let phi = phi_matrix(&std, labels);
    let gram = if sign == ExponentSign::Standard { pairing_gram(&std, labels) } else { pairing_gram(&HilbertTable::with_sign(cfg, order, sign), labels) };
    let Ok(p) = dual_basis_matrix(&gram, &phi) else { return false };
    p.entries.iter().enumerate().all(|(i, r)| {
        r.iter().enumerate().all(|(j, x)| {
            if p.row_labels[i] == neg(&p.col_labels[j]) {
                *x == TruncatedSeries::one(order)
            } else {
                x.is_zero()
            }
        })
    })
}

/// `gamma = Phi_upper * H(upper -> lower)`, the map determined by
/// adjointness with the inclusion of labels. Returns the exact Laurent
/// matrix, or `TruncationUnstable` when terms of degree `order + 1` remain.
pub fn adjoint_gamma(
    cfg: &WeightConfig,
    upper: &[Label],
    lower: &[Label],
    order: usize,
) -> Result<LabeledMatrix<GroupRingElement>, KtError> {
    let table = HilbertTable::new(cfg, order + 1);
    adjoint_gamma_with(&table, upper, lower)
}

/// As [`adjoint_gamma`] with a prebuilt table of order `N + 1`.
pub fn adjoint_gamma_with(
    table: &HilbertTable,
    upper: &[Label],
    lower: &[Label],
) -> Result<LabeledMatrix<GroupRingElement>, KtError> {
    let phi = phi_matrix(table, upper);
    let h = table.matrix(upper, lower);
    let g = phi.mul(&h)?;
    let top = g.top();
    for (i, r) in top.entries.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            if !x.is_zero() {
                return Err(KtError::TruncationUnstable {
                    row: top.row_labels[i].clone(),
                    col: top.col_labels[j].clone(),
                    order: table.order() - 1,
                });
            }
        }
    }
    Ok(g.total())
}

/// `Psi_upper * gamma == H(upper -> lower)` up to degree `order`.
pub fn adjointness_holds(
    table: &HilbertTable,
    upper: &[Label],
    lower: &[Label],
    gamma: &LabeledMatrix<GroupRingElement>,
    gamma_degree: impl Fn(&Label, &Label, &[i64]) -> usize,
) -> bool {
    let order = table.order();
    let mut g = SeriesMatrix {
        row_labels: gamma.row_labels.clone(),
        col_labels: gamma.col_labels.clone(),
        entries: vec![vec![TruncatedSeries::zero(order); gamma.cols()]; gamma.rows()],
        order,
    };
    for (i, r) in gamma.entries.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            for (e, c) in x.terms() {
                let deg = gamma_degree(&gamma.row_labels[i], &gamma.col_labels[j], e);
                g.entries[i][j].add_term(deg, e.clone(), *c);
            }
        }
    }
    let Ok(lhs) = psi_matrix(table, upper).mul(&g) else { return false };
    lhs == table.matrix(upper, lower)
}

/// Total degree of the term `u^h` in an entry from `col` to `row`:
/// `<theta, h> + <s_iota^T 1, col - row>`.
pub fn term_degree(cfg: &WeightConfig, row: &[i64], col: &[i64], h: &[i64]) -> i64 {
    let theta = cfg.theta();
    let w: Vec<i64> = (0..cfg.n())
        .map(|k| (0..cfg.d()).map(|i| crate::rational::to_i64(cfg.s_iota().get(i, k))).sum())
        .collect();
    let t: i64 = h.iter().zip(&theta).map(|(a, b)| a * b).sum();
    let s: i64 = w.iter().zip(col.iter().zip(row)).map(|(x, (c, r))| x * (c - r)).sum();
    t + s
}

/// An exact generating function `numerator / prod_j (1 - u^{v_j})`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSeries {
    pub numerator: GroupRingElement,
    pub denominator: Vec<Vec<i64>>,
}

impl RationalSeries {
    /// Expand up to total degree `order`; `degree(h)` gives the degree of
    /// `u^h` in this entry and must be positive on every denominator vector.
    pub fn expand(&self, order: usize, degree: impl Fn(&[i64]) -> i64) -> TruncatedSeries {
        let mut s = TruncatedSeries::zero(order);
        for (e, c) in self.numerator.terms() {
            let d = degree(e);
            if d >= 0 {
                s.add_term(d as usize, e.clone(), *c);
            }
        }
        let base = degree(&[]);
        for v in &self.denominator {
            let step = (degree(v) - base) as usize;
            assert!(step > 0, "denominator ray of degree zero");
            let mut geo = TruncatedSeries::zero(order);
            let mut k = 0;
            while k * step <= order {
                geo.add_term(k * step, v.iter().map(|x| x * k as i64).collect(), 1);
                k += 1;
            }
            s = s.mul(&geo);
        }
        s
    }

    pub fn evaluate(&self, h: &[Complex64]) -> Result<Complex64, KtError> {
        let mut den = Complex64::new(1.0, 0.0);
        for v in &self.denominator {
            let f = Complex64::new(1.0, 0.0) - GroupRingElement::u(v).evaluate(h);
            if f.norm() < 1e-12 {
                return Err(KtError::PoleAtH { factor: v.clone(), value: f.norm() });
            }
            den *= f;
        }
        Ok(self.numerator.evaluate(h) / den)
    }
}

/// Exact generating function of `H(a -> b)`: the lattice points of
/// `{c : <a_i, c> >= -(s_iota (b - a))_i}`, over the common denominator `F`.
pub fn exact_rational_entry(cfg: &WeightConfig, a: &[i64], b: &[i64]) -> Result<RationalSeries, KtError> {
    let m = cfg.m();
    let v: Vec<i64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let shift = cfg.iota(&v);
    let mut ineqs: Vec<Vec<i64>> =
        (0..cfg.d()).map(|i| cfg.a_col(i).iter().copied().chain([shift[i]]).collect()).collect();
    let mut top = vec![0; m + 1];
    top[m] = 1;
    ineqs.push(top);
    let rays = rays_from_inequalities(&ineqs, m + 1).expect("homogenized cone is pointed");
    let simplices = pulling_triangulation(&rays, &ineqs);
    if simplices.len() > 10_000 {
        return Err(KtError::TriangulationTooLarge(simplices.len()));
    }
    let factors = f_factors(cfg);
    let one = GroupRingElement::one();
    let mut numerator = GroupRingElement::zero();
    for face in all_faces(&simplices) {
        if face.iter().all(|&i| rays[i][m] == 0) {
            continue;
        }
        let gens: Vec<Vec<i64>> = face.iter().map(|&i| rays[i].clone()).collect();
        let mut piece = GroupRingElement::zero();
        for p in open_parallelepiped_points(&gens) {
            if p[m] == 1 {
                piece.add_term(p[..m].to_vec(), 1);
            }
        }
        if piece.is_zero() {
            continue;
        }
        // Multiply by the factors of F not used by this cone.
        for f in &factors {
            let used = gens.iter().any(|g| g[m] == 0 && g[..m] == f[..]);
            if !used {
                piece = &piece * &(&one - &GroupRingElement::u(f));
            }
        }
        numerator += &piece;
    }
    Ok(RationalSeries { numerator, denominator: factors })
}

/// `Psi` on `labels` as exact rational functions.
pub fn exact_rational_psi(cfg: &WeightConfig, labels: &[Label]) -> Result<LabeledMatrix<RationalEntry>, KtError> {
    let mut entries = Vec::new();
    for r in labels {
        let mut row = Vec::new();
        for c in labels {
            row.push(RationalEntry(exact_rational_entry(cfg, r, c)?));
        }
        entries.push(row);
    }
    Ok(LabeledMatrix { row_labels: labels.to_vec(), col_labels: labels.to_vec(), entries })
}

/// Wrapper so rational entries can sit in a [`LabeledMatrix`].
#[derive(Clone, Debug, PartialEq)]
pub struct RationalEntry(pub RationalSeries);

/// Expand an exact `Psi` into truncated series.
pub fn expand_psi(cfg: &WeightConfig, exact: &LabeledMatrix<RationalEntry>, order: usize) -> SeriesMatrix {
    let entries = exact
        .row_labels
        .iter()
        .zip(&exact.entries)
        .map(|(r, row)| {
            exact
                .col_labels
                .iter()
                .zip(row)
                .map(|(c, e)| e.0.expand(order, |h| term_degree(cfg, r, c, h)))
                .collect()
        })
        .collect();
    SeriesMatrix { row_labels: exact.row_labels.clone(), col_labels: exact.col_labels.clone(), entries, order }
}

/// Result of evaluating the exact `Psi` at a point of the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct InvertibilityReport {
    pub f_value: Complex64,
    pub det: Complex64,
    pub condition: f64,
    pub invertible: bool,
}

/// Evaluate `Psi(h)`; `PoleAtH` names the first vanishing factor of `F`.
pub fn specialization_invertibility(cfg: &WeightConfig, labels: &[Label], h: &[Complex64]) -> Result<InvertibilityReport, KtError> {
    let exact = exact_rational_psi(cfg, labels)?;
    let f = crate::resonance::f_element(cfg).evaluate(h);
    let vals: Vec<Vec<Complex64>> =
        exact.entries.iter().map(|r| r.iter().map(|e| e.0.evaluate(h)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
    let k = labels.len();
    let det = if k == 0 { Complex64::new(1.0, 0.0) } else { DMatrix::from_fn(k, k, |i, j| vals[i][j]).determinant() };
    let condition = crate::ksdata::condition_number(&vals);
    Ok(InvertibilityReport { f_value: f, det, condition, invertible: condition < 1e12 })
}

/// `det Psi` is a unit of the localization at the factors of `F`.
pub fn psi_invertible_over_localization(cfg: &WeightConfig, labels: &[Label]) -> Result<bool, KtError> {
    let exact = exact_rational_psi(cfg, labels)?;
    let num: Vec<Vec<GroupRingElement>> = exact.entries.iter().map(|r| r.iter().map(|e| e.0.numerator.clone()).collect()).collect();
    let det = GroupRingElement::det(&num);
    Ok(is_unit_after_localizing(&det, &f_factors(cfg)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gauss, two_one_one};
    use proptest::prelude::*;

    fn labels(v: &[i64]) -> Vec<Label> {
        v.iter().map(|&x| vec![x]).collect()
    }

    /// Enumerate monomials directly, as an independent oracle.
    fn brute_entry(cfg: &WeightConfig, a: &[i64], b: &[i64], order: usize) -> Vec<(Vec<i64>, usize)> {
        let d = cfg.d();
        let mut out = Vec::new();
        let mut m = vec![0usize; d];
        loop {
            let deg: usize = m.iter().sum();
            if deg <= order {
                let bm: Vec<i64> = (0..cfg.n()).map(|k| (0..d).map(|j| m[j] as i64 * cfg.b_col(j)[k]).sum()).collect();
                let target: Vec<i64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
                if bm == target {
                    let h: Vec<i64> = (0..cfg.m()).map(|k| (0..d).map(|j| m[j] as i64 * cfg.k_row(j)[k]).sum()).collect();
                    out.push((h, deg));
                }
            }
            let mut i = 0;
            loop {
                if i == d {
                    return out;
                }
                m[i] += 1;
                if m[i] <= order {
                    break;
                }
                m[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn gauss_diagonal_low_terms() {
        let g = gauss();
        let s = hilbert_entry(&g, &[0], &[0], 4);
        assert!(s.part(0).is_one());
        assert!(s.part(1).is_zero());
        let p2 = s.part(2);
        assert_eq!(p2.len(), 4);
        for e in [[1, 0, 0], [0, 0, 1], [1, 1, -1], [0, 1, 0]] {
            assert_eq!(p2.coeff(&e), 1);
        }
        let s01 = hilbert_entry(&g, &[0], &[1], 3);
        assert!(s01.part(0).is_zero());
        assert_eq!(s01.part(1).len(), 2);
    }

    #[test]
    fn entries_match_enumeration() {
        for cfg in [gauss(), two_one_one()] {
            let t = HilbertTable::new(&cfg, 6);
            for a in -2..=2 {
                for b in -2..=2 {
                    let s = t.entry(&[a], &[b]);
                    let brute = brute_entry(&cfg, &[a], &[b], 6);
                    assert_eq!(s.num_terms(), brute.len());
                    assert!(s.max_coeff() <= 1);
                    for (h, deg) in brute {
                        assert_eq!(s.part(deg).coeff(&h), 1);
                        assert_eq!(term_degree(&cfg, &[a], &[b], &h), deg as i64);
                    }
                }
            }
        }
    }

    #[test]
    fn psi_phi_inverse() {
        let g = gauss();
        let t = HilbertTable::new(&g, 8);
        let l = labels(&[-1, 0]);
        let psi = psi_matrix(&t, &l);
        let phi = phi_matrix(&t, &l);
        assert!(psi.mul(&phi).unwrap().is_identity());
        assert!(phi.mul(&psi).unwrap().is_identity());
        assert!(dual_basis_check(&g, &l, 8));
        assert!(dual_basis_check(&g, &l, 0));
        assert!(!dual_basis_check_with(&g, &l, 4, ExponentSign::Flipped));
    }

    #[test]
    fn gram_constant_term_and_symmetry() {
        let g = gauss();
        let t = HilbertTable::new(&g, 4);
        let l = labels(&[-1, 0, 1]);
        let gram = pairing_gram(&t, &l);
        for (i, r) in gram.entries.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                let diag = gram.row_labels[i] == neg(&gram.col_labels[j]);
                assert_eq!(x.part(0).is_one(), diag);
                assert!(diag || x.part(0).is_zero());
            }
        }
        // H(a -> b) and H(-b -> -a) agree.
        for a in -2..=2 {
            for b in -2..=2 {
                assert_eq!(t.entry(&[a], &[b]), t.entry(&[-b], &[-a]));
            }
        }
    }

    #[test]
    fn exact_psi_matches_series() {
        for cfg in [gauss(), two_one_one()] {
            let l = labels(&[-1, 0, 1]);
            let exact = exact_rational_psi(&cfg, &l).unwrap();
            let t = HilbertTable::new(&cfg, 10);
            assert_eq!(expand_psi(&cfg, &exact, 10), psi_matrix(&t, &l));
        }
    }

    #[test]
    fn invertibility_at_nonresonant_and_pole_at_one() {
        let g = gauss();
        let l = labels(&[-1, 0]);
        let alpha: Vec<Complex64> = [-0.3, -0.4, -0.2].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let h = crate::resonance::h_of_alpha(&alpha);
        let rep = specialization_invertibility(&g, &l, &h).unwrap();
        assert!(rep.invertible && rep.det.norm() > 1e-6);
        let ones = vec![Complex64::new(1.0, 0.0); 3];
        assert!(matches!(specialization_invertibility(&g, &l, &ones), Err(KtError::PoleAtH { .. })));
        assert!(psi_invertible_over_localization(&g, &l).unwrap());
    }

    #[test]
    fn adjoint_gamma_on_gauss_wall() {
        let g = gauss();
        // chamber labels {-1, 0} inside the vertex labels {-1, 0, 1}
        let gamma = adjoint_gamma(&g, &labels(&[-1, 0]), &labels(&[-1, 0, 1]), 8).unwrap();
        assert!(gamma.get(&[-1], &[-1]).unwrap().is_one());
        assert!(gamma.get(&[0], &[0]).unwrap().is_one());
        assert!(gamma.get(&[0], &[-1]).unwrap().is_zero());
        let last = gamma.get(&[0], &[1]).unwrap();
        assert!(!last.is_zero());
    }

    proptest! {
        #[test]
        fn truncation_is_compatible(a in -3i64..3, b in -3i64..3, n in 0usize..6) {
            let g = gauss();
            let big = hilbert_entry(&g, &[a], &[b], n + 2);
            prop_assert_eq!(big.truncate(n), hilbert_entry(&g, &[a], &[b], n));
        }

        #[test]
        fn series_product_is_associative(a in -2i64..2, b in -2i64..2, c in -2i64..2) {
            let t = HilbertTable::new(&gauss(), 5);
            let (x, y, z) = (t.entry(&[0], &[a]), t.entry(&[a], &[b]), t.entry(&[b], &[c]));
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        }
    }
}

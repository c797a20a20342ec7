//! Kapranov–Schechtman data over a coefficient ring: label-indexed matrices,
//! the axioms (m), (i), (t), duality, specialization and restriction to the
//! chamber groupoid.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

pub use crate::laurent::GroupRingElement;
use crate::rational::Rat;

pub type Label = Vec<i64>;
pub type SignVector = Vec<i64>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KsError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("label mismatch when composing: {0}")]
    LabelMismatch(String),
    #[error("faces {0:?} and {1:?} have no common lower face in the datum")]
    NoCommonFace(SignVector, SignVector),
    #[error("axioms failed: {0}")]
    AxiomsFailed(String),
    #[error("specialization point has a zero coordinate")]
    ZeroCoordinate,
    #[error("face {0:?} is not part of the datum")]
    UnknownFace(SignVector),
}

/// Extra data needed to decide invertibility.
#[derive(Clone, Debug, Default)]
pub struct InvertContext {
    /// Exponents `v` of the factors `1 - u^v` that are inverted.
    pub localizing: Vec<Vec<i64>>,
    /// Condition-number ceiling for floating matrices.
    pub max_condition: f64,
}

/// A commutative coefficient ring.
pub trait CoeffRing: Clone + fmt::Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    /// Equality up to `tol` for floating rings, exact otherwise.
    fn close_to(&self, o: &Self, _tol: f64) -> bool {
        self == o
    }
    /// Determinant by expansion with memoization over row subsets.
    fn det(m: &[Vec<Self>]) -> Self {
        det_by_expansion(m)
    }
    fn is_invertible(m: &[Vec<Self>], ctx: &InvertContext) -> bool;
}

/// Laplace expansion along columns, memoized by the set of used rows.
pub fn det_by_expansion<R: CoeffRing>(m: &[Vec<R>]) -> R {
    let n = m.len();
    if n == 0 {
        return R::one();
    }
    assert!(n <= 24, "matrix too large for expansion");
    let mut memo: BTreeMap<u32, R> = BTreeMap::new();
    memo.insert(0, R::one());
    // value(S) = det of rows S against the first |S| columns
    for col in 0..n {
        let mut next = BTreeMap::new();
        for (mask, val) in &memo {
            if val.is_zero() {
                continue;
            }
            for r in 0..n {
                if mask >> r & 1 == 1 {
                    continue;
                }
                let e = &m[r][col];
                if e.is_zero() {
                    continue;
                }
                // Row r goes to position `col`; sign from rows of larger index already used.
                let larger = (mask >> (r + 1)).count_ones();
                let mut term = val.mul(e);
                if larger % 2 == 1 {
                    term = term.neg();
                }
                let key = mask | (1 << r);
                let slot = next.entry(key).or_insert_with(R::zero);
                *slot = slot.add(&term);
            }
        }
        memo = next;
    }
    memo.remove(&((1u32 << n) - 1)).unwrap_or_else(R::zero)
}

impl CoeffRing for GroupRingElement {
    fn zero() -> Self {
        GroupRingElement::zero()
    }
    fn one() -> Self {
        GroupRingElement::one()
    }
    fn from_i64(v: i64) -> Self {
        GroupRingElement::constant(v)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        GroupRingElement::is_zero(self)
    }
    fn is_invertible(m: &[Vec<Self>], ctx: &InvertContext) -> bool {
        is_unit_after_localizing(&Self::det(m), &ctx.localizing)
    }
}

/// `x` is `± u^e` times a product of the localizing binomials.
pub fn is_unit_after_localizing(x: &GroupRingElement, localizing: &[Vec<i64>]) -> bool {
    let mut cur = x.clone();
    if cur.is_zero() {
        return false;
    }
    loop {
        if cur.is_unit() {
            return true;
        }
        let mut progressed = false;
        for v in localizing {
            if let Some(q) = cur.div_one_minus(v) {
                cur = q;
                progressed = true;
                break;
            }
        }
        if !progressed {
            return false;
        }
    }
}

impl CoeffRing for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rat::from_integer(v.into())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn det(m: &[Vec<Self>]) -> Self {
        let n = m.len();
        let mut a: Vec<Vec<Rat>> = m.to_vec();
        let mut det = <Rat as One>::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !Zero::is_zero(&a[i][c])) else { return <Rat as Zero>::zero() };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= a[c][c].clone();
            for i in c + 1..n {
                let f = a[i][c].clone() / a[c][c].clone();
                for j in c..n {
                    let v = a[c][j].clone() * f.clone();
                    a[i][j] -= v;
                }
            }
        }
        det
    }
    fn is_invertible(m: &[Vec<Self>], _ctx: &InvertContext) -> bool {
        !Zero::is_zero(&Self::det(m))
    }
}

impl CoeffRing for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == Complex64::new(0.0, 0.0)
    }
    fn close_to(&self, o: &Self, tol: f64) -> bool {
        (self - o).norm() <= tol * (1.0 + self.norm().max(o.norm()))
    }
    fn det(m: &[Vec<Self>]) -> Self {
        let n = m.len();
        if n == 0 {
            return Complex64::new(1.0, 0.0);
        }
        DMatrix::from_fn(n, n, |i, j| m[i][j]).determinant()
    }
    fn is_invertible(m: &[Vec<Self>], ctx: &InvertContext) -> bool {
        condition_number(m) <= if ctx.max_condition > 0.0 { ctx.max_condition } else { 1e12 }
    }
}

/// 2-norm condition number.
pub fn condition_number(m: &[Vec<Complex64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 1.0;
    }
    let sv = DMatrix::from_fn(n, m[0].len(), |i, j| m[i][j]).singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

impl CoeffRing for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn add(&self, o: &Self) -> Self {
        self.checked_add(*o).expect("overflow")
    }
    fn mul(&self, o: &Self) -> Self {
        self.checked_mul(*o).expect("overflow")
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_invertible(m: &[Vec<Self>], _ctx: &InvertContext) -> bool {
        Self::det(m).abs() == 1
    }
}

/// A matrix whose rows and columns are indexed by lattice labels. Columns
/// index the source basis, rows the target basis.
#[derive(Clone, PartialEq)]
pub struct LabeledMatrix<R> {
    pub row_labels: Vec<Label>,
    pub col_labels: Vec<Label>,
    pub entries: Vec<Vec<R>>,
}

impl<R: fmt::Debug> fmt::Debug for LabeledMatrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cols {:?} -> rows {:?}", self.col_labels, self.row_labels)?;
        for (l, r) in self.row_labels.iter().zip(&self.entries) {
            writeln!(f, "  {l:?}: {r:?}")?;
        }
        Ok(())
    }
}

impl<R: CoeffRing> LabeledMatrix<R> {
    pub fn zeros(row_labels: Vec<Label>, col_labels: Vec<Label>) -> Self {
        let entries = vec![vec![R::zero(); col_labels.len()]; row_labels.len()];
        LabeledMatrix { row_labels, col_labels, entries }
    }

    pub fn identity(labels: Vec<Label>) -> Self {
        let mut m = Self::zeros(labels.clone(), labels);
        for i in 0..m.row_labels.len() {
            m.entries[i][i] = R::one();
        }
        m
    }

    /// The 0/1 matrix sending each column label to the equal row label;
    /// column labels must be a subset of row labels.
    pub fn inclusion(row_labels: Vec<Label>, col_labels: Vec<Label>) -> Result<Self, KsError> {
        let mut m = Self::zeros(row_labels, col_labels);
        for j in 0..m.col_labels.len() {
            let i = m
                .row_index(&m.col_labels[j].clone())
                .ok_or_else(|| KsError::LabelMismatch(format!("{:?} not a row label", m.col_labels[j])))?;
            m.entries[i][j] = R::one();
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_index(&self, l: &[i64]) -> Option<usize> {
        self.row_labels.iter().position(|x| x == l)
    }

    pub fn col_index(&self, l: &[i64]) -> Option<usize> {
        self.col_labels.iter().position(|x| x == l)
    }

    pub fn get(&self, row: &[i64], col: &[i64]) -> Option<&R> {
        Some(&self.entries[self.row_index(row)?][self.col_index(col)?])
    }

    pub fn add_to(&mut self, row: &[i64], col: &[i64], v: &R) -> Result<(), KsError> {
        let i = self.row_index(row).ok_or_else(|| KsError::LabelMismatch(format!("row {row:?}")))?;
        let j = self.col_index(col).ok_or_else(|| KsError::LabelMismatch(format!("column {col:?}")))?;
        self.entries[i][j] = self.entries[i][j].add(v);
        Ok(())
    }

    /// `self * rhs`; requires `self.col_labels == rhs.row_labels`.
    pub fn compose(&self, rhs: &LabeledMatrix<R>) -> Result<LabeledMatrix<R>, KsError> {
        if self.col_labels != rhs.row_labels {
            return Err(KsError::LabelMismatch(format!("{:?} vs {:?}", self.col_labels, rhs.row_labels)));
        }
        let mut out = Self::zeros(self.row_labels.clone(), rhs.col_labels.clone());
        for i in 0..self.rows() {
            for k in 0..self.cols() {
                let a = &self.entries[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols() {
                    let b = &rhs.entries[k][j];
                    if !b.is_zero() {
                        out.entries[i][j] = out.entries[i][j].add(&a.mul(b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.col_labels.clone(), self.row_labels.clone());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.entries[j][i] = self.entries[i][j].clone();
            }
        }
        out
    }

    pub fn map<S: CoeffRing, F: Fn(&R) -> S>(&self, f: F) -> LabeledMatrix<S> {
        LabeledMatrix {
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
            entries: self.entries.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }

    /// Relabel rows and columns.
    pub fn relabel<F: Fn(&Label) -> Label>(&self, f: F) -> Self {
        LabeledMatrix {
            row_labels: self.row_labels.iter().map(&f).collect(),
            col_labels: self.col_labels.iter().map(&f).collect(),
            entries: self.entries.clone(),
        }
    }

    /// Same matrix with rows and columns permuted to the given label orders.
    pub fn reorder(&self, rows: &[Label], cols: &[Label]) -> Result<Self, KsError> {
        let mut out = Self::zeros(rows.to_vec(), cols.to_vec());
        for (i, r) in rows.iter().enumerate() {
            let si = self.row_index(r).ok_or_else(|| KsError::LabelMismatch(format!("row {r:?}")))?;
            for (j, c) in cols.iter().enumerate() {
                let sj = self.col_index(c).ok_or_else(|| KsError::LabelMismatch(format!("column {c:?}")))?;
                out.entries[i][j] = self.entries[si][sj].clone();
            }
        }
        Ok(out)
    }

    /// Restrict to a subset of columns (by label).
    pub fn select_cols(&self, cols: &[Label]) -> Result<Self, KsError> {
        self.reorder(&self.row_labels.clone(), cols)
    }

    pub fn is_identity(&self) -> bool {
        self.row_labels == self.col_labels
            && (0..self.rows()).all(|i| {
                (0..self.cols()).all(|j| {
                    let e = &self.entries[i][j];
                    if i == j {
                        *e == R::one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn close_to(&self, o: &Self, tol: f64) -> bool {
        self.row_labels == o.row_labels
            && self.col_labels == o.col_labels
            && self.entries.iter().zip(&o.entries).all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.close_to(y, tol)))
    }

    pub fn det(&self) -> Result<R, KsError> {
        if self.rows() != self.cols() {
            return Err(KsError::ShapeMismatch(format!("{}x{}", self.rows(), self.cols())));
        }
        Ok(R::det(&self.entries))
    }

    pub fn is_invertible(&self, ctx: &InvertContext) -> bool {
        self.rows() == self.cols() && R::is_invertible(&self.entries, ctx)
    }
}

impl LabeledMatrix<GroupRingElement> {
    /// Evaluate every entry at `u = h`.
    pub fn specialize(&self, h: &[Complex64]) -> LabeledMatrix<Complex64> {
        self.map(|x| x.evaluate(h))
    }

    /// Apply `u -> u^{-1}` entrywise.
    pub fn tau(&self) -> Self {
        self.map(|x| x.negate_exponents())
    }
}

/// Closure order on sign vectors.
pub fn sign_leq(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| if y % 2 == 0 { x == y } else { (x - y).abs() <= 1 })
}

/// Module of one face.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceModule {
    pub dim: usize,
    pub labels: Vec<Label>,
}

/// Maps for an incident pair `lower <= upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct IncidenceMaps<R> {
    /// `gamma: E_lower -> E_upper`
    pub gamma: LabeledMatrix<R>,
    /// `delta: E_upper -> E_lower`
    pub delta: LabeledMatrix<R>,
}

/// A finite piece of a KS datum: faces keyed by sign vector, maps for the
/// incident pairs among them and the collinear chamber triples to test.
#[derive(Clone, Debug)]
pub struct KSDatum<R> {
    pub faces: BTreeMap<SignVector, FaceModule>,
    pub maps: BTreeMap<(SignVector, SignVector), IncidenceMaps<R>>,
    /// `(common lower face, [C1, C2, C3])`
    pub collinear: Vec<(SignVector, [SignVector; 3])>,
    pub invert: InvertContext,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub axiom: &'static str,
    pub faces: Vec<SignVector>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AxiomReport {
    pub checked_m: usize,
    pub checked_i: usize,
    pub checked_t: usize,
    pub checked_functoriality: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl<R: CoeffRing> KSDatum<R> {
    pub fn maps_for(&self, lower: &[i64], upper: &[i64]) -> Option<&IncidenceMaps<R>> {
        self.maps.get(&(lower.to_vec(), upper.to_vec()))
    }

    /// Faces of the datum below both arguments, lowest dimension first.
    pub fn common_lower(&self, a: &[i64], b: &[i64]) -> Vec<SignVector> {
        let mut v: Vec<(usize, SignVector)> = self
            .faces
            .iter()
            .filter(|(t, _)| self.maps.contains_key(&((*t).clone(), a.to_vec())) && self.maps.contains_key(&((*t).clone(), b.to_vec())))
            .map(|(t, f)| (f.dim, t.clone()))
            .collect();
        v.sort();
        v.into_iter().map(|x| x.1).collect()
    }

    /// `phi_{C1 C2} = gamma_{C' C2} delta_{C1 C'}` through the given lower face.
    pub fn phi_via(&self, c1: &[i64], c2: &[i64], lower: &[i64]) -> Result<LabeledMatrix<R>, KsError> {
        let d = self.maps_for(lower, c1).ok_or_else(|| KsError::NoCommonFace(c1.to_vec(), c2.to_vec()))?;
        let g = self.maps_for(lower, c2).ok_or_else(|| KsError::NoCommonFace(c1.to_vec(), c2.to_vec()))?;
        g.gamma.compose(&d.delta)
    }

    /// `phi` through the lowest-dimensional common lower face.
    pub fn phi(&self, c1: &[i64], c2: &[i64]) -> Result<LabeledMatrix<R>, KsError> {
        let lower = self.common_lower(c1, c2);
        let first = lower.first().ok_or_else(|| KsError::NoCommonFace(c1.to_vec(), c2.to_vec()))?;
        self.phi_via(c1, c2, first)
    }

    fn flat_equal(a: &[i64], b: &[i64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x % 2 == 0) == (y % 2 == 0) && (x % 2 != 0 || x == y))
    }

    pub fn check_axioms(&self, tol: f64) -> AxiomReport {
        let mut rep = AxiomReport::default();
        for ((lo, up), maps) in &self.maps {
            let (Some(fl), Some(fu)) = (self.faces.get(lo), self.faces.get(up)) else {
                rep.violations.push(Violation { axiom: "shape", faces: vec![lo.clone(), up.clone()], detail: "unknown face".into() });
                continue;
            };
            if maps.gamma.col_labels != fl.labels
                || maps.gamma.row_labels != fu.labels
                || maps.delta.col_labels != fu.labels
                || maps.delta.row_labels != fl.labels
            {
                rep.violations.push(Violation { axiom: "shape", faces: vec![lo.clone(), up.clone()], detail: "labels do not match the face modules".into() });
                continue;
            }
            rep.checked_m += 1;
            match maps.gamma.compose(&maps.delta) {
                Ok(p) if p.close_to(&LabeledMatrix::identity(fu.labels.clone()), tol) => {}
                Ok(p) => rep.violations.push(Violation {
                    axiom: "m",
                    faces: vec![lo.clone(), up.clone()],
                    detail: format!("gamma*delta = {p:?}"),
                }),
                Err(e) => rep.violations.push(Violation { axiom: "m", faces: vec![lo.clone(), up.clone()], detail: e.to_string() }),
            }
        }
        // Functoriality along chains lo <= mid <= up.
        for ((lo, mid), m1) in &self.maps {
            if lo == mid {
                continue;
            }
            for ((mid2, up), m2) in self.maps.range((mid.clone(), Vec::new())..) {
                if mid2 != mid {
                    break;
                }
                if mid == up {
                    continue;
                }
                let Some(m3) = self.maps_for(lo, up) else { continue };
                rep.checked_functoriality += 1;
                let g = m2.gamma.compose(&m1.gamma);
                let d = m1.delta.compose(&m2.delta);
                let ok = matches!((&g, &d), (Ok(g), Ok(d)) if g.close_to(&m3.gamma, tol) && d.close_to(&m3.delta, tol));
                if !ok {
                    rep.violations.push(Violation {
                        axiom: "functoriality",
                        faces: vec![lo.clone(), mid.clone(), up.clone()],
                        detail: "composite differs from direct map".into(),
                    });
                }
            }
        }
        // (i): equal-dimensional faces in a common flat sharing a facet.
        for (c1, f1) in &self.faces {
            for (c2, f2) in &self.faces {
                if c1 >= c2 || f1.dim != f2.dim || f1.dim == 0 {
                    continue;
                }
                for (w, fw) in &self.faces {
                    if fw.dim + 1 != f1.dim || !self.maps.contains_key(&(w.clone(), c1.clone())) || !self.maps.contains_key(&(w.clone(), c2.clone())) {
                        continue;
                    }
                    if f1.dim < self.dim_max() && !Self::flat_equal(c1, c2) {
                        continue;
                    }
                    for (a, b) in [(c1, c2), (c2, c1)] {
                        rep.checked_i += 1;
                        match self.phi_via(a, b, w) {
                            Ok(p) if p.is_invertible(&self.invert) => {}
                            Ok(_) => rep.violations.push(Violation {
                                axiom: "i",
                                faces: vec![a.clone(), w.clone(), b.clone()],
                                detail: "phi not invertible".into(),
                            }),
                            Err(e) => rep.violations.push(Violation { axiom: "i", faces: vec![a.clone(), w.clone(), b.clone()], detail: e.to_string() }),
                        }
                    }
                }
            }
        }
        // (t)
        for (v, [c1, c2, c3]) in &self.collinear {
            rep.checked_t += 1;
            let lhs = self.phi_via(c1, c3, v);
            let rhs = self.phi_via(c2, c3, v).and_then(|a| self.phi_via(c1, c2, v).and_then(|b| a.compose(&b)));
            let ok = matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a.close_to(b, tol));
            if !ok {
                rep.violations.push(Violation {
                    axiom: "t",
                    faces: vec![v.clone(), c1.clone(), c2.clone(), c3.clone()],
                    detail: "phi_13 differs from phi_23 phi_12".into(),
                });
            }
        }
        rep
    }

    fn dim_max(&self) -> usize {
        self.faces.values().map(|f| f.dim).max().unwrap_or(0)
    }

    /// The dual datum: transpose every map and swap the roles of gamma and
    /// delta; `twist` applies an involution of the coefficients afterwards.
    pub fn dual_with<F: Fn(&R) -> R>(&self, twist: F) -> KSDatum<R> {
        let maps = self
            .maps
            .iter()
            .map(|(k, m)| {
                (
                    k.clone(),
                    IncidenceMaps { gamma: m.delta.transpose().map(&twist), delta: m.gamma.transpose().map(&twist) },
                )
            })
            .collect();
        KSDatum { faces: self.faces.clone(), maps, collinear: self.collinear.clone(), invert: self.invert.clone() }
    }

    pub fn dual(&self) -> KSDatum<R> {
        self.dual_with(|x| x.clone())
    }

    pub fn map_ring<S: CoeffRing, F: Fn(&R) -> S>(&self, f: F, invert: InvertContext) -> KSDatum<S> {
        KSDatum {
            faces: self.faces.clone(),
            maps: self
                .maps
                .iter()
                .map(|(k, m)| (k.clone(), IncidenceMaps { gamma: m.gamma.map(&f), delta: m.delta.map(&f) }))
                .collect(),
            collinear: self.collinear.clone(),
            invert,
        }
    }
}

impl KSDatum<GroupRingElement> {
    pub fn dual_twisted(&self) -> Self {
        self.dual_with(|x| x.negate_exponents())
    }

    /// Evaluate all coefficients at `u = h`.
    pub fn specialize(&self, h: &[Complex64]) -> Result<KSDatum<Complex64>, KsError> {
        if h.iter().any(|x| x.norm() == 0.0) {
            return Err(KsError::ZeroCoordinate);
        }
        Ok(self.map_ring(|x| x.evaluate(h), InvertContext { localizing: Vec::new(), max_condition: 1e12 }))
    }
}

/// Translation isomorphisms `phi_{g, C}: E_C -> E_{C+g}`, computed on demand.
pub trait Translations<R> {
    fn translation(&self, g: &[i64], face: &[i64]) -> LabeledMatrix<R>;
    fn translate_face(&self, g: &[i64], face: &[i64]) -> SignVector;
}

/// A KS datum with a lattice action.
pub struct EquivKSDatum<'a, R> {
    pub datum: KSDatum<R>,
    pub action: &'a dyn Translations<R>,
    pub lattice_rank: usize,
}

/// Generators of the chamber groupoid with their matrices.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Wall { from: SignVector, to: SignVector },
    Translation { mu: Vec<i64>, chamber: SignVector },
}

#[derive(Clone, Debug)]
pub struct GroupoidRep<R> {
    pub chambers: Vec<(SignVector, Vec<Label>)>,
    pub generators: Vec<(Generator, LabeledMatrix<R>)>,
}

impl<R: CoeffRing> GroupoidRep<R> {
    pub fn all_invertible(&self, ctx: &InvertContext) -> bool {
        self.generators.iter().all(|(_, m)| m.is_invertible(ctx))
    }

    pub fn matrix(&self, g: &Generator) -> Option<&LabeledMatrix<R>> {
        self.generators.iter().find(|(x, _)| x == g).map(|(_, m)| m)
    }
}

impl GroupoidRep<GroupRingElement> {
    pub fn specialize(&self, h: &[Complex64]) -> GroupoidRep<Complex64> {
        GroupoidRep {
            chambers: self.chambers.clone(),
            generators: self.generators.iter().map(|(g, m)| (g.clone(), m.specialize(h))).collect(),
        }
    }
}

impl<R: CoeffRing> EquivKSDatum<'_, R> {
    /// Check `phi_{0,C} = id`, the cocycle condition on basis translations
    /// and compatibility of translations with gamma and delta.
    pub fn check_equivariance(&self, tol: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        let r = self.lattice_rank;
        let zero = vec![0i64; r];
        let basis: Vec<Vec<i64>> = (0..r).map(|k| (0..r).map(|j| if j == k { 1 } else { 0 }).collect()).collect();
        for t in self.datum.faces.keys() {
            if !self.action.translation(&zero, t).is_identity() {
                out.push(Violation { axiom: "equivariance", faces: vec![t.clone()], detail: "phi_0 is not the identity".into() });
            }
            for g in &basis {
                for h in &basis {
                    let gh: Vec<i64> = g.iter().zip(h).map(|(a, b)| a + b).collect();
                    let th = self.action.translate_face(h, t);
                    let lhs = self.action.translation(g, &th).compose(&self.action.translation(h, t));
                    let rhs = self.action.translation(&gh, t);
                    if !matches!(lhs, Ok(ref l) if l.close_to(&rhs, tol)) {
                        out.push(Violation { axiom: "cocycle", faces: vec![t.clone()], detail: format!("g={g:?} h={h:?}") });
                    }
                }
            }
        }
        out
    }

    /// Restrict to the chamber groupoid: chamber modules, wall-crossing
    /// generators between the given adjacent pairs and basis translations.
    pub fn restrict_to_groupoid(&self, chambers: &[SignVector], walls: &[(SignVector, SignVector)], tol: f64) -> Result<GroupoidRep<R>, KsError> {
        let rep = self.datum.check_axioms(tol);
        if !rep.passed() {
            return Err(KsError::AxiomsFailed(format!("{} violations, first: {:?}", rep.violations.len(), rep.violations[0])));
        }
        let mut gens = Vec::new();
        for (a, b) in walls {
            gens.push((Generator::Wall { from: a.clone(), to: b.clone() }, self.datum.phi(a, b)?));
        }
        let r = self.lattice_rank;
        for c in chambers {
            for k in 0..r {
                let mu: Vec<i64> = (0..r).map(|j| if j == k { 1 } else { 0 }).collect();
                gens.push((Generator::Translation { mu: mu.clone(), chamber: c.clone() }, self.action.translation(&mu, c)));
            }
        }
        let chambers = chambers
            .iter()
            .map(|c| {
                self.datum.faces.get(c).map(|f| (c.clone(), f.labels.clone())).ok_or_else(|| KsError::UnknownFace(c.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupoidRep { chambers, generators: gens })
    }
}

/// The trivial datum: rank one everywhere with identity maps, on the given
/// face sign vectors (incidence by the closure order).
pub fn trivial_datum<R: CoeffRing>(faces: &[(SignVector, usize)]) -> KSDatum<R> {
    let label = vec![vec![0i64]];
    let fm: BTreeMap<SignVector, FaceModule> =
        faces.iter().map(|(t, d)| (t.clone(), FaceModule { dim: *d, labels: label.clone() })).collect();
    let mut maps = BTreeMap::new();
    for (a, _) in faces {
        for (b, _) in faces {
            if sign_leq(a, b) {
                maps.insert(
                    (a.clone(), b.clone()),
                    IncidenceMaps { gamma: LabeledMatrix::identity(label.clone()), delta: LabeledMatrix::identity(label.clone()) },
                );
            }
        }
    }
    KSDatum { faces: fm, maps, collinear: Vec::new(), invert: InvertContext::default() }
}

/// Labels that occur in any face of the datum.
pub fn all_labels<R>(ks: &KSDatum<R>) -> BTreeSet<Label> {
    ks.faces.values().flat_map(|f| f.labels.iter().cloned()).collect()
}

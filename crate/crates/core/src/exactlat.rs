//! Exact integer linear algebra: Hermite and Smith forms, Gale duality,
//! splittings of the defining exact sequence and instance validation.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{int, primitive, rat_int, to_i64, Int, Rat};

/// Dense integer matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows_i64())
    }
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Int>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        IntMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    /// Build from rows of machine integers; an empty slice gives a `0 x cols` matrix.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| int(x)));
        }
        IntMatrix { rows: rows.len(), cols, data }
    }

    pub fn from_cols(cols: &[Vec<i64>], rows: usize) -> Self {
        Self::from_rows(cols, rows).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row_i64(&self, i: usize) -> Vec<i64> {
        (0..self.cols).map(|j| to_i64(self.get(i, j))).collect()
    }

    pub fn col_i64(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| to_i64(self.get(i, j))).collect()
    }

    pub fn to_rows_i64(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row_i64(i)).collect()
    }

    pub fn to_cols_i64(&self) -> Vec<Vec<i64>> {
        (0..self.cols).map(|j| self.col_i64(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = Int::zero();
                for (j, x) in v.iter().enumerate() {
                    if *x != 0 {
                        s += self.get(i, j) * int(*x);
                    }
                }
                to_i64(&s)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Columns `cols` as a new matrix, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(rows.len(), self.cols);
        for (ii, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                out.set(ii, j, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &Int) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(src, j) * f;
            self.data[dst * self.cols + j] += v;
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, f: &Int) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, src) * f;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let idx = r * self.cols + j;
            self.data[idx] = -self.data[idx].clone();
        }
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        hermite(self).rank
    }

    /// Determinant of a square matrix (fraction-free elimination).
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1)
    }

    /// Exact inverse over the rationals, `None` when singular.
    pub fn inverse_rat(&self) -> Option<Vec<Vec<Rat>>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rat> = (0..n).map(|j| rat_int(self.get(i, j))).collect();
                row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&i| !a[i][c].is_zero())?;
            a.swap(c, p);
            let piv = a[c][c].clone();
            for x in a[c].iter_mut() {
                *x /= piv.clone();
            }
            for i in 0..n {
                if i != c && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    let pivot_row = a[c].clone();
                    for (x, y) in a[i].iter_mut().zip(pivot_row) {
                        *x -= f.clone() * y;
                    }
                }
            }
        }
        Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    /// Exact inverse when it is integral.
    pub fn inverse_int(&self) -> Option<IntMatrix> {
        let inv = self.inverse_rat()?;
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if !inv[i][j].is_integer() {
                    return None;
                }
                out.set(i, j, inv[i][j].to_integer());
            }
        }
        Some(out)
    }
}

/// Row-style Hermite normal form `U * M = H`.
#[derive(Clone, Debug)]
pub struct Hermite {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Smith normal form `U * M * V = S`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s.get(i, i).clone()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct NormalForms {
    pub hermite: Hermite,
    pub smith: Smith,
}

/// Hermite form with positive pivots and entries above each pivot reduced into `[0, pivot)`.
pub fn hermite(m: &IntMatrix) -> Hermite {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        loop {
            let best = (r..m.rows())
                .filter(|&i| !h.get(i, c).is_zero())
                .min_by(|&a, &b| h.get(a, c).abs().cmp(&h.get(b, c).abs()));
            let Some(best) = best else { break };
            h.swap_rows(r, best);
            u.swap_rows(r, best);
            let mut done = true;
            for i in r + 1..m.rows() {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let q = -h.get(i, c).div_floor(h.get(r, c));
                h.add_row(i, r, &q);
                u.add_row(i, r, &q);
                if !h.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -h.get(i, c).div_floor(h.get(r, c));
            h.add_row(i, r, &q);
            u.add_row(i, r, &q);
        }
        pivots.push(c);
        r += 1;
    }
    Hermite { h, u, rank: r, pivots }
}

pub fn smith(m: &IntMatrix) -> Smith {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = s.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return Smith { s, u, v };
            };
            s.swap_rows(t, bi);
            u.swap_rows(t, bi);
            s.swap_cols(t, bj);
            v.swap_cols(t, bj);
            let mut clean = true;
            for i in t + 1..rows {
                let q = -s.get(i, t).div_floor(s.get(t, t));
                s.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !s.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = -s.get(t, j).div_floor(s.get(t, t));
                s.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !s.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let p = s.get(t, t).clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !s.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    s.add_row(t, i, &Int::one());
                    u.add_row(t, i, &Int::one());
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    Smith { s, u, v }
}

pub fn normal_forms(m: &IntMatrix) -> NormalForms {
    NormalForms { hermite: hermite(m), smith: smith(m) }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExactLatError {
    #[error("row lattice of B is not saturated (Smith diagonal {diagonal:?})")]
    NotSaturated { diagonal: Vec<i64> },
    #[error("weights on the line through {line:?} (columns {columns:?}) sum to {sum:?}, not zero")]
    QuasiSymmetryViolation { line: Vec<i64>, columns: Vec<usize>, sum: Vec<i64> },
    #[error("columns of B sum to {sum:?}, not zero")]
    ZeroSumViolation { sum: Vec<i64> },
    #[error("column {column} of B is zero")]
    ZeroColumn { column: usize },
    #[error("B must have at least one row and more columns than rows (got {rows}x{cols})")]
    BadShape { rows: usize, cols: usize },
    #[error("supplied A is not a Gale dual of B: {reason}")]
    NotGaleDual { reason: String },
}

/// Gale dual of a saturated `n x d` matrix: an `m x d` matrix `A`, `m = d - n`,
/// with `A * B^T = 0`, surjective onto `Z^m`, in Hermite form.
pub fn gale_dual(b: &IntMatrix) -> Result<IntMatrix, ExactLatError> {
    let sm = smith(b);
    let diag = sm.diagonal();
    if diag.len() < b.rows() || diag.iter().any(|x| !x.is_one()) {
        return Err(ExactLatError::NotSaturated {
            diagonal: (0..b.rows()).map(|i| diag.get(i).map(to_i64).unwrap_or(0)).collect(),
        });
    }
    let n = b.rows();
    let d = b.cols();
    let tail: Vec<usize> = (n..d).collect();
    let a = sm.v.select_cols(&tail).transpose();
    Ok(hermite(&a).h)
}

/// Character-side section, cocharacter-side splitting and projection onto `X(H)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Splittings {
    /// `d x n`, `B * s_iota = I`.
    pub s_iota: IntMatrix,
    /// `d x m`, `A * k = I` and `s_iota^T * k = 0`.
    pub k: IntMatrix,
    /// `m x d`, `p * A^T = I` and `p * s_iota = 0`.
    pub p: IntMatrix,
}

fn index_subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            if d - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    rec(0, d, k, &mut cur, &mut out);
    out
}

pub(crate) fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    index_subsets(d, k)
}

/// Canonical splittings: `s_iota` is supported on the lexicographically first
/// unimodular column subset of `B` when one exists (otherwise it comes from the
/// unimodular transform of the Smith form); `k` and `p` are then forced.
pub fn choose_splittings(b: &IntMatrix, a: &IntMatrix) -> Splittings {
    let n = b.rows();
    let d = b.cols();
    let m = a.rows();
    let mut s_iota = None;
    for subset in index_subsets(d, n) {
        let sub = b.select_cols(&subset);
        if sub.det().abs().is_one() {
            let inv = sub.inverse_int().expect("unimodular minor has an integral inverse");
            let mut s = IntMatrix::zeros(d, n);
            for (r, &i) in subset.iter().enumerate() {
                for j in 0..n {
                    s.set(i, j, inv.get(r, j).clone());
                }
            }
            s_iota = Some(s);
            break;
        }
    }
    let s_iota = s_iota.unwrap_or_else(|| {
        let sm = smith(b);
        // U B V = [I | 0]  =>  B (V[:, :n] U) = I
        let head: Vec<usize> = (0..n).collect();
        sm.v.select_cols(&head).mul(&sm.u)
    });
    let stacked = a.vstack(&s_iota.transpose());
    let inv = stacked.inverse_int().expect("[A; s_iota^T] is unimodular for a valid Gale pair");
    let kcols: Vec<usize> = (0..m).collect();
    let k = inv.select_cols(&kcols);
    let p = k.transpose();
    Splittings { s_iota, k, p }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigFlags {
    pub quasi_symmetric: bool,
    pub lattice_surjective: bool,
    pub zero_sum: bool,
}

/// A validated weight configuration with its Gale dual and splittings.
#[derive(Clone, Debug)]
pub struct WeightConfig {
    pub b: IntMatrix,
    pub a: IntMatrix,
    pub split: Splittings,
    pub h_cov: Vec<i64>,
    pub flags: ConfigFlags,
    bcols: Vec<Vec<i64>>,
    acols: Vec<Vec<i64>>,
    krows: Vec<Vec<i64>>,
}

impl WeightConfig {
    pub fn n(&self) -> usize {
        self.b.rows()
    }
    pub fn d(&self) -> usize {
        self.b.cols()
    }
    pub fn m(&self) -> usize {
        self.a.rows()
    }
    /// Column `b_i`.
    pub fn b_col(&self, i: usize) -> &[i64] {
        &self.bcols[i]
    }
    pub fn b_cols(&self) -> &[Vec<i64>] {
        &self.bcols
    }
    /// Column `a_i`.
    pub fn a_col(&self, i: usize) -> &[i64] {
        &self.acols[i]
    }
    pub fn a_cols(&self) -> &[Vec<i64>] {
        &self.acols
    }
    /// Row `j` of `K`, the exponent vector of `q_j`.
    pub fn k_row(&self, j: usize) -> &[i64] {
        &self.krows[j]
    }
    pub fn s_iota(&self) -> &IntMatrix {
        &self.split.s_iota
    }
    pub fn k(&self) -> &IntMatrix {
        &self.split.k
    }
    pub fn p(&self) -> &IntMatrix {
        &self.split.p
    }
    /// `iota(v) = s_iota * v` in `Z^d`.
    pub fn iota(&self, v: &[i64]) -> Vec<i64> {
        self.split.s_iota.mul_vec(v)
    }
    /// `B * chi`.
    pub fn b_apply(&self, chi: &[i64]) -> Vec<i64> {
        self.b.mul_vec(chi)
    }
    /// `P * chi`.
    pub fn p_apply(&self, chi: &[i64]) -> Vec<i64> {
        self.split.p.mul_vec(chi)
    }
    /// `theta = sum_i a_i`.
    pub fn theta(&self) -> Vec<i64> {
        let mut t = vec![0; self.m()];
        for a in &self.acols {
            for (x, y) in t.iter_mut().zip(a) {
                *x += y;
            }
        }
        t
    }
}

fn line_key(v: &[i64]) -> Vec<i64> {
    let p = primitive(v);
    let first = p.iter().find(|&&x| x != 0).copied().unwrap_or(0);
    if first < 0 {
        p.iter().map(|x| -x).collect()
    } else {
        p
    }
}

fn check_shape_and_weights(b: &IntMatrix) -> Result<(), ExactLatError> {
    let (n, d) = (b.rows(), b.cols());
    if n == 0 || d <= n {
        return Err(ExactLatError::BadShape { rows: n, cols: d });
    }
    let cols = b.to_cols_i64();
    if let Some(j) = cols.iter().position(|c| c.iter().all(|&x| x == 0)) {
        return Err(ExactLatError::ZeroColumn { column: j });
    }
    let mut lines: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (j, c) in cols.iter().enumerate() {
        lines.entry(line_key(c)).or_default().push(j);
    }
    for (line, members) in &lines {
        let mut sum = vec![0i64; n];
        for &j in members {
            for (s, x) in sum.iter_mut().zip(&cols[j]) {
                *s += x;
            }
        }
        if sum.iter().any(|&x| x != 0) {
            return Err(ExactLatError::QuasiSymmetryViolation {
                line: line.clone(),
                columns: members.clone(),
                sum,
            });
        }
    }
    let mut total = vec![0i64; n];
    for c in &cols {
        for (s, x) in total.iter_mut().zip(c) {
            *s += x;
        }
    }
    if total.iter().any(|&x| x != 0) {
        return Err(ExactLatError::ZeroSumViolation { sum: total });
    }
    Ok(())
}

fn assemble(b: IntMatrix, a: IntMatrix) -> WeightConfig {
    let split = choose_splittings(&b, &a);
    let d = b.cols();
    let m = a.rows();
    // h_cov = 1^T K, since K A = I - B^T s_iota^T and B 1 = 0.
    let h_cov: Vec<i64> = (0..m)
        .map(|j| {
            let mut s = Int::zero();
            for i in 0..d {
                s += split.k.get(i, j);
            }
            to_i64(&s)
        })
        .collect();
    let bcols = b.to_cols_i64();
    let acols = a.to_cols_i64();
    let krows = split.k.to_rows_i64();
    let flags = ConfigFlags { quasi_symmetric: true, lattice_surjective: true, zero_sum: true };
    WeightConfig { b, a, split, h_cov, flags, bcols, acols, krows }
}

/// Validate `B` and derive the canonical Gale dual and splittings.
pub fn validate_config(b: &IntMatrix) -> Result<WeightConfig, ExactLatError> {
    check_shape_and_weights(b)?;
    let a = gale_dual(b)?;
    Ok(assemble(b.clone(), a))
}

/// Validate `B` together with a caller-chosen Gale dual `A`.
pub fn validate_config_with_dual(b: &IntMatrix, a: &IntMatrix) -> Result<WeightConfig, ExactLatError> {
    check_shape_and_weights(b)?;
    gale_dual(b)?;
    let (n, d) = (b.rows(), b.cols());
    if a.cols() != d || a.rows() != d - n {
        return Err(ExactLatError::NotGaleDual {
            reason: format!("expected a {}x{} matrix, got {}x{}", d - n, d, a.rows(), a.cols()),
        });
    }
    if !a.mul(&b.transpose()).is_zero() {
        return Err(ExactLatError::NotGaleDual { reason: "A * B^T is not zero".into() });
    }
    let diag = smith(a).diagonal();
    if diag.len() < a.rows() || diag.iter().any(|x| !x.is_one()) {
        return Err(ExactLatError::NotGaleDual { reason: "A is not surjective onto Z^m".into() });
    }
    Ok(assemble(b.clone(), a.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        let c = rows.first().map_or(0, |r| r.len());
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), c)
    }

    fn gauss_b() -> IntMatrix {
        m(&[&[1, 1, -1, -1]])
    }

    fn gauss_a() -> IntMatrix {
        m(&[&[1, 0, 1, 0], &[0, 1, 0, 1], &[1, 0, 0, 1]])
    }

    #[test]
    fn identity_normal_forms() {
        let nf = normal_forms(&IntMatrix::identity(3));
        assert_eq!(nf.hermite.h, IntMatrix::identity(3));
        assert_eq!(nf.smith.s, IntMatrix::identity(3));
    }

    #[test]
    fn smith_of_gauss_row() {
        let sm = smith(&gauss_b());
        assert_eq!(sm.s, m(&[&[1, 0, 0, 0]]));
        assert_eq!(sm.u.mul(&gauss_b()).mul(&sm.v), sm.s);
    }

    #[test]
    fn smith_of_diag_2_3() {
        let x = m(&[&[2, 0], &[0, 3]]);
        let sm = smith(&x);
        assert_eq!(sm.s, m(&[&[1, 0], &[0, 6]]));
        assert_eq!(sm.u.mul(&x).mul(&sm.v), sm.s);
        assert!(sm.u.det().abs().is_one() && sm.v.det().abs().is_one());
    }

    #[test]
    fn hermite_transform_identity() {
        let x = m(&[&[4, 6, 2], &[2, 5, 5], &[0, 0, 7]]);
        let h = hermite(&x);
        assert_eq!(h.u.mul(&x), h.h);
        assert!(h.u.det().abs().is_one());
        assert_eq!(h.rank, 3);
    }

    #[test]
    fn gauss_gale_dual_has_the_right_kernel() {
        let a = gale_dual(&gauss_b()).unwrap();
        assert_eq!(a.rows(), 3);
        assert!(a.mul(&gauss_b().transpose()).is_zero());
        assert!(smith(&a).diagonal().iter().all(|x| x.is_one()));
    }

    #[test]
    fn two_one_one_gale_dual() {
        let b = m(&[&[2, -1, -1]]);
        let a = gale_dual(&b).unwrap();
        assert_eq!((a.rows(), a.cols()), (2, 3));
        assert!(a.mul(&b.transpose()).is_zero());
    }

    #[test]
    fn identity_has_empty_dual() {
        let a = gale_dual(&IntMatrix::identity(2)).unwrap();
        assert_eq!((a.rows(), a.cols()), (0, 2));
        let sp = choose_splittings(&IntMatrix::identity(2), &a);
        assert_eq!(sp.s_iota, IntMatrix::identity(2));
        assert_eq!(sp.k.cols(), 0);
    }

    #[test]
    fn gauss_splittings_match_hand_computation() {
        let sp = choose_splittings(&gauss_b(), &gauss_a());
        assert_eq!(sp.s_iota, m(&[&[1], &[0], &[0], &[0]]));
        let expect_k = IntMatrix::from_cols(&[vec![0, 0, 1, 0], vec![0, 1, 0, 0], vec![0, -1, 0, 1]], 4);
        assert_eq!(sp.k, expect_k);
        assert!(sp.s_iota.transpose().mul(&sp.k).is_zero());
    }

    #[test]
    fn gauss_h_cov() {
        let cfg = validate_config_with_dual(&gauss_b(), &gauss_a()).unwrap();
        assert_eq!(cfg.h_cov, vec![1, 1, 0]);
    }

    #[test]
    fn non_saturated_is_rejected() {
        let b = m(&[&[2, -2]]);
        assert!(matches!(validate_config(&b), Err(ExactLatError::NotSaturated { .. })));
    }

    #[test]
    fn one_minus_two_is_not_quasi_symmetric() {
        let err = validate_config(&m(&[&[1, -2]])).unwrap_err();
        match err {
            ExactLatError::QuasiSymmetryViolation { sum, .. } => assert_eq!(sum, vec![-1]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn squarecross_is_valid() {
        let b = m(&[&[1, -1, 0, 0, 1, -1], &[0, 0, 1, -1, 1, -1]]);
        let cfg = validate_config(&b).unwrap();
        assert_eq!(cfg.m(), 4);
        assert!(cfg.flags.quasi_symmetric);
    }

    #[test]
    fn zero_columns_are_rejected() {
        let b = m(&[&[1, 0, -1]]);
        assert_eq!(validate_config(&b).unwrap_err(), ExactLatError::ZeroColumn { column: 1 });
    }

    #[test]
    fn wrong_dual_is_rejected() {
        let bad = m(&[&[1, 0, 1, 0], &[0, 1, 0, 1], &[2, 0, 0, 2]]);
        assert!(matches!(
            validate_config_with_dual(&gauss_b(), &bad),
            Err(ExactLatError::NotGaleDual { .. })
        ));
    }
}

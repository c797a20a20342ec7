//! Sparse Laurent polynomials with integer coefficients, i.e. elements of the
//! group ring of a lattice `Z^m`.
//!
//! Exponent vectors are stored with trailing zeros stripped, so the number of
//! variables never has to be carried around: `1` is the monomial with the empty
//! exponent and every element embeds into every `Z[u_1^±, .., u_k^±]`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

fn trim(mut e: Vec<i64>) -> Vec<i64> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

fn add_exp(a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = a.len().max(b.len());
    let v = (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0))
        .collect();
    trim(v)
}

/// Pairing of an exponent vector with a covector, missing entries read as zero.
pub fn exp_dot(e: &[i64], w: &[i64]) -> i64 {
    e.iter().zip(w).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupRingElement {
    terms: BTreeMap<Vec<i64>, i64>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(&[], c)
    }

    pub fn monomial(exp: &[i64], coeff: i64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0 {
            terms.insert(trim(exp.to_vec()), coeff);
        }
        GroupRingElement { terms }
    }

    /// `u^exp`
    pub fn u(exp: &[i64]) -> Self {
        Self::monomial(exp, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<i64>, i64)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (e, c) in it {
            out.add_term(e, c);
        }
        out
    }

    pub fn add_term(&mut self, exp: Vec<i64>, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let key = trim(exp);
        let entry = self.terms.entry(key.clone()).or_insert(0);
        *entry = entry.checked_add(coeff).expect("Laurent coefficient overflow");
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Vec::new()) == Some(&1)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &i64)> {
        self.terms.iter()
    }

    /// Terms with exponents padded to length `m`.
    pub fn terms_padded(&self, m: usize) -> Vec<(Vec<i64>, i64)> {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.clone();
                e.resize(m.max(e.len()), 0);
                (e, *c)
            })
            .collect()
    }

    pub fn coeff(&self, exp: &[i64]) -> i64 {
        self.terms.get(&trim(exp.to_vec())).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> i64 {
        self.coeff(&[])
    }

    /// `Some((coeff, exp))` when the element is a single term.
    pub fn as_monomial(&self) -> Option<(i64, Vec<i64>)> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            Some((*c, e.clone()))
        } else {
            None
        }
    }

    /// Units of the Laurent ring are exactly `± u^e`.
    pub fn is_unit(&self) -> bool {
        matches!(self.as_monomial(), Some((c, _)) if c == 1 || c == -1)
    }

    pub fn scale(&self, c: i64) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, x)| (e.clone(), x.checked_mul(c).expect("overflow"))))
    }

    pub fn shift(&self, exp: &[i64]) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, x)| (add_exp(e, exp), *x)))
    }

    /// The involution `u^e -> u^{-e}`.
    pub fn negate_exponents(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, x)| (e.iter().map(|v| -v).collect(), *x)))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Keep the terms whose exponent satisfies `keep`.
    pub fn filter<F: Fn(&[i64]) -> bool>(&self, keep: F) -> Self {
        GroupRingElement {
            terms: self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, c)| (e.clone(), *c)).collect(),
        }
    }

    /// Augmentation: every monomial maps to 1.
    pub fn augmentation(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Evaluate at `u = h`; exponents beyond `h.len()` must be zero.
    pub fn evaluate(&self, h: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            assert!(e.len() <= h.len(), "evaluation point has too few coordinates");
            let mut t = Complex64::new(*c as f64, 0.0);
            for (x, k) in h.iter().zip(e) {
                if *k != 0 {
                    t *= x.powi(*k as i32);
                }
            }
            s += t;
        }
        s
    }

    /// Exact division by `1 - u^v` when it divides; `None` otherwise.
    pub fn div_one_minus(&self, v: &[i64]) -> Option<Self> {
        let v = trim(v.to_vec());
        if v.is_empty() {
            return if self.is_zero() { Some(Self::zero()) } else { None };
        }
        // Along each coset e + Z v the element is a polynomial in t = u^v;
        // 1 - t divides it iff the coefficients sum to zero, and then the
        // quotient has coefficient at t^k equal to the partial sum up to k.
        let vd: Vec<i64> = v.clone();
        let first = vd.iter().position(|&x| x != 0).unwrap();
        let step = vd[first];
        let mut cosets: BTreeMap<Vec<i64>, Vec<(i64, i64)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let ef = e.get(first).copied().unwrap_or(0);
            let k = ef.div_euclid(step.abs()) * step.signum();
            let base = add_exp(e, &vd.iter().map(|x| -x * k).collect::<Vec<_>>());
            cosets.entry(base).or_default().push((k, *c));
        }
        let mut out = Self::zero();
        for (base, mut ts) in cosets {
            ts.sort();
            let total: i64 = ts.iter().map(|t| t.1).sum();
            if total != 0 {
                return None;
            }
            let lo = ts[0].0;
            let hi = ts[ts.len() - 1].0;
            let mut acc = 0i64;
            let mut it = ts.iter().peekable();
            for k in lo..hi {
                while let Some(&&(kk, c)) = it.peek() {
                    if kk == k {
                        acc += c;
                        it.next();
                    } else {
                        break;
                    }
                }
                if acc != 0 {
                    let e = add_exp(&base, &vd.iter().map(|x| x * k).collect::<Vec<_>>());
                    out.add_term(e, acc);
                }
            }
        }
        Some(out)
    }

    /// Render with variable names `u1, u2, ...`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k != 0)
                .map(|(j, k)| if *k == 1 { format!("u{}", j + 1) } else { format!("u{}^{}", j + 1, k) })
                .collect();
            let neg = *c < 0;
            if i > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            let a = c.abs();
            if mono.is_empty() {
                s.push_str(&a.to_string());
            } else {
                if a != 1 {
                    s.push_str(&format!("{a}*"));
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<'a> Add<&'a GroupRingElement> for &'a GroupRingElement {
    type Output = GroupRingElement;
    fn add(self, o: &GroupRingElement) -> GroupRingElement {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl AddAssign<&GroupRingElement> for GroupRingElement {
    fn add_assign(&mut self, o: &GroupRingElement) {
        for (e, c) in &o.terms {
            self.add_term(e.clone(), *c);
        }
    }
}

impl<'a> Sub<&'a GroupRingElement> for &'a GroupRingElement {
    type Output = GroupRingElement;
    fn sub(self, o: &GroupRingElement) -> GroupRingElement {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a GroupRingElement> for &'a GroupRingElement {
    type Output = GroupRingElement;
    fn mul(self, o: &GroupRingElement) -> GroupRingElement {
        let mut out = GroupRingElement::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term(add_exp(e1, e2), c1.checked_mul(*c2).expect("Laurent coefficient overflow"));
            }
        }
        out
    }
}

impl Neg for &GroupRingElement {
    type Output = GroupRingElement;
    fn neg(self) -> GroupRingElement {
        self.scale(-1)
    }
}

impl Add for GroupRingElement {
    type Output = GroupRingElement;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl Sub for GroupRingElement {
    type Output = GroupRingElement;
    fn sub(self, o: Self) -> Self {
        &self - &o
    }
}

impl Mul for GroupRingElement {
    type Output = GroupRingElement;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl Neg for GroupRingElement {
    type Output = GroupRingElement;
    fn neg(self) -> Self {
        self.scale(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_elem() -> impl Strategy<Value = GroupRingElement> {
        prop::collection::vec((prop::collection::vec(-3i64..=3, 3), -4i64..=4), 0..6)
            .prop_map(GroupRingElement::from_terms)
    }

    #[test]
    fn trailing_zeros_do_not_matter() {
        assert_eq!(GroupRingElement::u(&[1, 0, 0]), GroupRingElement::u(&[1]));
        assert!(GroupRingElement::u(&[0, 0]).is_one());
    }

    #[test]
    fn product_and_units() {
        let q = GroupRingElement::u(&[0, 1, -1]);
        let p = &(&GroupRingElement::one() + &q) * &(&GroupRingElement::one() - &q);
        assert_eq!(p, &GroupRingElement::one() - &GroupRingElement::u(&[0, 2, -2]));
        assert!(q.is_unit());
        assert!(!p.is_unit());
    }

    #[test]
    fn division_by_binomials() {
        let v = [1, 1, -1];
        let f = &GroupRingElement::one() - &GroupRingElement::u(&v);
        let g = GroupRingElement::from_terms(vec![(vec![2, 0, 0], 3), (vec![0, 1, 0], -1)]);
        let prod = &f * &g;
        assert_eq!(prod.div_one_minus(&v), Some(g));
        assert_eq!(GroupRingElement::one().div_one_minus(&v), None);
    }

    #[test]
    fn evaluation_at_one_is_augmentation() {
        let x = GroupRingElement::from_terms(vec![(vec![1, -2], 3), (vec![], -1)]);
        let one = [Complex64::new(1.0, 0.0); 2];
        assert_eq!(x.evaluate(&one).re, x.augmentation() as f64);
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_elem(), b in arb_elem(), c in arb_elem()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn division_inverts_multiplication(a in arb_elem(), v in prop::collection::vec(-2i64..=2, 3)) {
            prop_assume!(v.iter().any(|&x| x != 0));
            let f = &GroupRingElement::one() - &GroupRingElement::u(&v);
            prop_assert_eq!((&f * &a).div_one_minus(&v), Some(a));
        }

        #[test]
        fn evaluation_is_a_homomorphism(a in arb_elem(), b in arb_elem()) {
            let h = [Complex64::new(0.7, 0.2), Complex64::new(-0.3, 1.1), Complex64::new(1.2, -0.4)];
            let lhs = (&a * &b).evaluate(&h);
            let rhs = a.evaluate(&h) * b.evaluate(&h);
            prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
        }
    }
}

//! Truncated supercommutative polynomials in graded coordinates.
//!
//! Sign conventions (parity `p_i`, exponents `a_i`, variables in index order):
//!
//! | operation              | sign                                     |
//! |------------------------|------------------------------------------|
//! | `m · m'`               | `(-1)^{Σ_{i>j} a_i a'_j p_i p_j}`        |
//! | left `∂_k m`           | `a_k (-1)^{p_k Σ_{i<k} a_i p_i}`         |
//! | right `m ∂_k`          | `a_k (-1)^{p_k Σ_{i>k} a_i p_i}`         |
//!
//! Odd variables carry exponent at most one.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::{format_scalar, int, Scalar};
use crate::linalg::Matrix;

/// Graded coordinates `x^a`, one per cohomology class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoordinateRing {
    labels: Vec<String>,
    degrees: Vec<i32>,
}

impl CoordinateRing {
    pub fn new(labels: Vec<String>, degrees: Vec<i32>) -> Result<Self> {
        if labels.len() != degrees.len() {
            return Err(Error::Shape("labels and degrees differ in length".into()));
        }
        Ok(CoordinateRing { labels, degrees })
    }

    /// Coordinates dual to classes of the given degrees: `deg x^a = 2 - |e_a|`.
    pub fn for_classes(labels: &[String], class_degrees: &[i32]) -> Self {
        CoordinateRing {
            labels: labels.iter().map(|l| format!("x[{l}]")).collect(),
            degrees: class_degrees.iter().map(|d| 2 - d).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degree(&self, k: usize) -> i32 {
        self.degrees[k]
    }

    pub fn is_odd(&self, k: usize) -> bool {
        self.degrees[k].rem_euclid(2) == 1
    }

    pub fn label(&self, k: usize) -> &str {
        &self.labels[k]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn one(&self) -> Monomial {
        Monomial(vec![0; self.len()])
    }

    pub fn var(&self, k: usize) -> Monomial {
        let mut e = vec![0; self.len()];
        e[k] = 1;
        Monomial(e)
    }

    /// Builds a monomial, rejecting repeated odd variables.
    pub fn monomial(&self, exps: Vec<u32>) -> Option<Monomial> {
        (exps.len() == self.len() && (0..self.len()).all(|k| !self.is_odd(k) || exps[k] <= 1))
            .then_some(Monomial(exps))
    }

    pub fn mono_degree(&self, m: &Monomial) -> i32 {
        m.0.iter().zip(&self.degrees).map(|(&a, &d)| a as i32 * d).sum()
    }

    pub fn mono_parity(&self, m: &Monomial) -> u32 {
        (0..self.len()).filter(|&k| self.is_odd(k)).map(|k| m.0[k]).sum::<u32>() % 2
    }

    /// `m · m'` as a signed monomial; `None` when an odd variable repeats.
    pub fn mul(&self, m: &Monomial, n: &Monomial) -> Option<(Monomial, bool)> {
        let mut neg = false;
        let mut odd_in_n_below = 0u32;
        let mut out = Vec::with_capacity(self.len());
        for k in 0..self.len() {
            let (a, b) = (m.0[k], n.0[k]);
            if self.is_odd(k) {
                if a + b > 1 {
                    return None;
                }
                if a == 1 && odd_in_n_below % 2 == 1 {
                    neg = !neg;
                }
                odd_in_n_below += b;
            }
            out.push(a + b);
        }
        Some((Monomial(out), neg))
    }

    /// Left derivative: `∂_k m = coeff · m'`.
    pub fn left_derivative(&self, k: usize, m: &Monomial) -> Option<(Monomial, Scalar)> {
        let a = m.0[k];
        if a == 0 {
            return None;
        }
        let mut c = int(i64::from(a));
        if self.is_odd(k) {
            let before: u32 = (0..k).filter(|&i| self.is_odd(i)).map(|i| m.0[i]).sum();
            if before % 2 == 1 {
                c = -c;
            }
        }
        let mut e = m.0.clone();
        e[k] -= 1;
        Some((Monomial(e), c))
    }

    /// Right derivative: `m ∂_k = coeff · m'` (variable moved to the end).
    pub fn right_derivative(&self, k: usize, m: &Monomial) -> Option<(Monomial, Scalar)> {
        let a = m.0[k];
        if a == 0 {
            return None;
        }
        let mut c = int(i64::from(a));
        if self.is_odd(k) {
            let after: u32 = (k + 1..self.len()).filter(|&i| self.is_odd(i)).map(|i| m.0[i]).sum();
            if after % 2 == 1 {
                c = -c;
            }
        }
        let mut e = m.0.clone();
        e[k] -= 1;
        Some((Monomial(e), c))
    }

    /// All monomials of polynomial order at most `order`, in canonical order.
    pub fn monomials_up_to(&self, order: u32) -> Vec<Monomial> {
        let mut out = vec![Vec::new()];
        for k in 0..self.len() {
            let cap = if self.is_odd(k) { 1 } else { order };
            let mut next = Vec::new();
            for e in &out {
                let used: u32 = e.iter().sum();
                for a in 0..=cap.min(order - used) {
                    let mut f = e.clone();
                    f.push(a);
                    next.push(f);
                }
            }
            out = next;
        }
        let mut ms: Vec<Monomial> = out.into_iter().map(Monomial).collect();
        ms.sort();
        ms
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .0
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(k, &a)| if a == 1 { self.labels[k].clone() } else { format!("{}^{a}", self.labels[k]) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Exponent vector. Ordered by polynomial order first, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Variables in order, each repeated by its exponent.
    pub fn factors(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(k, &a)| std::iter::repeat_n(k, a as usize)).collect()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order().cmp(&other.order()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Scalar-valued truncated polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    ring: Arc<CoordinateRing>,
    order: u32,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero(ring: Arc<CoordinateRing>, order: u32) -> Self {
        Poly { ring, order, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(ring: Arc<CoordinateRing>, order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut p = Poly::zero(ring, order);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn var(ring: Arc<CoordinateRing>, order: u32, k: usize) -> Self {
        let m = ring.var(k);
        Poly::from_terms(ring, order, [(m, Scalar::one())])
    }

    pub fn constant(ring: Arc<CoordinateRing>, order: u32, c: Scalar) -> Self {
        let m = ring.one();
        Poly::from_terms(ring, order, [(m, c)])
    }

    pub fn ring(&self) -> &Arc<CoordinateRing> {
        &self.ring
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&self.ring.one())
    }

    /// Adds `c·m`, dropping it when beyond the truncation order.
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() || m.order() > self.order {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, s: &Scalar) {
        for (m, c) in other.terms() {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn scaled(&self, s: &Scalar) -> Poly {
        let mut out = Poly::zero(self.ring.clone(), self.order);
        out.add_scaled(self, s);
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    /// Keeps only monomials of order at most `order`.
    pub fn truncate(&self, order: u32) -> Poly {
        Poly::from_terms(
            self.ring.clone(),
            order.min(self.order),
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Terms of exactly the given polynomial order.
    pub fn part(&self, n: u32) -> Poly {
        Poly::from_terms(
            self.ring.clone(),
            self.order,
            self.terms.iter().filter(|(m, _)| m.order() == n).map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let order = self.order.min(other.order);
        let mut out = Poly::zero(self.ring.clone(), order);
        for (m, a) in self.terms() {
            for (n, b) in other.terms() {
                if m.order() + n.order() > order {
                    continue;
                }
                if let Some((p, neg)) = self.ring.mul(m, n) {
                    let c = a * b;
                    out.add_term(p, if neg { -c } else { c });
                }
            }
        }
        out
    }

    /// Left partial derivative `∂/∂x^k`.
    pub fn derivative(&self, k: usize) -> Poly {
        let mut out = Poly::zero(self.ring.clone(), self.order.saturating_sub(1));
        for (m, c) in self.terms() {
            if let Some((n, s)) = self.ring.left_derivative(k, m) {
                out.add_term(n, s * c);
            }
        }
        out
    }

    /// `∂_a ∂_b ∂_c Φ`, applied right to left (`∂_c` first).
    pub fn third_derivative(&self, a: usize, b: usize, c: usize) -> Poly {
        self.derivative(c).derivative(b).derivative(a)
    }

    /// Linear change of variables `y^b ↦ Σ_a F[b][a] x^a` into `target`.
    pub fn substitute(&self, target: Arc<CoordinateRing>, f: &Matrix) -> Result<Poly> {
        if f.rows() != self.ring.len() || f.cols() != target.len() {
            return Err(Error::Shape("substitution matrix has wrong shape".into()));
        }
        let images: Vec<Poly> = (0..self.ring.len())
            .map(|b| {
                Poly::from_terms(
                    target.clone(),
                    self.order,
                    (0..target.len()).map(|a| (target.var(a), f[(b, a)].clone())),
                )
            })
            .collect();
        let mut out = Poly::zero(target.clone(), self.order);
        for (m, c) in self.terms() {
            let mut acc = Poly::constant(target.clone(), self.order, c.clone());
            for k in m.factors() {
                acc = acc.mul(&images[k]);
            }
            out.add_scaled(&acc, &Scalar::one());
        }
        Ok(out)
    }

    /// `(monomial, coefficient)` strings in canonical order.
    pub fn to_strings(&self) -> Vec<(String, String)> {
        self.terms().map(|(m, c)| (self.ring.format_monomial(m), format_scalar(c))).collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.to_strings().into_iter().map(|(m, c)| format!("({c})*{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::q;

    fn ring() -> Arc<CoordinateRing> {
        // x0 even, x1 odd, x2 odd, x3 even
        Arc::new(CoordinateRing::for_classes(
            &["a".into(), "b".into(), "c".into(), "d".into()],
            &[0, 1, 1, 2],
        ))
    }

    fn mono(r: &CoordinateRing, e: &[u32]) -> Monomial {
        r.monomial(e.to_vec()).unwrap()
    }

    #[test]
    fn odd_variables_anticommute() {
        let r = ring();
        let (x1, x2) = (r.var(1), r.var(2));
        let (m, neg) = r.mul(&x1, &x2).unwrap();
        assert!(!neg);
        let (m2, neg2) = r.mul(&x2, &x1).unwrap();
        assert_eq!(m, m2);
        assert!(neg2);
        assert!(r.mul(&x1, &x1).is_none());
        assert!(r.monomial(vec![0, 2, 0, 0]).is_none());
    }

    #[test]
    fn derivative_signs() {
        let r = ring();
        let m = mono(&r, &[1, 1, 1, 0]);
        assert_eq!(r.left_derivative(2, &m).unwrap(), (mono(&r, &[1, 1, 0, 0]), q(-1, 1)));
        assert_eq!(r.right_derivative(1, &m).unwrap(), (mono(&r, &[1, 0, 1, 0]), q(-1, 1)));
        assert_eq!(r.left_derivative(0, &mono(&r, &[3, 0, 0, 0])).unwrap().1, q(3, 1));
    }

    #[test]
    fn substitution_swaps_odd_variables() {
        let r = ring();
        let mut f = Matrix::zeros(4, 4);
        f[(0, 0)] = q(1, 1);
        f[(1, 2)] = q(1, 1);
        f[(2, 1)] = q(1, 1);
        f[(3, 3)] = q(1, 1);
        let p = Poly::from_terms(r.clone(), 4, [(mono(&r, &[0, 1, 1, 0]), q(1, 1))]);
        let s = p.substitute(r.clone(), &f).unwrap();
        assert_eq!(s.coeff(&mono(&r, &[0, 1, 1, 0])), q(-1, 1));
    }
}

//! Algebra-valued formal power series `𝒜 ⊗ K` in the cohomology coordinates.
//!
//! A term `c ⊗ m` has total degree `|c| + deg m`. Products and Δ follow
//! `(c⊗m)(c'⊗m') = (-1)^{|m||c'|} cc' ⊗ mm'` and `Δ(c⊗m) = Δc ⊗ m`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::dgbv::DgbvInstance;
use crate::graded::{sign, Element, LinearOperator, Scalar};
use crate::par;
use crate::poly::{CoordinateRing, Monomial, Poly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalElement {
    ring: Arc<CoordinateRing>,
    order: u32,
    terms: BTreeMap<Monomial, Element>,
}

impl FormalElement {
    pub fn zero(ring: Arc<CoordinateRing>, order: u32) -> Self {
        FormalElement { ring, order, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(ring: Arc<CoordinateRing>, order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Element)>,
    {
        let mut f = FormalElement::zero(ring, order);
        for (m, c) in terms {
            f.add_term(m, &c, &Scalar::one());
        }
        f
    }

    pub fn ring(&self) -> &Arc<CoordinateRing> {
        &self.ring
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn with_order(&self, order: u32) -> Self {
        let mut out = FormalElement::zero(self.ring.clone(), order);
        out.add_scaled(self, &Scalar::one());
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Element)> {
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

    pub fn coeff(&self, m: &Monomial) -> Element {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, c: &Element, s: &Scalar) {
        if c.is_zero() || s.is_zero() || m.order() > self.order {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.scaled(s));
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_scaled(c, s);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FormalElement, s: &Scalar) {
        for (m, c) in other.terms() {
            self.add_term(m.clone(), c, s);
        }
    }

    pub fn scaled(&self, s: &Scalar) -> FormalElement {
        let mut out = FormalElement::zero(self.ring.clone(), self.order);
        out.add_scaled(self, s);
        out
    }

    pub fn sum(&self, other: &FormalElement) -> FormalElement {
        let mut out = self.with_order(self.order.min(other.order));
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn difference(&self, other: &FormalElement) -> FormalElement {
        let mut out = self.with_order(self.order.min(other.order));
        out.add_scaled(other, &-Scalar::one());
        out
    }

    /// Terms of polynomial order exactly `n`.
    pub fn part(&self, n: u32) -> FormalElement {
        FormalElement::from_terms(
            self.ring.clone(),
            self.order,
            self.terms.iter().filter(|(m, _)| m.order() == n).map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Terms of polynomial order at most `n`.
    pub fn up_to(&self, n: u32) -> FormalElement {
        FormalElement::from_terms(
            self.ring.clone(),
            self.order,
            self.terms.iter().filter(|(m, _)| m.order() <= n).map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    pub fn min_order(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::order).min()
    }

    /// Applies a linear map to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&Element) -> Element) -> FormalElement {
        FormalElement::from_terms(
            self.ring.clone(),
            self.order,
            self.terms.iter().map(|(m, c)| (m.clone(), f(c))),
        )
    }

    pub fn apply(&self, op: &LinearOperator) -> FormalElement {
        self.map_coeffs(|c| op.apply_unchecked(c))
    }

    /// Right derivative `F ∂_k`; never passes the algebra coefficient.
    pub fn right_derivative(&self, k: usize) -> FormalElement {
        let mut out = FormalElement::zero(self.ring.clone(), self.order);
        for (m, c) in self.terms() {
            if let Some((n, s)) = self.ring.right_derivative(k, m) {
                out.add_term(n, c, &s);
            }
        }
        out
    }

    /// Contraction with a constant tangent vector `X = Σ X^k ∂_k` from the right.
    pub fn contract(&self, x: &[Scalar]) -> FormalElement {
        let mut out = FormalElement::zero(self.ring.clone(), self.order);
        for (k, xk) in x.iter().enumerate() {
            if !xk.is_zero() {
                out.add_scaled(&self.right_derivative(k), xk);
            }
        }
        out
    }

    /// Whether each term has total degree `d` in the given algebra.
    pub fn is_homogeneous(&self, algebra: &DgbvInstance, d: i32) -> bool {
        self.terms().all(|(m, c)| {
            let md = self.ring.mono_degree(m);
            c.terms().all(|(i, _)| algebra.degree(i) + md == d)
        })
    }

    /// `(monomial, coefficient)` pairs rendered with algebra labels.
    pub fn to_strings(&self, algebra: &DgbvInstance) -> Vec<(String, String)> {
        self.terms().map(|(m, c)| (self.ring.format_monomial(m), algebra.label_of(c))).collect()
    }
}

impl fmt::Display for FormalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms().map(|(m, c)| format!("({c})⊗{}", self.ring.format_monomial(m))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Operations on `𝒜 ⊗ K` for a fixed algebra and coordinate ring.
pub struct FormalAlgebra<'a> {
    algebra: &'a DgbvInstance,
    ring: Arc<CoordinateRing>,
    /// `(Δ(e_i e_j), (Δe_i) e_j, e_i Δe_j)` indexed by `i * n + j`.
    pieces: Vec<[Element; 3]>,
}

impl<'a> FormalAlgebra<'a> {
    pub fn new(algebra: &'a DgbvInstance, ring: Arc<CoordinateRing>) -> Self {
        let n = algebra.dim();
        let pieces = par::map_range(n * n, |ij| {
            let (i, j) = (ij / n, ij % n);
            let (ei, ej) = (Element::basis(i), Element::basis(j));
            [
                algebra.apply_bv(algebra.product_basis(i, j)),
                algebra.mul(&algebra.apply_bv(&ei), &ej),
                algebra.mul(&ei, &algebra.apply_bv(&ej)),
            ]
        });
        FormalAlgebra { algebra, ring, pieces }
    }

    pub fn algebra(&self) -> &DgbvInstance {
        self.algebra
    }

    pub fn ring(&self) -> &Arc<CoordinateRing> {
        &self.ring
    }

    pub fn zero(&self, order: u32) -> FormalElement {
        FormalElement::zero(self.ring.clone(), order)
    }

    /// `Σ_a e_a ⊗ x^a` for the given representatives.
    pub fn linear(&self, reps: &[Element], order: u32) -> FormalElement {
        FormalElement::from_terms(
            self.ring.clone(),
            order,
            reps.iter().enumerate().map(|(a, e)| (self.ring.var(a), e.clone())),
        )
    }

    /// `c ⊗ 1`.
    pub fn constant(&self, c: &Element, order: u32) -> FormalElement {
        FormalElement::from_terms(self.ring.clone(), order, [(self.ring.one(), c.clone())])
    }

    fn convolve<F>(&self, f: &FormalElement, g: &FormalElement, term: F) -> FormalElement
    where
        F: Fn(&Monomial, &Element, &Monomial, &Element, &mut Element, &mut bool) -> bool
            + Sync
            + Send,
    {
        let order = f.order.min(g.order);
        let left: Vec<(&Monomial, &Element)> = f.terms().collect();
        let partials = par::map(&left, |(m, c)| {
            let mut acc = FormalElement::zero(self.ring.clone(), order);
            for (n, d) in g.terms() {
                if m.order() + n.order() > order {
                    continue;
                }
                let Some((mn, neg)) = self.ring.mul(m, n) else { continue };
                let mut out = Element::zero();
                let mut neg = neg;
                if term(m, c, n, d, &mut out, &mut neg) {
                    let s = if neg { -Scalar::one() } else { Scalar::one() };
                    acc.add_term(mn, &out, &s);
                }
            }
            acc
        });
        let mut out = FormalElement::zero(self.ring.clone(), order);
        for p in &partials {
            out.add_scaled(p, &Scalar::one());
        }
        out
    }

    pub fn mul(&self, f: &FormalElement, g: &FormalElement) -> FormalElement {
        let a = self.algebra;
        self.convolve(f, g, |m, c, _, d, out, _| {
            let pm = i64::from(self.ring.mono_parity(m));
            for (j, dj) in d.terms() {
                let s = sign(pm * i64::from(a.degree(j)));
                for (i, ci) in c.terms() {
                    out.add_scaled(a.product_basis(i, j), &(&s * ci * dj));
                }
            }
            true
        })
    }

    /// `[f • g]` from the defining formula applied to `𝒜 ⊗ K` with total degrees.
    pub fn bracket(&self, f: &FormalElement, g: &FormalElement) -> FormalElement {
        let a = self.algebra;
        let n = a.dim();
        self.convolve(f, g, |m, c, _, d, out, _| {
            let pm = i64::from(self.ring.mono_parity(m));
            let md = i64::from(self.ring.mono_degree(m));
            for (i, ci) in c.terms() {
                let total = i64::from(a.degree(i)) + md;
                for (j, dj) in d.terms() {
                    let [x, y, z] = &self.pieces[i * n + j];
                    let s = sign(total + pm * i64::from(a.degree(j)));
                    let k = &s * ci * dj;
                    out.add_scaled(x, &k);
                    out.add_scaled(y, &-k.clone());
                    out.add_scaled(z, &(-(k * sign(total + pm))));
                }
            }
            true
        })
    }

    pub fn delta(&self, f: &FormalElement) -> FormalElement {
        f.apply(self.algebra.delta())
    }

    pub fn bv(&self, f: &FormalElement) -> FormalElement {
        f.apply(self.algebra.bv())
    }

    /// Left derivative `∂_k` on `c ⊗ m`: `(-1)^{p_k |c|} c ⊗ ∂_k m`.
    pub fn left_derivative(&self, k: usize, f: &FormalElement) -> FormalElement {
        let odd = self.ring.is_odd(k);
        let mut out = FormalElement::zero(self.ring.clone(), f.order);
        for (m, c) in f.terms() {
            if let Some((n, s)) = self.ring.left_derivative(k, m) {
                let mut coeff = Element::zero();
                for (i, ci) in c.terms() {
                    let flip = odd && self.algebra.degree(i).rem_euclid(2) == 1;
                    coeff.add_term(i, if flip { -(ci * &s) } else { ci * &s });
                }
                out.add_term(n, &coeff, &Scalar::one());
            }
        }
        out
    }

    /// `∫ (c ⊗ m) = (∫c) m`.
    pub fn integrate(&self, f: &FormalElement) -> Poly {
        Poly::from_terms(
            self.ring.clone(),
            f.order,
            f.terms().map(|(m, c)| (m.clone(), self.algebra.integrate(c))),
        )
    }

    /// `δ_Γ a = δa + [Γ • a]`.
    pub fn deformed_differential(&self, gamma: &FormalElement, a: &FormalElement) -> FormalElement {
        self.delta(a).sum(&self.bracket(gamma, a))
    }

    /// `δΓ + ½[Γ • Γ]`.
    pub fn mc_residual(&self, gamma: &FormalElement) -> FormalElement {
        let mut r = self.delta(gamma);
        r.add_scaled(&self.bracket(gamma, gamma), &Scalar::new(1.into(), 2.into()));
        r
    }
}

//! Polynomial polyvector fields and differential forms on affine space, the
//! Schouten-Nijenhuis bracket, Koszul's operator on forms, the symplectic
//! dictionary, and the constant-coefficient torus model.
//!
//! Elements are finite sums `f(y) ξ_{i1}…ξ_{ip}` with `i1 < … < ip`, where
//! the odd generators are `∂_i` for polyvectors and `dy^i` for forms.
//!
//! Conventions:
//! - `ι_k` is the left derivative in `ξ_k`; the contraction by a polyvector
//!   is `i(∂_{i1}∧…∧∂_{ip}) = ι_{ip} ∘ … ∘ ι_{i1}`, so that
//!   `i(∂_i∧∂_j)(dy^a∧dy^b) = δ_i^a δ_j^b − δ_i^b δ_j^a`.
//! - `[P, Q]_S = Σ_k (P ∂⃖_{ξ_k})(∂_{y^k} Q) − (−1)^{(p−1)(q−1)} (Q ∂⃖_{ξ_k})(∂_{y^k} P)`,
//!   which on decomposables is `Σ (−1)^{i+j} [X_i, Y_j] ∧ X_1…X̂_i…X_p ∧ Y_1…Ŷ_j…Y_q`.
//! - Koszul: `Δφ = i(w) dφ − d(i(w) φ)`.
//! - The Poisson bivector of a symplectic form has components `(ω⁻¹)_{ij}`.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use num_traits::{One, Zero};

use crate::dgbv::DgbvInstance;
use crate::error::{Error, Result};
use crate::graded::{format_scalar, int, sign, Scalar};
use crate::linalg::Matrix;
use crate::models::{exterior_model, exterior_sign};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Vectors;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Forms;

pub trait OddKind: Clone + Copy + fmt::Debug + Default + PartialEq + Eq {
    /// Grading of one odd generator.
    const DEGREE: i32;
    const SYMBOL: &'static str;
}

impl OddKind for Vectors {
    const DEGREE: i32 = -1;
    const SYMBOL: &'static str = "d";
}

impl OddKind for Forms {
    const DEGREE: i32 = 1;
    const SYMBOL: &'static str = "dy";
}

type Key = (Vec<u32>, u32);

/// Finite sum of polynomial coefficients times odd monomials in `n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multi<K: OddKind> {
    n: usize,
    terms: BTreeMap<Key, Scalar>,
    kind: PhantomData<K>,
}

pub type PolyvectorField = Multi<Vectors>;
pub type PolyForm = Multi<Forms>;

fn bits_below(mask: u32, k: usize) -> u32 {
    (mask & ((1u32 << k) - 1)).count_ones()
}

fn bits_above(mask: u32, k: usize) -> u32 {
    (mask >> (k + 1)).count_ones()
}

impl<K: OddKind> Multi<K> {
    pub fn zero(n: usize) -> Self {
        Multi { n, terms: BTreeMap::new(), kind: PhantomData }
    }

    /// `c · y^exps · ξ_mask`.
    pub fn term(n: usize, exps: Vec<u32>, mask: u32, c: Scalar) -> Self {
        assert_eq!(exps.len(), n, "exponent vector length");
        assert!(n >= 32 || mask >> n == 0, "odd generator out of range");
        let mut out = Self::zero(n);
        out.add_term(exps, mask, c);
        out
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        Self::term(n, vec![0; n], 0, c)
    }

    /// The coordinate function `y^k`.
    pub fn coordinate(n: usize, k: usize) -> Self {
        let mut e = vec![0; n];
        e[k] = 1;
        Self::term(n, e, 0, Scalar::one())
    }

    /// The odd generator `ξ_k`.
    pub fn odd(n: usize, k: usize) -> Self {
        Self::term(n, vec![0; n], 1 << k, Scalar::one())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], u32, &Scalar)> {
        self.terms.iter().map(|((e, m), c)| (e.as_slice(), *m, c))
    }

    pub fn add_term(&mut self, exps: Vec<u32>, mask: u32, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((exps, mask)) {
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

    pub fn add_scaled(&mut self, other: &Self, s: &Scalar) {
        for ((e, m), c) in &other.terms {
            self.add_term(e.clone(), *m, c * s);
        }
    }

    pub fn scaled(&self, s: &Scalar) -> Self {
        let mut out = Self::zero(self.n);
        out.add_scaled(self, s);
        out
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    /// Number of odd generators, if all terms agree.
    pub fn odd_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|(_, m)| m.count_ones());
        let first = it.next().unwrap_or(0);
        it.all(|d| d == first).then_some(first)
    }

    /// Grading: `-p` for `p`-vectors, `p` for `p`-forms.
    pub fn degree(&self) -> Option<i32> {
        self.odd_degree().map(|p| K::DEGREE * p as i32)
    }

    /// Largest total polynomial degree among the coefficients.
    pub fn coefficient_degree(&self) -> u32 {
        self.terms.keys().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn homogeneous_parts(&self) -> Vec<(u32, Self)> {
        let mut parts: BTreeMap<u32, Self> = BTreeMap::new();
        for ((e, m), c) in &self.terms {
            parts
                .entry(m.count_ones())
                .or_insert_with(|| Self::zero(self.n))
                .add_term(e.clone(), *m, c.clone());
        }
        parts.into_iter().collect()
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = Self::zero(self.n);
        for ((e1, m1), c1) in &self.terms {
            for ((e2, m2), c2) in &other.terms {
                let Some(s) = exterior_sign(*m1, *m2) else { continue };
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, m1 | m2, s * c1 * c2);
            }
        }
        out
    }

    /// `∂/∂y^k` on the coefficients.
    pub fn partial(&self, k: usize) -> Self {
        let mut out = Self::zero(self.n);
        for ((e, m), c) in &self.terms {
            if e[k] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[k] -= 1;
            out.add_term(e2, *m, c * int(i64::from(e[k])));
        }
        out
    }

    /// Left derivative in `ξ_k`.
    pub fn odd_left(&self, k: usize) -> Self {
        let mut out = Self::zero(self.n);
        for ((e, m), c) in &self.terms {
            if m & (1 << k) != 0 {
                out.add_term(e.clone(), m & !(1 << k), sign(i64::from(bits_below(*m, k))) * c);
            }
        }
        out
    }

    /// Right derivative in `ξ_k`.
    pub fn odd_right(&self, k: usize) -> Self {
        let mut out = Self::zero(self.n);
        for ((e, m), c) in &self.terms {
            if m & (1 << k) != 0 {
                out.add_term(e.clone(), m & !(1 << k), sign(i64::from(bits_above(*m, k))) * c);
            }
        }
        out
    }
}

fn format_term(n: usize, e: &[u32], m: u32, symbol: &str) -> String {
    let mut parts = Vec::new();
    for (k, &p) in e.iter().enumerate() {
        match p {
            0 => {}
            1 => parts.push(format!("y{}", k + 1)),
            _ => parts.push(format!("y{}^{p}", k + 1)),
        }
    }
    let odd: Vec<String> = (0..n).filter(|k| m & (1 << k) != 0).map(|k| format!("{symbol}{}", k + 1)).collect();
    if !odd.is_empty() {
        parts.push(odd.join("^"));
    }
    parts.join("*")
}

impl<K: OddKind> fmt::Display for Multi<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let body: Vec<String> = self
            .terms
            .iter()
            .map(|((e, m), c)| {
                let t = format_term(self.n, e, *m, K::SYMBOL);
                if t.is_empty() {
                    format!("({})", format_scalar(c))
                } else {
                    format!("({})*{t}", format_scalar(c))
                }
            })
            .collect();
        write!(f, "{}", body.join(" + "))
    }
}

fn check_dims(n1: usize, n2: usize) -> Result<()> {
    if n1 != n2 {
        return Err(Error::Shape(format!("dimension {n1} against {n2}")));
    }
    Ok(())
}

/// The Schouten-Nijenhuis bracket.
pub fn schouten_bracket(p: &PolyvectorField, q: &PolyvectorField) -> Result<PolyvectorField> {
    check_dims(p.n, q.n)?;
    let n = p.n;
    let mut out = PolyvectorField::zero(n);
    for (dp, pp) in p.homogeneous_parts() {
        for (dq, qq) in q.homogeneous_parts() {
            let s = sign((i64::from(dp) - 1) * (i64::from(dq) - 1));
            for k in 0..n {
                out.add_scaled(&pp.odd_right(k).wedge(&qq.partial(k)), &Scalar::one());
                out.add_scaled(&qq.odd_right(k).wedge(&pp.partial(k)), &-s.clone());
            }
        }
    }
    Ok(out)
}

pub fn is_poisson(w: &PolyvectorField) -> Result<bool> {
    Ok(schouten_bracket(w, w)?.is_zero())
}

fn check_bivector(w: &PolyvectorField) -> Result<()> {
    if !w.is_zero() && w.odd_degree() != Some(2) {
        return Err(Error::Grading("expected a bivector".into()));
    }
    Ok(())
}

/// `σ(P) = [w, P]_S`; with `verify` set, rejects `w` with `[w, w]_S ≠ 0`.
pub fn poisson_sigma(w: &PolyvectorField, p: &PolyvectorField, verify: bool) -> Result<PolyvectorField> {
    check_bivector(w)?;
    if verify && !is_poisson(w)? {
        return Err(Error::NotPoisson);
    }
    schouten_bracket(w, p)
}

/// Exterior derivative.
pub fn exterior_d(phi: &PolyForm) -> PolyForm {
    let mut out = PolyForm::zero(phi.n);
    for k in 0..phi.n {
        out.add_scaled(&PolyForm::odd(phi.n, k).wedge(&phi.partial(k)), &Scalar::one());
    }
    out
}

/// Contraction of a form by a polyvector field.
pub fn contract(p: &PolyvectorField, phi: &PolyForm) -> Result<PolyForm> {
    check_dims(p.n, phi.n)?;
    let n = p.n;
    let mut out = PolyForm::zero(n);
    for ((e, m), c) in &p.terms {
        let mut cur = phi.clone();
        for k in (0..n).filter(|k| m & (1 << k) != 0) {
            cur = cur.odd_left(k);
        }
        let coeff = PolyForm::term(n, e.clone(), 0, c.clone());
        out.add_scaled(&coeff.wedge(&cur), &Scalar::one());
    }
    Ok(out)
}

/// Koszul's operator `[i(w), d]` on forms.
pub fn koszul_delta(w: &PolyvectorField, phi: &PolyForm) -> Result<PolyForm> {
    check_bivector(w)?;
    Ok(contract(w, &exterior_d(phi))?.difference(&exterior_d(&contract(w, phi)?)))
}

/// As [`koszul_delta`], rejecting non-Poisson `w`.
pub fn koszul_delta_checked(w: &PolyvectorField, phi: &PolyForm) -> Result<PolyForm> {
    if !is_poisson(w)? {
        return Err(Error::NotPoisson);
    }
    koszul_delta(w, phi)
}

/// The derived bracket `(−1)^{|a|}(Δ(ab) − (Δa)b − (−1)^{|a|} aΔb)` of Koszul's operator.
pub fn koszul_bracket(w: &PolyvectorField, a: &PolyForm, b: &PolyForm) -> Result<PolyForm> {
    let mut out = PolyForm::zero(a.n);
    for (da, pa) in a.homogeneous_parts() {
        let s = sign(i64::from(da));
        let mut r = koszul_delta(w, &pa.wedge(b))?;
        r.add_scaled(&koszul_delta(w, &pa)?.wedge(b), &-Scalar::one());
        r.add_scaled(&pa.wedge(&koszul_delta(w, b)?), &-s.clone());
        out.add_scaled(&r, &s);
    }
    Ok(out)
}

/// A constant symplectic form with its induced maps.
#[derive(Clone, Debug)]
pub struct Symplectic {
    /// `ω = Σ_{i<j} ω_ij dy^i ∧ dy^j`, antisymmetric.
    pub omega: Matrix,
    pub inverse: Matrix,
    /// The Poisson bivector `Σ_{i<j} (ω⁻¹)_ij ∂_i ∧ ∂_j`.
    pub w: PolyvectorField,
}

impl Symplectic {
    pub fn dim(&self) -> usize {
        self.omega.rows()
    }

    pub fn form(&self) -> PolyForm {
        let n = self.dim();
        let mut out = PolyForm::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                out.add_term(vec![0; n], (1 << i) | (1 << j), self.omega[(i, j)].clone());
            }
        }
        out
    }

    /// `♭`: `∂_i ↦ Σ_j ω_ij dy^j`, extended multiplicatively.
    pub fn flat(&self, p: &PolyvectorField) -> PolyForm {
        let n = self.dim();
        let images: Vec<PolyForm> = (0..n)
            .map(|i| {
                let mut f = PolyForm::zero(n);
                for j in 0..n {
                    f.add_term(vec![0; n], 1 << j, self.omega[(i, j)].clone());
                }
                f
            })
            .collect();
        transport(p, n, &images)
    }

    /// `♯`: `dy^j ↦ Σ_i (ω⁻¹)_ji ∂_i`, the inverse of `♭`.
    pub fn sharp(&self, phi: &PolyForm) -> PolyvectorField {
        let n = self.dim();
        let images: Vec<PolyvectorField> = (0..n)
            .map(|j| {
                let mut f = PolyvectorField::zero(n);
                for i in 0..n {
                    f.add_term(vec![0; n], 1 << i, self.inverse[(j, i)].clone());
                }
                f
            })
            .collect();
        transport(phi, n, &images)
    }
}

fn transport<A: OddKind, B: OddKind>(x: &Multi<A>, n: usize, images: &[Multi<B>]) -> Multi<B> {
    let mut out = Multi::<B>::zero(n);
    for ((e, m), c) in &x.terms {
        let mut t = Multi::<B>::term(n, e.clone(), 0, c.clone());
        for k in (0..n).filter(|k| m & (1 << k) != 0) {
            t = t.wedge(&images[k]);
        }
        out.add_scaled(&t, &Scalar::one());
    }
    out
}

/// Builds `♯/♭` and `w` from a constant 2-form, checking that `w` is Poisson.
pub fn sharp_flat(omega: &PolyForm) -> Result<Symplectic> {
    let n = omega.n;
    if omega.odd_degree() != Some(2) || omega.coefficient_degree() != 0 {
        return Err(Error::Grading("expected a constant-coefficient 2-form".into()));
    }
    let mut m = Matrix::zeros(n, n);
    for (_, mask, c) in omega.terms() {
        let idx: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        let (i, j) = (idx[0], idx[1]);
        m[(i, j)] = c.clone();
        m[(j, i)] = -c.clone();
    }
    let inverse = m.inverse().ok_or(Error::Degenerate)?;
    let mut w = PolyvectorField::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            w.add_term(vec![0; n], (1 << i) | (1 << j), inverse[(i, j)].clone());
        }
    }
    if !is_poisson(&w)? {
        return Err(Error::NotPoisson);
    }
    Ok(Symplectic { omega: m, inverse, w })
}

/// Nonzero `d φ − [ω • φ]_Δ` over the given forms.
pub fn d_versus_omega_bracket(s: &Symplectic, forms: &[PolyForm]) -> Result<Vec<(PolyForm, PolyForm)>> {
    let omega = s.form();
    let mut bad = Vec::new();
    for phi in forms {
        let r = exterior_d(phi).difference(&koszul_bracket(&s.w, &omega, phi)?);
        if !r.is_zero() {
            bad.push((phi.clone(), r));
        }
    }
    Ok(bad)
}

/// All `y^e ξ_mask` with coefficient degree at most `max_degree`.
pub fn generators<K: OddKind>(n: usize, max_degree: u32) -> Vec<Multi<K>> {
    let mut exps = vec![vec![0u32; n]];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for e in &exps {
            let last = e.iter().rposition(|&x| x > 0).unwrap_or(0);
            for k in last..n {
                let mut e2 = e.clone();
                e2[k] += 1;
                next.push(e2);
            }
        }
        exps.extend(next.iter().cloned());
        exps.sort();
        exps.dedup();
    }
    let mut out = Vec::new();
    for e in &exps {
        for mask in 0..(1u32 << n) {
            out.push(Multi::term(n, e.clone(), mask, Scalar::one()));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// Constant coefficients only: finite-dimensional, with the top integral.
    TorusConstant,
    /// Polynomial coefficients on affine space: operator testing only.
    AffinePolynomial,
}

#[derive(Clone, Debug)]
pub struct GeometryModel {
    pub flavor: Flavor,
    pub n: usize,
    pub w: Option<PolyvectorField>,
    pub symplectic: Option<Symplectic>,
}

impl GeometryModel {
    pub fn affine(n: usize, w: Option<PolyvectorField>) -> Self {
        GeometryModel { flavor: Flavor::AffinePolynomial, n, w, symplectic: None }
    }

    pub fn symplectic(omega: &PolyForm) -> Result<Self> {
        let s = sharp_flat(omega)?;
        Ok(GeometryModel {
            flavor: Flavor::AffinePolynomial,
            n: omega.n,
            w: Some(s.w.clone()),
            symplectic: Some(s),
        })
    }

    pub fn delta(&self, phi: &PolyForm) -> Result<PolyForm> {
        match &self.w {
            Some(w) => koszul_delta(w, phi),
            None => Ok(PolyForm::zero(self.n)),
        }
    }

    pub fn instance(&self) -> Result<DgbvInstance> {
        match self.flavor {
            Flavor::TorusConstant => build_torus_model(self.n, self.w.as_ref()),
            Flavor::AffinePolynomial => {
                Err(Error::Invalid("affine polynomial models are infinite-dimensional".into()))
            }
        }
    }
}

/// `Λ(θ¹..θⁿ)` as constant forms on `Tⁿ`, with Koszul's operator for a
/// constant bivector (checked to vanish) and the top-coefficient integral.
pub fn build_torus_model(n: usize, w: Option<&PolyvectorField>) -> Result<DgbvInstance> {
    if !(1..=8).contains(&n) {
        return Err(Error::OutOfRange(format!("torus dimension {n} not in 1..=8")));
    }
    if let Some(w) = w {
        check_dims(w.n, n)?;
        check_bivector(w)?;
        if w.coefficient_degree() != 0 {
            return Err(Error::Invalid("torus bivector must have constant coefficients".into()));
        }
        for mask in 0..(1u32 << n) {
            let phi = PolyForm::term(n, vec![0; n], mask, Scalar::one());
            if !koszul_delta(w, &phi)?.is_zero() {
                return Err(Error::Pipeline("Koszul operator nonzero on constant forms".into()));
            }
        }
    }
    exterior_model(n as u32)
}

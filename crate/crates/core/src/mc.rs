//! Normalized Maurer-Cartan solutions `Γ = Γ₁ + ΔB`, obstruction detection,
//! and the gauge action.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;

use crate::dgbv::DgbvInstance;
use crate::error::{Error, Result};
use crate::formal::{FormalAlgebra, FormalElement};
use crate::graded::{q, Element, Scalar};
use crate::homology::Decomposition;
use crate::poly::{CoordinateRing, Monomial};

/// Coordinates dual to the classes of a decomposition.
pub fn coordinate_ring(d: &Decomposition) -> Arc<CoordinateRing> {
    Arc::new(CoordinateRing::for_classes(&d.cohomology.labels, &d.cohomology.degrees))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedSolution {
    pub gamma: FormalElement,
    pub b: FormalElement,
    pub order: u32,
    /// Orders at which the harmonic part was checked (and found zero).
    pub checked_orders: Vec<u32>,
}

impl NormalizedSolution {
    pub fn gamma1(&self) -> FormalElement {
        self.gamma.part(1)
    }
}

/// The first nonvanishing harmonic part `π_H(c_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub order: u32,
    /// Per monomial, the class in the cohomology basis (all nonzero).
    pub class: Vec<(Monomial, Vec<Scalar>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum McOutcome {
    Solved(NormalizedSolution),
    Obstructed(Obstruction),
}

impl McOutcome {
    pub fn solution(self) -> Option<NormalizedSolution> {
        match self {
            McOutcome::Solved(s) => Some(s),
            McOutcome::Obstructed(_) => None,
        }
    }
}

/// Solves `ΔX = v`; `None` when `v ∉ Img Δ`.
pub fn solve_bv(a: &DgbvInstance, v: &Element) -> Option<Element> {
    if v.is_zero() {
        return Some(Element::zero());
    }
    a.bv().matrix().solve(&v.to_dense(a.dim())).map(|x| Element::from_dense(&x))
}

/// Coefficientwise `ΔB = F`.
pub fn solve_bv_formal(a: &DgbvInstance, f: &FormalElement, order: u32) -> Result<FormalElement> {
    let mut b = FormalElement::zero(f.ring().clone(), f.order());
    for (m, c) in f.terms() {
        let x = solve_bv(a, c).ok_or(Error::NotInImageDelta { order: order as usize })?;
        b.add_term(m.clone(), &x, &Scalar::one());
    }
    Ok(b)
}

/// `c_n = -½ Σ_{p+q=n} [Γ_p • Γ_q]` from the parts of orders `1..n`.
fn convolution(fa: &FormalAlgebra<'_>, parts: &[FormalElement], n: u32, order: u32) -> FormalElement {
    let mut c = fa.zero(order);
    for p in 1..n {
        let qd = n - p;
        let br = fa.bracket(&parts[p as usize], &parts[qd as usize]);
        c.add_scaled(&br.part(n), &q(-1, 2));
    }
    c
}

/// Order-by-order construction of the normalized solution.
///
/// Conditions (i)-(iii) are not checked here; an instance violating them may
/// produce an [`Obstruction`] or a normalization error.
pub fn solve_mc(a: &DgbvInstance, d: &Decomposition, order: u32) -> Result<McOutcome> {
    let ring = coordinate_ring(d);
    let fa = FormalAlgebra::new(a, ring);
    solve_mc_in(&fa, d, order)
}

pub fn solve_mc_in(fa: &FormalAlgebra<'_>, d: &Decomposition, order: u32) -> Result<McOutcome> {
    let a = fa.algebra();
    let mut parts = vec![fa.zero(order), fa.linear(d.harmonic(), order)];
    let mut b = fa.zero(order);
    let mut checked = Vec::new();
    for n in 2..=order {
        let c = convolution(fa, &parts, n, order);
        if !fa.delta(&c).is_zero() {
            return Err(Error::NotClosed { order: n as usize });
        }
        let class: Vec<(Monomial, Vec<Scalar>)> = c
            .terms()
            .map(|(m, e)| (m.clone(), d.harmonic_coords(e)))
            .filter(|(_, v)| v.iter().any(|x| !x.is_zero()))
            .collect();
        if !class.is_empty() {
            return Ok(McOutcome::Obstructed(Obstruction { order: n, class }));
        }
        checked.push(n);
        let gn = c.apply(&d.q);
        b.add_scaled(&solve_bv_formal(a, &gn, n)?, &Scalar::one());
        parts.push(gn);
    }
    let mut gamma = fa.zero(order);
    for p in &parts {
        gamma.add_scaled(p, &Scalar::one());
    }
    Ok(McOutcome::Solved(NormalizedSolution { gamma, b, order, checked_orders: checked }))
}

/// Nonzero values of `δ_Γ(δ_Γ(e_i ⊗ 1))` over the basis.
pub fn deformed_squared_check(
    fa: &FormalAlgebra<'_>,
    gamma: &FormalElement,
) -> Vec<(usize, FormalElement)> {
    (0..fa.algebra().dim())
        .map(|i| {
            let e = fa.constant(&Element::basis(i), gamma.order());
            (i, fa.deformed_differential(gamma, &fa.deformed_differential(gamma, &e)))
        })
        .filter(|(_, r)| !r.is_zero())
        .collect()
}

/// Machine check of the solution invariants.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SolutionCheck {
    pub mc_residual_zero: bool,
    pub higher_in_image_bv: bool,
    pub b_consistent: bool,
    pub total_degree_two: bool,
    pub deformed_square_zero: bool,
}

impl SolutionCheck {
    pub fn passes(&self) -> bool {
        self.mc_residual_zero
            && self.higher_in_image_bv
            && self.b_consistent
            && self.total_degree_two
            && self.deformed_square_zero
    }
}

pub fn verify_solution(fa: &FormalAlgebra<'_>, s: &NormalizedSolution) -> SolutionCheck {
    let a = fa.algebra();
    let higher = s.gamma.difference(&s.gamma.part(1)).difference(&s.gamma.part(0));
    let in_image = higher.terms().all(|(_, c)| solve_bv(a, c).is_some());
    SolutionCheck {
        mc_residual_zero: fa.mc_residual(&s.gamma).is_zero(),
        higher_in_image_bv: in_image,
        b_consistent: fa.bv(&s.b) == higher,
        total_degree_two: s.gamma.is_homogeneous(a, 2),
        deformed_square_zero: deformed_squared_check(fa, &s.gamma).is_empty(),
    }
}

/// `e^g · Γ = Γ + Σ_k (ad_g)^k / (k+1)! ([g • Γ] − δg)`.
pub fn gauge_act(
    fa: &FormalAlgebra<'_>,
    g: &FormalElement,
    gamma: &FormalElement,
    order: u32,
) -> Result<FormalElement> {
    if g.min_order() == Some(0) {
        return Err(Error::Grading("gauge parameter has a constant term".into()));
    }
    if !g.is_homogeneous(fa.algebra(), 1) {
        return Err(Error::Grading("gauge parameter must have total degree 1".into()));
    }
    let g = g.with_order(order);
    let gamma = gamma.with_order(order);
    let mut term = fa.bracket(&g, &gamma).difference(&fa.delta(&g));
    let mut out = gamma.clone();
    let mut k = 1i64;
    while !term.is_zero() {
        out.add_scaled(&term, &Scalar::one());
        k += 1;
        term = fa.bracket(&g, &term).scaled(&q(1, k));
    }
    Ok(out)
}

/// Random `g = Δh` with `h` of total degree 2 and polynomial order in `1..order`.
pub fn random_gauge_parameter<R: Rng>(
    fa: &FormalAlgebra<'_>,
    rng: &mut R,
    order: u32,
    terms: usize,
) -> FormalElement {
    let a = fa.algebra();
    let ring = fa.ring();
    let candidates: Vec<(Monomial, usize)> = ring
        .monomials_up_to(order.saturating_sub(1))
        .into_iter()
        .filter(|m| m.order() >= 1)
        .flat_map(|m| {
            let md = ring.mono_degree(&m);
            (0..a.dim())
                .filter(move |&i| a.degree(i) + md == 2)
                .filter(|&i| !a.bv().image_of_basis(i).is_zero())
                .map(move |i| (m.clone(), i))
        })
        .collect();
    let mut h = fa.zero(order);
    if candidates.is_empty() {
        return h;
    }
    for _ in 0..terms {
        let (m, i) = &candidates[rng.gen_range(0..candidates.len())];
        let c = q(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        h.add_term(m.clone(), &Element::basis(*i), &c);
    }
    fa.bv(&h)
}

/// Re-normalizes a gauge-transformed solution: `ΔB̄ = Γ̄ − Γ₁`.
pub fn renormalize(
    fa: &FormalAlgebra<'_>,
    gamma_bar: &FormalElement,
    gamma1: &FormalElement,
) -> Result<FormalElement> {
    let diff = gamma_bar.difference(gamma1);
    solve_bv_formal(fa.algebra(), &diff, gamma_bar.order())
}

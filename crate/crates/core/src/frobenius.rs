//! Frobenius algebra checks, the potential `Φ`, and the WDVV, identity and
//! cubic-contraction checks on it.
//!
//! Partial derivatives are left derivatives; `∂_a∂_b∂_c Φ` applies `∂_c`
//! first. WDVV is checked in the graded form
//! `Φ_abe η^{ef} Φ_fcd = (-1)^{p_a(p_b+p_c)} Φ_bce η^{ef} Φ_fad`
//! with `η^{ef}` the entries of the inverse matrix.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::dgbv::{exhaustive_check, AxiomCheck, AxiomReport, CheckStatus, DgbvInstance};
use crate::error::{Error, Result};
use crate::formal::{FormalAlgebra, FormalElement};
use crate::graded::{format_scalar, q, sign, Element, Scalar};
use crate::homology::CohomologyData;
use crate::linalg::Matrix;
use crate::mc::NormalizedSolution;
use crate::par;
use crate::poly::Poly;

/// Cup product structure constants on cohomology together with the pairing.
#[derive(Clone, Debug)]
pub struct FrobeniusData {
    pub degrees: Vec<i32>,
    pub eta: Matrix,
    /// `product[a][b][c] = φ_ab^c`
    pub product: Vec<Vec<Vec<Scalar>>>,
    /// `tensor[a][b][c] = φ_abc = φ_ab^p η_pc`
    pub tensor: Vec<Vec<Vec<Scalar>>>,
}

impl FrobeniusData {
    pub fn new(a: &DgbvInstance, h: &CohomologyData, eta: Matrix) -> Result<Self> {
        let r = h.dim();
        let reps = &h.representatives;
        let mut product = vec![vec![vec![Scalar::zero(); r]; r]; r];
        for i in 0..r {
            for j in 0..r {
                let p = a.mul(&reps[i], &reps[j]);
                product[i][j] = h.class_of(a, &p).ok_or_else(|| {
                    Error::Invalid("product of closed representatives is not closed".into())
                })?;
            }
        }
        let tensor = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        (0..r)
                            .map(|c| {
                                (0..r).fold(Scalar::zero(), |acc, p| {
                                    acc + &product[i][j][p] * &eta[(p, c)]
                                })
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(FrobeniusData { degrees: h.degrees.clone(), eta, product, tensor })
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }
}

/// Graded symmetry and invariance of η, graded symmetry of `φ_abc`, and the
/// associativity equations.
pub fn check_frobenius(f: &FrobeniusData, labels: &[String]) -> AxiomReport {
    let r = f.dim();
    let d = |i: usize| i64::from(f.degrees[i]);
    let lab = |t: &[usize]| t.iter().map(|&i| labels[i].clone()).collect();
    let nz = |x: Scalar| (!x.is_zero()).then(|| format_scalar(&x));
    let nz = &nz;
    let mut report = AxiomReport::default();
    report.push(exhaustive_check("eta_graded_symmetric", r, 2, lab, |t| {
        nz(&f.eta[(t[0], t[1])] - sign(d(t[0]) * d(t[1])) * &f.eta[(t[1], t[0])])
    }));
    let eta_mul = |x: &[Scalar], y: &[Scalar]| -> Scalar {
        let mut s = Scalar::zero();
        for (p, xp) in x.iter().enumerate().filter(|v| !v.1.is_zero()) {
            for (q, yq) in y.iter().enumerate().filter(|v| !v.1.is_zero()) {
                s += xp * yq * &f.eta[(p, q)];
            }
        }
        s
    };
    let unit_vec = |i: usize| {
        let mut v = vec![Scalar::zero(); r];
        v[i] = Scalar::one();
        v
    };
    report.push(exhaustive_check("eta_invariant", r, 3, lab, |t| {
        let lhs = eta_mul(&f.product[t[0]][t[1]], &unit_vec(t[2]));
        let rhs = eta_mul(&unit_vec(t[0]), &f.product[t[1]][t[2]]);
        nz(lhs - rhs)
    }));
    report.push(exhaustive_check("phi_graded_symmetric", r, 3, lab, |t| {
        let (a, b, c) = (t[0], t[1], t[2]);
        let x = &f.tensor[a][b][c];
        let s1 = x - sign(d(a) * d(b)) * &f.tensor[b][a][c];
        let s2 = x - sign(d(b) * d(c)) * &f.tensor[a][c][b];
        (!s1.is_zero() || !s2.is_zero()).then(|| format!("{}, {}", format_scalar(&s1), format_scalar(&s2)))
    }));
    match f.eta.inverse() {
        Some(inv) => {
            report.push(nondegenerate(true));
            report.push(exhaustive_check("associativity_equations", r, 4, lab, |t| {
                let (a, b, c, dd) = (t[0], t[1], t[2], t[3]);
                let mut s = Scalar::zero();
                for p in 0..r {
                    for qq in 0..r {
                        if inv[(p, qq)].is_zero() {
                            continue;
                        }
                        s += &f.tensor[a][b][p] * &inv[(p, qq)] * &f.tensor[qq][c][dd];
                        s -= &f.tensor[b][c][p] * &inv[(p, qq)] * &f.tensor[a][qq][dd];
                    }
                }
                nz(s)
            }));
        }
        None => {
            report.push(nondegenerate(false));
            report.not_applicable("associativity_equations");
        }
    }
    report
}

fn nondegenerate(ok: bool) -> AxiomCheck {
    AxiomCheck {
        name: "eta_nondegenerate".into(),
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        violations: usize::from(!ok),
        witness: None,
    }
}

/// `Φ` as a truncated polynomial in the cohomology coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Potential {
    pub poly: Poly,
    pub order: u32,
}

impl Potential {
    pub fn third_derivative(&self, a: usize, b: usize, c: usize) -> Poly {
        self.poly.third_derivative(a, b, c)
    }

    /// All `∂_a∂_b∂_c Φ` indexed by `(a * r + b) * r + c`.
    pub fn third_derivatives(&self) -> Vec<Poly> {
        let r = self.poly.ring().len();
        par::map_range(r * r * r, |abc| {
            let (a, b, c) = (abc / (r * r), (abc / r) % r, abc % r);
            self.third_derivative(a, b, c)
        })
    }
}

/// `∫ (Γ³/6 − ½ δB ΔB)` from a given `Γ` and `B`.
pub fn potential_of(
    fa: &FormalAlgebra<'_>,
    gamma: &FormalElement,
    b: &FormalElement,
    order: u32,
) -> Result<Potential> {
    let a = fa.algebra();
    a.integral().ok_or(Error::IntegralAbsent)?;
    let g = gamma.with_order(order);
    let cube = fa.mul(&fa.mul(&g, &g), &g);
    let b = b.with_order(order);
    let db_dbv = fa.mul(&fa.delta(&b), &fa.bv(&b));
    let mut poly = fa.integrate(&cube).scaled(&q(1, 6));
    poly.add_scaled(&fa.integrate(&db_dbv), &q(-1, 2));
    if let Some(top) = a.integral_degree() {
        let want = 6 - top;
        if let Some((m, _)) = poly.terms().find(|(m, _)| fa.ring().mono_degree(m) != want) {
            return Err(Error::Pipeline(format!(
                "potential term {} has degree {} instead of {want}",
                fa.ring().format_monomial(m),
                fa.ring().mono_degree(m)
            )));
        }
    }
    Ok(Potential { poly, order })
}

pub fn potential(fa: &FormalAlgebra<'_>, s: &NormalizedSolution, order: u32) -> Result<Potential> {
    if s.order + 2 < order {
        return Err(Error::InsufficientOrder { have: s.order as usize, need: order as usize - 2 });
    }
    potential_of(fa, &s.gamma, &s.b, order)
}

/// Residual of a quadruple check.
#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub checked_through_order: u32,
    pub failures: usize,
    pub first_failure: Option<(Vec<usize>, String)>,
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        self.failures == 0
    }
}

pub fn check_wdvv(p: &Potential, eta: &Matrix) -> Result<Residual> {
    let inv = eta.inverse().ok_or(Error::Degenerate)?;
    let ring = p.poly.ring();
    let r = ring.len();
    let through = p.order.saturating_sub(3);
    let phi = p.third_derivatives();
    let at = |a: usize, b: usize, c: usize| &phi[(a * r + b) * r + c];
    let pairs: Vec<(usize, usize, Scalar)> = (0..r)
        .flat_map(|e| (0..r).map(move |f| (e, f)))
        .filter(|&(e, f)| !inv[(e, f)].is_zero())
        .map(|(e, f)| (e, f, inv[(e, f)].clone()))
        .collect();
    let par_bit = |k: usize| i64::from(ring.is_odd(k));
    let results = par::map_range(r * r * r * r, |abcd| {
        let (a, b, c, d) = (abcd / (r * r * r), (abcd / (r * r)) % r, (abcd / r) % r, abcd % r);
        let mut res = Poly::zero(ring.clone(), through);
        let s = sign(par_bit(a) * (par_bit(b) + par_bit(c)));
        for (e, f, w) in &pairs {
            res.add_scaled(&at(a, b, *e).mul(at(*f, c, d)), w);
            res.add_scaled(&at(b, c, *e).mul(at(*f, a, d)), &-(w * &s));
        }
        res.truncate(through)
    });
    let failures = results.iter().filter(|x| !x.is_zero()).count();
    let first_failure = results.iter().enumerate().find(|x| !x.1.is_zero()).map(|(k, res)| {
        (vec![k / (r * r * r), (k / (r * r)) % r, (k / r) % r, k % r], res.to_string())
    });
    Ok(Residual { checked_through_order: through, failures, first_failure })
}

/// `∂_0∂_a∂_b Φ = η_ab` with `x^0` dual to the unit class.
pub fn check_identity_axiom(p: &Potential, eta: &Matrix, unit: Option<usize>) -> Result<Residual> {
    let unit = unit.ok_or(Error::NoUnit)?;
    let ring = p.poly.ring();
    let r = ring.len();
    let results = par::map_range(r * r, |ab| {
        let (a, b) = (ab / r, ab % r);
        let want = Poly::constant(ring.clone(), p.order, eta[(a, b)].clone());
        p.third_derivative(unit, a, b).sub(&want.truncate(p.order.saturating_sub(3)))
    });
    let failures = results.iter().filter(|x| !x.is_zero()).count();
    let first_failure = results
        .iter()
        .enumerate()
        .find(|x| !x.1.is_zero())
        .map(|(k, res)| (vec![k / r, k % r], res.to_string()));
    Ok(Residual { checked_through_order: p.order.saturating_sub(3), failures, first_failure })
}

/// `X³Φ` against `∫ (XΓ)³` for a constant tangent vector over even directions.
pub fn check_cubic_identity(
    fa: &FormalAlgebra<'_>,
    s: &NormalizedSolution,
    p: &Potential,
    x: &[Scalar],
) -> Result<(Poly, Poly)> {
    let ring = fa.ring();
    if x.len() != ring.len() {
        return Err(Error::Shape("tangent vector has wrong length".into()));
    }
    if (0..ring.len()).any(|k| ring.is_odd(k) && !x[k].is_zero()) {
        return Err(Error::Grading("tangent vector has a component along an odd direction".into()));
    }
    if s.order + 2 < p.order {
        return Err(Error::InsufficientOrder { have: s.order as usize, need: p.order as usize - 2 });
    }
    let through = p.order.saturating_sub(3);
    let along = |f: &Poly| {
        let mut out = Poly::zero(ring.clone(), f.order());
        for (k, xk) in x.iter().enumerate().filter(|v| !v.1.is_zero()) {
            out.add_scaled(&f.derivative(k), xk);
        }
        out
    };
    let lhs = along(&along(&along(&p.poly))).truncate(through);
    let xg = s.gamma.contract(x).with_order(through);
    let rhs = fa.integrate(&fa.mul(&fa.mul(&xg, &xg), &xg)).truncate(through);
    Ok((lhs, rhs))
}

/// Structure constants of the deformed product at the origin, `φ_abc(0)`.
pub fn cubic_coefficients(p: &Potential) -> Vec<Scalar> {
    p.third_derivatives().iter().map(Poly::constant_term).collect()
}

/// `φ_abc = ∫ e_a e_b e_c` directly from representatives.
pub fn triple_integrals(a: &DgbvInstance, reps: &[Element]) -> Vec<Scalar> {
    let r = reps.len();
    let mut out = Vec::with_capacity(r * r * r);
    for x in reps {
        for y in reps {
            let xy = a.mul(x, y);
            for z in reps {
                out.push(a.integrate(&a.mul(&xy, z)));
            }
        }
    }
    out
}

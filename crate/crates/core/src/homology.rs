//! Cohomology of `(𝒜, δ)` and `(𝒜, Δ)`, cohomological decompositions with
//! a homotopy operator, the integral pairing, and the finiteness/niceness/
//! Δ-compatibility conditions required by the Maurer-Cartan pipeline.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::dgbv::{exhaustive_check, AxiomCheck, CheckStatus, DgbvInstance};
use crate::error::{Error, Result};
use crate::graded::{format_scalar, sign, Element, GradedSpace, LinearOperator, Scalar};
use crate::linalg::{echelon_basis, independent_subset, span_rank, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Differential {
    Delta,
    Bv,
}

impl Differential {
    pub fn of(self, a: &DgbvInstance) -> &LinearOperator {
        match self {
            Differential::Delta => a.delta(),
            Differential::Bv => a.bv(),
        }
    }
}

fn columns(op: &LinearOperator) -> Vec<Vec<Scalar>> {
    let n = op.source().dim();
    (0..n).map(|j| op.matrix().column(j)).collect()
}

fn to_elements(vs: &[Vec<Scalar>]) -> Vec<Element> {
    vs.iter().map(|v| Element::from_dense(v)).collect()
}

/// Basis of the kernel of `op` as dense vectors.
pub fn kernel_basis(op: &LinearOperator) -> Vec<Vec<Scalar>> {
    op.matrix().kernel()
}

/// Reduced echelon basis of the image of `op`.
pub fn image_basis(op: &LinearOperator) -> Vec<Vec<Scalar>> {
    let n = op.target().dim();
    echelon_basis(n, &columns(op)).0
}

/// Reduces `v` modulo an echelon basis (rows with the given pivots).
fn reduce(v: &[Scalar], rows: &[Vec<Scalar>], pivots: &[usize]) -> Vec<Scalar> {
    let mut v = v.to_vec();
    for (row, &p) in rows.iter().zip(pivots) {
        if !v[p].is_zero() {
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
    }
    v
}

/// Cohomology classes with chosen representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyData {
    pub which: Differential,
    space: Arc<GradedSpace>,
    pub representatives: Vec<Element>,
    pub degrees: Vec<i32>,
    pub labels: Vec<String>,
    pub betti: BTreeMap<i32, usize>,
    pub unit_index: Option<usize>,
    /// Columns: representatives followed by an image basis.
    basis: Matrix,
    image_dim: usize,
}

impl CohomologyData {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of the class of a closed element; `None` if not closed.
    pub fn class_of(&self, a: &DgbvInstance, z: &Element) -> Option<Vec<Scalar>> {
        if !self.which.of(a).apply_unchecked(z).is_zero() {
            return None;
        }
        let x = self.basis.solve(&z.to_dense(self.space.dim()))?;
        Some(x[..self.dim()].to_vec())
    }

    /// Betti numbers as a list over the degree range of the space.
    pub fn betti_list(&self) -> Vec<(i32, usize)> {
        self.space.degree_range().iter().map(|d| (*d, *self.betti.get(d).unwrap_or(&0))).collect()
    }

    pub(crate) fn from_representatives(
        which: Differential,
        a: &DgbvInstance,
        reps: Vec<Element>,
    ) -> Self {
        let space = a.space().clone();
        let n = space.dim();
        let image = image_basis(which.of(a));
        let mut cols: Vec<Vec<Scalar>> = reps.iter().map(|r| r.to_dense(n)).collect();
        cols.extend(image.iter().cloned());
        let basis = Matrix::from_columns(n, &cols);
        let degrees: Vec<i32> = reps.iter().map(|r| r.degree_in(&space).unwrap_or(0)).collect();
        let mut betti = BTreeMap::new();
        for d in &degrees {
            *betti.entry(*d).or_insert(0) += 1;
        }
        let unit_index = a.unit().and_then(|u| reps.iter().position(|r| r == u));
        let labels = reps.iter().map(|r| class_label(a, r)).collect();
        CohomologyData {
            which,
            space,
            representatives: reps,
            degrees,
            labels,
            betti,
            unit_index,
            basis,
            image_dim: image.len(),
        }
    }
}

/// Short label for a representative: the basis label when it is a single
/// basis vector with coefficient one, else the label of its leading term.
fn class_label(a: &DgbvInstance, r: &Element) -> String {
    let mut terms = r.terms();
    match (terms.next(), terms.next()) {
        (Some((i, c)), None) if c.is_one() => a.space().label(i).to_string(),
        (Some((i, _)), _) => format!("[{}]", a.space().label(i)),
        _ => "0".into(),
    }
}

pub fn ensure_square_zero(a: &DgbvInstance, which: Differential) -> Result<()> {
    let op = which.of(a);
    if !op.compose(op)?.is_zero() {
        return Err(Error::NotSquareZero(format!("{which:?}")));
    }
    Ok(())
}

/// Cohomology of `δ` or `Δ` by exact elimination.
///
/// Representatives: the echelon basis of `Ker` reduced modulo the echelon
/// basis of `Img`. A nonzero unit class is represented by the unit itself and
/// placed first; the rest are ordered by degree.
pub fn cohomology(a: &DgbvInstance, which: Differential) -> Result<CohomologyData> {
    ensure_square_zero(a, which)?;
    let op = which.of(a);
    let n = a.dim();
    let (img_rows, img_piv) = echelon_basis(n, &columns(op));
    let ker = kernel_basis(op);
    let residues: Vec<Vec<Scalar>> = ker.iter().map(|z| reduce(z, &img_rows, &img_piv)).collect();
    let (mut reps, _) = echelon_basis(n, &residues);

    let mut unit_first = None;
    if let Some(u) = a.unit() {
        let ud = u.to_dense(n);
        let ur = reduce(&ud, &img_rows, &img_piv);
        if op.apply_unchecked(u).is_zero() && ur.iter().any(|x| !x.is_zero()) {
            // drop the first representative the unit can replace
            let mut cand = vec![ur.clone()];
            cand.extend(reps.iter().cloned());
            let keep = independent_subset(n, &cand);
            let dropped = (1..cand.len())
                .find(|i| !keep.contains(i))
                .expect("unit class lies in the span of the representatives");
            let mut others = reps.clone();
            others.remove(dropped - 1);
            unit_first = Some(ud);
            reps = others;
        }
    }
    let space = a.space();
    let mut elems = to_elements(&reps);
    elems.sort_by_key(|e| e.degree_in(space).unwrap_or(0));
    if let Some(u) = unit_first {
        elems.insert(0, Element::from_dense(&u));
    }
    Ok(CohomologyData::from_representatives(which, a, elems))
}

/// `𝒜 = ℋ ⊕ δM ⊕ M` with homotopy `Q` and projection `π_H`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub cohomology: CohomologyData,
    pub m: Vec<Element>,
    pub dm: Vec<Element>,
    pub q: LinearOperator,
    pub pi_h: LinearOperator,
    /// Row `a` gives the coordinate of `e_a` in the splitting.
    coords: Matrix,
}

impl Decomposition {
    pub fn harmonic(&self) -> &[Element] {
        &self.cohomology.representatives
    }

    /// Coordinates of the `ℋ`-component in the representative basis.
    pub fn harmonic_coords(&self, v: &Element) -> Vec<Scalar> {
        let n = self.q.source().dim();
        let full = self.coords.mul_vec(&v.to_dense(n));
        full[..self.cohomology.dim()].to_vec()
    }
}

/// Builds a cohomological decomposition of `(𝒜, δ)`.
///
/// When condition (iii) holds the representatives are moved into `Ker Δ` and
/// `M` is chosen so that `δM` meets `Img Δ` as far as possible; this makes the
/// normalized Maurer-Cartan solution solvable.
pub fn decomposition(a: &DgbvInstance) -> Result<Decomposition> {
    let iii = check_condition_iii(a)?;
    decomposition_with(a, iii.holds())
}

pub fn decomposition_with(a: &DgbvInstance, delta_compatible: bool) -> Result<Decomposition> {
    let mut h = cohomology(a, Differential::Delta)?;
    let n = a.dim();
    let delta = a.delta();
    if delta_compatible {
        let dd = a.bv().compose(delta)?;
        let mut reps = h.representatives.clone();
        for r in reps.iter_mut() {
            let target: Vec<Scalar> = a.apply_bv(r).to_dense(n).iter().map(|x| -x).collect();
            if target.iter().all(Zero::is_zero) {
                continue;
            }
            let y = dd.matrix().solve(&target).ok_or_else(|| {
                Error::ConditionViolated("representative has no Δ-closed shift".into())
            })?;
            r.add_scaled(&a.apply_delta(&Element::from_dense(&y)), &Scalar::one());
        }
        h = CohomologyData::from_representatives(Differential::Delta, a, reps);
    }

    // M: preimages inside Img Δ first, then coordinate vectors.
    let rank = delta.matrix().rank();
    let mut m: Vec<Vec<Scalar>> = Vec::new();
    if delta_compatible {
        let img = image_basis(a.bv());
        let images: Vec<Vec<Scalar>> =
            img.iter().map(|v| delta.apply_unchecked(&Element::from_dense(v)).to_dense(n)).collect();
        for k in independent_subset(n, &images) {
            if !images[k].iter().all(Zero::is_zero) {
                m.push(img[k].clone());
            }
        }
    }
    let mut dm: Vec<Vec<Scalar>> =
        m.iter().map(|v| delta.apply_unchecked(&Element::from_dense(v)).to_dense(n)).collect();
    for i in 0..n {
        if dm.len() == rank {
            break;
        }
        let img = delta.image_of_basis(i).to_dense(n);
        let mut t = dm.clone();
        t.push(img.clone());
        if span_rank(n, &t) > dm.len() {
            let mut e = vec![Scalar::zero(); n];
            e[i] = Scalar::one();
            m.push(e);
            dm.push(img);
        }
    }

    let r = h.dim();
    let mut cols: Vec<Vec<Scalar>> = h.representatives.iter().map(|e| e.to_dense(n)).collect();
    cols.extend(dm.iter().cloned());
    cols.extend(m.iter().cloned());
    if cols.len() != n {
        return Err(Error::Pipeline(format!(
            "splitting has {} vectors for dimension {n}",
            cols.len()
        )));
    }
    let coords = Matrix::from_columns(n, &cols)
        .inverse()
        .ok_or_else(|| Error::Pipeline("ℋ, δM, M are not complementary".into()))?;
    let k = dm.len();
    let space = a.space().clone();
    let mut q_entries = Vec::new();
    let mut p_entries = Vec::new();
    for j in 0..n {
        for (i, row) in (0..n).map(|i| (i, coords[(i, j)].clone())).filter(|x| !x.1.is_zero()) {
            if i < r {
                for (t, c) in h.representatives[i].terms() {
                    p_entries.push((j, t, &row * c));
                }
            } else if i < r + k {
                for (t, c) in m[i - r].iter().enumerate().filter(|x| !x.1.is_zero()) {
                    q_entries.push((j, t, &row * c));
                }
            }
        }
    }
    let merge = |entries: Vec<(usize, usize, Scalar)>| {
        let mut acc: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for (f, t, c) in entries {
            *acc.entry((f, t)).or_insert_with(Scalar::zero) += c;
        }
        acc.into_iter().map(|((f, t), c)| (f, t, c)).collect::<Vec<_>>()
    };
    let q = LinearOperator::from_entries(space.clone(), space.clone(), -1, merge(q_entries))?;
    let pi_h = LinearOperator::from_entries(space.clone(), space.clone(), 0, merge(p_entries))?;

    // postconditions
    let id = LinearOperator::identity(space.clone());
    let homotopy = q.compose(delta)?.add(&delta.compose(&q)?)?;
    let expected = id.add(&pi_h.scaled(&-Scalar::one()))?;
    if homotopy != expected {
        return Err(Error::Pipeline("Qδ + δQ ≠ id − π_H".into()));
    }
    if !q.compose(&q)?.is_zero() {
        return Err(Error::Pipeline("Q² ≠ 0".into()));
    }
    for v in h.representatives.iter().chain(to_elements(&m).iter()) {
        if !q.apply_unchecked(v).is_zero() {
            return Err(Error::Pipeline("Q does not vanish on ℋ ⊕ M".into()));
        }
    }
    Ok(Decomposition { cohomology: h, m: to_elements(&m), dm: to_elements(&dm), q, pi_h, coords })
}

/// Result of checking the integral identities.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralReport {
    pub checks: Vec<AxiomCheck>,
    /// The functional vanishes identically.
    pub degenerate: bool,
}

impl IntegralReport {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

/// `∫(δa)b = (-1)^{|a|+1} ∫ a δb` and `∫(Δa)b = (-1)^{|a|} ∫ a Δb` on all pairs.
pub fn check_integral(a: &DgbvInstance) -> Result<IntegralReport> {
    let integral = a.integral().ok_or(Error::IntegralAbsent)?;
    let n = a.dim();
    let labels = |idx: &[usize]| idx.iter().map(|&i| a.space().label(i).to_string()).collect();
    let e = Element::basis;
    let check = |name: &str, op: &LinearOperator, shift: i64| {
        exhaustive_check(name, n, 2, labels, |t| {
            let (x, y) = (t[0], t[1]);
            let lhs = a.integrate(&a.mul(&op.image_of_basis(x), &e(y)));
            let rhs = a.integrate(&a.mul(&e(x), &op.image_of_basis(y)))
                * sign(i64::from(a.degree(x)) + shift);
            (lhs != rhs).then(|| format_scalar(&(lhs - rhs)))
        })
    };
    Ok(IntegralReport {
        checks: vec![
            check("integral_delta", a.delta(), 1),
            check("integral_bv", a.bv(), 0),
        ],
        degenerate: integral.iter().all(Zero::is_zero),
    })
}

/// The pairing `η_ab = ∫ e_a e_b` on cohomology representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    pub eta: Matrix,
    pub inverse: Matrix,
    pub degrees: Vec<i32>,
}

impl Metric {
    pub fn dim(&self) -> usize {
        self.eta.rows()
    }

    /// Builds a metric from a matrix, failing when it is singular.
    pub fn from_matrix(eta: Matrix, degrees: Vec<i32>) -> Result<Metric> {
        let inverse = eta.inverse().ok_or(Error::Degenerate)?;
        Ok(Metric { eta, inverse, degrees })
    }
}

pub fn pairing_matrix(a: &DgbvInstance, reps: &[Element]) -> Matrix {
    let r = reps.len();
    let mut eta = Matrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            eta[(i, j)] = a.integrate(&a.mul(&reps[i], &reps[j]));
        }
    }
    eta
}

/// `η` with well-definedness on classes checked by perturbing every
/// representative with every exact element `δe_k`.
pub fn metric_eta(a: &DgbvInstance, h: &CohomologyData) -> Result<Metric> {
    a.integral().ok_or(Error::IntegralAbsent)?;
    let reps = &h.representatives;
    let eta = pairing_matrix(a, reps);
    for (i, ri) in reps.iter().enumerate() {
        for k in 0..a.dim() {
            let exact = a.delta().image_of_basis(k);
            if exact.is_zero() {
                continue;
            }
            let shifted = ri + &exact;
            for (j, rj) in reps.iter().enumerate() {
                if a.integrate(&a.mul(&shifted, rj)) != eta[(i, j)] {
                    return Err(Error::Invalid(format!(
                        "pairing depends on representative of {} (perturbed by δ{})",
                        h.labels[i],
                        a.space().label(k)
                    )));
                }
            }
        }
    }
    match eta.inverse() {
        Some(inverse) => Ok(Metric { eta, inverse, degrees: h.degrees.clone() }),
        None => {
            let radical = eta
                .kernel()
                .iter()
                .map(|v| {
                    v.iter()
                        .enumerate()
                        .filter(|x| !x.1.is_zero())
                        .map(|(i, c)| format!("{}*{}", format_scalar(c), h.labels[i]))
                        .collect()
                })
                .collect();
            Err(Error::NotNice { radical })
        }
    }
}

/// One direction of condition (iii) for a pair of differentials.
#[derive(Clone, Debug, Serialize)]
pub struct InclusionCheck {
    /// `"(Ker Δ, δ) -> (A, δ)"` or `"(Ker δ, Δ) -> (A, Δ)"`.
    pub map: String,
    pub injective: bool,
    pub surjective: bool,
    pub sub_cohomology_dim: usize,
    pub cohomology_dim: usize,
}

impl InclusionCheck {
    pub fn holds(&self) -> bool {
        self.injective && self.surjective
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionIii {
    pub kernel_bv: InclusionCheck,
    pub kernel_delta: InclusionCheck,
}

impl ConditionIii {
    pub fn holds(&self) -> bool {
        self.kernel_bv.holds() && self.kernel_delta.holds()
    }
}

/// `H(Ker g, f) → H(𝒜, f)` is an isomorphism.
fn inclusion(a: &DgbvInstance, f: &LinearOperator, g: &LinearOperator, map: &str) -> InclusionCheck {
    let n = a.dim();
    let ker_g = kernel_basis(g);
    let ker_f = kernel_basis(f);
    let img_f = image_basis(f);
    // closed elements of the subcomplex: Ker g ∩ Ker f
    let z_sub_dim = crate::linalg::intersection_dim(n, &ker_g, &ker_f);
    let z_sub: Vec<Vec<Scalar>> = {
        // explicit basis: kernel of f restricted to Ker g
        let restricted: Vec<Vec<Scalar>> =
            ker_g.iter().map(|v| f.apply_unchecked(&Element::from_dense(v)).to_dense(n)).collect();
        if restricted.is_empty() {
            Vec::new()
        } else {
            let k = Matrix::from_columns(n, &restricted).kernel();
            k.iter()
                .map(|c| {
                    let mut v = vec![Scalar::zero(); n];
                    for (coef, kv) in c.iter().zip(&ker_g) {
                        if !coef.is_zero() {
                            for (x, y) in v.iter_mut().zip(kv) {
                                *x += coef * y;
                            }
                        }
                    }
                    v
                })
                .collect()
        }
    };
    debug_assert_eq!(z_sub.len(), z_sub_dim);
    let b_sub: Vec<Vec<Scalar>> =
        ker_g.iter().map(|v| f.apply_unchecked(&Element::from_dense(v)).to_dense(n)).collect();
    let b_sub_dim = span_rank(n, &b_sub);
    let meet = crate::linalg::intersection_dim(n, &z_sub, &img_f);
    let mut sum = z_sub.clone();
    sum.extend(img_f.iter().cloned());
    InclusionCheck {
        map: map.into(),
        injective: meet == b_sub_dim,
        surjective: span_rank(n, &sum) == ker_f.len(),
        sub_cohomology_dim: z_sub_dim - b_sub_dim,
        cohomology_dim: ker_f.len() - img_f.len(),
    }
}

pub fn check_condition_iii(a: &DgbvInstance) -> Result<ConditionIii> {
    ensure_square_zero(a, Differential::Delta)?;
    ensure_square_zero(a, Differential::Bv)?;
    Ok(ConditionIii {
        kernel_bv: inclusion(a, a.delta(), a.bv(), "(Ker Δ, δ) -> (A, δ)"),
        kernel_delta: inclusion(a, a.bv(), a.delta(), "(Ker δ, Δ) -> (A, Δ)"),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionsReport {
    /// `(degree, dim 𝒜^d, b_d)`; always finite here.
    pub ranks: Vec<(i32, usize, usize)>,
    pub nice: bool,
    pub nice_detail: String,
    pub condition_iii: ConditionIii,
}

impl ConditionsReport {
    pub fn all_hold(&self) -> bool {
        self.nice && self.condition_iii.holds()
    }
}

pub fn check_conditions(a: &DgbvInstance) -> Result<ConditionsReport> {
    let h = cohomology(a, Differential::Delta)?;
    let space = a.space();
    let ranks = space
        .degree_range()
        .into_iter()
        .map(|d| (d, space.indices_of_degree(d).len(), *h.betti.get(&d).unwrap_or(&0)))
        .collect();
    let (nice, nice_detail) = match metric_eta(a, &h) {
        Ok(_) => (true, "nondegenerate".to_string()),
        Err(e) => (false, e.to_string()),
    };
    Ok(ConditionsReport { ranks, nice, nice_detail, condition_iii: check_condition_iii(a)? })
}

impl CohomologyData {
    /// Number of classes.
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn image_dim(&self) -> usize {
        self.image_dim
    }
}

//! Morphisms of DGBV algebras with integrals, quasi-isomorphism checks, and
//! comparison of potentials along induced maps on cohomology.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::dgbv::{exhaustive_check, AxiomCheck, AxiomReport, CheckStatus, DgbvInstance, Witness};
use crate::error::{Error, Result};
use crate::graded::{Element, GradedSpace, LinearOperator, Scalar};
use crate::homology::{cohomology, CohomologyData, Differential};
use crate::linalg::Matrix;
use crate::pipeline::{run_pipeline, PipelineOptions, PipelineRun};
use crate::poly::Poly;

/// A degree-zero linear map between instances.
#[derive(Clone, Debug)]
pub struct DgbvMorphism {
    pub source: Arc<DgbvInstance>,
    pub target: Arc<DgbvInstance>,
    pub map: LinearOperator,
}

impl DgbvMorphism {
    pub fn new(source: Arc<DgbvInstance>, target: Arc<DgbvInstance>, map: LinearOperator) -> Result<Self> {
        if map.degree() != 0 {
            return Err(Error::Grading("morphism must have degree 0".into()));
        }
        if **map.source() != **source.space() || **map.target() != **target.space() {
            return Err(Error::SpaceMismatch("map spaces differ from the instances".into()));
        }
        Ok(DgbvMorphism { source, target, map })
    }

    /// From `(source label, target label, coefficient)` entries.
    pub fn from_labels(
        source: Arc<DgbvInstance>,
        target: Arc<DgbvInstance>,
        entries: &[(String, String, Scalar)],
    ) -> Result<Self> {
        let find = |s: &GradedSpace, l: &str| {
            s.index_of(l).ok_or_else(|| Error::Parse(format!("unknown basis label {l:?}")))
        };
        let mut triples = Vec::with_capacity(entries.len());
        for (a, b, c) in entries {
            triples.push((find(source.space(), a)?, find(target.space(), b)?, c.clone()));
        }
        let map = LinearOperator::from_entries(source.space().clone(), target.space().clone(), 0, triples)?;
        Self::new(source, target, map)
    }

    pub fn identity(a: Arc<DgbvInstance>) -> Self {
        let map = LinearOperator::identity(a.space().clone());
        DgbvMorphism { source: a.clone(), target: a, map }
    }

    pub fn apply(&self, x: &Element) -> Element {
        self.map.apply_unchecked(x)
    }

    pub fn compose(&self, next: &DgbvMorphism) -> Result<DgbvMorphism> {
        if *self.target != *next.source {
            return Err(Error::SpaceMismatch("morphisms are not composable".into()));
        }
        Ok(DgbvMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            map: next.map.compose(&self.map)?,
        })
    }
}

/// Exhaustive check of multiplicativity, unit, both differentials and the integral.
pub fn check_morphism(m: &DgbvMorphism) -> AxiomReport {
    let (a, b) = (&*m.source, &*m.target);
    let n = a.dim();
    let labels = |idx: &[usize]| idx.iter().map(|&i| a.space().label(i).to_string()).collect();
    let show = |e: &Element| b.label_of(e);
    let mut report = AxiomReport::default();
    report.push(exhaustive_check("multiplicative", n, 2, labels, |t| {
        let lhs = m.apply(&a.product_basis(t[0], t[1]).clone());
        let rhs = b.mul(&m.apply(&Element::basis(t[0])), &m.apply(&Element::basis(t[1])));
        let r = &lhs - &rhs;
        (!r.is_zero()).then(|| show(&r))
    }));
    match (a.unit(), b.unit()) {
        (Some(u), Some(v)) => {
            let r = &m.apply(u) - v;
            report.push(AxiomCheck {
                name: "unit".into(),
                status: if r.is_zero() { CheckStatus::Pass } else { CheckStatus::Fail },
                violations: usize::from(!r.is_zero()),
                witness: (!r.is_zero()).then(|| Witness { basis: vec!["1".into()], residual: show(&r) }),
            });
        }
        _ => report.not_applicable("unit"),
    }
    report.push(exhaustive_check("commutes_delta", n, 1, labels, |t| {
        let x = Element::basis(t[0]);
        let r = &m.apply(&a.apply_delta(&x)) - &b.apply_delta(&m.apply(&x));
        (!r.is_zero()).then(|| show(&r))
    }));
    report.push(exhaustive_check("commutes_bv", n, 1, labels, |t| {
        let x = Element::basis(t[0]);
        let r = &m.apply(&a.apply_bv(&x)) - &b.apply_bv(&m.apply(&x));
        (!r.is_zero()).then(|| show(&r))
    }));
    if a.integral().is_some() && b.integral().is_some() {
        report.push(exhaustive_check("integral_compatible", n, 1, labels, |t| {
            let x = Element::basis(t[0]);
            let r = b.integrate(&m.apply(&x)) - a.integrate(&x);
            (!r.is_zero()).then(|| crate::graded::format_scalar(&r))
        }));
    } else {
        report.not_applicable("integral_compatible");
    }
    report
}

/// Matrix of the induced map on cohomology in the given class bases.
pub fn induced_map(m: &DgbvMorphism, hs: &CohomologyData, ht: &CohomologyData) -> Result<Matrix> {
    let mut f = Matrix::zeros(ht.dim(), hs.dim());
    for (a, rep) in hs.representatives.iter().enumerate() {
        let image = m.apply(rep);
        let class = ht
            .class_of(&m.target, &image)
            .ok_or_else(|| Error::Invalid("image of a cocycle is not closed".into()))?;
        for (b, c) in class.into_iter().enumerate() {
            f[(b, a)] = c;
        }
    }
    Ok(f)
}

#[derive(Clone, Debug, Serialize)]
pub struct InducedIso {
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
}

impl InducedIso {
    pub fn is_iso(&self) -> bool {
        self.source_dim == self.target_dim && self.rank == self.source_dim
    }
}

#[derive(Clone, Debug)]
pub struct QuasiIsoReport {
    pub delta: InducedIso,
    pub bv: InducedIso,
    /// `H(f)` on `δ`-cohomology.
    pub h_delta: Matrix,
}

impl QuasiIsoReport {
    pub fn is_quasi_iso(&self) -> bool {
        self.delta.is_iso() && self.bv.is_iso()
    }
}

fn induced_iso(m: &DgbvMorphism, which: Differential) -> Result<(InducedIso, Matrix)> {
    let hs = cohomology(&m.source, which)?;
    let ht = cohomology(&m.target, which)?;
    let f = induced_map(m, &hs, &ht)?;
    Ok((InducedIso { source_dim: hs.dim(), target_dim: ht.dim(), rank: f.rank() }, f))
}

/// Induced maps on `δ`- and `Δ`-cohomology, both required to be isomorphisms.
pub fn check_quasi_iso(m: &DgbvMorphism) -> Result<QuasiIsoReport> {
    let (delta, h_delta) = induced_iso(m, Differential::Delta)?;
    let (bv, _) = induced_iso(m, Differential::Bv)?;
    Ok(QuasiIsoReport { delta, bv, h_delta })
}

/// `Φ₁ − Φ₂∘H(f)` and the pairing discrepancy `H(f)ᵀ η₂ H(f) − η₁`.
#[derive(Clone, Debug)]
pub struct PotentialComparison {
    pub transport: Matrix,
    pub residual: Poly,
    pub eta_residual: Matrix,
    pub source: PipelineRun,
    pub target: PipelineRun,
}

impl PotentialComparison {
    pub fn identified(&self) -> bool {
        self.residual.is_zero() && self.eta_residual.is_zero()
    }
}

/// Runs the pipeline on both sides and compares potentials by the linear
/// substitution `y^b = Σ_a H(f)_{ba} x^a`.
pub fn compare_potentials(m: &DgbvMorphism, order: u32) -> Result<PotentialComparison> {
    let opts = PipelineOptions { order, potential_order: order, force: false };
    let (source, target) = crate::par::join(
        || run_pipeline(&m.source, opts),
        || run_pipeline(&m.target, opts),
    );
    let (source, target) = (source?, target?);
    let f = induced_map(m, &source.decomposition.cohomology, &target.decomposition.cohomology)?;
    compare_runs(source, target, f)
}

fn compare_runs(source: PipelineRun, target: PipelineRun, f: Matrix) -> Result<PotentialComparison> {
    if f.rows() != f.cols() || f.rank() != f.rows() {
        return Err(Error::Pipeline("induced map on cohomology is not an isomorphism".into()));
    }
    let pulled = target.potential.poly.substitute(source.ring.clone(), &f)?;
    let residual = source.potential.poly.sub(&pulled);
    let eta_residual = {
        let back = f.transpose().mul(&target.metric.eta).mul(&f);
        let mut r = Matrix::zeros(back.rows(), back.cols());
        for i in 0..back.rows() {
            for j in 0..back.cols() {
                r[(i, j)] = &back[(i, j)] - &source.metric.eta[(i, j)];
            }
        }
        r
    };
    Ok(PotentialComparison { transport: f, residual, eta_residual, source, target })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `𝒜_i → 𝒜_{i+1}`
    Forward,
    /// `𝒜_{i+1} → 𝒜_i`
    Backward,
}

/// A chain `𝒜₀ ~ 𝒜₁ ~ … ~ 𝒜ₙ` of quasi-isomorphisms, each pointing either way.
#[derive(Clone, Debug)]
pub struct ZigZag {
    pub links: Vec<(DgbvMorphism, Direction)>,
}

impl ZigZag {
    pub fn new(links: Vec<(DgbvMorphism, Direction)>) -> Result<Self> {
        let z = ZigZag { links };
        z.algebras()?;
        Ok(z)
    }

    /// The algebras `𝒜₀, …, 𝒜ₙ`, checking that adjacent links share them.
    pub fn algebras(&self) -> Result<Vec<Arc<DgbvInstance>>> {
        let mut out: Vec<Arc<DgbvInstance>> = Vec::new();
        for (i, (m, dir)) in self.links.iter().enumerate() {
            let (from, to) = match dir {
                Direction::Forward => (&m.source, &m.target),
                Direction::Backward => (&m.target, &m.source),
            };
            if let Some(last) = out.last() {
                if **last != **from {
                    return Err(Error::SpaceMismatch(format!("link {i} does not continue the chain")));
                }
            } else {
                out.push(from.clone());
            }
            out.push(to.clone());
        }
        Ok(out)
    }

    /// Per-link quasi-isomorphism reports, in chain order.
    pub fn verify(&self) -> Result<Vec<(AxiomReport, QuasiIsoReport)>> {
        self.links.iter().map(|(m, _)| Ok((check_morphism(m), check_quasi_iso(m)?))).collect()
    }

    /// Compares `Φ` at both ends, composing the per-link identifications.
    pub fn compare_potentials(&self, order: u32) -> Result<PotentialComparison> {
        let algebras = self.algebras()?;
        let opts = PipelineOptions { order, potential_order: order, force: false };
        let runs: Vec<Result<PipelineRun>> = crate::par::map(&algebras, |a| run_pipeline(a, opts));
        let runs: Vec<PipelineRun> = runs.into_iter().collect::<Result<_>>()?;
        let mut total = Matrix::identity(runs[0].decomposition.cohomology.dim());
        for (i, (m, dir)) in self.links.iter().enumerate() {
            let (hs, ht) = (&runs[i].decomposition.cohomology, &runs[i + 1].decomposition.cohomology);
            let step = match dir {
                Direction::Forward => induced_map(m, hs, ht)?,
                Direction::Backward => induced_map(m, ht, hs)?
                    .inverse()
                    .ok_or_else(|| Error::Pipeline(format!("link {i} is not a quasi-isomorphism")))?,
            };
            total = step.mul(&total);
        }
        let mut runs = runs;
        let target = runs.pop().unwrap();
        let source = runs.swap_remove(0);
        compare_runs(source, target, total)
    }
}

/// A copy of `a` with basis labels renamed, and the isomorphism onto it.
pub fn relabel(a: &Arc<DgbvInstance>, labels: &[String]) -> Result<(Arc<DgbvInstance>, DgbvMorphism)> {
    let n = a.dim();
    if labels.len() != n {
        return Err(Error::Shape("one label per basis vector required".into()));
    }
    let space = Arc::new(GradedSpace::new(
        labels.iter().cloned().zip(a.space().degrees().iter().copied()).collect(),
    )?);
    let pos: Vec<usize> = labels.iter().map(|l| space.index_of(l).unwrap()).collect();
    let move_el = |e: &Element| -> Element {
        let mut out = Element::zero();
        for (i, c) in e.terms() {
            out.add_term(pos[i], c.clone());
        }
        out
    };
    let mut products = vec![Element::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            products[pos[i] * n + pos[j]] = move_el(a.product_basis(i, j));
        }
    }
    let move_op = |op: &LinearOperator| {
        let entries = (0..n)
            .flat_map(|i| op.image_of_basis(i).terms().map(|(j, c)| (pos[i], pos[j], c.clone())).collect::<Vec<_>>());
        LinearOperator::from_entries(space.clone(), space.clone(), op.degree(), entries)
    };
    let integral = a.integral().map(|v| {
        let mut w = vec![Scalar::zero(); n];
        for i in 0..n {
            w[pos[i]] = v[i].clone();
        }
        w
    });
    let copy = Arc::new(DgbvInstance::from_parts(
        format!("{}-relabeled", a.name()),
        space.clone(),
        a.unit().map(move_el),
        products,
        move_op(a.delta())?,
        move_op(a.bv())?,
        integral,
    )?);
    let map = LinearOperator::from_entries(
        a.space().clone(),
        space,
        0,
        (0..n).map(|i| (i, pos[i], Scalar::one())),
    )?;
    let m = DgbvMorphism::new(a.clone(), copy.clone(), map)?;
    Ok((copy, m))
}

/// `e ↦ e ⊗ 1` into `𝒜 ⊗ E`, for `E` with unit labelled `"1"`.
pub fn unit_inclusion(a: &Arc<DgbvInstance>, e: &DgbvInstance) -> Result<(Arc<DgbvInstance>, DgbvMorphism)> {
    let ae = Arc::new(crate::models::tensor(a, e)?);
    let entries: Vec<(String, String, Scalar)> = a
        .space()
        .labels()
        .iter()
        .map(|l| (l.clone(), format!("{l}|1"), Scalar::one()))
        .collect();
    let m = DgbvMorphism::from_labels(a.clone(), ae.clone(), &entries)?;
    Ok((ae, m))
}

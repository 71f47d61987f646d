//! Differential Gerstenhaber-Batalin-Vilkovisky algebras given by structure
//! constants, the derived bracket, and exhaustive axiom checking.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::{format_scalar, sign, Element, GradedSpace, LinearOperator, Scalar};
use crate::par;

/// A finite-dimensional DGBV algebra with optional unit and integral.
///
/// The bracket is never stored; it is always derived from `bv`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgbvInstance {
    name: String,
    space: Arc<GradedSpace>,
    unit: Option<Element>,
    /// `products[a * n + b] = e_a ∧ e_b`
    products: Vec<Element>,
    delta: LinearOperator,
    bv: LinearOperator,
    integral: Option<Vec<Scalar>>,
}

/// Label-based builder; the basis is put into canonical order on `build`.
#[derive(Clone, Debug, Default)]
pub struct InstanceBuilder {
    name: String,
    basis: Vec<(String, i32)>,
    unit: Option<String>,
    products: Vec<(String, String, String, Scalar)>,
    delta: Vec<(String, String, Scalar)>,
    bv: Vec<(String, String, Scalar)>,
    integral: Option<Vec<(String, Scalar)>>,
}

impl InstanceBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        InstanceBuilder { name: name.into(), ..Default::default() }
    }

    pub fn basis(mut self, label: impl Into<String>, degree: i32) -> Self {
        self.basis.push((label.into(), degree));
        self
    }

    pub fn unit(mut self, label: impl Into<String>) -> Self {
        self.unit = Some(label.into());
        self
    }

    /// Adds `c·e_c` to the product `e_a ∧ e_b` only.
    pub fn product(mut self, a: &str, b: &str, c: &str, coeff: Scalar) -> Self {
        self.products.push((a.into(), b.into(), c.into(), coeff));
        self
    }

    /// Adds `c·e_c` to `e_a ∧ e_b` and the graded-commuted term to `e_b ∧ e_a`.
    pub fn graded_product(self, a: &str, b: &str, c: &str, coeff: Scalar) -> Self {
        let deg = |l: &str| self.basis.iter().find(|(x, _)| x == l).map(|x| x.1);
        let s = match (deg(a), deg(b)) {
            (Some(da), Some(db)) => sign(i64::from(da * db)),
            _ => Scalar::one(),
        };
        let swapped = coeff.clone() * s;
        let this = self.product(a, b, c, coeff);
        if a == b {
            this
        } else {
            this.product(b, a, c, swapped)
        }
    }

    /// Declares the unit `1` and fills in `1 ∧ x = x ∧ 1 = x`.
    pub fn unit_products(mut self, unit: &str) -> Self {
        let labels: Vec<String> = self.basis.iter().map(|b| b.0.clone()).collect();
        for l in &labels {
            self.products.push((unit.into(), l.clone(), l.clone(), Scalar::one()));
            if l != unit {
                self.products.push((l.clone(), unit.into(), l.clone(), Scalar::one()));
            }
        }
        self.unit = Some(unit.into());
        self
    }

    pub fn delta(mut self, from: &str, to: &str, coeff: Scalar) -> Self {
        self.delta.push((from.into(), to.into(), coeff));
        self
    }

    pub fn bv(mut self, from: &str, to: &str, coeff: Scalar) -> Self {
        self.bv.push((from.into(), to.into(), coeff));
        self
    }

    pub fn integral(mut self, label: &str, coeff: Scalar) -> Self {
        self.integral.get_or_insert_with(Vec::new).push((label.into(), coeff));
        self
    }

    pub fn zero_integral(mut self) -> Self {
        self.integral.get_or_insert_with(Vec::new);
        self
    }

    pub fn build(self) -> Result<DgbvInstance> {
        let space = Arc::new(GradedSpace::new(self.basis)?);
        let idx = |l: &str| {
            space.index_of(l).ok_or_else(|| Error::Invalid(format!("unknown basis label {l:?}")))
        };
        let n = space.dim();
        let mut products = vec![Element::zero(); n * n];
        for (a, b, c, coeff) in &self.products {
            let (ia, ib, ic) = (idx(a)?, idx(b)?, idx(c)?);
            if space.degree(ic) != space.degree(ia) + space.degree(ib) && !coeff.is_zero() {
                return Err(Error::Grading(format!("{a} ∧ {b} cannot contain {c}")));
            }
            products[ia * n + ib].add_term(ic, coeff.clone());
        }
        let op = |entries: &[(String, String, Scalar)], degree| -> Result<LinearOperator> {
            let mut resolved = Vec::new();
            let mut acc: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
            for (f, t, c) in entries {
                *acc.entry((idx(f)?, idx(t)?)).or_insert_with(Scalar::zero) += c.clone();
            }
            for ((f, t), c) in acc {
                resolved.push((f, t, c));
            }
            LinearOperator::from_entries(space.clone(), space.clone(), degree, resolved)
        };
        let delta = op(&self.delta, 1)?;
        let bv = op(&self.bv, -1)?;
        let integral = match self.integral {
            None => None,
            Some(entries) => {
                let mut v = vec![Scalar::zero(); n];
                for (l, c) in entries {
                    v[idx(&l)?] += c;
                }
                Some(v)
            }
        };
        let unit = match self.unit {
            Some(l) => Some(Element::basis(idx(&l)?)),
            None => None,
        };
        Ok(DgbvInstance { name: self.name, space, unit, products, delta, bv, integral })
    }
}

impl DgbvInstance {
    /// Assembles an instance from already-resolved parts.
    pub fn from_parts(
        name: impl Into<String>,
        space: Arc<GradedSpace>,
        unit: Option<Element>,
        products: Vec<Element>,
        delta: LinearOperator,
        bv: LinearOperator,
        integral: Option<Vec<Scalar>>,
    ) -> Result<Self> {
        let n = space.dim();
        if products.len() != n * n {
            return Err(Error::Shape(format!("expected {} products, got {}", n * n, products.len())));
        }
        for a in 0..n {
            for b in 0..n {
                let p = &products[a * n + b];
                p.check_in(&space)?;
                if p.terms().any(|(c, _)| space.degree(c) != space.degree(a) + space.degree(b)) {
                    return Err(Error::Grading(format!(
                        "{} ∧ {} is not of degree {}",
                        space.label(a),
                        space.label(b),
                        space.degree(a) + space.degree(b)
                    )));
                }
            }
        }
        if delta.degree() != 1 || bv.degree() != -1 {
            return Err(Error::Grading("δ must have degree +1 and Δ degree -1".into()));
        }
        if **delta.source() != *space || **bv.source() != *space {
            return Err(Error::SpaceMismatch("operators act on a different space".into()));
        }
        if let Some(u) = &unit {
            u.check_in(&space)?;
        }
        if let Some(i) = &integral {
            if i.len() != n {
                return Err(Error::Shape("integral length differs from dimension".into()));
            }
        }
        Ok(DgbvInstance { name: name.into(), space, unit, products, delta, bv, integral })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.space.degree(i)
    }

    pub fn unit(&self) -> Option<&Element> {
        self.unit.as_ref()
    }

    pub fn delta(&self) -> &LinearOperator {
        &self.delta
    }

    pub fn bv(&self) -> &LinearOperator {
        &self.bv
    }

    pub fn integral(&self) -> Option<&[Scalar]> {
        self.integral.as_deref()
    }

    pub fn with_bv(mut self, bv: LinearOperator) -> Self {
        self.bv = bv;
        self
    }

    pub fn with_integral(mut self, integral: Option<Vec<Scalar>>) -> Self {
        self.integral = integral;
        self
    }

    pub fn product_basis(&self, a: usize, b: usize) -> &Element {
        &self.products[a * self.dim() + b]
    }

    pub fn products(&self) -> &[Element] {
        &self.products
    }

    /// Bilinear extension of the structure constants.
    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        a.check_in(&self.space)?;
        b.check_in(&self.space)?;
        Ok(self.mul(a, b))
    }

    pub(crate) fn mul(&self, a: &Element, b: &Element) -> Element {
        let mut out = Element::zero();
        for (i, ca) in a.terms() {
            for (j, cb) in b.terms() {
                out.add_scaled(self.product_basis(i, j), &(ca * cb));
            }
        }
        out
    }

    pub fn apply_delta(&self, a: &Element) -> Element {
        self.delta.apply_unchecked(a)
    }

    pub fn apply_bv(&self, a: &Element) -> Element {
        self.bv.apply_unchecked(a)
    }

    /// `∫ a`; zero when no integral is attached.
    pub fn integrate(&self, a: &Element) -> Scalar {
        match &self.integral {
            None => Scalar::zero(),
            Some(v) => a.terms().fold(Scalar::zero(), |acc, (i, c)| acc + c * &v[i]),
        }
    }

    /// The single degree on which the integral is supported, if any.
    pub fn integral_degree(&self) -> Option<i32> {
        let v = self.integral.as_ref()?;
        let mut degs: Vec<i32> =
            (0..self.dim()).filter(|&i| !v[i].is_zero()).map(|i| self.degree(i)).collect();
        degs.dedup();
        (degs.len() == 1).then(|| degs[0])
    }

    /// `[a • b]_Δ` for homogeneous `a` of degree `da`.
    fn bracket_homogeneous(&self, a: &Element, da: i32, b: &Element) -> Element {
        let ab = self.mul(a, b);
        let mut r = self.apply_bv(&ab);
        r.add_scaled(&self.mul(&self.apply_bv(a), b), &-Scalar::one());
        r.add_scaled(&self.mul(a, &self.apply_bv(b)), &-sign(i64::from(da)));
        r.scaled(&sign(i64::from(da)))
    }

    /// The derived bracket, extended bilinearly over homogeneous components.
    pub fn bracket(&self, a: &Element, b: &Element) -> Result<Element> {
        a.check_in(&self.space)?;
        b.check_in(&self.space)?;
        Ok(self.bracket_unchecked(a, b))
    }

    pub(crate) fn bracket_unchecked(&self, a: &Element, b: &Element) -> Element {
        let mut out = Element::zero();
        for (da, pa) in a.homogeneous_parts(&self.space) {
            out.add_scaled(&self.bracket_homogeneous(&pa, da, b), &Scalar::one());
        }
        out
    }

    pub fn bracket_basis(&self, a: usize, b: usize) -> Element {
        self.bracket_homogeneous(&Element::basis(a), self.degree(a), &Element::basis(b))
    }

    /// Evaluator for `a ↦ δa + [g • a]`.
    pub fn deformed_differential(&self, g: &Element) -> Result<DeformedDifferential<'_>> {
        g.check_in(&self.space)?;
        if !g.is_zero() && g.degree_in(&self.space).is_none() {
            return Err(Error::Grading("deforming element must be homogeneous".into()));
        }
        Ok(DeformedDifferential { algebra: self, g: g.clone() })
    }

    pub fn check_axioms(&self) -> AxiomReport {
        check_dgbv_axioms(self)
    }

    pub fn label_of(&self, e: &Element) -> String {
        if e.is_zero() {
            return "0".into();
        }
        e.terms()
            .map(|(i, c)| {
                if c.is_one() {
                    self.space.label(i).to_string()
                } else {
                    format!("({})*{}", format_scalar(c), self.space.label(i))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `δ_g = δ + [g • ·]` on a plain algebra.
pub struct DeformedDifferential<'a> {
    algebra: &'a DgbvInstance,
    g: Element,
}

impl DeformedDifferential<'_> {
    pub fn apply(&self, a: &Element) -> Element {
        let mut r = self.algebra.apply_delta(a);
        r.add_scaled(&self.algebra.bracket_unchecked(&self.g, a), &Scalar::one());
        r
    }

    /// `δ_g(δ_g(e_i))` for every basis vector, nonzero ones only.
    pub fn squared_check(&self) -> Vec<(usize, Element)> {
        (0..self.algebra.dim())
            .map(|i| (i, self.apply(&self.apply(&Element::basis(i)))))
            .filter(|(_, e)| !e.is_zero())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

/// One line of an axiom report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub status: CheckStatus,
    pub violations: usize,
    /// First failing basis tuple (labels) and the nonzero residual.
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub basis: Vec<String>,
    pub residual: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.status == CheckStatus::Fail)
    }

    pub(crate) fn push(&mut self, check: AxiomCheck) {
        self.checks.push(check);
    }

    pub(crate) fn not_applicable(&mut self, name: &str) {
        self.checks.push(AxiomCheck {
            name: name.into(),
            status: CheckStatus::NotApplicable,
            violations: 0,
            witness: None,
        });
    }
}

/// Runs `residual` over all index tuples in `0..n`^arity and summarizes.
pub(crate) fn exhaustive_check<F>(
    name: &str,
    n: usize,
    arity: usize,
    labels: impl Fn(&[usize]) -> Vec<String> + Sync,
    residual: F,
) -> AxiomCheck
where
    F: Fn(&[usize]) -> Option<String> + Sync + Send,
{
    let per_first: Vec<(usize, Option<Witness>)> = par::map_range(n, |a| {
        let mut count = 0;
        let mut first = None;
        let mut idx = vec![0usize; arity];
        idx[0] = a;
        let inner = n.pow(arity as u32 - 1);
        for mut k in 0..inner {
            for slot in idx.iter_mut().skip(1).rev() {
                *slot = k % n;
                k /= n;
            }
            if let Some(r) = residual(&idx) {
                count += 1;
                if first.is_none() {
                    first = Some(Witness { basis: labels(&idx), residual: r });
                }
            }
        }
        (count, first)
    });
    let violations = per_first.iter().map(|x| x.0).sum();
    let witness = per_first.into_iter().find_map(|x| x.1);
    AxiomCheck {
        name: name.into(),
        status: if violations == 0 { CheckStatus::Pass } else { CheckStatus::Fail },
        violations,
        witness,
    }
}

/// Exhaustive verification over basis pairs and triples.
pub fn check_dgbv_axioms(a: &DgbvInstance) -> AxiomReport {
    let n = a.dim();
    let deg = |i: usize| i64::from(a.degree(i));
    let labels = |idx: &[usize]| idx.iter().map(|&i| a.space().label(i).to_string()).collect();
    let e = Element::basis;
    let nz = |x: Element| (!x.is_zero()).then(|| a.label_of(&x));
    let mut report = AxiomReport::default();

    report.push(exhaustive_check("graded_commutativity", n, 2, labels, |t| {
        let mut r = a.product_basis(t[0], t[1]).clone();
        r.add_scaled(a.product_basis(t[1], t[0]), &-sign(deg(t[0]) * deg(t[1])));
        nz(r)
    }));
    report.push(exhaustive_check("associativity", n, 3, labels, |t| {
        let left = a.mul(a.product_basis(t[0], t[1]), &e(t[2]));
        let right = a.mul(&e(t[0]), a.product_basis(t[1], t[2]));
        nz(&left - &right)
    }));
    match a.unit() {
        Some(u) => report.push(exhaustive_check("unit_law", n, 1, labels, |t| {
            let left = a.mul(u, &e(t[0]));
            let right = a.mul(&e(t[0]), u);
            nz(&(&left - &e(t[0])) + &(&right - &e(t[0])))
        })),
        None => report.not_applicable("unit_law"),
    }
    let op_check = |name: &str, op: Result<LinearOperator>| -> AxiomCheck {
        let op = op.expect("operators on the same space compose");
        exhaustive_check(name, n, 1, labels, |t| nz(op.image_of_basis(t[0])))
    };
    report.push(op_check("delta_square_zero", a.delta().compose(a.delta())));
    report.push(op_check("bv_square_zero", a.bv().compose(a.bv())));
    report.push(op_check("delta_bv_anticommute", a.delta().anticommutator(a.bv())));
    report.push(exhaustive_check("delta_leibniz", n, 2, labels, |t| {
        let lhs = a.apply_delta(a.product_basis(t[0], t[1]));
        let mut rhs = a.mul(&a.apply_delta(&e(t[0])), &e(t[1]));
        rhs.add_scaled(&a.mul(&e(t[0]), &a.apply_delta(&e(t[1]))), &sign(deg(t[0])));
        nz(&lhs - &rhs)
    }));
    report.push(exhaustive_check("odd_poisson", n, 3, labels, |t| {
        let (x, y, z) = (t[0], t[1], t[2]);
        let lhs = a.bracket_unchecked(&e(x), a.product_basis(y, z));
        let mut rhs = a.mul(&a.bracket_basis(x, y), &e(z));
        rhs.add_scaled(&a.mul(&e(y), &a.bracket_basis(x, z)), &sign((deg(x) - 1) * deg(y)));
        nz(&lhs - &rhs)
    }));
    report.extend_g_algebra(a);
    report.push(exhaustive_check("delta_bracket_derivation", n, 2, labels, |t| {
        let (x, y) = (t[0], t[1]);
        let lhs = a.apply_delta(&a.bracket_basis(x, y));
        let mut rhs = a.bracket_unchecked(&a.apply_delta(&e(x)), &e(y));
        rhs.add_scaled(&a.bracket_unchecked(&e(x), &a.apply_delta(&e(y))), &sign(deg(x) - 1));
        nz(&lhs - &rhs)
    }));
    report
}

impl AxiomReport {
    /// Graded antisymmetry, Jacobi and (left-slot) Leibniz of the derived bracket.
    fn extend_g_algebra(&mut self, a: &DgbvInstance) {
        for c in g_algebra_checks(a) {
            self.push(c);
        }
    }
}

/// The three G-algebra identities of the derived bracket, each re-derived by
/// brute force over basis tuples.
pub fn g_algebra_checks(a: &DgbvInstance) -> Vec<AxiomCheck> {
    let n = a.dim();
    let deg = |i: usize| i64::from(a.degree(i));
    let labels = |idx: &[usize]| idx.iter().map(|&i| a.space().label(i).to_string()).collect();
    let e = Element::basis;
    let nz = |x: Element| (!x.is_zero()).then(|| a.label_of(&x));
    let br = |x: &Element, y: &Element| a.bracket_unchecked(x, y);
    vec![
        exhaustive_check("bracket_antisymmetry", n, 2, labels, |t| {
            let mut r = a.bracket_basis(t[0], t[1]);
            r.add_scaled(&a.bracket_basis(t[1], t[0]), &sign((deg(t[0]) - 1) * (deg(t[1]) - 1)));
            nz(r)
        }),
        exhaustive_check("bracket_jacobi", n, 3, labels, |t| {
            let (x, y, z) = (t[0], t[1], t[2]);
            let lhs = br(&e(x), &a.bracket_basis(y, z));
            let mut rhs = br(&a.bracket_basis(x, y), &e(z));
            rhs.add_scaled(&br(&e(y), &a.bracket_basis(x, z)), &sign((deg(x) - 1) * (deg(y) - 1)));
            nz(&lhs - &rhs)
        }),
        exhaustive_check("bracket_leibniz", n, 3, labels, |t| {
            let (x, y, z) = (t[0], t[1], t[2]);
            let lhs = br(a.product_basis(x, y), &e(z));
            let mut rhs = a.mul(&e(x), &a.bracket_basis(y, z));
            rhs.add_scaled(&a.mul(&a.bracket_basis(x, z), &e(y)), &sign(deg(y) * (deg(z) - 1)));
            nz(&lhs - &rhs)
        }),
    ]
}

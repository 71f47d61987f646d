//! Exact graded linear algebra: scalars, graded spaces, sparse elements and
//! degree-homogeneous linear operators, plus the Koszul sign rule.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// The ground field is fixed to the rationals.
pub type Scalar = BigRational;

pub fn q(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

/// `(-1)^e` as a scalar.
pub fn sign(e: i64) -> Scalar {
    if e.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// Parses `"p/q"` or an integer, exactly.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    let parsed = match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Scalar::new(n, d)
        }
        None => Scalar::from_integer(t.parse().map_err(|_| bad())?),
    };
    Ok(parsed)
}

/// Canonical text form: integer or `p/q` in lowest terms.
pub fn format_scalar(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Koszul sign of reordering homogeneous factors.
///
/// `permutation[i]` is the original position of the factor that ends up at
/// position `i`; `degrees` are the degrees of the factors in original order.
pub fn koszul_sign(permutation: &[usize], degrees: &[i32]) -> Result<Scalar> {
    let k = degrees.len();
    if permutation.len() != k {
        return Err(Error::Shape(format!(
            "permutation of length {} for {} degrees",
            permutation.len(),
            k
        )));
    }
    let mut seen = vec![false; k];
    for &p in permutation {
        if p >= k || seen[p] {
            return Err(Error::Shape(format!("{permutation:?} is not a permutation")));
        }
        seen[p] = true;
    }
    let mut odd_swaps = 0i64;
    for i in 0..k {
        for j in (i + 1)..k {
            if permutation[i] > permutation[j] {
                odd_swaps += i64::from(degrees[permutation[i]] * degrees[permutation[j]]);
            }
        }
    }
    Ok(sign(odd_swaps))
}

/// A finite graded basis, kept in canonical order: degree ascending, then
/// label lexicographic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    labels: Vec<String>,
    degrees: Vec<i32>,
    index: BTreeMap<String, usize>,
}

impl GradedSpace {
    /// Sorts the given basis into canonical order. Labels must be unique.
    pub fn new(basis: Vec<(String, i32)>) -> Result<Self> {
        let mut basis = basis;
        basis.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        let mut index = BTreeMap::new();
        for (i, (l, _)) in basis.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate basis label {l:?}")));
            }
        }
        let (labels, degrees) = basis.into_iter().unzip();
        Ok(GradedSpace { labels, degrees, index })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Distinct degrees in ascending order.
    pub fn degree_range(&self) -> Vec<i32> {
        let mut d = self.degrees.clone();
        d.dedup();
        d
    }

    pub fn indices_of_degree(&self, d: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == d).collect()
    }

    pub fn basis_vector(&self, i: usize) -> Element {
        Element::basis(i)
    }
}

/// Sparse vector in a graded space. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    coeffs: BTreeMap<usize, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn basis(i: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(i, Scalar::one());
        Element { coeffs }
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, Scalar)>>(terms: I) -> Self {
        let mut e = Element::zero();
        for (i, c) in terms {
            e.add_term(i, c);
        }
        e
    }

    pub fn from_dense(v: &[Scalar]) -> Self {
        Element::from_terms(v.iter().cloned().enumerate())
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); dim];
        for (&i, c) in &self.coeffs {
            v[i] = c.clone();
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.coeffs.iter().map(|(&i, c)| (i, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add_term(&mut self, i: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(i) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Element, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (i, c) in other.terms() {
            self.add_term(i, c * s);
        }
    }

    pub fn scaled(&self, s: &Scalar) -> Element {
        if s.is_zero() {
            return Element::zero();
        }
        Element { coeffs: self.coeffs.iter().map(|(&i, c)| (i, c * s)).collect() }
    }

    /// Degree when homogeneous; `None` for zero or mixed-degree elements.
    pub fn degree_in(&self, space: &GradedSpace) -> Option<i32> {
        let mut it = self.coeffs.keys().map(|&i| space.degree(i));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Splits into homogeneous components, by degree ascending.
    pub fn homogeneous_parts(&self, space: &GradedSpace) -> Vec<(i32, Element)> {
        let mut parts: BTreeMap<i32, Element> = BTreeMap::new();
        for (i, c) in self.terms() {
            parts.entry(space.degree(i)).or_default().add_term(i, c.clone());
        }
        parts.into_iter().collect()
    }

    pub fn check_in(&self, space: &GradedSpace) -> Result<()> {
        match self.max_index() {
            Some(i) if i >= space.dim() => Err(Error::SpaceMismatch(format!(
                "element index {i} outside space of dimension {}",
                space.dim()
            ))),
            _ => Ok(()),
        }
    }
}

impl std::ops::Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::one());
        out
    }
}

impl std::ops::Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Scalar::one());
        out
    }
}

impl std::ops::Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scaled(&-Scalar::one())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms().map(|(i, c)| format!("{}*e{}", format_scalar(c), i)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A linear map between graded spaces that raises degree by a fixed amount.
///
/// Stored as one dense matrix; entries that would connect degree `k` to
/// anything other than `k + degree` are rejected on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearOperator {
    source: Arc<GradedSpace>,
    target: Arc<GradedSpace>,
    degree: i32,
    matrix: Matrix,
}

impl LinearOperator {
    pub fn zero(source: Arc<GradedSpace>, target: Arc<GradedSpace>, degree: i32) -> Self {
        let matrix = Matrix::zeros(target.dim(), source.dim());
        LinearOperator { source, target, degree, matrix }
    }

    pub fn identity(space: Arc<GradedSpace>) -> Self {
        let matrix = Matrix::identity(space.dim());
        LinearOperator { source: space.clone(), target: space, degree: 0, matrix }
    }

    /// Builds from `(from, to, coefficient)` entries, meaning `e_from ↦ c·e_to + ...`.
    pub fn from_entries(
        source: Arc<GradedSpace>,
        target: Arc<GradedSpace>,
        degree: i32,
        entries: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self> {
        let mut op = Self::zero(source, target, degree);
        for (from, to, c) in entries {
            op.set(from, to, c)?;
        }
        Ok(op)
    }

    pub fn from_matrix(
        source: Arc<GradedSpace>,
        target: Arc<GradedSpace>,
        degree: i32,
        matrix: Matrix,
    ) -> Result<Self> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::SpaceMismatch("matrix shape does not match spaces".into()));
        }
        let mut op = Self::zero(source, target, degree);
        for j in 0..matrix.cols() {
            for i in 0..matrix.rows() {
                if !matrix[(i, j)].is_zero() {
                    op.set(j, i, matrix[(i, j)].clone())?;
                }
            }
        }
        Ok(op)
    }

    /// Sets the image coefficient of `e_from` along `e_to`.
    pub fn set(&mut self, from: usize, to: usize, c: Scalar) -> Result<()> {
        if from >= self.source.dim() || to >= self.target.dim() {
            return Err(Error::SpaceMismatch(format!("entry ({from}, {to}) out of range")));
        }
        if !c.is_zero() && self.target.degree(to) != self.source.degree(from) + self.degree {
            return Err(Error::Grading(format!(
                "entry {} -> {} does not have degree {}",
                self.source.label(from),
                self.target.label(to),
                self.degree
            )));
        }
        self.matrix[(to, from)] = c;
        Ok(())
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn source(&self) -> &Arc<GradedSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedSpace> {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn entry(&self, from: usize, to: usize) -> &Scalar {
        &self.matrix[(to, from)]
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn apply(&self, v: &Element) -> Result<Element> {
        v.check_in(&self.source)?;
        Ok(self.apply_unchecked(v))
    }

    pub(crate) fn apply_unchecked(&self, v: &Element) -> Element {
        let mut out = Element::zero();
        for (j, c) in v.terms() {
            for i in 0..self.matrix.rows() {
                let a = &self.matrix[(i, j)];
                if !a.is_zero() {
                    out.add_term(i, a * c);
                }
            }
        }
        out
    }

    /// Image of the `j`-th basis vector.
    pub fn image_of_basis(&self, j: usize) -> Element {
        Element::from_terms((0..self.matrix.rows()).map(|i| (i, self.matrix[(i, j)].clone())))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearOperator) -> Result<LinearOperator> {
        if *other.target != *self.source {
            return Err(Error::SpaceMismatch("operators are not composable".into()));
        }
        Ok(LinearOperator {
            source: other.source.clone(),
            target: self.target.clone(),
            degree: self.degree + other.degree,
            matrix: self.matrix.mul(&other.matrix),
        })
    }

    pub fn add(&self, other: &LinearOperator) -> Result<LinearOperator> {
        if *self.source != *other.source || *self.target != *other.target {
            return Err(Error::SpaceMismatch("operators act between different spaces".into()));
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::Grading("adding operators of different degree".into()));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let mut matrix = self.matrix.clone();
        for i in 0..matrix.rows() {
            for j in 0..matrix.cols() {
                matrix[(i, j)] += other.matrix[(i, j)].clone();
            }
        }
        Ok(LinearOperator { source: self.source.clone(), target: self.target.clone(), degree, matrix })
    }

    pub fn scaled(&self, s: &Scalar) -> LinearOperator {
        let mut out = self.clone();
        for i in 0..out.matrix.rows() {
            for j in 0..out.matrix.cols() {
                out.matrix[(i, j)] *= s.clone();
            }
        }
        out
    }

    /// `f∘g + g∘f`.
    pub fn anticommutator(&self, other: &LinearOperator) -> Result<LinearOperator> {
        self.compose(other)?.add(&other.compose(self)?)
    }

    /// Basis indices whose image is nonzero.
    pub fn nonzero_columns(&self) -> Vec<usize> {
        (0..self.matrix.cols())
            .filter(|&j| (0..self.matrix.rows()).any(|i| !self.matrix[(i, j)].is_zero()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_term() -> (Arc<GradedSpace>, LinearOperator) {
        let s = Arc::new(GradedSpace::new(vec![("u".into(), 0), ("v".into(), 1)]).unwrap());
        let d = LinearOperator::from_entries(s.clone(), s.clone(), 1, [(0, 1, int(1))]).unwrap();
        (s, d)
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), int(-1));
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 4, 3]).unwrap(), int(1));
        assert_eq!(koszul_sign(&[2, 0, 1], &[1, 1, 1]).unwrap(), int(1));
        assert_eq!(koszul_sign(&[1, 0], &[2, 1]).unwrap(), int(1));
        assert!(koszul_sign(&[0], &[1, 1]).is_err());
        assert!(koszul_sign(&[0, 0], &[1, 1]).is_err());
    }

    #[test]
    fn apply_two_term_complex() {
        let (s, d) = two_term();
        assert_eq!(d.apply(&Element::basis(0)).unwrap(), Element::basis(1));
        assert!(d.apply(&Element::basis(1)).unwrap().is_zero());
        assert!(d.apply(&Element::basis(5)).is_err());
        let id = LinearOperator::identity(s.clone());
        let v = Element::from_terms([(0, q(3, 2)), (1, int(-1))]);
        assert_eq!(id.apply(&v).unwrap(), v);
        let z = LinearOperator::zero(s.clone(), s, 1);
        assert!(z.apply(&v).unwrap().is_zero());
    }

    #[test]
    fn compose_and_anticommutator() {
        let (s, d) = two_term();
        assert!(d.compose(&d).unwrap().is_zero());
        let z = LinearOperator::zero(s.clone(), s.clone(), 0);
        assert!(d.anticommutator(&z).unwrap().is_zero());
        // Corrupt: a degree -1 map v -> u; the anticommutator with d is the identity.
        let h = LinearOperator::from_entries(s.clone(), s, -1, [(1, 0, int(1))]).unwrap();
        let ac = d.anticommutator(&h).unwrap();
        assert_eq!(ac.nonzero_columns(), vec![0, 1]);
    }

    #[test]
    fn degree_violation_rejected() {
        let (s, _) = two_term();
        assert!(matches!(
            LinearOperator::from_entries(s.clone(), s, 1, [(1, 0, int(1))]),
            Err(Error::Grading(_))
        ));
    }

    #[test]
    fn canonical_basis_order() {
        let s = GradedSpace::new(vec![("b".into(), 1), ("z".into(), 0), ("a".into(), 1)]).unwrap();
        assert_eq!(s.labels(), &["z".to_string(), "a".into(), "b".into()]);
        assert!(GradedSpace::new(vec![("a".into(), 0), ("a".into(), 1)]).is_err());
    }

    #[test]
    fn scalar_text_round_trip() {
        for s in ["3", "-7/4", "0", "12/8"] {
            let v = parse_scalar(s).unwrap();
            assert_eq!(parse_scalar(&format_scalar(&v)).unwrap(), v);
        }
        assert_eq!(format_scalar(&parse_scalar("12/8").unwrap()), "3/2");
        assert!(parse_scalar("1.5").is_err());
        assert!(parse_scalar("1/0").is_err());
    }
}

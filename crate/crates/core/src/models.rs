//! Small hand-made DGBV instances and constructions on instances.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::dgbv::{DgbvInstance, InstanceBuilder};
use crate::error::{Error, Result};
use crate::graded::{int, sign, Element, GradedSpace, LinearOperator, Scalar};

/// Sign of `θ^a ∧ θ^b` for subsets given as bitmasks, or `None` if they overlap.
pub fn exterior_sign(a: u32, b: u32) -> Option<Scalar> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0i64;
    for i in 0..32 {
        if a & (1 << i) != 0 {
            swaps += i64::from((b & ((1u32 << i) - 1)).count_ones());
        }
    }
    Some(sign(swaps))
}

/// Label of a generator subset: `"1"` for the empty set, otherwise the
/// generator names concatenated in increasing order.
pub fn exterior_label(prefix: &str, mask: u32) -> String {
    if mask == 0 {
        return "1".into();
    }
    (0..32).filter(|i| mask & (1 << i) != 0).map(|i| format!("{prefix}{}", i + 1)).collect()
}

/// Exterior algebra on `n` odd degree-one generators.
#[derive(Clone, Debug)]
pub struct Exterior {
    pub n: u32,
    pub prefix: String,
    pub space: Arc<GradedSpace>,
    /// Basis index of each subset mask.
    pub index: Vec<usize>,
}

impl Exterior {
    pub fn new(n: u32, prefix: &str) -> Result<Self> {
        if n > 16 {
            return Err(Error::OutOfRange(format!("{n} generators is too many")));
        }
        let masks = 0..(1u32 << n);
        let space = Arc::new(GradedSpace::new(
            masks.clone().map(|m| (exterior_label(prefix, m), m.count_ones() as i32)).collect(),
        )?);
        let index = masks.map(|m| space.index_of(&exterior_label(prefix, m)).unwrap()).collect();
        Ok(Exterior { n, prefix: prefix.into(), space, index })
    }

    pub fn top(&self) -> u32 {
        (1 << self.n) - 1
    }

    pub fn mask_of(&self, i: usize) -> u32 {
        self.index.iter().position(|&j| j == i).unwrap() as u32
    }

    pub fn products(&self) -> Vec<Element> {
        let d = self.space.dim();
        let mut out = vec![Element::zero(); d * d];
        for a in 0..(1u32 << self.n) {
            for b in 0..(1u32 << self.n) {
                if let Some(s) = exterior_sign(a, b) {
                    out[self.index[a as usize] * d + self.index[b as usize]] =
                        Element::from_terms([(self.index[(a | b) as usize], s)]);
                }
            }
        }
        out
    }

    /// Product of two elements using the exterior product.
    pub fn wedge(&self, x: &Element, y: &Element) -> Element {
        let mut out = Element::zero();
        for (i, a) in x.terms() {
            for (j, b) in y.terms() {
                let (mi, mj) = (self.mask_of(i), self.mask_of(j));
                if let Some(s) = exterior_sign(mi, mj) {
                    out.add_term(self.index[(mi | mj) as usize], s * a * b);
                }
            }
        }
        out
    }

    /// Extends an odd derivation of degree `degree` from its values on generators.
    pub fn derivation(&self, on_generators: &[Element], degree: i32) -> Result<LinearOperator> {
        let mut entries = Vec::new();
        for m in 0..(1u32 << self.n) {
            let mut image = Element::zero();
            let gens: Vec<u32> = (0..self.n).filter(|i| m & (1 << i) != 0).collect();
            for (pos, &g) in gens.iter().enumerate() {
                let before = gens[..pos].iter().fold(0u32, |acc, &i| acc | (1 << i));
                let after = gens[pos + 1..].iter().fold(0u32, |acc, &i| acc | (1 << i));
                let left = Element::basis(self.index[before as usize]);
                let right = Element::basis(self.index[after as usize]);
                let mid = &on_generators[g as usize];
                let term = self.wedge(&self.wedge(&left, mid), &right);
                // each generator passed over is odd and the derivation is odd
                image.add_scaled(&term, &sign(pos as i64 * i64::from(degree)));
            }
            for (to, c) in image.terms() {
                entries.push((self.index[m as usize], to, c.clone()));
            }
        }
        LinearOperator::from_entries(self.space.clone(), self.space.clone(), degree, entries)
    }

    pub fn generator(&self, i: u32) -> Element {
        Element::basis(self.index[1 << i])
    }

    pub fn monomial(&self, mask: u32) -> Element {
        Element::basis(self.index[mask as usize])
    }

    /// Instance with the given operators; unit `1`, integral = top coefficient.
    pub fn instance(
        &self,
        name: &str,
        delta: LinearOperator,
        bv: LinearOperator,
        integral: bool,
    ) -> Result<DgbvInstance> {
        let integral = integral.then(|| {
            let mut v = vec![Scalar::zero(); self.space.dim()];
            v[self.index[self.top() as usize]] = Scalar::one();
            v
        });
        DgbvInstance::from_parts(
            name,
            self.space.clone(),
            Some(self.monomial(0)),
            self.products(),
            delta,
            bv,
            integral,
        )
    }
}

/// `Λ(θ¹..θⁿ)` with `δ = Δ = 0` and the top-coefficient integral.
pub fn exterior_model(n: u32) -> Result<DgbvInstance> {
    let ext = Exterior::new(n, "t")?;
    let zero = |d| LinearOperator::zero(ext.space.clone(), ext.space.clone(), d);
    ext.instance(&format!("torus-{n}"), zero(1), zero(-1), true)
}

/// Chevalley-Eilenberg algebra of the Heisenberg Lie algebra:
/// `Λ(e1,e2,e3)` with `δe3 = e1∧e2`.
pub fn heisenberg() -> Result<DgbvInstance> {
    let ext = Exterior::new(3, "e")?;
    let gens = vec![Element::zero(), Element::zero(), ext.monomial(0b011)];
    let delta = ext.derivation(&gens, 1)?;
    let bv = LinearOperator::zero(ext.space.clone(), ext.space.clone(), -1);
    ext.instance("heisenberg", delta, bv, true)
}

/// `(i, j, [(k, c_k)])` meaning `[e_i, e_j] = Σ c_k e_k`.
pub type LieBracket = (u32, u32, Vec<(u32, Scalar)>);

/// `Λ(𝔤)` for a Lie algebra with `[e_i, e_j] = Σ c_k e_k`, with `δ = 0` and Δ the
/// Chevalley-Eilenberg boundary
/// `Δ(x_1 ∧ … ∧ x_k) = Σ_{a<b} (-1)^{a+b} [x_a, x_b] ∧ x_1 ∧ …x̂_a…x̂_b… ∧ x_k`.
/// Its derived bracket extends the Lie bracket.
pub fn lie_algebra_model(n: u32, brackets: &[LieBracket]) -> Result<DgbvInstance> {
    let ext = Exterior::new(n, "e")?;
    let mut table = vec![vec![Element::zero(); n as usize]; n as usize];
    for (i, j, terms) in brackets {
        let v = Element::from_terms(terms.iter().map(|(k, c)| (ext.index[1 << k], c.clone())));
        table[*j as usize][*i as usize] = -&v;
        table[*i as usize][*j as usize] = v;
    }
    let mut entries = Vec::new();
    for m in 0..(1u32 << n) {
        let gens: Vec<u32> = (0..n).filter(|i| m & (1 << i) != 0).collect();
        let mut image = Element::zero();
        for a in 0..gens.len() {
            for b in a + 1..gens.len() {
                let rest = m & !(1 << gens[a]) & !(1 << gens[b]);
                let br = &table[gens[a] as usize][gens[b] as usize];
                let t = ext.wedge(br, &ext.monomial(rest));
                image.add_scaled(&t, &sign((a + b) as i64));
            }
        }
        for (to, c) in image.terms() {
            entries.push((ext.index[m as usize], to, c.clone()));
        }
    }
    let bv = LinearOperator::from_entries(ext.space.clone(), ext.space.clone(), -1, entries)?;
    let delta = LinearOperator::zero(ext.space.clone(), ext.space.clone(), 1);
    ext.instance("lie", delta, bv, false)
}

/// `𝐤[x]/(x^m) ⊗ Λ(ξ)` with `|x| = 0`, `|ξ| = 1`, `δ = 0` and `Δ = ∂_x∂_ξ`.
pub fn bv_toy_model(m: u32) -> Result<DgbvInstance> {
    if m == 0 {
        return Err(Error::OutOfRange("truncation power must be positive".into()));
    }
    let pow = |k: u32| match k {
        0 => "1".to_string(),
        1 => "x".to_string(),
        _ => format!("x{k}"),
    };
    let odd = |k: u32| if k == 0 { "xi".to_string() } else { format!("{}xi", pow(k)) };
    let mut b = InstanceBuilder::new(format!("bv-toy-{m}"));
    for k in 0..m {
        b = b.basis(pow(k), 0).basis(odd(k), 1);
    }
    for i in 0..m {
        for j in 0..m {
            if i + j < m {
                let one = Scalar::one();
                b = b
                    .product(&pow(i), &pow(j), &pow(i + j), one.clone())
                    .product(&pow(i), &odd(j), &odd(i + j), one.clone())
                    .product(&odd(i), &pow(j), &odd(i + j), one);
            }
        }
    }
    for k in 1..m {
        b = b.bv(&odd(k), &pow(k - 1), int(i64::from(k)));
    }
    b.unit("1").build()
}

/// Six-dimensional instance with a nonzero bracket on cohomology classes.
///
/// Basis `1, a` (cohomology), `s = δt`, `t`, `q = Δδt`, `p = Δt`; the only
/// non-unit products are `a∧a = s` and `a∧t = t∧a = q`.
pub fn six_dim_example() -> Result<DgbvInstance> {
    let one = Scalar::one();
    InstanceBuilder::new("six-dim")
        .basis("1", 0)
        .basis("a", 0)
        .basis("s", 0)
        .basis("t", -1)
        .basis("q", -1)
        .basis("p", -2)
        .unit_products("1")
        .product("a", "a", "s", one.clone())
        .graded_product("a", "t", "q", one.clone())
        .delta("t", "s", one.clone())
        .delta("p", "q", -one.clone())
        .bv("t", "p", one.clone())
        .bv("s", "q", one.clone())
        .integral("1", one.clone())
        .integral("a", one)
        .build()
}

/// Contractible unital algebra `⟨1, t, δt, Δt, Δδt⟩` with trivial products
/// and `∫1 = 1`; tensoring with it does not change the cohomology.
pub fn acyclic_extension() -> Result<DgbvInstance> {
    let one = Scalar::one();
    InstanceBuilder::new("acyclic")
        .basis("1", 0)
        .basis("t", -1)
        .basis("s", 0)
        .basis("p", -2)
        .basis("q", -1)
        .unit_products("1")
        .delta("t", "s", one.clone())
        .delta("p", "q", -one.clone())
        .bv("t", "p", one.clone())
        .bv("s", "q", one.clone())
        .integral("1", one)
        .build()
}

/// Graded tensor product; labels are `"a|b"`.
pub fn tensor(a: &DgbvInstance, b: &DgbvInstance) -> Result<DgbvInstance> {
    let (na, nb) = (a.dim(), b.dim());
    let label = |i: usize, j: usize| format!("{}|{}", a.space().label(i), b.space().label(j));
    let mut basis = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            basis.push((label(i, j), a.degree(i) + b.degree(j)));
        }
    }
    let space = Arc::new(GradedSpace::new(basis)?);
    let idx: Vec<Vec<usize>> = (0..na)
        .map(|i| (0..nb).map(|j| space.index_of(&label(i, j)).unwrap()).collect())
        .collect();
    let n = space.dim();
    let d = |i: usize| i64::from(a.degree(i));
    let e = |i: usize| i64::from(b.degree(i));

    let mut products = vec![Element::zero(); n * n];
    for i in 0..na {
        for j in 0..nb {
            for k in 0..na {
                for l in 0..nb {
                    let s = sign(e(j) * d(k));
                    let mut out = Element::zero();
                    for (x, cx) in a.product_basis(i, k).terms() {
                        for (y, cy) in b.product_basis(j, l).terms() {
                            out.add_term(idx[x][y], &s * cx * cy);
                        }
                    }
                    products[idx[i][j] * n + idx[k][l]] = out;
                }
            }
        }
    }
    let op = |fa: &LinearOperator, fb: &LinearOperator, degree| {
        let mut entries = Vec::new();
        for i in 0..na {
            for j in 0..nb {
                for (x, c) in fa.image_of_basis(i).terms() {
                    entries.push((idx[i][j], idx[x][j], c.clone()));
                }
                for (y, c) in fb.image_of_basis(j).terms() {
                    entries.push((idx[i][j], idx[i][y], sign(d(i)) * c));
                }
            }
        }
        LinearOperator::from_entries(space.clone(), space.clone(), degree, entries)
    };
    let delta = op(a.delta(), b.delta(), 1)?;
    let bv = op(a.bv(), b.bv(), -1)?;
    let unit = match (a.unit(), b.unit()) {
        (Some(u), Some(v)) => {
            let mut out = Element::zero();
            for (i, ci) in u.terms() {
                for (j, cj) in v.terms() {
                    out.add_term(idx[i][j], ci * cj);
                }
            }
            Some(out)
        }
        _ => None,
    };
    let integral = match (a.integral(), b.integral()) {
        (Some(x), Some(y)) => {
            let mut v = vec![Scalar::zero(); n];
            for i in 0..na {
                for j in 0..nb {
                    v[idx[i][j]] = &x[i] * &y[j];
                }
            }
            Some(v)
        }
        _ => None,
    };
    DgbvInstance::from_parts(
        format!("{}|{}", a.name(), b.name()),
        space,
        unit,
        products,
        delta,
        bv,
        integral,
    )
}

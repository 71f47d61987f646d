//! Acceptance suite: one PASS/FAIL line per criterion, exact residuals,
//! wall-clock budgets enforced.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::One;

use dgbv_core::dgbv::DgbvInstance;
use dgbv_core::formal::FormalAlgebra;
use dgbv_core::frobenius::{check_identity_axiom, check_wdvv};
use dgbv_core::geometry::{
    build_torus_model, d_versus_omega_bracket, exterior_d, generators, koszul_delta,
    schouten_bracket, sharp_flat, Forms, PolyForm, PolyvectorField,
};
use dgbv_core::graded::{q, sign, Element, Scalar};
use dgbv_core::homology::{check_conditions, check_integral, decomposition};
use dgbv_core::mc::{coordinate_ring, solve_mc_in, verify_solution, McOutcome};
use dgbv_core::models::{
    acyclic_extension, bv_toy_model, exterior_model, heisenberg, six_dim_example, tensor,
};
use dgbv_core::morphism::{compare_potentials, relabel, unit_inclusion, DgbvMorphism};
use dgbv_core::pipeline::{cubic_trials, gauge_trials, run_pipeline, PipelineOptions, PipelineRun};
use dgbv_core::poly::Monomial;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn opts6() -> PipelineOptions {
    PipelineOptions { order: 6, potential_order: 6, force: false }
}

fn six_torus() -> DgbvInstance {
    tensor(&six_dim_example().unwrap(), &exterior_model(2).unwrap()).unwrap()
}

/// Every hand-built instance the pipeline accepts, with dimension at most 32.
fn pipeline_instances() -> Vec<DgbvInstance> {
    let e = acyclic_extension().unwrap();
    vec![
        exterior_model(2).unwrap(),
        exterior_model(3).unwrap(),
        exterior_model(4).unwrap(),
        six_dim_example().unwrap(),
        six_torus(),
        tensor(&exterior_model(2).unwrap(), &e).unwrap(),
        tensor(&six_dim_example().unwrap(), &e).unwrap(),
    ]
}

fn criterion_1() -> Outcome {
    let mut out = Vec::new();
    for n in 2..=4usize {
        let t = Instant::now();
        let a = build_torus_model(n, None).map_err(|e| e.to_string())?;
        let axioms = a.check_axioms();
        let violations: usize = axioms.checks.iter().map(|c| c.violations).sum();
        ensure(axioms.all_pass() && violations == 0, || format!("T{n}: {:?}", axioms.first_failure()))?;
        let i = check_integral(&a).map_err(|e| e.to_string())?;
        let iv: usize = i.checks.iter().map(|c| c.violations).sum();
        ensure(i.passes() && !i.degenerate && iv == 0, || format!("T{n}: integral {i:?}"))?;
        let c = check_conditions(&a).map_err(|e| e.to_string())?;
        ensure(c.all_hold(), || format!("T{n}: conditions {c:?}"))?;
        let dt = t.elapsed();
        ensure(dt < Duration::from_secs(5), || format!("T{n} took {dt:?}"))?;
        out.push(format!("T{n} {dt:.2?}"));
    }
    Ok(out.join(", "))
}

/// `[a•b] = (−1)^{|a|}(Δ(ab) − (Δa)b − (−1)^{|a|} a Δb)` from the tables.
fn bracket(a: &DgbvInstance, x: usize, y: usize) -> Element {
    let (ex, ey) = (Element::basis(x), Element::basis(y));
    let dx = a.degree(x) as i64;
    let p = a.apply_bv(a.product_basis(x, y));
    let q1 = a.multiply(&a.apply_bv(&ex), &ey).unwrap();
    let q2 = a.multiply(&ex, &a.apply_bv(&ey)).unwrap();
    let mut out = p;
    out.add_scaled(&q1, &-Scalar::one());
    out.add_scaled(&q2, &-sign(dx));
    out.scaled(&sign(dx))
}

fn bracket_el(table: &[Vec<Element>], x: usize, v: &Element) -> Element {
    let mut out = Element::zero();
    for (j, c) in v.terms() {
        out.add_scaled(&table[x][j], c);
    }
    out
}

fn el_bracket(table: &[Vec<Element>], v: &Element, y: usize) -> Element {
    let mut out = Element::zero();
    for (i, c) in v.terms() {
        out.add_scaled(&table[i][y], c);
    }
    out
}

fn criterion_2() -> Outcome {
    let a = bv_toy_model(3).map_err(|e| e.to_string())?;
    let n = a.dim();
    let table: Vec<Vec<Element>> = (0..n).map(|x| (0..n).map(|y| bracket(&a, x, y)).collect()).collect();
    let deg = |i: usize| a.degree(i) as i64;
    let (mut anti, mut jacobi, mut leibniz) = (0usize, 0usize, 0usize);
    let mut first = None;
    for x in 0..n {
        for y in 0..n {
            let s = sign((deg(x) - 1) * (deg(y) - 1));
            let r = &table[x][y] + &table[y][x].scaled(&s);
            if !r.is_zero() {
                anti += 1;
            }
            for z in 0..n {
                // [x•[y•z]] = [[x•y]•z] + (−1)^{(|x|−1)(|y|−1)} [y•[x•z]]
                let lhs = bracket_el(&table, x, &table[y][z]);
                let mut rhs = el_bracket(&table, &table[x][y], z);
                rhs.add_scaled(&bracket_el(&table, y, &table[x][z]), &s);
                if lhs != rhs {
                    jacobi += 1;
                    first.get_or_insert_with(|| {
                        format!("jacobi at ({}, {}, {})", a.space().label(x), a.space().label(y), a.space().label(z))
                    });
                }
                // [x•yz] = [x•y]z + (−1)^{(|x|−1)|y|} y[x•z]
                let lhs = bracket_el(&table, x, a.product_basis(y, z));
                let mut rhs = a.multiply(&table[x][y], &Element::basis(z)).unwrap();
                let t = a.multiply(&Element::basis(y), &table[x][z]).unwrap();
                rhs.add_scaled(&t, &sign((deg(x) - 1) * deg(y)));
                if lhs != rhs {
                    leibniz += 1;
                }
            }
        }
    }
    let summary = format!("violations: antisymmetry {anti}, jacobi {jacobi}, leibniz {leibniz}");
    if anti + jacobi + leibniz == 0 {
        Ok(summary)
    } else {
        Err(format!("{summary}; first {}; Δ does not preserve the ideal (x³)", first.unwrap_or_default()))
    }
}

fn criterion_3() -> Outcome {
    let mut done = Vec::new();
    let mut skipped = Vec::new();
    for a in pipeline_instances().into_iter().chain([heisenberg().unwrap(), bv_toy_model(3).unwrap()]) {
        ensure(a.dim() <= 32, || format!("{} has dimension {}", a.name(), a.dim()))?;
        let holds = a.check_axioms().all_pass()
            && check_conditions(&a).map(|c| c.all_hold()).unwrap_or(false);
        if !holds {
            skipped.push(a.name().to_string());
            continue;
        }
        let d = decomposition(&a).map_err(|e| e.to_string())?;
        let fa = FormalAlgebra::new(&a, coordinate_ring(&d));
        let s = match solve_mc_in(&fa, &d, 6).map_err(|e| e.to_string())? {
            McOutcome::Solved(s) => s,
            McOutcome::Obstructed(o) => return Err(format!("{}: obstruction at order {}", a.name(), o.order)),
        };
        let check = verify_solution(&fa, &s);
        ensure(check.passes(), || format!("{}: {check:?}", a.name()))?;
        ensure(fa.mc_residual(&s.gamma).is_zero(), || format!("{}: MC residual", a.name()))?;
        done.push(format!("{}({})", a.name(), a.dim()));
    }
    Ok(format!("verified {}; excluded by conditions: {}", done.join(" "), skipped.join(" ")))
}

fn run(a: &DgbvInstance) -> Result<PipelineRun, String> {
    run_pipeline(a, opts6()).map_err(|e| format!("{}: {e}", a.name()))
}

fn criterion_4() -> Outcome {
    let six = six_dim_example().unwrap();
    ensure(six.check_axioms().all_pass(), || "six-dim fails the axiom checker".into())?;
    let nonzero = (0..six.dim()).any(|i| (0..six.dim()).any(|j| !six.bracket_basis(i, j).is_zero()));
    ensure(nonzero, || "six-dim bracket vanishes".into())?;
    let mut out = Vec::new();
    for a in [exterior_model(2).unwrap(), exterior_model(4).unwrap(), six] {
        let r = run(&a)?;
        let res = check_wdvv(&r.potential, &r.metric.eta).map_err(|e| e.to_string())?;
        ensure(res.is_zero(), || format!("{}: {} failures, {:?}", a.name(), res.failures, res.first_failure))?;
        ensure(res.checked_through_order == 3, || format!("checked through {}", res.checked_through_order))?;
        out.push(a.name().to_string());
    }
    Ok(format!("residual 0 through order 3 on {}", out.join(", ")))
}

fn criterion_5() -> Outcome {
    let mut count = 0;
    for a in pipeline_instances() {
        let r = run(&a)?;
        let h = &r.decomposition.cohomology;
        let Some(u) = h.unit_index else { continue };
        let reps = &h.representatives;
        for i in 0..reps.len() {
            for j in 0..reps.len() {
                let eta = a.integrate(&a.multiply(&reps[i], &reps[j]).unwrap());
                let d3 = r.potential.third_derivative(u, i, j).truncate(3);
                let mut rest = d3.clone();
                let c = d3.constant_term();
                rest.add_term(r.ring.one(), -c.clone());
                ensure(c == eta && rest.is_zero(), || {
                    format!("{}: ∂0∂{i}∂{j}Φ = {d3}, η = {eta}", a.name())
                })?;
            }
        }
        let res = check_identity_axiom(&r.potential, &r.metric.eta, Some(u)).map_err(|e| e.to_string())?;
        ensure(res.is_zero(), || format!("{}: {:?}", a.name(), res.first_failure))?;
        count += 1;
    }
    Ok(format!("{count} unital instances"))
}

fn criterion_6() -> Outcome {
    let mut out = Vec::new();
    for (seed, a) in pipeline_instances().into_iter().enumerate() {
        let r = run(&a)?;
        let trials = cubic_trials(&a, &r, seed as u64, 20).map_err(|e| e.to_string())?;
        ensure(trials.len() == 20, || "wrong trial count".into())?;
        if let Some(t) = trials.iter().find(|t| !t.holds) {
            return Err(format!("{}: trial {} residual {:?}", a.name(), t.index, t.residual));
        }
        out.push(a.name().to_string());
    }
    Ok(format!("20/20 on {}", out.join(", ")))
}

fn criterion_7() -> Outcome {
    let mut out = Vec::new();
    for (seed, a) in pipeline_instances().into_iter().enumerate() {
        let r = run(&a)?;
        let trials = gauge_trials(&a, &r, 100 + seed as u64, 10).map_err(|e| e.to_string())?;
        if let Some(t) = trials.iter().find(|t| !t.holds) {
            return Err(format!("{}: trial {} residual {:?}", a.name(), t.index, t.residual));
        }
        out.push(a.name().to_string());
    }
    Ok(format!("10/10 on {}", out.join(", ")))
}

fn criterion_8() -> Outcome {
    let e = acyclic_extension().unwrap();
    let mut out = Vec::new();
    for a in [exterior_model(2).unwrap(), six_dim_example().unwrap()] {
        let a = Arc::new(a);
        let labels: Vec<String> = (0..a.dim()).rev().map(|i| format!("v{i:02}")).collect();
        let (_, perm) = relabel(&a, &labels).map_err(|e| e.to_string())?;
        let (_, incl) = unit_inclusion(&a, &e).map_err(|e| e.to_string())?;
        for (kind, m) in [("identity", DgbvMorphism::identity(a.clone())), ("permutation", perm), ("inclusion", incl)] {
            let c = compare_potentials(&m, 6).map_err(|e| e.to_string())?;
            ensure(c.residual.is_zero() && c.residual.order() == 6, || {
                format!("{} {kind}: residual {}", a.name(), c.residual)
            })?;
            ensure(c.eta_residual.is_zero(), || format!("{} {kind}: pairing differs", a.name()))?;
        }
        out.push(a.name().to_string());
    }
    Ok(format!("identity, permutation, inclusion on {}", out.join(", ")))
}

fn standard_omega(n: usize) -> PolyForm {
    let mut o = PolyForm::zero(n);
    for k in (0..n).step_by(2) {
        o = o.sum(&PolyForm::odd(n, k).wedge(&PolyForm::odd(n, k + 1)));
    }
    o
}

fn criterion_9() -> Outcome {
    let d = |n: usize, k: usize| PolyvectorField::odd(n, k);
    let y = |n: usize, k: usize| PolyvectorField::coordinate(n, k);
    let constant = d(4, 0).wedge(&d(4, 1)).sum(&d(4, 2).wedge(&d(4, 3)).scaled(&q(-3, 2)));
    let so3 = y(3, 2)
        .wedge(&d(3, 0).wedge(&d(3, 1)))
        .sum(&y(3, 0).wedge(&d(3, 1).wedge(&d(3, 2))))
        .sum(&y(3, 1).wedge(&d(3, 2).wedge(&d(3, 0))));
    let mut checked = 0usize;
    for w in [&constant, &so3] {
        ensure(schouten_bracket(w, w).map_err(|e| e.to_string())?.is_zero(), || format!("[w,w] ≠ 0 for {w}"))?;
        for phi in generators::<Forms>(w.dim(), 2) {
            let dl = koszul_delta(w, &phi).map_err(|e| e.to_string())?;
            ensure(koszul_delta(w, &dl).map_err(|e| e.to_string())?.is_zero(), || format!("Δ²({phi}) ≠ 0"))?;
            let comm = exterior_d(&dl).sum(&koszul_delta(w, &exterior_d(&phi)).map_err(|e| e.to_string())?);
            ensure(comm.is_zero(), || format!("[d,Δ]({phi}) = {comm}"))?;
            checked += 1;
        }
    }
    for n in [2usize, 4] {
        let s = sharp_flat(&standard_omega(n)).map_err(|e| e.to_string())?;
        let gens = generators::<Forms>(n, 2);
        let bad = d_versus_omega_bracket(&s, &gens).map_err(|e| e.to_string())?;
        ensure(bad.is_empty(), || format!("ℝ{n}: d ≠ [ω•·] at {}", bad[0].0))?;
        checked += gens.len();
    }
    Ok(format!("{checked} generator checks"))
}

/// `π_H(−½[Γ₁•Γ₁])` by direct expansion over pairs of classes; with `δ = 0`
/// every element is harmonic.
fn obstruction_oracle(a: &DgbvInstance, reps: &[Element]) -> BTreeMap<Vec<u32>, Element> {
    let r = reps.len();
    let deg = |e: &Element| e.degree_in(a.space()).unwrap() as i64;
    let mut out: BTreeMap<Vec<u32>, Element> = BTreeMap::new();
    for i in 0..r {
        for j in 0..r {
            // Γ₁ = Σ e_i ⊗ x^i with |x^i| = 2 − |e_i|
            let (pi, pj) = ((2 - deg(&reps[i])).rem_euclid(2), (2 - deg(&reps[j])).rem_euclid(2));
            if i == j && pi == 1 {
                continue;
            }
            let reorder = if i > j && pi == 1 && pj == 1 { -1 } else { 1 };
            let s = sign(pi * (deg(&reps[j]) - 1)) * Scalar::from_integer(reorder.into()) * q(-1, 2);
            let mut br = Element::zero();
            for (x, cx) in reps[i].terms() {
                for (yv, cy) in reps[j].terms() {
                    br.add_scaled(&bracket(a, x, yv), &(cx * cy));
                }
            }
            let mut exps = vec![0u32; r];
            exps[i] += 1;
            exps[j] += 1;
            out.entry(exps).or_insert_with(Element::zero).add_scaled(&br, &s);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn criterion_10() -> Outcome {
    let a = bv_toy_model(3).unwrap();
    let c = check_conditions(&a).map_err(|e| e.to_string())?;
    ensure(!c.condition_iii.holds(), || "toy model satisfies condition (iii)".into())?;
    let d = decomposition(&a).map_err(|e| e.to_string())?;
    let fa = FormalAlgebra::new(&a, coordinate_ring(&d));
    let o = match solve_mc_in(&fa, &d, 4).map_err(|e| e.to_string())? {
        McOutcome::Obstructed(o) => o,
        McOutcome::Solved(_) => return Err("solver returned a solution".into()),
    };
    ensure(o.order == 2, || format!("obstruction at order {}", o.order))?;
    let reps = d.harmonic();
    let got: BTreeMap<Vec<u32>, Element> = o
        .class
        .iter()
        .map(|(m, v): &(Monomial, Vec<Scalar>)| {
            let mut e = Element::zero();
            for (k, c) in v.iter().enumerate() {
                e.add_scaled(&reps[k], c);
            }
            (m.exponents().to_vec(), e)
        })
        .collect();
    let want = obstruction_oracle(&a, reps);
    ensure(!want.is_empty(), || "oracle class vanishes".into())?;
    ensure(got == want, || format!("solver class {got:?} differs from oracle {want:?}"))?;
    Ok(format!("order 2, {} monomials match", want.len()))
}

fn main() {
    type Criterion = (u32, &'static str, fn() -> Outcome, u64);
    let criteria: [Criterion; 10] = [
        (1, "axiom soundness of torus models", criterion_1, 15),
        (2, "GBV implies G-algebra on the toy model", criterion_2, 5),
        (3, "Maurer-Cartan correctness", criterion_3, 60),
        (4, "WDVV", criterion_4, 60),
        (5, "identity axiom", criterion_5, 10),
        (6, "cubic contraction identity", criterion_6, 30),
        (7, "gauge invariance", criterion_7, 60),
        (8, "quasi-isomorphism invariance", criterion_8, 60),
        (9, "geometry layer", criterion_9, 30),
        (10, "obstruction detection", criterion_10, 10),
    ];
    let mut failed = 0;
    for (n, name, f, budget) in criteria {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let dt = t.elapsed();
        let result = match result {
            Ok(_) if dt > Duration::from_secs(budget) => Err(format!("exceeded {budget} s budget")),
            r => r,
        };
        match result {
            Ok(detail) => println!("PASS criterion {n:>2} ({name}) [{dt:.2?}]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n:>2} ({name}) [{dt:.2?}]: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

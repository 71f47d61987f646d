use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_traits::Zero;
use serde_json::json;

use dgbv_core::dgbv::DgbvInstance;
use dgbv_core::error::Error;
use dgbv_core::formal::FormalAlgebra;
use dgbv_core::frobenius::{check_identity_axiom, check_wdvv, Residual};
use dgbv_core::geometry::{build_torus_model, PolyvectorField};
use dgbv_core::graded::{format_scalar, int, parse_scalar, Scalar};
use dgbv_core::homology::{check_conditions, check_integral, cohomology, decomposition, Differential};
use dgbv_core::io::{emit_instance, parse_instance, MorphismFile};
use dgbv_core::linalg::Matrix;
use dgbv_core::mc::{coordinate_ring, solve_mc_in, verify_solution, McOutcome};
use dgbv_core::morphism::{check_morphism, check_quasi_iso, compare_potentials};
use dgbv_core::pipeline::{cubic_trials, gauge_trials, run_pipeline, PipelineOptions, PipelineRun, Trial};

use crate::report::{CliError, CliResult, Report};

fn read_source(path: Option<&Path>) -> CliResult<(String, String)> {
    match path {
        None => read_stdin(),
        Some(p) if p == Path::new("-") => read_stdin(),
        Some(p) => std::fs::read_to_string(p)
            .map(|t| (p.display().to_string(), t))
            .map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
    }
}

fn read_stdin() -> CliResult<(String, String)> {
    let mut s = String::new();
    std::io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
    Ok(("<stdin>".into(), s))
}

fn input_error(source: &str, e: Error) -> CliError {
    CliError::Input(format!("{source}: {e}"))
}

pub fn load(path: Option<&Path>) -> CliResult<DgbvInstance> {
    let (name, text) = read_source(path)?;
    parse_instance(&text).map_err(|e| input_error(&name, e))
}

fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(format_scalar).collect()).collect()
}

fn combination(labels: &[String], v: &[Scalar]) -> String {
    let parts: Vec<String> = v
        .iter()
        .zip(labels)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, l)| format!("({})*{l}", format_scalar(c)))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

pub fn validate(path: Option<&Path>) -> CliResult<Report> {
    let a = load(path)?;
    let mut r = Report::new("validate");
    r.set("instance", a.name());
    let axioms = a.check_axioms();
    r.axioms("axioms", "axiom", &axioms);
    if let Some(f) = axioms.first_failure() {
        r.set("first_failure", &f.name);
        r.line(format!("first failing axiom: {}", f.name));
    }
    match check_integral(&a) {
        Ok(i) => {
            r.require(i.passes() && !i.degenerate);
            r.set("integral", &i);
            for c in &i.checks {
                r.line(format!("integral {}: {:?}", c.name, c.status).to_lowercase());
            }
            if i.degenerate {
                r.line("integral: degenerate");
            }
        }
        Err(e) => {
            r.fail();
            r.set("integral", json!({ "error": e.to_string() }));
            r.line(format!("integral: {e}"));
        }
    }
    match check_conditions(&a) {
        Ok(c) => {
            r.require(c.all_hold());
            r.line(format!("finite dimensional: yes ({} degrees)", c.ranks.len()));
            r.line(format!("integral nice: {} {}", c.nice, c.nice_detail).trim_end().to_string());
            r.line(format!("kernel inclusions quasi-isomorphic: {}", c.condition_iii.holds()));
            r.set("conditions", &c);
        }
        Err(e) => {
            r.fail();
            r.set("conditions", json!({ "error": e.to_string() }));
            r.line(format!("conditions: {e}"));
        }
    }
    Ok(r)
}

pub fn cohomology_cmd(path: Option<&Path>, which: Differential) -> CliResult<Report> {
    let a = load(path)?;
    let h = cohomology(&a, which)?;
    let mut r = Report::new("cohomology");
    r.set("instance", a.name());
    r.set("operator", which);
    r.set("betti", h.betti_list());
    let classes: Vec<_> = (0..h.dim())
        .map(|i| json!({ "class": h.labels[i], "degree": h.degrees[i], "representative": a.label_of(&h.representatives[i]) }))
        .collect();
    r.set("classes", classes);
    let betti: Vec<String> = h.betti_list().iter().map(|(d, b)| format!("b{d} = {b}")).collect();
    r.line(format!("operator: {which:?}").to_lowercase());
    r.line(format!("betti: {}", betti.join(", ")));
    for i in 0..h.dim() {
        r.line(format!("  {} (degree {}): {}", h.labels[i], h.degrees[i], a.label_of(&h.representatives[i])));
    }
    Ok(r)
}

fn preflight(a: &DgbvInstance, force: bool, r: &mut Report) -> CliResult<bool> {
    let axioms = a.check_axioms();
    if let Some(f) = axioms.first_failure() {
        r.line(format!("axiom {} fails", f.name));
        r.set("first_failure", &f.name);
        if !force {
            r.fail();
            return Ok(false);
        }
    }
    let c = check_conditions(a)?;
    if !c.all_hold() {
        r.line("conditions do not hold");
        r.set("conditions", &c);
        if !force {
            r.fail();
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn solve(path: Option<&Path>, order: u32, force: bool) -> CliResult<Report> {
    let a = load(path)?;
    let mut r = Report::new("solve");
    r.set("instance", a.name());
    r.set("order", order);
    if !preflight(&a, force, &mut r)? {
        return Ok(r);
    }
    let d = decomposition(&a)?;
    let fa = FormalAlgebra::new(&a, coordinate_ring(&d));
    match solve_mc_in(&fa, &d, order)? {
        McOutcome::Solved(s) => {
            let check = verify_solution(&fa, &s);
            r.require(check.passes());
            r.set("gamma", s.gamma.to_strings(&a));
            r.set("b", s.b.to_strings(&a));
            r.set("checks", &check);
            r.line(format!("Γ = {}", join_terms(&s.gamma.to_strings(&a))));
            r.line(format!("B = {}", join_terms(&s.b.to_strings(&a))));
            r.line(format!("verified: {}", check.passes()));
        }
        McOutcome::Obstructed(o) => {
            r.fail();
            let labels = &d.cohomology.labels;
            let class: Vec<(String, String)> = o
                .class
                .iter()
                .map(|(m, v)| (fa.ring().format_monomial(m), combination(labels, v)))
                .collect();
            r.line(format!("obstruction at order {}", o.order));
            for (m, c) in &class {
                r.line(format!("  {m}: {c}"));
            }
            r.set("obstruction", json!({ "order": o.order, "class": class }));
        }
    }
    Ok(r)
}

fn join_terms(terms: &[(String, String)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms.iter().map(|(m, c)| format!("({c})*{m}")).collect::<Vec<_>>().join(" + ")
}

fn pipeline(a: &DgbvInstance, order: u32, force: bool) -> CliResult<PipelineRun> {
    if order < 3 {
        return Err(CliError::Input(format!("--order must be at least 3, got {order}")));
    }
    let opts = PipelineOptions { order: order - 2, potential_order: order, force };
    Ok(run_pipeline(a, opts)?)
}

fn describe_potential(r: &mut Report, run: &PipelineRun) {
    let h = &run.decomposition.cohomology;
    let vars: Vec<_> = (0..h.dim())
        .map(|i| json!({ "name": run.ring.label(i), "degree": run.ring.degree(i), "class": h.labels[i] }))
        .collect();
    r.set("variables", vars);
    r.set("phi", run.potential.poly.to_strings());
    r.line(format!("Φ = {}", run.potential.poly));
}

pub fn potential_cmd(path: Option<&Path>, order: u32, force: bool) -> CliResult<Report> {
    let a = load(path)?;
    let run = pipeline(&a, order, force)?;
    let mut r = Report::new("potential");
    r.set("instance", a.name());
    r.set("order", order);
    describe_potential(&mut r, &run);
    Ok(r)
}

fn residual(r: &mut Report, key: &str, name: &str, res: &Residual) {
    r.require(res.is_zero());
    r.set(key, res);
    match &res.first_failure {
        None => r.line(format!("{name}: zero through order {}", res.checked_through_order)),
        Some((idx, s)) => r.line(format!("{name}: {} failures, first at {idx:?}: {s}", res.failures)),
    }
}

fn trials(r: &mut Report, key: &str, name: &str, ts: &[Trial]) {
    let failures = ts.iter().filter(|t| !t.holds).count();
    r.require(failures == 0);
    r.set(key, ts);
    r.line(format!("{name}: {}/{} trials hold", ts.len() - failures, ts.len()));
    if let Some(t) = ts.iter().find(|t| !t.holds) {
        r.line(format!("  trial {} ({}): {}", t.index, t.input, t.residual.as_deref().unwrap_or("")));
    }
}

pub fn wdvv(path: Option<&Path>, order: u32, seed: u64, n: usize, force: bool) -> CliResult<Report> {
    let a = load(path)?;
    let run = pipeline(&a, order, force)?;
    let mut r = Report::new("wdvv");
    r.set("instance", a.name());
    r.set("order", order);
    r.set("seed", seed);
    let eta = &run.metric.eta;
    residual(&mut r, "wdvv", "wdvv", &check_wdvv(&run.potential, eta)?);
    match check_identity_axiom(&run.potential, eta, run.decomposition.cohomology.unit_index) {
        Ok(res) => residual(&mut r, "identity", "identity axiom", &res),
        Err(Error::NoUnit) => {
            r.set("identity", "not_applicable");
            r.line("identity axiom: not applicable (no unit class)");
        }
        Err(e) => return Err(e.into()),
    }
    trials(&mut r, "cubic", "cubic identity", &cubic_trials(&a, &run, seed, n)?);
    Ok(r)
}

pub fn gauge_test(path: Option<&Path>, order: u32, seed: u64, n: usize, force: bool) -> CliResult<Report> {
    let a = load(path)?;
    let run = pipeline(&a, order, force)?;
    let mut r = Report::new("gauge-test");
    r.set("instance", a.name());
    r.set("order", order);
    r.set("seed", seed);
    trials(&mut r, "trials", "gauge invariance", &gauge_trials(&a, &run, seed, n)?);
    Ok(r)
}

/// `"1^2:3,3^4"`: comma-separated `i^j[:coefficient]`, indices from 1.
pub fn parse_poisson(spec: &str, n: usize) -> CliResult<PolyvectorField> {
    let bad = |m: String| CliError::Input(format!("--poisson: {m}"));
    let mut w = PolyvectorField::zero(n);
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (pair, coeff) = match part.split_once(':') {
            Some((p, c)) => (p, parse_scalar(c).map_err(|e| bad(e.to_string()))?),
            None => (part, int(1)),
        };
        let (i, j) = pair.split_once('^').ok_or_else(|| bad(format!("expected i^j, got {pair:?}")))?;
        let index = |s: &str| -> CliResult<usize> {
            let k: usize = s.trim().parse().map_err(|_| bad(format!("bad index {s:?}")))?;
            if k == 0 || k > n {
                return Err(bad(format!("index {k} not in 1..={n}")));
            }
            Ok(k - 1)
        };
        let (i, j) = (index(i)?, index(j)?);
        let term = PolyvectorField::odd(n, i).wedge(&PolyvectorField::odd(n, j));
        w.add_scaled(&term, &coeff);
    }
    Ok(w)
}

pub fn build_torus(dim: usize, poisson: Option<&str>) -> CliResult<String> {
    if !(1..=8).contains(&dim) {
        return Err(CliError::Input(format!("--dim must be in 1..=8, got {dim}")));
    }
    let w = poisson.map(|s| parse_poisson(s, dim)).transpose()?;
    let a = build_torus_model(dim, w.as_ref())?;
    Ok(emit_instance(&a))
}

pub fn compare(a: &Path, b: &Path, morphism: &Path, order: u32) -> CliResult<Report> {
    if order < 3 {
        return Err(CliError::Input(format!("--order must be at least 3, got {order}")));
    }
    let src = Arc::new(load(Some(a))?);
    let tgt = Arc::new(load(Some(b))?);
    let (name, text) = read_source(Some(morphism))?;
    let m = MorphismFile::parse(&text)
        .and_then(|f| f.to_morphism(src.clone(), tgt.clone()))
        .map_err(|e| input_error(&name, e))?;
    let mut r = Report::new("compare");
    r.set("source", src.name());
    r.set("target", tgt.name());
    r.set("order", order);
    r.axioms("morphism", "morphism", &check_morphism(&m));
    let q = check_quasi_iso(&m)?;
    r.require(q.is_quasi_iso());
    r.set("quasi_iso", json!({
        "delta": q.delta, "bv": q.bv, "induced_map": matrix_strings(&q.h_delta),
        "is_quasi_iso": q.is_quasi_iso(),
    }));
    r.line(format!(
        "H_delta: {} -> {} rank {}; H_bv: {} -> {} rank {}",
        q.delta.source_dim, q.delta.target_dim, q.delta.rank, q.bv.source_dim, q.bv.target_dim, q.bv.rank
    ));
    if !q.is_quasi_iso() {
        r.line("not a quasi-isomorphism; potentials not compared");
        return Ok(r);
    }
    let c = compare_potentials(&m, order)?;
    r.require(c.identified());
    r.set("potentials", json!({
        "residual": c.residual.to_strings(),
        "eta_residual_zero": c.eta_residual.is_zero(),
        "identified": c.identified(),
    }));
    r.line(format!("Φ_source − Φ_target∘H(f) = {}", c.residual));
    r.line(format!("pairing preserved: {}", c.eta_residual.is_zero()));
    Ok(r)
}

pub fn path_arg(p: &Option<PathBuf>) -> Option<&Path> {
    p.as_deref()
}

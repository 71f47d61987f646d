//! End-to-end run: checks, decomposition, Maurer-Cartan solution, potential.

use std::sync::Arc;

use crate::dgbv::{AxiomReport, DgbvInstance};
use crate::error::{Error, Result};
use crate::formal::FormalAlgebra;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::frobenius::{check_cubic_identity, potential, potential_of, Potential};
use crate::graded::{format_scalar, q, Scalar};
use crate::homology::{
    check_conditions, check_integral, decomposition, metric_eta, ConditionsReport, Decomposition,
    IntegralReport, Metric,
};
use crate::mc::{
    coordinate_ring, gauge_act, random_gauge_parameter, renormalize, solve_mc_in, McOutcome,
    NormalizedSolution,
};
use crate::poly::CoordinateRing;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Order of the Maurer-Cartan solution.
    pub order: u32,
    /// Truncation order `N_Φ` of the potential.
    pub potential_order: u32,
    /// Continue when axioms or conditions fail.
    pub force: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { order: 6, potential_order: 6, force: false }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub axioms: AxiomReport,
    pub integral: IntegralReport,
    pub conditions: ConditionsReport,
    pub decomposition: Decomposition,
    pub metric: Metric,
    pub ring: Arc<CoordinateRing>,
    pub solution: NormalizedSolution,
    pub potential: Potential,
}

impl PipelineRun {
    pub fn formal<'a>(&self, a: &'a DgbvInstance) -> FormalAlgebra<'a> {
        FormalAlgebra::new(a, self.ring.clone())
    }
}

pub fn run_pipeline(a: &DgbvInstance, opts: PipelineOptions) -> Result<PipelineRun> {
    let axioms = a.check_axioms();
    if !opts.force {
        if let Some(f) = axioms.first_failure() {
            return Err(Error::Pipeline(format!("axiom {} fails", f.name)));
        }
    }
    let integral = check_integral(a)?;
    let conditions = check_conditions(a)?;
    if !opts.force && !conditions.all_hold() {
        if !conditions.nice {
            return Err(Error::ConditionViolated(format!("integral not nice: {}", conditions.nice_detail)));
        }
        return Err(Error::ConditionViolated("inclusions of kernels are not quasi-isomorphisms".into()));
    }
    let d = decomposition(a)?;
    let metric = metric_eta(a, &d.cohomology)?;
    let ring = coordinate_ring(&d);
    let fa = FormalAlgebra::new(a, ring.clone());
    let order = opts.order.max(opts.potential_order.saturating_sub(2));
    let solution = match solve_mc_in(&fa, &d, order)? {
        McOutcome::Solved(s) => s,
        McOutcome::Obstructed(o) => {
            return Err(Error::Pipeline(format!("obstruction at order {}", o.order)));
        }
    };
    let potential = potential(&fa, &solution, opts.potential_order)?;
    Ok(PipelineRun { axioms, integral, conditions, decomposition: d, metric, ring, solution, potential })
}

/// Outcome of one seeded random trial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trial {
    pub index: usize,
    pub holds: bool,
    /// Tangent vector or gauge parameter size, for the report.
    pub input: String,
    /// Nonzero difference when the trial fails.
    pub residual: Option<String>,
}

/// Random tangent vector with zero components along odd directions.
pub fn random_even_vector<R: Rng>(ring: &crate::poly::CoordinateRing, rng: &mut R) -> Vec<Scalar> {
    (0..ring.len())
        .map(|k| if ring.is_odd(k) { Scalar::zero() } else { q(rng.gen_range(-5..=5), rng.gen_range(1..=4)) })
        .collect()
}

/// `X³Φ = ∫(XΓ)³` for `trials` seeded random even tangent vectors.
pub fn cubic_trials(a: &DgbvInstance, run: &PipelineRun, seed: u64, trials: usize) -> Result<Vec<Trial>> {
    let fa = run.formal(a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for index in 0..trials {
        let x = random_even_vector(fa.ring(), &mut rng);
        let (lhs, rhs) = check_cubic_identity(&fa, &run.solution, &run.potential, &x)?;
        let holds = lhs == rhs;
        let input = x.iter().map(format_scalar).collect::<Vec<_>>().join(",");
        out.push(Trial { index, holds, input, residual: (!holds).then(|| lhs.sub(&rhs).to_string()) });
    }
    Ok(out)
}

/// Potential after a gauge transformation by `g`, with `B` re-solved.
pub fn gauge_transformed_potential(
    a: &DgbvInstance,
    run: &PipelineRun,
    g: &crate::formal::FormalElement,
) -> Result<Potential> {
    let fa = run.formal(a);
    let n = run.solution.order;
    let moved = gauge_act(&fa, g, &run.solution.gamma, n)?;
    let b = renormalize(&fa, &moved, &run.solution.gamma1())?;
    potential_of(&fa, &moved, &b, run.potential.order)
}

/// `Φ(e^g·Γ) = Φ(Γ)` for `trials` seeded random admissible gauge parameters.
pub fn gauge_trials(a: &DgbvInstance, run: &PipelineRun, seed: u64, trials: usize) -> Result<Vec<Trial>> {
    let fa = run.formal(a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for index in 0..trials {
        let g = random_gauge_parameter(&fa, &mut rng, run.solution.order, 4);
        let p = gauge_transformed_potential(a, run, &g)?;
        let holds = p == run.potential;
        out.push(Trial {
            index,
            holds,
            input: format!("{} terms", g.len()),
            residual: (!holds).then(|| p.poly.sub(&run.potential.poly).to_string()),
        });
    }
    Ok(out)
}

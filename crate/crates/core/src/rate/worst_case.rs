//! Approximate infimum of the secrecy rate over the compound channel set.
//!
//! The search evaluates the analytic adversarial pair, a batch of random
//! members of the set, and then refines the best one by norm-preserving
//! rotations of each realization. The result upper-bounds the true infimum.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::secrecy_rate;
use crate::channel::{
    assumption1_vectors, independence_margin, sample_pair, worst_case_pair, CompoundPair,
    FadingModel, NormBounds,
};
use crate::error::param;
use crate::exec::{self, Execution};
use crate::precoding::PrecodingScheme;
use crate::seed::{derive_seed, tags};
use crate::Result;

const INITIAL_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-6;
const MIN_GAIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    pub n_random: usize,
    pub use_analytic: bool,
    pub n_descent: usize,
    /// Smallest admissible `sigma_r / sigma_1` of the vectors covered by the
    /// linear-independence condition. Random and refined candidates below it
    /// are discarded.
    pub independence_floor: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { n_random: 200, use_analytic: true, n_descent: 10, independence_floor: 1e-2 }
    }
}

impl SearchBudget {
    pub fn analytic_only() -> Self {
        Self { n_random: 0, use_analytic: true, n_descent: 0, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    Analytic,
    Random,
    Descent,
}

impl fmt::Display for CandidateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateKind::Analytic => "analytic",
            CandidateKind::Random => "random",
            CandidateKind::Descent => "descent",
        })
    }
}

#[derive(Debug, Clone)]
pub struct WorstCase {
    pub rate: f64,
    pub pair: CompoundPair,
    pub kind: CandidateKind,
    /// Rate at the analytic adversarial pair, when it was evaluated.
    pub analytic_rate: Option<f64>,
}

pub fn worst_case_secrecy_rate(
    scheme: &PrecodingScheme,
    model: FadingModel,
    total_power: f64,
    budget: &SearchBudget,
    seed: u64,
) -> Result<WorstCase> {
    worst_case_secrecy_rate_with(Execution::default(), scheme, model, total_power, budget, seed)
}

pub fn worst_case_secrecy_rate_with(
    exec: Execution,
    scheme: &PrecodingScheme,
    model: FadingModel,
    total_power: f64,
    budget: &SearchBudget,
    seed: u64,
) -> Result<WorstCase> {
    let canonical = model.canonical()?;
    if canonical.t_blocks() != scheme.t_blocks() {
        return Err(param(format!(
            "{model} spans {} blocks but the scheme spans {}",
            canonical.t_blocks(),
            scheme.t_blocks()
        )));
    }
    let m = scheme.m();
    let bounds = NormBounds::default();
    let admissible = |pair: &CompoundPair| {
        independence_margin(assumption1_vectors(pair, canonical)) >= budget.independence_floor
    };

    let mut candidates = Vec::with_capacity(budget.n_random + 1);
    if budget.use_analytic {
        candidates.push((CandidateKind::Analytic, worst_case_pair(canonical, m, bounds, seed)?));
    }
    for i in 0..budget.n_random as u64 {
        let pair = sample_pair(canonical, m, bounds, derive_seed(seed, tags::RANDOM_PAIR, i))?;
        if admissible(&pair) {
            candidates.push((CandidateKind::Random, pair));
        }
    }
    if candidates.is_empty() {
        return Err(param("worst-case search has no candidates; enable analytic pairs or random draws"));
    }

    let rates = exec::map_range(exec, candidates.len(), |i| {
        secrecy_rate(scheme, &candidates[i].1, total_power)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;

    let analytic_rate = budget.use_analytic.then(|| rates[0]);
    let best = (1..rates.len()).fold(0, |b, i| if rates[i] < rates[b] { i } else { b });
    let (kind, pair) = candidates.swap_remove(best);
    let start = WorstCase { rate: rates[best], pair, kind, analytic_rate };

    descend(start, scheme, total_power, budget, seed, admissible)
}

#[derive(Clone, Copy)]
enum Side {
    Legit,
    Eve,
}

fn descend(
    mut current: WorstCase,
    scheme: &PrecodingScheme,
    total_power: f64,
    budget: &SearchBudget,
    seed: u64,
    admissible: impl Fn(&CompoundPair) -> bool,
) -> Result<WorstCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, tags::DESCENT, 0));
    let mut step = INITIAL_STEP;
    for _ in 0..budget.n_descent {
        let mut gain = 0.0;
        for side in [Side::Legit, Side::Eve] {
            let count = match side {
                Side::Legit => current.pair.legit.realizations().len(),
                Side::Eve => current.pair.eve.realizations().len(),
            };
            for idx in 0..count {
                let dir_rng = ChaCha8Rng::seed_from_u64(rng.next_u64());
                for sign in [1.0, -1.0] {
                    let mut r = dir_rng.clone();
                    let mut pair = current.pair.clone();
                    match side {
                        Side::Legit => {
                            let v = pair.legit.realizations()[idx].rotated(sign * step, &mut r);
                            pair.legit = pair.legit.with_realization(idx, v);
                        }
                        Side::Eve => {
                            let v = pair.eve.realizations()[idx].rotated(sign * step, &mut r);
                            pair.eve = pair.eve.with_realization(idx, v);
                        }
                    }
                    if !admissible(&pair) {
                        continue;
                    }
                    let rate = secrecy_rate(scheme, &pair, total_power)?;
                    if rate < current.rate {
                        gain += current.rate - rate;
                        current.rate = rate;
                        current.pair = pair;
                        current.kind = CandidateKind::Descent;
                        break;
                    }
                }
            }
        }
        if gain == 0.0 {
            step *= 0.5;
            if step < MIN_STEP {
                break;
            }
        } else if gain < MIN_GAIN {
            break;
        }
    }
    Ok(current)
}

//! Secrecy degrees of freedom: exact formulas, converse counting and slope
//! estimation from simulated rate curves.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::channel::{
    worst_case_pair_different, worst_case_pair_offset, Canonical, ChannelVector, FadingModel,
};
use crate::error::param;
use crate::exec::{self, Execution};
use crate::precoding::{make_an_precoder, make_offset_scheme, make_repetition_precoder, PrecodingScheme, SchemeKind};
use crate::rate::{worst_case_secrecy_rate_with, CandidateKind, RatePoint, SearchBudget};
use crate::{Error, Result};

pub type Sdof = Ratio<i64>;

fn ratio(num: usize, den: usize) -> Sdof {
    Ratio::new(num as i64, den as i64)
}

pub fn to_f64(r: Sdof) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn check_antennas(m: usize) -> Result<()> {
    if m == 0 {
        return Err(param("M must be positive"));
    }
    Ok(())
}

/// Optimal s.d.o.f. of the model with `m` transmit antennas.
///
/// Different coherence with `T_max = q T_min`: `(min(M, q) - 1) / q`.
/// Offset: `min(delta, T - delta) / T`, which needs two linearly independent
/// eavesdropper vectors and therefore `M >= 2`; it is zero for `M = 1` and for
/// `delta = 0`.
pub fn theoretical_sdof(model: FadingModel, m: usize) -> Result<Sdof> {
    check_antennas(m)?;
    Ok(match model.canonical()? {
        Canonical::DifferentCoherence { q, .. } => ratio(m.min(q) - 1, q),
        Canonical::Offset { delta: 0, .. } => ratio(0, 1),
        Canonical::Offset { .. } if m == 1 => ratio(0, 1),
        Canonical::Offset { t, delta } => ratio(delta.min(t - delta), t),
    })
}

/// Best block size when `q` blocks are split into shorter staggered channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSizeChoice {
    pub value: Sdof,
    pub best_l: usize,
}

impl BlockSizeChoice {
    /// Validity condition of the value.
    pub const CONDITION: &'static str =
        "any l <= M of the eavesdropper vectors g_1..g_q are linearly independent";
}

/// `max_{2 <= l <= q} (1 - (q mod l)/q) (min(l, M) - 1)/l`, with ties broken
/// toward the smallest `l`. Valid under [`BlockSizeChoice::CONDITION`].
pub fn sdof_remark4(q: usize, m: usize) -> Result<BlockSizeChoice> {
    check_antennas(m)?;
    if q < 2 {
        return Err(param("block-size optimization needs q >= 2"));
    }
    let mut best = BlockSizeChoice { value: ratio(0, 1), best_l: 2 };
    for l in 2..=q {
        let used = ratio(q - q % l, q);
        let value = used * ratio(l.min(m) - 1, l);
        if value > best.value {
            best = BlockSizeChoice { value, best_l: l };
        }
    }
    Ok(best)
}

/// Upper bound `|T_c| / T`, with `|T_c|` counted as the number of blocks in
/// which the analytic adversarial pair (built on standard basis vectors)
/// gives the two receivers different channels.
pub fn converse_sdof_bound(model: FadingModel, m: usize) -> Result<Sdof> {
    check_antennas(m)?;
    let pair = match model.canonical()? {
        Canonical::DifferentCoherence { q, .. } => {
            let basis = (0..m.min(q)).map(|i| ChannelVector::basis(m, i)).collect::<Result<Vec<_>>>()?;
            worst_case_pair_different(q, m, &basis)?
        }
        // the set contains H = G
        Canonical::Offset { delta: 0, .. } => return Ok(ratio(0, 1)),
        Canonical::Offset { .. } if m == 1 => return Ok(ratio(0, 1)),
        Canonical::Offset { t, delta } => {
            worst_case_pair_offset(t, delta, ChannelVector::basis(m, 0)?, ChannelVector::basis(m, 1)?)?
        }
    };
    Ok(ratio(pair.differing_blocks().len(), pair.t_blocks()))
}

/// Upper bound when any `M` of `g_1..g_q` are linearly independent. Only
/// defined for `q = kM` with `k > 1`, where the bound is `k(M - 1)/q`.
pub fn converse_sdof_bound_strong(q: usize, m: usize) -> Result<Sdof> {
    check_antennas(m)?;
    if !q.is_multiple_of(m) || q / m < 2 {
        return Err(Error::OutOfScope(format!(
            "strong-independence bound is only known for q = kM with k > 1 (q = {q}, M = {m})"
        )));
    }
    Ok(ratio((q / m) * (m - 1), q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdofEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub fit_range: (f64, f64),
}

pub const DEFAULT_FIT_FRACTION: f64 = 0.5;
pub const DEFAULT_TOLERANCE: f64 = 0.05;

/// Least-squares slope of `[rate]_+` against `log2(power)` over the top
/// `fit_fraction` of the log-power range.
pub fn estimate_sdof(curve: &[RatePoint], fit_fraction: f64) -> Result<SdofEstimate> {
    if !(fit_fraction > 0.0 && fit_fraction <= 1.0) {
        return Err(param(format!("fit fraction must lie in (0, 1], got {fit_fraction}")));
    }
    let mut pts: Vec<(f64, f64, f64)> = curve
        .iter()
        .filter(|p| p.power > 1.0 && p.power.is_finite() && p.rate.is_finite())
        .map(|p| (p.power, p.power.log2(), p.rate.max(0.0)))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(param("rate curve has repeated powers"));
    }
    if pts.len() < 3 {
        return Err(param(format!("need at least 3 points with power > 1, got {}", pts.len())));
    }
    let (lo, hi) = (pts[0].1, pts[pts.len() - 1].1);
    let cut = hi - fit_fraction * (hi - lo) - 1e-12 * (hi - lo).max(1.0);
    let window: Vec<_> = pts.into_iter().filter(|p| p.1 >= cut).collect();
    if window.len() < 3 {
        return Err(param(format!(
            "fit window keeps {} points; at least 3 are needed (raise the fit fraction)",
            window.len()
        )));
    }
    let n = window.len() as f64;
    let mx = window.iter().map(|p| p.1).sum::<f64>() / n;
    let my = window.iter().map(|p| p.2).sum::<f64>() / n;
    let sxx: f64 = window.iter().map(|p| (p.1 - mx).powi(2)).sum();
    let sxy: f64 = window.iter().map(|p| (p.1 - mx) * (p.2 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_rms =
        (window.iter().map(|p| (p.2 - intercept - slope * p.1).powi(2)).sum::<f64>() / n).sqrt();
    Ok(SdofEstimate {
        slope,
        intercept,
        residual_rms,
        fit_range: (window[0].0, window[window.len() - 1].0),
    })
}

/// The scheme that achieves the optimal s.d.o.f. for a model, or the
/// requested kind sized for it.
pub fn select_scheme(
    model: FadingModel,
    m: usize,
    seed: u64,
    kind: Option<SchemeKind>,
) -> Result<PrecodingScheme> {
    let canonical = model.canonical()?;
    let t = canonical.t_blocks();
    let kind = kind.unwrap_or(match canonical {
        Canonical::DifferentCoherence { legit_faster: true, .. } => SchemeKind::Repetition,
        Canonical::DifferentCoherence { .. } => SchemeKind::ArtificialNoise,
        Canonical::Offset { delta: 0, .. } => SchemeKind::ArtificialNoise,
        Canonical::Offset { .. } => SchemeKind::OffsetInterleaved,
    });
    match kind {
        SchemeKind::ArtificialNoise => make_an_precoder(m, t, seed),
        SchemeKind::Repetition => make_repetition_precoder(m, t),
        SchemeKind::OffsetInterleaved => match canonical {
            Canonical::Offset { t, delta } if delta > 0 => make_offset_scheme(t, delta, m, seed),
            _ => Err(param(format!("offset-interleaved scheme does not apply to {model}"))),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub budget: SearchBudget,
    pub fit_fraction: f64,
    pub tolerance: f64,
    pub scheme: Option<SchemeKind>,
    pub execution: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            budget: SearchBudget::default(),
            fit_fraction: DEFAULT_FIT_FRACTION,
            tolerance: DEFAULT_TOLERANCE,
            scheme: None,
            execution: Execution::default(),
        }
    }
}

/// JSON verdict record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub model: String,
    pub m: usize,
    pub theory: f64,
    pub converse: f64,
    pub empirical_slope: f64,
    pub residual_rms: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub power: f64,
    pub rate: f64,
    pub kind: CandidateKind,
    pub analytic_rate: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Verification {
    pub verdict: VerdictRecord,
    pub theory: Sdof,
    pub converse: Sdof,
    pub estimate: SdofEstimate,
    pub scheme: SchemeKind,
    pub curve: Vec<SweepPoint>,
}

/// Sweep the worst-case secrecy rate of the model's scheme over the power
/// grid, fit the slope and compare it with the exact value and the converse.
pub fn verify_model(
    model: FadingModel,
    m: usize,
    power_grid: &[f64],
    seed: u64,
    opts: &VerifyOptions,
) -> Result<Verification> {
    let theory = theoretical_sdof(model, m)?;
    let converse = converse_sdof_bound(model, m)?;
    if power_grid.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
        return Err(param("power grid entries must be positive and finite"));
    }
    let (lo, hi) = power_grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &p| (a.min(p), b.max(p)));
    if power_grid.is_empty() || (hi / lo).log10() < 4.0 - 1e-9 {
        return Err(param("power grid must span at least 4 decades"));
    }
    let scheme = select_scheme(model, m, seed, opts.scheme)?;

    let curve = exec::map_range(opts.execution, power_grid.len(), |i| {
        let p = power_grid[i];
        worst_case_secrecy_rate_with(opts.execution, &scheme, model, p, &opts.budget, seed).map(|wc| {
            SweepPoint { power: p, rate: wc.rate, kind: wc.kind, analytic_rate: wc.analytic_rate }
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let points: Vec<RatePoint> = curve.iter().map(|p| RatePoint { power: p.power, rate: p.rate }).collect();
    let estimate = estimate_sdof(&points, opts.fit_fraction)?;
    let pass = (estimate.slope - to_f64(theory)).abs() <= opts.tolerance && theory == converse;
    Ok(Verification {
        verdict: VerdictRecord {
            model: model.to_string(),
            m,
            theory: to_f64(theory),
            converse: to_f64(converse),
            empirical_slope: estimate.slope,
            residual_rms: estimate.residual_rms,
            pass,
        },
        theory,
        converse,
        estimate,
        scheme: scheme.kind(),
        curve,
    })
}

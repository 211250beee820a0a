//! Compound channel sets of the staggered block-fading wiretap channel.
//!
//! A [`BlockChannel`] is the block-stacked realization of one receiver's
//! channel over `T` blocks: a `T x MT` block-diagonal matrix whose row `t`
//! carries one [`ChannelVector`]. Realizations are stored once and referenced
//! from an assignment map, so "the same vector in blocks 2..q" is explicit.

use std::fmt;
use std::num::NonZeroUsize;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::param;
use crate::linalg::{self, CMatrix, RANK_TOL};
use crate::seed::{derive_seed, tags};
use crate::{Error, Result};

/// Open interval `(min, max)` for channel vector norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBounds {
    min: f64,
    max: f64,
}

impl NormBounds {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && min < max && max.is_finite()) {
            return Err(param(format!(
                "norm bounds must satisfy 0 < min < max < inf, got ({min}, {max})"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn contains(&self, norm: f64) -> bool {
        self.min < norm && norm < self.max
    }
}

impl Default for NormBounds {
    fn default() -> Self {
        Self { min: 0.5, max: 2.0 }
    }
}

/// A `1 x M` channel row vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    coeffs: Vec<Complex64>,
}

impl ChannelVector {
    pub fn new(coeffs: Vec<Complex64>, bounds: NormBounds) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(param("channel vector needs at least one antenna"));
        }
        let v = Self { coeffs };
        if !bounds.contains(v.norm()) {
            return Err(param(format!(
                "channel norm {} outside ({}, {})",
                v.norm(),
                bounds.min,
                bounds.max
            )));
        }
        Ok(v)
    }

    /// Standard basis row `e_index` of length `m`.
    pub fn basis(m: usize, index: usize) -> Result<Self> {
        if index >= m {
            return Err(param(format!("basis index {index} out of range for M = {m}")));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m];
        coeffs[index] = Complex64::new(1.0, 0.0);
        Self::new(coeffs, NormBounds::default())
    }

    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rotate by `angle` towards a direction orthogonal to `self`, keeping the
    /// norm. For `M = 1` the rotation degenerates to a phase shift.
    pub(crate) fn rotated<R: Rng + ?Sized>(&self, angle: f64, rng: &mut R) -> Self {
        let m = self.m();
        if m == 1 {
            let phase = Complex64::from_polar(1.0, angle);
            return Self { coeffs: vec![self.coeffs[0] * phase] };
        }
        let norm = self.norm();
        let unit: Vec<Complex64> = self.coeffs.iter().map(|c| c / norm).collect();
        let mut dir: Vec<Complex64> = (0..m).map(|_| linalg::complex_gaussian(rng)).collect();
        let proj: Complex64 = unit.iter().zip(&dir).map(|(u, d)| u.conj() * d).sum();
        for (d, u) in dir.iter_mut().zip(&unit) {
            *d -= proj * u;
        }
        let dnorm = dir.iter().map(|d| d.norm_sqr()).sum::<f64>().sqrt();
        let (s, c) = angle.sin_cos();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&dir)
            .map(|(v, d)| v * c + d * (s * norm / dnorm))
            .collect();
        Self { coeffs }
    }
}

/// Draw a channel vector with isotropic direction and norm uniform in the
/// open bounds interval. Deterministic in `seed`.
pub fn sample_channel_vector(m: usize, bounds: NormBounds, seed: u64) -> Result<ChannelVector> {
    if m == 0 {
        return Err(param("M must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir: Vec<Complex64> = loop {
        let d: Vec<Complex64> = (0..m).map(|_| linalg::complex_gaussian(&mut rng)).collect();
        if d.iter().any(|c| c.norm_sqr() > 0.0) {
            break d;
        }
    };
    let dnorm = dir.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let target = loop {
        let r: f64 = rng.random_range(bounds.min..bounds.max);
        if r > bounds.min {
            break r;
        }
    };
    let coeffs: Vec<Complex64> = dir.iter().map(|c| c * (target / dnorm)).collect();
    // rescaling can land a hair outside a very tight interval; clamp the norm
    let v = ChannelVector { coeffs };
    if bounds.contains(v.norm()) {
        Ok(v)
    } else {
        let mid = 0.5 * (bounds.min + bounds.max);
        let n = v.norm();
        Ok(ChannelVector { coeffs: v.coeffs.iter().map(|c| c * (mid / n)).collect() })
    }
}

/// Coherence structure of the two receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FadingModel {
    /// Legitimate and eavesdropper channels stay constant for `t_r` and `t_e`
    /// blocks respectively, changing synchronously.
    DifferentCoherence { t_r: usize, t_e: usize },
    /// Both coherence intervals equal `t`; the eavesdropper changes `delta`
    /// blocks after the legitimate receiver.
    Offset { t: usize, delta: usize },
}

/// A fading model reduced to its simulation form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Canonical {
    /// `T = q` blocks. With `legit_faster == false` the legitimate channel is
    /// constant and the eavesdropper sees `q` realizations; otherwise the
    /// roles are reversed.
    DifferentCoherence { q: usize, legit_faster: bool },
    Offset { t: usize, delta: usize },
}

impl Canonical {
    pub fn t_blocks(&self) -> usize {
        match *self {
            Canonical::DifferentCoherence { q, .. } => q,
            Canonical::Offset { t, .. } => t,
        }
    }
}

impl FadingModel {
    pub fn different_coherence(t_r: usize, t_e: usize) -> Result<Self> {
        let model = FadingModel::DifferentCoherence { t_r, t_e };
        model.validate()?;
        Ok(model)
    }

    pub fn offset(t: usize, delta: usize) -> Result<Self> {
        let model = FadingModel::Offset { t, delta };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.canonical().map(|_| ())
    }

    /// Reduce to `T = q` (different coherence) or keep `(T, delta)` (offset).
    pub fn canonical(&self) -> Result<Canonical> {
        match *self {
            FadingModel::DifferentCoherence { t_r, t_e } => {
                if t_r == 0 || t_e == 0 {
                    return Err(param("coherence intervals must be positive"));
                }
                let (hi, lo) = (t_r.max(t_e), t_r.min(t_e));
                if hi % lo != 0 {
                    return Err(Error::OutOfScope(format!(
                        "coherence intervals ({t_r}, {t_e}) are not integer multiples; \
                         only T_max = q * T_min is supported"
                    )));
                }
                Ok(Canonical::DifferentCoherence { q: hi / lo, legit_faster: t_e > t_r })
            }
            FadingModel::Offset { t, delta } => {
                if t == 0 {
                    return Err(param("offset model needs T >= 1"));
                }
                if delta >= t {
                    return Err(param(format!("offset delta = {delta} must be < T = {t}")));
                }
                Ok(Canonical::Offset { t, delta })
            }
        }
    }
}

impl fmt::Display for FadingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FadingModel::DifferentCoherence { t_r, t_e } => {
                write!(f, "DifferentCoherence({t_r},{t_e})")
            }
            FadingModel::Offset { t, delta } => write!(f, "Offset({t},{delta})"),
        }
    }
}

/// Interleave `factor` copies of the model into one longer model.
pub fn interleave_expand(model: FadingModel, factor: NonZeroUsize) -> FadingModel {
    let k = factor.get();
    match model {
        FadingModel::DifferentCoherence { t_r, t_e } => {
            FadingModel::DifferentCoherence { t_r: k * t_r, t_e: k * t_e }
        }
        FadingModel::Offset { t, delta } => FadingModel::Offset { t: k * t, delta: k * delta },
    }
}

/// One receiver's channel over `T` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockChannel {
    m: usize,
    realizations: Vec<ChannelVector>,
    assignment: Vec<usize>,
}

impl BlockChannel {
    pub fn new(realizations: Vec<ChannelVector>, assignment: Vec<usize>) -> Result<Self> {
        let m = realizations
            .first()
            .map(ChannelVector::m)
            .ok_or_else(|| param("block channel needs at least one realization"))?;
        if realizations.iter().any(|v| v.m() != m) {
            return Err(param("realizations have different antenna counts"));
        }
        if assignment.is_empty() {
            return Err(param("block channel needs at least one block"));
        }
        if let Some(&bad) = assignment.iter().find(|&&i| i >= realizations.len()) {
            return Err(param(format!(
                "assignment index {bad} exceeds {} realizations",
                realizations.len()
            )));
        }
        Ok(Self { m, realizations, assignment })
    }

    /// `diag(v, ..., v)` over `t` blocks.
    pub fn constant(v: ChannelVector, t: usize) -> Result<Self> {
        Self::new(vec![v], vec![0; t])
    }

    pub fn t_blocks(&self) -> usize {
        self.assignment.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn realizations(&self) -> &[ChannelVector] {
        &self.realizations
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn block(&self, t: usize) -> &ChannelVector {
        &self.realizations[self.assignment[t]]
    }

    /// Dense `T x MT` block-diagonal matrix.
    pub fn dense(&self) -> CMatrix {
        let (t_blocks, m) = (self.t_blocks(), self.m);
        let mut out = CMatrix::zeros(t_blocks, m * t_blocks);
        for t in 0..t_blocks {
            for (j, c) in self.block(t).coeffs().iter().enumerate() {
                out[(t, t * m + j)] = *c;
            }
        }
        out
    }

    /// `T x M` matrix whose row `t` is the block-`t` vector.
    pub fn stacked_rows(&self) -> CMatrix {
        CMatrix::from_fn(self.t_blocks(), self.m, |t, j| self.block(t).coeffs()[j])
    }

    pub(crate) fn with_realization(&self, index: usize, v: ChannelVector) -> Self {
        let mut out = self.clone();
        out.realizations[index] = v;
        out
    }
}

/// A legitimate/eavesdropper channel pair `(H, G)` from the compound set.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundPair {
    pub legit: BlockChannel,
    pub eve: BlockChannel,
}

impl CompoundPair {
    pub fn new(legit: BlockChannel, eve: BlockChannel) -> Result<Self> {
        if legit.t_blocks() != eve.t_blocks() || legit.m() != eve.m() {
            return Err(param(format!(
                "legit is {}x{} blocks/antennas but eve is {}x{}",
                legit.t_blocks(),
                legit.m(),
                eve.t_blocks(),
                eve.m()
            )));
        }
        Ok(Self { legit, eve })
    }

    pub fn t_blocks(&self) -> usize {
        self.legit.t_blocks()
    }

    pub fn m(&self) -> usize {
        self.legit.m()
    }

    /// Blocks (0-based) in which the two receivers see different vectors.
    pub fn differing_blocks(&self) -> Vec<usize> {
        (0..self.t_blocks()).filter(|&t| self.legit.block(t) != self.eve.block(t)).collect()
    }

    pub fn swapped(self) -> Self {
        Self { legit: self.eve, eve: self.legit }
    }
}

/// Pair for the different-coherence model after reduction to `T = q`.
pub fn build_pair_different_coherence(
    q: usize,
    legit_faster: bool,
    h_realizations: Vec<ChannelVector>,
    g_realizations: Vec<ChannelVector>,
) -> Result<CompoundPair> {
    if q == 0 {
        return Err(param("q must be >= 1"));
    }
    let (n_h, n_g) = if legit_faster { (q, 1) } else { (1, q) };
    if h_realizations.len() != n_h || g_realizations.len() != n_g {
        return Err(param(format!(
            "expected {n_h} legitimate and {n_g} eavesdropper realizations, got {} and {}",
            h_realizations.len(),
            g_realizations.len()
        )));
    }
    let varying: Vec<usize> = (0..q).collect();
    let (ha, ga) = if legit_faster { (varying, vec![0; q]) } else { (vec![0; q], varying) };
    CompoundPair::new(BlockChannel::new(h_realizations, ha)?, BlockChannel::new(g_realizations, ga)?)
}

/// Offset-model pair: `H = diag(h x t)`, `G = diag(g1 x delta, g2 x (t - delta))`.
pub fn build_pair_offset(
    t: usize,
    delta: usize,
    h: ChannelVector,
    g1: ChannelVector,
    g2: ChannelVector,
) -> Result<CompoundPair> {
    if t < 2 || delta == 0 || delta >= t {
        return Err(param(format!("offset pair needs 0 < delta < T, got T = {t}, delta = {delta}")));
    }
    let ga = (0..t).map(|i| usize::from(i >= delta)).collect();
    CompoundPair::new(BlockChannel::constant(h, t)?, BlockChannel::new(vec![g1, g2], ga)?)
}

/// Outcome of the linear-independence check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankCheck {
    pub rank: usize,
    pub satisfied: bool,
}

fn stack(vectors: &[ChannelVector]) -> CMatrix {
    let m = vectors[0].m();
    CMatrix::from_fn(vectors.len(), m, |i, j| vectors[i].coeffs()[j])
}

/// Rank of the stacked `L x M` matrix; satisfied when it equals `min(M, L)`.
pub fn check_assumption1(vectors: &[ChannelVector], m: usize, tol: f64) -> Result<RankCheck> {
    if vectors.is_empty() {
        return Err(param("rank check needs at least one vector"));
    }
    if tol < 0.0 {
        return Err(param("rank tolerance must be non-negative"));
    }
    if let Some(v) = vectors.iter().find(|v| v.m() != m) {
        return Err(param(format!("vector of length {} in a rank check for M = {m}", v.m())));
    }
    let rank = linalg::numerical_rank(&stack(vectors), tol);
    Ok(RankCheck { rank, satisfied: rank == m.min(vectors.len()) })
}

/// `sigma_r / sigma_1` of the stacked vectors with `r = min(M, L)`; zero when
/// the set is rank deficient.
pub fn independence_margin(vectors: &[ChannelVector]) -> f64 {
    if vectors.is_empty() {
        return 0.0;
    }
    let sv = linalg::singular_values(&stack(vectors));
    let r = vectors[0].m().min(vectors.len());
    match (sv.first(), sv.get(r - 1)) {
        (Some(&top), Some(&low)) if top > 0.0 => low / top,
        _ => 0.0,
    }
}

/// Adversarial pair for `T_r = q T_e`: the legitimate receiver sees `g_r` in
/// every block and the eavesdropper `diag(g_1, ..., g_{r-1}, g_r, ..., g_r)`,
/// so blocks `r..q` are indistinguishable.
pub fn worst_case_pair_different(q: usize, m: usize, basis: &[ChannelVector]) -> Result<CompoundPair> {
    if q == 0 || m == 0 {
        return Err(param("q and M must be positive"));
    }
    let r = m.min(q);
    if basis.len() != r {
        return Err(param(format!("basis needs r = min(M, q) = {r} vectors, got {}", basis.len())));
    }
    let check = check_assumption1(basis, m, RANK_TOL)?;
    if !check.satisfied {
        return Err(Error::Precondition(format!(
            "basis has rank {} but r = {r} independent vectors are required",
            check.rank
        )));
    }
    let legit = BlockChannel::constant(basis[r - 1].clone(), q)?;
    let ga = (0..q).map(|t| t.min(r - 1)).collect();
    let eve = BlockChannel::new(basis.to_vec(), ga)?;
    CompoundPair::new(legit, eve)
}

/// Adversarial pair for the offset model: the legitimate receiver copies the
/// eavesdropper's longer segment, leaving `min(delta, T - delta)` differing
/// blocks.
pub fn worst_case_pair_offset(
    t: usize,
    delta: usize,
    g1: ChannelVector,
    g2: ChannelVector,
) -> Result<CompoundPair> {
    if t < 2 || delta == 0 || delta >= t {
        return Err(param(format!("offset pair needs 0 < delta < T, got T = {t}, delta = {delta}")));
    }
    let check = check_assumption1(&[g1.clone(), g2.clone()], g1.m(), RANK_TOL)?;
    if check.rank != 2 {
        return Err(Error::Precondition("g1 and g2 must be linearly independent".into()));
    }
    let h = if delta > t - delta { g1.clone() } else { g2.clone() };
    build_pair_offset(t, delta, h, g1, g2)
}

/// Uniformly random member of the compound set (the independence condition holds almost
/// surely under the sampling law).
pub fn sample_pair(model: Canonical, m: usize, bounds: NormBounds, seed: u64) -> Result<CompoundPair> {
    let draw = |i: u64| sample_channel_vector(m, bounds, derive_seed(seed, tags::RANDOM_PAIR, i));
    match model {
        Canonical::DifferentCoherence { q, legit_faster } => {
            let single = vec![draw(0)?];
            let many = (1..=q as u64).map(draw).collect::<Result<Vec<_>>>()?;
            if legit_faster {
                build_pair_different_coherence(q, true, many, single)
            } else {
                build_pair_different_coherence(q, false, single, many)
            }
        }
        Canonical::Offset { t, delta: 0 } => {
            CompoundPair::new(BlockChannel::constant(draw(0)?, t)?, BlockChannel::constant(draw(1)?, t)?)
        }
        Canonical::Offset { t, delta } => build_pair_offset(t, delta, draw(0)?, draw(1)?, draw(2)?),
    }
}

/// Analytic adversarial pair for any supported model, with a seeded basis.
///
/// Models where the compound set contains `H = G` (synchronous fading, or
/// the offset model with a single antenna) return that identical pair.
pub fn worst_case_pair(model: Canonical, m: usize, bounds: NormBounds, seed: u64) -> Result<CompoundPair> {
    let basis_vec = |i: u64| sample_channel_vector(m, bounds, derive_seed(seed, tags::ANALYTIC_BASIS, i));
    match model {
        Canonical::DifferentCoherence { q, legit_faster } => {
            let r = m.min(q);
            let basis = (0..r as u64).map(basis_vec).collect::<Result<Vec<_>>>()?;
            let pair = worst_case_pair_different(q, m, &basis)?;
            Ok(if legit_faster { pair.swapped() } else { pair })
        }
        Canonical::Offset { t, delta } if delta == 0 || m == 1 => {
            let g = BlockChannel::constant(basis_vec(0)?, t)?;
            CompoundPair::new(g.clone(), g)
        }
        Canonical::Offset { t, delta } => worst_case_pair_offset(t, delta, basis_vec(0)?, basis_vec(1)?),
    }
}

/// Realizations that must satisfy the linear-independence condition for the
/// model, i.e. those of the receiver that varies within one coherence window.
pub fn assumption1_vectors(pair: &CompoundPair, model: Canonical) -> &[ChannelVector] {
    match model {
        Canonical::DifferentCoherence { legit_faster: true, .. } => pair.legit.realizations(),
        Canonical::DifferentCoherence { legit_faster: false, .. } => pair.eve.realizations(),
        Canonical::Offset { .. } => pair.eve.realizations(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn vecs(m: usize, n: usize, seed: u64) -> Vec<ChannelVector> {
        (0..n)
            .map(|i| sample_channel_vector(m, NormBounds::default(), seed * 1000 + i as u64).unwrap())
            .collect()
    }

    #[test]
    fn sample_respects_bounds_and_seed() {
        let b = NormBounds::new(0.5, 2.0).unwrap();
        let v = sample_channel_vector(2, b, 7).unwrap();
        assert_eq!(v.m(), 2);
        assert!(b.contains(v.norm()));
        let tight = NormBounds::new(0.999, 1.001).unwrap();
        for seed in 0..50 {
            let s = sample_channel_vector(1, tight, seed).unwrap();
            assert!(tight.contains(s.norm()));
            assert!((s.norm() - 1.0).abs() < 1e-3);
        }
        assert_eq!(sample_channel_vector(3, b, 7).unwrap(), sample_channel_vector(3, b, 7).unwrap());
        assert_ne!(sample_channel_vector(3, b, 7).unwrap(), sample_channel_vector(3, b, 8).unwrap());
    }

    #[test]
    fn invalid_bounds_rejected() {
        assert!(matches!(NormBounds::new(0.0, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(NormBounds::new(2.0, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(NormBounds::new(1.0, 1.0), Err(Error::Parameter(_))));
        assert!(NormBounds::new(1.0, f64::INFINITY).is_err());
        assert!(sample_channel_vector(0, NormBounds::default(), 1).is_err());
    }

    #[test]
    fn different_coherence_pairs() {
        let v = vecs(2, 4, 1);
        let p = build_pair_different_coherence(2, false, vec![v[0].clone()], vec![v[1].clone(), v[2].clone()])
            .unwrap();
        assert_eq!(p.legit.assignment(), &[0, 0]);
        assert_eq!(p.eve.assignment(), &[0, 1]);
        assert_eq!(p.legit.block(1), &v[0]);
        assert_eq!(p.eve.block(1), &v[2]);

        let p1 = build_pair_different_coherence(1, false, vec![v[0].clone()], vec![v[1].clone()]).unwrap();
        assert_eq!(p1.t_blocks(), 1);

        let p3 = build_pair_different_coherence(3, true, v[0..3].to_vec(), vec![v[3].clone()]).unwrap();
        assert_eq!(p3.legit.assignment(), &[0, 1, 2]);
        assert_eq!(p3.eve.assignment(), &[0, 0, 0]);

        assert!(build_pair_different_coherence(2, false, v[0..2].to_vec(), v[2..4].to_vec()).is_err());
    }

    #[test]
    fn offset_pairs() {
        let v = vecs(2, 3, 2);
        let p = build_pair_offset(4, 1, v[0].clone(), v[1].clone(), v[2].clone()).unwrap();
        assert_eq!(p.eve.assignment(), &[0, 1, 1, 1]);
        assert_eq!(p.legit.assignment(), &[0, 0, 0, 0]);
        let p2 = build_pair_offset(2, 1, v[0].clone(), v[1].clone(), v[2].clone()).unwrap();
        assert_eq!(p2.eve.block(0), &v[1]);
        assert_eq!(p2.eve.block(1), &v[2]);
        assert!(matches!(
            build_pair_offset(4, 0, v[0].clone(), v[1].clone(), v[2].clone()),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn rank_check_examples() {
        let e1 = ChannelVector::basis(2, 0).unwrap();
        let e2 = ChannelVector::basis(2, 1).unwrap();
        assert_eq!(check_assumption1(&[e1.clone(), e2], 2, RANK_TOL).unwrap(), RankCheck { rank: 2, satisfied: true });
        let g = ChannelVector::new(vec![c(0.3, 0.4), c(-0.5, 0.2)], NormBounds::default()).unwrap();
        assert_eq!(check_assumption1(&[g.clone(), g], 2, RANK_TOL).unwrap(), RankCheck { rank: 1, satisfied: false });
        assert!(check_assumption1(&[], 2, RANK_TOL).is_err());
        assert!(check_assumption1(&[e1], 3, RANK_TOL).is_err());
    }

    #[test]
    fn worst_case_different_structure() {
        let b = vecs(3, 3, 3);
        let p = worst_case_pair_different(2, 2, &vecs(2, 2, 4)).unwrap();
        assert_eq!(p.legit.assignment(), &[0, 0]);
        assert_eq!(p.eve.assignment(), &[0, 1]);
        assert_eq!(p.differing_blocks(), vec![0]);

        let base = vecs(2, 2, 5);
        let p = worst_case_pair_different(3, 2, &base).unwrap();
        assert_eq!(p.eve.assignment(), &[0, 1, 1]);
        assert_eq!(p.legit.block(0), &base[1]);
        assert_eq!(p.differing_blocks(), vec![0]);

        let p = worst_case_pair_different(3, 3, &b).unwrap();
        assert_eq!(p.eve.assignment(), &[0, 1, 2]);
        assert_eq!(p.legit.block(2), &b[2]);
        assert_eq!(p.differing_blocks(), vec![0, 1]);

        let g = b[0].clone();
        assert!(matches!(
            worst_case_pair_different(2, 3, &[g.clone(), g]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn worst_case_offset_branches() {
        let v = vecs(2, 2, 6);
        let p = worst_case_pair_offset(4, 3, v[0].clone(), v[1].clone()).unwrap();
        assert_eq!(p.legit.block(0), &v[0]);
        assert_eq!(p.differing_blocks(), vec![3]);
        let p = worst_case_pair_offset(4, 1, v[0].clone(), v[1].clone()).unwrap();
        assert_eq!(p.legit.block(0), &v[1]);
        assert_eq!(p.differing_blocks(), vec![0]);
        let p = worst_case_pair_offset(2, 1, v[0].clone(), v[1].clone()).unwrap();
        assert_eq!(p.differing_blocks().len(), 1);
        assert!(matches!(
            worst_case_pair_offset(4, 1, v[0].clone(), v[0].clone()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn dense_matrix_is_block_diagonal() {
        let v = vecs(3, 2, 7);
        let ch = BlockChannel::new(v.clone(), vec![0, 1, 1]).unwrap();
        let d = ch.dense();
        assert_eq!((d.nrows(), d.ncols()), (3, 9));
        for t in 0..3 {
            for col in 0..9 {
                if col / 3 == t {
                    assert_eq!(d[(t, col)], ch.block(t).coeffs()[col % 3]);
                } else {
                    assert_eq!(d[(t, col)], c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn block_channel_validation() {
        let v = vecs(2, 1, 8);
        assert!(BlockChannel::new(v.clone(), vec![0, 1]).is_err());
        assert!(BlockChannel::new(v.clone(), vec![]).is_err());
        assert!(BlockChannel::new(vec![], vec![0]).is_err());
        let other = vecs(3, 1, 9);
        let a = BlockChannel::constant(v[0].clone(), 2).unwrap();
        let b = BlockChannel::constant(other[0].clone(), 2).unwrap();
        assert!(CompoundPair::new(a.clone(), b).is_err());
        let c3 = BlockChannel::constant(v[0].clone(), 3).unwrap();
        assert!(CompoundPair::new(a, c3).is_err());
    }

    #[test]
    fn model_canonical_forms() {
        assert_eq!(
            FadingModel::different_coherence(2, 1).unwrap().canonical().unwrap(),
            Canonical::DifferentCoherence { q: 2, legit_faster: false }
        );
        assert_eq!(
            FadingModel::different_coherence(2, 6).unwrap().canonical().unwrap(),
            Canonical::DifferentCoherence { q: 3, legit_faster: true }
        );
        assert!(matches!(FadingModel::different_coherence(2, 3), Err(Error::OutOfScope(_))));
        assert!(matches!(FadingModel::different_coherence(4, 6), Err(Error::OutOfScope(_))));
        assert!(FadingModel::different_coherence(0, 3).is_err());
        assert!(FadingModel::offset(4, 4).is_err());
        assert!(FadingModel::offset(4, 0).is_ok());
        assert_eq!(FadingModel::Offset { t: 4, delta: 1 }.to_string(), "Offset(4,1)");
    }

    #[test]
    fn interleaving_examples() {
        let k = |n| NonZeroUsize::new(n).unwrap();
        assert_eq!(
            interleave_expand(FadingModel::DifferentCoherence { t_r: 2, t_e: 1 }, k(3)),
            FadingModel::DifferentCoherence { t_r: 6, t_e: 3 }
        );
        assert_eq!(
            interleave_expand(FadingModel::Offset { t: 2, delta: 1 }, k(2)),
            FadingModel::Offset { t: 4, delta: 2 }
        );
        let m = FadingModel::Offset { t: 5, delta: 2 };
        assert_eq!(interleave_expand(m, k(1)), m);
    }

    #[test]
    fn rotation_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v = vecs(3, 1, 10).remove(0);
        let r = v.rotated(0.3, &mut rng);
        assert!((r.norm() - v.norm()).abs() < 1e-12);
        let cos = v
            .coeffs()
            .iter()
            .zip(r.coeffs())
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .re
            / v.norm_sqr();
        assert!((cos - 0.3_f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn analytic_pairs_for_degenerate_models() {
        let b = NormBounds::default();
        let p = worst_case_pair(Canonical::Offset { t: 3, delta: 0 }, 2, b, 1).unwrap();
        assert!(p.differing_blocks().is_empty());
        let p = worst_case_pair(Canonical::Offset { t: 4, delta: 1 }, 1, b, 1).unwrap();
        assert!(p.differing_blocks().is_empty());
        let p = worst_case_pair(Canonical::DifferentCoherence { q: 3, legit_faster: true }, 2, b, 1).unwrap();
        assert_eq!(p.legit.assignment(), &[0, 1, 1]);
        assert_eq!(p.eve.assignment(), &[0, 0, 0]);
        assert_eq!(p.differing_blocks(), vec![0]);
    }
}

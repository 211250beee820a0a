//! Linear transmit strategies over the `MT`-dimensional block-stacked input.
//!
//! Every scheme transmits `x = Phi v + N w` with independent Gaussian `v`
//! (signal streams) and `w` (artificial noise, possibly absent), each with
//! i.i.d. entries whose per-stream power is a fixed fraction of `P`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_channel_vector, BlockChannel, NormBounds};
use crate::error::param;
use crate::linalg::{self, CMatrix, RANK_TOL};
use crate::seed::{derive_seed, tags};
use crate::{Error, Result};

const RANK_PROBES: u64 = 20;
const MAX_ATTEMPTS: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    ArtificialNoise,
    Repetition,
    OffsetInterleaved,
}

/// Per-stream powers as fractions of the total power `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub signal: f64,
    pub noise: f64,
}

#[derive(Debug, Clone)]
pub struct PrecodingScheme {
    kind: SchemeKind,
    t_blocks: usize,
    m: usize,
    signal_precoder: CMatrix,
    noise_stack: Option<CMatrix>,
    power_split: PowerSplit,
    block_order: Vec<usize>,
    active_blocks: Vec<usize>,
    frame_seed: Option<u64>,
}

impl PrecodingScheme {
    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn t_blocks(&self) -> usize {
        self.t_blocks
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `MT x d` matrix with orthonormal columns.
    pub fn signal_precoder(&self) -> &CMatrix {
        &self.signal_precoder
    }

    pub fn noise_stack(&self) -> Option<&CMatrix> {
        self.noise_stack.as_ref()
    }

    pub fn power_split(&self) -> PowerSplit {
        self.power_split
    }

    pub fn streams(&self) -> usize {
        self.signal_precoder.ncols()
    }

    /// Interleaving permutation: position `k` of the interleaved channel is
    /// original block `block_order[k]`. Identity except for the offset scheme.
    pub fn block_order(&self) -> &[usize] {
        &self.block_order
    }

    /// Blocks that carry signal; the rest transmit exact zeros.
    pub fn active_blocks(&self) -> &[usize] {
        &self.active_blocks
    }

    /// Seed of the accepted random frame, if the scheme uses one.
    pub fn frame_seed(&self) -> Option<u64> {
        self.frame_seed
    }

    /// Check that a channel has the dimensions this scheme transmits over.
    pub fn check_compatible(&self, channel: &BlockChannel) -> Result<()> {
        if channel.m() != self.m || channel.t_blocks() != self.t_blocks {
            return Err(param(format!(
                "scheme is for T = {}, M = {} but channel has T = {}, M = {}",
                self.t_blocks,
                self.m,
                channel.t_blocks(),
                channel.m()
            )));
        }
        Ok(())
    }
}

fn frame_is_generic(phi: &CMatrix, m: usize, q: usize, seed: u64) -> Result<bool> {
    for i in 0..RANK_PROBES {
        let h = sample_channel_vector(m, NormBounds::default(), derive_seed(seed, tags::RANK_PROBE, i))?;
        let hphi = BlockChannel::constant(h, q)?.dense() * phi;
        if linalg::numerical_rank(&hphi, RANK_TOL) != q {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Artificial-noise scheme for `T = q`: a random `Mq x q` orthonormal frame
/// carries `q` streams and the same `M`-dimensional noise vector is sent in
/// every block, so it collapses to rank one at a receiver whose channel is
/// constant over the `q` blocks. Power `P / (M + 1)` per stream and per
/// noise dimension.
pub fn make_an_precoder(m: usize, q: usize, seed: u64) -> Result<PrecodingScheme> {
    if m == 0 || q == 0 {
        return Err(param("artificial-noise scheme needs M >= 1 and q >= 1"));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let s = seed.wrapping_add(attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let phi = linalg::random_orthonormal_frame(m * q, q, &mut rng);
        if !frame_is_generic(&phi, m, q, s)? {
            continue;
        }
        let p_tilde = 1.0 / (m as f64 + 1.0);
        return Ok(PrecodingScheme {
            kind: SchemeKind::ArtificialNoise,
            t_blocks: q,
            m,
            signal_precoder: phi,
            noise_stack: Some(linalg::identity_stack(m, q)),
            power_split: PowerSplit { signal: p_tilde, noise: p_tilde },
            block_order: (0..q).collect(),
            active_blocks: (0..q).collect(),
            frame_seed: Some(s),
        });
    }
    Err(Error::Precondition(format!(
        "no generic frame found for M = {m}, q = {q} after {MAX_ATTEMPTS} attempts from seed {seed}"
    )))
}

/// Repetition scheme for `T_e = q T_r`: the same `M` streams in every block.
/// The stack is normalized by `1/sqrt(q)` and each stream carries `P/M`, so
/// the transmit covariance has trace `P` over the `q` blocks.
pub fn make_repetition_precoder(m: usize, q: usize) -> Result<PrecodingScheme> {
    if m == 0 || q == 0 {
        return Err(param("repetition scheme needs M >= 1 and q >= 1"));
    }
    let phi = linalg::identity_stack(m, q) * Complex64::new(1.0 / (q as f64).sqrt(), 0.0);
    Ok(PrecodingScheme {
        kind: SchemeKind::Repetition,
        t_blocks: q,
        m,
        signal_precoder: phi,
        noise_stack: None,
        power_split: PowerSplit { signal: 1.0 / m as f64, noise: 0.0 },
        block_order: (0..q).collect(),
        active_blocks: (0..q).collect(),
        frame_seed: None,
    })
}

/// Offset-model scheme over `T = t` blocks.
///
/// With `s = min(delta, t - delta)`, the `2s` blocks around the
/// eavesdropper's channel change are paired (block `delta - s + i` with block
/// `delta + i`); each pair is a two-block channel that is constant for the
/// legitimate receiver and changes once for the eavesdropper, and carries its
/// own copy of the `q = 2` artificial-noise scheme. Other blocks are silent.
pub fn make_offset_scheme(t: usize, delta: usize, m: usize, seed: u64) -> Result<PrecodingScheme> {
    if m == 0 {
        return Err(param("M must be positive"));
    }
    if delta == 0 || delta >= t {
        return Err(param(format!("offset scheme needs 0 < delta < T, got T = {t}, delta = {delta}")));
    }
    let s = delta.min(t - delta);
    let an = make_an_precoder(m, 2, seed)?;
    let phi2 = an.signal_precoder();

    let mut phi = CMatrix::zeros(m * t, 2 * s);
    let mut noise = CMatrix::zeros(m * t, m * s);
    let mut order = Vec::with_capacity(t);
    let one = Complex64::new(1.0, 0.0);
    for k in 0..s {
        let blocks = [delta - s + k, delta + k];
        for (half, &b) in blocks.iter().enumerate() {
            for i in 0..m {
                for j in 0..2 {
                    phi[(b * m + i, 2 * k + j)] = phi2[(half * m + i, j)];
                }
                noise[(b * m + i, k * m + i)] = one;
            }
        }
        order.extend(blocks);
    }
    let mut active = order.clone();
    active.sort_unstable();
    order.extend((0..t).filter(|b| !active.contains(b)));

    Ok(PrecodingScheme {
        kind: SchemeKind::OffsetInterleaved,
        t_blocks: t,
        m,
        signal_precoder: phi,
        noise_stack: Some(noise),
        power_split: an.power_split(),
        block_order: order,
        active_blocks: active,
        frame_seed: an.frame_seed(),
    })
}

/// `E[x x^H]` at total power `P`.
pub fn transmit_covariance(scheme: &PrecodingScheme, total_power: f64) -> Result<CMatrix> {
    if total_power.is_nan() || total_power < 0.0 {
        return Err(param(format!("power must be non-negative, got {total_power}")));
    }
    let PowerSplit { signal, noise } = scheme.power_split;
    let phi = &scheme.signal_precoder;
    let mut cov = (phi * phi.adjoint()) * Complex64::new(signal * total_power, 0.0);
    if let Some(n) = &scheme.noise_stack {
        cov += (n * n.adjoint()) * Complex64::new(noise * total_power, 0.0);
    }
    Ok(cov)
}

//! Closed-form Gaussian mutual informations and secrecy rates.
//!
//! For a channel `A` (`T x MT`) and a scheme `x = Phi v + N w`, the received
//! covariance is `I + A K A^H` with `K = p_s Phi Phi^H + p_w N N^H`, and the
//! artificial noise alone contributes `p_w A N N^H A^H`. Then
//!
//! ```text
//! I(v; A x + n) = log2 det(I + A K A^H) - log2 det(I + p_w A N N^H A^H)
//! ```
//!
//! Both determinants are evaluated from singular values of the factors
//! `A Phi` and `A N`. All rates are in bits; secrecy rates are normalized per channel use.

mod oracle;
mod worst_case;

pub use oracle::{mc_mutual_information_oracle, mc_mutual_information_oracle_with};
pub use worst_case::{
    worst_case_secrecy_rate, worst_case_secrecy_rate_with, CandidateKind, SearchBudget, WorstCase,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{BlockChannel, CompoundPair};
use crate::error::param;
use crate::linalg::{log2_det_identity_plus_gram, CMatrix};
use crate::precoding::PrecodingScheme;
use crate::Result;

/// One point of a rate-versus-power curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub power: f64,
    pub rate: f64,
}

/// `I(v; y)` in bits for the given receiver channel.
pub fn mutual_information(scheme: &PrecodingScheme, channel: &BlockChannel, total_power: f64) -> Result<f64> {
    scheme.check_compatible(channel)?;
    if !total_power.is_finite() || total_power < 0.0 {
        return Err(param(format!("power must be finite and non-negative, got {total_power}")));
    }
    if total_power == 0.0 {
        return Ok(0.0);
    }
    let split = scheme.power_split();
    let a = channel.dense();
    let signal = &a * scheme.signal_precoder() * Complex64::new((split.signal * total_power).sqrt(), 0.0);
    let interference = match scheme.noise_stack() {
        Some(n) if split.noise > 0.0 => &a * n * Complex64::new((split.noise * total_power).sqrt(), 0.0),
        _ => CMatrix::zeros(a.nrows(), 0),
    };
    let mut both = CMatrix::zeros(a.nrows(), signal.ncols() + interference.ncols());
    both.columns_mut(0, signal.ncols()).copy_from(&signal);
    both.columns_mut(signal.ncols(), interference.ncols()).copy_from(&interference);
    let mi = log2_det_identity_plus_gram(&both)? - log2_det_identity_plus_gram(&interference)?;
    Ok(mi.max(0.0))
}

pub fn mi_legitimate(scheme: &PrecodingScheme, legit: &BlockChannel, total_power: f64) -> Result<f64> {
    mutual_information(scheme, legit, total_power)
}

pub fn mi_eavesdropper(scheme: &PrecodingScheme, eve: &BlockChannel, total_power: f64) -> Result<f64> {
    mutual_information(scheme, eve, total_power)
}

/// `(1/T) [I(v; y_H) - I(v; z_G)]`; negative values are returned as is.
pub fn secrecy_rate(scheme: &PrecodingScheme, pair: &CompoundPair, total_power: f64) -> Result<f64> {
    let legit = mi_legitimate(scheme, &pair.legit, total_power)?;
    let eve = mi_eavesdropper(scheme, &pair.eve, total_power)?;
    Ok((legit - eve) / pair.t_blocks() as f64)
}

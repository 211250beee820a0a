//! Monte Carlo cross-check of the closed-form mutual information.
//!
//! Transmissions are simulated symbol by symbol; the covariance of the
//! received vector and of the received vector with the signal part removed
//! are estimated from samples, and the Gaussian mutual information is the
//! difference of their log-determinants.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::BlockChannel;
use crate::error::param;
use crate::exec::{self, Execution};
use crate::linalg::{complex_gaussian, log2_det_hpd, CMatrix};
use crate::precoding::PrecodingScheme;
use crate::seed::{derive_seed, tags};
use crate::{Error, Result};

const MIN_SAMPLES: usize = 10_000;
const CHUNK: usize = 1 << 15;

/// Raw first and second moments of the received vectors.
#[derive(Clone)]
struct Moments {
    n: usize,
    sum_y: Vec<Complex64>,
    sum_yy: Vec<Complex64>,
    sum_e: Vec<Complex64>,
    sum_ee: Vec<Complex64>,
}

impl Moments {
    fn new(t: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self { n: 0, sum_y: vec![z; t], sum_yy: vec![z; t * t], sum_e: vec![z; t], sum_ee: vec![z; t * t] }
    }

    fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        for (a, b) in self.sum_y.iter_mut().zip(&other.sum_y) {
            *a += b;
        }
        for (a, b) in self.sum_yy.iter_mut().zip(&other.sum_yy) {
            *a += b;
        }
        for (a, b) in self.sum_e.iter_mut().zip(&other.sum_e) {
            *a += b;
        }
        for (a, b) in self.sum_ee.iter_mut().zip(&other.sum_ee) {
            *a += b;
        }
    }

    fn covariance(n: usize, sum: &[Complex64], sum_outer: &[Complex64]) -> CMatrix {
        let t = sum.len();
        let nf = n as f64;
        DMatrix::from_fn(t, t, |i, j| (sum_outer[i * t + j] - sum[i] * sum[j].conj() / nf) / (nf - 1.0))
    }
}

fn accumulate(out: &mut [Complex64], v: &[Complex64]) {
    let t = v.len();
    for i in 0..t {
        for j in 0..t {
            out[i * t + j] += v[i] * v[j].conj();
        }
    }
}

pub fn mc_mutual_information_oracle(
    scheme: &PrecodingScheme,
    channel: &BlockChannel,
    total_power: f64,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    mc_mutual_information_oracle_with(Execution::default(), scheme, channel, total_power, n_samples, seed)
}

pub fn mc_mutual_information_oracle_with(
    exec: Execution,
    scheme: &PrecodingScheme,
    channel: &BlockChannel,
    total_power: f64,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    scheme.check_compatible(channel)?;
    if n_samples < MIN_SAMPLES {
        return Err(param(format!("oracle needs at least {MIN_SAMPLES} samples, got {n_samples}")));
    }
    if total_power.is_nan() || total_power < 0.0 {
        return Err(param("power must be non-negative"));
    }
    let a = channel.dense();
    let t = a.nrows();
    let signal_gain = &a * scheme.signal_precoder();
    let noise_gain = match scheme.noise_stack() {
        Some(n) => &a * n,
        None => CMatrix::zeros(t, 0),
    };
    let split = scheme.power_split();
    let amp_v = (split.signal * total_power).sqrt();
    let amp_w = (split.noise * total_power).sqrt();
    let (d, k) = (signal_gain.ncols(), noise_gain.ncols());

    let chunks = n_samples.div_ceil(CHUNK);
    let partial = exec::map_range(exec, chunks, |c| {
        let len = CHUNK.min(n_samples - c * CHUNK);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, tags::ORACLE_CHUNK, c as u64));
        let mut mom = Moments::new(t);
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        let mut w = vec![Complex64::new(0.0, 0.0); k];
        let mut e = vec![Complex64::new(0.0, 0.0); t];
        let mut y = vec![Complex64::new(0.0, 0.0); t];
        for _ in 0..len {
            for x in v.iter_mut() {
                *x = complex_gaussian(&mut rng) * amp_v;
            }
            for x in w.iter_mut() {
                *x = complex_gaussian(&mut rng) * amp_w;
            }
            for i in 0..t {
                let mut interference = complex_gaussian(&mut rng);
                for (j, wj) in w.iter().enumerate() {
                    interference += noise_gain[(i, j)] * wj;
                }
                let mut sig = Complex64::new(0.0, 0.0);
                for (j, vj) in v.iter().enumerate() {
                    sig += signal_gain[(i, j)] * vj;
                }
                e[i] = interference;
                y[i] = interference + sig;
            }
            for i in 0..t {
                mom.sum_y[i] += y[i];
                mom.sum_e[i] += e[i];
            }
            accumulate(&mut mom.sum_yy, &y);
            accumulate(&mut mom.sum_ee, &e);
        }
        mom.n = len;
        mom
    });

    let mut total = Moments::new(t);
    for p in &partial {
        total.merge(p);
    }
    let cov_y = Moments::covariance(total.n, &total.sum_y, &total.sum_yy);
    let cov_e = Moments::covariance(total.n, &total.sum_e, &total.sum_ee);
    let singular = |_| Error::Precondition(format!("sample covariance is singular with {n_samples} samples; increase n_samples"));
    let hy = log2_det_hpd(&cov_y).map_err(singular)?;
    let he = log2_det_hpd(&cov_e).map_err(singular)?;
    Ok(hy - he)
}

//! Planned forward/inverse discrete Fourier transforms of arbitrary length,
//! with the round-trip accuracy instrumentation the Kummer pipeline relies
//! on.
//!
//! Conventions (fixed once for the whole crate):
//!
//! ```text
//! forward:  X_j = sum_k u_k e(-jk/N)      inverse:  (1/N) sum_k u_k e(+jk/N)
//! ```
//!
//! with `e(x) = exp(2 pi i x)`. The inverse is evaluated as
//! `conj(forward(conj(u)))/N`, so both directions share one code path.
//!
//! The error model: a transform of length N computed in precision with unit
//! roundoff eps has root-mean-square relative error below
//! `Delta = 0.6 eps sqrt(log2 N)`, and a forward/inverse round trip satisfies
//! `E_2 < Delta (2 + Delta) ||u||_2`. [`DftPlan::roundtrip_report`] measures
//! both sides of that inequality.

#[cfg(target_arch = "x86_64")]
mod avx;
mod chirp;
mod dd;
mod stockham;
mod trig;

use std::fmt;

use num_complex::Complex64;

use chirp::ChirpPlan;
use stockham::StageTables;

/// Default ceiling on a single plan's working memory.
pub const DEFAULT_MEM_LIMIT: u64 = 6 << 30;

/// How a plan evaluates its transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Decimation in frequency over the (<= 61)-smooth factorization.
    MixedRadix,
    /// Bluestein chirp convolution through a power-of-two inner transform.
    ChirpConvolution,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanError {
    /// Transform length must be at least 1.
    InvalidLength(usize),
    /// The plan would exceed the memory ceiling.
    ResourceLimit { required_bytes: u64, limit_bytes: u64 },
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::InvalidLength(n) => write!(f, "invalid transform length {n}"),
            PlanError::ResourceLimit { required_bytes, limit_bytes } => write!(
                f,
                "plan needs about {required_bytes} bytes, above the {limit_bytes}-byte ceiling"
            ),
        }
    }
}

impl std::error::Error for PlanError {}

#[derive(Debug, Clone, PartialEq)]
pub enum DftError {
    /// Input length does not match the plan length.
    LengthMismatch { plan: usize, input: usize },
}

impl fmt::Display for DftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DftError::LengthMismatch { plan, input } => {
                write!(f, "plan length {plan} does not match input length {input}")
            }
        }
    }
}

impl std::error::Error for DftError {}

/// Unit roundoff of the arithmetic this build actually runs on: 2^-53 for
/// IEEE 754 binary64. Kept as a function so the accuracy reports stay honest
/// if the base precision ever changes.
#[inline]
pub fn unit_roundoff() -> f64 {
    f64::EPSILON / 2.0
}

/// Predicted working-set size for a length-`n` plan, in bytes, without
/// building anything.
pub fn plan_memory_estimate(n: usize) -> u64 {
    if n <= 1 {
        return 0;
    }
    if stockham::radix_schedule(n).is_some() {
        4 * n as u64 * 16
    } else {
        let m = ChirpPlan::inner_len_for(n) as u64;
        (4 * m + n as u64) * 16
    }
}

/// RMS relative error bound `Delta = 0.6 eps sqrt(log2 N)` for one transform
/// of length `n` at unit roundoff `eps`.
pub fn delta_bound(n: usize, eps: f64) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    0.6 * eps * ((n as f64).ln() / std::f64::consts::LN_2).sqrt()
}

/// Predicted and measured round-trip errors for one input sequence.
#[derive(Debug, Clone, Copy)]
pub struct AccuracyReport {
    pub n: usize,
    /// Unit roundoff used in the prediction.
    pub epsilon: f64,
    /// RMS relative bound Delta for a single transform.
    pub delta: f64,
    pub l2_input_norm: f64,
    pub linf_input_norm: f64,
    /// Delta (2 + Delta) ||u||_2.
    pub predicted_e2: f64,
    /// Delta (2 + Delta) sqrt(N) ||u||_inf.
    pub predicted_einf: f64,
    /// ||inverse(forward(u)) - u||_2.
    pub measured_e2: f64,
    /// Same in the sup norm.
    pub measured_einf: f64,
}

#[derive(Clone)]
enum Kernel {
    Identity,
    Mixed { tables: StageTables },
    Chirp(ChirpPlan),
}

/// A reusable transform descriptor for one fixed length.
///
/// The twiddle tables are immutable and shared; the scratch buffers are not.
/// Workers that transform concurrently should clone the plan (cheap for the
/// chirp strategy, whose inner tables sit behind an `Arc`).
pub struct DftPlan {
    n: usize,
    strategy: Strategy,
    kernel: Kernel,
    scratch_a: Vec<Complex64>,
    scratch_b: Vec<Complex64>,
}

impl DftPlan {
    /// Plans a length-`n` transform under the default memory ceiling.
    pub fn new(n: usize) -> Result<Self, PlanError> {
        Self::with_mem_limit(n, DEFAULT_MEM_LIMIT)
    }

    /// Plans a length-`n` transform, failing fast (with the predicted
    /// allocation size) if the working set would exceed `limit_bytes`.
    pub fn with_mem_limit(n: usize, limit_bytes: u64) -> Result<Self, PlanError> {
        if n == 0 {
            return Err(PlanError::InvalidLength(0));
        }
        if n == 1 {
            return Ok(Self {
                n,
                strategy: Strategy::MixedRadix,
                kernel: Kernel::Identity,
                scratch_a: Vec::new(),
                scratch_b: Vec::new(),
            });
        }
        let required = plan_memory_estimate(n);
        if required > limit_bytes {
            return Err(PlanError::ResourceLimit { required_bytes: required, limit_bytes });
        }
        let smooth = stockham::radix_schedule(n).is_some();
        if smooth {
            Ok(Self {
                n,
                strategy: Strategy::MixedRadix,
                kernel: Kernel::Mixed { tables: StageTables::build(n, false) },
                scratch_a: Vec::new(),
                scratch_b: Vec::new(),
            })
        } else {
            Ok(Self {
                n,
                strategy: Strategy::ChirpConvolution,
                kernel: Kernel::Chirp(ChirpPlan::new(n)),
                scratch_a: Vec::new(),
                scratch_b: Vec::new(),
            })
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Length of the inner power-of-two transform (chirp strategy only).
    pub fn inner_len(&self) -> Option<usize> {
        match &self.kernel {
            Kernel::Chirp(c) => Some(c.inner_len()),
            _ => None,
        }
    }

    /// Approximate working-set size in bytes.
    pub fn heap_bytes(&self) -> u64 {
        match &self.kernel {
            Kernel::Identity => 0,
            Kernel::Mixed { tables } => tables.table_bytes() + 2 * self.n as u64 * 16,
            Kernel::Chirp(c) => c.heap_bytes(),
        }
    }

    /// Forward transform; the input is left unmodified.
    pub fn forward(&mut self, input: &[Complex64]) -> Result<Vec<Complex64>, DftError> {
        self.check_len(input)?;
        let mut out = Vec::new();
        self.forward_into(input, &mut out);
        Ok(out)
    }

    /// Inverse transform with 1/N normalization.
    pub fn inverse(&mut self, input: &[Complex64]) -> Result<Vec<Complex64>, DftError> {
        self.check_len(input)?;
        let conj: Vec<Complex64> = input.iter().map(|z| z.conj()).collect();
        let mut out = Vec::new();
        self.forward_into(&conj, &mut out);
        let scale = 1.0 / self.n as f64;
        for z in &mut out {
            *z = Complex64::new(z.re * scale, -z.im * scale);
        }
        Ok(out)
    }

    /// Runs forward then inverse and fills in the full error report, with
    /// Delta evaluated at this build's unit roundoff.
    pub fn roundtrip_report(&mut self, input: &[Complex64]) -> Result<AccuracyReport, DftError> {
        let spectrum = self.forward(input)?;
        let back = self.inverse(&spectrum)?;
        let eps = unit_roundoff();
        let delta = delta_bound(self.n, eps);
        let l2: f64 = crate::sum::compensated(input.iter().map(|z| z.norm_sqr())).sqrt();
        let linf = input.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        let mut e2 = crate::sum::NeumaierSum::new();
        let mut einf = 0.0f64;
        for (u, v) in input.iter().zip(&back) {
            let d = (u - v).norm_sqr();
            e2.add(d);
            einf = einf.max(d.sqrt());
        }
        Ok(AccuracyReport {
            n: self.n,
            epsilon: eps,
            delta,
            l2_input_norm: l2,
            linf_input_norm: linf,
            predicted_e2: delta * (2.0 + delta) * l2,
            predicted_einf: delta * (2.0 + delta) * (self.n as f64).sqrt() * linf,
            measured_e2: e2.value().sqrt(),
            measured_einf: einf,
        })
    }

    fn check_len(&self, input: &[Complex64]) -> Result<(), DftError> {
        if input.len() != self.n {
            return Err(DftError::LengthMismatch { plan: self.n, input: input.len() });
        }
        Ok(())
    }

    fn forward_into(&mut self, input: &[Complex64], out: &mut Vec<Complex64>) {
        match &self.kernel {
            Kernel::Identity => {
                out.clear();
                out.extend_from_slice(input);
            }
            Kernel::Mixed { tables } => {
                out.clear();
                out.extend_from_slice(input);
                self.scratch_a.clear();
                self.scratch_a.resize(self.n, Complex64::new(0.0, 0.0));
                tables.forward(out, &mut self.scratch_a);
            }
            Kernel::Chirp(c) => {
                c.forward(input, out, &mut self.scratch_a, &mut self.scratch_b);
            }
        }
    }
}

impl Clone for DftPlan {
    fn clone(&self) -> Self {
        // Twiddle tables stay shared behind their Arc; each clone gets its
        // own scratch, per the concurrency contract.
        DftPlan {
            n: self.n,
            strategy: self.strategy,
            kernel: self.kernel.clone(),
            scratch_a: Vec::new(),
            scratch_b: Vec::new(),
        }
    }
}

/// `e(num/den) = exp(2 pi i num/den)` by exact rational argument reduction.
///
/// The quadrant index and in-quadrant remainder are computed in integer
/// arithmetic, the remaining angle is carried in double-double, and the
/// sin/cos pair gets a first-order correction from the low word. Twiddles
/// built this way stay within about half an ulp of the unit circle, which
/// the transform error model assumes.
pub fn cis_frac(num: u64, den: u64) -> Complex64 {
    debug_assert!(den > 0);
    let num = num % den;
    let four = 4u128 * num as u128;
    let quadrant = (four / den as u128) as u32;
    let t = (four - quadrant as u128 * den as u128) as f64;
    let den_f = den as f64;
    // frac = t/den as hi + lo
    let frac = t / den_f;
    let (p, p_err) = dd::two_prod(frac, den_f);
    let frac_lo = ((t - p) - p_err) / den_f;
    // phi = (pi/2) * frac in double-double; PI2_LO is the f64 residual of pi/2.
    const PI2_LO: f64 = 6.123233995736766e-17;
    let (phi, phi_err) = dd::two_prod(std::f64::consts::FRAC_PI_2, frac);
    let corr = phi_err + PI2_LO * frac + std::f64::consts::FRAC_PI_2 * frac_lo;
    let (s, c) = phi.sin_cos();
    let (s, c) = (s + corr * c, c - corr * s);
    match quadrant {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

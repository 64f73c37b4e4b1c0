//! Bluestein chirp-convolution transform: an arbitrary-length DFT rewritten
//! as a cyclic convolution carried by a power-of-two transform of length
//! m = 2^ceil(log2(2n-1)). Quadratic phases e(-k^2/(2n)) are produced from
//! the exact residue k^2 mod 2n, so the chirp never drifts.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::cis_frac;
use super::dd::{two_prod, two_sum};
use super::stockham::StageTables;
use super::trig::{cis_frac_dd, dd_fft_pow2, DdComplex};

/// Largest inner length whose filter spectrum is computed in double-double.
/// Above this the one-time setup cost would dominate the per-transform work,
/// so the spectrum comes from the working-precision transform instead (and
/// measured round-trip errors can run ~20% past the single-transform model,
/// in line with published FFT library behavior at such sizes).
const DD_FILTER_MAX: usize = 1 << 17;

/// Complex product with compensated rounding: each component suffers a single
/// final rounding. Used on the fallback path; with FMA the hardware kernels
/// are accurate enough on their own.
#[inline(always)]
fn cmul_compensated(a: Complex64, b: Complex64) -> Complex64 {
    let (p1, e1) = two_prod(a.re, b.re);
    let (p2, e2) = two_prod(a.im, b.im);
    let (p3, e3) = two_prod(a.re, b.im);
    let (p4, e4) = two_prod(a.im, b.re);
    let (sre, ere) = two_sum(p1, -p2);
    let (sim, eim) = two_sum(p3, p4);
    Complex64::new(sre + (ere + (e1 - e2)), sim + (eim + (e3 + e4)))
}

/// Power-of-two stage tables are shared process-wide: a scan touches the same
/// few inner lengths for thousands of plans.
fn pow2_tables(m: usize) -> Arc<StageTables> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<StageTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("pow2 table cache poisoned");
    guard
        .entry(m)
        .or_insert_with(|| Arc::new(StageTables::build(m, true)))
        .clone()
}

#[derive(Clone)]
pub(crate) struct ChirpPlan {
    n: usize,
    m: usize,
    tables: Arc<StageTables>,
    /// w[k] = e(-k^2/(2n)), k = 0..n-1.
    chirp: Vec<Complex64>,
    /// Forward transform of the wrapped conjugate chirp filter.
    filter_hat: Vec<Complex64>,
}

impl ChirpPlan {
    pub(crate) fn inner_len_for(n: usize) -> usize {
        (2 * n - 1).next_power_of_two()
    }

    pub(crate) fn new(n: usize) -> Self {
        assert!(n >= 2);
        let m = Self::inner_len_for(n);
        let tables = pow2_tables(m);
        let two_n = 2 * n as u128;
        let mut chirp = Vec::with_capacity(n);
        for k in 0..n as u128 {
            let residue = (k * k % two_n) as u64;
            chirp.push(cis_frac(residue, two_n as u64).conj());
        }
        let filter_hat = if m <= DD_FILTER_MAX {
            let mut filter = vec![DdComplex::ZERO; m];
            filter[0] = cis_frac_dd(0, two_n as u64);
            for k in 1..n as u128 {
                let residue = (k * k % two_n) as u64;
                let b = cis_frac_dd(residue, two_n as u64);
                filter[k as usize] = b;
                filter[m - k as usize] = b;
            }
            dd_fft_pow2(&mut filter);
            filter.iter().map(|z| Complex64::new(z.re.to_f64(), z.im.to_f64())).collect()
        } else {
            let mut filter = vec![Complex64::new(0.0, 0.0); m];
            filter[0] = chirp[0].conj();
            for k in 1..n {
                let b = chirp[k].conj();
                filter[k] = b;
                filter[m - k] = b;
            }
            let mut tmp = vec![Complex64::new(0.0, 0.0); m];
            tables.forward(&mut filter, &mut tmp);
            filter
        };
        Self { n, m, tables, chirp, filter_hat }
    }

    pub(crate) fn inner_len(&self) -> usize {
        self.m
    }

    pub(crate) fn heap_bytes(&self) -> u64 {
        // chirp + filter_hat + two scratch buffers during execution,
        // plus the shared stage tables.
        (self.n as u64 + 3 * self.m as u64) * 16 + self.tables.table_bytes()
    }

    /// Forward DFT of `input` (length n) into `out`. `a` and `b` are
    /// m-length scratch buffers.
    pub(crate) fn forward(
        &self,
        input: &[Complex64],
        out: &mut Vec<Complex64>,
        a: &mut Vec<Complex64>,
        b: &mut Vec<Complex64>,
    ) {
        let m = self.m;
        a.clear();
        a.resize(m, Complex64::new(0.0, 0.0));
        b.clear();
        b.resize(m, Complex64::new(0.0, 0.0));
        let scale = 1.0 / m as f64; // exact: m is a power of two
        #[cfg(target_arch = "x86_64")]
        let use_avx = super::avx::available();
        #[cfg(not(target_arch = "x86_64"))]
        let use_avx = false;
        if use_avx {
            #[cfg(target_arch = "x86_64")]
            unsafe {
                super::avx::chirp_premul(input, &self.chirp, a);
                self.tables.forward(a, b);
                super::avx::chirp_filter(a, &self.filter_hat, scale);
                self.tables.forward(a, b);
                out.clear();
                out.resize(self.n, Complex64::new(0.0, 0.0));
                super::avx::chirp_postmul(a, &self.chirp, out, self.n);
            }
        } else {
            for k in 0..self.n {
                a[k] = cmul_compensated(input[k], self.chirp[k]);
            }
            self.tables.forward(a, b);
            for (x, h) in a.iter_mut().zip(&self.filter_hat) {
                // conj(x*h) folded into the inverse-by-conjugation pass below
                let prod = cmul_compensated(*x, *h);
                *x = Complex64::new(prod.re * scale, -prod.im * scale);
            }
            self.tables.forward(a, b);
            out.clear();
            out.extend((0..self.n).map(|j| {
                let v = Complex64::new(a[j].re, -a[j].im);
                cmul_compensated(v, self.chirp[j])
            }));
        }
    }
}

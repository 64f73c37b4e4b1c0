//! Double-double arithmetic, reference-accuracy unit-circle samples, and a
//! small radix-2 transform over double-double complexes.
//!
//! The chirp filter spectrum is the one fixed per-plan quantity whose
//! rounding error would otherwise ride on every transform the plan executes.
//! Computing it here (for moderate inner lengths) makes the filter exact at
//! working precision, which is what keeps measured round-trip errors inside
//! the single-transform error model.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::dd::{two_prod, two_sum};

/// Unevaluated double-double value `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[cfg(test)]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline(always)]
    fn renorm(hi: f64, lo: f64) -> Dd {
        let s = hi + lo;
        Dd { hi: s, lo: lo - (s - hi) }
    }

    #[inline(always)]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        Dd::renorm(s, e + self.lo + other.lo)
    }

    #[inline(always)]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline(always)]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline(always)]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        Dd::renorm(p, e + self.hi * other.lo + self.lo * other.hi)
    }

    /// Division by an integer that is exactly representable.
    #[inline(always)]
    pub fn div_int(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let r = ((self.hi - p) - e) + self.lo;
        Dd::renorm(q1, r / d)
    }

    #[inline(always)]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Complex with double-double components.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex { re: Dd::ZERO, im: Dd::ZERO };

    #[inline(always)]
    pub fn add(self, other: DdComplex) -> DdComplex {
        DdComplex { re: self.re.add(other.re), im: self.im.add(other.im) }
    }

    #[inline(always)]
    pub fn sub(self, other: DdComplex) -> DdComplex {
        DdComplex { re: self.re.sub(other.re), im: self.im.sub(other.im) }
    }

    pub fn conj(self) -> DdComplex {
        DdComplex { re: self.re, im: self.im.neg() }
    }
}

// pi/4 and sqrt(2)/2 beyond double precision.
const PI_4: Dd = Dd { hi: std::f64::consts::FRAC_PI_4, lo: 3.061616997868383e-17 };
const SQRT2_2: Dd = Dd { hi: std::f64::consts::FRAC_1_SQRT_2, lo: -4.833646656726457e-17 };

/// sin and cos on [0, pi/4] by Taylor series in double-double; the octant
/// bound keeps both series at 14 nested terms for ~1e-33 truncation error.
fn sincos_taylor(theta: Dd) -> (Dd, Dd) {
    let x = theta.mul(theta);
    // sin(t) = t * prod-nested (1 - x/(2k(2k+1)) ...)
    let mut s = Dd::ONE;
    // cos(t) = prod-nested (1 - x/((2k-1)2k) ...)
    let mut c = Dd::ONE;
    for k in (1..=14u32).rev() {
        let ds = (2 * k * (2 * k + 1)) as f64;
        let dc = ((2 * k - 1) * 2 * k) as f64;
        s = Dd::ONE.sub(x.mul(s).div_int(ds));
        c = Dd::ONE.sub(x.mul(c).div_int(dc));
    }
    (theta.mul(s), c)
}

/// `e(num/den)` with double-double components, by exact octant reduction.
pub(crate) fn cis_frac_dd(num: u64, den: u64) -> DdComplex {
    let num = num % den;
    let eight = 8u128 * num as u128;
    let octant = (eight / den as u128) as u32;
    let t = (eight - octant as u128 * den as u128) as f64;
    let den_f = den as f64;
    // frac = t/den in double-double (residual via exact two_prod)
    let f_hi = t / den_f;
    let (p, e) = two_prod(f_hi, den_f);
    let f_lo = ((t - p) - e) / den_f;
    let theta = PI_4.mul(Dd::renorm(f_hi, f_lo));
    let (s, c) = sincos_taylor(theta);
    let d = SQRT2_2;
    match octant {
        0 => DdComplex { re: c, im: s },
        1 => DdComplex { re: c.sub(s).mul(d), im: c.add(s).mul(d) },
        2 => DdComplex { re: s.neg(), im: c },
        3 => DdComplex { re: c.add(s).mul(d).neg(), im: c.sub(s).mul(d) },
        4 => DdComplex { re: c.neg(), im: s.neg() },
        5 => DdComplex { re: s.sub(c).mul(d), im: c.add(s).mul(d).neg() },
        6 => DdComplex { re: s, im: c.neg() },
        _ => DdComplex { re: c.add(s).mul(d), im: s.sub(c).mul(d) },
    }
}

fn dd_twiddles(m: usize) -> Arc<Vec<DdComplex>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<DdComplex>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("dd twiddle cache poisoned");
    guard
        .entry(m)
        .or_insert_with(|| {
            // w[j] = e(-j/m) for j < m/2
            Arc::new((0..m as u64 / 2).map(|j| cis_frac_dd(j, m as u64).conj()).collect())
        })
        .clone()
}

/// Exact-product kernel: Dekker splitting everywhere, or a fused
/// multiply-add residual where the hardware provides one.
trait ProdKernel {
    fn two_prod(a: f64, b: f64) -> (f64, f64);
}

struct Dekker;

impl ProdKernel for Dekker {
    #[inline(always)]
    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        two_prod(a, b)
    }
}

#[cfg(target_arch = "x86_64")]
struct HwFma;

#[cfg(target_arch = "x86_64")]
impl ProdKernel for HwFma {
    #[inline(always)]
    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        // Exact residual in one fused operation when compiled with fma.
        (p, a.mul_add(b, -p))
    }
}

#[inline(always)]
fn dd_mul_k<P: ProdKernel>(a: Dd, b: Dd) -> Dd {
    let (p, e) = P::two_prod(a.hi, b.hi);
    Dd::renorm(p, e + a.hi * b.lo + a.lo * b.hi)
}

#[inline(always)]
fn ddc_mul_k<P: ProdKernel>(a: DdComplex, b: DdComplex) -> DdComplex {
    DdComplex {
        re: dd_mul_k::<P>(a.re, b.re).sub(dd_mul_k::<P>(a.im, b.im)),
        im: dd_mul_k::<P>(a.re, b.im).add(dd_mul_k::<P>(a.im, b.re)),
    }
}

#[inline(always)]
fn fft_body<P: ProdKernel>(data: &mut [DdComplex], tw: &[DdComplex]) {
    let m = data.len();
    let bits = m.trailing_zeros();
    for i in 0..m {
        let j = ((i as u32).reverse_bits() >> (32 - bits)) as usize;
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2usize;
    while len <= m {
        let half = len / 2;
        let step = m / len;
        let mut base = 0;
        while base < m {
            for j in 0..half {
                let w = tw[j * step];
                let a = data[base + j];
                let b = ddc_mul_k::<P>(data[base + j + half], w);
                data[base + j] = a.add(b);
                data[base + j + half] = a.sub(b);
            }
            base += len;
        }
        len *= 2;
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "fma")]
unsafe fn fft_body_fma(data: &mut [DdComplex], tw: &[DdComplex]) {
    fft_body::<HwFma>(data, tw)
}

/// In-place forward radix-2 transform (sign `e(-jk/m)`) over double-double
/// complexes; `m` must be a power of two.
pub(crate) fn dd_fft_pow2(data: &mut [DdComplex]) {
    let m = data.len();
    debug_assert!(m.is_power_of_two());
    if m < 2 {
        return;
    }
    let tw = dd_twiddles(m);
    #[cfg(target_arch = "x86_64")]
    if is_x86_feature_detected!("fma") {
        return unsafe { fft_body_fma(data, &tw) };
    }
    fft_body::<Dekker>(data, &tw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_cis_matches_f64_cis() {
        for (num, den) in [(0u64, 8u64), (1, 8), (1, 7), (3, 7), (5, 13), (123, 1024), (4999, 16384)] {
            let dd = cis_frac_dd(num, den);
            let angle = 2.0 * std::f64::consts::PI * num as f64 / den as f64;
            assert!((dd.re.to_f64() - angle.cos()).abs() < 4e-16, "{num}/{den} re");
            assert!((dd.im.to_f64() - angle.sin()).abs() < 4e-16, "{num}/{den} im");
            // components consistent at dd precision: |z|^2 = 1
            let norm = dd.re.mul(dd.re).add(dd.im.mul(dd.im));
            assert!((norm.hi - 1.0).abs() < 1e-30, "{num}/{den} norm {:e}", norm.hi - 1.0);
        }
    }

    #[test]
    fn dd_fft_matches_direct() {
        let m = 64usize;
        let mut data: Vec<DdComplex> = (0..m)
            .map(|k| DdComplex {
                re: Dd::from_f64((k as f64 * 0.37).sin()),
                im: Dd::from_f64((k as f64 * 0.11).cos()),
            })
            .collect();
        let orig = data.clone();
        dd_fft_pow2(&mut data);
        for j in 0..m {
            let mut acc = DdComplex::ZERO;
            for (k, &x) in orig.iter().enumerate() {
                let w = cis_frac_dd((j * k % m) as u64, m as u64).conj();
                acc = acc.add(ddc_mul_k::<Dekker>(x, w));
            }
            let dre = (acc.re.to_f64() - data[j].re.to_f64()).abs();
            let dim = (acc.im.to_f64() - data[j].im.to_f64()).abs();
            assert!(dre < 1e-28 * m as f64 && dim < 1e-28 * m as f64, "j={j}");
        }
    }
}

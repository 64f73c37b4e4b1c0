//! Self-sorting Stockham decimation-in-frequency transform for lengths whose
//! prime factors are all <= 61. Radixes 4, 2 and 3 have dedicated kernels
//! (the chirp path only ever sees powers of two); other primes go through a
//! generic O(r^2) butterfly.

use num_complex::Complex64;

use super::cis_frac;

/// Largest prime factor the mixed-radix engine accepts; anything bigger is
/// routed to the chirp-convolution strategy by the planner.
pub(crate) const MAX_RADIX: u64 = 61;

#[derive(Clone)]
pub(crate) struct Stage {
    radix: usize,
    /// Forward twiddles e(-c*p/n_cur), laid out as (radix-1) consecutive
    /// entries per p, p = 0..n_cur/radix.
    twiddles: Vec<Complex64>,
    /// Row-major r x r matrix e(-(c*m mod r)/r) for the generic kernel;
    /// empty for the specialized radixes.
    matrix: Vec<Complex64>,
}

#[derive(Clone)]
pub(crate) struct StageTables {
    n: usize,
    stages: Vec<Stage>,
    use_avx: bool,
}

/// Splits `n` into the radix schedule: fours first, a single two if the power
/// of two is odd, then odd primes ascending. Returns `None` if some prime
/// factor exceeds [`MAX_RADIX`].
pub(crate) fn radix_schedule(n: usize) -> Option<Vec<usize>> {
    let mut rest = n as u64;
    let mut twos = 0u32;
    while rest % 2 == 0 {
        rest /= 2;
        twos += 1;
    }
    let mut schedule = Vec::new();
    for _ in 0..twos / 2 {
        schedule.push(4);
    }
    if twos % 2 == 1 {
        schedule.push(2);
    }
    let mut p = 3u64;
    while p <= MAX_RADIX && p * p <= rest {
        while rest % p == 0 {
            schedule.push(p as usize);
            rest /= p;
        }
        p += 2;
    }
    if rest > 1 {
        if rest <= MAX_RADIX {
            schedule.push(rest as usize);
        } else {
            return None;
        }
    }
    schedule.sort_by_key(|&r| if r == 4 { 0 } else if r == 2 { 1 } else { r });
    Some(schedule)
}

impl StageTables {
    /// Precomputes all stage twiddles for length `n` (which must be
    /// MAX_RADIX-smooth). Every unit-circle sample comes from exact rational
    /// argument reduction, never from repeated multiplication. With
    /// `reference_twiddles` the samples are produced in double-double and
    /// rounded once, for tables that are built rarely and reused often.
    pub(crate) fn build(n: usize, reference_twiddles: bool) -> Self {
        let tw_fn = |num: u64, den: u64| -> Complex64 {
            if reference_twiddles {
                let z = super::trig::cis_frac_dd(num, den);
                Complex64::new(z.re.to_f64(), z.im.to_f64())
            } else {
                cis_frac(num, den)
            }
        };
        let schedule = radix_schedule(n).expect("length must be smooth");
        let mut stages = Vec::with_capacity(schedule.len());
        let mut n_cur = n;
        for radix in schedule {
            let rows = n_cur / radix;
            let mut twiddles = Vec::with_capacity(rows * (radix - 1));
            for p in 0..rows {
                for c in 1..radix {
                    twiddles.push(tw_fn((c * p) as u64, n_cur as u64).conj());
                }
            }
            let matrix = if radix == 2 || radix == 3 || radix == 4 {
                Vec::new()
            } else {
                let mut m = Vec::with_capacity(radix * radix);
                for c in 0..radix {
                    for k in 0..radix {
                        m.push(tw_fn(((c * k) % radix) as u64, radix as u64).conj());
                    }
                }
                m
            };
            stages.push(Stage { radix, twiddles, matrix });
            n_cur = rows;
        }
        #[cfg(target_arch = "x86_64")]
        let use_avx = super::avx::available();
        #[cfg(not(target_arch = "x86_64"))]
        let use_avx = false;
        Self { n, stages, use_avx }
    }

    /// Approximate heap size of the twiddle tables in bytes.
    pub(crate) fn table_bytes(&self) -> u64 {
        self.stages
            .iter()
            .map(|s| ((s.twiddles.len() + s.matrix.len()) * 16) as u64)
            .sum()
    }

    /// Runs the forward transform of `x` (length n). `tmp` is a same-length
    /// scratch buffer; on return `x` holds the result in natural order.
    pub(crate) fn forward(&self, x: &mut [Complex64], tmp: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(tmp.len(), self.n);
        let mut n_cur = self.n;
        let mut stride = 1usize;
        let mut in_x = true;
        for stage in &self.stages {
            {
                let (src, dst): (&[Complex64], &mut [Complex64]) = if in_x {
                    (&*x, &mut *tmp)
                } else {
                    (&*tmp, &mut *x)
                };
                self.run_stage(stage, src, dst, n_cur, stride);
            }
            stride *= stage.radix;
            n_cur /= stage.radix;
            in_x = !in_x;
        }
        if !in_x {
            x.copy_from_slice(tmp);
        }
    }

    #[cfg(target_arch = "x86_64")]
    fn run_stage(&self, stage: &Stage, src: &[Complex64], dst: &mut [Complex64], n_cur: usize, stride: usize) {
        if self.use_avx {
            match stage.radix {
                4 if stride == 1 && n_cur % 8 == 0 => {
                    return unsafe { super::avx::stage_radix4_first(src, dst, n_cur, &stage.twiddles) };
                }
                4 if stride % 2 == 0 => {
                    return unsafe { super::avx::stage_radix4(src, dst, n_cur, stride, &stage.twiddles) };
                }
                2 if stride % 2 == 0 => {
                    return unsafe { super::avx::stage_radix2(src, dst, n_cur, stride, &stage.twiddles) };
                }
                _ => {}
            }
        }
        self.run_stage_scalar(stage, src, dst, n_cur, stride);
    }

    #[cfg(not(target_arch = "x86_64"))]
    fn run_stage(&self, stage: &Stage, src: &[Complex64], dst: &mut [Complex64], n_cur: usize, stride: usize) {
        self.run_stage_scalar(stage, src, dst, n_cur, stride);
    }

    fn run_stage_scalar(&self, stage: &Stage, src: &[Complex64], dst: &mut [Complex64], n_cur: usize, stride: usize) {
        match stage.radix {
            2 => stage_radix2(src, dst, n_cur, stride, &stage.twiddles),
            3 => stage_radix3(src, dst, n_cur, stride, &stage.twiddles),
            4 => stage_radix4(src, dst, n_cur, stride, &stage.twiddles),
            r => stage_generic(src, dst, n_cur, stride, r, &stage.twiddles, &stage.matrix),
        }
    }
}

#[inline(always)]
fn mul(a: Complex64, b: Complex64) -> Complex64 {
    Complex64::new(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)
}

fn stage_radix2(src: &[Complex64], dst: &mut [Complex64], n_cur: usize, stride: usize, tw: &[Complex64]) {
    let half = n_cur / 2;
    if stride == 1 {
        for p in 0..half {
            let a = src[p];
            let b = src[p + half];
            dst[2 * p] = a + b;
            dst[2 * p + 1] = mul(tw[p], a - b);
        }
        return;
    }
    for p in 0..half {
        let w = tw[p];
        let in0 = p * stride;
        let in1 = (p + half) * stride;
        let out0 = 2 * p * stride;
        let out1 = (2 * p + 1) * stride;
        for q in 0..stride {
            let a = src[in0 + q];
            let b = src[in1 + q];
            dst[out0 + q] = a + b;
            dst[out1 + q] = mul(w, a - b);
        }
    }
}

fn stage_radix4(src: &[Complex64], dst: &mut [Complex64], n_cur: usize, stride: usize, tw: &[Complex64]) {
    let quarter = n_cur / 4;
    if stride == 1 {
        for p in 0..quarter {
            let a = src[p];
            let b = src[p + quarter];
            let c = src[p + 2 * quarter];
            let d = src[p + 3 * quarter];
            let apc = a + c;
            let amc = a - c;
            let bpd = b + d;
            let bmd = b - d;
            // -i*(b-d) and +i*(b-d)
            let mjb = Complex64::new(bmd.im, -bmd.re);
            let pjb = Complex64::new(-bmd.im, bmd.re);
            dst[4 * p] = apc + bpd;
            dst[4 * p + 1] = mul(tw[3 * p], amc + mjb);
            dst[4 * p + 2] = mul(tw[3 * p + 1], apc - bpd);
            dst[4 * p + 3] = mul(tw[3 * p + 2], amc + pjb);
        }
        return;
    }
    for p in 0..quarter {
        let w1 = tw[3 * p];
        let w2 = tw[3 * p + 1];
        let w3 = tw[3 * p + 2];
        let in0 = p * stride;
        let out0 = 4 * p * stride;
        for q in 0..stride {
            let a = src[in0 + q];
            let b = src[in0 + quarter * stride + q];
            let c = src[in0 + 2 * quarter * stride + q];
            let d = src[in0 + 3 * quarter * stride + q];
            let apc = a + c;
            let amc = a - c;
            let bpd = b + d;
            let bmd = b - d;
            let mjb = Complex64::new(bmd.im, -bmd.re);
            let pjb = Complex64::new(-bmd.im, bmd.re);
            dst[out0 + q] = apc + bpd;
            dst[out0 + stride + q] = mul(w1, amc + mjb);
            dst[out0 + 2 * stride + q] = mul(w2, apc - bpd);
            dst[out0 + 3 * stride + q] = mul(w3, amc + pjb);
        }
    }
}

fn stage_radix3(src: &[Complex64], dst: &mut [Complex64], n_cur: usize, stride: usize, tw: &[Complex64]) {
    // e(-1/3) = RE3 + i*IM3
    const RE3: f64 = -0.5;
    const IM3: f64 = -0.866_025_403_784_438_6;
    let third = n_cur / 3;
    for p in 0..third {
        let w1 = tw[2 * p];
        let w2 = tw[2 * p + 1];
        for q in 0..stride {
            let a = src[p * stride + q];
            let b = src[(p + third) * stride + q];
            let c = src[(p + 2 * third) * stride + q];
            let u = b + c;
            let v = b - c;
            let re = a + u * RE3;
            // i*IM3*v = IM3 * (-v.im, v.re)
            let rot = Complex64::new(-v.im * IM3, v.re * IM3);
            dst[3 * p * stride + q] = a + u;
            dst[(3 * p + 1) * stride + q] = mul(w1, re + rot);
            dst[(3 * p + 2) * stride + q] = mul(w2, re - rot);
        }
    }
}

fn stage_generic(
    src: &[Complex64],
    dst: &mut [Complex64],
    n_cur: usize,
    stride: usize,
    radix: usize,
    tw: &[Complex64],
    matrix: &[Complex64],
) {
    let rows = n_cur / radix;
    let mut gathered = vec![Complex64::new(0.0, 0.0); radix];
    for p in 0..rows {
        for q in 0..stride {
            for m in 0..radix {
                gathered[m] = src[(p + m * rows) * stride + q];
            }
            let mut sum = Complex64::new(0.0, 0.0);
            for m in 0..radix {
                sum += gathered[m];
            }
            dst[radix * p * stride + q] = sum;
            for c in 1..radix {
                let row = &matrix[c * radix..(c + 1) * radix];
                let mut acc = gathered[0];
                for m in 1..radix {
                    acc += mul(gathered[m], row[m]);
                }
                dst[(radix * p + c) * stride + q] = mul(tw[(radix - 1) * p + c - 1], acc);
            }
        }
    }
}

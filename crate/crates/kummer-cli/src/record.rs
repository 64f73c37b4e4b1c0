//! One scan row and its bit-exact CSV form.
//!
//! Schema: `q,g,r,R,e2_rel,einf,f2p,f2m,f4p,f4m` with reals printed to 15
//! significant digits (`{:.14e}`), booleans as 0/1, `\n` line endings and no
//! quoting, so identical runs produce identical bytes on every platform.

use anyhow::{bail, Context, Result};
use kummer_core::{is_prime, kummer_r_fft_with_limit};

pub const CSV_HEADER: &str = "q,g,r,R,e2_rel,einf,f2p,f2m,f4p,f4m";

#[derive(Debug, Clone, PartialEq)]
pub struct KummerRecord {
    pub q: u64,
    /// Smallest primitive root used for the power table.
    pub g: u64,
    pub r: f64,
    pub big_r: f64,
    /// Measured round-trip E2 divided by the input norm.
    pub e2_rel: f64,
    /// Measured round-trip E_inf.
    pub einf: f64,
    /// 2q+1, 2q-1, 4q+1, 4q-1 primality.
    pub f2p: bool,
    pub f2m: bool,
    pub f4p: bool,
    pub f4m: bool,
}

/// Primality of 2q+1, 2q-1, 4q+1, 4q-1: the histogram spike classes.
pub fn spike_flags(q: u64) -> (bool, bool, bool, bool) {
    (
        is_prime(2 * q + 1),
        is_prime(2 * q - 1),
        is_prime(4 * q + 1),
        is_prime(4 * q - 1),
    )
}

fn fmt15(x: f64) -> String {
    format!("{x:.14e}")
}

impl KummerRecord {
    /// Computes the row for one prime via the transform route.
    pub fn compute(q: u64, mem_limit: u64) -> Result<Self> {
        let result = kummer_r_fft_with_limit(q, mem_limit)?;
        let acc = result.fft_accuracy.expect("fft route always attaches accuracy");
        let (f2p, f2m, f4p, f4m) = spike_flags(q);
        let ctx_root = kummer_core::primitive_root(q)?;
        Ok(KummerRecord {
            q,
            g: ctx_root,
            r: result.r,
            big_r: result.big_r,
            e2_rel: if acc.l2_input_norm > 0.0 { acc.measured_e2 / acc.l2_input_norm } else { 0.0 },
            einf: acc.measured_einf,
            f2p,
            f2m,
            f4p,
            f4m,
        })
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.q,
            self.g,
            fmt15(self.r),
            fmt15(self.big_r),
            fmt15(self.e2_rel),
            fmt15(self.einf),
            self.f2p as u8,
            self.f2m as u8,
            self.f4p as u8,
            self.f4m as u8,
        )
    }

    pub fn parse_csv_line(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            bail!("expected 10 fields, found {}: {line:?}", fields.len());
        }
        let flag = |s: &str| -> Result<bool> {
            match s {
                "0" => Ok(false),
                "1" => Ok(true),
                other => bail!("flag must be 0 or 1, found {other:?}"),
            }
        };
        Ok(KummerRecord {
            q: fields[0].parse().context("q")?,
            g: fields[1].parse().context("g")?,
            r: fields[2].parse().context("r")?,
            big_r: fields[3].parse().context("R")?,
            e2_rel: fields[4].parse().context("e2_rel")?,
            einf: fields[5].parse().context("einf")?,
            f2p: flag(fields[6])?,
            f2m: flag(fields[7])?,
            f4p: flag(fields[8])?,
            f4m: flag(fields[9])?,
        })
    }
}

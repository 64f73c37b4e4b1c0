//! Golden-table verification: compares scanned R(q) values against the
//! published truncated reference strings.
//!
//! The reference values are truncations, not roundings, so the row check is
//! "first ten significant digits equal, and the computed value is not below
//! the truncated one". Both clauses carry an ulp-scale guard so a value
//! sitting exactly on a digit boundary cannot flip the verdict on float
//! noise.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::record::KummerRecord;

/// Truncates x to its first `digits` significant decimal digits.
fn truncate_sig(x: f64, digits: u32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits as i32 - 1 - magnitude);
    (x * scale).trunc() / scale
}

/// The row check at `digits` significant digits.
pub fn row_matches(computed: f64, reference: &str, digits: u32) -> bool {
    let target: f64 = match reference.parse() {
        Ok(t) => t,
        Err(_) => return false,
    };
    let rel = ((computed - target) / target).abs();
    // Digit agreement, with a relative-difference rescue for values that sit
    // within float noise of a truncation boundary.
    let digits_ok = truncate_sig(computed, digits) == truncate_sig(target, digits)
        || rel <= 10f64.powi(-(digits as i32 + 1));
    // "Computed >= truncated": the reference is a truncation of the true
    // value, so the computed one may only fall below it by float noise, held
    // an order of magnitude under the digit tolerance.
    let not_below = computed >= target * (1.0 - 10f64.powi(-(digits as i32 + 1)));
    digits_ok && not_below
}

#[derive(Debug)]
pub struct VerifyReport {
    pub passed: usize,
    pub failed: Vec<(u64, String)>,
    pub missing: Vec<u64>,
}

impl VerifyReport {
    pub fn all_ok(&self) -> bool {
        self.failed.is_empty() && self.missing.is_empty()
    }
}

/// Reads a reference file of `q,R-string` pairs and checks every entry
/// against the scan. Reference rows with q above the scan bound are skipped.
pub fn verify_table(csv_path: &Path, reference_path: &Path, digits: u32) -> Result<VerifyReport> {
    let mut scanned: BTreeMap<u64, f64> = BTreeMap::new();
    let content = std::fs::read_to_string(csv_path)
        .with_context(|| format!("reading {}", csv_path.display()))?;
    let mut lines = content.lines();
    match lines.next() {
        Some(header) if header == crate::record::CSV_HEADER => {}
        other => bail!("bad or missing CSV header: {other:?}"),
    }
    let mut max_q = 0u64;
    for line in lines {
        let rec = KummerRecord::parse_csv_line(line)?;
        max_q = max_q.max(rec.q);
        scanned.insert(rec.q, rec.big_r);
    }

    let reference = std::fs::read_to_string(reference_path)
        .with_context(|| format!("reading {}", reference_path.display()))?;
    let mut report = VerifyReport { passed: 0, failed: Vec::new(), missing: Vec::new() };
    for (i, line) in reference.lines().enumerate() {
        if i == 0 && line.starts_with("q,") {
            continue;
        }
        let (q_str, r_str) = line
            .split_once(',')
            .with_context(|| format!("reference line {} malformed: {line:?}", i + 1))?;
        let q: u64 = q_str.trim().parse()?;
        if q > max_q {
            continue;
        }
        match scanned.get(&q) {
            None => report.missing.push(q),
            Some(&computed) => {
                if row_matches(computed, r_str.trim(), digits) {
                    report.passed += 1;
                } else {
                    report
                        .failed
                        .push((q, format!("computed {computed:.15e} vs reference {r_str}")));
                }
            }
        }
    }
    Ok(report)
}

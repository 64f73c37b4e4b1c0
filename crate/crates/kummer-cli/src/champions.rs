//! Running record ledgers over a scan: new maxima of R(q) from the start of
//! the scan, new minima from a configurable starting q (the published minimal
//! records only begin in the 10^4 range, far above R(3)).

use anyhow::{bail, Result};

use crate::record::KummerRecord;

pub const DEFAULT_MIN_START_Q: u64 = 10_000;

/// Strictly monotone list of (q, R) record pairs, q increasing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChampionLedger {
    pub entries: Vec<(u64, f64)>,
}

impl ChampionLedger {
    pub fn qs(&self) -> Vec<u64> {
        self.entries.iter().map(|&(q, _)| q).collect()
    }
}

/// Online accumulation of both ledgers while a scan runs.
#[derive(Debug, Clone)]
pub struct ChampionTracker {
    pub max: ChampionLedger,
    pub min: ChampionLedger,
    min_start_q: u64,
    last_q: Option<u64>,
}

impl ChampionTracker {
    pub fn new(min_start_q: u64) -> Self {
        Self {
            max: ChampionLedger::default(),
            min: ChampionLedger::default(),
            min_start_q,
            last_q: None,
        }
    }

    pub fn push(&mut self, q: u64, big_r: f64) -> Result<()> {
        if let Some(last) = self.last_q {
            if q <= last {
                bail!("records out of order: q={q} after q={last}");
            }
        }
        self.last_q = Some(q);
        if self.max.entries.last().map_or(true, |&(_, r)| big_r > r) {
            self.max.entries.push((q, big_r));
        }
        if q >= self.min_start_q && self.min.entries.last().map_or(true, |&(_, r)| big_r < r) {
            self.min.entries.push((q, big_r));
        }
        Ok(())
    }
}

/// Rebuilds both ledgers from a scan CSV.
pub fn champions_from_csv(path: &std::path::Path, min_start_q: u64) -> Result<ChampionTracker> {
    let content = std::fs::read_to_string(path)?;
    let mut lines = content.lines();
    match lines.next() {
        Some(header) if header == crate::record::CSV_HEADER => {}
        other => bail!("bad or missing CSV header: {other:?}"),
    }
    let mut tracker = ChampionTracker::new(min_start_q);
    for (i, line) in lines.enumerate() {
        let rec = KummerRecord::parse_csv_line(line)
            .map_err(|e| anyhow::anyhow!("row {}: {e}", i + 2))?;
        tracker.push(rec.q, rec.big_r)?;
    }
    Ok(tracker)
}

//! Batch driver and verification surface over the core library: prime scans
//! to CSV, champion ledgers, spike-classified histograms with SVG output, and
//! golden-table verification.

pub mod champions;
pub mod hist;
pub mod record;
pub mod scan;
pub mod verify;

pub use champions::{champions_from_csv, ChampionLedger, ChampionTracker, DEFAULT_MIN_START_Q};
pub use hist::{histogram_from_csv, render_svg, HistFilter, Histogram, HistogramSpec};
pub use record::{spike_flags, KummerRecord, CSV_HEADER};
pub use scan::{scan, ScanOptions, ScanSummary};
pub use verify::{row_matches, verify_table, VerifyReport};

//! Histogram of r(q) over a scan, with spike-class filters, a normal overlay
//! N(x, mu, sigma) sampled at bin centers, and a deterministic static SVG
//! rendering.

use std::path::Path;

use anyhow::{bail, Result};

use crate::record::KummerRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistFilter {
    /// Every prime in the scan.
    All,
    /// Drop primes where 2q+1 or 2q-1 is prime.
    Exclude2q,
    /// Drop primes where any of 2q+-1, 4q+-1 is prime.
    Exclude2q4q,
    /// Keep only primes where 2q+1 or 2q-1 is prime.
    Only2q,
    /// Keep only primes where 4q+1 or 4q-1 is prime.
    Only4q,
}

impl HistFilter {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "all" => HistFilter::All,
            "exclude-2q" => HistFilter::Exclude2q,
            "exclude-2q-4q" => HistFilter::Exclude2q4q,
            "only-2q" => HistFilter::Only2q,
            "only-4q" => HistFilter::Only4q,
            other => bail!(
                "unknown filter {other:?} (expected all, exclude-2q, exclude-2q-4q, only-2q, only-4q)"
            ),
        })
    }

    fn keeps(&self, rec: &KummerRecord) -> bool {
        let two = rec.f2p || rec.f2m;
        let four = rec.f4p || rec.f4m;
        match self {
            HistFilter::All => true,
            HistFilter::Exclude2q => !two,
            HistFilter::Exclude2q4q => !two && !four,
            HistFilter::Only2q => two,
            HistFilter::Only4q => four,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HistogramSpec {
    pub bins: usize,
    pub lo: f64,
    pub hi: f64,
    pub filter: HistFilter,
    pub overlay: bool,
}

impl Default for HistogramSpec {
    fn default() -> Self {
        Self { bins: 200, lo: -0.6, hi: 0.6, filter: HistFilter::All, overlay: true }
    }
}

#[derive(Debug, Clone)]
pub struct Histogram {
    pub spec_bins: usize,
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    /// Mean and population standard deviation of the filtered r values.
    pub mu: f64,
    pub sigma: f64,
    /// Number of filtered values (including any outside [lo, hi)).
    pub n: u64,
    /// N(x, mu, sigma) at bin centers, when requested.
    pub overlay: Option<Vec<f64>>,
}

impl Histogram {
    pub fn bin_center(&self, i: usize) -> f64 {
        let width = (self.hi - self.lo) / self.spec_bins as f64;
        self.lo + (i as f64 + 0.5) * width
    }
}

pub fn normal_density(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// Builds the histogram over the filtered rows of a scan CSV.
pub fn histogram_from_csv(path: &Path, spec: &HistogramSpec) -> Result<Histogram> {
    if spec.bins == 0 || !(spec.lo < spec.hi) {
        bail!("histogram spec requires bins >= 1 and lo < hi");
    }
    let content = std::fs::read_to_string(path)?;
    let mut lines = content.lines();
    match lines.next() {
        Some(header) if header == crate::record::CSV_HEADER => {}
        other => bail!("bad or missing CSV header: {other:?}"),
    }
    let mut counts = vec![0u64; spec.bins];
    let mut sum = kummer_core::sum::NeumaierSum::new();
    let mut sum_sq = kummer_core::sum::NeumaierSum::new();
    let mut n = 0u64;
    let width = (spec.hi - spec.lo) / spec.bins as f64;
    for line in lines {
        let rec = KummerRecord::parse_csv_line(line)?;
        if !spec.filter.keeps(&rec) {
            continue;
        }
        n += 1;
        sum.add(rec.r);
        sum_sq.add(rec.r * rec.r);
        if rec.r >= spec.lo && rec.r < spec.hi {
            let bin = ((rec.r - spec.lo) / width) as usize;
            counts[bin.min(spec.bins - 1)] += 1;
        }
    }
    if n == 0 {
        bail!("no rows survive the filter");
    }
    let mu = sum.value() / n as f64;
    let variance = (sum_sq.value() / n as f64 - mu * mu).max(0.0);
    let sigma = variance.sqrt();
    let mut hist = Histogram {
        spec_bins: spec.bins,
        lo: spec.lo,
        hi: spec.hi,
        counts,
        mu,
        sigma,
        n,
        overlay: None,
    };
    if spec.overlay && sigma > 0.0 {
        let overlay = (0..spec.bins).map(|i| normal_density(hist.bin_center(i), mu, sigma)).collect();
        hist.overlay = Some(overlay);
    }
    Ok(hist)
}

/// Histogram data as CSV: bin_center, count, density, overlay.
pub fn histogram_data_csv(hist: &Histogram) -> String {
    let width = (hist.hi - hist.lo) / hist.spec_bins as f64;
    let mut out = String::from("bin_center,count,density,normal_overlay\n");
    for (i, &c) in hist.counts.iter().enumerate() {
        let density = c as f64 / (hist.n as f64 * width);
        let overlay = hist
            .overlay
            .as_ref()
            .map_or(String::new(), |o| format!("{:.6e}", o[i]));
        out.push_str(&format!(
            "{:.6},{},{:.6e},{}\n",
            hist.bin_center(i),
            c,
            density,
            overlay
        ));
    }
    out
}

const SVG_W: f64 = 900.0;
const SVG_H: f64 = 540.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

/// Deterministic SVG 1.1 rendering: density bars plus the optional normal
/// overlay polyline. Fixed-precision coordinates keep the bytes reproducible
/// for identical inputs.
pub fn render_svg(hist: &Histogram) -> String {
    let plot_w = SVG_W - MARGIN_L - MARGIN_R;
    let plot_h = SVG_H - MARGIN_T - MARGIN_B;
    let width = (hist.hi - hist.lo) / hist.spec_bins as f64;
    let densities: Vec<f64> =
        hist.counts.iter().map(|&c| c as f64 / (hist.n as f64 * width)).collect();
    let mut y_max = densities.iter().cloned().fold(0.0f64, f64::max);
    if let Some(overlay) = &hist.overlay {
        y_max = overlay.iter().cloned().fold(y_max, f64::max);
    }
    if y_max <= 0.0 {
        y_max = 1.0;
    }
    y_max *= 1.05;

    let x_of = |r: f64| MARGIN_L + (r - hist.lo) / (hist.hi - hist.lo) * plot_w;
    let y_of = |d: f64| MARGIN_T + (1.0 - d / y_max) * plot_h;

    let mut svg = String::with_capacity(64 * hist.spec_bins + 2048);
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">\n"
    ));
    svg.push_str(&format!(
        "<!-- n={} mu={:.6e} sigma={:.6e} -->\n",
        hist.n, hist.mu, hist.sigma
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // bars
    for (i, &d) in densities.iter().enumerate() {
        if d <= 0.0 {
            continue;
        }
        let x0 = x_of(hist.lo + i as f64 * width);
        let y0 = y_of(d);
        let h = MARGIN_T + plot_h - y0;
        svg.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#4878b0\"/>\n",
            x0,
            y0,
            plot_w / hist.spec_bins as f64,
            h
        ));
    }
    // overlay
    if let Some(overlay) = &hist.overlay {
        let points: Vec<String> = overlay
            .iter()
            .enumerate()
            .map(|(i, &d)| format!("{:.2},{:.2}", x_of(hist.bin_center(i)), y_of(d)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#c03030\" stroke-width=\"1.5\"/>\n",
            points.join(" ")
        ));
    }
    // axes
    svg.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        MARGIN_T + plot_h,
        SVG_W - MARGIN_R,
        MARGIN_T + plot_h
    ));
    svg.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        MARGIN_T + plot_h
    ));
    // x ticks at nice positions
    let ticks = 7;
    for t in 0..ticks {
        let r = hist.lo + (hist.hi - hist.lo) * t as f64 / (ticks - 1) as f64;
        let x = x_of(r);
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            MARGIN_T + plot_h,
            MARGIN_T + plot_h + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{r:.2}</text>\n",
            MARGIN_T + plot_h + 20.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">r(q)</text>\n",
        MARGIN_L + plot_w / 2.0,
        SVG_H - 10.0
    ));
    svg.push_str("</svg>\n");
    svg
}

/// Writes `<out>.svg` and the sibling `<out>.csv` data file.
pub fn write_outputs(hist: &Histogram, svg_path: &Path) -> Result<()> {
    std::fs::write(svg_path, render_svg(hist))?;
    let data_path = svg_path.with_extension("csv");
    std::fs::write(data_path, histogram_data_csv(hist))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_fixture() -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("kummer-hist-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("fixture.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "{}", crate::record::CSV_HEADER).unwrap();
        // Three synthetic rows: a 2q-spike prime, a 4q-spike prime, a plain one.
        writeln!(f, "3,2,2.5e-1,1.284e0,0,0,1,0,0,0").unwrap();
        writeln!(f, "5,2,-1.25e-1,8.825e-1,0,0,0,0,1,0").unwrap();
        writeln!(f, "7,3,1.0e-2,1.01e0,0,0,0,0,0,0").unwrap();
        path
    }

    #[test]
    fn filters_select_expected_rows() {
        let path = write_fixture();
        let spec = HistogramSpec { bins: 10, ..Default::default() };
        assert_eq!(histogram_from_csv(&path, &spec).unwrap().n, 3);
        let spec = HistogramSpec { bins: 10, filter: HistFilter::Only2q, ..Default::default() };
        assert_eq!(histogram_from_csv(&path, &spec).unwrap().n, 1);
        let spec = HistogramSpec { bins: 10, filter: HistFilter::Exclude2q4q, ..Default::default() };
        let hist = histogram_from_csv(&path, &spec).unwrap();
        assert_eq!(hist.n, 1);
        assert!((hist.mu - 0.01).abs() < 1e-12);
        // sigma = 0 for a single value; overlay is skipped.
        assert!(hist.overlay.is_none());
    }

    #[test]
    fn empty_filter_result_is_an_error() {
        let path = write_fixture();
        let spec = HistogramSpec {
            bins: 10,
            filter: HistFilter::Only2q,
            lo: 0.0,
            hi: 0.1,
            ..Default::default()
        };
        // The only 2q row has r = 0.25, outside [0, 0.1), but it still counts
        // toward mu/sigma; the error case is an empty *filtered set*.
        assert_eq!(histogram_from_csv(&path, &spec).unwrap().n, 1);
        let unmatched = std::env::temp_dir().join("kummer-hist-tests/none.csv");
        std::fs::write(
            &unmatched,
            format!("{}\n3,2,1.0e0,2.7e0,0,0,0,0,0,0\n", crate::record::CSV_HEADER),
        )
        .unwrap();
        let spec = HistogramSpec { bins: 4, filter: HistFilter::Only2q, ..Default::default() };
        assert!(histogram_from_csv(&unmatched, &spec).is_err());
    }

    #[test]
    fn svg_is_deterministic_and_well_formed() {
        let path = write_fixture();
        let spec = HistogramSpec { bins: 12, ..Default::default() };
        let hist = histogram_from_csv(&path, &spec).unwrap();
        let svg1 = render_svg(&hist);
        let svg2 = render_svg(&histogram_from_csv(&path, &spec).unwrap());
        assert_eq!(svg1, svg2);
        assert!(svg1.starts_with("<svg xmlns"));
        assert!(svg1.contains("version=\"1.1\""));
        assert!(svg1.ends_with("</svg>\n"));
        assert!(svg1.contains("<polyline"));
    }

    #[test]
    fn overlay_matches_density_formula() {
        let x = 0.3f64;
        let (mu, sigma) = (0.1f64, 0.2f64);
        let expected = (-0.5 * ((x - mu) / sigma).powi(2)).exp()
            / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        assert!((normal_density(x, mu, sigma) - expected).abs() < 1e-16);
    }
}

//! Corpus aggregates: percentile tables, change-profile counts, rankings
//! and box-plot summaries of per-patch tag counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{ChangeProfile, PatchMetrics};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("csv output failed: {0}")]
    Csv(String),
}

impl From<csv::Error> for StatsError {
    fn from(e: csv::Error) -> Self {
        StatsError::Csv(e.to_string())
    }
}

/// Percentile `p` (0..=100) of ascending `sorted` values, interpolating
/// linearly between the two closest order statistics.
///
/// Panics on an empty slice.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    let h = (sorted.len() - 1) as f64 * (p / 100.0).clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sorted(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub metric: String,
    pub min: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p90: f64,
    pub p95: f64,
    pub max: f64,
}

impl SummaryRow {
    pub fn of(metric: &str, values: impl IntoIterator<Item = f64>) -> Result<Self, StatsError> {
        let v = sorted(values);
        if v.is_empty() {
            return Err(StatsError::EmptyCorpus);
        }
        Ok(SummaryRow {
            metric: metric.to_string(),
            min: v[0],
            p25: percentile(&v, 25.0),
            p50: percentile(&v, 50.0),
            p75: percentile(&v, 75.0),
            p90: percentile(&v, 90.0),
            p95: percentile(&v, 95.0),
            max: v[v.len() - 1],
        })
    }

    pub fn columns(&self) -> [f64; 7] {
        [self.min, self.p25, self.p50, self.p75, self.p90, self.p95, self.max]
    }
}

/// Descriptive statistics, one row per metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn row(&self, metric: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }
}

pub const SUMMARY_COLUMNS: [&str; 7] = ["min", "25%", "50%", "75%", "90%", "95%", "max"];

/// Percentiles of every metric over the corpus.
pub fn percentile_table<'a>(metrics: impl IntoIterator<Item = &'a PatchMetrics>) -> Result<SummaryTable, StatsError> {
    let all: Vec<&PatchMetrics> = metrics.into_iter().collect();
    if all.is_empty() {
        return Err(StatsError::EmptyCorpus);
    }
    let rows = PatchMetrics::NAMES
        .iter()
        .map(|name| SummaryRow::of(name, all.iter().map(|m| m.get(name).unwrap_or(0) as f64)))
        .collect::<Result<_, _>>()?;
    Ok(SummaryTable { rows })
}

/// Patches per change profile.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VennSummary {
    pub regions: BTreeMap<ChangeProfile, usize>,
    /// Sum of the regions.
    pub total: usize,
    /// Patches without any changed source line, outside every region.
    pub unprofiled: usize,
}

impl VennSummary {
    pub fn count(&self, p: ChangeProfile) -> usize {
        self.regions.get(&p).copied().unwrap_or(0)
    }
}

pub fn venn_summary(profiles: impl IntoIterator<Item = Option<ChangeProfile>>) -> VennSummary {
    let mut out = VennSummary {
        regions: ChangeProfile::ALL.iter().map(|&p| (p, 0)).collect(),
        ..Default::default()
    };
    for p in profiles {
        match p {
            Some(p) => {
                *out.regions.entry(p).or_default() += 1;
                out.total += 1;
            }
            None => out.unprofiled += 1,
        }
    }
    out
}

/// Box-plot statistics with whiskers at the most extreme values within
/// 1.5 IQR of the quartiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoxPlot {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

pub fn distribution_summary(values: impl IntoIterator<Item = f64>) -> Result<BoxPlot, StatsError> {
    let v = sorted(values);
    if v.is_empty() {
        return Err(StatsError::EmptyCorpus);
    }
    let q1 = percentile(&v, 25.0);
    let q3 = percentile(&v, 75.0);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside: Vec<f64> = v.iter().copied().filter(|x| (lo_fence..=hi_fence).contains(x)).collect();
    Ok(BoxPlot {
        n: v.len(),
        min: v[0],
        q1,
        median: percentile(&v, 50.0),
        q3,
        max: v[v.len() - 1],
        whisker_low: inside.first().copied().unwrap_or(q1),
        whisker_high: inside.last().copied().unwrap_or(q3),
        outliers: v.iter().copied().filter(|x| !(lo_fence..=hi_fence).contains(x)).collect(),
    })
}

/// Formats a number without a trailing `.0` for integral values.
pub fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        let s = format!("{x:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Left-aligned first column, right-aligned rest, two spaces apart.
pub fn render_text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width = header.iter().map(|h| h.len()).collect::<Vec<_>>();
    for r in rows {
        for (i, c) in r.iter().enumerate().take(cols) {
            width[i] = width[i].max(c.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: Vec<&str>| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i == 0 {
                let _ = write!(s, "{c:<w$}", w = width[0]);
            } else {
                let _ = write!(s, "  {c:>w$}", w = width[i]);
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(&mut out, header.to_vec());
    for r in rows {
        line(&mut out, r.iter().map(String::as_str).collect());
    }
    out
}

/// Header and rows as CSV.
pub fn render_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, StatsError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| StatsError::Csv(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 input"))
}

impl SummaryTable {
    pub fn header() -> Vec<&'static str> {
        std::iter::once("metric").chain(SUMMARY_COLUMNS).collect()
    }

    pub fn cells(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| std::iter::once(r.metric.clone()).chain(r.columns().map(fmt_num)).collect())
            .collect()
    }
}

impl VennSummary {
    pub fn cells(&self) -> Vec<Vec<String>> {
        let pct = |c: usize| {
            if self.total == 0 {
                "0".to_string()
            } else {
                fmt_num(100.0 * c as f64 / self.total as f64)
            }
        };
        let mut rows: Vec<Vec<String>> = ChangeProfile::ALL
            .iter()
            .map(|&p| vec![p.as_str().to_string(), self.count(p).to_string(), pct(self.count(p))])
            .collect();
        rows.push(vec!["total".into(), self.total.to_string(), pct(self.total)]);
        rows
    }
}

impl BoxPlot {
    pub fn header() -> Vec<&'static str> {
        vec!["series", "n", "min", "whiskerLow", "q1", "median", "q3", "whiskerHigh", "max", "outliers"]
    }

    pub fn cells(&self, series: &str) -> Vec<String> {
        vec![
            series.to_string(),
            self.n.to_string(),
            fmt_num(self.min),
            fmt_num(self.whisker_low),
            fmt_num(self.q1),
            fmt_num(self.median),
            fmt_num(self.q3),
            fmt_num(self.whisker_high),
            fmt_num(self.max),
            self.outliers.len().to_string(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eleven_values_hand_computed() {
        // 1..=10 plus 100: h = 10 * p
        let v = sorted([1., 2., 3., 4., 5., 6., 7., 8., 9., 10., 100.]);
        assert_eq!(percentile(&v, 25.0), 3.5);
        assert_eq!(percentile(&v, 50.0), 6.0);
        assert_eq!(percentile(&v, 75.0), 8.5);
        assert_eq!(percentile(&v, 90.0), 10.0);
        assert!((percentile(&v, 95.0) - 55.0).abs() < 1e-9);
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 100.0), 100.0);
    }

    #[test]
    fn fractional_rank_interpolates() {
        let v = [0., 10.];
        assert_eq!(percentile(&v, 25.0), 2.5);
        let v = [1., 2., 3., 4.];
        assert_eq!(percentile(&v, 50.0), 2.5);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert_eq!(percentile_table([]), Err(StatsError::EmptyCorpus));
        assert_eq!(distribution_summary([]), Err(StatsError::EmptyCorpus));
    }

    #[test]
    fn identical_records_give_flat_rows() {
        let m = PatchMetrics { added: 2, patch_size: 2, chunks: 1, files: 1, ..Default::default() };
        let t = percentile_table(vec![&m; 5]).unwrap();
        for r in &t.rows {
            assert!(r.columns().iter().all(|&c| c == r.min), "{r:?}");
        }
        assert_eq!(t.row("patchSize").unwrap().p50, 2.0);
    }

    #[test]
    fn venn_counts_and_total() {
        use ChangeProfile::*;
        let v = venn_summary([Some(A), Some(A), Some(RM), None]);
        assert_eq!(v.count(A), 2);
        assert_eq!(v.count(RM), 1);
        assert_eq!(v.count(M), 0);
        assert_eq!(v.total, 3);
        assert_eq!(v.unprofiled, 1);
        let one = venn_summary([Some(ARM)]);
        assert_eq!(one.regions.values().sum::<usize>(), 1);
    }

    #[test]
    fn box_plot_outliers() {
        let b = distribution_summary([1., 2., 2., 3., 3., 3., 4., 20.]).unwrap();
        assert_eq!(b.q1, 2.0);
        assert_eq!(b.median, 3.0);
        assert_eq!(b.q3, 3.25);
        assert_eq!(b.whisker_high, 4.0);
        assert_eq!(b.outliers, vec![20.0]);
        let flat = distribution_summary([2.; 4]).unwrap();
        assert_eq!((flat.whisker_low, flat.q1, flat.median, flat.q3, flat.whisker_high), (2., 2., 2., 2., 2.));
    }

    #[test]
    fn text_and_csv_rendering() {
        let rows = vec![vec!["patchSize".to_string(), "1".into(), "88.2".into()]];
        let t = render_text_table(&["metric", "min", "90%"], &rows);
        assert_eq!(t, "metric     min   90%\npatchSize    1  88.2\n");
        let c = render_csv(&["metric", "min", "90%"], &rows).unwrap();
        assert_eq!(c, "metric,min,90%\npatchSize,1,88.2\n");
        assert_eq!(fmt_num(213.5), "213.5");
        assert_eq!(fmt_num(4.0), "4");
    }

    proptest! {
        #[test]
        fn percentiles_ignore_order(mut v in proptest::collection::vec(0u32..500, 1..60), seed in any::<u64>()) {
            let f = |xs: &[u32]| {
                let ms: Vec<PatchMetrics> = xs.iter().map(|&x| PatchMetrics { patch_size: x as usize, ..Default::default() }).collect();
                percentile_table(&ms).unwrap()
            };
            let a = f(&v);
            // deterministic shuffle
            let mut s = seed;
            for i in (1..v.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                v.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert_eq!(a, f(&v));
        }

        #[test]
        fn columns_weakly_increase(v in proptest::collection::vec(0u32..1000, 1..80)) {
            let r = SummaryRow::of("x", v.iter().map(|&x| x as f64)).unwrap();
            let c = r.columns();
            prop_assert!(c.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn odd_median_is_middle_value(v in proptest::collection::vec(0u32..1000, 0..40)) {
            let mut v: Vec<f64> = v.into_iter().map(f64::from).collect();
            if v.len().is_multiple_of(2) { v.push(7.0); }
            let s = sorted(v);
            prop_assert_eq!(percentile(&s, 50.0), s[s.len() / 2]);
        }
    }
}

//! The benchmark report: per-configuration mean compression ratios over a
//! corpus, rendered as an aligned table plus machine-readable lines.

use mlc_core::{ConfigMeasurement, Error, Result, MEASURE_CONFIG_NAMES};

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub name: &'static str,
    pub upmix: f64,
    pub total: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub files: usize,
    pub total_samples: u64,
}

impl BenchReport {
    /// Unweighted mean of per-file ratios, one row per configuration, in the
    /// fixed comparison order.
    pub fn from_measurements(
        per_file: &[Vec<ConfigMeasurement>],
        total_samples: u64,
    ) -> Result<BenchReport> {
        if per_file.is_empty() {
            return Err(Error::Empty("bench report over no files"));
        }
        let mut rows = Vec::with_capacity(MEASURE_CONFIG_NAMES.len());
        for (i, &name) in MEASURE_CONFIG_NAMES.iter().enumerate() {
            let mut upmix = 0.0;
            let mut total = 0.0;
            for file in per_file {
                let m = &file[i];
                debug_assert_eq!(m.name, name);
                upmix += m.upmix_ratio;
                total += m.total_ratio;
            }
            let n = per_file.len() as f64;
            let row = BenchRow {
                name,
                upmix: upmix / n,
                total: total / n,
            };
            if !(row.upmix > 0.0 && row.upmix <= 1.1 && row.total > 0.0 && row.total <= 1.1) {
                return Err(Error::config(format!(
                    "ratio out of range for {name}: upmix {} total {}",
                    row.upmix, row.total
                )));
            }
            rows.push(row);
        }
        Ok(BenchReport {
            rows,
            files: per_file.len(),
            total_samples,
        })
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "corpus: {} file(s), {} samples per channel total\n",
            self.files, self.total_samples
        ));
        out.push_str(&format!(
            "{:<16} {:>7} {:>7}\n",
            "configuration", "total", "upmix"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<16} {:>7.3} {:>7.3}\n",
                row.name, row.total, row.upmix
            ));
        }
        out
    }

    pub fn machine_lines(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&format!("{}\t{:.6}\t{:.6}\n", row.name, row.upmix, row.total));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake_file(scale: f64) -> Vec<ConfigMeasurement> {
        MEASURE_CONFIG_NAMES
            .iter()
            .enumerate()
            .map(|(i, &name)| ConfigMeasurement {
                name,
                upmix_ratio: scale * (0.3 + 0.05 * i as f64),
                total_ratio: scale * (0.35 + 0.05 * i as f64),
            })
            .collect()
    }

    #[test]
    fn means_are_unweighted() {
        let report =
            BenchReport::from_measurements(&[fake_file(1.0), fake_file(0.5)], 100).unwrap();
        assert_eq!(report.rows.len(), 6);
        assert!((report.rows[0].upmix - 0.75 * 0.3).abs() < 1e-12);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(BenchReport::from_measurements(&[], 0).is_err());
    }

    #[test]
    fn renders_both_formats() {
        let report = BenchReport::from_measurements(&[fake_file(1.0)], 42).unwrap();
        let table = report.table();
        assert!(table.contains("configuration"));
        assert!(table.contains("joint-dmx+svd"));
        let lines = report.machine_lines();
        assert_eq!(lines.lines().count(), 6);
        assert!(lines.lines().all(|l| l.split('\t').count() == 3));
    }
}

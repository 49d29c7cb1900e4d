//! Study reports: CSV with a fixed column order and a plain-text table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const COLUMNS: [&str; 12] = [
    "chart",
    "n",
    "h_max",
    "epsilon",
    "dofs_H",
    "dofs_V",
    "err_Hh",
    "rate",
    "korn_lambda_min",
    "stability_const",
    "residual",
    "seconds",
];

/// One (mesh, ε) entry of a study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub chart: String,
    pub n: usize,
    pub h_max: f64,
    pub epsilon: f64,
    #[serde(rename = "dofs_H")]
    pub dofs_h: usize,
    #[serde(rename = "dofs_V")]
    pub dofs_v: usize,
    /// Error in the broken H¹ norm.
    #[serde(rename = "err_Hh")]
    pub err_hh: f64,
    /// `log₂(e_h / e_{h/2})` against the previous level at the same ε.
    pub rate: Option<f64>,
    pub korn_lambda_min: Option<f64>,
    pub stability_const: Option<f64>,
    pub residual: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
}

impl StudyReport {
    /// Fills in the rate of every row that follows a coarser level at the same ε.
    pub fn compute_rates(&mut self) {
        for i in 0..self.rows.len() {
            let prev = self.rows[..i]
                .iter()
                .rev()
                .find(|r| r.epsilon == self.rows[i].epsilon && r.chart == self.rows[i].chart);
            self.rows[i].rate = prev.and_then(|p| {
                let cur = &self.rows[i];
                (p.h_max > cur.h_max && p.err_hh > 0.0 && cur.err_hh > 0.0).then(|| (p.err_hh / cur.err_hh).log2())
            });
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(COLUMNS).expect("in-memory write");
        for r in &self.rows {
            w.serialize(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn from_csv(text: &str) -> Result<StudyReport> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?;
        if header.iter().ne(COLUMNS) {
            return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
        }
        let rows = r.deserialize().collect::<std::result::Result<Vec<StudyRow>, _>>();
        Ok(StudyReport { rows: rows.map_err(|e| Error::Parse(e.to_string()))? })
    }

    pub fn to_table(&self) -> String {
        let opt = |v: Option<f64>, prec: usize| v.map_or("-".to_string(), |x| format!("{x:.prec$}"));
        let mut out = String::new();
        writeln!(
            out,
            "{:<22} {:>4} {:>9} {:>9} {:>8} {:>7} {:>11} {:>6} {:>10} {:>10} {:>9} {:>8}",
            "chart",
            "n",
            "h_max",
            "epsilon",
            "dofs_H",
            "dofs_V",
            "err_Hh",
            "rate",
            "korn",
            "stability",
            "residual",
            "seconds"
        )
        .unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<22} {:>4} {:>9.5} {:>9.1e} {:>8} {:>7} {:>11.4e} {:>6} {:>10} {:>10} {:>9.1e} {:>8.3}",
                r.chart,
                r.n,
                r.h_max,
                r.epsilon,
                r.dofs_h,
                r.dofs_v,
                r.err_hh,
                opt(r.rate, 2),
                r.korn_lambda_min.map_or("-".into(), |x| format!("{x:.4e}")),
                r.stability_const.map_or("-".into(), |x| format!("{x:.4e}")),
                r.residual,
                r.seconds
            )
            .unwrap();
        }
        out
    }

    /// Writes `<stem>.csv` and `<stem>.txt` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>, stem: &str) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        for (ext, body) in [("csv", self.to_csv()), ("txt", self.to_table())] {
            let path = dir.join(format!("{stem}.{ext}"));
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize, h: f64, err: f64) -> StudyRow {
        StudyRow {
            chart: "cylinder".into(),
            n,
            h_max: h,
            epsilon: 1e-3,
            dofs_h: 30 * n * n,
            dofs_v: 5 * (2 * n + 1) * (2 * n + 1),
            err_hh: err,
            rate: None,
            korn_lambda_min: Some(0.123456789012345),
            stability_const: None,
            residual: 3.3e-16,
            seconds: 0.0,
        }
    }

    #[test]
    fn empty_study_is_header_only() {
        let csv = StudyReport::default().to_csv();
        assert_eq!(csv, format!("{}\n", COLUMNS.join(",")));
        assert_eq!(StudyReport::from_csv(&csv).unwrap(), StudyReport::default());
    }

    #[test]
    fn rates_and_round_trip() {
        let mut r = StudyReport { rows: vec![row(2, 0.7, 0.1), row(4, 0.35, 0.025), row(8, 0.175, 1.0 / 3.0 * 0.02)] };
        r.compute_rates();
        assert_eq!(r.rows[0].rate, None);
        assert!((r.rows[1].rate.unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(r.to_csv().lines().count(), 4);
        assert_eq!(StudyReport::from_csv(&r.to_csv()).unwrap(), r);
        assert!(r.to_table().contains("cylinder"));
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(StudyReport::from_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain");
        std::fs::write(&file, "x").unwrap();
        assert!(matches!(StudyReport::default().write(&file, "r"), Err(Error::Io { .. })));
    }
}

use std::fmt::Write as _;
use std::path::Path;

use super::ResultRow;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "n,p,q,m,runs,hits,censored,mean_evals,median_evals,stddev_evals,normalized,master_seed";

/// 17 significant digits, which round-trips any `f64`.
fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

pub fn render_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let q = r.q.map(float).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            float(r.p),
            q,
            r.m,
            r.runs,
            r.hits,
            r.censored,
            float(r.mean_evaluations),
            float(r.median_evaluations),
            float(r.stddev_evaluations),
            float(r.normalized),
            r.master_seed
        );
    }
    out
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(rows)).map_err(|e| Error::io(path, e))
}

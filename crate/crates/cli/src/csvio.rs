//! CSV schemas. Headers are fixed; numbers use `.` as decimal separator.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use totnet::survey::{BinStats, LesionSurvey};
use totnet::{RationalProb, RecallCurve};

use crate::error::{CliError, CliResult};

pub const CURVE_HEADER: [&str; 6] = ["m", "q", "d", "p_num", "p_den", "p_float"];
pub const HISTOGRAM_HEADER: [&str; 5] =
    ["pfr_count", "pfr_float", "freq_mean_pct", "freq_std_pct", "series"];
pub const CLASS_HEADER: [&str; 7] = [
    "label",
    "class_id",
    "members",
    "freq_mean_pct",
    "freq_std_pct",
    "curve_p_num_list",
    "curve_p_den_list",
];

/// Probabilities are printed with this many decimals.
pub const PLACES: u32 = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub m: usize,
    pub q: String,
    pub d: String,
    pub p_num: String,
    pub p_den: String,
    pub p_float: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub pfr_count: u64,
    pub pfr_float: String,
    pub freq_mean_pct: String,
    pub freq_std_pct: String,
    /// Number of series in which the value occurred.
    pub series: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub label: String,
    pub class_id: usize,
    pub members: usize,
    pub freq_mean_pct: String,
    pub freq_std_pct: String,
    pub curve_p_num_list: String,
    pub curve_p_den_list: String,
}

pub fn pct(fraction: f64) -> String {
    format!("{:.6}", fraction * 100.0)
}

pub fn curve_rows(curve: &RecallCurve) -> Vec<CurveRow> {
    let n = curve.n as u64;
    curve
        .points
        .iter()
        .enumerate()
        .map(|(m, p)| {
            let q = RationalProb::from_counts(m as u64, n);
            let d = RationalProb::from_counts(n - m as u64, n);
            CurveRow {
                m,
                q: q.render(PLACES),
                d: d.render(PLACES),
                p_num: p.numer().to_string(),
                p_den: p.denom().to_string(),
                p_float: p.render(PLACES),
            }
        })
        .collect()
}

pub fn curve_from_rows(rows: &[CurveRow]) -> CliResult<RecallCurve> {
    if rows.is_empty() {
        return Err(CliError::Data("curve CSV has no rows".into()));
    }
    let points = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if r.m != i {
                return Err(CliError::Data(format!("curve row {i} has m = {}", r.m)));
            }
            Ok(format!("{}/{}", r.p_num, r.p_den).parse::<RationalProb>()?)
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(RecallCurve { n: rows.len() - 1, points })
}

pub fn histogram_rows(survey: &LesionSurvey, stats: &[BinStats]) -> Vec<HistogramRow> {
    stats
        .iter()
        .map(|b| HistogramRow {
            pfr_count: b.key,
            pfr_float: survey.key_probability(b.key).render(PLACES),
            freq_mean_pct: pct(b.stats.mean),
            freq_std_pct: pct(b.stats.std),
            series: b.stats.series_present,
        })
        .collect()
}

pub fn write_csv<W: Write, T: Serialize>(out: W, header: &[&str], rows: &[T]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let data = |e: csv::Error| CliError::Data(e.to_string());
    w.write_record(header).map_err(data)?;
    for row in rows {
        w.serialize(row).map_err(data)?;
    }
    w.flush().map_err(|e| CliError::Data(e.to_string()))
}

pub fn to_csv_string<T: Serialize>(header: &[&str], rows: &[T]) -> CliResult<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, header, rows)?;
    String::from_utf8(buf).map_err(|e| CliError::Data(e.to_string()))
}

pub fn read_csv<R: Read, T: DeserializeOwned>(input: R, header: &[&str]) -> CliResult<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    let found = r.headers().map_err(|e| CliError::Data(e.to_string()))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(CliError::Data(format!(
            "unexpected CSV header {:?}, expected {:?}",
            found.iter().collect::<Vec<_>>(),
            header
        )));
    }
    r.deserialize().map(|row| row.map_err(|e| CliError::Data(e.to_string()))).collect()
}

//! CSV output.
//!
//! One row per (variant, power, scheme, user). Rows of a scheme share the
//! scheme's outage sum rate. When both `n-noma` and `oma` ran, each power
//! point gets an extra `rate-loss` row whose `sum_rate_bpcu` is the cell-edge
//! rate OMA delivers beyond N-NOMA.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::schemes::Scheme;

use super::sweep::{rate_loss_rows, sum_rate_rows, OutageTable};

pub const CSV_HEADER: [&str; 10] = [
    "power_dbm",
    "scheme",
    "user_index",
    "p_out_mc",
    "ci_half_width",
    "p_out_analytic",
    "sum_rate_bpcu",
    "regime_note",
    "sweep_param",
    "sweep_value",
];

pub const RATE_LOSS_SCHEME: &str = "rate-loss";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    #[serde(serialize_with = "ser_f64", deserialize_with = "de_f64")]
    pub power_dbm: f64,
    pub scheme: String,
    pub user_index: u8,
    #[serde(serialize_with = "ser_opt", deserialize_with = "de_opt")]
    pub p_out_mc: Option<f64>,
    #[serde(serialize_with = "ser_opt", deserialize_with = "de_opt")]
    pub ci_half_width: Option<f64>,
    #[serde(serialize_with = "ser_opt", deserialize_with = "de_opt")]
    pub p_out_analytic: Option<f64>,
    #[serde(serialize_with = "ser_opt", deserialize_with = "de_opt")]
    pub sum_rate_bpcu: Option<f64>,
    pub regime_note: String,
    pub sweep_param: String,
    pub sweep_value: String,
}

/// `%.{digits}g`-style formatting: shortest of fixed and exponent notation,
/// trailing zeros dropped.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn ser_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_sig(*v, 8))
}

fn ser_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&format_sig(*x, 8)),
        None => s.serialize_str(""),
    }
}

fn de_f64<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let s = String::deserialize(d)?;
    s.trim().parse().map_err(serde::de::Error::custom)
}

fn de_opt<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    let s = String::deserialize(d)?;
    let s = s.trim();
    if s.is_empty() {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(serde::de::Error::custom)
    }
}

/// Flattens a sweep result into CSV rows.
pub fn table_rows(table: &OutageTable) -> Vec<CsvRow> {
    let sums = sum_rate_rows(table);
    let losses = rate_loss_rows(table);
    let param = table.sweep_param.unwrap_or("").to_string();
    let mut rows = Vec::with_capacity(table.points.len() + losses.len());
    for (i, p) in table.points.iter().enumerate() {
        let sum_rate = sums
            .iter()
            .find(|r| r.variant == p.variant && r.power_index == p.power_index && r.scheme == p.scheme)
            .map(|r| r.outage_sum_rate);
        let sweep_value = table.variants[p.variant].label.clone();
        rows.push(CsvRow {
            power_dbm: p.power_dbm,
            scheme: p.scheme.name().to_string(),
            user_index: p.user as u8,
            p_out_mc: Some(p.estimate.p_hat),
            ci_half_width: Some(p.estimate.ci_half_width),
            p_out_analytic: p.estimate.analytic.as_ref().map(|a| a.value),
            sum_rate_bpcu: sum_rate,
            regime_note: p.regime_note.clone(),
            sweep_param: param.clone(),
            sweep_value: sweep_value.clone(),
        });

        let last_of_point =
            table.points.get(i + 1).is_none_or(|q| q.variant != p.variant || q.power_index != p.power_index);
        if last_of_point {
            if let Some(&(_, _, loss)) = losses.iter().find(|l| l.0 == p.variant && l.1 == p.power_index) {
                rows.push(CsvRow {
                    power_dbm: p.power_dbm,
                    scheme: RATE_LOSS_SCHEME.to_string(),
                    user_index: 0,
                    p_out_mc: None,
                    ci_half_width: None,
                    p_out_analytic: None,
                    sum_rate_bpcu: Some(loss),
                    regime_note: format!("{} minus {} cell-edge rate", Scheme::Oma, Scheme::NNoma),
                    sweep_param: param.clone(),
                    sweep_value,
                });
            }
        }
    }
    rows
}

/// Writes the header and `rows`. An empty slice gives a header-only file.
pub fn write_csv<W: Write>(rows: &[CsvRow], writer: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[CsvRow], path: impl AsRef<Path>) -> csv::Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(rows, std::io::BufWriter::new(file))
}

pub fn parse_csv<R: Read>(reader: R) -> csv::Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected CSV header: {header:?}"),
        )));
    }
    r.deserialize().collect()
}

pub fn read_csv(path: impl AsRef<Path>) -> csv::Result<Vec<CsvRow>> {
    parse_csv(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0, 8), "0");
        assert_eq!(format_sig(30.0, 8), "30");
        assert_eq!(format_sig(-2.5, 8), "-2.5");
        assert_eq!(format_sig(1.0 / 3.0, 8), "0.33333333");
        assert_eq!(format_sig(6.19e-5, 8), "6.19e-05");
        assert_eq!(format_sig(1.23456789e-3, 8), "0.0012345679");
        assert_eq!(format_sig(123456789.0, 8), "1.2345679e+08");
        assert_eq!(format_sig(99999999.5, 8), "1e+08");
        assert_eq!(format_sig(f64::NAN, 8), "NaN");
    }

    fn sample_rows() -> Vec<CsvRow> {
        vec![
            CsvRow {
                power_dbm: 30.0,
                scheme: "n-noma".into(),
                user_index: 0,
                p_out_mc: Some(0.00123),
                ci_half_width: Some(6.2e-5),
                p_out_analytic: Some(0.0015),
                sum_rate_bpcu: Some(4.99),
                regime_note: "high-snr; centroid, k > 1.2/sqrt(3)".into(),
                sweep_param: "rates_bpcu".into(),
                sweep_value: "2/1/1/1".into(),
            },
            CsvRow {
                power_dbm: -2.5,
                scheme: "rate-loss".into(),
                user_index: 0,
                p_out_mc: None,
                ci_half_width: None,
                p_out_analytic: None,
                sum_rate_bpcu: Some(-0.25),
                regime_note: String::new(),
                sweep_param: String::new(),
                sweep_value: String::new(),
            },
        ]
    }

    #[test]
    fn empty_table_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn round_trip() {
        let rows = sample_rows();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(parse_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(parse_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn formatting_is_idempotent(v in -1e12f64..1e12, scale in -30i32..30) {
            let x = v * 10f64.powi(scale);
            let once = format_sig(x, 8);
            let parsed: f64 = once.parse().unwrap();
            prop_assert_eq!(format_sig(parsed, 8), once.clone());
            let rel = ((parsed - x) / x).abs();
            prop_assert!(x == 0.0 || rel <= 5e-8, "{} -> {}", x, once);
        }
    }
}

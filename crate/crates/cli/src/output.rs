//! Deterministic number formatting and table emission.

use std::io::Write;

use serde::Serialize;

use crate::config::Format;

/// `x` with `digits` significant digits; plain notation for moderate magnitudes,
/// trailing zeros trimmed.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let digits = digits.max(1);
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(s)
    } else {
        let s = format!("{x:.prec$e}", prec = digits - 1);
        match s.split_once('e') {
            Some((m, e)) => format!("{}e{e}", trim_zeros(m.to_string())),
            None => s,
        }
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.into()
        }
    } else {
        s
    }
}

pub fn fmt_opt(x: Option<f64>, digits: usize) -> String {
    x.map(|v| fmt_sig(v, digits)).unwrap_or_default()
}

/// Header plus rows of already formatted cells.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

/// Writes `table` as CSV or `json` as JSON to `sink`.
pub fn emit<J: Serialize>(sink: &mut dyn Write, format: Format, table: &Table, json: &J) -> std::io::Result<()> {
    match format {
        Format::Csv => sink.write_all(table.to_csv().as_bytes()),
        Format::Json => {
            serde_json::to_writer_pretty(&mut *sink, json).map_err(std::io::Error::other)?;
            sink.write_all(b"\n")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.18750000001, 9), "0.1875");
        assert_eq!(fmt_sig(2.0, 9), "2");
        assert_eq!(fmt_sig(22.908492, 3), "22.9");
        assert_eq!(fmt_sig(1.5e-9, 3), "1.5e-9");
        assert_eq!(fmt_sig(-0.0000001, 2), "-1e-7");
        assert_eq!(fmt_sig(0.142536, 3), "0.143");
    }

    #[test]
    fn csv_quotes_commas() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec!["1".into(), "x, y".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,\"x, y\"\n");
    }
}

//! Deterministic TSV output: `#`-prefixed metadata lines echoing the run
//! parameters, a tab-separated header, then one line per row. Reals carry six
//! significant digits with a locale-independent decimal point, so identical
//! tables serialize to identical bytes.

use std::io::{self, Write};

/// One table cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
}

impl Value {
    fn render(self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Real(v) => format_real(v),
        }
    }
}

#[derive(Debug, Default)]
pub struct OutputTable {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl OutputTable {
    pub fn new(header: Vec<&'static str>) -> Self {
        OutputTable {
            metadata: Vec::new(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width does not match the header"
        );
        self.rows.push(row);
    }
}

pub fn emit_tsv<W: Write>(table: &OutputTable, out: &mut W) -> io::Result<()> {
    for (key, value) in &table.metadata {
        writeln!(out, "# {key}: {value}")?;
    }
    writeln!(out, "{}", table.header.join("\t"))?;
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|v| v.render()).collect();
        writeln!(out, "{}", cells.join("\t"))?;
    }
    Ok(())
}

/// Formats a real with six significant digits, fixed-point where compact and
/// scientific otherwise, trailing zeros trimmed.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..6).contains(&exp) {
        let precision = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.precision$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

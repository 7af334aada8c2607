use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use lpcurv::stability::StabilityReport;

pub const REPORT_HEADER: [&str; 9] = ["check", "body", "n", "p", "lhs", "rhs", "margin", "pass", "aux"];

/// Shortest decimal that parses back to the same `f64`.
pub fn number(v: f64) -> String {
    format!("{v:?}")
}

/// A file, or standard output when `path` is `None`.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn aux_field(r: &StabilityReport) -> String {
    let mut parts: Vec<String> = r.aux.iter().map(|(k, v)| format!("{k}={}", number(*v))).collect();
    if let Some(e) = &r.error {
        parts.push(format!("error={e}"));
    }
    parts.join(";")
}

pub fn write_report_csv(out: impl Write, rows: &[StabilityReport]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in rows {
        w.write_record([
            r.check.clone(),
            r.body.clone(),
            r.n.to_string(),
            r.p.map(number).unwrap_or_default(),
            number(r.lhs),
            number(r.rhs),
            number(r.margin),
            r.pass.to_string(),
            aux_field(r),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(mut out: impl Write, value: &serde_json::Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 2.5e17, -7.0] {
            assert_eq!(number(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(number(1.0), "1.0");
    }

    #[test]
    fn csv_quotes_labels_with_commas() {
        let row = StabilityReport::inequality("x", "harmonic(n=2,k=3)", 2, Some(-1.0), 0.5, 1.0, 1e-6).with("c0", 2.0);
        let mut buf = Vec::new();
        write_report_csv(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "check,body,n,p,lhs,rhs,margin,pass,aux");
        assert_eq!(lines.next().unwrap(), "x,\"harmonic(n=2,k=3)\",2,-1.0,0.5,1.0,0.5,true,c0=2.0");
    }
}

//! Output records and their json-lines / csv renderings.
//!
//! Both renderings share [`format_float`], so the same field prints the same
//! decimal string in either format.

use std::io::{self, Write};

use crate::config::Format;

pub const COLUMNS: [&str; 14] = [
    "command",
    "phi",
    "genus",
    "s",
    "theta",
    "W",
    "V",
    "log_hol_re",
    "log_hol_im",
    "method",
    "residual",
    "runtime_ms",
    "status",
    "detail",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record {
    pub command: String,
    pub phi: Option<f64>,
    pub genus: Option<u32>,
    pub s: Option<f64>,
    pub theta: Option<f64>,
    pub w: Option<f64>,
    pub v: Option<f64>,
    pub log_hol_re: Option<f64>,
    pub log_hol_im: Option<f64>,
    pub method: String,
    pub residual: Option<f64>,
    pub runtime_ms: f64,
    /// `ok`, `pass`, `fail` or `error`.
    pub status: String,
    pub detail: String,
}

/// Shortest decimal that parses back to the same `f64`; `None` for
/// non-finite values, which neither format can carry as a number.
pub fn format_float(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:?}"))
}

enum Field {
    Str(String),
    Num(Option<String>),
}

impl Record {
    pub fn new(command: &str, method: &str) -> Self {
        Record { command: command.into(), method: method.into(), status: "ok".into(), ..Default::default() }
    }

    pub fn failed(&self) -> bool {
        self.status == "fail" || self.status == "error"
    }

    fn fields(&self) -> [Field; 14] {
        let num = |x: Option<f64>| Field::Num(x.and_then(format_float));
        [
            Field::Str(self.command.clone()),
            num(self.phi),
            Field::Num(self.genus.map(|g| g.to_string())),
            num(self.s),
            num(self.theta),
            num(self.w),
            num(self.v),
            num(self.log_hol_re),
            num(self.log_hol_im),
            Field::Str(self.method.clone()),
            num(self.residual),
            num(Some(self.runtime_ms)),
            Field::Str(self.status.clone()),
            Field::Str(self.detail.clone()),
        ]
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{");
        for (k, (name, f)) in COLUMNS.iter().zip(self.fields()).enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&serde_json::to_string(name).expect("string"));
            out.push(':');
            match f {
                Field::Str(s) => out.push_str(&serde_json::to_string(&s).expect("string")),
                Field::Num(Some(s)) => out.push_str(&s),
                Field::Num(None) => out.push_str("null"),
            }
        }
        out.push('}');
        out
    }

    fn csv_row(&self) -> Vec<String> {
        self.fields()
            .into_iter()
            .map(|f| match f {
                Field::Str(s) => s,
                Field::Num(s) => s.unwrap_or_default(),
            })
            .collect()
    }
}

pub fn write_records<W: Write>(out: W, records: &[Record], format: Format) -> io::Result<()> {
    match format {
        Format::JsonLines => {
            let mut out = io::BufWriter::new(out);
            for r in records {
                writeln!(out, "{}", r.to_json())?;
            }
            out.flush()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(COLUMNS)?;
            for r in records {
                w.write_record(r.csv_row())?;
            }
            w.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1e-10, std::f64::consts::PI, -2.5e300, 5e-324, 0.0, 123456789.0] {
            let s = format_float(x).unwrap();
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_float(f64::NAN), None);
        assert_eq!(format_float(f64::INFINITY), None);
    }

    #[test]
    fn json_and_csv_agree() {
        let mut r = Record::new("torus", "closed-form");
        r.phi = Some(0.1 + 0.2);
        r.w = Some(std::f64::consts::PI.powi(2) / 0.48);
        r.detail = "a, \"quoted\" note".into();
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["phi"].as_f64(), Some(0.1 + 0.2));
        assert!(json["theta"].is_null());
        let mut buf = Vec::new();
        write_records(&mut buf, &[r.clone()], Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let row = rd.records().next().unwrap().unwrap();
        assert_eq!(&row[1], format_float(0.1 + 0.2).unwrap());
        assert!(r.to_json().contains(&format!("\"W\":{}", &row[5])));
        assert_eq!(&row[13], r.detail);
    }
}

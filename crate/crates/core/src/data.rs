//! `z,delta` CSV files.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::models::CensoredSample;

/// Reads a sample from CSV with header `z,delta`; `delta` is `0` or `1`.
/// Errors carry the 1-based line number of the first offending row.
pub fn read_censored_csv<R: Read>(reader: R) -> Result<CensoredSample> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "z" || &headers[1] != "delta" {
        return Err(Error::Input {
            line: 1,
            message: format!("expected header `z,delta`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut z = vec![];
    let mut delta = vec![];
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(Error::Input {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let zi: f64 = record[0].parse().map_err(|_| Error::Input {
            line,
            message: format!("z value `{}` is not a number", &record[0]),
        })?;
        if !(zi > 0.0 && zi.is_finite()) {
            return Err(Error::Input {
                line,
                message: format!("z value {zi} must be positive and finite"),
            });
        }
        let di = match &record[1] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Input {
                    line,
                    message: format!("delta must be 0 or 1, found `{other}`"),
                })
            }
        };
        z.push(zi);
        delta.push(di);
    }
    if z.is_empty() {
        return Err(Error::Input {
            line: 1,
            message: "file contains no observations".into(),
        });
    }
    CensoredSample::new(z, delta)
}

pub fn write_censored_csv<W: Write>(sample: &CensoredSample, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["z", "delta"])?;
    for (z, d) in sample.z().iter().zip(sample.delta()) {
        w.write_record([z.to_string(), u8::from(*d).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

//! Point CSV: one point per row, comma-separated floats, optional header.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geometry::PointSet;

/// Reads points; a first row that does not parse as numbers is taken as a
/// header. Every row must have the same number of fields.
pub fn read_points_csv<R: Read>(r: R) -> Result<PointSet> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
    let mut set: Option<PointSet> = None;
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if line == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("row {}: {e}", line + 1))),
        };
        let set = match &mut set {
            Some(s) => s,
            None => set.insert(PointSet::new(row.len())?),
        };
        set.push(&row).map_err(|e| match e {
            Error::NonFinite(_) => Error::Parse(format!("row {}: non-finite coordinate", line + 1)),
            other => other,
        })?;
    }
    set.ok_or(Error::EmptySet)
}

pub fn write_points_csv<W: Write>(k: &PointSet, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for p in k.iter() {
        out.write_record(p.iter().map(|x| format!("{x:?}")))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_optional() {
        let a = read_points_csv("x,y\n0,1\n2.5,3\n".as_bytes()).unwrap();
        let b = read_points_csv("0,1\n2.5,3\n".as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.point(1), &[2.5, 3.0]);
    }

    #[test]
    fn bad_rows() {
        assert!(read_points_csv("0,1\n2\n".as_bytes()).is_err());
        assert!(read_points_csv("0,1\nx,y\n".as_bytes()).is_err());
        assert!(matches!(read_points_csv("".as_bytes()), Err(Error::EmptySet)));
        assert!(read_points_csv("0,NaN\n".as_bytes()).is_err());
    }

    #[test]
    fn round_trip() {
        let k = PointSet::from_rows(&[[0.1, -2.0], [1e-7, 3.0]]).unwrap();
        let mut buf = Vec::new();
        write_points_csv(&k, &mut buf).unwrap();
        assert_eq!(read_points_csv(buf.as_slice()).unwrap(), k);
    }
}

//! CSV output with fixed float formatting.

use std::io::{self, Write};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a header and numeric rows as CSV.
pub fn write_rows<W, I>(writer: W, header: &[&str], rows: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<f64>>,
{
    write_records(writer, header, rows.into_iter().map(|r| r.into_iter().map(format_float).collect()))
}

/// Write a header and preformatted rows as CSV.
pub fn write_records<W, I>(writer: W, header: &[&str], rows: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header).map_err(into_io)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("row has {} fields, header has {}", row.len(), header.len()),
            ));
        }
        w.write_record(&row).map_err(into_io)?;
    }
    w.flush()
}

pub(crate) fn into_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::new(io::ErrorKind::InvalidData, format!("{other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_floats() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn writes_header_and_rows() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &["a", "b"], vec![vec![1.0, 2.0]]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "a,b\n1.0000000000000000e0,2.0000000000000000e0\n");
        assert!(write_rows(Vec::new(), &["a"], vec![vec![1.0, 2.0]]).is_err());
    }
}

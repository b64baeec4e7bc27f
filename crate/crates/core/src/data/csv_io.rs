use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::ph::PointCloud;

/// Reads a cloud from CSV whose header row names the D columns.
pub fn read_cloud_csv<R: Read>(input: R) -> Result<PointCloud> {
    let mut r = csv::Reader::from_reader(input);
    let d = r.headers()?.len();
    let mut coords = Vec::new();
    let mut n = 0;
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != d {
            return Err(Error::Size(format!(
                "row {row} has {} fields, header has {d}",
                rec.len()
            )));
        }
        for field in rec.iter() {
            coords.push(
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("row {row}: cannot parse {field:?} as a number")))?,
            );
        }
        n += 1;
    }
    PointCloud::new(coords, n, d)
}

pub fn write_cloud_csv<W: Write>(out: W, cloud: &PointCloud) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record((0..cloud.dim()).map(|j| format!("x{j}")))?;
    for row in cloud.rows() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

//! CSV field dumps: header `x,y,<columns...>`, row-major over the grid,
//! 17 significant digits.

use std::io::{Read, Write};

use super::{Grid2D, Point, ScalarField};
use crate::error::{Error, Result};

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `x,y,value` for every grid node.
pub fn write_field_csv<W: Write>(out: W, field: &ScalarField, grid: &Grid2D) -> Result<()> {
    write_columns_csv(out, grid, &["value"], &[field])
}

/// Writes `x,y,<names...>` with one column per field.
pub fn write_columns_csv<W: Write>(out: W, grid: &Grid2D, names: &[&str], fields: &[&ScalarField]) -> Result<()> {
    assert_eq!(names.len(), fields.len());
    let io = |e: csv::Error| Error::Parse(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["x", "y"];
    header.extend_from_slice(names);
    w.write_record(&header).map_err(io)?;
    for (_, _, p) in grid.nodes() {
        let mut rec = vec![fmt17(p.x), fmt17(p.y)];
        for f in fields {
            rec.push(fmt17(f.value(p)?));
        }
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

/// Reads an `x,y,value` dump back into a sampled field. The rows must form a
/// complete uniform grid in row-major order.
pub fn parse_field_csv<R: Read>(input: R) -> Result<ScalarField> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let cols: Vec<&str> = headers.iter().map(str::trim).collect();
    if cols != ["x", "y", "value"] {
        return Err(Error::Parse(format!("expected header x,y,value, got {}", cols.join(","))));
    }
    let mut pts = Vec::new();
    let mut vals = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.len() != 3 {
            return Err(Error::Parse(format!("expected 3 columns, got {}", rec.len())));
        }
        let num = |k: usize| -> Result<f64> {
            let v: f64 = rec[k].trim().parse().map_err(|_| Error::Parse(format!("bad number {:?}", &rec[k])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse("non-finite value".into()))
            }
        };
        pts.push(Point::new(num(0)?, num(1)?));
        vals.push(num(2)?);
    }
    if pts.len() < 2 {
        return Err(Error::Parse("too few rows".into()));
    }
    let y0 = pts[0].y;
    let nx = pts.iter().take_while(|p| p.y == y0).count();
    if nx < 2 || pts.len() % nx != 0 {
        return Err(Error::Parse("rows do not form a complete grid".into()));
    }
    let ny = pts.len() / nx;
    let h = pts[1].x - pts[0].x;
    let grid = Grid2D::new(pts[0], h, nx, ny)?;
    let tol = 1e-9 * h.max(f64::MIN_POSITIVE) * (1.0 + (nx.max(ny)) as f64);
    for (k, (i, j, node)) in grid.nodes().enumerate() {
        let p = pts[k];
        if (p.x - node.x).abs() > tol.max(1e-12 * node.x.abs()) || (p.y - node.y).abs() > tol.max(1e-12 * node.y.abs())
        {
            return Err(Error::Parse(format!("row {k} (node {i},{j}) is off the uniform grid")));
        }
    }
    ScalarField::sampled(grid, vals)
}

//! Solution files: `t,x1,...,xn,u` rows in row-major order.

use std::io::{Read, Write};

use nsriemann_core::grid::{GridField, Provenance};

use crate::error::CliError;

/// Header of a field with `dim` space axes.
pub fn header(dim: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=dim).map(|i| format!("x{i}")));
    h.push("u".into());
    h
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes every grid value, time slowest and the last space axis fastest.
pub fn write_field<W: Write>(field: &GridField, out: W) -> Result<(), CliError> {
    let err = |e: csv::Error| CliError::Output(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    let dim = field.dim();
    w.write_record(header(dim)).map_err(err)?;
    let mut idx = vec![0usize; dim];
    let mut row = Vec::with_capacity(dim + 2);
    for (it, &t) in field.t_axis().iter().enumerate() {
        for (flat, &u) in field.time_level(it).iter().enumerate() {
            field.unflatten(flat, &mut idx);
            row.clear();
            row.push(fmt(t));
            for (axis, &i) in field.space_axes().iter().zip(&idx) {
                row.push(fmt(axis[i]));
            }
            row.push(fmt(u));
            w.write_record(&row).map_err(err)?;
        }
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))
}

/// Reads a file written by [`write_field`] and rebuilds the grid.
pub fn read_field<R: Read>(input: R) -> Result<GridField, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let head = r.headers().map_err(|e| CliError::Input(e.to_string()))?.clone();
    let cols = head.len();
    if cols < 3 {
        return Err(CliError::Input("expected columns t,x1,...,xn,u".into()));
    }
    let dim = cols - 2;
    let want = header(dim);
    if head.iter().ne(want.iter().map(String::as_str)) {
        return Err(CliError::Input(format!("header must be {}", want.join(","))));
    }
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input(e.to_string()))?;
        let mut row = Vec::with_capacity(cols);
        for field in rec.iter() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("row {}: '{field}' is not a number", line + 2)))?;
            row.push(v);
        }
        if row.len() != cols {
            return Err(CliError::Input(format!("row {} has {} columns", line + 2, row.len())));
        }
        values.push(row[cols - 1]);
        coords.push(row);
    }
    if coords.is_empty() {
        return Err(CliError::Input("no data rows".into()));
    }
    let mut axes: Vec<Vec<f64>> = (0..=dim)
        .map(|c| {
            let mut axis: Vec<f64> = coords.iter().map(|row| row[c]).collect();
            axis.sort_by(f64::total_cmp);
            axis.dedup();
            axis
        })
        .collect();
    let total: usize = axes.iter().map(Vec::len).product();
    if total != coords.len() {
        return Err(CliError::Input(format!(
            "{} rows but the axes describe {total} points",
            coords.len()
        )));
    }
    // every row must sit on the grid point its position implies
    let mut idx = vec![0usize; dim + 1];
    for row in &coords {
        for c in 0..=dim {
            if row[c] != axes[c][idx[c]] {
                return Err(CliError::Input("rows are not in row-major grid order".into()));
            }
        }
        let mut c = dim + 1;
        while c > 0 {
            c -= 1;
            idx[c] += 1;
            if idx[c] < axes[c].len() {
                break;
            }
            idx[c] = 0;
        }
    }
    let t_axis = axes.remove(0);
    GridField::new(t_axis, axes, values, Provenance::Constructed).map_err(|e| CliError::Input(e.to_string()))
}

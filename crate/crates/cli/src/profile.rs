//! Profile CSV: header `r,u_1,…,u_m`, one row per cell in ascending `r`.
//!
//! Values are written with 17 significant digits so that reading a file back
//! reproduces the field bit for bit.

use std::path::Path;

use nls_ground::{FieldVector, RadialGrid};

#[derive(Debug, thiserror::Error)]
pub enum ProfileError {
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: {message}")]
    Shape { path: String, message: String },
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> ProfileError + '_ {
    move |source| ProfileError::Csv {
        path: path.display().to_string(),
        source,
    }
}

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_profile(path: &Path, grid: &RadialGrid, field: &FieldVector) -> Result<(), ProfileError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let mut header = vec!["r".to_string()];
    header.extend((1..=field.m()).map(|i| format!("u_{i}")));
    w.write_record(&header).map_err(csv_err(path))?;
    for (j, r) in grid.nodes().iter().enumerate() {
        let mut row = vec![format_value(*r)];
        row.extend(field.components().iter().map(|c| format_value(c[j])));
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| csv_err(path)(e.into()))?;
    Ok(())
}

/// Reads a profile and checks it against `grid`: same cell count and nodes
/// matching to a relative `1e-9`.
pub fn read_profile(path: &Path, grid: &RadialGrid) -> Result<FieldVector, ProfileError> {
    let shape = |message: String| ProfileError::Shape {
        path: path.display().to_string(),
        message,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = rdr.headers().map_err(csv_err(path))?.clone();
    if header.len() < 2 || &header[0] != "r" {
        return Err(shape("header must be `r,u_1,…,u_m`".into()));
    }
    let m = header.len() - 1;
    let mut comps = vec![Vec::with_capacity(grid.len()); m];
    for (row_idx, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err(path))?;
        let row = row_idx + 2;
        let values = record
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| shape(format!("line {row}: {e}")))?;
        if row_idx >= grid.len() {
            return Err(shape(format!("more than {} rows", grid.len())));
        }
        let node = grid.nodes()[row_idx];
        if (values[0] - node).abs() > 1e-9 * node.max(1.0) {
            return Err(shape(format!("line {row}: r = {} does not match grid node {node}", values[0])));
        }
        for (c, v) in comps.iter_mut().zip(&values[1..]) {
            c.push(*v);
        }
    }
    if comps[0].len() != grid.len() {
        return Err(shape(format!("expected {} rows, got {}", grid.len(), comps[0].len())));
    }
    FieldVector::new(comps).map_err(|e| shape(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let grid = RadialGrid::uniform(2, 33, 3.0).unwrap();
        let field = FieldVector::new(vec![
            grid.sample(|r| (-r * r).exp() / 3.0),
            grid.sample(|r| 1.0 / (1.0 + r).powf(std::f64::consts::PI)),
        ])
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        write_profile(&path, &grid, &field).unwrap();
        assert_eq!(read_profile(&path, &grid).unwrap(), field);
    }

    #[test]
    fn wrong_grid_is_rejected() {
        let grid = RadialGrid::uniform(1, 8, 1.0).unwrap();
        let field = FieldVector::zeros(1, 8);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        write_profile(&path, &grid, &field).unwrap();
        let other = RadialGrid::uniform(1, 9, 1.0).unwrap();
        assert!(matches!(read_profile(&path, &other), Err(ProfileError::Shape { .. })));
    }
}

//! Terrace tables of a Kopula over a grid of hypercube points.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{KopulaError, Result};
use crate::families::{grid_coordinate, Kopula};
use crate::phenomena::half_rare_coords;
use crate::scalar::Scalar;

/// Which coordinates vary over the grid and where the others are held.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub resolution: usize,
    pub axes: Vec<usize>,
    /// One value per event; entries for varying axes are ignored.
    pub fixed: Vec<f64>,
}

impl GridSpec {
    /// All `n` coordinates vary.
    pub fn full(n: usize, resolution: usize) -> Self {
        Self { resolution, axes: (0..n).collect(), fixed: vec![0.5; n] }
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.resolution < 2 {
            return Err(KopulaError::Argument("grid resolution must be at least 2".into()));
        }
        if self.fixed.len() != n {
            return Err(KopulaError::Argument(format!("need {n} fixed values, got {}", self.fixed.len())));
        }
        if self.fixed.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(KopulaError::Argument("fixed grid values must lie in [0, 1]".into()));
        }
        let mut seen = vec![false; n];
        for &a in &self.axes {
            if a >= n || seen[a] {
                return Err(KopulaError::Argument(format!("bad or repeated grid axis {a}")));
            }
            seen[a] = true;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridRow<T> {
    pub point: Vec<T>,
    pub terrace: u32,
    pub values: Vec<T>,
    /// Set when a value is negative or the row does not sum to 1 (within 1e-9).
    pub flagged: bool,
}

/// One row per grid point, in row-major order of the axes (first axis
/// fastest).
pub fn grid_rows<T: Scalar>(k: &dyn Kopula<T>, spec: &GridSpec) -> Result<Vec<GridRow<T>>> {
    let n = k.n_events();
    spec.check(n)?;
    let count = spec
        .resolution
        .checked_pow(spec.axes.len() as u32)
        .ok_or_else(|| KopulaError::Argument("grid too large".into()))?;
    let tol = T::lit(1e-9);
    Ok((0..count)
        .into_par_iter()
        .map(|idx| {
            let mut point: Vec<T> = spec.fixed.iter().map(|&v| T::lit(v)).collect();
            let mut rest = idx;
            for &a in &spec.axes {
                point[a] = grid_coordinate(rest % spec.resolution, spec.resolution);
                rest /= spec.resolution;
            }
            let values = k.table(&point);
            let (_, terrace) = half_rare_coords(&point);
            let sum: T = values.iter().copied().sum();
            let flagged = values.iter().any(|&v| !(v >= -tol)) || !((sum - T::one()).abs() <= tol);
            GridRow { point, terrace: terrace.0, values, flagged }
        })
        .collect())
}

/// CSV with header `w_0..w_{N-1},terrace_mask,v_0..v_{2^N-1}`.
pub fn write_grid_csv<T: Scalar, W: Write>(n: usize, rows: &[GridRow<T>], out: W) -> Result<()> {
    let err = |e: csv::Error| KopulaError::Parse(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..n).map(|k| format!("w_{k}")).collect();
    header.push("terrace_mask".into());
    header.extend((0..1usize << n).map(|x| format!("v_{x}")));
    w.write_record(&header).map_err(err)?;
    for row in rows {
        let mut rec: Vec<String> = row.point.iter().map(|v| format!("{v:?}")).collect();
        rec.push(row.terrace.to_string());
        rec.extend(row.values.iter().map(|v| format!("{v:?}")));
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| KopulaError::Parse(e.to_string()))
}

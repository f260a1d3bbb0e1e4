//! File formats: point-set CSV (one point per row, last column the weight)
//! and cube-decomposition JSON.

use anyhow::{bail, Context, Result};
use optsample_core::model::{Point, SampledDesign};
use optsample_core::scattered::CubeDecomposition;
use serde::Serialize;
use std::path::Path;

/// Write a design as CSV with header `x1,...,xd,w`.
pub fn write_design_csv(path: &Path, design: &SampledDesign) -> Result<()> {
    let d = design.points()[0].dim();
    let mut writer =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    header.push("w".into());
    writer.write_record(&header)?;
    for (point, weight) in design.iter() {
        let mut row: Vec<String> = point.coords().iter().map(|c| format!("{c}")).collect();
        row.push(format!("{weight}"));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Read a design written by [`write_design_csv`].
pub fn read_design_csv(path: &Path) -> Result<SampledDesign> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() < 2 {
            bail!("design rows need at least one coordinate and a weight");
        }
        let coords: Vec<f64> = record
            .iter()
            .take(record.len() - 1)
            .map(|f| f.parse().with_context(|| format!("bad coordinate {f:?}")))
            .collect::<Result<_>>()?;
        let weight: f64 = record[record.len() - 1].parse()?;
        points.push(Point::new(&coords));
        weights.push(weight);
    }
    Ok(SampledDesign::new(points, weights)?)
}

#[derive(Serialize)]
struct CubeJson {
    corner: Vec<f64>,
    side: f64,
    points: usize,
}

#[derive(Serialize)]
pub struct DecompositionJson {
    d: usize,
    ell: usize,
    tested_cubes: usize,
    cubes: Vec<CubeJson>,
}

impl DecompositionJson {
    pub fn from_decomposition(dec: &CubeDecomposition) -> Self {
        Self {
            d: dec.d,
            ell: dec.ell,
            tested_cubes: dec.tested_cubes,
            cubes: dec
                .cubes()
                .iter()
                .enumerate()
                .map(|(i, cube)| CubeJson {
                    corner: cube.corner(dec.d)[..dec.d].to_vec(),
                    side: cube.side(),
                    points: dec.members(i).len(),
                })
                .collect(),
        }
    }
}

/// Tidy rate table: one `(method, n, error)` row per measurement.
pub fn write_rates_csv(path: &Path, rows: &[(String, usize, f64)]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["method", "n", "error"])?;
    for (method, n, error) in rows {
        writer.write_record([method.as_str(), &n.to_string(), &format!("{error}")])?;
    }
    writer.flush()?;
    Ok(())
}

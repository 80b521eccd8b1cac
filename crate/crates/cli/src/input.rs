//! Input file formats.
//!
//! - point cloud: one point per line, coordinates separated by whitespace;
//!   blank lines and lines starting with `#` are skipped.
//! - distance matrix: square CSV without a header.
//! - body: JSON object tagged by `"type"`, e.g. `{"type": "ball", "dim": 3, "radius": 1}`.

use std::fs;
use std::path::Path;

use convex_magnitude::{ConvexBodySpec, FiniteMetricSpace, Metric};

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| CliError::Input(format!("line {}: bad coordinate {tok:?}", lineno + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if let Some(first) = points.first().map(Vec::len) {
            if p.len() != first {
                return Err(CliError::Input(format!(
                    "line {}: {} coordinates, expected {first}",
                    lineno + 1,
                    p.len()
                )));
            }
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err(CliError::Input("point file contains no points".into()));
    }
    Ok(points)
}

pub fn parse_distance_matrix(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    reader
        .records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| CliError::Input(format!("row {}: {e}", i + 1)))?;
            rec.iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| CliError::Input(format!("row {}: bad distance {f:?}", i + 1)))
                })
                .collect()
        })
        .collect()
}

pub fn load_space(points: Option<&Path>, distances: Option<&Path>, metric: Metric) -> Result<FiniteMetricSpace, CliError> {
    let space = match (points, distances) {
        (Some(p), None) => FiniteMetricSpace::from_points(&parse_points(&read(p)?)?, metric, false)?,
        (None, Some(d)) => FiniteMetricSpace::new(parse_distance_matrix(&read(d)?)?, true)?,
        _ => return Err(CliError::Usage("give exactly one of --points or --distances".into())),
    };
    Ok(space)
}

pub fn load_body(path: &Path) -> Result<ConvexBodySpec, CliError> {
    let body: ConvexBodySpec =
        serde_json::from_str(&read(path)?).map_err(|e| CliError::Usage(format!("body file {}: {e}", path.display())))?;
    body.validate()?;
    Ok(body)
}

//! Finite metric spaces given by a validated distance matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute slack allowed in the triangle inequality and symmetry checks.
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    L1,
    L2,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Metric::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// Symmetric distance matrix over `n` distinct points, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Validates and wraps a square distance matrix. The O(n³) triangle
    /// inequality check runs only when `check_triangle` is set.
    pub fn new(rows: Vec<Vec<f64>>, check_triangle: bool) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("metric space must contain at least one point"));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "distance matrix row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            dist.extend_from_slice(row);
        }
        Self::from_flat(n, dist, check_triangle)
    }

    pub fn from_flat(n: usize, dist: Vec<f64>, check_triangle: bool) -> Result<Self> {
        if n == 0 || dist.len() != n * n {
            return Err(Error::invalid("distance matrix must be square and nonempty"));
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(Error::invalid(format!("nonzero diagonal entry at {i}")));
            }
            for j in 0..n {
                let d = dist[i * n + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::invalid(format!(
                        "distance ({i}, {j}) = {d} is not a nonnegative number"
                    )));
                }
                if (d - dist[j * n + i]).abs() > TRIANGLE_TOLERANCE {
                    return Err(Error::invalid(format!("distance matrix asymmetric at ({i}, {j})")));
                }
                if i != j && d == 0.0 {
                    return Err(Error::invalid(format!(
                        "points {i} and {j} coincide (duplicate points are not allowed)"
                    )));
                }
            }
        }
        let space = FiniteMetricSpace { n, dist };
        if check_triangle {
            space.check_triangle()?;
        }
        Ok(space)
    }

    /// Builds the space of a point cloud under the `ℓ1` or `ℓ2` metric.
    pub fn from_points(points: &[Vec<f64>], metric: Metric, check_triangle: bool) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::invalid("point cloud is empty"));
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::invalid("points have inconsistent dimensions"));
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = metric.distance(&points[i], &points[j]);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Self::from_flat(n, dist, check_triangle)
    }

    fn check_triangle(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let dij = self.dist[i * n + j];
                for k in 0..n {
                    if dij > self.dist[i * n + k] + self.dist[k * n + j] + TRIANGLE_TOLERANCE {
                        return Err(Error::invalid(format!(
                            "triangle inequality fails for ({i}, {j}) via {k}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    /// Subspace on the given point indices, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> Result<Self> {
        if indices.iter().any(|&i| i >= self.n) {
            return Err(Error::invalid("subspace index out of range"));
        }
        let m = indices.len();
        let mut dist = Vec::with_capacity(m * m);
        for &i in indices {
            for &j in indices {
                dist.push(self.distance(i, j));
            }
        }
        Self::from_flat(m, dist, false)
    }
}

//! Convex bodies understood by the intrinsic-volume and bound routines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest box dimension expanded into an explicit vertex list.
pub const MAX_BOX_VERTEX_DIM: usize = 16;

/// A convex body in `ℓ2^d`. Serialized as JSON with a `"type"` tag, e.g.
/// `{"type": "box", "edges": [1, 1]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ConvexBodySpec {
    Ball { dim: usize, radius: f64 },
    /// Axis-parallel box `[0, a_1] × ⋯ × [0, a_N]`.
    Box { edges: Vec<f64> },
    /// Convex hull of the listed vertices.
    Polytope { dim: usize, vertices: Vec<Vec<f64>> },
    /// The segment `[0, length]` in `ℓ2^1`.
    Interval { length: f64 },
}

impl ConvexBodySpec {
    pub fn unit_ball(dim: usize) -> Self {
        ConvexBodySpec::Ball { dim, radius: 1.0 }
    }

    pub fn unit_cube(dim: usize) -> Self {
        ConvexBodySpec::Box {
            edges: vec![1.0; dim],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64, what: &str| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{what} must be positive, got {x}")))
            }
        };
        match self {
            ConvexBodySpec::Ball { dim, radius } => {
                if *dim == 0 {
                    return Err(Error::invalid("ball dimension must be positive"));
                }
                positive(*radius, "ball radius")
            }
            ConvexBodySpec::Box { edges } => {
                if edges.is_empty() {
                    return Err(Error::invalid("box needs at least one edge"));
                }
                edges.iter().try_for_each(|&a| positive(a, "box edge"))
            }
            ConvexBodySpec::Polytope { dim, vertices } => {
                if *dim == 0 {
                    return Err(Error::invalid("polytope dimension must be positive"));
                }
                if vertices.is_empty() {
                    return Err(Error::invalid("polytope needs at least one vertex"));
                }
                for (i, v) in vertices.iter().enumerate() {
                    if v.len() != *dim {
                        return Err(Error::invalid(format!(
                            "vertex {i} has dimension {}, expected {dim}",
                            v.len()
                        )));
                    }
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::invalid(format!("vertex {i} is not finite")));
                    }
                }
                Ok(())
            }
            ConvexBodySpec::Interval { length } => positive(*length, "interval length"),
        }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            ConvexBodySpec::Ball { dim, .. } | ConvexBodySpec::Polytope { dim, .. } => *dim,
            ConvexBodySpec::Box { edges } => edges.len(),
            ConvexBodySpec::Interval { .. } => 1,
        }
    }

    /// Vertex list for polyhedral bodies; `None` for balls.
    pub fn vertices(&self) -> Result<Option<Vec<Vec<f64>>>> {
        self.validate()?;
        Ok(match self {
            ConvexBodySpec::Ball { .. } => None,
            ConvexBodySpec::Interval { length } => Some(vec![vec![0.0], vec![*length]]),
            ConvexBodySpec::Polytope { vertices, .. } => Some(vertices.clone()),
            ConvexBodySpec::Box { edges } => {
                let n = edges.len();
                if n > MAX_BOX_VERTEX_DIM {
                    return Err(Error::ResourceLimit(format!(
                        "box of dimension {n} has too many vertices to enumerate"
                    )));
                }
                Some(
                    (0..1usize << n)
                        .map(|mask| {
                            edges
                                .iter()
                                .enumerate()
                                .map(|(i, &a)| if mask >> i & 1 == 1 { a } else { 0.0 })
                                .collect()
                        })
                        .collect(),
                )
            }
        })
    }

    /// The body dilated by `r > 0` about the origin.
    pub fn scaled(&self, r: f64) -> Self {
        match self {
            ConvexBodySpec::Ball { dim, radius } => ConvexBodySpec::Ball {
                dim: *dim,
                radius: radius * r,
            },
            ConvexBodySpec::Box { edges } => ConvexBodySpec::Box {
                edges: edges.iter().map(|a| a * r).collect(),
            },
            ConvexBodySpec::Polytope { dim, vertices } => ConvexBodySpec::Polytope {
                dim: *dim,
                vertices: vertices
                    .iter()
                    .map(|v| v.iter().map(|x| x * r).collect())
                    .collect(),
            },
            ConvexBodySpec::Interval { length } => ConvexBodySpec::Interval { length: length * r },
        }
    }

    /// Radius of a ball about the origin containing the body.
    pub fn enclosing_radius(&self) -> Result<f64> {
        Ok(match self.vertices()? {
            None => match self {
                ConvexBodySpec::Ball { radius, .. } => *radius,
                _ => unreachable!(),
            },
            Some(vs) => vs
                .iter()
                .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
                .fold(0.0, f64::max),
        })
    }
}

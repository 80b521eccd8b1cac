//! Magnitude of finite positive-definite metric spaces.
//!
//! For a finite space with positive-definite similarity matrix `Z`, the
//! supremum of `(Σ w_i)² / wᵀZw` over nonzero `w` is attained at the
//! weighting `w = Z⁻¹·1` (Cauchy–Schwarz in the inner product defined by
//! `Z`), with value `Σ w_i`. [`magnitude`] computes it by a pivoted Cholesky
//! solve; [`rayleigh_quotient`] evaluates the quotient for arbitrary `w` and
//! serves as the independent check.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{FiniteMetricSpace, Metric};

/// Smallest admissible Cholesky pivot.
pub const PIVOT_TOLERANCE: f64 = 1e-12;
/// Maximum accepted `‖Zw − 1‖∞` before a residual warning is attached.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Condition estimate above which an ill-conditioning warning is attached.
pub const ILL_CONDITIONED: f64 = 1e12;

const CONDITION_ITERATIONS: usize = 60;

/// `Z[i][j] = exp(−t·d(x_i, x_j))`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("similarity matrix must be square"));
        }
        Ok(SimilarityMatrix {
            n,
            data: rows.concat(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn quadratic_form(&self, w: &[f64]) -> f64 {
        self.mul_vec(w).iter().zip(w).map(|(a, b)| a * b).sum()
    }
}

pub fn build_similarity(space: &FiniteMetricSpace, t: f64) -> Result<SimilarityMatrix> {
    check_scale(t)?;
    Ok(SimilarityMatrix {
        n: space.len(),
        data: space.distances().iter().map(|d| (-t * d).exp()).collect(),
    })
}

fn check_scale(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("scale t must be positive, got {t}")))
    }
}

/// `P Z Pᵀ = L Lᵀ` with symmetric diagonal pivoting.
struct PivotedCholesky {
    n: usize,
    /// Lower triangle of `L`, row-major, in pivoted order.
    l: Vec<f64>,
    perm: Vec<usize>,
}

impl PivotedCholesky {
    fn factor(z: &SimilarityMatrix) -> Result<Self> {
        let n = z.n;
        let mut a = z.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut col = vec![0.0; n];
        for j in 0..n {
            let p = (j..n)
                .max_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]))
                .unwrap();
            if p != j {
                for k in 0..n {
                    a.swap(j * n + k, p * n + k);
                }
                for k in 0..n {
                    a.swap(k * n + j, k * n + p);
                }
                perm.swap(j, p);
            }
            let pivot = a[j * n + j];
            if !(pivot > PIVOT_TOLERANCE) {
                return Err(Error::NotPositiveDefinite { step: j, pivot });
            }
            let ljj = pivot.sqrt();
            a[j * n + j] = ljj;
            for i in j + 1..n {
                let v = a[i * n + j] / ljj;
                a[i * n + j] = v;
                col[i] = v;
            }
            for i in j + 1..n {
                let ci = col[i];
                let row = &mut a[i * n..i * n + i + 1];
                for k in j + 1..=i {
                    row[k] -= ci * col[k];
                }
                // Keep the trailing block symmetric for the pivot search and swaps.
                for k in j + 1..i {
                    a[k * n + i] = a[i * n + k];
                }
            }
        }
        Ok(PivotedCholesky { n, l: a, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.l[i * n + k] * y[k]).sum();
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.l[k * n + i] * y[k]).sum();
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}

pub fn is_positive_definite(z: &SimilarityMatrix) -> bool {
    PivotedCholesky::factor(z).is_ok()
}

/// Solution of `Z·w = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Weighting {
    pub w: Vec<f64>,
}

impl Weighting {
    pub fn total(&self) -> f64 {
        self.w.iter().sum()
    }

    /// `‖Z·w − 1‖∞`.
    pub fn residual(&self, z: &SimilarityMatrix) -> f64 {
        z.mul_vec(&self.w)
            .iter()
            .map(|v| (v - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolveWarning {
    IllConditioned { condition: f64 },
    LargeResidual { residual: f64 },
    /// The factorization failed and the value comes from a least-squares
    /// solve; it is not a certified magnitude.
    LeastSquaresFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagnitudeResult {
    pub value: f64,
    pub weighting: Weighting,
    pub condition: f64,
    pub warnings: Vec<SolveWarning>,
}

impl MagnitudeResult {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Magnitude of `tX` via the weighting `w = Z⁻¹·1`.
pub fn magnitude(space: &FiniteMetricSpace, t: f64) -> Result<MagnitudeResult> {
    let z = build_similarity(space, t)?;
    magnitude_of_similarity(&z)
}

pub fn magnitude_of_similarity(z: &SimilarityMatrix) -> Result<MagnitudeResult> {
    let chol = PivotedCholesky::factor(z)?;
    let ones = vec![1.0; z.n];
    let weighting = Weighting { w: chol.solve(&ones) };
    let condition = condition_estimate(z, &chol);
    let mut warnings = Vec::new();
    if condition > ILL_CONDITIONED {
        warnings.push(SolveWarning::IllConditioned { condition });
    }
    let residual = weighting.residual(z);
    if residual > RESIDUAL_TOLERANCE {
        warnings.push(SolveWarning::LargeResidual { residual });
    }
    Ok(MagnitudeResult {
        value: weighting.total(),
        weighting,
        condition,
        warnings,
    })
}

/// Magnitude of a point cloud under the chosen metric.
pub fn magnitude_of_points(points: &[Vec<f64>], metric: Metric, t: f64) -> Result<MagnitudeResult> {
    let space = FiniteMetricSpace::from_points(points, metric, false)?;
    magnitude(&space, t)
}

/// `λmax/λmin` from power iteration on `Z` and inverse iteration through
/// the Cholesky factor.
fn condition_estimate(z: &SimilarityMatrix, chol: &PivotedCholesky) -> f64 {
    let n = z.n;
    if n == 1 {
        return 1.0;
    }
    let normalize = |v: &mut Vec<f64>| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    };
    let mut v = vec![1.0; n];
    normalize(&mut v);
    let mut lambda_max = 0.0;
    for _ in 0..CONDITION_ITERATIONS {
        let mut zv = z.mul_vec(&v);
        lambda_max = zv.iter().zip(&v).map(|(a, b)| a * b).sum();
        normalize(&mut zv);
        v = zv;
    }
    // Deterministic start vector with no special structure.
    let mut u: Vec<f64> = (0..n)
        .map(|i| ((i as f64 + 1.0) * 0.754_877_666).fract() - 0.5)
        .collect();
    normalize(&mut u);
    let mut inv_lambda_min = 0.0;
    for _ in 0..CONDITION_ITERATIONS {
        let mut s = chol.solve(&u);
        inv_lambda_min = s.iter().zip(&u).map(|(a, b)| a * b).sum();
        normalize(&mut s);
        u = s;
    }
    (lambda_max * inv_lambda_min).max(1.0)
}

/// Least-squares weighting through the SVD pseudo-inverse, for matrices
/// that fail the positive-definiteness check.
fn least_squares_magnitude(z: &SimilarityMatrix) -> MagnitudeResult {
    let m = DMatrix::from_row_slice(z.n, z.n, &z.data);
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let ones = DVector::from_element(z.n, 1.0);
    let w = svd
        .solve(&ones, smax * 1e-14)
        .map(|v| v.iter().copied().collect())
        .unwrap_or_else(|_| vec![0.0; z.n]);
    let weighting = Weighting { w };
    MagnitudeResult {
        value: weighting.total(),
        weighting,
        condition: if smin > 0.0 { smax / smin } else { f64::INFINITY },
        warnings: vec![SolveWarning::LeastSquaresFallback],
    }
}

/// `(Σ w_i)² / Σ_{ij} Z_ij w_i w_j`.
pub fn rayleigh_quotient(space: &FiniteMetricSpace, t: f64, w: &[f64]) -> Result<f64> {
    if w.len() != space.len() {
        return Err(Error::invalid(format!(
            "weight vector has length {}, space has {} points",
            w.len(),
            space.len()
        )));
    }
    let z = build_similarity(space, t)?;
    let q = z.quadratic_form(w);
    if q == 0.0 || !q.is_finite() {
        return Err(Error::ZeroQuadraticForm);
    }
    let s: f64 = w.iter().sum();
    Ok(s * s / q)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagnitudeSample {
    pub t: f64,
    pub magnitude: f64,
    pub condition: f64,
    pub positive_definite: bool,
    pub warnings: Vec<SolveWarning>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagnitudeFunctionSamples {
    pub samples: Vec<MagnitudeSample>,
}

/// Samples `t ↦ Mag(tX)` on a strictly increasing grid of positive scales.
/// Scales where the factorization fails are flagged and filled in with a
/// least-squares value rather than aborting the whole run.
pub fn magnitude_function(space: &FiniteMetricSpace, t_grid: &[f64]) -> Result<MagnitudeFunctionSamples> {
    for &t in t_grid {
        check_scale(t)?;
    }
    if t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("t grid must be strictly increasing"));
    }
    let samples = t_grid
        .par_iter()
        .map(|&t| {
            let z = build_similarity(space, t).expect("scale already validated");
            match magnitude_of_similarity(&z) {
                Ok(r) => MagnitudeSample {
                    t,
                    magnitude: r.value,
                    condition: r.condition,
                    positive_definite: true,
                    warnings: r.warnings,
                },
                Err(_) => {
                    let r = least_squares_magnitude(&z);
                    MagnitudeSample {
                        t,
                        magnitude: r.value,
                        condition: r.condition,
                        positive_definite: false,
                        warnings: r.warnings,
                    }
                }
            }
        })
        .collect();
    Ok(MagnitudeFunctionSamples { samples })
}

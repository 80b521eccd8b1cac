//! Upper bounds, reference formulas and sandwich reports for the magnitude
//! of convex bodies.
//!
//! Upper bounds come from intrinsic volumes: `Σ ω_k/4^k·V_k·t^k`, and the
//! series in `V_1` alone that follows from `V_k ≤ V_1^k/k!`. Lower bounds
//! come from finite samples of the body, since the magnitude of a subset
//! never exceeds that of the whole body.

use num_traits::{One, Zero};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{rational, ExactRational, PolynomialQ};
use crate::body::ConvexBodySpec;
use crate::error::{Error, Result};
use crate::hull::{self, Halfspace};
use crate::intrinsic::{intrinsic_volumes, IntrinsicVolumeEstimate, Method};
use crate::magnitude::{magnitude, rayleigh_quotient};
use crate::rng::RandomStream;
use crate::schroeder::{ball_magnitude_function, derivative_at_zero};
use crate::space::{FiniteMetricSpace, Metric};
use crate::special::{factorial, factorial_f64, ln_omega, omega, omega_pi_form};

/// Number of standard errors added to Monte Carlo intrinsic volumes on the
/// upper-bound side.
pub const INFLATION_SIGMAS: f64 = 3.0;
pub const DEFAULT_CAP_POINTS: usize = 2000;
pub const DEFAULT_REFINEMENT_TOLERANCE: f64 = 1e-3;
/// Solves with a larger condition estimate end the refinement.
pub const MAX_CONDITION: f64 = 1e12;
pub const DEFAULT_SERIES_TOLERANCE: f64 = 1e-14;
const MAX_SERIES_TERMS: usize = 1_000_000;
const CONTAINMENT_TOLERANCE: f64 = 1e-9;
const SAMPLED_DIRECTIONS: usize = 4000;

/// `Σ_k ω_k/4^k·V_k·t^k`. Expects `vks[0] = 1`.
pub fn l2_upper_bound(vks: &[f64], t: f64) -> f64 {
    vks.iter()
        .enumerate()
        .map(|(k, v)| omega(k as u32) / 4f64.powi(k as i32) * v * t.powi(k as i32))
        .sum()
}

/// `Σ_k V_k·t^k/(k!·ω_k)`. This closed form is known to fail for balls of
/// dimension five and up; it is kept as a reference curve.
pub fn conjecture_reference(vks: &[f64], t: f64) -> f64 {
    vks.iter()
        .enumerate()
        .map(|(k, v)| v * t.powi(k as i32) / (factorial_f64(k as u32) * omega(k as u32)))
        .sum()
}

/// [`conjecture_reference`] for the unit ball of odd dimension `d`, as an
/// exact polynomial. For odd `d` the factor `ω_d/(ω_k ω_{d−k})` inside
/// `V_k(B^d)/(k!ω_k)` is rational.
pub fn ball_conjecture_polynomial(d: u32) -> Result<PolynomialQ> {
    if d.is_multiple_of(2) {
        return Err(Error::invalid(format!("d must be odd, got {d}")));
    }
    let (cd, _) = omega_pi_form(d);
    let coeffs = (0..=d)
        .map(|k| {
            let (ck, _) = omega_pi_form(k);
            let (cdk, _) = omega_pi_form(d - k);
            let binom = ExactRational::from_integer(factorial(d) / (factorial(k) * factorial(d - k)));
            binom * &cd / (ck * cdk * ExactRational::from_integer(factorial(k)))
        })
        .collect();
    Ok(PolynomialQ::new(coeffs))
}

/// Partial sum of `f(x) = Σ_k ω_k·x^k/(4^k·k!)` with `x = v1·t`, stopped once
/// the tail is certified below `tolerance`. Since `ω_{k+1} ≤ 2ω_k`, each
/// term is at most `x/(2(k+1))` times the previous one.
pub fn gb_series_bound(v1: f64, t: f64, tolerance: f64) -> Result<f64> {
    if !(v1 >= 0.0 && v1.is_finite()) || !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!(
            "v1 and t must be finite and nonnegative, got v1={v1}, t={t}"
        )));
    }
    if !(tolerance > 0.0) {
        return Err(Error::invalid("series tolerance must be positive"));
    }
    let x = v1 * t;
    if x == 0.0 {
        return Ok(1.0);
    }
    let ln_x4 = (x / 4.0).ln();
    let mut sum = 0.0;
    for k in 0..MAX_SERIES_TERMS {
        let ln_term = ln_omega(k as u32) + k as f64 * ln_x4 - ln_factorial(k);
        let term = if k < 2 {
            omega(k as u32) * (x / 4.0).powi(k as i32)
        } else {
            ln_term.exp()
        };
        sum += term;
        let ratio = x / (2.0 * (k + 1) as f64);
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < tolerance {
            return Ok(sum);
        }
    }
    Err(Error::ResourceLimit(format!(
        "series did not converge within {MAX_SERIES_TERMS} terms"
    )))
}

fn ln_factorial(k: usize) -> f64 {
    statrs::function::gamma::ln_gamma(k as f64 + 1.0)
}

/// `vol_d·t^d/(d!·ω_d)`, the large-scale growth of the magnitude.
pub fn large_t_reference(d: u32, vol_d: f64, t: f64) -> f64 {
    large_t_coefficient(d, vol_d) * t.powi(d as i32)
}

/// `vol_d/(d!·ω_d)`.
pub fn large_t_coefficient(d: u32, vol_d: f64) -> f64 {
    vol_d / omega(d) / factorial_f64(d)
}

/// `(1/(d!ω_d))·(V_d t^d + (d+1)V_{d−1} t^{d−1} + (π/4)(d+1)² V_{d−2} t^{d−2})`.
pub fn gigo_expansion(d: u32, vd: f64, vdm1: f64, vdm2: f64, t: f64) -> Result<f64> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::invalid(format!("d must be odd and at least 3, got {d}")));
    }
    let dd = d as i32;
    let c = (d + 1) as f64;
    let inner = vd * t.powi(dd)
        + c * vdm1 * t.powi(dd - 1)
        + std::f64::consts::PI / 4.0 * c * c * vdm2 * t.powi(dd - 2);
    Ok(inner / (factorial_f64(d) * omega(d)))
}

/// [`gigo_expansion`] for the unit ball as an exact polynomial:
/// `(1/d!)·(t^d + d(d+1)/2·t^{d−1} + (d+1)²·binom(d,2)/4·t^{d−2})`.
pub fn gigo_ball_polynomial(d: u32) -> Result<PolynomialQ> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::invalid(format!("d must be odd and at least 3, got {d}")));
    }
    let fact = ExactRational::from_integer(factorial(d));
    let di = d as i64;
    let mut coeffs = vec![ExactRational::zero(); d as usize + 1];
    coeffs[d as usize] = ExactRational::one() / &fact;
    coeffs[d as usize - 1] = rational(di * (di + 1), 2) / &fact;
    coeffs[d as usize - 2] = rational((di + 1) * (di + 1) * di * (di - 1), 8) / &fact;
    Ok(PolynomialQ::new(coeffs))
}

// ---------------------------------------------------------------------------
// Finite samples of a body.

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingOptions {
    pub cap_points: usize,
    /// Refinement stops once a level raises the magnitude by less than this.
    pub tolerance: f64,
    /// Lattice cells across the longest side of the bounding box at the
    /// coarsest level.
    pub initial_resolution: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions {
            cap_points: DEFAULT_CAP_POINTS,
            tolerance: DEFAULT_REFINEMENT_TOLERANCE,
            initial_resolution: 2,
        }
    }
}

/// Membership test for sampling.
enum Region {
    Halfspaces(Vec<Halfspace>),
    Ball(f64),
    /// No usable description; only convex combinations of vertices are
    /// generated.
    Hull,
}

impl Region {
    fn contains(&self, x: &[f64], scale: f64) -> bool {
        let eps = 1e-12 * scale.max(1.0);
        match self {
            Region::Halfspaces(hs) => hs
                .iter()
                .all(|(a, b)| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() <= b + eps),
            Region::Ball(r) => x.iter().map(|v| v * v).sum::<f64>().sqrt() <= r + eps,
            Region::Hull => false,
        }
    }
}

fn box_halfspaces(edges: &[f64]) -> Vec<Halfspace> {
    let n = edges.len();
    let mut out = Vec::with_capacity(2 * n);
    for (i, &a) in edges.iter().enumerate() {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        out.push((e.clone(), a));
        e[i] = -1.0;
        out.push((e, 0.0));
    }
    out
}

/// Outward unit-normal halfspaces of the body, when available exactly.
fn exact_halfspaces(body: &ConvexBodySpec) -> Result<Option<Vec<Halfspace>>> {
    Ok(match body {
        ConvexBodySpec::Box { edges } => Some(box_halfspaces(edges)),
        ConvexBodySpec::Interval { length } => Some(box_halfspaces(&[*length])),
        ConvexBodySpec::Polytope { dim, vertices } if *dim <= 3 => hull::halfspaces(vertices)?,
        _ => None,
    })
}

/// Nested point samples of a body, coarse to fine, each within the cap.
#[derive(Debug, Clone)]
pub struct BodySamples {
    pub levels: Vec<FiniteMetricSpace>,
}

impl BodySamples {
    pub fn new(body: &ConvexBodySpec, opts: &SamplingOptions) -> Result<Self> {
        body.validate()?;
        if opts.cap_points == 0 || opts.initial_resolution == 0 {
            return Err(Error::invalid("cap_points and initial_resolution must be positive"));
        }
        let d = body.dim();
        let vertices = body.vertices()?;
        let region = match (body, exact_halfspaces(body)?) {
            (ConvexBodySpec::Ball { radius, .. }, _) => Region::Ball(*radius),
            (_, Some(hs)) => Region::Halfspaces(hs),
            _ => Region::Hull,
        };
        let (lo, hi) = bounding_box(body, vertices.as_deref());
        let extent = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
        let mut levels = Vec::new();
        let mut resolution = opts.initial_resolution;
        let mut last_len = 0;
        loop {
            let h = if extent > 0.0 { extent / resolution as f64 } else { 1.0 };
            let Some(points) = level_points(body, &region, vertices.as_deref(), &lo, &hi, h, resolution, opts.cap_points)
            else {
                break;
            };
            if points.len() > opts.cap_points {
                break;
            }
            if points.len() > last_len {
                last_len = points.len();
                levels.push(FiniteMetricSpace::from_points(&points, Metric::L2, false)?);
            }
            if extent == 0.0 || resolution > 1 << 20 {
                break;
            }
            resolution *= 2;
        }
        if levels.is_empty() {
            // Even the coarsest lattice is over the cap: fall back to a
            // single point, whose magnitude is 1.
            let p = vertices
                .and_then(|v| v.first().cloned())
                .unwrap_or_else(|| vec![0.0; d]);
            levels.push(FiniteMetricSpace::from_points(&[p], Metric::L2, false)?);
        }
        Ok(BodySamples { levels })
    }

    /// Best certified lower bound on `Mag(tK)` from the sampled levels.
    pub fn lower_bound(&self, t: f64, opts: &SamplingOptions) -> Result<FiniteLowerBound> {
        // Uniform weights always give a valid, well-conditioned bound.
        let base = &self.levels[0];
        let ones = vec![1.0; base.len()];
        let mut best = FiniteLowerBound {
            value: rayleigh_quotient(base, t, &ones)?,
            points: base.len(),
            condition: f64::NAN,
            source: LowerSource::UniformWeights,
        };
        let mut previous: Option<f64> = None;
        for space in &self.levels {
            let Ok(res) = magnitude(space, t) else { break };
            if res.condition > MAX_CONDITION || !res.is_clean() {
                break;
            }
            // The quotient of the computed weighting is a lower bound even
            // when the solve carries rounding error.
            let value = rayleigh_quotient(space, t, &res.weighting.w)?;
            if value > best.value {
                best = FiniteLowerBound {
                    value,
                    points: space.len(),
                    condition: res.condition,
                    source: LowerSource::Weighting,
                };
            }
            if let Some(p) = previous {
                if value - p < opts.tolerance {
                    break;
                }
            }
            previous = Some(value);
        }
        Ok(best)
    }
}

fn bounding_box(body: &ConvexBodySpec, vertices: Option<&[Vec<f64>]>) -> (Vec<f64>, Vec<f64>) {
    match (body, vertices) {
        (ConvexBodySpec::Ball { dim, radius }, _) => (vec![-radius; *dim], vec![*radius; *dim]),
        (_, Some(vs)) => {
            let d = vs[0].len();
            let lo = (0..d).map(|i| vs.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min)).collect();
            let hi = (0..d)
                .map(|i| vs.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            (lo, hi)
        }
        _ => unreachable!("every non-ball body has vertices"),
    }
}

/// Points of one refinement level, or `None` once the level would exceed
/// the cap by a wide margin.
#[allow(clippy::too_many_arguments)]
fn level_points(
    body: &ConvexBodySpec,
    region: &Region,
    vertices: Option<&[Vec<f64>]>,
    lo: &[f64],
    hi: &[f64],
    h: f64,
    resolution: usize,
    cap: usize,
) -> Option<Vec<Vec<f64>>> {
    let d = lo.len();
    let scale = lo.iter().chain(hi).fold(0.0f64, |m, v| m.max(v.abs()));
    let mut points: Vec<Vec<f64>> = vertices.map(<[Vec<f64>]>::to_vec).unwrap_or_default();
    match region {
        Region::Hull => {
            // Points on segments between vertex pairs stay inside the hull.
            let vs = vertices?;
            let pairs = vs.len() * (vs.len() - 1) / 2;
            if pairs * resolution.saturating_sub(1) > 4 * cap {
                return None;
            }
            for i in 0..vs.len() {
                for j in i + 1..vs.len() {
                    for s in 1..resolution {
                        let s = s as f64 / resolution as f64;
                        points.push(vs[i].iter().zip(&vs[j]).map(|(a, b)| a + s * (b - a)).collect());
                    }
                }
            }
        }
        _ => {
            let counts: Vec<usize> = lo
                .iter()
                .zip(hi)
                .map(|(a, b)| ((b - a) / h + 1e-9).floor() as usize + 1)
                .collect();
            let total = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c))?;
            if total > 64 * cap {
                return None;
            }
            let mut idx = vec![0usize; d];
            for _ in 0..total {
                let x: Vec<f64> = (0..d).map(|i| lo[i] + h * idx[i] as f64).collect();
                if region.contains(&x, scale) {
                    points.push(x);
                }
                for i in 0..d {
                    idx[i] += 1;
                    if idx[i] < counts[i] {
                        break;
                    }
                    idx[i] = 0;
                }
            }
            if let ConvexBodySpec::Ball { dim, radius } = body {
                points.extend(sphere_points(*dim, *radius, h));
            }
        }
    }
    Some(dedup(points, 1e-9 * h.min(1.0)))
}

/// Roughly `h`-spaced points on the sphere of radius `r` (dimensions 1-3).
fn sphere_points(d: usize, r: f64, h: f64) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![-r], vec![r]],
        2 => {
            let n = ((2.0 * std::f64::consts::PI * r / h).ceil() as usize).max(3);
            (0..n)
                .map(|i| {
                    let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    vec![r * a.cos(), r * a.sin()]
                })
                .collect()
        }
        3 => {
            let n = ((4.0 * std::f64::consts::PI * r * r / (h * h)).ceil() as usize).max(4);
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let a = golden * i as f64;
                    vec![r * rho * a.cos(), r * rho * a.sin(), r * z]
                })
                .collect()
        }
        _ => vec![],
    }
}

fn dedup(points: Vec<Vec<f64>>, eps: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    let mut seen = std::collections::HashSet::new();
    for p in points {
        let key: Vec<i64> = p.iter().map(|v| (v / eps).round() as i64).collect();
        if seen.insert(key) {
            out.push(p);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerSource {
    /// Quotient of the weighting solved at the densest clean level.
    Weighting,
    /// Uniform weights on the coarsest level.
    UniformWeights,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteLowerBound {
    pub value: f64,
    pub points: usize,
    pub condition: f64,
    pub source: LowerSource,
}

// ---------------------------------------------------------------------------
// Reports.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFlag {
    /// Some `V_k` on the upper side is a Monte Carlo estimate plus 3σ.
    McInflated,
    /// Some `V_k` on the upper side is the Alexandrov–Fenchel bound.
    AfBound,
    /// The lower bound fell back to uniform weights.
    UniformLower,
    /// The conjectured closed form is known to fail in this dimension.
    ConjectureDisproved,
    /// Lower bound above upper bound.
    Violation,
}

impl BoundFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundFlag::McInflated => "mc_inflated",
            BoundFlag::AfBound => "af_bound",
            BoundFlag::UniformLower => "uniform_lower",
            BoundFlag::ConjectureDisproved => "conjecture_disproved",
            BoundFlag::Violation => "violation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
    pub conjecture_ref: f64,
    pub lower_points: usize,
    pub flags: Vec<BoundFlag>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub intrinsic_volumes: Vec<IntrinsicVolumeEstimate>,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn violations(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.flags.contains(&BoundFlag::Violation))
            .count()
    }
}

/// Values used on the upper-bound side: exact values as they are, Monte
/// Carlo values inflated by [`INFLATION_SIGMAS`] standard errors.
pub fn inflated_volumes(vks: &[IntrinsicVolumeEstimate]) -> Vec<f64> {
    vks.iter().map(|v| v.upper(INFLATION_SIGMAS)).collect()
}

pub fn bound_report(
    body: &ConvexBodySpec,
    t_grid: &[f64],
    mc_samples: usize,
    sampling: &SamplingOptions,
    rng: &RandomStream,
) -> Result<BoundReport> {
    for &t in t_grid {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::invalid(format!("scale t must be positive, got {t}")));
        }
    }
    let vks = intrinsic_volumes(body, mc_samples, rng)?;
    let upper_vks = inflated_volumes(&vks);
    let point_vks: Vec<f64> = vks.iter().map(|v| v.value).collect();
    let mut base_flags = Vec::new();
    if vks.iter().any(|v| matches!(v.method, Method::KubotaMc | Method::TsirelsonMc | Method::RademacherMc | Method::GaussianMc)) {
        base_flags.push(BoundFlag::McInflated);
    }
    if vks.iter().any(|v| v.method == Method::AfBound) {
        base_flags.push(BoundFlag::AfBound);
    }
    if body.dim() >= 5 {
        base_flags.push(BoundFlag::ConjectureDisproved);
    }
    let samples = BodySamples::new(body, sampling)?;
    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let lower = samples.lower_bound(t, sampling)?;
            let upper = l2_upper_bound(&upper_vks, t);
            let mut flags = base_flags.clone();
            if lower.source == LowerSource::UniformWeights {
                flags.push(BoundFlag::UniformLower);
            }
            if lower.value > upper {
                flags.push(BoundFlag::Violation);
            }
            Ok(BoundRow {
                t,
                lower: lower.value,
                upper,
                conjecture_ref: conjecture_reference(&point_vks, t),
                lower_points: lower.points,
                flags,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport {
        intrinsic_volumes: vks,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallTRow {
    pub t: f64,
    pub lower: f64,
    pub series_upper: f64,
    pub l2_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallTReport {
    /// `V_1` used in the series bound (inflated when estimated).
    pub v1: f64,
    pub rows: Vec<SmallTRow>,
    /// Largest distance from 1 of either bound at the smallest `t`.
    pub max_deviation: f64,
}

/// Lower and upper bounds on `Mag(tK)` along a decreasing sequence of
/// scales; both tend to 1.
pub fn small_t_limit_check(
    body: &ConvexBodySpec,
    ts: &[f64],
    mc_samples: usize,
    sampling: &SamplingOptions,
    rng: &RandomStream,
) -> Result<SmallTReport> {
    if ts.is_empty() {
        return Err(Error::invalid("need at least one scale"));
    }
    let vks = intrinsic_volumes(body, mc_samples, rng)?;
    let upper_vks = inflated_volumes(&vks);
    let v1 = upper_vks.get(1).copied().unwrap_or(0.0);
    let samples = BodySamples::new(body, sampling)?;
    let rows = ts
        .iter()
        .map(|&t| {
            Ok(SmallTRow {
                t,
                lower: samples.lower_bound(t, sampling)?.value,
                series_upper: gb_series_bound(v1, t, DEFAULT_SERIES_TOLERANCE)?,
                l2_upper: l2_upper_bound(&upper_vks, t),
            })
        })
        .collect::<Result<Vec<SmallTRow>>>()?;
    let smallest = rows
        .iter()
        .min_by(|a, b| a.t.total_cmp(&b.t))
        .expect("rows are nonempty");
    let max_deviation = (smallest.lower - 1.0).abs().max((smallest.series_upper - 1.0).abs());
    Ok(SmallTReport {
        v1,
        rows,
        max_deviation,
    })
}

// ---------------------------------------------------------------------------
// Sections and the slope sandwich.

/// A `k`-ball of radius `inradius` centred at `point` inside the affine
/// plane `point + span(frame)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InradiusSection {
    pub k: usize,
    pub point: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
    pub inradius: f64,
}

impl InradiusSection {
    pub fn new(point: Vec<f64>, frame: Vec<Vec<f64>>, inradius: f64) -> Result<Self> {
        let k = frame.len();
        if k.is_multiple_of(2) {
            return Err(Error::invalid(format!("section dimension must be odd, got {k}")));
        }
        if !(inradius > 0.0 && inradius.is_finite()) {
            return Err(Error::invalid(format!("inradius must be positive, got {inradius}")));
        }
        let d = point.len();
        for (i, u) in frame.iter().enumerate() {
            if u.len() != d {
                return Err(Error::invalid(format!("frame vector {i} has the wrong dimension")));
            }
            for (j, v) in frame.iter().enumerate().take(i + 1) {
                let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot - expected).abs() > 1e-9 {
                    return Err(Error::invalid("section frame is not orthonormal"));
                }
            }
        }
        Ok(InradiusSection {
            k,
            point,
            frame,
            inradius,
        })
    }

    /// `‖P_E u‖` for the orthogonal projection onto the frame span.
    fn projected_norm(&self, u: &[f64]) -> f64 {
        self.frame
            .iter()
            .map(|f| f.iter().zip(u).map(|(a, b)| a * b).sum::<f64>().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Support function of the section ball in direction `u`.
    fn support(&self, u: &[f64]) -> f64 {
        self.point.iter().zip(u).map(|(a, b)| a * b).sum::<f64>() + self.inradius * self.projected_norm(u)
    }
}

/// How containment of a section ball was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainmentCheck {
    /// Every facet halfspace (or the ball itself) was tested.
    Exact,
    /// Support functions compared at sampled directions only.
    SampledDirections,
}

/// Checks that the section ball lies in the body.
pub fn check_section(
    body: &ConvexBodySpec,
    section: &InradiusSection,
    index: usize,
) -> Result<ContainmentCheck> {
    if section.point.len() != body.dim() {
        return Err(Error::invalid(format!(
            "section {index} lives in dimension {}, body in {}",
            section.point.len(),
            body.dim()
        )));
    }
    let scale = body.enclosing_radius()?.max(1.0);
    let tol = CONTAINMENT_TOLERANCE * scale;
    if let ConvexBodySpec::Ball { radius, .. } = body {
        let p2: f64 = section.point.iter().map(|v| v * v).sum();
        let reach = (p2 + 2.0 * section.inradius * section.projected_norm(&section.point)
            + section.inradius * section.inradius)
            .sqrt();
        return if reach <= radius + tol {
            Ok(ContainmentCheck::Exact)
        } else {
            Err(Error::SectionNotContained { index })
        };
    }
    if let Some(hs) = exact_halfspaces(body)? {
        return if hs.iter().all(|(a, b)| section.support(a) <= b + tol) {
            Ok(ContainmentCheck::Exact)
        } else {
            Err(Error::SectionNotContained { index })
        };
    }
    let vertices = body.vertices()?.expect("non-ball bodies have vertices");
    let d = body.dim();
    let stream = RandomStream::new(crate::rng::DEFAULT_SEED, index as u64);
    let mut rng = stream.rng();
    let axes = (0..d).flat_map(|i| {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        let neg = e.iter().map(|v| -v).collect::<Vec<f64>>();
        [e, neg]
    });
    let frame_dirs = section
        .frame
        .iter()
        .flat_map(|f| [f.clone(), f.iter().map(|v| -v).collect()]);
    let random = (0..SAMPLED_DIRECTIONS).map(|_| {
        let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        g.into_iter().map(|v| v / n).collect::<Vec<f64>>()
    });
    let dirs: Vec<Vec<f64>> = axes.chain(frame_dirs).chain(random).collect();
    for u in &dirs {
        let h = vertices
            .iter()
            .map(|v| v.iter().zip(u).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        if section.support(u) > h + tol {
            return Err(Error::SectionNotContained { index });
        }
    }
    Ok(ContainmentCheck::SampledDirections)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionSlope {
    pub index: usize,
    pub k: usize,
    pub inradius: f64,
    pub containment: ContainmentCheck,
    /// `V_1(B^k)/2` exactly, from the derivative of the ball formula.
    pub ball_slope: String,
    /// `ball_slope · inradius`.
    pub lower_slope: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeSandwich {
    /// `V_1(K)/2`, inflated when estimated.
    pub upper_slope: f64,
    pub sections: Vec<SectionSlope>,
    pub t: f64,
    /// `(Mag_lower(tK) − 1)/t` from a finite sample; no limit is claimed.
    pub finite_difference_slope: f64,
}

impl DerivativeSandwich {
    pub fn all_hold(&self) -> bool {
        self.sections.iter().all(|s| s.holds)
    }
}

/// Per-section lower slopes `V_1(B^k)/2·inrad` against `V_1(K)/2`.
pub fn derivative_sandwich(
    body: &ConvexBodySpec,
    sections: &[InradiusSection],
    t: f64,
    mc_samples: usize,
    sampling: &SamplingOptions,
    rng: &RandomStream,
) -> Result<DerivativeSandwich> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("scale t must be positive, got {t}")));
    }
    let vks = intrinsic_volumes(body, mc_samples, rng)?;
    let upper_slope = vks
        .get(1)
        .map(|v| v.upper(INFLATION_SIGMAS) / 2.0)
        .unwrap_or(0.0);
    let rows = sections
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let containment = check_section(body, s, index)?;
            let ball = ball_magnitude_function(s.k as u32)?;
            let slope = derivative_at_zero(&ball);
            let lower_slope = crate::arith::to_f64(&slope) * s.inradius;
            Ok(SectionSlope {
                index,
                k: s.k,
                inradius: s.inradius,
                containment,
                ball_slope: slope.to_string(),
                lower_slope,
                holds: lower_slope <= upper_slope * (1.0 + 1e-12),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lower = BodySamples::new(body, sampling)?.lower_bound(t, sampling)?;
    Ok(DerivativeSandwich {
        upper_slope,
        sections: rows,
        t,
        finite_difference_slope: (lower.value - 1.0) / t,
    })
}

/// Exact slope `V_1(B^k)/2` for odd `k`, as a rational.
pub fn ball_slope(k: u32) -> Result<ExactRational> {
    Ok(derivative_at_zero(&ball_magnitude_function(k)?))
}

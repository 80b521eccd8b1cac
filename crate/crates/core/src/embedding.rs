//! The Rademacher embedding of `ℓ2^d` into `ℓ1` over sign patterns.
//!
//! A sign pattern `x ∈ Ω_{d,n} = ({−1,1}^n)^d` is stored as the bits of a
//! `u64`: bit `i·n + j` set means `X_{i,j} = −1`. The embedding sends `y` to
//! the function `x ↦ ⟨y, S(x)⟩` with `S_i(x) = n^{−1/2} Σ_j X_{i,j}`; the
//! rescaled map `T̃ = √(π/2)·2^{−nd}·T` is close to an isometry into `ℓ1`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::body::ConvexBodySpec;
use crate::error::{Error, Result};
use crate::intrinsic::{
    check_projection, exact_intrinsic_volumes, monte_carlo, ImageBody, IntrinsicVolumeEstimate,
    Method,
};
use crate::rng::RandomStream;
use crate::special::{factorial_f64, omega};

/// Largest `n·d` for which the full table over `Ω_{d,n}` is built.
pub const MAX_EXHAUSTIVE_BITS: usize = 24;

const CHUNK: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignSpace {
    pub d: usize,
    pub n: usize,
}

impl SignSpace {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(Error::invalid(format!("d and n must be positive, got d={d}, n={n}")));
        }
        Ok(SignSpace { d, n })
    }

    pub fn bits(&self) -> usize {
        self.d * self.n
    }

    /// `|Ω_{d,n}| = 2^{nd}`, or an error past the exhaustive cap.
    pub fn size(&self) -> Result<u64> {
        if self.bits() > MAX_EXHAUSTIVE_BITS {
            return Err(Error::ResourceLimit(format!(
                "n·d = {} exceeds the exhaustive cap {MAX_EXHAUSTIVE_BITS}",
                self.bits()
            )));
        }
        Ok(1u64 << self.bits())
    }

    /// `S(x)`, the vector of normalized coordinate sums of a pattern.
    pub fn sums(&self, pattern: u64) -> Vec<f64> {
        let mask = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        let scale = (self.n as f64).sqrt();
        (0..self.d)
            .map(|i| {
                let minus = ((pattern >> (i * self.n)) & mask).count_ones() as f64;
                (self.n as f64 - 2.0 * minus) / scale
            })
            .collect()
    }

    fn value(&self, y: &[f64], pattern: u64) -> f64 {
        self.sums(pattern).iter().zip(y).map(|(s, a)| s * a).sum()
    }

    fn check_point(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.d {
            return Err(Error::invalid(format!(
                "point has dimension {}, expected {}",
                y.len(),
                self.d
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("point has non-finite coordinates"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scaling {
    /// `T(y)(x) = ⟨y, S(x)⟩`.
    T,
    /// `T̃ = √(π/2)·2^{−nd}·T`.
    TTilde,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddedVector {
    pub space: SignSpace,
    pub scaling: Scaling,
    /// Indexed by pattern.
    pub values: Vec<f64>,
}

impl EmbeddedVector {
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }
}

fn tilde_factor(space: SignSpace) -> f64 {
    (std::f64::consts::PI / 2.0).sqrt() * (-(space.bits() as f64)).exp2()
}

/// The full table of `T(y)` or `T̃(y)` over `Ω_{d,n}`.
pub fn embed(y: &[f64], space: SignSpace, scaling: Scaling) -> Result<EmbeddedVector> {
    space.check_point(y)?;
    let size = space.size()?;
    let factor = match scaling {
        Scaling::T => 1.0,
        Scaling::TTilde => tilde_factor(space),
    };
    let values = (0..size).map(|x| factor * space.value(y, x)).collect();
    Ok(EmbeddedVector {
        space,
        scaling,
        values,
    })
}

/// `‖T̃(y)‖_{ℓ1}`, summed over every pattern without storing the table.
pub fn embedded_l1_norm(y: &[f64], space: SignSpace) -> Result<f64> {
    space.check_point(y)?;
    let size = space.size()?;
    let chunks = size.div_ceil(CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(size);
            (lo..hi).map(|x| space.value(y, x).abs()).sum::<f64>()
        })
        .collect();
    Ok(tilde_factor(space) * partial.iter().sum::<f64>())
}

fn l2_norm(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `‖T̃(y)‖_{ℓ1} / ‖y‖_2`, exactly over all of `Ω_{d,n}`.
pub fn distortion_ratio(y: &[f64], n: usize) -> Result<f64> {
    let space = SignSpace::new(y.len(), n)?;
    let norm = l2_norm(y);
    if norm == 0.0 {
        return Err(Error::invalid("distortion ratio needs a nonzero point"));
    }
    Ok(embedded_l1_norm(y, space)? / norm)
}

/// Sampled counterpart of [`distortion_ratio`] for `n·d` past the
/// exhaustive cap: `√(π/2)·E|⟨y, S⟩| / ‖y‖_2` with its standard error.
pub fn distortion_ratio_sampled(
    y: &[f64],
    n: usize,
    samples: usize,
    rng: &RandomStream,
) -> Result<(f64, f64)> {
    let space = SignSpace::new(y.len(), n)?;
    space.check_point(y)?;
    let norm = l2_norm(y);
    if norm == 0.0 {
        return Err(Error::invalid("distortion ratio needs a nonzero point"));
    }
    let c = (std::f64::consts::PI / 2.0).sqrt() / norm;
    monte_carlo(samples, rng, |r| {
        let s: f64 = y.iter().map(|a| a * rademacher_entry(r, n)).sum();
        c * s.abs()
    })
}

/// `[1 − 4/√n, 1 + 4/√n]`.
pub fn lemma_bounds(n: usize) -> (f64, f64) {
    let e = 4.0 / (n as f64).sqrt();
    (1.0 - e, 1.0 + e)
}

/// `(3/√n)·Σ|y_i|³` for a unit vector `y`; at most `3/√n`.
pub fn berry_esseen_budget(y: &[f64], n: usize) -> f64 {
    3.0 / (n as f64).sqrt() * y.iter().map(|v| v.abs().powi(3)).sum::<f64>()
}

/// One draw of `n^{−1/2} Σ_{j≤n} ε_j` with independent signs `ε_j`.
pub fn rademacher_entry(rng: &mut ChaCha8Rng, n: usize) -> f64 {
    let mut minus = 0u32;
    let mut left = n;
    while left > 0 {
        let take = left.min(64);
        let bits: u64 = rng.random();
        let bits = if take == 64 { bits } else { bits & ((1u64 << take) - 1) };
        minus += bits.count_ones();
        left -= take;
    }
    (n as f64 - 2.0 * minus as f64) / (n as f64).sqrt()
}

/// A `d × k` matrix of independent [`rademacher_entry`] draws, stored by
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RademacherMatrix {
    pub n: usize,
    pub columns: Vec<Vec<f64>>,
}

impl RademacherMatrix {
    pub fn sample(rng: &mut ChaCha8Rng, d: usize, k: usize, n: usize) -> Self {
        let columns = (0..k)
            .map(|_| (0..d).map(|_| rademacher_entry(rng, n)).collect())
            .collect();
        RademacherMatrix { n, columns }
    }
}

fn vk_prime_constant(k: usize) -> f64 {
    (std::f64::consts::PI / 2.0).powf(k as f64 / 2.0) / factorial_f64(k as u32)
}

/// `V'_k(T̃(K)) = (1/k!)(π/2)^{k/2}·E vol_k(M_nᵀ K)` by Monte Carlo over
/// Rademacher matrices `M_n`.
pub fn estimate_vk_prime(
    body: &ConvexBodySpec,
    k: usize,
    n: usize,
    samples: usize,
    rng: &RandomStream,
) -> Result<IntrinsicVolumeEstimate> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    image_estimate(body, k, samples, rng, Method::RademacherMc, |r, d| {
        RademacherMatrix::sample(r, d, k, n).columns
    })
}

/// The Gaussian limit of [`estimate_vk_prime`]; its mean is
/// `ω_k/2^k·V_k(K)`.
pub fn gaussian_limit_reference(
    body: &ConvexBodySpec,
    k: usize,
    samples: usize,
    rng: &RandomStream,
) -> Result<IntrinsicVolumeEstimate> {
    image_estimate(body, k, samples, rng, Method::GaussianMc, |r, d| {
        (0..k)
            .map(|_| (0..d).map(|_| r.sample(StandardNormal)).collect())
            .collect()
    })
}

fn image_estimate<F>(
    body: &ConvexBodySpec,
    k: usize,
    samples: usize,
    rng: &RandomStream,
    method: Method,
    draw: F,
) -> Result<IntrinsicVolumeEstimate>
where
    F: Fn(&mut ChaCha8Rng, usize) -> Vec<Vec<f64>> + Sync,
{
    let image = ImageBody::new(body)?;
    if k == 0 {
        return Ok(IntrinsicVolumeEstimate::exact(0, 1.0));
    }
    let d = image.dim();
    check_projection(d, k)?;
    let c = vk_prime_constant(k);
    let (value, stderr) = monte_carlo(samples, rng, |r| c * image.image_volume(&draw(r, d)))?;
    Ok(IntrinsicVolumeEstimate {
        k,
        value,
        stderr,
        method,
    })
}

/// `ω_k/2^k·V_k(K)` when `V_k` has a closed form.
pub fn exact_limit(body: &ConvexBodySpec, k: usize) -> Result<Option<f64>> {
    Ok(exact_intrinsic_volumes(body)?
        .and_then(|vs| vs.get(k).map(|v| omega(k as u32) / (k as f64).exp2() * v.value)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
    pub target_stderr: f64,
    /// `|estimate − target|` in units of the joint standard error.
    pub z: f64,
}

/// [`estimate_vk_prime`] for each `n`, against the exact limit when known
/// and the Gaussian reference otherwise.
pub fn convergence_table(
    body: &ConvexBodySpec,
    k: usize,
    ns: &[usize],
    samples: usize,
    rng: &RandomStream,
) -> Result<Vec<ConvergenceRow>> {
    let (target, target_stderr) = match exact_limit(body, k)? {
        Some(v) => (v, 0.0),
        None => {
            let g = gaussian_limit_reference(body, k, samples, &rng.substream(u64::MAX))?;
            (g.value, g.stderr)
        }
    };
    ns.iter()
        .enumerate()
        .map(|(i, &n)| {
            let e = estimate_vk_prime(body, k, n, samples, &rng.substream(i as u64))?;
            let joint = e.stderr.hypot(target_stderr);
            let gap = (e.value - target).abs();
            Ok(ConvergenceRow {
                n,
                estimate: e.value,
                stderr: e.stderr,
                target,
                target_stderr,
                z: if joint > 0.0 { gap / joint } else if gap == 0.0 { 0.0 } else { f64::INFINITY },
            })
        })
        .collect()
}

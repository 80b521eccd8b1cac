//! Unit-ball volumes, generalized binomial coefficients and factorials.

use num_bigint::BigInt;
use num_traits::One;
use statrs::function::gamma::ln_gamma;

use crate::arith::{integer, ExactRational};

/// Products are exact enough below this dimension; log-gamma above it.
const DIRECT_OMEGA_MAX: u32 = 32;

/// Volume of the Euclidean unit ball in dimension `n`,
/// `π^{n/2} / Γ(1 + n/2)`. Small dimensions use the finite products
/// `π^j/j!` and `2^{j+1}π^j/(2j+1)!!`, so `ω_0 = 1` and `ω_1 = 2` come out
/// exact; larger ones go through the log-gamma function.
pub fn omega(n: u32) -> f64 {
    if n > DIRECT_OMEGA_MAX {
        return ln_omega(n).exp();
    }
    let pi = std::f64::consts::PI;
    let j = n / 2;
    let pow = (0..j).fold(1.0, |acc, _| acc * pi);
    if n.is_multiple_of(2) {
        pow / factorial_f64(j)
    } else {
        let double_fact = (0..=j).fold(1.0, |acc, i| acc * (2 * i + 1) as f64);
        pow * 2f64.powi(j as i32 + 1) / double_fact
    }
}

/// `ω_n = c·π^e` with rational `c` and `e = ⌊n/2⌋`: `c = 1/j!` for `n = 2j`
/// and `c = 2^{j+1}/(2j+1)!!` for `n = 2j + 1`.
pub fn omega_pi_form(n: u32) -> (ExactRational, u32) {
    let j = n / 2;
    let c = if n.is_multiple_of(2) {
        ExactRational::one() / ExactRational::from_integer(factorial(j))
    } else {
        let double_fact = (0..=j).fold(BigInt::one(), |acc, i| acc * BigInt::from(2 * i + 1));
        ExactRational::new(BigInt::one() << (j + 1) as usize, double_fact)
    };
    (c, j)
}

pub fn ln_omega(n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let half = n as f64 / 2.0;
    half * std::f64::consts::PI.ln() - ln_gamma(1.0 + half)
}

/// Generalized binomial coefficient `x(x-1)⋯(x-k+1)/k!` for rational `x`,
/// with `binom(x, 0) = 1`.
pub fn half_binomial(x: &ExactRational, k: u32) -> ExactRational {
    let mut acc = ExactRational::one();
    for i in 0..k {
        acc *= x - integer(i as i64);
        acc /= integer(i as i64 + 1);
    }
    acc
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn factorial_f64(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Ordinary binomial coefficient as a float; exact for the small arguments
/// used here.
pub fn binomial_f64(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

//! The G⁰ intensity distribution: density, moments, Fisher information,
//! and an exact sampler.
//!
//! A G⁰(α, γ, L) intensity is the product of a reciprocal-Gamma
//! backscatter and a Gamma speckle component: texture α < 0 (near 0 =
//! extremely textured, below −6 = practically textureless), scale γ > 0,
//! and L ≥ 1 equivalent looks. Its density is
//!
//! ```text
//! f(z) = L^L Γ(L−α) / (γ^α Γ(−α) Γ(L)) · z^(L−1) / (γ + zL)^(L−α),  z ≥ 0.
//! ```

use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Gamma, Open01, StandardNormal};

use crate::error::{domain, Result};
use crate::quad::{integrate, QuadOptions};
use crate::scalar::Scalar;
use crate::special::{ln_gamma, trigamma};

/// Parameters (α, γ, L) of a G⁰ intensity law.
///
/// Looks are stored as a real ≥ 1 so estimated equivalent-numbers-of-looks
/// are representable; code that needs an integer L (closed forms, finite
/// sums) tests for integrality with a 1e-9 tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T = f64> {
    alpha: T,
    gamma: T,
    looks: T,
}

impl<T: Scalar> ModelParams<T> {
    /// Validated constructor: requires α < 0, γ > 0, L ≥ 1, all finite.
    pub fn new(alpha: T, gamma: T, looks: T) -> Result<Self> {
        if !(alpha < T::zero()) || !alpha.is_finite() {
            return Err(domain!("texture alpha must be negative, got {alpha}"));
        }
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(domain!("scale gamma must be positive, got {gamma}"));
        }
        if !(looks >= T::one()) || !looks.is_finite() {
            return Err(domain!("looks must be >= 1, got {looks}"));
        }
        Ok(Self { alpha, gamma, looks })
    }

    /// Constructor without validation, for values already known to satisfy
    /// the invariants.
    pub fn new_unchecked(alpha: T, gamma: T, looks: T) -> Self {
        Self { alpha, gamma, looks }
    }

    /// Texture parameter α < 0.
    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Scale parameter γ > 0.
    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Equivalent number of looks L ≥ 1.
    pub fn looks(&self) -> T {
        self.looks
    }

    /// Log of the density's z-independent factor:
    /// `L·ln L + ln Γ(L−α) − α·ln γ − ln Γ(−α) − ln Γ(L)`.
    pub(crate) fn log_norm(&self) -> T {
        let (a, g, l) = (self.alpha, self.gamma, self.looks);
        l * l.ln() + ln_gamma(l - a).expect("L - alpha > 0")
            - a * g.ln()
            - ln_gamma(-a).expect("-alpha > 0")
            - ln_gamma(l).expect("L > 0")
    }

    /// Density at `z ≥ 0`.
    ///
    /// At z = 0 the density is −α/γ for L = 1 and 0 for L > 1.
    ///
    /// # Errors
    /// Domain error for z < 0 or non-finite z.
    pub fn pdf(&self, z: T) -> Result<T> {
        if !(z >= T::zero()) || !z.is_finite() {
            return Err(domain!("pdf requires z >= 0, got {z}"));
        }
        if z == T::zero() {
            return Ok(if self.looks == T::one() {
                -self.alpha / self.gamma
            } else {
                T::zero()
            });
        }
        Ok(self.log_pdf(z)?.exp())
    }

    /// Log-density at `z > 0`, stable against overflow for extreme z.
    ///
    /// # Errors
    /// Domain error for z ≤ 0 or non-finite z.
    pub fn log_pdf(&self, z: T) -> Result<T> {
        if !(z > T::zero()) || !z.is_finite() {
            return Err(domain!("log_pdf requires z > 0, got {z}"));
        }
        let (a, g, l) = (self.alpha, self.gamma, self.looks);
        Ok(self.log_norm() + (l - T::one()) * z.ln() - (l - a) * (g + z * l).ln())
    }

    /// r-th raw moment: `(γ/L)^r · Γ(−α−r)/Γ(−α) · Γ(L+r)/Γ(L)` when
    /// α < −r, and +∞ otherwise (heavy tails make high moments diverge).
    ///
    /// # Errors
    /// Domain error for r = 0.
    pub fn moment(&self, r: u32) -> Result<T> {
        if r == 0 {
            return Err(domain!("moment order must be >= 1"));
        }
        let rr = T::from_count(r as usize);
        let (a, g, l) = (self.alpha, self.gamma, self.looks);
        if !(a < -rr) {
            return Ok(T::infinity());
        }
        let log_m = rr * (g / l).ln() + ln_gamma(-a - rr)? - ln_gamma(-a)?
            + ln_gamma(l + rr)?
            - ln_gamma(l)?;
        Ok(log_m.exp())
    }

    /// Fisher information matrix in (α, γ) coordinates.
    pub fn fisher_matrix(&self) -> FisherMatrix<T> {
        let (a, g, l) = (self.alpha, self.gamma, self.looks);
        let one = T::one();
        let g11 = trigamma(-a).expect("-alpha > 0") - trigamma(l - a).expect("L - alpha > 0");
        let g12 = l / (l * g - a * g);
        let g22 = -l * a / ((l - a + one) * g * g);
        FisherMatrix {
            g11,
            g12,
            g21: g12,
            g22,
        }
    }

    /// Draw `n` i.i.d. values, deterministically for a given seed.
    ///
    /// Construction: Z = (γ/L)·G₁/G₂ with G₁ ~ Gamma(L, 1) and
    /// G₂ ~ Gamma(−α, 1) independent — the exact multiplicative
    /// speckle-times-backscatter form of the model.
    pub fn sample(&self, n: usize, seed: u64) -> IntensitySample<T>
    where
        StandardNormal: Distribution<T>,
        Exp1: Distribution<T>,
        Open01: Distribution<T>,
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sampler = Sampler::new(self);
        let values = (0..n).map(|_| sampler.draw(&mut rng)).collect();
        IntensitySample { values }
    }
}

/// Streaming G⁰ sampler for callers that manage their own RNG (strip
/// simulation draws from two laws out of one deterministic stream).
pub struct Sampler<T>
where
    T: Scalar,
    StandardNormal: Distribution<T>,
    Exp1: Distribution<T>,
    Open01: Distribution<T>,
{
    scale: T,
    speckle: Gamma<T>,
    backscatter: Gamma<T>,
}

impl<T: Scalar> Sampler<T>
where
    StandardNormal: Distribution<T>,
    Exp1: Distribution<T>,
    Open01: Distribution<T>,
{
    /// Build the two Gamma generators for the given law.
    pub fn new(params: &ModelParams<T>) -> Self {
        let one = T::one();
        Self {
            scale: params.gamma / params.looks,
            speckle: Gamma::new(params.looks, one).expect("looks >= 1"),
            backscatter: Gamma::new(-params.alpha, one).expect("-alpha > 0"),
        }
    }

    /// One draw. Regenerates on the (measure-zero, but floating-point
    /// reachable) degenerate outcomes so every value is finite and > 0.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        loop {
            let g1: T = self.speckle.sample(rng);
            let g2: T = self.backscatter.sample(rng);
            let z = self.scale * g1 / g2;
            if z.is_finite() && z > T::zero() {
                return z;
            }
        }
    }
}

/// Fisher information matrix of a G⁰ law in (α, γ) coordinates.
///
/// g11 depends only on (α, L); g22 scales as γ⁻². Positive definiteness
/// over the whole domain is not asserted — only g11 > 0 and g22 > 0 hold
/// structurally — so [`FisherMatrix::determinant`] is provided for
/// diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherMatrix<T = f64> {
    pub g11: T,
    pub g12: T,
    pub g21: T,
    pub g22: T,
}

impl<T: Scalar> FisherMatrix<T> {
    /// g11·g22 − g12·g21, for diagnosing near-singular geometry.
    pub fn determinant(&self) -> T {
        self.g11 * self.g22 - self.g12 * self.g21
    }
}

/// Ordered, validated collection of intensity observations.
///
/// Invariants: at least one value, all values finite and ≥ 0, at least one
/// value > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensitySample<T = f64> {
    values: Vec<T>,
}

impl<T: Scalar> IntensitySample<T> {
    /// Validated constructor.
    ///
    /// # Errors
    /// Domain error on an empty collection, any negative or non-finite
    /// value, or an all-zero collection.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain!("intensity sample must not be empty"));
        }
        let mut any_positive = false;
        for (i, &v) in values.iter().enumerate() {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(domain!("intensity sample value {v} at index {i} is invalid"));
            }
            if v > T::zero() {
                any_positive = true;
            }
        }
        if !any_positive {
            return Err(domain!("intensity sample must contain a positive value"));
        }
        Ok(Self { values })
    }

    /// Constructor without validation, for values known to satisfy the
    /// invariants (e.g. fresh sampler output).
    pub fn new_unchecked(values: Vec<T>) -> Self {
        Self { values }
    }

    /// The observations, in order.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Number of observations.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when the sample has no observations (unreachable through the
    /// validated constructor).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Arithmetic mean.
    pub fn mean(&self) -> T {
        let sum = self
            .values
            .iter()
            .fold(T::zero(), |acc, &v| acc + v);
        sum / T::from_count(self.values.len())
    }
}

/// Divide every observation by `gamma_hat`.
///
/// If the input follows G⁰(α, γ ≈ gamma_hat, L), the output is
/// approximately G⁰(α, 1, L): γ is a pure scale parameter.
///
/// # Errors
/// Domain error for `gamma_hat ≤ 0` or non-finite.
pub fn scale_transform<T: Scalar>(
    sample: &IntensitySample<T>,
    gamma_hat: T,
) -> Result<IntensitySample<T>> {
    if !(gamma_hat > T::zero()) || !gamma_hat.is_finite() {
        return Err(domain!("scale_transform requires gamma_hat > 0, got {gamma_hat}"));
    }
    Ok(IntensitySample {
        values: sample.values.iter().map(|&v| v / gamma_hat).collect(),
    })
}

/// One-sample Kolmogorov–Smirnov statistic of `sample` against the G⁰ law
/// `params`, with the model CDF built by integrating the density over the
/// gaps between consecutive order statistics.
///
/// Returns sup over order statistics of max(|i/n − F(z_i)|,
/// |(i−1)/n − F(z_i)|).
pub fn ks_statistic<T: Scalar>(params: &ModelParams<T>, sample: &IntensitySample<T>) -> T {
    let mut sorted = sample.values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("sample values are finite"));

    let log_norm = params.log_norm();
    let (a, g, l) = (params.alpha, params.gamma, params.looks);
    let one = T::one();
    let density = |z: T| {
        if z <= T::zero() {
            if l == one {
                -a / g
            } else {
                T::zero()
            }
        } else {
            (log_norm + (l - one) * z.ln() - (l - a) * (g + z * l).ln()).exp()
        }
    };

    let n = T::from_count(sorted.len());
    let seg_opts = QuadOptions {
        abs_tol: T::c(1e-11),
        max_evals: 15 * 64,
    };
    let mut cdf = T::zero();
    let mut lo = T::zero();
    let mut d_max = T::zero();
    for (i, &z) in sorted.iter().enumerate() {
        cdf = cdf + integrate(density, lo, z, seg_opts).value;
        lo = z;
        let hi_step = T::from_count(i + 1) / n - cdf;
        let lo_step = cdf - T::from_count(i) / n;
        d_max = d_max.max(hi_step.abs()).max(lo_step.abs());
    }
    d_max
}

//! Maximum-likelihood estimation of the texture/scale pair with looks known.
//!
//! The search space is α ∈ [[`ALPHA_MIN`], [`ALPHA_MAX`]] × γ > 0. Rather
//! than a generic two-dimensional quasi-Newton iteration, [`fit_ml`]
//! profiles the scale out: at fixed α the score equation in γ reduces to
//! the monotone condition
//!
//! ```text
//! Σᵢ γ/(γ + L·zᵢ) = n·(−α)/(L−α),
//! ```
//!
//! whose left side increases from 0 to n as γ sweeps (0, ∞), so γ̂(α) is a
//! bracketed Newton iteration in ln γ. Substituting γ̂(α) back leaves one
//! root-find in α on the profile score
//!
//! ```text
//! ψ(α) = n·[Ψ⁰(−α) − Ψ⁰(L−α) − ln γ̂(α)] + Σᵢ ln(γ̂(α) + L·zᵢ)
//! ```
//!
//! (the envelope theorem drops the dγ̂/dα term), handled by Brent's method
//! in ln(−α) with explicit boundary checks. Estimates that hit an α bound
//! are reported with `clamped = true`, never silently.

use crate::error::{domain, Error, Result};
use crate::model::{IntensitySample, ModelParams};
use crate::scalar::Scalar;
use crate::special::{digamma, ln_gamma, trigamma};

/// Lower α search bound; textures this far negative are practically
/// indistinguishable from textureless clutter.
pub const ALPHA_MIN: f64 = -20.0;

/// Upper α search bound; the first moment diverges at and above −1, and
/// extremely textured returns estimate at this edge.
pub const ALPHA_MAX: f64 = -1.0;

/// Outcome of a likelihood maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult<T = f64> {
    /// Texture estimate, within [[`ALPHA_MIN`], [`ALPHA_MAX`]].
    pub alpha_hat: T,
    /// Scale estimate, > 0.
    pub gamma_hat: T,
    /// Log-likelihood at the returned estimates.
    pub log_likelihood: T,
    /// True when the optimizer met its step tolerance (boundary optima
    /// count as converged); false reports best-so-far values.
    pub converged: bool,
    /// Total inner + outer iterations spent.
    pub iterations: usize,
    /// True when `alpha_hat` sits on a search bound.
    pub clamped: bool,
}

/// Σᵢ log-density of the sample under `params`.
///
/// Computed from sufficient statistics rather than per-point `log_pdf`
/// calls. A zero observation contributes the log of the density at zero:
/// −∞ for L > 1 (reported as a −∞ likelihood, not an error) and the finite
/// boundary value for L = 1.
pub fn log_likelihood<T: Scalar>(sample: &IntensitySample<T>, params: &ModelParams<T>) -> T {
    ll_on(
        sample.values(),
        params.alpha(),
        params.gamma(),
        params.looks(),
    )
}

/// Joint maximum-likelihood fit of (α, γ) with `looks` known.
///
/// # Errors
/// Sample-too-small for n < 20; domain error for looks < 1. Optimizer
/// trouble is never an exception: it comes back as `converged = false`
/// with the best values found.
pub fn fit_ml<T: Scalar>(sample: &IntensitySample<T>, looks: T) -> Result<FitResult<T>> {
    fit_ml_on(sample.values(), looks)
}

/// One-dimensional maximum-likelihood fit of α with γ held fixed
/// (normally at 1, after dividing the data by a scale estimate).
///
/// The log-likelihood is strictly concave in α here — its second
/// derivative is −n·[Ψ¹(−α) − Ψ¹(L−α)] < 0 — so a safeguarded Newton
/// iteration with the exact derivative converges fast and reliably.
///
/// # Errors
/// As [`fit_ml`], plus a domain error for gamma ≤ 0.
pub fn fit_alpha_fixed_gamma<T: Scalar>(
    sample: &IntensitySample<T>,
    gamma: T,
    looks: T,
) -> Result<FitResult<T>> {
    fit_alpha_fixed_gamma_on(sample.values(), gamma, looks)
}

/// Moment estimator of the equivalent number of looks: mean²/variance of
/// a visually homogeneous region.
///
/// # Errors
/// Sample-too-small for n < 50; degenerate-variance when the sample is
/// (numerically) constant.
pub fn estimate_enl<T: Scalar>(sample: &IntensitySample<T>) -> Result<T> {
    let z = sample.values();
    if z.len() < 50 {
        return Err(Error::SampleTooSmall { n: z.len(), min: 50 });
    }
    let n = T::from_count(z.len());
    let mean = z.iter().fold(T::zero(), |acc, &v| acc + v) / n;
    let ss = z.iter().fold(T::zero(), |acc, &v| {
        let d = v - mean;
        acc + d * d
    });
    let var = ss / (n - T::one());
    if !(var > T::zero()) || !var.is_finite() {
        return Err(Error::DegenerateVariance);
    }
    Ok(mean * mean / var)
}

// ---------------------------------------------------------------------------
// Slice-level implementations. Edge detection fits both halves of every
// candidate split; taking slices here lets it work on sub-ranges of a
// reordered strip without copying.
// ---------------------------------------------------------------------------

/// Log-likelihood from sufficient statistics: n·C(α,γ,L) + (L−1)·Σln zᵢ −
/// (L−α)·Σln(γ+Lzᵢ). The Σln zᵢ term is skipped entirely at L = 1 to
/// avoid manufacturing 0·(−∞) from zero observations.
fn ll_on<T: Scalar>(z: &[T], alpha: T, gamma: T, looks: T) -> T {
    let n = T::from_count(z.len());
    let one = T::one();
    let norm = looks * looks.ln() + ln_gamma(looks - alpha).expect("L - alpha > 0")
        - ln_gamma(-alpha).expect("-alpha > 0")
        - ln_gamma(looks).expect("L > 0")
        - alpha * gamma.ln();
    let t1 = sum_ln_shifted(z, gamma, looks);
    let mut ll = n * norm - (looks - alpha) * t1;
    if looks != one {
        let t0 = z.iter().fold(T::zero(), |acc, &v| acc + v.ln());
        ll = ll + (looks - one) * t0;
    }
    ll
}

/// Σᵢ ln(γ + L·zᵢ).
fn sum_ln_shifted<T: Scalar>(z: &[T], gamma: T, looks: T) -> T {
    z.iter()
        .fold(T::zero(), |acc, &v| acc + (gamma + looks * v).ln())
}

/// Σᵢ σᵢ and Σᵢ σᵢ(1−σᵢ) for σᵢ = γ/(γ + L·zᵢ) — the value and
/// ln γ-derivative of the profiled scale equation's left side.
fn sigma_sums<T: Scalar>(z: &[T], gamma: T, looks: T) -> (T, T) {
    let one = T::one();
    let mut s = T::zero();
    let mut ds = T::zero();
    for &v in z {
        let sigma = gamma / (gamma + looks * v);
        s = s + sigma;
        ds = ds + sigma * (one - sigma);
    }
    (s, ds)
}

/// Solve Σσᵢ(γ) = target for γ by safeguarded Newton in ln γ, warm-started
/// at `warm`. The left side is strictly increasing in γ, so once a sign
/// change is bracketed the iteration cannot escape. Returns the final γ,
/// iterations spent, and whether the tolerance was met.
fn solve_gamma_hat<T: Scalar>(z: &[T], looks: T, target: T, warm: T) -> (T, usize, bool) {
    let gtol = T::c(1e-13).max(T::epsilon() * T::c(8.0));
    let mut g = warm.max(T::min_positive_value()).ln();
    let mut iters = 0usize;

    // Bracket a sign change in h(g) = Σσ − target by stepping away from
    // the warm start; h is increasing, so step down while h > 0, up while
    // h < 0.
    let mut h = sigma_sums(z, g.exp(), looks).0 - target;
    let mut lo = T::nan();
    let mut hi = T::nan();
    if h > T::zero() {
        hi = g;
    } else {
        lo = g;
    }
    let mut step = T::one();
    for _ in 0..200 {
        if !lo.is_nan() && !hi.is_nan() {
            break;
        }
        iters += 1;
        g = if hi.is_nan() { g + step } else { g - step };
        step = step + step;
        let (s2, _) = sigma_sums(z, g.exp(), looks);
        if s2 - target > T::zero() {
            hi = g;
        } else {
            lo = g;
        }
    }
    if lo.is_nan() || hi.is_nan() {
        // No sign change reachable (e.g. too many exact zeros for the
        // requested texture); report the last iterate.
        return (g.exp(), iters, false);
    }

    // Newton from the bracket edge nearest the warm start, bisecting
    // whenever the step leaves the bracket.
    g = if (g - lo).abs() < (g - hi).abs() { lo } else { hi };
    let (mut s, mut ds) = sigma_sums(z, g.exp(), looks);
    h = s - target;
    for _ in 0..100 {
        iters += 1;
        let newton = g - h / ds;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / T::c(2.0)
        };
        let delta = (next - g).abs();
        g = next;
        (s, ds) = sigma_sums(z, g.exp(), looks);
        h = s - target;
        if h > T::zero() {
            hi = g;
        } else {
            lo = g;
        }
        if delta < gtol || h == T::zero() {
            return (g.exp(), iters, true);
        }
    }
    (g.exp(), iters, false)
}

/// Profile score ψ(α) = n·[Ψ⁰(−α) − Ψ⁰(L−α) − ln γ̂] + Σln(γ̂+Lzᵢ),
/// evaluated at a given γ̂.
fn profile_score<T: Scalar>(z: &[T], alpha: T, gamma_hat: T, looks: T) -> T {
    let n = T::from_count(z.len());
    let dig = digamma(-alpha).expect("-alpha > 0") - digamma(looks - alpha).expect("L - alpha > 0");
    n * (dig - gamma_hat.ln()) + sum_ln_shifted(z, gamma_hat, looks)
}

/// Classic Brent root-finder on a bracketing interval. `fa`/`fb` are the
/// already-computed endpoint values (opposite signs). Returns the root,
/// function evaluations spent, and a convergence flag.
fn brent_root<T: Scalar>(
    mut f: impl FnMut(T) -> T,
    mut a: T,
    mut b: T,
    mut fa: T,
    mut fb: T,
    tol: T,
    max_iter: usize,
) -> (T, usize, bool) {
    let zero = T::zero();
    let half = T::c(0.5);
    let two = T::c(2.0);
    let three = T::c(3.0);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    let mut evals = 0usize;
    for _ in 0..max_iter {
        if (fb > zero && fc > zero) || (fb < zero && fc < zero) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == zero {
            return (b, evals, true);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation (secant when only two
            // points are distinct), accepted only if it lands inside the
            // bracket and shrinks fast enough.
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > zero {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b = b + d;
        } else {
            b = b + if xm > zero { tol1 } else { -tol1 };
        }
        fb = f(b);
        evals += 1;
    }
    (b, evals, false)
}

pub(crate) fn fit_ml_on<T: Scalar>(z: &[T], looks: T) -> Result<FitResult<T>> {
    if z.len() < 20 {
        return Err(Error::SampleTooSmall { n: z.len(), min: 20 });
    }
    if !(looks >= T::one()) || !looks.is_finite() {
        return Err(domain!("looks must be >= 1, got {looks}"));
    }
    let alpha_lo = T::c(ALPHA_MIN);
    let alpha_hi = T::c(ALPHA_MAX);
    let n = T::from_count(z.len());
    let mean = z.iter().fold(T::zero(), |acc, &v| acc + v) / n;

    let mut iterations = 0usize;
    let mut all_ok = true;
    let mut warm = mean; // γ₀ = mean·(−α₀−1) at the α₀ = −2 start

    // γ̂(α) and ψ(α) in one step, threading the warm start through.
    let eval = |alpha: T, warm: &mut T, iterations: &mut usize, all_ok: &mut bool| -> (T, T) {
        let target = n * (-alpha) / (looks - alpha);
        let (gamma_hat, iters, ok) = solve_gamma_hat(z, looks, target, *warm);
        *warm = gamma_hat;
        *iterations += iters + 1;
        *all_ok &= ok;
        (gamma_hat, profile_score(z, alpha, gamma_hat, looks))
    };

    let (g_hi, psi_hi) = eval(alpha_hi, &mut warm, &mut iterations, &mut all_ok);
    let (g_lo, psi_lo) = eval(alpha_lo, &mut warm, &mut iterations, &mut all_ok);

    // Candidate optima: clamped ends where the score points outward, the
    // interior stationary point when the score changes sign, and the
    // initialization point as an unconditional fallback so the result can
    // never score below the start.
    let mut candidates: Vec<(T, T, bool, bool)> = Vec::new(); // (α, γ̂, clamped, stationary)
    if psi_hi >= T::zero() {
        candidates.push((alpha_hi, g_hi, true, true));
    }
    if psi_lo <= T::zero() {
        candidates.push((alpha_lo, g_lo, true, true));
    }
    let mut brent_ok = true;
    if psi_lo > T::zero() && psi_hi < T::zero() {
        // ψ̃(a) = ψ(−eᵃ) on a ∈ [0, ln(−ALPHA_MIN)]; ψ̃(ln 20) > 0 > ψ̃(0).
        let mut warm_root = g_hi;
        let atol = T::c(2e-10).max(T::epsilon() * T::c(64.0));
        let (a_root, _evals, ok) = brent_root(
            |a: T| {
                let alpha = -a.exp();
                eval(alpha, &mut warm_root, &mut iterations, &mut all_ok).1
            },
            T::zero(),
            (-alpha_lo).ln(),
            psi_hi,
            psi_lo,
            atol,
            80,
        );
        brent_ok = ok;
        let alpha_root = (-a_root.exp()).max(alpha_lo).min(alpha_hi);
        let (g_root, _) = eval(alpha_root, &mut warm_root, &mut iterations, &mut all_ok);
        candidates.push((alpha_root, g_root, false, true));
    }
    let (g_init, _) = eval(T::c(-2.0), &mut warm, &mut iterations, &mut all_ok);
    candidates.push((T::c(-2.0), g_init, false, false));

    let mut best = (T::nan(), T::nan(), false, false);
    let mut best_ll = T::neg_infinity();
    for &(alpha, gamma, clamped, stationary) in &candidates {
        let ll = ll_on(z, alpha, gamma, looks);
        if ll > best_ll || best.0.is_nan() {
            best_ll = ll;
            best = (alpha, gamma, clamped, stationary);
        }
    }

    let (alpha_hat, gamma_hat, clamped, stationary) = best;
    Ok(FitResult {
        alpha_hat,
        gamma_hat,
        log_likelihood: best_ll,
        // The fallback start winning means no located optimum beat the
        // initialization — report that honestly as non-convergence.
        converged: all_ok && brent_ok && stationary,
        iterations,
        clamped,
    })
}

pub(crate) fn fit_alpha_fixed_gamma_on<T: Scalar>(
    z: &[T],
    gamma: T,
    looks: T,
) -> Result<FitResult<T>> {
    if z.len() < 20 {
        return Err(Error::SampleTooSmall { n: z.len(), min: 20 });
    }
    if !(looks >= T::one()) || !looks.is_finite() {
        return Err(domain!("looks must be >= 1, got {looks}"));
    }
    if !(gamma > T::zero()) || !gamma.is_finite() {
        return Err(domain!("gamma must be positive, got {gamma}"));
    }
    let alpha_lo = T::c(ALPHA_MIN);
    let alpha_hi = T::c(ALPHA_MAX);
    let n = T::from_count(z.len());
    let t1 = sum_ln_shifted(z, gamma, looks);

    // Score in α alone: d(α) = n·[Ψ⁰(−α) − Ψ⁰(L−α) − ln γ] + T1, strictly
    // decreasing in α, so the boundary checks below are exhaustive and
    // exclusive.
    let score = |alpha: T| {
        let dig =
            digamma(-alpha).expect("-alpha > 0") - digamma(looks - alpha).expect("L - alpha > 0");
        n * (dig - gamma.ln()) + t1
    };
    let finish = |alpha: T, iterations: usize, converged: bool, clamped: bool| FitResult {
        alpha_hat: alpha,
        gamma_hat: gamma,
        log_likelihood: ll_on(z, alpha, gamma, looks),
        converged,
        iterations,
        clamped,
    };

    let d_hi = score(alpha_hi);
    if d_hi >= T::zero() {
        return Ok(finish(alpha_hi, 1, true, true));
    }
    let d_lo = score(alpha_lo);
    if d_lo <= T::zero() {
        return Ok(finish(alpha_lo, 2, true, true));
    }

    // Newton with the exact derivative d'(α) = −n·[Ψ¹(−α) − Ψ¹(L−α)],
    // safeguarded by the (lo, hi) sign bracket.
    let mut lo = alpha_lo; // d(lo) > 0
    let mut hi = alpha_hi; // d(hi) < 0
    let mut alpha = T::c(-2.0);
    let mut d = score(alpha);
    let step_tol = T::c(1e-10).max(T::epsilon() * T::c(8.0));
    for it in 0..80 {
        if d > T::zero() {
            lo = alpha;
        } else {
            hi = alpha;
        }
        let slope = -n
            * (trigamma(-alpha).expect("-alpha > 0")
                - trigamma(looks - alpha).expect("L - alpha > 0"));
        let newton = alpha - d / slope;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / T::c(2.0)
        };
        let delta = (next - alpha).abs();
        alpha = next;
        d = score(alpha);
        if delta < step_tol || d == T::zero() {
            return Ok(finish(alpha, it + 3, true, false));
        }
    }
    Ok(finish(alpha, 83, false, false))
}

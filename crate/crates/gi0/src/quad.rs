//! Adaptive quadrature over finite intervals.
//!
//! A 7-point Gauss / 15-point Kronrod pair gives each panel's value and an
//! embedded error estimate; the panel with the worst estimate is split
//! until the summed estimate meets the requested absolute tolerance or the
//! evaluation budget runs out. Running out of budget is reported through
//! [`QuadResult::converged`], never as an error — callers that integrate
//! hard integrands (the triangular distance, notoriously) need the best
//! available value along with the honest flag.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::Scalar;

/// Kronrod abscissae on [0, 1] (symmetric about 0); last entry is the
/// center node. Values from the classical QUADPACK dqk15 tables.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching [`XGK`].
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the embedded 7-point rule (odd-indexed abscissae).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Number of integrand evaluations per Gauss–Kronrod panel.
pub const EVALS_PER_PANEL: usize = 15;

/// Controls for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T = f64> {
    /// Target for the summed absolute-error estimate.
    pub abs_tol: T,
    /// Budget of integrand evaluations (15 per panel).
    pub max_evals: usize,
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T = f64> {
    /// Best available estimate of the integral.
    pub value: T,
    /// Summed per-panel absolute-error estimate.
    pub abs_error: T,
    /// Integrand evaluations spent.
    pub evals: usize,
    /// True when `abs_error ≤ abs_tol` was reached within the budget.
    pub converged: bool,
}

/// One evaluated panel, ordered by its error estimate so a max-heap pops
/// the worst one first.
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Scalar> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Scalar> Eq for Panel<T> {}
impl<T: Scalar> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Evaluate one Gauss–Kronrod panel over [a, b].
///
/// Returns the Kronrod value and the QUADPACK-style error estimate, which
/// inflates the raw |K₁₅ − G₇| difference according to the integrand's
/// variation so that smooth-looking but under-resolved panels are not
/// trusted prematurely.
fn gk15<T: Scalar, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = T::c(0.5);
    let center = half * (a + b);
    let half_length = half * (b - a);

    let fc = f(center);
    let mut result_gauss = T::c(WG[3]) * fc;
    let mut result_kronrod = T::c(WGK[7]) * fc;
    let mut fv = [T::zero(); 14];

    for j in 0..7 {
        let offset = T::c(XGK[j]) * half_length;
        let f1 = f(center - offset);
        let f2 = f(center + offset);
        fv[j] = f1;
        fv[7 + j] = f2;
        result_kronrod = result_kronrod + T::c(WGK[j]) * (f1 + f2);
        if j % 2 == 1 {
            result_gauss = result_gauss + T::c(WG[j / 2]) * (f1 + f2);
        }
    }

    // Scale the raw K−G difference by the integrand's variation around the
    // panel mean (QUADPACK's resasc heuristic).
    let mean = result_kronrod * half;
    let mut resasc = T::c(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        resasc = resasc + T::c(WGK[j]) * ((fv[j] - mean).abs() + (fv[7 + j] - mean).abs());
    }
    resasc = resasc * half_length.abs();

    let value = result_kronrod * half_length;
    let raw = ((result_kronrod - result_gauss) * half_length).abs();
    let error = if resasc > T::zero() && raw > T::zero() {
        let scaled = (T::c(200.0) * raw / resasc).powf(T::c(1.5));
        resasc * scaled.min(T::one())
    } else {
        raw
    };
    (value, error)
}

/// Adaptively integrate `f` over the finite interval [a, b].
///
/// The worst panel (largest error estimate) is repeatedly bisected until
/// the summed estimate is at most `opts.abs_tol` or `opts.max_evals`
/// integrand evaluations have been spent. Endpoints are never evaluated —
/// all Gauss–Kronrod nodes are interior — so integrable endpoint behavior
/// is harmless. If `a > b` the value is negated accordingly.
pub fn integrate<T: Scalar, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    opts: QuadOptions<T>,
) -> QuadResult<T> {
    if a == b {
        return QuadResult {
            value: T::zero(),
            abs_error: T::zero(),
            evals: 0,
            converged: true,
        };
    }
    let (lo, hi, sign) = if a < b {
        (a, b, T::one())
    } else {
        (b, a, -T::one())
    };

    let (v0, e0) = gk15(&mut f, lo, hi);
    let mut evals = EVALS_PER_PANEL;
    let mut total_value = v0;
    let mut total_error = e0;

    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a: lo,
        b: hi,
        value: v0,
        error: e0,
    });

    while total_error > opts.abs_tol && evals + 2 * EVALS_PER_PANEL <= opts.max_evals {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = T::c(0.5) * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer splittable in this precision; put it back
            // and stop refining.
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evals += 2 * EVALS_PER_PANEL;

        total_value = total_value - worst.value + v1 + v2;
        total_error = total_error - worst.error + e1 + e2;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    QuadResult {
        value: sign * total_value,
        abs_error: total_error,
        evals,
        converged: total_error <= opts.abs_tol,
    }
}

//! Split-point edge detection along image strips.
//!
//! The detector sweeps candidate transition columns across a strip in
//! NoE-column blocks. At each candidate k it fits both sides by maximum
//! likelihood, normalizes each side by its own scale estimate, re-fits
//! the textures with the scale pinned, and converts the texture distance
//! into a two-sample test statistic weighted by the split's sample
//! sizes. The estimated transition is the block index maximizing the
//! statistic curve; a homogeneous strip shows a low, flat distance curve
//! with no preferred block.
//!
//! The per-side scale normalization makes the whole trace invariant to a
//! global brightness factor, so detection responds to texture contrast,
//! not to mean backscatter level. The flip side of estimating the scale
//! is that the statistic curve is a ranking device, not a calibrated
//! test: each re-fitted texture carries the joint fit's variance, which
//! exceeds the known-scale variance the χ²₁ asymptotics assume (9× at
//! α = −2, one look), so null sweeps routinely top the pointwise
//! critical value. Calibrated testing with a known scale lives in the
//! Monte Carlo p-value experiment.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::distance::{gd_same_scale, td, test_statistic, StatKind};
use crate::error::{domain, Result};
use crate::estimate::{fit_alpha_fixed_gamma_on, fit_ml_on};
use crate::model::{ModelParams, Sampler};
use crate::raster::Raster;

/// Recipe for a synthetic two-region strip: left columns [0, cols/2)
/// from `left`, the rest from `right`, drawn from one seeded stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripSpec {
    rows: usize,
    cols: usize,
    left: ModelParams,
    right: ModelParams,
    seed: u64,
}

impl StripSpec {
    /// Validated constructor: both laws must share the number of looks
    /// (within 1e-9), and the strip needs at least 1 row and 2 columns.
    pub fn new(
        rows: usize,
        cols: usize,
        left: ModelParams,
        right: ModelParams,
        seed: u64,
    ) -> Result<Self> {
        if (left.looks() - right.looks()).abs() > 1e-9 {
            return Err(domain!(
                "strip halves must share looks, got {} and {}",
                left.looks(),
                right.looks()
            ));
        }
        if rows == 0 || cols < 2 {
            return Err(domain!("strip must be at least 1x2, got {rows}x{cols}"));
        }
        Ok(Self { rows, cols, left, right, seed })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn left(&self) -> &ModelParams {
        &self.left
    }

    pub fn right(&self) -> &ModelParams {
        &self.right
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Per-candidate-split estimates kept for audit output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerKEstimate {
    /// Left texture re-estimated after scale normalization.
    pub alpha1_star: f64,
    /// Right texture re-estimated after scale normalization.
    pub alpha2_star: f64,
    /// Left joint-fit scale.
    pub gamma1_hat: f64,
    /// Right joint-fit scale.
    pub gamma2_hat: f64,
    /// True when any of the four fits at this split hit a texture bound.
    pub clamped: bool,
}

/// Full sweep result for one strip.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTrace {
    /// Block size in columns.
    pub noe: usize,
    /// Number of candidate splits: ⌊cols/noe⌋ − 1.
    pub k_top: usize,
    /// Strip height the trace was computed from.
    pub rows: usize,
    /// Strip width the trace was computed from.
    pub cols: usize,
    /// Texture geodesic distance per k (k = 1 at index 0).
    pub s_gd_curve: Vec<f64>,
    /// Its test statistic per k.
    pub stat_gd_curve: Vec<f64>,
    /// Triangular distance per k; `None` where the quadrature budget ran
    /// out or the distance was not requested.
    pub s_td_curve: Vec<Option<f64>>,
    /// Its test statistic per k, absent exactly where `s_td_curve` is.
    pub stat_td_curve: Vec<Option<f64>>,
    /// 1-based block index maximizing the GD statistic curve (smallest
    /// index on ties).
    pub p_hat_gd: usize,
    /// Same for the TD statistic over its converged entries; `None` when
    /// no entry converged or TD was not requested.
    pub p_hat_td: Option<usize>,
    /// Estimates behind every curve point.
    pub per_k_estimates: Vec<PerKEstimate>,
}

/// Draw the two-region strip described by `spec`, deterministically per
/// seed. Pixels fill row-major, each column choosing its side's law, so
/// a single RNG stream yields the whole image.
pub fn simulate_strip(spec: &StripSpec) -> Raster {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let left = Sampler::new(&spec.left);
    let right = Sampler::new(&spec.right);
    let half = spec.cols / 2;
    let mut values = Vec::with_capacity(spec.rows * spec.cols);
    for _ in 0..spec.rows {
        for c in 0..spec.cols {
            let sampler = if c < half { &left } else { &right };
            values.push(sampler.draw(&mut rng));
        }
    }
    Raster::new(spec.rows, spec.cols, values).expect("sampler output is positive and finite")
}

/// Sweep candidate splits over `strip` and locate the texture transition.
///
/// For every k in 1..=k_top the strip divides at column noe·k into a
/// left sample of m·noe·k pixels and a right sample of the rest. Each
/// side gets a joint (α, γ) fit; the texture is then re-fit with the
/// scale pinned at that side's γ̂ — numerically identical to dividing the
/// side by γ̂ and fitting with scale 1, since the two likelihoods differ
/// by a texture-free constant. The re-fit textures feed the geodesic
/// distance and, when `compute_td` is set, the triangular distance at
/// unit scale.
///
/// # Errors
/// Domain errors for noe = 0, looks < 1, or a strip narrower than two
/// blocks; sample-too-small propagates from the fits when noe·rows < 20.
pub fn detect_edge(strip: &Raster, noe: usize, looks: f64, compute_td: bool) -> Result<EdgeTrace> {
    if noe == 0 {
        return Err(domain!("noe must be at least 1"));
    }
    let (rows, cols) = (strip.rows(), strip.cols());
    if cols < 2 * noe {
        return Err(domain!(
            "strip of {cols} columns cannot hold two blocks of {noe}"
        ));
    }
    let k_top = cols / noe - 1;

    // Column-major copy: every candidate split is then a prefix/suffix
    // pair of one buffer, and all four fits per k run on borrowed slices.
    let row_major = strip.values();
    let mut colmajor = vec![0.0f64; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            colmajor[c * rows + r] = row_major[r * cols + c];
        }
    }

    let mut s_gd_curve = Vec::with_capacity(k_top);
    let mut stat_gd_curve = Vec::with_capacity(k_top);
    let mut s_td_curve = Vec::with_capacity(k_top);
    let mut stat_td_curve = Vec::with_capacity(k_top);
    let mut per_k_estimates = Vec::with_capacity(k_top);

    for k in 1..=k_top {
        let split = noe * k;
        let (s1, s2) = colmajor.split_at(rows * split);
        let (m1, n1) = (s1.len(), s2.len());

        let f1 = fit_ml_on(s1, looks)?;
        let f2 = fit_ml_on(s2, looks)?;
        // texture re-fit with the scale pinned at the side's own estimate
        let r1 = fit_alpha_fixed_gamma_on(s1, f1.gamma_hat, looks)?;
        let r2 = fit_alpha_fixed_gamma_on(s2, f2.gamma_hat, looks)?;

        let d = gd_same_scale(r1.alpha_hat, r2.alpha_hat, looks)?;
        let stat = test_statistic(&d, m1, n1);
        debug_assert_eq!(stat.kind, StatKind::Gd);
        s_gd_curve.push(d.value);
        stat_gd_curve.push(stat.statistic);

        if compute_td {
            let p1 = ModelParams::new(r1.alpha_hat, 1.0, looks)?;
            let p2 = ModelParams::new(r2.alpha_hat, 1.0, looks)?;
            let dt = td(&p1, &p2)?;
            if dt.converged {
                let st = test_statistic(&dt, m1, n1);
                s_td_curve.push(Some(dt.value));
                stat_td_curve.push(Some(st.statistic));
            } else {
                s_td_curve.push(None);
                stat_td_curve.push(None);
            }
        } else {
            s_td_curve.push(None);
            stat_td_curve.push(None);
        }

        per_k_estimates.push(PerKEstimate {
            alpha1_star: r1.alpha_hat,
            alpha2_star: r2.alpha_hat,
            gamma1_hat: f1.gamma_hat,
            gamma2_hat: f2.gamma_hat,
            clamped: f1.clamped || f2.clamped || r1.clamped || r2.clamped,
        });
    }

    let p_hat_gd = argmax_first(stat_gd_curve.iter().copied().map(Some)).expect("k_top >= 1");
    let p_hat_td = argmax_first(stat_td_curve.iter().copied());

    Ok(EdgeTrace {
        noe,
        k_top,
        rows,
        cols,
        s_gd_curve,
        stat_gd_curve,
        s_td_curve,
        stat_td_curve,
        p_hat_gd,
        p_hat_td,
        per_k_estimates,
    })
}

/// Traces per horizontal band plus the trailing rows that did not fill a
/// band and were therefore skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectedBands {
    /// (band index, trace) in top-to-bottom order; band b covers rows
    /// [b·band_height, (b+1)·band_height).
    pub bands: Vec<(usize, EdgeTrace)>,
    /// Row indices left over when the height is not a multiple of the
    /// band height.
    pub dropped_rows: Vec<usize>,
}

/// Run [`detect_edge`] over equal-height horizontal bands of a raster —
/// the whole-image workflow for real scenes.
///
/// # Errors
/// Domain error for band_height = 0 or a raster shorter than one band;
/// everything else as [`detect_edge`].
pub fn detect_edges_in_rows(
    raster: &Raster,
    band_height: usize,
    noe: usize,
    looks: f64,
    compute_td: bool,
) -> Result<DetectedBands> {
    if band_height == 0 {
        return Err(domain!("band height must be at least 1"));
    }
    let n_bands = raster.rows() / band_height;
    if n_bands == 0 {
        return Err(domain!(
            "raster of {} rows is shorter than one band of {band_height}",
            raster.rows()
        ));
    }
    let mut bands = Vec::with_capacity(n_bands);
    for b in 0..n_bands {
        let start = b * band_height * raster.cols();
        let end = start + band_height * raster.cols();
        let band = Raster::new(
            band_height,
            raster.cols(),
            raster.values()[start..end].to_vec(),
        )?;
        bands.push((b, detect_edge(&band, noe, looks, compute_td)?));
    }
    let dropped_rows = (n_bands * band_height..raster.rows()).collect();
    Ok(DetectedBands { bands, dropped_rows })
}

/// 1-based index of the largest present value, first on ties; `None`
/// when nothing is present.
fn argmax_first(values: impl Iterator<Item = Option<f64>>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        if let Some(v) = v {
            if best.map(|(_, b)| v > b).unwrap_or(true) {
                best = Some((i + 1, v));
            }
        }
    }
    best.map(|(i, _)| i)
}

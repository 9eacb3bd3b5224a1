//! Monte Carlo studies: mean statistic curves over simulated strips,
//! empirical test sizes, and the reference distance-curve bundles.
//!
//! Every study is fully deterministic under its seed: replication i of a
//! run draws from `base_seed + i` (or a fixed arithmetic offset of it),
//! so re-running a configuration reproduces its output bit for bit, and
//! replications could be farmed out in any order without changing the
//! aggregate.
//!
//! The strip studies simulate pure texture transitions: each half is
//! drawn with scale γ = −α − 1, making both means 1, so the sweep is
//! exercised in the regime it is built for — edges with no brightness
//! step. The empirical-size study instead tests the calibrated path:
//! textures are re-fitted with the scale held at its known value, which
//! is the setting in which the statistics are asymptotically χ²₁.

use crate::distance::{
    chi_squared1_critical, gd_same_scale, gd_same_texture, td, test_statistic, StatKind,
};
use crate::edge::{detect_edge, simulate_strip, StripSpec};
use crate::error::{domain, Result};
use crate::estimate::fit_alpha_fixed_gamma;
use crate::model::ModelParams;

/// Replication count, seed, and test level shared by the Monte Carlo
/// studies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    /// Number of replications per study cell.
    pub replications: usize,
    /// Seed of the first replication; later ones use fixed offsets.
    pub base_seed: u64,
    /// Nominal test size η for exceedance counting.
    pub nominal_level: f64,
}

impl ExperimentConfig {
    /// Validated constructor: at least one replication, level in (0, 1).
    pub fn new(replications: usize, base_seed: u64, nominal_level: f64) -> Result<Self> {
        if replications == 0 {
            return Err(domain!("at least one replication is required"));
        }
        if !(nominal_level > 0.0 && nominal_level < 1.0) {
            return Err(domain!(
                "nominal level must lie in (0, 1), got {}",
                nominal_level
            ));
        }
        Ok(Self {
            replications,
            base_seed,
            nominal_level,
        })
    }

    /// Seed for the replication at a global index.
    pub fn seed_for(&self, index: usize) -> u64 {
        self.base_seed.wrapping_add(index as u64)
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            replications: 100,
            base_seed: 1,
            nominal_level: 0.05,
        }
    }
}

/// Mean-curve study over simulated transition strips: one strip per
/// replication and (looks, α₂) cell, swept by [`detect_edge`].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCurvesStudy {
    /// Replications per (looks, α₂) cell and the seed layout.
    pub config: ExperimentConfig,
    /// Strip height in pixels.
    pub rows: usize,
    /// Strip width in pixels.
    pub cols: usize,
    /// Sweep block size in columns.
    pub noe: usize,
    /// Texture of the left half, common to all cells.
    pub alpha1: f64,
    /// Right-half textures, one mean curve per entry.
    pub alpha2_grid: Vec<f64>,
    /// Looks values, one curve family per entry.
    pub looks_grid: Vec<f64>,
    /// Also sweep the triangular distance (slower).
    pub compute_td: bool,
}

impl Default for EdgeCurvesStudy {
    /// The desk-scale strip study: 100 replications of 10×10000 strips,
    /// 500-column blocks, left texture −2 against {−2, −3, −5, −6} at
    /// one and two looks, both distances.
    fn default() -> Self {
        Self {
            config: ExperimentConfig::default(),
            rows: 10,
            cols: 10_000,
            noe: 500,
            alpha1: -2.0,
            alpha2_grid: vec![-2.0, -3.0, -5.0, -6.0],
            looks_grid: vec![1.0, 2.0],
            compute_td: true,
        }
    }
}

/// Replication-averaged statistic curve for one study cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCurve {
    /// Right-half texture of the cell.
    pub alpha2: f64,
    /// Number of looks of the cell.
    pub looks: f64,
    /// Which statistic the curve averages.
    pub kind: StatKind,
    /// Mean statistic per block k = 1..=k_top; a triangular entry is
    /// absent when the distance converged in no replication at that k.
    pub mean_stat: Vec<Option<f64>>,
}

/// Runs the strip study and averages the statistic curves per cell.
///
/// Cells are visited in (looks, α₂) grid order with the replication
/// index running fastest, and every replication takes the next seed, so
/// any change to the grids shifts the seeds — identical grids and config
/// reproduce identical curves. Triangular entries average only the
/// replications whose quadrature converged at that block.
///
/// Both halves are drawn with unit mean (γ = −α − 1, which needs every
/// grid texture below −1), so a detected transition is evidence of
/// texture contrast alone.
///
/// # Errors
/// Domain errors for an empty grid, textures ≥ −1, or strip/sweep
/// dimensions [`detect_edge`] rejects.
pub fn mc_edge_curves(study: &EdgeCurvesStudy) -> Result<Vec<MeanCurve>> {
    if study.alpha2_grid.is_empty() || study.looks_grid.is_empty() {
        return Err(domain!("texture and looks grids must be non-empty"));
    }
    let mut curves = Vec::with_capacity(2 * study.alpha2_grid.len() * study.looks_grid.len());
    let mut seed_index = 0usize;
    for &looks in &study.looks_grid {
        for &alpha2 in &study.alpha2_grid {
            let left = unit_mean_params(study.alpha1, looks)?;
            let right = unit_mean_params(alpha2, looks)?;

            let mut gd_sum: Vec<f64> = Vec::new();
            let mut td_sum: Vec<f64> = Vec::new();
            let mut td_count: Vec<usize> = Vec::new();
            for _ in 0..study.config.replications {
                let seed = study.config.seed_for(seed_index);
                seed_index += 1;
                let spec = StripSpec::new(study.rows, study.cols, left, right, seed)?;
                let strip = simulate_strip(&spec);
                let trace = detect_edge(&strip, study.noe, looks, study.compute_td)?;
                if gd_sum.is_empty() {
                    gd_sum = vec![0.0; trace.k_top];
                    td_sum = vec![0.0; trace.k_top];
                    td_count = vec![0; trace.k_top];
                }
                for (acc, s) in gd_sum.iter_mut().zip(&trace.stat_gd_curve) {
                    *acc += s;
                }
                for (k, entry) in trace.stat_td_curve.iter().enumerate() {
                    if let Some(s) = entry {
                        td_sum[k] += s;
                        td_count[k] += 1;
                    }
                }
            }

            let reps = study.config.replications as f64;
            curves.push(MeanCurve {
                alpha2,
                looks,
                kind: StatKind::Gd,
                mean_stat: gd_sum.iter().map(|&s| Some(s / reps)).collect(),
            });
            if study.compute_td {
                curves.push(MeanCurve {
                    alpha2,
                    looks,
                    kind: StatKind::Td,
                    mean_stat: td_sum
                        .iter()
                        .zip(&td_count)
                        .map(|(&s, &c)| if c > 0 { Some(s / c as f64) } else { None })
                        .collect(),
                });
            }
        }
    }
    Ok(curves)
}

/// Empirical-size study: pairs of same-law samples put through the
/// known-scale test path.
#[derive(Debug, Clone, PartialEq)]
pub struct PvaluesStudy {
    /// Replications per sample size and the seed layout.
    pub config: ExperimentConfig,
    /// Law both samples of every pair are drawn from.
    pub null_model: ModelParams,
    /// Per-sample sizes, one rate row pair per entry.
    pub sample_sizes: Vec<usize>,
}

impl Default for PvaluesStudy {
    /// Desk-scale defaults: 1000 pairs from G⁰(−2, 1, 1) at sizes 200,
    /// 500, 1000, 2000, and 5000.
    fn default() -> Self {
        Self {
            config: ExperimentConfig {
                replications: 1000,
                ..ExperimentConfig::default()
            },
            null_model: ModelParams::new_unchecked(-2.0, 1.0, 1.0),
            sample_sizes: vec![200, 500, 1000, 2000, 5000],
        }
    }
}

/// Fraction of same-law pairs a test rejected, with its binomial
/// standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionRate {
    /// Size of each sample in the pair.
    pub size: usize,
    /// Which statistic was thresholded.
    pub kind: StatKind,
    /// Rejections over evaluated pairs.
    pub rate: f64,
    /// √(r(1−r)/n) over the evaluated pairs.
    pub stderr: f64,
    /// Pairs that produced a statistic (triangular quadrature can
    /// decline to converge; those pairs are left out of the rate).
    pub evaluated: usize,
}

/// Measures how often the tests reject two samples of the same law.
///
/// Per pair, both textures are re-fitted with the scale held at the
/// known null value — the setting in which the statistics are
/// asymptotically χ²₁ — and the statistics are compared against the
/// critical value for the configured nominal level. The pair at
/// replication i of size-index j draws its two samples from seeds
/// base + 2(j·replications + i) and the successor, so every sample in
/// the study has a distinct stream.
///
/// Returns one row per (size, statistic kind), sizes in input order,
/// geodesic before triangular.
///
/// # Errors
/// Domain errors for an empty size list, a zero size, or an invalid
/// nominal level.
pub fn mc_empirical_pvalues(study: &PvaluesStudy) -> Result<Vec<RejectionRate>> {
    if study.sample_sizes.is_empty() {
        return Err(domain!("at least one sample size is required"));
    }
    if study.sample_sizes.iter().any(|&s| s == 0) {
        return Err(domain!("sample sizes must be positive"));
    }
    let critical = chi_squared1_critical(study.config.nominal_level)?;
    let null = &study.null_model;
    let looks = null.looks();

    let mut rates = Vec::with_capacity(2 * study.sample_sizes.len());
    for (size_index, &size) in study.sample_sizes.iter().enumerate() {
        let mut gd_rejects = 0usize;
        let mut td_rejects = 0usize;
        let mut td_evaluated = 0usize;
        for i in 0..study.config.replications {
            let pair_base = 2 * (size_index * study.config.replications + i);
            let x = null.sample(size, study.config.seed_for(pair_base));
            let y = null.sample(size, study.config.seed_for(pair_base + 1));
            let fit_x = fit_alpha_fixed_gamma(&x, null.gamma(), looks)?;
            let fit_y = fit_alpha_fixed_gamma(&y, null.gamma(), looks)?;

            let s = gd_same_scale(fit_x.alpha_hat, fit_y.alpha_hat, looks)?;
            if test_statistic(&s, size, size).statistic > critical {
                gd_rejects += 1;
            }

            let mx = ModelParams::new(fit_x.alpha_hat, null.gamma(), looks)?;
            let my = ModelParams::new(fit_y.alpha_hat, null.gamma(), looks)?;
            let d = td(&mx, &my)?;
            if d.converged {
                td_evaluated += 1;
                if test_statistic(&d, size, size).statistic > critical {
                    td_rejects += 1;
                }
            }
        }

        rates.push(rate_row(size, StatKind::Gd, gd_rejects, study.config.replications));
        rates.push(rate_row(size, StatKind::Td, td_rejects, td_evaluated));
    }
    Ok(rates)
}

fn rate_row(size: usize, kind: StatKind, rejects: usize, evaluated: usize) -> RejectionRate {
    let rate = if evaluated > 0 {
        rejects as f64 / evaluated as f64
    } else {
        0.0
    };
    let stderr = if evaluated > 0 {
        (rate * (1.0 - rate) / evaluated as f64).sqrt()
    } else {
        0.0
    };
    RejectionRate {
        size,
        kind,
        rate,
        stderr,
        evaluated,
    }
}

/// One sample of a reference distance curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    /// Swept coordinate: the second texture for the texture families,
    /// the second scale for the scale families.
    pub x: f64,
    /// Number of looks of the curve.
    pub looks: f64,
    /// Family the point belongs to.
    pub curve_id: &'static str,
    /// Geodesic distance at the point.
    pub gd: f64,
}

/// Reference geodesic-distance curves, four families on 0.25-step grids:
///
/// * `texture_wide` — α₁ = −8 against α₂ ∈ [−14, −2], looks 1, 2, 3, 6, 8;
/// * `texture_narrow` — α₁ = −2 against α₂ ∈ [−3.5, −1], same looks;
/// * `scale_five` — γ₁ = 5 against γ₂ ∈ [1, 10] at α = −2, looks 1, 2;
/// * `scale_ten` — γ₁ = 10 against γ₂ ∈ [1, 20] at α = −2, looks 1, 2.
///
/// Deterministic; each curve touches zero exactly where the swept
/// parameter meets the reference one.
///
/// # Errors
/// Quadrature domain errors cannot occur on these grids; the signature
/// is fallible only because the underlying distances are.
pub fn figure_curves() -> Result<Vec<CurvePoint>> {
    let texture_looks = [1.0, 2.0, 3.0, 6.0, 8.0];
    let scale_looks = [1.0, 2.0];
    let mut points = Vec::new();

    for &looks in &texture_looks {
        for &alpha2 in &grid(-14.0, -2.0) {
            let s = gd_same_scale(-8.0, alpha2, looks)?;
            points.push(CurvePoint {
                x: alpha2,
                looks,
                curve_id: "texture_wide",
                gd: s.value,
            });
        }
    }
    for &looks in &texture_looks {
        for &alpha2 in &grid(-3.5, -1.0) {
            let s = gd_same_scale(-2.0, alpha2, looks)?;
            points.push(CurvePoint {
                x: alpha2,
                looks,
                curve_id: "texture_narrow",
                gd: s.value,
            });
        }
    }
    for &looks in &scale_looks {
        for &gamma2 in &grid(1.0, 10.0) {
            let s = gd_same_texture(5.0, gamma2, -2.0, looks)?;
            points.push(CurvePoint {
                x: gamma2,
                looks,
                curve_id: "scale_five",
                gd: s.value,
            });
        }
    }
    for &looks in &scale_looks {
        for &gamma2 in &grid(1.0, 20.0) {
            let s = gd_same_texture(10.0, gamma2, -2.0, looks)?;
            points.push(CurvePoint {
                x: gamma2,
                looks,
                curve_id: "scale_ten",
                gd: s.value,
            });
        }
    }
    Ok(points)
}

/// Unit-mean law for a texture: γ = −α − 1, defined for α < −1.
fn unit_mean_params(alpha: f64, looks: f64) -> Result<ModelParams> {
    if alpha >= -1.0 {
        return Err(domain!(
            "unit-mean strips need texture below -1, got {}",
            alpha
        ));
    }
    ModelParams::new(alpha, -alpha - 1.0, looks)
}

/// Inclusive 0.25-step grid; the span must be a multiple of the step.
fn grid(lo: f64, hi: f64) -> Vec<f64> {
    let n = ((hi - lo) / 0.25).round() as usize;
    (0..=n).map(|i| lo + 0.25 * i as f64).collect()
}

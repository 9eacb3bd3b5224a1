//! The G⁰ intensity model for SAR speckle, with geodesic and triangular
//! distances between fitted models and an edge detector built on them.
//!
//! The model describes the intensity return of a speckled scene as the
//! product of Gamma-distributed speckle (its shape is the number of
//! looks L ≥ 1) and reciprocal-Gamma backscatter (texture α < 0, scale
//! γ > 0). Texture near −1 gives heavy tails — urban clutter — while
//! α → −∞ recovers homogeneous Gamma speckle. The family is closed
//! under scaling, every member has closed first moments, and its Fisher
//! information is available in closed form, which is what makes the
//! geodesic distance between two fitted laws computable and useful: for
//! samples of sizes m and n from the same law, (mn/(m+n))·s² is
//! asymptotically χ²₁, so distances between regions convert directly
//! into test statistics. The triangular distance plays the same role as
//! a cheaper-to-derive, more expensive-to-compute alternative.
//!
//! The pieces, bottom to top:
//!
//! * [`special`] — log-gamma, digamma, trigamma, regularized incomplete
//!   gamma;
//! * [`quad`] — adaptive Gauss–Kronrod quadrature;
//! * [`model`] — the law itself: density, moments, information matrix,
//!   exact sampling;
//! * [`estimate`] — profile-likelihood and fixed-scale maximum
//!   likelihood, plus the equivalent-number-of-looks moment estimator;
//! * [`distance`] — geodesic and triangular distances and their χ²₁
//!   statistics;
//! * [`edge`] — the split-point transition sweep over image strips;
//! * [`experiments`] — seeded Monte Carlo studies over the sweep and
//!   the statistics;
//! * [`raster`], [`report`] — image interchange and CSV rendering.
//!
//! Numeric kernels are generic over [`Scalar`] (`f64` by default, `f32`
//! works); the raster/edge/experiment layers are `f64`-concrete.
//!
//! ```
//! use gi0::edge::{detect_edge, simulate_strip, StripSpec};
//! use gi0::ModelParams;
//!
//! // a 5×1200 strip: heavily textured left half, smooth right half,
//! // both with unit mean, so the transition is purely textural
//! let left = ModelParams::new(-2.0, 1.0, 1.0)?;
//! let right = ModelParams::new(-8.0, 7.0, 1.0)?;
//! let strip = simulate_strip(&StripSpec::new(5, 1200, left, right, 7)?);
//!
//! // sweep 300-column blocks: k_top = 3, true transition at block 2
//! let trace = detect_edge(&strip, 300, 1.0, false)?;
//! assert_eq!(trace.p_hat_gd, 2);
//! # Ok::<(), gi0::Error>(())
//! ```

pub mod distance;
pub mod edge;
pub mod error;
pub mod estimate;
pub mod experiments;
pub mod model;
pub mod quad;
pub mod raster;
pub mod report;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use model::{IntensitySample, ModelParams};
pub use scalar::Scalar;

//! `gi0` — command-line front end for the speckle-model toolkit.
//!
//! Scalar results print to stdout as `key=value` lines with floats at six
//! decimals; tabular results are the same CSV the report module produces,
//! written to `--out PATH` when given and to stdout otherwise. Any failure
//! prints `error: <code>: <message>` to stderr and exits 1 — the code is
//! the stable, machine-matchable part, the message is for humans.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gi0::distance::{gd_same_scale, gd_same_texture, td, test_statistic};
use gi0::edge::{detect_edge, detect_edges_in_rows, simulate_strip, StripSpec};
use gi0::estimate::{estimate_enl, fit_alpha_fixed_gamma, fit_ml, FitResult};
use gi0::experiments::{
    figure_curves, mc_edge_curves, mc_empirical_pvalues, EdgeCurvesStudy, ExperimentConfig,
    PvaluesStudy,
};
use gi0::model::scale_transform;
use gi0::raster::{read_raster, write_raster, Raster, RegionSpec};
use gi0::report;
use gi0::{IntensitySample, ModelParams};

#[derive(Parser)]
#[command(
    name = "gi0",
    version,
    about = "Simulate, fit, and compare heavy-tailed speckled intensity data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a two-texture strip (left|right halves) and write it as a
    /// binary raster with sidecar.
    SimulateStrip(SimulateStripArgs),
    /// Fit the intensity model to a raster, or to a region of it, by
    /// maximum likelihood.
    Estimate(EstimateArgs),
    /// Moment-based equivalent-number-of-looks estimate for a region.
    Enl(EnlArgs),
    /// Distances between laws, given parameters or samples.
    #[command(subcommand)]
    Distance(DistanceCmd),
    /// Sweep a raster for its most likely texture transition.
    DetectEdge(DetectEdgeArgs),
    /// Monte Carlo studies over simulated strips and sample pairs.
    #[command(subcommand)]
    Mc(McCmd),
    /// Reference distance-curve bundle (texture and scale sweeps) as CSV.
    Figures(FiguresArgs),
}

#[derive(Args)]
struct SimulateStripArgs {
    /// Strip height in pixels.
    #[arg(long)]
    rows: usize,
    /// Strip width in pixels.
    #[arg(long)]
    cols: usize,
    /// Texture of the left half (negative; closer to 0 is rougher).
    #[arg(long, allow_negative_numbers = true)]
    alpha1: f64,
    /// Scale of the left half (> 0).
    #[arg(long)]
    gamma1: f64,
    /// Texture of the right half.
    #[arg(long, allow_negative_numbers = true)]
    alpha2: f64,
    /// Scale of the right half.
    #[arg(long)]
    gamma2: f64,
    /// Number of looks, shared by both halves.
    #[arg(long)]
    looks: f64,
    /// RNG seed; equal seeds give bit-identical strips.
    #[arg(long)]
    seed: u64,
    /// Output raster path; the sidecar lands next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    /// Input raster path.
    #[arg(long = "in")]
    input: PathBuf,
    /// Restrict the fit to a rectangle, as `x0,y0,width,height`.
    #[arg(long)]
    region: Option<RegionSpec>,
    /// Number of looks the data was acquired with.
    #[arg(long)]
    looks: f64,
    /// Hold the scale at this value and fit the texture alone.
    #[arg(long)]
    fix_gamma: Option<f64>,
}

#[derive(Args)]
struct EnlArgs {
    /// Input raster path.
    #[arg(long = "in")]
    input: PathBuf,
    /// Textureless region to estimate from, as `x0,y0,width,height`.
    #[arg(long)]
    region: RegionSpec,
}

#[derive(Subcommand)]
enum DistanceCmd {
    /// Texture geodesic between two laws sharing scale and looks.
    GdAlpha {
        #[arg(long, allow_negative_numbers = true)]
        alpha1: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha2: f64,
        #[arg(long)]
        looks: f64,
    },
    /// Scale geodesic between two laws sharing texture and looks.
    GdGamma {
        #[arg(long)]
        gamma1: f64,
        #[arg(long)]
        gamma2: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long)]
        looks: f64,
    },
    /// Triangular distance between two fully specified laws.
    Td {
        #[arg(long, allow_negative_numbers = true)]
        alpha1: f64,
        #[arg(long)]
        gamma1: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha2: f64,
        #[arg(long)]
        gamma2: f64,
        #[arg(long)]
        looks: f64,
    },
    /// Two-sample test: fit each raster, normalize scales away, measure
    /// the chosen distance, and attach the test statistic and p-value.
    Samples {
        /// First sample, as a raster (all pixels are used).
        #[arg(long = "in1")]
        input1: PathBuf,
        /// Second sample, as a raster.
        #[arg(long = "in2")]
        input2: PathBuf,
        #[arg(long)]
        looks: f64,
        /// Distance family to measure.
        #[arg(long, value_enum)]
        kind: DistanceKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DistanceKind {
    Gd,
    Td,
}

#[derive(Args)]
struct DetectEdgeArgs {
    /// Input raster path.
    #[arg(long = "in")]
    input: PathBuf,
    /// Block size in columns; candidate splits land on its multiples.
    #[arg(long)]
    noe: usize,
    /// Number of looks the data was acquired with.
    #[arg(long)]
    looks: f64,
    /// Sweep each horizontal band of this height separately instead of
    /// treating the whole raster as one strip.
    #[arg(long)]
    band_height: Option<usize>,
    /// Also sweep the (slower) triangular distance.
    #[arg(long)]
    td: bool,
    /// Trace CSV output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum McCmd {
    /// Mean distance-statistic curves over replicated two-texture strips.
    EdgeCurves(EdgeCurvesArgs),
    /// Empirical null rejection rates of the two-sample tests.
    Pvalues(PvaluesArgs),
}

#[derive(Args)]
struct EdgeCurvesArgs {
    /// Replications per (looks, texture) cell.
    #[arg(long, default_value_t = 100)]
    reps: usize,
    /// Seed of the first replication; the rest follow deterministically.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Strip height in pixels.
    #[arg(long, default_value_t = 10)]
    rows: usize,
    /// Strip width in pixels.
    #[arg(long, default_value_t = 10_000)]
    cols: usize,
    /// Block size in columns.
    #[arg(long, default_value_t = 500)]
    noe: usize,
    /// Also average the (much slower) triangular-distance curves.
    #[arg(long)]
    td: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PvaluesArgs {
    /// Sample pairs drawn per sample size.
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    /// Seed of the first pair; the rest follow deterministically.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Texture of the shared null law.
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    null_alpha: f64,
    /// Scale of the shared null law.
    #[arg(long, default_value_t = 1.0)]
    null_gamma: f64,
    /// Looks of the shared null law.
    #[arg(long, default_value_t = 1.0)]
    null_looks: f64,
    /// Per-sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [200, 500, 1000, 2000, 5000])]
    sizes: Vec<usize>,
    /// Nominal test size the rejection rates are counted against.
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FiguresArgs {
    /// Accepted for interface uniformity; the bundle is deterministic.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Accepted for interface uniformity; the bundle is deterministic.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}: {err}", err.code());
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> gi0::Result<()> {
    match command {
        Command::SimulateStrip(args) => run_simulate_strip(args),
        Command::Estimate(args) => run_estimate(args),
        Command::Enl(args) => run_enl(args),
        Command::Distance(cmd) => run_distance(cmd),
        Command::DetectEdge(args) => run_detect_edge(args),
        Command::Mc(McCmd::EdgeCurves(args)) => run_mc_edge_curves(args),
        Command::Mc(McCmd::Pvalues(args)) => run_mc_pvalues(args),
        Command::Figures(args) => run_figures(args),
    }
}

fn run_simulate_strip(args: SimulateStripArgs) -> gi0::Result<()> {
    let left = ModelParams::new(args.alpha1, args.gamma1, args.looks)?;
    let right = ModelParams::new(args.alpha2, args.gamma2, args.looks)?;
    let spec = StripSpec::new(args.rows, args.cols, left, right, args.seed)?;
    let raster = simulate_strip(&spec);
    write_raster(&raster, &args.out)?;
    println!("rows={}", raster.rows());
    println!("cols={}", raster.cols());
    println!("out={}", args.out.display());
    Ok(())
}

fn run_estimate(args: EstimateArgs) -> gi0::Result<()> {
    let raster = read_raster(&args.input)?;
    let sample = match &args.region {
        Some(region) => raster.region(region)?,
        None => whole_sample(&raster)?,
    };
    let fit = match args.fix_gamma {
        Some(gamma) => fit_alpha_fixed_gamma(&sample, gamma, args.looks)?,
        None => fit_ml(&sample, args.looks)?,
    };
    print_fit(sample.len(), &fit);
    Ok(())
}

fn run_enl(args: EnlArgs) -> gi0::Result<()> {
    let raster = read_raster(&args.input)?;
    let sample = raster.region(&args.region)?;
    let enl = estimate_enl(&sample)?;
    println!("n={}", sample.len());
    println!("enl={enl:.6}");
    Ok(())
}

fn run_distance(cmd: DistanceCmd) -> gi0::Result<()> {
    match cmd {
        DistanceCmd::GdAlpha { alpha1, alpha2, looks } => {
            let d = gd_same_scale(alpha1, alpha2, looks)?;
            println!("gd={:.6}", d.value);
        }
        DistanceCmd::GdGamma { gamma1, gamma2, alpha, looks } => {
            let d = gd_same_texture(gamma1, gamma2, alpha, looks)?;
            println!("gd={:.6}", d.value);
        }
        DistanceCmd::Td { alpha1, gamma1, alpha2, gamma2, looks } => {
            let p1 = ModelParams::new(alpha1, gamma1, looks)?;
            let p2 = ModelParams::new(alpha2, gamma2, looks)?;
            let d = td(&p1, &p2)?;
            println!("td={:.6}", d.value);
            println!("converged={}", d.converged);
        }
        DistanceCmd::Samples { input1, input2, looks, kind } => {
            run_distance_samples(&input1, &input2, looks, kind)?;
        }
    }
    Ok(())
}

/// Fit each sample jointly, divide it by its own fitted scale, refit the
/// texture with the scale pinned at 1, then measure the chosen distance
/// between the normalized laws — the comparison recipe the edge sweep
/// uses, applied to one pair of rasters.
fn run_distance_samples(
    input1: &Path,
    input2: &Path,
    looks: f64,
    kind: DistanceKind,
) -> gi0::Result<()> {
    let sample1 = whole_sample(&read_raster(input1)?)?;
    let sample2 = whole_sample(&read_raster(input2)?)?;
    let alpha1_star = normalized_texture(&sample1, looks)?;
    let alpha2_star = normalized_texture(&sample2, looks)?;
    let d = match kind {
        DistanceKind::Gd => gd_same_scale(alpha1_star, alpha2_star, looks)?,
        DistanceKind::Td => {
            let p1 = ModelParams::new(alpha1_star, 1.0, looks)?;
            let p2 = ModelParams::new(alpha2_star, 1.0, looks)?;
            td(&p1, &p2)?
        }
    };
    let stat = test_statistic(&d, sample1.len(), sample2.len());
    println!("kind={}", stat.kind.as_str());
    println!("m={}", stat.m);
    println!("n={}", stat.n);
    println!("alpha1_star={alpha1_star:.6}");
    println!("alpha2_star={alpha2_star:.6}");
    println!("distance={:.6}", d.value);
    println!("converged={}", d.converged);
    println!("statistic={:.6}", stat.statistic);
    println!("p_value={:.6}", stat.p_value);
    Ok(())
}

fn normalized_texture(sample: &IntensitySample<f64>, looks: f64) -> gi0::Result<f64> {
    let joint = fit_ml(sample, looks)?;
    let scaled = scale_transform(sample, joint.gamma_hat)?;
    Ok(fit_alpha_fixed_gamma(&scaled, 1.0, looks)?.alpha_hat)
}

fn run_detect_edge(args: DetectEdgeArgs) -> gi0::Result<()> {
    let raster = read_raster(&args.input)?;
    match args.band_height {
        None => {
            let trace = detect_edge(&raster, args.noe, args.looks, args.td)?;
            fs::write(&args.out, report::trace_csv(&trace))?;
            println!("p_hat_gd={}", trace.p_hat_gd);
            if args.td {
                println!("p_hat_td={}", optional_index(trace.p_hat_td));
            }
        }
        Some(height) => {
            let detected = detect_edges_in_rows(&raster, height, args.noe, args.looks, args.td)?;
            fs::write(&args.out, report::bands_csv(&detected))?;
            for (band, trace) in &detected.bands {
                if args.td {
                    println!(
                        "band={band} p_hat_gd={} p_hat_td={}",
                        trace.p_hat_gd,
                        optional_index(trace.p_hat_td)
                    );
                } else {
                    println!("band={band} p_hat_gd={}", trace.p_hat_gd);
                }
            }
        }
    }
    Ok(())
}

fn run_mc_edge_curves(args: EdgeCurvesArgs) -> gi0::Result<()> {
    let study = EdgeCurvesStudy {
        config: ExperimentConfig::new(args.reps, args.seed, 0.05)?,
        rows: args.rows,
        cols: args.cols,
        noe: args.noe,
        compute_td: args.td,
        ..EdgeCurvesStudy::default()
    };
    let curves = mc_edge_curves(&study)?;
    emit(report::mean_curves_csv(&curves), args.out.as_deref())
}

fn run_mc_pvalues(args: PvaluesArgs) -> gi0::Result<()> {
    let study = PvaluesStudy {
        config: ExperimentConfig::new(args.reps, args.seed, args.level)?,
        null_model: ModelParams::new(args.null_alpha, args.null_gamma, args.null_looks)?,
        sample_sizes: args.sizes,
    };
    let rates = mc_empirical_pvalues(&study)?;
    emit(report::rejection_rates_csv(&rates), args.out.as_deref())
}

fn run_figures(args: FiguresArgs) -> gi0::Result<()> {
    let points = figure_curves()?;
    emit(report::figure_curves_csv(&points), args.out.as_deref())
}

fn whole_sample(raster: &Raster) -> gi0::Result<IntensitySample<f64>> {
    IntensitySample::new(raster.values().to_vec())
}

fn print_fit(n: usize, fit: &FitResult) {
    println!("n={n}");
    println!("alpha_hat={:.6}", fit.alpha_hat);
    println!("gamma_hat={:.6}", fit.gamma_hat);
    println!("log_likelihood={:.6}", fit.log_likelihood);
    println!("converged={}", fit.converged);
    println!("iterations={}", fit.iterations);
    println!("clamped={}", fit.clamped);
}

fn optional_index(index: Option<usize>) -> String {
    index.map_or_else(|| "none".to_owned(), |k| k.to_string())
}

fn emit(csv: String, out: Option<&Path>) -> gi0::Result<()> {
    match out {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

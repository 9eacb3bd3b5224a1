//! CSV renderers for sweep traces and Monte Carlo results.
//!
//! All renderers return the complete file as a string — no I/O here —
//! starting with a `# format=1` version comment, then a header row, then
//! one data row per record. Numbers are written with `{}`/`{:.6}`
//! formatting, which never depends on the process locale; absent
//! triangular-distance values become empty fields so the column count
//! stays fixed.

use std::fmt::Write;

use crate::distance::DistanceValue;
use crate::edge::{DetectedBands, EdgeTrace};
use crate::experiments::{CurvePoint, MeanCurve, RejectionRate};

/// Sweep trace as `k,split_col,m1,n1,alpha1_star,alpha2_star,s_gd,
/// stat_gd,s_td,stat_td` rows, one per candidate split.
pub fn trace_csv(trace: &EdgeTrace) -> String {
    let mut out = String::from("# format=1\n");
    out.push_str("k,split_col,m1,n1,alpha1_star,alpha2_star,s_gd,stat_gd,s_td,stat_td\n");
    trace_rows(trace, &mut out);
    out
}

/// Multi-band variant of [`trace_csv`]: bands are separated by
/// `# band=<index>` comments, and any rows dropped by the banding are
/// recorded in a trailing `# dropped_rows=<start>..<end>` comment.
pub fn bands_csv(detected: &DetectedBands) -> String {
    let mut out = String::from("# format=1\n");
    out.push_str("k,split_col,m1,n1,alpha1_star,alpha2_star,s_gd,stat_gd,s_td,stat_td\n");
    for (band, trace) in &detected.bands {
        writeln!(out, "# band={band}").unwrap();
        trace_rows(trace, &mut out);
    }
    if let (Some(first), Some(last)) = (detected.dropped_rows.first(), detected.dropped_rows.last())
    {
        writeln!(out, "# dropped_rows={}..{}", first, last + 1).unwrap();
    }
    out
}

fn trace_rows(trace: &EdgeTrace, out: &mut String) {
    for k in 1..=trace.k_top {
        let i = k - 1;
        let split_col = trace.noe * k;
        let m1 = trace.rows * split_col;
        let n1 = trace.rows * (trace.cols - split_col);
        let e = &trace.per_k_estimates[i];
        write!(
            out,
            "{k},{split_col},{m1},{n1},{:.6},{:.6},{:.6},{:.6},",
            e.alpha1_star, e.alpha2_star, trace.s_gd_curve[i], trace.stat_gd_curve[i]
        )
        .unwrap();
        match (trace.s_td_curve[i], trace.stat_td_curve[i]) {
            (Some(s), Some(stat)) => writeln!(out, "{s:.6},{stat:.6}").unwrap(),
            _ => out.push_str(",\n"),
        }
    }
}

/// Mean statistic curves as `k,alpha2,looks,kind,mean_stat` rows in
/// curve order; an averaged-over-nothing triangular entry leaves the
/// value field empty.
pub fn mean_curves_csv(curves: &[MeanCurve]) -> String {
    let mut out = String::from("# format=1\n");
    out.push_str("k,alpha2,looks,kind,mean_stat\n");
    for curve in curves {
        for (i, entry) in curve.mean_stat.iter().enumerate() {
            write!(
                out,
                "{},{},{},{},",
                i + 1,
                curve.alpha2,
                curve.looks,
                curve.kind.as_str()
            )
            .unwrap();
            match entry {
                Some(v) => writeln!(out, "{v:.6}").unwrap(),
                None => out.push('\n'),
            }
        }
    }
    out
}

/// Empirical-size table as `size,kind,rejection_rate,stderr` rows.
pub fn rejection_rates_csv(rates: &[RejectionRate]) -> String {
    let mut out = String::from("# format=1\n");
    out.push_str("size,kind,rejection_rate,stderr\n");
    for r in rates {
        writeln!(
            out,
            "{},{},{:.6},{:.6}",
            r.size,
            r.kind.as_str(),
            r.rate,
            r.stderr
        )
        .unwrap();
    }
    out
}

/// One texture-distance curve as `alpha2,looks,gd` rows, pairing each
/// grid texture with its distance from the curve's reference texture.
///
/// # Panics
/// When the grid and the values disagree in length.
pub fn gd_curve_csv(alpha2_grid: &[f64], looks: f64, values: &[DistanceValue]) -> String {
    assert_eq!(alpha2_grid.len(), values.len(), "grid/curve length mismatch");
    let mut out = String::from("# format=1\n");
    out.push_str("alpha2,looks,gd\n");
    for (alpha2, v) in alpha2_grid.iter().zip(values) {
        writeln!(out, "{},{},{:.6}", alpha2, looks, v.value).unwrap();
    }
    out
}

/// Reference distance curves as `x,looks,curve_id,gd` rows.
pub fn figure_curves_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("# format=1\n");
    out.push_str("x,looks,curve_id,gd\n");
    for p in points {
        writeln!(out, "{},{},{},{:.6}", p.x, p.looks, p.curve_id, p.gd).unwrap();
    }
    out
}

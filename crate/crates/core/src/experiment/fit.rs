//! Scaling fits over sweep rows.

use std::collections::BTreeMap;

use serde::Serialize;

use super::sweep::{ModelKind, SweepRow, SCHEMA_ID};
use crate::error::{Error, Result};
use crate::kernel::theta_c;
use crate::stats::{least_squares, mean_se};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FitMode {
    /// Slope of `log ρ̄` against `log(θ - θ_c)` (`log θ` when `θ_c = 0`).
    LogLogSlope,
    /// Slope of `log ρ̄` against `1/θ`.
    InverseThetaSlope,
    /// Spread across `n` of the mean normalized largest cluster.
    NormalizedBand,
}

/// Which giant-fraction column the slope fits use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// `rho_bar_analytic` if the file has no simulated rows, else
    /// `giant_fraction`.
    #[default]
    Auto,
    Analytic,
    Simulated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandPoint {
    pub n: u64,
    pub mean: f64,
    pub se: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub schema: &'static str,
    pub mode: FitMode,
    pub kind: ModelKind,
    pub gamma: Option<f64>,
    pub theta_c: f64,
    pub rows_used: usize,
    pub quantity: Option<Quantity>,
    pub points: usize,
    pub slope: Option<f64>,
    pub slope_se: Option<f64>,
    pub intercept: Option<f64>,
    /// Per-`n` means, smallest `n` first.
    pub band: Vec<BandPoint>,
    /// Largest over smallest per-`n` mean.
    pub band_ratio: Option<f64>,
    /// Mean at the largest `n` over the smallest per-`n` mean.
    pub largest_n_ratio: Option<f64>,
}

pub fn fit(rows: &[SweepRow], mode: FitMode, quantity: Quantity) -> Result<FitReport> {
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.is_ok()).collect();
    if ok.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 usable rows, got {} of {}",
            ok.len(),
            rows.len()
        )));
    }
    let kind = ok[0].kind;
    let gamma = ok[0].gamma;
    if ok
        .iter()
        .any(|r| r.kind != kind || r.gamma.map(f64::to_bits) != gamma.map(f64::to_bits))
    {
        return Err(Error::Fit("rows mix several models or gamma values".into()));
    }
    let tc = match (kind, gamma) {
        (ModelKind::ChungLu, Some(g)) => theta_c(g)?,
        (ModelKind::ChungLu, None) => return Err(Error::Fit("Chung-Lu rows without gamma".into())),
        (ModelKind::ErdosRenyi, _) => 1.0,
    };
    let mut report = FitReport {
        schema: SCHEMA_ID,
        mode,
        kind,
        gamma,
        theta_c: tc,
        rows_used: ok.len(),
        quantity: None,
        points: 0,
        slope: None,
        slope_se: None,
        intercept: None,
        band: Vec::new(),
        band_ratio: None,
        largest_n_ratio: None,
    };
    match mode {
        FitMode::LogLogSlope | FitMode::InverseThetaSlope => {
            slope_fit(&ok, mode, quantity, &mut report)?
        }
        FitMode::NormalizedBand => band_fit(&ok, &mut report)?,
    }
    Ok(report)
}

fn slope_fit(
    rows: &[&SweepRow],
    mode: FitMode,
    quantity: Quantity,
    report: &mut FitReport,
) -> Result<()> {
    let quantity = match quantity {
        Quantity::Auto if rows.iter().any(|r| r.is_simulated()) => Quantity::Simulated,
        Quantity::Auto => Quantity::Analytic,
        q => q,
    };
    report.quantity = Some(quantity);

    // θ → values, keyed by bit pattern (θ values round-trip exactly)
    let mut by_theta: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for r in rows {
        let v = match quantity {
            Quantity::Analytic => r.rho_bar_analytic,
            _ => r.giant_fraction,
        };
        if let Some(v) = v {
            by_theta.entry(r.theta.to_bits()).or_default().push(v);
        }
    }
    let tc = report.theta_c;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (bits, values) in by_theta {
        let theta = f64::from_bits(bits);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        if !(mean > 0.0) || theta <= tc {
            continue;
        }
        xs.push(match mode {
            FitMode::LogLogSlope if tc > 0.0 => (theta - tc).ln(),
            FitMode::LogLogSlope => theta.ln(),
            _ => 1.0 / theta,
        });
        ys.push(mean.ln());
    }
    if xs.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 theta values above theta_c with a positive giant fraction, got {}",
            xs.len()
        )));
    }
    let line = least_squares(&xs, &ys, None)?;
    report.points = line.points;
    report.slope = Some(line.slope);
    report.slope_se = Some(line.slope_se);
    report.intercept = Some(line.intercept);
    Ok(())
}

fn band_fit(rows: &[&SweepRow], report: &mut FitReport) -> Result<()> {
    let mut by_n: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for r in rows {
        if let (Some(n), Some(v)) = (r.n, r.max_cluster_normalized) {
            by_n.entry(n).or_default().push(v);
        }
    }
    if by_n.len() < 2 {
        return Err(Error::Fit(format!(
            "normalized band needs at least 2 values of n, got {}",
            by_n.len()
        )));
    }
    report.band = by_n
        .into_iter()
        .map(|(n, v)| {
            let (mean, se) = mean_se(&v);
            BandPoint {
                n,
                mean,
                se,
                samples: v.len(),
            }
        })
        .collect();
    let means = report.band.iter().map(|b| b.mean);
    let lo = means.clone().fold(f64::INFINITY, f64::min);
    let hi = means.fold(f64::NEG_INFINITY, f64::max);
    let last = report.band.last().map_or(f64::NAN, |b| b.mean);
    report.points = report.band.len();
    report.band_ratio = Some(hi / lo);
    report.largest_n_ratio = Some(last / lo);
    Ok(())
}
